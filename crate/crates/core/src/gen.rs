//! Seeded graph and partition generators used by the CLI and the test
//! suites. Every generator is a pure function of its parameters and seed.

use crate::bits::VertexSet;
use crate::error::Result;
use crate::graph::DenseGraph;
use crate::partition::Partition;
use crate::ratio::{to_f64, Rat};
use crate::seed::rng_from;
use rand::seq::SliceRandom;
use rand::Rng;

/// Erdős–Rényi G(n, p).
pub fn gnp(n: usize, p: &Rat, seed: u64) -> Result<DenseGraph> {
    let mut g = DenseGraph::new(n)?;
    let mut rng = rng_from(seed);
    let pf = to_f64(p);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < pf {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Bipartite G(nu + nv, p) with edges only across the sides.
pub fn gnp_bipartite(nu: usize, nv: usize, p: &Rat, seed: u64) -> Result<DenseGraph> {
    let mut g = DenseGraph::new_bipartite(nu, nv)?;
    let mut rng = rng_from(seed);
    let pf = to_f64(p);
    for u in 0..nu {
        for v in nu..nu + nv {
            if rng.random::<f64>() < pf {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

pub fn complete(n: usize) -> Result<DenseGraph> {
    let mut g = DenseGraph::new(n)?;
    for u in 0..n {
        for v in (u + 1)..n {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

pub fn complete_bipartite(nu: usize, nv: usize) -> Result<DenseGraph> {
    let mut g = DenseGraph::new_bipartite(nu, nv)?;
    for u in 0..nu {
        for v in nu..nu + nv {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

/// The half-graph on k+k vertices: a_i ∼ b_j iff i ≤ j. The canonical
/// irregular bipartite graph.
pub fn half_graph(k: usize) -> Result<DenseGraph> {
    let mut g = DenseGraph::new_bipartite(k, k)?;
    for i in 0..k {
        for j in i..k {
            g.add_edge(i, k + j)?;
        }
    }
    Ok(g)
}

/// Perfect matching a_i ∼ b_i on k+k vertices.
pub fn perfect_matching(k: usize) -> Result<DenseGraph> {
    let mut g = DenseGraph::new_bipartite(k, k)?;
    for i in 0..k {
        g.add_edge(i, k + i)?;
    }
    Ok(g)
}

/// Even cycle C_{2k} laid out as a bipartite graph on k+k vertices.
pub fn even_cycle(k: usize) -> Result<DenseGraph> {
    let mut g = DenseGraph::new_bipartite(k, k)?;
    for i in 0..k {
        g.add_edge(i, k + i)?;
        g.add_edge(i, k + ((i + k - 1) % k))?;
    }
    Ok(g)
}

/// Uniformly random equitable bipartition of `{0,…,n-1}`, returned as the
/// set containing vertex order positions of one half.
pub fn random_equitable_bipartition(n: usize, rng: &mut impl Rng) -> VertexSet {
    debug_assert!(n % 2 == 0);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    VertexSet::from_indices(n, &ids[..n / 2])
}

/// Random partition of n vertices into exactly k nonempty classes.
pub fn random_partition(n: usize, k: usize, seed: u64) -> Result<Partition> {
    let mut rng = rng_from(seed);
    let mut labels: Vec<u32> = (0..n)
        .map(|i| if i < k { i as u32 } else { rng.random_range(0..k as u32) })
        .collect();
    labels.shuffle(&mut rng);
    Partition::from_labels(&labels)
}

/// Random equitable partition into k classes.
pub fn random_equipartition(n: usize, k: usize, seed: u64) -> Result<Partition> {
    let mut rng = rng_from(seed);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    let mut labels = vec![0u32; n];
    let base = n / k;
    let extra = n % k;
    let mut pos = 0usize;
    for c in 0..k {
        let size = base + usize::from(c < extra);
        for _ in 0..size {
            labels[ids[pos]] = c as u32;
            pos += 1;
        }
    }
    Partition::from_labels(&labels)
}

/// Random refinement of `p`: splits each class into at most `max_splits`
/// nonempty chunks.
pub fn random_refinement(p: &Partition, max_splits: usize, seed: u64) -> Result<Partition> {
    let mut rng = rng_from(seed);
    let n = p.n();
    let mut classes = Vec::new();
    for cls in p.classes() {
        let members = cls.to_indices();
        let parts = rng.random_range(1..=max_splits.min(members.len()));
        let mut assignment: Vec<usize> = (0..members.len()).map(|i| if i < parts { i } else { rng.random_range(0..parts) }).collect();
        assignment.shuffle(&mut rng);
        let mut chunks = vec![VertexSet::empty(n); parts];
        for (i, &v) in members.iter().enumerate() {
            chunks[assignment[i]].insert(v);
        }
        classes.extend(chunks.into_iter().filter(|c| !c.is_empty()));
    }
    Partition::from_classes(n, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn generators_shape() {
        let g = gnp(20, &rat(1, 2), 1).unwrap();
        assert_eq!(g.n(), 20);
        let h = half_graph(4).unwrap();
        assert_eq!(h.edge_count(), 4 + 3 + 2 + 1);
        assert!(h.has_edge(0, 4) && !h.has_edge(3, 4));
        let c = even_cycle(4).unwrap();
        assert_eq!(c.edge_count(), 8);
        assert!(c.is_degree_regular());
    }

    #[test]
    fn random_partitions_are_valid() {
        let p = random_partition(17, 5, 3).unwrap();
        assert_eq!(p.order(), 5);
        let q = random_equipartition(17, 5, 3).unwrap();
        assert!(q.is_equitable());
        let r = random_refinement(&q, 3, 4).unwrap();
        assert!(r.is_refinement(&q).unwrap());
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gnp(16, &rat(1, 3), 9).unwrap(), gnp(16, &rat(1, 3), 9).unwrap());
        assert_ne!(gnp(16, &rat(1, 2), 9).unwrap(), gnp(16, &rat(1, 2), 10).unwrap());
    }
}
