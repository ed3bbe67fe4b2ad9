//! Partition potentials and the information-theoretic machinery connecting
//! them: mean-square density, the entropy potential H(P) = Σ w·d ln d, the
//! convexity-defect lower bound via the KL/total-variation inequality, and
//! the ℓ1-vs-entropy distance relation.
//!
//! Density ratios are formed exactly and only then evaluated in f64; entropy
//! sums use compensated summation because the termination tests downstream
//! compare differences that are tiny relative to the totals.

use crate::bits::VertexSet;
use crate::error::{domain, Result};
use crate::graph::DenseGraph;
use crate::partition::Partition;
use crate::ratio::{rat_u, to_f64, xlnx, KahanSum, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Tolerance for inequality assertions (separates violations from float noise).
pub const INEQ_TOL: f64 = 1e-9;
/// Tolerance for identities.
pub const IDENT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialReport {
    pub mean_square: f64,
    pub entropy: f64,
    pub l1_distance: Option<f64>,
}

/// q(P) = Σ over ordered class pairs of (|Z_i||Z_j| / n²) · d(Z_i,Z_j)², exact.
pub fn mean_square_density(g: &DenseGraph, p: &Partition) -> Result<Rat> {
    if p.n() != g.n() {
        return domain("partition does not match the graph");
    }
    let n = g.n();
    let mut total = Rat::zero();
    for zi in p.classes() {
        for zj in p.classes() {
            let e = g.pair_count(zi, zj);
            if e == 0 {
                continue;
            }
            // (|Zi||Zj|/n²)·(e/(|Zi||Zj|))² = e²/(|Zi||Zj| n²)
            total += rat_u(e * e, zi.count() * zj.count() * n * n);
        }
    }
    Ok(total)
}

/// H(P) = Σ over ordered class pairs of (|V||V'| / n²) · d ln d, in nats.
pub fn entropy_potential(g: &DenseGraph, p: &Partition) -> Result<f64> {
    if p.n() != g.n() {
        return domain("partition does not match the graph");
    }
    let whole = VertexSet::full(g.n());
    Ok(entropy_cross_sets(g, p.classes(), p.classes(), &whole, &whole))
}

/// Cross form H(P,P') for partitions of subsets A, A':
/// Σ (|V||V'| / |A||A'|) H(d(V,V')).
pub fn entropy_cross(
    g: &DenseGraph,
    p: &[VertexSet],
    p2: &[VertexSet],
    a: &VertexSet,
    a2: &VertexSet,
) -> Result<f64> {
    let cover = |cls: &[VertexSet], of: &VertexSet| -> bool {
        let mut u = VertexSet::empty(g.n());
        for c in cls {
            u.union_with(c);
        }
        u == *of
    };
    if !cover(p, a) || !cover(p2, a2) {
        return domain("classes do not cover the stated ground sets");
    }
    Ok(entropy_cross_sets(g, p, p2, a, a2))
}

fn entropy_cross_sets(
    g: &DenseGraph,
    p: &[VertexSet],
    p2: &[VertexSet],
    a: &VertexSet,
    a2: &VertexSet,
) -> f64 {
    let denom = (a.count() * a2.count()) as f64;
    let mut sum = KahanSum::new();
    for v in p {
        let cv = v.count();
        for v2 in p2 {
            let cv2 = v2.count();
            let e = g.pair_count(v, v2);
            if e == 0 {
                continue; // H(0) = 0
            }
            let d = e as f64 / (cv * cv2) as f64;
            sum.add((cv * cv2) as f64 / denom * xlnx(d));
        }
    }
    sum.total()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DefectVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Convexity defect of x ln x: Σ p_i H(d_i) − H(d) ≥ ½ d (Σ p_i |d_i/d − 1|)²
/// where d = Σ p_i d_i ≠ 0.
pub fn defect_lower_bound(weights: &[f64], densities: &[f64]) -> Result<DefectVerdict> {
    if weights.len() != densities.len() || weights.is_empty() {
        return domain("weights and densities must be equal-length and nonempty");
    }
    if weights.iter().any(|&p| p < 0.0) || densities.iter().any(|&d| d < 0.0) {
        return domain("weights and densities must be nonnegative");
    }
    let wsum: f64 = weights.iter().sum();
    if (wsum - 1.0).abs() > 1e-9 {
        return domain("weights must sum to 1");
    }
    let d: f64 = weights.iter().zip(densities).map(|(p, x)| p * x).sum();
    if d == 0.0 {
        return domain("mean density must be nonzero");
    }
    let mut lhs = KahanSum::new();
    for (p, x) in weights.iter().zip(densities) {
        lhs.add(p * xlnx(*x));
    }
    let lhs = lhs.total() - xlnx(d);
    let l1: f64 = weights.iter().zip(densities).map(|(p, x)| p * (x / d - 1.0).abs()).sum();
    let rhs = 0.5 * d * l1 * l1;
    Ok(DefectVerdict { lhs, rhs, holds: lhs >= rhs - INEQ_TOL })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PinskerVerdict {
    pub kl: f64,
    pub tv_bound: f64,
    pub holds: bool,
}

/// KL-vs-total-variation: Σ q_i ln(q_i/p_i) ≥ ½ (Σ |q_i − p_i|)².
pub fn pinsker_check(p: &[f64], q: &[f64]) -> Result<PinskerVerdict> {
    if p.len() != q.len() || p.is_empty() {
        return domain("distributions must be equal-length and nonempty");
    }
    if (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 || (q.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return domain("inputs must be probability distributions");
    }
    if q.iter().any(|&x| x < 0.0) {
        return domain("q must be nonnegative");
    }
    let mut kl = KahanSum::new();
    for (pi, qi) in p.iter().zip(q) {
        if *qi > 0.0 {
            if *pi <= 0.0 {
                return domain("p_i = 0 with q_i > 0: divergence undefined");
            }
            kl.add(qi * (qi / pi).ln());
        }
    }
    let tv: f64 = p.iter().zip(q).map(|(pi, qi)| (qi - pi).abs()).sum();
    let bound = 0.5 * tv * tv;
    let kl = kl.total();
    Ok(PinskerVerdict { kl, tv_bound: bound, holds: kl >= bound - INEQ_TOL })
}

/// ℓ1 partition distance in edge units, exact:
/// D(Q,P) = ½ Σ_{i,j} Σ_{U ∈ Q|Vi, U' ∈ Q|Vj} |U||U'| |d(U,U') − d(V_i,V_j)|.
pub fn l1_partition_distance(g: &DenseGraph, q: &Partition, p: &Partition) -> Result<Rat> {
    if !q.is_refinement(p)? {
        return domain("l1 distance requires q to refine p");
    }
    let mut total = Rat::zero();
    for vi in p.classes() {
        let qi = q.restrict_to(vi);
        for vj in p.classes() {
            let qj = q.restrict_to(vj);
            let dij = rat_u(g.pair_count(vi, vj), vi.count() * vj.count());
            for u in &qi {
                for u2 in &qj {
                    let w = u.count() * u2.count();
                    let term = (rat_u(g.pair_count(u, u2), 1) - &dij * rat_u(w, 1)).abs();
                    total += term;
                }
            }
        }
    }
    Ok(total / rat_u(2, 1))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct L1EntropyVerdict {
    pub l1: f64,
    pub x: f64,
    pub entropy_gain: f64,
    pub required_gain: f64,
    pub holds: bool,
}

/// If D(Q,P) ≥ x·p·n² then H(Q) − H(P) ≥ 2x²p, with x = D(Q,P)/(pn²)
/// computed from the actual distance. Requires global density p > 0.
pub fn potential_vs_l1_check(g: &DenseGraph, q: &Partition, p: &Partition) -> Result<L1EntropyVerdict> {
    let dens = g.global_density();
    if dens.is_zero() {
        return domain("relation undefined at density 0");
    }
    let l1 = l1_partition_distance(g, q, p)?;
    let n = g.n();
    let x = to_f64(&(l1.clone() / (&dens * rat_u(n * n, 1))));
    let hq = entropy_potential(g, q)?;
    let hp = entropy_potential(g, p)?;
    let gain = hq - hp;
    let required = 2.0 * x * x * to_f64(&dens);
    Ok(L1EntropyVerdict {
        l1: to_f64(&l1),
        x,
        entropy_gain: gain,
        required_gain: required,
        holds: gain >= required - INEQ_TOL,
    })
}

pub fn potential_report(g: &DenseGraph, p: &Partition, q: Option<&Partition>) -> Result<PotentialReport> {
    let msq = mean_square_density(g, p)?;
    let h = entropy_potential(g, p)?;
    let l1 = match q {
        Some(qq) => Some(to_f64(&l1_partition_distance(g, qq, p)?)),
        None => None,
    };
    Ok(PotentialReport { mean_square: to_f64(&msq), entropy: h, l1_distance: l1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::ratio::rat;

    #[test]
    fn mean_square_cases() {
        let k = gen::complete(6).unwrap();
        // ordered pairs include the diagonal; within-class densities of K6
        // are (c²−c)/c² < 1, so q < 1 — test the exact value instead on K_{n,n}
        let knn = gen::complete_bipartite(4, 4).unwrap();
        let sides = Partition::from_sides(8, 4).unwrap();
        assert_eq!(mean_square_density(&knn, &sides).unwrap(), rat(1, 2));

        let e = DenseGraph::new(5).unwrap();
        assert_eq!(mean_square_density(&e, &Partition::trivial(5)).unwrap(), rat(0, 1));

        // complete graph with singleton classes: all cross densities 1
        assert_eq!(mean_square_density(&k, &Partition::singletons(6)).unwrap(), rat(30, 36));
    }

    #[test]
    fn entropy_cases() {
        // complete graph, singleton partition: every nonzero density is 1 → H = 0
        let k = gen::complete(6).unwrap();
        assert_eq!(entropy_potential(&k, &Partition::singletons(6)).unwrap(), 0.0);

        // trivial partition at global density 1/2
        let knn = gen::complete_bipartite(4, 4).unwrap();
        let h = entropy_potential(&knn, &Partition::trivial(8)).unwrap();
        assert!((h - 0.5 * 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_monotone_under_refinement() {
        for seed in 0..20u64 {
            let g = gen::gnp(18, &rat(1, 2), seed).unwrap();
            let p = gen::random_equipartition(18, 3, seed + 100).unwrap();
            let q = gen::random_refinement(&p, 3, seed + 200).unwrap();
            let hp = entropy_potential(&g, &p).unwrap();
            let hq = entropy_potential(&g, &q).unwrap();
            assert!(hq >= hp - INEQ_TOL, "H must be monotone under refinement");
            let qp = mean_square_density(&g, &p).unwrap();
            let qq = mean_square_density(&g, &q).unwrap();
            assert!(qq >= qp, "q must be monotone under refinement (exact)");
        }
    }

    #[test]
    fn entropy_bounds_hold() {
        for seed in 0..20u64 {
            let g = gen::gnp(16, &rat(1, 2), seed).unwrap();
            let p = gen::random_partition(16, 4, seed + 7).unwrap();
            let h = entropy_potential(&g, &p).unwrap();
            let dg = to_f64(&g.global_density());
            assert!(h <= 1e-12);
            assert!(h >= xlnx(dg) - INEQ_TOL);
        }
    }

    #[test]
    fn defect_cases() {
        let v = defect_lower_bound(&[0.5, 0.5], &[0.3, 0.3]).unwrap();
        assert!(v.holds && v.lhs.abs() < 1e-12 && v.rhs.abs() < 1e-12);

        let v = defect_lower_bound(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!((v.lhs - 0.5 * (2f64).ln()).abs() < 1e-12);
        assert!((v.rhs - 0.25).abs() < 1e-12);
        assert!(v.holds);

        assert!(defect_lower_bound(&[0.5, 0.5], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn pinsker_cases() {
        let v = pinsker_check(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert!(v.holds && v.kl == 0.0 && v.tv_bound == 0.0);

        let v = pinsker_check(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!((v.kl - 2f64.ln()).abs() < 1e-12);
        assert!((v.tv_bound - 0.5).abs() < 1e-12);
        assert!(v.holds);

        assert!(pinsker_check(&[0.0, 1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn l1_cases() {
        let g = gen::gnp(12, &rat(1, 2), 3).unwrap();
        let p = gen::random_equipartition(12, 3, 5).unwrap();
        assert_eq!(l1_partition_distance(&g, &p, &p).unwrap(), rat(0, 1));

        let k = gen::complete(12).unwrap();
        let q = gen::random_refinement(&p, 2, 9).unwrap();
        assert_eq!(l1_partition_distance(&k, &q, &p).unwrap(), rat(0, 1));

        // independent double-loop oracle over vertex pairs
        let q2 = gen::random_refinement(&p, 3, 11).unwrap();
        let fast = l1_partition_distance(&g, &q2, &p).unwrap();
        let slow = l1_oracle(&g, &q2, &p);
        assert_eq!(fast, slow);

        // non-refinement rejected
        let other = gen::random_equipartition(12, 5, 77).unwrap();
        if !other.is_refinement(&p).unwrap() {
            assert!(l1_partition_distance(&g, &other, &p).is_err());
        }
    }

    /// Slow second route: iterate over all ordered vertex pairs and attribute
    /// each to its (Q-class, Q-class) cell.
    fn l1_oracle(g: &DenseGraph, q: &Partition, p: &Partition) -> Rat {
        let mut total = Rat::zero();
        for u in q.classes() {
            for u2 in q.classes() {
                let vi = p.class(p.label(u.min().unwrap()) as usize);
                let vj = p.class(p.label(u2.min().unwrap()) as usize);
                let dij = rat_u(g.pair_count(vi, vj), vi.count() * vj.count());
                let duu = rat_u(g.pair_count(u, u2), u.count() * u2.count());
                total += (duu - dij).abs() * rat_u(u.count() * u2.count(), 1);
            }
        }
        total / rat_u(2, 1)
    }

    #[test]
    fn potential_vs_l1_cases() {
        let g = gen::gnp(16, &rat(1, 2), 21).unwrap();
        let p = gen::random_equipartition(16, 4, 22).unwrap();
        let v = potential_vs_l1_check(&g, &p, &p).unwrap();
        assert!(v.holds && v.l1 == 0.0);

        let k = gen::complete(10).unwrap();
        let q = Partition::singletons(10);
        let v = potential_vs_l1_check(&k, &q, &Partition::trivial(10)).unwrap();
        assert!(v.holds);

        for seed in 0..50u64 {
            let g = gen::gnp(14, &rat(1, 2), seed).unwrap();
            if g.edge_count() == 0 {
                continue;
            }
            let p = gen::random_partition(14, 3, seed + 1).unwrap();
            let q = gen::random_refinement(&p, 3, seed + 2).unwrap();
            let v = potential_vs_l1_check(&g, &q, &p).unwrap();
            assert!(v.holds, "seed {seed}: gain {} < required {}", v.entropy_gain, v.required_gain);
        }
    }

    #[test]
    fn cross_form_decomposition_identity() {
        // H(Q,Q') = Σ (|V||V'|/|A||A'|) H(Q|_V, Q'|_{V'}) to 1e-12
        for seed in 0..20u64 {
            let g = gen::gnp(15, &rat(2, 5), seed).unwrap();
            let p = gen::random_partition(15, 3, seed + 31).unwrap();
            let q = gen::random_refinement(&p, 3, seed + 32).unwrap();
            let whole = VertexSet::full(15);
            let lhs = entropy_cross(&g, q.classes(), q.classes(), &whole, &whole).unwrap();
            let mut rhs = KahanSum::new();
            let n2 = (15 * 15) as f64;
            for vi in p.classes() {
                for vj in p.classes() {
                    let qi = q.restrict_to(vi);
                    let qj = q.restrict_to(vj);
                    let h = entropy_cross(&g, &qi, &qj, vi, vj).unwrap();
                    rhs.add((vi.count() * vj.count()) as f64 / n2 * h);
                }
            }
            assert!((lhs - rhs.total()).abs() < IDENT_TOL * 100.0, "decomposition identity failed");
        }
    }

    #[test]
    fn per_pair_defect_on_refinements() {
        // the defect inequality per class pair with nonzero density
        for seed in 0..10u64 {
            let g = gen::gnp(14, &rat(1, 2), seed + 51).unwrap();
            let p = gen::random_partition(14, 3, seed + 52).unwrap();
            let q = gen::random_refinement(&p, 3, seed + 53).unwrap();
            for vi in p.classes() {
                for vj in p.classes() {
                    if g.pair_count(vi, vj) == 0 {
                        continue;
                    }
                    let qi = q.restrict_to(vi);
                    let qj = q.restrict_to(vj);
                    let denom = (vi.count() * vj.count()) as f64;
                    let mut weights = Vec::new();
                    let mut dens = Vec::new();
                    for u in &qi {
                        for u2 in &qj {
                            weights.push((u.count() * u2.count()) as f64 / denom);
                            dens.push(g.pair_count(u, u2) as f64 / (u.count() * u2.count()) as f64);
                        }
                    }
                    let v = defect_lower_bound(&weights, &dens).unwrap();
                    assert!(v.holds);
                }
            }
        }
    }
}
