//! The weak regularizer: iterated witness finding, three-way refinement and
//! equitization, driven by the mean-square density potential. Each accepted
//! step must gain at least ε⁴/2 in exact rational arithmetic, which caps the
//! iteration count at ⌈2/ε⁴⌉ and the per-step order growth at 16/ε⁴.

use crate::bits::VertexSet;
use crate::error::{internal, precondition, Result};
use crate::graph::DenseGraph;
use crate::partition::{equitize, Partition};
use crate::potential::mean_square_density;
use crate::ratio::{rat_u, to_f64, Rat};
use crate::regularity::{find_weak_witness, Mode, VerifierConfig};
use num_traits::ToPrimitive;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    WitnessExhaustion,
    IterationCap,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    pub order_before: usize,
    pub order_after: usize,
    pub q_before: f64,
    pub q_after: f64,
    pub witness_s_size: usize,
    pub witness_t_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakRegRun {
    pub iterations: Vec<IterationRecord>,
    pub final_partition: Partition,
    pub epsilon: f64,
    pub terminated_by: Termination,
    pub mode: Mode,
    /// Exact potential values bracketing each step, for downstream re-checks.
    #[serde(skip)]
    pub q_trace: Vec<(Rat, Rat)>,
}

/// ⌈8/ε⁴⌉, the block-count parameter of the equitization step.
pub fn block_count(eps: &Rat) -> usize {
    let b = rat_u(8, 1) / (eps * eps * eps * eps);
    b.ceil().to_integer().to_usize().expect("desk-scale epsilon")
}

/// ⌈2/ε⁴⌉, the iteration cap implied by unit potential range and ε⁴/2 gain.
pub fn iteration_cap(eps: &Rat) -> usize {
    let c = rat_u(2, 1) / (eps * eps * eps * eps);
    c.ceil().to_integer().to_usize().expect("desk-scale epsilon")
}

/// One refinement step: split every class along the validated witness (S,T)
/// into S/T/rest, then equitize with block size ⌊n/(bk)⌋. The potential gain
/// is asserted exactly; failure indicates an invalid witness or a bug.
pub fn refine_step(
    g: &DenseGraph,
    p: &Partition,
    s: &VertexSet,
    t: &VertexSet,
    eps: &Rat,
) -> Result<Partition> {
    let n = g.n();
    let b = block_count(eps);
    let k = p.order();

    // Three-way split {S, T, V∖(S∪T)} as a partition, then the common
    // refinement with P gives the witness-respecting refinement Q.
    let mut rest = VertexSet::full(n);
    rest.subtract(s);
    rest.subtract(t);
    let mut split_classes = vec![s.clone(), t.clone()];
    if !rest.is_empty() {
        split_classes.push(rest);
    }
    let splitter = Partition::from_classes(n, split_classes)?;
    let q = p.common_refinement(&splitter)?;

    // Block size ⌊n/(bk)⌋. The exceptional-block loss bound 4/b only covers
    // block sizes ≥ 3; below that the step degenerates to the singleton
    // refinement, which refines the witness split directly and therefore
    // gains more than ε⁴.
    let target_block = n / (b * k);
    let refined =
        if target_block >= 3 { equitize(p, &q, target_block)? } else { Partition::singletons(n) };

    let q_before = mean_square_density(g, p)?;
    let q_after = mean_square_density(g, &refined)?;
    let gain_floor = eps * eps * eps * eps / rat_u(2, 1);
    if &q_after - &q_before < gain_floor {
        return internal(format!(
            "potential gain below ε⁴/2: q {} -> {} at ε = {}",
            to_f64(&q_before),
            to_f64(&q_after),
            to_f64(eps)
        ));
    }
    if refined.order() > (b * k).max(n) {
        return internal(format!("order {} exceeds bk = {}", refined.order(), b * k));
    }

    #[cfg(debug_assertions)]
    {
        // The auxiliary partition refining both the blocks and the witness
        // split: its potential dominates q(Q), which exceeds q(P) + ε⁴.
        let aux = refined.common_refinement(&q)?;
        let q_aux = mean_square_density(g, &aux)?;
        let q_q = mean_square_density(g, &q)?;
        let floor = &q_before + eps * eps * eps * eps;
        debug_assert!(q_aux >= q_q, "auxiliary partition must dominate the witness split");
        debug_assert!(q_q > floor, "witness split must gain more than ε⁴");
    }

    Ok(refined)
}

/// Iterate witness search and refinement from an equitable seed partition
/// until no witness is found (within the chosen mode's search power) or the
/// iteration cap fires.
pub fn weak_regularize(
    g: &DenseGraph,
    p0: &Partition,
    eps: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<WeakRegRun> {
    if !p0.is_equitable() {
        return precondition("seed partition must be equitable");
    }
    if p0.n() != g.n() {
        return precondition("seed partition does not match the graph");
    }
    let cap = iteration_cap(eps);
    let mut current = p0.clone();
    let mut iterations = Vec::new();
    let mut q_trace = Vec::new();
    let terminated;
    let mut step = 0usize;
    loop {
        let witness = find_weak_witness(g, &current, eps, mode, cfg)?;
        let Some((s, t)) = witness else {
            terminated = Termination::WitnessExhaustion;
            break;
        };
        if step >= cap {
            // A validated witness after cap-many ε⁴/2 gains contradicts the
            // unit potential range.
            if mode == Mode::Exact {
                return internal(format!("iteration cap {cap} fired in exact mode"));
            }
            terminated = Termination::IterationCap;
            break;
        }
        let q_before = mean_square_density(g, &current)?;
        let next = refine_step(g, &current, &s, &t, eps)?;
        let q_after = mean_square_density(g, &next)?;
        iterations.push(IterationRecord {
            order_before: current.order(),
            order_after: next.order(),
            q_before: to_f64(&q_before),
            q_after: to_f64(&q_after),
            witness_s_size: s.count(),
            witness_t_size: t.count(),
        });
        q_trace.push((q_before, q_after));
        current = next;
        step += 1;
    }
    Ok(WeakRegRun {
        iterations,
        final_partition: current,
        epsilon: to_f64(eps),
        terminated_by: terminated,
        mode,
        q_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::ratio::rat;
    use crate::regularity::check_weak_regular;

    fn cfg() -> VerifierConfig {
        VerifierConfig { samples: 300, ..Default::default() }
    }

    #[test]
    fn block_count_values() {
        assert_eq!(block_count(&rat(1, 1)), 8);
        assert_eq!(iteration_cap(&rat(1, 1)), 2);
        assert_eq!(block_count(&rat(1, 2)), 128);
    }

    #[test]
    fn complete_bipartite_needs_no_refinement() {
        let g = gen::complete_bipartite(6, 6).unwrap();
        let p0 = Partition::from_sides(12, 6).unwrap();
        let run = weak_regularize(&g, &p0, &rat(1, 4), Mode::Exact, &cfg()).unwrap();
        assert!(run.iterations.is_empty());
        assert_eq!(run.final_partition, p0);
        assert_eq!(run.terminated_by, Termination::WitnessExhaustion);
    }

    #[test]
    fn witness_on_half_graph_found_and_validated() {
        let g = gen::half_graph(8).unwrap();
        let p = Partition::trivial(16);
        let w = find_weak_witness(&g, &p, &rat(1, 5), Mode::Exact, &cfg()).unwrap();
        let (s, t) = w.expect("half graph at ε = 0.2 must have a witness");
        let dev = crate::regularity::weak_deviation_exact(&g, &p, &s, &t);
        assert!(dev > rat(1, 5));
    }

    #[test]
    fn no_witness_on_complete_or_singletons() {
        let k = gen::complete(8).unwrap();
        let p = Partition::equitable_blocks(8, 2).unwrap();
        assert!(find_weak_witness(&k, &p, &rat(1, 10), Mode::Exact, &cfg()).unwrap().is_none());
        let g = gen::gnp(10, &rat(1, 2), 4).unwrap();
        let s = Partition::singletons(10);
        assert!(find_weak_witness(&g, &s, &rat(1, 10), Mode::Exact, &cfg()).unwrap().is_none());
    }

    #[test]
    fn refine_step_gains_potential() {
        let g = gen::half_graph(8).unwrap();
        let p = Partition::equitable_blocks(16, 2).unwrap();
        let eps = rat(3, 10);
        if let Some((s, t)) = find_weak_witness(&g, &p, &eps, Mode::Exact, &cfg()).unwrap() {
            let before = mean_square_density(&g, &p).unwrap();
            let next = refine_step(&g, &p, &s, &t, &eps).unwrap();
            let after = mean_square_density(&g, &next).unwrap();
            let gain = &after - &before;
            assert!(gain >= rat(3, 10) * rat(3, 10) * rat(3, 10) * rat(3, 10) / rat(2, 1));
            assert!(next.is_equitable());
            assert!(next.is_refinement(&p).unwrap());
            assert!(next.order() <= block_count(&eps) * p.order());
        } else {
            panic!("expected a witness on the half graph");
        }
    }

    #[test]
    fn end_to_end_exact_small() {
        let g = gen::gnp(16, &rat(1, 2), 42).unwrap();
        let p0 = Partition::equitable_blocks(16, 2).unwrap();
        let eps = rat(2, 5);
        let run = weak_regularize(&g, &p0, &eps, Mode::Exact, &cfg()).unwrap();
        assert!(run.iterations.len() <= iteration_cap(&eps));
        assert_eq!(run.terminated_by, Termination::WitnessExhaustion);
        assert!(run.final_partition.is_equitable());
        assert!(run.final_partition.is_refinement(&p0).unwrap());
        // exact certification of the final partition
        let v = check_weak_regular(&g, &run.final_partition, &eps, Mode::Exact, &cfg()).unwrap();
        assert!(v.regular);
        // order bound: |P0|·(16/ε⁴)^iters
        let growth = 16.0 / to_f64(&(&eps * &eps * &eps * &eps));
        let bound = (p0.order() as f64) * growth.powi(run.iterations.len() as i32);
        assert!((run.final_partition.order() as f64) <= bound + 0.5);
        // per-step recorded gains
        for (qb, qa) in &run.q_trace {
            assert!(qa - qb >= &eps * &eps * &eps * &eps / rat(2, 1));
        }
    }

    #[test]
    fn seed_partition_must_be_equitable() {
        let g = gen::gnp(10, &rat(1, 2), 3).unwrap();
        let labels = [0u32, 0, 0, 0, 0, 0, 0, 0, 0, 1];
        let p = Partition::from_labels(&labels).unwrap();
        assert!(weak_regularize(&g, &p, &rat(1, 2), Mode::Exact, &cfg()).is_err());
    }
}
