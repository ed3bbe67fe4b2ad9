//! Regularity verdicts: ε-regular pairs and partitions, the strengthened
//! weak-regularity check, multiplicative (ε)-regularity, codegree
//! quasirandomness, and the classical degree/slice/codegree facts as
//! executable checks.
//!
//! Exact kernels enumerate subsets of one side and select the extremal subset
//! of the other side by degree order (the average of the top-m values is the
//! maximum over all qualifying subset sizes). Sampled kernels evaluate a
//! deterministic, seed-derived candidate list; every reported witness is
//! re-validated in exact rational arithmetic, so a sampled "irregular" is a
//! certificate while a sampled "regular" is only exhaustion of the budget.

use crate::bits::VertexSet;
use crate::error::{capability, domain, precondition, Error, Result};
use crate::graph::DenseGraph;
use crate::partition::Partition;
use crate::ratio::{rat_u, to_f64, Rat};
use crate::seed::rng_for_indexed;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

/// Budgets for the verifiers. Exact thresholds bound the enumerated side.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifierConfig {
    pub exact_pair_side: usize,
    pub exact_weak_total: usize,
    pub exact_weak_bip_side: usize,
    pub samples: usize,
    pub greedy_starts: usize,
    pub seed: u64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            exact_pair_side: 18,
            exact_weak_total: 16,
            exact_weak_bip_side: 12,
            samples: 20_000,
            greedy_starts: 16,
            seed: 0,
        }
    }
}

fn rat_parts(r: &Rat) -> Result<(i128, i128)> {
    let num = r.numer().to_i128();
    let den = r.denom().to_i128();
    match (num, den) {
        (Some(n), Some(d)) if d != 0 => Ok((n, d)),
        _ => Err(Error::Domain("parameter rational does not fit machine words".into())),
    }
}

/// ⌈eps · count⌉ clamped to at least 1 (subset-size thresholds use ceiling
/// semantics; empty test sets carry no density).
pub fn ceil_threshold(eps: &Rat, count: usize) -> usize {
    let scaled = eps * rat_u(count, 1);
    let ceil = scaled.ceil();
    let v = ceil.to_integer().to_usize().unwrap_or(count);
    v.clamp(1, count.max(1))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairWitness {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub d_pair: f64,
    pub d_sub: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairVerdict {
    pub regular: bool,
    pub witness: Option<PairWitness>,
    pub mode: Mode,
    pub samples_used: usize,
    pub epsilon: f64,
    pub max_deviation: f64,
}

/// One evaluated candidate: the extremal deviation over qualifying subsets of
/// the selection side against a fixed subset of the enumeration side.
struct Extreme {
    dev: Rat,
    enum_set: Vec<usize>,
    sel_set: Vec<usize>,
    d_sub: Rat,
}

/// For a fixed candidate subset `cand` (of side `other`-opposite), find the
/// qualifying subset of `sel_members` extremizing |d − ref_d|. Exact.
fn eval_candidate(
    g: &DenseGraph,
    sel_members: &[usize],
    m_sel: usize,
    cand: &VertexSet,
    cand_size: usize,
    ref_d: &Rat,
) -> Extreme {
    let mut w: Vec<(usize, usize)> =
        sel_members.iter().map(|&v| (g.degree_into(v, cand), v)).collect();
    w.sort_unstable();
    let low: usize = w[..m_sel].iter().map(|x| x.0).sum();
    let high: usize = w[w.len() - m_sel..].iter().map(|x| x.0).sum();
    let den = m_sel * cand_size;
    let d_low = rat_u(low, den);
    let d_high = rat_u(high, den);
    let dev_low = (ref_d - &d_low).abs();
    let dev_high = (&d_high - ref_d).abs();
    let (dev, d_sub, chosen): (Rat, Rat, Vec<usize>) = if dev_high >= dev_low {
        (dev_high, d_high, w[w.len() - m_sel..].iter().map(|x| x.1).collect())
    } else {
        (dev_low, d_low, w[..m_sel].iter().map(|x| x.1).collect())
    };
    Extreme { dev, enum_set: cand.to_indices(), sel_set: chosen, d_sub }
}

/// Exact scan: enumerate all qualifying subsets of `enum_members`
/// (|enum_members| ≤ 25ish) and select the extremal subset on the other side.
/// Returns the worst deviation against `ref_d`.
fn exact_extreme_scan(
    g: &DenseGraph,
    enum_members: &[usize],
    m_enum: usize,
    sel_members: &[usize],
    m_sel: usize,
    ref_d: &Rat,
) -> Extreme {
    let t = enum_members.len();
    let (rnum, rden) = rat_parts(ref_d).expect("reference density fits i128");
    // Positions of each selection vertex's neighbors inside enum_members.
    let neigh: Vec<u32> = sel_members
        .iter()
        .map(|&s| {
            let mut m = 0u32;
            for (pos, &e) in enum_members.iter().enumerate() {
                if g.has_edge(s, e) {
                    m |= 1 << pos;
                }
            }
            m
        })
        .collect();

    let total: u32 = 1u32 << t;
    let chunk: u32 = 1 << 12;
    let ranges: Vec<(u32, u32)> =
        (0..total.div_ceil(chunk)).map(|i| (i * chunk, ((i + 1) * chunk).min(total))).collect();

    // Per-mask best tracked as an exact fraction (num/den); compare by
    // cross-multiplication. Deterministic reduce in range order.
    #[derive(Clone)]
    struct Best {
        num: i128,
        den: i128,
        mask: u32,
        sub_e: usize,
        sub_size: usize,
        hi: bool,
    }
    let better = |a: &Best, b: &Best| -> bool {
        // strictly better deviation, ties by smaller mask
        let l = a.num * b.den;
        let r = b.num * a.den;
        l > r || (l == r && a.mask < b.mask)
    };

    let best = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut counts = vec![0u32; t + 1];
            let mut local: Option<Best> = None;
            for mask in lo..hi {
                let size = mask.count_ones() as usize;
                if size < m_enum {
                    continue;
                }
                counts.iter_mut().for_each(|c| *c = 0);
                for &nm in &neigh {
                    counts[(nm & mask).count_ones() as usize] += 1;
                }
                // top-m and bottom-m degree sums from the counting sort
                let mut need = m_sel;
                let mut high_sum = 0usize;
                for val in (0..=t).rev() {
                    let take = (counts[val] as usize).min(need);
                    high_sum += take * val;
                    need -= take;
                    if need == 0 {
                        break;
                    }
                }
                let mut need = m_sel;
                let mut low_sum = 0usize;
                for (val, &ct) in counts.iter().enumerate() {
                    let take = (ct as usize).min(need);
                    low_sum += take * val;
                    need -= take;
                    if need == 0 {
                        break;
                    }
                }
                let den = (m_sel * size) as i128;
                // deviations as fractions over den·rden
                let hi_num = (high_sum as i128) * rden - rnum * den;
                let lo_num = rnum * den - (low_sum as i128) * rden;
                let (num, sub_e, is_hi) =
                    if hi_num >= lo_num { (hi_num, high_sum, true) } else { (lo_num, low_sum, false) };
                let cand = Best { num: num.max(0), den: den * rden, mask, sub_e, sub_size: size, hi: is_hi };
                if local.as_ref().is_none_or(|b| better(&cand, b)) {
                    local = Some(cand);
                }
            }
            local
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (Some(x), Some(y)) => Some(if better(&x, &y) { x } else { y }),
                (x, None) => x,
                (None, y) => y,
            },
        )
        .expect("at least the full set qualifies");

    // Reconstruct the witness subsets for the winning mask.
    let enum_set: Vec<usize> =
        (0..t).filter(|&i| best.mask & (1 << i) != 0).map(|i| enum_members[i]).collect();
    let mut w: Vec<(usize, usize)> =
        sel_members.iter().enumerate().map(|(i, &v)| ((neigh[i] & best.mask).count_ones() as usize, v)).collect();
    w.sort_unstable();
    let sel_set: Vec<usize> = if best.hi {
        w[w.len() - m_sel..].iter().map(|x| x.1).collect()
    } else {
        w[..m_sel].iter().map(|x| x.1).collect()
    };
    Extreme {
        dev: Rat::new(best.num.into(), best.den.into()),
        enum_set,
        sel_set,
        d_sub: rat_u(best.sub_e, m_sel * best.sub_size),
    }
}

fn extreme_to_witness(e: &Extreme, ref_d: &Rat, enum_is_b: bool) -> PairWitness {
    let (a, b) = if enum_is_b { (e.sel_set.clone(), e.enum_set.clone()) } else { (e.enum_set.clone(), e.sel_set.clone()) };
    PairWitness { a, b, d_pair: to_f64(ref_d), d_sub: to_f64(&e.d_sub), deviation: to_f64(&e.dev) }
}

/// ε-regularity of the pair (A,B): |d(A',B') − d(A,B)| ≤ ε for all
/// A' ⊆ A, B' ⊆ B with |A'| ≥ ⌈ε|A|⌉, |B'| ≥ ⌈ε|B|⌉.
pub fn check_pair_regular(
    g: &DenseGraph,
    a: &VertexSet,
    b: &VertexSet,
    eps: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<PairVerdict> {
    if a.is_empty() || b.is_empty() {
        return domain("pair check on an empty side");
    }
    if eps <= &Rat::zero() {
        return domain("epsilon must be positive");
    }
    let d = g.density(a, b)?;
    check_pair_against(g, a, b, &d, eps, mode, cfg)
}

/// Shared body for pair regularity (reference d(A,B), bound ε) and
/// (ε)-regularity (reference p, bound εp).
fn check_pair_against(
    g: &DenseGraph,
    a: &VertexSet,
    b: &VertexSet,
    ref_d: &Rat,
    bound: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<PairVerdict> {
    let am: Vec<usize> = a.to_indices();
    let bm: Vec<usize> = b.to_indices();
    let m_a = ceil_threshold(bound, am.len());
    let m_b = ceil_threshold(bound, bm.len());
    match mode {
        Mode::Exact => {
            if am.len().min(bm.len()) > cfg.exact_pair_side {
                return capability(format!(
                    "exact pair check needs one side ≤ {} (got {}×{}); use sampled mode",
                    cfg.exact_pair_side,
                    am.len(),
                    bm.len()
                ));
            }
            // enumerate the smaller side
            let ex = if bm.len() <= am.len() {
                exact_extreme_scan(g, &bm, m_b, &am, m_a, ref_d)
            } else {
                exact_extreme_scan(g, &am, m_a, &bm, m_b, ref_d)
            };
            let enum_is_b = bm.len() <= am.len();
            let regular = &ex.dev <= bound;
            Ok(PairVerdict {
                regular,
                witness: (!regular).then(|| extreme_to_witness(&ex, ref_d, enum_is_b)),
                mode,
                samples_used: 0,
                epsilon: to_f64(bound),
                max_deviation: to_f64(&ex.dev),
            })
        }
        Mode::Sampled => {
            let mut best: Option<(Extreme, bool)> = None;
            let mut used = 0usize;
            let consider = |e: Extreme, enum_is_b: bool, best: &mut Option<(Extreme, bool)>| {
                if best.as_ref().is_none_or(|(b0, _)| e.dev > b0.dev) {
                    *best = Some((e, enum_is_b));
                }
            };
            // Heuristic candidates: whole side, degree-sorted prefixes and
            // extremal-vertex neighbourhoods on each side.
            for (enum_is_b, em, mm, sm, ms) in
                [(true, &bm, m_b, &am, m_a), (false, &am, m_a, &bm, m_b)]
            {
                let opp: Vec<usize> = sm.clone();
                let mut by_deg: Vec<usize> = em.clone();
                let opp_set = VertexSet::from_indices(g.n(), &opp);
                by_deg.sort_by_key(|&v| (usize::MAX - g.degree_into(v, &opp_set), v));
                let mut sizes: Vec<usize> = vec![em.len(), mm, (mm + em.len()) / 2];
                sizes.push((em.len() * 3) / 4);
                sizes.retain(|&s| s >= mm && s <= em.len());
                sizes.sort_unstable();
                sizes.dedup();
                for s in sizes {
                    let cand = VertexSet::from_indices(g.n(), &by_deg[..s]);
                    used += 1;
                    consider(eval_candidate(g, sm, ms, &cand, s, ref_d), enum_is_b, &mut best);
                    let cand_lo = VertexSet::from_indices(g.n(), &by_deg[em.len() - s..]);
                    used += 1;
                    consider(eval_candidate(g, sm, ms, &cand_lo, s, ref_d), enum_is_b, &mut best);
                }
            }
            // Random candidates, half per direction.
            let mut rng = rng_for_indexed(cfg.seed, "pair-sampled", &[g.n() as u64]);
            let budget = cfg.samples;
            for i in 0..budget {
                let enum_is_b = i % 2 == 0;
                let (em, mm, sm, ms) = if enum_is_b { (&bm, m_b, &am, m_a) } else { (&am, m_a, &bm, m_b) };
                let size = rng.random_range(mm..=em.len());
                let mut ids = em.clone();
                ids.shuffle(&mut rng);
                let cand = VertexSet::from_indices(g.n(), &ids[..size]);
                used += 1;
                consider(eval_candidate(g, sm, ms, &cand, size, ref_d), enum_is_b, &mut best);
            }
            let (ex, enum_is_b) = best.expect("candidates nonempty");
            let regular = &ex.dev <= bound;
            Ok(PairVerdict {
                regular,
                witness: (!regular).then(|| extreme_to_witness(&ex, ref_d, enum_is_b)),
                mode,
                samples_used: used,
                epsilon: to_f64(bound),
                max_deviation: to_f64(&ex.dev),
            })
        }
    }
}

/// Smallest ε in `grid` (ascending) at which the pair certifies exactly.
/// Pair regularity is monotone in ε, so a linear scan suffices.
pub fn min_certified_epsilon(
    g: &DenseGraph,
    a: &VertexSet,
    b: &VertexSet,
    grid: &[Rat],
    cfg: &VerifierConfig,
) -> Result<Option<Rat>> {
    for eps in grid {
        if check_pair_regular(g, a, b, eps, Mode::Exact, cfg)?.regular {
            return Ok(Some(eps.clone()));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionVerdict {
    /// §-style equitable criterion: ≤ εk² ordered distinct irregular pairs.
    pub count_criterion: bool,
    pub irregular_pairs: usize,
    /// Weighted criterion: Σ|Z||Z'| over irregular ordered pairs (diagonal
    /// included) ≤ εn².
    pub weighted_criterion: bool,
    pub irregular_mass: usize,
    pub order: usize,
    pub epsilon: f64,
    pub mode: Mode,
}

/// Partition regularity under both of the paper's criteria. Pairs are checked
/// exactly when feasible (smaller side within the exact budget), otherwise in
/// sampled mode.
pub fn check_partition_regular(
    g: &DenseGraph,
    z: &Partition,
    eps: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<PartitionVerdict> {
    if z.n() != g.n() {
        return domain("partition does not match the graph");
    }
    let k = z.order();
    let n = g.n();
    let mut irregular_pairs = 0usize;
    let mut irregular_mass = 0usize;
    for i in 0..k {
        for j in i..k {
            let (a, b) = (z.class(i), z.class(j));
            let v = check_pair_regular(g, a, b, eps, mode, cfg)?;
            if !v.regular {
                if i != j {
                    irregular_pairs += 2;
                    irregular_mass += 2 * a.count() * b.count();
                } else {
                    irregular_mass += a.count() * b.count();
                }
            }
        }
    }
    let count_ok = rat_u(irregular_pairs, 1) <= eps * rat_u(k * k, 1);
    let weighted_ok = rat_u(irregular_mass, 1) <= eps * rat_u(n * n, 1);
    Ok(PartitionVerdict {
        count_criterion: count_ok,
        irregular_pairs,
        weighted_criterion: weighted_ok,
        irregular_mass,
        order: k,
        epsilon: to_f64(eps),
        mode,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeakVerdict {
    pub regular: bool,
    pub max_deviation: f64,
    pub witness_s: Option<Vec<usize>>,
    pub witness_t: Option<Vec<usize>>,
    pub mode: Mode,
    pub samples_used: usize,
    pub epsilon: f64,
}

/// Weighted-deviation weak regularity: for all disjoint S, T with
/// |S|,|T| ≥ ⌈ε n⌉,  Σ_{i,j} (|S_i||T_j| / |S||T|) · |d(S_i,T_j) − d(V_i,V_j)| ≤ ε.
pub fn check_weak_regular(
    g: &DenseGraph,
    p: &Partition,
    eps: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<WeakVerdict> {
    let scan = weak_scan(g, p, eps, mode, cfg, false)?;
    Ok(scan)
}

/// First validated weak-regularity witness, or None when the search (exact or
/// budgeted) finds none.
pub fn find_weak_witness(
    g: &DenseGraph,
    p: &Partition,
    eps: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<Option<(VertexSet, VertexSet)>> {
    let v = weak_scan(g, p, eps, mode, cfg, true)?;
    Ok(match (v.witness_s, v.witness_t) {
        (Some(s), Some(t)) if !v.regular => {
            Some((VertexSet::from_indices(g.n(), &s), VertexSet::from_indices(g.n(), &t)))
        }
        _ => None,
    })
}

/// Exact weak-regularity deviation of a concrete (S,T), as a rational.
pub fn weak_deviation_exact(g: &DenseGraph, p: &Partition, s: &VertexSet, t: &VertexSet) -> Rat {
    let (cs, ct) = (s.count(), t.count());
    debug_assert!(cs > 0 && ct > 0);
    let mut total = Rat::zero();
    for vi in p.classes() {
        let si = vi.intersection(s);
        let csi = si.count();
        if csi == 0 {
            continue;
        }
        for vj in p.classes() {
            let tj = vj.intersection(t);
            let ctj = tj.count();
            if ctj == 0 {
                continue;
            }
            let e_sub = g.pair_count(&si, &tj);
            let e_cls = g.pair_count(vi, vj);
            // |S_i||T_j| · |d(S_i,T_j) − d_ij| = |e(S_i,T_j) − d_ij|S_i||T_j||
            let dij = rat_u(e_cls, vi.count() * vj.count());
            let term = (rat_u(e_sub, 1) - dij * rat_u(csi * ctj, 1)).abs();
            total += term;
        }
    }
    total / rat_u(cs * ct, 1)
}

fn weak_scan(
    g: &DenseGraph,
    p: &Partition,
    eps: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
    early_exit: bool,
) -> Result<WeakVerdict> {
    if p.n() != g.n() {
        return domain("partition does not match the graph");
    }
    if eps <= &Rat::zero() {
        return domain("epsilon must be positive");
    }
    let n = g.n();
    let m = ceil_threshold(eps, n);
    let eps_f = to_f64(eps);

    // All classes singletons: every S_i is ∅ or V_i, so every deviation term
    // vanishes identically and no witness can exist.
    if p.order() == n {
        return Ok(WeakVerdict {
            regular: true,
            max_deviation: 0.0,
            witness_s: None,
            witness_t: None,
            mode,
            samples_used: 0,
            epsilon: eps_f,
        });
    }
    if 2 * m > n {
        // no disjoint qualifying pair exists
        return Ok(WeakVerdict {
            regular: true,
            max_deviation: 0.0,
            witness_s: None,
            witness_t: None,
            mode,
            samples_used: 0,
            epsilon: eps_f,
        });
    }

    match mode {
        Mode::Exact => {
            if n > cfg.exact_weak_total {
                return capability(format!(
                    "exact weak-regularity enumeration needs n ≤ {} (got {n}); use sampled mode",
                    cfg.exact_weak_total
                ));
            }
            Ok(weak_scan_exact(g, p, eps, m, early_exit))
        }
        Mode::Sampled => Ok(weak_scan_sampled(g, p, eps, m, cfg, early_exit)),
    }
}

/// Exhaustive scan over disjoint (S,T). Deviations are evaluated in f64 with
/// an exact rational recheck near the ε boundary and for the final argmax.
fn weak_scan_exact(g: &DenseGraph, p: &Partition, eps: &Rat, m: usize, early_exit: bool) -> WeakVerdict {
    let n = g.n();
    let k = p.order();
    let adj: Vec<u32> = (0..n)
        .map(|v| {
            let mut mask = 0u32;
            for u in 0..n {
                if g.has_edge(v, u) {
                    mask |= 1 << u;
                }
            }
            mask
        })
        .collect();
    let class_mask: Vec<u32> = p
        .classes()
        .iter()
        .map(|c| {
            let mut mask = 0u32;
            for v in c.iter() {
                mask |= 1 << v;
            }
            mask
        })
        .collect();
    let labels: Vec<usize> = (0..n).map(|v| p.label(v) as usize).collect();
    let dij: Vec<f64> = {
        let mut d = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                d[i * k + j] = to_f64(&g.density(p.class(i), p.class(j)).expect("nonempty"));
            }
        }
        d
    };
    let eps_f = to_f64(eps);

    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let total: u64 = 1u64 << n;
    let chunk: u64 = 1 << 12.min(n);
    let ranges: Vec<(u32, u32)> = (0..total.div_ceil(chunk))
        .map(|i| ((i * chunk) as u32, (((i + 1) * chunk).min(total)) as u32))
        .collect();

    struct Found {
        dev: Rat,
        s: u32,
        t: u32,
    }

    let scan_range = |lo: u32, hi: u32| -> Option<Found> {
        let mut best: Option<Found> = None;
        let mut e_mat = vec![0i64; k * k];
        for s_mask in lo..hi {
            if (s_mask & full) != s_mask || (s_mask.count_ones() as usize) < m {
                continue;
            }
            let s_size = s_mask.count_ones() as usize;
            let comp = full & !s_mask;
            if (comp.count_ones() as usize) < m {
                continue;
            }
            // s_i sizes and per-class S masks
            let mut s_cls = vec![0u32; k];
            {
                let mut rest = s_mask;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    s_cls[labels[v]] |= 1 << v;
                }
            }
            // enumerate T ⊆ comp with |T| ≥ m via standard submask stepping
            let mut t_mask = comp;
            loop {
                let t_size = t_mask.count_ones() as usize;
                if t_size >= m {
                    // e(S_i, T_j) for all i,j
                    e_mat.iter_mut().for_each(|x| *x = 0);
                    for i in 0..k {
                        let mut rest = s_cls[i];
                        while rest != 0 {
                            let v = rest.trailing_zeros() as usize;
                            rest &= rest - 1;
                            let nb = adj[v] & t_mask;
                            for j in 0..k {
                                e_mat[i * k + j] += (nb & class_mask[j]).count_ones() as i64;
                            }
                        }
                    }
                    let mut dev = 0.0f64;
                    for i in 0..k {
                        let s_i = (s_cls[i].count_ones()) as f64;
                        if s_i == 0.0 {
                            continue;
                        }
                        for j in 0..k {
                            let t_j = (t_mask & class_mask[j]).count_ones() as f64;
                            if t_j == 0.0 {
                                continue;
                            }
                            dev += (e_mat[i * k + j] as f64 - dij[i * k + j] * s_i * t_j).abs();
                        }
                    }
                    dev /= (s_size * t_size) as f64;
                    if dev > eps_f - 1e-9 {
                        // near or over the boundary: settle exactly
                        let sv = mask_to_set(n, s_mask);
                        let tv = mask_to_set(n, t_mask);
                        let exact = weak_deviation_exact(g, p, &sv, &tv);
                        if &exact > eps {
                            let found = Found { dev: exact, s: s_mask, t: t_mask };
                            if early_exit {
                                return Some(found);
                            }
                            let replace = best.as_ref().is_none_or(|b| {
                                found.dev > b.dev
                                    || (found.dev == b.dev && (found.s, found.t) < (b.s, b.t))
                            });
                            if replace {
                                best = Some(found);
                            }
                        }
                    }
                }
                if t_mask == 0 {
                    break;
                }
                t_mask = (t_mask - 1) & comp;
            }
        }
        best
    };

    let best = if early_exit {
        // find_first gives the deterministic earliest-range witness
        ranges.par_iter().find_map_first(|&(lo, hi)| scan_range(lo, hi))
    } else {
        ranges
            .par_iter()
            .map(|&(lo, hi)| scan_range(lo, hi))
            .reduce(
                || None,
                |a, b| match (a, b) {
                    (Some(x), Some(y)) => {
                        Some(if x.dev > y.dev || (x.dev == y.dev && (x.s, x.t) <= (y.s, y.t)) { x } else { y })
                    }
                    (x, None) => x,
                    (None, y) => y,
                },
            )
    };

    match best {
        Some(f) => WeakVerdict {
            regular: false,
            max_deviation: to_f64(&f.dev),
            witness_s: Some(mask_to_set(n, f.s).to_indices()),
            witness_t: Some(mask_to_set(n, f.t).to_indices()),
            mode: Mode::Exact,
            samples_used: 0,
            epsilon: to_f64(eps),
        },
        None => WeakVerdict {
            regular: true,
            max_deviation: 0.0,
            witness_s: None,
            witness_t: None,
            mode: Mode::Exact,
            samples_used: 0,
            epsilon: to_f64(eps),
        },
    }
}

fn mask_to_set(n: usize, mask: u32) -> VertexSet {
    let mut s = VertexSet::empty(n);
    for v in 0..n {
        if mask & (1 << v) != 0 {
            s.insert(v);
        }
    }
    s
}

/// Sampled witness search: seeded random disjoint pairs, class-aligned and
/// degree-ordered heuristics, then bounded hill-climbing from the best start.
fn weak_scan_sampled(
    g: &DenseGraph,
    p: &Partition,
    eps: &Rat,
    m: usize,
    cfg: &VerifierConfig,
    early_exit: bool,
) -> WeakVerdict {
    let n = g.n();
    let k = p.order();
    let eps_f = to_f64(eps);
    let mut used = 0usize;

    let dij: Vec<f64> = {
        let mut d = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                d[i * k + j] =
                    g.pair_count(p.class(i), p.class(j)) as f64 / (p.class(i).count() * p.class(j).count()) as f64;
            }
        }
        d
    };
    let eval = |s: &VertexSet, t: &VertexSet| -> f64 {
        let (cs, ct) = (s.count(), t.count());
        let mut dev = 0.0;
        for (i, vi) in p.classes().iter().enumerate() {
            let si = vi.intersection(s);
            let csi = si.count();
            if csi == 0 {
                continue;
            }
            for (j, vj) in p.classes().iter().enumerate() {
                let tj = vj.intersection(t);
                let ctj = tj.count();
                if ctj == 0 {
                    continue;
                }
                let e_sub = g.pair_count(&si, &tj) as f64;
                dev += (e_sub - dij[i * k + j] * (csi * ctj) as f64).abs();
            }
        }
        dev / (cs * ct) as f64
    };

    let mut best: Option<(f64, VertexSet, VertexSet)> = None;
    let track = |dev: f64, s: VertexSet, t: VertexSet, best: &mut Option<(f64, VertexSet, VertexSet)>| {
        if best.as_ref().is_none_or(|(b, _, _)| dev > *b) {
            *best = Some((dev, s, t));
        }
    };

    // validated early return
    macro_rules! try_witness {
        ($s:expr, $t:expr) => {
            if early_exit {
                let exact = weak_deviation_exact(g, p, $s, $t);
                if &exact > eps {
                    return WeakVerdict {
                        regular: false,
                        max_deviation: to_f64(&exact),
                        witness_s: Some($s.to_indices()),
                        witness_t: Some($t.to_indices()),
                        mode: Mode::Sampled,
                        samples_used: used,
                        epsilon: eps_f,
                    };
                }
            }
        };
    }

    // Heuristic: split each class by degree into the rest of its class pairs.
    let ids_by_degree = {
        let mut ids: Vec<usize> = (0..n).collect();
        ids.sort_by_key(|&v| (usize::MAX - g.degree(v), v));
        ids
    };
    let sizes = [m, (m + n / 2).min(n / 2), n / 2];
    for &ssize in &sizes {
        if ssize < m || 2 * ssize > n {
            continue;
        }
        let s = VertexSet::from_indices(n, &ids_by_degree[..ssize]);
        let t = VertexSet::from_indices(n, &ids_by_degree[n - ssize..]);
        if s.is_disjoint(&t) {
            used += 1;
            let dev = eval(&s, &t);
            if dev > eps_f - 1e-9 {
                try_witness!(&s, &t);
            }
            track(dev, s, t, &mut best);
        }
    }

    let mut rng = rng_for_indexed(cfg.seed, "weak-sampled", &[n as u64, k as u64]);
    let budget = cfg.samples;
    for _ in 0..budget {
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut rng);
        let smax = n - m;
        let ssize = rng.random_range(m..=smax.min(n / 2).max(m));
        let tmax = n - ssize;
        let tsize = rng.random_range(m..=tmax);
        let s = VertexSet::from_indices(n, &ids[..ssize]);
        let t = VertexSet::from_indices(n, &ids[ssize..ssize + tsize]);
        used += 1;
        let dev = eval(&s, &t);
        if dev > eps_f - 1e-9 {
            try_witness!(&s, &t);
        }
        track(dev, s, t, &mut best);
    }

    // Hill-climb from the best candidate: single-vertex moves.
    if let Some((mut cur_dev, mut s, mut t)) = best.clone() {
        if n <= 1024 && k <= 64 {
            for _pass in 0..2 {
                let mut improved = false;
                for v in 0..n {
                    let in_s = s.contains(v);
                    let in_t = t.contains(v);
                    let mut moves: Vec<(bool, bool)> = Vec::new();
                    if !in_s && !in_t {
                        moves.push((true, false));
                        moves.push((false, true));
                    } else if in_s && s.count() > m {
                        moves.push((false, false));
                        moves.push((false, true));
                    } else if in_t && t.count() > m {
                        moves.push((false, false));
                        moves.push((true, false));
                    }
                    for (to_s, to_t) in moves {
                        let mut s2 = s.clone();
                        let mut t2 = t.clone();
                        s2.remove(v);
                        t2.remove(v);
                        if to_s {
                            s2.insert(v);
                        }
                        if to_t {
                            t2.insert(v);
                        }
                        if s2.count() < m || t2.count() < m {
                            continue;
                        }
                        used += 1;
                        let dev = eval(&s2, &t2);
                        if dev > cur_dev + 1e-12 {
                            cur_dev = dev;
                            s = s2;
                            t = t2;
                            improved = true;
                            if dev > eps_f - 1e-9 {
                                try_witness!(&s, &t);
                            }
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            track(cur_dev, s, t, &mut best);
        }
    }

    // Final verdict from the best candidate, settled exactly at the boundary.
    let (dev_f, s, t) = best.expect("candidates nonempty");
    let exact = weak_deviation_exact(g, p, &s, &t);
    let regular = &exact <= eps;
    let _ = dev_f;
    WeakVerdict {
        regular,
        max_deviation: to_f64(&exact),
        witness_s: (!regular).then(|| s.to_indices()),
        witness_t: (!regular).then(|| t.to_indices()),
        mode: Mode::Sampled,
        samples_used: used,
        epsilon: eps_f,
    }
}

/// Bipartite weak regularity (the perturbation lemma's hypothesis): S ⊆ A,
/// T ⊆ B with |S| ≥ ⌈ε|A|⌉, |T| ≥ ⌈ε|B|⌉, same weighted deviation bound
/// against the A×B class-pair densities.
pub fn check_weak_regular_bipartite(
    g: &DenseGraph,
    a_classes: &[VertexSet],
    b_classes: &[VertexSet],
    eps: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<WeakVerdict> {
    if !g.is_bipartite() {
        return domain("bipartite weak-regularity check on a non-bipartite graph");
    }
    let a: VertexSet = union_all(g.n(), a_classes);
    let b: VertexSet = union_all(g.n(), b_classes);
    if a.is_empty() || b.is_empty() || !a.is_disjoint(&b) {
        return domain("class systems must partition disjoint sides");
    }
    let am = a.to_indices();
    let bm = b.to_indices();
    let m_a = ceil_threshold(eps, am.len());
    let m_b = ceil_threshold(eps, bm.len());
    let eps_f = to_f64(eps);

    // deviation of a concrete (S ⊆ A, T ⊆ B)
    let exact_dev = |s: &VertexSet, t: &VertexSet| -> Rat {
        let (cs, ct) = (s.count(), t.count());
        let mut total = Rat::zero();
        for ai in a_classes {
            let si = ai.intersection(s);
            if si.is_empty() {
                continue;
            }
            for bj in b_classes {
                let tj = bj.intersection(t);
                if tj.is_empty() {
                    continue;
                }
                let dij = rat_u(g.pair_count(ai, bj), ai.count() * bj.count());
                let term =
                    (rat_u(g.pair_count(&si, &tj), 1) - dij * rat_u(si.count() * tj.count(), 1)).abs();
                total += term;
            }
        }
        total / rat_u(cs * ct, 1)
    };
    let f64_dev = |s: &VertexSet, t: &VertexSet| -> f64 {
        let (cs, ct) = (s.count(), t.count());
        let mut dev = 0.0;
        for ai in a_classes {
            let si = ai.intersection(s);
            let csi = si.count();
            if csi == 0 {
                continue;
            }
            for bj in b_classes {
                let tj = bj.intersection(t);
                let ctj = tj.count();
                if ctj == 0 {
                    continue;
                }
                let dij = g.pair_count(ai, bj) as f64 / (ai.count() * bj.count()) as f64;
                dev += (g.pair_count(&si, &tj) as f64 - dij * (csi * ctj) as f64).abs();
            }
        }
        dev / (cs * ct) as f64
    };

    match mode {
        Mode::Exact => {
            if am.len() > cfg.exact_weak_bip_side || bm.len() > cfg.exact_weak_bip_side {
                return capability(format!(
                    "exact bipartite weak-regularity needs sides ≤ {} (got {}×{})",
                    cfg.exact_weak_bip_side,
                    am.len(),
                    bm.len()
                ));
            }
            let mut best: Option<(Rat, VertexSet, VertexSet)> = None;
            for smask in 0u32..(1u32 << am.len()) {
                if (smask.count_ones() as usize) < m_a {
                    continue;
                }
                let s = positions_to_set(g.n(), &am, smask);
                for tmask in 0u32..(1u32 << bm.len()) {
                    if (tmask.count_ones() as usize) < m_b {
                        continue;
                    }
                    let t = positions_to_set(g.n(), &bm, tmask);
                    let dev = f64_dev(&s, &t);
                    let boundary = dev > eps_f - 1e-9;
                    if boundary || best.as_ref().is_none_or(|(b, _, _)| dev > to_f64(b)) {
                        let exact = exact_dev(&s, &t);
                        if best.as_ref().is_none_or(|(b, _, _)| &exact > b) {
                            best = Some((exact, s.clone(), t.clone()));
                        }
                    }
                }
            }
            let (dev, s, t) = best.expect("full sides qualify");
            let regular = &dev <= eps;
            Ok(WeakVerdict {
                regular,
                max_deviation: to_f64(&dev),
                witness_s: (!regular).then(|| s.to_indices()),
                witness_t: (!regular).then(|| t.to_indices()),
                mode,
                samples_used: 0,
                epsilon: eps_f,
            })
        }
        Mode::Sampled => {
            let mut rng = rng_for_indexed(cfg.seed, "weak-bip-sampled", &[am.len() as u64, bm.len() as u64]);
            let mut best: Option<(f64, VertexSet, VertexSet)> = None;
            let mut used = 0usize;
            for _ in 0..cfg.samples {
                let ssize = rng.random_range(m_a..=am.len());
                let tsize = rng.random_range(m_b..=bm.len());
                let mut aa = am.clone();
                aa.shuffle(&mut rng);
                let mut bb = bm.clone();
                bb.shuffle(&mut rng);
                let s = VertexSet::from_indices(g.n(), &aa[..ssize]);
                let t = VertexSet::from_indices(g.n(), &bb[..tsize]);
                used += 1;
                let dev = f64_dev(&s, &t);
                if best.as_ref().is_none_or(|(b, _, _)| dev > *b) {
                    best = Some((dev, s, t));
                }
            }
            let (_, s, t) = best.expect("candidates nonempty");
            let exact = exact_dev(&s, &t);
            let regular = &exact <= eps;
            Ok(WeakVerdict {
                regular,
                max_deviation: to_f64(&exact),
                witness_s: (!regular).then(|| s.to_indices()),
                witness_t: (!regular).then(|| t.to_indices()),
                mode,
                samples_used: used,
                epsilon: eps_f,
            })
        }
    }
}

fn union_all(n: usize, sets: &[VertexSet]) -> VertexSet {
    let mut u = VertexSet::empty(n);
    for s in sets {
        u.union_with(s);
    }
    u
}

fn positions_to_set(n: usize, members: &[usize], mask: u32) -> VertexSet {
    let mut s = VertexSet::empty(n);
    for (pos, &v) in members.iter().enumerate() {
        if mask & (1 << pos) != 0 {
            s.insert(v);
        }
    }
    s
}

/// Multiplicative regularity of a bipartite graph: |d(A,B) − p| ≤ εp for all
/// A ⊆ U, B ⊆ V with |A| ≥ ⌈ε|U|⌉, |B| ≥ ⌈ε|V|⌉.
pub fn check_super_regular(
    g: &DenseGraph,
    eps: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<PairVerdict> {
    let (u, v) = g.sides().ok_or_else(|| Error::Domain("multiplicative check needs a bipartite graph".into()))?;
    let p = g.bipartite_density()?;
    if p.is_zero() {
        return domain("multiplicative regularity undefined at density 0");
    }
    let bound = eps * &p;
    // Same kernel as pair regularity, with reference p, bound εp, and size
    // thresholds from ε (not εp).
    let am = u.to_indices();
    let bm = v.to_indices();
    let m_a = ceil_threshold(eps, am.len());
    let m_b = ceil_threshold(eps, bm.len());
    check_pair_sized(g, &am, &bm, m_a, m_b, &p, &bound, mode, cfg)
}

#[allow(clippy::too_many_arguments)]
fn check_pair_sized(
    g: &DenseGraph,
    am: &[usize],
    bm: &[usize],
    m_a: usize,
    m_b: usize,
    ref_d: &Rat,
    bound: &Rat,
    mode: Mode,
    cfg: &VerifierConfig,
) -> Result<PairVerdict> {
    match mode {
        Mode::Exact => {
            if am.len().min(bm.len()) > cfg.exact_pair_side {
                return capability(format!(
                    "exact subset scan needs one side ≤ {} (got {}×{})",
                    cfg.exact_pair_side,
                    am.len(),
                    bm.len()
                ));
            }
            let enum_is_b = bm.len() <= am.len();
            let ex = if enum_is_b {
                exact_extreme_scan(g, bm, m_b, am, m_a, ref_d)
            } else {
                exact_extreme_scan(g, am, m_a, bm, m_b, ref_d)
            };
            let regular = &ex.dev <= bound;
            Ok(PairVerdict {
                regular,
                witness: (!regular).then(|| extreme_to_witness(&ex, ref_d, enum_is_b)),
                mode,
                samples_used: 0,
                epsilon: to_f64(bound),
                max_deviation: to_f64(&ex.dev),
            })
        }
        Mode::Sampled => {
            let mut best: Option<(Extreme, bool)> = None;
            let mut used = 0usize;
            let mut rng = rng_for_indexed(cfg.seed, "super-sampled", &[g.n() as u64]);
            // degree-prefix heuristics both directions
            for (enum_is_b, em, mm, sm, ms) in
                [(true, bm, m_b, am, m_a), (false, am, m_a, bm, m_b)]
            {
                let opp_set = VertexSet::from_indices(g.n(), sm);
                let mut by_deg: Vec<usize> = em.to_vec();
                by_deg.sort_by_key(|&w| (usize::MAX - g.degree_into(w, &opp_set), w));
                for &s in &[mm, em.len() / 2, em.len()] {
                    if s < mm || s > em.len() || s == 0 {
                        continue;
                    }
                    for ids in [&by_deg[..s], &by_deg[em.len() - s..]] {
                        let cand = VertexSet::from_indices(g.n(), ids);
                        used += 1;
                        let e = eval_candidate(g, sm, ms, &cand, s, ref_d);
                        if best.as_ref().is_none_or(|(b, _)| e.dev > b.dev) {
                            best = Some((e, enum_is_b));
                        }
                    }
                }
            }
            for i in 0..cfg.samples {
                let enum_is_b = i % 2 == 0;
                let (em, mm, sm, ms) = if enum_is_b { (bm, m_b, am, m_a) } else { (am, m_a, bm, m_b) };
                let size = rng.random_range(mm..=em.len());
                let mut ids = em.to_vec();
                ids.shuffle(&mut rng);
                let cand = VertexSet::from_indices(g.n(), &ids[..size]);
                used += 1;
                let e = eval_candidate(g, sm, ms, &cand, size, ref_d);
                if best.as_ref().is_none_or(|(b, _)| e.dev > b.dev) {
                    best = Some((e, enum_is_b));
                }
            }
            let (ex, enum_is_b) = best.expect("candidates nonempty");
            let regular = &ex.dev <= bound;
            Ok(PairVerdict {
                regular,
                witness: (!regular).then(|| extreme_to_witness(&ex, ref_d, enum_is_b)),
                mode,
                samples_used: used,
                epsilon: to_f64(bound),
                max_deviation: to_f64(&ex.dev),
            })
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasirandomVerdict {
    pub quasirandom: bool,
    pub bad_pairs: usize,
    pub allowed_pairs: f64,
    pub codegree_threshold: f64,
    pub delta: f64,
}

/// Codegree quasirandomness of a degree-regular bipartite graph: all but
/// δ|U|² ordered pairs (u,u') ∈ U² (diagonal included, with codeg(u,u) read
/// as deg(u)) satisfy codeg(u,u') ≤ (1+δ)p²|V|. Exact sweep.
pub fn check_quasirandom(g: &DenseGraph, p: &Rat, delta: &Rat) -> Result<QuasirandomVerdict> {
    let (u, v) = g.sides().ok_or_else(|| Error::Domain("quasirandomness needs a bipartite graph".into()))?;
    if !g.is_degree_regular() {
        return precondition("quasirandomness is defined for degree-regular bipartite graphs");
    }
    if &g.bipartite_density()? != p {
        return precondition("stated density does not match the graph");
    }
    let um = u.to_indices();
    let nv = v.count();
    // threshold: codeg ≤ (1+δ) p² |V|, exact rational comparison
    let thr = (Rat::from_integer(1.into()) + delta) * p * p * rat_u(nv, 1);
    let bad: usize = um
        .par_iter()
        .map(|&x| {
            let mut local = 0usize;
            for &y in &um {
                let c = if x == y {
                    g.degree(x)
                } else {
                    g.codegree(x, y, &v).expect("distinct")
                };
                if rat_u(c, 1) > thr {
                    local += 1;
                }
            }
            local
        })
        .sum();
    let allowed = delta * rat_u(um.len() * um.len(), 1);
    Ok(QuasirandomVerdict {
        quasirandom: rat_u(bad, 1) <= allowed,
        bad_pairs: bad,
        allowed_pairs: to_f64(&allowed),
        codegree_threshold: to_f64(&thr),
        delta: to_f64(delta),
    })
}

/// Smallest δ at which the graph is (p,δ)-quasirandom: scans the candidate
/// breakpoints of the two coupled conditions. Exact.
pub fn measure_quasirandomness(g: &DenseGraph, p: &Rat) -> Result<Rat> {
    let (u, v) = g.sides().ok_or_else(|| Error::Domain("quasirandomness needs a bipartite graph".into()))?;
    if !g.is_degree_regular() {
        return precondition("quasirandomness is defined for degree-regular bipartite graphs");
    }
    let um = u.to_indices();
    let nv = v.count();
    let base = p * p * rat_u(nv, 1); // p²|V|
    if base.is_zero() {
        return Ok(Rat::zero());
    }
    // excess(u,u') = codeg/(p²|V|) − 1, clamped at 0
    let mut excesses: Vec<Rat> = um
        .par_iter()
        .map(|&x| {
            let mut local = Vec::with_capacity(um.len());
            for &y in &um {
                let c = if x == y { g.degree(x) } else { g.codegree(x, y, &v).expect("distinct") };
                let e = rat_u(c, 1) / &base - Rat::from_integer(1.into());
                local.push(if e.is_negative() { Rat::zero() } else { e });
            }
            local
        })
        .flatten()
        .collect();
    excesses.sort_unstable_by(|a, b| b.cmp(a));
    let total = um.len() * um.len();
    // δ feasible iff #pairs with excess > δ ≤ δ·total. Minimal over the
    // breakpoints: for each prefix length t, candidate δ = max(excess_{t+1}, t/total).
    let mut best: Option<Rat> = None;
    for t in 0..=excesses.len() {
        let frac = rat_u(t, total);
        let floor_candidate = if t < excesses.len() { excesses[t].clone() } else { Rat::zero() };
        let cand = if frac > floor_candidate { frac } else { floor_candidate };
        let violating = excesses.iter().take_while(|e| **e > cand).count();
        if rat_u(violating, total) <= cand {
            best = Some(match best {
                Some(b) if b <= cand => b,
                _ => cand,
            });
        }
    }
    Ok(best.expect("delta = max excess is always feasible"))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactsReport {
    pub degree_exceptional: usize,
    pub degree_allowed: usize,
    pub degree_ok: bool,
    pub slices_checked: usize,
    pub slices_ok: bool,
    pub codegree_bad_pairs: Option<usize>,
    pub codegree_allowed: Option<f64>,
    pub codegree_ok: Option<bool>,
}

/// Executable versions of the degree / slice / codegree facts for
/// (ε,d)-regular pairs, on a tripartite instance (A,C) and (B,C).
///
/// - degree: all but 2ε|C| vertices of C have |N·∩A| within (d ± ε)|A|;
/// - slice: random subsets A' ⊆ A, C' ⊆ C of fractional size ≥ α stay
///   (2ε/α, d ± ε)-regular (verified exactly);
/// - codegree: with ε' = 6ε/d, all but ε'|A||B| pairs (a,b) ∈ A×B have
///   |N(a)∩N(b)∩C| within (dd' ± ε')|C|. Skipped when d = 0.
pub fn appendix_facts_suite(
    g: &DenseGraph,
    a: &VertexSet,
    b: &VertexSet,
    c: &VertexSet,
    eps: &Rat,
    alpha: &Rat,
    seed: u64,
    cfg: &VerifierConfig,
) -> Result<FactsReport> {
    let vac = check_pair_regular(g, a, c, eps, Mode::Exact, cfg)?;
    let vbc = check_pair_regular(g, b, c, eps, Mode::Exact, cfg)?;
    if !vac.regular || !vbc.regular {
        return precondition("input pairs are not exactly ε-regular at the stated ε");
    }
    if alpha < eps {
        return precondition("slice fraction α must be at least ε");
    }
    let d = g.density(a, c)?;
    let d2 = g.density(b, c)?;

    // degree fact on (A, C): exceptional vertices of C
    let ca = a.count();
    let lo = (&d - eps) * rat_u(ca, 1);
    let hi = (&d + eps) * rat_u(ca, 1);
    let mut exceptional = 0usize;
    for w in c.iter() {
        let deg = rat_u(g.degree_into(w, a), 1);
        if deg < lo || deg > hi {
            exceptional += 1;
        }
    }
    let allowed = ceil_threshold(&(eps * rat_u(2, 1)), c.count());
    // 2ε|C| without the ≥1 clamp: recompute exactly
    let degree_allowed = {
        let exact = eps * rat_u(2 * c.count(), 1);
        exact.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
    };
    let _ = allowed;
    let degree_ok = rat_u(exceptional, 1) <= eps * rat_u(2 * c.count(), 1);

    // slice fact on random slices of (A, C)
    let mut rng = rng_for_indexed(seed, "facts-slices", &[g.n() as u64]);
    let slice_eps = {
        let two_eps = eps * rat_u(2, 1);
        two_eps / alpha.clone()
    };
    let mut slices_ok = true;
    let slices = 8usize;
    for _ in 0..slices {
        let sa = random_fraction_subset(a, alpha, &mut rng);
        let sc = random_fraction_subset(c, alpha, &mut rng);
        let ds = g.density(&sa, &sc)?;
        if (&ds - &d).abs() > *eps {
            slices_ok = false;
            continue;
        }
        let v = check_pair_regular(g, &sa, &sc, &slice_eps, Mode::Exact, cfg)?;
        if !v.regular {
            slices_ok = false;
        }
    }

    // codegree fact
    let (codeg_bad, codeg_allowed, codeg_ok) = if d.is_zero() {
        (None, None, None)
    } else {
        let eps_p = eps * rat_u(6, 1) / d.clone();
        let nc = c.count();
        let lo = (&d * &d2 - &eps_p) * rat_u(nc, 1);
        let hi = (&d * &d2 + &eps_p) * rat_u(nc, 1);
        let mut bad = 0usize;
        for x in a.iter() {
            for y in b.iter() {
                let cd = rat_u(g.codegree(x, y, c)?, 1);
                if cd < lo || cd > hi {
                    bad += 1;
                }
            }
        }
        let allowed = &eps_p * rat_u(a.count() * b.count(), 1);
        (Some(bad), Some(to_f64(&allowed)), Some(rat_u(bad, 1) <= allowed))
    };

    Ok(FactsReport {
        degree_exceptional: exceptional,
        degree_allowed,
        degree_ok,
        slices_checked: slices,
        slices_ok,
        codegree_bad_pairs: codeg_bad,
        codegree_allowed: codeg_allowed,
        codegree_ok: codeg_ok,
    })
}

fn random_fraction_subset(s: &VertexSet, frac: &Rat, rng: &mut impl Rng) -> VertexSet {
    let mut ids = s.to_indices();
    let m = ceil_threshold(frac, ids.len());
    let size = rng.random_range(m..=ids.len());
    ids.shuffle(rng);
    VertexSet::from_indices(s.universe(), &ids[..size])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::ratio::rat;

    fn cfg() -> VerifierConfig {
        VerifierConfig { samples: 400, ..Default::default() }
    }

    #[test]
    fn complete_pair_regular() {
        let g = gen::complete_bipartite(4, 4).unwrap();
        let (u, v) = g.sides().unwrap();
        let verdict = check_pair_regular(&g, &u, &v, &rat(1, 10), Mode::Exact, &cfg()).unwrap();
        assert!(verdict.regular);
        assert_eq!(verdict.max_deviation, 0.0);
    }

    #[test]
    fn singleton_pair_forced_regular() {
        let g = gen::gnp(6, &rat(1, 2), 5).unwrap();
        let a = VertexSet::singleton(6, 0);
        let b = VertexSet::singleton(6, 3);
        let verdict = check_pair_regular(&g, &a, &b, &rat(99, 100), Mode::Exact, &cfg()).unwrap();
        assert!(verdict.regular);
    }

    #[test]
    fn half_graph_irregular_with_witness() {
        let g = gen::half_graph(4).unwrap();
        let (u, v) = g.sides().unwrap();
        let verdict = check_pair_regular(&g, &u, &v, &rat(1, 4), Mode::Exact, &cfg()).unwrap();
        assert!(!verdict.regular);
        let w = verdict.witness.unwrap();
        // witness deviation exceeds ε and subset sizes respect the threshold
        assert!(w.deviation > 0.25);
        assert!(w.a.len() >= 1 && w.b.len() >= 1);
        // re-validate the exported witness exactly
        let a_sub = VertexSet::from_indices(g.n(), &w.a);
        let b_sub = VertexSet::from_indices(g.n(), &w.b);
        let d_ab = g.density(&u, &v).unwrap();
        let dev = (g.density(&a_sub, &b_sub).unwrap() - d_ab).abs();
        assert!(dev > rat(1, 4));
    }

    #[test]
    fn sampled_agrees_with_exact_on_half_graph() {
        let g = gen::half_graph(8).unwrap();
        let (u, v) = g.sides().unwrap();
        let s = check_pair_regular(&g, &u, &v, &rat(1, 4), Mode::Sampled, &cfg()).unwrap();
        assert!(!s.regular, "degree-prefix heuristics must catch the half graph");
        let e = check_pair_regular(&g, &u, &v, &rat(1, 4), Mode::Exact, &cfg()).unwrap();
        assert!(s.max_deviation <= e.max_deviation + 1e-12);
    }

    #[test]
    fn pair_monotone_in_epsilon() {
        let g = gen::gnp_bipartite(10, 10, &rat(1, 2), 11).unwrap();
        let (u, v) = g.sides().unwrap();
        let grid: Vec<Rat> = (1..=10).map(|i| rat(i, 10)).collect();
        let mut last = false;
        for eps in &grid {
            let r = check_pair_regular(&g, &u, &v, eps, Mode::Exact, &cfg()).unwrap().regular;
            assert!(!last || r, "regular at smaller ε but irregular at larger");
            last = r;
        }
    }

    #[test]
    fn partition_verdicts() {
        // singleton partition: every pair forced regular
        let g = gen::gnp(8, &rat(1, 2), 2).unwrap();
        let v = check_partition_regular(&g, &Partition::singletons(8), &rat(1, 10), Mode::Exact, &cfg()).unwrap();
        assert!(v.count_criterion && v.weighted_criterion);

        // complete graph: all densities 1
        let k = gen::complete(8).unwrap();
        let p = Partition::equitable_blocks(8, 3).unwrap();
        let v = check_partition_regular(&k, &p, &rat(1, 10), Mode::Exact, &cfg()).unwrap();
        assert!(v.count_criterion && v.weighted_criterion);

        // half-graph with 2-part equipartition at small ε: irregular mass
        let h = gen::half_graph(8).unwrap();
        let sides = Partition::from_sides(16, 8).unwrap();
        let v = check_partition_regular(&h, &sides, &rat(1, 10), Mode::Exact, &cfg()).unwrap();
        assert!(v.irregular_mass > 0);
    }

    #[test]
    fn weak_regular_basics() {
        // singletons: identically zero deviation
        let g = gen::gnp(12, &rat(1, 2), 3).unwrap();
        let v = check_weak_regular(&g, &Partition::singletons(12), &rat(1, 100), Mode::Exact, &cfg()).unwrap();
        assert!(v.regular);
        assert_eq!(v.max_deviation, 0.0);

        // complete graph: all densities 1
        let k = gen::complete(10).unwrap();
        let p = Partition::equitable_blocks(10, 2).unwrap();
        let v = check_weak_regular(&k, &p, &rat(1, 10), Mode::Exact, &cfg()).unwrap();
        assert!(v.regular);
    }

    #[test]
    fn weak_exact_matches_brute_force_small() {
        // random G(8), P = {V}: deviation via the scan equals a direct
        // double loop over all disjoint (S,T)
        let g = gen::gnp(8, &rat(1, 2), 7).unwrap();
        let p = Partition::trivial(8);
        let eps = rat(3, 10);
        let m = ceil_threshold(&eps, 8);
        let mut worst = Rat::zero();
        for smask in 1u32..(1 << 8) {
            if (smask.count_ones() as usize) < m {
                continue;
            }
            for tmask in 1u32..(1 << 8) {
                if tmask & smask != 0 || (tmask.count_ones() as usize) < m {
                    continue;
                }
                let s = mask_to_set(8, smask);
                let t = mask_to_set(8, tmask);
                let dev = weak_deviation_exact(&g, &p, &s, &t);
                if dev > worst {
                    worst = dev;
                }
            }
        }
        let v = check_weak_regular(&g, &p, &eps, Mode::Exact, &cfg()).unwrap();
        if &worst > &eps {
            assert!(!v.regular);
            assert!((v.max_deviation - to_f64(&worst)).abs() < 1e-12);
        } else {
            assert!(v.regular);
        }
    }

    #[test]
    fn weak_bipartite_cases() {
        let g = gen::complete_bipartite(6, 6).unwrap();
        let (u, v) = g.sides().unwrap();
        let ac: Vec<VertexSet> = vec![u.clone()];
        let bc: Vec<VertexSet> = vec![v.clone()];
        let verdict = check_weak_regular_bipartite(&g, &ac, &bc, &rat(1, 10), Mode::Exact, &cfg()).unwrap();
        assert!(verdict.regular);
        assert_eq!(verdict.max_deviation, 0.0);

        // singleton classes: zero deviation
        let ac: Vec<VertexSet> = u.iter().map(|x| VertexSet::singleton(12, x)).collect();
        let bc: Vec<VertexSet> = v.iter().map(|x| VertexSet::singleton(12, x)).collect();
        let verdict = check_weak_regular_bipartite(&g, &ac, &bc, &rat(1, 10), Mode::Exact, &cfg()).unwrap();
        assert!(verdict.regular && verdict.max_deviation == 0.0);

        let ng = gen::gnp(6, &rat(1, 2), 1).unwrap();
        let sets = vec![VertexSet::from_indices(6, &[0, 1, 2])];
        assert!(check_weak_regular_bipartite(&ng, &sets, &sets, &rat(1, 10), Mode::Exact, &cfg()).is_err());
    }

    #[test]
    fn weak_bipartite_sampled_vs_exact_small() {
        let g = gen::gnp_bipartite(8, 8, &rat(1, 2), 13).unwrap();
        let sides = g.sides().unwrap();
        let ac = vec![sides.0.clone()];
        let bc = vec![sides.1.clone()];
        let eps = rat(1, 5);
        let ex = check_weak_regular_bipartite(&g, &ac, &bc, &eps, Mode::Exact, &cfg()).unwrap();
        let sa = check_weak_regular_bipartite(&g, &ac, &bc, &eps, Mode::Sampled, &cfg()).unwrap();
        // sampled never contradicts exact: a sampled witness implies exact irregularity
        if !sa.regular {
            assert!(!ex.regular);
        }
        assert!(sa.max_deviation <= ex.max_deviation + 1e-12);
    }

    #[test]
    fn super_regular_cases() {
        let g = gen::complete_bipartite(5, 5).unwrap();
        let v = check_super_regular(&g, &rat(1, 10), Mode::Exact, &cfg()).unwrap();
        assert!(v.regular);

        // K_{4,4} minus a perfect matching at n = 4: exact verdict
        let mut km = gen::complete_bipartite(4, 4).unwrap();
        for i in 0..4 {
            km.remove_edge(i, 4 + i);
        }
        let v = check_super_regular(&km, &rat(1, 3), Mode::Exact, &cfg()).unwrap();
        // ε = 1/3 ≥ 1/(n−1): subsets of size ≥ 2 have density within (1±ε)p
        assert!(v.regular);

        // two disjoint K_{4,4} blocks on 8+8: half-side witness of density ~2p
        let mut blocks = DenseGraph::new_bipartite(8, 8).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                blocks.add_edge(i, 8 + j).unwrap();
                blocks.add_edge(4 + i, 12 + j).unwrap();
            }
        }
        let v = check_super_regular(&blocks, &rat(1, 2), Mode::Exact, &cfg()).unwrap();
        assert!(!v.regular);
        let w = v.witness.unwrap();
        assert!(w.d_sub > 2.0 * 0.5 * 0.9);
    }

    #[test]
    fn quasirandom_cases() {
        let g = gen::complete_bipartite(5, 5).unwrap();
        let v = check_quasirandom(&g, &rat(1, 1), &rat(0, 1)).unwrap();
        assert!(v.quasirandom);

        let pm = gen::perfect_matching(6).unwrap();
        let v = check_quasirandom(&pm, &rat(1, 6), &rat(0, 1)).unwrap();
        assert!(v.quasirandom, "matching codegrees are all zero");

        // C8 as a 4+4 bipartite graph, p = 1/2: codegree table by hand:
        // consecutive U-pairs share one neighbor (≤ (1+δ)·1·4 needs δ ≥ ...),
        // diagonal pairs have codeg = deg = 2 > (1+δ)p²|V| = (1+δ)·1 for δ < 1
        let c8 = gen::even_cycle(4).unwrap();
        let v = check_quasirandom(&c8, &rat(1, 2), &rat(1, 4)).unwrap();
        // every off-diagonal pair has codeg ∈ {0,1,2}; threshold (5/4)·1 = 1.25
        // → violating pairs are those with codeg 2 (opposite pairs: u0,u2 and
        // u1,u3 ordered: 4) plus the 4 diagonal pairs (deg 2): 8 > δ|U|² = 4
        assert!(!v.quasirandom);
        assert_eq!(v.bad_pairs, 8);

        // non-regular input rejected
        let h = gen::half_graph(4).unwrap();
        assert!(check_quasirandom(&h, &rat(5, 8), &rat(1, 2)).is_err());
    }

    #[test]
    fn measured_delta_is_minimal_feasible() {
        let c8 = gen::even_cycle(4).unwrap();
        let p = rat(1, 2);
        let d = measure_quasirandomness(&c8, &p).unwrap();
        let v = check_quasirandom(&c8, &p, &d).unwrap();
        assert!(v.quasirandom);
        let below = &d - rat(1, 100);
        if below > Rat::zero() {
            let v2 = check_quasirandom(&c8, &p, &below).unwrap();
            assert!(!v2.quasirandom);
        }
    }

    #[test]
    fn facts_suite_cases() {
        // complete tripartite: zero exceptional vertices, slices regular,
        // codegrees exactly d·d'·|C|
        let mut g = DenseGraph::new(18).unwrap();
        let a = VertexSet::from_indices(18, &(0..6).collect::<Vec<_>>());
        let b = VertexSet::from_indices(18, &(6..12).collect::<Vec<_>>());
        let c = VertexSet::from_indices(18, &(12..18).collect::<Vec<_>>());
        for x in a.iter() {
            for y in c.iter() {
                g.add_edge(x, y).unwrap();
            }
        }
        for x in b.iter() {
            for y in c.iter() {
                g.add_edge(x, y).unwrap();
            }
        }
        let r = appendix_facts_suite(&g, &a, &b, &c, &rat(1, 4), &rat(1, 2), 3, &cfg()).unwrap();
        assert_eq!(r.degree_exceptional, 0);
        assert!(r.degree_ok && r.slices_ok);
        assert_eq!(r.codegree_bad_pairs, Some(0));

        // d = 0 pair: codegree fact skipped
        let e = DenseGraph::new(18).unwrap();
        let r = appendix_facts_suite(&e, &a, &b, &c, &rat(1, 4), &rat(1, 2), 3, &cfg()).unwrap();
        assert!(r.codegree_ok.is_none());
    }
}
