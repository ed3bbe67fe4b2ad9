//! Vertex partitions: refinement (exact and approximate), equitability,
//! common refinement, and the block-subdivision scheme used by the weak
//! regularizer.

use crate::bits::VertexSet;
use crate::error::{domain, precondition, Error, Result};
use crate::ratio::{rat_u, Rat};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Partition of `{0, …, n-1}` into nonempty classes. Classes are kept in
/// canonical order (ascending minimum vertex id) so identical partitions have
/// identical representations regardless of how they were built.
#[derive(Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<u32>,
    classes: Vec<VertexSet>,
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<u32>::deserialize(deserializer)?;
        Partition::from_labels(&labels).map_err(serde::de::Error::custom)
    }
}

impl Partition {
    pub fn from_labels(labels: &[u32]) -> Result<Self> {
        if labels.is_empty() {
            return domain("partition of an empty vertex set");
        }
        let k = (*labels.iter().max().unwrap() as usize) + 1;
        let n = labels.len();
        let mut classes = vec![VertexSet::empty(n); k];
        for (v, &c) in labels.iter().enumerate() {
            classes[c as usize].insert(v);
        }
        if classes.iter().any(|c| c.is_empty()) {
            return domain("partition labels skip a class index");
        }
        Ok(Self::canonicalize(classes))
    }

    pub fn from_classes(n: usize, classes: Vec<VertexSet>) -> Result<Self> {
        if classes.is_empty() {
            return domain("partition needs at least one class");
        }
        let mut seen = VertexSet::empty(n);
        for c in &classes {
            if c.is_empty() {
                return domain("empty class");
            }
            if !seen.is_disjoint(c) {
                return domain("classes overlap");
            }
            seen.union_with(c);
        }
        if seen.count() != n {
            return domain("classes do not cover the vertex set");
        }
        Ok(Self::canonicalize(classes))
    }

    fn canonicalize(mut classes: Vec<VertexSet>) -> Self {
        classes.sort_by_key(|c| c.min().unwrap());
        let n = classes[0].universe();
        let mut labels = vec![0u32; n];
        for (i, c) in classes.iter().enumerate() {
            for v in c.iter() {
                labels[v] = i as u32;
            }
        }
        Partition { labels, classes }
    }

    /// The one-class partition {V}.
    pub fn trivial(n: usize) -> Self {
        Self::from_classes(n, vec![VertexSet::full(n)]).expect("nonempty")
    }

    pub fn singletons(n: usize) -> Self {
        let labels: Vec<u32> = (0..n as u32).collect();
        Self::from_labels(&labels).expect("nonempty")
    }

    /// Equitable partition into `k` classes of contiguous vertex ids.
    pub fn equitable_blocks(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return domain(format!("cannot split {n} vertices into {k} classes"));
        }
        let base = n / k;
        let extra = n % k;
        let mut labels = vec![0u32; n];
        let mut v = 0;
        for c in 0..k {
            let size = base + usize::from(c < extra);
            for _ in 0..size {
                labels[v] = c as u32;
                v += 1;
            }
        }
        Self::from_labels(&labels)
    }

    /// For a bipartite graph: the two sides as a partition.
    pub fn from_sides(n: usize, side_u: usize) -> Result<Self> {
        if side_u == 0 || side_u >= n {
            return domain("invalid side split");
        }
        let labels: Vec<u32> = (0..n).map(|v| u32::from(v >= side_u)).collect();
        Self::from_labels(&labels)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn order(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[VertexSet] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &VertexSet {
        &self.classes[i]
    }

    pub fn label(&self, v: usize) -> u32 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.count()).collect()
    }

    /// Class sizes differ by at most 1.
    pub fn is_equitable(&self) -> bool {
        let sizes = self.class_sizes();
        let min = sizes.iter().min().unwrap();
        let max = sizes.iter().max().unwrap();
        max - min <= 1
    }

    /// True iff every class of `self` is contained in a class of `coarser`.
    pub fn is_refinement(&self, coarser: &Partition) -> Result<bool> {
        if self.n() != coarser.n() {
            return domain("refinement check across different vertex sets");
        }
        Ok(self.classes.iter().all(|q| {
            let target = coarser.label(q.min().unwrap());
            q.iter().all(|v| coarser.label(v) == target)
        }))
    }

    /// {Z ∩ X : Z ∈ self, X ∈ other} with empty intersections dropped.
    pub fn common_refinement(&self, other: &Partition) -> Result<Partition> {
        if self.n() != other.n() {
            return domain("common refinement across different vertex sets");
        }
        let mut classes = Vec::new();
        for z in &self.classes {
            for x in &other.classes {
                let i = z.intersection(x);
                if !i.is_empty() {
                    classes.push(i);
                }
            }
        }
        Partition::from_classes(self.n(), classes)
    }

    /// Partition of `subset` induced by this partition's classes.
    pub fn restrict_to(&self, subset: &VertexSet) -> Vec<VertexSet> {
        self.classes
            .iter()
            .filter_map(|c| {
                let i = c.intersection(subset);
                if i.is_empty() {
                    None
                } else {
                    Some(i)
                }
            })
            .collect()
    }

    /// Parse the text format: `partition <n> <k>` then `n` lines `<vertex> <class>`.
    pub fn parse(text: &str) -> Result<Partition> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty partition file".into()))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "partition" {
            return Err(Error::Parse(format!("bad partition header: {header:?}")));
        }
        let n: usize = toks[1].parse().map_err(|_| Error::Parse("bad vertex count".into()))?;
        let k: usize = toks[2].parse().map_err(|_| Error::Parse("bad class count".into()))?;
        let mut labels = vec![u32::MAX; n];
        for line in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 2 {
                return Err(Error::Parse(format!("bad partition line: {line:?}")));
            }
            let v: usize = t[0].parse().map_err(|_| Error::Parse("bad vertex".into()))?;
            let c: u32 = t[1].parse().map_err(|_| Error::Parse("bad class".into()))?;
            if v >= n || labels[v] != u32::MAX {
                return Err(Error::Parse(format!("vertex {v} out of range or repeated")));
            }
            labels[v] = c;
        }
        if labels.iter().any(|&l| l == u32::MAX) {
            return Err(Error::Parse("not every vertex labeled".into()));
        }
        let p = Partition::from_labels(&labels).map_err(|e| Error::Parse(e.to_string()))?;
        if p.order() != k {
            return Err(Error::Parse(format!("header promised {k} classes, found {}", p.order())));
        }
        Ok(p)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("partition {} {}\n", self.n(), self.order());
        for (v, &c) in self.labels.iter().enumerate() {
            out.push_str(&format!("{v} {c}\n"));
        }
        out
    }
}

impl std::fmt::Debug for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Partition(n={}, k={}, sizes={:?})", self.n(), self.order(), self.class_sizes())
    }
}

/// |S ∖ T| ≤ γ|S|, compared exactly.
pub fn gamma_contained(s: &VertexSet, t: &VertexSet, gamma: &Rat) -> Result<bool> {
    let cs = s.count();
    if cs == 0 {
        return domain("gamma containment of an empty set");
    }
    Ok(rat_u(s.difference_count(t), 1) <= gamma * rat_u(cs, 1))
}

/// Approximate refinement: total size of classes of `q` that are not
/// γ-contained in any class of `p` must be at most γn. Returns the verdict
/// and that offending mass.
pub fn gamma_refines(q: &Partition, p: &Partition, gamma: &Rat) -> Result<(bool, usize)> {
    if q.n() != p.n() {
        return domain("gamma refinement across different vertex sets");
    }
    let mut offending = 0usize;
    for qc in q.classes() {
        let contained = p.classes().iter().any(|pc| gamma_contained(qc, pc, gamma).unwrap_or(false));
        if !contained {
            offending += qc.count();
        }
    }
    let ok = rat_u(offending, 1) <= gamma * rat_u(q.n(), 1);
    Ok((ok, offending))
}

/// Smallest γ at which `q` γ-refines `p`. Exact: scans the finitely many
/// candidate breakpoints (per-class containment ratios and mass fractions).
pub fn min_gamma_refining(q: &Partition, p: &Partition) -> Result<Rat> {
    if q.n() != p.n() {
        return domain("gamma refinement across different vertex sets");
    }
    let n = q.n();
    // Per class: the smallest γ at which it becomes γ-contained somewhere.
    let mut thresholds: Vec<(Rat, usize)> = q
        .classes()
        .iter()
        .map(|qc| {
            let best = p.classes().iter().map(|pc| qc.difference_count(pc)).min().unwrap();
            (rat_u(best, qc.count()), qc.count())
        })
        .collect();
    thresholds.sort_by(|a, b| b.0.cmp(&a.0));
    // Walking thresholds from the top: with γ just below thresholds[i].0, the
    // offending mass is the prefix sum through i.
    let mut best: Option<Rat> = None;
    let mut prefix = 0usize;
    for i in 0..=thresholds.len() {
        let mass = rat_u(prefix, n);
        let gamma_here = if i < thresholds.len() {
            // γ must also be ≥ the containment threshold of every class deeper
            // in the list, i.e. ≥ thresholds[i].0 is NOT required; classes at
            // exactly γ count as contained, so the candidate is max(mass, t_i).
            let t = &thresholds[i].0;
            if &mass > t {
                mass.clone()
            } else {
                t.clone()
            }
        } else {
            mass.clone()
        };
        // Feasibility: at gamma_here, offending = classes with threshold > gamma_here.
        let offending: usize =
            thresholds.iter().filter(|(t, _)| t > &gamma_here).map(|(_, s)| s).sum();
        if rat_u(offending, n) <= gamma_here {
            best = Some(match best {
                Some(b) if b <= gamma_here => b,
                _ => gamma_here,
            });
        }
        if i < thresholds.len() {
            prefix += thresholds[i].1;
        }
    }
    Ok(best.expect("gamma=1 always works"))
}

/// Witness map for the order bound on approximate refinements: each class of
/// `q` that is 1/4-contained in some class of `p` maps to that (unique)
/// class. Checks |Q| ≥ |P|/2 under the stated preconditions.
pub struct RefinementOrderWitness {
    pub assignment: Vec<Option<usize>>,
    pub order_q: usize,
    pub order_p: usize,
}

pub fn refinement_order_check(q: &Partition, p: &Partition) -> Result<RefinementOrderWitness> {
    if !p.is_equitable() {
        return precondition("coarse partition must be equitable");
    }
    let quarter = rat_u(1, 4);
    let (ok, _) = gamma_refines(q, p, &quarter)?;
    if !ok {
        return precondition("q does not 1/4-refine p");
    }
    let mut assignment = Vec::with_capacity(q.order());
    for qc in q.classes() {
        let mut target = None;
        for (j, pc) in p.classes().iter().enumerate() {
            if gamma_contained(qc, pc, &quarter)? {
                target = Some(j);
                break; // γ < 1/2 makes the target unique
            }
        }
        assignment.push(target);
    }
    let w = RefinementOrderWitness { assignment, order_q: q.order(), order_p: p.order() };
    if 2 * w.order_q < w.order_p {
        return Err(Error::Internal(format!(
            "approximate refinement order bound violated: |Q|={} |P|={}",
            w.order_q, w.order_p
        )));
    }
    Ok(w)
}

/// Subdivide each class of `p` into blocks of size `target_block` or
/// `target_block + 1`, grouping vertices so blocks respect the classes of
/// `priority` except for at most three straddling blocks per class. Classes
/// smaller than `target_block` are emitted whole. Leftover assignment is
/// deterministic in ascending vertex id.
pub fn equitize(p: &Partition, priority: &Partition, target_block: usize) -> Result<Partition> {
    if target_block == 0 {
        return domain("block size must be at least 1");
    }
    if priority.n() != p.n() {
        return domain("priority partition on a different vertex set");
    }
    let mut classes: Vec<VertexSet> = Vec::new();
    let n = p.n();
    for cls in p.classes() {
        let size = cls.count();
        if size < target_block {
            classes.push(cls.clone());
            continue;
        }
        // Order members by priority class (then id) so whole blocks land
        // inside priority classes wherever the arithmetic allows.
        let mut members: Vec<usize> = cls.to_indices();
        members.sort_by_key(|&v| (priority.label(v), v));
        // size = (a - m)·b + m·(b+1) with b = target_block
        let a = size / target_block;
        let m = size % target_block;
        let (count_small, count_big) = if m <= a {
            (a - m, m)
        } else {
            // Not representable with sizes {b, b+1}; fall back to an even
            // split into a+1 blocks (desk-scale classes only).
            (0, 0)
        };
        if count_small + count_big > 0 {
            let mut idx = 0usize;
            for bi in 0..(count_small + count_big) {
                let bsize = if bi < count_small { target_block } else { target_block + 1 };
                let mut block = VertexSet::empty(n);
                for _ in 0..bsize {
                    block.insert(members[idx]);
                    idx += 1;
                }
                classes.push(block);
            }
        } else {
            let t = a + 1;
            let base = size / t;
            let extra = size % t;
            let mut idx = 0usize;
            for bi in 0..t {
                let bsize = base + usize::from(bi < extra);
                let mut block = VertexSet::empty(n);
                for _ in 0..bsize {
                    block.insert(members[idx]);
                    idx += 1;
                }
                classes.push(block);
            }
        }
    }
    Partition::from_classes(n, classes)
}

/// Number of blocks of `fine` inside class `cls` that straddle the classes of
/// `priority` (test helper for the subdivision contract).
pub fn straddling_blocks(fine: &Partition, cls: &VertexSet, priority: &Partition) -> usize {
    fine.classes()
        .iter()
        .filter(|b| b.is_subset_of(cls))
        .filter(|b| {
            let first = priority.label(b.min().unwrap());
            b.iter().any(|v| priority.label(v) != first)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    fn part(groups: &[&[usize]]) -> Partition {
        let n: usize = groups.iter().map(|g| g.len()).sum();
        let classes = groups.iter().map(|g| VertexSet::from_indices(n, g)).collect();
        Partition::from_classes(n, classes).unwrap()
    }

    #[test]
    fn refinement_cases() {
        let p = part(&[&[0, 1], &[2, 3]]);
        assert!(Partition::singletons(4).is_refinement(&p).unwrap());
        assert!(p.is_refinement(&p).unwrap());
        let crossed = part(&[&[0, 2], &[1, 3]]);
        assert!(!p.is_refinement(&crossed).unwrap());
    }

    #[test]
    fn common_refinement_cases() {
        let z = part(&[&[0, 1], &[2, 3]]);
        assert_eq!(z.common_refinement(&z).unwrap(), z);
        assert_eq!(z.common_refinement(&Partition::trivial(4)).unwrap(), z);
        let x = part(&[&[0, 2], &[1, 3]]);
        let r = z.common_refinement(&x).unwrap();
        assert_eq!(r, Partition::singletons(4));
        assert!(r.is_refinement(&z).unwrap());
        assert!(r.is_refinement(&x).unwrap());
        assert!(r.order() <= z.order() * x.order());
    }

    #[test]
    fn gamma_containment_cases() {
        let s = VertexSet::from_indices(8, &[0, 1, 2, 3]);
        let t = VertexSet::from_indices(8, &[0, 1, 2, 3, 4]);
        assert!(gamma_contained(&s, &t, &rat(0, 1)).unwrap());
        let t2 = VertexSet::from_indices(8, &[0, 1, 2]);
        assert!(gamma_contained(&s, &t2, &rat(1, 4)).unwrap());
        assert!(!gamma_contained(&s, &t2, &rat(1, 5)).unwrap());
        let disjoint = VertexSet::from_indices(8, &[4, 5]);
        assert!(!gamma_contained(&s, &disjoint, &rat(9, 10)).unwrap());
        assert!(gamma_contained(&VertexSet::empty(8), &t, &rat(1, 2)).is_err());
    }

    #[test]
    fn gamma_refines_cases() {
        let p = part(&[&[0, 1, 2, 3], &[4, 5, 6, 7]]);
        let q = Partition::singletons(8);
        let (ok, mass) = gamma_refines(&q, &p, &rat(0, 1)).unwrap();
        assert!(ok);
        assert_eq!(mass, 0);

        // the whole set is not 1/4-contained in either half
        let whole = Partition::trivial(8);
        let (ok, mass) = gamma_refines(&whole, &p, &rat(1, 4)).unwrap();
        assert!(!ok);
        assert_eq!(mass, 8);

        // everything is contained in {V}
        let (ok, _) = gamma_refines(&p, &Partition::trivial(8), &rat(0, 1)).unwrap();
        assert!(ok);
    }

    #[test]
    fn min_gamma_matches_predicate() {
        let p = part(&[&[0, 1, 2, 3], &[4, 5, 6, 7]]);
        let q = part(&[&[0, 1, 2, 4], &[3, 5, 6, 7]]);
        let g = min_gamma_refining(&q, &p).unwrap();
        let (ok, _) = gamma_refines(&q, &p, &g).unwrap();
        assert!(ok);
        // slightly below must fail unless zero
        if g > rat(0, 1) {
            let below = &g - rat(1, 1000);
            let (ok_below, _) = gamma_refines(&q, &p, &below).unwrap();
            assert!(!ok_below);
        }
    }

    #[test]
    fn refinement_order_cases() {
        let p = part(&[&[0, 1, 2, 3], &[4, 5, 6, 7]]);
        let w = refinement_order_check(&p, &p).unwrap();
        assert_eq!(w.order_q, w.order_p);
        let w2 = refinement_order_check(&Partition::singletons(8), &p).unwrap();
        assert!(w2.order_q >= w2.order_p / 2);
        // precondition failure: coarse not equitable
        let uneq = part(&[&[0], &[1, 2, 3, 4, 5, 6, 7]]);
        assert!(refinement_order_check(&Partition::singletons(8), &uneq).is_err());
    }

    #[test]
    fn equitize_cases() {
        // already equitable with matching block: unchanged
        let p = part(&[&[0, 1, 2], &[3, 4, 5]]);
        let out = equitize(&p, &Partition::trivial(6), 3).unwrap();
        assert_eq!(out, p);

        // one class of 10, block 3 → sizes {3,3,4} (two small then one big by the rule)
        let p10 = Partition::trivial(10);
        let out = equitize(&p10, &Partition::trivial(10), 3).unwrap();
        let mut sizes = out.class_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![3, 3, 4]);
        assert!(out.is_equitable());

        // priority three-way split: at most 3 straddling blocks per class
        let pri = part(&[&[0, 1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let out = equitize(&p10, &pri, 2).unwrap();
        assert!(straddling_blocks(&out, &VertexSet::full(10), &pri) <= 3);
        assert!(out.is_equitable());

        // class smaller than the block is emitted whole
        let small = part(&[&[0], &[1, 2, 3, 4, 5, 6, 7, 8, 9]]);
        let out = equitize(&small, &Partition::trivial(10), 3).unwrap();
        assert!(out.class_sizes().contains(&1));
    }

    #[test]
    fn format_roundtrip() {
        let p = part(&[&[0, 2], &[1, 3, 4]]);
        let q = Partition::parse(&p.to_text()).unwrap();
        assert_eq!(p, q);
        assert!(Partition::parse("partition 2 2\n0 0\n").is_err());
    }
}
