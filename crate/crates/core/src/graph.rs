//! Dense graph representation: symmetric bit-adjacency with optional
//! bipartition, exact densities, codegrees, edit tracking and blow-ups.

use crate::bits::{and_count, words_for, VertexSet, WORD_BITS};
use crate::error::{domain, Error, Result};
use crate::ratio::{rat_u, rat_zero, Rat};
use serde::{Deserialize, Serialize};

/// Hard cap on the vertex count. Everything in this crate is a dense-matrix
/// algorithm; beyond this size the exact verifiers stop being desk-scale.
pub const MAX_VERTICES: usize = 4096;

/// Simple graph on `{0, …, n-1}` stored as a symmetric bit matrix with zero
/// diagonal. When `side_u` is present the graph is bipartite with
/// `U = {0, …, side_u-1}`, `V = {side_u, …, n-1}` and no intra-side edges.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseGraph {
    n: usize,
    stride: usize,
    adj: Vec<u64>,
    side_u: Option<usize>,
    edges: usize,
}

impl DenseGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return domain(format!("vertex count {n} outside 1..={MAX_VERTICES}"));
        }
        let stride = words_for(n);
        Ok(DenseGraph { n, stride, adj: vec![0; n * stride], side_u: None, edges: 0 })
    }

    pub fn new_bipartite(nu: usize, nv: usize) -> Result<Self> {
        let mut g = Self::new(nu.checked_add(nv).ok_or_else(|| Error::Domain("size overflow".into()))?)?;
        if nu == 0 || nv == 0 {
            return domain("bipartite graph needs nonempty sides");
        }
        g.side_u = Some(nu);
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn is_bipartite(&self) -> bool {
        self.side_u.is_some()
    }

    /// (U, V) side sets when a bipartition is present.
    pub fn sides(&self) -> Option<(VertexSet, VertexSet)> {
        self.side_u.map(|u| {
            let us = VertexSet::from_indices(self.n, &(0..u).collect::<Vec<_>>());
            (us.clone(), us.complement())
        })
    }

    pub fn side_split(&self) -> Option<usize> {
        self.side_u
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.stride + v / WORD_BITS] & (1 << (v % WORD_BITS)) != 0
    }

    fn same_side(&self, u: usize, v: usize) -> bool {
        match self.side_u {
            Some(s) => (u < s) == (v < s),
            None => false,
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return domain(format!("endpoint out of range: ({u},{v})"));
        }
        if u == v {
            return domain("self-loops not allowed");
        }
        if self.same_side(u, v) {
            return domain(format!("intra-side edge ({u},{v}) in bipartite graph"));
        }
        if !self.has_edge(u, v) {
            self.adj[u * self.stride + v / WORD_BITS] |= 1 << (v % WORD_BITS);
            self.adj[v * self.stride + u / WORD_BITS] |= 1 << (u % WORD_BITS);
            self.edges += 1;
        }
        Ok(())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u < self.n && v < self.n && self.has_edge(u, v) {
            self.adj[u * self.stride + v / WORD_BITS] &= !(1 << (v % WORD_BITS));
            self.adj[v * self.stride + u / WORD_BITS] &= !(1 << (u % WORD_BITS));
            self.edges -= 1;
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// |N(v) ∩ S|
    #[inline]
    pub fn degree_into(&self, v: usize, set: &VertexSet) -> usize {
        and_count(self.row(v), set.words())
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        let mut s = VertexSet::empty(self.n);
        s.words_mut().copy_from_slice(self.row(v));
        s
    }

    /// Ordered pair count e(A,B) = #{(u,v) ∈ A×B : u ∼ v}.
    pub fn pair_count(&self, a: &VertexSet, b: &VertexSet) -> usize {
        let mut total = 0usize;
        for u in a.iter() {
            total += self.degree_into(u, b);
        }
        total
    }

    /// d(A,B) = e(A,B) / |A||B| as an exact rational.
    pub fn density(&self, a: &VertexSet, b: &VertexSet) -> Result<Rat> {
        let (ca, cb) = (a.count(), b.count());
        if ca == 0 || cb == 0 {
            return domain("density of an empty set");
        }
        Ok(rat_u(self.pair_count(a, b), ca * cb))
    }

    /// 2|E| / n²
    pub fn global_density(&self) -> Rat {
        rat_u(2 * self.edges, self.n * self.n)
    }

    /// e(U,V) / |U||V| for bipartite graphs.
    pub fn bipartite_density(&self) -> Result<Rat> {
        match self.side_u {
            Some(u) => Ok(rat_u(self.edges, u * (self.n - u))),
            None => domain("bipartite_density on a graph without sides"),
        }
    }

    /// |N(u) ∩ N(v) ∩ C|
    pub fn codegree(&self, u: usize, v: usize, c: &VertexSet) -> Result<usize> {
        if u == v {
            return domain("codegree of a vertex with itself");
        }
        let (ru, rv) = (self.row(u), self.row(v));
        let cw = c.words();
        let mut total = 0usize;
        for i in 0..ru.len() {
            total += (ru[i] & rv[i] & cw[i]).count_ones() as usize;
        }
        Ok(total)
    }

    /// |E(G) △ E(G')| in unordered pairs.
    pub fn edit_distance(&self, other: &DenseGraph) -> Result<usize> {
        if self.n != other.n {
            return domain("edit distance between graphs on different vertex sets");
        }
        let mut diff = 0usize;
        for v in 0..self.n {
            diff += and_count_xor(self.row(v), other.row(v));
        }
        Ok(diff / 2)
    }

    /// |E △ E'| ≤ δ|E(self)|, compared exactly.
    pub fn is_delta_close(&self, other: &DenseGraph, delta: &Rat) -> Result<bool> {
        let d = self.edit_distance(other)?;
        Ok(rat_u(d, 1) <= delta * rat_u(self.edges, 1))
    }

    /// Inflate every vertex into `k` clones, replacing each edge by a complete
    /// bipartite graph between the clone sets. Returns the blow-up together
    /// with the cluster partition mapping clones back to originals.
    pub fn blow_up(&self, k: usize) -> Result<(DenseGraph, crate::partition::Partition)> {
        if k == 0 {
            return domain("blow-up factor must be at least 1");
        }
        let nn = self
            .n
            .checked_mul(k)
            .filter(|&m| m <= MAX_VERTICES)
            .ok_or_else(|| Error::Domain(format!("blow-up size {}x{k} exceeds cap", self.n)))?;
        let mut g = DenseGraph::new(nn)?;
        g.side_u = self.side_u.map(|u| u * k);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    for i in 0..k {
                        for j in 0..k {
                            g.add_edge(u * k + i, v * k + j)?;
                        }
                    }
                }
            }
        }
        let labels: Vec<u32> = (0..nn).map(|w| (w / k) as u32).collect();
        let clusters = crate::partition::Partition::from_labels(&labels)?;
        Ok((g, clusters))
    }

    pub fn apply_edits(&self, edits: &EditSet) -> Result<DenseGraph> {
        edits.validate(self)?;
        let mut g = self.clone();
        for &(u, v) in &edits.removals {
            g.remove_edge(u as usize, v as usize);
        }
        for &(u, v) in &edits.additions {
            g.add_edge(u as usize, v as usize)?;
        }
        Ok(g)
    }

    /// Parse the text format:
    /// `graph <n> <m> [bipartite <|U|>]` followed by `m` lines `e <u> <v>`, u < v.
    pub fn parse(text: &str) -> Result<DenseGraph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 3 && toks.len() != 5 || toks[0] != "graph" {
            return Err(Error::Parse(format!("bad graph header: {header:?}")));
        }
        let n: usize = toks[1].parse().map_err(|_| Error::Parse("bad vertex count".into()))?;
        let m: usize = toks[2].parse().map_err(|_| Error::Parse("bad edge count".into()))?;
        let mut g = if toks.len() == 5 {
            if toks[3] != "bipartite" {
                return Err(Error::Parse(format!("bad graph header: {header:?}")));
            }
            let u: usize = toks[4].parse().map_err(|_| Error::Parse("bad side size".into()))?;
            if u == 0 || u >= n {
                return Err(Error::Parse(format!("side size {u} incompatible with n={n}")));
            }
            DenseGraph::new_bipartite(u, n - u).map_err(|e| Error::Parse(e.to_string()))?
        } else {
            DenseGraph::new(n).map_err(|e| Error::Parse(e.to_string()))?
        };
        let mut seen = 0usize;
        for line in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 || t[0] != "e" {
                return Err(Error::Parse(format!("bad edge line: {line:?}")));
            }
            let u: usize = t[1].parse().map_err(|_| Error::Parse("bad endpoint".into()))?;
            let v: usize = t[2].parse().map_err(|_| Error::Parse("bad endpoint".into()))?;
            if u >= v {
                return Err(Error::Parse(format!("edge endpoints must satisfy u < v: {line:?}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::Parse(format!("duplicate edge ({u},{v})")));
            }
            g.add_edge(u, v).map_err(|e| Error::Parse(e.to_string()))?;
            seen += 1;
        }
        if seen != m {
            return Err(Error::Parse(format!("header promised {m} edges, found {seen}")));
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = match self.side_u {
            Some(u) => format!("graph {} {} bipartite {}\n", self.n, self.edges, u),
            None => format!("graph {} {}\n", self.n, self.edges),
        };
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    out.push_str(&format!("e {u} {v}\n"));
                }
            }
        }
        out
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edges);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// True when every vertex within each side has the same degree (for
    /// non-bipartite graphs: every vertex overall).
    pub fn is_degree_regular(&self) -> bool {
        match self.side_u {
            Some(s) => {
                let du = self.degree(0);
                let dv = if s < self.n { self.degree(s) } else { 0 };
                (0..s).all(|v| self.degree(v) == du) && (s..self.n).all(|v| self.degree(v) == dv)
            }
            None => {
                let d = self.degree(0);
                (0..self.n).all(|v| self.degree(v) == d)
            }
        }
    }
}

fn and_count_xor(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum()
}

impl std::fmt::Debug for DenseGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DenseGraph(n={}, m={}, bipartite={:?})", self.n, self.edges, self.side_u)
    }
}

impl Serialize for DenseGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // graphs embed in JSON reports via the text format
        s.serialize_str(&self.to_text())
    }
}

/// A set of edge modifications relative to a base graph.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EditSet {
    pub additions: Vec<(u32, u32)>,
    pub removals: Vec<(u32, u32)>,
}

impl EditSet {
    pub fn new(mut additions: Vec<(u32, u32)>, mut removals: Vec<(u32, u32)>) -> Self {
        for e in additions.iter_mut().chain(removals.iter_mut()) {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        additions.sort_unstable();
        additions.dedup();
        removals.sort_unstable();
        removals.dedup();
        EditSet { additions, removals }
    }

    pub fn len(&self) -> usize {
        self.additions.len() + self.removals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.removals.is_empty()
    }

    /// Swap the roles of additions and removals; applying the inverse after
    /// the original restores the base graph.
    pub fn inverse(&self) -> EditSet {
        EditSet { additions: self.removals.clone(), removals: self.additions.clone() }
    }

    pub fn validate(&self, base: &DenseGraph) -> Result<()> {
        let n = base.n() as u32;
        for &(u, v) in self.additions.iter().chain(&self.removals) {
            if u >= n || v >= n {
                return domain(format!("edit endpoint out of range: ({u},{v})"));
            }
            if u == v {
                return domain("edit with equal endpoints");
            }
        }
        for &(u, v) in &self.additions {
            if base.has_edge(u as usize, v as usize) {
                return domain(format!("addition ({u},{v}) is already an edge"));
            }
        }
        for &(u, v) in &self.removals {
            if !base.has_edge(u as usize, v as usize) {
                return domain(format!("removal ({u},{v}) is not an edge"));
            }
        }
        let mut all: Vec<(u32, u32)> = self.additions.clone();
        all.extend(&self.removals);
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return domain("additions and removals overlap");
        }
        Ok(())
    }
}

/// Exact per-pair density helper used across the verifier modules: returns
/// e(A,B), |A|, |B| so callers can form the rational or compare cross-products
/// without allocating.
pub fn density_parts(g: &DenseGraph, a: &VertexSet, b: &VertexSet) -> (usize, usize, usize) {
    (g.pair_count(a, b), a.count(), b.count())
}

pub fn zero_density_or(g: &DenseGraph, a: &VertexSet, b: &VertexSet) -> Rat {
    if a.is_empty() || b.is_empty() {
        rat_zero()
    } else {
        g.density(a, b).expect("nonempty")
    }
}
