//! Vertices, parities, edges, fault sets and partitions of the hypercube.
//!
//! Vertices of `Q_n` are the integers `0..2^n`; bit `i` of a label is the
//! coordinate along dimension `i`, and two vertices are adjacent exactly when
//! their labels differ in one bit. Everything here is a plain immutable value
//! and can be copied freely across threads.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A vertex label in `[0, 2^n)`.
pub type Vertex = u32;

/// Largest supported dimension. Labels fit in a machine word with room to
/// spare; the interesting range in practice is `3..=7`.
pub const MAX_DIM: u32 = 16;

/// Parity of a vertex: number of one bits in the label, mod 2. `Q_n` is
/// bipartite with respect to this coloring.
#[inline]
pub fn parity(v: Vertex) -> u8 {
    (v.count_ones() & 1) as u8
}

/// A validated hypercube dimension `n` with `1 <= n <= 16`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct CubeDim(u8);

impl CubeDim {
    pub fn new(n: u32) -> Result<Self> {
        if (1..=MAX_DIM).contains(&n) {
            Ok(CubeDim(n as u8))
        } else {
            Err(Error::DimOutOfRange(n))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0 as u32
    }

    /// Number of vertices, `2^n`.
    #[inline]
    pub fn vertex_count(self) -> u32 {
        1 << self.0
    }

    /// Number of edges, `n * 2^(n-1)`.
    #[inline]
    pub fn edge_count(self) -> u32 {
        (self.0 as u32) << (self.0 - 1)
    }

    #[inline]
    pub fn contains(self, v: Vertex) -> bool {
        v < self.vertex_count()
    }

    pub(crate) fn check_vertex(self, v: Vertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { n: self.get(), vertex: v })
        }
    }
}

impl TryFrom<u32> for CubeDim {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        CubeDim::new(n)
    }
}

impl From<CubeDim> for u32 {
    fn from(d: CubeDim) -> u32 {
        d.get()
    }
}

impl fmt::Debug for CubeDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{}", self.0)
    }
}

impl fmt::Display for CubeDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected hypercube edge, normalized so `lo < hi` and
/// `hi == lo ^ (1 << dim)`. Because of the normalization, fault-set equality
/// is plain structural equality.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u32, u32)", into = "(u32, u32)")]
pub struct Edge {
    lo: Vertex,
    hi: Vertex,
}

impl Edge {
    /// Builds the edge `{u, v}`, checking that the pair is a hypercube edge
    /// of `Q_n`.
    pub fn new(n: CubeDim, u: Vertex, v: Vertex) -> Result<Edge> {
        n.check_vertex(u)?;
        n.check_vertex(v)?;
        if (u ^ v).count_ones() != 1 {
            return Err(Error::NotAnEdge { u, v });
        }
        Ok(Edge { lo: u.min(v), hi: u.max(v) })
    }

    /// The edge from `v` along dimension `dim`.
    pub fn along(v: Vertex, dim: u32) -> Edge {
        let w = v ^ (1 << dim);
        Edge { lo: v.min(w), hi: v.max(w) }
    }

    #[inline]
    pub fn lo(self) -> Vertex {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> Vertex {
        self.hi
    }

    /// The dimension the edge runs along.
    #[inline]
    pub fn dim(self) -> u32 {
        (self.lo ^ self.hi).trailing_zeros()
    }

    #[inline]
    pub fn touches(self, v: Vertex) -> bool {
        self.lo == v || self.hi == v
    }

    /// The endpoint opposite `v`.
    #[inline]
    pub fn other(self, v: Vertex) -> Vertex {
        self.lo ^ self.hi ^ v
    }

    #[inline]
    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.lo, self.hi)
    }
}

impl TryFrom<(u32, u32)> for Edge {
    type Error = Error;
    fn try_from((u, v): (u32, u32)) -> Result<Edge> {
        if u.max(v) >= (1 << MAX_DIM) || (u ^ v).count_ones() != 1 {
            return Err(Error::NotAnEdge { u, v });
        }
        Ok(Edge { lo: u.min(v), hi: u.max(v) })
    }
}

impl From<Edge> for (u32, u32) {
    fn from(e: Edge) -> (u32, u32) {
        (e.lo, e.hi)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A set of faulty edges of `Q_n`, kept strictly sorted by `(lo, hi)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaultSet {
    n: CubeDim,
    edges: Vec<Edge>,
}

impl FaultSet {
    pub fn empty(n: CubeDim) -> FaultSet {
        FaultSet { n, edges: Vec::new() }
    }

    /// Builds a fault set from unordered vertex pairs, validating each pair
    /// and rejecting duplicates.
    pub fn new<I>(n: CubeDim, pairs: I) -> Result<FaultSet>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut edges = Vec::new();
        for (u, v) in pairs {
            edges.push(Edge::new(n, u, v)?);
        }
        Self::from_edges(n, edges)
    }

    /// Builds a fault set from already-validated edges, rejecting duplicates.
    pub fn from_edges(n: CubeDim, mut edges: Vec<Edge>) -> Result<FaultSet> {
        for e in &edges {
            n.check_vertex(e.hi())?;
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge { u: w[0].lo(), v: w[0].hi() });
            }
        }
        Ok(FaultSet { n, edges })
    }

    #[inline]
    pub fn n(&self) -> CubeDim {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn iter_pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().map(|e| e.endpoints())
    }

    /// The set plus one more edge. Errors if the edge is already present.
    pub fn with_edge(&self, e: Edge) -> Result<FaultSet> {
        self.n.check_vertex(e.hi())?;
        match self.edges.binary_search(&e) {
            Ok(_) => Err(Error::DuplicateEdge { u: e.lo(), v: e.hi() }),
            Err(pos) => {
                let mut edges = self.edges.clone();
                edges.insert(pos, e);
                Ok(FaultSet { n: self.n, edges })
            }
        }
    }

    /// The set minus the edge at `index`.
    pub fn without_index(&self, index: usize) -> FaultSet {
        let mut edges = self.edges.clone();
        edges.remove(index);
        FaultSet { n: self.n, edges }
    }

    /// Number of faulty edges incident to `v`.
    pub fn incident_count(&self, v: Vertex) -> u32 {
        self.edges.iter().filter(|e| e.touches(v)).count() as u32
    }

    /// Per-vertex incidence bitmasks: bit `d` of entry `v` is set when the
    /// edge from `v` along dimension `d` is faulty. This is the hot-path
    /// representation used by the solver and the heuristic.
    pub fn incidence_masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; self.n.vertex_count() as usize];
        for e in &self.edges {
            let d = e.dim();
            masks[e.lo() as usize] |= 1 << d;
            masks[e.hi() as usize] |= 1 << d;
        }
        masks
    }

    /// Parses the fault-set text format: a `n=<int>` header line, then one
    /// `<u> <v>` pair per line; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<FaultSet> {
        let mut n: Option<CubeDim> = None;
        let mut pairs: Vec<(u32, u32, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            if n.is_none() {
                let rest = line
                    .strip_prefix("n")
                    .map(|r| r.trim_start())
                    .and_then(|r| r.strip_prefix('='))
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        msg: format!("expected `n=<int>` header, found `{line}`"),
                    })?;
                let value: u32 = rest.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid dimension `{}`", rest.trim()),
                })?;
                n = Some(CubeDim::new(value).map_err(|e| Error::Parse {
                    line: line_no,
                    msg: e.to_string(),
                })?);
                continue;
            }
            let mut it = line.split_whitespace();
            let (u, v) = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => {
                    let u: u32 = a.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid vertex `{a}`"),
                    })?;
                    let v: u32 = b.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid vertex `{b}`"),
                    })?;
                    (u, v)
                }
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected `<u> <v>`, found `{line}`"),
                    })
                }
            };
            pairs.push((u, v, line_no));
        }
        let n = n.ok_or_else(|| Error::Parse { line: 1, msg: "missing `n=<int>` header".into() })?;
        let mut edges = Vec::with_capacity(pairs.len());
        for (u, v, line_no) in pairs {
            let e = Edge::new(n, u, v)
                .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
            edges.push(e);
        }
        Self::from_edges(n, edges).map_err(|e| match e {
            Error::DuplicateEdge { u, v } => Error::Parse {
                line: 0,
                msg: format!("duplicate edge ({u}, {v})"),
            },
            other => other,
        })
    }

    /// Renders the canonical text form: sorted edges, one pair per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n.get());
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.lo(), e.hi()));
        }
        out
    }
}

impl fmt::Debug for FaultSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FaultSet(n={}, {:?})", self.n.get(), self.edges)
    }
}

/// Healthy neighbors of `v` in ascending order: all `v ^ (1 << i)` whose
/// connecting edge is not faulty.
pub fn healthy_neighbors(n: CubeDim, v: Vertex, faults: &FaultSet) -> Vec<Vertex> {
    debug_assert!(n.contains(v));
    let mut out: Vec<Vertex> = (0..n.get())
        .map(|d| v ^ (1 << d))
        .filter(|&w| !faults.contains(Edge { lo: v.min(w), hi: v.max(w) }))
        .collect();
    out.sort_unstable();
    out
}

/// How an edge relates to the partition of `Q_n` along a dimension.
///
/// A crossing edge is even when its endpoint on the `bit = 0` side has
/// parity 0, odd otherwise. In every dimension exactly half of the `2^(n-1)`
/// crossing edges are even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Crossing {
    NotCrossing,
    Even,
    Odd,
}

pub fn classify_crossing(e: Edge, dim: u32) -> Crossing {
    if e.dim() != dim {
        Crossing::NotCrossing
    } else if parity(e.lo()) == 0 {
        // lo has bit `dim` clear, so it is the left-side endpoint
        Crossing::Even
    } else {
        Crossing::Odd
    }
}

/// The partition of `Q_n` along one dimension: the "left" subcube has bit
/// `dim` clear, the "right" subcube has it set, and the crossing edges are
/// exactly the `2^(n-1)` edges of that dimension.
#[derive(Clone, Copy, Debug)]
pub struct PartitionView {
    n: CubeDim,
    dim: u32,
}

impl PartitionView {
    pub fn new(n: CubeDim, dim: u32) -> Result<PartitionView> {
        if dim >= n.get() {
            return Err(Error::AxisOutOfRange { n: n.get(), axis: dim });
        }
        Ok(PartitionView { n, dim })
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    #[inline]
    pub fn is_left(&self, v: Vertex) -> bool {
        v & (1 << self.dim) == 0
    }

    #[inline]
    pub fn is_right(&self, v: Vertex) -> bool {
        !self.is_left(v)
    }

    pub fn left_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let dim = self.dim;
        (0..self.n.vertex_count()).filter(move |v| v & (1 << dim) == 0)
    }

    pub fn crossing_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let dim = self.dim;
        self.left_vertices().map(move |v| Edge::along(v, dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> CubeDim {
        CubeDim::new(n).unwrap()
    }

    #[test]
    fn parity_of_small_labels() {
        assert_eq!(parity(0), 0);
        assert_eq!(parity(5), 0);
        assert_eq!(parity(7), 1);
    }

    #[test]
    fn edge_normalization_and_dim() {
        let e = Edge::new(dim(4), 9, 1).unwrap();
        assert_eq!(e.endpoints(), (1, 9));
        assert_eq!(e.dim(), 3);
        assert_eq!(parity(e.lo()) ^ parity(e.hi()), 1);
        assert!(Edge::new(dim(3), 0, 3).is_err());
        assert!(Edge::new(dim(3), 2, 2).is_err());
        assert!(Edge::new(dim(3), 0, 8).is_err());
    }

    #[test]
    fn healthy_neighbors_examples() {
        let f0 = FaultSet::empty(dim(3));
        assert_eq!(healthy_neighbors(dim(3), 0, &f0), vec![1, 2, 4]);

        let f = FaultSet::new(dim(3), [(0, 1), (0, 2)]).unwrap();
        assert_eq!(healthy_neighbors(dim(3), 0, &f), vec![4]);

        let f = FaultSet::new(dim(4), [(0, 8)]).unwrap();
        assert_eq!(healthy_neighbors(dim(4), 0, &f), vec![1, 2, 4]);
    }

    #[test]
    fn neighbor_degree_plus_incident_faults_is_n() {
        let n = dim(4);
        let f = FaultSet::new(n, [(0, 1), (0, 2), (5, 7), (10, 14)]).unwrap();
        for v in 0..n.vertex_count() {
            let deg = healthy_neighbors(n, v, &f).len() as u32;
            assert_eq!(deg + f.incident_count(v), n.get());
        }
    }

    #[test]
    fn crossing_classification_examples() {
        let e01 = Edge::new(dim(3), 0, 1).unwrap();
        let e23 = Edge::new(dim(3), 2, 3).unwrap();
        assert_eq!(classify_crossing(e01, 0), Crossing::Even);
        assert_eq!(classify_crossing(e23, 0), Crossing::Odd);
        assert_eq!(classify_crossing(e01, 1), Crossing::NotCrossing);
    }

    #[test]
    fn crossing_edges_balanced_in_every_dimension() {
        for n in 1..=7 {
            let n = dim(n);
            for d in 0..n.get() {
                let view = PartitionView::new(n, d).unwrap();
                let (mut even, mut odd) = (0, 0);
                for e in view.crossing_edges() {
                    match classify_crossing(e, d) {
                        Crossing::Even => even += 1,
                        Crossing::Odd => odd += 1,
                        Crossing::NotCrossing => panic!("crossing edge misclassified"),
                    }
                }
                assert_eq!(even, odd);
                assert_eq!(even + odd, n.vertex_count() / 2);
            }
        }
    }

    #[test]
    fn fault_set_rejects_duplicates_and_keeps_order() {
        let n = dim(3);
        let f = FaultSet::new(n, [(6, 7), (0, 1), (2, 3)]).unwrap();
        let pairs: Vec<_> = f.iter_pairs().collect();
        assert_eq!(pairs, vec![(0, 1), (2, 3), (6, 7)]);
        assert!(FaultSet::new(n, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn text_round_trip_and_diagnostics() {
        let text = "# faults\nn=3\n0 1   # incident\n7 5\n";
        let f = FaultSet::parse_text(text).unwrap();
        assert_eq!(f.n().get(), 3);
        assert_eq!(f.iter_pairs().collect::<Vec<_>>(), vec![(0, 1), (5, 7)]);
        let reparsed = FaultSet::parse_text(&f.to_text()).unwrap();
        assert_eq!(reparsed, f);

        let err = FaultSet::parse_text("n=3\n0 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = FaultSet::parse_text("0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = FaultSet::parse_text("n=3\n0 9\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn incidence_masks_match_contains() {
        let n = dim(4);
        let f = FaultSet::new(n, [(0, 1), (2, 6), (7, 15)]).unwrap();
        let masks = f.incidence_masks();
        for v in 0..n.vertex_count() {
            for d in 0..n.get() {
                let faulty = f.contains(Edge::along(v, d));
                assert_eq!(masks[v as usize] >> d & 1 == 1, faulty);
            }
        }
    }
}
