//! The trap catalog: witnesses that certify non-Hamiltonicity.
//!
//! A vertex set `T` is *disconnected halfway* (DHW) when at least half of
//! its vertices have some parity `s` and every edge from a parity-`s`
//! vertex of `T` to the outside is faulty. Any cycle visits such a `T` in
//! runs that use one more parity-`s` vertex than the other kind, so no
//! cycle can cover the cube: a verified witness is a proof.
//!
//! Small witnesses come in named families, by the shape of `T`: subcubes
//! (`Q1`-`Q4`-DHW), the two 6-cycle classes, six 8-cycle classes, plus the
//! claw (`CL`) trap, which is not a DHW set but pins three cycle edges at
//! one vertex. [`detect_traps`] finds every catalogued witness of a fault
//! set; [`detect_generic_dhw`] searches for arbitrary DHW witnesses up to a
//! size bound.

mod catalog;
mod detect;

pub use catalog::{classify_cycle, generate_trap, q5_preset, CycleClass, CycleSpec, Q5Preset};
pub use detect::{detect_generic_dhw, detect_traps};

use serde::Serialize;

use crate::cube::{parity, CubeDim, Edge, FaultSet, Vertex};
use crate::solver;
use crate::{Error, Result};

/// The trap families, in report order.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TrapKind {
    #[serde(rename = "Q1-DHW")]
    Q1Dhw,
    #[serde(rename = "Q2-DHW")]
    Q2Dhw,
    #[serde(rename = "Q3-DHW")]
    Q3Dhw,
    #[serde(rename = "Q4-DHW")]
    Q4Dhw,
    #[serde(rename = "C6_1")]
    C6_1,
    #[serde(rename = "C6_2")]
    C6_2,
    #[serde(rename = "C8_2")]
    C8_2,
    #[serde(rename = "C8_3")]
    C8_3,
    #[serde(rename = "C8_4")]
    C8_4,
    #[serde(rename = "C8_5")]
    C8_5,
    #[serde(rename = "C8_6")]
    C8_6,
    #[serde(rename = "C8_7")]
    C8_7,
    #[serde(rename = "CL")]
    Cl,
    #[serde(rename = "generic-DHW")]
    GenericDhw,
}

impl TrapKind {
    pub const ALL: [TrapKind; 14] = [
        TrapKind::Q1Dhw,
        TrapKind::Q2Dhw,
        TrapKind::Q3Dhw,
        TrapKind::Q4Dhw,
        TrapKind::C6_1,
        TrapKind::C6_2,
        TrapKind::C8_2,
        TrapKind::C8_3,
        TrapKind::C8_4,
        TrapKind::C8_5,
        TrapKind::C8_6,
        TrapKind::C8_7,
        TrapKind::Cl,
        TrapKind::GenericDhw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TrapKind::Q1Dhw => "Q1-DHW",
            TrapKind::Q2Dhw => "Q2-DHW",
            TrapKind::Q3Dhw => "Q3-DHW",
            TrapKind::Q4Dhw => "Q4-DHW",
            TrapKind::C6_1 => "C6_1",
            TrapKind::C6_2 => "C6_2",
            TrapKind::C8_2 => "C8_2",
            TrapKind::C8_3 => "C8_3",
            TrapKind::C8_4 => "C8_4",
            TrapKind::C8_5 => "C8_5",
            TrapKind::C8_6 => "C8_6",
            TrapKind::C8_7 => "C8_7",
            TrapKind::Cl => "CL",
            TrapKind::GenericDhw => "generic-DHW",
        }
    }

    pub fn parse(s: &str) -> Option<TrapKind> {
        TrapKind::ALL.iter().copied().find(|k| k.name().eq_ignore_ascii_case(s))
    }
}

impl std::fmt::Display for TrapKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A disconnected-halfway witness: the vertex set `T`, the parity side
/// whose outward edges must be faulty, and that boundary.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DhwWitness {
    #[serde(rename = "T")]
    pub t: Vec<Vertex>,
    pub side: u8,
    pub boundary: Vec<Edge>,
}

/// A claw: three healthy edges from `center` to vertices of healthy degree
/// two. A Hamiltonian cycle would need all three at the center.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClMark {
    pub center: Vertex,
    pub leaves: [Vertex; 3],
    /// The faulty edges that pin the leaves to degree two.
    pub faults: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum TrapWitness {
    Dhw(DhwWitness),
    Claw(ClMark),
}

/// One detected trap: its family tag plus the verifying witness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TrapReport {
    pub kind: TrapKind,
    #[serde(flatten)]
    pub witness: TrapWitness,
}

/// Why a claimed DHW witness does not verify.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DhwError {
    #[error("side must be 0 or 1, got {0}")]
    BadSide(u8),
    #[error("vertex {0} is out of range")]
    BadVertex(Vertex),
    #[error("vertex {0} repeats")]
    DuplicateVertex(Vertex),
    #[error("T must be a proper nonempty subset of the cube")]
    NotProperSubset,
    #[error("side {side} has {side_count} vertices, fewer than the {other_count} on the other side")]
    ParityDeficit { side: u8, side_count: u32, other_count: u32 },
    #[error("boundary edge {0} is healthy")]
    HealthyBoundary(Edge),
}

fn check_vertex_set(n: CubeDim, t: &[Vertex]) -> Result<Vec<Vertex>, DhwError> {
    if t.is_empty() || t.len() >= n.vertex_count() as usize {
        return Err(DhwError::NotProperSubset);
    }
    let mut sorted = t.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(DhwError::DuplicateVertex(w[0]));
        }
    }
    if let Some(&max) = sorted.last() {
        if !n.contains(max) {
            return Err(DhwError::BadVertex(max));
        }
    }
    Ok(sorted)
}

fn boundary_of(n: CubeDim, sorted_t: &[Vertex], side: u8) -> Vec<Edge> {
    let mut boundary = Vec::new();
    for &v in sorted_t {
        if parity(v) != side {
            continue;
        }
        for d in 0..n.get() {
            let w = v ^ (1 << d);
            if sorted_t.binary_search(&w).is_err() {
                boundary.push(Edge::along(v, d));
            }
        }
    }
    boundary.sort_unstable();
    boundary
}

/// Verifies a disconnected-halfway witness: the chosen side must hold at
/// least half of `T` and every edge from a side vertex out of `T` must be
/// faulty. On failure, reports the parity deficit or the first healthy
/// boundary edge.
pub fn verify_dhw(
    faults: &FaultSet,
    t: &[Vertex],
    side: u8,
) -> Result<DhwWitness, DhwError> {
    if side > 1 {
        return Err(DhwError::BadSide(side));
    }
    let n = faults.n();
    let sorted = check_vertex_set(n, t)?;
    let side_count = sorted.iter().filter(|&&v| parity(v) == side).count() as u32;
    let other_count = sorted.len() as u32 - side_count;
    if side_count < other_count {
        return Err(DhwError::ParityDeficit { side, side_count, other_count });
    }
    let boundary = boundary_of(n, &sorted, side);
    for &e in &boundary {
        if !faults.contains(e) {
            return Err(DhwError::HealthyBoundary(e));
        }
    }
    Ok(DhwWitness { t: sorted, side, boundary })
}

/// The exact edge set that disconnects `T` halfway on the given side: all
/// edges from parity-`side` vertices of `T` to the complement. Making all
/// of them faulty yields a verifying witness.
pub fn dhw_boundary(n: CubeDim, t: &[Vertex], side: u8) -> Result<Vec<Edge>> {
    if side > 1 {
        return Err(Error::NotProperSubset(n.get()));
    }
    let sorted = check_vertex_set(n, t).map_err(|e| match e {
        DhwError::BadVertex(v) => Error::VertexOutOfRange { n: n.get(), vertex: v },
        _ => Error::NotProperSubset(n.get()),
    })?;
    Ok(boundary_of(n, &sorted, side))
}

/// Shrinks a verified witness to a fixpoint of the standard reductions:
/// rebalance the parity count, keep a disconnected component, strip pendant
/// vertices, and cut at a bridge between two balanced halves. The result
/// verifies against the same fault set and is never larger.
pub fn reduce_witness(w: &DhwWitness, faults: &FaultSet) -> DhwWitness {
    let n = faults.n();
    let side = w.side;
    let mut t = w.t.clone();
    debug_assert!(verify_dhw(faults, &t, side).is_ok());

    loop {
        let side_count = t.iter().filter(|&&v| parity(v) == side).count();
        let other_count = t.len() - side_count;

        // parity imbalance: drop the largest side vertex carrying faults
        if side_count > other_count {
            let pick = t
                .iter()
                .rev()
                .copied()
                .find(|&v| parity(v) == side && faults.incident_count(v) > 0)
                .or_else(|| t.iter().rev().copied().find(|&v| parity(v) == side))
                .expect("side is nonempty");
            t.retain(|&v| v != pick);
            continue;
        }

        // healthy-induced structure of T
        let adj = induced_healthy_adjacency(n, &t, faults);

        // disconnected: keep the first component that is itself a witness
        let comps = components(&t, &adj);
        if comps.len() > 1 {
            let comp = comps
                .into_iter()
                .find(|c| {
                    let sc = c.iter().filter(|&&v| parity(v) == side).count();
                    2 * sc >= c.len()
                })
                .expect("some component carries the parity majority");
            t = comp;
            continue;
        }

        // pendant vertices
        if t.len() > 2 {
            if let Some(pos) = (0..t.len()).find(|&i| adj[i].len() == 1) {
                let v = t[pos];
                let v0 = t[adj[pos][0]];
                if parity(v) == side {
                    t = vec![v.min(v0), v.max(v0)];
                } else {
                    t.retain(|&x| x != v && x != v0);
                }
                continue;
            }
        }

        // bridge between two balanced halves: keep the half whose bridge
        // endpoint has the minority parity
        if let Some(next) = cut_at_bridge(&t, &adj, side) {
            t = next;
            continue;
        }

        break;
    }

    verify_dhw(faults, &t, side).expect("reductions preserve the witness")
}

fn induced_healthy_adjacency(n: CubeDim, t: &[Vertex], faults: &FaultSet) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); t.len()];
    for (i, &v) in t.iter().enumerate() {
        for d in 0..n.get() {
            let w = v ^ (1 << d);
            if w < v {
                continue;
            }
            if let Ok(j) = t.binary_search(&w) {
                if !faults.contains(Edge::along(v, d)) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
    }
    adj
}

fn components(t: &[Vertex], adj: &[Vec<usize>]) -> Vec<Vec<Vertex>> {
    let mut seen = vec![false; t.len()];
    let mut comps = Vec::new();
    for start in 0..t.len() {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(i) = stack.pop() {
            comp.push(t[i]);
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

fn cut_at_bridge(t: &[Vertex], adj: &[Vec<usize>], side: u8) -> Option<Vec<Vertex>> {
    // brute-force bridge scan; witnesses stay small
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, nbrs) in adj.iter().enumerate() {
        for &j in nbrs {
            if i < j {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable_by_key(|&(i, j)| (t[i], t[j]));
    for &(i, j) in &edges {
        let mut seen = vec![false; t.len()];
        seen[i] = true;
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if (x == i && y == j) || (x == j && y == i) {
                    continue;
                }
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen[j] {
            continue; // not a bridge
        }
        let half_i: Vec<Vertex> =
            (0..t.len()).filter(|&x| seen[x]).map(|x| t[x]).collect();
        let half_j: Vec<Vertex> =
            (0..t.len()).filter(|&x| !seen[x]).map(|x| t[x]).collect();
        let balanced = |half: &[Vertex]| {
            let p0 = half.iter().filter(|&&v| parity(v) == 0).count();
            2 * p0 == half.len()
        };
        if !balanced(&half_i) || !balanced(&half_j) {
            continue;
        }
        // keep the half whose bridge endpoint is on the minority side
        let keep = if parity(t[i]) != side { half_i } else { half_j };
        return Some(keep);
    }
    None
}

/// True when `F` precludes Hamiltonian cycles but every single-edge
/// deletion restores one. Monotonicity of fault sets makes the single-edge
/// check sufficient.
pub fn check_minimality(faults: &FaultSet) -> bool {
    if solver::find_hamiltonian(faults).is_hamiltonian() {
        return false;
    }
    (0..faults.len()).all(|i| solver::find_hamiltonian(&faults.without_index(i)).is_hamiltonian())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> CubeDim {
        CubeDim::new(n).unwrap()
    }

    fn fs(n: u32, pairs: &[(u32, u32)]) -> FaultSet {
        FaultSet::new(dim(n), pairs.iter().copied()).unwrap()
    }

    fn pairs(edges: &[Edge]) -> Vec<(u32, u32)> {
        edges.iter().map(|e| e.endpoints()).collect()
    }

    #[test]
    fn verify_degree_one_vertex() {
        let f = fs(3, &[(0, 1), (0, 2)]);
        let w = verify_dhw(&f, &[0, 4], 0).unwrap();
        assert_eq!(pairs(&w.boundary), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn verify_four_cycle_witness() {
        let f = fs(3, &[(0, 4), (3, 7)]);
        let w = verify_dhw(&f, &[0, 1, 3, 2], 0).unwrap();
        assert_eq!(pairs(&w.boundary), vec![(0, 4), (3, 7)]);
        assert!(!solver::find_hamiltonian(&f).is_hamiltonian());
    }

    #[test]
    fn verify_reports_first_healthy_edge() {
        let f = FaultSet::empty(dim(3));
        let err = verify_dhw(&f, &[0, 1], 0).unwrap_err();
        assert_eq!(err, DhwError::HealthyBoundary(Edge::new(dim(3), 0, 2).unwrap()));
    }

    #[test]
    fn verify_reports_parity_deficit() {
        let f = FaultSet::empty(dim(3));
        let err = verify_dhw(&f, &[0, 1, 3], 0).unwrap_err();
        assert_eq!(err, DhwError::ParityDeficit { side: 0, side_count: 1, other_count: 2 });
    }

    #[test]
    fn boundary_examples() {
        let b = dhw_boundary(dim(3), &[0, 1], 0).unwrap();
        assert_eq!(pairs(&b), vec![(0, 2), (0, 4)]);

        let b = dhw_boundary(dim(4), &[0, 1, 3, 2, 6, 4], 0).unwrap();
        assert_eq!(pairs(&b), vec![(0, 8), (3, 7), (3, 11), (6, 7), (6, 14)]);

        let b = dhw_boundary(dim(3), &[0, 1, 3, 2], 0).unwrap();
        assert_eq!(pairs(&b), vec![(0, 4), (3, 7)]);
    }

    #[test]
    fn boundary_rejects_improper_sets() {
        assert!(dhw_boundary(dim(3), &[], 0).is_err());
        assert!(dhw_boundary(dim(3), &(0..8).collect::<Vec<_>>(), 0).is_err());
        assert!(dhw_boundary(dim(3), &[0, 0], 0).is_err());
    }

    #[test]
    fn reduce_drops_extra_side_vertex() {
        // a Q2 witness padded with one extra parity-0 vertex that carries
        // its own faults
        let base = fs(3, &[(0, 4), (3, 7)]);
        let mut edges = base.edges().to_vec();
        for e in dhw_boundary(dim(3), &[0, 1, 3, 2, 5], 0).unwrap() {
            if !base.contains(e) {
                edges.push(e);
            }
        }
        let f = FaultSet::from_edges(dim(3), edges).unwrap();
        let w = verify_dhw(&f, &[0, 1, 3, 2, 5], 0).unwrap();
        let reduced = reduce_witness(&w, &f);
        assert_eq!(reduced.t, vec![0, 1, 2, 3]);
        assert_eq!(reduced.side, 0);
    }

    #[test]
    fn reduce_keeps_minimal_q2_witness() {
        let f = fs(3, &[(0, 4), (3, 7)]);
        let w = verify_dhw(&f, &[0, 1, 3, 2], 0).unwrap();
        let reduced = reduce_witness(&w, &f);
        assert_eq!(reduced, w);
    }

    #[test]
    fn reduce_splits_disconnected_witness() {
        // two far-apart degree-one vertices; the union is a witness, each
        // component is one too
        let f = fs(4, &[(0, 1), (0, 2), (0, 4), (15, 7), (15, 11), (15, 13)]);
        let w = verify_dhw(&f, &[0, 8, 15, 14], 0).unwrap();
        let reduced = reduce_witness(&w, &f);
        assert_eq!(reduced.t, vec![0, 8]);
    }

    #[test]
    fn minimality_examples() {
        assert!(check_minimality(&fs(3, &[(0, 4), (3, 7)])));
        assert!(!check_minimality(&fs(3, &[(0, 4), (3, 7), (5, 7)])));
        assert!(!check_minimality(&fs(3, &[(0, 1)])));
    }
}
