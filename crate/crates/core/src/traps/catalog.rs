//! Cycle classification and trap generation.
//!
//! Short cycles of the hypercube fall into finitely many classes under the
//! automorphism group, determined by their dimension sequence up to
//! rotation, reflection and relabeling: two classes of 6-cycles and seven
//! of 8-cycles (one of which is a Hamiltonian cycle of a 3-subcube).
//! Cutting the even- or odd-parity vertices of such a cycle off from the
//! rest of the cube yields the catalogued DHW traps; this module builds
//! those fault sets, the claw construction, and three ten-fault `Q_5`
//! presets whose witnesses are larger than any catalogued shell.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Serialize;

use super::{dhw_boundary, TrapKind};
use crate::cube::{parity, CubeDim, Edge, FaultSet, Vertex};
use crate::symmetry::Automorphism;
use crate::{Error, Result};

/// Isomorphism classes of 6- and 8-cycles.
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CycleClass {
    C6_1,
    C6_2,
    /// Hamiltonian cycle of a 3-subcube; its DHW trap is `Q3-DHW`.
    C8_1,
    C8_2,
    C8_3,
    C8_4,
    C8_5,
    C8_6,
    C8_7,
}

impl std::fmt::Display for CycleClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Representative cycles, written in the labeling of their smallest
/// enclosing subcube.
pub(crate) const BASE_C6_1: [Vertex; 6] = [0, 1, 3, 2, 6, 4];
pub(crate) const BASE_C6_2: [Vertex; 6] = [0, 1, 3, 7, 6, 4];
pub(crate) const BASE_C8: [(CycleClass, [Vertex; 8]); 7] = [
    (CycleClass::C8_1, [0, 1, 3, 2, 6, 7, 5, 4]),
    (CycleClass::C8_2, [0, 1, 3, 2, 6, 14, 12, 8]),
    (CycleClass::C8_3, [0, 1, 3, 2, 6, 14, 12, 4]),
    (CycleClass::C8_4, [0, 1, 3, 2, 6, 4, 12, 8]),
    (CycleClass::C8_5, [0, 1, 3, 7, 15, 14, 12, 8]),
    (CycleClass::C8_6, [0, 1, 3, 7, 15, 14, 12, 4]),
    (CycleClass::C8_7, [0, 1, 3, 7, 6, 14, 10, 8]),
];

/// A closed vertex-simple cycle in `Q_n`, with its dimension sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSpec {
    n: CubeDim,
    vertices: Vec<Vertex>,
}

impl CycleSpec {
    pub fn new(n: CubeDim, vertices: Vec<Vertex>) -> Result<CycleSpec> {
        if vertices.len() < 4 || vertices.len() % 2 != 0 {
            return Err(Error::InvalidCycle(format!(
                "cycle length {} is not an even number >= 4",
                vertices.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &v in &vertices {
            n.check_vertex(v)?;
            if !seen.insert(v) {
                return Err(Error::InvalidCycle(format!("vertex {v} repeats")));
            }
        }
        for i in 0..vertices.len() {
            let u = vertices[i];
            let w = vertices[(i + 1) % vertices.len()];
            if (u ^ w).count_ones() != 1 {
                return Err(Error::InvalidCycle(format!("{u} and {w} are not adjacent")));
            }
        }
        Ok(CycleSpec { n, vertices })
    }

    pub fn n(&self) -> CubeDim {
        self.n
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dimension of each edge, in traversal order.
    pub fn dims(&self) -> Vec<u32> {
        (0..self.vertices.len())
            .map(|i| {
                let u = self.vertices[i];
                let w = self.vertices[(i + 1) % self.vertices.len()];
                (u ^ w).trailing_zeros()
            })
            .collect()
    }
}

/// Canonical form of a cyclic dimension sequence under rotation, reflection
/// and dimension relabeling: the lexicographically least first-occurrence
/// relabeling over all starting points and both directions.
fn dim_signature(dims: &[u32]) -> Vec<u8> {
    let len = dims.len();
    let mut best: Option<Vec<u8>> = None;
    let mut reversed: Vec<u32> = dims.to_vec();
    reversed.reverse();
    for seq in [dims, &reversed[..]] {
        for start in 0..len {
            let mut relabel: HashMap<u32, u8> = HashMap::new();
            let mut sig = Vec::with_capacity(len);
            for i in 0..len {
                let d = seq[(start + i) % len];
                let next = relabel.len() as u8;
                sig.push(*relabel.entry(d).or_insert(next));
            }
            if best.as_ref().is_none_or(|b| sig < *b) {
                best = Some(sig);
            }
        }
    }
    best.expect("nonempty sequence")
}

fn signature_table() -> &'static HashMap<Vec<u8>, CycleClass> {
    static TABLE: OnceLock<HashMap<Vec<u8>, CycleClass>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut map = HashMap::new();
        let n3 = CubeDim::new(3).unwrap();
        let n4 = CubeDim::new(4).unwrap();
        for (class, verts) in [(CycleClass::C6_1, &BASE_C6_1[..]), (CycleClass::C6_2, &BASE_C6_2[..])]
        {
            let spec = CycleSpec::new(n3, verts.to_vec()).expect("valid base cycle");
            let prev = map.insert(dim_signature(&spec.dims()), class);
            assert!(prev.is_none(), "base cycle signatures collide");
        }
        for (class, verts) in BASE_C8 {
            let spec = CycleSpec::new(n4, verts.to_vec()).expect("valid base cycle");
            let prev = map.insert(dim_signature(&spec.dims()), class);
            assert!(prev.is_none(), "base cycle signatures collide");
        }
        map
    })
}

/// Classifies a 6- or 8-cycle up to hypercube isomorphism by its canonical
/// dimension sequence.
pub fn classify_cycle(cycle: &CycleSpec) -> Result<CycleClass> {
    if cycle.len() != 6 && cycle.len() != 8 {
        return Err(Error::InvalidCycle(format!(
            "classification covers cycles of length 6 or 8, got {}",
            cycle.len()
        )));
    }
    let sig = dim_signature(&cycle.dims());
    signature_table().get(&sig).copied().ok_or_else(|| {
        Error::InvalidCycle("dimension sequence matches no known class".into())
    })
}

fn base_vertex_set(kind: TrapKind) -> Option<Vec<Vertex>> {
    match kind {
        TrapKind::Q1Dhw => Some(vec![0, 1]),
        TrapKind::Q2Dhw => Some(vec![0, 1, 3, 2]),
        TrapKind::Q3Dhw => Some((0..8).collect()),
        TrapKind::Q4Dhw => Some((0..16).collect()),
        TrapKind::C6_1 => Some(BASE_C6_1.to_vec()),
        TrapKind::C6_2 => Some(BASE_C6_2.to_vec()),
        TrapKind::C8_2 => Some(BASE_C8[1].1.to_vec()),
        TrapKind::C8_3 => Some(BASE_C8[2].1.to_vec()),
        TrapKind::C8_4 => Some(BASE_C8[3].1.to_vec()),
        TrapKind::C8_5 => Some(BASE_C8[4].1.to_vec()),
        TrapKind::C8_6 => Some(BASE_C8[5].1.to_vec()),
        TrapKind::C8_7 => Some(BASE_C8[6].1.to_vec()),
        TrapKind::Cl | TrapKind::GenericDhw => None,
    }
}

fn min_dim(kind: TrapKind) -> u32 {
    match kind {
        TrapKind::Q1Dhw => 2,
        TrapKind::Q2Dhw | TrapKind::C6_1 | TrapKind::C6_2 | TrapKind::Cl => 3,
        TrapKind::Q3Dhw
        | TrapKind::C8_2
        | TrapKind::C8_3
        | TrapKind::C8_4
        | TrapKind::C8_5
        | TrapKind::C8_6
        | TrapKind::C8_7 => 4,
        TrapKind::Q4Dhw => 5,
        TrapKind::GenericDhw => u32::MAX,
    }
}

/// Builds the fault set of a catalogued trap in `Q_n`: the DHW boundary of
/// the family's base shell on the chosen parity side (the claw construction
/// for `CL`, which has no side), mapped through `embedding`.
pub fn generate_trap(
    kind: TrapKind,
    n: CubeDim,
    side: u8,
    embedding: Option<&Automorphism>,
) -> Result<FaultSet> {
    if n.get() < min_dim(kind) {
        return Err(Error::TrapKindDim { kind: kind.name().into(), n: n.get() });
    }
    if let Some(a) = embedding {
        if a.n() != n.get() {
            return Err(Error::DimMismatch(a.n(), n.get()));
        }
    }
    let edges = match kind {
        TrapKind::Cl => claw_fault_edges(n),
        TrapKind::GenericDhw => {
            return Err(Error::TrapKindDim { kind: kind.name().into(), n: n.get() })
        }
        _ => {
            let t = base_vertex_set(kind).expect("catalogued shell");
            dhw_boundary(n, &t, side)?
        }
    };
    let edges = match embedding {
        Some(a) => edges.into_iter().map(|e| a.apply_edge(e)).collect(),
        None => edges,
    };
    FaultSet::from_edges(n, edges)
}

/// The claw construction around center 0 with leaves 1, 2, 4: each leaf
/// keeps its center edge plus one more, losing the lexicographically
/// smallest `n - 2` of its other edges, skipping any removal that would
/// push another vertex below degree two.
fn claw_fault_edges(n: CubeDim) -> Vec<Edge> {
    let mut degree = vec![n.get() as u8; n.vertex_count() as usize];
    let mut faults = Vec::new();
    for leaf in [1u32, 2, 4] {
        let mut candidates: Vec<Edge> = (0..n.get())
            .map(|d| Edge::along(leaf, d))
            .filter(|e| !e.touches(0))
            .collect();
        candidates.sort_unstable();
        let mut need = n.get() - 2;
        for e in candidates {
            if need == 0 {
                break;
            }
            let other = e.other(leaf);
            if degree[other as usize] <= 2 {
                continue;
            }
            degree[other as usize] -= 1;
            degree[leaf as usize] -= 1;
            faults.push(e);
            need -= 1;
        }
        assert_eq!(need, 0, "claw construction ran out of removable edges");
    }
    faults
}

/// The three ten-fault `Q_5` presets. None contains a catalogued shell;
/// their DHW witnesses span 14, 12 and 10 vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Q5Preset {
    /// Witness `T = {2..=15}` on side 1.
    T14,
    /// Witness `T = {4..=15}` on side 1.
    S12,
    /// Witness `{2, 6, 8..=15}` on side 1.
    R10,
}

pub fn q5_preset(preset: Q5Preset) -> FaultSet {
    let n = CubeDim::new(5).unwrap();
    let edges: &[(u32, u32)] = match preset {
        Q5Preset::T14 => &[
            (0, 2),
            (0, 4),
            (0, 8),
            (2, 18),
            (4, 20),
            (7, 23),
            (8, 24),
            (11, 27),
            (13, 29),
            (14, 30),
        ],
        Q5Preset::S12 => &[
            (0, 4),
            (0, 8),
            (3, 7),
            (3, 11),
            (4, 20),
            (7, 23),
            (8, 24),
            (11, 27),
            (13, 29),
            (14, 30),
        ],
        Q5Preset::R10 => &[
            (0, 2),
            (2, 3),
            (5, 13),
            (3, 11),
            (0, 8),
            (2, 18),
            (8, 24),
            (11, 27),
            (13, 29),
            (14, 30),
        ],
    };
    FaultSet::new(n, edges.iter().copied()).expect("preset edges are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> CubeDim {
        CubeDim::new(n).unwrap()
    }

    fn pairs(f: &FaultSet) -> Vec<(u32, u32)> {
        f.iter_pairs().collect()
    }

    #[test]
    fn classify_base_cycles() {
        let c = CycleSpec::new(dim(3), BASE_C6_1.to_vec()).unwrap();
        assert_eq!(classify_cycle(&c).unwrap(), CycleClass::C6_1);
        let c = CycleSpec::new(dim(3), BASE_C6_2.to_vec()).unwrap();
        assert_eq!(classify_cycle(&c).unwrap(), CycleClass::C6_2);
        let c = CycleSpec::new(dim(4), vec![0, 1, 3, 2, 6, 7, 5, 4]).unwrap();
        assert_eq!(classify_cycle(&c).unwrap(), CycleClass::C8_1);
    }

    #[test]
    fn classification_is_rotation_and_relabel_invariant() {
        // the same cycle read from another vertex, in the other direction,
        // embedded in higher dimensions
        let c = CycleSpec::new(dim(5), vec![6, 2, 3, 1, 0, 4]).unwrap();
        assert_eq!(classify_cycle(&c).unwrap(), CycleClass::C6_1);
        let doubled: Vec<u32> = BASE_C8[4].1.iter().map(|&v| v << 1).collect();
        let c = CycleSpec::new(dim(5), doubled).unwrap();
        assert_eq!(classify_cycle(&c).unwrap(), CycleClass::C8_5);
    }

    #[test]
    fn cycle_spec_validation() {
        assert!(CycleSpec::new(dim(3), vec![0, 1, 3, 2, 6, 4]).is_ok());
        assert!(CycleSpec::new(dim(3), vec![0, 1, 3]).is_err());
        assert!(CycleSpec::new(dim(3), vec![0, 1, 5, 4]).is_ok());
        assert!(CycleSpec::new(dim(3), vec![0, 1, 3, 7]).is_err());
        assert!(CycleSpec::new(dim(3), vec![0, 1, 0, 2]).is_err());
    }

    #[test]
    fn generate_q2_in_q3() {
        let f = generate_trap(TrapKind::Q2Dhw, dim(3), 0, None).unwrap();
        assert_eq!(pairs(&f), vec![(0, 4), (3, 7)]);
    }

    #[test]
    fn generate_c6_1_in_q4() {
        let f = generate_trap(TrapKind::C6_1, dim(4), 0, None).unwrap();
        assert_eq!(pairs(&f), vec![(0, 8), (3, 7), (3, 11), (6, 7), (6, 14)]);
        assert_eq!(f.len(), 3 * 4 - 7);
    }

    #[test]
    fn generate_c8_3_in_q4() {
        let f = generate_trap(TrapKind::C8_3, dim(4), 0, None).unwrap();
        assert_eq!(f.len(), 4 * 4 - 10);
        let t = BASE_C8[2].1.to_vec();
        let boundary = dhw_boundary(dim(4), &t, 0).unwrap();
        assert_eq!(f.edges(), &boundary[..]);
    }

    #[test]
    fn generate_claw_in_q3_matches_known_shape() {
        let f = generate_trap(TrapKind::Cl, dim(3), 0, None).unwrap();
        assert_eq!(pairs(&f), vec![(1, 3), (2, 6), (4, 5)]);
        // side is irrelevant for the claw
        let g = generate_trap(TrapKind::Cl, dim(3), 1, None).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn generate_rejects_undersized_cubes() {
        assert!(generate_trap(TrapKind::C8_5, dim(3), 0, None).is_err());
        assert!(generate_trap(TrapKind::Q3Dhw, dim(3), 0, None).is_err());
        assert!(generate_trap(TrapKind::Q4Dhw, dim(4), 0, None).is_err());
        assert!(generate_trap(TrapKind::GenericDhw, dim(5), 0, None).is_err());
    }

    #[test]
    fn generate_through_embedding() {
        let n = dim(4);
        let a = Automorphism::new(n, &[2, 3, 0, 1], 5).unwrap();
        let base = generate_trap(TrapKind::Q2Dhw, n, 1, None).unwrap();
        let mapped = generate_trap(TrapKind::Q2Dhw, n, 1, Some(&a)).unwrap();
        let expect = crate::symmetry::apply(&a, &base).unwrap();
        assert_eq!(mapped, expect);
    }

    #[test]
    fn presets_have_ten_edges() {
        for p in [Q5Preset::T14, Q5Preset::S12, Q5Preset::R10] {
            assert_eq!(q5_preset(p).len(), 10);
        }
    }
}
