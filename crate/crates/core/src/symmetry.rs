//! The automorphism group of `Q_n` and canonical forms of fault sets.
//!
//! Every automorphism of the hypercube is a dimension permutation composed
//! with a translation (XOR by a fixed vertex), so the group has order
//! `2^n * n!`. Canonical forms are global lexicographic minima over the
//! whole group, which keeps isomorphism testing and isomorph-free
//! enumeration exact at the dimensions this crate targets.

use std::sync::{Arc, OnceLock};

use crate::cube::{CubeDim, Edge, FaultSet, Vertex};
use crate::edgeset::EdgeBits;
use crate::tables::{tables, CubeTables};
use crate::{Error, Result};

/// An automorphism of `Q_n`: bit permutation followed by XOR translation.
///
/// The action is `a(x) = p(x) ^ xor` where bit `i` of `p(x)` is bit
/// `perm[i]` of `x`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    perm: Vec<u8>,
    xor: Vertex,
}

impl Automorphism {
    pub fn new(n: CubeDim, perm: &[u32], xor: Vertex) -> Result<Automorphism> {
        let nn = n.get() as usize;
        if perm.len() != nn {
            return Err(Error::BadPermutation(n.get()));
        }
        let mut seen = vec![false; nn];
        for &p in perm {
            if p as usize >= nn || seen[p as usize] {
                return Err(Error::BadPermutation(n.get()));
            }
            seen[p as usize] = true;
        }
        n.check_vertex(xor)?;
        Ok(Automorphism { perm: perm.iter().map(|&p| p as u8).collect(), xor })
    }

    pub fn identity(n: CubeDim) -> Automorphism {
        Automorphism { perm: (0..n.get() as u8).collect(), xor: 0 }
    }

    /// Pure translation `x -> x ^ t`.
    pub fn translation(n: CubeDim, t: Vertex) -> Result<Automorphism> {
        n.check_vertex(t)?;
        Ok(Automorphism { perm: (0..n.get() as u8).collect(), xor: t })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.perm.len() as u32
    }

    pub fn perm(&self) -> impl Iterator<Item = u32> + '_ {
        self.perm.iter().map(|&p| p as u32)
    }

    pub fn xor(&self) -> Vertex {
        self.xor
    }

    #[inline]
    pub fn apply_vertex(&self, v: Vertex) -> Vertex {
        permute_bits(&self.perm, v) ^ self.xor
    }

    #[inline]
    pub fn apply_edge(&self, e: Edge) -> Edge {
        let a = self.apply_vertex(e.lo());
        let b = self.apply_vertex(e.hi());
        Edge::along(a.min(b), (a ^ b).trailing_zeros())
    }

    /// `self` after `other`: `(self.compose(other))(x) = self(other(x))`.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.n() != other.n() {
            return Err(Error::DimMismatch(self.n(), other.n()));
        }
        let perm: Vec<u8> = self.perm.iter().map(|&i| other.perm[i as usize]).collect();
        let xor = permute_bits(&self.perm, other.xor) ^ self.xor;
        Ok(Automorphism { perm, xor })
    }

    pub fn inverse(&self) -> Automorphism {
        let n = self.perm.len();
        let mut inv = vec![0u8; n];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        let xor = permute_bits(&inv, self.xor);
        Automorphism { perm: inv, xor }
    }
}

impl std::fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Automorphism(perm={:?}, xor={})", self.perm, self.xor)
    }
}

#[inline]
fn permute_bits(perm: &[u8], v: Vertex) -> Vertex {
    let mut out = 0;
    for (i, &p) in perm.iter().enumerate() {
        out |= (v >> p & 1) << i;
    }
    out
}

/// Order of `Aut(Q_n)`, `2^n * n!`.
pub fn group_order(n: CubeDim) -> u64 {
    let mut fact = 1u64;
    for i in 2..=n.get() as u64 {
        fact *= i;
    }
    fact << n.get()
}

/// Calls `f` with every `(perm, xor)` pair of the group, permutations in
/// lexicographic order and translations ascending within each permutation.
pub fn for_each_automorphism<F: FnMut(&[u8], Vertex)>(n: CubeDim, mut f: F) {
    let nn = n.get() as usize;
    let mut perm: Vec<u8> = (0..nn as u8).collect();
    loop {
        for xor in 0..n.vertex_count() {
            f(&perm, xor);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

/// All automorphisms of `Q_n`, in the `for_each_automorphism` order. Meant
/// for small `n`; the group has `2^n * n!` elements.
pub fn group(n: CubeDim) -> Vec<Automorphism> {
    let mut out = Vec::with_capacity(group_order(n) as usize);
    for_each_automorphism(n, |perm, xor| {
        out.push(Automorphism { perm: perm.to_vec(), xor });
    });
    out
}

fn next_permutation(perm: &mut [u8]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Image of a fault set under an automorphism, re-normalized and sorted.
pub fn apply(a: &Automorphism, f: &FaultSet) -> Result<FaultSet> {
    if a.n() != f.n().get() {
        return Err(Error::DimMismatch(a.n(), f.n().get()));
    }
    let edges: Vec<Edge> = f.edges().iter().map(|&e| a.apply_edge(e)).collect();
    FaultSet::from_edges(f.n(), edges)
}

/// The canonical representative of a fault set's isomorphism class: the
/// lexicographically least image (edges compared by `(lo, hi)`) over the
/// full automorphism group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    rep: FaultSet,
}

impl CanonicalForm {
    pub fn rep(&self) -> &FaultSet {
        &self.rep
    }

    pub fn into_inner(self) -> FaultSet {
        self.rep
    }
}

/// Per-element edge-id maps, precomputed for dimensions where the whole
/// group sweep is the hot path of enumeration.
struct GroupMaps {
    edge_maps: Vec<Box<[u16]>>,
}

const MAPPED_DIM_MAX: u32 = 5;

fn group_maps(n: CubeDim) -> Arc<GroupMaps> {
    static MAPS: [OnceLock<Arc<GroupMaps>>; MAPPED_DIM_MAX as usize + 1] =
        [const { OnceLock::new() }; MAPPED_DIM_MAX as usize + 1];
    MAPS[n.get() as usize]
        .get_or_init(|| {
            let t = tables(n);
            let mut edge_maps = Vec::with_capacity(group_order(n) as usize);
            for_each_automorphism(n, |perm, xor| {
                let mut map = vec![0u16; t.edges.len()];
                for (id, &e) in t.edges.iter().enumerate() {
                    let a = permute_bits(perm, e.lo()) ^ xor;
                    let b = permute_bits(perm, e.hi()) ^ xor;
                    let image = Edge::along(a.min(b), (a ^ b).trailing_zeros());
                    map[id] = t.edge_id(image) as u16;
                }
                edge_maps.push(map.into_boxed_slice());
            });
            Arc::new(GroupMaps { edge_maps })
        })
        .clone()
}

#[inline]
fn map_bits(map: &[u16], bits: &EdgeBits) -> EdgeBits {
    let mut out = EdgeBits::EMPTY;
    for id in bits.iter_ids() {
        out.insert(map[id as usize] as u32);
    }
    out
}

/// Computes the canonical form. Exact for every `n`; intended for `n <= 7`
/// where the group is at most 645120 elements.
pub fn canonical_form(f: &FaultSet) -> CanonicalForm {
    if f.is_empty() {
        return CanonicalForm { rep: f.clone() };
    }
    let n = f.n();
    let t = tables(n);
    if n.get() <= MAPPED_DIM_MAX {
        let maps = group_maps(n);
        let bits = t.fault_bits(f);
        let mut best = bits;
        for map in &maps.edge_maps {
            let image = map_bits(map, &bits);
            if image.lt_same_len(&best) {
                best = image;
            }
        }
        CanonicalForm { rep: t.fault_set_from_bits(&best) }
    } else {
        CanonicalForm { rep: canonical_by_cosets(f, &t) }
    }
}

/// Canonicalization for larger `n`: the minimal image must map some fault
/// onto the least edge `(0, 1)`, so it suffices to sweep, for each fault
/// `e`, the coset of elements taking `e` to `(0, 1)`. That coset is
/// `stab((0,1)) . a_e` with `|stab| = 2 (n-1)!`, which cuts the sweep from
/// `2^n n!` to `|F| * 2 (n-1)!` elements.
fn canonical_by_cosets(f: &FaultSet, t: &CubeTables) -> FaultSet {
    let n = f.n();
    let nn = n.get() as usize;
    let mut best: Option<Vec<Edge>> = None;
    let mut image: Vec<Edge> = Vec::with_capacity(f.len());

    // stabilizer of edge (0,1): perm fixes dimension 0, xor in {0,1}
    let mut sub_perm: Vec<u8> = (1..nn as u8).collect();
    loop {
        let mut perm = Vec::with_capacity(nn);
        perm.push(0u8);
        perm.extend_from_slice(&sub_perm);
        for stab_xor in 0..2u32 {
            let stab = Automorphism { perm: perm.clone(), xor: stab_xor };
            for &e in f.edges() {
                // a_e: swap dimension `e.dim()` with 0, then translate the
                // low endpoint onto 0
                let mut tau: Vec<u8> = (0..nn as u8).collect();
                tau.swap(0, e.dim() as usize);
                let xor = permute_bits(&tau, e.lo());
                let a_e = Automorphism { perm: tau, xor };
                let candidate = stab.compose(&a_e).expect("same dimension");
                image.clear();
                image.extend(f.edges().iter().map(|&x| candidate.apply_edge(x)));
                image.sort_unstable();
                if best.as_deref().is_none_or(|b| image[..] < b[..]) {
                    best = Some(image.clone());
                }
            }
        }
        if !next_permutation(&mut sub_perm) {
            break;
        }
    }
    FaultSet::from_edges(n, best.expect("nonempty fault set")).expect("automorphism image")
}

/// True when two fault sets lie in the same orbit of `Aut(Q_n)`.
pub fn are_isomorphic(f1: &FaultSet, f2: &FaultSet) -> Result<bool> {
    if f1.n() != f2.n() {
        return Err(Error::DimMismatch(f1.n().get(), f2.n().get()));
    }
    if f1.len() != f2.len() {
        return Ok(false);
    }
    Ok(canonical_form(f1) == canonical_form(f2))
}

/// True when a fault set equals its own canonical representative. This is
/// the acceptance test of canonical augmentation: a child is kept only when
/// it is orderly canonical.
pub fn is_orderly_canonical(f: &FaultSet) -> bool {
    if f.is_empty() {
        return true;
    }
    let n = f.n();
    if n.get() <= MAPPED_DIM_MAX {
        let t = tables(n);
        let maps = group_maps(n);
        let bits = t.fault_bits(f);
        for map in &maps.edge_maps {
            if map_bits(map, &bits).lt_same_len(&bits) {
                return false;
            }
        }
        true
    } else {
        canonical_form(f).rep() == f
    }
}

/// Number of group elements fixing `f` setwise. Exposed for orbit-stabilizer
/// cross-checks in tests.
pub fn stabilizer_size(f: &FaultSet) -> u64 {
    let n = f.n();
    let t = tables(n);
    let bits = t.fault_bits(f);
    let mut count = 0u64;
    if n.get() <= MAPPED_DIM_MAX {
        let maps = group_maps(n);
        for map in &maps.edge_maps {
            if map_bits(map, &bits) == bits {
                count += 1;
            }
        }
    } else {
        for_each_automorphism(n, |perm, xor| {
            let a = Automorphism { perm: perm.to_vec(), xor };
            let image = EdgeBits::from_ids(
                f.edges().iter().map(|&e| t.edge_id(a.apply_edge(e))),
            );
            if image == bits {
                count += 1;
            }
        });
    }
    count
}

/// Orbit partition of every subset of a given edge list; brute force, used
/// by tests and the small-n cross-checks.
#[doc(hidden)]
pub fn orbit_count_brute(n: CubeDim, k: u32) -> u64 {
    use std::collections::HashSet;
    let t = tables(n);
    let maps = group_maps(n);
    assert!(n.get() <= MAPPED_DIM_MAX, "brute orbit scan only for small n");
    let edge_count = t.edges.len() as u32;
    let mut seen: HashSet<EdgeBits> = HashSet::new();
    let mut orbits = 0u64;
    let mut subset: Vec<u32> = (0..k).collect();
    if k > edge_count {
        return 0;
    }
    loop {
        let bits = EdgeBits::from_ids(subset.iter().copied());
        if !seen.contains(&bits) {
            orbits += 1;
            for map in &maps.edge_maps {
                seen.insert(map_bits(map, &bits));
            }
        }
        // next k-combination of 0..edge_count
        let mut i = k as usize;
        loop {
            if i == 0 {
                return orbits;
            }
            i -= 1;
            if subset[i] + 1 <= edge_count - (k - i as u32) {
                subset[i] += 1;
                for j in i + 1..k as usize {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
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

    #[test]
    fn identity_and_translation_examples() {
        let f = fs(3, &[(0, 1)]);
        let id = Automorphism::identity(dim(3));
        assert_eq!(apply(&id, &f).unwrap(), f);

        // translating along the edge's own dimension fixes it setwise
        let t1 = Automorphism::translation(dim(3), 1).unwrap();
        assert_eq!(apply(&t1, &f).unwrap(), f);

        let t2 = Automorphism::translation(dim(3), 2).unwrap();
        assert_eq!(apply(&t2, &f).unwrap(), fs(3, &[(2, 3)]));
    }

    #[test]
    fn compose_matches_sequential_application() {
        let n = dim(4);
        let a = Automorphism::new(n, &[2, 0, 3, 1], 9).unwrap();
        let b = Automorphism::new(n, &[1, 3, 0, 2], 6).unwrap();
        let ab = a.compose(&b).unwrap();
        for v in 0..n.vertex_count() {
            assert_eq!(ab.apply_vertex(v), a.apply_vertex(b.apply_vertex(v)));
        }
        let inv = a.inverse();
        for v in 0..n.vertex_count() {
            assert_eq!(inv.apply_vertex(a.apply_vertex(v)), v);
        }
    }

    #[test]
    fn automorphisms_preserve_adjacency() {
        let n = dim(4);
        let a = Automorphism::new(n, &[3, 1, 0, 2], 11).unwrap();
        for v in 0..n.vertex_count() {
            for d in 0..n.get() {
                let e = Edge::along(v, d);
                let img = a.apply_edge(e);
                assert_eq!((img.lo() ^ img.hi()).count_ones(), 1);
            }
        }
    }

    #[test]
    fn group_size_small() {
        assert_eq!(group(dim(3)).len(), 48);
        assert_eq!(group_order(dim(3)), 48);
        assert_eq!(group_order(dim(5)), 3840);
    }

    #[test]
    fn canonical_single_edge_is_least_edge() {
        let c = canonical_form(&fs(3, &[(5, 7)]));
        assert_eq!(c.rep(), &fs(3, &[(0, 1)]));
    }

    #[test]
    fn incident_pairs_share_one_orbit() {
        let a = fs(3, &[(0, 1), (0, 2)]);
        let b = fs(3, &[(0, 1), (1, 3)]);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert!(are_isomorphic(&a, &b).unwrap());
    }

    #[test]
    fn disjoint_vs_incident_pairs_differ() {
        let a = fs(3, &[(0, 1), (2, 3)]);
        let b = fs(3, &[(0, 1), (0, 2)]);
        assert!(!are_isomorphic(&a, &b).unwrap());
        assert!(are_isomorphic(&a, &a).unwrap());
    }

    #[test]
    fn orderly_examples() {
        assert!(is_orderly_canonical(&FaultSet::empty(dim(3))));
        assert!(is_orderly_canonical(&fs(3, &[(0, 1)])));
        assert!(!is_orderly_canonical(&fs(3, &[(2, 3)])));
    }

    #[test]
    fn canonical_is_orbit_invariant() {
        let f = fs(4, &[(0, 1), (2, 6), (9, 13), (7, 15)]);
        let base = canonical_form(&f);
        for a in group(dim(4)).iter().step_by(17) {
            let g = apply(a, &f).unwrap();
            assert_eq!(canonical_form(&g), base);
        }
    }

    #[test]
    fn coset_path_agrees_with_table_path() {
        // same fault pattern canonicalized through both code paths
        let small = fs(5, &[(0, 4), (3, 7), (8, 24), (13, 29)]);
        let c_table = canonical_form(&small).into_inner();
        let c_coset = canonical_by_cosets(&small, &tables(dim(5)));
        assert_eq!(c_table, c_coset);
    }

    #[test]
    fn orbit_stabilizer_product_is_group_order() {
        for f in [
            fs(3, &[(0, 1)]),
            fs(3, &[(0, 1), (2, 3)]),
            fs(3, &[(0, 1), (0, 2), (0, 4)]),
        ] {
            use std::collections::HashSet;
            let mut orbit = HashSet::new();
            for a in group(dim(3)) {
                orbit.insert(apply(&a, &f).unwrap());
            }
            let orbit_len = orbit.len() as u64;
            assert_eq!(orbit_len * stabilizer_size(&f), group_order(dim(3)));
        }
    }
}
