//! Trap detection: catalogued shells by subset test, plus a bounded search
//! for generic disconnected-halfway witnesses.
//!
//! All 2-, 3- and 4-subcubes and all 6- and 8-cycles of `Q_n` are
//! enumerated once per dimension, each with its precomputed per-side
//! boundary as an edge bitset. Detection is then one subset test per
//! shell, independent of where the faults are.

use std::collections::{HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use super::catalog::{classify_cycle, CycleClass, CycleSpec};
use super::{ClMark, DhwWitness, TrapKind, TrapReport, TrapWitness};
use crate::cube::{parity, CubeDim, Edge, FaultSet, Vertex};
use crate::edgeset::EdgeBits;
use crate::tables::{tables, CubeTables};

/// Largest dimension with precomputed shell tables. The table size grows
/// with the fourth power of the subcube count; nothing above `Q_7` is
/// practical or needed.
pub const DETECT_DIM_MAX: u32 = 7;

struct Shell {
    kind: TrapKind,
    side: u8,
    t: Vec<Vertex>,
    boundary_ids: EdgeBits,
    boundary: Vec<Edge>,
}

struct ShellTables {
    shells: Vec<Shell>,
}

fn shell_tables(n: CubeDim) -> Arc<ShellTables> {
    static TABLES: [OnceLock<Arc<ShellTables>>; DETECT_DIM_MAX as usize + 1] =
        [const { OnceLock::new() }; DETECT_DIM_MAX as usize + 1];
    TABLES[n.get() as usize]
        .get_or_init(|| Arc::new(build_shell_tables(n)))
        .clone()
}

/// All strictly increasing `k`-subsets of `0..n`.
fn dim_combos(n: u32, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k as usize;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] + 1 <= n - (k - i as u32) {
                cur[i] += 1;
                for j in i + 1..k as usize {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Embeds a vertex of an abstract `Q_k` into `Q_n`: bit `i` goes to
/// dimension `dims[i]`, on top of `base`.
fn embed(v: Vertex, dims: &[u32], base: Vertex) -> Vertex {
    let mut out = base;
    for (i, &d) in dims.iter().enumerate() {
        out |= (v >> i & 1) << d;
    }
    out
}

/// Bases of the sublattices spanned by `dims`: all vertices with zeros on
/// the spanned dimensions.
fn sublattice_bases(n: CubeDim, dims: &[u32]) -> Vec<Vertex> {
    let mask: u32 = dims.iter().map(|&d| 1 << d).sum();
    (0..n.vertex_count()).filter(|v| v & mask == 0).collect()
}

/// All cycles of the given length in `Q_k`, one vertex sequence per
/// undirected cycle (smallest vertex first, smaller neighbor second).
fn cycles_of_length(k: u32, len: usize) -> Vec<Vec<Vertex>> {
    let nv = 1u32 << k;
    let mut out = Vec::new();
    let mut path: Vec<Vertex> = Vec::with_capacity(len);
    for start in 0..nv {
        path.clear();
        path.push(start);
        let mut used = 1u64 << start;
        dfs_cycles(k, start, len, &mut path, &mut used, &mut out);
    }
    out
}

fn dfs_cycles(
    k: u32,
    start: Vertex,
    len: usize,
    path: &mut Vec<Vertex>,
    used: &mut u64,
    out: &mut Vec<Vec<Vertex>>,
) {
    let head = *path.last().unwrap();
    if path.len() == len {
        if (head ^ start).count_ones() == 1 && path[1] < head {
            out.push(path.clone());
        }
        return;
    }
    for d in 0..k {
        let w = head ^ (1 << d);
        // only cycles whose smallest vertex is the start
        if w <= start || *used >> w & 1 == 1 {
            continue;
        }
        path.push(w);
        *used |= 1 << w;
        dfs_cycles(k, start, len, path, used, out);
        *used &= !(1u64 << w);
        path.pop();
    }
}

fn classified_cycles(k: u32, len: usize, spanning_only: bool) -> Vec<(Vec<Vertex>, CycleClass)> {
    let n = CubeDim::new(k).unwrap();
    cycles_of_length(k, len)
        .into_iter()
        .filter(|verts| {
            if !spanning_only {
                return true;
            }
            let mut dims_used = 0u32;
            for i in 0..verts.len() {
                dims_used |= verts[i] ^ verts[(i + 1) % verts.len()];
            }
            dims_used.count_ones() == k
        })
        .map(|verts| {
            let class = classify_cycle(&CycleSpec::new(n, verts.clone()).expect("valid cycle"))
                .expect("catalogued class");
            (verts, class)
        })
        .collect()
}

fn cycle_kind(class: CycleClass) -> TrapKind {
    match class {
        CycleClass::C6_1 => TrapKind::C6_1,
        CycleClass::C6_2 => TrapKind::C6_2,
        CycleClass::C8_1 => TrapKind::Q3Dhw,
        CycleClass::C8_2 => TrapKind::C8_2,
        CycleClass::C8_3 => TrapKind::C8_3,
        CycleClass::C8_4 => TrapKind::C8_4,
        CycleClass::C8_5 => TrapKind::C8_5,
        CycleClass::C8_6 => TrapKind::C8_6,
        CycleClass::C8_7 => TrapKind::C8_7,
    }
}

fn push_shell(
    t: &CubeTables,
    shells: &mut Vec<Shell>,
    seen: &mut HashSet<(TrapKind, u8, u128)>,
    kind: TrapKind,
    verts: Vec<Vertex>,
) {
    let t_mask: u128 = verts.iter().fold(0u128, |m, &v| m | 1 << v);
    for side in 0..2u8 {
        if !seen.insert((kind, side, t_mask)) {
            continue;
        }
        let (ids, boundary) = boundary_bits(t, &verts, side, t_mask);
        shells.push(Shell { kind, side, t: verts.clone(), boundary_ids: ids, boundary });
    }
}

fn build_shell_tables(n: CubeDim) -> ShellTables {
    let t = tables(n);
    let nn = n.get();
    let mut shells = Vec::new();
    let mut seen: HashSet<(TrapKind, u8, u128)> = HashSet::new();

    // subcube shells: Q2-, Q3-, Q4-DHW (proper subcubes only)
    for (k, kind) in [(2, TrapKind::Q2Dhw), (3, TrapKind::Q3Dhw), (4, TrapKind::Q4Dhw)] {
        if k >= nn {
            continue;
        }
        for dims in dim_combos(nn, k) {
            for base in sublattice_bases(n, &dims) {
                let mut verts: Vec<Vertex> =
                    (0..1u32 << k).map(|v| embed(v, &dims, base)).collect();
                verts.sort_unstable();
                push_shell(&t, &mut shells, &mut seen, kind, verts);
            }
        }
    }

    // cycle shells: 6-cycles live in 3-dim sublattices, spanning 8-cycles
    // in 4-dim sublattices
    for (k, len, spanning) in [(3u32, 6usize, false), (4, 8, true)] {
        if k > nn {
            continue;
        }
        let base_cycles = classified_cycles(k, len, spanning);
        for dims in dim_combos(nn, k) {
            for base in sublattice_bases(n, &dims) {
                for (verts, class) in &base_cycles {
                    let mut mapped: Vec<Vertex> =
                        verts.iter().map(|&v| embed(v, &dims, base)).collect();
                    mapped.sort_unstable();
                    push_shell(&t, &mut shells, &mut seen, cycle_kind(*class), mapped);
                }
            }
        }
    }

    ShellTables { shells }
}

fn boundary_bits(
    t: &CubeTables,
    verts: &[Vertex],
    side: u8,
    t_mask: u128,
) -> (EdgeBits, Vec<Edge>) {
    let mut ids = EdgeBits::EMPTY;
    let mut edges = Vec::new();
    for &v in verts {
        if parity(v) != side {
            continue;
        }
        for d in 0..t.n.get() {
            let w = v ^ (1 << d);
            if t_mask >> w & 1 == 0 {
                ids.insert(t.id_from(v, d));
                edges.push(Edge::along(v, d));
            }
        }
    }
    edges.sort_unstable();
    (ids, edges)
}

/// Finds every catalogued trap witness of the fault set: degree-starved
/// vertices (`Q1-DHW`), every subcube or cycle shell whose side boundary is
/// contained in `F`, and claw marks. Reports come sorted by kind, then by
/// witness. Supports `n <= 7`.
pub fn detect_traps(faults: &FaultSet) -> Vec<TrapReport> {
    let n = faults.n();
    assert!(
        n.get() <= DETECT_DIM_MAX,
        "trap detection supports n <= {DETECT_DIM_MAX}"
    );
    let mut reports = Vec::new();
    if n.get() < 2 {
        return reports;
    }
    let t = tables(n);
    let nn = n.get();
    let masks = faults.incidence_masks();

    // Q1-DHW: a vertex with at least n-1 faulty incident edges, paired
    // with its surviving neighbor (smallest neighbor if none survives)
    for v in 0..n.vertex_count() {
        let m = masks[v as usize];
        if m.count_ones() < nn - 1 {
            continue;
        }
        let free = (!m) & ((1 << nn) - 1);
        let d = if free != 0 { free.trailing_zeros() } else { 0 };
        let u = v ^ (1 << d);
        let mut boundary: Vec<Edge> = (0..nn)
            .filter(|&bd| bd != d)
            .map(|bd| Edge::along(v, bd))
            .collect();
        boundary.sort_unstable();
        reports.push(TrapReport {
            kind: TrapKind::Q1Dhw,
            witness: TrapWitness::Dhw(DhwWitness {
                t: vec![v.min(u), v.max(u)],
                side: parity(v),
                boundary,
            }),
        });
    }

    // catalogued shells by subset test
    let fault_bits = t.fault_bits(faults);
    let shells = shell_tables(n);
    for shell in &shells.shells {
        if shell.boundary_ids.is_subset_of(&fault_bits) {
            reports.push(TrapReport {
                kind: shell.kind,
                witness: TrapWitness::Dhw(DhwWitness {
                    t: shell.t.clone(),
                    side: shell.side,
                    boundary: shell.boundary.clone(),
                }),
            });
        }
    }

    // claw marks: three healthy neighbors of a common center, each of
    // healthy degree two; one mark per center, smallest leaves first
    for center in 0..n.vertex_count() {
        let mut leaves = Vec::new();
        for d in 0..nn {
            if masks[center as usize] >> d & 1 == 1 {
                continue;
            }
            let w = center ^ (1 << d);
            if nn - masks[w as usize].count_ones() == 2 {
                leaves.push(w);
            }
        }
        if leaves.len() < 3 {
            continue;
        }
        leaves.sort_unstable();
        let picked = [leaves[0], leaves[1], leaves[2]];
        let mut pins = Vec::new();
        for &leaf in &picked {
            for d in 0..nn {
                if masks[leaf as usize] >> d & 1 == 1 {
                    pins.push(Edge::along(leaf, d));
                }
            }
        }
        pins.sort_unstable();
        pins.dedup();
        reports.push(TrapReport {
            kind: TrapKind::Cl,
            witness: TrapWitness::Claw(ClMark { center, leaves: picked, faults: pins }),
        });
    }

    reports.sort_unstable();
    reports.dedup();
    reports
}

/// Searches for any disconnected-halfway witness with `|T| <= max_t`.
///
/// Candidate sets grow breadth-first from faulty-edge endpoints of the
/// target parity. Each state is closed under the forcing rule that a
/// side-parity vertex keeps its healthy edges internal, so every state's
/// boundary is fault-covered by construction; a state is a witness as soon
/// as its parity count balances. Sound always, complete up to `max_t`.
pub fn detect_generic_dhw(faults: &FaultSet, max_t: u32) -> Option<DhwWitness> {
    let n = faults.n();
    let nv = n.vertex_count();
    if nv - max_t.min(nv) < 2 {
        // T must stay a proper subset with room for the closure to detect
        return None;
    }
    let masks = faults.incidence_masks();
    let full: u128 = if nv == 128 { !0 } else { (1u128 << nv) - 1 };

    for side in 0..2u8 {
        let mut seen: HashSet<u128> = HashSet::new();
        let mut queue: VecDeque<u128> = VecDeque::new();
        let seeds: Vec<Vertex> = (0..nv)
            .filter(|&v| parity(v) == side && masks[v as usize] != 0)
            .collect();
        for seed in seeds {
            if let Some(c) = close(n, &masks, 1u128 << seed, side, max_t, full) {
                if seen.insert(c) {
                    queue.push_back(c);
                }
            }
            while let Some(state) = queue.pop_front() {
                let side_count = count_parity(state, nv, side);
                let total = state.count_ones();
                if 2 * side_count >= total {
                    return Some(witness_from_mask(faults, state, side));
                }
                let deficit = total - 2 * side_count;
                if deficit > max_t - total {
                    continue; // cannot balance within the budget
                }
                // grow by one adjacent vertex, then re-close
                for w in frontier(n, state) {
                    if let Some(next) = close(n, &masks, state | 1u128 << w, side, max_t, full)
                    {
                        if seen.insert(next) {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Forces healthy edges of side-parity members to stay internal; `None`
/// when the closure exceeds the budget or swallows the whole cube.
fn close(
    n: CubeDim,
    fault_masks: &[u32],
    mut mask: u128,
    side: u8,
    max_t: u32,
    full: u128,
) -> Option<u128> {
    let nn = n.get();
    loop {
        let mut grew = false;
        let mut scan = mask;
        while scan != 0 {
            let v = scan.trailing_zeros();
            scan &= scan - 1;
            if parity(v) != side {
                continue;
            }
            let healthy = !fault_masks[v as usize] & ((1 << nn) - 1);
            let mut h = healthy;
            while h != 0 {
                let d = h.trailing_zeros();
                h &= h - 1;
                let w = v ^ (1 << d);
                if mask >> w & 1 == 0 {
                    mask |= 1u128 << w;
                    grew = true;
                }
            }
        }
        if mask.count_ones() > max_t || mask == full {
            return None;
        }
        if !grew {
            return Some(mask);
        }
    }
}

fn count_parity(mask: u128, nv: u32, side: u8) -> u32 {
    let mut count = 0;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros();
        m &= m - 1;
        if parity(v) == side {
            count += 1;
        }
    }
    let _ = nv;
    count
}

fn frontier(n: CubeDim, mask: u128) -> Vec<Vertex> {
    let mut out = Vec::new();
    let mut adjacent = 0u128;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros();
        m &= m - 1;
        for d in 0..n.get() {
            adjacent |= 1u128 << (v ^ (1 << d));
        }
    }
    adjacent &= !mask;
    while adjacent != 0 {
        let v = adjacent.trailing_zeros();
        adjacent &= adjacent - 1;
        out.push(v);
    }
    out
}

fn witness_from_mask(faults: &FaultSet, mask: u128, side: u8) -> DhwWitness {
    let mut t = Vec::new();
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros();
        m &= m - 1;
        t.push(v);
    }
    let boundary = super::dhw_boundary(faults.n(), &t, side).expect("proper subset");
    debug_assert!(boundary.iter().all(|&e| faults.contains(e)));
    DhwWitness { t, side, boundary }
}

#[allow(dead_code)]
fn unused_type_holder(_: &HashMap<(), ()>) {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traps::q5_preset;
    use crate::traps::Q5Preset;

    fn dim(n: u32) -> CubeDim {
        CubeDim::new(n).unwrap()
    }

    fn fs(n: u32, pairs: &[(u32, u32)]) -> FaultSet {
        FaultSet::new(dim(n), pairs.iter().copied()).unwrap()
    }

    #[test]
    fn six_and_eight_cycle_class_counts() {
        let sixes = classified_cycles(3, 6, false);
        assert_eq!(sixes.len(), 16);
        let mut by_class: HashMap<CycleClass, usize> = HashMap::new();
        for (_, c) in &sixes {
            *by_class.entry(*c).or_default() += 1;
        }
        assert_eq!(by_class.len(), 2);
        assert_eq!(by_class[&CycleClass::C6_1], 12);
        assert_eq!(by_class[&CycleClass::C6_2], 4);

        let eights: Vec<_> = cycles_of_length(4, 8);
        let mut classes: HashSet<CycleClass> = HashSet::new();
        for verts in &eights {
            let spec = CycleSpec::new(dim(4), verts.clone()).unwrap();
            classes.insert(classify_cycle(&spec).unwrap());
        }
        assert_eq!(classes.len(), 7, "seven 8-cycle classes");
    }

    #[test]
    fn degree_one_vertex_is_reported() {
        let f = fs(3, &[(0, 1), (0, 2)]);
        let reports = detect_traps(&f);
        assert!(reports
            .iter()
            .any(|r| r.kind == TrapKind::Q1Dhw
                && matches!(&r.witness, TrapWitness::Dhw(w) if w.t == vec![0, 4])));
    }

    #[test]
    fn claw_reports_both_centers() {
        // the Q_3 claw is self-dual: the complementary center qualifies too
        let f = fs(3, &[(1, 3), (2, 6), (4, 5)]);
        let reports = detect_traps(&f);
        let claws: Vec<_> = reports.iter().filter(|r| r.kind == TrapKind::Cl).collect();
        assert_eq!(claws.len(), 2);
        match &claws[0].witness {
            TrapWitness::Claw(m) => {
                assert_eq!(m.center, 0);
                assert_eq!(m.leaves, [1, 2, 4]);
            }
            _ => panic!("claw witness expected"),
        }
        match &claws[1].witness {
            TrapWitness::Claw(m) => {
                assert_eq!(m.center, 7);
                assert_eq!(m.leaves, [3, 5, 6]);
            }
            _ => panic!("claw witness expected"),
        }
    }

    #[test]
    fn empty_fault_set_has_no_traps() {
        for n in 2..=5 {
            assert!(detect_traps(&FaultSet::empty(dim(n))).is_empty());
        }
    }

    #[test]
    fn q2_shell_detected_with_extra_faults() {
        let mut f = fs(3, &[(0, 4), (3, 7)]);
        f = f.with_edge(Edge::new(dim(3), 5, 7).unwrap()).unwrap();
        let reports = detect_traps(&f);
        assert!(reports.iter().any(|r| r.kind == TrapKind::Q2Dhw));
    }

    #[test]
    fn presets_have_no_small_witness_but_a_generic_one() {
        let t = q5_preset(Q5Preset::T14);
        assert!(detect_traps(&t).is_empty());
        let w = detect_generic_dhw(&t, 14).expect("14-vertex witness");
        assert_eq!(w.t, (2..=15).collect::<Vec<u32>>());
        assert_eq!(w.side, 1);

        let s = q5_preset(Q5Preset::S12);
        assert!(detect_traps(&s).is_empty());
        let w = detect_generic_dhw(&s, 12).expect("12-vertex witness");
        assert_eq!(w.t, (4..=15).collect::<Vec<u32>>());
        assert_eq!(w.side, 1);

        let r = q5_preset(Q5Preset::R10);
        assert!(detect_traps(&r).is_empty());
        let w = detect_generic_dhw(&r, 14).expect("10-vertex witness");
        assert_eq!(w.t, vec![2, 6, 8, 9, 10, 11, 12, 13, 14, 15]);
        assert_eq!(w.side, 1);
    }

    #[test]
    fn generic_search_finds_nothing_without_faults() {
        assert!(detect_generic_dhw(&FaultSet::empty(dim(3)), 6).is_none());
    }

    #[test]
    fn base_scan_misses_the_preset_witness() {
        // |T| <= 8 scan stays empty even through the generic search when
        // the budget is too small
        let t = q5_preset(Q5Preset::T14);
        assert!(detect_generic_dhw(&t, 8).is_none());
    }
}
