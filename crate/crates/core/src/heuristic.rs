//! Forcing heuristic for proving non-Hamiltonicity.
//!
//! The heuristic colors an edge blue once it is known to lie on every
//! Hamiltonian cycle and removes an edge once it is known to lie on none
//! (faulty edges start out removed). Rules fire to a fixpoint:
//!
//! * R1 — a vertex with exactly two non-removed edges forces both blue;
//! * R2 — a vertex with two blue edges loses all its other edges;
//! * R4 — an edge whose endpoints are the two ends of one blue path would
//!   close a short cycle, so it is removed; a closed blue cycle shorter
//!   than `2^n` is already a contradiction;
//! * R3 — three blue edges at one vertex is a contradiction;
//! * R5 — per-dimension counting over crossing edges: a Hamiltonian cycle
//!   crosses every dimension with equally many even and odd edges, at
//!   least one of each, which bounds and sometimes saturates the budgets.
//!
//! After the fixpoint, [`run_heuristic`] scans the accumulated removed set
//! for catalogued traps (plus bounded generic witnesses on `Q_5`); any hit
//! proves "no HC". The answer is otherwise "unknown" — the heuristic is
//! sound but deliberately incomplete.

use std::sync::Arc;

use serde::Serialize;

use crate::cube::{parity, Crossing, CubeDim, Edge, FaultSet, Vertex};
use crate::tables::{tables, CubeTables};
use crate::traps::{detect_generic_dhw, detect_traps, TrapKind, TrapReport, TrapWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeStatus {
    Plain,
    Blue,
    Removed,
}

/// Evolving edge coloring: blue edges lie on every Hamiltonian cycle,
/// removed edges on none. `blue` and `removed` stay disjoint and only grow.
#[derive(Clone)]
pub struct HeuristicState {
    n: CubeDim,
    t: Arc<CubeTables>,
    status: Vec<EdgeStatus>,
    blue_deg: Vec<u8>,
    healthy_deg: Vec<u8>,
}

/// Crossing-edge counts for one dimension: removed (faulty) and blue,
/// split by even/odd class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DimStats {
    pub faulty_even: u32,
    pub faulty_odd: u32,
    pub blue_even: u32,
    pub blue_odd: u32,
}

impl HeuristicState {
    pub fn new(faults: &FaultSet) -> HeuristicState {
        let n = faults.n();
        let t = tables(n);
        let mut status = vec![EdgeStatus::Plain; t.edges.len()];
        let mut healthy_deg = vec![n.get() as u8; n.vertex_count() as usize];
        for &e in faults.edges() {
            status[t.edge_id(e) as usize] = EdgeStatus::Removed;
            healthy_deg[e.lo() as usize] -= 1;
            healthy_deg[e.hi() as usize] -= 1;
        }
        HeuristicState {
            n,
            t,
            status,
            blue_deg: vec![0; n.vertex_count() as usize],
            healthy_deg,
        }
    }

    pub fn n(&self) -> CubeDim {
        self.n
    }

    pub fn is_blue(&self, e: Edge) -> bool {
        self.status[self.t.edge_id(e) as usize] == EdgeStatus::Blue
    }

    pub fn is_removed(&self, e: Edge) -> bool {
        self.status[self.t.edge_id(e) as usize] == EdgeStatus::Removed
    }

    pub fn blue_edges(&self) -> Vec<Edge> {
        self.collect(EdgeStatus::Blue)
    }

    pub fn removed_edges(&self) -> Vec<Edge> {
        self.collect(EdgeStatus::Removed)
    }

    fn collect(&self, want: EdgeStatus) -> Vec<Edge> {
        self.status
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s == want)
            .map(|(id, _)| self.t.edge(id as u32))
            .collect()
    }

    /// The removed set as a fault set (it contains the original faults).
    pub fn removed_fault_set(&self) -> FaultSet {
        FaultSet::from_edges(self.n, self.removed_edges()).expect("distinct edges")
    }

    /// Per-vertex incidence masks of the removed set, the input shape the
    /// solver expects for exclusions.
    pub fn removed_incidence_masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; self.n.vertex_count() as usize];
        for (id, &s) in self.status.iter().enumerate() {
            if s == EdgeStatus::Removed {
                let e = self.t.edge(id as u32);
                masks[e.lo() as usize] |= 1 << e.dim();
                masks[e.hi() as usize] |= 1 << e.dim();
            }
        }
        masks
    }

    /// Recounts the crossing statistics of one dimension from the current
    /// coloring.
    pub fn dim_stats(&self, dim: u32) -> DimStats {
        let mut s = DimStats::default();
        for v in 0..self.n.vertex_count() {
            if v & (1 << dim) != 0 {
                continue;
            }
            let e = Edge::along(v, dim);
            let even = matches!(crate::cube::classify_crossing(e, dim), Crossing::Even);
            match self.status[self.t.edge_id(e) as usize] {
                EdgeStatus::Removed if even => s.faulty_even += 1,
                EdgeStatus::Removed => s.faulty_odd += 1,
                EdgeStatus::Blue if even => s.blue_even += 1,
                EdgeStatus::Blue => s.blue_odd += 1,
                EdgeStatus::Plain => {}
            }
        }
        s
    }

    fn color_blue(&mut self, id: u32) {
        debug_assert_eq!(self.status[id as usize], EdgeStatus::Plain);
        self.status[id as usize] = EdgeStatus::Blue;
        let e = self.t.edge(id);
        self.blue_deg[e.lo() as usize] += 1;
        self.blue_deg[e.hi() as usize] += 1;
    }

    fn remove(&mut self, id: u32) {
        debug_assert_eq!(self.status[id as usize], EdgeStatus::Plain);
        self.status[id as usize] = EdgeStatus::Removed;
        let e = self.t.edge(id);
        self.healthy_deg[e.lo() as usize] -= 1;
        self.healthy_deg[e.hi() as usize] -= 1;
    }

    fn edge_ids_at(&self, v: Vertex) -> impl Iterator<Item = u32> + '_ {
        let t = self.t.clone();
        (0..self.n.get()).map(move |d| t.id_from(v, d))
    }
}

/// One applied rule, with the witness it fired on. A trace replays against
/// a fresh state: each step's precondition holds at its position.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleStep {
    /// R1: `vertex` has exactly two usable edges; the listed ones were
    /// newly colored blue.
    ForcedPair { vertex: Vertex, blued: Vec<Edge> },
    /// R2: `vertex` has two blue edges; the listed edges were removed.
    BlueSaturation { vertex: Vertex, removed: Vec<Edge> },
    /// R4: `edge` would close a blue cycle of length `cycle_len < 2^n`.
    ShortCycleEdge { edge: Edge, cycle_len: u32 },
    /// R4: the blue edges already contain a cycle shorter than `2^n`.
    BlueCycleClosed { length: u32 },
    /// R3: three or more blue edges meet at `vertex`.
    TripleBlue { vertex: Vertex },
    /// R5 items 1-2: the even/odd budgets of `dim` are infeasible.
    PartitionOverload { dim: u32, stats: DimStats },
    /// R5 items 3-4: a saturated class forces all its healthy edges blue
    /// and removes the other class's plain edges.
    PartitionSaturation { dim: u32, blued: Vec<Edge>, removed: Vec<Edge> },
    /// R5 item 5: one healthy edge left in a class; it must be used.
    PartitionLastEdge { dim: u32, edge: Edge },
    /// Final scan: a catalogued trap exists in the removed set.
    TrapFound { report: TrapReport },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicVerdict {
    NoHc,
    Unknown,
}

/// Result of a heuristic run: the verdict, the ordered rule trace, and the
/// final coloring.
#[derive(Clone)]
pub struct HeuristicOutcome {
    pub verdict: HeuristicVerdict,
    pub trace: Vec<RuleStep>,
    pub state: HeuristicState,
}

/// Outcome of [`partition_rules`] on one dimension.
#[derive(Clone, Debug, PartialEq)]
pub enum PartitionOutcome {
    /// Items 1-2 fired: no Hamiltonian cycle.
    NoHc(RuleStep),
    /// Items 3-5 colored or removed something.
    Applied(Vec<RuleStep>),
    /// Nothing to do.
    Unchanged,
}

/// Applies the partition counting rules of one dimension: contradiction
/// checks first (items 1-2), then saturation forcing (items 3-4) and the
/// last-edge rule (item 5).
pub fn partition_rules(state: &mut HeuristicState, dim: u32) -> PartitionOutcome {
    if let Some(step) = partition_check(state, dim) {
        return PartitionOutcome::NoHc(step);
    }
    let steps = partition_apply(state, dim);
    if steps.is_empty() {
        PartitionOutcome::Unchanged
    } else {
        PartitionOutcome::Applied(steps)
    }
}

fn quarter(n: CubeDim) -> u32 {
    // 2^(n-2): crossing edges of one class in one dimension
    1 << (n.get() - 2)
}

fn partition_check(state: &HeuristicState, dim: u32) -> Option<RuleStep> {
    let q = quarter(state.n);
    let s = state.dim_stats(dim);
    if s.faulty_even == q
        || s.faulty_odd == q
        || s.faulty_even + s.blue_odd > q
        || s.faulty_odd + s.blue_even > q
    {
        return Some(RuleStep::PartitionOverload { dim, stats: s });
    }
    None
}

fn partition_apply(state: &mut HeuristicState, dim: u32) -> Vec<RuleStep> {
    let q = quarter(state.n);
    let mut steps = Vec::new();
    let s = state.dim_stats(dim);

    // items 3-4: one class saturated by faults plus the opposite blues
    for (even_saturated, cond) in [
        (true, s.faulty_even + s.blue_odd == q),
        (false, s.faulty_odd + s.blue_even == q),
    ] {
        if !cond {
            continue;
        }
        let mut blued = Vec::new();
        let mut removed = Vec::new();
        for v in 0..state.n.vertex_count() {
            if v & (1 << dim) != 0 {
                continue;
            }
            let e = Edge::along(v, dim);
            let id = state.t.edge_id(e);
            if state.status[id as usize] != EdgeStatus::Plain {
                continue;
            }
            let even = matches!(crate::cube::classify_crossing(e, dim), Crossing::Even);
            if even == even_saturated {
                state.color_blue(id);
                blued.push(e);
            } else {
                state.remove(id);
                removed.push(e);
            }
        }
        if !(blued.is_empty() && removed.is_empty()) {
            steps.push(RuleStep::PartitionSaturation { dim, blued, removed });
        }
    }

    // item 5: a single healthy edge left in a class must be on every cycle
    let s = state.dim_stats(dim);
    for even in [true, false] {
        let f = if even { s.faulty_even } else { s.faulty_odd };
        if f != q - 1 {
            continue;
        }
        for v in 0..state.n.vertex_count() {
            if v & (1 << dim) != 0 {
                continue;
            }
            let e = Edge::along(v, dim);
            let id = state.t.edge_id(e);
            let is_even = matches!(crate::cube::classify_crossing(e, dim), Crossing::Even);
            if is_even == even && state.status[id as usize] == EdgeStatus::Plain {
                state.color_blue(id);
                steps.push(RuleStep::PartitionLastEdge { dim, edge: e });
            }
        }
    }
    steps
}

/// Runs the forcing rules to a fixpoint without the final trap scan.
/// This is the preprocessing pass the solver uses: sound on its own and
/// independent of the trap catalog.
pub fn propagate(faults: &FaultSet) -> HeuristicOutcome {
    let mut state = HeuristicState::new(faults);
    let mut trace = Vec::new();
    let verdict = propagate_state(&mut state, &mut trace);
    HeuristicOutcome { verdict, trace, state }
}

fn propagate_state(state: &mut HeuristicState, trace: &mut Vec<RuleStep>) -> HeuristicVerdict {
    let n = state.n;
    if n.get() < 2 {
        return HeuristicVerdict::Unknown;
    }
    let nv = n.vertex_count();
    loop {
        let mut changed = false;

        // R1: degree-2 vertices force their two edges
        for v in 0..nv {
            if state.healthy_deg[v as usize] != 2 {
                continue;
            }
            let ids: Vec<u32> = state
                .edge_ids_at(v)
                .filter(|&id| state.status[id as usize] == EdgeStatus::Plain)
                .collect();
            if ids.is_empty() {
                continue;
            }
            let mut blued = Vec::new();
            for id in ids {
                state.color_blue(id);
                blued.push(state.t.edge(id));
            }
            trace.push(RuleStep::ForcedPair { vertex: v, blued });
            changed = true;
        }

        // R2: two blue edges at a vertex exclude the rest
        for v in 0..nv {
            if state.blue_deg[v as usize] < 2 {
                continue;
            }
            let ids: Vec<u32> = state
                .edge_ids_at(v)
                .filter(|&id| state.status[id as usize] == EdgeStatus::Plain)
                .collect();
            if ids.is_empty() {
                continue;
            }
            let mut removed = Vec::new();
            for id in ids {
                state.remove(id);
                removed.push(state.t.edge(id));
            }
            trace.push(RuleStep::BlueSaturation { vertex: v, removed });
            changed = true;
        }

        // R4: blue paths and cycles
        if state.blue_deg.iter().all(|&d| d <= 2) {
            match blue_components(state) {
                BlueComponents::ShortCycle(len) => {
                    trace.push(RuleStep::BlueCycleClosed { length: len });
                    return HeuristicVerdict::NoHc;
                }
                BlueComponents::Paths(paths) => {
                    for (a, b, edges) in paths {
                        if edges + 1 >= nv {
                            continue;
                        }
                        if (a ^ b).count_ones() != 1 {
                            continue;
                        }
                        let e = Edge::along(a.min(b), (a ^ b).trailing_zeros());
                        let id = state.t.edge_id(e);
                        if state.status[id as usize] == EdgeStatus::Plain {
                            state.remove(id);
                            trace.push(RuleStep::ShortCycleEdge { edge: e, cycle_len: edges + 1 });
                            changed = true;
                        }
                    }
                }
            }
        }

        // R3: three blue edges at one vertex
        for v in 0..nv {
            if state.blue_deg[v as usize] >= 3 {
                trace.push(RuleStep::TripleBlue { vertex: v });
                return HeuristicVerdict::NoHc;
            }
        }

        // R5: partition rules, contradictions first
        for dim in 0..n.get() {
            if let Some(step) = partition_check(state, dim) {
                trace.push(step);
                return HeuristicVerdict::NoHc;
            }
        }
        for dim in 0..n.get() {
            let steps = partition_apply(state, dim);
            if !steps.is_empty() {
                changed = true;
                trace.extend(steps);
            }
        }

        if !changed {
            return HeuristicVerdict::Unknown;
        }
    }
}

enum BlueComponents {
    /// A closed blue cycle shorter than `2^n` exists (its length).
    ShortCycle(u32),
    /// Maximal blue paths as `(end, end, edge_count)`.
    Paths(Vec<(Vertex, Vertex, u32)>),
}

fn blue_components(state: &HeuristicState) -> BlueComponents {
    let nv = state.n.vertex_count();
    let mut adj: Vec<[u32; 2]> = vec![[u32::MAX; 2]; nv as usize];
    let mut deg = vec![0u8; nv as usize];
    for (id, &s) in state.status.iter().enumerate() {
        if s != EdgeStatus::Blue {
            continue;
        }
        let e = state.t.edge(id as u32);
        for (a, b) in [(e.lo(), e.hi()), (e.hi(), e.lo())] {
            adj[a as usize][deg[a as usize] as usize] = b;
            deg[a as usize] += 1;
        }
    }
    let mut seen = vec![false; nv as usize];
    let mut paths = Vec::new();
    for v in 0..nv {
        if deg[v as usize] != 1 || seen[v as usize] {
            continue;
        }
        // walk the path from one end to the other
        let mut prev = u32::MAX;
        let mut cur = v;
        let mut edges = 0;
        loop {
            seen[cur as usize] = true;
            let next = adj[cur as usize]
                .iter()
                .copied()
                .find(|&x| x != u32::MAX && x != prev);
            match next {
                Some(x) => {
                    prev = cur;
                    cur = x;
                    edges += 1;
                }
                None => break,
            }
        }
        paths.push((v, cur, edges));
    }
    for v in 0..nv {
        if deg[v as usize] == 2 && !seen[v as usize] {
            // a blue cycle
            let mut prev = v;
            let mut cur = adj[v as usize][0];
            let mut len = 1;
            seen[v as usize] = true;
            while cur != v {
                seen[cur as usize] = true;
                let next = adj[cur as usize]
                    .iter()
                    .copied()
                    .find(|&x| x != prev)
                    .expect("degree-2 walk");
                prev = cur;
                cur = next;
                len += 1;
            }
            if len < nv {
                return BlueComponents::ShortCycle(len);
            }
        }
    }
    BlueComponents::Paths(paths)
}

/// Full heuristic: forcing rules to a fixpoint, then a trap scan over the
/// accumulated removed set (removed edges lie on no Hamiltonian cycle, so
/// a trap with respect to them is as conclusive as one in `F` itself).
/// On `Q_5` the scan also looks for generic disconnected-halfway witnesses
/// up to 14 vertices.
pub fn run_heuristic(faults: &FaultSet) -> HeuristicOutcome {
    let mut out = propagate(faults);
    if out.verdict == HeuristicVerdict::NoHc {
        return out;
    }
    let removed = out.state.removed_fault_set();
    let reports = detect_traps(&removed);
    if let Some(report) = reports.into_iter().next() {
        out.trace.push(RuleStep::TrapFound { report });
        out.verdict = HeuristicVerdict::NoHc;
        return out;
    }
    if faults.n().get() == 5 {
        if let Some(witness) = detect_generic_dhw(&removed, 14) {
            let report = TrapReport {
                kind: TrapKind::GenericDhw,
                witness: TrapWitness::Dhw(witness),
            };
            out.trace.push(RuleStep::TrapFound { report });
            out.verdict = HeuristicVerdict::NoHc;
        }
    }
    out
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
    fn claw_in_q3_is_caught_by_triple_blue() {
        let f = fs(3, &[(1, 3), (2, 6), (4, 5)]);
        let out = run_heuristic(&f);
        assert_eq!(out.verdict, HeuristicVerdict::NoHc);
        assert!(matches!(out.trace.first(), Some(RuleStep::ForcedPair { .. })));
        assert!(
            matches!(out.trace.last(), Some(RuleStep::TripleBlue { vertex: 0 })),
            "trace ends with {:?}",
            out.trace.last()
        );
    }

    #[test]
    fn fault_free_cube_is_unknown() {
        let out = run_heuristic(&FaultSet::empty(dim(3)));
        assert_eq!(out.verdict, HeuristicVerdict::Unknown);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn partition_overload_example() {
        // both even crossing edges of dimension 0 faulty
        let f = fs(3, &[(0, 1), (6, 7)]);
        let mut state = HeuristicState::new(&f);
        match partition_rules(&mut state, 0) {
            PartitionOutcome::NoHc(RuleStep::PartitionOverload { dim: 0, stats }) => {
                assert_eq!(stats.faulty_even, 2);
            }
            other => panic!("expected overload, got {other:?}"),
        }
        let out = run_heuristic(&f);
        assert_eq!(out.verdict, HeuristicVerdict::NoHc);
    }

    #[test]
    fn partition_last_edge_example() {
        let f = fs(3, &[(0, 1)]);
        let mut state = HeuristicState::new(&f);
        match partition_rules(&mut state, 0) {
            PartitionOutcome::Applied(steps) => {
                let e67 = Edge::new(dim(3), 6, 7).unwrap();
                assert_eq!(steps, vec![RuleStep::PartitionLastEdge { dim: 0, edge: e67 }]);
                assert!(state.is_blue(e67));
            }
            other => panic!("expected last-edge coloring, got {other:?}"),
        }
    }

    #[test]
    fn partition_noop_on_clean_dimension() {
        let f = FaultSet::empty(dim(3));
        let mut state = HeuristicState::new(&f);
        assert_eq!(partition_rules(&mut state, 0), PartitionOutcome::Unchanged);
    }

    #[test]
    fn stats_match_recount_after_propagation() {
        let f = fs(4, &[(0, 1), (0, 2), (5, 7), (10, 14), (12, 13)]);
        let out = propagate(&f);
        let state = &out.state;
        for d in 0..4 {
            let s = state.dim_stats(d);
            let mut expect = DimStats::default();
            for v in 0..16u32 {
                if v & (1 << d) != 0 {
                    continue;
                }
                let e = Edge::along(v, d);
                let even = parity(v) == 0;
                if state.is_removed(e) {
                    if even {
                        expect.faulty_even += 1;
                    } else {
                        expect.faulty_odd += 1;
                    }
                } else if state.is_blue(e) {
                    if even {
                        expect.blue_even += 1;
                    } else {
                        expect.blue_odd += 1;
                    }
                }
            }
            assert_eq!(s, expect);
        }
    }

    #[test]
    fn blue_and_removed_stay_disjoint_and_grow() {
        let f = fs(4, &[(0, 1), (1, 3), (2, 3), (8, 12), (5, 13)]);
        let out = propagate(&f);
        for &e in f.edges() {
            assert!(out.state.is_removed(e));
        }
        for e in out.state.blue_edges() {
            assert!(!out.state.is_removed(e));
        }
    }
}
