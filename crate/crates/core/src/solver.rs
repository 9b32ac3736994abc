//! Complete Hamiltonian-cycle decision for `Q_n` minus a fault set.
//!
//! The search extends a path from vertex 0, always trying the smallest
//! healthy neighbor first, and counts each undirected cycle once by
//! requiring the second vertex of the path to be smaller than the last.
//! Four independent prunes keep it exact while cutting the tree:
//!
//! * P1 — degree feasibility and forcing: every unvisited vertex needs two
//!   usable connections; a vertex down to exactly two has both forced.
//! * P2 — crossing-edge balance: in every dimension a Hamiltonian cycle
//!   uses as many even as odd crossing edges, and at least one of each, so
//!   the used/remaining budgets must stay feasible.
//! * P3 — premature-cycle exclusion: forced edges may not close a cycle or
//!   demand three edges at a vertex.
//! * P4 — connectivity: the unvisited region must stay reachable from the
//!   path head and must touch vertex 0 again.
//!
//! By default a rules-only forcing pass (see [`crate::heuristic`]) runs
//! first; edges it proves unusable are excluded from the search, which is
//! sound because they lie on no Hamiltonian cycle.

use serde::Serialize;

use crate::cube::{parity, CubeDim, Edge, FaultSet, Vertex};
use crate::heuristic::{self, HeuristicVerdict, RuleStep};
use crate::traps::TrapReport;
use crate::{Error, Result};

/// Knobs for [`find_hamiltonian_with`]. Every prune and the preprocessing
/// pass can be toggled independently without changing any verdict.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Run the forcing rules first and search the reduced graph.
    pub preprocess: bool,
    /// P1: degree feasibility and forced moves.
    pub degree_prune: bool,
    /// P2: per-dimension even/odd crossing budgets.
    pub balance_prune: bool,
    /// P3: forced-edge cycle exclusion.
    pub forced_cycle_prune: bool,
    /// P4: connectivity of the unvisited region.
    pub connectivity_prune: bool,
    /// Run the connectivity check every `stride` nodes; 0 picks a default
    /// from the dimension (1 up to `Q_4`, 4 on `Q_5`, 8 beyond).
    pub connectivity_stride: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            preprocess: true,
            degree_prune: true,
            balance_prune: true,
            forced_cycle_prune: true,
            connectivity_prune: true,
            connectivity_stride: 0,
        }
    }
}

impl SolverConfig {
    /// Plain exhaustive backtracking: no preprocessing, no prunes.
    pub fn unpruned() -> Self {
        SolverConfig {
            preprocess: false,
            degree_prune: false,
            balance_prune: false,
            forced_cycle_prune: false,
            connectivity_prune: false,
            connectivity_stride: 0,
        }
    }
}

/// A certified Hamiltonian cycle: `2^n` distinct vertices, cyclically
/// adjacent through healthy edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HamCycle {
    vertices: Vec<Vertex>,
}

impl HamCycle {
    /// Validates and wraps a cycle given as a vertex sequence.
    pub fn new(faults: &FaultSet, vertices: Vec<Vertex>) -> Result<HamCycle> {
        let n = faults.n();
        if vertices.len() != n.vertex_count() as usize {
            return Err(Error::InvalidCycle(format!(
                "expected {} vertices, got {}",
                n.vertex_count(),
                vertices.len()
            )));
        }
        let mut seen = vec![false; vertices.len()];
        for &v in &vertices {
            n.check_vertex(v)?;
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::InvalidCycle(format!("vertex {v} repeats")));
            }
        }
        for i in 0..vertices.len() {
            let u = vertices[i];
            let v = vertices[(i + 1) % vertices.len()];
            let e = Edge::new(n, u, v)?;
            if faults.contains(e) {
                return Err(Error::InvalidCycle(format!("edge {e} is faulty")));
            }
        }
        Ok(HamCycle { vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Why an instance has no Hamiltonian cycle.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "proof", rename_all = "snake_case")]
pub enum NonHamReason {
    /// A trap witness certifies the verdict.
    Trap { report: TrapReport },
    /// The forcing rules derived a contradiction.
    Heuristic { trace: Vec<RuleStep> },
    /// The pruned search exhausted every extension.
    Exhaustive,
}

/// Outcome of the exact decision.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Hamiltonian { cycle: HamCycle },
    NonHamiltonian { reason: NonHamReason },
}

impl Verdict {
    pub fn is_hamiltonian(&self) -> bool {
        matches!(self, Verdict::Hamiltonian { .. })
    }
}

/// Decides Hamiltonicity of `Q_n - F` with the default configuration.
pub fn find_hamiltonian(faults: &FaultSet) -> Verdict {
    find_hamiltonian_with(faults, &SolverConfig::default())
}

/// Decides Hamiltonicity with explicit configuration.
pub fn find_hamiltonian_with(faults: &FaultSet, cfg: &SolverConfig) -> Verdict {
    let mut excluded = faults.incidence_masks();
    if cfg.preprocess {
        let prop = heuristic::propagate(faults);
        if prop.verdict == HeuristicVerdict::NoHc {
            return Verdict::NonHamiltonian {
                reason: NonHamReason::Heuristic { trace: prop.trace },
            };
        }
        excluded = prop.state.removed_incidence_masks();
    }
    let mut search = Search::new(faults.n(), &excluded, cfg);
    let mut found: Option<Vec<Vertex>> = None;
    search.run(&mut |path| {
        found = Some(path.to_vec());
        false // stop at the first cycle
    });
    match found {
        Some(vertices) => {
            let cycle = HamCycle::new(faults, vertices)
                .expect("search yields a valid healthy cycle");
            Verdict::Hamiltonian { cycle }
        }
        None => Verdict::NonHamiltonian { reason: NonHamReason::Exhaustive },
    }
}

/// Visits every Hamiltonian cycle of `Q_n - F`, normalized to start at 0
/// with its smaller cycle-neighbor second, so each undirected cycle appears
/// exactly once. The visitor returns `false` to stop early.
pub fn for_each_hamiltonian<F: FnMut(&HamCycle) -> bool>(faults: &FaultSet, mut visit: F) {
    let excluded = faults.incidence_masks();
    let cfg = SolverConfig { preprocess: false, ..SolverConfig::default() };
    let mut search = Search::new(faults.n(), &excluded, &cfg);
    search.run(&mut |path| {
        let cycle =
            HamCycle::new(faults, path.to_vec()).expect("search yields a valid healthy cycle");
        visit(&cycle)
    });
}

/// Number of distinct Hamiltonian cycles, capped at `limit`. Meant for
/// small `n`; the count grows very quickly with the dimension.
pub fn count_hamiltonian(faults: &FaultSet, limit: u64) -> u64 {
    let mut count = 0;
    for_each_hamiltonian(faults, |_| {
        count += 1;
        count < limit
    });
    count
}

struct Search<'a> {
    nv: usize,
    nbrs: Vec<Vec<Vertex>>,
    adj: Vec<u128>,
    cfg: &'a SolverConfig,
    stride: u32,
    visited: u128,
    path: Vec<Vertex>,
    // per dimension, [even, odd] counts
    used: Vec<[i32; 2]>,
    avail: Vec<[i32; 2]>,
    undo: Vec<Vec<(u8, u8)>>,
    since_connectivity: u32,
    forced_buf: Vec<(Vertex, Vertex)>,
    uf: Vec<u32>,
    nodes: u64,
}

#[inline]
fn edge_class(v: Vertex, d: u32) -> usize {
    // even iff the endpoint with bit `d` clear has parity 0
    parity(v & !(1 << d)) as usize
}

impl<'a> Search<'a> {
    fn new(n: CubeDim, excluded: &[u32], cfg: &'a SolverConfig) -> Search<'a> {
        let nv = n.vertex_count() as usize;
        let nn = n.get();
        let mut nbrs = Vec::with_capacity(nv);
        let mut adj = vec![0u128; nv];
        let mut avail = vec![[0i32; 2]; nn as usize];
        for v in 0..nv as u32 {
            let mut list = Vec::new();
            for d in 0..nn {
                if excluded[v as usize] >> d & 1 == 0 {
                    let w = v ^ (1 << d);
                    list.push(w);
                    adj[v as usize] |= 1 << w;
                    if v < w {
                        avail[d as usize][edge_class(v, d)] += 1;
                    }
                }
            }
            list.sort_unstable();
            nbrs.push(list);
        }
        let stride = if cfg.connectivity_stride > 0 {
            cfg.connectivity_stride
        } else if nn <= 4 {
            1
        } else if nn == 5 {
            4
        } else {
            8
        };
        Search {
            nv,
            nbrs,
            adj,
            cfg,
            stride,
            visited: 1,
            path: vec![0],
            used: vec![[0; 2]; nn as usize],
            avail,
            undo: (0..=nv).map(|_| Vec::new()).collect(),
            since_connectivity: 0,
            forced_buf: Vec::new(),
            uf: vec![0; nv],
            nodes: 0,
        }
    }

    /// Runs the search; the visitor returns `false` to stop.
    fn run(&mut self, visit: &mut dyn FnMut(&[Vertex]) -> bool) {
        if self.nv < 4 {
            return; // Q_1 has no cycle at all
        }
        self.dfs(visit);
    }

    fn dfs(&mut self, visit: &mut dyn FnMut(&[Vertex]) -> bool) -> bool {
        self.nodes += 1;
        let depth = self.path.len();
        let head = *self.path.last().unwrap();
        if depth == self.nv {
            // close the cycle; count each undirected cycle once
            if self.adj[head as usize] & 1 != 0 && self.path[1] < head {
                return visit(&self.path);
            }
            return true;
        }

        if self.cfg.balance_prune && !self.balance_feasible() {
            return true;
        }

        let mut forced_next: Option<Vertex> = None;
        if self.cfg.degree_prune || self.cfg.forced_cycle_prune {
            match self.degree_analysis(head) {
                Analysis::Prune => return true,
                Analysis::Forced(w) => forced_next = Some(w),
                Analysis::Free => {}
            }
        }

        if self.cfg.connectivity_prune {
            self.since_connectivity += 1;
            if self.since_connectivity >= self.stride {
                self.since_connectivity = 0;
                if !self.connected(head) {
                    return true;
                }
            }
        }

        if let Some(w) = forced_next {
            self.push(head, w);
            let keep_going = self.dfs(visit);
            self.pop(w);
            return keep_going;
        }
        for i in 0..self.nbrs[head as usize].len() {
            let w = self.nbrs[head as usize][i];
            if self.visited >> w & 1 == 1 {
                continue;
            }
            self.push(head, w);
            let keep_going = self.dfs(visit);
            self.pop(w);
            if !keep_going {
                return false;
            }
        }
        true
    }

    fn push(&mut self, head: Vertex, w: Vertex) {
        let depth = self.path.len();
        let d = (head ^ w).trailing_zeros();
        let c = edge_class(head, d);
        let record = &mut self.undo[depth];
        record.clear();
        self.avail[d as usize][c] -= 1;
        self.used[d as usize][c] += 1;
        if head != 0 {
            let prev = self.path[depth - 2];
            for i in 0..self.nbrs[head as usize].len() {
                let x = self.nbrs[head as usize][i];
                if x == w || x == prev {
                    continue;
                }
                // the edge (head, x) dies as `head` becomes interior, unless
                // it already died when x did
                if self.visited >> x & 1 == 0 || x == 0 {
                    let xd = (head ^ x).trailing_zeros();
                    let xc = edge_class(head, xd);
                    self.avail[xd as usize][xc] -= 1;
                    record.push((xd as u8, xc as u8));
                }
            }
        }
        self.visited |= 1 << w;
        self.path.push(w);
    }

    fn pop(&mut self, w: Vertex) {
        self.path.pop();
        self.visited &= !(1u128 << w);
        let depth = self.path.len();
        let head = *self.path.last().unwrap();
        let d = (head ^ w).trailing_zeros();
        let c = edge_class(head, d);
        self.avail[d as usize][c] += 1;
        self.used[d as usize][c] -= 1;
        for i in 0..self.undo[depth].len() {
            let (xd, xc) = self.undo[depth][i];
            self.avail[xd as usize][xc as usize] += 1;
        }
    }

    /// P2: for every dimension, the final even and odd crossing counts must
    /// be equal and at least 1, so `max(used_e, used_o, 1)` must not exceed
    /// `min(used_e + avail_e, used_o + avail_o)`.
    fn balance_feasible(&self) -> bool {
        for d in 0..self.used.len() {
            let [ue, uo] = self.used[d];
            let [ae, ao] = self.avail[d];
            let lo = ue.max(uo).max(1);
            let hi = (ue + ae).min(uo + ao);
            if lo > hi {
                return false;
            }
        }
        true
    }

    /// P1/P3: availability counts over the open region (unvisited vertices
    /// plus the head and the reentry slot at 0).
    fn degree_analysis(&mut self, head: Vertex) -> Analysis {
        let open = !self.visited | 1 | (1u128 << head);
        let unvisited = !self.visited & ((!0u128) >> (128 - self.nv));
        self.forced_buf.clear();
        let mut rest = unvisited;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            let slots = self.adj[v as usize] & open;
            let cnt = slots.count_ones();
            if self.cfg.degree_prune && cnt < 2 {
                return Analysis::Prune;
            }
            if cnt == 2 {
                let mut s = slots;
                while s != 0 {
                    let x = s.trailing_zeros();
                    s &= s - 1;
                    if v < x || self.visited >> x & 1 == 1 {
                        // record each forced edge once; endpoints inside the
                        // unvisited region would otherwise repeat it
                        self.forced_buf.push((v, x));
                    }
                }
            }
        }
        if self.forced_buf.is_empty() {
            return Analysis::Free;
        }

        let mut at_head: Option<Vertex> = None;
        let mut at_zero = 0u32;
        for &(v, x) in &self.forced_buf {
            if x == head {
                if at_head.replace(v).is_some() {
                    return Analysis::Prune; // two forced edges at the head
                }
            } else if x == 0 {
                at_zero += 1;
                if at_zero >= 2 {
                    return Analysis::Prune; // only one reentry at 0
                }
            }
        }

        if self.cfg.forced_cycle_prune {
            // forced edges must stay acyclic and never pile three on a vertex
            for v in 0..self.nv as u32 {
                self.uf[v as usize] = v;
            }
            let mut degree = vec![0u8; self.nv];
            for &(v, x) in &self.forced_buf {
                degree[v as usize] += 1;
                degree[x as usize] += 1;
                if degree[v as usize] > 2 || degree[x as usize] > 2 {
                    return Analysis::Prune;
                }
                let (rv, rx) = (self.find(v), self.find(x));
                if rv == rx {
                    return Analysis::Prune; // premature cycle
                }
                self.uf[rv as usize] = rx;
            }
        }

        if self.cfg.degree_prune {
            if let Some(v) = at_head {
                return Analysis::Forced(v);
            }
        }
        Analysis::Free
    }

    fn find(&mut self, mut v: Vertex) -> Vertex {
        while self.uf[v as usize] != v {
            let parent = self.uf[v as usize];
            self.uf[v as usize] = self.uf[parent as usize];
            v = self.uf[v as usize];
        }
        v
    }

    /// P4: every unvisited vertex must be reachable from the head through
    /// unvisited vertices, and the region must touch a neighbor of 0.
    fn connected(&self, head: Vertex) -> bool {
        let unvisited = !self.visited & ((!0u128) >> (128 - self.nv));
        if unvisited == 0 {
            return true;
        }
        if self.adj[0] & unvisited == 0 {
            return false; // no way back to 0
        }
        let mut reached = 0u128;
        let mut frontier = self.adj[head as usize] & unvisited;
        while frontier != 0 {
            reached |= frontier;
            let mut next = 0u128;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros();
                f &= f - 1;
                next |= self.adj[v as usize];
            }
            frontier = next & unvisited & !reached;
        }
        reached == unvisited
    }
}

enum Analysis {
    Prune,
    Forced(Vertex),
    Free,
}

#[doc(hidden)]
pub fn search_nodes(faults: &FaultSet, cfg: &SolverConfig) -> (bool, u64) {
    let mut excluded = faults.incidence_masks();
    if cfg.preprocess {
        let prop = heuristic::propagate(faults);
        if prop.verdict == HeuristicVerdict::NoHc {
            return (false, 0);
        }
        excluded = prop.state.removed_incidence_masks();
    }
    let mut search = Search::new(faults.n(), &excluded, cfg);
    let mut found = false;
    search.run(&mut |_| {
        found = true;
        false
    });
    (found, search.nodes)
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
    fn fault_free_small_cubes_are_hamiltonian() {
        for n in 2..=6 {
            let f = FaultSet::empty(dim(n));
            match find_hamiltonian(&f) {
                Verdict::Hamiltonian { cycle } => {
                    assert_eq!(cycle.len(), dim(n).vertex_count() as usize);
                }
                Verdict::NonHamiltonian { .. } => panic!("Q_{n} must be Hamiltonian"),
            }
        }
    }

    #[test]
    fn q1_is_never_hamiltonian() {
        let f = FaultSet::empty(dim(1));
        assert!(!find_hamiltonian(&f).is_hamiltonian());
    }

    #[test]
    fn q2_single_fault_kills_the_cycle() {
        assert!(find_hamiltonian(&FaultSet::empty(dim(2))).is_hamiltonian());
        assert!(!find_hamiltonian(&fs(2, &[(0, 1)])).is_hamiltonian());
    }

    #[test]
    fn two_cut_cycle_in_q3_is_non_hamiltonian() {
        let f = fs(3, &[(0, 4), (3, 7)]);
        assert!(!find_hamiltonian(&f).is_hamiltonian());
        assert_eq!(count_hamiltonian(&f, u64::MAX), 0);
    }

    #[test]
    fn certificates_validate() {
        let f = fs(4, &[(0, 1), (5, 7), (10, 14)]);
        if let Verdict::Hamiltonian { cycle } = find_hamiltonian(&f) {
            HamCycle::new(&f, cycle.vertices().to_vec()).unwrap();
        } else {
            panic!("expected Hamiltonian");
        }
    }

    #[test]
    fn counts_on_tiny_cubes() {
        assert_eq!(count_hamiltonian(&FaultSet::empty(dim(2)), u64::MAX), 1);
        assert_eq!(count_hamiltonian(&FaultSet::empty(dim(3)), u64::MAX), 6);
        assert_eq!(count_hamiltonian(&fs(3, &[(0, 4), (3, 7)]), u64::MAX), 0);
    }

    #[test]
    fn cycle_validation_rejects_bad_input() {
        let f = FaultSet::empty(dim(2));
        assert!(HamCycle::new(&f, vec![0, 1, 3, 2]).is_ok());
        assert!(HamCycle::new(&f, vec![0, 1, 3]).is_err());
        assert!(HamCycle::new(&f, vec![0, 1, 1, 2]).is_err());
        assert!(HamCycle::new(&f, vec![0, 1, 2, 3]).is_err());
        let faulty = fs(2, &[(0, 1)]);
        assert!(HamCycle::new(&faulty, vec![0, 1, 3, 2]).is_err());
    }

    #[test]
    fn monotone_under_fault_removal() {
        let f = fs(4, &[(0, 1), (2, 3), (8, 12), (5, 13), (10, 11)]);
        if find_hamiltonian(&f).is_hamiltonian() {
            for i in 0..f.len() {
                assert!(find_hamiltonian(&f.without_index(i)).is_hamiltonian());
            }
        }
    }
}
