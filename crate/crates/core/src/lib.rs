//! Hamiltonian cycles in hypercubes with faulty edges.
//!
//! The n-dimensional hypercube `Q_n` stays Hamiltonian under small numbers of
//! edge faults, and when it does not, the obstruction is usually a small local
//! pattern: a vertex cut down to degree one, a short cycle whose even-parity
//! vertices are severed from the rest of the cube, or a claw of degree-two
//! vertices around a common center. This crate provides:
//!
//! * value types for vertices, edges, fault sets and partitions ([`cube`]);
//! * the automorphism group of `Q_n`, canonical forms of fault sets, and
//!   isomorphism tests ([`symmetry`]);
//! * verification, detection, reduction and generation of the full catalog of
//!   "disconnected halfway" and claw traps ([`traps`]);
//! * a sound forcing heuristic that proves non-Hamiltonicity by fixpoint
//!   propagation of forced ("blue") and excluded edges ([`heuristic`]);
//! * a complete backtracking solver with certificates ([`solver`]);
//! * isomorph-free enumeration of fault sets by canonical augmentation, with
//!   classification and resumable checkpoints ([`enumerate`]);
//! * a claims harness that reproduces the classification results for
//!   `Q_3`/`Q_4`/`Q_5` ([`verify`]).
//!
//! The `qham` binary exposes all of this on the command line.

pub mod cube;
pub mod enumerate;
pub mod heuristic;
pub mod solver;
pub mod symmetry;
pub mod traps;
pub mod verify;

pub(crate) mod edgeset;
pub(crate) mod tables;

pub use cube::{
    classify_crossing, healthy_neighbors, parity, Crossing, CubeDim, Edge, FaultSet,
    PartitionView, Vertex,
};
pub use heuristic::{run_heuristic, HeuristicOutcome, HeuristicVerdict};
pub use solver::{count_hamiltonian, find_hamiltonian, HamCycle, Verdict};
pub use symmetry::{are_isomorphic, canonical_form, Automorphism, CanonicalForm};
pub use traps::{detect_traps, DhwWitness, TrapKind, TrapReport};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} out of range (expected 1..=16)")]
    DimOutOfRange(u32),
    #[error("vertex {vertex} out of range for Q_{n}")]
    VertexOutOfRange { n: u32, vertex: u32 },
    #[error("{u} {v} is not a hypercube edge: labels must differ in exactly one bit")]
    NotAnEdge { u: u32, v: u32 },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: u32, v: u32 },
    #[error("dimension mismatch: Q_{0} vs Q_{1}")]
    DimMismatch(u32, u32),
    #[error("axis {axis} out of range for Q_{n}")]
    AxisOutOfRange { n: u32, axis: u32 },
    #[error("invalid permutation for Q_{0}")]
    BadPermutation(u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
    #[error("trap kind {kind} cannot be built in Q_{n}")]
    TrapKindDim { kind: String, n: u32 },
    #[error("vertex set is not a proper nonempty subset of Q_{0}")]
    NotProperSubset(u32),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
