//! Commutativity-aware scheduling of QAOA cost layers onto coupled qubit
//! hardware.
//!
//! The crate builds the linear clique pattern and its pruned variants,
//! lays them onto non-linear devices through line embeddings, searches for
//! initial mappings that finish the pattern early, and falls back to a
//! matching-plus-swap heuristic when the pattern stops paying off. Every
//! schedule can be checked by the independent verifier in [`verify`].

pub mod arch;
pub mod bench;
pub mod circuit;
pub mod embedding;
pub mod graph;
pub mod heuristic;
pub mod initial;
pub mod mapping;
pub mod pattern;
pub mod rng;
pub mod scheduler;
pub mod verify;

pub use arch::{ArchError, Architecture, Topology};
pub use circuit::{FormatError, Gate, GateKind, ScheduledCircuit};
pub use graph::{Edge, GraphError, ProblemGraph};
pub use mapping::{Mapping, MappingError};
pub use scheduler::{schedule, SchedulerConfig, SchedulerError, Strategy};
pub use verify::{metrics, verify, Metrics, VerificationReport};
