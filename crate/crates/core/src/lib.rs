//! Distributed TSCH-style scheduling for tree-topology IoT networks with
//! switched-beam directional antennas.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation over in-memory values; file formats, configuration files and
//! the command line live in the `dtsch` companion crate.
//!
//! Layout:
//! - [`topology`]: node placement, radius graph, convergecast tree, top-subtrees
//! - [`antenna`]: sector geometry, beam pairing, coverage and conflict predicates
//! - [`link`]: rate, power, energy and delay formulas
//! - [`schedule`]: cells, node-channel and node-directional matrices, conflict checking
//! - [`scheduler`]: the level-based, timer-driven RTS/CTS scheduling protocol
//! - [`sim`]: slot-stepped convergecast simulation and metrics

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod antenna;
pub mod error;
pub mod link;
pub mod rng;
pub mod schedule;
pub mod scheduler;
pub mod sim;
pub mod topology;

pub use antenna::{AntennaMode, BeamConfig, BeamIndex, ConflictKind, InterferenceModel, Transmission};
pub use error::{Error, Result};
pub use link::LinkParams;
pub use schedule::{Cell, Schedule, ScheduleConfig};
pub use scheduler::{Routes, SchedulerConfig, SchedulingOutcome, TimerPolicy};
pub use sim::{MetricsReport, SimConfig};
pub use topology::{NodeId, Position, Topology, Tree};
