//! Core library for analyzing timely-coordinated response problems.
//!
//! A group of agents connected by message channels with worst-case delivery
//! bounds must each respond to an external input, with the time difference
//! between every ordered pair of responses bounded above by a constraining
//! function. This crate provides:
//!
//! - extended-integer constraint arithmetic, constraint graphs and their
//!   canonical forms ([`constraints`]),
//! - communication contexts and delivery-bound distances ([`context`]),
//! - deterministic discrete-time simulation of full-information protocols
//!   and exhaustive run enumeration ([`runtime`]),
//! - the syncausal ("synchronous happened-before") partial orders and
//!   detection of brooms, centipedes and centibrooms ([`syncausality`]),
//! - solvability decisions, worst-case response bounds and the optimal
//!   response engine ([`coordination`]),
//! - a brute-force epistemic oracle over finite point spaces: knowledge
//!   operators and vectorial fixed points ([`epistemic`]).
//!
//! The crate is `no_std` (alloc only); all IO, file formats and the CLI live
//! in the companion `tcr-cli` crate.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod constraints;
pub mod context;
pub mod coordination;
pub mod delta;
pub mod epistemic;
pub mod graph;
pub mod runtime;
pub mod syncausality;

/// Agent identifier: a dense index into a context's agent list.
pub type Agent = usize;

/// External input identifier: a dense index into a context's input list.
pub type InputId = usize;

/// Discrete time. Runs are simulated over `0..=horizon`.
pub type Time = u32;

pub use delta::ExtendedDelta;
