//! Experiment harness around `ddio-core`: the single-machine scheduling
//! benchmark, the two-stage learning pipeline with timings, file formats
//! and the command-line surface.

// Indexed loops are clearer for the matrix layouts here.
#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod cli;
pub mod curve;
pub mod exec;
pub mod format;
pub mod pipeline;
pub mod sched;
