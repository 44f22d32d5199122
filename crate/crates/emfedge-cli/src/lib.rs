//! CLI plumbing for the emfedge simulator: argument parsing, dispatch and
//! results persistence. The binary in `main.rs` is a thin wrapper so the
//! pieces stay testable in-process.

pub mod cli;
pub mod output;
