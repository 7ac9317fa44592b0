//! Library side of the command-line front end: the analysis pipeline, the
//! built-in verification fixtures, and report rendering. The binary in
//! `main.rs` is a thin argument-parsing shell over these.

pub mod fixtures;
pub mod pipeline;
pub mod report;
