//! Library half of the command-line runner, split out so integration tests
//! can drive configs and experiments without spawning the binary.

pub mod config;
pub mod experiment;
pub mod trace;
