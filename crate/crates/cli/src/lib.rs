//! Library side of the `randfix` binary, so the subcommands can be tested
//! without spawning a process.

pub mod problem;
pub mod solve;
pub mod sperner;
pub mod subdivide;
