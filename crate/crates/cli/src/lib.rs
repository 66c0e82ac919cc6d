//! Configuration-driven front end for the dephasing solver suite: TOML
//! run specs in, CSV series and comparison reports out.

pub mod config;
pub mod output;
pub mod runner;
