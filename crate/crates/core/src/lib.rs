//! Pursuit-evasion games on graphs: an exact retrograde solver for no-exit
//! games, team and exit-blocking heuristics for larger ones, and a seeded
//! simulator for evaluating policy pairings.

pub mod cli;
pub mod config;
pub mod dp;
pub mod error;
pub mod exit_heuristic;
pub mod features;
pub mod game;
pub mod graph;
pub mod grouping;
pub mod matching;
pub mod policy;
pub mod sim;
pub mod vi;

pub use error::{Error, Result};
pub use game::{GlobalState, Outcome, PegSpec};
pub use graph::Graph;
