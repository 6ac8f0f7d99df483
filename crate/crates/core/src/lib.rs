//! Multi-follower Bayesian Stackelberg games: exact equilibria via
//! best-response regions, online learners with type or action feedback,
//! and a simulator with exact regret accounting.

pub mod error;
pub mod game;
pub mod geometry;
pub mod harness;
pub mod learners;
pub mod linprog;
pub mod solvers;

pub use error::{Error, Result};
