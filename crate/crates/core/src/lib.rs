//! Executable adversary argument for the pure-query complexity of
//! correlated equilibrium.
//!
//! The crate is organised around the pieces of that argument:
//!
//! - [`game_core`]: binary-action games, difference tables and exact CE/CCE
//!   verification.
//! - [`hypercube`]: components, spanning trees and expansion of the n-cube.
//! - [`adversary`]: the adaptive black box that keeps every answered profile
//!   at regret sum `-1` and then defeats any submitted distribution.
//! - [`dynamics`]: deterministic queriers, duels, regret matching and the
//!   reduced problem.
//! - [`lp_ce`]: exact simplex that computes a correlated equilibrium.
//! - [`cli`]: the `ce-adversary` command line.

pub mod adversary;
pub mod cli;
pub mod dynamics;
pub mod game_core;
pub mod hypercube;
pub mod lp_ce;
pub mod rational;

pub use rational::Rational;
