//! Querier strategies, the duel driver, regret matching and the reduced
//! problem.

mod duel;
pub mod querier;
mod reduced;
mod regret;

pub use duel::{run_duel, DuelResult};
pub use querier::{builtin_queriers, querier_by_name, History, Querier};
pub use reduced::{
    reduced_necessity_check, reduced_necessity_check_table, solve_reduced, ReducedInstance,
};
pub use regret::{cce_epsilon, regret_matching, RegretReport};

use crate::adversary::{AdversaryError, TranscriptError};
use crate::game_core::GameError;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("querier {querier} asked for profile code {code}, outside the cube")]
    InvalidQuery { querier: String, code: u64 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown querier {0:?}")]
    UnknownQuerier(String),
    #[error("regret matching needs at least one round")]
    ZeroRounds,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Transcript(#[from] TranscriptError),
}
