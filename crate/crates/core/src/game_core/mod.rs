//! Game data model, difference/utility conversion and exact equilibrium
//! verification.
//!
//! Players are 0-based in the Rust API. The JSON file formats (see [`io`])
//! number players from 1 to match the `s_1 … s_n` bitstring order.

mod distribution;
pub mod io;
mod profile;
mod tables;
mod verify;

pub use distribution::Distribution;
pub use profile::{Bits, Profile, MAX_PLAYERS};
pub use tables::{
    differences_from_utilities, sum_differences, utilities_from_differences, DifferenceTable,
    GameTable,
};
pub use verify::{
    coarse_ce_gains, constraint_value, is_coarse_ce, is_correlated_equilibrium,
    remark1_certificate, CceVerdict, CceViolation, Certificate, CertificateKind, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("missing utility for player index {player} at profile {profile}")]
    MissingUtility { player: usize, profile: String },
    #[error("operation requires two actions per player")]
    NotBinary,
    #[error("complementarity violated on edge ({profile}, {neighbor}) for player index {player}")]
    Inconsistent {
        player: usize,
        profile: String,
        neighbor: String,
    },
    #[error("difference for player index {player} at profile {profile} is unassigned")]
    PartialProfile { player: usize, profile: String },
    #[error("difference for player index {player} at profile {profile} is already assigned")]
    AlreadyAssigned { player: usize, profile: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("invalid profile {0:?}")]
    BadProfile(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("player count {0} outside supported range 1..={max}", max = MAX_PLAYERS)]
    PlayerCount(usize),
    #[error("invalid game: {0}")]
    InvalidGame(String),
}
