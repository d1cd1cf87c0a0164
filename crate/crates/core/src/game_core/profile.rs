use std::fmt;

use serde::{Deserialize, Serialize};

use super::GameError;

/// Largest player count any table in this crate will allocate for.
pub const MAX_PLAYERS: usize = 24;

/// A pure action profile of a binary-action game, i.e. a vertex of the
/// n-cube.
///
/// Player `i` (0-based) owns bit `i` of the code. The textual form lists
/// actions in player order, so the leftmost character is player 0's action:
/// code `1` with `n = 2` renders as `"10"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile(pub u64);

impl Profile {
    pub fn new(code: u64) -> Self {
        Profile(code)
    }

    pub fn code(self) -> u64 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Action (0 or 1) of `player`.
    pub fn action(self, player: usize) -> u8 {
        ((self.0 >> player) & 1) as u8
    }

    /// The neighbor obtained by switching `player`'s action.
    pub fn flip(self, player: usize) -> Self {
        Profile(self.0 ^ (1 << player))
    }

    pub fn with_action(self, player: usize, action: u8) -> Self {
        if self.action(player) == action {
            self
        } else {
            self.flip(player)
        }
    }

    pub fn is_valid(self, n: usize) -> bool {
        n <= 63 && self.0 < (1u64 << n)
    }

    /// Number of players playing action 1.
    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn bitstring(self, n: usize) -> String {
        (0..n)
            .map(|i| if self.action(i) == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bitstring(text: &str) -> Result<Self, GameError> {
        if text.is_empty() || text.len() > MAX_PLAYERS {
            return Err(GameError::BadProfile(text.to_string()));
        }
        let mut code = 0u64;
        for (i, c) in text.chars().enumerate() {
            match c {
                '0' => {}
                '1' => code |= 1 << i,
                _ => return Err(GameError::BadProfile(text.to_string())),
            }
        }
        Ok(Profile(code))
    }

    /// All `2^n` profiles in code order.
    pub fn all(n: usize) -> impl Iterator<Item = Profile> {
        (0..(1u64 << n)).map(Profile)
    }
}

/// Pairs a profile with its player count for display.
pub struct Bits(pub Profile, pub usize);

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.bitstring(self.1))
    }
}
