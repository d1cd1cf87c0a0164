//! JSON file formats for games and distributions.
//!
//! Game:
//! `{"n": 2, "actions": [2, 2], "utilities": {"1": {"00": "-1/1", ...}, "2": {...}}}`
//!
//! Distribution: `{"n": 2, "support": {"00": "1/2", "11": "1/2"}}`
//!
//! Player keys are 1-based. Profile keys list one action digit per player in
//! player order. Rationals are `"num/den"` strings in lowest terms.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{Distribution, GameError, GameTable, Profile};
use crate::rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub n: usize,
    #[serde(default)]
    pub actions: Vec<usize>,
    pub utilities: IndexMap<String, IndexMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub n: usize,
    pub support: IndexMap<String, String>,
}

fn parse_digits(label: &str, actions: &[usize]) -> Result<Vec<usize>, GameError> {
    let bad = || GameError::BadProfile(label.to_string());
    if label.chars().count() != actions.len() {
        return Err(bad());
    }
    label
        .chars()
        .zip(actions)
        .map(|(c, &m)| {
            c.to_digit(36)
                .map(|d| d as usize)
                .filter(|&d| d < m)
                .ok_or_else(bad)
        })
        .collect()
}

impl GameFile {
    pub fn from_game(game: &GameTable) -> Self {
        let utilities = (0..game.n())
            .map(|i| {
                let row = (0..game.num_profiles())
                    .filter_map(|k| game.get(i, k).map(|u| (game.label(k), rational::format(u))))
                    .collect();
                ((i + 1).to_string(), row)
            })
            .collect();
        GameFile {
            n: game.n(),
            actions: game.actions().to_vec(),
            utilities,
        }
    }

    /// Builds the table; a missing `actions` list means two actions each.
    /// Missing entries stay missing; callers that need completeness check it.
    pub fn to_game(&self) -> Result<GameTable, GameError> {
        let actions = if self.actions.is_empty() {
            vec![2; self.n]
        } else {
            self.actions.clone()
        };
        if actions.len() != self.n {
            return Err(GameError::DimensionMismatch {
                expected: format!("{} action counts", self.n),
                found: actions.len().to_string(),
            });
        }
        let mut game = GameTable::new(actions)?;
        for (player_key, row) in &self.utilities {
            let player: usize = player_key
                .parse()
                .ok()
                .filter(|p| (1..=self.n).contains(p))
                .ok_or_else(|| GameError::InvalidGame(format!("bad player key {player_key:?}")))?;
            for (label, value) in row {
                let digits = parse_digits(label, game.actions())?;
                let value =
                    rational::parse(value).map_err(|e| GameError::InvalidGame(e.to_string()))?;
                let index = game.index_of(&digits);
                game.set(player - 1, index, value);
            }
        }
        Ok(game)
    }
}

impl DistributionFile {
    pub fn from_distribution(sigma: &Distribution) -> Self {
        DistributionFile {
            n: sigma.n(),
            support: sigma
                .iter()
                .map(|(k, p)| (Profile(k).bitstring(sigma.n()), rational::format(p)))
                .collect(),
        }
    }

    /// Same as [`DistributionFile::from_distribution`] but labels profiles
    /// with the game's mixed-radix digits.
    pub fn from_distribution_for(sigma: &Distribution, game: &GameTable) -> Self {
        DistributionFile {
            n: sigma.n(),
            support: sigma
                .iter()
                .map(|(k, p)| (game.label(k as usize), rational::format(p)))
                .collect(),
        }
    }

    /// Parses a binary-action distribution.
    pub fn to_distribution(&self) -> Result<Distribution, GameError> {
        self.to_distribution_with(&vec![2; self.n])
    }

    /// Parses profile labels against explicit action counts.
    pub fn to_distribution_with(&self, actions: &[usize]) -> Result<Distribution, GameError> {
        if actions.len() != self.n {
            return Err(GameError::DimensionMismatch {
                expected: format!("{} players", actions.len()),
                found: format!("{} players", self.n),
            });
        }
        let mut entries = Vec::with_capacity(self.support.len());
        for (label, value) in &self.support {
            let digits = parse_digits(label, actions)?;
            let index = digits
                .iter()
                .zip(actions)
                .rev()
                .fold(0u64, |acc, (&d, &m)| acc * m as u64 + d as u64);
            let p = rational::parse(value)
                .map_err(|e| GameError::InvalidDistribution(e.to_string()))?;
            entries.push((index, p));
        }
        Distribution::new(self.n, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn game_file_round_trip() {
        let game = GameTable::from_fn(2, |i, s| ratio(s.code() as i64 - i as i64, 3)).unwrap();
        let file = GameFile::from_game(&game);
        assert_eq!(file.utilities["1"]["10"], "1/3");
        let text = serde_json::to_string(&file).unwrap();
        let back: GameFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_game().unwrap(), game);
    }

    #[test]
    fn distribution_file_round_trip() {
        let sigma = Distribution::new(3, [(1, ratio(1, 4)), (6, ratio(3, 4))]).unwrap();
        let file = DistributionFile::from_distribution(&sigma);
        assert_eq!(file.support["100"], "1/4");
        assert_eq!(file.support["011"], "3/4");
        assert_eq!(file.to_distribution().unwrap(), sigma);
    }

    #[test]
    fn mixed_radix_labels() {
        let mut game = GameTable::new(vec![3]).unwrap();
        for k in 0..3 {
            game.set(0, k, int(k as i64));
        }
        let file = GameFile::from_game(&game);
        assert_eq!(file.utilities["1"]["2"], "2/1");
        assert_eq!(file.to_game().unwrap(), game);
        let d = DistributionFile {
            n: 1,
            support: [("2".to_string(), "1".to_string())].into_iter().collect(),
        };
        assert_eq!(d.to_distribution_with(&[3]).unwrap().prob(2), int(1));
        assert!(d.to_distribution().is_err());
    }

    #[test]
    fn rejects_bad_keys() {
        let text = r#"{"n": 1, "utilities": {"2": {"0": "1"}}}"#;
        let file: GameFile = serde_json::from_str(text).unwrap();
        assert!(file.to_game().is_err());
        let text = r#"{"n": 2, "utilities": {"1": {"0": "1"}}}"#;
        let file: GameFile = serde_json::from_str(text).unwrap();
        assert!(matches!(file.to_game(), Err(GameError::BadProfile(_))));
    }
}
