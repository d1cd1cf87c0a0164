//! Regret matching on binary games.
//!
//! Each player keeps cumulative regrets `R_i(k)` toward both actions and
//! plays action `k` with probability proportional to `max(R_i(k), 0)`,
//! uniformly when both are non-positive. Regrets are exact; only the
//! sampling step goes through `f64`. With two actions the swap regret
//! `0 → 1` equals the regret toward `1`, so the empirical distribution
//! approaches the correlated equilibria, not only the coarse ones.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::DynamicsError;
use crate::game_core::{differences_from_utilities, Distribution, GameError, GameTable, Profile};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretReport {
    pub rounds: u64,
    #[serde(serialize_with = "serialize_distribution")]
    pub empirical: Distribution,
    /// `max_{i,k} R_i(k)^+ / T`.
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
    /// Average regret of each player toward actions 0 and 1.
    #[serde(serialize_with = "serialize_regrets")]
    pub per_player_regrets: Vec<[Rational; 2]>,
}

fn serialize_distribution<S: serde::Serializer>(d: &Distribution, s: S) -> Result<S::Ok, S::Error> {
    crate::game_core::io::DistributionFile::from_distribution(d).serialize(s)
}

fn serialize_regrets<S: serde::Serializer>(r: &[[Rational; 2]], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<[String; 2]> = r
        .iter()
        .map(|[a, b]| [rational::format(a), rational::format(b)])
        .collect();
    rows.serialize(s)
}

fn positive_part(r: &Rational) -> Rational {
    if r.is_positive() {
        r.clone()
    } else {
        Rational::zero()
    }
}

/// Runs `rounds` rounds of regret matching from uniform play.
pub fn regret_matching(
    game: &GameTable,
    rounds: u64,
    seed: u64,
) -> Result<RegretReport, DynamicsError> {
    if rounds == 0 {
        return Err(DynamicsError::ZeroRounds);
    }
    if !game.is_binary() {
        return Err(GameError::NotBinary.into());
    }
    let n = game.n();
    let diff = differences_from_utilities(game)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut regrets = vec![[Rational::zero(), Rational::zero()]; n];
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();

    for _ in 0..rounds {
        let mut s = Profile(0);
        for (i, [r0, r1]) in regrets.iter().enumerate() {
            let (p0, p1) = (
                rational::to_f64(&positive_part(r0)),
                rational::to_f64(&positive_part(r1)),
            );
            let prob_one = if p0 + p1 > 0.0 { p1 / (p0 + p1) } else { 0.5 };
            if rng.random::<f64>() < prob_one {
                s = s.with_action(i, 1);
            }
        }
        *counts.entry(s.code()).or_default() += 1;
        for (i, r) in regrets.iter_mut().enumerate() {
            // Switching to the other action gains u_i(s¬i) - u_i(s) = -d_i(s).
            let d = diff.get(i, s).expect("complete table");
            r[1 - s.action(i) as usize] -= d;
        }
    }

    let t = rational::int(rounds as i64);
    let empirical = Distribution::new(
        n,
        counts
            .into_iter()
            .map(|(k, c)| (k, rational::ratio(c as i64, rounds as i64))),
    )?;
    let epsilon = regrets
        .iter()
        .flat_map(|r| r.iter())
        .map(positive_part)
        .max()
        .unwrap_or_else(Rational::zero)
        / &t;
    let per_player_regrets = regrets.into_iter().map(|[a, b]| [a / &t, b / &t]).collect();
    Ok(RegretReport {
        rounds,
        empirical,
        epsilon,
        per_player_regrets,
    })
}

/// Largest coarse-CE gain under `sigma`, clipped at zero.
pub fn cce_epsilon(game: &GameTable, sigma: &Distribution) -> Result<Rational, GameError> {
    let gains = crate::game_core::coarse_ce_gains(game, sigma)?;
    Ok(gains
        .iter()
        .flatten()
        .map(positive_part)
        .max()
        .unwrap_or_else(Rational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn zero_rounds_rejected() {
        let g = GameTable::from_fn(2, |_, _| int(0)).unwrap();
        assert!(matches!(
            regret_matching(&g, 0, 1),
            Err(DynamicsError::ZeroRounds)
        ));
    }

    #[test]
    fn dominant_action_is_learned() {
        // Action 1 is worth one more to everyone.
        let g = GameTable::from_fn(3, |i, s| int(s.action(i) as i64)).unwrap();
        let r = regret_matching(&g, 500, 7).unwrap();
        assert!(r.empirical.prob(7) > rational::ratio(9, 10));
        assert!(r.epsilon < rational::ratio(1, 10));
    }

    #[test]
    fn epsilon_bounds_cce_gain() {
        // In binary games the CCE gain of a fixed deviation equals the
        // average regret toward it.
        let g =
            GameTable::from_fn(3, |i, s| int(((s.code() * 7 + i as u64 * 3) % 11) as i64)).unwrap();
        let r = regret_matching(&g, 300, 3).unwrap();
        assert_eq!(cce_epsilon(&g, &r.empirical).unwrap(), r.epsilon);
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = GameTable::from_fn(4, |i, s| int(((s.code() + i as u64) % 5) as i64)).unwrap();
        assert_eq!(
            regret_matching(&g, 200, 11).unwrap(),
            regret_matching(&g, 200, 11).unwrap()
        );
    }
}
