//! Correlated equilibria of small binary games as exact linear feasibility.
//!
//! One variable `σ(s) ≥ 0` per profile, one inequality per (player, action)
//! pair and the normalisation `Σσ = 1`. A basic feasible solution has at
//! most `2n + 1` nonzero entries, which bounds the support of the returned
//! equilibrium.

pub mod simplex;

use num_traits::{One, Zero};

use crate::game_core::{is_correlated_equilibrium, Distribution, GameError, GameTable, Profile};
use crate::rational::Rational;
use simplex::{LpOutcome, StandardForm};

/// Largest player count accepted (`2^10` variables).
pub const MAX_LP_PLAYERS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("LP oracle supports at most {max} players (got {0})", max = MAX_LP_PLAYERS)]
    SizeLimit(usize),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// `Σ_s coeffs[s]·σ(s) ≥ 0` for one (player, action) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CeConstraint {
    pub player: usize,
    pub action: u8,
    pub coeffs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilitySystem {
    n: usize,
    constraints: Vec<CeConstraint>,
}

impl FeasibilitySystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_variables(&self) -> usize {
        1 << self.n
    }

    /// The `2n` CE inequalities; normalisation is implicit.
    pub fn constraints(&self) -> &[CeConstraint] {
        &self.constraints
    }

    /// Inequalities plus the normalisation row.
    pub fn num_rows(&self) -> usize {
        self.constraints.len() + 1
    }

    /// True iff `sigma` satisfies every row.
    pub fn is_feasible(&self, sigma: &[Rational]) -> bool {
        let total: Rational = sigma.iter().sum();
        total.is_one()
            && sigma.iter().all(|p| *p >= Rational::zero())
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().zip(sigma).map(|(a, p)| a * p).sum();
                lhs >= Rational::zero()
            })
    }

    /// Equality form: `coeffs·σ - surplus = 0` per CE row, `Σσ = 1`.
    pub fn to_standard_form(&self) -> StandardForm {
        let vars = self.num_variables();
        let k = self.constraints.len();
        let width = vars + k;
        let mut a = Vec::with_capacity(k + 1);
        let mut b = Vec::with_capacity(k + 1);
        for (r, c) in self.constraints.iter().enumerate() {
            let mut row = c.coeffs.clone();
            row.resize(width, Rational::zero());
            row[vars + r] = -Rational::one();
            a.push(row);
            b.push(Rational::zero());
        }
        let mut norm = vec![Rational::one(); vars];
        norm.resize(width, Rational::zero());
        a.push(norm);
        b.push(Rational::one());
        StandardForm {
            a,
            b,
            c: vec![Rational::zero(); width],
        }
    }
}

/// The CE feasibility system of a complete binary game.
pub fn build_system(game: &GameTable) -> Result<FeasibilitySystem, LpError> {
    let n = game.n();
    if n > MAX_LP_PLAYERS {
        return Err(LpError::SizeLimit(n));
    }
    if !game.is_binary() {
        return Err(GameError::NotBinary.into());
    }
    game.check_complete()?;
    let mut constraints = Vec::with_capacity(2 * n);
    for player in 0..n {
        for action in 0..2u8 {
            let coeffs = Profile::all(n)
                .map(|s| {
                    if s.action(player) == action {
                        game.utility(player, s) - game.utility(player, s.flip(player))
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            constraints.push(CeConstraint {
                player,
                action,
                coeffs,
            });
        }
    }
    Ok(FeasibilitySystem { n, constraints })
}

/// A correlated equilibrium at a vertex of the feasibility polytope.
///
/// The result is checked with the independent verifier before it is
/// returned; infeasibility or a failed check is an internal error, since
/// every game has a correlated equilibrium.
pub fn find_exact_ce(game: &GameTable) -> Result<Distribution, LpError> {
    let system = build_system(game)?;
    let vars = system.num_variables();
    let x = match simplex::solve(&system.to_standard_form()) {
        LpOutcome::Optimal { x, .. } => x,
        other => return Err(LpError::Internal(format!("CE system reported {other:?}"))),
    };
    let sigma = Distribution::new(
        system.n(),
        x.into_iter()
            .take(vars)
            .enumerate()
            .map(|(k, p)| (k as u64, p)),
    )?;
    if !is_correlated_equilibrium(game, &sigma)?.is_equilibrium() {
        return Err(LpError::Internal("simplex point fails the CE check".into()));
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn system_sizes() {
        let g1 = GameTable::from_fn(1, |_, _| int(0)).unwrap();
        let s1 = build_system(&g1).unwrap();
        assert_eq!(
            (s1.num_variables(), s1.constraints().len(), s1.num_rows()),
            (2, 2, 3)
        );
        let g3 = GameTable::from_fn(3, |_, _| int(0)).unwrap();
        let s3 = build_system(&g3).unwrap();
        assert_eq!((s3.num_variables(), s3.constraints().len()), (8, 6));
        assert!(s3
            .constraints()
            .iter()
            .all(|c| c.coeffs.iter().all(Zero::is_zero)));
        assert!(s3.is_feasible(&vec![ratio(1, 8); 8]));
    }

    #[test]
    fn coefficient_layout() {
        let game =
            GameTable::from_fn(2, |i, s| int((s.code() as i64 + 1) * (i as i64 + 2))).unwrap();
        let sys = build_system(&game).unwrap();
        let c = &sys.constraints()[1]; // player 0, action 1
        assert_eq!((c.player, c.action), (0, 1));
        for s in Profile::all(2) {
            let expected = if s.action(0) == 1 {
                game.utility(0, s) - game.utility(0, s.flip(0))
            } else {
                int(0)
            };
            assert_eq!(c.coeffs[s.index()], expected);
        }
    }

    #[test]
    fn constant_game_small_support() {
        let game = GameTable::from_fn(2, |_, _| ratio(1, 3)).unwrap();
        let sigma = find_exact_ce(&game).unwrap();
        assert!(sigma.support_size() <= 5);
    }

    #[test]
    fn dominant_action_gives_point_mass() {
        let game = GameTable::from_fn(1, |_, s| int(s.code() as i64)).unwrap();
        assert_eq!(
            find_exact_ce(&game).unwrap(),
            Distribution::point_mass(1, Profile(1))
        );
    }

    #[test]
    fn size_limit() {
        let game = GameTable::from_fn(11, |_, _| int(0)).unwrap();
        assert_eq!(build_system(&game), Err(LpError::SizeLimit(11)));
    }

    #[test]
    fn chicken_has_a_ce() {
        // Chicken: (0,0) = (6,6), (0,1) = (2,7), (1,0) = (7,2), (1,1) = (0,0).
        let payoff = [[6, 6], [7, 2], [2, 7], [0, 0]];
        let game = GameTable::from_fn(2, |i, s| int(payoff[s.index()][i])).unwrap();
        let sigma = find_exact_ce(&game).unwrap();
        assert!(is_correlated_equilibrium(&game, &sigma)
            .unwrap()
            .is_equilibrium());
        assert!(sigma.support_size() <= 5);
    }
}
