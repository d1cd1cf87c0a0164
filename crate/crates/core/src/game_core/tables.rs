use num_traits::Zero;

use super::{Bits, GameError, Profile, MAX_PLAYERS};
use crate::rational::Rational;

/// Utilities `u_i(s)` for every player and profile.
///
/// Profiles are indexed in mixed radix with player 0 as the least
/// significant digit, so for binary games the index is the [`Profile`] code.
/// Entries may be missing while a table is being filled.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTable {
    actions: Vec<usize>,
    utilities: Vec<Vec<Option<Rational>>>,
}

impl GameTable {
    /// An empty table with the given action counts per player.
    pub fn new(actions: Vec<usize>) -> Result<Self, GameError> {
        let n = actions.len();
        if n == 0 || n > MAX_PLAYERS {
            return Err(GameError::PlayerCount(n));
        }
        if actions.iter().any(|&m| m < 2) {
            return Err(GameError::InvalidGame(
                "every player needs at least two actions".into(),
            ));
        }
        let size = actions
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .filter(|&s| s <= 1 << MAX_PLAYERS)
            .ok_or_else(|| GameError::InvalidGame("too many profiles".into()))?;
        Ok(GameTable {
            utilities: vec![vec![None; size]; n],
            actions,
        })
    }

    pub fn binary(n: usize) -> Result<Self, GameError> {
        Self::new(vec![2; n])
    }

    /// A complete binary game from `f(player, profile)`.
    pub fn from_fn(
        n: usize,
        mut f: impl FnMut(usize, Profile) -> Rational,
    ) -> Result<Self, GameError> {
        let mut game = Self::binary(n)?;
        for (player, row) in game.utilities.iter_mut().enumerate() {
            for (code, slot) in row.iter_mut().enumerate() {
                *slot = Some(f(player, Profile(code as u64)));
            }
        }
        Ok(game)
    }

    pub fn n(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn is_binary(&self) -> bool {
        self.actions.iter().all(|&m| m == 2)
    }

    pub fn num_profiles(&self) -> usize {
        self.utilities[0].len()
    }

    pub fn get(&self, player: usize, index: usize) -> Option<&Rational> {
        self.utilities.get(player)?.get(index)?.as_ref()
    }

    pub fn set(&mut self, player: usize, index: usize, value: Rational) {
        self.utilities[player][index] = Some(value);
    }

    /// Utility of a complete binary game; panics on a missing entry.
    pub fn utility(&self, player: usize, s: Profile) -> &Rational {
        self.utilities[player][s.index()]
            .as_ref()
            .expect("utility table is complete")
    }

    pub fn is_complete(&self) -> bool {
        self.utilities.iter().flatten().all(Option::is_some)
    }

    /// Errors with the first missing `(player, profile)` pair.
    pub fn check_complete(&self) -> Result<(), GameError> {
        for (player, row) in self.utilities.iter().enumerate() {
            if let Some(index) = row.iter().position(Option::is_none) {
                return Err(GameError::MissingUtility {
                    player,
                    profile: self.label(index),
                });
            }
        }
        Ok(())
    }

    /// Per-player actions of a mixed-radix profile index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        self.actions
            .iter()
            .map(|&m| {
                let d = index % m;
                index /= m;
                d
            })
            .collect()
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.actions)
            .rev()
            .fold(0, |acc, (&d, &m)| acc * m + d)
    }

    /// Index step for changing `player`'s action by one.
    pub fn stride(&self, player: usize) -> usize {
        self.actions[..player].iter().product()
    }

    /// The profile index reached when `player` deviates to `action`.
    pub fn deviate(&self, index: usize, player: usize, action: usize) -> usize {
        let stride = self.stride(player);
        let current = (index / stride) % self.actions[player];
        index - current * stride + action * stride
    }

    /// Profile label in player order, one digit per player.
    pub fn label(&self, index: usize) -> String {
        self.digits(index)
            .iter()
            .map(|d| char::from_digit(*d as u32, 36).unwrap_or('?'))
            .collect()
    }

    /// Multiplies every utility of `player` by `factor`.
    pub fn scale_player(&mut self, player: usize, factor: &Rational) {
        for u in self.utilities[player].iter_mut().flatten() {
            *u = &*u * factor;
        }
    }
}

/// Partial table of differences `d_i(s) = u_i(s) - u_i(s¬i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceTable {
    n: usize,
    entries: Vec<Option<Rational>>,
}

impl DifferenceTable {
    /// All entries unassigned.
    pub fn new(n: usize) -> Result<Self, GameError> {
        if n == 0 || n > MAX_PLAYERS {
            return Err(GameError::PlayerCount(n));
        }
        Ok(DifferenceTable {
            n,
            entries: vec![None; n << n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, player: usize, s: Profile) -> usize {
        s.index() * self.n + player
    }

    pub fn get(&self, player: usize, s: Profile) -> Option<&Rational> {
        self.entries[self.slot(player, s)].as_ref()
    }

    pub fn is_assigned(&self, player: usize, s: Profile) -> bool {
        self.get(player, s).is_some()
    }

    /// Sets `d_i(s) = value` and `d_i(s¬i) = -value`; both must be unassigned.
    pub fn assign_edge(
        &mut self,
        player: usize,
        s: Profile,
        value: Rational,
    ) -> Result<(), GameError> {
        let t = s.flip(player);
        for p in [s, t] {
            if self.is_assigned(player, p) {
                return Err(GameError::AlreadyAssigned {
                    player,
                    profile: p.bitstring(self.n),
                });
            }
        }
        let (a, b) = (self.slot(player, s), self.slot(player, t));
        self.entries[b] = Some(-&value);
        self.entries[a] = Some(value);
        Ok(())
    }

    /// Writes a single entry without touching its complement.
    pub fn set_unchecked(&mut self, player: usize, s: Profile, value: Option<Rational>) {
        let slot = self.slot(player, s);
        self.entries[slot] = value;
    }

    /// True iff all `n` components of `d(s)` are assigned.
    pub fn profile_complete(&self, s: Profile) -> bool {
        (0..self.n).all(|i| self.is_assigned(i, s))
    }

    /// True iff no component of `d(s)` is assigned.
    pub fn profile_empty(&self, s: Profile) -> bool {
        (0..self.n).all(|i| !self.is_assigned(i, s))
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    pub fn assigned_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// `d(s)` when complete at `s`.
    pub fn vector(&self, s: Profile) -> Option<Vec<Rational>> {
        (0..self.n).map(|i| self.get(i, s).cloned()).collect()
    }

    /// Assigned entries as `(player, profile, value)` in profile-major order.
    pub fn assigned(&self) -> impl Iterator<Item = (usize, Profile, &Rational)> + '_ {
        self.entries.iter().enumerate().filter_map(move |(k, e)| {
            e.as_ref()
                .map(|v| (k % self.n, Profile((k / self.n) as u64), v))
        })
    }

    /// First edge whose two assigned entries do not cancel, or whose
    /// complement is missing.
    pub fn check_complementarity(&self) -> Result<(), GameError> {
        for s in Profile::all(self.n) {
            for i in 0..self.n {
                let t = s.flip(i);
                let ok = match (self.get(i, s), self.get(i, t)) {
                    (None, None) => true,
                    (Some(a), Some(b)) => (a + b).is_zero(),
                    _ => false,
                };
                if !ok {
                    return Err(GameError::Inconsistent {
                        player: i,
                        profile: s.bitstring(self.n),
                        neighbor: t.bitstring(self.n),
                    });
                }
            }
        }
        Ok(())
    }

    /// Assigns zero to every unassigned entry.
    pub fn fill_unassigned_with_zero(&mut self) {
        for e in self.entries.iter_mut().filter(|e| e.is_none()) {
            *e = Some(Rational::zero());
        }
    }
}

/// `d_i(s) = u_i(s) - u_i(s¬i)` for a complete binary game.
pub fn differences_from_utilities(game: &GameTable) -> Result<DifferenceTable, GameError> {
    if !game.is_binary() {
        return Err(GameError::NotBinary);
    }
    game.check_complete()?;
    let n = game.n();
    let mut diff = DifferenceTable::new(n)?;
    for s in Profile::all(n) {
        for i in 0..n {
            let d = game.utility(i, s) - game.utility(i, s.flip(i));
            diff.set_unchecked(i, s, Some(d));
        }
    }
    Ok(diff)
}

/// Canonical reconstruction `u_i(s) = d_i(s)` when `s_i = 0`, else `0`.
///
/// Unassigned differences count as zero. Feeding the result back through
/// [`differences_from_utilities`] reproduces every assigned entry.
pub fn utilities_from_differences(diff: &DifferenceTable) -> Result<GameTable, GameError> {
    diff.check_complementarity()?;
    let n = diff.n();
    GameTable::from_fn(n, |i, s| {
        if s.action(i) == 0 {
            diff.get(i, s).cloned().unwrap_or_else(Rational::zero)
        } else {
            Rational::zero()
        }
    })
}

/// `D(s) = Σ_i d_i(s)`.
pub fn sum_differences(diff: &DifferenceTable, s: Profile) -> Result<Rational, GameError> {
    let mut total = Rational::zero();
    for i in 0..diff.n() {
        match diff.get(i, s) {
            Some(d) => total += d,
            None => {
                return Err(GameError::PartialProfile {
                    player: i,
                    profile: format!("{}", Bits(s, diff.n())),
                })
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn constant_game_has_zero_differences() {
        let game = GameTable::from_fn(3, |_, _| int(5)).unwrap();
        let diff = differences_from_utilities(&game).unwrap();
        assert!(diff.assigned().all(|(_, _, v)| v.is_zero()));
        assert!(diff.is_complete());
    }

    #[test]
    fn one_player_differences() {
        let game = GameTable::from_fn(1, |_, s| int(s.code() as i64)).unwrap();
        let diff = differences_from_utilities(&game).unwrap();
        assert_eq!(diff.get(0, Profile(0)), Some(&int(-1)));
        assert_eq!(diff.get(0, Profile(1)), Some(&int(1)));
    }

    #[test]
    fn missing_utility_is_named() {
        let mut game = GameTable::binary(2).unwrap();
        for s in 0..4 {
            game.set(0, s, int(0));
            if s != 2 {
                game.set(1, s, int(0));
            }
        }
        assert_eq!(
            differences_from_utilities(&game),
            Err(GameError::MissingUtility {
                player: 1,
                profile: "01".into()
            })
        );
    }

    #[test]
    fn non_binary_game_is_rejected() {
        let game = GameTable::new(vec![3]).unwrap();
        assert_eq!(differences_from_utilities(&game), Err(GameError::NotBinary));
    }

    #[test]
    fn canonical_reconstruction_rule() {
        let mut diff = DifferenceTable::new(1).unwrap();
        diff.assign_edge(0, Profile(0), int(-1)).unwrap();
        let game = utilities_from_differences(&diff).unwrap();
        assert_eq!(game.utility(0, Profile(0)), &int(-1));
        assert_eq!(game.utility(0, Profile(1)), &int(0));

        let empty = DifferenceTable::new(2).unwrap();
        let game = utilities_from_differences(&empty).unwrap();
        assert!(
            Profile::all(2).all(|s| game.utility(0, s).is_zero() && game.utility(1, s).is_zero())
        );
    }

    #[test]
    fn reconstruction_rejects_broken_complementarity() {
        let mut diff = DifferenceTable::new(2).unwrap();
        diff.set_unchecked(1, Profile(0), Some(int(2)));
        diff.set_unchecked(1, Profile(2), Some(int(2)));
        let err = utilities_from_differences(&diff).unwrap_err();
        assert!(matches!(err, GameError::Inconsistent { player: 1, .. }));
    }

    #[test]
    fn assign_edge_refuses_overwrite() {
        let mut diff = DifferenceTable::new(2).unwrap();
        diff.assign_edge(0, Profile(0), int(3)).unwrap();
        assert_eq!(diff.get(0, Profile(1)), Some(&int(-3)));
        assert!(diff.assign_edge(0, Profile(1), int(1)).is_err());
    }

    #[test]
    fn sum_differences_requires_full_profile() {
        let mut diff = DifferenceTable::new(2).unwrap();
        diff.assign_edge(0, Profile(0), ratio(1, 2)).unwrap();
        assert!(matches!(
            sum_differences(&diff, Profile(0)),
            Err(GameError::PartialProfile { player: 1, .. })
        ));
        diff.assign_edge(1, Profile(0), ratio(1, 3)).unwrap();
        assert_eq!(sum_differences(&diff, Profile(0)).unwrap(), ratio(5, 6));
    }

    #[test]
    fn mixed_radix_indexing() {
        let game = GameTable::new(vec![3, 2, 4]).unwrap();
        assert_eq!(game.num_profiles(), 24);
        let idx = game.index_of(&[2, 1, 3]);
        assert_eq!(game.digits(idx), vec![2, 1, 3]);
        assert_eq!(game.label(idx), "213");
        assert_eq!(game.digits(game.deviate(idx, 2, 0)), vec![2, 1, 0]);
    }

    fn random_diff(n: usize, values: &[i64]) -> DifferenceTable {
        let mut diff = DifferenceTable::new(n).unwrap();
        let mut k = 0;
        for s in Profile::all(n) {
            for i in 0..n {
                if s.action(i) == 0 {
                    let v = values[k % values.len()];
                    diff.assign_edge(i, s, ratio(v, 1 + (k as i64 % 5)))
                        .unwrap();
                    k += 1;
                }
            }
        }
        diff
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(n in 1usize..=8, values in prop::collection::vec(-50i64..50, 1..64)) {
            let diff = random_diff(n, &values);
            let game = utilities_from_differences(&diff).unwrap();
            prop_assert_eq!(differences_from_utilities(&game).unwrap(), diff);
        }

        #[test]
        fn complete_tables_sum_to_zero(n in 1usize..=8, values in prop::collection::vec(-50i64..50, 1..64)) {
            let diff = random_diff(n, &values);
            let total: Rational = Profile::all(n).map(|s| sum_differences(&diff, s).unwrap()).sum();
            prop_assert!(total.is_zero());
        }
    }
}
