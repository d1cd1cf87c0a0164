use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{GameError, Profile};
use crate::rational::{int, Rational};

/// Exact probability distribution over profiles with explicit support.
///
/// Keys are profile indices (the [`Profile`] code for binary games, the
/// mixed-radix index otherwise). Every stored probability is strictly
/// positive and the total is exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    n: usize,
    support: BTreeMap<u64, Rational>,
}

impl Distribution {
    /// Zero entries are dropped; negative entries or a total other than one
    /// are rejected.
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = (u64, Rational)>,
    ) -> Result<Self, GameError> {
        let mut support: BTreeMap<u64, Rational> = BTreeMap::new();
        for (k, p) in entries {
            if p.is_negative() {
                return Err(GameError::InvalidDistribution(format!(
                    "negative probability at index {k}"
                )));
            }
            *support.entry(k).or_insert_with(Rational::zero) += p;
        }
        support.retain(|_, p| !p.is_zero());
        let total: Rational = support.values().sum();
        if !total.is_one() {
            return Err(GameError::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Distribution { n, support })
    }

    pub fn point_mass(n: usize, s: Profile) -> Self {
        Distribution {
            n,
            support: BTreeMap::from([(s.code(), Rational::one())]),
        }
    }

    /// Uniform over the given profiles (duplicates collapse).
    pub fn uniform(
        n: usize,
        profiles: impl IntoIterator<Item = Profile>,
    ) -> Result<Self, GameError> {
        let codes: std::collections::BTreeSet<u64> =
            profiles.into_iter().map(Profile::code).collect();
        if codes.is_empty() {
            return Err(GameError::InvalidDistribution("empty support".into()));
        }
        let p = Rational::one() / int(codes.len() as i64);
        Ok(Distribution {
            n,
            support: codes.into_iter().map(|c| (c, p.clone())).collect(),
        })
    }

    pub fn uniform_all(n: usize) -> Self {
        Self::uniform(n, Profile::all(n)).expect("hypercube is nonempty")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prob(&self, index: u64) -> Rational {
        self.support
            .get(&index)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> + '_ {
        self.support.iter().map(|(k, p)| (*k, p))
    }

    /// Total probability of the profiles for which `pred` holds.
    pub fn mass(&self, mut pred: impl FnMut(Profile) -> bool) -> Rational {
        self.support
            .iter()
            .filter(|(k, _)| pred(Profile(**k)))
            .map(|(_, p)| p)
            .sum()
    }

    pub(crate) fn check_indices(&self, n: usize, num_profiles: usize) -> Result<(), GameError> {
        if self.n != n {
            return Err(GameError::DimensionMismatch {
                expected: format!("{n} players"),
                found: format!("{} players", self.n),
            });
        }
        if let Some((&k, _)) = self.support.iter().next_back() {
            if k as usize >= num_profiles {
                return Err(GameError::DimensionMismatch {
                    expected: format!("profile index < {num_profiles}"),
                    found: k.to_string(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn rejects_bad_totals_and_signs() {
        assert!(Distribution::new(1, [(0, ratio(1, 2))]).is_err());
        assert!(Distribution::new(1, [(0, ratio(3, 2)), (1, ratio(-1, 2))]).is_err());
        let d = Distribution::new(1, [(0, ratio(1, 2)), (1, ratio(1, 2)), (1, int(0))]).unwrap();
        assert_eq!(d.support_size(), 2);
    }

    #[test]
    fn zero_entries_leave_the_support() {
        let d = Distribution::new(2, [(0, int(1)), (3, int(0))]).unwrap();
        assert_eq!(d.support_size(), 1);
        assert_eq!(d.prob(3), int(0));
    }

    #[test]
    fn uniform_mass() {
        let d = Distribution::uniform_all(3);
        assert_eq!(d.mass(|s| s.action(0) == 0), ratio(1, 2));
        assert!(Distribution::uniform(3, []).is_err());
    }
}
