use num_traits::{One, Signed};

use super::{assign_bottom_up, AdversaryError, AdversaryState, RegionSizes};
use crate::game_core::{
    constraint_value, is_correlated_equilibrium, remark1_certificate, utilities_from_differences,
    Bits, Certificate, CertificateKind, Distribution, GameTable, Profile,
};
use crate::hypercube;
use crate::rational::{int, ratio, Rational};

/// Which completion rule defeated the submitted distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalCase {
    /// Little mass on untouched profiles: every live profile except `root`
    /// gets `D = -1`, so `E_x[D] < 0`.
    RegretSumRoot { root: Profile },
    /// At least 1/6 of the mass on untouched profiles: `player` is punished
    /// by `-12·M'` for playing `action` there.
    DominatedAction { player: usize, action: u8 },
}

impl FinalCase {
    pub fn number(&self) -> u8 {
        match self {
            FinalCase::RegretSumRoot { .. } => 1,
            FinalCase::DominatedAction { .. } => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Finalization {
    pub case: FinalCase,
    pub game: GameTable,
    pub certificate: Certificate,
    /// Region sizes at the end of the query phase.
    pub regions: RegionSizes,
}

fn violation(msg: impl Into<String>) -> AdversaryError {
    AdversaryError::GuaranteeViolation(msg.into())
}

impl AdversaryState {
    /// Completes the game against the submitted distribution `x`.
    ///
    /// Case 1 (`x(N) ≤ 1/6`): pick the untouched profile `v` of least mass
    /// (ties to the smallest code), span `W` from `v` and run the same
    /// leaves-to-root pass, leaving `D(v) = 2^n - 1` and `D = -1` elsewhere.
    /// The certificate comes from the negative expected regret sum.
    ///
    /// Case 2 (`x(N) > 1/6`): for player 1 pick the action `j` carrying more
    /// untouched mass (ties to 0) and set `d_1(s) = -12·max(M, 1)` on the
    /// untouched profiles playing `j`; everything still unassigned becomes 0.
    ///
    /// Either way the completed game is checked with the independent CE
    /// verifier before returning. On error the state is left untouched.
    pub fn finalize(&mut self, x: &Distribution) -> Result<Finalization, AdversaryError> {
        if self.finalized {
            return Err(AdversaryError::Finalized);
        }
        let n = self.n;
        if x.n() != n {
            return Err(crate::game_core::GameError::DimensionMismatch {
                expected: format!("{n} players"),
                found: format!("{} players", x.n()),
            }
            .into());
        }
        if let Some((k, _)) = x.iter().last() {
            if !Profile(k).is_valid(n) {
                return Err(AdversaryError::InvalidProfile(k, n));
            }
        }
        if self.queries.len() > super::max_budget(n) || n < 6 {
            log::warn!(
                "finalizing outside the guaranteed regime (n = {n}, {} queries, budget {})",
                self.queries.len(),
                super::max_budget(n)
            );
        }

        let split = self.region_split();
        let regions = split.sizes();
        let untouched_mass = x.mass(|s| split.untouched.contains(s));
        let mut diff = self.diff.clone();
        let mut max_assigned = self.max_assigned.clone();

        let (case, certificate) = if untouched_mass <= ratio(1, 6) {
            let pool = if split.untouched.is_empty() {
                &self.live
            } else {
                &split.untouched
            };
            let root = pool
                .iter()
                .min_by(|a, b| x.prob(a.code()).cmp(&x.prob(b.code())))
                .ok_or_else(|| violation("live region is empty"))?;
            let tree = hypercube::spanning_tree(&self.live, root, n)?;
            let mut log = Vec::new();
            assign_bottom_up(&mut diff, &tree, &mut max_assigned, &mut log)?;
            diff.fill_unassigned_with_zero();
            let cert = remark1_certificate(&diff, x)?.ok_or_else(|| {
                violation(format!(
                    "E[D] is not negative with root {} of mass {}",
                    Bits(root, n),
                    x.prob(root.code())
                ))
            })?;
            (FinalCase::RegretSumRoot { root }, cert)
        } else {
            let player = 0;
            let mass_of = |a: u8| x.mass(|s| split.untouched.contains(s) && s.action(player) == a);
            let action = if mass_of(0) >= mass_of(1) { 0 } else { 1 };
            let m = if max_assigned.is_positive() {
                max_assigned.clone()
            } else {
                Rational::one()
            };
            let penalty = -(int(12) * m);
            for s in split
                .untouched
                .iter()
                .filter(|s| s.action(player) == action)
            {
                diff.assign_edge(player, s, penalty.clone())
                    .map_err(|e| violation(format!("untouched edge already assigned: {e}")))?;
            }
            diff.fill_unassigned_with_zero();
            let value: Rational = x
                .iter()
                .filter(|(k, _)| Profile(*k).action(player) == action)
                .map(|(k, p)| diff.get(player, Profile(k)).expect("complete") * p)
                .sum();
            if !value.is_negative() {
                return Err(violation(format!(
                    "punished action has constraint value {value}"
                )));
            }
            let cert = Certificate {
                player,
                action,
                value,
                kind: CertificateKind::DefinitionViolation,
            };
            (FinalCase::DominatedAction { player, action }, cert)
        };

        let game = utilities_from_differences(&diff)?;
        let verdict = is_correlated_equilibrium(&game, x)?;
        let found = verdict
            .certificate()
            .ok_or_else(|| violation("verifier accepts the submitted distribution"))?;
        let recomputed = constraint_value(&game, x, certificate.player, certificate.action)?;
        if recomputed != certificate.value || found.value > certificate.value {
            return Err(violation(format!(
                "verifier disagrees with certificate: recomputed {recomputed}, verifier {}",
                found.value
            )));
        }

        self.diff = diff;
        self.max_assigned = max_assigned;
        self.finalized = true;
        Ok(Finalization {
            case,
            game,
            certificate,
            regions,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::{differences_from_utilities, sum_differences};
    use crate::rational::pow2;

    #[test]
    fn point_mass_without_queries_takes_case_two() {
        let mut adv = AdversaryState::new(6).unwrap();
        let x = Distribution::point_mass(6, Profile(0));
        let fin = adv.finalize(&x).unwrap();
        assert_eq!(
            fin.case,
            FinalCase::DominatedAction {
                player: 0,
                action: 0
            }
        );
        assert_eq!(fin.certificate.value, int(-12));
        assert_eq!(adv.diff().get(0, Profile(0)), Some(&int(-12)));
        assert_eq!(adv.diff().get(0, Profile(1)), Some(&int(12)));
        assert!(adv.is_finalized());
        assert_eq!(adv.finalize(&x).unwrap_err(), AdversaryError::Finalized);
    }

    #[test]
    fn point_mass_on_the_queried_profile_takes_case_one() {
        let mut adv = AdversaryState::new(6).unwrap();
        adv.process_query(Profile(0)).unwrap();
        let x = Distribution::point_mass(6, Profile(0));
        let fin = adv.finalize(&x).unwrap();
        let FinalCase::RegretSumRoot { root } = fin.case else {
            panic!("expected case 1, got {:?}", fin.case);
        };
        assert!(fin.certificate.value <= int(-1));
        assert_eq!(fin.certificate.kind, CertificateKind::Remark1);

        let diff = adv.diff();
        assert!(diff.is_complete());
        assert_eq!(differences_from_utilities(&fin.game).unwrap(), *diff);
        let mut total = int(0);
        for s in Profile::all(6) {
            let d = sum_differences(diff, s).unwrap();
            if s == root {
                assert_eq!(d, pow2(6) - int(1));
            } else {
                assert_eq!(d, int(-1));
            }
            total += d;
        }
        assert_eq!(total, int(0));
        assert!(remark1_certificate(diff, &x).unwrap().is_some());
    }

    #[test]
    fn uniform_without_queries_takes_case_two() {
        let mut adv = AdversaryState::new(6).unwrap();
        let x = Distribution::uniform_all(6);
        let fin = adv.finalize(&x).unwrap();
        assert_eq!(fin.case.number(), 2);
        // Half the mass plays action 0 and each of those profiles has d_1 = -12.
        assert_eq!(fin.certificate.value, int(-6));
        assert!(fin.certificate.value < ratio(11, 12) - int(1));
    }

    #[test]
    fn case_two_scales_with_the_largest_assigned_value() {
        let mut adv = AdversaryState::new(8).unwrap();
        for code in [0u64, 255, 15] {
            adv.process_query(Profile(code)).unwrap();
        }
        let m = adv.max_assigned().clone();
        let untouched = adv.region_split().untouched;
        let x = Distribution::uniform(8, untouched.iter()).unwrap();
        let fin = adv.finalize(&x).unwrap();
        let FinalCase::DominatedAction { player, action } = fin.case else {
            panic!("expected case 2");
        };
        let s = untouched
            .iter()
            .find(|s| s.action(player) == action)
            .unwrap();
        assert_eq!(adv.diff().get(player, s), Some(&(-(int(12) * m))));
    }

    #[test]
    fn rejects_mismatched_distribution() {
        let mut adv = AdversaryState::new(6).unwrap();
        let x = Distribution::point_mass(5, Profile(0));
        assert!(matches!(adv.finalize(&x), Err(AdversaryError::Game(_))));
        assert!(!adv.is_finalized());
    }
}
