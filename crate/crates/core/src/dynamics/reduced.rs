//! The reduced problem: given weights `y ≥ 0, y ≠ 0`, find a profile with
//! `Σ_i y_i d_i(s) > 0`.
//!
//! Against a completed adversarial table the Case-1 root answers it; the
//! necessity check asks whether the querier's own view, the differences
//! fixed by the transcript, already contained such a profile.

use num_traits::{Signed, Zero};

use super::DynamicsError;
use crate::adversary::Transcript;
use crate::game_core::{DifferenceTable, Profile};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedInstance {
    y: Vec<Rational>,
    diff: DifferenceTable,
}

fn check_weights(n: usize, y: &[Rational]) -> Result<(), DynamicsError> {
    if y.len() != n {
        return Err(DynamicsError::InvalidWeights(format!(
            "expected {n} weights, got {}",
            y.len()
        )));
    }
    if y.iter().any(Signed::is_negative) {
        return Err(DynamicsError::InvalidWeights(
            "weights must be non-negative".into(),
        ));
    }
    if y.iter().all(Zero::is_zero) {
        return Err(DynamicsError::InvalidWeights(
            "weights must not all be zero".into(),
        ));
    }
    Ok(())
}

fn weighted(y: &[Rational], diff: &DifferenceTable, s: Profile) -> Option<Rational> {
    let mut total = Rational::zero();
    for (i, w) in y.iter().enumerate() {
        total += w * diff.get(i, s)?;
    }
    Some(total)
}

impl ReducedInstance {
    pub fn new(y: Vec<Rational>, diff: DifferenceTable) -> Result<Self, DynamicsError> {
        check_weights(diff.n(), &y)?;
        if !diff.is_complete() {
            return Err(DynamicsError::InvalidWeights(
                "reduced instance needs a complete difference table".into(),
            ));
        }
        Ok(ReducedInstance { y, diff })
    }

    pub fn y(&self) -> &[Rational] {
        &self.y
    }

    pub fn diff(&self) -> &DifferenceTable {
        &self.diff
    }

    pub fn value(&self, s: Profile) -> Rational {
        weighted(&self.y, &self.diff, s).expect("complete table")
    }
}

/// Smallest-code profile with a positive weighted difference sum.
pub fn solve_reduced(instance: &ReducedInstance) -> Option<Profile> {
    Profile::all(instance.diff.n()).find(|&s| instance.value(s).is_positive())
}

/// True iff no profile whose differences are all known has a positive
/// weighted sum, i.e. the partial table alone does not solve the reduced
/// problem.
pub fn reduced_necessity_check_table(
    diff: &DifferenceTable,
    y: &[Rational],
) -> Result<bool, DynamicsError> {
    check_weights(diff.n(), y)?;
    Ok(Profile::all(diff.n())
        .filter_map(|s| weighted(y, diff, s))
        .all(|v| !v.is_positive()))
}

/// [`reduced_necessity_check_table`] on the differences a transcript fixed
/// before finalization. An empty transcript trivially passes.
pub fn reduced_necessity_check(
    transcript: &Transcript,
    y: &[Rational],
) -> Result<bool, DynamicsError> {
    match transcript.known_differences()? {
        Some(diff) => reduced_necessity_check_table(&diff, y),
        None => Ok(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::AdversaryState;
    use crate::game_core::Distribution;
    use crate::rational::int;

    #[test]
    fn weights_validated() {
        let diff = DifferenceTable::new(2).unwrap();
        assert!(reduced_necessity_check_table(&diff, &[int(0), int(0)]).is_err());
        assert!(reduced_necessity_check_table(&diff, &[int(-1), int(2)]).is_err());
        assert!(reduced_necessity_check_table(&diff, &[int(1)]).is_err());
        assert!(reduced_necessity_check_table(&diff, &[int(1), int(0)]).unwrap());
    }

    #[test]
    fn partial_view_never_solves_but_completion_does() {
        let mut adv = AdversaryState::new(6).unwrap();
        let mut tr = Transcript::default();
        for code in [0, 63] {
            let r = adv.process_query(Profile(code)).unwrap();
            tr.push_query(6, &r);
        }
        let ones = vec![int(1); 6];
        assert!(reduced_necessity_check(&tr, &ones).unwrap());
        let fin = adv
            .finalize(&Distribution::point_mass(6, Profile(0)))
            .unwrap();
        assert_eq!(fin.case.number(), 1);
        let inst = ReducedInstance::new(ones, adv.diff().clone()).unwrap();
        let root = solve_reduced(&inst).unwrap();
        assert_eq!(inst.value(root), int(63));
    }

    #[test]
    fn detects_a_solving_profile() {
        let mut diff = DifferenceTable::new(2).unwrap();
        diff.assign_edge(0, Profile(0), int(2)).unwrap();
        diff.assign_edge(1, Profile(0), int(-1)).unwrap();
        assert!(!reduced_necessity_check_table(&diff, &[int(1), int(1)]).unwrap());
        assert!(reduced_necessity_check_table(&diff, &[int(1), int(3)]).unwrap());
    }
}
