use serde::Serialize;

use super::AdversaryState;
use crate::game_core::{sum_differences, Bits};
use crate::rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyOutcome {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl PropertyOutcome {
    fn pass() -> Self {
        PropertyOutcome {
            passed: true,
            witness: None,
        }
    }

    fn from_witness(witness: Option<String>) -> Self {
        PropertyOutcome {
            passed: witness.is_none(),
            witness,
        }
    }
}

/// Result of an exhaustive invariant check over the whole cube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    /// Every profile outside `W` is fully assigned with `D(s) = -1`.
    pub p1_outside_live_complete: PropertyOutcome,
    /// Every edge with both endpoints in `W` is unassigned.
    pub p2_live_edges_free: PropertyOutcome,
    /// Every profile outside `W` adjacent to `W` was queried.
    pub p3_boundary_queried: PropertyOutcome,
    /// `d_i(s¬i) = -d_i(s)` wherever assigned.
    pub complementarity: PropertyOutcome,
    /// `D(s) = -1` on every fully assigned profile.
    pub regret_sum_on_f: PropertyOutcome,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes().iter().all(|(_, o)| o.passed)
    }

    pub fn outcomes(&self) -> [(&'static str, &PropertyOutcome); 5] {
        [
            ("P1", &self.p1_outside_live_complete),
            ("P2", &self.p2_live_edges_free),
            ("P3", &self.p3_boundary_queried),
            ("complementarity", &self.complementarity),
            ("D=-1 on F", &self.regret_sum_on_f),
        ]
    }

    /// Names and witnesses of failing properties.
    pub fn failures(&self) -> Vec<String> {
        self.outcomes()
            .iter()
            .filter(|(_, o)| !o.passed)
            .map(|(name, o)| format!("{name}: {}", o.witness.as_deref().unwrap_or("?")))
            .collect()
    }
}

pub(super) fn check(state: &AdversaryState) -> PropertyReport {
    let n = state.n;
    let diff = &state.diff;
    let live = &state.live;
    let minus_one = -rational::one();

    let mut p1 = None;
    let mut p2 = None;
    let mut p3 = None;
    let mut regret = None;
    for s in crate::game_core::Profile::all(n) {
        let label = || Bits(s, n).to_string();
        if live.contains(s) {
            if p2.is_none() {
                for i in 0..n {
                    let t = s.flip(i);
                    if live.contains(t) && (diff.is_assigned(i, s) || diff.is_assigned(i, t)) {
                        p2 = Some(format!(
                            "edge ({}, {}) along player index {i}",
                            label(),
                            Bits(t, n)
                        ));
                        break;
                    }
                }
            }
            continue;
        }
        match sum_differences(diff, s) {
            Ok(total) => {
                if total != minus_one {
                    let w = format!("D({}) = {}", label(), rational::Exact(&total));
                    if regret.is_none() {
                        regret = Some(w.clone());
                    }
                    if p1.is_none() {
                        p1 = Some(w);
                    }
                }
            }
            Err(e) => {
                if p1.is_none() {
                    p1 = Some(e.to_string());
                }
            }
        }
        if p3.is_none() && (0..n).any(|i| live.contains(s.flip(i))) && !state.queries.contains(&s) {
            p3 = Some(format!("{} borders W but was never queried", label()));
        }
    }

    let complementarity = match diff.check_complementarity() {
        Ok(()) => PropertyOutcome::pass(),
        Err(e) => PropertyOutcome::from_witness(Some(e.to_string())),
    };
    PropertyReport {
        p1_outside_live_complete: PropertyOutcome::from_witness(p1),
        p2_live_edges_free: PropertyOutcome::from_witness(p2),
        p3_boundary_queried: PropertyOutcome::from_witness(p3),
        complementarity,
        regret_sum_on_f: PropertyOutcome::from_witness(regret),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::Profile;
    use crate::rational::int;

    #[test]
    fn broken_complementarity_is_reported() {
        let mut adv = AdversaryState::new(4).unwrap();
        adv.process_query(Profile(0)).unwrap();
        adv.diff_mut().set_unchecked(0, Profile(0), Some(int(5)));
        let report = adv.check_properties();
        assert!(!report.complementarity.passed);
        let witness = report.complementarity.witness.unwrap();
        assert!(
            witness.contains("0000") && witness.contains("1000"),
            "{witness}"
        );
        // D(0000) moved off -1 as well.
        assert!(!report.regret_sum_on_f.passed);
    }

    #[test]
    fn p2_violation_is_reported() {
        let mut adv = AdversaryState::new(3).unwrap();
        adv.diff_mut().assign_edge(1, Profile(0), int(0)).unwrap();
        let report = adv.check_properties();
        assert!(!report.p2_live_edges_free.passed);
        assert!(report.p1_outside_live_complete.passed);
        assert_eq!(report.failures().len(), 1);
    }

    #[test]
    fn properties_hold_along_a_run() {
        let mut adv = AdversaryState::new(6).unwrap();
        for code in [0u64, 63, 21, 42, 7] {
            adv.process_query(Profile(code)).unwrap();
            let report = adv.check_properties();
            assert!(report.all_passed(), "{:?}", report.failures());
        }
    }
}
