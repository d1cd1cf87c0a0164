use serde::Serialize;

use super::querier::Querier;
use super::DynamicsError;
use crate::adversary::{AdversaryError, AdversaryState, FinalCase, FinalRecord, Transcript};
use crate::game_core::{constraint_value, is_correlated_equilibrium, Certificate, Profile};
use crate::rational::Rational;

/// Outcome of one querier-vs-adversary run.
#[derive(Debug, Clone, Serialize)]
pub struct DuelResult {
    pub querier: String,
    pub n: usize,
    pub budget: usize,
    pub queries_used: usize,
    /// Distinct live queries the adversary had to answer.
    pub live_queries: usize,
    pub case_taken: Option<u8>,
    /// Case-1 tree root, as a bitstring.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    pub certificate: Option<Certificate>,
    pub verifier_agreement: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript_path: Option<String>,
    #[serde(skip)]
    pub transcript: Transcript,
    #[serde(skip)]
    pub completed_diff: Option<crate::game_core::DifferenceTable>,
}

/// Plays `querier` against a fresh adversary for `budget` queries, then
/// finalizes against its output and cross-checks the certificate with the
/// CE verifier.
///
/// A guarantee failure (possible only outside `n >= 6`, budget
/// `<= max_budget(n)`) is reported in the result, not as an error.
pub fn run_duel(
    querier: &dyn Querier,
    n: usize,
    budget: usize,
) -> Result<DuelResult, DynamicsError> {
    let mut adversary = AdversaryState::new(n)?;
    let mut history: Vec<(Profile, Vec<Rational>)> = Vec::with_capacity(budget);
    let mut transcript = Transcript::default();
    for _ in 0..budget {
        let s = querier.next_query(n, &history);
        if !s.is_valid(n) {
            return Err(DynamicsError::InvalidQuery {
                querier: querier.name().into(),
                code: s.code(),
            });
        }
        let response = adversary.process_query(s)?;
        transcript.push_query(n, &response);
        history.push((s, response.utilities));
    }

    let x = querier.output_distribution(n, &history);
    if x.n() != n || x.iter().any(|(k, _)| !Profile(k).is_valid(n)) {
        return Err(DynamicsError::InvalidDistribution(format!(
            "querier {} submitted a distribution outside the {n}-cube",
            querier.name()
        )));
    }

    let mut result = DuelResult {
        querier: querier.name().into(),
        n,
        budget,
        queries_used: history.len(),
        live_queries: adversary.queries().len(),
        case_taken: None,
        root: None,
        certificate: None,
        verifier_agreement: false,
        failure: None,
        transcript_path: None,
        transcript,
        completed_diff: None,
    };
    match adversary.finalize(&x) {
        Ok(fin) => {
            let verdict = is_correlated_equilibrium(&fin.game, &x)?;
            let recomputed = constraint_value(
                &fin.game,
                &x,
                fin.certificate.player,
                fin.certificate.action,
            )?;
            result.verifier_agreement = match verdict.certificate() {
                Some(found) => {
                    recomputed == fin.certificate.value && found.value <= fin.certificate.value
                }
                None => false,
            };
            if let FinalCase::RegretSumRoot { root } = fin.case {
                result.root = Some(root.bitstring(n));
            }
            result.case_taken = Some(fin.case.number());
            result.transcript.final_record = Some(FinalRecord::new(&fin));
            result.certificate = Some(fin.certificate);
            result.completed_diff = Some(adversary.diff().clone());
        }
        Err(AdversaryError::GuaranteeViolation(msg)) => result.failure = Some(msg),
        Err(e) => return Err(e.into()),
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::max_budget;
    use crate::dynamics::querier::{builtin_queriers, Lexicographic, Scatter};

    #[test]
    fn lexicographic_single_query() {
        let r = run_duel(&Lexicographic, 6, 1).unwrap();
        assert!(r.verifier_agreement);
        assert!(r.certificate.is_some());
        assert_eq!(r.queries_used, 1);
        assert_eq!(r.transcript.queries.len(), 1);
    }

    #[test]
    fn uniform_blind_output_takes_case_two() {
        let r = run_duel(&Scatter::default(), 6, 0).unwrap();
        assert_eq!(r.case_taken, Some(2));
        assert!(r.verifier_agreement);
        assert_eq!(r.certificate.unwrap().value, crate::rational::int(-6));
    }

    #[test]
    fn all_builtins_at_budget_small_n() {
        for q in builtin_queriers() {
            for n in [6, 8] {
                let r = run_duel(q.as_ref(), n, max_budget(n)).unwrap();
                assert!(r.verifier_agreement, "{} n={n}: {:?}", q.name(), r.failure);
            }
        }
    }

    #[test]
    fn replay_is_byte_identical() {
        for q in builtin_queriers() {
            let a = run_duel(q.as_ref(), 8, 3).unwrap();
            let b = run_duel(q.as_ref(), 8, 3).unwrap();
            assert_eq!(a.transcript.to_json_lines(), b.transcript.to_json_lines());
        }
    }
}
