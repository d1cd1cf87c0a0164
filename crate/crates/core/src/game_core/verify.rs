use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Bits, DifferenceTable, Distribution, GameError, GameTable, Profile};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    /// A directly evaluated instance of the CE inequality.
    DefinitionViolation,
    /// Derived from a negative expected regret sum `E[D] < 0`.
    Remark1,
}

/// A violated CE constraint: `Σ_{s_-p} d_p(a, s_-p) · x(a, s_-p) = value < 0`.
///
/// Serialized with a 1-based `player`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CertificateRepr", into = "CertificateRepr")]
pub struct Certificate {
    pub player: usize,
    pub action: u8,
    pub value: Rational,
    pub kind: CertificateKind,
}

#[derive(Serialize, Deserialize)]
struct CertificateRepr {
    player: usize,
    action: u8,
    #[serde(with = "rational::serde_str")]
    value: Rational,
    kind: CertificateKind,
}

impl From<Certificate> for CertificateRepr {
    fn from(c: Certificate) -> Self {
        CertificateRepr {
            player: c.player + 1,
            action: c.action,
            value: c.value,
            kind: c.kind,
        }
    }
}

impl TryFrom<CertificateRepr> for Certificate {
    type Error = String;

    fn try_from(r: CertificateRepr) -> Result<Self, String> {
        if r.player == 0 || r.action > 1 {
            return Err("certificate player is 1-based and action is 0 or 1".into());
        }
        Ok(Certificate {
            player: r.player - 1,
            action: r.action,
            value: r.value,
            kind: r.kind,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equilibrium,
    Violation(Certificate),
}

impl Verdict {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, Verdict::Equilibrium)
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Equilibrium => None,
            Verdict::Violation(c) => Some(c),
        }
    }
}

/// A profitable fixed deviation: `E[u_p(deviation, s_-p)] - E[u_p(s)] = gain > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CceViolation {
    pub player: usize,
    pub deviation: usize,
    pub gain: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CceVerdict {
    Equilibrium,
    Violation(CceViolation),
}

impl CceVerdict {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, CceVerdict::Equilibrium)
    }
}

fn check_binary_pair(game: &GameTable, sigma: &Distribution) -> Result<(), GameError> {
    if !game.is_binary() {
        return Err(GameError::NotBinary);
    }
    game.check_complete()?;
    sigma.check_indices(game.n(), game.num_profiles())
}

/// Picks the most negative entry; ties go to the smaller player, then to
/// action 0.
fn most_negative(values: Vec<[Rational; 2]>, kind: CertificateKind) -> Option<Certificate> {
    let mut best: Option<Certificate> = None;
    for (player, pair) in values.into_iter().enumerate() {
        for (action, value) in pair.into_iter().enumerate() {
            let better = match &best {
                None => value.is_negative(),
                Some(b) => value < b.value,
            };
            if better {
                best = Some(Certificate {
                    player,
                    action: action as u8,
                    value,
                    kind,
                });
            }
        }
    }
    best
}

/// Left-hand side of the CE constraint for `(player, action)`.
pub fn constraint_value(
    game: &GameTable,
    sigma: &Distribution,
    player: usize,
    action: u8,
) -> Result<Rational, GameError> {
    check_binary_pair(game, sigma)?;
    if player >= game.n() {
        return Err(GameError::DimensionMismatch {
            expected: format!("player index < {}", game.n()),
            found: player.to_string(),
        });
    }
    let mut total = Rational::zero();
    for (code, p) in sigma.iter() {
        let s = Profile(code);
        if s.action(player) == action {
            let d = game.utility(player, s) - game.utility(player, s.flip(player));
            total += d * p;
        }
    }
    Ok(total)
}

/// Exact check of all `2n` CE inequalities.
///
/// Returns the most negative violated constraint as the certificate.
pub fn is_correlated_equilibrium(
    game: &GameTable,
    sigma: &Distribution,
) -> Result<Verdict, GameError> {
    check_binary_pair(game, sigma)?;
    let n = game.n();
    let mut values = vec![[Rational::zero(), Rational::zero()]; n];
    for (code, p) in sigma.iter() {
        let s = Profile(code);
        for (i, pair) in values.iter_mut().enumerate() {
            let d = game.utility(i, s) - game.utility(i, s.flip(i));
            pair[s.action(i) as usize] += d * p;
        }
    }
    Ok(
        match most_negative(values, CertificateKind::DefinitionViolation) {
            Some(c) => Verdict::Violation(c),
            None => Verdict::Equilibrium,
        },
    )
}

/// `gains[i][k] = E[u_i(k, s_-i)] - E[u_i(s)]` for every player and fixed
/// deviation. Works for any number of actions per player.
pub fn coarse_ce_gains(
    game: &GameTable,
    sigma: &Distribution,
) -> Result<Vec<Vec<Rational>>, GameError> {
    game.check_complete()?;
    sigma.check_indices(game.n(), game.num_profiles())?;
    let mut gains: Vec<Vec<Rational>> = game
        .actions()
        .iter()
        .map(|&m| vec![Rational::zero(); m])
        .collect();
    for (index, p) in sigma.iter() {
        let index = index as usize;
        for (i, row) in gains.iter_mut().enumerate() {
            let current = game.get(i, index).expect("complete");
            for (k, gain) in row.iter_mut().enumerate() {
                let deviated = game.get(i, game.deviate(index, i, k)).expect("complete");
                *gain += (deviated - current) * p;
            }
        }
    }
    Ok(gains)
}

/// Exact coarse correlated equilibrium check.
///
/// Reports the largest gain; ties go to the smaller player, then the smaller
/// deviation.
pub fn is_coarse_ce(game: &GameTable, sigma: &Distribution) -> Result<CceVerdict, GameError> {
    let gains = coarse_ce_gains(game, sigma)?;
    let mut best: Option<CceViolation> = None;
    for (player, row) in gains.into_iter().enumerate() {
        for (deviation, gain) in row.into_iter().enumerate() {
            let better = match &best {
                None => gain.is_positive(),
                Some(b) => gain > b.gain,
            };
            if better {
                best = Some(CceViolation {
                    player,
                    deviation,
                    gain,
                });
            }
        }
    }
    Ok(match best {
        Some(v) => CceVerdict::Violation(v),
        None => CceVerdict::Equilibrium,
    })
}

/// Certificate from a negative expected regret sum.
///
/// Returns `None` when `E_σ[D] ≥ 0`. Otherwise `E_σ[D]` splits into the
/// `2n` constraint values, at least one of which is negative; the most
/// negative one is returned.
pub fn remark1_certificate(
    diff: &DifferenceTable,
    sigma: &Distribution,
) -> Result<Option<Certificate>, GameError> {
    let n = diff.n();
    sigma.check_indices(n, 1 << n)?;
    let mut values = vec![[Rational::zero(), Rational::zero()]; n];
    let mut expected_sum = Rational::zero();
    for (code, p) in sigma.iter() {
        let s = Profile(code);
        for (i, pair) in values.iter_mut().enumerate() {
            let d = diff.get(i, s).ok_or_else(|| GameError::PartialProfile {
                player: i,
                profile: Bits(s, n).to_string(),
            })?;
            let term = d * p;
            expected_sum += &term;
            pair[s.action(i) as usize] += term;
        }
    }
    if !expected_sum.is_negative() {
        return Ok(None);
    }
    let cert = most_negative(values, CertificateKind::Remark1)
        .expect("a negative total has a negative summand");
    Ok(Some(cert))
}
