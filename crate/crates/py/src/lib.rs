//! Python bindings for `ce-adversary`.
//!
//! Rationals cross the boundary as `fractions.Fraction`; profiles are
//! accepted either as integer codes (bit `i` is player `i + 1`'s action) or
//! as bitstrings listing player 1 first. Players are 1-based in
//! certificates, 0-based in method arguments.

use std::fmt::Display;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ce_adversary::adversary::{self, AdversaryState, FinalCase, FinalRecord, Transcript};
use ce_adversary::dynamics;
use ce_adversary::game_core::io::{DistributionFile, GameFile};
use ce_adversary::game_core::{self, GameTable, Profile};
use ce_adversary::hypercube::{self, VertexSet};
use ce_adversary::lp_ce;
use ce_adversary::Rational;

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[derive(FromPyObject)]
enum ProfileArg {
    Code(u64),
    Label(String),
}

fn resolve(n: usize, arg: ProfileArg) -> PyResult<Profile> {
    let s = match arg {
        ProfileArg::Code(c) => Profile(c),
        ProfileArg::Label(label) => {
            if label.len() != n {
                return Err(value_err(format!(
                    "profile {label:?} has the wrong length for n = {n}"
                )));
            }
            Profile::parse_bitstring(&label).map_err(value_err)?
        }
    };
    if !s.is_valid(n) {
        return Err(value_err(format!(
            "profile code {} is outside the {n}-cube",
            s.code()
        )));
    }
    Ok(s)
}

/// A game with binary actions, utilities indexed `[player][profile code]`.
#[pyclass(module = "ce_adversary_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Game {
    inner: GameTable,
}

#[pymethods]
impl Game {
    #[new]
    fn new(utilities: Vec<Vec<Rational>>) -> PyResult<Self> {
        let n = utilities.len();
        if n == 0 || utilities.iter().any(|row| row.len() != 1 << n) {
            return Err(value_err("need n rows of 2^n utilities"));
        }
        let inner =
            GameTable::from_fn(n, |i, s| utilities[i][s.index()].clone()).map_err(value_err)?;
        Ok(Game { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: GameFile = serde_json::from_str(text).map_err(value_err)?;
        let inner = file.to_game().map_err(value_err)?;
        if !inner.is_binary() {
            return Err(value_err("only binary-action games are supported"));
        }
        Ok(Game { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&GameFile::from_game(&self.inner)).expect("games serialize")
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn utility(&self, player: usize, profile: ProfileArg) -> PyResult<Rational> {
        let n = self.inner.n();
        if player >= n {
            return Err(value_err(format!("player {player} out of range")));
        }
        Ok(self.inner.utility(player, resolve(n, profile)?).clone())
    }

    /// Unilateral differences `d_i(s)`, indexed `[profile code][player]`.
    fn differences(&self) -> PyResult<Vec<Vec<Rational>>> {
        let diff = game_core::differences_from_utilities(&self.inner).map_err(value_err)?;
        Ok(Profile::all(diff.n())
            .map(|s| {
                (0..diff.n())
                    .map(|i| diff.get(i, s).cloned().unwrap_or_default())
                    .collect()
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Game(n={})", self.inner.n())
    }
}

/// A probability distribution over profiles.
#[pyclass(module = "ce_adversary_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Distribution {
    inner: game_core::Distribution,
}

#[pymethods]
impl Distribution {
    /// `support` maps profiles (codes or bitstrings) to probabilities.
    #[new]
    fn new(n: usize, support: &Bound<'_, PyDict>) -> PyResult<Self> {
        let mut entries = Vec::with_capacity(support.len());
        for (k, v) in support.iter() {
            let s = resolve(n, k.extract::<ProfileArg>()?)?;
            entries.push((s.code(), v.extract::<Rational>()?));
        }
        let inner = game_core::Distribution::new(n, entries).map_err(value_err)?;
        Ok(Distribution { inner })
    }

    #[staticmethod]
    fn uniform(n: usize) -> Self {
        Distribution {
            inner: game_core::Distribution::uniform_all(n),
        }
    }

    #[staticmethod]
    fn point_mass(n: usize, profile: ProfileArg) -> PyResult<Self> {
        Ok(Distribution {
            inner: game_core::Distribution::point_mass(n, resolve(n, profile)?),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: DistributionFile = serde_json::from_str(text).map_err(value_err)?;
        Ok(Distribution {
            inner: file.to_distribution().map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&DistributionFile::from_distribution(&self.inner))
            .expect("distributions serialize")
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn prob(&self, profile: ProfileArg) -> PyResult<Rational> {
        Ok(self.inner.prob(resolve(self.inner.n(), profile)?.code()))
    }

    /// Bitstring to probability, in profile-code order.
    fn support(&self) -> Vec<(String, Rational)> {
        let n = self.inner.n();
        self.inner
            .iter()
            .map(|(k, p)| (Profile(k).bitstring(n), p.clone()))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.support_size()
    }

    fn __repr__(&self) -> String {
        format!(
            "Distribution(n={}, support={})",
            self.inner.n(),
            self.inner.support_size()
        )
    }
}

/// Evidence that a distribution is not a correlated equilibrium: the
/// constraint value for (player, action) is negative.
#[pyclass(module = "ce_adversary_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Certificate {
    inner: game_core::Certificate,
}

#[pymethods]
impl Certificate {
    /// 1-based player index.
    #[getter]
    fn player(&self) -> usize {
        self.inner.player + 1
    }

    #[getter]
    fn action(&self) -> u8 {
        self.inner.action
    }

    #[getter]
    fn value(&self) -> Rational {
        self.inner.value.clone()
    }

    #[getter]
    fn kind(&self) -> String {
        serde_json::to_value(self.inner.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("certificates serialize")
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(player={}, action={}, value={})",
            self.inner.player + 1,
            self.inner.action,
            ce_adversary::rational::format(&self.inner.value)
        )
    }
}

fn certificate(c: game_core::Certificate) -> Certificate {
    Certificate { inner: c }
}

/// Result of finalizing an adversary against a distribution.
#[pyclass(module = "ce_adversary_py", frozen, get_all)]
struct Finalization {
    case: u8,
    /// Case-1 root as a bitstring.
    root: Option<String>,
    certificate: Certificate,
    game: Game,
}

/// The adaptive black box. Answers pure-action queries, then builds a game
/// in which a submitted distribution is not a correlated equilibrium.
#[pyclass(module = "ce_adversary_py")]
struct Adversary {
    inner: AdversaryState,
    transcript: Transcript,
}

#[pymethods]
impl Adversary {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        Ok(Adversary {
            inner: AdversaryState::new(n).map_err(value_err)?,
            transcript: Transcript::default(),
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Distinct live profiles answered so far, as bitstrings.
    #[getter]
    fn queries(&self) -> Vec<String> {
        let n = self.inner.n();
        self.inner
            .queries()
            .iter()
            .map(|s| s.bitstring(n))
            .collect()
    }

    #[getter]
    fn live_size(&self) -> usize {
        self.inner.live().len()
    }

    #[getter]
    fn max_assigned(&self) -> Rational {
        self.inner.max_assigned().clone()
    }

    /// All players' utilities at `profile`.
    fn query(&mut self, profile: ProfileArg) -> PyResult<Vec<Rational>> {
        let s = resolve(self.inner.n(), profile)?;
        let r = self.inner.process_query(s).map_err(value_err)?;
        self.transcript.push_query(self.inner.n(), &r);
        Ok(r.utilities)
    }

    /// `d_i(s)` if already fixed.
    fn difference(&self, player: usize, profile: ProfileArg) -> PyResult<Option<Rational>> {
        if player >= self.inner.n() {
            return Err(value_err(format!("player {player} out of range")));
        }
        let s = resolve(self.inner.n(), profile)?;
        Ok(self.inner.diff().get(player, s).cloned())
    }

    /// Sizes of the fully assigned, partial and untouched regions.
    fn region_sizes(&self) -> (usize, usize, usize) {
        let r = self.inner.region_split().sizes();
        (r.fully_assigned, r.partial, r.untouched)
    }

    /// Names of failing invariants; empty when all hold.
    fn check_properties(&self) -> Vec<String> {
        self.inner.check_properties().failures()
    }

    fn finalize(&mut self, dist: &Distribution) -> PyResult<Finalization> {
        let fin = self.inner.finalize(&dist.inner).map_err(value_err)?;
        self.transcript.final_record = Some(FinalRecord::new(&fin));
        let root = match fin.case {
            FinalCase::RegretSumRoot { root } => Some(root.bitstring(self.inner.n())),
            FinalCase::DominatedAction { .. } => None,
        };
        Ok(Finalization {
            case: fin.case.number(),
            root,
            certificate: certificate(fin.certificate),
            game: Game { inner: fin.game },
        })
    }

    /// JSON-lines transcript of the run so far.
    fn transcript(&self) -> String {
        self.transcript.to_json_lines()
    }
}

#[pyclass(module = "ce_adversary_py", frozen, get_all)]
struct DuelResult {
    querier: String,
    n: usize,
    budget: usize,
    queries_used: usize,
    case_taken: Option<u8>,
    root: Option<String>,
    certificate: Option<Certificate>,
    verifier_agreement: bool,
    failure: Option<String>,
    transcript: String,
    json: String,
}

#[pyclass(module = "ce_adversary_py", frozen, get_all)]
struct RegretReport {
    rounds: u64,
    epsilon: Rational,
    empirical: Distribution,
    /// Average regret toward actions 0 and 1, per player.
    per_player_regrets: Vec<(Rational, Rational)>,
}

#[pyfunction]
fn max_budget(n: usize) -> usize {
    adversary::max_budget(n)
}

#[pyfunction]
fn giant_component_budget(n: usize) -> usize {
    hypercube::giant_component_budget(n)
}

#[pyfunction]
fn giant_component_holds(n: usize, removed: Vec<ProfileArg>) -> PyResult<bool> {
    if !(1..=hypercube::MAX_DIMENSION).contains(&n) {
        return Err(value_err(format!(
            "n must lie in 1..={}",
            hypercube::MAX_DIMENSION
        )));
    }
    let mut set = VertexSet::empty(n);
    for p in removed {
        set.insert(resolve(n, p)?);
    }
    Ok(hypercube::giant_component_holds(n, &set))
}

#[pyfunction]
fn edge_expansion_exact(n: usize) -> PyResult<Rational> {
    hypercube::edge_expansion_exact(n).map_err(value_err)
}

/// `None` if `dist` is a correlated equilibrium of `game`, else the most
/// violated constraint.
#[pyfunction]
fn verify_ce(game: &Game, dist: &Distribution) -> PyResult<Option<Certificate>> {
    let verdict =
        game_core::is_correlated_equilibrium(&game.inner, &dist.inner).map_err(value_err)?;
    Ok(verdict.certificate().cloned().map(certificate))
}

#[pyfunction]
fn is_correlated_equilibrium(game: &Game, dist: &Distribution) -> PyResult<bool> {
    Ok(verify_ce(game, dist)?.is_none())
}

#[pyfunction]
fn is_coarse_ce(game: &Game, dist: &Distribution) -> PyResult<bool> {
    let verdict = game_core::is_coarse_ce(&game.inner, &dist.inner).map_err(value_err)?;
    Ok(verdict.is_equilibrium())
}

#[pyfunction]
fn find_exact_ce(game: &Game) -> PyResult<Distribution> {
    Ok(Distribution {
        inner: lp_ce::find_exact_ce(&game.inner).map_err(value_err)?,
    })
}

#[pyfunction]
fn queriers() -> Vec<&'static str> {
    dynamics::builtin_queriers()
        .iter()
        .map(|q| q.name())
        .collect()
}

/// Plays a built-in querier against a fresh adversary. `budget` defaults to
/// the largest one the guarantee covers.
#[pyfunction]
#[pyo3(signature = (querier, n, budget=None))]
fn run_duel(
    py: Python<'_>,
    querier: &str,
    n: usize,
    budget: Option<usize>,
) -> PyResult<DuelResult> {
    let q = dynamics::querier_by_name(querier)
        .ok_or_else(|| value_err(format!("unknown querier {querier:?}")))?;
    let budget = budget.unwrap_or_else(|| adversary::max_budget(n));
    let r = py
        .detach(|| dynamics::run_duel(q.as_ref(), n, budget))
        .map_err(value_err)?;
    Ok(DuelResult {
        json: serde_json::to_string(&r).expect("results serialize"),
        transcript: r.transcript.to_json_lines(),
        querier: r.querier,
        n: r.n,
        budget: r.budget,
        queries_used: r.queries_used,
        case_taken: r.case_taken,
        root: r.root,
        certificate: r.certificate.map(certificate),
        verifier_agreement: r.verifier_agreement,
        failure: r.failure,
    })
}

#[pyfunction]
#[pyo3(signature = (game, rounds, seed=0))]
fn regret_matching(py: Python<'_>, game: &Game, rounds: u64, seed: u64) -> PyResult<RegretReport> {
    let r = py
        .detach(|| dynamics::regret_matching(&game.inner, rounds, seed))
        .map_err(value_err)?;
    Ok(RegretReport {
        rounds: r.rounds,
        epsilon: r.epsilon,
        empirical: Distribution { inner: r.empirical },
        per_player_regrets: r
            .per_player_regrets
            .into_iter()
            .map(|[a, b]| (a, b))
            .collect(),
    })
}

/// Smallest profile (as a bitstring) with `Σ y_i d_i(s) > 0`; `y` defaults
/// to all ones.
#[pyfunction]
#[pyo3(signature = (game, y=None))]
fn solve_reduced(game: &Game, y: Option<Vec<Rational>>) -> PyResult<Option<String>> {
    let n = game.inner.n();
    let diff = game_core::differences_from_utilities(&game.inner).map_err(value_err)?;
    let y = y.unwrap_or_else(|| vec![Rational::from_integer(1.into()); n]);
    let inst = dynamics::ReducedInstance::new(y, diff).map_err(value_err)?;
    Ok(dynamics::solve_reduced(&inst).map(|s| s.bitstring(n)))
}

#[pymodule]
pub fn ce_adversary_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Game>()?;
    m.add_class::<Distribution>()?;
    m.add_class::<Certificate>()?;
    m.add_class::<Finalization>()?;
    m.add_class::<Adversary>()?;
    m.add_class::<DuelResult>()?;
    m.add_class::<RegretReport>()?;
    m.add_function(wrap_pyfunction!(max_budget, m)?)?;
    m.add_function(wrap_pyfunction!(giant_component_budget, m)?)?;
    m.add_function(wrap_pyfunction!(giant_component_holds, m)?)?;
    m.add_function(wrap_pyfunction!(edge_expansion_exact, m)?)?;
    m.add_function(wrap_pyfunction!(verify_ce, m)?)?;
    m.add_function(wrap_pyfunction!(is_correlated_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(is_coarse_ce, m)?)?;
    m.add_function(wrap_pyfunction!(find_exact_ce, m)?)?;
    m.add_function(wrap_pyfunction!(queriers, m)?)?;
    m.add_function(wrap_pyfunction!(run_duel, m)?)?;
    m.add_function(wrap_pyfunction!(regret_matching, m)?)?;
    m.add_function(wrap_pyfunction!(solve_reduced, m)?)?;
    Ok(())
}
