//! The adaptive black box.
//!
//! The adversary answers pure-action queries so that every profile it has
//! fully specified has regret sum `D(s) = -1`, while all edges inside the
//! live region `W_t` (the largest component of the unqueried cube) stay
//! unassigned. After the querier submits a distribution, [`AdversaryState::finalize`]
//! completes the game so that the distribution is not a correlated
//! equilibrium and returns a certificate for it.
//!
//! Guarantees hold for `n >= 6` and at most [`max_budget`] distinct live
//! queries. Outside that regime the machinery still runs but may report
//! [`AdversaryError::GuaranteeViolation`].

mod finalize;
mod properties;
mod transcript;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::game_core::{Bits, DifferenceTable, GameError, Profile};
use crate::hypercube::{self, HypercubeError, SpanningTree, VertexSet};
use crate::rational::{self, Rational};

pub use finalize::{FinalCase, Finalization};
pub use properties::{PropertyOutcome, PropertyReport};
pub use transcript::{AssignmentRecord, FinalRecord, QueryRecord, Transcript, TranscriptError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdversaryError {
    #[error("the adversary needs at least two players (got {0})")]
    TooFewPlayers(usize),
    #[error("the adversary has already been finalized")]
    Finalized,
    #[error("profile {0} is outside the {1}-cube")]
    InvalidProfile(u64, usize),
    #[error("query {0} would empty the live region")]
    LiveRegionExhausted(String),
    #[error("guarantee violated: {0}")]
    GuaranteeViolation(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Hypercube(#[from] HypercubeError),
}

/// Largest query count `q` with `q < 2^n / (n² + 1)`.
pub fn max_budget(n: usize) -> usize {
    hypercube::giant_component_budget(n)
}

/// One difference value fixed by the adversary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub player: usize,
    pub profile: Profile,
    pub value: Rational,
}

/// Answer to a single query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResponse {
    pub profile: Profile,
    pub utilities: Vec<Rational>,
    /// Every entry fixed while answering, complements included.
    pub newly_assigned: Vec<Assignment>,
    /// The profile was already fully specified; nothing changed.
    pub cached: bool,
}

/// Sizes of the fully assigned, partially assigned and untouched regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSizes {
    #[serde(rename = "F")]
    pub fully_assigned: usize,
    #[serde(rename = "P")]
    pub partial: usize,
    #[serde(rename = "N")]
    pub untouched: usize,
}

/// Partition of the cube after the query phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSplit {
    /// `F = V ∖ W`: every component of `d(s)` assigned.
    pub fully_assigned: VertexSet,
    /// Live vertices with a neighbor in `F`.
    pub partial: VertexSet,
    /// Everything else: no component of `d(s)` assigned.
    pub untouched: VertexSet,
}

impl RegionSplit {
    pub fn sizes(&self) -> RegionSizes {
        RegionSizes {
            fully_assigned: self.fully_assigned.len(),
            partial: self.partial.len(),
            untouched: self.untouched.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdversaryState {
    n: usize,
    queries: Vec<Profile>,
    live: VertexSet,
    diff: DifferenceTable,
    max_assigned: Rational,
    finalized: bool,
}

impl AdversaryState {
    pub fn new(n: usize) -> Result<Self, AdversaryError> {
        if n < 2 {
            return Err(AdversaryError::TooFewPlayers(n));
        }
        if n > hypercube::MAX_DIMENSION {
            return Err(HypercubeError::Dimension(n).into());
        }
        Ok(AdversaryState {
            n,
            queries: Vec::new(),
            live: VertexSet::full(n),
            diff: DifferenceTable::new(n)?,
            max_assigned: Rational::zero(),
            finalized: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct live queries so far, in order (`Q_t`).
    pub fn queries(&self) -> &[Profile] {
        &self.queries
    }

    /// The live region `W_t`.
    pub fn live(&self) -> &VertexSet {
        &self.live
    }

    pub fn diff(&self) -> &DifferenceTable {
        &self.diff
    }

    /// Direct access to the difference table, for fault-injection tests.
    #[doc(hidden)]
    pub fn diff_mut(&mut self) -> &mut DifferenceTable {
        &mut self.diff
    }

    /// Largest absolute assigned difference (`M`), zero if none.
    pub fn max_assigned(&self) -> &Rational {
        &self.max_assigned
    }

    pub fn is_finalized(&self) -> bool {
        self.finalized
    }

    /// Canonical utilities at a fully specified profile.
    fn utilities_at(&self, s: Profile) -> Vec<Rational> {
        (0..self.n)
            .map(|i| {
                if s.action(i) == 0 {
                    self.diff
                        .get(i, s)
                        .cloned()
                        .expect("answered profiles are fully assigned")
                } else {
                    Rational::zero()
                }
            })
            .collect()
    }

    /// Answers a pure-action query.
    ///
    /// Profiles outside the live region are already fully specified and get
    /// their cached utilities back without touching the state. A live query
    /// shrinks `W` to the largest component of `W ∖ {s}`; the cut-off part
    /// `R` plus a neighbor `v` of `s` in the new live region is spanned by a
    /// BFS tree rooted at `v`, and a leaves-to-root pass fixes `d(w)` for
    /// every `w ∈ R` so that `D(w) = -1`.
    pub fn process_query(&mut self, s: Profile) -> Result<QueryResponse, AdversaryError> {
        if self.finalized {
            return Err(AdversaryError::Finalized);
        }
        if !s.is_valid(self.n) {
            return Err(AdversaryError::InvalidProfile(s.code(), self.n));
        }
        if !self.live.contains(s) {
            return Ok(QueryResponse {
                profile: s,
                utilities: self.utilities_at(s),
                newly_assigned: Vec::new(),
                cached: true,
            });
        }

        let mut rest = self.live.clone();
        rest.remove(s);
        // Within budget this is also the largest component of V ∖ Q_{t+1}:
        // every other component of V ∖ Q_t is smaller than half the cube.
        let next_live = hypercube::components_within(&rest)
            .into_iter()
            .next()
            .ok_or_else(|| AdversaryError::LiveRegionExhausted(Bits(s, self.n).to_string()))?;
        let root = (0..self.n)
            .map(|i| s.flip(i))
            .find(|v| next_live.contains(*v))
            .expect("the live region is connected, so s touches every piece of W ∖ {s}");

        let mut tree_vertices = self.live.difference(&next_live);
        tree_vertices.insert(root);
        let tree = hypercube::spanning_tree(&tree_vertices, root, self.n)?;

        let mut log = Vec::new();
        let mut diff = self.diff.clone();
        let mut max_assigned = self.max_assigned.clone();
        assign_bottom_up(&mut diff, &tree, &mut max_assigned, &mut log)?;

        self.diff = diff;
        self.max_assigned = max_assigned;
        self.queries.push(s);
        self.live = next_live;
        log::debug!(
            "query {} -> |W| = {}, {} entries assigned",
            Bits(s, self.n),
            self.live.len(),
            log.len()
        );
        Ok(QueryResponse {
            profile: s,
            utilities: self.utilities_at(s),
            newly_assigned: log,
            cached: false,
        })
    }

    /// Splits `V` into fully assigned, partial and untouched profiles.
    pub fn region_split(&self) -> RegionSplit {
        let fully_assigned = self.live.complement();
        let mut partial = VertexSet::empty(self.n);
        let mut untouched = VertexSet::empty(self.n);
        for s in self.live.iter() {
            if (0..self.n).any(|i| fully_assigned.contains(s.flip(i))) {
                partial.insert(s);
            } else {
                untouched.insert(s);
            }
        }
        RegionSplit {
            fully_assigned,
            partial,
            untouched,
        }
    }

    pub fn check_properties(&self) -> PropertyReport {
        properties::check(self)
    }
}

/// Leaves-to-root pass over `tree`, fixing `d(w)` for every non-root `w`.
///
/// At `w` with parent edge along coordinate `i`, every other unassigned
/// component of `d(w)` becomes zero (with its complement), then
/// `d_i(w) = -Σ_{k≠i} d_k(w) - 1` and `d_i(parent) = -d_i(w)`. Children are
/// processed first, so the parent edge is still free when `w` is reached.
fn assign_bottom_up(
    diff: &mut DifferenceTable,
    tree: &SpanningTree,
    max_assigned: &mut Rational,
    log: &mut Vec<Assignment>,
) -> Result<(), AdversaryError> {
    let n = diff.n();
    for &w in &tree.order {
        let Some(&(_, i)) = tree.parent.get(&w) else {
            continue;
        };
        let mut others = Rational::zero();
        for j in (0..n).filter(|&j| j != i) {
            if !diff.is_assigned(j, w) {
                set_edge(diff, j, w, Rational::zero(), max_assigned, log)?;
            }
            others += diff.get(j, w).expect("just assigned");
        }
        let value = -others - rational::one();
        set_edge(diff, i, w, value, max_assigned, log)?;
    }
    Ok(())
}

fn set_edge(
    diff: &mut DifferenceTable,
    player: usize,
    s: Profile,
    value: Rational,
    max_assigned: &mut Rational,
    log: &mut Vec<Assignment>,
) -> Result<(), AdversaryError> {
    let magnitude = value.abs();
    diff.assign_edge(player, s, value.clone()).map_err(|e| {
        AdversaryError::GuaranteeViolation(format!("tree pass hit an assigned edge: {e}"))
    })?;
    if magnitude > *max_assigned {
        *max_assigned = magnitude;
    }
    log.push(Assignment {
        player,
        profile: s,
        value: value.clone(),
    });
    log.push(Assignment {
        player,
        profile: s.flip(player),
        value: -value,
    });
    Ok(())
}
