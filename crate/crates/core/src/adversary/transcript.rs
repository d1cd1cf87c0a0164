//! JSON-lines transcript of an adversary run.
//!
//! One line per query:
//! `{"t":1,"profile":"00","returned_utilities":["-1/1","0/1"],"newly_assigned":[[1,"00","-1/1"],...]}`
//! and one final line:
//! `{"case":1,"certificate":{...},"region_sizes":{"F":..,"P":..,"N":..}}`.
//! Players in `newly_assigned` are 1-based.

use serde::{Deserialize, Serialize};

use super::{Assignment, Finalization, QueryResponse, RegionSizes};
use crate::game_core::{Certificate, DifferenceTable, GameError, Profile};
use crate::rational::{self, Rational};

#[derive(Debug, thiserror::Error)]
pub enum TranscriptError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// `[player, profile, value]` with a 1-based player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentRecord(pub usize, pub String, pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRecord {
    pub t: usize,
    pub profile: String,
    pub returned_utilities: Vec<String>,
    pub newly_assigned: Vec<AssignmentRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalRecord {
    pub case: u8,
    pub certificate: Certificate,
    pub region_sizes: RegionSizes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Line {
    Query(QueryRecord),
    Final(FinalRecord),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub queries: Vec<QueryRecord>,
    pub final_record: Option<FinalRecord>,
}

impl QueryRecord {
    pub fn new(t: usize, n: usize, response: &QueryResponse) -> Self {
        QueryRecord {
            t,
            profile: response.profile.bitstring(n),
            returned_utilities: response.utilities.iter().map(rational::format).collect(),
            newly_assigned: response
                .newly_assigned
                .iter()
                .map(|a: &Assignment| {
                    AssignmentRecord(
                        a.player + 1,
                        a.profile.bitstring(n),
                        rational::format(&a.value),
                    )
                })
                .collect(),
        }
    }
}

impl FinalRecord {
    pub fn new(fin: &Finalization) -> Self {
        FinalRecord {
            case: fin.case.number(),
            certificate: fin.certificate.clone(),
            region_sizes: fin.regions,
        }
    }
}

impl Transcript {
    pub fn push_query(&mut self, n: usize, response: &QueryResponse) {
        let t = self.queries.len() + 1;
        self.queries.push(QueryRecord::new(t, n, response));
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let lines = self
            .queries
            .iter()
            .cloned()
            .map(Line::Query)
            .chain(self.final_record.clone().map(Line::Final));
        for line in lines {
            out.push_str(&serde_json::to_string(&line).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(text: &str) -> Result<Self, TranscriptError> {
        let mut transcript = Transcript::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            if raw.trim().is_empty() {
                continue;
            }
            if transcript.final_record.is_some() {
                return Err(TranscriptError::Malformed {
                    line,
                    msg: "record after the final record".into(),
                });
            }
            match serde_json::from_str::<Line>(raw)
                .map_err(|source| TranscriptError::Json { line, source })?
            {
                Line::Query(q) => {
                    if q.t != transcript.queries.len() + 1 {
                        return Err(TranscriptError::Malformed {
                            line,
                            msg: format!(
                                "expected t = {}, found {}",
                                transcript.queries.len() + 1,
                                q.t
                            ),
                        });
                    }
                    transcript.queries.push(q);
                }
                Line::Final(f) => transcript.final_record = Some(f),
            }
        }
        Ok(transcript)
    }

    /// Player count, read from the first profile label.
    pub fn n(&self) -> Option<usize> {
        self.queries.first().map(|q| q.profile.len())
    }

    /// Everything the querier could have learned: the differences fixed
    /// before finalization. `None` when no query was made.
    pub fn known_differences(&self) -> Result<Option<DifferenceTable>, TranscriptError> {
        let Some(n) = self.n() else {
            return Ok(None);
        };
        let mut diff = DifferenceTable::new(n)?;
        for (k, q) in self.queries.iter().enumerate() {
            let line = k + 1;
            let malformed = |msg: String| TranscriptError::Malformed { line, msg };
            if q.profile.len() != n || q.returned_utilities.len() != n {
                return Err(malformed("inconsistent player count".into()));
            }
            for AssignmentRecord(player, label, value) in &q.newly_assigned {
                let s = Profile::parse_bitstring(label)?;
                if *player == 0 || *player > n || label.len() != n {
                    return Err(malformed(format!(
                        "bad assignment target ({player}, {label})"
                    )));
                }
                let value: Rational =
                    rational::parse(value).map_err(|e| malformed(e.to_string()))?;
                if let Some(old) = diff.get(player - 1, s) {
                    if *old != value {
                        return Err(malformed(format!(
                            "conflicting value for ({player}, {label})"
                        )));
                    }
                }
                diff.set_unchecked(player - 1, s, Some(value));
            }
        }
        diff.check_complementarity()?;
        Ok(Some(diff))
    }
}
