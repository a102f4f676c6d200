//! Candidate selection.
//!
//! A [`Selector`] sees the task intent, the navigation query and the
//! retrieved candidates with their renderings, and either picks one candidate
//! or declines.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NavigateError;
use crate::graph::NodeId;
use crate::retrieval::{tokenize, Candidate};

/// A candidate as presented to a selector.
#[derive(Debug, Clone, Copy)]
pub struct CandidateView<'a> {
    pub candidate: &'a Candidate,
    pub rendering: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionDecision {
    pub chosen: Option<NodeId>,
    pub rationale: String,
}

pub trait Selector {
    fn select(
        &mut self,
        intent: &str,
        query: &str,
        candidates: &[CandidateView<'_>],
    ) -> Result<SelectionDecision, NavigateError>;
}

impl<S: Selector + ?Sized> Selector for Box<S> {
    fn select(
        &mut self,
        intent: &str,
        query: &str,
        candidates: &[CandidateView<'_>],
    ) -> Result<SelectionDecision, NavigateError> {
        (**self).select(intent, query, candidates)
    }
}

/// Runs `selector` and enforces that a chosen id was actually presented.
pub fn select(
    intent: &str,
    query: &str,
    candidates: &[CandidateView<'_>],
    selector: &mut dyn Selector,
) -> Result<SelectionDecision, NavigateError> {
    if candidates.is_empty() {
        return Err(NavigateError::NoCandidates);
    }
    let decision = selector.select(intent, query, candidates)?;
    if let Some(id) = &decision.chosen {
        if !candidates.iter().any(|c| &c.candidate.node_id == id) {
            return Err(NavigateError::MalformedDecision(format!(
                "selector chose {id}, which was not among the candidates"
            )));
        }
    }
    Ok(decision)
}

/// Picks the candidate sharing the most distinct tokens with intent and
/// query; ties go to the better retrieval rank. Declines when nothing
/// overlaps.
#[derive(Debug, Clone, Copy, Default)]
pub struct KeywordSelector;

impl Selector for KeywordSelector {
    fn select(
        &mut self,
        intent: &str,
        query: &str,
        candidates: &[CandidateView<'_>],
    ) -> Result<SelectionDecision, NavigateError> {
        let wanted: BTreeSet<String> = tokenize(intent)
            .into_iter()
            .chain(tokenize(query))
            .collect();
        let best = candidates
            .iter()
            .map(|c| {
                let have: BTreeSet<String> = tokenize(c.rendering).into_iter().collect();
                (wanted.intersection(&have).count(), c.candidate)
            })
            .filter(|(overlap, _)| *overlap > 0)
            .min_by(|(oa, ca), (ob, cb)| ob.cmp(oa).then(ca.rank.cmp(&cb.rank)));
        Ok(match best {
            Some((overlap, c)) => SelectionDecision {
                chosen: Some(c.node_id.clone()),
                rationale: format!("{overlap} shared tokens, retrieval rank {}", c.rank),
            },
            None => SelectionDecision {
                chosen: None,
                rationale: "no candidate shares a token with the request".into(),
            },
        })
    }
}

/// One navigation step of a task: route on `domain` to `target` via `query`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskStep {
    pub domain: String,
    pub query: String,
    pub target: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub intent: String,
    pub steps: Vec<TaskStep>,
}

/// Ground-truth task file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskFixture {
    pub tasks: Vec<Task>,
}

impl TaskFixture {
    pub fn from_json(bytes: &[u8]) -> Result<Self, NavigateError> {
        serde_json::from_slice(bytes).map_err(|e| NavigateError::ParseFailure(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, NavigateError> {
        let bytes = std::fs::read(path)
            .map_err(|e| NavigateError::ParseFailure(format!("{}: {e}", path.display())))?;
        Self::from_json(&bytes)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("fixtures always serialize");
        out.push(b'\n');
        out
    }
}

/// Answers from a [`TaskFixture`], keyed by `(intent, query)`.
#[derive(Debug, Clone, Default)]
pub struct FixtureSelector {
    answers: HashMap<(String, String), NodeId>,
}

impl FixtureSelector {
    pub fn new(fixture: &TaskFixture) -> Self {
        let answers = fixture
            .tasks
            .iter()
            .flat_map(|t| {
                t.steps
                    .iter()
                    .map(move |s| ((t.intent.clone(), s.query.clone()), s.target.clone()))
            })
            .collect();
        Self { answers }
    }
}

impl Selector for FixtureSelector {
    fn select(
        &mut self,
        intent: &str,
        query: &str,
        candidates: &[CandidateView<'_>],
    ) -> Result<SelectionDecision, NavigateError> {
        let key = (intent.to_owned(), query.to_owned());
        let Some(target) = self.answers.get(&key) else {
            return Ok(SelectionDecision {
                chosen: None,
                rationale: "request not in fixture".into(),
            });
        };
        Ok(match candidates.iter().find(|c| &c.candidate.node_id == target) {
            Some(c) => SelectionDecision {
                chosen: Some(target.clone()),
                rationale: format!("ground truth at retrieval rank {}", c.candidate.rank),
            },
            None => SelectionDecision {
                chosen: None,
                rationale: format!("ground truth {target} was not retrieved"),
            },
        })
    }
}
