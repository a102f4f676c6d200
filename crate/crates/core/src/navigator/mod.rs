//! Retrieve, select, teleport.
//!
//! [`navigate`] resolves a free-text request against one registered domain:
//! the query is scored against the domain's index, a [`Selector`] picks one of
//! the top candidates, and the shortest recorded action path to it is replayed
//! on the domain's session. Path execution never touches the selector or the
//! embedder.

mod selector;
mod wire;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{EnvError, Environment, Observation, SimulatedSite};
use crate::graph::{
    deserialize_graph, entry_path, shortest_path, Action, ActionPath, GraphError,
    InteractionGraph, NodeId,
};
use crate::retrieval::{retrieve_topk, Candidate, Embedder, RetrievalError, RetrievalIndex};

pub use selector::{
    select, CandidateView, FixtureSelector, KeywordSelector, SelectionDecision, Selector, Task,
    TaskFixture, TaskStep,
};
pub use wire::{
    ExternalSelector, HttpTransport, ProcessTransport, SelectorReply, SelectorRequest, Transport,
    WireCandidate, SELECTOR_CMD_ENV, SELECTOR_URL_ENV,
};

pub const DEFAULT_K: usize = 30;
pub const MAX_K: usize = 100;

#[derive(Debug, Error)]
pub enum NavigateError {
    #[error("domain {0:?} is not registered")]
    UnknownDomain(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("no candidates to choose from")]
    NoCandidates,
    #[error("selector declined every candidate: {rationale}")]
    TargetNotFound { rationale: String },
    #[error("no path to {target}: {reason}")]
    Unreachable { target: NodeId, reason: String },
    #[error("landed on {found} instead of {expected}; the graph is out of date")]
    StaleGraph { expected: NodeId, found: String },
    #[error("step {step} ({action}) failed: {reason}")]
    PathExecutionFailed {
        step: usize,
        action: Action,
        reason: String,
    },
    #[error("selector unavailable: {0}")]
    SelectorUnavailable(String),
    #[error("malformed selector decision: {0}")]
    MalformedDecision(String),
    #[error("graph and index disagree on {missing_from_index} missing and {unknown_in_index} unknown node ids")]
    IdSetMismatch {
        missing_from_index: usize,
        unknown_in_index: usize,
    },
    #[error("cannot parse {0}")]
    ParseFailure(String),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Environment(#[from] EnvError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavigationRequest {
    pub domain: String,
    pub query: String,
    pub intent: String,
    pub k: usize,
}

impl NavigationRequest {
    pub fn new(domain: impl Into<String>, query: impl Into<String>, intent: impl Into<String>) -> Self {
        Self {
            domain: domain.into(),
            query: query.into(),
            intent: intent.into(),
            k: DEFAULT_K,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn validate(&self) -> Result<(), NavigateError> {
        if self.query.trim().is_empty() {
            return Err(NavigateError::InvalidRequest("query is empty".into()));
        }
        if self.intent.trim().is_empty() {
            return Err(NavigateError::InvalidRequest("intent is empty".into()));
        }
        if !(1..=MAX_K).contains(&self.k) {
            return Err(NavigateError::InvalidRequest(format!(
                "k must be in 1..={MAX_K}, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// The retrieval and selection half of a navigation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub candidates: Vec<Candidate>,
    pub decision: SelectionDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavigationResult {
    pub target: NodeId,
    pub path: ActionPath,
    pub actions_executed: usize,
    pub final_observation: Observation,
    pub candidates_considered: Vec<Candidate>,
}

/// Opens a fresh session on a domain.
pub type SessionFactory =
    Arc<dyn Fn() -> Result<Box<dyn Environment>, EnvError> + Send + Sync>;

/// Factory opening one-second-latency sessions on a simulated site.
pub fn simulated_factory(site: SimulatedSite) -> SessionFactory {
    Arc::new(move || Ok(Box::new(site.session()) as Box<dyn Environment>))
}

struct DomainEntry {
    graph: InteractionGraph,
    index: RetrievalIndex,
    factory: SessionFactory,
    session: Mutex<Option<Box<dyn Environment>>>,
}

/// Graphs, indexes and sessions by domain label.
///
/// Navigations on different domains may run concurrently; navigations on the
/// same domain take turns on its session.
#[derive(Default)]
pub struct DomainRegistry {
    domains: BTreeMap<String, DomainEntry>,
}

impl fmt::Debug for DomainRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainRegistry")
            .field("domains", &self.domains.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl DomainRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `domain`, replacing any earlier entry.
    pub fn insert(
        &mut self,
        domain: impl Into<String>,
        graph: InteractionGraph,
        index: RetrievalIndex,
        factory: SessionFactory,
    ) -> Result<(), NavigateError> {
        let in_graph: BTreeSet<&NodeId> = graph.node_ids().collect();
        let in_index: BTreeSet<&NodeId> = index.node_ids().collect();
        if in_graph != in_index {
            return Err(NavigateError::IdSetMismatch {
                missing_from_index: in_graph.difference(&in_index).count(),
                unknown_in_index: in_index.difference(&in_graph).count(),
            });
        }
        self.domains.insert(
            domain.into(),
            DomainEntry {
                graph,
                index,
                factory,
                session: Mutex::new(None),
            },
        );
        Ok(())
    }

    /// Loads a serialized graph and index and registers them.
    pub fn register_domain(
        &mut self,
        domain: impl Into<String>,
        graph_file: &Path,
        index_file: &Path,
        factory: SessionFactory,
    ) -> Result<(), NavigateError> {
        let bytes = std::fs::read(graph_file)
            .map_err(|e| NavigateError::ParseFailure(format!("{}: {e}", graph_file.display())))?;
        let graph = deserialize_graph(&bytes).map_err(|e: GraphError| {
            NavigateError::ParseFailure(format!("{}: {e}", graph_file.display()))
        })?;
        let index = RetrievalIndex::load(index_file)
            .map_err(|e| NavigateError::ParseFailure(format!("{}: {e}", index_file.display())))?;
        self.insert(domain, graph, index, factory)
    }

    pub fn domains(&self) -> impl Iterator<Item = &str> {
        self.domains.keys().map(String::as_str)
    }

    pub fn graph(&self, domain: &str) -> Option<&InteractionGraph> {
        self.domains.get(domain).map(|e| &e.graph)
    }

    pub fn index(&self, domain: &str) -> Option<&RetrievalIndex> {
        self.domains.get(domain).map(|e| &e.index)
    }

    /// Drops the pooled session; the next navigation opens a fresh one.
    pub fn release_session(&self, domain: &str) -> Result<(), NavigateError> {
        let entry = self.entry(domain)?;
        *lock(&entry.session) = None;
        Ok(())
    }

    fn entry(&self, domain: &str) -> Result<&DomainEntry, NavigateError> {
        self.domains
            .get(domain)
            .ok_or_else(|| NavigateError::UnknownDomain(domain.to_owned()))
    }

    /// Retrieves candidates and lets `selector` choose among them.
    pub fn choose(
        &self,
        request: &NavigationRequest,
        selector: &mut dyn Selector,
        embedder: &dyn Embedder,
    ) -> Result<Selection, NavigateError> {
        request.validate()?;
        let entry = self.entry(&request.domain)?;
        if entry.index.is_empty() {
            return Err(NavigateError::NoCandidates);
        }
        let candidates = retrieve_topk(&entry.index, &request.query, request.k, embedder)?;
        let views: Vec<CandidateView<'_>> = candidates
            .iter()
            .map(|c| CandidateView {
                candidate: c,
                rendering: entry
                    .graph
                    .node(&c.node_id)
                    .expect("index ids are graph ids")
                    .rendering(),
            })
            .collect();
        let decision = select(&request.intent, &request.query, &views, selector)?;
        Ok(Selection {
            candidates,
            decision,
        })
    }

    /// Moves the domain's session to `target` along a shortest path.
    pub fn teleport(
        &self,
        domain: &str,
        target: &NodeId,
        candidates_considered: Vec<Candidate>,
    ) -> Result<NavigationResult, NavigateError> {
        let entry = self.entry(domain)?;
        let graph = &entry.graph;
        let mut slot = lock(&entry.session);
        if slot.is_none() {
            let mut fresh = (entry.factory)()?;
            fresh.reset(graph.root_node().url())?;
            *slot = Some(fresh);
        }
        let session = slot.as_mut().expect("session opened above");

        let current = current_node(graph, session.as_ref());
        let path = plan_teleport(graph, current.as_ref(), target)?;
        let mut last = None;
        for (step, action) in path.steps.iter().enumerate() {
            match session.perform(action) {
                Ok(obs) => last = Some(obs),
                Err(e) => {
                    return Err(NavigateError::PathExecutionFailed {
                        step,
                        action: action.clone(),
                        reason: e.to_string(),
                    })
                }
            }
        }
        let final_observation = match last {
            Some(obs) => obs,
            None => session.observe()?,
        };
        let found = final_observation
            .to_node(0)
            .map(|n| n.id().to_string())
            .unwrap_or_else(|e| format!("an invalid page ({e})"));
        if found != target.as_str() {
            return Err(NavigateError::StaleGraph {
                expected: target.clone(),
                found,
            });
        }
        Ok(NavigationResult {
            target: target.clone(),
            actions_executed: path.len(),
            path,
            final_observation,
            candidates_considered,
        })
    }
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// The graph node the session is on, if its page is in the graph.
fn current_node(graph: &InteractionGraph, session: &dyn Environment) -> Option<NodeId> {
    let obs = session.observe().ok()?;
    let node = obs.to_node(0).ok()?;
    graph.contains(node.id()).then(|| node.id().clone())
}

/// Action path from `current` to `target`.
///
/// With an unknown `current` the path begins with a goto, so it works from
/// any page.
pub fn plan_teleport(
    graph: &InteractionGraph,
    current: Option<&NodeId>,
    target: &NodeId,
) -> Result<ActionPath, NavigateError> {
    let unreachable = |e: GraphError| NavigateError::Unreachable {
        target: target.clone(),
        reason: e.to_string(),
    };
    match current {
        Some(c) => shortest_path(graph, c, target).map_err(unreachable),
        None => entry_path(graph, target).map_err(unreachable),
    }
}

/// Retrieve, select, teleport.
pub fn navigate(
    registry: &DomainRegistry,
    request: &NavigationRequest,
    selector: &mut dyn Selector,
    embedder: &dyn Embedder,
) -> Result<NavigationResult, NavigateError> {
    let selection = registry.choose(request, selector, embedder)?;
    let Some(target) = selection.decision.chosen else {
        return Err(NavigateError::TargetNotFound {
            rationale: selection.decision.rationale,
        });
    };
    registry.teleport(&request.domain, &target, selection.candidates)
}
