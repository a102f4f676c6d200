//! Revalidation and incremental maintenance of an existing graph.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::env::{EnvError, Environment};
use crate::graph::{shortest_path, InteractionGraph, NodeId, TransitionEdge};

use super::bfs::{Engine, TransitionMemo};
use super::{ExplorationConfig, ExploreError};

/// Difference between a cached graph and its updated version.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeReport {
    pub removed_nodes: Vec<NodeId>,
    pub added_nodes: Vec<NodeId>,
    pub removed_edges: Vec<TransitionEdge>,
    pub added_edges: Vec<TransitionEdge>,
    /// Cached edges whose action still produced the recorded target.
    pub revalidated_edges: Vec<TransitionEdge>,
    /// Cached nodes that could not be revisited with the same id.
    pub invalid_nodes: Vec<NodeId>,
    /// Environment actions spent, verification included.
    pub actions_executed: usize,
}

impl ChangeReport {
    /// No node or edge was added or removed.
    pub fn is_unchanged(&self) -> bool {
        self.removed_nodes.is_empty()
            && self.added_nodes.is_empty()
            && self.removed_edges.is_empty()
            && self.added_edges.is_empty()
    }

    /// One-line JSON summary with counts.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "removed_nodes": self.removed_nodes.len(),
            "added_nodes": self.added_nodes.len(),
            "removed_edges": self.removed_edges.len(),
            "added_edges": self.added_edges.len(),
            "revalidated_edges": self.revalidated_edges.len(),
            "invalid_nodes": self.invalid_nodes.len(),
        })
    }
}

/// Brings `graph` up to date with the live environment.
///
/// Every cached node is revisited along its stored path and every cached
/// edge re-executed; the observed transitions are remembered. The graph is
/// then rebuilt breadth-first from the start url, taking transitions from
/// that record and only driving the browser for elements it has not seen
/// (new elements, or elements of pages whose structure changed). Nodes that
/// are no longer reachable simply never reappear.
pub fn incremental_update<E: Environment + ?Sized>(
    session: &mut E,
    graph: &InteractionGraph,
    config: &ExplorationConfig,
) -> Result<(InteractionGraph, ChangeReport), ExploreError> {
    config.validate()?;
    match session.reset(&config.start_url) {
        Ok(_) => {}
        Err(EnvError::UnknownUrl(url)) => return Err(ExploreError::RootVanished(url)),
        Err(e) => return Err(e.into()),
    }

    let mut verifier = Verifier {
        env: session,
        graph,
        position: None,
        executed: 1,
    };
    let mut valid_nodes = HashSet::new();
    let mut invalid_nodes = Vec::new();
    for id in graph.node_ids() {
        if verifier.visit(id) {
            valid_nodes.insert(id.clone());
        } else {
            invalid_nodes.push(id.clone());
        }
    }
    let mut memo = TransitionMemo::new();
    let mut still_valid = HashSet::new();
    for edge in graph.edges() {
        if !valid_nodes.contains(&edge.source) || !verifier.visit(&edge.source) {
            continue;
        }
        verifier.executed += 1;
        let Ok(obs) = verifier.env.perform(&edge.action) else {
            verifier.position = None;
            continue;
        };
        let landed = obs.to_node(0)?.id().clone();
        if landed == edge.target {
            still_valid.insert(edge.clone());
        }
        verifier.position = Some(landed);
        memo.insert((edge.source.clone(), edge.action.clone()), obs);
    }
    let verification_actions = verifier.executed;

    let engine = Engine::start(session, config, Some(&memo)).map_err(|e| match e {
        ExploreError::Environment(EnvError::UnknownUrl(url)) => ExploreError::RootVanished(url),
        other => other,
    })?;
    let (updated, _, rebuild_actions) = engine.run()?;

    let old_nodes: BTreeSet<&NodeId> = graph.node_ids().collect();
    let new_nodes: BTreeSet<&NodeId> = updated.node_ids().collect();
    let old_edges: BTreeSet<TransitionEdge> = graph.edges().collect();
    let new_edges: BTreeSet<TransitionEdge> = updated.edges().collect();
    let report = ChangeReport {
        removed_nodes: old_nodes.difference(&new_nodes).map(|&n| n.clone()).collect(),
        added_nodes: new_nodes.difference(&old_nodes).map(|&n| n.clone()).collect(),
        removed_edges: old_edges.difference(&new_edges).cloned().collect(),
        added_edges: new_edges.difference(&old_edges).cloned().collect(),
        revalidated_edges: old_edges
            .iter()
            .filter(|e| still_valid.contains(*e) && new_edges.contains(*e))
            .cloned()
            .collect(),
        invalid_nodes,
        actions_executed: verification_actions + rebuild_actions,
    };
    Ok((updated, report))
}

struct Verifier<'a, E: ?Sized> {
    env: &'a mut E,
    graph: &'a InteractionGraph,
    position: Option<NodeId>,
    executed: usize,
}

impl<E: Environment + ?Sized> Verifier<'_, E> {
    /// Replays the cached path to `node`; true if the live page has its id.
    fn visit(&mut self, node: &NodeId) -> bool {
        if self.position.as_ref() == Some(node) {
            return true;
        }
        self.position = None;
        let Ok(path) = shortest_path(self.graph, self.graph.root(), node) else {
            return false;
        };
        if path.steps.first().is_none_or(|a| !a.is_goto()) {
            self.executed += 1;
            if self.env.reset(self.graph.root_node().url()).is_err() {
                return false;
            }
        }
        for step in &path.steps {
            self.executed += 1;
            if self.env.perform(step).is_err() {
                return false;
            }
        }
        let live = match self.env.observe().map(|o| o.to_node(0)) {
            Ok(Ok(n)) => n.id().clone(),
            _ => return false,
        };
        let ok = &live == node;
        self.position = Some(live);
        ok
    }
}
