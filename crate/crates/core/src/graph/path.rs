//! Minimum-hop action paths.
//!
//! Besides the recorded edges, every URL-addressable node `u` can be entered
//! from anywhere through an implicit `goto(url_u)` of cost 1. Those edges are
//! not stored in the graph; the search synthesizes them.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Action, GraphError, InteractionGraph, NodeId};

/// Ordered actions leading from `origin` to `destination`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionPath {
    pub origin: NodeId,
    pub destination: NodeId,
    pub steps: Vec<Action>,
}

impl ActionPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Hop distance from every node to `destination`, goto edges included.
fn distances_to(graph: &InteractionGraph, destination: &NodeId) -> HashMap<NodeId, usize> {
    let mut dist = HashMap::with_capacity(graph.node_count());
    let mut queue = VecDeque::new();
    let mut gotos_expanded = false;
    dist.insert(destination.clone(), 0);
    queue.push_back(destination.clone());
    while let Some(y) = queue.pop_front() {
        let d = dist[&y];
        for x in graph.predecessors(&y) {
            if !dist.contains_key(x) {
                dist.insert(x.clone(), d + 1);
                queue.push_back(x.clone());
            }
        }
        // the first addressable node popped gives every remaining node its
        // goto distance; later ones cannot improve on it
        if !gotos_expanded && graph.node(&y).is_some_and(|n| n.url_addressable()) {
            gotos_expanded = true;
            for x in graph.node_ids() {
                if !dist.contains_key(x) {
                    dist.insert(x.clone(), d + 1);
                    queue.push_back(x.clone());
                }
            }
        }
    }
    dist
}

/// Shortest action path with unit weights.
///
/// Among all minimum-length paths the one whose node sequence is
/// lexicographically smallest (by [`NodeId`]) is returned; between parallel
/// actions to the same node the smallest [`Action`] wins.
pub fn shortest_path(
    graph: &InteractionGraph,
    origin: &NodeId,
    destination: &NodeId,
) -> Result<ActionPath, GraphError> {
    for id in [origin, destination] {
        if !graph.contains(id) {
            return Err(GraphError::UnknownNode(id.clone()));
        }
    }
    let dist = distances_to(graph, destination);
    let Some(&total) = dist.get(origin) else {
        return Err(GraphError::Unreachable {
            origin: origin.clone(),
            destination: destination.clone(),
        });
    };

    let mut steps = Vec::with_capacity(total);
    let mut at = origin.clone();
    for remaining in (1..=total).rev() {
        let want = remaining - 1;
        let mut best: Option<(&NodeId, Action)> = None;
        for (a, y) in graph.out_edges(&at) {
            if dist.get(y) != Some(&want) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((by, ba)) => (y, a) < (*by, ba),
            };
            if better {
                best = Some((y, a.clone()));
            }
        }
        // addressable nodes are visited in ascending id order, so the first
        // one at the right distance is the only goto candidate worth checking
        if let Some(node) = graph
            .nodes()
            .find(|n| n.url_addressable() && dist.get(n.id()) == Some(&want))
        {
            let goto = Action::goto(node.url());
            let better = match &best {
                None => true,
                Some((by, ba)) => (node.id(), &goto) < (*by, ba),
            };
            if better {
                best = Some((node.id(), goto));
            }
        }
        let (next, action) = best.expect("distance labels guarantee a successor");
        steps.push(action);
        at = next.clone();
    }
    debug_assert_eq!(&at, destination);
    Ok(ActionPath {
        origin: origin.clone(),
        destination: destination.clone(),
        steps,
    })
}

/// Shortest path for a session whose current page is not in the graph.
///
/// Such a session can only move by goto, so the path opens with a goto to
/// the addressable node closest to `destination` (smallest id on ties) and
/// continues with [`shortest_path`] from there. `origin` is set to the root.
pub fn entry_path(graph: &InteractionGraph, destination: &NodeId) -> Result<ActionPath, GraphError> {
    if !graph.contains(destination) {
        return Err(GraphError::UnknownNode(destination.clone()));
    }
    let dist = distances_to(graph, destination);
    let entry = graph
        .nodes()
        .filter(|n| n.url_addressable())
        .filter_map(|n| dist.get(n.id()).map(|d| (*d, n)))
        .min_by_key(|(d, _)| *d)
        .map(|(_, n)| n)
        .ok_or_else(|| GraphError::Unreachable {
            origin: graph.root().clone(),
            destination: destination.clone(),
        })?;
    let rest = shortest_path(graph, entry.id(), destination)?;
    let mut steps = Vec::with_capacity(rest.len() + 1);
    steps.push(Action::goto(entry.url()));
    steps.extend(rest.steps);
    Ok(ActionPath {
        origin: graph.root().clone(),
        destination: destination.clone(),
        steps,
    })
}
