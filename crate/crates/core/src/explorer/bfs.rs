use std::collections::HashMap;

use crate::env::{interactive_elements, EnvError, Environment, Observation};
use crate::graph::{shortest_path, Action, InteractionGraph, NodeId, TransitionEdge};

use super::{DepthRecord, ExplorationConfig, ExplorationStats, ExploreError};

/// Transitions observed ahead of time, keyed by source node and action.
pub(super) type TransitionMemo = HashMap<(NodeId, Action), Observation>;

/// Breadth-first construction of the interaction graph.
///
/// Nodes are expanded layer by layer up to `config.max_depth`. Every clicked
/// element yields an edge, and a node only when its id is new. With
/// structural differencing on, an element whose hash also occurs on the
/// node's first parent is not clicked again: the parent's recorded
/// transition is reused for it, unless that transition was a self-loop (a
/// self-loop says nothing about where the element leads from elsewhere).
pub fn explore<E: Environment + ?Sized>(
    session: &mut E,
    config: &ExplorationConfig,
) -> Result<(InteractionGraph, ExplorationStats), ExploreError> {
    config.validate()?;
    let (graph, stats, _) = Engine::start(session, config, None)?.run()?;
    Ok((graph, stats))
}

pub(super) struct Engine<'a, E: ?Sized> {
    env: &'a mut E,
    config: &'a ExplorationConfig,
    memo: Option<&'a TransitionMemo>,
    graph: InteractionGraph,
    observations: HashMap<NodeId, Observation>,
    first_parent: HashMap<NodeId, NodeId>,
    position: Option<NodeId>,
    route: Option<(NodeId, Vec<Action>)>,
    stats: ExplorationStats,
    layer: LayerCounters,
    executed: usize,
}

#[derive(Default)]
struct LayerCounters {
    attempted: usize,
    skipped_diff: usize,
    skipped_block: usize,
}

enum Flow {
    Continue,
    Truncated,
}

impl<'a, E: Environment + ?Sized> Engine<'a, E> {
    /// Loads the start url and seeds the graph with its snapshot.
    ///
    /// With a memo the engine is lazy: it only moves the session when a
    /// transition is missing from the memo.
    pub(super) fn start(
        env: &'a mut E,
        config: &'a ExplorationConfig,
        memo: Option<&'a TransitionMemo>,
    ) -> Result<Self, ExploreError> {
        let obs = env.reset(&config.start_url)?;
        let root = obs.to_node(0)?;
        let root_id = root.id().clone();
        let graph = InteractionGraph::new(config.domain.clone(), root);
        let records = vec![DepthRecord {
            depth: 0,
            cumulative_nodes: 1,
            cumulative_time_secs: env.elapsed().as_secs_f64(),
            interactions_attempted: 0,
            interactions_skipped_by_diff: 0,
            interactions_skipped_by_blocklist: 0,
        }];
        Ok(Self {
            env,
            config,
            memo,
            graph,
            observations: HashMap::from([(root_id.clone(), obs)]),
            first_parent: HashMap::new(),
            position: Some(root_id),
            route: None,
            stats: ExplorationStats {
                domain: config.domain.clone(),
                records,
                navigation_actions: 0,
                truncated: false,
            },
            layer: LayerCounters::default(),
            executed: 1,
        })
    }

    /// Runs to completion; also returns the number of environment actions.
    pub(super) fn run(
        mut self,
    ) -> Result<(InteractionGraph, ExplorationStats, usize), ExploreError> {
        let mut frontier = vec![self.graph.root().clone()];
        for depth in 0..self.config.max_depth {
            if frontier.is_empty() {
                break;
            }
            let mut next = Vec::new();
            let mut flow = Flow::Continue;
            for node in &frontier {
                flow = self.expand(node, depth, &mut next)?;
                if matches!(flow, Flow::Truncated) {
                    break;
                }
            }
            let counters = std::mem::take(&mut self.layer);
            self.stats.records.push(DepthRecord {
                depth: depth + 1,
                cumulative_nodes: self.graph.node_count(),
                cumulative_time_secs: self.env.elapsed().as_secs_f64(),
                interactions_attempted: counters.attempted,
                interactions_skipped_by_diff: counters.skipped_diff,
                interactions_skipped_by_blocklist: counters.skipped_block,
            });
            if matches!(flow, Flow::Truncated) {
                self.stats.truncated = true;
                break;
            }
            frontier = next;
        }
        Ok((self.graph, self.stats, self.executed))
    }

    fn expand(
        &mut self,
        node: &NodeId,
        depth: u32,
        next: &mut Vec<NodeId>,
    ) -> Result<Flow, ExploreError> {
        self.route = None;
        if self.memo.is_none() {
            self.ensure_at(node)?;
        }
        let obs = self.observations[node].clone();
        let parent = self.first_parent.get(node).cloned();
        for element in interactive_elements(&obs, &self.config.roles) {
            if self.config.blocklist.is_blocked(element) {
                self.layer.skipped_block += 1;
                continue;
            }
            let action = Action::click(element.element.xpath.clone());
            if self.config.structural_diff {
                if let Some(p) = &parent {
                    let shared = self.graph.node(p).expect("parents are graph nodes").fingerprint().contains(&element.element.hash());
                    if shared {
                        match self.graph.transition(p, &action) {
                            Some(target) if target != p => {
                                let edge = TransitionEdge::new(node.clone(), action, target.clone());
                                self.graph.add_edge(edge)?;
                                self.layer.skipped_diff += 1;
                                continue;
                            }
                            _ => {}
                        }
                    }
                }
            }
            let child_obs = self.transition(node, &action)?;
            self.layer.attempted += 1;
            let child = child_obs.to_node(depth + 1)?;
            let child_id = child.id().clone();
            if !self.graph.contains(&child_id) {
                if self.graph.node_count() >= self.config.max_nodes {
                    return Ok(Flow::Truncated);
                }
                self.graph.add_node(child);
                self.first_parent.insert(child_id.clone(), node.clone());
                self.observations.insert(child_id.clone(), child_obs);
                next.push(child_id.clone());
            }
            self.graph
                .add_edge(TransitionEdge::new(node.clone(), action, child_id))?;
        }
        Ok(Flow::Continue)
    }

    /// Result of `action` at `node`, from the memo or by executing it.
    fn transition(&mut self, node: &NodeId, action: &Action) -> Result<Observation, ExploreError> {
        if let Some(obs) = self.memo.and_then(|m| m.get(&(node.clone(), action.clone()))) {
            return Ok(obs.clone());
        }
        self.ensure_at(node)?;
        self.executed += 1;
        let obs = self.env.perform(action).map_err(|e| self.frontier_error(node, e))?;
        let id = obs.to_node(0)?.id().clone();
        self.position = Some(id);
        Ok(obs)
    }

    /// Moves the session to `node` by replaying the shortest path from the
    /// root, then checks the live page is still that node.
    fn ensure_at(&mut self, node: &NodeId) -> Result<(), ExploreError> {
        if self.position.as_ref() == Some(node) {
            return Ok(());
        }
        self.position = None;
        let steps = match &self.route {
            Some((target, steps)) if target == node => steps.clone(),
            _ => {
                let root = self.graph.root().clone();
                let path = shortest_path(&self.graph, &root, node).map_err(|e| {
                    ExploreError::UnreachableFrontier {
                        node: node.clone(),
                        reason: e.to_string(),
                    }
                })?;
                self.route = Some((node.clone(), path.steps.clone()));
                path.steps
            }
        };
        if steps.first().is_none_or(|a| !a.is_goto()) {
            let root_url = self.graph.root_node().url().to_owned();
            self.env.reset(&root_url).map_err(|e| self.frontier_error(node, e))?;
            self.executed += 1;
            self.stats.navigation_actions += 1;
        }
        for step in &steps {
            self.env.perform(step).map_err(|e| self.frontier_error(node, e))?;
            self.executed += 1;
            self.stats.navigation_actions += 1;
        }
        let live = self.env.observe()?.to_node(0)?;
        if live.id() != node {
            return Err(ExploreError::UnreachableFrontier {
                node: node.clone(),
                reason: format!("replayed path landed on {}", live.id()),
            });
        }
        self.position = Some(node.clone());
        Ok(())
    }

    fn frontier_error(&self, node: &NodeId, e: EnvError) -> ExploreError {
        ExploreError::UnreachableFrontier {
            node: node.clone(),
            reason: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{BlockList, ElementSpec, SimulatedSite, SiteSpec, StateSpec};
    use crate::graph::Role;

    fn link(x: &str, to: &str) -> ElementSpec {
        ElementSpec::new(x, Role::Link, to).leading_to(to)
    }

    fn chain() -> SiteSpec {
        SiteSpec {
            domain: "chain".into(),
            start: "a".into(),
            states: vec![
                StateSpec::new("a", Some("http://c/a"), "A").with(link("/html/a/next", "b")),
                StateSpec::new("b", Some("http://c/b"), "B").with(link("/html/b/next", "c")),
                StateSpec::new("c", Some("http://c/c"), "C"),
            ],
        }
    }

    fn star(n: usize) -> SiteSpec {
        let mut hub = StateSpec::new("hub", Some("http://s/"), "Hub");
        let mut states = Vec::new();
        for i in 0..n {
            hub = hub.with(link(&format!("/html/body/a[{}]", i + 1), &format!("p{i}")));
            states.push(StateSpec::new(format!("p{i}"), Some(&format!("http://s/p{i}")), format!("P{i}")));
        }
        states.insert(0, hub);
        SiteSpec {
            domain: "star".into(),
            start: "hub".into(),
            states,
        }
    }

    fn run(spec: SiteSpec, depth: u32) -> (InteractionGraph, ExplorationStats) {
        let site = SimulatedSite::new(spec).unwrap();
        let start = site.start_url().unwrap();
        let mut s = site.session();
        let config = ExplorationConfig::new(site.spec().domain.clone(), start).with_depth(depth);
        explore(&mut s, &config).unwrap()
    }

    #[test]
    fn chain_topology() {
        let (g, stats) = run(chain(), 2);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let n: Vec<_> = stats.records.iter().map(|r| r.cumulative_nodes).collect();
        assert_eq!(n, [1, 2, 3]);
    }

    #[test]
    fn star_topology() {
        let (g, _) = run(star(10), 1);
        assert_eq!(g.node_count(), 11);
        assert_eq!(g.edge_count(), 10);
        assert!(g.nodes().all(|n| n.depth() <= 1));
    }

    #[test]
    fn depth_zero_is_root_only() {
        let (g, stats) = run(chain(), 0);
        assert_eq!(g.node_count(), 1);
        assert_eq!(stats.records.len(), 1);
    }

    #[test]
    fn node_cap_truncates() {
        let site = SimulatedSite::new(star(10)).unwrap();
        let mut s = site.session();
        let config = ExplorationConfig::new("star", "http://s/").with_depth(1).with_max_nodes(4);
        let (g, stats) = explore(&mut s, &config).unwrap();
        assert!(stats.truncated);
        assert_eq!(g.node_count(), 4);
    }

    #[test]
    fn unknown_start_url() {
        let site = SimulatedSite::new(chain()).unwrap();
        let mut s = site.session();
        let config = ExplorationConfig::new("chain", "http://c/zzz");
        assert!(matches!(
            explore(&mut s, &config),
            Err(ExploreError::Environment(EnvError::UnknownUrl(_)))
        ));
    }

    #[test]
    fn blocked_elements_never_clicked() {
        let mut spec = star(3);
        spec.states[0].elements[1].name = "Delete Account".into();
        spec.states[0].elements[2].hazard = true;
        let site = SimulatedSite::new(spec).unwrap();
        let mut s = site.session();
        let config = ExplorationConfig::new("star", "http://s/")
            .with_depth(2)
            .with_blocklist(BlockList::new(["(?i)delete"]).unwrap());
        let (g, stats) = explore(&mut s, &config).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(stats.skipped_by_blocklist(), 1);
        assert!(!s.action_log().contains(&Action::click("/html/body/a[2]")));
    }
}
