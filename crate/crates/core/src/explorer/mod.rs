//! Heuristic graph construction.
//!
//! [`explore`] runs a breadth-first exploration that clicks every interactive
//! element of a page except those it already saw on the page's parent. Pages
//! that cannot be loaded by URL are reached by replaying a shortest path
//! through the partially built graph. [`incremental_update`] revalidates an
//! existing graph against a changed site and explores only what changed.
//!
//! Neither function consults an embedder or a selector.

mod bfs;
mod update;
mod velocity;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{BlockList, EnvError, Environment};
use crate::graph::{GraphError, NodeId, PageNode, Role};

pub use bfs::explore;
pub use update::{incremental_update, ChangeReport};
pub use velocity::{discovery_velocity, Velocity, VelocityError};

pub const DEFAULT_MAX_NODES: usize = 10_000;

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("invalid exploration config: {0}")]
    Config(String),
    #[error(transparent)]
    Environment(#[from] EnvError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot reach frontier node {node}: {reason}")]
    UnreachableFrontier { node: NodeId, reason: String },
    #[error("start url {0:?} no longer resolves")]
    RootVanished(String),
}

#[derive(Debug, Clone)]
pub struct ExplorationConfig {
    pub domain: String,
    pub start_url: String,
    pub max_depth: u32,
    pub roles: BTreeSet<Role>,
    pub blocklist: BlockList,
    pub max_nodes: usize,
    /// Restrict each page to elements absent from its first parent.
    pub structural_diff: bool,
}

impl ExplorationConfig {
    /// Depth 3, roles link/button/menuitem/tab, empty block list.
    pub fn new(domain: impl Into<String>, start_url: impl Into<String>) -> Self {
        Self {
            domain: domain.into(),
            start_url: start_url.into(),
            max_depth: 3,
            roles: [Role::Link, Role::Button, Role::Menuitem, Role::Tab].into(),
            blocklist: BlockList::default(),
            max_nodes: DEFAULT_MAX_NODES,
            structural_diff: true,
        }
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn with_roles(mut self, roles: impl IntoIterator<Item = Role>) -> Self {
        self.roles = roles.into_iter().collect();
        self
    }

    pub fn with_blocklist(mut self, blocklist: BlockList) -> Self {
        self.blocklist = blocklist;
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub fn with_structural_diff(mut self, enabled: bool) -> Self {
        self.structural_diff = enabled;
        self
    }

    pub fn validate(&self) -> Result<(), ExploreError> {
        if self.max_nodes == 0 {
            return Err(ExploreError::Config("max_nodes must be at least 1".into()));
        }
        if self.roles.is_empty() {
            return Err(ExploreError::Config("role set must not be empty".into()));
        }
        if self.start_url.is_empty() {
            return Err(ExploreError::Config("start url must not be empty".into()));
        }
        Ok(())
    }
}

/// Counters for one BFS layer. Record `d` describes the state after the
/// expansion of depth `d - 1` (record 0 is the root snapshot).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRecord {
    pub depth: u32,
    pub cumulative_nodes: usize,
    pub cumulative_time_secs: f64,
    pub interactions_attempted: usize,
    pub interactions_skipped_by_diff: usize,
    pub interactions_skipped_by_blocklist: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationStats {
    pub domain: String,
    pub records: Vec<DepthRecord>,
    /// Actions spent getting back to frontier nodes.
    pub navigation_actions: usize,
    /// Exploration stopped at `max_nodes`.
    pub truncated: bool,
}

impl ExplorationStats {
    pub fn interactions_attempted(&self) -> usize {
        self.records.iter().map(|r| r.interactions_attempted).sum()
    }

    pub fn skipped_by_diff(&self) -> usize {
        self.records.iter().map(|r| r.interactions_skipped_by_diff).sum()
    }

    pub fn skipped_by_blocklist(&self) -> usize {
        self.records
            .iter()
            .map(|r| r.interactions_skipped_by_blocklist)
            .sum()
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("stats always serialize");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_json(&bytes).map_err(std::io::Error::other)
    }
}

/// Snapshot of the session's current page with depth 0.
pub fn snapshot<E: Environment + ?Sized>(session: &E) -> Result<PageNode, ExploreError> {
    Ok(session.observe()?.to_node(0)?)
}
