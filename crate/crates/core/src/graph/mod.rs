//! Interaction graph data model.
//!
//! Nodes are unique page observations keyed by [`NodeId`]; edges are
//! `(source, action, target)` transitions. Edge storage is ordered, so
//! iteration (and therefore serialization) is canonical.

mod hashing;
mod path;
mod persist;
mod url;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hashing::{
    hash_element, node_identity, structural_diff, ElementHash, NodeId, StructuralFingerprint,
};
pub use path::{entry_path, shortest_path, ActionPath};
pub use persist::{deserialize_graph, serialize_graph, SCHEMA_VERSION};
pub use url::normalize_url;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("xpath must not be empty")]
    EmptyXpath,
    #[error("xpath {0:?} must start with '/'")]
    RelativeXpath(String),
    #[error("not a 32-character lowercase hex digest: {0:?}")]
    InvalidDigest(String),
    #[error("edge endpoint {0} is not in the graph")]
    UnknownEndpoint(NodeId),
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("no path from {origin} to {destination}")]
    Unreachable { origin: NodeId, destination: NodeId },
    #[error("graph schema version {found} is not supported (expected {expected})")]
    SchemaMismatch { found: i64, expected: i64 },
    #[error("malformed graph payload: {0}")]
    MalformedPayload(String),
}

/// Accessibility roles understood by the environment and the explorer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Link,
    Button,
    Menuitem,
    Tab,
    Checkbox,
    Radio,
    Switch,
    Option,
    Combobox,
    Textbox,
    Heading,
    Text,
    Image,
    Listitem,
}

impl Role {
    pub const ALL: [Role; 14] = [
        Role::Link,
        Role::Button,
        Role::Menuitem,
        Role::Tab,
        Role::Checkbox,
        Role::Radio,
        Role::Switch,
        Role::Option,
        Role::Combobox,
        Role::Textbox,
        Role::Heading,
        Role::Text,
        Role::Image,
        Role::Listitem,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Link => "link",
            Role::Button => "button",
            Role::Menuitem => "menuitem",
            Role::Tab => "tab",
            Role::Checkbox => "checkbox",
            Role::Radio => "radio",
            Role::Switch => "switch",
            Role::Option => "option",
            Role::Combobox => "combobox",
            Role::Textbox => "textbox",
            Role::Heading => "heading",
            Role::Text => "text",
            Role::Image => "image",
            Role::Listitem => "listitem",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown role {s:?}"))
    }
}

/// One element of a structural observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRef {
    pub xpath: String,
    pub role: Role,
    #[serde(default)]
    pub name: String,
}

impl ElementRef {
    pub fn new(
        xpath: impl Into<String>,
        role: Role,
        name: impl Into<String>,
    ) -> Result<Self, GraphError> {
        let xpath = xpath.into();
        validate_xpath(&xpath)?;
        Ok(Self {
            xpath,
            role,
            name: name.into(),
        })
    }

    pub fn hash(&self) -> ElementHash {
        hash_element(&self.xpath).expect("ElementRef xpath is validated non-empty")
    }
}

pub(crate) fn validate_xpath(xpath: &str) -> Result<(), GraphError> {
    if xpath.is_empty() {
        Err(GraphError::EmptyXpath)
    } else if !xpath.starts_with('/') {
        Err(GraphError::RelativeXpath(xpath.to_owned()))
    } else {
        Ok(())
    }
}

/// A unique page observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageNode {
    id: NodeId,
    url: String,
    url_addressable: bool,
    title: String,
    fingerprint: StructuralFingerprint,
    elements: Vec<ElementRef>,
    rendering: String,
    depth: u32,
}

impl PageNode {
    /// Builds a node from its observed parts, hashing every element.
    ///
    /// `url` is normalized; an empty url marks the node as not URL-addressable.
    pub fn new(
        url: &str,
        title: impl Into<String>,
        elements: Vec<ElementRef>,
        rendering: impl Into<String>,
        depth: u32,
    ) -> Result<Self, GraphError> {
        for e in &elements {
            validate_xpath(&e.xpath)?;
        }
        let url = normalize_url(url);
        let fingerprint: StructuralFingerprint = elements.iter().map(ElementRef::hash).collect();
        let id = node_identity(&fingerprint, &url);
        Ok(Self {
            id,
            url_addressable: !url.is_empty(),
            url,
            title: title.into(),
            fingerprint,
            elements,
            rendering: rendering.into(),
            depth,
        })
    }

    pub fn id(&self) -> &NodeId {
        &self.id
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn url_addressable(&self) -> bool {
        self.url_addressable
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn fingerprint(&self) -> &StructuralFingerprint {
        &self.fingerprint
    }

    pub fn elements(&self) -> &[ElementRef] {
        &self.elements
    }

    pub fn rendering(&self) -> &str {
        &self.rendering
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn set_depth(&mut self, depth: u32) {
        self.depth = depth;
    }

    /// Checks the stored id, addressability flag and fingerprint against the
    /// node's url and elements.
    pub(crate) fn check_consistency(&self) -> Result<(), String> {
        if self.url_addressable == self.url.is_empty() {
            return Err(format!("node {}: url_addressable disagrees with url", self.id));
        }
        let mut recomputed = StructuralFingerprint::new();
        for e in &self.elements {
            validate_xpath(&e.xpath).map_err(|err| format!("node {}: {err}", self.id))?;
            recomputed.insert(e.hash());
        }
        if recomputed != self.fingerprint {
            return Err(format!("node {}: fingerprint disagrees with elements", self.id));
        }
        if node_identity(&self.fingerprint, &self.url) != self.id {
            return Err(format!("node {}: id disagrees with fingerprint and url", self.id));
        }
        Ok(())
    }
}

/// An exploration-relevant action.
///
/// Variant order is part of path tie-breaking: between two actions leading to
/// the same node, a click sorts before a goto.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Action {
    Click { locator: String },
    Goto { target_url: String },
}

impl Action {
    pub fn click(locator: impl Into<String>) -> Self {
        Action::Click {
            locator: locator.into(),
        }
    }

    pub fn goto(url: &str) -> Self {
        Action::Goto {
            target_url: normalize_url(url),
        }
    }

    pub fn is_goto(&self) -> bool {
        matches!(self, Action::Goto { .. })
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        match self {
            Action::Click { locator } => validate_xpath(locator).map_err(|e| e.to_string()),
            Action::Goto { target_url } if target_url.is_empty() => {
                Err("goto action with empty target_url".into())
            }
            Action::Goto { .. } => Ok(()),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Click { locator } => write!(f, "click({locator})"),
            Action::Goto { target_url } => write!(f, "goto({target_url})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TransitionEdge {
    pub source: NodeId,
    pub action: Action,
    pub target: NodeId,
}

impl TransitionEdge {
    pub fn new(source: NodeId, action: Action, target: NodeId) -> Self {
        Self {
            source,
            action,
            target,
        }
    }
}

/// Directed multigraph of page observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    domain: String,
    root: NodeId,
    nodes: BTreeMap<NodeId, PageNode>,
    out: BTreeMap<NodeId, BTreeSet<(Action, NodeId)>>,
    preds: BTreeMap<NodeId, BTreeSet<NodeId>>,
    edge_count: usize,
}

impl InteractionGraph {
    /// A graph holding only `root`.
    pub fn new(domain: impl Into<String>, root: PageNode) -> Self {
        let root_id = root.id.clone();
        let mut nodes = BTreeMap::new();
        nodes.insert(root_id.clone(), root);
        Self {
            domain: domain.into(),
            root: root_id,
            nodes,
            out: BTreeMap::new(),
            preds: BTreeMap::new(),
            edge_count: 0,
        }
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn root(&self) -> &NodeId {
        &self.root
    }

    pub fn root_node(&self) -> &PageNode {
        &self.nodes[&self.root]
    }

    pub fn node(&self, id: &NodeId) -> Option<&PageNode> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = &PageNode> {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    /// Edges in ascending `(source, action, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = TransitionEdge> + '_ {
        self.out.iter().flat_map(|(src, set)| {
            set.iter()
                .map(move |(a, t)| TransitionEdge::new(src.clone(), a.clone(), t.clone()))
        })
    }

    /// Outgoing `(action, target)` pairs of `id`, ascending.
    pub fn out_edges(&self, id: &NodeId) -> impl Iterator<Item = &(Action, NodeId)> {
        self.out.get(id).into_iter().flatten()
    }

    /// Distinct predecessors of `id`, ascending.
    pub fn predecessors(&self, id: &NodeId) -> impl Iterator<Item = &NodeId> {
        self.preds.get(id).into_iter().flatten()
    }

    /// Target of the recorded transition `(source, action, _)`, if any.
    pub fn transition(&self, source: &NodeId, action: &Action) -> Option<&NodeId> {
        self.out
            .get(source)?
            .iter()
            .find(|(a, _)| a == action)
            .map(|(_, t)| t)
    }

    pub fn has_edge(&self, edge: &TransitionEdge) -> bool {
        self.out
            .get(&edge.source)
            .is_some_and(|s| s.contains(&(edge.action.clone(), edge.target.clone())))
    }

    /// Inserts `node` unless a node with the same id exists.
    pub fn add_node(&mut self, node: PageNode) -> bool {
        if self.nodes.contains_key(&node.id) {
            return false;
        }
        self.nodes.insert(node.id.clone(), node);
        true
    }

    /// Inserts `edge` unless the identical triple exists.
    pub fn add_edge(&mut self, edge: TransitionEdge) -> Result<bool, GraphError> {
        for end in [&edge.source, &edge.target] {
            if !self.nodes.contains_key(end) {
                return Err(GraphError::UnknownEndpoint(end.clone()));
            }
        }
        let inserted = self
            .out
            .entry(edge.source.clone())
            .or_default()
            .insert((edge.action, edge.target.clone()));
        if inserted {
            self.edge_count += 1;
            self.preds.entry(edge.target).or_default().insert(edge.source);
        }
        Ok(inserted)
    }
}
