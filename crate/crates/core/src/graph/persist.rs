//! Versioned JSON graph documents.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{GraphError, InteractionGraph, NodeId, PageNode, TransitionEdge};

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDocument {
    schema_version: i64,
    domain: String,
    root: NodeId,
    nodes: Vec<PageNode>,
    edges: Vec<TransitionEdge>,
}

/// Serializes to pretty-printed JSON with nodes and edges in ascending order.
///
/// The output is canonical: equal graphs serialize to equal bytes.
pub fn serialize_graph(graph: &InteractionGraph) -> Vec<u8> {
    let doc = GraphDocument {
        schema_version: SCHEMA_VERSION,
        domain: graph.domain.clone(),
        root: graph.root.clone(),
        nodes: graph.nodes().cloned().collect(),
        edges: graph.edges().collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("graph documents always serialize");
    out.push(b'\n');
    out
}

pub fn deserialize_graph(bytes: &[u8]) -> Result<InteractionGraph, GraphError> {
    let malformed = |e: &dyn std::fmt::Display| GraphError::MalformedPayload(e.to_string());
    let value: Value = serde_json::from_slice(bytes).map_err(|e| malformed(&e))?;
    match value.get("schema_version").and_then(Value::as_i64) {
        Some(SCHEMA_VERSION) => {}
        Some(found) => {
            return Err(GraphError::SchemaMismatch {
                found,
                expected: SCHEMA_VERSION,
            })
        }
        None => return Err(malformed(&"missing integer schema_version")),
    }
    let doc: GraphDocument = serde_json::from_value(value).map_err(|e| malformed(&e))?;

    let mut nodes = doc.nodes.into_iter();
    let mut pending = Vec::new();
    let mut root = None;
    for node in nodes.by_ref() {
        node.check_consistency().map_err(|e| malformed(&e))?;
        if node.id() == &doc.root && root.is_none() {
            root = Some(node);
        } else {
            pending.push(node);
        }
    }
    let root = root.ok_or_else(|| malformed(&format!("root {} is not among the nodes", doc.root)))?;
    let mut graph = InteractionGraph::new(doc.domain, root);
    for node in pending {
        let id = node.id().clone();
        if !graph.add_node(node) {
            return Err(malformed(&format!("duplicate node {id}")));
        }
    }
    for edge in doc.edges {
        edge.action.validate().map_err(|e| malformed(&e))?;
        match graph.add_edge(edge) {
            Ok(true) => {}
            Ok(false) => return Err(malformed(&"duplicate edge")),
            Err(GraphError::UnknownEndpoint(id)) => {
                return Err(malformed(&format!("edge endpoint {id} is not a node")))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Action, ElementRef, Role};

    fn sample() -> InteractionGraph {
        let e = |x: &str| ElementRef::new(x, Role::Link, x).unwrap();
        let root = PageNode::new("http://s/", "Home", vec![e("/a"), e("/b")], "Home", 0).unwrap();
        let child = PageNode::new("", "Menu", vec![e("/a"), e("/c")], "Menu", 1).unwrap();
        let mut g = InteractionGraph::new("s", root.clone());
        g.add_node(child.clone());
        g.add_edge(TransitionEdge::new(root.id().clone(), Action::click("/b"), child.id().clone()))
            .unwrap();
        g.add_edge(TransitionEdge::new(child.id().clone(), Action::click("/a"), child.id().clone()))
            .unwrap();
        g
    }

    #[test]
    fn round_trip_root_only() {
        let g = sample();
        let lone = InteractionGraph::new("s", g.root_node().clone());
        let bytes = serialize_graph(&lone);
        assert_eq!(deserialize_graph(&bytes).unwrap(), lone);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let g = sample();
        let bytes = serialize_graph(&g);
        let back = deserialize_graph(&bytes).unwrap();
        assert_eq!(back, g);
        assert_eq!(serialize_graph(&back), bytes);
    }

    #[test]
    fn truncated_payload_is_malformed() {
        let bytes = serialize_graph(&sample());
        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(
            deserialize_graph(cut),
            Err(GraphError::MalformedPayload(_))
        ));
    }

    #[test]
    fn schema_mismatch_detected() {
        let bytes = serialize_graph(&sample());
        let text = String::from_utf8(bytes).unwrap().replacen(
            "\"schema_version\": 1",
            "\"schema_version\": 7",
            1,
        );
        assert!(matches!(
            deserialize_graph(text.as_bytes()),
            Err(GraphError::SchemaMismatch { found: 7, .. })
        ));
    }

    #[test]
    fn tampered_id_rejected() {
        let g = sample();
        let text = String::from_utf8(serialize_graph(&g)).unwrap();
        let text = text.replace(
            "\"url\": \"\"",
            "\"url\": \"http://elsewhere/\"",
        );
        assert!(matches!(
            deserialize_graph(text.as_bytes()),
            Err(GraphError::MalformedPayload(_))
        ));
    }
}
