use std::cmp::Ordering;
use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Embedder, MultiVector, RetrievalError, Scorer};
use crate::graph::{InteractionGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub node_id: NodeId,
    pub rows: MultiVector,
}

/// Embeddings of every node of one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalIndex {
    pub domain: String,
    pub embedder_tag: String,
    pub dim: usize,
    entries: Vec<IndexEntry>,
}

impl RetrievalIndex {
    /// Checks dims and id uniqueness.
    pub fn from_entries(
        domain: impl Into<String>,
        embedder_tag: impl Into<String>,
        dim: usize,
        entries: Vec<IndexEntry>,
    ) -> Result<Self, RetrievalError> {
        let index = Self {
            domain: domain.into(),
            embedder_tag: embedder_tag.into(),
            dim,
            entries,
        };
        index.check()?;
        Ok(index)
    }

    fn check(&self) -> Result<(), RetrievalError> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if e.rows.dim() != self.dim {
                return Err(RetrievalError::MalformedIndex(format!(
                    "entry {} has dim {}, index dim is {}",
                    e.node_id,
                    e.rows.dim(),
                    self.dim
                )));
            }
            if !seen.insert(&e.node_id) {
                return Err(RetrievalError::MalformedIndex(format!(
                    "duplicate entry {}",
                    e.node_id
                )));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.entries.iter().map(|e| &e.node_id)
    }

    /// Pretty JSON; floats are written in shortest round-trip form.
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("indexes always serialize");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, RetrievalError> {
        let index: Self = serde_json::from_slice(bytes)
            .map_err(|e| RetrievalError::MalformedIndex(e.to_string()))?;
        index.check()?;
        Ok(index)
    }

    pub fn load(path: &Path) -> Result<Self, RetrievalError> {
        let bytes = std::fs::read(path)
            .map_err(|e| RetrievalError::MalformedIndex(format!("{}: {e}", path.display())))?;
        Self::from_json(&bytes)
    }
}

/// Embeds every node's rendering, in ascending node-id order.
pub fn build_index(
    graph: &InteractionGraph,
    embedder: &dyn Embedder,
) -> Result<RetrievalIndex, RetrievalError> {
    if graph.node_count() == 0 {
        return Err(RetrievalError::EmptyGraph);
    }
    let mut entries = Vec::with_capacity(graph.node_count());
    let mut dim = 0;
    for node in graph.nodes() {
        let rows = embedder.embed(node.rendering())?;
        dim = rows.dim();
        entries.push(IndexEntry {
            node_id: node.id().clone(),
            rows,
        });
    }
    RetrievalIndex::from_entries(graph.domain(), embedder.tag(), dim, entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub node_id: NodeId,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

fn by_score_then_id(a: &(f64, &NodeId), b: &(f64, &NodeId)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

/// Scores every entry against an already embedded query and returns the best
/// `min(k, len)` in descending score order, ties by ascending node id.
pub fn rank(
    index: &RetrievalIndex,
    query: &MultiVector,
    k: usize,
    scorer: Scorer,
) -> Result<Vec<Candidate>, RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    let mut scored = index
        .entries
        .iter()
        .map(|e| Ok((scorer.score(query, &e.rows)?, &e.node_id)))
        .collect::<Result<Vec<_>, RetrievalError>>()?;
    let k = k.min(scored.len());
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, by_score_then_id);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_score_then_id);
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (score, id))| Candidate {
            node_id: id.clone(),
            score,
            rank: i + 1,
        })
        .collect())
}

/// Top-`k` nodes for a text query under late-interaction scoring.
pub fn retrieve_topk(
    index: &RetrievalIndex,
    query: &str,
    k: usize,
    embedder: &dyn Embedder,
) -> Result<Vec<Candidate>, RetrievalError> {
    let tag = embedder.tag();
    if tag != index.embedder_tag {
        return Err(RetrievalError::EmbedderMismatch {
            index: index.embedder_tag.clone(),
            query: tag,
        });
    }
    if k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    let q = embedder.embed(query)?;
    rank(index, &q, k, Scorer::LateInteraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ElementRef, PageNode, Role};
    use crate::retrieval::HashEmbedder;

    fn graph() -> InteractionGraph {
        let page = |url: &str, title: &str, names: &[&str]| {
            let els: Vec<ElementRef> = names
                .iter()
                .enumerate()
                .map(|(i, n)| ElementRef::new(format!("/html/body/a[{}]", i + 1), Role::Link, *n).unwrap())
                .collect();
            let rendering = crate::env::render(title, &els);
            PageNode::new(url, title, els, rendering, 0).unwrap()
        };
        let mut g = InteractionGraph::new("shop", page("http://s/", "Dashboard", &["Orders", "Catalog"]));
        g.add_node(page("http://s/orders", "Orders", &["Invoice"]));
        g.add_node(page("http://s/catalog", "Catalog products", &["Edit product"]));
        g
    }

    #[test]
    fn one_entry_per_node() {
        let g = graph();
        let idx = build_index(&g, &HashEmbedder::default()).unwrap();
        assert_eq!(idx.len(), 3);
        assert!(idx.node_ids().eq(g.node_ids()));
    }

    #[test]
    fn rebuild_is_byte_identical_and_round_trips() {
        let g = graph();
        let a = build_index(&g, &HashEmbedder::default()).unwrap().to_json();
        let b = build_index(&g, &HashEmbedder::default()).unwrap().to_json();
        assert_eq!(a, b);
        let back = RetrievalIndex::from_json(&a).unwrap();
        assert_eq!(back.to_json(), a);
    }

    #[test]
    fn exhaustive_k_sorts_everything() {
        let g = graph();
        let e = HashEmbedder::default();
        let idx = build_index(&g, &e).unwrap();
        let c = retrieve_topk(&idx, "edit product", 10, &e).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.windows(2).all(|w| w[0].score >= w[1].score));
        assert_eq!(c.iter().map(|c| c.rank).collect::<Vec<_>>(), [1, 2, 3]);
        let catalog = g.nodes().find(|n| n.title() == "Catalog products").unwrap();
        assert_eq!(&c[0].node_id, catalog.id());
    }

    #[test]
    fn embedder_mismatch_and_bad_k() {
        let g = graph();
        let idx = build_index(&g, &HashEmbedder::default()).unwrap();
        assert!(matches!(
            retrieve_topk(&idx, "x", 3, &HashEmbedder::new(16, 1)),
            Err(RetrievalError::EmbedderMismatch { .. })
        ));
        assert!(matches!(
            retrieve_topk(&idx, "x", 0, &HashEmbedder::default()),
            Err(RetrievalError::InvalidK)
        ));
    }

    #[test]
    fn malformed_index_rejected() {
        let g = graph();
        let idx = build_index(&g, &HashEmbedder::default()).unwrap();
        let mut entries = idx.entries().to_vec();
        entries.push(entries[0].clone());
        assert!(RetrievalIndex::from_entries("shop", idx.embedder_tag.clone(), 16, entries).is_err());
        assert!(RetrievalIndex::from_json(b"{\"domain\":").is_err());
    }
}
