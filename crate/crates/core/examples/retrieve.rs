//! Index a store admin panel and rank its pages for a few queries.

use navgraph::env::SimulatedSite;
use navgraph::explorer::{explore, ExplorationConfig};
use navgraph::fixtures;
use navgraph::retrieval::{build_index, rank, retrieve_topk, Embedder, HashEmbedder, Scorer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dd = fixtures::dual_domain()?;
    let site = SimulatedSite::new(dd.cms)?;
    let config = ExplorationConfig::new("cms", site.start_url().unwrap());
    let (graph, _) = explore(&mut site.session(), &config)?;

    let embedder = HashEmbedder::default();
    let index = build_index(&graph, &embedder)?;
    println!("{} pages indexed with {}", index.len(), index.embedder_tag);

    for query in ["edit product Fjord Kayak", "order 000000105", "bestsellers report"] {
        println!("\n{query:?}");
        for c in retrieve_topk(&index, query, 5, &embedder)? {
            let title = graph.node(&c.node_id).unwrap().title();
            println!("  {:>2}. {:.3}  {title}", c.rank, c.score);
        }
    }

    // the single-vector baseline for comparison
    let q = embedder.embed("edit product Fjord Kayak")?;
    println!("\nmean-pooled cosine:");
    for c in rank(&index, &q, 5, Scorer::Dense)? {
        println!("  {:>2}. {:.3}  {}", c.rank, c.score, graph.node(&c.node_id).unwrap().title());
    }
    Ok(())
}
