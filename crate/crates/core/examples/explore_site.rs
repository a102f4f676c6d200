//! Explore a small site with a click-only menu and save its graph.
//!
//! ```text
//! cargo run --example explore_site
//! ```

use navgraph::env::SimulatedSite;
use navgraph::explorer::{explore, ExplorationConfig};
use navgraph::fixtures;
use navgraph::graph::{deserialize_graph, serialize_graph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let site = SimulatedSite::new(fixtures::menu_site())?;
    let config = ExplorationConfig::new("menu", site.start_url().unwrap()).with_depth(3);
    let mut session = site.session();
    let (graph, stats) = explore(&mut session, &config)?;

    println!("{} nodes, {} edges", graph.node_count(), graph.edge_count());
    for node in graph.nodes() {
        let url = if node.url_addressable() { node.url() } else { "(click only)" };
        println!("  depth {}  {:<28} {}", node.depth(), node.title(), url);
    }
    for edge in graph.edges() {
        let from = graph.node(&edge.source).unwrap().title();
        let to = graph.node(&edge.target).unwrap().title();
        println!("  {from} --{}--> {to}", edge.action);
    }
    println!(
        "{} clicks, {} skipped as already seen on the parent, {} navigation actions",
        stats.interactions_attempted(),
        stats.skipped_by_diff(),
        stats.navigation_actions
    );

    let bytes = serialize_graph(&graph);
    let back = deserialize_graph(&bytes)?;
    assert_eq!(serialize_graph(&back), bytes);
    let path = std::env::temp_dir().join("menu.graph.json");
    std::fs::write(&path, bytes)?;
    println!("graph written to {}", path.display());
    Ok(())
}
