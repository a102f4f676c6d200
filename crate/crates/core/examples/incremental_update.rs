//! Keep a graph current after the site changes.

use navgraph::env::SimulatedSite;
use navgraph::explorer::{explore, incremental_update, ExplorationConfig};
use navgraph::fixtures::{self, Mutation};
use navgraph::graph::serialize_graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let before = fixtures::menu_site();
    let site = SimulatedSite::new(before.clone())?;
    let config = ExplorationConfig::new("menu", site.start_url().unwrap());
    let (graph, _) = explore(&mut site.session(), &config)?;
    println!("cached graph: {} nodes, {} edges", graph.node_count(), graph.edge_count());

    let mut after = before;
    Mutation::DeletePage { id: "billing".into() }.apply(&mut after)?;
    Mutation::AddPage {
        from: "help".into(),
        id: "faq".into(),
        url: Some("http://menu.local/faq".into()),
        title: "Frequently asked questions".into(),
    }
    .apply(&mut after)?;

    let live = SimulatedSite::new(after)?;
    let (updated, report) = incremental_update(&mut live.session(), &graph, &config)?;
    println!("updated graph: {} nodes, {} edges", updated.node_count(), updated.edge_count());
    println!("change report: {}", report.summary());
    for id in &report.added_nodes {
        println!("  + {}", updated.node(id).unwrap().title());
    }
    for id in &report.removed_nodes {
        println!("  - {}", graph.node(id).unwrap().title());
    }

    let (fresh, _) = explore(&mut live.session(), &config)?;
    assert_eq!(serialize_graph(&fresh), serialize_graph(&updated));
    println!("identical to a fresh exploration");
    Ok(())
}
