//! Collapse look-alike pages with a block list and keep destructive buttons
//! out of reach.

use navgraph::env::{BlockList, SimulatedSite};
use navgraph::explorer::{explore, ExplorationConfig};
use navgraph::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let site = SimulatedSite::new(fixtures::reddit_like(90, 2))?;
    let base = ExplorationConfig::new("reddit", site.start_url().unwrap()).with_depth(4);

    let (full, full_stats) = explore(&mut site.session(), &base)?;
    println!("full:     {:>4} nodes, {:>5} clicks", full.node_count(), full_stats.interactions_attempted());

    let rules = include_str!("../fixtures/skeleton.blocklist");
    let blocklist = BlockList::parse(rules)?;
    let (skeleton, stats) = explore(&mut site.session(), &base.clone().with_blocklist(blocklist))?;
    println!(
        "skeleton: {:>4} nodes, {:>5} clicks, {} elements blocked",
        skeleton.node_count(),
        stats.interactions_attempted(),
        stats.skipped_by_blocklist()
    );
    for node in skeleton.nodes() {
        println!("  {}", node.title());
    }
    Ok(())
}
