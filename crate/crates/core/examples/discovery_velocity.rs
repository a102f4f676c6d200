//! Watch discovery slow down and stop on a map site that saturates.

use navgraph::env::SimulatedSite;
use navgraph::explorer::{discovery_velocity, explore, ExplorationConfig};
use navgraph::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let site = SimulatedSite::new(fixtures::saturating_map())?;
    let config = ExplorationConfig::new("map", site.start_url().unwrap()).with_depth(6);
    let (_, stats) = explore(&mut site.session(), &config)?;
    let velocity = discovery_velocity(&stats)?;

    println!("depth  nodes  time (s)  nodes/min");
    println!("{:>5}  {:>5}  {:>8.0}  {:>9}", 0, stats.records[0].cumulative_nodes, stats.records[0].cumulative_time_secs, "-");
    for (r, v) in stats.records[1..].iter().zip(&velocity) {
        println!("{:>5}  {:>5}  {:>8.0}  {:>9.2}", r.depth, r.cumulative_nodes, r.cumulative_time_secs, v.nodes_per_minute);
    }
    let saturated = velocity.iter().find(|v| v.nodes_per_minute == 0.0);
    if let Some(v) = saturated {
        println!("saturated at depth {}", v.depth);
    }
    Ok(())
}
