//! Plan and execute shortest paths, including to a page that only exists
//! behind a menu click.

use navgraph::env::{Environment, SimulatedSite};
use navgraph::explorer::{explore, ExplorationConfig};
use navgraph::fixtures::{self, state_node_id};
use navgraph::navigator::plan_teleport;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = fixtures::menu_site();
    let site = SimulatedSite::new(spec.clone())?;
    let config = ExplorationConfig::new("menu", site.start_url().unwrap());
    let (graph, _) = explore(&mut site.session(), &config)?;

    let profile = state_node_id(&spec, "profile")?;
    let help = state_node_id(&spec, "help")?;

    let from_help = plan_teleport(&graph, Some(&help), &profile)?;
    println!("help -> profile dialog:");
    for step in &from_help.steps {
        println!("  {step}");
    }

    // a page the graph has never seen: start with a goto
    let from_nowhere = plan_teleport(&graph, None, &profile)?;
    println!("unknown page -> profile dialog:");
    for step in &from_nowhere.steps {
        println!("  {step}");
    }

    let mut session = site.session();
    session.reset("http://menu.local/help")?;
    for step in &from_help.steps {
        session.perform(step)?;
    }
    let landed = session.observe()?.to_node(0)?;
    assert_eq!(landed.id(), &profile);
    println!("landed on {:?} after {} actions", landed.title(), from_help.len());
    Ok(())
}
