//! A two-site task: find an order's shipping address in the store admin,
//! then open directions to it on the map.

use navgraph::env::SimulatedSite;
use navgraph::explorer::{explore, ExplorationConfig};
use navgraph::fixtures;
use navgraph::navigator::{navigate, simulated_factory, DomainRegistry, FixtureSelector, KeywordSelector, NavigationRequest};
use navgraph::retrieval::{build_index, HashEmbedder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dd = fixtures::dual_domain()?;
    let embedder = HashEmbedder::default();
    let mut registry = DomainRegistry::new();
    for (spec, depth) in [(&dd.cms, 3), (&dd.map, 5)] {
        let site = SimulatedSite::new(spec.clone())?;
        let config = ExplorationConfig::new(spec.domain.clone(), site.start_url().unwrap()).with_depth(depth);
        let (graph, _) = explore(&mut site.session(), &config)?;
        let index = build_index(&graph, &embedder)?;
        registry.insert(spec.domain.clone(), graph, index, simulated_factory(site))?;
    }

    let task = dd.tasks.tasks.iter().find(|t| t.steps.len() == 2).unwrap();
    println!("task: {}", task.intent);
    let mut selector = FixtureSelector::new(&dd.tasks);
    for step in &task.steps {
        let request = NavigationRequest::new(step.domain.clone(), step.query.clone(), task.intent.clone());
        let result = navigate(&registry, &request, &mut selector, &embedder)?;
        println!(
            "  [{}] {:?} -> {:?} in {} actions",
            step.domain, step.query, result.final_observation.title, result.actions_executed
        );
        let address = result.final_observation.elements.iter().find(|e| e.element.name.starts_with("Ship to"));
        if let Some(a) = address {
            println!("      {}", a.element.name);
        }
    }

    // the keyword selector needs no ground truth
    let request = NavigationRequest::new("cms", "customer Dmitri Fox", "Update the address of Dmitri Fox");
    let result = navigate(&registry, &request, &mut KeywordSelector, &embedder)?;
    println!("keyword selector: {:?} in {} actions", result.final_observation.title, result.actions_executed);
    Ok(())
}
