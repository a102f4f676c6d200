//! Delegate candidate selection to another process over JSON lines.
//!
//! The example re-runs itself with `--serve` as the selector: it reads one
//! request per line and answers with the best-ranked candidate whose
//! rendering mentions "invoice", or "None".

use std::io::{BufRead, Write};
use std::process::Command;

use navgraph::env::SimulatedSite;
use navgraph::explorer::{explore, ExplorationConfig};
use navgraph::fixtures;
use navgraph::navigator::{navigate, simulated_factory, DomainRegistry, ExternalSelector, NavigationRequest, ProcessTransport, SelectorRequest};
use navgraph::retrieval::{build_index, HashEmbedder};

fn serve() {
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout();
    for line in stdin.lock().lines() {
        let request: SelectorRequest = serde_json::from_str(&line.unwrap()).unwrap();
        let pick = request
            .candidates
            .iter()
            .find(|c| c.rendering.to_lowercase().contains("invoice"));
        let reply = match pick {
            Some(c) => serde_json::json!({"target_page": c.node_id, "reasoning": format!("rank {} mentions invoices", c.rank)}),
            None => serde_json::json!({"target_page": "None", "reasoning": "nothing about invoices"}),
        };
        writeln!(stdout, "{reply}").unwrap();
        stdout.flush().unwrap();
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    if std::env::args().any(|a| a == "--serve") {
        serve();
        return Ok(());
    }
    let dd = fixtures::dual_domain()?;
    let site = SimulatedSite::new(dd.cms)?;
    let config = ExplorationConfig::new("cms", site.start_url().unwrap());
    let (graph, _) = explore(&mut site.session(), &config)?;
    let embedder = HashEmbedder::default();
    let index = build_index(&graph, &embedder)?;
    let mut registry = DomainRegistry::new();
    registry.insert("cms", graph, index, simulated_factory(site))?;

    let mut child = Command::new(std::env::current_exe()?);
    child.arg("--serve");
    let mut selector = ExternalSelector::new(ProcessTransport::spawn(child)?);
    let request = NavigationRequest::new("cms", "order 000000104", "Print the invoice of order 000000104");
    let result = navigate(&registry, &request, &mut selector, &embedder)?;
    println!("external selector chose {:?} ({} actions)", result.final_observation.title, result.actions_executed);
    Ok(())
}
