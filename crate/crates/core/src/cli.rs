//! Command-line front end.
//!
//! Every command prints its result as JSON lines on stdout; tables and
//! diagnostics go to stderr. Exit codes are listed on [`CliError::exit_code`].

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::env::{BlockList, SimulatedSite, SiteSpec};
use crate::explorer::{
    discovery_velocity, explore, incremental_update, ExplorationConfig, ExplorationStats,
    ExploreError, VelocityError,
};
use crate::graph::{deserialize_graph, serialize_graph, shortest_path, GraphError, InteractionGraph, NodeId, Role};
use crate::navigator::{
    navigate, simulated_factory, DomainRegistry, ExternalSelector, FixtureSelector,
    HttpTransport, KeywordSelector, NavigateError, NavigationRequest, ProcessTransport, Selector,
    TaskFixture, DEFAULT_K, SELECTOR_CMD_ENV, SELECTOR_URL_ENV,
};
use crate::retrieval::{build_index, HashEmbedder, RetrievalError, RetrievalIndex, DEFAULT_DIM, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "navgraph", version, about = "Build, index and navigate interaction graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Explore a site breadth-first and write its graph and statistics.
    Explore(ExploreArgs),
    /// Embed every node of a graph into a retrieval index.
    Index(IndexArgs),
    /// Retrieve, select and teleport to one page.
    Navigate(NavigateArgs),
    /// Re-verify a graph against the live site and rewrite it.
    Update(UpdateArgs),
    /// Print the shortest action path between two nodes.
    Path(PathArgs),
    /// Print the discovery-velocity table of an exploration.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct CrawlArgs {
    /// Site spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Comma-separated roles to interact with.
    #[arg(long, value_delimiter = ',', default_values_t = [Role::Link, Role::Button, Role::Menuitem, Role::Tab])]
    pub roles: Vec<Role>,
    /// One regular expression per line, matched against element names,
    /// xpaths and target urls.
    #[arg(long)]
    pub blocklist: Option<PathBuf>,
    #[arg(long, default_value_t = crate::explorer::DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    /// Click every element, even ones already seen on the parent page.
    #[arg(long)]
    pub no_diff: bool,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub crawl: CrawlArgs,
    /// Graph output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Statistics output file [default: OUT with extension .stats.json].
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedderArgs {
    #[arg(long, default_value_t = DEFAULT_DIM)]
    pub dim: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

impl EmbedderArgs {
    fn embedder(&self) -> Result<HashEmbedder, CliError> {
        if self.dim == 0 {
            return Err(CliError::Usage("--dim must be positive".into()));
        }
        Ok(HashEmbedder::new(self.dim, self.seed))
    }
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub embedder: EmbedderArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectorKind {
    Keyword,
    Fixture,
    External,
}

#[derive(Debug, Args)]
pub struct NavigateArgs {
    /// Site spec the session runs on.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub index: PathBuf,
    /// Description of the wanted page.
    #[arg(long)]
    pub query: String,
    /// The overall task [default: the query].
    #[arg(long)]
    pub intent: Option<String>,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = SelectorKind::Keyword)]
    pub selector: SelectorKind,
    /// Ground-truth task file, required by the fixture selector.
    #[arg(long, required_if_eq("selector", "fixture"))]
    pub tasks: Option<PathBuf>,
    /// HTTP endpoint of an external selector.
    #[arg(long, env = SELECTOR_URL_ENV)]
    pub selector_url: Option<String>,
    /// Shell command of an external selector speaking JSON lines.
    #[arg(long, env = SELECTOR_CMD_ENV, conflicts_with = "selector_url")]
    pub selector_cmd: Option<String>,
    #[command(flatten)]
    pub embedder: EmbedderArgs,
}

#[derive(Debug, Args)]
pub struct UpdateArgs {
    #[command(flatten)]
    pub crawl: CrawlArgs,
    /// Graph to update.
    #[arg(long)]
    pub graph: PathBuf,
    /// Where to write the updated graph [default: overwrite GRAPH].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Full change report output file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub stats: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Explore(#[from] ExploreError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Navigate(NavigateError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Velocity(#[from] VelocityError),
}

impl From<NavigateError> for CliError {
    fn from(e: NavigateError) -> Self {
        match e {
            NavigateError::Retrieval(r) => CliError::Retrieval(r),
            NavigateError::ParseFailure(m) => CliError::Parse(m),
            other => CliError::Navigate(other),
        }
    }
}

impl CliError {
    /// | code | meaning |
    /// |------|---------|
    /// | 2 | bad flags, unreadable or unwritable file |
    /// | 3 | malformed input file |
    /// | 4 | exploration or update failed |
    /// | 5 | retrieval failed (embedder mismatch, bad k) |
    /// | 6 | navigation failed |
    /// | 7 | selector unavailable or misbehaving |
    /// | 8 | unknown node or no path |
    /// | 9 | not enough statistics |
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Parse(_) => 3,
            CliError::Explore(_) => 4,
            CliError::Retrieval(_) => 5,
            CliError::Navigate(
                NavigateError::SelectorUnavailable(_) | NavigateError::MalformedDecision(_),
            ) => 7,
            CliError::Navigate(_) => 6,
            CliError::Graph(_) => 8,
            CliError::Velocity(_) => 9,
        }
    }

    /// Short machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Parse(_) => "parse",
            CliError::Explore(_) => "explore",
            CliError::Retrieval(_) => "retrieval",
            CliError::Navigate(_) if self.exit_code() == 7 => "selector",
            CliError::Navigate(_) => "navigate",
            CliError::Graph(_) => "graph",
            CliError::Velocity(_) => "stats",
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Explore(a) => cmd_explore(&a, out),
        Command::Index(a) => cmd_index(&a, out),
        Command::Navigate(a) => cmd_navigate(&a, out),
        Command::Update(a) => cmd_update(&a, out),
        Command::Path(a) => cmd_path(&a, out),
        Command::Stats(a) => cmd_stats(&a, out),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: &mut dyn Write, value: serde_json::Value) -> Result<(), CliError> {
    writeln!(out, "{value}").map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{}: {e}", path.display()))
}

fn load_site(path: &Path) -> Result<SimulatedSite, CliError> {
    let spec = SiteSpec::from_json(&read(path)?).map_err(|e| parse_err(path, e))?;
    SimulatedSite::new(spec).map_err(|e| parse_err(path, e))
}

fn load_graph(path: &Path) -> Result<InteractionGraph, CliError> {
    deserialize_graph(&read(path)?).map_err(|e| parse_err(path, e))
}

fn load_index(path: &Path) -> Result<RetrievalIndex, CliError> {
    RetrievalIndex::from_json(&read(path)?).map_err(|e| parse_err(path, e))
}

fn crawl_config(a: &CrawlArgs, site: &SimulatedSite) -> Result<ExplorationConfig, CliError> {
    let start = site
        .start_url()
        .ok_or_else(|| parse_err(&a.spec, "start state has no url"))?;
    let mut config = ExplorationConfig::new(site.spec().domain.clone(), start)
        .with_depth(a.depth)
        .with_roles(a.roles.iter().copied())
        .with_max_nodes(a.max_nodes)
        .with_structural_diff(!a.no_diff);
    if let Some(path) = &a.blocklist {
        let text = String::from_utf8(read(path)?).map_err(|e| parse_err(path, e))?;
        config = config.with_blocklist(BlockList::parse(&text).map_err(|e| parse_err(path, e))?);
    }
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn sidecar(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.stats.json"))
}

fn print_velocity_table(stats: &ExplorationStats) {
    let velocity = discovery_velocity(stats).ok();
    eprintln!("{:>5} {:>8} {:>10} {:>12} {:>9} {:>9}", "depth", "nodes", "time_s", "nodes/min", "clicked", "skipped");
    for r in &stats.records {
        let v = velocity
            .as_ref()
            .and_then(|v| v.iter().find(|v| v.depth == r.depth))
            .map(|v| format!("{:.2}", v.nodes_per_minute))
            .unwrap_or_else(|| "-".into());
        eprintln!(
            "{:>5} {:>8} {:>10.1} {:>12} {:>9} {:>9}",
            r.depth,
            r.cumulative_nodes,
            r.cumulative_time_secs,
            v,
            r.interactions_attempted,
            r.interactions_skipped_by_diff + r.interactions_skipped_by_blocklist
        );
    }
}

pub fn cmd_explore(a: &ExploreArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let site = load_site(&a.crawl.spec)?;
    let config = crawl_config(&a.crawl, &site)?;
    let (graph, stats) = explore(&mut site.session(), &config)?;
    let stats_path = a.stats.clone().unwrap_or_else(|| sidecar(&a.out));
    write(&a.out, &serialize_graph(&graph))?;
    write(&stats_path, &stats.to_json())?;
    print_velocity_table(&stats);
    emit(
        out,
        json!({
            "command": "explore",
            "domain": graph.domain(),
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
            "truncated": stats.truncated,
            "interactions_attempted": stats.interactions_attempted(),
            "graph": a.out,
            "stats": stats_path,
        }),
    )
}

pub fn cmd_index(a: &IndexArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let embedder = a.embedder.embedder()?;
    let graph = load_graph(&a.graph)?;
    let index = build_index(&graph, &embedder)?;
    write(&a.out, &index.to_json())?;
    emit(
        out,
        json!({
            "command": "index",
            "domain": index.domain,
            "entries": index.len(),
            "embedder": index.embedder_tag,
            "index": a.out,
        }),
    )
}

fn selector_for(a: &NavigateArgs) -> Result<Box<dyn Selector>, CliError> {
    Ok(match a.selector {
        SelectorKind::Keyword => Box::new(KeywordSelector),
        SelectorKind::Fixture => {
            let path = a.tasks.as_ref().ok_or_else(|| CliError::Usage("--tasks is required".into()))?;
            let fixture = TaskFixture::from_json(&read(path)?).map_err(|e| parse_err(path, e))?;
            Box::new(FixtureSelector::new(&fixture))
        }
        SelectorKind::External => match (&a.selector_url, &a.selector_cmd) {
            (Some(url), _) => Box::new(ExternalSelector::new(HttpTransport::new(url.clone(), Duration::from_secs(60)))),
            (None, Some(cmd)) => Box::new(ExternalSelector::new(ProcessTransport::shell(cmd)?)),
            (None, None) => {
                return Err(CliError::Usage(format!(
                    "the external selector needs --selector-url ({SELECTOR_URL_ENV}) or --selector-cmd ({SELECTOR_CMD_ENV})"
                )))
            }
        },
    })
}

pub fn cmd_navigate(a: &NavigateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let embedder = a.embedder.embedder()?;
    let site = load_site(&a.spec)?;
    let graph = load_graph(&a.graph)?;
    let index = load_index(&a.index)?;
    let mut selector = selector_for(a)?;
    let domain = graph.domain().to_owned();
    let mut registry = DomainRegistry::new();
    registry.insert(domain.clone(), graph, index, simulated_factory(site))?;
    let intent = a.intent.clone().unwrap_or_else(|| a.query.clone());
    let request = NavigationRequest::new(domain.clone(), a.query.clone(), intent).with_k(a.k);
    let result = navigate(&registry, &request, selector.as_mut(), &embedder)?;
    eprintln!("teleported to {} in {} actions", result.final_observation.title, result.actions_executed);
    emit(
        out,
        json!({
            "command": "navigate",
            "domain": domain,
            "target": result.target,
            "actions_executed": result.actions_executed,
            "path": result.path.steps,
            "final_url": result.final_observation.url,
            "candidates": result.candidates_considered.iter().map(|c| &c.node_id).collect::<Vec<_>>(),
        }),
    )
}

pub fn cmd_update(a: &UpdateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let site = load_site(&a.crawl.spec)?;
    let config = crawl_config(&a.crawl, &site)?;
    let graph = load_graph(&a.graph)?;
    let (updated, report) = incremental_update(&mut site.session(), &graph, &config)?;
    let target = a.out.as_ref().unwrap_or(&a.graph);
    write(target, &serialize_graph(&updated))?;
    if let Some(path) = &a.report {
        let mut bytes = serde_json::to_vec_pretty(&report).expect("reports always serialize");
        bytes.push(b'\n');
        write(path, &bytes)?;
    }
    eprintln!("{} actions spent on verification and rebuild", report.actions_executed);
    let mut line = report.summary();
    line["command"] = json!("update");
    line["nodes"] = json!(updated.node_count());
    line["edges"] = json!(updated.edge_count());
    line["graph"] = json!(target);
    emit(out, line)
}

pub fn cmd_path(a: &PathArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let graph = load_graph(&a.graph)?;
    let id = |s: &str| NodeId::parse(s).map_err(|e| CliError::Usage(format!("{s:?}: {e}")));
    let (from, to) = (id(&a.from)?, id(&a.to)?);
    let path = shortest_path(&graph, &from, &to)?;
    emit(
        out,
        json!({
            "command": "path",
            "origin": path.origin,
            "destination": path.destination,
            "length": path.len(),
            "steps": path.steps,
        }),
    )
}

pub fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let stats = ExplorationStats::from_json(&read(&a.stats)?).map_err(|e| parse_err(&a.stats, e))?;
    let velocity = discovery_velocity(&stats)?;
    print_velocity_table(&stats);
    for r in &stats.records {
        let v = velocity.iter().find(|v| v.depth == r.depth).map(|v| v.nodes_per_minute);
        emit(
            out,
            json!({
                "depth": r.depth,
                "nodes": r.cumulative_nodes,
                "time_secs": r.cumulative_time_secs,
                "nodes_per_minute": v,
            }),
        )?;
    }
    Ok(())
}
