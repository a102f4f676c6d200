pub mod cli;
pub mod env;
pub mod explorer;
pub mod fixtures;
pub mod graph;
pub mod navigator;
pub mod retrieval;
