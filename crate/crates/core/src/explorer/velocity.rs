//! Discovery velocity: new nodes per minute between consecutive depths.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ExplorationStats;

#[derive(Debug, Error, PartialEq)]
pub enum VelocityError {
    #[error("need at least two depth records, got {0}")]
    TooFewRecords(usize),
    #[error("no time elapsed between depth {} and depth {depth}", depth - 1)]
    DegenerateTimeline { depth: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    pub depth: u32,
    pub nodes_per_minute: f64,
}

/// `(N_d - N_{d-1}) / (T_d - T_{d-1})` for every `d >= 1`, in nodes per minute.
pub fn discovery_velocity(stats: &ExplorationStats) -> Result<Vec<Velocity>, VelocityError> {
    if stats.records.len() < 2 {
        return Err(VelocityError::TooFewRecords(stats.records.len()));
    }
    stats
        .records
        .windows(2)
        .map(|w| {
            let (prev, cur) = (&w[0], &w[1]);
            let dt = cur.cumulative_time_secs - prev.cumulative_time_secs;
            if dt <= 0.0 {
                return Err(VelocityError::DegenerateTimeline { depth: cur.depth });
            }
            let dn = cur.cumulative_nodes as f64 - prev.cumulative_nodes as f64;
            Ok(Velocity {
                depth: cur.depth,
                nodes_per_minute: dn / (dt / 60.0),
            })
        })
        .collect()
}
