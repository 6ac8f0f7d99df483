//! CSV outputs: per-round traces and benchmark curves.

use std::io::Write;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use stackelberg_core::harness::RegretTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub run_id: usize,
    pub round: usize,
    pub region_index: Option<usize>,
    pub expected_regret: f64,
    pub cumulative_regret: f64,
    pub realized_utility: f64,
}

pub fn write_traces<W: Write>(out: W, traces: &[RegretTrace]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for t in traces {
        for r in &t.rounds {
            w.serialize(TraceRow {
                run_id: t.replication,
                round: r.round,
                region_index: r.region_index,
                expected_regret: r.expected_regret,
                cumulative_regret: r.cumulative_regret,
                realized_utility: r.realized_utility,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_traces<R: std::io::Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// One benchmark curve point: mean cumulative regret with a 90% interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub learner: String,
    pub feedback: String,
    pub round: usize,
    pub mean_cumulative_regret: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}
