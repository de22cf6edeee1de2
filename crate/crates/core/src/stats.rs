//! Per-round mean and Student-t confidence intervals across replications.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::engine::{RoundMetrics, RunResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("no replications to aggregate")]
    EmptyInput,
    #[error("confidence level {0} must lie strictly between 0 and 1")]
    InvalidConfidence(f64),
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Alive,
    Dead,
    SentToBs,
    ReceivedAtBs,
    Dropped,
    EnergyConsumed,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Alive,
        Metric::Dead,
        Metric::SentToBs,
        Metric::ReceivedAtBs,
        Metric::Dropped,
        Metric::EnergyConsumed,
    ];

    /// The four per-round series written as aggregate files.
    pub const PLOTTED: [Metric; 4] = [
        Metric::Dead,
        Metric::SentToBs,
        Metric::ReceivedAtBs,
        Metric::Dropped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Alive => "alive",
            Metric::Dead => "dead",
            Metric::SentToBs => "sent_to_bs",
            Metric::ReceivedAtBs => "received_at_bs",
            Metric::Dropped => "dropped",
            Metric::EnergyConsumed => "energy_consumed",
        }
    }

    pub fn value(self, m: &RoundMetrics) -> f64 {
        match self {
            Metric::Alive => m.alive as f64,
            Metric::Dead => m.dead as f64,
            Metric::SentToBs => m.sent_to_bs as f64,
            Metric::ReceivedAtBs => m.received_at_bs as f64,
            Metric::Dropped => m.dropped as f64,
            Metric::EnergyConsumed => m.energy_consumed,
        }
    }

    /// Value a terminated run contributes past its last round.
    fn padding(self, total_nodes: usize) -> f64 {
        match self {
            Metric::Dead => total_nodes as f64,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| StatsError::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Summary {
    pub fn half_width(&self) -> f64 {
        self.ci_high - self.mean
    }
}

/// Two-sided Student-t quantile `t(1 - (1 - confidence)/2, dof)`.
pub fn t_quantile(confidence: f64, dof: usize) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, dof as f64).expect("positive degrees of freedom");
    dist.inverse_cdf(1.0 - (1.0 - confidence) / 2.0)
}

/// Mean, t-interval and range of one sample. A single observation yields a
/// degenerate interval at that value.
pub fn summarize(values: &[f64], confidence: f64) -> Result<Summary, StatsError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::InvalidConfidence(confidence));
    }
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let half = if n == 1 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        t_quantile(confidence, n - 1) * var.sqrt() / (n as f64).sqrt()
    };
    Ok(Summary {
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        min,
        max,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub round: u32,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateSeries {
    pub metric: Metric,
    pub confidence: f64,
    pub rows: Vec<AggregateRow>,
}

/// Aggregates one metric across replications on the longest run's horizon.
///
/// Runs that ended early contribute padded rows (all nodes dead, no packets,
/// no energy), so every row has `n` equal to the number of runs. A run that
/// died out reaches one row past its last round, the first round with
/// nobody left, so the averaged dead-node curve closes at the node count.
pub fn aggregate(
    results: &[RunResult],
    metric: Metric,
    confidence: f64,
) -> Result<AggregateSeries, StatsError> {
    if results.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let horizon = results
        .iter()
        .map(|r| r.rounds.len() + usize::from(r.all_dead_round.is_some()))
        .max()
        .unwrap_or(0);
    let mut values = Vec::with_capacity(results.len());
    let mut rows = Vec::with_capacity(horizon);
    for i in 0..horizon {
        values.clear();
        values.extend(results.iter().map(|r| match r.rounds.get(i) {
            Some(m) => metric.value(m),
            None => metric.padding(r.total_nodes),
        }));
        rows.push(AggregateRow {
            round: i as u32 + 1,
            summary: summarize(&values, confidence)?,
        });
    }
    Ok(AggregateSeries {
        metric,
        confidence,
        rows,
    })
}
