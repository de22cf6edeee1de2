//! Command-line driver: runs replications per protocol and writes per-run
//! CSVs, aggregate CSVs and `manifest.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::energy::RadioParams;
use crate::engine::{run_replications, RunResult, SimConfig, SimError};
use crate::protocols::Protocol;
use crate::stats::{aggregate, AggregateSeries, Metric, StatsError};

pub const RUN_HEADER: &str = "round,alive,dead,sent_to_bs,received_at_bs,dropped,energy_consumed_j";
pub const AGG_HEADER: &str = "round,mean,ci_low,ci_high,min,max,n";
pub const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] SimError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    fn io(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    DreemMe,
    Leach,
    LeachC,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::DreemMe => Protocol::DreemMe,
            ProtocolArg::Leach => Protocol::Leach,
            ProtocolArg::LeachC => Protocol::LeachC,
        }
    }
}

/// Simulate DREEM-ME, LEACH and a simplified LEACH-C over seeded replications.
#[derive(Debug, Clone, Parser)]
#[command(name = "dreem-sim", version)]
pub struct Args {
    /// Protocol to simulate; repeat for several. Defaults to all three.
    #[arg(long = "protocol", value_enum)]
    pub protocols: Vec<ProtocolArg>,
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub max_rounds: u32,
    /// Per-packet loss probability on the base-station hop.
    #[arg(long, default_value_t = 0.3)]
    pub drop_prob: f64,
    #[arg(long, default_value_t = 10)]
    pub nodes_per_region: usize,
    #[arg(long, default_value_t = 4000)]
    pub packet_bits: u64,
    /// Initial battery per node, joules.
    #[arg(long, default_value_t = 0.5)]
    pub init_energy: f64,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
}

impl Args {
    pub fn protocols(&self) -> Vec<Protocol> {
        let mut ps: Vec<Protocol> = if self.protocols.is_empty() {
            Protocol::ALL.to_vec()
        } else {
            self.protocols.iter().map(|&p| p.into()).collect()
        };
        ps.sort();
        ps.dedup();
        ps
    }

    pub fn config(&self, protocol: Protocol) -> SimConfig {
        SimConfig {
            protocol,
            radio: RadioParams {
                packet_bits: self.packet_bits,
                initial_energy: self.init_energy,
                ..RadioParams::default()
            },
            nodes_per_region: self.nodes_per_region,
            drop_prob: self.drop_prob,
            max_rounds: self.max_rounds,
            seed: self.seed,
            runs: self.runs,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub protocols: Vec<Protocol>,
    pub runs: usize,
    pub seed: u64,
    pub max_rounds: u32,
    pub drop_prob: f64,
    pub nodes_per_region: usize,
    pub radio: RadioParams,
    pub confidence: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolOutputs {
    pub label: &'static str,
    pub runs: Vec<PathBuf>,
    pub aggregates: BTreeMap<&'static str, PathBuf>,
    pub first_node_death_rounds: Vec<Option<u32>>,
    pub all_dead_rounds: Vec<Option<u32>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ConfigEcho,
    pub outputs: BTreeMap<Protocol, ProtocolOutputs>,
    pub wall_clock_seconds: f64,
}

pub fn run_csv(result: &RunResult) -> String {
    let mut s = String::with_capacity(48 * (result.rounds.len() + 1));
    s.push_str(RUN_HEADER);
    s.push('\n');
    for m in &result.rounds {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            m.round, m.alive, m.dead, m.sent_to_bs, m.received_at_bs, m.dropped, m.energy_consumed
        );
    }
    s
}

pub fn aggregate_csv(series: &AggregateSeries) -> String {
    let mut s = String::with_capacity(64 * (series.rows.len() + 1));
    s.push_str(AGG_HEADER);
    s.push('\n');
    for row in &series.rows {
        let m = &row.summary;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            row.round, m.mean, m.ci_low, m.ci_high, m.min, m.max, m.n
        );
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(CliError::io(path))
}

pub fn run(args: &Args) -> Result<OutputManifest, CliError> {
    let started = Instant::now();
    let protocols = args.protocols();
    for &p in &protocols {
        args.config(p).validate()?;
    }
    fs::create_dir_all(&args.out).map_err(CliError::io(&args.out))?;

    let mut outputs = BTreeMap::new();
    for &protocol in &protocols {
        let config = args.config(protocol);
        let results = run_replications(&config)?;

        let mut runs = Vec::with_capacity(results.len());
        for r in &results {
            let path = args
                .out
                .join(format!("{}_run{}.csv", protocol.slug(), r.run_index + 1));
            write_file(&path, &run_csv(r))?;
            runs.push(path);
        }
        let mut aggregates = BTreeMap::new();
        for metric in Metric::PLOTTED {
            let series = aggregate(&results, metric, CONFIDENCE)?;
            let path = args
                .out
                .join(format!("{}_agg_{}.csv", protocol.slug(), metric.name()));
            write_file(&path, &aggregate_csv(&series))?;
            aggregates.insert(metric.name(), path);
        }
        outputs.insert(
            protocol,
            ProtocolOutputs {
                label: protocol.label(),
                runs,
                aggregates,
                first_node_death_rounds: results.iter().map(|r| r.first_node_death_round).collect(),
                all_dead_rounds: results.iter().map(|r| r.all_dead_round).collect(),
            },
        );
    }

    let reference = args.config(Protocol::DreemMe);
    let manifest = OutputManifest {
        tool: "dreem-sim",
        version: env!("CARGO_PKG_VERSION"),
        config: ConfigEcho {
            protocols,
            runs: reference.runs,
            seed: reference.seed,
            max_rounds: reference.max_rounds,
            drop_prob: reference.drop_prob,
            nodes_per_region: reference.nodes_per_region,
            radio: reference.radio,
            confidence: CONFIDENCE,
        },
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let path = args.out.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&path, &json)?;
    Ok(manifest)
}
