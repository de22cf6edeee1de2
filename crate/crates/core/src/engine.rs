//! Seeded replication loop: plan, energy debits, lossy uplink, metrics.
//!
//! Random draws within one replication happen in a fixed order: deployment
//! first, then for every round the protocol's election draws followed by one
//! channel draw per base-station packet in ascending sender id. Replication
//! `i` uses ChaCha8 stream `i` under the master seed, so replications are
//! independent of each other and of execution order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{EnergyError, RadioParams};
use crate::geometry::RegionId;
use crate::network::{Deployment, NodeId};
use crate::protocols::{execute_plan, EnergyLedger, Planner, Protocol, ProtocolError, RoundPlan};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

impl From<EnergyError> for SimError {
    fn from(e: EnergyError) -> Self {
        SimError::ConfigInvalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub protocol: Protocol,
    pub radio: RadioParams,
    pub nodes_per_region: usize,
    /// Probability that a base-station packet is lost.
    pub drop_prob: f64,
    pub max_rounds: u32,
    pub seed: u64,
    pub runs: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            protocol: Protocol::DreemMe,
            radio: RadioParams::default(),
            nodes_per_region: 10,
            drop_prob: 0.3,
            max_rounds: 5000,
            seed: 1,
            runs: 5,
        }
    }
}

impl SimConfig {
    pub fn with_protocol(protocol: Protocol) -> Self {
        Self {
            protocol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.radio.validate()?;
        if !(0.0..=1.0).contains(&self.drop_prob) {
            return Err(SimError::ConfigInvalid(format!(
                "drop probability {} is outside [0, 1]",
                self.drop_prob
            )));
        }
        if self.runs == 0 {
            return Err(SimError::ConfigInvalid("runs must be at least 1".into()));
        }
        if self.max_rounds == 0 {
            return Err(SimError::ConfigInvalid(
                "max rounds must be at least 1".into(),
            ));
        }
        if self.nodes_per_region == 0 {
            return Err(SimError::ConfigInvalid(
                "nodes per region must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn total_nodes(&self) -> usize {
        self.nodes_per_region * RegionId::all().count()
    }

    /// Random stream for replication `run_index`.
    pub fn rng_for_run(&self, run_index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(run_index as u64);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub round: u32,
    /// Nodes alive at the start of the round.
    pub alive: usize,
    pub dead: usize,
    pub sent_to_bs: usize,
    pub received_at_bs: usize,
    pub dropped: usize,
    /// Joules removed from batteries during the round.
    pub energy_consumed: f64,
    pub cluster_heads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeFate {
    pub node: NodeId,
    pub region: RegionId,
    /// Round during which the battery ran out.
    pub death_round: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub protocol: Protocol,
    pub run_index: usize,
    pub total_nodes: usize,
    pub rounds: Vec<RoundMetrics>,
    /// Round during which the first node died.
    pub first_node_death_round: Option<u32>,
    /// Round during which the last node died; `None` if the round cap hit first.
    pub all_dead_round: Option<u32>,
    pub fates: Vec<NodeFate>,
}

/// Everything that happened in one round, for observers.
pub struct RoundTrace<'a> {
    /// Node states at round start.
    pub before: &'a Deployment,
    pub plan: &'a RoundPlan,
    pub ledger: &'a EnergyLedger,
    pub after: &'a Deployment,
    pub metrics: &'a RoundMetrics,
}

/// Independent per-packet loss: one uniform draw per packet, dropped when the
/// draw falls below `drop_prob`. Returns `(received, dropped)`.
pub fn channel<R: Rng + ?Sized>(sent: usize, drop_prob: f64, rng: &mut R) -> (usize, usize) {
    let dropped = (0..sent)
        .filter(|_| rng.random::<f64>() < drop_prob)
        .count();
    (sent - dropped, dropped)
}

pub fn run_once(config: &SimConfig, run_index: usize) -> Result<RunResult, SimError> {
    run_observed(config, run_index, |_| {})
}

/// Runs one replication, handing every round to `observer`.
pub fn run_observed<F>(
    config: &SimConfig,
    run_index: usize,
    mut observer: F,
) -> Result<RunResult, SimError>
where
    F: FnMut(&RoundTrace<'_>),
{
    config.validate()?;
    let mut rng = config.rng_for_run(run_index);
    let mut deployment = Deployment::deploy(&config.radio, config.nodes_per_region, &mut rng);
    let total = deployment.len();
    let mut planner = Planner::new(config.protocol, total);

    let mut fates: Vec<NodeFate> = deployment
        .nodes
        .iter()
        .map(|n| NodeFate {
            node: n.id,
            region: n.region,
            death_round: None,
        })
        .collect();
    let mut rounds = Vec::new();
    let mut first_node_death_round = None;
    let mut all_dead_round = None;

    for round in 1..=config.max_rounds {
        let alive = deployment.alive_count();
        if alive == 0 {
            break;
        }
        let before = deployment.clone();
        let plan = planner.plan(&deployment, &mut rng)?;
        let ledger = execute_plan(&mut deployment, &plan, &config.radio)?;
        let sent = plan.bs_packets();
        let (received, dropped) = channel(sent, config.drop_prob, &mut rng);

        let metrics = RoundMetrics {
            round,
            alive,
            dead: total - alive,
            sent_to_bs: sent,
            received_at_bs: received,
            dropped,
            energy_consumed: ledger.consumed(),
            cluster_heads: plan.cluster_heads.len(),
        };

        for (fate, (was, now)) in fates
            .iter_mut()
            .zip(before.nodes.iter().zip(&deployment.nodes))
        {
            if was.alive && !now.alive {
                fate.death_round = Some(round);
                first_node_death_round.get_or_insert(round);
            }
        }
        if deployment.alive_count() == 0 {
            all_dead_round = Some(round);
        }

        observer(&RoundTrace {
            before: &before,
            plan: &plan,
            ledger: &ledger,
            after: &deployment,
            metrics: &metrics,
        });
        rounds.push(metrics);
    }

    Ok(RunResult {
        protocol: config.protocol,
        run_index,
        total_nodes: total,
        rounds,
        first_node_death_round,
        all_dead_round,
        fates,
    })
}

/// Runs `config.runs` independent replications in parallel, ordered by run index.
pub fn run_replications(config: &SimConfig) -> Result<Vec<RunResult>, SimError> {
    config.validate()?;
    (0..config.runs)
        .into_par_iter()
        .map(|i| run_once(config, i))
        .collect()
}
