//! Per-round cluster formation and routing for DREEM-ME, LEACH and the
//! simplified centralized LEACH-C baseline, plus execution of a round plan
//! against the radio model.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{EnergyError, RadioParams};
use crate::geometry::{distance, nearby_regions, relay_target, Point, RegionId, Ring};
use crate::network::{Deployment, NodeId, NodeState};

/// Cluster heads elected per round by the LEACH-C baseline.
pub const LEACH_C_HEADS: usize = 9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("no node is alive")]
    EmptyNetwork,
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error("unknown protocol `{0}` (expected dreem-me, leach or leach-c)")]
    UnknownProtocol(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    DreemMe,
    Leach,
    LeachC,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::DreemMe, Protocol::Leach, Protocol::LeachC];

    /// Stable identifier used in file names and on the command line.
    pub fn slug(self) -> &'static str {
        match self {
            Protocol::DreemMe => "dreem-me",
            Protocol::Leach => "leach",
            Protocol::LeachC => "leach-c",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Protocol::DreemMe => "DREEM-ME",
            Protocol::Leach => "LEACH",
            Protocol::LeachC => "LEACH-C (simplified)",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Protocol {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.slug().eq_ignore_ascii_case(s))
            .ok_or_else(|| ProtocolError::UnknownProtocol(s.to_string()))
    }
}

/// Roles and links for one round, built from the alive snapshot at round start.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundPlan {
    /// All cluster heads, ascending.
    pub cluster_heads: Vec<NodeId>,
    /// Region → cluster head. Only DREEM-ME elects per region.
    pub region_heads: BTreeMap<RegionId, NodeId>,
    /// Member → cluster head.
    pub associations: BTreeMap<NodeId, NodeId>,
    /// Outer cluster head → middle cluster head.
    pub relay_edges: Vec<(NodeId, NodeId)>,
    /// Cluster heads sending one aggregated packet to the base station.
    pub bs_senders: Vec<NodeId>,
    /// Nodes sending their own packet straight to the base station.
    pub direct_senders: Vec<NodeId>,
}

impl RoundPlan {
    /// Packets addressed to the base station this round, before channel loss.
    pub fn bs_packets(&self) -> usize {
        self.bs_senders.len() + self.direct_senders.len()
    }

    /// Every base-station sender, ascending by node id.
    pub fn uplink_senders(&self) -> Vec<NodeId> {
        let mut all: Vec<_> = self
            .bs_senders
            .iter()
            .chain(&self.direct_senders)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }

    pub fn members_of(&self, head: NodeId) -> usize {
        self.associations.values().filter(|&&h| h == head).count()
    }

    /// Every node the plan gives a role to.
    pub fn participants(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.cluster_heads
            .iter()
            .chain(self.associations.keys())
            .chain(self.associations.values())
            .chain(self.relay_edges.iter().flat_map(|(a, b)| [a, b]))
            .chain(&self.bs_senders)
            .chain(&self.direct_senders)
            .copied()
    }
}

fn nearest_head(deployment: &Deployment, from: Point, heads: &[NodeId]) -> Option<NodeId> {
    let mut best: Option<(f64, NodeId)> = None;
    for &h in heads {
        let d = distance(from, deployment.node(h).position);
        // heads come in ascending id order, strict `<` keeps the lowest id on ties
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, h));
        }
    }
    best.map(|(_, h)| h)
}

fn highest_energy<'a>(nodes: impl Iterator<Item = &'a NodeState>) -> Option<NodeId> {
    let mut best: Option<&NodeState> = None;
    for n in nodes {
        if best.is_none_or(|b| n.energy > b.energy) {
            best = Some(n);
        }
    }
    best.map(|n| n.id)
}

/// DREEM-ME round plan.
///
/// Regions 2..=9 each elect their highest-energy alive node (lowest id on
/// ties). Region 1 nodes transmit directly to the base station. Middle-ring
/// members join their own region's head; outer-ring members join the nearest
/// head among their six nearby regions. Outer heads relay through the
/// radially aligned middle head, or go straight to the base station when that
/// region has no head.
pub fn dreem_plan(deployment: &Deployment) -> Result<RoundPlan, ProtocolError> {
    if deployment.alive_count() == 0 {
        return Err(ProtocolError::EmptyNetwork);
    }
    let mut plan = RoundPlan::default();

    for region in RegionId::all().filter(|r| r.ring() != Ring::Inner) {
        if let Some(head) = highest_energy(deployment.alive().filter(|n| n.region == region)) {
            plan.region_heads.insert(region, head);
        }
    }
    plan.cluster_heads = plan.region_heads.values().copied().collect();
    plan.cluster_heads.sort_unstable();

    for node in deployment.alive() {
        if plan.region_heads.get(&node.region) == Some(&node.id) {
            continue;
        }
        match node.region.ring() {
            Ring::Inner => plan.direct_senders.push(node.id),
            Ring::Middle => {
                let head = plan.region_heads[&node.region];
                plan.associations.insert(node.id, head);
            }
            Ring::Outer => {
                let mut candidates: Vec<NodeId> = nearby_regions(node.region)
                    .expect("outer region")
                    .iter()
                    .filter_map(|r| plan.region_heads.get(r).copied())
                    .collect();
                candidates.sort_unstable();
                let head = nearest_head(deployment, node.position, &candidates)
                    .expect("own region always has a head");
                plan.associations.insert(node.id, head);
            }
        }
    }

    for (&region, &head) in &plan.region_heads {
        match region.ring() {
            Ring::Middle => plan.bs_senders.push(head),
            Ring::Outer => {
                let target = relay_target(region).expect("outer region");
                match plan.region_heads.get(&target) {
                    Some(&relay) => plan.relay_edges.push((head, relay)),
                    None => plan.bs_senders.push(head),
                }
            }
            Ring::Inner => unreachable!("region 1 elects no head"),
        }
    }
    plan.bs_senders.sort_unstable();
    Ok(plan)
}

/// Rotation bookkeeping for LEACH's probabilistic election.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeachState {
    pub p: f64,
    pub round_index: u64,
    /// Nodes that have not yet served as head in the current epoch.
    pub eligible: Vec<bool>,
}

impl LeachState {
    pub fn new(p: f64, nodes: usize) -> Self {
        assert!(p > 0.0 && p <= 1.0, "head probability must lie in (0, 1]");
        Self {
            p,
            round_index: 0,
            eligible: vec![true; nodes],
        }
    }

    pub fn epoch_length(&self) -> u64 {
        ((1.0 / self.p).round() as u64).max(1)
    }

    /// Election threshold `p / (1 - p·(r mod epoch))` for an eligible node.
    pub fn threshold(&self) -> f64 {
        let phase = (self.round_index % self.epoch_length()) as f64;
        let denom = 1.0 - self.p * phase;
        if denom <= 0.0 {
            1.0
        } else {
            (self.p / denom).min(1.0)
        }
    }
}

impl Default for LeachState {
    fn default() -> Self {
        Self::new(0.1, 0)
    }
}

fn attach_to_nearest(deployment: &Deployment, plan: &mut RoundPlan) {
    if plan.cluster_heads.is_empty() {
        plan.direct_senders = deployment.alive().map(|n| n.id).collect();
        return;
    }
    for node in deployment.alive() {
        if plan.cluster_heads.binary_search(&node.id).is_ok() {
            continue;
        }
        let head = nearest_head(deployment, node.position, &plan.cluster_heads)
            .expect("non-empty head set");
        plan.associations.insert(node.id, head);
    }
    plan.bs_senders = plan.cluster_heads.clone();
}

/// LEACH round plan. Draws one uniform per alive eligible node in ascending
/// id order and advances the round counter.
pub fn leach_plan<R: Rng + ?Sized>(
    deployment: &Deployment,
    state: &mut LeachState,
    rng: &mut R,
) -> RoundPlan {
    if state.eligible.len() != deployment.len() {
        state.eligible.resize(deployment.len(), true);
    }
    if state.round_index.is_multiple_of(state.epoch_length()) {
        state.eligible.fill(true);
    }
    let threshold = state.threshold();
    let mut plan = RoundPlan::default();
    for node in deployment.alive() {
        if !state.eligible[node.id] {
            continue;
        }
        let u: f64 = rng.random();
        if u < threshold {
            plan.cluster_heads.push(node.id);
            state.eligible[node.id] = false;
        }
    }
    attach_to_nearest(deployment, &mut plan);
    state.round_index += 1;
    plan
}

/// Simplified centralized baseline: among alive nodes holding at least the
/// mean alive energy, the `LEACH_C_HEADS` richest become heads (lowest id on
/// ties); everyone else joins the nearest head.
pub fn leach_c_plan(deployment: &Deployment) -> Result<RoundPlan, ProtocolError> {
    let alive: Vec<&NodeState> = deployment.alive().collect();
    if alive.is_empty() {
        return Err(ProtocolError::EmptyNetwork);
    }
    let mean = alive.iter().map(|n| n.energy).sum::<f64>() / alive.len() as f64;
    let max = alive.iter().map(|n| n.energy).fold(f64::MIN, f64::max);
    let mut candidates: Vec<&NodeState> = alive
        .into_iter()
        .filter(|n| n.energy >= mean || n.energy == max)
        .collect();
    candidates.sort_by(|a, b| b.energy.total_cmp(&a.energy).then(a.id.cmp(&b.id)));
    let mut plan = RoundPlan {
        cluster_heads: candidates
            .iter()
            .take(LEACH_C_HEADS)
            .map(|n| n.id)
            .collect(),
        ..RoundPlan::default()
    };
    plan.cluster_heads.sort_unstable();
    attach_to_nearest(deployment, &mut plan);
    Ok(plan)
}

/// One energy debit as applied to a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Debit {
    pub node: NodeId,
    pub requested: f64,
    pub removed: f64,
}

/// Record of every debit applied while executing a plan.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    pub debits: Vec<Debit>,
}

impl EnergyLedger {
    /// Energy actually removed from batteries.
    pub fn consumed(&self) -> f64 {
        self.debits.iter().map(|d| d.removed).sum()
    }

    /// Energy the radio model charged, before clamping at empty batteries.
    pub fn requested(&self) -> f64 {
        self.debits.iter().map(|d| d.requested).sum()
    }

    fn charge(&mut self, deployment: &mut Deployment, node: NodeId, amount: f64) {
        let removed = deployment.debit(node, amount);
        self.debits.push(Debit {
            node,
            requested: amount,
            removed,
        });
    }
}

/// Applies a plan's energy costs in a fixed order:
///
/// 1. each member transmits to its head, the head receives;
/// 2. each head aggregates its members' packets plus its own;
/// 3. each relay edge: outer head transmits, middle head receives and folds
///    the packet in as one extra aggregated signal;
/// 4. base-station senders and direct senders transmit to the origin.
///
/// Every role in the plan is carried out even if a debit empties the node's
/// battery partway through the round.
pub fn execute_plan(
    deployment: &mut Deployment,
    plan: &RoundPlan,
    params: &RadioParams,
) -> Result<EnergyLedger, ProtocolError> {
    let mut ledger = EnergyLedger::default();
    let pos = |d: &Deployment, id: NodeId| d.node(id).position;

    let mut received: BTreeMap<NodeId, u64> = BTreeMap::new();
    for (&member, &head) in &plan.associations {
        let d = distance(pos(deployment, member), pos(deployment, head));
        ledger.charge(deployment, member, params.packet_tx(d)?);
        ledger.charge(deployment, head, params.packet_rx());
        *received.entry(head).or_default() += 1;
    }

    for &head in &plan.cluster_heads {
        let signals = received.get(&head).copied().unwrap_or(0) + 1;
        ledger.charge(deployment, head, params.packet_aggregation(signals));
    }

    for &(outer, middle) in &plan.relay_edges {
        let d = distance(pos(deployment, outer), pos(deployment, middle));
        ledger.charge(deployment, outer, params.packet_tx(d)?);
        ledger.charge(deployment, middle, params.packet_rx());
        ledger.charge(deployment, middle, params.packet_aggregation(1));
    }

    for &sender in plan.bs_senders.iter().chain(&plan.direct_senders) {
        let d = pos(deployment, sender).radius();
        ledger.charge(deployment, sender, params.packet_tx(d)?);
    }
    Ok(ledger)
}

/// Energy accounting for a DREEM-ME plan.
pub fn dreem_energy_round(
    deployment: &mut Deployment,
    plan: &RoundPlan,
    params: &RadioParams,
) -> Result<EnergyLedger, ProtocolError> {
    execute_plan(deployment, plan, params)
}

/// Energy accounting for a LEACH or LEACH-C plan (no relay edges).
pub fn leach_energy_round(
    deployment: &mut Deployment,
    plan: &RoundPlan,
    params: &RadioParams,
) -> Result<EnergyLedger, ProtocolError> {
    debug_assert!(plan.relay_edges.is_empty());
    execute_plan(deployment, plan, params)
}

/// Per-replication protocol state.
#[derive(Debug, Clone)]
pub enum Planner {
    DreemMe,
    Leach(LeachState),
    LeachC,
}

impl Planner {
    pub fn new(protocol: Protocol, nodes: usize) -> Self {
        match protocol {
            Protocol::DreemMe => Planner::DreemMe,
            Protocol::Leach => Planner::Leach(LeachState::new(0.1, nodes)),
            Protocol::LeachC => Planner::LeachC,
        }
    }

    pub fn plan<R: Rng + ?Sized>(
        &mut self,
        deployment: &Deployment,
        rng: &mut R,
    ) -> Result<RoundPlan, ProtocolError> {
        match self {
            Planner::DreemMe => dreem_plan(deployment),
            Planner::Leach(state) => {
                if deployment.alive_count() == 0 {
                    return Err(ProtocolError::EmptyNetwork);
                }
                Ok(leach_plan(deployment, state, rng))
            }
            Planner::LeachC => leach_c_plan(deployment),
        }
    }
}
