//! Round-based wireless sensor network simulator.
//!
//! A 50 m disk around the base station is split into nine regions. DREEM-ME
//! elects the highest-energy node of each outer region as cluster head, lets
//! outer-ring members join the nearest nearby head, relays outer heads through
//! the middle ring and has the inner region transmit directly. LEACH and a
//! simplified centralized LEACH-C serve as baselines. Every replication is
//! fully determined by the master seed and its run index.

pub mod cli;
pub mod energy;
pub mod engine;
pub mod geometry;
pub mod network;
pub mod protocols;
pub mod stats;

pub use energy::{EnergyError, RadioParams};
pub use engine::{
    channel, run_observed, run_once, run_replications, NodeFate, RoundMetrics, RoundTrace,
    RunResult, SimConfig, SimError,
};
pub use geometry::{
    distance, nearby_regions, region_of, relay_target, sample_in_region, GeometryError, Point,
    RegionId, RegionSpec, Ring,
};
pub use network::{Deployment, NodeId, NodeState};
pub use protocols::{
    dreem_energy_round, dreem_plan, execute_plan, leach_c_plan, leach_energy_round, leach_plan,
    EnergyLedger, LeachState, Planner, Protocol, ProtocolError, RoundPlan,
};
pub use stats::{aggregate, summarize, AggregateSeries, Metric, StatsError, Summary};
