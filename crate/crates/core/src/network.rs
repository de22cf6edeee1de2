//! Node state, deployment and energy bookkeeping for one replication.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::energy::RadioParams;
use crate::geometry::{sample_in_region, GeometryError, Point, RegionId, RegionSpec};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    pub id: NodeId,
    pub position: Point,
    pub region: RegionId,
    pub energy: f64,
    pub alive: bool,
}

impl NodeState {
    pub fn new(id: NodeId, position: Point, region: RegionId, energy: f64) -> Self {
        Self {
            id,
            position,
            region,
            energy,
            alive: energy > 0.0,
        }
    }

    /// Removes up to `amount` joules and returns what was actually removed.
    ///
    /// Energy floors at zero; the node is dead once it reaches zero. Debiting
    /// a node that died earlier in the same round removes nothing.
    pub fn debit(&mut self, amount: f64) -> f64 {
        debug_assert!(amount >= 0.0, "negative debit {amount}");
        let removed = amount.min(self.energy);
        self.energy -= removed;
        if self.energy <= 0.0 {
            self.energy = 0.0;
            self.alive = false;
        }
        removed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub nodes: Vec<NodeState>,
    pub nodes_per_region: usize,
}

impl Deployment {
    /// Places `nodes_per_region` nodes in each region, regions in ascending
    /// id order and nodes in ascending id order within a region.
    pub fn deploy<R: Rng + ?Sized>(
        params: &RadioParams,
        nodes_per_region: usize,
        rng: &mut R,
    ) -> Self {
        let mut nodes = Vec::with_capacity(nodes_per_region * RegionId::all().count());
        for region in RegionId::all() {
            let spec = RegionSpec::of(region);
            for _ in 0..nodes_per_region {
                let position = sample_in_region(&spec, rng);
                nodes.push(NodeState::new(
                    nodes.len(),
                    position,
                    region,
                    params.initial_energy,
                ));
            }
        }
        Self {
            nodes,
            nodes_per_region,
        }
    }

    /// Builds a deployment from hand-placed nodes.
    pub fn from_nodes(nodes: Vec<NodeState>) -> Self {
        debug_assert!(nodes.iter().enumerate().all(|(i, n)| n.id == i));
        Self {
            nodes,
            nodes_per_region: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &NodeState {
        &self.nodes[id]
    }

    pub fn debit(&mut self, id: NodeId, amount: f64) -> f64 {
        self.nodes[id].debit(amount)
    }

    pub fn alive(&self) -> impl Iterator<Item = &NodeState> + '_ {
        self.nodes.iter().filter(|n| n.alive)
    }

    pub fn alive_count(&self) -> usize {
        self.alive().count()
    }

    pub fn alive_in_region(&self, region: u8) -> Result<Vec<NodeId>, GeometryError> {
        let region = RegionId::new(region)?;
        Ok(self
            .alive()
            .filter(|n| n.region == region)
            .map(|n| n.id)
            .collect())
    }

    pub fn total_energy(&self) -> f64 {
        self.nodes.iter().map(|n| n.energy).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::region_of;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fresh(seed: u64, per_region: usize) -> Deployment {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Deployment::deploy(&RadioParams::default(), per_region, &mut rng)
    }

    #[test]
    fn default_deployment() {
        let d = fresh(1, 10);
        assert_eq!(d.len(), 90);
        for region in RegionId::all() {
            let ids = d.alive_in_region(region.get()).unwrap();
            assert_eq!(ids.len(), 10);
            assert!(ids.windows(2).all(|w| w[0] < w[1]));
        }
        for n in &d.nodes {
            assert_eq!(n.energy, 0.5);
            assert!(n.alive);
            assert_eq!(region_of(n.position), Ok(n.region));
        }
        // region-major id layout
        assert_eq!(d.node(0).region.get(), 1);
        assert_eq!(d.node(89).region.get(), 9);
    }

    #[test]
    fn one_per_region() {
        assert_eq!(fresh(1, 1).len(), 9);
    }

    #[test]
    fn deployment_is_deterministic() {
        assert_eq!(fresh(42, 10), fresh(42, 10));
        assert_ne!(fresh(42, 10), fresh(43, 10));
    }

    #[test]
    fn debit_rules() {
        let mut n = NodeState::new(0, Point::ORIGIN, RegionId::new(1).unwrap(), 0.5);
        assert_eq!(n.debit(0.0002), 0.0002);
        assert!((n.energy - 0.4998).abs() < 1e-15);
        assert!(n.alive);

        let before = n.clone();
        assert_eq!(n.debit(0.0), 0.0);
        assert_eq!(n, before);

        let mut n = NodeState::new(0, Point::ORIGIN, RegionId::new(1).unwrap(), 1e-5);
        assert_eq!(n.debit(2e-4), 1e-5);
        assert_eq!(n.energy, 0.0);
        assert!(!n.alive);
        assert_eq!(n.debit(2e-4), 0.0);

        let mut n = NodeState::new(0, Point::ORIGIN, RegionId::new(1).unwrap(), 3e-4);
        n.debit(3e-4);
        assert!(!n.alive);
    }

    #[test]
    fn region_queries() {
        let mut d = fresh(9, 10);
        for id in d.alive_in_region(3).unwrap() {
            d.debit(id, 1.0);
        }
        assert!(d.alive_in_region(3).unwrap().is_empty());
        assert_eq!(d.alive_count(), 80);
        assert_eq!(d.alive_in_region(10), Err(GeometryError::InvalidRegion(10)));
    }
}
