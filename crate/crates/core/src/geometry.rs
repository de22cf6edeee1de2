//! Field partition: a disk of radius 50 m centred on the base station, cut
//! into an inner disk (region 1), a middle ring of four quadrant sectors
//! (regions 2..=5) and an outer ring of four quadrant sectors (regions 6..=9).
//!
//! Radial intervals are `(r_inner, r_outer]`, with region 1 owning `[0, 20]`.
//! Angular intervals are half-open `[theta_start, theta_end)`, measured
//! counter-clockwise from the positive x axis. Middle region `k` covers the
//! quadrant `k - 2`, outer region `k` covers the quadrant `k - 6`, so region
//! 6 lies radially outward of region 2.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const INNER_RADIUS: f64 = 20.0;
pub const MIDDLE_RADIUS: f64 = 35.0;
pub const FIELD_RADIUS: f64 = 50.0;
pub const REGION_COUNT: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("point ({x}, {y}) lies outside the {FIELD_RADIUS} m field")]
    OutsideField { x: f64, y: f64 },
    #[error("invalid region id {0}")]
    InvalidRegion(u8),
}

/// Region identifier in `1..=9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RegionId(u8);

impl RegionId {
    pub fn new(id: u8) -> Result<Self, GeometryError> {
        if (1..=REGION_COUNT as u8).contains(&id) {
            Ok(Self(id))
        } else {
            Err(GeometryError::InvalidRegion(id))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = RegionId> {
        (1..=REGION_COUNT as u8).map(RegionId)
    }

    pub fn ring(self) -> Ring {
        match self.0 {
            1 => Ring::Inner,
            2..=5 => Ring::Middle,
            _ => Ring::Outer,
        }
    }

    pub fn is_outer(self) -> bool {
        self.ring() == Ring::Outer
    }

    pub fn spec(self) -> RegionSpec {
        RegionSpec::of(self)
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<u8> for RegionId {
    type Error = GeometryError;

    fn try_from(id: u8) -> Result<Self, Self::Error> {
        RegionId::new(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Inner,
    Middle,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    /// The base station position.
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self {
            x: r * theta.cos(),
            y: r * theta.sin(),
        }
    }

    pub fn radius(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle normalised to `[0, 2π)`.
    pub fn angle(self) -> f64 {
        let theta = self.y.atan2(self.x);
        if theta < 0.0 {
            // -0.0 and tiny negatives can round up to exactly TAU
            let wrapped = theta + TAU;
            if wrapped >= TAU {
                0.0
            } else {
                wrapped
            }
        } else {
            theta
        }
    }
}

/// Euclidean distance in metres.
pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Annular-sector bounds of one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub id: RegionId,
    pub r_inner: f64,
    pub r_outer: f64,
    pub theta_start: f64,
    pub theta_end: f64,
}

impl RegionSpec {
    pub fn of(id: RegionId) -> Self {
        let (r_inner, r_outer, quadrant) = match id.0 {
            1 => {
                return Self {
                    id,
                    r_inner: 0.0,
                    r_outer: INNER_RADIUS,
                    theta_start: 0.0,
                    theta_end: TAU,
                }
            }
            k @ 2..=5 => (INNER_RADIUS, MIDDLE_RADIUS, k - 2),
            k => (MIDDLE_RADIUS, FIELD_RADIUS, k - 6),
        };
        Self {
            id,
            r_inner,
            r_outer,
            theta_start: f64::from(quadrant) * FRAC_PI_2,
            theta_end: f64::from(quadrant + 1) * FRAC_PI_2,
        }
    }

    pub fn all() -> Vec<RegionSpec> {
        RegionId::all().map(RegionSpec::of).collect()
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.theta_end - self.theta_start) * (self.r_outer.powi(2) - self.r_inner.powi(2))
    }

    /// Direct containment test against the half-open bounds.
    pub fn contains(&self, p: Point) -> bool {
        let r = p.radius();
        let radial = if self.r_inner == 0.0 {
            r <= self.r_outer
        } else {
            r > self.r_inner && r <= self.r_outer
        };
        if !radial {
            return false;
        }
        let theta = p.angle();
        theta >= self.theta_start && theta < self.theta_end
    }

    /// Maps unit coordinates `(u, v) ∈ [0,1)²` to an area-uniform point.
    pub fn point_at(&self, u: f64, v: f64) -> Point {
        let r_in2 = self.r_inner * self.r_inner;
        let r = (r_in2 + u * (self.r_outer * self.r_outer - r_in2)).sqrt();
        let theta = self.theta_start + v * (self.theta_end - self.theta_start);
        Point::from_polar(r, theta)
    }
}

pub fn region_of(p: Point) -> Result<RegionId, GeometryError> {
    let r = p.radius();
    if r.is_nan() || r > FIELD_RADIUS {
        return Err(GeometryError::OutsideField { x: p.x, y: p.y });
    }
    if r <= INNER_RADIUS {
        return Ok(RegionId(1));
    }
    let quadrant = ((p.angle() / FRAC_PI_2) as u8).min(3);
    if r <= MIDDLE_RADIUS {
        Ok(RegionId(2 + quadrant))
    } else {
        Ok(RegionId(6 + quadrant))
    }
}

/// Draws an area-uniform point inside `region`.
///
/// Consumes two uniforms `(u, v)` per attempt. Draws that land exactly on a
/// boundary owned by a neighbouring region (u = 0 on an annulus, or a
/// rounding slip across a quadrant edge) are redrawn, so the result always
/// satisfies `region_of(p) == region.id`.
pub fn sample_in_region<R: Rng + ?Sized>(region: &RegionSpec, rng: &mut R) -> Point {
    loop {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let p = region.point_at(u, v);
        if region_of(p) == Ok(region.id) {
            return p;
        }
    }
}

/// Steps `k` by `offset` within the four-sector ring starting at `base`.
fn ring_step(base: u8, k: u8, offset: i8) -> u8 {
    base + ((k - base) as i8 + offset).rem_euclid(4) as u8
}

fn outer(region: RegionId) -> Result<u8, GeometryError> {
    if region.is_outer() {
        Ok(region.0)
    } else {
        Err(GeometryError::InvalidRegion(region.0))
    }
}

/// Middle-ring region an outer-ring cluster head relays through: 6→2, 7→3, 8→4, 9→5.
pub fn relay_target(outer_region: RegionId) -> Result<RegionId, GeometryError> {
    outer(outer_region).map(|k| RegionId(k - 4))
}

/// Regions whose cluster heads an outer-ring member may join: the radially
/// aligned middle sector, its two angular neighbours, the region itself and
/// its two outer-ring neighbours. Returned in ascending order.
pub fn nearby_regions(outer_region: RegionId) -> Result<[RegionId; 6], GeometryError> {
    let k = outer(outer_region)?;
    let m = k - 4;
    let mut ids = [
        m,
        ring_step(2, m, -1),
        ring_step(2, m, 1),
        k,
        ring_step(6, k, -1),
        ring_step(6, k, 1),
    ];
    ids.sort_unstable();
    Ok(ids.map(RegionId))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rid(k: u8) -> RegionId {
        RegionId::new(k).unwrap()
    }

    fn ids(rs: [RegionId; 6]) -> Vec<u8> {
        rs.iter().map(|r| r.get()).collect()
    }

    #[test]
    fn region_of_examples() {
        assert_eq!(region_of(Point::new(0.0, 0.0)), Ok(rid(1)));
        assert!(matches!(
            region_of(Point::new(60.0, 0.0)),
            Err(GeometryError::OutsideField { .. })
        ));
        // r = 40 in the outer ring, θ = π/2 opens the second quadrant
        assert_eq!(region_of(Point::new(0.0, 40.0)), Ok(rid(7)));
        assert_eq!(region_of(Point::from_polar(40.0, PI / 2.0)), Ok(rid(7)));
    }

    #[test]
    fn region_boundaries() {
        assert_eq!(region_of(Point::new(20.0, 0.0)), Ok(rid(1)));
        assert_eq!(region_of(Point::new(20.0001, 0.0)), Ok(rid(2)));
        assert_eq!(region_of(Point::new(35.0, 0.0)), Ok(rid(2)));
        assert_eq!(region_of(Point::new(50.0, 0.0)), Ok(rid(6)));
        assert_eq!(region_of(Point::new(-30.0, 0.0)), Ok(rid(4)));
        assert_eq!(region_of(Point::new(0.0, 30.0)), Ok(rid(3)));
        assert_eq!(region_of(Point::new(0.0, -30.0)), Ok(rid(5)));
        assert_eq!(region_of(Point::new(0.0, -45.0)), Ok(rid(9)));
        assert_eq!(region_of(Point::new(30.0, -1e-12)), Ok(rid(5)));
        assert_eq!(region_of(Point::new(30.0, -0.0)), Ok(rid(2)));
        assert!(region_of(Point::new(50.0, 0.001)).is_err());
    }

    #[test]
    fn region_specs_match_convention() {
        let r1 = RegionSpec::of(rid(1));
        assert_eq!((r1.r_inner, r1.r_outer), (0.0, 20.0));
        assert_eq!(r1.theta_end - r1.theta_start, TAU);
        for k in 2..=9 {
            let s = RegionSpec::of(rid(k));
            assert!((s.theta_end - s.theta_start - FRAC_PI_2).abs() < 1e-15);
            if k <= 5 {
                assert_eq!((s.r_inner, s.r_outer), (20.0, 35.0));
            } else {
                assert_eq!((s.r_inner, s.r_outer), (35.0, 50.0));
            }
        }
        let total: f64 = RegionSpec::all().iter().map(RegionSpec::area).sum();
        assert!((total - PI * 2500.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_region_ids() {
        assert_eq!(RegionId::new(0), Err(GeometryError::InvalidRegion(0)));
        assert_eq!(RegionId::new(10), Err(GeometryError::InvalidRegion(10)));
        assert_eq!(relay_target(rid(5)), Err(GeometryError::InvalidRegion(5)));
        assert_eq!(nearby_regions(rid(1)), Err(GeometryError::InvalidRegion(1)));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point::ORIGIN, Point::new(3.0, 4.0)), 5.0);
        let p = Point::new(12.5, -7.25);
        assert_eq!(distance(p, p), 0.0);
        assert_eq!(distance(Point::ORIGIN, Point::new(50.0, 0.0)), 50.0);
    }

    #[test]
    fn nearby_region_sets() {
        assert_eq!(ids(nearby_regions(rid(6)).unwrap()), vec![2, 3, 5, 6, 7, 9]);
        assert_eq!(ids(nearby_regions(rid(7)).unwrap()), vec![2, 3, 4, 6, 7, 8]);
        assert_eq!(ids(nearby_regions(rid(8)).unwrap()), vec![3, 4, 5, 7, 8, 9]);
        assert_eq!(ids(nearby_regions(rid(9)).unwrap()), vec![2, 4, 5, 6, 8, 9]);
    }

    /// Independent adjacency check: two sectors touch when their angular
    /// spans meet (sharing an edge or a corner) and their radial spans meet.
    #[test]
    fn nearby_regions_touch_the_outer_region() {
        let touches = |a: &RegionSpec, b: &RegionSpec| {
            let radial = a.r_inner <= b.r_outer && b.r_inner <= a.r_outer;
            let gap = |s: f64, e: f64, s2: f64, e2: f64| {
                let d = [(s - e2), (s2 - e)]
                    .iter()
                    .map(|x| x.rem_euclid(TAU))
                    .fold(f64::INFINITY, |m, x| m.min(x.min(TAU - x)));
                d < 1e-9 || (s < e2 && s2 < e)
            };
            radial && gap(a.theta_start, a.theta_end, b.theta_start, b.theta_end)
        };
        for k in 6..=9 {
            let me = RegionSpec::of(rid(k));
            let set = nearby_regions(rid(k)).unwrap();
            for other in RegionId::all().filter(|r| r.get() >= 2) {
                let expected = touches(&me, &other.spec());
                assert_eq!(set.contains(&other), expected, "region {k} vs {other}");
            }
        }
    }

    #[test]
    fn relay_targets() {
        assert_eq!(relay_target(rid(9)), Ok(rid(5)));
        assert_eq!(relay_target(rid(6)), Ok(rid(2)));
        assert_eq!(relay_target(rid(8)), Ok(rid(4)));
        assert_eq!(relay_target(rid(7)), Ok(rid(3)));
        for k in 6..=9 {
            let set = nearby_regions(rid(k)).unwrap();
            assert!(set.contains(&rid(k)));
            assert!(set.contains(&relay_target(rid(k)).unwrap()));
        }
    }

    #[test]
    fn point_at_corner() {
        for k in 1..=9 {
            let s = RegionSpec::of(rid(k));
            let p = s.point_at(0.0, 0.0);
            let q = Point::from_polar(s.r_inner, s.theta_start);
            assert!(distance(p, q) < 1e-12);
        }
    }

    #[test]
    fn inner_disk_mean_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = RegionSpec::of(rid(1));
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| sample_in_region(&spec, &mut rng).radius())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 40.0 / 3.0).abs() < 0.3, "mean radius {mean}");

        // rejection oracle: uniform square draws kept inside the disk
        let mut hits = 0usize;
        let mut sum = 0.0;
        while hits < n {
            let p = Point::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
            if p.radius() <= 20.0 {
                hits += 1;
                sum += p.radius();
            }
        }
        assert!((sum / n as f64 - mean).abs() < 0.4);
    }

    #[test]
    fn samples_stay_in_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=9 {
            let spec = RegionSpec::of(rid(k));
            for _ in 0..10_000 {
                let p = sample_in_region(&spec, &mut rng);
                assert_eq!(region_of(p), Ok(spec.id));
                assert!(spec.contains(p));
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = RegionSpec::of(rid(8));
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| sample_in_region(&spec, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn tiling_and_area_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let specs = RegionSpec::all();
        let mut counts = [0usize; REGION_COUNT];
        let n = 1_000_000usize;
        let mut drawn = 0;
        while drawn < n {
            let p = Point::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
            if p.radius() > FIELD_RADIUS {
                continue;
            }
            drawn += 1;
            let id = region_of(p).expect("inside field");
            let containing: Vec<_> = specs.iter().filter(|s| s.contains(p)).collect();
            assert_eq!(containing.len(), 1);
            assert_eq!(containing[0].id, id);
            counts[id.get() as usize - 1] += 1;
        }
        let disk = PI * 2500.0;
        let areas = [PI * 400.0, PI * 825.0 / 4.0, PI * 1275.0 / 4.0];
        for (i, &c) in counts.iter().enumerate() {
            let area = match i {
                0 => areas[0],
                1..=4 => areas[1],
                _ => areas[2],
            };
            assert!((specs[i].area() - area).abs() < 1e-9);
            let p = area / disk;
            let expected = n as f64 * p;
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            assert!(
                (c as f64 - expected).abs() < 3.0 * sd,
                "region {}: {c} vs {expected}",
                i + 1
            );
        }
    }
}
