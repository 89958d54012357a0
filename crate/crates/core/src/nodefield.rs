//! Random deployments in a disk, density bookkeeping, and a uniform-grid
//! spatial index for unit-disk neighborhoods.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::rng;
use crate::{Error, Result};

/// Nodes in a disk of radius `radius` around the origin. Index 0 is the
/// broadcast source at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeField {
    positions: Vec<Point2>,
    radius: f64,
    seed: u64,
}

/// Places `n − 1` nodes uniformly at random in the disk of radius `radius`,
/// plus the source at the origin.
pub fn sample_field(n: usize, radius: f64, seed: u64) -> Result<NodeField> {
    if n == 0 {
        return Err(Error::InvalidArgument("field needs at least one node"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument("field radius must be positive and finite"));
    }
    let mut positions = Vec::with_capacity(n);
    positions.push(Point2::ORIGIN);
    positions.extend((1..n as u64).map(|i| field_point(seed, i, radius)));
    Ok(NodeField { positions, radius, seed })
}

/// Position of node `i ≥ 1` in [`sample_field`], computed without building
/// the field.
pub fn field_point(seed: u64, i: u64, radius: f64) -> Point2 {
    let u = rng::unit_f64(rng::at(seed, 2 * i));
    let v = rng::unit_f64(rng::at(seed, 2 * i + 1));
    Point2::from_polar(radius * libm::sqrt(u), 2.0 * PI * v)
}

impl NodeField {
    /// Builds a field from explicit positions. The first position must be the origin.
    pub fn from_positions(positions: Vec<Point2>, radius: f64) -> Result<Self> {
        if positions.first() != Some(&Point2::ORIGIN) {
            return Err(Error::InvalidArgument("first node must sit at the origin"));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("field radius must be positive"));
        }
        if positions.iter().any(|p| !p.is_finite() || p.norm() > radius) {
            return Err(Error::InvalidArgument("node outside the field disk"));
        }
        Ok(Self { positions, radius, seed: 0 })
    }

    /// Field radius that gives density `rho` for `n` nodes.
    pub fn radius_for_density(n: usize, rho: f64) -> f64 {
        libm::sqrt(n as f64 / (PI * rho))
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `n / (π R²)`.
    pub fn density(&self) -> f64 {
        self.positions.len() as f64 / (PI * self.radius * self.radius)
    }

    /// Number of nodes within distance `r` of the origin (inclusive).
    pub fn count_within(&self, r: f64) -> usize {
        self.positions.iter().filter(|p| p.norm() <= r).count()
    }

    /// Occupancy of the six 60° wedges `{p : ½ ≤ ‖p − center‖ ≤ 1}`, each of
    /// area π/8. Wedge `k` spans angles `[60k°, 60(k+1)°)`.
    pub fn sector_occupancy(&self, center: Point2) -> [bool; 6] {
        let mut occupied = [false; 6];
        for &p in &self.positions {
            if let Some(k) = sector_of(center, p) {
                occupied[k] = true;
            }
        }
        occupied
    }
}

const SECTOR_EPS: f64 = 1e-12;

/// Index of the wedge around `center` that contains `p`, if any.
pub fn sector_of(center: Point2, p: Point2) -> Option<usize> {
    let v = p - center;
    let r = v.norm();
    if !(0.5 - SECTOR_EPS..=1.0 + SECTOR_EPS).contains(&r) {
        return None;
    }
    let mut angle = libm::atan2(v.y, v.x);
    if angle < 0.0 {
        angle += 2.0 * PI;
    }
    Some(((angle / (PI / 3.0)) as usize).min(5))
}

/// Buckets points into square cells for radius queries.
#[derive(Debug, Clone)]
pub struct GridIndex {
    origin: Point2,
    cell: f64,
    cols: usize,
    rows: usize,
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl GridIndex {
    /// Indexes `points` with square cells of side at least `cell`.
    pub fn new(points: &[Point2], cell: f64) -> Self {
        let (mut lo, mut hi) = (Point2::new(f64::MAX, f64::MAX), Point2::new(f64::MIN, f64::MIN));
        for p in points {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if points.is_empty() {
            lo = Point2::ORIGIN;
            hi = Point2::ORIGIN;
        }
        // Keep the cell count proportional to the point count.
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let min_cell = span / libm::ceil(libm::sqrt(4.0 * points.len().max(1) as f64));
        let cell = cell.max(min_cell);
        let cols = ((hi.x - lo.x) / cell) as usize + 1;
        let rows = ((hi.y - lo.y) / cell) as usize + 1;
        let mut index = Self { origin: lo, cell, cols, rows, starts: vec![0; cols * rows + 1], items: Vec::new() };
        let cells: Vec<usize> = points.iter().map(|&p| index.cell_of(p)).collect();
        for &c in &cells {
            index.starts[c + 1] += 1;
        }
        for c in 0..cols * rows {
            index.starts[c + 1] += index.starts[c];
        }
        let mut fill = index.starts.clone();
        index.items = vec![0; points.len()];
        for (i, &c) in cells.iter().enumerate() {
            index.items[fill[c]] = i;
            fill[c] += 1;
        }
        index
    }

    fn coords(&self, p: Point2) -> (isize, isize) {
        (
            libm::floor((p.x - self.origin.x) / self.cell) as isize,
            libm::floor((p.y - self.origin.y) / self.cell) as isize,
        )
    }

    fn cell_of(&self, p: Point2) -> usize {
        let (cx, cy) = self.coords(p);
        let cx = cx.clamp(0, self.cols as isize - 1) as usize;
        let cy = cy.clamp(0, self.rows as isize - 1) as usize;
        cy * self.cols + cx
    }

    /// Calls `visit(j)` for every indexed point with `‖points[j] − q‖ ≤ r`.
    pub fn for_each_within(&self, points: &[Point2], q: Point2, r: f64, mut visit: impl FnMut(usize)) {
        let (x0, y0) = self.coords(Point2::new(q.x - r, q.y - r));
        let (x1, y1) = self.coords(Point2::new(q.x + r, q.y + r));
        let r_sq = r * r;
        for cy in y0.max(0)..=y1.min(self.rows as isize - 1) {
            for cx in x0.max(0)..=x1.min(self.cols as isize - 1) {
                let c = cy as usize * self.cols + cx as usize;
                for &j in &self.items[self.starts[c]..self.starts[c + 1]] {
                    if points[j].dist_sq(q) <= r_sq * (1.0 + 1e-9) && points[j].dist(q) <= r {
                        visit(j);
                    }
                }
            }
        }
    }
}
