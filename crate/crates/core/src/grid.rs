//! Square sample lattice shared by mode fields and phase maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Uniform lattice over `[-extent, extent]` on both axes, `points` nodes per
/// axis. With an odd point count the origin is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub extent: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(extent: f64, points: usize) -> Self {
        Grid { extent, points }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.points - 1) as f64
    }

    /// Coordinate of node `i`; symmetric nodes are exact negatives.
    pub fn coord(&self, i: usize) -> f64 {
        let n = (self.points - 1) as f64;
        (2.0 * i as f64 - n) * self.extent / n
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    pub fn nearest_index(&self, v: f64) -> usize {
        let i = ((v + self.extent) / self.spacing()).round();
        i.clamp(0.0, (self.points - 1) as f64) as usize
    }

    pub fn contains(&self, x: f64, z: f64) -> bool {
        x.abs() <= self.extent && z.abs() <= self.extent
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }
}

/// Scalar field sampled on a [`Grid`]; `values[ix * points + iz]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridField {
    /// Evaluates `f(x, z)` at every node. Rows are computed in parallel on the
    /// current rayon pool; each node is independent so the result does not
    /// depend on the worker count.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let coords = grid.coords();
        let mut values = vec![0.0; grid.len()];
        values.par_chunks_mut(grid.points).enumerate().for_each(|(ix, row)| {
            let x = coords[ix];
            for (iz, v) in row.iter_mut().enumerate() {
                *v = f(x, coords[iz]);
            }
        });
        GridField { grid, values }
    }

    pub fn get(&self, ix: usize, iz: usize) -> f64 {
        self.values[ix * self.grid.points + iz]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> GridField {
        GridField {
            grid: self.grid,
            values: self.values.par_iter().map(|&v| f(v)).collect(),
        }
    }

    /// Largest |value| and the node where it occurs (first in storage order).
    pub fn abs_argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            if v.abs() > best.1 {
                best = (i, v.abs());
            }
        }
        (best.0 / self.grid.points, best.0 % self.grid.points, best.1)
    }

    /// Sums along the axis orthogonal to `axis`, giving a profile indexed
    /// along `axis`. Summation runs in fixed index order.
    pub fn profile(&self, axis: Axis) -> Vec<f64> {
        let n = self.grid.points;
        match axis {
            Axis::X => (0..n).map(|ix| (0..n).map(|iz| self.get(ix, iz)).sum()).collect(),
            Axis::Z => (0..n).map(|iz| (0..n).map(|ix| self.get(ix, iz)).sum()).collect(),
        }
    }
}

/// In-plane axes of the substrate (crystal-aligned).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_coordinates() {
        let g = Grid::new(256e-6, 513);
        assert_eq!(g.coord(256), 0.0);
        for i in 0..513 {
            assert_eq!(g.coord(i), -g.coord(512 - i));
        }
        assert!((g.spacing() - 1e-6).abs() < 1e-18);
        assert_eq!(g.nearest_index(0.0), 256);
        assert_eq!(g.nearest_index(1.0), 512);
    }

    #[test]
    fn profiles_sum_the_other_axis() {
        let g = Grid::new(1.0, 3);
        let f = GridField::from_fn(g, |x, z| x + 10.0 * z);
        assert_eq!(f.profile(Axis::X), vec![-3.0, 0.0, 3.0]);
        assert_eq!(f.profile(Axis::Z), vec![-30.0, 0.0, 30.0]);
    }
}
