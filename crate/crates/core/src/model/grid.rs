use serde::{Deserialize, Serialize};

use crate::error::{InlsError, Result};

/// Placement of the samples inside each of the `M` cells of an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// `x_j = -L + (j + 1/2) h`; no sample sits at the origin.
    Cell,
    /// `x_j = -L + j h`; the origin is a sample.
    Node,
}

/// Periodic box `[-L, L)^N` sampled by `M` points per axis, stored row-major
/// with axis 0 varying slowest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianGrid {
    dim: usize,
    points: usize,
    extent: f64,
    centering: Centering,
}

pub const MAX_CARTESIAN_DIM: usize = 3;

impl CartesianGrid {
    pub fn new(dim: usize, points: usize, extent: f64, centering: Centering) -> Result<Self> {
        if dim == 0 || dim > MAX_CARTESIAN_DIM {
            return Err(InlsError::InvalidGrid(format!(
                "dimension {dim} not in 1..={MAX_CARTESIAN_DIM}"
            )));
        }
        if points < 2 || points % 2 != 0 {
            return Err(InlsError::InvalidGrid(format!(
                "points per axis must be even and >= 2, got {points}"
            )));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(InlsError::InvalidGrid(format!("extent L = {extent} must be positive")));
        }
        points
            .checked_pow(dim as u32)
            .filter(|&n| n <= 1 << 30)
            .ok_or_else(|| InlsError::InvalidGrid(format!("{points}^{dim} samples is too many")))?;
        Ok(CartesianGrid {
            dim,
            points,
            extent,
            centering,
        })
    }

    /// Cell-centered grid, the default for the singular weight.
    pub fn cell(dim: usize, points: usize, extent: f64) -> Result<Self> {
        Self::new(dim, points, extent, Centering::Cell)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples per axis, `M`.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Half-width `L` of the box.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn centering(&self) -> Centering {
        self.centering
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    /// Total number of samples, `M^N`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn box_volume(&self) -> f64 {
        (2.0 * self.extent).powi(self.dim as i32)
    }

    /// Coordinate of sample `j` along any axis.
    pub fn axis_coord(&self, j: usize) -> f64 {
        let h = self.spacing();
        let shift = match self.centering {
            Centering::Cell => 0.5,
            Centering::Node => 0.0,
        };
        -self.extent + (j as f64 + shift) * h
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.axis_coord(j)).collect()
    }

    /// Per-axis indices of a flat index.
    pub fn unravel(&self, mut index: usize) -> [usize; MAX_CARTESIAN_DIM] {
        let mut out = [0; MAX_CARTESIAN_DIM];
        for d in (0..self.dim).rev() {
            out[d] = index % self.points;
            index /= self.points;
        }
        out
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0, |acc, &j| acc * self.points + j)
    }

    /// Position of a flat index; unused trailing components are zero.
    pub fn position(&self, index: usize) -> [f64; MAX_CARTESIAN_DIM] {
        let idx = self.unravel(index);
        let mut x = [0.0; MAX_CARTESIAN_DIM];
        for d in 0..self.dim {
            x[d] = self.axis_coord(idx[d]);
        }
        x
    }

    pub fn radius(&self, index: usize) -> f64 {
        let x = self.position(index);
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `|x_j|^2` for every sample.
    pub fn radii_sq(&self) -> Vec<f64> {
        let c = self.axis_coords();
        let sq: Vec<f64> = c.iter().map(|v| v * v).collect();
        let mut out = vec![0.0; self.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let idx = self.unravel(i);
            *o = idx[..self.dim].iter().map(|&j| sq[j]).sum();
        }
        out
    }

    pub fn radii(&self) -> Vec<f64> {
        self.radii_sq().into_iter().map(f64::sqrt).collect()
    }

    /// Angular wavenumbers in FFT order, with the Nyquist entry set to zero.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let m = self.points;
        let scale = std::f64::consts::PI / self.extent;
        (0..m)
            .map(|j| {
                if j < m / 2 {
                    j as f64 * scale
                } else if j == m / 2 {
                    0.0
                } else {
                    (j as f64 - m as f64) * scale
                }
            })
            .collect()
    }

    /// Smallest sample radius; `h sqrt(N)/2` on cell-centered grids.
    pub fn min_radius(&self) -> f64 {
        let c = self.axis_coords();
        let m = c.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        m * (self.dim as f64).sqrt()
    }

    /// Same layout with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.points, self.extent * factor, self.centering)
    }

    /// True if the sample is in the outer layer of width `width` of the box.
    pub fn in_boundary_layer(&self, index: usize, width: f64) -> bool {
        let x = self.position(index);
        x[..self.dim]
            .iter()
            .any(|v| v.abs() > self.extent - width)
    }
}

/// Strictly increasing radii on `(0, r_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(InlsError::InvalidGrid("radial grid needs at least two nodes".into()));
        }
        if !(nodes[0] > 0.0) {
            return Err(InlsError::InvalidGrid(format!("r_min = {} must be positive", nodes[0])));
        }
        if nodes.iter().any(|r| !r.is_finite()) {
            return Err(InlsError::InvalidGrid("non-finite radial node".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(InlsError::InvalidGrid("radial nodes must be strictly increasing".into()));
        }
        Ok(RadialGrid { nodes })
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index `i` with `nodes[i] <= r < nodes[i+1]`, clamped to the valid range.
    pub fn locate(&self, r: f64) -> usize {
        let i = self.nodes.partition_point(|&x| x <= r);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_grid_avoids_origin() {
        for dim in 1..=3 {
            let g = CartesianGrid::cell(dim, 8, 2.0).unwrap();
            let h = g.spacing();
            let want = 0.5 * h * (dim as f64).sqrt();
            assert!((g.min_radius() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn node_grid_contains_origin() {
        let g = CartesianGrid::new(2, 8, 2.0, Centering::Node).unwrap();
        assert_eq!(g.min_radius(), 0.0);
        assert_eq!(g.radius(g.ravel(&[4, 4])), 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(CartesianGrid::cell(1, 7, 1.0).is_err());
        assert!(CartesianGrid::cell(4, 8, 1.0).is_err());
        assert!(CartesianGrid::cell(1, 8, 0.0).is_err());
        assert!(CartesianGrid::cell(0, 8, 1.0).is_err());
    }

    #[test]
    fn ravel_roundtrip() {
        let g = CartesianGrid::cell(3, 6, 1.0).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.ravel(&g.unravel(i)), i);
        }
        assert_eq!(g.ravel(&[1, 2, 3]), 36 + 12 + 3);
    }

    #[test]
    fn wavenumbers_zero_nyquist() {
        let g = CartesianGrid::cell(1, 8, std::f64::consts::PI).unwrap();
        assert_eq!(g.wavenumbers(), vec![0.0, 1.0, 2.0, 3.0, 0.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn radial_grid_validation() {
        assert!(RadialGrid::new(vec![0.0, 1.0]).is_err());
        assert!(RadialGrid::new(vec![1.0, 1.0]).is_err());
        let g = RadialGrid::new(vec![0.5, 1.0, 2.0]).unwrap();
        assert_eq!(g.locate(0.7), 0);
        assert_eq!(g.locate(1.0), 1);
        assert_eq!(g.locate(5.0), 1);
        assert_eq!(g.locate(0.1), 0);
    }
}
