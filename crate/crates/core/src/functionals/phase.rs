use crate::error::{InlsError, Result};
use crate::model::CartesianGrid;

/// Real phase `theta` sampled on a grid together with its exact gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    grid: CartesianGrid,
    values: Vec<f64>,
    gradient: Vec<Vec<f64>>,
}

impl PhaseField {
    /// `theta` and `grad` are evaluated at every node; `grad` writes the
    /// `N` partial derivatives into its second argument.
    pub fn from_fn(
        grid: CartesianGrid,
        theta: impl Fn(&[f64]) -> f64,
        grad: impl Fn(&[f64], &mut [f64]),
    ) -> Result<Self> {
        let n = grid.dim();
        let mut values = Vec::with_capacity(grid.len());
        let mut gradient = vec![Vec::with_capacity(grid.len()); n];
        let mut g = [0.0; 3];
        for i in 0..grid.len() {
            let x = grid.position(i);
            values.push(theta(&x[..n]));
            grad(&x[..n], &mut g[..n]);
            for d in 0..n {
                gradient[d].push(g[d]);
            }
        }
        Self::new(grid, values, gradient)
    }

    pub fn new(grid: CartesianGrid, values: Vec<f64>, gradient: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != grid.len()
            || gradient.len() != grid.dim()
            || gradient.iter().any(|g| g.len() != grid.len())
        {
            return Err(InlsError::InvalidGrid("phase field shape does not match grid".into()));
        }
        if values.iter().chain(gradient.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(InlsError::NonFinite("phase field".into()));
        }
        Ok(PhaseField {
            grid,
            values,
            gradient,
        })
    }

    /// `theta = |x|^2 / 2`, gradient `x`.
    pub fn half_radius_sq(grid: CartesianGrid) -> Self {
        Self::from_fn(
            grid,
            |x| 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            |x, g| g.copy_from_slice(x),
        )
        .expect("quadratic phase is finite on a valid grid")
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gradient(&self) -> &[Vec<f64>] {
        &self.gradient
    }

    pub(crate) fn check_grid(&self, grid: &CartesianGrid) -> Result<()> {
        if self.grid != *grid {
            return Err(InlsError::InvalidGrid("phase field lives on another grid".into()));
        }
        Ok(())
    }
}
