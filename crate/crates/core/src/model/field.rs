use num_complex::Complex64;

use super::CartesianGrid;
use crate::error::{InlsError, Result};

/// Complex samples of `u(t, .)` on a Cartesian grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: CartesianGrid,
    time: f64,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: CartesianGrid, time: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(InlsError::InvalidGrid(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        let f = Field { grid, time, values };
        f.check_finite()?;
        Ok(f)
    }

    pub fn zeros(grid: CartesianGrid) -> Self {
        Field {
            grid,
            time: 0.0,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x)` at every node; `x` has `N` components.
    pub fn from_fn(grid: CartesianGrid, time: f64, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let n = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                f(&x[..n])
            })
            .collect();
        Self::new(grid, time, values)
    }

    /// Real profile of the radius only.
    pub fn radial(grid: CartesianGrid, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid
            .radii()
            .into_iter()
            .map(|r| Complex64::new(f(r), 0.0))
            .collect();
        Self::new(grid, time, values)
    }

    /// `amplitude * exp(-|x|^2 / (2 width^2))` at time 0.
    pub fn gaussian(grid: CartesianGrid, amplitude: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && amplitude.is_finite()) {
            return Err(InlsError::InvalidParams(format!(
                "Gaussian needs a finite amplitude and positive width, got {amplitude}, {width}"
            )));
        }
        Self::radial(grid, 0.0, |r| amplitude * (-r * r / (2.0 * width * width)).exp())
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mutable access; callers re-establish finiteness with [`Field::check_finite`].
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn check_finite(&self) -> Result<()> {
        match self
            .values
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            None => Ok(()),
            Some(i) => Err(InlsError::NonFinite(format!(
                "sample {i} of the field at t = {} is {}",
                self.time, self.values[i]
            ))),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.grid, self.time, self.values.iter().map(|&z| f(z)).collect())
    }

    pub fn scaled_by(&self, c: f64) -> Self {
        Field {
            grid: self.grid,
            time: self.time,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    /// Discrete L2 distance `(sum |u - v|^2 h^N)^{1/2}`.
    pub fn l2_distance(&self, other: &Field) -> Result<f64> {
        self.same_grid(other)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.cell_volume()).sqrt())
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(InlsError::InvalidGrid("fields live on different grids".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_wrong_length() {
        let g = CartesianGrid::cell(1, 4, 1.0).unwrap();
        assert!(Field::new(g, 0.0, vec![Complex64::new(0.0, 0.0); 3]).is_err());
        let mut v = vec![Complex64::new(1.0, 0.0); 4];
        v[2].im = f64::NAN;
        assert!(matches!(Field::new(g, 0.0, v), Err(InlsError::NonFinite(_))));
    }

    #[test]
    fn from_fn_samples_positions() {
        let g = CartesianGrid::cell(2, 4, 2.0).unwrap();
        let f = Field::from_fn(g, 0.0, |x| Complex64::new(x[0], x[1])).unwrap();
        let i = g.ravel(&[0, 3]);
        assert_eq!(f.values()[i], Complex64::new(-1.5, 1.5));
    }
}
