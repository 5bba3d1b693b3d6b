use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{InlsError, Result};
use crate::model::{potential_weights, CartesianGrid, Field, Params, WeightRule};
use crate::numerics::Power;
use crate::spectral::Spectral;

/// Everything needed to evaluate the equation on one grid: parameters,
/// spectral operators and potential weights. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Discretization {
    params: Params,
    grid: CartesianGrid,
    spectral: Arc<Spectral>,
    weights: Arc<Vec<f64>>,
    rule: WeightRule,
}

impl Discretization {
    pub fn new(params: Params, grid: CartesianGrid) -> Result<Self> {
        Self::with_rule(params, grid, WeightRule::default_for(&grid))
    }

    pub fn with_rule(params: Params, grid: CartesianGrid, rule: WeightRule) -> Result<Self> {
        if params.dim() != grid.dim() {
            return Err(InlsError::InvalidGrid(format!(
                "grid dimension {} does not match N = {}",
                grid.dim(),
                params.dim()
            )));
        }
        let weights = potential_weights(&grid, params.b(), rule)?;
        Ok(Discretization {
            params,
            grid,
            spectral: Arc::new(Spectral::new(&grid)),
            weights: Arc::new(weights),
            rule,
        })
    }

    /// Replaces the weights, e.g. zeroing them to switch off the nonlinearity.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.grid.len() {
            return Err(InlsError::InvalidGrid("weight array has the wrong length".into()));
        }
        self.weights = Arc::new(weights);
        Ok(self)
    }

    /// Same grid and weights with another power (used for the non-critical
    /// virial law).
    pub fn with_params(mut self, params: Params) -> Result<Self> {
        if params.dim() != self.params.dim() || params.b() != self.params.b() {
            return Err(InlsError::InvalidParams(
                "with_params may change only the power".into(),
            ));
        }
        self.params = params;
        Ok(self)
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rule(&self) -> WeightRule {
        self.rule
    }

    /// `|z|^{p-1}` as a function of `|z|^2`.
    pub fn nonlinear_power(&self) -> Power {
        Power::new(0.5 * (self.params.p() - 1.0))
    }

    /// `|z|^{p+1}` as a function of `|z|^2`.
    pub fn potential_power(&self) -> Power {
        Power::new(0.5 * (self.params.p() + 1.0))
    }

    pub fn check_field(&self, u: &Field) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(InlsError::InvalidGrid(
                "field grid differs from the discretization grid".into(),
            ));
        }
        u.check_finite()
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.grid.len()]
    }
}
