use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretization::Discretization;
use crate::error::Result;
use crate::functionals::{energy_of, mass_of};
use crate::numerics::ksum;

pub const CSV_HEADER: &str = "t,mass,kinetic,potential,energy,grad_norm,gamma,gamma_prime,conc_fraction";

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub energy: f64,
    /// `||grad u||_2`
    pub grad_norm: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    /// Fraction of the current mass inside the concentration radius.
    pub conc_fraction: f64,
}

impl DiagnosticsRow {
    pub fn compute(values: &[Complex64], t: f64, disc: &Discretization, radius: f64) -> Self {
        let grid = disc.grid();
        let cell = grid.cell_volume();
        let mass = mass_of(values, cell);
        let e = energy_of(values, disc);
        let r2 = grid.radii_sq();
        let gamma = ksum(values.iter().zip(&r2).map(|(z, r)| r * z.norm_sqr())) * cell;
        let rr = radius * radius;
        let inside = ksum(values.iter().zip(&r2).filter(|(_, &r)| r < rr).map(|(z, _)| z.norm_sqr())) * cell;
        let grad = disc.spectral().gradient(values);
        let n = grid.dim();
        let axis = grid.axis_coords();
        let gp = ksum((0..grid.len()).map(|i| {
            let idx = grid.unravel(i);
            let mut xg = Complex64::new(0.0, 0.0);
            for (d, gd) in grad.iter().enumerate().take(n) {
                xg += gd[i] * axis[idx[d]];
            }
            (values[i].conj() * xg).im
        }));
        DiagnosticsRow {
            t,
            mass,
            kinetic: e.kinetic,
            potential: e.potential,
            energy: e.total,
            grad_norm: e.grad_sq().sqrt(),
            gamma,
            gamma_prime: 4.0 * gp * cell,
            conc_fraction: if mass > 0.0 { inside / mass } else { 0.0 },
        }
    }

    pub(crate) fn is_finite_row(&self) -> bool {
        [self.mass, self.kinetic, self.potential, self.gamma, self.gamma_prime]
            .iter()
            .all(|v| v.is_finite())
    }

    fn fields(&self) -> [f64; 9] {
        [
            self.t,
            self.mass,
            self.kinetic,
            self.potential,
            self.energy,
            self.grad_norm,
            self.gamma,
            self.gamma_prime,
            self.conc_fraction,
        ]
    }
}

/// Diagnostics recorded along a trajectory, with strictly increasing times.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsSeries {
    pub fn push(&mut self, row: DiagnosticsRow) -> bool {
        if let Some(last) = self.rows.last() {
            if row.t <= last.t {
                return false;
            }
        }
        self.rows.push(row);
        true
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&DiagnosticsRow> {
        self.rows.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(DiagnosticsRow::is_finite_row)
    }

    /// CSV with 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for row in &self.rows {
            let line: Vec<String> = row.fields().iter().map(|v| format_f64(*v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}
