//! Dormand-Prince 5(4) with adaptive step size.

pub const DIM: usize = 5;
pub type State = [f64; DIM];

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
}

/// Accepted step: new position, state and derivative there.
pub struct Step {
    pub r: f64,
    pub y: State,
    pub dy: State,
}

pub struct Dopri<F: Fn(f64, &State) -> State> {
    f: F,
    r: f64,
    y: State,
    dy: State,
    h: f64,
    tol: Tolerances,
}

impl<F: Fn(f64, &State) -> State> Dopri<F> {
    pub fn new(f: F, r0: f64, y0: State, h0: f64, tol: Tolerances) -> Self {
        let dy = f(r0, &y0);
        Dopri {
            f,
            r: r0,
            y: y0,
            dy,
            h: h0,
            tol,
        }
    }

    #[cfg(test)]
    pub fn r(&self) -> f64 {
        self.r
    }

    #[cfg(test)]
    pub fn y(&self) -> &State {
        &self.y
    }

    pub fn dy(&self) -> &State {
        &self.dy
    }

    /// Advances by one accepted step; `None` if the step size underflows.
    pub fn step(&mut self) -> Option<Step> {
        loop {
            let h = self.h.min(self.tol.max_step);
            if !(h > self.r * 1e-15) || !h.is_finite() {
                return None;
            }
            let mut k = [[0.0; DIM]; 7];
            k[0] = self.dy;
            for s in 1..7 {
                let mut ys = self.y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..DIM {
                            ys[i] += h * a * kj[i];
                        }
                    }
                }
                k[s] = (self.f)(self.r + C[s] * h, &ys);
            }
            let mut ynew = self.y;
            let mut err = 0.0f64;
            for i in 0..DIM {
                let mut inc = 0.0;
                let mut e = 0.0;
                for s in 0..7 {
                    inc += B[s] * k[s][i];
                    e += E[s] * k[s][i];
                }
                ynew[i] += h * inc;
                let sc = self.tol.atol + self.tol.rtol * self.y[i].abs().max(ynew[i].abs());
                err = err.max((h * e / sc).abs());
            }
            if !err.is_finite() {
                self.h = 0.1 * h;
                continue;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.r += h;
                self.y = ynew;
                self.dy = k[6];
                self.h = h * fac;
                return Some(Step {
                    r: self.r,
                    y: self.y,
                    dy: self.dy,
                });
            }
            self.h = h * fac.min(1.0);
        }
    }
}
