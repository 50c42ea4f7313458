//! Dormand–Prince 5(4) with a standard step-size controller.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum OdeError {
    #[error("step size {h:e} fell below the floor at t = {t}")]
    StepRejected { t: f64, h: f64 },
}

/// An autonomous vector field whose chart or constraint state may change
/// between accepted steps.
pub trait Flow<const N: usize> {
    /// `None` marks a point where the field cannot be evaluated; the step is
    /// then retried with a smaller size.
    fn rhs(&self, y: &[f64; N]) -> Option<[f64; N]>;

    /// Hook after each accepted step (chart switching, projections).
    fn post_step(&mut self, _y: &mut [f64; N]) {}

    /// Per-component error scale of a trial step from `y` to `next`; the
    /// local error of component `i` must stay below `tol * scale[i]`.
    fn error_scale(&self, y: &[f64; N], next: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|i| 1.0 + y[i].abs().max(next[i].abs()))
    }
}

const C: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One trial step. Returns the fifth-order solution and the scaled error
/// `max |e_i| / (tol s_i)` with `s` from [`Flow::error_scale`]; an unevaluable stage gives `∞`.
pub fn dopri5_step<const N: usize, S: Flow<N>>(sys: &S, y: &[f64; N], h: f64, tol: f64) -> ([f64; N], f64) {
    let mut k = [[0.0; N]; 7];
    match sys.rhs(y) {
        Some(v) => k[0] = v,
        None => return (*y, f64::INFINITY),
    }
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = C[s - 1][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        match sys.rhs(&ys) {
            Some(v) => k[s] = v,
            None => return (*y, f64::INFINITY),
        }
        if s == 6 {
            // ys is the fifth-order solution (FSAL row)
            let mut err = 0.0_f64;
            let scale = sys.error_scale(y, &ys);
            for i in 0..N {
                let e: f64 = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                err = err.max(e.abs() / (tol * scale[i]));
            }
            if !err.is_finite() || ys.iter().any(|v| !v.is_finite()) {
                return (*y, f64::INFINITY);
            }
            return (ys, err);
        }
    }
    unreachable!()
}

/// Adaptive driver state.
#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    pub tol: f64,
    pub h: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Stepper {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            h: 1e-3,
            h_min: 1e-14,
            h_max: 0.5,
        }
    }

    /// Advances `y` by exactly `dt`, calling `on_step(t, sys, y)` after each
    /// accepted step. Returns the number of accepted steps.
    pub fn advance<const N: usize, S, O>(
        &mut self,
        sys: &mut S,
        y: &mut [f64; N],
        dt: f64,
        mut on_step: O,
    ) -> Result<usize, OdeError>
    where
        S: Flow<N>,
        O: FnMut(f64, &S, &[f64; N]),
    {
        let mut t = 0.0;
        let mut accepted = 0;
        while t < dt {
            let last = self.h >= dt - t;
            let h = if last { dt - t } else { self.h };
            let (next, err) = dopri5_step(sys, y, h, self.tol);
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                *y = next;
                t = if last { dt } else { t + h };
                sys.post_step(y);
                accepted += 1;
                on_step(t, sys, y);
                if !last || factor < 1.0 {
                    self.h = (h * factor).min(self.h_max);
                }
            } else {
                self.h = h * factor.min(0.9);
                if self.h < self.h_min {
                    return Err(OdeError::StepRejected { t, h: self.h });
                }
            }
        }
        Ok(accepted)
    }
}

impl Stepper {
    /// Advances an autonomous system in its own independent variable until
    /// component `clock` reaches `target`. Used for time-transformed flows
    /// whose physical time is carried as a state component; the final step is
    /// shrunk by secant iteration so that the clock lands on `target`.
    pub fn advance_clock<const N: usize, S, O>(
        &mut self,
        sys: &mut S,
        y: &mut [f64; N],
        clock: usize,
        target: f64,
        mut on_step: O,
    ) -> Result<usize, OdeError>
    where
        S: Flow<N>,
        O: FnMut(&S, &[f64; N]),
    {
        let slack = 1e-13 * target.abs().max(1.0);
        let mut accepted = 0;
        let mut h = self.h;
        while y[clock] < target - slack {
            let (mut next, err) = dopri5_step(sys, y, h, self.tol);
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err > 1.0 {
                h *= factor.min(0.9);
                if h < self.h_min {
                    return Err(OdeError::StepRejected { t: y[clock], h });
                }
                continue;
            }
            if next[clock] > target + slack {
                // secant shrink towards the target; the controller state is kept
                h *= 0.999 * (target - y[clock]) / (next[clock] - y[clock]);
                if h < self.h_min {
                    return Err(OdeError::StepRejected { t: y[clock], h });
                }
                continue;
            }
            if next[clock] >= target - slack {
                next[clock] = target;
            }
            *y = next;
            sys.post_step(y);
            accepted += 1;
            on_step(sys, y);
            self.h = (h * factor).min(self.h_max);
            h = self.h;
        }
        Ok(accepted)
    }
}
