//! Adaptive embedded Runge–Kutta integrator (Dormand–Prince 5(4)) with
//! dense output, shared by the radial Toda integrator and the λ-ODE oracle.

use crate::error::Error;
use crate::Result;

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// b - b*: error estimator weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// dense-output weights (Hairer's contd5)
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step with its 4th-order interpolant.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub x0: f64,
    pub h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseStep {
    /// Interpolated state at x within [x0, x0+h] (or the reversed span).
    pub fn eval(&self, x: f64) -> Vec<f64> {
        let theta = (x - self.x0) / self.h;
        let th1 = 1.0 - theta;
        let n = self.rcont[0].len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + th1
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + th1 * self.rcont[4][i])));
        }
        out
    }

    pub fn covers(&self, x: f64) -> bool {
        let (lo, hi) = if self.h >= 0.0 { (self.x0, self.x0 + self.h) } else { (self.x0 + self.h, self.x0) };
        (lo..=hi).contains(&x)
    }
}

/// Accepted-step record.
#[derive(Debug, Clone)]
pub struct StepSample {
    pub x: f64,
    pub y: Vec<f64>,
    pub err_est: f64,
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub samples: Vec<StepSample>,
    pub dense: Vec<DenseStep>,
    pub rtol: f64,
    pub atol: f64,
}

impl Integration {
    /// Dense evaluation anywhere inside the covered span.
    pub fn sample_at(&self, x: f64) -> Option<Vec<f64>> {
        // the dense steps are ordered; binary search by x0
        if self.dense.is_empty() {
            return None;
        }
        if let Some(step) = self.dense.iter().find(|s| s.covers(x)) {
            return Some(step.eval(x));
        }
        None
    }

    pub fn last(&self) -> &StepSample {
        self.samples.last().expect("integration keeps at least the initial sample")
    }
}

/// Integrate dy/dx = f(x, y) from x0 to x_end (either direction) with the
/// embedded 5(4) pair; `guard` can abort with a domain error after each
/// accepted step.
pub fn integrate_dp5<F, G>(
    mut f: F,
    x0: f64,
    y0: &[f64],
    x_end: f64,
    rtol: f64,
    atol: f64,
    mut guard: G,
) -> Result<Integration>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    G: FnMut(f64, &[f64]) -> Result<()>,
{
    let n = y0.len();
    let dir = (x_end - x0).signum();
    if dir == 0.0 {
        return Err(Error::InvalidInput("empty integration span".into()));
    }
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    f(x, &y, &mut k[0])?;

    // initial step heuristic
    let mut h = dir * 1e-4 * (x.abs().max(1e-3));
    let span = (x_end - x0).abs();
    if h.abs() > span {
        h = x_end - x0;
    }

    let mut out = Integration {
        samples: vec![StepSample { x, y: y.clone(), err_est: 0.0 }],
        dense: Vec::new(),
        rtol,
        atol,
    };

    let mut y_next = vec![0.0; n];
    let mut y_stage = vec![0.0; n];
    let mut err_vec = vec![0.0; n];
    let max_steps = 2_000_000usize;
    for _ in 0..max_steps {
        if (x - x_end) * dir >= 0.0 {
            return Ok(out);
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        if h.abs() < 1e-14 * x.abs().max(1e-12) {
            return Err(Error::StepUnderflow(x));
        }
        // stages (k[0] is fresh from FSAL or init)
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            f(x + C[s] * h, &y_stage, &mut k[s])?;
        }
        // 5th-order solution is stage 7 input (A[6] row = b)
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[6][j] * kj[i];
            }
            y_next[i] = y[i] + h * acc;
        }
        // error estimate
        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            err_vec[i] = h * e;
            let sc = atol + rtol * y[i].abs().max(y_next[i].abs());
            let r = if sc > 0.0 {
                err_vec[i] / sc
            } else if err_vec[i] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            err += r * r;
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::StepUnderflow(x));
        }
        if err <= 1.0 {
            // dense output coefficients
            let ydiff: Vec<f64> = (0..n).map(|i| y_next[i] - y[i]).collect();
            let bspl: Vec<f64> = (0..n).map(|i| h * k[0][i] - ydiff[i]).collect();
            let rcont = [
                y.clone(),
                ydiff.clone(),
                bspl.clone(),
                (0..n).map(|i| ydiff[i] - h * k[6][i] - bspl[i]).collect(),
                (0..n)
                    .map(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>())
                    .collect(),
            ];
            out.dense.push(DenseStep { x0: x, h, rcont });
            x += h;
            std::mem::swap(&mut y, &mut y_next);
            k[0] = k[6].clone(); // FSAL
            out.samples.push(StepSample {
                x,
                y: y.clone(),
                err_est: err_vec.iter().map(|e| e.abs()).fold(0.0, f64::max),
            });
            guard(x, &y)?;
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            h *= fac;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            h *= fac;
            // recompute k[0]? unchanged: step was rejected, k[0] still valid
        }
    }
    Err(Error::NonConvergent("step budget exhausted"))
}
