//! Weighted least-absolute-deviation fitting:
//!
//! ```text
//! minimize  Σ_r w_r |a_r + (B p)_r|
//! ```
//!
//! Solved by Newton continuation on the smoothed objective
//! `Σ w_r sqrt(r_r² + ε²)` with `ε → 0`, then exact coordinate sweeps (each
//! one-dimensional subproblem is a weighted median).

use log::debug;
use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct L1Solution {
    pub params: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

pub struct L1Problem<'a> {
    pub offsets: &'a [f64],
    pub weights: &'a [f64],
    /// One row per term, one column per parameter.
    pub design: &'a DMatrix<f64>,
}

impl L1Problem<'_> {
    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        let mut r = self.design * p;
        for (ri, a) in r.iter_mut().zip(self.offsets) {
            *ri += a;
        }
        r
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        let r = self.residuals(&DVector::from_column_slice(p));
        r.iter().zip(self.weights).map(|(r, w)| w * r.abs()).sum()
    }

    fn smoothed(&self, r: &DVector<f64>, eps: f64) -> f64 {
        r.iter()
            .zip(self.weights)
            .map(|(r, w)| w * (r * r + eps * eps).sqrt())
            .sum()
    }

    /// Minimizes the smoothed objective at fixed `eps` by damped Newton.
    fn newton(&self, p: &mut DVector<f64>, eps: f64) -> bool {
        let b = self.design;
        let np = b.ncols();
        let mut r = self.residuals(p);
        let mut f = self.smoothed(&r, eps);
        for _ in 0..50 {
            let mut grad = DVector::zeros(np);
            let mut hess = DMatrix::zeros(np, np);
            let mut row = DVector::zeros(np);
            for t in 0..b.nrows() {
                let w = self.weights[t];
                if w == 0.0 {
                    continue;
                }
                let s = (r[t] * r[t] + eps * eps).sqrt();
                let d1 = w * r[t] / s;
                let d2 = w * eps * eps / (s * s * s);
                row.copy_from(&b.row(t).transpose());
                grad.axpy(d1, &row, 1.0);
                hess.ger(d2, &row, &row, 1.0);
            }
            let ridge = 1e-13 * hess.diagonal().amax().max(1e-300);
            for i in 0..np {
                hess[(i, i)] += ridge;
            }
            let Some(chol) = hess.cholesky() else {
                return false;
            };
            let step = chol.solve(&grad);
            let decrement = grad.dot(&step);
            if decrement < 1e-14 * f.max(1e-300) {
                return true;
            }
            let mut t = 1.0;
            loop {
                let trial = &*p - &step * t;
                let rt = self.residuals(&trial);
                let ft = self.smoothed(&rt, eps);
                if ft <= f - 0.25 * t * decrement {
                    *p = trial;
                    r = rt;
                    f = ft;
                    break;
                }
                t *= 0.5;
                if t < 1e-12 {
                    return false;
                }
            }
        }
        false
    }

    /// One pass of exact coordinate minimization; returns the decrease.
    fn coordinate_sweep(&self, p: &mut DVector<f64>) -> f64 {
        let b = self.design;
        let mut r = self.residuals(p);
        let mut total = 0.0;
        let mut knots: Vec<(f64, f64)> = Vec::with_capacity(b.nrows());
        for k in 0..b.ncols() {
            knots.clear();
            let mut before = 0.0;
            for t in 0..b.nrows() {
                let c = b[(t, k)];
                let w = self.weights[t];
                before += w * r[t].abs();
                if c != 0.0 && w != 0.0 {
                    // term |r_t + c·δ| has its kink at δ = -r_t / c
                    knots.push((-r[t] / c, w * c.abs()));
                }
            }
            if knots.is_empty() {
                continue;
            }
            let delta = weighted_median(&mut knots);
            let after: f64 = (0..b.nrows())
                .map(|t| self.weights[t] * (r[t] + b[(t, k)] * delta).abs())
                .sum();
            if after < before {
                p[k] += delta;
                for t in 0..b.nrows() {
                    r[t] += b[(t, k)] * delta;
                }
                total += before - after;
            }
        }
        total
    }

    /// Global minimizer from the starting point `p0`. The result is never
    /// worse than `p0`.
    pub fn solve(&self, p0: &[f64]) -> L1Solution {
        let start_value = self.value(p0);
        let mut p = DVector::from_column_slice(p0);
        let scale = self
            .offsets
            .iter()
            .fold(0.0_f64, |m, a| m.max(a.abs()))
            .max(1e-12);

        let mut converged = true;
        let mut eps = 1e-1 * scale;
        while eps > 1e-11 * scale {
            converged &= self.newton(&mut p, eps);
            eps *= 0.1;
        }

        let mut sweeps = 0;
        while sweeps < 200 {
            sweeps += 1;
            let gain = self.coordinate_sweep(&mut p);
            if gain <= 1e-15 * scale {
                break;
            }
        }
        let value = self.value(p.as_slice());
        debug!(
            "l1 fit: {} params, {} terms, {start_value:.10} -> {value:.10}, newton ok = {converged}, {sweeps} sweeps",
            p.len(),
            self.offsets.len()
        );
        if value > start_value {
            return L1Solution {
                params: p0.to_vec(),
                value: start_value,
                converged: false,
            };
        }
        L1Solution {
            params: p.as_slice().to_vec(),
            value,
            converged,
        }
    }
}

/// Point minimizing `Σ w_i |x - x_i|`, lowest such point on ties.
fn weighted_median(knots: &mut [(f64, f64)]) -> f64 {
    knots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half = 0.5 * knots.iter().map(|k| k.1).sum::<f64>();
    let mut acc = 0.0;
    for &(x, w) in knots.iter() {
        acc += w;
        if acc >= half {
            return x;
        }
    }
    knots[knots.len() - 1].0
}
