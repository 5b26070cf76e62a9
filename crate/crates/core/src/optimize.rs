//! Quasi-Newton minimization with finite-difference gradients, falling back
//! to Nelder-Mead when the line search stalls (typical at the kinks of
//! 1-norm objectives).

use log::debug;

#[derive(Clone, Debug)]
pub struct MinimizeOptions {
    /// Stop when the max-norm of the gradient estimate falls below this.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Relative step for central differences.
    pub fd_step: f64,
    /// Relative objective change treated as stagnation.
    pub f_tol: f64,
    /// Initial simplex edge for the derivative-free fallback.
    pub simplex_size: f64,
    pub max_simplex_evals: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-7,
            max_iter: 10_000,
            fd_step: 1e-6,
            f_tol: 1e-12,
            simplex_size: 1e-2,
            max_simplex_evals: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

struct Counted<F> {
    f: F,
    evals: std::cell::Cell<usize>,
}

impl<F: Fn(&[f64]) -> f64> Counted<F> {
    fn call(&self, x: &[f64]) -> f64 {
        self.evals.set(self.evals.get() + 1);
        (self.f)(x)
    }
}

fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &Counted<F>, x: &[f64], step: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = step * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let up = f.call(&probe);
            probe[i] = x[i] - h;
            let down = f.call(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// BFGS on the inverse Hessian with Armijo backtracking.
/// Returns the final iterate and whether the gradient test was met.
fn bfgs<F: Fn(&[f64]) -> f64>(f: &Counted<F>, x0: &[f64], opts: &MinimizeOptions) -> (Vec<f64>, f64, bool) {
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f.call(&x);
    if d == 0 {
        return (x, fx, true);
    }
    let mut g = fd_gradient(f, &x, opts.fd_step);
    let mut hinv = vec![0.0; d * d];
    let reset = |h: &mut Vec<f64>, scale: f64| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..d {
            h[i * d + i] = scale;
        }
    };
    reset(&mut hinv, 1.0);
    let mut stagnant = 0;

    for iter in 0..opts.max_iter {
        if max_abs(&g) < opts.grad_tol {
            return (x, fx, true);
        }
        let mut p: Vec<f64> = (0..d)
            .map(|i| -(0..d).map(|j| hinv[i * d + j] * g[j]).sum::<f64>())
            .collect();
        let mut slope = dot(&g, &p);
        if slope >= 0.0 {
            reset(&mut hinv, 1.0);
            p = g.iter().map(|v| -v).collect();
            slope = dot(&g, &p);
        }

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + alpha * pi).collect();
            let ft = f.call(&trial);
            if ft <= fx + 1e-4 * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            debug!("bfgs: line search stalled after {iter} iterations at f={fx:.12e}");
            return (x, fx, false);
        };

        let g_new = fd_gradient(f, &x_new, opts.fd_step);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if iter == 0 {
                reset(&mut hinv, sy / dot(&y, &y));
            }
            let hy: Vec<f64> = (0..d)
                .map(|i| (0..d).map(|j| hinv[i * d + j] * y[j]).sum())
                .collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..d {
                for j in 0..d {
                    hinv[i * d + j] += (1.0 + yhy * rho) * rho * s[i] * s[j]
                        - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }

        let improvement = fx - f_new;
        x = x_new;
        g = g_new;
        fx = f_new;
        if improvement <= opts.f_tol * fx.abs().max(1.0) {
            stagnant += 1;
            if stagnant >= 5 {
                return (x, fx, false);
            }
        } else {
            stagnant = 0;
        }
    }
    (x, fx, false)
}

/// Adaptive-coefficient Nelder-Mead.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &Counted<F>,
    x0: &[f64],
    opts: &MinimizeOptions,
) -> (Vec<f64>, f64, bool) {
    let d = x0.len();
    if d == 0 {
        return (x0.to_vec(), f.call(x0), true);
    }
    let df = d as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / df, 0.75 - 0.5 / df, 1.0 - 1.0 / df);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f.call(x0)));
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += opts.simplex_size * x0[i].abs().max(1.0);
        let fv = f.call(&v);
        simplex.push((v, fv));
    }
    let budget = f.evals.get() + opts.max_simplex_evals;

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        let size = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= opts.f_tol * best.abs().max(1.0) && size < 1e-9 {
            let (x, fx) = simplex.swap_remove(0);
            return (x, fx, true);
        }
        if f.evals.get() >= budget {
            let (x, fx) = simplex.swap_remove(0);
            return (x, fx, false);
        }

        let mut centroid = vec![0.0; d];
        for (v, _) in &simplex[..d] {
            for (c, vi) in centroid.iter_mut().zip(v) {
                *c += vi / df;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = f.call(&xr);
        if fr < simplex[0].1 {
            let xe = along(beta);
            let fe = f.call(&xe);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[d].1 {
            let xc = along(alpha * gamma);
            let fc = f.call(&xc);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = f.call(&xc);
            (xc, fc)
        };
        if fc < simplex[d].1.min(fr) {
            simplex[d] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = anchor
                .iter()
                .zip(&entry.0)
                .map(|(a, b)| a + delta * (b - a))
                .collect();
            let fv = f.call(&v);
            *entry = (v, fv);
        }
    }
}

/// Minimizes `f` from `x0`: BFGS first, then Nelder-Mead from the best point
/// if BFGS did not meet its gradient test, then a final BFGS pass. The
/// returned value never exceeds `f(x0)`.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &MinimizeOptions) -> Minimum {
    let f = Counted {
        f,
        evals: std::cell::Cell::new(0),
    };
    let f0 = f.call(x0);
    let (mut x, mut fx, mut converged) = bfgs(&f, x0, opts);
    if !converged {
        let (xn, fxn, nm_ok) = nelder_mead(&f, &x, opts);
        if fxn <= fx {
            x = xn;
            fx = fxn;
        }
        let (xb, fxb, ok) = bfgs(&f, &x, opts);
        if fxb <= fx {
            x = xb;
            fx = fxb;
        }
        converged = ok || nm_ok;
    }
    if fx > f0 {
        x = x0.to_vec();
        fx = f0;
    }
    Minimum {
        x,
        value: fx,
        converged,
        evaluations: f.evals.get(),
    }
}
