//! Unconstrained minimizers: quasi-Newton (BFGS) with Armijo backtracking,
//! and Nelder-Mead.

use crate::error::{Error, Result};

/// Armijo sufficient-decrease constant.
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
/// Gradient infinity-norm below which a point counts as stationary.
const GRADIENT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    /// Objective at the start point and after each accepted step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_start(f0: f64, max_iter: usize, tol: f64) -> Result<()> {
    if !f0.is_finite() {
        return Err(Error::NonFinite(format!("objective at the start point is {f0}")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Central differences with step `h` in every coordinate.
pub fn central_difference(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// BFGS on the inverse Hessian with backtracking line search. Stops when
/// an accepted step changes the objective by less than `tol`, when the
/// gradient vanishes, or after `max_iter` accepted steps.
pub fn minimize(
    f: &mut dyn FnMut(&[f64]) -> f64,
    grad: Option<&mut dyn FnMut(&[f64]) -> Vec<f64>>,
    x0: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<Minimum> {
    let fd = |f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64]| {
        let h = 1e-6 * x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        central_difference(f, x, h)
    };
    let mut grad = grad;
    let mut gradient = |f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64]| match grad.as_mut() {
        Some(g) => g(x),
        None => fd(f, x),
    };

    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    check_start(fx, max_iter, tol)?;
    let mut trace = vec![fx];
    if n == 0 {
        return Ok(Minimum {
            x,
            value: fx,
            trace,
            iterations: 0,
            converged: true,
        });
    }
    let identity = |m: &mut Vec<f64>| {
        m.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
    };
    let mut hinv = vec![0.0; n * n];
    identity(&mut hinv);
    let mut g = gradient(f, &x);
    let mut first_update = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        if g.iter().all(|v| v.abs() < GRADIENT_FLOOR) {
            converged = true;
            break;
        }
        let mut p: Vec<f64> = (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &p);
        if !(slope < 0.0) {
            identity(&mut hinv);
            first_update = true;
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let fnew = f(&xn);
            if fnew.is_finite() && fnew <= fx + ARMIJO_C1 * alpha * slope {
                accepted = Some((xn, fnew));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            // No decrease along a descent direction: numerically stationary.
            converged = true;
            break;
        };
        let gn = gradient(f, &xn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if first_update {
                let scale = sy / dot(&y, &y);
                hinv.iter_mut().for_each(|v| *v *= scale);
                first_update = false;
            }
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] +=
                        -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        let delta = fx - fnew;
        x = xn;
        fx = fnew;
        g = gn;
        trace.push(fx);
        iterations += 1;
        if delta.abs() < tol {
            converged = true;
            break;
        }
    }
    Ok(Minimum {
        x,
        value: fx,
        trace,
        iterations,
        converged,
    })
}

/// Nelder-Mead from a simplex of `x0` plus `step` along each axis. One
/// iteration is one simplex update; stops when the simplex values span
/// less than `tol`.
pub fn nelder_mead(f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], max_iter: usize, tol: f64, step: f64) -> Result<Minimum> {
    let n = x0.len();
    let f0 = f(x0);
    check_start(f0, max_iter, tol)?;
    let mut trace = vec![f0];
    if n == 0 {
        return Ok(Minimum {
            x: x0.to_vec(),
            value: f0,
            trace,
            iterations: 0,
            converged: true,
        });
    }
    let eval = |f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(f, &x);
        simplex.push((x, v));
    }
    let mut converged = false;
    let mut iterations = 0;
    let point = |c: &[f64], d: &[f64], t: f64| -> Vec<f64> { c.iter().zip(d).map(|(a, b)| a + t * (b - a)).collect() };
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[n].1 - simplex[0].1 < tol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let xr = point(&centroid, &worst.0, -1.0);
        let fr = eval(f, &xr);
        if fr < simplex[0].1 {
            let xe = point(&centroid, &worst.0, -2.0);
            let fe = eval(f, &xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = point(&centroid, &xr, 0.5);
                let fc = eval(f, &xc);
                (xc, fc)
            } else {
                let xc = point(&centroid, &worst.0, 0.5);
                let fc = eval(f, &xc);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.0 = point(&best, &v.0, 0.5);
                    v.1 = eval(f, &v.0);
                }
            }
        }
        iterations += 1;
        let best = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        trace.push(best);
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Ok(Minimum {
        x,
        value,
        trace,
        iterations,
        converged,
    })
}
