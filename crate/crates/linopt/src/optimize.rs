//! Small dense local minimizers used by the feasibility and estimation
//! searches: BFGS with analytic gradients for smooth polynomial objectives,
//! and Nelder–Mead for the piecewise-smooth minimum-error objective.

use nalgebra::{DMatrix, DVector};

/// Result of a local minimization run.
#[derive(Debug, Clone)]
pub struct LocalMin {
    pub x: DVector<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// BFGS with backtracking Armijo line search.
///
/// `fg` returns the objective and its gradient. Terminates when the gradient
/// norm drops below `grad_tol` or after `max_iter` iterations.
pub fn bfgs<F>(x0: &DVector<f64>, mut fg: F, grad_tol: f64, max_iter: usize) -> LocalMin
where
    F: FnMut(&DVector<f64>) -> (f64, DVector<f64>),
{
    let n = x0.len();
    let mut x = x0.clone();
    let (mut f, mut g) = fg(&x);
    let mut h_inv = DMatrix::<f64>::identity(n, n);
    let mut iterations = 0;

    for _ in 0..max_iter {
        let gnorm = g.norm();
        if gnorm <= grad_tol {
            break;
        }
        iterations += 1;
        let dir = -(&h_inv * &g);
        let slope = g.dot(&dir);
        let dir = if slope >= 0.0 {
            // not a descent direction; reset to steepest descent
            h_inv = DMatrix::identity(n, n);
            -g.clone()
        } else {
            dir
        };
        let slope = g.dot(&dir);

        // Armijo backtracking
        let mut step = 1.0;
        let c1 = 1e-4;
        let mut accepted = None;
        for _ in 0..60 {
            let xt = &x + &dir * step;
            let (ft, gt) = fg(&xt);
            if ft <= f + c1 * step * slope {
                accepted = Some((xt, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xt, ft, gt)) = accepted else { break };

        let s = &xt - &x;
        let y = &gt - &g;
        let sy = s.dot(&y);
        if sy > 1e-16 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let id = DMatrix::<f64>::identity(n, n);
            let left = &id - (&s * y.transpose()).scale(rho);
            let right = &id - (&y * s.transpose()).scale(rho);
            h_inv = &left * h_inv * &right + (&s * s.transpose()).scale(rho);
        }
        x = xt;
        f = ft;
        g = gt;
    }
    LocalMin { grad_norm: g.norm(), x, value: f, iterations }
}

/// Nelder–Mead simplex minimization (standard coefficients).
///
/// Derivative-free; the achieved value, not stationarity, is the acceptance
/// quantity for its callers.
pub fn nelder_mead<F>(
    x0: &DVector<f64>,
    mut f: F,
    initial_step: f64,
    f_tol: f64,
    max_iter: usize,
) -> LocalMin
where
    F: FnMut(&DVector<f64>) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = f(x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut xi = x0.clone();
        xi[i] += initial_step;
        let fi = f(&xi);
        simplex.push((xi, fi));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() <= f_tol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let centroid: DVector<f64> = simplex[..n]
            .iter()
            .fold(DVector::zeros(n), |acc, (x, _)| acc + x)
            .scale(1.0 / n as f64);
        let worst = simplex[n].clone();
        let reflected = &centroid + (&centroid - &worst.0).scale(alpha);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = &centroid + (&reflected - &centroid).scale(gamma);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 {
                &centroid + (&reflected - &centroid).scale(rho)
            } else {
                &centroid + (&worst.0 - &centroid).scale(rho)
            };
            let fc = f(&contracted);
            if fc < worst.1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x = &best + (&item.0 - &best).scale(sigma);
                    let fx = f(&x);
                    *item = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    LocalMin {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        grad_norm: f64::NAN,
        iterations,
    }
}
