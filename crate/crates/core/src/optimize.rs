//! Small dense unconstrained minimizer.
//!
//! Newton's method with a finite-difference Hessian, diagonal loading when
//! the Hessian is not positive definite, and an Armijo backtracking line
//! search. Objectives may return `+∞` to mark infeasible points; such trial
//! steps are simply rejected by the line search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major square matrix.
pub type Matrix = Vec<Vec<f64>>;

/// A scalar function of a real vector, optionally with an analytic gradient.
pub trait Objective {
    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64,
{
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeSettings {
    /// Gradient-norm threshold; `None` means `1e−8·max(1, |f(x0)|)`.
    pub gtol: Option<f64>,
    pub step_tol: f64,
    pub max_iter: usize,
    pub h_gradient: f64,
    pub h_hessian: f64,
}

impl Default for MinimizeSettings {
    fn default() -> Self {
        Self {
            gtol: None,
            step_tol: 1e-12,
            max_iter: 500,
            h_gradient: 1e-5,
            h_hessian: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub x_min: Vec<f64>,
    pub f_min: f64,
    pub gradient_norm: f64,
    /// Numerical Hessian at `x_min`, symmetric by construction.
    pub hessian: Matrix,
    pub iterations: usize,
    pub converged: bool,
    /// Objective values at the accepted iterates, starting with `f(x0)`.
    pub accepted: Vec<f64>,
}

fn step_size(x: f64, h_rel: f64) -> f64 {
    h_rel * x.abs().max(1.0)
}

fn shifted(x: &[f64], j: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[j] += d;
    y
}

fn shifted2(x: &[f64], j: usize, dj: f64, k: usize, dk: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[j] += dj;
    y[k] += dk;
    y
}

fn eval_finite<F: Fn(&[f64]) -> f64>(f: &F, x: Vec<f64>) -> Result<f64> {
    let v = f(&x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::StencilFailure { point: x })
    }
}

/// Central-difference gradient with per-coordinate step `h_rel·max(1, |x_j|)`.
pub fn numerical_gradient<F>(f: F, x: &[f64], h_rel: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    (0..x.len())
        .map(|j| {
            let h = step_size(x[j], h_rel);
            let up = eval_finite(&f, shifted(x, j, h))?;
            let down = eval_finite(&f, shifted(x, j, -h))?;
            Ok((up - down) / (2.0 * h))
        })
        .collect()
}

/// Central second differences of `f`, symmetrized as `(H + Hᵀ)/2`.
pub fn numerical_hessian<F>(f: F, x: &[f64], h_rel: f64) -> Result<Matrix>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let f0 = eval_finite(&f, x.to_vec())?;
    let h: Vec<f64> = x.iter().map(|&v| step_size(v, h_rel)).collect();
    let mut hess = vec![vec![0.0; n]; n];
    for j in 0..n {
        let up = eval_finite(&f, shifted(x, j, h[j]))?;
        let down = eval_finite(&f, shifted(x, j, -h[j]))?;
        hess[j][j] = (up - 2.0 * f0 + down) / (h[j] * h[j]);
        for k in 0..j {
            let pp = eval_finite(&f, shifted2(x, j, h[j], k, h[k]))?;
            let pm = eval_finite(&f, shifted2(x, j, h[j], k, -h[k]))?;
            let mp = eval_finite(&f, shifted2(x, j, -h[j], k, h[k]))?;
            let mm = eval_finite(&f, shifted2(x, j, -h[j], k, -h[k]))?;
            let v = (pp - pm - mp + mm) / (4.0 * h[j] * h[k]);
            hess[j][k] = v;
            hess[k][j] = v;
        }
    }
    Ok(hess)
}

/// Jacobian of a gradient by central differences, symmetrized.
///
/// Where the central stencil leaves the domain (`grad` returns `None` or a
/// non-finite entry) a one-sided difference is used instead; if neither side
/// works the offending point is reported.
pub fn hessian_from_gradient<G>(grad: G, x: &[f64], h_rel: f64) -> Result<Matrix>
where
    G: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x.len();
    let finite = |p: &[f64]| grad(p).filter(|g| g.iter().all(|v| v.is_finite()));
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let h = step_size(x[j], h_rel);
        let up_pt = shifted(x, j, h);
        let down_pt = shifted(x, j, -h);
        let col: Vec<f64> = match (finite(&up_pt), finite(&down_pt)) {
            (Some(u), Some(d)) => u.iter().zip(&d).map(|(a, b)| (a - b) / (2.0 * h)).collect(),
            (Some(u), None) => {
                let c = finite(x).ok_or_else(|| Error::StencilFailure { point: x.to_vec() })?;
                u.iter().zip(&c).map(|(a, b)| (a - b) / h).collect()
            }
            (None, Some(d)) => {
                let c = finite(x).ok_or_else(|| Error::StencilFailure { point: x.to_vec() })?;
                c.iter().zip(&d).map(|(a, b)| (a - b) / h).collect()
            }
            (None, None) => return Err(Error::StencilFailure { point: up_pt }),
        };
        cols.push(col);
    }
    Ok(symmetrize(
        &(0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect::<Matrix>(),
    ))
}

fn symmetrize(m: &Matrix) -> Matrix {
    let n = m.len();
    (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (m[i][j] + m[j][i])).collect())
        .collect()
}

/// Lower Cholesky factor, or `None` if `m` is not positive definite.
pub fn cholesky(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = m[i][i] - s;
                if !(d > 0.0) || !d.is_finite() {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

/// Solves `L·Lᵀ·x = b` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    x
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse(m: &Matrix) -> Option<Matrix> {
    let l = cholesky(m)?;
    let n = m.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cholesky_solve(&l, &e)
        })
        .collect();
    Some(symmetrize(
        &(0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect(),
    ))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient for the optimizer: analytic when offered, otherwise central
/// differences that fall back to one-sided ones next to a `+∞` barrier.
fn working_gradient<O: Objective + ?Sized>(obj: &O, x: &[f64], f0: f64, h_rel: f64) -> Vec<f64> {
    if let Some(g) = obj.gradient(x) {
        return g;
    }
    (0..x.len())
        .map(|j| {
            let h = step_size(x[j], h_rel);
            let up = obj.value(&shifted(x, j, h));
            let down = obj.value(&shifted(x, j, -h));
            match (up.is_finite(), down.is_finite()) {
                (true, true) => (up - down) / (2.0 * h),
                (true, false) => (up - f0) / h,
                (false, true) => (f0 - down) / h,
                (false, false) => 0.0,
            }
        })
        .collect()
}

fn working_hessian<O: Objective + ?Sized>(obj: &O, x: &[f64], settings: &MinimizeSettings) -> Option<Matrix> {
    if obj.gradient(x).is_some() {
        hessian_from_gradient(|p| obj.gradient(p), x, settings.h_hessian).ok()
    } else {
        numerical_hessian(|p| obj.value(p), x, settings.h_hessian).ok()
    }
}

/// Minimizes `objective` from `x0`.
///
/// Iteration stops when the gradient norm drops to `gtol`, when an accepted
/// step is shorter than `step_tol·(1 + |x|)`, when no decrease can be found
/// along the Newton direction, or after `max_iter` steps. `converged` is set
/// only when the final gradient norm is within `gtol`.
pub fn minimize<O>(objective: &O, x0: &[f64], settings: &MinimizeSettings) -> Result<MinimizeResult>
where
    O: Objective + ?Sized,
{
    let mut x = x0.to_vec();
    let mut f = objective.value(&x);
    if !f.is_finite() {
        return Err(Error::Domain(format!(
            "objective is not finite at the start point {x0:?}"
        )));
    }
    let gtol = settings.gtol.unwrap_or(1e-8 * f.abs().max(1.0));
    let mut accepted = vec![f];
    let mut iterations = 0;
    let mut g = working_gradient(objective, &x, f, settings.h_gradient);

    while iterations < settings.max_iter && norm(&g) > gtol {
        let Some(hess) = working_hessian(objective, &x, settings) else {
            break;
        };
        let direction = newton_direction(&hess, &g);
        let slope = dot(&g, &direction);
        if !(slope < 0.0) {
            break;
        }

        let mut t = 1.0;
        let mut next = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&direction).map(|(a, d)| a + t * d).collect();
            let f_trial = objective.value(&trial);
            if f_trial.is_finite() && f_trial <= f + 1e-4 * t * slope {
                next = Some((trial, f_trial));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, f_trial)) = next else {
            break;
        };

        iterations += 1;
        let step = t * norm(&direction);
        x = trial;
        f = f_trial;
        accepted.push(f);
        g = working_gradient(objective, &x, f, settings.h_gradient);
        if step <= settings.step_tol * (1.0 + norm(&x)) {
            break;
        }
    }

    let gradient_norm = norm(&g);
    let hessian = working_hessian(objective, &x, settings).unwrap_or_else(|| vec![vec![f64::NAN; x.len()]; x.len()]);
    Ok(MinimizeResult {
        converged: gradient_norm <= gtol,
        x_min: x,
        f_min: f,
        gradient_norm,
        hessian,
        iterations,
        accepted,
    })
}

/// `−(H + τI)⁻¹ g` with the smallest tried `τ ≥ 0` that makes the matrix
/// positive definite.
fn newton_direction(hess: &Matrix, g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let scale = hess
        .iter()
        .enumerate()
        .map(|(i, row)| row[i].abs())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut tau = 0.0;
    for _ in 0..40 {
        let loaded: Matrix = (0..n)
            .map(|i| (0..n).map(|j| hess[i][j] + if i == j { tau } else { 0.0 }).collect())
            .collect();
        if let Some(l) = cholesky(&loaded) {
            return cholesky_solve(&l, g).into_iter().map(|v| -v).collect();
        }
        tau = if tau == 0.0 { 1e-3 * scale } else { tau * 10.0 };
    }
    g.iter().map(|v| -v / scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;

    #[test]
    fn separable_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2);
        let r = minimize(&f, &[0.0, 0.0], &MinimizeSettings::default()).unwrap();
        assert!(r.converged);
        assert!((r.x_min[0] - 1.0).abs() < 1e-10);
        assert!((r.x_min[1] + 2.0).abs() < 1e-10);
        assert!(r.f_min.abs() < 1e-18);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let settings = MinimizeSettings {
            gtol: Some(1e-9),
            ..MinimizeSettings::default()
        };
        let r = minimize(&f, &[-1.2, 1.0], &settings).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.x_min[0] - 1.0).abs() < 1e-6 && (r.x_min[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock_with_analytic_gradient() {
        struct Rosen;
        impl Objective for Rosen {
            fn value(&self, x: &[f64]) -> f64 {
                (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
            }
            fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
                let t = x[1] - x[0] * x[0];
                Some(vec![-2.0 * (1.0 - x[0]) - 400.0 * x[0] * t, 200.0 * t])
            }
        }
        let settings = MinimizeSettings {
            gtol: Some(1e-8),
            ..MinimizeSettings::default()
        };
        let r = minimize(&Rosen, &[-1.2, 1.0], &settings).unwrap();
        assert!(r.converged && r.gradient_norm < 1e-8);
        assert!((r.x_min[0] - 1.0).abs() < 1e-6 && (r.x_min[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn barrier_is_respected() {
        let evaluated = RefCell::new(Vec::new());
        let f = |x: &[f64]| {
            evaluated.borrow_mut().push(x[0]);
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.5).powi(2) + (x[0] + 1.0).ln() * 1e-3
            }
        };
        let r = minimize(&f, &[3.0], &MinimizeSettings::default()).unwrap();
        assert!(r.converged);
        let want = {
            // stationary point of (x−0.5)² + 1e−3·ln(x+1)
            let mut x: f64 = 0.5;
            for _ in 0..100 {
                x = 0.5 - 0.5e-3 / (x + 1.0);
            }
            x
        };
        assert!((r.x_min[0] - want).abs() < 1e-9);
        assert!(r.x_min[0] > 0.0);
    }

    #[test]
    fn minimum_on_barrier_side() {
        // Newton from the far side overshoots into x < 0; the line search backs off.
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 0.5).powi(4) + (x[0] - 0.5).powi(2)
            }
        };
        let r = minimize(&f, &[0.01], &MinimizeSettings::default()).unwrap();
        assert!(r.converged);
        assert!((r.x_min[0] - 0.5).abs() < 1e-6);
        assert!(r.accepted.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.accepted.iter().all(|v| v.is_finite()));
    }

    struct Quadratic {
        a: Matrix,
        b: Vec<f64>,
    }

    impl Objective for Quadratic {
        fn value(&self, x: &[f64]) -> f64 {
            let ax = self.a.iter().map(|row| dot(row, x)).collect::<Vec<_>>();
            0.5 * dot(x, &ax) - dot(&self.b, x)
        }
        fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
            Some(self.a.iter().zip(&self.b).map(|(row, b)| dot(row, x) - b).collect())
        }
    }

    #[test]
    fn strictly_convex_quadratic_converges_fast() {
        let q = Quadratic {
            a: vec![vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 2.0]],
            b: vec![1.0, -2.0, 0.5],
        };
        let settings = MinimizeSettings {
            gtol: Some(1e-12),
            ..MinimizeSettings::default()
        };
        let r = minimize(&q, &[5.0, 5.0, -5.0], &settings).unwrap();
        assert!(r.converged && r.iterations <= 5, "{r:?}");
        let want = cholesky_solve(&cholesky(&q.a).unwrap(), &q.b);
        for (x, w) in r.x_min.iter().zip(&want) {
            assert!((x - w).abs() < 1e-10);
        }
        // without the analytic gradient: same count, noise-limited accuracy
        let f = |x: &[f64]| q.value(x);
        let r = minimize(&f, &[5.0, 5.0, -5.0], &MinimizeSettings::default()).unwrap();
        assert!(r.converged && r.iterations <= 5);
        for (x, w) in r.x_min.iter().zip(&want) {
            assert!((x - w).abs() < 1e-6);
        }
    }

    #[test]
    fn indefinite_start_uses_loading() {
        // Saddle-ish start: Hessian of cos is negative near 0.
        let f = |x: &[f64]| x[0].cos() + 0.05 * x[0] * x[0];
        let r = minimize(&f, &[0.3], &MinimizeSettings::default()).unwrap();
        assert!(r.converged);
        let g = -r.x_min[0].sin() + 0.1 * r.x_min[0];
        assert!(g.abs() < 1e-8);
        assert!(r.f_min < f(&[0.3]));
    }

    #[test]
    fn gradient_and_hessian_of_square() {
        let f = |x: &[f64]| x[0] * x[0];
        let g = numerical_gradient(f, &[3.0], 1e-5).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-7);
        let h = numerical_hessian(f, &[3.0], 1e-4).unwrap();
        assert!((h[0][0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn cross_partial() {
        let h = numerical_hessian(|x: &[f64]| x[0] * x[1], &[0.7, -1.3], 1e-4).unwrap();
        assert!((h[0][1] - 1.0).abs() < 1e-5);
        assert_eq!(h[0][1], h[1][0]);
        assert!(h[0][0].abs() < 1e-5);
    }

    #[test]
    fn stencil_failure_reports_point() {
        let f = |x: &[f64]| if x[0] > 1.0 { f64::INFINITY } else { x[0] };
        match numerical_gradient(f, &[1.0], 1e-5) {
            Err(Error::StencilFailure { point }) => assert!(point[0] > 1.0),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            numerical_hessian(f, &[1.0], 1e-4),
            Err(Error::StencilFailure { .. })
        ));
    }

    #[test]
    fn start_must_be_feasible() {
        let f = |_: &[f64]| f64::INFINITY;
        assert!(minimize(&f, &[0.0], &MinimizeSettings::default()).is_err());
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let settings = MinimizeSettings {
            max_iter: 2,
            ..MinimizeSettings::default()
        };
        let r = minimize(&f, &[-1.2, 1.0], &settings).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn spd_inverse_round_trip() {
        let m = vec![vec![4.0, 1.0], vec![1.0, 3.0]];
        let inv = spd_inverse(&m).unwrap();
        assert!((inv[0][0] - 3.0 / 11.0).abs() < 1e-15);
        assert!((inv[0][1] + 1.0 / 11.0).abs() < 1e-15);
        assert!(spd_inverse(&vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_none());
    }
}
