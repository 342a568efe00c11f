//! Bracketed scalar root finding.
//!
//! [`solve_bracketed`] is Brent's method: inverse quadratic interpolation and
//! secant steps, falling back to bisection whenever the interpolated step is
//! not shrinking the bracket fast enough. It needs no derivatives and always
//! converges for a continuous function with a sign change.

use crate::error::{Error, Result};

/// An interval with a sign change of `f` across it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Builds a bracket, checking `lo < hi` and the sign condition.
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Domain(format!("bracket needs lo < hi, got [{lo}, {hi}]")));
        }
        if !opposite_or_zero(f_lo, f_hi) {
            return Err(Error::Domain(format!(
                "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
            )));
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn opposite_or_zero(a: f64, b: f64) -> bool {
    a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0)
}

/// Tolerances for [`solve_bracketed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative bracket width: stop once `width ≤ xtol·max(1, |x|)`.
    pub xtol: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            xtol: 1e-12,
            ftol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Finds a sign change of `f` above `lo`, doubling the distance of the upper
/// end: `hi_j = lo + 2^j·(hi0 − lo)`.
pub fn expand_bracket<F>(f: F, lo: f64, hi0: f64, max_doublings: u32) -> Result<Bracket>
where
    F: Fn(f64) -> f64,
{
    if !(hi0 > lo) {
        return Err(Error::Domain(format!(
            "expand_bracket needs hi0 > lo, got {hi0} ≤ {lo}"
        )));
    }
    let f_lo = f(lo);
    let span = hi0 - lo;
    let mut hi = hi0;
    for j in 0..=max_doublings {
        hi = lo + span * 2f64.powi(j as i32);
        let f_hi = f(hi);
        if opposite_or_zero(f_lo, f_hi) {
            return Bracket::new(lo, hi, f_lo, f_hi);
        }
    }
    Err(Error::BracketFailure {
        lo,
        hi,
        doublings: max_doublings,
    })
}

/// Brent's method on a sign-changing bracket.
///
/// Stops when `|f(x)| ≤ ftol` or when the bracket is narrower than
/// `xtol·max(1, |x|)`. The returned root always lies in `[lo, hi]`.
pub fn solve_bracketed<F>(f: F, bracket: Bracket, opts: SolveOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let Bracket {
        lo: mut a,
        hi: mut b,
        f_lo: mut fa,
        f_hi: mut fb,
    } = bracket;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..opts.max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol = 0.5 * opts.xtol * b.abs().max(1.0) + 2.0 * f64::EPSILON * b.abs();
        let half = 0.5 * (c - b);
        if fb.abs() <= opts.ftol || half.abs() <= tol {
            return Ok(b);
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * half * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * half * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * half * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b);
        if !fb.is_finite() {
            // Stay inside the bracket: bisect instead.
            b = a + half;
            fb = f(b);
        }
    }

    let (lo, hi) = if b < c { (b, c) } else { (c, b) };
    let (f_lo, f_hi) = if b < c { (fb, fc) } else { (fc, fb) };
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        bracket: Bracket { lo, hi, f_lo, f_hi },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solve<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
        let b = Bracket::new(lo, hi, f(lo), f(hi)).unwrap();
        solve_bracketed(f, b, SolveOptions::default()).unwrap()
    }

    #[test]
    fn expands_to_linear_root() {
        let b = expand_bracket(|x| x - 5.0, 0.0, 1.0, 10).unwrap();
        assert!(b.lo <= 5.0 && 5.0 <= b.hi);
    }

    #[test]
    fn expands_to_exp3() {
        let b = expand_bracket(|x: f64| x.ln() - 3.0, 1.0, 2.0, 10).unwrap();
        let e3 = 3f64.exp();
        assert!(b.lo <= e3 && e3 <= b.hi);
    }

    #[test]
    fn expansion_fails_without_root() {
        let err = expand_bracket(|_| 1.0, 0.0, 1.0, 20).unwrap_err();
        assert!(matches!(err, Error::BracketFailure { doublings: 20, .. }));
    }

    #[test]
    fn bracket_rejects_bad_input() {
        assert!(Bracket::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(Bracket::new(0.0, 1.0, 1.0, 2.0).is_err());
        assert!(Bracket::new(0.0, 1.0, 0.0, 2.0).is_ok());
    }

    #[test]
    fn sqrt_two() {
        let x = solve(|x| x * x - 2.0, 1.0, 2.0);
        assert!((x - std::f64::consts::SQRT_2).abs() < 1e-11);
    }

    #[test]
    fn odd_function_root_at_zero() {
        assert!(solve(|x| x, -1.0, 1.0).abs() < 1e-12);
    }

    #[test]
    fn dottie_number_matches_fixed_point_iteration() {
        // Oracle: iterate x ← cos x to its fixed point.
        let mut fixed = 0.5f64;
        for _ in 0..2000 {
            fixed = fixed.cos();
        }
        let x = solve(|x: f64| x.cos() - x, 0.0, 1.0);
        assert!((x - fixed).abs() < 1e-9);
        assert!((x - 0.739_085_133_215_160_6).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence_with_bracket() {
        let f = |x: f64| x.powi(3) - 0.3;
        let b = Bracket::new(0.0, 1.0, f(0.0), f(1.0)).unwrap();
        let opts = SolveOptions {
            xtol: 1e-15,
            ftol: 0.0,
            max_iter: 3,
        };
        match solve_bracketed(f, b, opts) {
            Err(Error::NoConvergence { iterations: 3, bracket }) => {
                assert!(bracket.lo >= 0.0 && bracket.hi <= 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn root_stays_in_bracket(root in -50.0f64..50.0, lo_off in 0.01f64..20.0, hi_off in 0.01f64..20.0) {
            let f = |x: f64| (x - root).powi(3) + 0.5 * (x - root);
            let lo = root - lo_off;
            let hi = root + hi_off;
            let x = solve(f, lo, hi);
            prop_assert!(lo <= x && x <= hi);
            prop_assert!((x - root).abs() < 1e-9 * root.abs().max(1.0));
        }
    }
}
