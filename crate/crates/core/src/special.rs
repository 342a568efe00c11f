//! Scalar special functions and the log-space binomial/exponential series.
//!
//! Every GEL-S quantity that involves the normalizing constant reduces to the
//! series
//!
//! ```text
//! S(α, γ, m) = Σ_{i=0}^{m} C(m, i) · α^{m−i} · exp((i + 1)² γ² / 2)
//! ```
//!
//! whose terms exceed `f64::MAX` long before the orders that real fits reach
//! (ball-bearing data selects `k = 27`). It is therefore only ever handled as a
//! logarithm.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// `½·ln(2π)`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal cdf Φ(z).
///
/// Evaluated through `erfc`, so the lower tail keeps full relative precision
/// down to the underflow threshold. Saturates to 0 or 1 for large `|z|`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard normal survival function `1 − Φ(z) = Φ(−z)`.
pub fn std_normal_sf(z: f64) -> f64 {
    std_normal_cdf(-z)
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

/// Inverse of Φ, Wichura's AS 241 (PPND16), relative accuracy about 1e−16.
///
/// Returns `±∞` at `p = 1` / `p = 0` and NaN outside `[0, 1]`.
pub fn std_normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2509.080_928_730_122_7 * r + 33430.575_583_588_128) * r + 67265.770_927_008_7) * r
            + 45921.953_931_549_87)
            * r
            + 13731.693_765_509_461)
            * r
            + 1971.590_950_306_551_3)
            * r
            + 133.141_667_891_784_38)
            * r
            + 3.387_132_872_796_366_5;
        let den = ((((((5226.495_278_852_545 * r + 28729.085_735_721_943) * r + 39307.895_800_092_71) * r
            + 21213.794_301_586_597)
            * r
            + 5394.196_021_424_751)
            * r
            + 687.187_007_492_057_9)
            * r
            + 42.313_330_701_600_91)
            * r
            + 1.0;
        return q * num / den;
    }

    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let z = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r + 0.241_780_725_177_450_6)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den =
            ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r + 1.519_866_656_361_645_7e-2) * r
                + 0.148_103_976_427_480_08)
                * r
                + 0.689_767_334_985_1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_759)
                * r
                + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 0.296_560_571_828_504_9)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den =
            ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r + 1.846_318_317_510_054_8e-5) * r
                + 7.868_691_311_456_133e-4)
                * r
                + 1.487_536_129_085_061_5e-2)
                * r
                + 0.136_929_880_922_735_8)
                * r
                + 0.599_832_206_555_888)
                * r
                + 1.0;
        num / den
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}

/// `ln C(n, i)` via log-gamma.
pub fn log_binomial(n: u32, i: u32) -> Result<f64> {
    if i > n {
        return Err(Error::Domain(format!("binomial index {i} exceeds n = {n}")));
    }
    if i == 0 || i == n {
        return Ok(0.0);
    }
    let lg = |v: u32| libm::lgamma(f64::from(v) + 1.0);
    Ok(lg(n) - lg(i) - lg(n - i))
}

/// `ln Σ exp(t_j)`, stable for arbitrarily large or small terms.
///
/// An empty slice or one made only of `−∞` yields `−∞`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let (imax, max) =
        terms.iter().copied().enumerate().fold(
            (usize::MAX, f64::NEG_INFINITY),
            |best, (j, t)| {
                if t > best.1 {
                    (j, t)
                } else {
                    best
                }
            },
        );
    if max.is_infinite() {
        return max;
    }
    let rest: f64 = terms
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != imax)
        .map(|(_, &t)| (t - max).exp())
        .sum();
    max + rest.ln_1p()
}

/// Natural log of `S(α, γ, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSeriesSum {
    pub value: f64,
    pub m: u32,
    pub alpha: f64,
    pub gamma: f64,
}

/// The individual log-terms `ln C(m,i) + (m−i)·ln α + (i+1)²γ²/2`, `i = 0..=m`.
///
/// With `α = 0` every term but `i = m` is `−∞` (the `0⁰ = 1` convention keeps
/// the last one).
pub fn log_series_terms(alpha: f64, gamma: f64, m: u32) -> Vec<f64> {
    let ln_alpha = alpha.ln();
    let half_g2 = 0.5 * gamma * gamma;
    (0..=m)
        .map(|i| {
            let power = m - i;
            let shift = f64::from(i + 1);
            let ln_pow = if power == 0 {
                0.0
            } else if alpha == 0.0 {
                return f64::NEG_INFINITY;
            } else {
                f64::from(power) * ln_alpha
            };
            // i ≤ m, cannot fail
            log_binomial(m, i).unwrap_or(0.0) + ln_pow + shift * shift * half_g2
        })
        .collect()
}

pub fn log_series_sum(alpha: f64, gamma: f64, m: u32) -> LogSeriesSum {
    LogSeriesSum {
        value: log_sum_exp(&log_series_terms(alpha, gamma, m)),
        m,
        alpha,
        gamma,
    }
}

/// `(∂ ln S/∂α, ∂ ln S/∂γ)` evaluated in log-space.
///
/// At `α = 0` with `m > 0` the α-derivative is the one-sided limit, which only
/// the `i = m − 1` term contributes to.
pub fn log_series_sum_partials(alpha: f64, gamma: f64, m: u32) -> (f64, f64) {
    let terms = log_series_terms(alpha, gamma, m);
    let ln_s = log_sum_exp(&terms);

    let d_gamma: f64 = terms
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let shift = (i + 1) as f64;
            (t - ln_s).exp() * shift * shift * gamma
        })
        .sum();

    if m == 0 {
        return (0.0, d_gamma);
    }
    let ln_alpha = alpha.ln();
    let half_g2 = 0.5 * gamma * gamma;
    let alpha_terms: Vec<f64> = (0..m)
        .map(|i| {
            let power = m - i;
            let ln_pow = if power == 1 {
                0.0
            } else if alpha == 0.0 {
                return f64::NEG_INFINITY;
            } else {
                f64::from(power - 1) * ln_alpha
            };
            let shift = f64::from(i + 1);
            log_binomial(m, i).unwrap_or(0.0) + f64::from(power).ln() + ln_pow + shift * shift * half_g2
        })
        .collect();
    let d_alpha = (log_sum_exp(&alpha_terms) - ln_s).exp();
    (d_alpha, d_gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn direct_series(alpha: f64, gamma: f64, m: u32) -> f64 {
        (0..=m)
            .map(|i| {
                let binom = log_binomial(m, i).unwrap().exp();
                let pow = if m - i == 0 { 1.0 } else { alpha.powi((m - i) as i32) };
                binom * pow * ((f64::from(i + 1)).powi(2) * gamma * gamma / 2.0).exp()
            })
            .sum()
    }

    #[test]
    fn phi_reference_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        // mpmath ncdf(1), 40 digits
        assert!((std_normal_cdf(1.0) - 0.841_344_746_068_542_948_6).abs() < 1e-15);
        assert_eq!(std_normal_cdf(-40.0), 0.0);
        assert_eq!(std_normal_cdf(40.0), 1.0);
    }

    #[test]
    fn phi_reflection_on_grid() {
        for j in 0..=2000 {
            let z = -10.0 + 0.01 * f64::from(j);
            let s = std_normal_cdf(z) + std_normal_cdf(-z) - 1.0;
            assert!(s.abs() < 1e-15, "z = {z}: {s:e}");
        }
    }

    #[test]
    fn quantile_inverts_phi() {
        for &p in &[
            1e-300,
            1e-20,
            1e-8,
            0.001,
            0.025,
            0.3,
            0.5,
            0.7,
            0.975,
            0.999,
            1.0 - 1e-12,
        ] {
            let z = std_normal_quantile(p);
            let back = std_normal_cdf(z);
            assert!(((back - p) / p).abs() < 1e-13, "p = {p}: {back}");
        }
        assert!((std_normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert!(std_normal_quantile(1.5).is_nan());
    }

    #[test]
    fn log_binomial_small_cases() {
        assert_eq!(log_binomial(5, 0).unwrap(), 0.0);
        assert!((log_binomial(4, 2).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert!(matches!(log_binomial(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn log_binomial_matches_exact_integers() {
        use num_bigint::BigUint;
        for n in [10u32, 50, 100, 150, 200] {
            for i in [1u32, n / 3, n / 2, n - 1] {
                let mut exact = BigUint::from(1u32);
                for j in 0..i {
                    exact = exact * BigUint::from(n - j) / BigUint::from(j + 1);
                }
                let digits = exact.to_string();
                // ln of a big decimal: ln(mantissa) + exponent·ln 10
                let lead: f64 = format!("0.{}", &digits[..digits.len().min(17)]).parse().unwrap();
                let want = lead.ln() + digits.len() as f64 * std::f64::consts::LN_10;
                let got = log_binomial(n, i).unwrap();
                assert!(((got - want) / want).abs() < 1e-13, "({n},{i}): {got} vs {want}");
            }
        }
        // (100, 50), mpmath
        assert!((log_binomial(100, 50).unwrap() - 66.783_841_652_017_426).abs() < 66.8e-13);
    }

    #[test]
    fn log_sum_exp_basics() {
        assert!((log_sum_exp(&[0.0, 0.0]) - LN_2).abs() < 1e-15);
        assert!((log_sum_exp(&[-1000.0, -1000.0]) - (-1000.0 + LN_2)).abs() < 1e-12);
        let l6 = log_sum_exp(&[1f64.ln(), 2f64.ln(), 3f64.ln()]);
        assert!((l6 - 6f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[f64::NEG_INFINITY, 2.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_series_sum_examples() {
        assert!((log_series_sum(0.0, 0.5, 0).value - 0.125).abs() < 1e-15);
        assert!((log_series_sum(0.0, 1.0, 2).value - 4.5).abs() < 1e-15);
        // mpmath: ln(0.5·e^{0.125} + e^{0.5})
        assert!((log_series_sum(0.5, 0.5, 1).value - 0.795_385_801_928_045_17).abs() < 1e-15);
    }

    #[test]
    fn log_series_sum_stays_finite_where_direct_sum_overflows() {
        let s = log_series_sum(100.0, 3.0, 60);
        assert!(s.value.is_finite());
        assert!(s.value > 709.0, "the direct sum would overflow: {}", s.value);
        assert!(direct_series(100.0, 3.0, 60).is_infinite());
    }

    #[test]
    fn partials_examples() {
        let (da, dg) = log_series_sum_partials(3.0, 0.5, 0);
        assert_eq!(da, 0.0);
        assert!((dg - 0.5).abs() < 1e-15);
        let (_, dg) = log_series_sum_partials(0.0, 1.0, 3);
        assert!((dg - 16.0).abs() < 1e-13);
        // α = 0 one-sided: S = e^{(m+1)²γ²/2} + m·α·e^{m²γ²/2} + O(α²)
        let (da, _) = log_series_sum_partials(0.0, 1.0, 3);
        assert!((da - 3.0 * (4.5f64 - 8.0).exp()).abs() < 1e-15);
    }

    // Five-point stencil; a plain central difference loses too many digits
    // when ln S is large and the partial is small.
    fn fd_partials(alpha: f64, gamma: f64, m: u32) -> (f64, f64) {
        let f = |a: f64, g: f64| log_series_sum(a, g, m).value;
        let d = |g: &dyn Fn(f64) -> f64, x: f64, h: f64| {
            (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h)
        };
        let ha = 1e-3 * alpha.min(1.0);
        let hg = 1e-3 * gamma.min(1.0);
        (d(&|a| f(a, gamma), alpha, ha), d(&|g| f(alpha, g), gamma, hg))
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-12)
    }

    #[test]
    fn partials_match_finite_differences_on_grid() {
        for &alpha in &[0.05, 0.5, 1.0, 3.0, 20.0] {
            for &gamma in &[0.2, 0.5, 1.0, 1.7] {
                for &m in &[1u32, 2, 5, 12, 27] {
                    let (da, dg) = log_series_sum_partials(alpha, gamma, m);
                    let (fa, fg) = fd_partials(alpha, gamma, m);
                    // roundoff of the stencil itself
                    let ln_s = log_series_sum(alpha, gamma, m).value.abs();
                    let floor_a = 1e-14 * ln_s / (1e-3 * alpha.min(1.0));
                    let floor_g = 1e-14 * ln_s / (1e-3 * gamma.min(1.0));
                    assert!(
                        (da - fa).abs() <= 1e-6 * fa.abs() + floor_a,
                        "dα at ({alpha},{gamma},{m}): {da} vs {fa}"
                    );
                    assert!(
                        (dg - fg).abs() <= 1e-6 * fg.abs() + floor_g,
                        "dγ at ({alpha},{gamma},{m}): {dg} vs {fg}"
                    );
                }
            }
        }
    }

    #[test]
    fn partials_match_direct_sums() {
        for &alpha in &[0.05, 0.5, 3.0] {
            for &gamma in &[0.2, 0.5, 1.0] {
                for &m in &[1u32, 5, 12, 27] {
                    let binom = |i: u32| log_binomial(m, i).unwrap().exp();
                    let e = |i: u32| (f64::from(i + 1).powi(2) * gamma * gamma / 2.0).exp();
                    let s = direct_series(alpha, gamma, m);
                    let sa: f64 = (0..m)
                        .map(|i| binom(i) * f64::from(m - i) * alpha.powi((m - i - 1) as i32) * e(i))
                        .sum();
                    let sg: f64 = (0..=m)
                        .map(|i| binom(i) * alpha.powi((m - i) as i32) * f64::from(i + 1).powi(2) * gamma * e(i))
                        .sum();
                    let (da, dg) = log_series_sum_partials(alpha, gamma, m);
                    assert!(rel(da, sa / s) < 1e-12, "({alpha},{gamma},{m})");
                    assert!(rel(dg, sg / s) < 1e-12, "({alpha},{gamma},{m})");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn phi_is_monotone(z1 in -40.0f64..40.0, dz in 0.0f64..10.0) {
            prop_assert!(std_normal_cdf(z1) <= std_normal_cdf(z1 + dz));
        }

        #[test]
        fn log_sum_exp_shift_invariant(
            terms in proptest::collection::vec(-50.0f64..50.0, 1..12),
            c in -500.0f64..500.0,
        ) {
            let shifted: Vec<f64> = terms.iter().map(|t| t + c).collect();
            let d = log_sum_exp(&shifted) - (log_sum_exp(&terms) + c);
            prop_assert!(d.abs() <= 1e-14 * (1.0 + c.abs() + log_sum_exp(&terms).abs()));
        }

        #[test]
        fn series_matches_direct_sum(alpha in 0.0f64..5.0, gamma in 0.05f64..1.5, m in 0u32..20) {
            let direct = direct_series(alpha, gamma, m);
            prop_assume!(direct.is_finite());
            let logv = log_series_sum(alpha, gamma, m).value;
            prop_assert!(((logv.exp() - direct) / direct).abs() < 1e-12);
        }

        #[test]
        fn series_never_overflows(alpha in 0.0f64..100.0, gamma in 0.01f64..3.0, m in 0u32..=60) {
            prop_assert!(log_series_sum(alpha, gamma, m).value.is_finite());
        }
    }
}
