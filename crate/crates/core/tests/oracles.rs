mod common;

use common::{quad_moment, rel_err, REFERENCE_TRIPLES};
use gels_core::GelSParams;
use proptest::prelude::*;
use statrs::distribution::{Continuous, ContinuousCDF, LogNormal};

pub fn oracle_grid() -> Vec<GelSParams> {
    let mut grid = Vec::new();
    for &alpha in &[0.0, 0.5, 2.0, 7.8] {
        for &(k, gamma) in &[(0, 0.3), (0, 1.0), (1, 0.5), (3, 0.7), (27, 0.3), (27, 0.4063)] {
            grid.push(GelSParams::new(alpha, k, gamma).unwrap());
        }
    }
    grid
}

#[test]
fn pdf_integrates_to_one() {
    for p in oracle_grid() {
        let total = quad_moment(&p, 0);
        assert!((total - 1.0).abs() < 1e-8, "{p:?}: {total}");
    }
}

#[test]
fn raw_moments_match_quadrature() {
    for p in oracle_grid() {
        for n in 1..=4 {
            let want = quad_moment(&p, n);
            let got = p.moment(n).unwrap();
            assert!(rel_err(got, want) < 1e-7, "{p:?} n={n}: {got} vs {want}");
        }
    }
}

/// Summary values of the reference triples from a 40-digit independent
/// evaluation of the series and cdf.
const HIGH_PRECISION_SUMMARIES: [[f64; 6]; 7] = [
    [2.26255, 0.924092, 1.7785, 9.08395, 1.69262, 2.0481],
    [2.69991, 0.873688, 1.79983, 9.23204, 2.14262, 2.48979],
    [3.15847, 0.836028, 1.8131, 9.33143, 2.61232, 2.95217],
    [1.95499, 0.601282, 1.75019, 8.89845, 1.5, 1.78403],
    [2.67098, 1.45555, 1.79765, 9.20957, 1.95037, 2.39966],
    [1.92956, 0.366161, 1.3373, 6.33278, 1.61686, 1.81681],
    [2.79182, 2.41452, 2.30511, 13.6787, 1.79669, 2.39807],
];

const HIGH_PRECISION_QUANTILES: [[f64; 4]; 7] = [
    [0.96844, 1.16539, 4.08295, 5.56483],
    [1.44899, 1.6379, 4.47046, 5.9196],
    [1.93831, 2.12212, 4.89041, 6.31309],
    [0.901249, 1.06415, 3.42246, 4.60898],
    [1.05768, 1.30025, 4.9567, 6.82567],
    [1.0106, 1.17412, 3.06695, 3.88253],
    [0.945442, 1.1823, 5.72128, 8.41746],
];

#[test]
fn summaries_match_high_precision_values() {
    for (i, &(a, k, g)) in REFERENCE_TRIPLES.iter().enumerate() {
        let s = GelSParams::new(a, k, g).unwrap().summary().unwrap();
        let got = [s.mean, s.variance, s.skewness, s.kurtosis, s.mode, s.median];
        for (j, (&x, &want)) in got.iter().zip(&HIGH_PRECISION_SUMMARIES[i]).enumerate() {
            assert!(rel_err(x, want) < 1e-5, "triple {i} field {j}: {x} vs {want}");
        }
    }
}

#[test]
fn quantiles_match_high_precision_values() {
    for (i, &(a, k, g)) in REFERENCE_TRIPLES.iter().enumerate() {
        let p = GelSParams::new(a, k, g).unwrap();
        for (&level, &want) in [0.01, 0.05, 0.95, 0.99].iter().zip(&HIGH_PRECISION_QUANTILES[i]) {
            let q = p.quantile(level).unwrap();
            assert!(rel_err(q, want) < 1e-5, "triple {i} p={level}: {q} vs {want}");
        }
    }
}

#[test]
fn moments_overflow_is_reported() {
    let p = GelSParams::new(0.0, 27, 3.0).unwrap();
    assert!(p.moment(4).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_zero_is_lognormal(ki in 0usize..3, gi in 0usize..3, prob in 0.001f64..0.999) {
        let k = [0u32, 1, 3][ki];
        let gamma = [0.3, 0.7, 1.2][gi];
        let p = GelSParams::new(0.0, k, gamma).unwrap();
        let ln = LogNormal::new(gamma * gamma * f64::from(k + 1), gamma).unwrap();
        let x = ln.inverse_cdf(prob);
        prop_assert!(rel_err(p.pdf(x), ln.pdf(x)) < 1e-10);
        prop_assert!(rel_err(p.cdf(x), ln.cdf(x)) < 1e-10);
        prop_assert!(rel_err(p.quantile(prob).unwrap(), x) < 1e-10);
    }

    #[test]
    fn moments_nonnegative_variance(alpha in 0.0f64..5.0, k in 0u32..10, gamma in 0.1f64..0.8) {
        let s = GelSParams::new(alpha, k, gamma).unwrap().summary().unwrap();
        prop_assert!(s.variance > 0.0);
        prop_assert!(s.mean > alpha);
        prop_assert!(s.mode > alpha && s.median > alpha);
    }
}
