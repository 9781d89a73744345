//! Runtime comparison arithmetic: improvement percentages, per-trial
//! improvement averaging, and Welch's two-sample means test.
//!
//! The means test uses the unequal-variance t statistic with
//! Welch-Satterthwaite degrees of freedom and a two-sided p-value computed
//! from the Student-t distribution via the regularized incomplete beta
//! function (continued-fraction evaluation, accurate to well under 1e-9).
//! All functions here are pure and thread-safe.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("baseline time must be positive, got {0}")]
    NonPositiveBaseline(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("means test needs at least 2 observations per sample (got {a} and {b})")]
    InsufficientSample { a: usize, b: usize },

    #[error("alpha must be strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
}

/// Count, mean and unbiased variance of one timing sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Unbiased (n-1 denominator) variance; `None` for a single observation.
    pub variance: Option<f64>,
}

impl SampleStats {
    pub fn from_slice(xs: &[f64]) -> Result<Self, StatsError> {
        if xs.is_empty() {
            return Err(StatsError::EmptyInput);
        }
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let variance = if n >= 2 {
            Some(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64)
        } else {
            None
        };
        Ok(Self { n, mean, variance })
    }
}

/// Outcome of the two-sample means test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeansTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
    pub alpha: f64,
    /// Holds exactly when `p_value < alpha`.
    pub reject_null: bool,
}

/// Relative speedup as a percentage: `100 * (baseline - optimized) / baseline`.
///
/// Negative for a slowdown.
pub fn improvement_pct(t_baseline: f64, t_optimized: f64) -> Result<f64, StatsError> {
    if t_baseline <= 0.0 || t_baseline.is_nan() {
        return Err(StatsError::NonPositiveBaseline(t_baseline));
    }
    Ok(100.0 * (t_baseline - t_optimized) / t_baseline)
}

/// Arithmetic mean of the per-pair improvement percentages.
pub fn mean_improvement(trials: &[(f64, f64)]) -> Result<f64, StatsError> {
    if trials.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut sum = 0.0;
    for &(baseline, optimized) in trials {
        sum += improvement_pct(baseline, optimized)?;
    }
    Ok(sum / trials.len() as f64)
}

/// Welch's unequal-variance two-sample t-test with a two-sided alternative.
///
/// When both samples are constant the statistic is undefined; by convention
/// equal constants report `t = 0, p = 1` (no difference) and unequal
/// constants report an infinite statistic with `p = 0`, keeping benchmark
/// pipelines total on pathological fixtures.
pub fn welch_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<MeansTestResult, StatsError> {
    if alpha.is_nan() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(StatsError::InvalidAlpha(alpha));
    }
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::InsufficientSample {
            a: a.len(),
            b: b.len(),
        });
    }
    let sa = SampleStats::from_slice(a)?;
    let sb = SampleStats::from_slice(b)?;
    let (na, nb) = (sa.n as f64, sb.n as f64);
    let sea = sa.variance.expect("n >= 2") / na;
    let seb = sb.variance.expect("n >= 2") / nb;
    let se2 = sea + seb;

    let (t_statistic, degrees_of_freedom, p_value) = if se2 == 0.0 {
        let df = na + nb - 2.0;
        if sa.mean == sb.mean {
            (0.0, df, 1.0)
        } else {
            ((sa.mean - sb.mean).signum() * f64::INFINITY, df, 0.0)
        }
    } else {
        let t = (sa.mean - sb.mean) / se2.sqrt();
        let df = se2 * se2 / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
        (t, df, student_t_two_sided_p(t, df))
    };

    Ok(MeansTestResult {
        t_statistic,
        degrees_of_freedom,
        p_value,
        alpha,
        reject_null: p_value < alpha,
    })
}

/// Two-sided p-value for a Student-t statistic with `df` degrees of freedom:
/// `I_x(df/2, 1/2)` at `x = df / (df + t^2)`.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// Student-t cumulative distribution function.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let tail = 0.5 * student_t_two_sided_p(t, df);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`,
/// evaluated with the Lentz continued fraction, using the symmetry
/// `I_x(a, b) = 1 - I_{1-x}(b, a)` to stay in the fast-converging region.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta parameters must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Natural log of the gamma function (Lanczos approximation, g = 7).
#[allow(clippy::excessive_precision)] // coefficients kept at full published precision
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    assert!(x > 0.0, "ln_gamma requires a positive argument");
    if x < 0.5 {
        // Reflection keeps the series in its accurate range.
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // fixtures freeze the oracle's full output
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Student-t CDF values frozen from an independent statistics oracle
    // before this module was written: (t, df, cdf).
    const T_CDF_GRID: &[(f64, f64, f64)] = &[
        (-6.0, 1.0, 0.052568456711253424),
        (-3.6742346141747673, 1.0, 0.084584205614876756),
        (-2.5, 1.0, 0.12111894159084335),
        (-1.0, 1.0, 0.24999999999999978),
        (-0.5, 1.0, 0.35241638234956679),
        (0.0, 1.0, 0.5),
        (0.3, 1.0, 0.59277357907774231),
        (1.0, 1.0, 0.75000000000000022),
        (2.776, 1.0, 0.88994128127450145),
        (5.0, 1.0, 0.93716704181099886),
        (10.0, 1.0, 0.96827448256944637),
        (-6.0, 2.0, 0.013335736607712385),
        (-3.6742346141747673, 2.0, 0.033371737371308621),
        (-2.5, 2.0, 0.064805860110755398),
        (-1.0, 2.0, 0.21132486540518713),
        (-0.5, 2.0, 0.33333333333333337),
        (0.0, 2.0, 0.5),
        (0.3, 2.0, 0.60375716957991121),
        (1.0, 2.0, 0.78867513459481287),
        (2.776, 2.0, 0.94551813319458644),
        (5.0, 2.0, 0.98112522432468807),
        (10.0, 2.0, 0.99507377148833709),
        (-6.0, 4.0, 0.001941268523480256),
        (-3.6742346141747673, 4.0, 0.010655820564378363),
        (-2.5, 4.0, 0.033383272405994063),
        (-1.0, 4.0, 0.18695048315002949),
        (-0.5, 4.0, 0.32166498159093165),
        (0.0, 4.0, 0.5),
        (0.3, 4.0, 0.61043928586127016),
        (1.0, 4.0, 0.81304951684997051),
        (2.776, 4.0, 0.97498861084001176),
        (5.0, 4.0, 0.99625478305936277),
        (10.0, 4.0, 0.99971899818864207),
        (-6.0, 7.2, 0.00024344071905621072),
        (-3.6742346141747673, 7.2, 0.0037686136957962814),
        (-2.5, 7.2, 0.020042030129742636),
        (-1.0, 7.2, 0.17486306674111884),
        (-0.5, 7.2, 0.31599627353802362),
        (0.0, 7.2, 0.5),
        (0.3, 7.2, 0.61367305390544569),
        (1.0, 7.2, 0.82513693325888116),
        (2.776, 7.2, 0.98665385278537354),
        (5.0, 7.2, 0.99927980550560336),
        (10.0, 7.2, 0.99999115583491938),
        (-6.0, 30.0, 6.9713843836023587e-7),
        (-3.6742346141747673, 30.0, 0.00046338444408052171),
        (-2.5, 30.0, 0.009057824534033353),
        (-1.0, 30.0, 0.16265430771301492),
        (-0.5, 30.0, 0.31036150244256366),
        (0.0, 30.0, 0.5),
        (0.3, 30.0, 0.61687694735782361),
        (1.0, 30.0, 0.83734569228698508),
        (2.776, 30.0, 0.99530637294964031),
        (5.0, 30.0, 0.99998835165726652),
        (10.0, 30.0, 0.99999999997712374),
        (-6.0, 120.7, 1.0616959342160956e-8),
        (-3.6742346141747673, 120.7, 0.00017852356637296164),
        (-2.5, 120.7, 0.0068807772936745632),
        (-1.0, 120.7, 0.15965553915023917),
        (-0.5, 120.7, 0.30899271047420795),
        (0.0, 120.7, 0.5),
        (0.3, 120.7, 0.61765339784202478),
        (1.0, 120.7, 0.84034446084976078),
        (2.776, 120.7, 0.99680952249395982),
        (5.0, 120.7, 0.99999901716625883),
        (10.0, 120.7, 1.0),
    ];

    #[test]
    fn t_cdf_matches_oracle_grid_within_1e9() {
        for &(t, df, want) in T_CDF_GRID {
            let got = student_t_cdf(t, df);
            assert!(
                (got - want).abs() <= 1e-9,
                "cdf({t}, {df}) = {got}, oracle {want}"
            );
        }
    }

    #[test]
    fn welch_textbook_fixture() {
        // Oracle: t = -3.6742346141747673, df = 4, p = 0.021311641128756727.
        let r = welch_t_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05).unwrap();
        assert_relative_eq!(r.t_statistic, -3.6742346141747673, max_relative = 1e-12);
        assert_relative_eq!(r.degrees_of_freedom, 4.0, max_relative = 1e-12);
        assert!((r.p_value - 0.021311641128756727).abs() <= 1e-9);
        assert!(r.reject_null);
    }

    #[test]
    fn identical_samples_do_not_reject() {
        let xs = [5.0, 5.0, 5.0, 6.0];
        let r = welch_t_test(&xs, &xs, 0.05).unwrap();
        assert_eq!(r.t_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject_null);
    }

    #[test]
    fn degenerate_equal_constants_report_no_difference() {
        let r = welch_t_test(&[3.0, 3.0, 3.0], &[3.0, 3.0], 0.05).unwrap();
        assert_eq!(r.t_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject_null);
    }

    #[test]
    fn degenerate_unequal_constants_reject() {
        let r = welch_t_test(&[3.0, 3.0], &[4.0, 4.0], 0.05).unwrap();
        assert!(r.t_statistic.is_infinite() && r.t_statistic < 0.0);
        assert_eq!(r.p_value, 0.0);
        assert!(r.reject_null);
    }

    #[test]
    fn insufficient_sample_rejected() {
        let err = welch_t_test(&[1.0], &[2.0, 3.0], 0.05).unwrap_err();
        assert!(matches!(err, StatsError::InsufficientSample { a: 1, b: 2 }));
    }

    #[test]
    fn invalid_alpha_rejected() {
        for alpha in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            let err = welch_t_test(&[1.0, 2.0], &[3.0, 4.0], alpha).unwrap_err();
            assert!(matches!(err, StatsError::InvalidAlpha(_)));
        }
    }

    #[test]
    fn improvement_pct_reference_means_land_in_band() {
        // Oracle: 61.070513186117743.
        let pct = improvement_pct(42.55872547, 16.56789342).unwrap();
        assert_relative_eq!(pct, 61.070513186117743, max_relative = 1e-12);
        assert!(pct > 60.0 && pct < 65.0);
    }

    #[test]
    fn improvement_pct_identity_and_boundary() {
        assert_eq!(improvement_pct(7.5, 7.5).unwrap(), 0.0);
        assert_eq!(improvement_pct(10.0, 0.0).unwrap(), 100.0);
    }

    #[test]
    fn improvement_pct_negative_for_slowdown() {
        assert!(improvement_pct(1.0, 2.0).unwrap() < 0.0);
    }

    #[test]
    fn non_positive_baseline_rejected() {
        assert!(matches!(
            improvement_pct(0.0, 1.0),
            Err(StatsError::NonPositiveBaseline(_))
        ));
        assert!(matches!(
            improvement_pct(-3.0, 1.0),
            Err(StatsError::NonPositiveBaseline(_))
        ));
    }

    #[test]
    fn mean_improvement_hand_arithmetic() {
        let got = mean_improvement(&[(10.0, 9.0), (10.0, 8.0)]).unwrap();
        assert_relative_eq!(got, 15.0, max_relative = 1e-12);
    }

    #[test]
    fn mean_improvement_constant_sixteen_pct() {
        let pairs = vec![(100.0, 84.0); 5];
        assert_relative_eq!(
            mean_improvement(&pairs).unwrap(),
            16.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn mean_improvement_matches_direct_formula_oracle() {
        // Oracle value computed independently: 25.20760423008695.
        let pairs = [
            (10.0, 9.0),
            (10.0, 8.0),
            (42.5, 16.5),
            (7.25, 6.1),
            (123.456, 100.0),
        ];
        assert_relative_eq!(
            mean_improvement(&pairs).unwrap(),
            25.20760423008695,
            max_relative = 1e-12
        );
    }

    #[test]
    fn mean_improvement_errors() {
        assert!(matches!(mean_improvement(&[]), Err(StatsError::EmptyInput)));
        assert!(matches!(
            mean_improvement(&[(0.0, 1.0)]),
            Err(StatsError::NonPositiveBaseline(_))
        ));
    }

    #[test]
    fn sample_stats_basics() {
        let s = SampleStats::from_slice(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.n, 3);
        assert_relative_eq!(s.mean, 2.0);
        assert_relative_eq!(s.variance.unwrap(), 1.0);

        let single = SampleStats::from_slice(&[4.2]).unwrap();
        assert_eq!(single.variance, None);
        assert!(matches!(
            SampleStats::from_slice(&[]),
            Err(StatsError::EmptyInput)
        ));
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-12);
        assert!((ln_gamma(2.0)).abs() < 1e-12);
        assert_relative_eq!(ln_gamma(5.0), 24.0_f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            max_relative = 1e-12
        );
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.1f64..1000.0, 2..8)
    }

    proptest! {
        #[test]
        fn prop_improvement_pct_scale_invariant(
            baseline in 0.001f64..1e6,
            optimized in 0.0f64..1e6,
            k in 0.001f64..1e4,
        ) {
            let plain = improvement_pct(baseline, optimized).unwrap();
            let scaled = improvement_pct(k * baseline, k * optimized).unwrap();
            assert_relative_eq!(plain, scaled, max_relative = 1e-9, epsilon = 1e-9);
        }

        #[test]
        fn prop_welch_antisymmetric(a in sample(), b in sample()) {
            let ab = welch_t_test(&a, &b, 0.05).unwrap();
            let ba = welch_t_test(&b, &a, 0.05).unwrap();
            prop_assert_eq!(ab.t_statistic, -ba.t_statistic);
            prop_assert_eq!(ab.degrees_of_freedom, ba.degrees_of_freedom);
            prop_assert_eq!(ab.p_value, ba.p_value);
            prop_assert_eq!(ab.reject_null, ba.reject_null);
        }

        #[test]
        fn prop_welch_rescale_invariant(a in sample(), b in sample(), k in 0.001f64..1000.0) {
            let plain = welch_t_test(&a, &b, 0.05).unwrap();
            let ka: Vec<f64> = a.iter().map(|x| k * x).collect();
            let kb: Vec<f64> = b.iter().map(|x| k * x).collect();
            let scaled = welch_t_test(&ka, &kb, 0.05).unwrap();
            assert_relative_eq!(plain.t_statistic, scaled.t_statistic,
                max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(plain.degrees_of_freedom, scaled.degrees_of_freedom,
                max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(plain.p_value, scaled.p_value,
                max_relative = 1e-12, epsilon = 1e-12);
        }

        // Averaging identical pairs reduces to the single-pair percentage.
        #[test]
        fn prop_mean_improvement_of_identical_pairs(
            baseline in 0.001f64..1e6,
            optimized in 0.0f64..1e6,
            n in 1usize..10,
        ) {
            let pairs = vec![(baseline, optimized); n];
            let single = improvement_pct(baseline, optimized).unwrap();
            assert_relative_eq!(
                mean_improvement(&pairs).unwrap(),
                single,
                max_relative = 1e-12,
                epsilon = 1e-12
            );
        }

        #[test]
        fn prop_p_value_in_unit_interval(a in sample(), b in sample()) {
            let r = welch_t_test(&a, &b, 0.05).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            prop_assert_eq!(r.reject_null, r.p_value < 0.05);
        }
    }
}
