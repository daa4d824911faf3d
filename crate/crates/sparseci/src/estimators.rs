//! The estimators under study: hard thresholding in the location model and
//! BIC-based post-model-selection least squares in a fixed-design Gaussian
//! regression with a protected coefficient block.

use crate::gaussian::{cdf, Probability};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::str::FromStr;

/// How the threshold sequence eta_n = c * n^(-p) behaves as n grows.
///
/// * `Consistent`: eta_n -> 0 and sqrt(n) * eta_n -> infinity (0 < p < 1/2),
///   the regime where the estimator finds the support with probability
///   tending to one.
/// * `Conservative`: sqrt(n) * eta_n -> c finite (p = 1/2), the
///   Hodges-style regime.
/// * `NonVanishing`: p = 0 without an explicit promise that eta_n -> 0 by
///   some other mechanism; the asymptotic claims in this crate do not apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TuningRegime {
    Consistent,
    Conservative,
    NonVanishing,
}

/// Threshold rule eta_n = c * n^(-p) with c > 0 and 0 <= p <= 1/2.
///
/// Parses from the CLI string form `c*n^-p`, e.g. `1*n^-0.25`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdSchedule {
    pub c: f64,
    pub p: f64,
    /// Set when p = 0 but the caller asserts eta_n -> 0 through some channel
    /// this parameterization cannot express; lets `regime()` report
    /// `Consistent` instead of `NonVanishing`.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub vanishing_hint: bool,
}

impl ThresholdSchedule {
    pub fn new(c: f64, p: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::domain(format!(
                "schedule constant must satisfy c > 0, got {c}"
            )));
        }
        if !p.is_finite() || !(0.0..=0.5).contains(&p) {
            return Err(Error::domain(format!(
                "schedule exponent must satisfy 0 <= p <= 1/2, got {p}"
            )));
        }
        Ok(ThresholdSchedule {
            c,
            p,
            vanishing_hint: false,
        })
    }

    /// Declare that eta_n -> 0 even though p = 0.
    pub fn assume_vanishing(mut self) -> Self {
        self.vanishing_hint = true;
        self
    }

    /// eta_n for a given sample size.
    pub fn eta(&self, n: u64) -> f64 {
        self.c * (n as f64).powf(-self.p)
    }

    /// sqrt(n) * eta_n, the scale on which all coverage formulas live.
    pub fn sqrt_n_eta(&self, n: u64) -> f64 {
        (n as f64).sqrt() * self.eta(n)
    }

    pub fn regime(&self) -> TuningRegime {
        if self.p == 0.5 {
            TuningRegime::Conservative
        } else if self.p > 0.0 || self.vanishing_hint {
            TuningRegime::Consistent
        } else {
            TuningRegime::NonVanishing
        }
    }
}

impl FromStr for ThresholdSchedule {
    type Err = Error;

    /// Accepts `c*n^-p` (whitespace tolerated around the number parts).
    fn from_str(s: &str) -> Result<Self> {
        let err = || {
            Error::domain(format!(
                "schedule must have the form c*n^-p (e.g. 1*n^-0.25), got {s:?}"
            ))
        };
        let (c_part, p_part) = s.split_once("*n^-").ok_or_else(err)?;
        let c: f64 = c_part.trim().parse().map_err(|_| err())?;
        let p: f64 = p_part.trim().parse().map_err(|_| err())?;
        ThresholdSchedule::new(c, p)
    }
}

/// Hard-thresholding estimator: returns `ybar` when |ybar| exceeds eta_n,
/// else exactly 0. The inequality is strict, so |ybar| = eta_n maps to 0.
pub fn hard_threshold(ybar: f64, n: u64, schedule: &ThresholdSchedule) -> f64 {
    hard_threshold_at(ybar, schedule.eta(n))
}

/// Hard thresholding at an explicit threshold value.
#[inline]
pub fn hard_threshold_at(ybar: f64, eta: f64) -> f64 {
    if ybar.abs() > eta {
        ybar
    } else {
        0.0
    }
}

/// P_{n,0}(theta_hat = 0) = 1 - 2 Phi(-sqrt(n) eta_n): the sparsity-at-zero
/// probability, which tends to one in both tuning regimes.
pub fn sparsity_prob_at_zero(n: u64, schedule: &ThresholdSchedule) -> Probability {
    let rn_eta = schedule.sqrt_n_eta(n);
    Probability::clamped(1.0 - 2.0 * cdf(-rn_eta))
}

/// P_{n,theta}(theta_hat != 0) = Phi(sqrt(n)(theta - eta)) +
/// Phi(-sqrt(n)(theta + eta)), exact for every n.
pub fn nonzero_prob(theta: f64, n: u64, eta: f64) -> Probability {
    let rn = (n as f64).sqrt();
    Probability::clamped(cdf(rn * (theta - eta)) + cdf(-rn * (theta + eta)))
}

// ---------------------------------------------------------------------------
// Partially-sparse regression: y = X theta + u, theta = (alpha', beta')',
// u ~ N(0, sigma^2 I), fixed design with X'X / n = Q exactly.
// ---------------------------------------------------------------------------

/// Which submodels BIC may choose from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Keep the alpha block always; search over the 2^{k_beta} subsets of
    /// the beta block. The default, matching the partially-sparse setup.
    ProtectedAlpha,
    /// Search over all 2^k column subsets.
    AllSubsets,
    /// No selection: always fit the full model (ordinary least squares).
    FullOnly,
}

/// Fixed-design Gaussian regression with known error standard deviation.
///
/// The design is deterministic: a base matrix of +/-1 Walsh-style columns
/// (first column all ones) is mixed by the Cholesky factor of `q`, so that
/// X'X / n equals `q` exactly whenever n is divisible by 2^(k-1).
#[derive(Debug, Clone)]
pub struct RegressionDesign {
    pub k: usize,
    pub k_beta: usize,
    pub q: DMatrix<f64>,
    pub sigma: f64,
    pub n: u64,
}

impl RegressionDesign {
    pub fn new(k: usize, k_beta: usize, q: DMatrix<f64>, sigma: f64, n: u64) -> Result<Self> {
        if k == 0 || k_beta == 0 || k_beta > k {
            return Err(Error::domain(format!(
                "blocks must satisfy 1 <= k_beta <= k, got k={k}, k_beta={k_beta}"
            )));
        }
        if k > 20 {
            return Err(Error::domain(format!(
                "k = {k} is too large for exhaustive submodel search (max 20)"
            )));
        }
        if q.nrows() != k || q.ncols() != k {
            return Err(Error::domain(format!(
                "Q must be {k}x{k}, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        for i in 0..k {
            for j in 0..i {
                if (q[(i, j)] - q[(j, i)]).abs() > 1e-12 {
                    return Err(Error::domain("Q must be symmetric".to_string()));
                }
            }
        }
        if nalgebra::Cholesky::new(q.clone()).is_none() {
            return Err(Error::domain(
                "Q must be positive definite (Cholesky failed)".to_string(),
            ));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::domain(format!("sigma must be > 0, got {sigma}")));
        }
        let period = 1u64 << (k - 1);
        if n == 0 || n % period != 0 {
            return Err(Error::domain(format!(
                "n must be a positive multiple of 2^(k-1) = {period} so the \
                 +/-1 base columns are exactly orthogonal, got n={n}"
            )));
        }
        Ok(RegressionDesign {
            k,
            k_beta,
            q,
            sigma,
            n,
        })
    }

    pub fn k_alpha(&self) -> usize {
        self.k - self.k_beta
    }

    /// The n x k design matrix X = B L' with B the +/-1 base and L L' = Q.
    pub fn design_matrix(&self) -> DMatrix<f64> {
        let n = self.n as usize;
        let l = nalgebra::Cholesky::new(self.q.clone())
            .expect("validated in new()")
            .l();
        let mut x = DMatrix::zeros(n, self.k);
        for i in 0..n {
            for col in 0..self.k {
                // base entry: column 0 is all ones; column j flips sign with
                // period 2^j in the row index
                let base = if col == 0 {
                    1.0
                } else if (i >> (col - 1)) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                };
                // row_i(X) = row_i(B) * L'
                for out in 0..self.k {
                    x[(i, out)] += base * l[(out, col)];
                }
            }
        }
        x
    }

    /// X'X computed from the design identity (= n * Q exactly).
    pub fn gram(&self) -> DMatrix<f64> {
        &self.q * self.n as f64
    }

    /// D = Q11^{-1} Q12, the drift matrix of the restricted estimator under
    /// local alternatives. Dimensions (k - k_beta) x k_beta.
    pub fn d_matrix(&self) -> DMatrix<f64> {
        let ka = self.k_alpha();
        let q11 = self.q.view((0, 0), (ka, ka)).into_owned();
        let q12 = self.q.view((0, ka), (ka, self.k_beta)).into_owned();
        nalgebra::Cholesky::new(q11)
            .expect("principal submatrix of a PD matrix is PD")
            .solve(&q12)
    }

    /// sigma^2 * Q11^{-1}: the limiting covariance of sqrt(n)(alpha_hat -
    /// alpha) on the restricted branch.
    pub fn restricted_alpha_cov(&self) -> DMatrix<f64> {
        let ka = self.k_alpha();
        let q11 = self.q.view((0, 0), (ka, ka)).into_owned();
        let inv = nalgebra::Cholesky::new(q11)
            .expect("principal submatrix of a PD matrix is PD")
            .inverse();
        inv * (self.sigma * self.sigma)
    }

    /// Admissible submodel bitmasks for a mode, ordered by (size, value) so
    /// ties break toward smaller models deterministically. Bit i = column i.
    pub fn masks(&self, mode: SelectionMode) -> Vec<usize> {
        let full = (1usize << self.k) - 1;
        let alpha_mask = (1usize << self.k_alpha()) - 1;
        let mut masks: Vec<usize> = match mode {
            SelectionMode::FullOnly => vec![full],
            SelectionMode::ProtectedAlpha => (0..(1usize << self.k_beta))
                .map(|bs| alpha_mask | (bs << self.k_alpha()))
                .collect(),
            SelectionMode::AllSubsets => (0..=full).collect(),
        };
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
    }
}

/// Result of the post-model-selection least-squares fit.
#[derive(Debug, Clone, Serialize)]
pub struct PostBicFit {
    /// Full-length coefficient vector; coordinates outside the selected
    /// submodel are exactly 0.
    pub theta: Vec<f64>,
    /// Bitmask of the selected columns.
    pub model_id: usize,
    /// BIC value of the selected submodel: RSS/sigma^2 + |M| log n.
    pub bic: f64,
    /// Residual sum of squares of the selected submodel.
    pub rss: f64,
}

/// Post-BIC least squares on a full response vector.
///
/// For every admissible submodel M: fit LS on the columns in M, score
/// BIC(M) = RSS(M)/sigma^2 + |M| log n (sigma known), keep the minimizer.
/// Ties break toward the smaller model id, which by the mask ordering means
/// fewer parameters first.
pub fn post_bic_ls(y: &[f64], design: &RegressionDesign, mode: SelectionMode) -> Result<PostBicFit> {
    if y.len() != design.n as usize {
        return Err(Error::domain(format!(
            "response length {} must equal design n = {}",
            y.len(),
            design.n
        )));
    }
    let x = design.design_matrix();
    let yv = DVector::from_column_slice(y);
    let g = x.transpose() * &x;
    let s = x.transpose() * &yv;
    let yty = yv.dot(&yv);
    let (mask, theta, score) = bic_argmin(&g, &s, design, design.masks(mode))?;
    // score = -s_M' theta_M / sigma^2 + |M| log n; add back y'y/sigma^2
    let sig2 = design.sigma * design.sigma;
    let bic = yty / sig2 + score;
    let rss = yty - s.dot(&theta);
    Ok(PostBicFit {
        theta: theta.as_slice().to_vec(),
        model_id: mask,
        bic,
        rss,
    })
}

/// BIC selection from the sufficient statistic.
///
/// The selected model and submodel estimates depend on y only through the
/// full-model LS estimate (equivalently s = X'y = G theta_ls): RSS(M) =
/// y'y - s_M' G_MM^{-1} s_M, and y'y is constant across submodels, so
/// argmin BIC is computable without y. Exactness against [`post_bic_ls`]
/// is unit-tested.
pub fn post_bic_from_ls(
    theta_ls: &DVector<f64>,
    design: &RegressionDesign,
    mode: SelectionMode,
) -> Result<(usize, DVector<f64>)> {
    let g = design.gram();
    let s = &g * theta_ls;
    let (mask, theta, _) = bic_argmin(&g, &s, design, design.masks(mode))?;
    Ok((mask, theta))
}

/// Shared scoring core. Returns (mask, full-length theta_hat, score) where
/// score = BIC(M) - y'y/sigma^2 = -s_M' G_MM^{-1} s_M / sigma^2 + |M| log n.
pub(crate) fn bic_argmin(
    g: &DMatrix<f64>,
    s: &DVector<f64>,
    design: &RegressionDesign,
    masks: Vec<usize>,
) -> Result<(usize, DVector<f64>, f64)> {
    let sig2 = design.sigma * design.sigma;
    let log_n = (design.n as f64).ln();
    let mut best: Option<(usize, DVector<f64>, f64)> = None;
    for mask in masks {
        let idx: Vec<usize> = (0..design.k).filter(|i| mask >> i & 1 == 1).collect();
        let m = idx.len();
        let (fit, theta_m) = if m == 0 {
            (0.0, DVector::zeros(0))
        } else {
            let mut g_mm = DMatrix::zeros(m, m);
            let mut s_m = DVector::zeros(m);
            for (a, &i) in idx.iter().enumerate() {
                s_m[a] = s[i];
                for (b, &j) in idx.iter().enumerate() {
                    g_mm[(a, b)] = g[(i, j)];
                }
            }
            let chol = nalgebra::Cholesky::new(g_mm)
                .ok_or(Error::SingularModel { model_id: mask })?;
            let theta_m = chol.solve(&s_m);
            (s_m.dot(&theta_m), theta_m)
        };
        let score = -fit / sig2 + m as f64 * log_n;
        if best.as_ref().is_none_or(|(_, _, b)| score < *b) {
            let mut theta = DVector::zeros(design.k);
            for (a, &i) in idx.iter().enumerate() {
                theta[i] = theta_m[a];
            }
            best = Some((mask, theta, score));
        }
    }
    best.ok_or_else(|| Error::domain("no admissible submodels".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Tiny deterministic generator for test data (splitmix64 core).
    struct TestRng(u64);
    impl TestRng {
        fn next_u64(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }
        fn uniform(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
        }
        fn normal(&mut self) -> f64 {
            crate::gaussian::quantile_inner((self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0) + 2.0f64.powi(-54))
        }
    }

    fn q2(rho: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0])
    }

    #[test]
    fn schedule_parse_and_regime() {
        let s: ThresholdSchedule = "1*n^-0.25".parse().unwrap();
        assert_eq!((s.c, s.p), (1.0, 0.25));
        assert_eq!(s.regime(), TuningRegime::Consistent);
        assert!((s.eta(16) - 0.5).abs() < 1e-15);
        assert!((s.sqrt_n_eta(16) - 2.0).abs() < 1e-15);

        let cons: ThresholdSchedule = "2*n^-0.5".parse().unwrap();
        assert_eq!(cons.regime(), TuningRegime::Conservative);
        assert!((cons.sqrt_n_eta(100) - 2.0).abs() < 1e-12);
        assert!((cons.sqrt_n_eta(10_000) - 2.0).abs() < 1e-12);

        let fixed = ThresholdSchedule::new(0.3, 0.0).unwrap();
        assert_eq!(fixed.regime(), TuningRegime::NonVanishing);
        assert_eq!(
            fixed.assume_vanishing().regime(),
            TuningRegime::Consistent
        );

        assert!("n^-0.25".parse::<ThresholdSchedule>().is_err());
        assert!("-1*n^-0.25".parse::<ThresholdSchedule>().is_err());
        assert!("1*n^-0.75".parse::<ThresholdSchedule>().is_err());
        assert!(ThresholdSchedule::new(0.0, 0.25).is_err());
        assert!(ThresholdSchedule::new(1.0, -0.1).is_err());
    }

    #[test]
    fn hard_threshold_strict_inequality() {
        // exactly at the threshold -> 0 (the inequality is strict)
        assert_eq!(hard_threshold_at(0.3, 0.3), 0.0);
        assert_eq!(hard_threshold_at(-0.3, 0.3), 0.0);
        assert_eq!(hard_threshold_at(0.3000000001, 0.3), 0.3000000001);
        assert_eq!(hard_threshold_at(-0.5, 0.3), -0.5);
        assert_eq!(hard_threshold_at(0.0, 0.3), 0.0);

        let s = ThresholdSchedule::new(1.0, 0.25).unwrap();
        // eta(16) = 0.5
        assert_eq!(hard_threshold(0.4, 16, &s), 0.0);
        assert_eq!(hard_threshold(0.6, 16, &s), 0.6);
    }

    #[test]
    fn hard_threshold_is_odd() {
        let mut rng = TestRng(7);
        for _ in 0..1000 {
            let y = 4.0 * (rng.uniform() - 0.5);
            let eta = rng.uniform();
            assert_eq!(hard_threshold_at(-y, eta), -hard_threshold_at(y, eta));
        }
    }

    #[test]
    fn sparsity_prob_examples() {
        // n = 1e4, eta = 0.1: sqrt(n) eta = 10, so 1 - 2 Phi(-10) rounds to
        // 1.0 in f64 (2 Phi(-10) = 1.52e-23); check the ingredient too.
        let s = ThresholdSchedule::new(0.1, 0.0).unwrap();
        assert_eq!(sparsity_prob_at_zero(10_000, &s).get(), 1.0);
        let tail = 2.0 * crate::gaussian::cdf(-10.0);
        assert!((tail - 1.5239706048321052e-23).abs() < 1e-28);

        // complementarity with nonzero_prob at theta = 0
        let sched = ThresholdSchedule::new(1.0, 0.25).unwrap();
        for n in [100u64, 1600, 25_600] {
            let p0 = sparsity_prob_at_zero(n, &sched).get();
            let p1 = nonzero_prob(0.0, n, sched.eta(n)).get();
            assert!((p0 + p1 - 1.0).abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn nonzero_prob_vanishes_for_slow_local_alternatives() {
        // theta_n = gamma / v_n with v_n = n^(3/8), eta_n = n^(-1/4):
        // v_n eta_n = n^(1/8) -> infinity, so P(theta_hat != 0) -> 0.
        let sched = ThresholdSchedule::new(1.0, 0.25).unwrap();
        let gamma = 1.0;
        let mut prev = 1.0;
        for k in [2u32, 4, 6, 8] {
            let n = 10u64.pow(k);
            let theta = gamma / (n as f64).powf(0.375);
            let p = nonzero_prob(theta, n, sched.eta(n)).get();
            assert!(p <= prev + 1e-15, "not decreasing at n=1e{k}");
            prev = p;
        }
        assert!(prev < 1e-6, "final probability {prev} should be near 0");
    }

    #[test]
    fn design_matrix_reproduces_q_exactly() {
        for (k, n, q) in [
            (1usize, 12u64, DMatrix::from_row_slice(1, 1, &[2.25])),
            (2, 100, q2(0.5)),
            (
                3,
                64,
                DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.1, 0.3, 2.0, -0.2, 0.1, -0.2, 1.5]),
            ),
        ] {
            let d = RegressionDesign::new(k, 1, q.clone(), 1.0, n).unwrap();
            let x = d.design_matrix();
            let g = x.transpose() * &x / n as f64;
            for i in 0..k {
                for j in 0..k {
                    assert!(
                        (g[(i, j)] - q[(i, j)]).abs() < 1e-12,
                        "k={k} n={n} Q[{i}{j}]: {} vs {}",
                        g[(i, j)],
                        q[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn design_validation() {
        assert!(RegressionDesign::new(2, 1, q2(0.5), 1.0, 101).is_err()); // odd n
        assert!(RegressionDesign::new(2, 1, q2(1.5), 1.0, 100).is_err()); // not PD
        assert!(RegressionDesign::new(2, 3, q2(0.5), 1.0, 100).is_err()); // k_beta > k
        assert!(RegressionDesign::new(2, 1, q2(0.5), 0.0, 100).is_err()); // sigma
        let bad_sym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(RegressionDesign::new(2, 1, bad_sym, 1.0, 100).is_err());
    }

    #[test]
    fn d_matrix_and_restricted_ls_identity() {
        // alpha_hat_restricted = alpha_hat_full + D beta_hat_full holds
        // exactly for the implemented design (X'X/n = Q exactly).
        let design = RegressionDesign::new(2, 1, q2(0.5), 1.0, 64).unwrap();
        let d = design.d_matrix();
        assert!((d[(0, 0)] - 0.5).abs() < 1e-14);

        let x = design.design_matrix();
        let mut rng = TestRng(42);
        let y = DVector::from_fn(64, |_, _| rng.normal() + 1.0);
        let g = x.transpose() * &x;
        let s = x.transpose() * &y;
        let full = nalgebra::Cholesky::new(g.clone()).unwrap().solve(&s);
        // restricted: alpha column only
        let x1 = x.column(0).into_owned();
        let alpha_r = x1.dot(&y) / x1.dot(&x1);
        let predicted = full[0] + d[(0, 0)] * full[1];
        assert!(
            (alpha_r - predicted).abs() < 1e-10,
            "restricted {alpha_r} vs full+D {predicted}"
        );
    }

    #[test]
    fn post_bic_full_only_is_ols() {
        let design = RegressionDesign::new(2, 1, q2(0.5), 1.0, 64).unwrap();
        let x = design.design_matrix();
        let mut rng = TestRng(3);
        let y: Vec<f64> = (0..64).map(|_| 0.7 + rng.normal()).collect();
        let fit = post_bic_ls(&y, &design, SelectionMode::FullOnly).unwrap();
        assert_eq!(fit.model_id, 0b11);

        let yv = DVector::from_column_slice(&y);
        let g = x.transpose() * &x;
        let s = x.transpose() * &yv;
        let ols = nalgebra::Cholesky::new(g).unwrap().solve(&s);
        for i in 0..2 {
            assert!((fit.theta[i] - ols[i]).abs() < 1e-12);
        }
        // RSS consistency
        let resid = &yv - &x * DVector::from_column_slice(&fit.theta);
        assert!((fit.rss - resid.dot(&resid)).abs() < 1e-8);
    }

    #[test]
    fn post_bic_selects_by_signal_strength() {
        let design = RegressionDesign::new(2, 1, q2(0.5), 1.0, 256).unwrap();
        let x = design.design_matrix();
        let mut rng = TestRng(11);
        let noise: Vec<f64> = (0..256).map(|_| rng.normal()).collect();

        // strong beta -> full model
        let y_strong: Vec<f64> = (0..256)
            .map(|i| 1.0 * x[(i, 0)] + 2.0 * x[(i, 1)] + noise[i])
            .collect();
        let fit = post_bic_ls(&y_strong, &design, SelectionMode::ProtectedAlpha).unwrap();
        assert_eq!(fit.model_id, 0b11, "strong beta should keep the full model");

        // beta = 0 -> restricted model (this noise draw is unexceptional)
        let y_null: Vec<f64> = (0..256).map(|i| 1.0 * x[(i, 0)] + noise[i]).collect();
        let fit = post_bic_ls(&y_null, &design, SelectionMode::ProtectedAlpha).unwrap();
        assert_eq!(fit.model_id, 0b01, "null beta should drop to alpha only");
        assert_eq!(fit.theta[1], 0.0);
    }

    #[test]
    fn sufficiency_path_matches_full_data_path() {
        let design = RegressionDesign::new(3, 2, DMatrix::from_row_slice(
            3, 3, &[1.0, 0.4, 0.2, 0.4, 1.0, 0.1, 0.2, 0.1, 1.0],
        ), 0.8, 128).unwrap();
        let x = design.design_matrix();
        let g = x.transpose() * &x;
        let mut rng = TestRng(99);
        for mode in [SelectionMode::ProtectedAlpha, SelectionMode::AllSubsets] {
            for trial in 0..40 {
                let scale = 0.5 + 0.1 * (trial % 7) as f64;
                let y: Vec<f64> = (0..128)
                    .map(|i| {
                        scale * x[(i, 0)] + 0.2 * x[(i, 1)] - 0.15 * x[(i, 2)]
                            + design.sigma * rng.normal()
                    })
                    .collect();
                let full = post_bic_ls(&y, &design, mode).unwrap();
                let yv = DVector::from_column_slice(&y);
                let s = x.transpose() * &yv;
                let theta_ls = nalgebra::Cholesky::new(g.clone()).unwrap().solve(&s);
                let (mask, theta) = post_bic_from_ls(&theta_ls, &design, mode).unwrap();
                assert_eq!(mask, full.model_id, "mode {mode:?} trial {trial}");
                for i in 0..3 {
                    assert!(
                        (theta[i] - full.theta[i]).abs() < 1e-9,
                        "mode {mode:?} trial {trial} coord {i}: {} vs {}",
                        theta[i],
                        full.theta[i]
                    );
                }
            }
        }
    }

    #[test]
    fn singular_submodel_reports_model_id() {
        let design = RegressionDesign::new(2, 1, q2(0.5), 1.0, 64).unwrap();
        // hand-built singular Gram matrix: duplicate columns
        let g = DMatrix::from_row_slice(2, 2, &[64.0, 64.0, 64.0, 64.0]);
        let s = DVector::from_column_slice(&[3.0, 3.0]);
        let err = bic_argmin(&g, &s, &design, vec![0b11]).unwrap_err();
        match err {
            crate::Error::SingularModel { model_id } => assert_eq!(model_id, 0b11),
            other => panic!("expected SingularModel, got {other:?}"),
        }
    }

    #[test]
    fn mask_enumeration_orders_small_models_first() {
        let design = RegressionDesign::new(3, 2, DMatrix::identity(3, 3), 1.0, 64).unwrap();
        assert_eq!(design.masks(SelectionMode::ProtectedAlpha), vec![0b001, 0b011, 0b101, 0b111]);
        assert_eq!(design.masks(SelectionMode::FullOnly), vec![0b111]);
        let all = design.masks(SelectionMode::AllSubsets);
        assert_eq!(all.len(), 8);
        assert_eq!(all[0], 0b000);
        assert_eq!(all[7], 0b111);
    }
}
