//! Exact finite-sample coverage of boxes centered at the hard-thresholding
//! estimator, plus the naive z-interval and box geometry.
//!
//! Everything here is closed-form normal-CDF arithmetic. The central object
//! is `P_{n,theta}(theta in [theta_hat - a, theta_hat + b])` as a function
//! of theta. Writing rn = sqrt(n), the event splits over the atom of
//! theta_hat at 0:
//!
//! ```text
//! p_n(theta) = P(ybar in [theta-b, theta+a], |ybar| > eta)
//!            + 1{ -b <= -theta <= a } * P(|ybar| <= eta)
//! ```
//!
//! which resolves into a five- or six-row piecewise table per threshold
//! regime (eta vs a+b and (a+b)/2). The table has jump discontinuities at
//! theta = -a and theta = b only; the infimum over theta is available in
//! closed form and — except in the wide-threshold regime where whole dead
//! zones have coverage exactly 0 — is a one-sided limit, not attained.

use crate::gaussian::{cdf, quantile_inner, Probability};
use crate::{Error, Result};
use serde::Serialize;

/// Default number of grid points for coverage curves and grid infima.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Which piecewise table applies, determined by eta against a+b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageRegime {
    /// eta > a + b: the box is narrower than the threshold window; coverage
    /// is exactly 0 on two whole intervals of theta.
    EtaAboveSum,
    /// (a+b)/2 <= eta <= a+b.
    EtaMidRange,
    /// eta < (a+b)/2.
    EtaBelowHalfSum,
}

pub fn classify_regime(eta: f64, a: f64, b: f64) -> CoverageRegime {
    if eta > a + b {
        CoverageRegime::EtaAboveSum
    } else if eta >= 0.5 * (a + b) {
        CoverageRegime::EtaMidRange
    } else {
        CoverageRegime::EtaBelowHalfSum
    }
}

fn validate_coverage_args(n: u64, eta: f64, a: f64, b: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("sample size n must be >= 1".to_string()));
    }
    if !eta.is_finite() || eta < 0.0 {
        return Err(Error::domain(format!(
            "threshold eta must be finite and >= 0, got {eta}"
        )));
    }
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
        return Err(Error::domain(format!(
            "box half-lengths must be finite and >= 0, got a={a}, b={b}"
        )));
    }
    Ok(())
}

/// Exact coverage of `[theta_hat - a, theta_hat + b]` at a fixed theta.
pub fn coverage_at(theta: f64, n: u64, eta: f64, a: f64, b: f64) -> Result<Probability> {
    validate_coverage_args(n, eta, a, b)?;
    if !theta.is_finite() {
        return Err(Error::domain(format!("theta must be finite, got {theta}")));
    }
    let (v, _) = coverage_branch(theta, (n as f64).sqrt(), eta, a, b);
    Ok(Probability::clamped(v))
}

/// Coverage plus the id of the active table row, for curve output.
/// `branch_id` = 10 * regime + row, regimes numbered 1 (eta > a+b),
/// 2 (mid), 3 (small), rows numbered as the tables are written below.
pub(crate) fn coverage_branch(theta: f64, rn: f64, eta: f64, a: f64, b: f64) -> (f64, u8) {
    let far = cdf(rn * a) - cdf(-rn * b);
    let (v, id) = match classify_regime(eta, a, b) {
        CoverageRegime::EtaAboveSum => {
            // rows: 1 far | 2 left shoulder | 3 dead zones | 4 atom window
            //       | 5 right shoulder
            if theta < -a - eta || theta > b + eta {
                (far, 11)
            } else if theta < b - eta {
                (cdf(rn * (-theta - eta)) - cdf(-rn * b), 12)
            } else if theta < -a {
                (0.0, 13)
            } else if theta <= b {
                (cdf(rn * (-theta + eta)) - cdf(rn * (-theta - eta)), 14)
            } else if theta <= -a + eta {
                (0.0, 13)
            } else {
                (far - (far - (cdf(rn * a) - cdf(rn * (-theta + eta)))), 15)
            }
        }
        CoverageRegime::EtaMidRange => {
            if theta < -a - eta || theta > b + eta {
                (far, 21)
            } else if theta < -a {
                (cdf(rn * (-theta - eta)) - cdf(-rn * b), 22)
            } else if theta < b - eta {
                (cdf(rn * (-theta + eta)) - cdf(-rn * b), 23)
            } else if theta <= -a + eta {
                (cdf(rn * (-theta + eta)) - cdf(rn * (-theta - eta)), 24)
            } else if theta <= b {
                (cdf(rn * a) - cdf(rn * (-theta - eta)), 25)
            } else {
                (cdf(rn * a) - cdf(rn * (-theta + eta)), 26)
            }
        }
        CoverageRegime::EtaBelowHalfSum => {
            if theta < -a - eta || theta > b + eta {
                (far, 31)
            } else if theta < -a {
                (cdf(rn * (-theta - eta)) - cdf(-rn * b), 32)
            } else if theta < -a + eta {
                (cdf(rn * (-theta + eta)) - cdf(-rn * b), 33)
            } else if theta <= b - eta {
                // middle clause of row 1: coverage is back at the far value
                (far, 31)
            } else if theta <= b {
                (cdf(rn * a) - cdf(rn * (-theta - eta)), 34)
            } else {
                (cdf(rn * a) - cdf(rn * (-theta + eta)), 35)
            }
        }
    };
    (v.clamp(0.0, 1.0), id)
}

/// One-sided limits at the two coverage jumps: the limit from the left at
/// theta = -a and from the right at theta = b, computed analytically by
/// substituting the jump point into the adjacent table row.
pub fn jump_limits(n: u64, eta: f64, a: f64, b: f64) -> (f64, f64) {
    let rn = (n as f64).sqrt();
    if eta > a + b {
        // the adjacent rows are the dead zones
        (0.0, 0.0)
    } else {
        let left = (cdf(rn * (a - eta)) - cdf(-rn * b)).clamp(0.0, 1.0);
        let right = (cdf(rn * a) - cdf(rn * (eta - b))).clamp(0.0, 1.0);
        (left, right)
    }
}

/// Where the coverage function jumps: `{-a, b}`, merged to `{0}` when
/// a = b = 0.
pub fn jump_points(a: f64, b: f64) -> Vec<f64> {
    if a == 0.0 && b == 0.0 {
        vec![0.0]
    } else {
        let left = if a == 0.0 { 0.0 } else { -a };
        vec![left, b]
    }
}

/// Infimal coverage over theta, in closed form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InfimalCoverage {
    pub value: Probability,
    /// True when the infimum is attained at some theta (the wide-threshold
    /// regime, where coverage is exactly 0 on dead zones); false when it is
    /// only a one-sided limit at the jumps.
    pub attained: bool,
    /// lim_{theta -> -a^-} p_n(theta).
    pub left_limit: f64,
    /// lim_{theta -> b^+} p_n(theta).
    pub right_limit: f64,
}

/// inf_theta P_{n,theta}(theta in [theta_hat - a, theta_hat + b]):
/// 0 when eta > a+b, otherwise
/// min[ Phi(rn(a-eta)) - Phi(-rn b), Phi(rn a) - Phi(rn(eta-b)) ].
pub fn infimal_coverage(n: u64, eta: f64, a: f64, b: f64) -> Result<InfimalCoverage> {
    validate_coverage_args(n, eta, a, b)?;
    let (left, right) = jump_limits(n, eta, a, b);
    if eta > a + b {
        Ok(InfimalCoverage {
            value: Probability::clamped(0.0),
            attained: true,
            left_limit: left,
            right_limit: right,
        })
    } else {
        Ok(InfimalCoverage {
            value: Probability::clamped(left.min(right)),
            attained: false,
            left_limit: left,
            right_limit: right,
        })
    }
}

/// Breakpoint-aware theta grid: `points` equispaced values over
/// [-(a+eta)*1.5, (b+eta)*1.5] with all six table boundaries inserted
/// exactly, sorted and deduplicated.
pub fn default_theta_grid(eta: f64, a: f64, b: f64, points: usize) -> Vec<f64> {
    let mut lo = -(a + eta) * 1.5;
    let mut hi = (b + eta) * 1.5;
    if !(lo < hi) {
        // degenerate (eta = a = b = 0); give the caller something sane
        lo = -1.0;
        hi = 1.0;
    }
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
    for bp in [-a - eta, -a, -a + eta, b - eta, b, b + eta] {
        if bp >= lo && bp <= hi {
            grid.push(bp);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Grid infimum of the coverage function, including the analytic one-sided
/// limits at the jumps. Agrees with [`infimal_coverage`] to 1e-10; the grid
/// search is the consistency check that the case tables and the closed form
/// describe the same function.
pub fn infimal_coverage_by_grid(n: u64, eta: f64, a: f64, b: f64, points: usize) -> Result<f64> {
    validate_coverage_args(n, eta, a, b)?;
    let rn = (n as f64).sqrt();
    let mut inf = f64::INFINITY;
    for theta in default_theta_grid(eta, a, b, points) {
        let (v, _) = coverage_branch(theta, rn, eta, a, b);
        inf = inf.min(v);
    }
    let (left, right) = jump_limits(n, eta, a, b);
    Ok(inf.min(left).min(right))
}

/// One row of a tabulated coverage curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveRow {
    pub theta: f64,
    pub coverage: f64,
    pub branch_id: u8,
}

/// Coverage as a function of theta on the breakpoint-aware grid.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageCurve {
    pub n: u64,
    pub eta: f64,
    pub a: f64,
    pub b: f64,
    pub regime: CoverageRegime,
    pub jump_points: Vec<f64>,
    pub rows: Vec<CurveRow>,
}

impl CoverageCurve {
    pub fn compute(n: u64, eta: f64, a: f64, b: f64, points: usize) -> Result<Self> {
        validate_coverage_args(n, eta, a, b)?;
        let rn = (n as f64).sqrt();
        let rows = default_theta_grid(eta, a, b, points)
            .into_iter()
            .map(|theta| {
                let (coverage, branch_id) = coverage_branch(theta, rn, eta, a, b);
                CurveRow {
                    theta,
                    coverage,
                    branch_id,
                }
            })
            .collect();
        Ok(CoverageCurve {
            n,
            eta,
            a,
            b,
            regime: classify_regime(eta, a, b),
            jump_points: jump_points(a, b),
            rows,
        })
    }
}

/// Coverage of the naive interval that ignores the thresholding step:
/// `{0}` when theta_hat = 0, else `[theta_hat +/- z_{(1-delta)/2}/sqrt(n)]`.
pub fn naive_coverage_at(theta: f64, n: u64, eta: f64, delta: f64) -> Result<Probability> {
    validate_coverage_args(n, eta, 0.0, 0.0)?;
    if !theta.is_finite() {
        return Err(Error::domain(format!("theta must be finite, got {theta}")));
    }
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::domain(format!(
            "confidence level delta must satisfy 0 < delta < 1, got {delta}"
        )));
    }
    let rn = (n as f64).sqrt();
    let c = quantile_inner(0.5 * (1.0 + delta)) / rn;
    let mass = |lo: f64, hi: f64| {
        if hi <= lo {
            0.0
        } else {
            cdf(rn * (hi - theta)) - cdf(rn * (lo - theta))
        }
    };
    // nonzero branch: ybar in [theta-c, theta+c] with |ybar| > eta
    let mut p = mass(theta - c, theta + c) - mass((theta - c).max(-eta), (theta + c).min(eta));
    // atom branch: C = {0} covers theta iff theta = 0
    if theta == 0.0 {
        p += mass(-eta, eta);
    }
    Ok(Probability::clamped(p))
}

/// P_{n,theta}( sqrt(n) |theta_hat - theta| > m ): the exact exceedance
/// probability behind the no-uniform-sqrt-n-rate demonstration.
pub fn uniform_rate_exceedance(theta: f64, n: u64, eta: f64, m: f64) -> Result<Probability> {
    validate_coverage_args(n, eta, 0.0, 0.0)?;
    if !m.is_finite() || m < 0.0 {
        return Err(Error::domain(format!(
            "deviation bound m must be finite and >= 0, got {m}"
        )));
    }
    let rn = (n as f64).sqrt();
    let c = m / rn;
    let mass = |lo: f64, hi: f64| {
        if hi <= lo {
            0.0
        } else {
            cdf(rn * (hi - theta)) - cdf(rn * (lo - theta))
        }
    };
    // zero branch: theta_hat = 0 and sqrt(n)|theta| > m
    let p_zero = if rn * theta.abs() > m {
        mass(-eta, eta)
    } else {
        0.0
    };
    // nonzero branch: ybar outside both [-eta, eta] and [theta +/- c]
    let p_union = mass(-eta, eta) + mass(theta - c, theta + c)
        - mass((theta - c).max(-eta), (theta + c).min(eta));
    Ok(Probability::clamped(p_zero + (1.0 - p_union)))
}

// ---------------------------------------------------------------------------
// Box geometry.
// ---------------------------------------------------------------------------

/// A k-dimensional box `[center - a, center + b]` described by its
/// componentwise half-lengths (all >= 0). The center is supplied by whoever
/// uses the box; only the extents matter here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxInterval {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl BoxInterval {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::domain(format!(
                "box half-length vectors must be nonempty and equal length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        for v in a.iter().chain(b.iter()) {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::domain(format!(
                    "box half-lengths must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(BoxInterval { a, b })
    }

    pub fn scalar(a: f64, b: f64) -> Result<Self> {
        BoxInterval::new(vec![a], vec![b])
    }

    /// Symmetric box with half-length c in each of k coordinates.
    pub fn symmetric(c: f64, k: usize) -> Result<Self> {
        BoxInterval::new(vec![c; k], vec![c; k])
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn as_scalar(&self) -> Result<(f64, f64)> {
        if self.dim() != 1 {
            return Err(Error::domain(format!(
                "expected a 1-dimensional box, got dimension {}",
                self.dim()
            )));
        }
        Ok((self.a[0], self.b[0]))
    }
}

/// Extension of the box from its center along a unit direction: the largest
/// lambda >= 0 with center + lambda * e still inside.
pub fn ext_box(bx: &BoxInterval, direction: &[f64]) -> Result<f64> {
    if direction.len() != bx.dim() {
        return Err(Error::domain(format!(
            "direction has length {}, box has dimension {}",
            direction.len(),
            bx.dim()
        )));
    }
    let norm2: f64 = direction.iter().map(|e| e * e).sum();
    if norm2 == 0.0 {
        return Err(Error::domain(
            "direction must be a unit vector, got the zero vector".to_string(),
        ));
    }
    if (norm2.sqrt() - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!(
            "direction must be a unit vector, got norm {}",
            norm2.sqrt()
        )));
    }
    let mut lambda = f64::INFINITY;
    for (i, &e) in direction.iter().enumerate() {
        if e > 0.0 {
            lambda = lambda.min(bx.b[i] / e);
        } else if e < 0.0 {
            lambda = lambda.min(bx.a[i] / -e);
        }
    }
    Ok(lambda)
}

/// Diameter of the box: the corner-to-corner length ||a + b||_2.
pub fn diam_box(bx: &BoxInterval) -> f64 {
    bx.a.iter()
        .zip(&bx.b)
        .map(|(a, b)| (a + b) * (a + b))
        .sum::<f64>()
        .sqrt()
}
