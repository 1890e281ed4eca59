//! Maximum likelihood for the Chen model under improved adaptive progressive
//! censoring.
//!
//! The log-likelihood (without its parameter-free constant) is
//!
//! ```text
//! l(a, b) = D2 ln a + D2 ln b + sum_{i<=D2} [(b-1) ln x_i + x_i^b]
//!           - a * nu(b)
//! nu(b)   = sum_{i<=D2} (e^{x_i^b} - 1) + sum_{i<=D1} R_i (e^{x_i^b} - 1)
//!           + B (e^{x_B^b} - 1)
//! ```
//!
//! For fixed `b` the score in `a` vanishes at `a = D2 / nu(b)`, so the fit
//! reduces to a one-dimensional root search in `b`. The primary solver is
//! the fixed-point map `b <- g(b)`; a Brent search on the profile score is
//! used whenever the map fails to settle.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::censoring::CensoredSample;
use crate::chen::ChenParams;
use crate::error::{Error, Result};

/// 2x2 matrix in row-major order.
pub type Matrix2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub beta_init: f64,
    /// Fixed-point stopping rule on `|b_{k+1} - b_k|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Search interval for `b`, also used by the bracketed fallback.
    pub bracket: (f64, f64),
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { beta_init: 1.0, tol: 1e-10, max_iter: 500, bracket: (1e-4, 50.0) }
    }
}

impl MleOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_init > 0.0 && self.beta_init.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta_init must be > 0, got {}", self.beta_init)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be >= 1".into()));
        }
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidConfig(format!("bracket must satisfy 0 < low < high, got ({lo}, {hi})")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverMethod {
    FixedPoint,
    Bracketed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSolution {
    pub beta: f64,
    pub iterations: usize,
    pub method: SolverMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleFit {
    pub params: ChenParams,
    pub loglik: f64,
    /// Observed information at the estimate.
    pub info: Matrix2,
    /// Inverse of `info`.
    pub varcov: Matrix2,
    pub iterations: usize,
    pub converged_by: SolverMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceIntervals {
    pub level: f64,
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
}

impl ConfidenceIntervals {
    pub fn alpha_width(&self) -> f64 {
        self.alpha.1 - self.alpha.0
    }

    pub fn beta_width(&self) -> f64 {
        self.beta.1 - self.beta.0
    }
}

pub fn log_likelihood(p: &ChenParams, s: &CensoredSample) -> f64 {
    let (a, b) = (p.alpha(), p.beta());
    let d2 = s.d2() as f64;
    let failures: f64 = s
        .times()
        .iter()
        .map(|&x| {
            let xb = x.powf(b);
            (b - 1.0) * x.ln() + xb
        })
        .sum();
    d2 * a.ln() + d2 * b.ln() + failures - a * nu(s, b)
}

/// `nu(b) = sum over exposure groups of w (e^{x^b} - 1)`.
pub fn nu(s: &CensoredSample, beta: f64) -> f64 {
    s.exposure_groups().map(|(x, w)| w * x.powf(beta).exp_m1()).sum()
}

/// Partial derivatives `(dl/da, dl/db)`.
pub fn score(p: &ChenParams, s: &CensoredSample) -> (f64, f64) {
    let (a, b) = (p.alpha(), p.beta());
    let d2 = s.d2() as f64;
    let mut nu_sum = 0.0;
    let mut phi_sum = 0.0;
    for (x, w) in s.exposure_groups() {
        let xb = x.powf(b);
        nu_sum += w * xb.exp_m1();
        phi_sum += w * phi(x, xb);
    }
    let direct: f64 = s
        .times()
        .iter()
        .map(|&x| x.ln() * (1.0 + x.powf(b)))
        .sum();
    (d2 / a - nu_sum, d2 / b + direct - a * phi_sum)
}

/// `phi = e^{x^b} x^b ln x`, given `xb = x^b`.
#[inline]
fn phi(x: f64, xb: f64) -> f64 {
    xb.exp() * xb * x.ln()
}

/// Profile estimate `a(b) = D2 / nu(b)`.
pub fn alpha_profile(s: &CensoredSample, beta: f64) -> Result<f64> {
    if s.d2() == 0 {
        return Err(Error::DegenerateSample("no observed failures".into()));
    }
    let v = nu(s, beta);
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::DegenerateSample(format!("nu({beta}) = {v} is not positive and finite")));
    }
    Ok(s.d2() as f64 / v)
}

/// Pieces of the profile score at a given `b`.
struct ProfileTerms {
    /// `D2 / b`
    inv: f64,
    /// `sum_{i<=D2} ln x_i (1 + x_i^b)`
    direct: f64,
    /// `sum_w phi / nu`, evaluated with a common exponential shift.
    ratio: f64,
    d2: f64,
}

impl ProfileTerms {
    fn new(s: &CensoredSample, beta: f64) -> Self {
        let d2 = s.d2() as f64;
        let direct = s.times().iter().map(|&x| x.ln() * (1.0 + x.powf(beta))).sum();
        let shift = s
            .exposure_groups()
            .map(|(x, _)| x.powf(beta))
            .fold(0.0f64, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        if shift <= 500.0 {
            for (x, w) in s.exposure_groups() {
                let xb = x.powf(beta);
                num += w * phi(x, xb);
                den += w * xb.exp_m1();
            }
        } else {
            // e^{-shift} underflows relative to every retained term
            for (x, w) in s.exposure_groups() {
                let xb = x.powf(beta);
                let e = (xb - shift).exp();
                num += w * e * xb * x.ln();
                den += w * e;
            }
        }
        Self { inv: d2 / beta, direct, ratio: num / den, d2 }
    }

    fn score(&self) -> f64 {
        self.inv + self.direct - self.d2 * self.ratio
    }

    fn magnitude(&self) -> f64 {
        self.inv.abs() + self.direct.abs() + (self.d2 * self.ratio).abs()
    }

    /// The fixed-point map `g(b)`.
    fn map(&self) -> f64 {
        1.0 / (-self.direct / self.d2 + self.ratio)
    }
}

/// Profile score `h(b) = dl/db` evaluated at `a = a(b)`.
pub fn profile_score(s: &CensoredSample, beta: f64) -> f64 {
    ProfileTerms::new(s, beta).score()
}

/// One application of the fixed-point map.
pub fn fixed_point_map(s: &CensoredSample, beta: f64) -> f64 {
    ProfileTerms::new(s, beta).map()
}

fn check_identifiable(s: &CensoredSample) -> Result<()> {
    if s.d2() < 2 {
        return Err(Error::DegenerateSample(format!(
            "need at least two observed failures, got {}",
            s.d2()
        )));
    }
    let t = s.times();
    if t.first() == t.last() {
        return Err(Error::DegenerateSample("all failure times are equal".into()));
    }
    Ok(())
}

fn root_accepted(s: &CensoredSample, beta: f64, opts: &MleOptions) -> bool {
    let (lo, hi) = opts.bracket;
    if !(beta >= lo && beta <= hi) {
        return false;
    }
    let terms = ProfileTerms::new(s, beta);
    terms.score().abs() < 1e-8 * (1.0 + terms.magnitude())
}

/// Fixed-point iteration only. Returns `None` if the iteration escapes
/// `(0, inf)` or does not settle within `max_iter`.
pub fn fixed_point_beta(s: &CensoredSample, opts: &MleOptions) -> Result<Option<BetaSolution>> {
    opts.validate()?;
    check_identifiable(s)?;
    let mut current = opts.beta_init;
    for k in 1..=opts.max_iter {
        let next = fixed_point_map(s, current);
        if !(next > 0.0 && next.is_finite()) {
            return Ok(None);
        }
        if (next - current).abs() < opts.tol {
            return Ok(Some(BetaSolution { beta: next, iterations: k, method: SolverMethod::FixedPoint }));
        }
        current = next;
    }
    Ok(None)
}

/// Brent search for a sign change of the profile score on `opts.bracket`.
pub fn bracketed_beta(s: &CensoredSample, opts: &MleOptions) -> Result<BetaSolution> {
    opts.validate()?;
    check_identifiable(s)?;
    let (lo, hi) = opts.bracket;
    let h = |b: f64| profile_score(s, b);
    let (h_lo, h_hi) = (h(lo), h(hi));
    if !(h_lo.is_finite() && h_hi.is_finite()) || h_lo.signum() == h_hi.signum() {
        return Err(Error::NoRoot { low: lo, high: hi, h_low: h_lo, h_high: h_hi });
    }
    let (beta, iterations) = brent(h, lo, hi, h_lo, h_hi, 4.0 * f64::EPSILON, 200);
    Ok(BetaSolution { beta, iterations, method: SolverMethod::Bracketed })
}

/// Fixed point first, Brent on the profile score as fallback.
pub fn solve_beta(s: &CensoredSample, opts: &MleOptions) -> Result<BetaSolution> {
    if let Some(sol) = fixed_point_beta(s, opts)? {
        if root_accepted(s, sol.beta, opts) {
            return Ok(sol);
        }
    }
    bracketed_beta(s, opts)
}

pub fn observed_information(p: &ChenParams, s: &CensoredSample) -> Matrix2 {
    let (a, b) = (p.alpha(), p.beta());
    let d2 = s.d2() as f64;
    let mut phi_sum = 0.0;
    let mut phi_xi_sum = 0.0;
    for (x, w) in s.exposure_groups() {
        let xb = x.powf(b);
        let f = phi(x, xb);
        phi_sum += w * f;
        phi_xi_sum += w * f * x.ln() * (1.0 + xb);
    }
    let curvature: f64 = s
        .times()
        .iter()
        .map(|&x| {
            let l = x.ln();
            l * l * x.powf(b)
        })
        .sum();
    let i11 = d2 / (a * a);
    let i12 = phi_sum;
    let i22 = d2 / (b * b) - curvature + a * phi_xi_sum;
    [[i11, i12], [i12, i22]]
}

/// Inverse of a 2x2 matrix, rejecting near-singular input.
pub fn invert(m: &Matrix2) -> Result<Matrix2> {
    let [[a, b], [c, d]] = *m;
    let det = a * d - b * c;
    let norm2 = a * a + b * b + c * c + d * d;
    let rel = det.abs() / norm2;
    if !(rel >= 1e-12) || !det.is_finite() {
        return Err(Error::SingularInformation(rel));
    }
    Ok([[d / det, -b / det], [-c / det, a / det]])
}

pub fn fit(s: &CensoredSample, opts: &MleOptions) -> Result<MleFit> {
    let sol = solve_beta(s, opts)?;
    let alpha = alpha_profile(s, sol.beta)?;
    let params = ChenParams::new(alpha, sol.beta)
        .map_err(|e| Error::DegenerateSample(format!("estimate left the parameter space: {e}")))?;
    let info = observed_information(&params, s);
    let varcov = invert(&info)?;
    Ok(MleFit {
        params,
        loglik: log_likelihood(&params, s),
        info,
        varcov,
        iterations: sol.iterations,
        converged_by: sol.method,
    })
}

/// Two-sided standard normal critical value for a central `level`.
pub fn normal_critical_value(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfig(format!("level must be in (0, 1), got {level}")));
    }
    let n = Normal::standard();
    Ok(n.inverse_cdf(1.0 - (1.0 - level) / 2.0))
}

/// Wald intervals `theta -/+ z * se`.
pub fn confidence_intervals(fit: &MleFit, level: f64) -> Result<ConfidenceIntervals> {
    let z = normal_critical_value(level)?;
    let (va, vb) = (fit.varcov[0][0], fit.varcov[1][1]);
    if !(va > 0.0 && vb > 0.0) {
        return Err(Error::DegenerateSample(format!(
            "variance estimates must be positive, got var(alpha)={va}, var(beta)={vb}"
        )));
    }
    let (a, b) = (fit.params.alpha(), fit.params.beta());
    let (ha, hb) = (z * va.sqrt(), z * vb.sqrt());
    Ok(ConfidenceIntervals { level, alpha: (a - ha, a + ha), beta: (b - hb, b + hb) })
}

/// Brent's method (inverse quadratic interpolation with bisection
/// safeguard). Requires `f(a)` and `f(b)` of opposite sign.
fn brent<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    rel_tol: f64,
    max_iter: usize,
) -> (f64, usize) {
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=max_iter {
        if fb == 0.0 {
            return (b, iter);
        }
        if fb.signum() == fc.signum() {
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
        let tol = 2.0 * rel_tol * b.abs() + 0.5 * 1e-300;
        let half = 0.5 * (c - b);
        if half.abs() <= tol {
            return (b, iter);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (tol * q).abs()).min((e * q).abs()) {
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
    }
    (b, max_iter)
}
