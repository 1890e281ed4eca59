//! The Chen two-parameter lifetime distribution.
//!
//! ```text
//! F(x) = 1 - exp[alpha (1 - e^{x^beta})]
//! h(x) = alpha beta x^{beta-1} e^{x^beta}
//! ```
//!
//! The hazard is bathtub shaped for `beta < 1` and non-decreasing otherwise.
//! All tail quantities are evaluated through `expm1`/`ln_1p` so that the
//! survival function keeps full relative precision near zero and in the
//! deep right tail.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter pair of the Chen distribution. Both components are strictly
/// positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChenParams {
    alpha: f64,
    beta: f64,
}

impl ChenParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be finite and > 0, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ln S(x) = -alpha * (e^{x^beta} - 1)`, always `<= 0`.
    #[inline]
    fn log_survival_unchecked(&self, x: f64) -> f64 {
        -self.alpha * x.powf(self.beta).exp_m1()
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        if x == 0.0 {
            return Ok(if self.beta > 1.0 {
                0.0
            } else if self.beta == 1.0 {
                self.alpha * self.beta
            } else {
                f64::INFINITY
            });
        }
        Ok(self.ln_pdf_unchecked(x).exp())
    }

    /// Log density for `x > 0`.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("log density needs x > 0, got {x}")));
        }
        Ok(self.ln_pdf_unchecked(x))
    }

    #[inline]
    fn ln_pdf_unchecked(&self, x: f64) -> f64 {
        let xb = x.powf(self.beta);
        self.alpha.ln() + self.beta.ln() + (self.beta - 1.0) * x.ln() - self.alpha * xb.exp_m1()
            + xb
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        Ok(-self.log_survival_unchecked(x).exp_m1())
    }

    pub fn survival(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        Ok(self.log_survival_unchecked(x).exp())
    }

    pub fn ln_survival(&self, x: f64) -> Result<f64> {
        check_support(x)?;
        Ok(self.log_survival_unchecked(x))
    }

    pub fn hazard(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("hazard needs x > 0, got {x}")));
        }
        let ln_h = self.alpha.ln() + self.beta.ln() + (self.beta - 1.0) * x.ln() + x.powf(self.beta);
        Ok(ln_h.exp())
    }

    /// Location of the hazard minimum, `((1 - beta) / beta)^{1/beta}`, when
    /// the hazard is bathtub shaped; `None` for `beta >= 1`.
    pub fn hazard_minimizer(&self) -> Option<f64> {
        (self.beta < 1.0).then(|| ((1.0 - self.beta) / self.beta).powf(1.0 / self.beta))
    }

    /// Inverse cdf on `[0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain(format!("quantile needs 0 <= u < 1, got {u}")));
        }
        // -ln(1-u) / alpha, then ln(1 + that)
        let cum_hazard = -(-u).ln_1p() / self.alpha;
        Ok(cum_hazard.ln_1p().powf(1.0 / self.beta))
    }

    /// Single variate by inverse transform.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        // u is in [0, 1) so this cannot fail
        let cum_hazard = -(-u).ln_1p() / self.alpha;
        cum_hazard.ln_1p().powf(1.0 / self.beta)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.draw(rng)).collect()
    }
}

fn check_support(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("x must be >= 0, got {x}")));
    }
    Ok(())
}
