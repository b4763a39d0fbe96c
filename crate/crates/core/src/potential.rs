//! The singular interaction potential
//!
//! ```text
//! Phi(r) = ((1 - r)^(-m) - m r - 1) / (m (m + 1)),   r < 1,  m > 1
//! ```
//!
//! which is convex, satisfies `Phi(0) = Phi'(0) = 0`, `Phi''(0) = 1` and blows
//! up as `r -> 1`.

use crate::error::{Error, Result};

/// Arguments closer than this to the singularity at `r = 1` are rejected.
pub const SINGULARITY_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPotential {
    m: f64,
}

impl SingularPotential {
    pub fn new(m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 1.0) {
            return Err(Error::Validation(format!("exponent m must be > 1, got {m}")));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    #[inline]
    fn check(&self, r: f64) -> Result<()> {
        if r.is_nan() || r >= 1.0 - SINGULARITY_GUARD {
            Err(Error::SingularityBreach { value: r, guard: SINGULARITY_GUARD })
        } else {
            Ok(())
        }
    }

    pub fn phi(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.phi_unchecked(r))
    }

    pub fn dphi(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.dphi_unchecked(r))
    }

    pub fn ddphi(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.ddphi_unchecked(r))
    }

    /// `Phi` without the guard. Callers must have validated `r`.
    #[inline]
    pub(crate) fn phi_unchecked(&self, r: f64) -> f64 {
        let m = self.m;
        // ((1-r)^-m - 1 - m r) loses digits for small |r|; use the series there.
        if r.abs() < 1e-4 {
            // (1-r)^-m = 1 + m r + m(m+1)/2 r^2 + m(m+1)(m+2)/6 r^3 + ...
            let c2 = 0.5;
            let c3 = (m + 2.0) / 6.0;
            let c4 = (m + 2.0) * (m + 3.0) / 24.0;
            let c5 = (m + 2.0) * (m + 3.0) * (m + 4.0) / 120.0;
            return r * r * (c2 + r * (c3 + r * (c4 + r * c5)));
        }
        ((-m * (-r).ln_1p()).exp_m1() - m * r) / (m * (m + 1.0))
    }

    #[inline]
    pub(crate) fn dphi_unchecked(&self, r: f64) -> f64 {
        let m = self.m;
        // (1-r)^-(m+1) - 1 = expm1(-(m+1) ln(1-r)), exact near r = 0
        (-(m + 1.0) * (-r).ln_1p()).exp_m1() / (m + 1.0)
    }

    #[inline]
    pub(crate) fn ddphi_unchecked(&self, r: f64) -> f64 {
        (1.0 - r).powf(-(self.m + 2.0))
    }

    /// Regularized singularity function `Psi(s) = Phi'(1 - s) s^(m+1)` on `[0, 1]`,
    /// evaluated in the cancellation-free form `(1 - s^(m+1)) / (m + 1)`.
    pub fn psi(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("psi expects s in [0, 1], got {s}")));
        }
        Ok((1.0 - s.powf(self.m + 1.0)) / (self.m + 1.0))
    }
}
