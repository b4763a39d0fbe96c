//! Closed-form approximations of solitary waves in the high-energy limit.
//!
//! With the limit profile `S` and the constants of
//! [`crate::limit_ode`], an amplitude gap `eps` determines
//!
//! ```text
//! mu_hat    = mu_bar eps / (1 + eps (kappa_bar - 1))
//! sigma_hat = eps^(-m-2) mu_hat^2
//! W0(x)     = (S'(x) + mu_bar) / 2
//! T0(x)     = (S(x) + mu_bar x + kappa_bar) / 2
//! ```
//!
//! and the global approximations `R_hat`, `V_hat` assembled from the tip, the
//! transition and the foot layers.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{fmt17, Profile, UniformGrid};
use crate::limit_ode::{AsymptoticConstants, LimitProfile};

/// `(S'(x) + mu_bar) / 2`, with `S'` odd.
pub fn w0(lp: &LimitProfile, x: f64) -> f64 {
    0.5 * (lp.sp_at(x) + lp.mu_bar())
}

/// `(S(x) + mu_bar x + kappa_bar) / 2`, with `S` even.
pub fn t0(lp: &LimitProfile, consts: &AsymptoticConstants, x: f64) -> f64 {
    0.5 * (lp.s_at(x) + consts.mu_bar * x + consts.kappa_bar)
}

/// Asymptotic approximation of the wave with amplitude gap `eps`.
#[derive(Debug, Clone, Copy)]
pub struct Approximant<'a> {
    pub eps: f64,
    pub consts: AsymptoticConstants,
    pub lp: &'a LimitProfile,
    pub mu_hat: f64,
    pub sigma_hat: f64,
}

impl<'a> Approximant<'a> {
    pub fn new(eps: f64, consts: AsymptoticConstants, lp: &'a LimitProfile) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Validation(format!("eps must lie in (0, 1), got {eps}")));
        }
        if consts.m != lp.m() {
            return Err(Error::Validation("constants and limit profile have different m".into()));
        }
        let denom = 1.0 + eps * (consts.kappa_bar - 1.0);
        if !(denom > 0.0) {
            return Err(Error::Domain(format!("1 + eps (kappa_bar - 1) = {denom} is not positive")));
        }
        let mu_hat = consts.mu_bar * eps / denom;
        let sigma_hat = eps.powf(-consts.m - 2.0) * mu_hat * mu_hat;
        Ok(Self { eps, consts, lp, mu_hat, sigma_hat })
    }

    /// `1 - eps - eps S(|x| / mu_hat)`.
    pub fn tip_branch(&self, x: f64) -> f64 {
        1.0 - self.eps - self.eps * self.lp.s_at(x.abs() / self.mu_hat)
    }

    /// `eps T0((1 - |x|) / mu_hat)`.
    pub fn foot_branch(&self, x: f64) -> f64 {
        self.eps * t0(self.lp, &self.consts, (1.0 - x.abs()) / self.mu_hat)
    }

    /// The approximate distance profile.
    pub fn r_hat(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax < 0.5 {
            self.tip_branch(x)
        } else if ax < 1.5 {
            self.foot_branch(x)
        } else {
            0.0
        }
    }

    /// The approximate velocity profile `(eps / mu_hat) W0((1/2 - |x|) / mu_hat)` on `|x| < 1`.
    pub fn v_hat(&self, x: f64) -> f64 {
        if x.abs() < 1.0 {
            self.eps / self.mu_hat * w0(self.lp, (0.5 - x.abs()) / self.mu_hat)
        } else {
            0.0
        }
    }

    /// `1 - ||V_hat||`, with `||V_hat||^2 = 2 (eps^2 / mu_hat) int_J W0^2` over
    /// `J = [-1/(2 mu_hat), 1/(2 mu_hat)]` by composite Simpson.
    pub fn delta_hat(&self) -> f64 {
        let half = 0.5 / self.mu_hat;
        let mut n = ((2.0 * half / 0.005).ceil() as usize).max(2000);
        n += n % 2;
        let h = 2.0 * half / n as f64;
        let f = |i: usize| {
            let w = w0(self.lp, -half + i as f64 * h);
            w * w
        };
        let mut acc = f(0) + f(n);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 * f(i) } else { 2.0 * f(i) };
        }
        let integral = acc * h / 3.0;
        1.0 - (2.0 * self.eps * self.eps / self.mu_hat * integral).sqrt()
    }

    pub fn r_hat_profile(&self, grid: UniformGrid) -> Profile {
        Profile::from_fn(grid, "R_hat", |x| self.r_hat(x)).expect("finite approximant")
    }

    pub fn v_hat_profile(&self, grid: UniformGrid) -> Profile {
        Profile::from_fn(grid, "V_hat", |x| self.v_hat(x)).expect("finite approximant")
    }
}

/// Leading-order expansions in `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingLaws {
    /// `mu_bar eps + mu_bar (1 - kappa_bar) eps^2`.
    pub mu: f64,
    /// `mu_bar^2 eps^-m + 2 mu_bar^2 (1 - kappa_bar) eps^(1 - m)`.
    pub sigma: f64,
    /// Two-term expansion of `delta`; `None` for `m <= 2`, where it is not valid.
    pub delta: Option<f64>,
}

/// Coefficients `(d1, d2)` of `delta = d1 eps + d2 eps^2 + ...`, from expanding
/// `1 - sqrt((1 + eps (kappa_bar - 1)) (1 - eps (1 + eta_bar / mu_bar)))`.
pub fn delta_coefficients(consts: &AsymptoticConstants) -> (f64, f64) {
    let (mb, kb, eb) = (consts.mu_bar, consts.kappa_bar, consts.eta_bar);
    let d1 = (2.0 * mb - mb * kb + eb) / (2.0 * mb);
    let d2 = (mb * kb + eb).powi(2) / (8.0 * mb * mb);
    (d1, d2)
}

/// `1 - sqrt((1 + eps (kappa_bar - 1)) (1 - eps (1 + eta_bar / mu_bar)))`.
pub fn delta_of_eps(eps: f64, consts: &AsymptoticConstants) -> f64 {
    let a = 1.0 + eps * (consts.kappa_bar - 1.0);
    let b = 1.0 - eps * (1.0 + consts.eta_bar / consts.mu_bar);
    1.0 - (a * b).sqrt()
}

pub fn scaling_laws(eps: f64, consts: &AsymptoticConstants) -> ScalingLaws {
    let (m, mb, kb) = (consts.m, consts.mu_bar, consts.kappa_bar);
    let mu = mb * eps + mb * (1.0 - kb) * eps * eps;
    let sigma = mb * mb * eps.powf(-m) + 2.0 * mb * mb * (1.0 - kb) * eps.powf(1.0 - m);
    let delta = if m > 2.0 {
        let (d1, d2) = delta_coefficients(consts);
        Some(d1 * eps + d2 * eps * eps)
    } else {
        None
    };
    ScalingLaws { mu, sigma, delta }
}

/// `ln(sinh(y) / y)` for `y > 0`.
fn log_sinhc(y: f64) -> f64 {
    if y < 1e-4 {
        // sinh(y)/y = 1 + y^2/6 + y^4/120 + ...
        let y2 = y * y;
        (y2 / 6.0 + y2 * y2 / 120.0).ln_1p()
    } else if y < 20.0 {
        (y.sinh() / y).ln()
    } else {
        y + (-(-2.0 * y).exp()).ln_1p() - std::f64::consts::LN_2 - y.ln()
    }
}

/// Positive root `lambda` of `sinh(lambda / 2) / (lambda / 2) = sqrt(sigma)`:
/// bracketing and bisection, then Newton.
pub fn decay_rate(sigma: f64) -> Result<f64> {
    if !(sigma > 1.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("decay rate needs sigma > 1, got {sigma}")));
    }
    let target = 0.5 * sigma.ln();
    let g = |y: f64| log_sinhc(y) - target;
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-6 * hi {
            break;
        }
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..50 {
        // d/dy ln(sinh y / y) = coth y - 1/y
        let dg = if y < 1e-4 { y / 3.0 } else { 1.0 / y.tanh() - 1.0 / y };
        let step = g(y) / dg;
        let next = (y - step).clamp(lo, hi);
        let done = (next - y).abs() <= 1e-15 * y;
        y = next;
        if done {
            break;
        }
    }
    Ok(2.0 * y)
}

/// One row of the scaling table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub eps: f64,
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub delta_hat: f64,
    pub lambda: f64,
}

pub fn scaling_row(eps: f64, consts: &AsymptoticConstants, lp: &LimitProfile) -> Result<ScalingRow> {
    let app = Approximant::new(eps, *consts, lp)?;
    Ok(ScalingRow {
        eps,
        mu_hat: app.mu_hat,
        sigma_hat: app.sigma_hat,
        delta_hat: app.delta_hat(),
        lambda: decay_rate(app.sigma_hat)?,
    })
}

pub fn scaling_table_csv(rows: &[ScalingRow]) -> String {
    let mut s = String::from("eps,mu_hat,sigma_hat,delta_hat,lambda\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt17(r.eps),
            fmt17(r.mu_hat),
            fmt17(r.sigma_hat),
            fmt17(r.delta_hat),
            fmt17(r.lambda)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::cone_check;
    use crate::limit_ode::integrate_limit;

    fn setup(m: f64) -> (LimitProfile, AsymptoticConstants) {
        let lp = integrate_limit(m, 200.0, 1e-3).unwrap();
        let c = AsymptoticConstants::from_profile(&lp);
        (lp, c)
    }

    #[test]
    fn w0_and_t0_identities() {
        let (lp, c) = setup(2.0);
        let mb = c.mu_bar;
        assert!((w0(&lp, 0.0) - mb / 2.0).abs() < 1e-15);
        assert!((t0(&lp, &c, 0.0) - c.kappa_bar / 2.0).abs() < 1e-15);
        for x in [0.3, 2.0, 17.5, 150.0, 500.0] {
            assert!((w0(&lp, x) + w0(&lp, -x) - mb).abs() < 1e-15);
            assert!((t0(&lp, &c, x) - t0(&lp, &c, -x) - mb * x).abs() < 1e-12 * (1.0 + x));
            assert!(w0(&lp, x) > w0(&lp, x / 2.0));
        }
        assert!((w0(&lp, 1e4) - mb).abs() < 1e-6 && w0(&lp, -1e4) < 1e-6);
        // second difference of t0 reproduces S''/2
        let (x, h) = (3.0, 1e-3);
        let d2 = (t0(&lp, &c, x + h) - 2.0 * t0(&lp, &c, x) + t0(&lp, &c, x - h)) / (h * h);
        assert!((d2 - 0.5 * lp.spp_at(x)).abs() < 1e-5);
    }

    #[test]
    fn approximant_invariants() {
        let (lp, c) = setup(2.5);
        let a = Approximant::new(0.05, c, &lp).unwrap();
        assert_eq!(a.r_hat(0.0), 0.95);
        assert_eq!(a.r_hat(1.5), 0.0);
        assert_eq!(a.r_hat(-2.0), 0.0);
        assert_eq!(a.v_hat(1.0), 0.0);
        let id = a.sigma_hat - a.eps.powf(-c.m - 2.0) * a.mu_hat * a.mu_hat;
        assert_eq!(id, 0.0);
        let v_half = a.v_hat(0.5);
        assert!((v_half - a.eps / a.mu_hat * c.mu_bar / 2.0).abs() < 1e-14);
        assert!((v_half - 0.5 * (1.0 + a.eps * (c.kappa_bar - 1.0))).abs() < 1e-12);
        assert!(Approximant::new(1.2, c, &lp).is_err());
    }

    #[test]
    fn v_hat_at_origin_tends_to_one() {
        let (lp, c) = setup(2.0);
        let gaps: Vec<f64> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&e| (Approximant::new(e, c, &lp).unwrap().v_hat(0.0) - 1.0).abs())
            .collect();
        assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1] && gaps[2] < 0.01, "{gaps:?}");
    }

    #[test]
    fn branch_mismatch_is_of_order_eps_m() {
        let (lp, c) = setup(2.0);
        let mut ratios = Vec::new();
        for eps in [0.1, 0.05, 0.025] {
            let a = Approximant::new(eps, c, &lp).unwrap();
            let gap = (a.tip_branch(0.5) - a.foot_branch(0.5)).abs();
            ratios.push(gap / eps.powi(2));
        }
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        assert!(hi / lo < 2.0 && hi < 10.0, "{ratios:?}");
    }

    #[test]
    fn outer_jump_is_of_order_eps_m() {
        let (lp, c) = setup(3.0);
        for eps in [0.1, 0.05, 0.025] {
            let a = Approximant::new(eps, c, &lp).unwrap();
            let jump = a.foot_branch(1.5 - 1e-14);
            assert!(jump > 0.0 && jump < 2.0 * eps.powi(3), "eps {eps}: {jump:e}");
        }
    }

    #[test]
    fn sampled_approximants_lie_in_the_cone() {
        let (lp, c) = setup(2.5);
        let g = UniformGrid::new(128, 4.0).unwrap();
        let a = Approximant::new(0.05, c, &lp).unwrap();
        assert!(cone_check(&a.r_hat_profile(g), 1e-12).passes());
        assert!(cone_check(&a.v_hat_profile(g), 1e-12).passes());
    }

    #[test]
    fn delta_hat_scales_like_eps() {
        let (lp, c) = setup(2.0);
        for eps in [0.1, 0.05, 0.01] {
            let d = Approximant::new(eps, c, &lp).unwrap().delta_hat();
            assert!(d > 0.0 && (0.1..=10.0).contains(&(d / eps)), "{eps}: {d}");
        }
    }

    #[test]
    fn delta_hat_leading_coefficient() {
        let (lp, c) = setup(3.0);
        let (d1, _) = delta_coefficients(&c);
        let d = Approximant::new(0.01, c, &lp).unwrap().delta_hat();
        assert!((d / 0.01 / d1 - 1.0).abs() < 0.1, "{} vs {d1}", d / 0.01);
    }

    #[test]
    fn delta_hat_consistency_identity() {
        let (lp, c) = setup(3.0);
        for eps in [0.05f64, 0.02] {
            let d = Approximant::new(eps, c, &lp).unwrap().delta_hat();
            let lhs = (1.0 - d).powi(2);
            let rhs = (1.0 + eps * (c.kappa_bar - 1.0)) * (1.0 - eps * (1.0 + c.eta_bar / c.mu_bar));
            assert!((lhs - rhs).abs() <= 2.0 * eps.powi(3), "{eps}: {lhs} {rhs}");
        }
    }

    #[test]
    fn scaling_laws_expansions() {
        let (lp, c) = setup(2.5);
        let eps = 1e-4;
        let laws = scaling_laws(eps, &c);
        let a = Approximant::new(eps, c, &lp).unwrap();
        assert!((a.sigma_hat * eps.powf(2.5) / c.mu_bar.powi(2) - 1.0).abs() < 1e-3);
        assert!((laws.sigma * eps.powf(2.5) / c.mu_bar.powi(2) - 1.0).abs() < 1e-3);
        let dev = |e: f64| {
            let a = Approximant::new(e, c, &lp).unwrap();
            (a.mu_hat - scaling_laws(e, &c).mu).abs()
        };
        let order = (dev(0.02) / dev(0.01)).log2();
        assert!((order - 3.0).abs() < 0.1, "{order}");
        assert!(laws.delta.is_some());
        let (lp15, c15) = setup(1.5);
        let _ = lp15;
        assert!(scaling_laws(0.01, &c15).delta.is_none());
        let d = scaling_laws(0.01, &c).delta.unwrap();
        assert!((d - delta_of_eps(0.01, &c)).abs() < 1e-5);
    }

    #[test]
    fn decay_rate_root() {
        // bisection oracle for sinh(lambda / 2) = 5 lambda on [1, 20]
        let (mut lo, mut hi) = (1.0f64, 20.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (0.5 * mid).sinh() < 5.0 * mid { lo = mid } else { hi = mid }
        }
        let lam = decay_rate(100.0).unwrap();
        assert!((lam - lo).abs() < 1e-10, "{lam} {lo}");
        for sigma in [1.0001, 1.5, 100.0, 1e8, 1e300] {
            let l = decay_rate(sigma).unwrap();
            let y = l / 2.0;
            let res = (log_sinhc(y) - 0.5 * sigma.ln()).abs();
            assert!(res <= 1e-10, "sigma {sigma}: {res:e}");
        }
        assert!(decay_rate(1.0).is_err() && decay_rate(0.5).is_err());
        assert!(decay_rate(2.0).unwrap() < decay_rate(2.1).unwrap());
    }

    #[test]
    fn decay_rate_asymptotic_law() {
        // lambda = m |ln eps| + O(ln |ln eps|): the ratio creeps down to 1 and
        // the remainder stays within a bounded multiple of ln |ln eps|.
        let (lp, c) = setup(2.5);
        let mut last = f64::INFINITY;
        for eps in [1e-3, 1e-4, 1e-8, 1e-16, 1e-30] {
            let a = Approximant::new(eps, c, &lp).unwrap();
            let lam = decay_rate(a.sigma_hat).unwrap();
            let lead = 2.5 * eps.ln().abs();
            let ratio = lam / lead;
            assert!(ratio > 1.0 && ratio < last, "{eps}: {ratio}");
            assert!((lam - lead).abs() <= 3.0 * lead.ln(), "{eps}: {lam} {lead}");
            last = ratio;
        }
        assert!(last < 1.15);
    }

    #[test]
    fn table_layout() {
        let (lp, c) = setup(3.0);
        let row = scaling_row(0.05, &c, &lp).unwrap();
        let text = scaling_table_csv(&[row]);
        assert!(text.starts_with("eps,mu_hat,sigma_hat,delta_hat,lambda\n"));
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 5);
    }
}
