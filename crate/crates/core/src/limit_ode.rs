//! The high-energy limit problem
//!
//! ```text
//! S'' = (2 / (m + 1)) (1 + S)^(-(m + 1)),   S(0) = S'(0) = 0
//! ```
//!
//! integrated with classical RK4 on `[0, xmax]`, and the constants built from
//! its solution:
//!
//! ```text
//! mu_bar    = 2 / sqrt(m (m + 1))        (limit slope of S)
//! kappa_bar = int_0^inf x S''(x) dx
//! eta_bar   = int_0^inf S(x) S''(x) dx
//! c_minus1  = int_R (1 + S)^(-(m + 2)) dx
//! c_plus1   = (1/2) int_R x^2 (1 + S)^(-(m + 2)) dx
//! ```
//!
//! Integrals over `[0, xmax]` use the trapezoid rule with the Euler-Maclaurin
//! endpoint correction. The remainders over `[xmax, inf)` are evaluated in
//! closed form from the phase-plane relation `S' = mu_bar sqrt(1 - u^(-m))`,
//! `u = 1 + S`, expanded in powers of `u^(-m)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::fmt17;

pub const DEFAULT_XMAX: f64 = 200.0;
pub const DEFAULT_STEP: f64 = 1e-3;

/// `2 / sqrt(m (m + 1))`.
pub fn mu_bar(m: f64) -> f64 {
    2.0 / (m * (m + 1.0)).sqrt()
}

/// Conserved quantity `S'^2 / 2 + mu_bar^2 (1 + S)^(-m) / 2` of the limit ODE.
pub fn energy(m: f64, s: f64, sp: f64) -> f64 {
    let mb = mu_bar(m);
    0.5 * sp * sp + 0.5 * mb * mb * (-m * s.ln_1p()).exp()
}

#[inline]
fn rhs(m: f64, s: f64) -> f64 {
    2.0 / (m + 1.0) * (-(m + 1.0) * s.ln_1p()).exp()
}

/// Samples of `S`, `S'`, `S''` on `[0, xmax]` with uniform spacing.
#[derive(Debug, Clone)]
pub struct LimitProfile {
    m: f64,
    xmax: f64,
    step: f64,
    s: Vec<f64>,
    sp: Vec<f64>,
    spp: Vec<f64>,
}

/// Integrates the limit problem. The step is shrunk slightly, if necessary, so
/// that an even number of steps covers `[0, xmax]` exactly.
pub fn integrate_limit(m: f64, xmax: f64, step: f64) -> Result<LimitProfile> {
    if !(m.is_finite() && m > 1.0) {
        return Err(Error::Validation(format!("exponent m must be > 1, got {m}")));
    }
    if !(xmax.is_finite() && xmax >= 50.0) {
        return Err(Error::Validation(format!("ode.xmax must be at least 50, got {xmax}")));
    }
    if !(step > 0.0 && step <= 1e-3 * xmax) {
        return Err(Error::Validation(format!(
            "ode.step must lie in (0, 1e-3 xmax] = (0, {}], got {step}",
            1e-3 * xmax
        )));
    }
    let mut n = (xmax / step).ceil() as usize;
    n += n % 2;
    let h = xmax / n as f64;
    let mut s = Vec::with_capacity(n + 1);
    let mut sp = Vec::with_capacity(n + 1);
    let (mut y, mut p) = (0.0f64, 0.0f64);
    s.push(y);
    sp.push(p);
    for _ in 0..n {
        let k1y = p;
        let k1p = rhs(m, y);
        let k2y = p + 0.5 * h * k1p;
        let k2p = rhs(m, y + 0.5 * h * k1y);
        let k3y = p + 0.5 * h * k2p;
        let k3p = rhs(m, y + 0.5 * h * k2y);
        let k4y = p + h * k3p;
        let k4p = rhs(m, y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        s.push(y);
        sp.push(p);
    }
    let spp = s.iter().map(|&v| rhs(m, v)).collect();
    Ok(LimitProfile { m, xmax, step: h, s, sp, spp })
}

impl LimitProfile {
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn xmax(&self) -> f64 {
        self.xmax
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.s.len() {
            self.xmax
        } else {
            i as f64 * self.step
        }
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn sp(&self) -> &[f64] {
        &self.sp
    }

    pub fn spp(&self) -> &[f64] {
        &self.spp
    }

    pub fn mu_bar(&self) -> f64 {
        mu_bar(self.m)
    }

    /// Conserved quantity at node `i`.
    pub fn energy_at(&self, i: usize) -> f64 {
        energy(self.m, self.s[i], self.sp[i])
    }

    /// `max_i |E_i - mu_bar^2 / 2| / x_i`: energy drift per unit length.
    pub fn energy_drift_rate(&self) -> f64 {
        let e0 = 0.5 * self.mu_bar().powi(2);
        (1..self.len()).map(|i| (self.energy_at(i) - e0).abs() / self.x(i)).fold(0.0, f64::max)
    }

    /// `max_i |E_i - mu_bar^2 / 2|`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = 0.5 * self.mu_bar().powi(2);
        (0..self.len()).map(|i| (self.energy_at(i) - e0).abs()).fold(0.0, f64::max)
    }

    /// `K(x) = x S'(x) - S(x)` at every node; increases to `kappa_bar`.
    pub fn k_curve(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i) * self.sp[i] - self.s[i]).collect()
    }

    /// Offset `D` in `mu_bar x = u + D - g(u)` fitted at the last node.
    fn far_field_offset(&self, series: &TailSeries) -> f64 {
        let n = self.len() - 1;
        let u = 1.0 + self.s[n];
        self.mu_bar() * self.xmax - u + series.g(u)
    }

    /// `(S, S')` at `x >= 0` beyond the last node, from the far-field relation
    /// `mu_bar x = u + D - g(u)` solved for `u = 1 + S` by Newton's method.
    fn far_field(&self, x: f64) -> (f64, f64) {
        let n = self.len() - 1;
        let u_end = 1.0 + self.s[n];
        let series = TailSeries::new(self.m, u_end);
        let d = self.far_field_offset(&series);
        let mb = self.mu_bar();
        let target = mb * x;
        let mut u = u_end + mb * (x - self.xmax);
        for _ in 0..50 {
            let f = u + d - series.g(u) - target;
            // d/du (u - g(u)) = 1 / sqrt(1 - u^-m)
            let df = 1.0 / (-(-self.m * u.ln()).exp_m1()).sqrt();
            let du = f / df;
            u -= du;
            if du.abs() <= 1e-15 * u {
                break;
            }
        }
        let sp = mb * (-(-self.m * u.ln()).exp_m1()).sqrt();
        (u - 1.0, sp)
    }

    /// `S(x)` and `S'(x)` for any real `x` (S even, S' odd).
    ///
    /// Cubic Hermite interpolation between nodes; beyond `xmax` the far-field
    /// expansion continues the last node smoothly.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let ax = x.abs();
        let (s, sp) = if ax >= self.xmax {
            if ax == self.xmax {
                (self.s[self.len() - 1], self.sp[self.len() - 1])
            } else {
                self.far_field(ax)
            }
        } else {
            let t = ax / self.step;
            let i = (t.floor() as usize).min(self.len() - 2);
            let tau = t - i as f64;
            let h = self.step;
            (
                hermite(self.s[i], self.s[i + 1], self.sp[i], self.sp[i + 1], h, tau),
                hermite(self.sp[i], self.sp[i + 1], self.spp[i], self.spp[i + 1], h, tau),
            )
        };
        (s, if x < 0.0 { -sp } else { sp })
    }

    pub fn s_at(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn sp_at(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    /// `S''(x) = (2 / (m + 1)) (1 + S(x))^(-(m + 1))`.
    pub fn spp_at(&self, x: f64) -> f64 {
        rhs(self.m, self.s_at(x))
    }

    /// Integrator error proxy: `xmax * drift / mu_bar` bounds the error in `S(xmax)`
    /// implied by the observed energy drift.
    fn integration_error(&self) -> f64 {
        self.xmax * self.energy_drift() / self.mu_bar() + 64.0 * f64::EPSILON * self.s[self.len() - 1]
    }

    /// Samples as CSV: `x,S,Sp,Spp,energy` every `stride` nodes.
    pub fn to_csv(&self, stride: usize) -> String {
        let stride = stride.max(1);
        let mut out = String::from("x,S,Sp,Spp,energy\n");
        let mut idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        if *idx.last().unwrap() != self.len() - 1 {
            idx.push(self.len() - 1);
        }
        for i in idx {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(self.x(i)),
                fmt17(self.s[i]),
                fmt17(self.sp[i]),
                fmt17(self.spp[i]),
                fmt17(self.energy_at(i))
            );
        }
        out
    }
}

#[inline]
fn hermite(f0: f64, f1: f64, d0: f64, d1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * f0 + h * h10 * d0 + h01 * f1 + h * h11 * d1
}

/// Coefficients `a_k` of `(1 - z)^(-1/2) = sum a_k z^k`, truncated where
/// `a_k u^(-k m)` falls below `1e-20` at the given `u`.
#[derive(Debug, Clone)]
struct TailSeries {
    m: f64,
    a: Vec<f64>,
    /// Size of the first omitted term `a_K u^(-K m)` (relative to the leading one).
    omitted: f64,
}

impl TailSeries {
    fn new(m: f64, u: f64) -> Self {
        let z = u.powf(-m);
        let mut a = vec![1.0];
        let mut term = 1.0;
        let mut k = 0usize;
        loop {
            k += 1;
            let next = a[k - 1] * (2.0 * k as f64 - 1.0) / (2.0 * k as f64);
            term *= z * (2.0 * k as f64 - 1.0) / (2.0 * k as f64);
            if term < 1e-20 || k > 400 {
                return Self { m, a, omitted: term / (1.0 - z) };
            }
            a.push(next);
        }
    }

    /// `g(u) = sum_{k >= 1} a_k u^(1 - k m) / (k m - 1)`.
    fn g(&self, u: f64) -> f64 {
        let m = self.m;
        self.a.iter().enumerate().skip(1).map(|(k, a)| {
            let km = k as f64 * m;
            a * u.powf(1.0 - km) / (km - 1.0)
        }).sum()
    }

    /// `mu_bar / S'` as a power sum in `u`.
    fn inverse_slope(&self) -> PowerSum {
        PowerSum(
            self.a.iter().enumerate().map(|(k, &a)| (a, -(k as f64) * self.m)).collect(),
        )
    }
}

/// Finite sum `sum c_i u^(p_i)`.
#[derive(Debug, Clone, Default)]
struct PowerSum(Vec<(f64, f64)>);

impl PowerSum {
    fn monomial(c: f64, p: f64) -> Self {
        Self(vec![(c, p)])
    }

    fn times(&self, other: &PowerSum) -> Self {
        let mut out = Vec::with_capacity(self.0.len() * other.0.len());
        for &(c1, p1) in &self.0 {
            for &(c2, p2) in &other.0 {
                out.push((c1 * c2, p1 + p2));
            }
        }
        Self(out)
    }

    fn scaled(mut self, c: f64) -> Self {
        for t in &mut self.0 {
            t.0 *= c;
        }
        self
    }

    /// `int_u^inf sum c_i v^(p_i) dv`; every exponent must be below -1.
    fn tail_integral(&self, u: f64) -> f64 {
        let mut terms: Vec<f64> = self
            .0
            .iter()
            .map(|&(c, p)| {
                debug_assert!(p < -1.0, "divergent tail exponent {p}");
                -c * u.powf(p + 1.0) / (p + 1.0)
            })
            .collect();
        // add the small terms first
        terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        terms.iter().sum()
    }
}

/// Composite trapezoid with the Euler-Maclaurin end correction, plus an error
/// estimate from the same rule on every other node.
fn corrected_trapezoid(f: &[f64], h: f64, df0: f64, dfn: f64) -> (f64, f64) {
    let n = f.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let inner: f64 = f[1..n].iter().sum();
    let fine = h * (0.5 * (f[0] + f[n]) + inner) - h * h / 12.0 * (dfn - df0);
    let h2 = 2.0 * h;
    let inner2: f64 = f[2..n].iter().step_by(2).sum();
    let coarse = h2 * (0.5 * (f[0] + f[n]) + inner2) - h2 * h2 / 12.0 * (dfn - df0);
    (fine, (fine - coarse).abs() / 15.0 + 4.0 * f64::EPSILON * fine.abs() * (n as f64).sqrt())
}

/// Shared data for the tail corrections at `xmax`.
struct FarField {
    u: f64,
    d: f64,
    series: TailSeries,
}

impl FarField {
    fn of(lp: &LimitProfile) -> Self {
        let u = 1.0 + lp.s[lp.len() - 1];
        let series = TailSeries::new(lp.m, u);
        let d = lp.far_field_offset(&series);
        Self { u, d, series }
    }

    /// `mu_bar x(u) = u + D - g(u)` as a power sum.
    fn scaled_position(&self) -> PowerSum {
        let m = self.series.m;
        let mut terms = vec![(1.0, 1.0), (self.d, 0.0)];
        for (k, a) in self.series.a.iter().enumerate().skip(1) {
            let km = k as f64 * m;
            terms.push((-a / (km - 1.0), 1.0 - km));
        }
        PowerSum(terms)
    }

    /// `int_xmax^inf F(S(x)) dx` for `F(S) = weight(u)` given as a power sum:
    /// `dx = du / S'(u) = (1 / mu_bar) sum a_k u^(-k m) du`.
    fn tail(&self, weight: &PowerSum, mu_bar: f64) -> (f64, f64) {
        let integrand = weight.times(&self.series.inverse_slope());
        let value = integrand.tail_integral(self.u) / mu_bar;
        (value, value.abs() * self.series.omitted)
    }
}

/// `kappa_bar` with an error estimate.
///
/// Primary estimator: the boundary expression `K(xmax) = xmax S'(xmax) - S(xmax)`
/// plus its closed-form remainder `int_xmax^inf x S'' dx`.
pub fn kappa_bar(lp: &LimitProfile) -> (f64, f64) {
    let ff = FarField::of(lp);
    let n = lp.len() - 1;
    let k_end = lp.xmax * lp.sp[n] - lp.s[n];
    // remainder: xmax (mu_bar - S'(xmax)) + g(u)
    let remainder = lp.xmax * (lp.mu_bar() - lp.sp[n]) + ff.series.g(ff.u);
    let value = k_end + remainder;
    let err = remainder.abs() * ff.series.omitted + lp.integration_error();

    let (check, check_err) = kappa_bar_quadrature(lp);
    if (check - value).abs() > 2.0 * (err + check_err) {
        log::warn!(
            "kappa_bar estimators disagree for m = {}: boundary {value:.15e}, quadrature {check:.15e}",
            lp.m
        );
    }
    (value, err)
}

/// Cross-check of [`kappa_bar`] by quadrature of `x S''` plus the series remainder.
pub fn kappa_bar_quadrature(lp: &LimitProfile) -> (f64, f64) {
    let ff = FarField::of(lp);
    let m = lp.m;
    let n = lp.len() - 1;
    let f: Vec<f64> = (0..=n).map(|i| lp.x(i) * lp.spp[i]).collect();
    // (x S'')' = S'' + x S''' with S''' = -2 (1 + S)^(-(m + 2)) S'
    let d3 = |i: usize| -2.0 * (-(m + 2.0) * lp.s[i].ln_1p()).exp() * lp.sp[i];
    let (body, qerr) = corrected_trapezoid(&f, lp.step, lp.spp[0], lp.spp[n] + lp.xmax * d3(n));
    // x S'' = (x mu_bar) * (2 / (m + 1)) u^(-(m + 1)) / mu_bar
    let weight = ff.scaled_position().times(&PowerSum::monomial(2.0 / (m + 1.0), -(m + 1.0)));
    let (tail, terr) = ff.tail(&weight, lp.mu_bar());
    let tail = tail / lp.mu_bar();
    (body + tail, qerr + terr / lp.mu_bar() + lp.integration_error())
}

/// `eta_bar = int_0^inf S S'' dx` with an error estimate.
pub fn eta_bar(lp: &LimitProfile) -> (f64, f64) {
    let ff = FarField::of(lp);
    let m = lp.m;
    let n = lp.len() - 1;
    let f: Vec<f64> = (0..=n).map(|i| lp.s[i] * lp.spp[i]).collect();
    // (S S'')' = S' S'' + S S'''
    let df = |i: usize| {
        lp.sp[i] * lp.spp[i] - 2.0 * lp.s[i] * (-(m + 2.0) * lp.s[i].ln_1p()).exp() * lp.sp[i]
    };
    let (body, qerr) = corrected_trapezoid(&f, lp.step, df(0), df(n));
    // S S'' = (u - 1) (2 / (m + 1)) u^(-(m + 1))
    let c = 2.0 / (m + 1.0);
    let weight = PowerSum(vec![(c, -m), (-c, -(m + 1.0))]);
    let (tail, terr) = ff.tail(&weight, lp.mu_bar());
    (body + tail, qerr + terr + lp.integration_error() * lp.spp[n] * lp.xmax)
}

/// `(c_minus1, err, c_plus1, err)`.
pub fn weak_star_coeffs(lp: &LimitProfile) -> (f64, f64, f64, f64) {
    let ff = FarField::of(lp);
    let m = lp.m;
    let mb = lp.mu_bar();
    let n = lp.len() - 1;
    let w: Vec<f64> = lp.s.iter().map(|&s| (-(m + 2.0) * s.ln_1p()).exp()).collect();
    // w' = -(m + 2) u^(-(m + 3)) S'
    let dw = |i: usize| -(m + 2.0) * w[i] / (1.0 + lp.s[i]) * lp.sp[i];

    let (body_m, qerr_m) = corrected_trapezoid(&w, lp.step, dw(0), dw(n));
    let (tail_m, terr_m) = ff.tail(&PowerSum::monomial(1.0, -(m + 2.0)), mb);
    let c_minus1 = 2.0 * (body_m + tail_m);
    let err_m = 2.0 * (qerr_m + terr_m) + lp.integration_error() * (m + 2.0) * w[n];

    let f: Vec<f64> = (0..=n).map(|i| lp.x(i).powi(2) * w[i]).collect();
    let df = |i: usize| 2.0 * lp.x(i) * w[i] + lp.x(i).powi(2) * dw(i);
    let (body_p, qerr_p) = corrected_trapezoid(&f, lp.step, df(0), df(n));
    let pos = ff.scaled_position();
    let weight = pos.times(&pos).times(&PowerSum::monomial(1.0, -(m + 2.0))).scaled(1.0 / (mb * mb));
    let (tail_p, terr_p) = ff.tail(&weight, mb);
    let c_plus1 = body_p + tail_p;
    let err_p = qerr_p + terr_p + lp.integration_error() * lp.xmax * lp.xmax * (m + 2.0) * w[n];
    (c_minus1, err_m, c_plus1, err_p)
}

/// The constants of the limit problem with error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    pub m: f64,
    pub mu_bar: f64,
    pub kappa_bar: f64,
    pub kappa_err: f64,
    pub eta_bar: f64,
    pub eta_err: f64,
    pub c_minus1: f64,
    pub c_minus1_err: f64,
    pub c_plus1: f64,
    pub c_plus1_err: f64,
}

impl AsymptoticConstants {
    pub fn from_profile(lp: &LimitProfile) -> Self {
        let (kappa_bar, kappa_err) = kappa_bar(lp);
        let (eta_bar, eta_err) = eta_bar(lp);
        let (c_minus1, c_minus1_err, c_plus1, c_plus1_err) = weak_star_coeffs(lp);
        Self {
            m: lp.m,
            mu_bar: mu_bar(lp.m),
            kappa_bar,
            kappa_err,
            eta_bar,
            eta_err,
            c_minus1,
            c_minus1_err,
            c_plus1,
            c_plus1_err,
        }
    }

    /// Integrates at `step` and `2 step`; the difference (Richardson, fourth
    /// order) is added to each error estimate.
    pub fn compute(m: f64, xmax: f64, step: f64) -> Result<Self> {
        let fine = Self::from_profile(&integrate_limit(m, xmax, step)?);
        let coarse = Self::from_profile(&integrate_limit(m, xmax, 2.0 * step)?);
        let rich = |a: f64, b: f64| (a - b).abs() / 15.0;
        Ok(Self {
            kappa_err: fine.kappa_err + rich(fine.kappa_bar, coarse.kappa_bar),
            eta_err: fine.eta_err + rich(fine.eta_bar, coarse.eta_bar),
            c_minus1_err: fine.c_minus1_err + rich(fine.c_minus1, coarse.c_minus1),
            c_plus1_err: fine.c_plus1_err + rich(fine.c_plus1, coarse.c_plus1),
            ..fine
        })
    }

    pub const CSV_HEADER: &'static str =
        "m,mu_bar,kappa_bar,kappa_err,eta_bar,eta_err,c_minus1,c_minus1_err,c_plus1,c_plus1_err";

    pub fn csv_row(&self) -> String {
        [
            self.m,
            self.mu_bar,
            self.kappa_bar,
            self.kappa_err,
            self.eta_bar,
            self.eta_err,
            self.c_minus1,
            self.c_minus1_err,
            self.c_plus1,
            self.c_plus1_err,
        ]
        .iter()
        .map(|&v| fmt17(v))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// The constants table as CSV.
pub fn constants_csv(rows: &[AsymptoticConstants]) -> String {
    let mut s = String::from(AsymptoticConstants::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(m: f64) -> LimitProfile {
        integrate_limit(m, DEFAULT_XMAX, DEFAULT_STEP).unwrap()
    }

    #[test]
    fn validation() {
        assert!(integrate_limit(1.0, 200.0, 1e-3).is_err());
        assert!(integrate_limit(2.0, 20.0, 1e-3).is_err());
        assert!(integrate_limit(2.0, 200.0, 0.5).is_err());
        assert!(integrate_limit(2.0, 200.0, 0.0).is_err());
    }

    #[test]
    fn initial_values() {
        for m in [1.5, 2.0, 4.0] {
            let p = lp(m);
            assert_eq!(p.s()[0], 0.0);
            assert_eq!(p.sp()[0], 0.0);
            assert!((p.spp()[0] - 2.0 / (m + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn mu_bar_closed_form() {
        assert!((mu_bar(3.0) - 0.5773502691896258).abs() < 1e-16);
        assert!(mu_bar(4.0) < mu_bar(3.0) && mu_bar(3.0) < mu_bar(2.0));
        let p = lp(2.5);
        assert!(((2.0 * p.energy_at(0)).sqrt() - mu_bar(2.5)).abs() < 1e-12);
    }

    #[test]
    fn energy_is_conserved() {
        for m in [1.5, 2.0, 2.5, 3.0, 4.0] {
            assert!(lp(m).energy_drift_rate() <= 1e-10, "m = {m}");
        }
    }

    #[test]
    fn drift_is_fourth_order_at_coarse_steps() {
        let a = integrate_limit(2.5, 200.0, 0.1).unwrap().energy_drift();
        let b = integrate_limit(2.5, 200.0, 0.05).unwrap().energy_drift();
        assert!(a >= 8.0 * b, "{a:e} vs {b:e}");
    }

    #[test]
    fn profile_shape() {
        let p = lp(2.0);
        let mb = p.mu_bar();
        for i in 1..p.len() {
            assert!(p.s()[i] > p.s()[i - 1] && p.sp()[i] > p.sp()[i - 1]);
            assert!(p.sp()[i] < mb && p.spp()[i] > 0.0);
        }
        let k = p.k_curve();
        assert!(k.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn slope_approaches_mu_bar_algebraically() {
        for m in [2.0, 3.0] {
            let p = lp(m);
            let mb = p.mu_bar();
            let i10 = (10.0 / p.step()).round() as usize;
            let c = (mb - p.sp()[i10]) * 11f64.powf(m);
            for i in (i10..p.len()).step_by(1000) {
                assert!(mb - p.sp()[i] <= c / (1.0 + p.x(i)).powf(m) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn linear_growth_bracket() {
        let p = lp(2.5);
        let (kb, err) = kappa_bar(&p);
        let mb = p.mu_bar();
        for i in (20_000..p.len()).step_by(5000) {
            let x = p.x(i);
            assert!(p.s()[i] <= mb * x);
            assert!(p.s()[i] >= mb * x - kb - err);
        }
    }

    #[test]
    fn hermite_matches_nodes_and_far_field_is_continuous() {
        let p = lp(2.0);
        let i = 12345;
        let (s, sp) = p.eval(p.x(i));
        assert!((s - p.s()[i]).abs() < 1e-14 && (sp - p.sp()[i]).abs() < 1e-14);
        let (s_neg, sp_neg) = p.eval(-p.x(i));
        assert_eq!((s_neg, sp_neg), (s, -sp));
        let x = p.xmax();
        let (a, da) = p.eval(x);
        let (b, db) = p.eval(x * (1.0 + 1e-12));
        assert!((a - b).abs() < 1e-9 && (da - db).abs() < 1e-12);
        // far field obeys the conserved quantity
        let (s, sp) = p.eval(3.0 * x);
        assert!((energy(2.0, s, sp) - 0.5 * p.mu_bar().powi(2)).abs() < 1e-13);
        // far field agrees with a longer integration
        let long = integrate_limit(2.0, 400.0, 1e-3).unwrap();
        let n = long.len() - 1;
        assert!((p.s_at(400.0) - long.s()[n]).abs() < 1e-8);
    }

    #[test]
    fn kappa_closed_form_at_m2() {
        let (k, err) = kappa_bar(&lp(2.0));
        assert!((k - 1.0).abs() < 1e-9, "{k}");
        assert!(err < 1e-8);
    }

    #[test]
    fn kappa_estimators_agree() {
        let p = lp(2.0);
        let (a, ea) = kappa_bar(&p);
        let (b, eb) = kappa_bar_quadrature(&p);
        assert!((a - b).abs() <= 2.0 * (ea + eb), "{a} {b} {ea:e} {eb:e}");
    }

    #[test]
    fn eta_stable_under_domain_doubling() {
        let (a, ea) = eta_bar(&integrate_limit(2.0, 100.0, 1e-3).unwrap());
        let (b, eb) = eta_bar(&lp(2.0));
        assert!((a - b).abs() <= ea + eb + 1e-9);
        assert!(a > 0.0 && b > 0.0);
    }

    #[test]
    fn weak_star_coefficients_positive_and_stable() {
        let p = lp(4.0);
        let (cm, _, cp, _) = weak_star_coeffs(&p);
        assert!(cm > 0.0 && cp > 0.0);
        let half = integrate_limit(4.0, DEFAULT_XMAX, 0.5 * DEFAULT_STEP).unwrap();
        let (cm2, _, cp2, _) = weak_star_coeffs(&half);
        assert!((cp - cp2).abs() < 1e-6 && (cm - cm2).abs() < 1e-6);
        let (cm3, e3, _, _) = weak_star_coeffs(&integrate_limit(4.0, 100.0, 1e-3).unwrap());
        assert!((cm - cm3).abs() < 1e-9 + e3);
    }

    #[test]
    fn power_sum_tail() {
        // int_2^inf (3 v^-2 + v^-3) dv = 3/2 + 1/8
        let p = PowerSum(vec![(3.0, -2.0), (1.0, -3.0)]);
        assert!((p.tail_integral(2.0) - 1.625).abs() < 1e-15);
        let q = PowerSum(vec![(1.0, -1.5), (-1.0, -2.5)]).scaled(2.0);
        assert!((q.tail_integral(1.0) - 2.0 * (2.0 - 2.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn csv_layout() {
        let c = AsymptoticConstants::from_profile(&integrate_limit(3.0, 60.0, 0.01).unwrap());
        let text = constants_csv(&[c]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), AsymptoticConstants::CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 10);
        assert!(row.contains("5.7735026918962584e-1"));
    }
}
