//! Independent reference values for the limit-problem constants.
//!
//! Adaptive Gauss-Kronrod (7/15) quadrature of phase-plane integrals: along the
//! orbit `dx = dS / S'(S)` with `S'(S) = mu_bar sqrt(1 - (1 + S)^(-m))`, so no
//! ODE is integrated. The half-line in `S` is mapped to `(0, 1)` by
//! `S = (t / (1 - t))^2`, which also removes the `S^(-1/2)` endpoint singularity.

#![allow(dead_code)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let pair = f(c - r * XGK[j]) + f(c + r * XGK[j]);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (r * kron, (r * (kron - gauss)).abs())
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, whole: (f64, f64), depth: u32) -> f64 {
        let (val, err) = whole;
        if err <= tol || depth > 60 {
            return val;
        }
        let mid = 0.5 * (a + b);
        let left = gk15(f, a, mid);
        let right = gk15(f, mid, b);
        rec(f, a, mid, 0.5 * tol, left, depth + 1) + rec(f, mid, b, 0.5 * tol, right, depth + 1)
    }
    rec(f, a, b, tol, gk15(f, a, b), 0)
}

pub struct Oracle {
    pub m: f64,
    pub mu_bar: f64,
    tol: f64,
}

impl Oracle {
    pub fn new(m: f64) -> Self {
        Self { m, mu_bar: 2.0 / (m * (m + 1.0)).sqrt(), tol: 1e-13 }
    }

    /// `1 - (1 + S)^(-m)` without cancellation.
    fn gap(&self, s: f64) -> f64 {
        -(-self.m * s.ln_1p()).exp_m1()
    }

    fn slope(&self, s: f64) -> f64 {
        self.mu_bar * self.gap(s).sqrt()
    }

    /// `int_0^inf F(S) dS` through `S = (t / (1 - t))^2`.
    fn half_line(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let g = |t: f64| {
            let q = t / (1.0 - t);
            let s = q * q;
            let jac = 2.0 * t / (1.0 - t).powi(3);
            let v = f(s) * jac;
            if v.is_finite() { v } else { 0.0 }
        };
        integrate(&g, 0.0, 1.0, self.tol)
    }

    /// `int_0^inf (1 / sqrt(1 - u^(-m)) - 1) dS`, `u = 1 + S`.
    pub fn kappa_bar(&self) -> f64 {
        self.half_line(&|s| {
            let z = (-self.m * s.ln_1p()).exp();
            let w = self.gap(s).sqrt();
            z / (w * (1.0 + w))
        })
    }

    pub fn eta_bar(&self) -> f64 {
        let m = self.m;
        self.half_line(&|s| s * 2.0 / (m + 1.0) * (-(m + 1.0) * s.ln_1p()).exp() / self.slope(s))
    }

    pub fn c_minus1(&self) -> f64 {
        let m = self.m;
        2.0 * self.half_line(&|s| (-(m + 2.0) * s.ln_1p()).exp() / self.slope(s))
    }

    /// Position `x(S) = int_0^S ds / S'(s)`, through `s = tau^2`.
    pub fn position(&self, s: f64) -> f64 {
        let g = |tau: f64| {
            if tau == 0.0 {
                2.0 / (self.mu_bar * self.m.sqrt())
            } else {
                2.0 * tau / self.slope(tau * tau)
            }
        };
        integrate(&g, 0.0, s.sqrt(), 1e-14 * (1.0 + s.sqrt()))
    }

    pub fn c_plus1(&self) -> f64 {
        let m = self.m;
        self.half_line(&|s| {
            let w = (-(m + 2.0) * s.ln_1p()).exp();
            if w == 0.0 {
                return 0.0;
            }
            self.position(s).powi(2) * w / self.slope(s)
        })
    }
}
