//! Solitary waves by fixed-point iteration of the improvement operator
//!
//! ```text
//! T(V) = (1 - delta) A Phi'(A V) / ||A Phi'(A V)||
//! ```
//!
//! A fixed point solves `R = A V`, `sigma V = A Phi'(R)` with
//! `sigma = ||A Phi'(R)|| / (1 - delta)` and `||V|| = 1 - delta`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::grid::{
    self, convolve_a, cone_check, energy_of_distance, fmt17, l2_distance, l2_norm, Profile,
    UniformGrid,
};
use crate::potential::{SingularPotential, SINGULARITY_GUARD};

/// Tolerance used for the cone test on every iterate.
pub const CONE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub pot: SingularPotential,
    pub delta: f64,
    pub grid: UniformGrid,
    pub tol: f64,
    pub max_iter: usize,
}

impl SolverConfig {
    pub const DEFAULT_TOL: f64 = 1e-10;
    pub const DEFAULT_MAX_ITER: usize = 20_000;

    pub fn new(m: f64, delta: f64, grid: UniformGrid) -> Result<Self> {
        Self::with_tolerances(m, delta, grid, Self::DEFAULT_TOL, Self::DEFAULT_MAX_ITER)
    }

    pub fn with_tolerances(
        m: f64,
        delta: f64,
        grid: UniformGrid,
        tol: f64,
        max_iter: usize,
    ) -> Result<Self> {
        let pot = SingularPotential::new(m)?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Validation(format!("delta must lie in (0, 1), got {delta}")));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Validation(format!("solver tolerance must be positive, got {tol}")));
        }
        if max_iter == 0 {
            return Err(Error::Validation("max_iter must be positive".into()));
        }
        Ok(Self { pot, delta, grid, tol, max_iter })
    }

    pub fn m(&self) -> f64 {
        self.pot.m()
    }
}

/// Per-iteration record of the fixed-point loop. Entry 0 describes the
/// initial iterate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationHistory {
    /// Potential energy `P(V_n)`.
    pub energy: Vec<f64>,
    /// `||V_n|| - (1 - delta)`.
    pub norm_defect: Vec<f64>,
    /// Worst cone violation of `V_n` (max of negativity, asymmetry, monotonicity).
    pub cone_violation: Vec<f64>,
    /// `||V_n - V_{n-1}||`; entry 0 is NaN.
    pub step: Vec<f64>,
}

impl IterationHistory {
    /// Largest energy decrease `P_n - P_{n+1}` (negative if strictly ascending).
    pub fn worst_descent(&self) -> f64 {
        self.energy.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest norm defect after the first step.
    pub fn worst_norm_defect(&self) -> f64 {
        self.norm_defect.iter().skip(1).fold(0.0, |m, d| m.max(d.abs()))
    }

    pub fn worst_cone_violation(&self) -> f64 {
        self.cone_violation.iter().copied().fold(0.0, f64::max)
    }
}

/// A converged solitary wave with its diagnostics.
#[derive(Debug, Clone)]
pub struct SolitaryWave {
    pub m: f64,
    pub v: Profile,
    pub r: Profile,
    pub sigma: f64,
    pub delta: f64,
    /// `1 - R(0)`.
    pub eps: f64,
    /// `sqrt(sigma eps^(m + 2))`.
    pub mu: f64,
    /// Potential energy `P(V)`.
    pub p: f64,
    /// `||sigma V - A Phi'(A V)||`.
    pub residual: f64,
    pub iterations: usize,
    pub tol: f64,
    pub history: IterationHistory,
}

impl SolitaryWave {
    pub fn grid(&self) -> &UniformGrid {
        self.v.grid()
    }

    pub fn h(&self) -> f64 {
        self.grid().h()
    }

    pub fn potential(&self) -> SingularPotential {
        SingularPotential::new(self.m).expect("wave exponent was validated")
    }

    /// `sigma (1 - delta)^2 - <Phi'(R), R>`, zero at an exact fixed point.
    pub fn virial_gap(&self) -> f64 {
        let pot = self.potential();
        let dr = self.r.map("dphiR", |x| pot.dphi_unchecked(x));
        let rhs = grid::inner(&dr, &self.r).expect("same grid");
        self.sigma * (1.0 - self.delta).powi(2) - rhs
    }

    /// `R(0) - <V, chi>`, zero in the continuum.
    pub fn inner_product_gap(&self) -> f64 {
        let chi = Profile::indicator(*self.grid());
        let c = self.grid().center();
        self.r.values()[c] - grid::inner(&self.v, &chi).expect("same grid")
    }

    /// `||V - chi||^2` and the exact identity `(1 - delta)^2 + ||chi||^2 - 2 (1 - eps)`
    /// that it equals when `R(0) = <V, chi>`.
    pub fn localization(&self) -> (f64, f64) {
        let chi = Profile::indicator(*self.grid());
        let d = l2_distance(&self.v, &chi).expect("same grid");
        let chi2 = l2_norm(&chi).powi(2);
        (d * d, (1.0 - self.delta).powi(2) + chi2 - 2.0 * (1.0 - self.eps))
    }
}

fn check_distance(r: &Profile) -> Result<()> {
    match r.values().iter().find(|&&x| !(x < 1.0 - SINGULARITY_GUARD)) {
        Some(&bad) => Err(Error::SingularityBreach { value: bad, guard: SINGULARITY_GUARD }),
        None => Ok(()),
    }
}

/// `A Phi'(R)` for a validated distance profile.
fn force(r: &Profile, pot: &SingularPotential) -> Profile {
    convolve_a(&r.map("dphiR", |x| pot.dphi_unchecked(x)))
}

fn step(v: &Profile, cfg: &SolverConfig) -> Result<Profile> {
    let r = convolve_a(v);
    check_distance(&r)?;
    let w = force(&r, &cfg.pot);
    let norm = l2_norm(&w);
    if !(norm > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(w.scaled((1.0 - cfg.delta) / norm).with_label("V"))
}

/// One application of the improvement operator.
pub fn improvement_step(v: &Profile, cfg: &SolverConfig) -> Result<Profile> {
    if v.grid() != &cfg.grid {
        return Err(Error::Validation("profile grid differs from the solver grid".into()));
    }
    step(v, cfg)
}

/// The initial iterate `(1 - delta) chi`.
pub fn initial_iterate(cfg: &SolverConfig) -> Profile {
    Profile::indicator(cfg.grid).scaled(1.0 - cfg.delta).with_label("V")
}

fn cone_violation(p: &Profile) -> f64 {
    let rep = cone_check(p, 0.0);
    (-rep.min_value).max(rep.max_asymmetry).max(rep.max_monotonicity_violation).max(0.0)
}

/// Iterates the improvement operator from `(1 - delta) chi`.
pub fn solve(cfg: &SolverConfig) -> Result<SolitaryWave> {
    iterate(cfg, initial_iterate(cfg))
}

/// Iterates from a given start, e.g. a wave at a nearby `delta` (continuation).
///
/// The start is resampled onto the solver grid if needed and rescaled to norm
/// `1 - delta`.
pub fn solve_from(cfg: &SolverConfig, start: &Profile) -> Result<SolitaryWave> {
    let start = if start.grid() == &cfg.grid { start.clone() } else { resample(start, cfg.grid) };
    let norm = l2_norm(&start);
    if !(norm > 0.0) {
        return Err(Error::Validation("continuation start is identically zero".into()));
    }
    iterate(cfg, start.scaled((1.0 - cfg.delta) / norm).with_label("V"))
}

fn iterate(cfg: &SolverConfig, mut v: Profile) -> Result<SolitaryWave> {
    let target = 1.0 - cfg.delta;
    let mut history = IterationHistory::default();
    let record = |h: &mut IterationHistory, v: &Profile, r: &Profile, d: f64| -> Result<()> {
        h.energy.push(energy_of_distance(r, &cfg.pot)?);
        h.norm_defect.push(l2_norm(v) - target);
        h.cone_violation.push(cone_violation(v));
        h.step.push(d);
        Ok(())
    };

    let r0 = convolve_a(&v);
    check_distance(&r0)?;
    record(&mut history, &v, &r0, f64::NAN)?;

    let mut last = f64::INFINITY;
    for it in 1..=cfg.max_iter {
        let next = step(&v, cfg)?;
        let d = l2_distance(&next, &v)?;
        v = next;
        let r = convolve_a(&v);
        check_distance(&r)?;
        record(&mut history, &v, &r, d)?;
        let bad = *history.cone_violation.last().unwrap();
        if bad > CONE_TOL {
            let rep = cone_check(&v, CONE_TOL);
            return Err(Error::ConeViolation {
                iteration: it,
                detail: format!(
                    "min {:e}, asymmetry {:e}, monotonicity {:e}",
                    rep.min_value, rep.max_asymmetry, rep.max_monotonicity_violation
                ),
            });
        }
        let descent = history.energy[it - 1] - history.energy[it];
        if descent > 1e-12 {
            log::debug!("energy decreased by {descent:e} at iteration {it}");
        }
        last = d;
        if d < cfg.tol {
            log::debug!("delta = {}: converged after {it} iterations", cfg.delta);
            return Ok(finish(cfg, v, r, it, history));
        }
    }
    Err(Error::NonConvergence { iterations: cfg.max_iter, last_distance: last })
}

fn finish(
    cfg: &SolverConfig,
    v: Profile,
    r: Profile,
    iterations: usize,
    history: IterationHistory,
) -> SolitaryWave {
    let m = cfg.m();
    let w = force(&r, &cfg.pot);
    let sigma = l2_norm(&w) / (1.0 - cfg.delta);
    let residual = l2_distance(&v.scaled(sigma), &w).expect("same grid");
    let eps = 1.0 - r.values()[cfg.grid.center()];
    let mu = (sigma * eps.powf(m + 2.0)).sqrt();
    let p = *history.energy.last().expect("history has the final iterate");
    SolitaryWave {
        m,
        v,
        r: r.with_label("R"),
        sigma,
        delta: cfg.delta,
        eps,
        mu,
        p,
        residual,
        iterations,
        tol: cfg.tol,
        history,
    }
}

/// Resamples a profile onto another grid by cubic interpolation.
pub fn resample(p: &Profile, grid: UniformGrid) -> Profile {
    let values = grid.nodes().map(|x| p.interpolate(x)).collect();
    Profile::new(grid, values, p.label().to_string()).expect("interpolated values are finite")
}

/// Residuals of both forms of the traveling-wave equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `||sigma V - A Phi'(A V)||`.
    pub integral: f64,
    /// Sup over interior nodes of `|sigma V'(x) - Phi'(R(x + 1/2)) + Phi'(R(x - 1/2))|`.
    pub differential_v: f64,
    /// Sup over interior nodes of `|R'(x) - V(x + 1/2) + V(x - 1/2)|`.
    pub differential_r: f64,
}

impl Residuals {
    pub fn sup(&self) -> f64 {
        self.integral.max(self.differential_v).max(self.differential_r)
    }
}

/// Recomputes the residuals of the integral and the differentiated form
/// (derivatives by fourth-order centered differences).
pub fn residual_of(w: &SolitaryWave) -> Residuals {
    let pot = w.potential();
    let r = convolve_a(&w.v);
    let force_profile = force(&r, &pot);
    let integral = l2_distance(&w.v.scaled(w.sigma), &force_profile).expect("same grid");

    let g = w.grid();
    let k = g.k();
    let dphi: Vec<f64> = r.values().iter().map(|&x| pot.dphi_unchecked(x)).collect();
    let (mut dv, mut dr) = (0.0f64, 0.0f64);
    for i in (k + 2)..(g.len() - k - 2) {
        let lhs_v = w.sigma * w.v.derivative(i);
        dv = dv.max((lhs_v - (dphi[i + k] - dphi[i - k])).abs());
        let lhs_r = r.derivative(i);
        dr = dr.max((lhs_r - (w.v.values()[i + k] - w.v.values()[i - k])).abs());
    }
    Residuals { integral, differential_v: dv, differential_r: dr }
}

/// Flat metadata stored next to the profiles of a wave.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct WaveMeta {
    pub m: f64,
    pub delta: f64,
    pub sigma: f64,
    pub eps: f64,
    pub mu: f64,
    pub p: f64,
    pub residual: f64,
    pub iterations: usize,
    pub h: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub tol: f64,
}

impl WaveMeta {
    pub fn of(w: &SolitaryWave) -> Self {
        Self {
            m: w.m,
            delta: w.delta,
            sigma: w.sigma,
            eps: w.eps,
            mu: w.mu,
            p: w.p,
            residual: w.residual,
            iterations: w.iterations,
            h: w.h(),
            half_width: w.grid().half_width(),
            tol: w.tol,
        }
    }

    /// JSON with every float at 17 significant digits, keys in fixed order.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        let fields = [
            ("m", self.m),
            ("delta", self.delta),
            ("sigma", self.sigma),
            ("eps", self.eps),
            ("mu", self.mu),
            ("p", self.p),
            ("residual", self.residual),
        ];
        for (key, val) in fields {
            let _ = writeln!(s, "  \"{key}\": {},", fmt17(val));
        }
        let _ = writeln!(s, "  \"iterations\": {},", self.iterations);
        let _ = writeln!(s, "  \"h\": {},", fmt17(self.h));
        let _ = writeln!(s, "  \"L\": {},", fmt17(self.half_width));
        let _ = writeln!(s, "  \"tol\": {}", fmt17(self.tol));
        s.push_str("}\n");
        s
    }
}

/// Writes `V.csv`, `R.csv` and `meta.json` into `dir` (created if missing).
pub fn write_wave_dir(dir: &Path, w: &SolitaryWave) -> Result<()> {
    fs::create_dir_all(dir)?;
    grid::write_profile_csv(&dir.join("V.csv"), &w.v, w.m, w.delta)?;
    grid::write_profile_csv(&dir.join("R.csv"), &w.r, w.m, w.delta)?;
    fs::write(dir.join("meta.json"), WaveMeta::of(w).to_json())?;
    Ok(())
}

/// Reads a wave written by [`write_wave_dir`]. The iteration history is not
/// stored and comes back empty.
pub fn read_wave_dir(dir: &Path) -> Result<SolitaryWave> {
    let meta_path = dir.join("meta.json");
    let text = fs::read_to_string(&meta_path)?;
    let meta: WaveMeta = serde_json::from_str(&text)
        .map_err(|e| Error::Format { path: meta_path.clone(), reason: e.to_string() })?;
    let (v, _) = grid::read_profile_csv(&dir.join("V.csv"))?;
    let (r, _) = grid::read_profile_csv(&dir.join("R.csv"))?;
    if v.grid() != r.grid() || (v.grid().h() - meta.h).abs() > 1e-15 {
        return Err(Error::Format { path: meta_path, reason: "grids of V, R and meta disagree".into() });
    }
    SingularPotential::new(meta.m)?;
    Ok(SolitaryWave {
        m: meta.m,
        v,
        r,
        sigma: meta.sigma,
        delta: meta.delta,
        eps: meta.eps,
        mu: meta.mu,
        p: meta.p,
        residual: meta.residual,
        iterations: meta.iterations,
        tol: meta.tol,
        history: IterationHistory::default(),
    })
}
