//! Run configuration and the subcommands behind the `fpu-solitary` binary.
//!
//! Configuration is a flat `key = value` text (comments start with `#`, lists
//! are comma separated). Every output directory receives `config.txt` with the
//! fully resolved configuration, and all numbers are written with 17
//! significant digits so identical configurations give identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use crate::error::{Error, Result};
use crate::grid::{fmt17, UniformGrid};
use crate::limit_ode::{integrate_limit, AsymptoticConstants, DEFAULT_STEP, DEFAULT_XMAX};
use crate::verify::{
    gates, measure, rate_fit, run_sweep, weak_star_sweep, EntryMetrics, Gate, MSweep, SweepConfig,
    TestFunction,
};
use crate::wave::{read_wave_dir, residual_of, solve, write_wave_dir, SolitaryWave, SolverConfig};

/// Recognized configuration keys, in echo order.
pub const KEYS: [&str; 13] = [
    "m",
    "delta",
    "grid.k",
    "grid.L",
    "solver.tol",
    "solver.max_iter",
    "ode.xmax",
    "ode.step",
    "output.dir",
    "sweep.resolution",
    "sweep.extend",
    "expand.test",
    "verify.wave",
];

/// Flat run configuration. Unset lists fall back to per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: Option<Vec<f64>>,
    pub delta: Option<Vec<f64>>,
    pub grid_k: usize,
    pub grid_l: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub ode_xmax: f64,
    pub ode_step: f64,
    pub out: PathBuf,
    pub resolution: f64,
    pub extend: bool,
    pub test: String,
    pub wave: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m: None,
            delta: None,
            grid_k: 64,
            grid_l: 8.0,
            tol: SolverConfig::DEFAULT_TOL,
            max_iter: SolverConfig::DEFAULT_MAX_ITER,
            ode_xmax: DEFAULT_XMAX,
            ode_step: DEFAULT_STEP,
            out: PathBuf::from("out"),
            resolution: SweepConfig::DEFAULT_MIN_RESOLUTION,
            extend: true,
            test: "gaussian".into(),
            wave: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| invalid(format!("{key}: not a number: {v:?}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let out = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(invalid(format!("{key}: empty list")));
    }
    Ok(out)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim().parse::<usize>().map_err(|_| invalid(format!("{key}: not a nonnegative integer: {v:?}")))
}

fn list_text(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "m" => self.m = Some(parse_list(key, value)?),
            "delta" => self.delta = Some(parse_list(key, value)?),
            "grid.k" => self.grid_k = parse_usize(key, value)?,
            "grid.L" => self.grid_l = parse_f64(key, value)?,
            "solver.tol" => self.tol = parse_f64(key, value)?,
            "solver.max_iter" => self.max_iter = parse_usize(key, value)?,
            "ode.xmax" => self.ode_xmax = parse_f64(key, value)?,
            "ode.step" => self.ode_step = parse_f64(key, value)?,
            "output.dir" => self.out = PathBuf::from(value.trim()),
            "sweep.resolution" => self.resolution = parse_f64(key, value)?,
            "sweep.extend" => {
                self.extend = match value.trim() {
                    "true" => true,
                    "false" => false,
                    v => return Err(invalid(format!("sweep.extend must be true or false, got {v:?}"))),
                }
            }
            "expand.test" => self.test = value.trim().to_string(),
            "verify.wave" => self.wave = Some(PathBuf::from(value.trim())),
            _ => return Err(invalid(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` text.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("config line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(&fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    /// Checks every range before any computation.
    pub fn validate(&self) -> Result<()> {
        for &m in self.m.iter().flatten() {
            if !(m > 1.0 && m.is_finite()) {
                return Err(invalid(format!("m must exceed 1, got {m}")));
            }
        }
        for &d in self.delta.iter().flatten() {
            if !(d > 0.0 && d < 1.0) {
                return Err(invalid(format!("delta must lie in (0, 1), got {d}")));
            }
        }
        UniformGrid::new(self.grid_k, self.grid_l)?;
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid(format!("solver.tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(invalid("solver.max_iter must be positive"));
        }
        if !(self.ode_xmax >= 50.0 && self.ode_xmax.is_finite()) {
            return Err(invalid(format!("ode.xmax must be at least 50, got {}", self.ode_xmax)));
        }
        if !(self.ode_step > 0.0 && self.ode_step <= 1e-3 * self.ode_xmax) {
            return Err(invalid(format!("ode.step must lie in (0, xmax/1000], got {}", self.ode_step)));
        }
        if !(self.resolution > 2.0 && self.resolution.is_finite()) {
            return Err(invalid(format!("sweep.resolution must exceed 2, got {}", self.resolution)));
        }
        if TestFunction::by_name(&self.test).is_none() {
            return Err(invalid(format!("expand.test must be gaussian, odd_gaussian or one, got {:?}", self.test)));
        }
        Ok(())
    }

    /// The resolved configuration as `key = value` lines, in [`KEYS`] order.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let opt = |v: &Option<Vec<f64>>| v.as_deref().map(list_text).unwrap_or_else(|| "default".into());
        let vals = [
            opt(&self.m),
            opt(&self.delta),
            self.grid_k.to_string(),
            self.grid_l.to_string(),
            self.tol.to_string(),
            self.max_iter.to_string(),
            self.ode_xmax.to_string(),
            self.ode_step.to_string(),
            self.out.display().to_string(),
            self.resolution.to_string(),
            self.extend.to_string(),
            self.test.clone(),
            self.wave.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "none".into()),
        ];
        for (k, v) in KEYS.iter().zip(vals) {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    fn single(&self, v: &Option<Vec<f64>>, name: &str, default: f64) -> Result<f64> {
        match v.as_deref() {
            None => Ok(default),
            Some([x]) => Ok(*x),
            Some(_) => Err(invalid(format!("{name}: this command takes a single value"))),
        }
    }

    fn m_list(&self) -> Vec<f64> {
        self.m.clone().unwrap_or_else(|| SweepConfig::DEFAULT_M.to_vec())
    }

    fn solver_config(&self, m: f64, delta: f64) -> Result<SolverConfig> {
        SolverConfig::with_tolerances(m, delta, UniformGrid::new(self.grid_k, self.grid_l)?, self.tol, self.max_iter)
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            m_values: self.m_list(),
            deltas: self.delta.clone().unwrap_or_else(|| SweepConfig::DEFAULT_DELTAS.to_vec()),
            grid_k: self.grid_k,
            half_width: self.grid_l,
            tol: self.tol,
            max_iter: self.max_iter,
            ode_xmax: self.ode_xmax,
            ode_step: self.ode_step,
            min_resolution: self.resolution,
            extend_to_decade: self.extend,
        }
    }
}

fn prepare_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out)?;
    fs::write(cfg.out.join("config.txt"), cfg.echo())?;
    Ok(())
}

fn csv_line(vals: &[f64]) -> String {
    vals.iter().map(|&v| fmt17(v)).collect::<Vec<_>>().join(",")
}

/// Solves one wave and writes `V.csv`, `R.csv`, `meta.json`.
pub fn cmd_solve(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let m = cfg.single(&cfg.m, "m", 2.0)?;
    let delta = cfg.single(&cfg.delta, "delta", 0.1)?;
    let scfg = cfg.solver_config(m, delta)?;
    let w = solve(&scfg)?;
    prepare_out(cfg)?;
    write_wave_dir(&cfg.out, &w)?;
    Ok(format!(
        "delta={} eps={} sigma={} residual={} iterations={}",
        fmt17(w.delta),
        fmt17(w.eps),
        fmt17(w.sigma),
        fmt17(w.residual),
        w.iterations
    ))
}

/// Integrates the limit ODE per `m`; writes `limit_m<m>.csv` and `constants.csv`.
pub fn cmd_limit(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let m = cfg.single(&cfg.m, "m", 2.0)?;
    let lp = integrate_limit(m, cfg.ode_xmax, cfg.ode_step)?;
    let c = AsymptoticConstants::from_profile(&lp);
    prepare_out(cfg)?;
    let stride = (lp.len() / 4000).max(1);
    fs::write(cfg.out.join(format!("limit_m{m}.csv")), lp.to_csv(stride))?;
    let drift = lp.energy_drift_rate();
    fs::write(
        cfg.out.join("constants.csv"),
        format!("{},energy_drift\n{},{}\n", AsymptoticConstants::CSV_HEADER, c.csv_row(), fmt17(drift)),
    )?;
    Ok(format!(
        "m={} mu_bar={} kappa_bar={} eta_bar={} c_minus1={} c_plus1={} energy_drift={}",
        m, c.mu_bar, c.kappa_bar, c.eta_bar, c.c_minus1, c.c_plus1, drift
    ))
}

/// Tabulates the constants with error bars for every `m`.
pub fn cmd_constants(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let rows = cfg
        .m_list()
        .iter()
        .map(|&m| AsymptoticConstants::compute(m, cfg.ode_xmax, cfg.ode_step))
        .collect::<Result<Vec<_>>>()?;
    prepare_out(cfg)?;
    let text = crate::limit_ode::constants_csv(&rows);
    fs::write(cfg.out.join("constants.csv"), &text)?;
    Ok(text.trim_end().to_string())
}

/// Column names of `report.csv`.
pub const REPORT_HEADER: &str = "m,delta,status,k,eps,mu,sigma,p,iterations,residual,err_S,err_W,err_T,err_G,\
err_Spp,delta_hat,err_G_delta_hat,interp_proxy,s_asymmetry,tail_sup_V,tail_int_V,tail_sup_R,tail_int_R,tail_ratio,tail_C,lambda_emp,lambda_pred,\
lambda_resolvable,mu_over_eps,sigma_eps_m,sigma_tilde,mu_hat_gap,pointwise_a,pointwise_b,dist_chi,dist_tent";

fn report_row(m: f64, e: &EntryMetrics) -> String {
    let t = &e.tail;
    format!(
        "{},{},ok,{},{},{},{},{},{},{},{},{},{}",
        fmt17(m),
        fmt17(e.delta),
        e.k,
        csv_line(&[e.eps, e.mu, e.sigma, e.p]),
        e.iterations,
        csv_line(&[e.residual, e.err_s, e.err_w, e.err_t, e.err_g, e.err_spp, e.delta_hat, e.err_g_hat, e.interp_proxy, e.s_asymmetry]),
        csv_line(&[t.sup_v, t.int_v, t.sup_r, t.int_r, t.ratio / e.eps.powf(m), t.sup_v / e.eps.powf(m)]),
        csv_line(&[t.lambda_emp, t.lambda_pred]),
        t.resolvable,
        csv_line(&[e.mu_over_eps, e.sigma_eps_m, e.sigma_tilde, e.mu_hat_gap]),
        csv_line(&[e.pointwise_a, e.pointwise_b]),
        csv_line(&[e.dist_chi, e.dist_tent]),
    )
}

/// `report.csv`: one row per `(m, delta)`, failed entries flagged.
pub fn report_csv(sweeps: &[MSweep]) -> String {
    let mut s = String::from(REPORT_HEADER);
    s.push('\n');
    for ms in sweeps {
        for e in &ms.entries {
            match &e.outcome {
                Ok(mt) => s.push_str(&report_row(ms.m, mt)),
                Err(msg) => {
                    let _ = write!(s, "{},{},failed: {}", fmt17(ms.m), fmt17(e.delta), msg.replace(',', ";"));
                }
            }
            s.push('\n');
        }
    }
    s
}

/// `summary.csv`: one row per gate.
pub fn summary_csv(all: &[Gate]) -> String {
    let mut s = String::from("m,gate,value,lo,hi,status,detail\n");
    for g in all {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            fmt17(g.m),
            g.name,
            fmt17(g.value),
            fmt17(g.lo),
            fmt17(g.hi),
            g.status(),
            g.detail
        );
    }
    s
}

fn wave_cache_dir(root: &Path, m: f64, delta: f64, k: usize) -> PathBuf {
    root.join(format!("m{m}_d{delta}_k{k}"))
}

/// Writes `x,y` pairs for nodes in `[-2, 2]`, at most about 2000 of them.
fn plot_xy(w: &SolitaryWave, which: &str) -> String {
    let g = w.grid();
    let p = if which == "V" { &w.v } else { &w.r };
    let stride = (4 * g.k() / 2000).max(1);
    let (c, n) = (g.center(), 4 * g.k());
    let mut s = String::from("x,y\n");
    let mut i = c - n;
    while i <= c + n {
        let _ = writeln!(s, "{},{}", fmt17(g.x(i)), fmt17(p.values()[i]));
        i += stride;
    }
    s
}

/// Runs the `delta` sweep for every `m`.
///
/// Waves are cached under `<out>/waves` and reused when present, so a rerun
/// only repeats the verification. Writes `report.csv`, `summary.csv`,
/// `params_m<m>.csv` and `profiles/{V,R}_m<m>_d<delta>.csv`.
pub fn cmd_sweep(cfg: &RunConfig, threads: Option<usize>) -> Result<String> {
    cfg.validate()?;
    let scfg = cfg.sweep_config();
    scfg.validate()?;
    prepare_out(cfg)?;
    let cache = cfg.out.join("waves");
    fs::create_dir_all(&cache)?;
    let (tx, rx) = mpsc::channel::<SolitaryWave>();
    let writer_root = cache.clone();
    let writer = std::thread::spawn(move || -> Result<Vec<SolitaryWave>> {
        let mut finals = Vec::new();
        for w in rx {
            write_wave_dir(&wave_cache_dir(&writer_root, w.m, w.delta, w.grid().k()), &w)?;
            finals.push(w);
        }
        Ok(finals)
    });
    let tol = scfg.tol;
    let lookup = |m: f64, delta: f64, grid: UniformGrid, tol_req: f64| -> Option<SolitaryWave> {
        let dir = wave_cache_dir(&cache, m, delta, grid.k());
        let w = read_wave_dir(&dir).ok()?;
        (w.grid() == &grid && w.tol == tol_req && w.tol == tol).then_some(w)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let result = pool.install(|| run_sweep(&scfg, Some(&lookup), Some(tx)));
    writer.join().map_err(|_| invalid("wave writer thread panicked"))??;
    let sweeps = result?;

    fs::write(cfg.out.join("report.csv"), report_csv(&sweeps))?;
    let all_gates: Vec<Gate> = sweeps.iter().flat_map(gates).collect();
    fs::write(cfg.out.join("summary.csv"), summary_csv(&all_gates))?;
    let prof = cfg.out.join("profiles");
    fs::create_dir_all(&prof)?;
    for ms in &sweeps {
        let mut params = String::from("delta,p,eps,sigma_tilde\n");
        for e in ms.metrics() {
            let _ = writeln!(params, "{}", csv_line(&[e.delta, e.p, e.eps, e.sigma_tilde]));
            if let Some(w) = lookup(ms.m, e.delta, UniformGrid::new(e.k, scfg.half_width)?, tol) {
                for which in ["V", "R"] {
                    fs::write(prof.join(format!("{which}_m{}_d{}.csv", ms.m, e.delta)), plot_xy(&w, which))?;
                }
            }
        }
        fs::write(cfg.out.join(format!("params_m{}.csv", ms.m)), params)?;
    }
    let failed = sweeps.iter().flat_map(|s| &s.entries).filter(|e| e.outcome.is_err()).count();
    let passed = all_gates.iter().filter(|g| g.gated && g.pass).count();
    let gated = all_gates.iter().filter(|g| g.gated).count();
    let ok_entries = sweeps.iter().map(|s| s.metrics().len()).sum::<usize>();
    if ok_entries == 0 {
        return Err(Error::Degenerate("every sweep entry failed".into()));
    }
    Ok(format!(
        "entries={} failed={} gates_passed={}/{}",
        ok_entries + failed,
        failed,
        passed,
        gated
    ))
}

/// Verifies one wave (read from `verify.wave`, or solved) against the limit objects.
pub fn cmd_verify(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let w = match &cfg.wave {
        Some(dir) => read_wave_dir(dir)?,
        None => {
            let m = cfg.single(&cfg.m, "m", 2.0)?;
            let delta = cfg.single(&cfg.delta, "delta", 0.1)?;
            solve(&cfg.solver_config(m, delta)?)?
        }
    };
    let lp = integrate_limit(w.m, cfg.ode_xmax, cfg.ode_step)?;
    let consts = AsymptoticConstants::from_profile(&lp);
    let mt = measure(&w, &lp, &consts)?;
    let res = residual_of(&w);
    prepare_out(cfg)?;
    let mut text = format!("{},residual_integral,residual_dV,residual_dR\n", REPORT_HEADER);
    let _ = writeln!(
        text,
        "{},{}",
        report_row(w.m, &mt),
        csv_line(&[res.integral, res.differential_v, res.differential_r])
    );
    fs::write(cfg.out.join("verify.csv"), text)?;
    Ok(format!(
        "m={} delta={} eps={} err_S={} err_W={} err_T={} err_G={} tail_C={} residual_integral={} residual_differential={}",
        fmt17(w.m),
        fmt17(w.delta),
        fmt17(mt.eps),
        fmt17(mt.err_s),
        fmt17(mt.err_w),
        fmt17(mt.err_t),
        fmt17(mt.err_g),
        fmt17(mt.tail.sup_v / mt.eps.powf(w.m)),
        fmt17(res.integral),
        fmt17(res.differential_v.max(res.differential_r))
    ))
}

/// Weak-star expansion check along a `delta` sweep; writes `expand.csv`.
pub fn cmd_expand(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let m = cfg.single(&cfg.m, "m", 4.0)?;
    let mut deltas = cfg.delta.clone().unwrap_or_else(|| vec![0.28, 0.2, 0.141, 0.1, 0.071, 0.05, 0.035, 0.025]);
    deltas.sort_by(|a, b| b.total_cmp(a));
    deltas.dedup();
    let test = TestFunction::by_name(&cfg.test).expect("validated");
    let lp = integrate_limit(m, cfg.ode_xmax, cfg.ode_step)?;
    let consts = AsymptoticConstants::from_profile(&lp);
    let pts = weak_star_sweep(&cfg.sweep_config(), m, &deltas, &consts, &test)?;
    prepare_out(cfg)?;
    let mut text = String::from("delta,eps,mu,h,integral,prediction,remainder,leading\n");
    for p in &pts {
        let _ = writeln!(text, "{}", csv_line(&[p.delta, p.eps, p.mu, p.h, p.integral, p.prediction, p.remainder, p.leading]));
    }
    fs::write(cfg.out.join("expand.csv"), text)?;
    let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.mu, p.remainder.abs())).collect();
    let order = rate_fit(&pairs).map(|f| fmt17(f.slope)).unwrap_or_else(|e| format!("n/a ({e})"));
    Ok(format!("m={} test={} points={} remainder_order={}", fmt17(m), test.name, pts.len(), order))
}

/// Exit status for an error: 1 for numerical failures and I/O, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Domain(_) => 2,
        _ => 1,
    }
}

/// Machine-readable error line.
pub fn error_line(e: &Error) -> String {
    let kind = match e {
        Error::Validation(_) => "validation",
        Error::SingularityBreach { .. } => "singularity_breach",
        Error::ZeroDenominator => "zero_denominator",
        Error::NonConvergence { .. } => "non_convergence",
        Error::ConeViolation { .. } => "cone_violation",
        Error::Resolution { .. } => "resolution",
        Error::Degenerate(_) => "degenerate",
        Error::Domain(_) => "domain",
        Error::Format { .. } => "format",
        Error::Io(_) => "io",
    };
    format!("error kind={kind} exit={} message={:?}", exit_code(e), e.to_string())
}

/// Keys in `KEYS` set by explicit flags, applied over the file configuration.
pub fn merge(file: Option<&Path>, overrides: &BTreeMap<&str, String>) -> Result<RunConfig> {
    let mut cfg = match file {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_round_trip_and_rejections() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nm = 2.5\ndelta = 0.2, 0.1\ngrid.k = 32\n").unwrap();
        assert_eq!(c.m, Some(vec![2.5]));
        assert_eq!(c.delta, Some(vec![0.2, 0.1]));
        assert_eq!(c.grid_k, 32);
        let mut d = RunConfig::default();
        d.apply_text(&c.echo().replace("= default", "= 1.5").replace("verify.wave = none\n", "")).unwrap();
        assert_eq!(d.grid_k, 32);
        assert!(matches!(c.apply_text("bogus = 1"), Err(Error::Validation(_))));
        assert!(c.apply_text("m 2").is_err());
        assert!(c.apply_text("delta = ").is_err());
    }

    #[test]
    fn validation_ranges() {
        let mut c = RunConfig::default();
        c.set("m", "0.5").unwrap();
        assert!(c.validate().is_err());
        c.set("m", "2").unwrap();
        c.set("delta", "1.5").unwrap();
        assert!(c.validate().is_err());
        c.set("delta", "0.1").unwrap();
        assert!(c.validate().is_ok());
        c.set("ode.xmax", "10").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Validation("x".into())), 2);
        assert_eq!(exit_code(&Error::NonConvergence { iterations: 1, last_distance: 1.0 }), 1);
        assert!(error_line(&Error::ZeroDenominator).starts_with("error kind=zero_denominator exit=1"));
    }
}
