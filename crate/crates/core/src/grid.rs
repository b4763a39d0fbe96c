//! Uniform grids, sampled profiles and the averaging operator
//!
//! `(A V)(x) = integral of V over [x - 1/2, x + 1/2]`.
//!
//! The grid spacing is `h = 1 / (2k)`, so shifting by `1/2` maps nodes onto
//! nodes and the averaging window always starts and ends at a node. Values
//! outside the grid are zero (homogeneous Dirichlet truncation).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::potential::{SingularPotential, SINGULARITY_GUARD};

/// Symmetric uniform grid `x_j = j h`, `j = -N..=N`, `h = 1/(2k)`, `N = 2 k L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    k: usize,
    half_width: f64,
    n: usize,
}

impl UniformGrid {
    /// `k` points per half unit, half-width `half_width` (a positive multiple of 1/2).
    pub fn new(k: usize, half_width: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("grid.k must be positive".into()));
        }
        let twice = 2.0 * half_width;
        if !(half_width.is_finite() && half_width > 0.0) || twice.fract() != 0.0 {
            return Err(Error::Validation(format!(
                "grid.L must be a positive multiple of 1/2, got {half_width}"
            )));
        }
        if half_width < 2.0 {
            // the tail checks and the foot layer live on [-2, 2]
            return Err(Error::Validation(format!("grid.L must be at least 2, got {half_width}")));
        }
        let n = k * twice as usize;
        Ok(Self { k, half_width, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn h(&self) -> f64 {
        0.5 / self.k as f64
    }

    /// Number of nodes on the positive half axis (`N`).
    pub fn n_half(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the node `x = 0`.
    pub fn center(&self) -> usize {
        self.n
    }

    pub fn x(&self, idx: usize) -> f64 {
        (idx as f64 - self.n as f64) * self.h()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.x(i))
    }

    /// Index of the node at `x`, if `x` is (up to rounding) a node inside the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = x / self.h() + self.n as f64;
        let r = t.round();
        if (t - r).abs() > 1e-9 || r < 0.0 || r > (2 * self.n) as f64 {
            None
        } else {
            Some(r as usize)
        }
    }

    /// Same half-width with `factor` times as many points.
    pub fn refined(&self, factor: usize) -> Self {
        Self::new(self.k * factor, self.half_width).expect("refinement of a valid grid")
    }
}

/// Samples of a function on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: UniformGrid,
    values: Vec<f64>,
    label: String,
}

impl Profile {
    pub fn new(grid: UniformGrid, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Validation(format!(
                "profile has {} values but the grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite profile value {} at x = {}",
                values[i],
                grid.x(i)
            )));
        }
        Ok(Self { grid, values, label: label.into() })
    }

    pub(crate) fn from_vec_unchecked(grid: UniformGrid, values: Vec<f64>, label: &str) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, label: label.to_string() }
    }

    pub fn from_fn(grid: UniformGrid, label: &str, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values, label)
    }

    pub fn zeros(grid: UniformGrid, label: &str) -> Self {
        Self::from_vec_unchecked(grid, vec![0.0; grid.len()], label)
    }

    /// Indicator of `[-1/2, 1/2]` with the trapezoid convention: value 1 strictly
    /// inside, 1/2 at the two boundary nodes.
    pub fn indicator(grid: UniformGrid) -> Self {
        let c = grid.center();
        let k = grid.k();
        let mut values = vec![0.0; grid.len()];
        for v in &mut values[c - k + 1..c + k] {
            *v = 1.0;
        }
        values[c - k] = 0.5;
        values[c + k] = 0.5;
        Self::from_vec_unchecked(grid, values, "chi")
    }

    /// The tent map `max(0, 1 - |x|)`.
    pub fn tent(grid: UniformGrid) -> Self {
        let values = grid.nodes().map(|x| (1.0 - x.abs()).max(0.0)).collect();
        Self::from_vec_unchecked(grid, values, "tent")
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at node `x` (must be a grid node); zero outside the grid.
    pub fn at(&self, x: f64) -> f64 {
        match self.grid.index_of(x) {
            Some(i) => self.values[i],
            None if x.abs() > self.grid.half_width() => 0.0,
            None => self.interpolate(x),
        }
    }

    #[inline]
    fn get(&self, idx: isize) -> f64 {
        if idx < 0 || idx as usize >= self.values.len() {
            0.0
        } else {
            self.values[idx as usize]
        }
    }

    /// Four-point cubic Lagrange interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let h = self.grid.h();
        let t = x / h + self.grid.n_half() as f64;
        if t < -1.0 || t > self.values.len() as f64 {
            return 0.0;
        }
        let i = t.floor() as isize;
        let s = t - i as f64;
        if s == 0.0 {
            return self.get(i);
        }
        let (f0, f1, f2, f3) = (self.get(i - 1), self.get(i), self.get(i + 1), self.get(i + 2));
        let w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
        w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3
    }

    /// Fourth-order centered difference at node `idx`.
    pub fn derivative(&self, idx: usize) -> f64 {
        let i = idx as isize;
        (-self.get(i + 2) + 8.0 * self.get(i + 1) - 8.0 * self.get(i - 1) + self.get(i - 2))
            / (12.0 * self.grid.h())
    }

    pub fn map(&self, label: &str, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec_unchecked(self.grid, self.values.iter().map(|&v| f(v)).collect(), label)
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(&self.label, |v| c * v)
    }

    /// `self - other` on a shared grid.
    pub fn sub(&self, other: &Profile) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self::from_vec_unchecked(self.grid, values, &self.label))
    }

    fn same_grid(&self, other: &Profile) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Validation("profiles live on different grids".into()));
        }
        Ok(())
    }
}

/// Running sum with Neumaier compensation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn compensated_sum(it: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in it {
        acc.add(v);
    }
    acc.value()
}

/// Compensated prefix sums `P[t] = v[0] + ... + v[t-1]`.
struct PrefixSums {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl PrefixSums {
    fn new(values: impl Iterator<Item = f64>, len: usize) -> Self {
        let mut hi = Vec::with_capacity(len + 1);
        let mut lo = Vec::with_capacity(len + 1);
        let mut acc = CompensatedSum::default();
        hi.push(0.0);
        lo.push(0.0);
        for v in values {
            acc.add(v);
            hi.push(acc.sum);
            lo.push(acc.comp);
        }
        Self { hi, lo }
    }

    /// Sum over the half-open index range `[a, b)`, clamped to the data.
    #[inline]
    fn range(&self, a: isize, b: isize) -> f64 {
        let last = (self.hi.len() - 1) as isize;
        let a = a.clamp(0, last) as usize;
        let b = b.clamp(0, last) as usize;
        (self.hi[b] - self.hi[a]) + (self.lo[b] - self.lo[a])
    }
}

/// Applies the averaging operator `A` with the trapezoid rule over the `2k + 1`
/// window nodes.
///
/// Left-half outputs use prefix sums accumulated from the left end and
/// right-half outputs use suffix sums accumulated from the right end, so both
/// tails keep full relative accuracy and a mirror-symmetric input produces a
/// bitwise mirror-symmetric output.
pub fn convolve_a(p: &Profile) -> Profile {
    let grid = *p.grid();
    let v = p.values();
    let len = v.len();
    let k = grid.k() as isize;
    let h = grid.h();
    let c = grid.center();
    let get = |i: isize| if i < 0 || i as usize >= len { 0.0 } else { v[i as usize] };

    let left = PrefixSums::new(v.iter().copied(), len);
    let right = PrefixSums::new(v.iter().rev().copied(), len);
    let mut out = vec![0.0; len];
    for (i, o) in out.iter_mut().enumerate() {
        let ii = i as isize;
        let (lo_idx, hi_idx) = (ii - k, ii + k);
        let full = if i <= c {
            left.range(lo_idx, hi_idx + 1)
        } else {
            // reversed index r = len - 1 - i
            let r = len as isize - 1 - ii;
            right.range(r - k, r + k + 1)
        };
        // addition commutes exactly, so this stays mirror-symmetric
        let ends = 0.5 * get(lo_idx) + 0.5 * get(hi_idx);
        *o = h * (full - ends);
    }
    Profile::from_vec_unchecked(grid, out, p.label())
}

/// Discrete inner product `h * sum p_j q_j`.
pub fn inner(p: &Profile, q: &Profile) -> Result<f64> {
    p.same_grid(q)?;
    Ok(p.grid.h() * compensated_sum(p.values.iter().zip(&q.values).map(|(a, b)| a * b)))
}

/// `sqrt(h * sum p_j^2)`.
pub fn l2_norm(p: &Profile) -> f64 {
    (p.grid.h() * compensated_sum(p.values.iter().map(|v| v * v))).sqrt()
}

pub fn sup_norm(p: &Profile) -> f64 {
    p.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// L2 distance between two profiles on the same grid.
pub fn l2_distance(p: &Profile, q: &Profile) -> Result<f64> {
    p.same_grid(q)?;
    let s = compensated_sum(p.values.iter().zip(&q.values).map(|(a, b)| (a - b) * (a - b)));
    Ok((p.grid.h() * s).sqrt())
}

/// `h * sum Phi(R_j)` for a distance profile `R`.
pub fn energy_of_distance(r: &Profile, pot: &SingularPotential) -> Result<f64> {
    let mut acc = CompensatedSum::default();
    for &x in r.values() {
        acc.add(pot.phi(x)?);
    }
    Ok(r.grid().h() * acc.value())
}

/// Discrete potential energy `P(V) = h * sum Phi((A V)_j)`.
pub fn potential_energy(v: &Profile, pot: &SingularPotential) -> Result<f64> {
    let r = convolve_a(v);
    if let Some(&bad) = r.values().iter().find(|&&x| x >= 1.0 - SINGULARITY_GUARD) {
        return Err(Error::SingularityBreach { value: bad, guard: SINGULARITY_GUARD });
    }
    energy_of_distance(&r, pot)
}

/// Result of [`cone_check`]: nonnegativity, evenness and unimodality with the
/// worst violations found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeReport {
    pub nonnegative: bool,
    pub even: bool,
    pub unimodal: bool,
    pub min_value: f64,
    pub max_asymmetry: f64,
    pub max_monotonicity_violation: f64,
}

impl ConeReport {
    pub fn passes(&self) -> bool {
        self.nonnegative && self.even && self.unimodal
    }
}

/// Tests membership in the cone of even, unimodal, nonnegative profiles.
pub fn cone_check(p: &Profile, tol: f64) -> ConeReport {
    let v = p.values();
    let c = p.grid.center();
    let min_value = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max_asymmetry = (1..=c).map(|j| (v[c + j] - v[c - j]).abs()).fold(0.0, f64::max);
    // nonincreasing for x >= 0, nondecreasing for x <= 0
    let right = (c..v.len() - 1).map(|i| v[i + 1] - v[i]);
    let left = (1..=c).map(|i| v[i - 1] - v[i]);
    let max_monotonicity_violation = right.chain(left).fold(0.0, f64::max);
    ConeReport {
        nonnegative: min_value >= -tol,
        even: max_asymmetry <= tol,
        unimodal: max_monotonicity_violation <= tol,
        min_value,
        max_asymmetry,
        max_monotonicity_violation,
    }
}

/// Metadata carried in the header line of a profile CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileHeader {
    pub label: String,
    pub m: f64,
    pub delta: f64,
    pub h: f64,
    pub half_width: f64,
}

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes a profile as `x,value` rows below a `# label=..,m=..,delta=..,h=..,L=..` line.
pub fn profile_to_csv(p: &Profile, m: f64, delta: f64) -> String {
    let g = p.grid();
    let mut s = String::with_capacity(48 * g.len());
    let _ = writeln!(
        s,
        "# label={},m={},delta={},h={},L={}",
        p.label(),
        fmt17(m),
        fmt17(delta),
        fmt17(g.h()),
        fmt17(g.half_width())
    );
    for (x, v) in g.nodes().zip(p.values()) {
        let _ = writeln!(s, "{},{}", fmt17(x), fmt17(*v));
    }
    s
}

pub fn write_profile_csv(path: &Path, p: &Profile, m: f64, delta: f64) -> Result<()> {
    fs::write(path, profile_to_csv(p, m, delta))?;
    Ok(())
}

pub fn read_profile_csv(path: &Path) -> Result<(Profile, ProfileHeader)> {
    let text = fs::read_to_string(path)?;
    parse_profile_csv(&text).map_err(|reason| Error::Format { path: path.to_path_buf(), reason })
}

pub fn parse_profile_csv(text: &str) -> std::result::Result<(Profile, ProfileHeader), String> {
    let mut lines = text.lines();
    let head = lines.next().ok_or("empty file")?;
    let head = head.strip_prefix("# ").ok_or("missing '# ' header line")?;
    let mut label = None;
    let (mut m, mut delta, mut h, mut half_width) = (None, None, None, None);
    for field in head.split(',') {
        let (key, val) = field.split_once('=').ok_or_else(|| format!("bad header field {field:?}"))?;
        let num = || val.parse::<f64>().map_err(|e| format!("{key}: {e}"));
        match key {
            "label" => label = Some(val.to_string()),
            "m" => m = Some(num()?),
            "delta" => delta = Some(num()?),
            "h" => h = Some(num()?),
            "L" => half_width = Some(num()?),
            other => return Err(format!("unknown header key {other:?}")),
        }
    }
    let header = ProfileHeader {
        label: label.ok_or("header lacks label")?,
        m: m.ok_or("header lacks m")?,
        delta: delta.ok_or("header lacks delta")?,
        h: h.ok_or("header lacks h")?,
        half_width: half_width.ok_or("header lacks L")?,
    };
    let k = (0.5 / header.h).round() as usize;
    let grid = UniformGrid::new(k, header.half_width).map_err(|e| e.to_string())?;
    let mut values = Vec::with_capacity(grid.len());
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (_, v) = line.split_once(',').ok_or_else(|| format!("line {}: expected x,value", n + 2))?;
        values.push(v.trim().parse::<f64>().map_err(|e| format!("line {}: {e}", n + 2))?);
    }
    let profile = Profile::new(grid, values, header.label.clone()).map_err(|e| e.to_string())?;
    Ok((profile, header))
}
