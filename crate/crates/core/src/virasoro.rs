//! Discrete Fourier modes of the `B` coordinates and the large-`N`
//! comparison of the lattice brackets with the `(t1, t2, N)`-Virasoro bracket.
//!
//! Near the flat point `B ≡ 4` the brackets are dominated by terms that
//! cancel in the residual, so sampled points are carried as `4 + δ_k` and
//! the constant part of every sum is done in closed form.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::poisson::{PoissonStructure, StructureTag};
use crate::ring::VarRef;

/// Residuals at or below this are treated as exactly zero.
pub const RESIDUAL_FLOOR: f64 = 1e-12;
/// Largest admissible `residual(2N) / residual(N)`.
pub const MAX_STEP_RATIO: f64 = 0.3;
/// Largest admissible log-log slope.
pub const MAX_SLOPE: f64 = -2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VirasoroError {
    #[error("B[{0}] vanishes")]
    Pole(usize),
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("grid must be strictly increasing and start at N >= 4")]
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ModeTag {
    C2N,
    S2,
}

impl ModeTag {
    /// `N/(8πi)` for `V` modes, `N/(16πi)` for `W` modes.
    pub fn scale(self, n: usize) -> Complex64 {
        let d = match self {
            ModeTag::C2N => 8.0,
            ModeTag::S2 => 16.0,
        };
        Complex64::new(0.0, -(n as f64) / (d * PI))
    }

    pub fn structure(self) -> StructureTag {
        match self {
            ModeTag::C2N => StructureTag::C2N,
            ModeTag::S2 => StructureTag::S2,
        }
    }
}

impl fmt::Display for ModeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.structure().name())
    }
}

impl FromStr for ModeTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.parse::<StructureTag>()? {
            StructureTag::C2N => Ok(ModeTag::C2N),
            StructureTag::S2 => Ok(ModeTag::S2),
            other => Err(format!("no mode asymptotics for {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VirasoroParams {
    #[serde(serialize_with = "complex_pair")]
    pub t1: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub t2: Complex64,
    #[serde(rename = "N")]
    pub n: usize,
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Which central terms the residual is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralTerms {
    /// `(8π²/N, 8N)` for `C2N`, `(8π²/(3N), 4 − 8N)` for `S2`.
    Stated,
    /// Leading order of the exact brackets at `B ≡ 4`:
    /// `(−iπ, iN²/π)` for `C2N`, `(iπ/6, iN²/(4π))` for `S2`.
    LeadingOrder,
}

impl VirasoroParams {
    pub fn new(t1: Complex64, t2: Complex64, n: usize) -> Self {
        VirasoroParams { t1, t2, n }
    }

    pub fn central(tag: ModeTag, terms: CentralTerms, n: usize) -> Self {
        let nf = n as f64;
        let (t1, t2) = match (tag, terms) {
            (ModeTag::C2N, CentralTerms::Stated) => (Complex64::from(8.0 * PI * PI / nf), Complex64::from(8.0 * nf)),
            (ModeTag::S2, CentralTerms::Stated) => {
                (Complex64::from(8.0 * PI * PI / (3.0 * nf)), Complex64::from(4.0 - 8.0 * nf))
            }
            (ModeTag::C2N, CentralTerms::LeadingOrder) => (Complex64::new(0.0, -PI), Complex64::new(0.0, nf * nf / PI)),
            (ModeTag::S2, CentralTerms::LeadingOrder) => {
                (Complex64::new(0.0, PI / 6.0), Complex64::new(0.0, nf * nf / (4.0 * PI)))
            }
        };
        VirasoroParams { t1, t2, n }
    }

    /// Negative control: `t2 + 1`.
    pub fn with_t2_shift(self, shift: f64) -> Self {
        VirasoroParams { t2: self.t2 + shift, ..self }
    }
}

/// `[−⌊(N−1)/2⌋, ⌊N/2⌋]`.
pub fn mode_range(n: usize) -> (i64, i64) {
    (-((n as i64 - 1) / 2), n as i64 / 2)
}

/// Representative of `m mod N` in [`mode_range`].
pub fn wrap_mode(m: i64, n: usize) -> i64 {
    let (_, hi) = mode_range(n);
    let r = m.rem_euclid(n as i64);
    if r > hi {
        r - n as i64
    } else {
        r
    }
}

/// `e^{−2πi m k / N}` with the phase reduced mod `N` first.
fn phase(m: i64, k: i64, n: usize) -> Complex64 {
    let r = (m as i128 * k as i128).rem_euclid(n as i128) as f64;
    Complex64::from_polar(1.0, -2.0 * PI * r / n as f64)
}

/// `e^{−2πi a/N} − e^{−2πi b/N} = −2i sin(π(a−b)/N) e^{−πi(a+b)/N}`.
fn phase_diff(a: i64, b: i64, n: usize) -> Complex64 {
    let nf = n as f64;
    let s = (PI * (a - b) as f64 / nf).sin();
    Complex64::new(0.0, -2.0 * s) * Complex64::from_polar(1.0, -PI * (a + b) as f64 / nf)
}

/// `F_p B = Σ_k B_k e^{−2πipk/N}`.
pub fn dft_mode(b: &[f64], p: i64) -> Complex64 {
    dft_split(0.0, b, p)
}

/// `F_p` of `B_k = b0 + δ_k`.
fn dft_split(b0: f64, delta: &[f64], p: i64) -> Complex64 {
    let n = delta.len();
    let fluct: Complex64 = delta.iter().enumerate().map(|(i, d)| phase(p, i as i64 + 1, n) * *d).sum();
    let constant = if p.rem_euclid(n as i64) == 0 { b0 * n as f64 } else { 0.0 };
    fluct + constant
}

/// `{F_p, F_q}` at `B_k = b0 + δ_k` from the explicit mode sums.
fn bracket_split(tag: ModeTag, b0: f64, delta: &[f64], p: i64, q: i64) -> Result<Complex64, VirasoroError> {
    let n = delta.len();
    let d = |k: usize| delta[k % n];
    let s0 = if (p + q).rem_euclid(n as i64) == 0 { n as f64 } else { 0.0 };
    // Σ_k (e_p(k) e_q(k+s) − e_p(k+s) e_q(k)) X_k = α_s Σ_k e_{p+q}(k) X_k
    let alpha1 = phase_diff(q, p, n);
    let mut sum1 = Complex64::new(0.0, 0.0);
    let mut sum2 = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let e = phase(p + q, i as i64 + 1, n);
        let (d0, d1, d2) = (d(i), d(i + 1), d(i + 2));
        match tag {
            ModeTag::C2N => {
                sum1 += e * ((b0 - 1.0) * (d0 + d1) + d0 * d1);
                let den = b0 + d1;
                if den == 0.0 {
                    return Err(VirasoroError::Pole((i + 1) % n + 1));
                }
                sum2 += e * ((b0 * d0 + b0 * d2 + d0 * d2 - b0 * d1) / den);
            }
            ModeTag::S2 => sum1 += e * (b0 * (d0 + d1) + d0 * d1),
        }
    }
    Ok(match tag {
        ModeTag::C2N => {
            let alpha2 = phase_diff(2 * q, 2 * p, n);
            alpha1 * (sum1 + (b0 * b0 - 2.0 * b0) * s0) - alpha2 * (sum2 + b0 * s0)
        }
        ModeTag::S2 => alpha1 * (sum1 + b0 * b0 * s0),
    })
}

/// `{F_p, F_q}` from the explicit mode sums, times `scale²`.
pub fn mode_bracket(tag: ModeTag, b: &[f64], p: i64, q: i64, scale: Complex64) -> Result<Complex64, VirasoroError> {
    Ok(bracket_split(tag, 0.0, b, p, q)? * scale * scale)
}

/// `Σ_{k,l} e_p(k) e_q(l) π_{kl}(B)` from the generic bivector table, times
/// `scale²`.
pub fn mode_bracket_generic(
    s: &PoissonStructure,
    b: &[f64],
    p: i64,
    q: i64,
    scale: Complex64,
) -> Result<Complex64, VirasoroError> {
    let n = s.period();
    let values: HashMap<VarRef, f64> = (0..n).map(|i| (VarRef::named("B", i as i64 + 1), b[i])).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (x, y, pi) in s.entries() {
        let v = pi.eval_with(&values).map_err(|_| VirasoroError::Pole(0))?;
        let w = phase(p, x.index, n) * phase(q, y.index, n) - phase(p, y.index, n) * phase(q, x.index, n);
        total += w * v;
    }
    Ok(total * scale * scale)
}

/// `(p − q) I_{p+q}` if `p ≠ −q`, else `2p I_0 + t1 p³ + t2 p`.
pub fn virasoro_target(p: i64, q: i64, modes: impl Fn(i64) -> Complex64, params: &VirasoroParams) -> Complex64 {
    if (p + q).rem_euclid(params.n as i64) == 0 {
        let pf = p as f64;
        modes(0) * (2.0 * pf) + params.t1 * pf.powi(3) + params.t2 * pf
    } else {
        modes(wrap_mode(p + q, params.n)) * (p - q) as f64
    }
}

/// Finite trigonometric series `a0 + Σ (a_m cos mθ + b_m sin mθ)`, written
/// like `1 + 0.5*cos - 2*sin3`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigProfile {
    pub constant: f64,
    /// `(m, a_m, b_m)`, sorted by `m`.
    pub harmonics: Vec<(u32, f64, f64)>,
}

impl TrigProfile {
    pub fn zero() -> Self {
        TrigProfile { constant: 0.0, harmonics: Vec::new() }
    }

    pub fn cos() -> Self {
        TrigProfile { constant: 0.0, harmonics: vec![(1, 1.0, 0.0)] }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.constant
            + self
                .harmonics
                .iter()
                .map(|(m, a, b)| a * (*m as f64 * theta).cos() + b * (*m as f64 * theta).sin())
                .sum::<f64>()
    }

    fn add(&mut self, m: u32, a: f64, b: f64) {
        match self.harmonics.iter_mut().find(|h| h.0 == m) {
            Some(h) => {
                h.1 += a;
                h.2 += b;
            }
            None => {
                self.harmonics.push((m, a, b));
                self.harmonics.sort_by_key(|h| h.0);
            }
        }
    }
}

impl fmt::Display for TrigProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.constant != 0.0 {
            parts.push(format!("{}", self.constant));
        }
        for (m, a, b) in &self.harmonics {
            let m = if *m == 1 { String::new() } else { m.to_string() };
            for (c, name) in [(a, "cos"), (b, "sin")] {
                match *c {
                    0.0 => {}
                    1.0 => parts.push(format!("{name}{m}")),
                    _ => parts.push(format!("{c}*{name}{m}")),
                }
            }
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + ").replace("+ -", "- "))
    }
}

impl FromStr for TrigProfile {
    type Err = VirasoroError;
    fn from_str(s: &str) -> Result<Self, VirasoroError> {
        let err = |m: &str| VirasoroError::Profile(format!("{m} in `{s}`"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty profile"));
        }
        let mut out = TrigProfile::zero();
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, c) in compact.char_indices() {
            let after_exp = i > 0 && matches!(compact.as_bytes()[i - 1], b'e' | b'E');
            if (c == '+' || c == '-') && i > start && !after_exp {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, term.strip_prefix('+').unwrap_or(term)),
            };
            let (coef, func) = match body.split_once('*') {
                Some((c, f)) => (c.parse::<f64>().map_err(|_| err("bad coefficient"))?, Some(f)),
                None if body.starts_with("cos") || body.starts_with("sin") => (1.0, Some(body)),
                None => (body.parse::<f64>().map_err(|_| err("bad term"))?, None),
            };
            let c = sign * coef;
            match func {
                None => out.constant += c,
                Some(f) => {
                    let (name, m) = f.split_at(3.min(f.len()));
                    let m: u32 = if m.is_empty() { 1 } else { m.parse().map_err(|_| err("bad harmonic"))? };
                    match name {
                        "cos" => out.add(m, c, 0.0),
                        "sin" => out.add(m, 0.0, c),
                        _ => return Err(err("expected cos or sin")),
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `δ_k = B_k − 4` for `b_k = H_k/N² + 2`, `H_k = h(2πk/N)`, `B_k = b_k b_{k+1}`.
pub fn hill_fluctuation(profile: &TrigProfile, n: usize) -> Vec<f64> {
    let nf = n as f64;
    let h: Vec<f64> = (1..=n + 1).map(|k| profile.eval(2.0 * PI * k as f64 / nf)).collect();
    (0..n).map(|i| 2.0 * (h[i] + h[i + 1]) / (nf * nf) + h[i] * h[i + 1] / nf.powi(4)).collect()
}

/// The sample `B_k` themselves.
pub fn hill_sample(profile: &TrigProfile, n: usize) -> Vec<f64> {
    hill_fluctuation(profile, n).into_iter().map(|d| 4.0 + d).collect()
}

/// Scaled bracket, scaled modes and target at one grid point.
pub fn residual_at(
    tag: ModeTag,
    profile: &TrigProfile,
    n: usize,
    p: i64,
    q: i64,
    params: &VirasoroParams,
) -> Result<f64, VirasoroError> {
    let delta = hill_fluctuation(profile, n);
    let scale = tag.scale(n);
    let lhs = bracket_split(tag, 4.0, &delta, p, q)? * scale * scale;
    let target = virasoro_target(p, q, |m| dft_split(4.0, &delta, m) * scale, params);
    Ok((lhs - target).norm())
}

/// Per-`N` least-squares `(t1, t2)` from `p = 1, 2, 3` against
/// `{I_p, I_{−p}} − 2p I_0 = t1 p³ + t2 p`.
pub fn fit_central(tag: ModeTag, profile: &TrigProfile, n: usize) -> Result<(Complex64, Complex64), VirasoroError> {
    let delta = hill_fluctuation(profile, n);
    let scale = tag.scale(n);
    let i0 = dft_split(4.0, &delta, 0) * scale;
    // normal equations for columns (p³, p), real design matrix
    let (mut s66, mut s44, mut s22) = (0.0, 0.0, 0.0);
    let (mut r3, mut r1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for p in 1..=3i64 {
        let pf = p as f64;
        let y = bracket_split(tag, 4.0, &delta, p, -p)? * scale * scale - i0 * (2.0 * pf);
        s66 += pf.powi(6);
        s44 += pf.powi(4);
        s22 += pf * pf;
        r3 += y * pf.powi(3);
        r1 += y * pf;
    }
    let det = s66 * s22 - s44 * s44;
    Ok(((r3 * s22 - r1 * s44) / det, (r1 * s66 - r3 * s44) / det))
}

#[derive(Debug, Clone, Serialize)]
pub struct ModePoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub residual: f64,
    /// `residual · N²`.
    pub scaled: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeSeries {
    pub p: i64,
    pub q: i64,
    pub points: Vec<ModePoint>,
    /// `residual(N_{i+1}) / residual(N_i)`; `None` when both sides vanish.
    pub ratios: Vec<Option<f64>>,
    /// Least-squares log-log slope over the points above the floor.
    pub slope: Option<f64>,
    pub ratios_ok: bool,
    pub slope_ok: bool,
}

impl ModeSeries {
    pub fn passed(&self) -> bool {
        self.ratios_ok && self.slope_ok
    }

    fn from_points(p: i64, q: i64, points: Vec<ModePoint>) -> Self {
        let vanished = |r: f64| r <= RESIDUAL_FLOOR;
        let ratios: Vec<Option<f64>> = points
            .windows(2)
            .map(|w| if vanished(w[0].residual) { None } else { Some(w[1].residual / w[0].residual) })
            .collect();
        let ratios_ok = points
            .windows(2)
            .zip(&ratios)
            .all(|(w, r)| vanished(w[1].residual) || r.is_some_and(|r| r <= MAX_STEP_RATIO));
        let live: Vec<(f64, f64)> = points
            .iter()
            .filter(|pt| !vanished(pt.residual))
            .map(|pt| ((pt.n as f64).ln(), pt.residual.ln()))
            .collect();
        let slope = (live.len() >= 2).then(|| ols_slope(&live));
        let slope_ok = match slope {
            Some(s) => s <= MAX_SLOPE,
            None => live.is_empty() || points.last().is_some_and(|pt| vanished(pt.residual)),
        };
        ModeSeries { p, q, points, ratios, slope, ratios_ok, slope_ok }
    }
}

fn ols_slope(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xy.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct FittedCentral {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(serialize_with = "complex_pair")]
    pub t1: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub t2: Complex64,
    /// `t2 / N²`.
    #[serde(serialize_with = "complex_pair")]
    pub t2_over_n2: Complex64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeReport {
    pub tag: ModeTag,
    pub profile: String,
    pub central_terms: CentralTerms,
    pub t2_shift: f64,
    pub grid: Vec<usize>,
    pub series: Vec<ModeSeries>,
    /// Least-squares central terms at each grid point.
    pub fitted: Vec<FittedCentral>,
}

impl ModeReport {
    pub fn passed(&self) -> bool {
        self.series.iter().all(ModeSeries::passed)
    }

    /// Columns `tag,p,q,N,residual,slope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tag,p,q,N,residual,slope\n");
        for s in &self.series {
            let slope = s.slope.map(|x| format!("{x:.6}")).unwrap_or_default();
            for pt in &s.points {
                out.push_str(&format!("{},{},{},{},{:.6e},{}\n", self.tag, s.p, s.q, pt.n, pt.residual, slope));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct AsymptoticConfig {
    pub tag: ModeTag,
    pub profile: TrigProfile,
    pub modes: Vec<(i64, i64)>,
    pub grid: Vec<usize>,
    pub central_terms: CentralTerms,
    pub t2_shift: f64,
}

/// Residuals of the scaled mode brackets against the Virasoro targets on a
/// grid of periods.
pub fn asymptotic_report(cfg: &AsymptoticConfig) -> Result<ModeReport, VirasoroError> {
    if cfg.grid.first().is_none_or(|n| *n < 4) || cfg.grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(VirasoroError::Grid);
    }
    let series = cfg
        .modes
        .par_iter()
        .map(|&(p, q)| {
            let points = cfg
                .grid
                .par_iter()
                .map(|&n| {
                    let params = VirasoroParams::central(cfg.tag, cfg.central_terms, n).with_t2_shift(cfg.t2_shift);
                    let residual = residual_at(cfg.tag, &cfg.profile, n, p, q, &params)?;
                    Ok(ModePoint { n, residual, scaled: residual * (n * n) as f64 })
                })
                .collect::<Result<Vec<_>, VirasoroError>>()?;
            Ok(ModeSeries::from_points(p, q, points))
        })
        .collect::<Result<Vec<_>, VirasoroError>>()?;
    let fitted = cfg
        .grid
        .par_iter()
        .map(|&n| {
            let (t1, t2) = fit_central(cfg.tag, &cfg.profile, n)?;
            Ok(FittedCentral { n, t1, t2, t2_over_n2: t2 / (n * n) as f64 })
        })
        .collect::<Result<Vec<_>, VirasoroError>>()?;
    Ok(ModeReport {
        tag: cfg.tag,
        profile: cfg.profile.to_string(),
        central_terms: cfg.central_terms,
        t2_shift: cfg.t2_shift,
        grid: cfg.grid.clone(),
        series,
        fitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_examples() {
        let flat = vec![4.0; 12];
        assert!((dft_mode(&flat, 0) - 48.0).norm() < 1e-12);
        assert!(dft_mode(&flat, 3).norm() < 1e-9);
        let n = 10;
        let c: Vec<f64> = (1..=n).map(|k| (2.0 * PI * k as f64 / n as f64).cos()).collect();
        assert!((dft_mode(&c, 1) - 5.0).norm() < 1e-9);
    }

    #[test]
    fn dft_inverts() {
        let n = 9;
        let b: Vec<f64> = (0..n).map(|k| 1.0 + (k as f64).sin()).collect();
        let (lo, hi) = mode_range(n);
        for k in 1..=n as i64 {
            let back: Complex64 = (lo..=hi).map(|p| dft_mode(&b, p) * phase(-p, k, n)).sum::<Complex64>() / n as f64;
            assert!((back.re - b[k as usize - 1]).abs() < 1e-9 && back.im.abs() < 1e-9);
        }
    }

    #[test]
    fn target_clauses() {
        let params = VirasoroParams::new(Complex64::from(0.5), Complex64::from(3.0), 10);
        let modes = |m: i64| Complex64::from(10.0 * m as f64 + 1.0);
        assert_eq!(virasoro_target(2, 2, modes, &params), Complex64::from(0.0));
        assert_eq!(virasoro_target(1, -1, modes, &params), Complex64::from(2.0 + 0.5 + 3.0));
        assert_eq!(virasoro_target(2, 1, modes, &params), modes(3));
        // I_{k+N} = I_k
        assert_eq!(virasoro_target(5, 4, modes, &params), modes(-1));
    }

    #[test]
    fn flat_point() {
        let flat = vec![4.0; 11];
        for tag in [ModeTag::C2N, ModeTag::S2] {
            for (p, q) in [(1, 2), (2, 3), (0, 4)] {
                assert!(mode_bracket(tag, &flat, p, q, Complex64::from(1.0)).unwrap().norm() < 1e-9);
            }
        }
    }

    #[test]
    fn pole() {
        let mut b = vec![4.0; 7];
        b[3] = 0.0;
        assert_eq!(mode_bracket(ModeTag::C2N, &b, 1, 2, Complex64::from(1.0)), Err(VirasoroError::Pole(4)));
        assert!(mode_bracket(ModeTag::S2, &b, 1, 2, Complex64::from(1.0)).is_ok());
    }

    #[test]
    fn split_matches_direct() {
        let prof: TrigProfile = "cos + 0.5*sin2".parse().unwrap();
        let n = 16;
        let delta = hill_fluctuation(&prof, n);
        let b = hill_sample(&prof, n);
        for tag in [ModeTag::C2N, ModeTag::S2] {
            for (p, q) in [(1, 2), (1, -1), (3, -5)] {
                let split = bracket_split(tag, 4.0, &delta, p, q).unwrap();
                let direct = bracket_split(tag, 0.0, &b, p, q).unwrap();
                assert!((split - direct).norm() <= 1e-10 * direct.norm().max(1.0));
            }
        }
    }

    #[test]
    fn profile_parsing() {
        let p: TrigProfile = "1 + 0.5*cos - 2*sin3 + cos".parse().unwrap();
        assert_eq!(p.constant, 1.0);
        assert_eq!(p.harmonics, vec![(1, 1.5, 0.0), (3, 0.0, -2.0)]);
        assert_eq!(p.to_string(), "1 + 1.5*cos - 2*sin3");
        assert_eq!("1e-3*cos".parse::<TrigProfile>().unwrap().harmonics, vec![(1, 1e-3, 0.0)]);
        assert!("tan".parse::<TrigProfile>().is_err());
        assert!("".parse::<TrigProfile>().is_err());
        assert_eq!(TrigProfile::cos().to_string(), "cos");
    }

    #[test]
    fn series_bookkeeping() {
        let pts = |rs: &[f64]| {
            rs.iter().enumerate().map(|(i, r)| ModePoint { n: 64 << i, residual: *r, scaled: 0.0 }).collect::<Vec<_>>()
        };
        let quartic = ModeSeries::from_points(1, 2, pts(&[1.0, 1.0 / 16.0, 1.0 / 256.0]));
        assert!(quartic.passed());
        assert!((quartic.slope.unwrap() + 4.0).abs() < 1e-12);
        let quadratic = ModeSeries::from_points(1, 2, pts(&[1.0, 0.25, 0.0625]));
        assert!(quadratic.ratios_ok && (quadratic.slope.unwrap() + 2.0).abs() < 1e-12);
        let plateau = ModeSeries::from_points(1, -1, pts(&[1.0, 0.9, 0.95]));
        assert!(!plateau.passed());
        let vanished = ModeSeries::from_points(2, 3, pts(&[0.0, 0.0, 0.0]));
        assert!(vanished.passed() && vanished.slope.is_none());
    }
}
