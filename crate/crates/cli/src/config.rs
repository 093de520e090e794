//! Run configuration: a JSON document, overridden by flags, validated and
//! completed before any pipeline starts.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use spinorbit::classical::{preset, presets, OrbitSpec, PotentialSpec, PRESET_N};
use spinorbit::gauge::FieldParams;
use spinorbit::qcc::{RidgeMeasure, DEFAULT_MAX_DENOMINATOR};
use spinorbit::quantum::{default_nu_min, MacroscopicState, PolarGrid, Spinor};
use spinorbit::rational::{parse_angle, ExactReal};

/// Marks errors caused by the configuration rather than by a computation.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl fmt::Display) -> anyhow::Error {
    ConfigError(msg.to_string()).into()
}

/// Tolerance for `q = 2βη` when all three are given.
const COUPLING_TOL: f64 = 1e-12;

/// An angle in radians; text such as `"4pi"` is accepted on input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(Angle(v)),
            Repr::Text(t) => parse_angle(&t).map(Angle).map_err(serde::de::Error::custom),
        }
    }
}

/// Named spin state, or explicit amplitudes `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChiSpec {
    Named(String),
    Amplitudes { up: [f64; 2], down: [f64; 2] },
}

impl Default for ChiSpec {
    fn default() -> Self {
        ChiSpec::Named("plus".into())
    }
}

impl ChiSpec {
    pub fn spinor(&self) -> Result<Spinor> {
        match self {
            ChiSpec::Named(name) => match name.to_ascii_lowercase().as_str() {
                "plus" | "up" | "plusz" => Ok(Spinor::plus()),
                "minus" | "down" | "minusz" => Ok(Spinor::minus()),
                "plusx" => Ok(Spinor::plus_x()),
                "plusy" => Ok(Spinor::plus_y()),
                other => Err(config_error(format!("unknown spinor `{other}` (plus, minus, plusx, plusy)"))),
            },
            ChiSpec::Amplitudes { up, down } => {
                Spinor::new(Complex64::new(up[0], up[1]), Complex64::new(down[0], down[1])).map_err(config_error)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitSettings {
    pub samples_per_petal: usize,
    /// Drawing radius for open orbits and heatmaps, in units of `a_c`.
    pub extent: f64,
}

impl Default for OrbitSettings {
    fn default() -> Self {
        Self { samples_per_petal: 512, extent: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSettings {
    /// `a..b` (inclusive), `a..=b` or a single order; empty picks five
    /// orders from the default `ν_min`.
    pub nu: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaugeSettings {
    pub r: f64,
    pub phi: Angle,
    pub holonomy_radius: f64,
}

impl Default for GaugeSettings {
    fn default() -> Self {
        Self { r: 1.0, phi: Angle(0.0), holonomy_radius: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinSettings {
    pub span: Angle,
    pub steps: usize,
    /// Radius at which the local spinor is read; the density peak if unset.
    pub r_ref: Option<f64>,
}

impl Default for SpinSettings {
    fn default() -> Self {
        Self { span: Angle(2.0 * std::f64::consts::PI), steps: 361, r_ref: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QccSettings {
    pub measure: RidgeMeasure,
    pub scale_fit: bool,
    pub max_denominator: u64,
}

impl Default for QccSettings {
    fn default() -> Self {
        Self { measure: RidgeMeasure::Density, scale_fit: true, max_denominator: DEFAULT_MAX_DENOMINATOR }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub heatmap: bool,
    pub heatmap_size: usize,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self { dir: PathBuf::from("spinorbit-out"), heatmap: true, heatmap_size: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub k: Option<ExactReal>,
    pub gamma: Option<ExactReal>,
    pub strength: f64,
    pub q: Option<f64>,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub lambda: f64,
    pub chi: ChiSpec,
    pub phi0: Angle,
    pub n: u32,
    pub nu_min: Option<u32>,
    /// Sum from `ν = 0`, normalising each mode on `(0, mode_r_max]`.
    pub unsafe_modes: bool,
    pub mode_r_max: Option<f64>,
    pub grid: Option<PolarGrid>,
    pub orbit: OrbitSettings,
    pub spectrum: SpectrumSettings,
    pub gauge: GaugeSettings,
    pub spin: SpinSettings,
    pub qcc: QccSettings,
    pub output: OutputSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            k: None,
            gamma: None,
            strength: 1.0,
            q: None,
            beta: None,
            eta: None,
            lambda: 0.5,
            chi: ChiSpec::default(),
            phi0: Angle(0.0),
            n: PRESET_N,
            nu_min: None,
            unsafe_modes: false,
            mode_r_max: None,
            grid: None,
            orbit: OrbitSettings::default(),
            spectrum: SpectrumSettings::default(),
            gauge: GaugeSettings::default(),
            spin: SpinSettings::default(),
            qcc: QccSettings::default(),
            output: OutputSettings::default(),
        }
    }
}

/// A configuration whose open fields have all been filled, with the model
/// objects it describes.
pub struct Resolved {
    pub config: RunConfig,
    pub orbit: OrbitSpec,
    pub chi: Spinor,
    pub field: FieldParams,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }

    /// Fill defaults and check every invariant. Nothing expensive runs here
    /// except for the grid, which [`Resolved::state_and_grid`] settles.
    pub fn resolve(mut self) -> Result<Resolved> {
        if let Some(name) = &self.preset {
            let p = preset(name).ok_or_else(|| {
                let known: Vec<_> = presets().iter().map(|p| p.name).collect();
                config_error(format!("unknown preset `{name}` (known: {})", known.join(", ")))
            })?;
            self.k.get_or_insert(p.k);
            self.gamma.get_or_insert(p.gamma);
        }
        let k = self.k.unwrap_or(ExactReal::rational(1, 1));
        self.k = Some(k);
        if self.n == 0 {
            return Err(config_error("n must be at least 1"));
        }
        // the pairing used by every preset: turning radius on the n-mode peak
        let gamma = *self.gamma.get_or_insert_with(|| match k.fraction() {
            Some((p, s)) => ExactReal::rational(p.abs() * self.n as i64, 2 * s),
            None => ExactReal::inexact(k.value().abs() * self.n as f64 / 2.0),
        });

        let (q, beta, eta) = coupling(self.q, self.beta, self.eta)?;
        (self.q, self.beta, self.eta) = (Some(q), Some(beta), Some(eta));

        let potential = PotentialSpec::new(k, self.strength, q, self.lambda).map_err(config_error)?;
        let orbit = OrbitSpec::new(potential, gamma.value(), self.phi0.0).map_err(config_error)?;
        let field = FieldParams::new(eta, beta).map_err(config_error)?;
        let chi = self.chi.spinor()?;

        if self.unsafe_modes {
            if self.nu_min.is_some_and(|m| m != 0) {
                return Err(config_error("unsafe_modes sums from nu = 0; drop nu_min"));
            }
            self.nu_min = Some(0);
            if k.value() > 0.0 {
                let r = *self.mode_r_max.get_or_insert(10.0 * orbit.a_c());
                if !(r > 0.0 && r.is_finite()) {
                    return Err(config_error(format!("mode_r_max must be positive, got {r}")));
                }
            }
        } else {
            if self.mode_r_max.is_some() {
                return Err(config_error("mode_r_max only applies with unsafe_modes"));
            }
            self.nu_min.get_or_insert(default_nu_min(k.value()));
        }
        if let Some(g) = &self.grid {
            g.validate().map_err(config_error)?;
        }
        if self.orbit.samples_per_petal < 2 || !(self.orbit.extent > 0.0) {
            return Err(config_error("orbit needs samples_per_petal ≥ 2 and extent > 0"));
        }
        if self.output.heatmap_size == 0 {
            return Err(config_error("heatmap_size must be positive"));
        }
        if self.spin.steps < 2 || !self.spin.span.0.is_finite() {
            return Err(config_error("spin needs steps ≥ 2 and a finite span"));
        }
        if !(self.gauge.r > 0.0) || !(self.gauge.holonomy_radius > 0.0) || !self.gauge.phi.0.is_finite() {
            return Err(config_error("gauge needs r > 0, holonomy_radius > 0 and a finite phi"));
        }
        if self.spectrum.nu.trim().is_empty() {
            let lo = default_nu_min(k.value());
            self.spectrum.nu = format!("{lo}..{}", lo + 4);
        }
        parse_nu_range(&self.spectrum.nu)?;
        Ok(Resolved { config: self, orbit, chi, field })
    }
}

/// `q`, `β`, `η` from whichever were given; `β` defaults to 1.
fn coupling(q: Option<f64>, beta: Option<f64>, eta: Option<f64>) -> Result<(f64, f64, f64)> {
    let beta_v = beta.unwrap_or(1.0);
    if beta_v == 0.0 || !beta_v.is_finite() {
        return Err(config_error("beta must be finite and nonzero"));
    }
    match (q, eta) {
        (Some(q), Some(eta)) => {
            let implied = 2.0 * beta_v * eta;
            if (q - implied).abs() > COUPLING_TOL * q.abs().max(1.0) {
                return Err(config_error(format!("q = {q} disagrees with 2*beta*eta = {implied}")));
            }
            Ok((q, beta_v, eta))
        }
        (Some(q), None) => Ok((q, beta_v, q / (2.0 * beta_v))),
        (None, Some(eta)) => Ok((2.0 * beta_v * eta, beta_v, eta)),
        (None, None) => Ok((0.1, beta_v, 0.1 / (2.0 * beta_v))),
    }
}

/// `"1..5"` and `"1..=5"` are both inclusive; `"3"` is a single order.
pub fn parse_nu_range(s: &str) -> Result<std::ops::RangeInclusive<u32>> {
    let bad = || config_error(format!("cannot parse nu range `{s}` (expected a..b)"));
    let t = s.trim();
    let (lo, hi) = match t.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (t, t),
    };
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

impl Resolved {
    pub fn k(&self) -> ExactReal {
        self.orbit.potential.k
    }

    /// The superposition and its grid; the grid is stored back into the
    /// configuration so the written config pins it.
    pub fn state_and_grid(&mut self) -> Result<(MacroscopicState, PolarGrid)> {
        let c = &self.config;
        let spec = &self.orbit.potential;
        let state = if c.unsafe_modes {
            let r_max = c.mode_r_max.unwrap_or(f64::INFINITY);
            MacroscopicState::literal(spec, self.chi, c.n, r_max, c.phi0.0)
        } else {
            MacroscopicState::new(spec, self.chi, c.n, c.nu_min, c.phi0.0)
        }
        .map_err(config_error)?;
        let grid = match c.grid {
            Some(g) => g,
            None => {
                let mut g = PolarGrid::default_for(&state, self.k().fraction())?;
                if let Some(r) = state.truncation {
                    g.r_max = g.r_max.min(r);
                }
                g.validate().map_err(config_error)?;
                g
            }
        };
        self.config.grid = Some(grid);
        Ok((state, grid))
    }

    pub fn write_config(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("config.json");
        let mut text = serde_json::to_string_pretty(&self.config)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
