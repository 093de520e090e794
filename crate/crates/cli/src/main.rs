// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{config_error, Angle, ChiSpec, ConfigError, RunConfig};
use spinorbit::qcc::RidgeMeasure;
use spinorbit::quantum::{PolarGrid, RadialSpacing};
use spinorbit::rational::{parse_angle, ExactReal};

#[derive(Parser)]
#[command(name = "spinorbit", version, about = "Spin-orbit coupled particle in 2D power-law potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form orbit as CSV, optionally drawn as a PPM.
    Orbit(Common),
    /// Density of the macroscopic state on a polar grid.
    Density(Common),
    /// Density ridge against the classical orbit, and the rotation symmetry.
    Qcc {
        #[command(flatten)]
        common: Common,
        /// density or radial_weighted
        #[arg(long, value_parser = measure)]
        measure: Option<RidgeMeasure>,
        /// Compare radii without fitting an overall scale.
        #[arg(long)]
        no_scale_fit: bool,
        #[arg(long)]
        max_denominator: Option<u64>,
    },
    /// CAM doublets for a range of orders.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Orders as `a..b` (inclusive).
        #[arg(long)]
        nu: Option<String>,
    },
    /// Gauge potential, field strength and holonomy at one point.
    Gauge {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, value_parser = angle)]
        phi: Option<f64>,
        #[arg(long)]
        holonomy_radius: Option<f64>,
    },
    /// Spin expectation of the macroscopic state along the angle.
    Spin {
        #[command(flatten)]
        common: Common,
        /// Angular range, e.g. `4pi`.
        #[arg(long, value_parser = angle)]
        span: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        r_ref: Option<f64>,
    },
    /// Run the acceptance suite; exit 1 if any criterion fails.
    Selftest {
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Also write the reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn angle(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn measure(s: &str) -> Result<RidgeMeasure, String> {
    match s {
        "density" => Ok(RidgeMeasure::Density),
        "radial_weighted" => Ok(RidgeMeasure::RadialWeighted),
        _ => Err(format!("unknown measure `{s}` (density, radial_weighted)")),
    }
}

fn exact(s: &str) -> Result<ExactReal, String> {
    s.parse().map_err(|e: spinorbit::rational::ParseNumberError| e.to_string())
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Power index, exact fractions like `7/3` allowed.
    #[arg(long, value_parser = exact, allow_hyphen_values = true)]
    k: Option<ExactReal>,
    #[arg(long, value_parser = exact)]
    gamma: Option<ExactReal>,
    /// Dimensionless strength 2Mϱ/ħ².
    #[arg(long)]
    strength: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// plus, minus, plusx or plusy
    #[arg(long)]
    chi: Option<String>,
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    phi0: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    nu_min: Option<u32>,
    /// Sum from ν = 0 with modes normalised inside --mode-r-max.
    #[arg(long)]
    unsafe_modes: bool,
    #[arg(long)]
    mode_r_max: Option<f64>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    n_r: Option<usize>,
    #[arg(long)]
    n_phi: Option<usize>,
    /// log or linear
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long)]
    samples_per_petal: Option<usize>,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_heatmap: bool,
    #[arg(long)]
    heatmap_size: Option<usize>,
}

impl Common {
    fn into_config(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(p) = self.preset {
            // a preset on the command line replaces the file's model
            c.preset = Some(p);
            c.k = None;
            c.gamma = None;
        }
        set(&mut c.k, self.k);
        set(&mut c.gamma, self.gamma);
        if let Some(v) = self.strength {
            c.strength = v;
        }
        if self.q.is_some() || self.beta.is_some() || self.eta.is_some() {
            // coupling flags replace the file's (q, β, η) as a whole
            (c.q, c.beta, c.eta) = (None, None, None);
        }
        set(&mut c.q, self.q);
        set(&mut c.beta, self.beta);
        set(&mut c.eta, self.eta);
        if let Some(v) = self.lambda {
            c.lambda = v;
        }
        if let Some(v) = self.chi {
            c.chi = ChiSpec::Named(v);
        }
        if let Some(v) = self.phi0 {
            c.phi0 = Angle(v);
        }
        if let Some(v) = self.n {
            c.n = v;
        }
        set(&mut c.nu_min, self.nu_min);
        c.unsafe_modes |= self.unsafe_modes;
        set(&mut c.mode_r_max, self.mode_r_max);
        let grid_flags = self.r_min.is_some()
            || self.r_max.is_some()
            || self.n_r.is_some()
            || self.n_phi.is_some()
            || self.spacing.is_some();
        if grid_flags {
            let base = c.grid;
            let spacing = match self.spacing.as_deref() {
                None => base.map_or(RadialSpacing::Log, |g| g.spacing),
                Some("log") => RadialSpacing::Log,
                Some("linear") => RadialSpacing::Linear,
                Some(other) => return Err(config_error(format!("unknown spacing `{other}` (log, linear)"))),
            };
            let need = |v: Option<f64>, from: Option<f64>, name: &str| {
                v.or(from).ok_or_else(|| config_error(format!("a grid given by flags needs --{name}")))
            };
            c.grid = Some(PolarGrid {
                r_min: need(self.r_min, base.map(|g| g.r_min), "r-min")?,
                r_max: need(self.r_max, base.map(|g| g.r_max), "r-max")?,
                n_r: self.n_r.or(base.map(|g| g.n_r)).unwrap_or(256),
                n_phi: self.n_phi.or(base.map(|g| g.n_phi)).unwrap_or(720),
                phi_start: base.map_or(c.phi0.0, |g| g.phi_start),
                phi_span: base.map_or(2.0 * std::f64::consts::PI, |g| g.phi_span),
                spacing,
            });
        }
        if let Some(v) = self.samples_per_petal {
            c.orbit.samples_per_petal = v;
        }
        if let Some(v) = self.out {
            c.output.dir = v;
        }
        if self.no_heatmap {
            c.output.heatmap = false;
        }
        if let Some(v) = self.heatmap_size {
            c.output.heatmap_size = v;
        }
        Ok(c)
    }
}

fn set<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SPINORBIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| config_error(format!("SPINORBIT_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Orbit(common) => commands::orbit(common.into_config()?),
        Command::Density(common) => commands::density(common.into_config()?),
        Command::Qcc { common, measure, no_scale_fit, max_denominator } => {
            let mut c = common.into_config()?;
            if let Some(m) = measure {
                c.qcc.measure = m;
            }
            if no_scale_fit {
                c.qcc.scale_fit = false;
            }
            if let Some(d) = max_denominator {
                c.qcc.max_denominator = d;
            }
            commands::qcc(c)
        }
        Command::Spectrum { common, nu } => {
            let mut c = common.into_config()?;
            if let Some(nu) = nu {
                c.spectrum.nu = nu;
            }
            commands::spectrum(c)
        }
        Command::Gauge { common, r, phi, holonomy_radius } => {
            let mut c = common.into_config()?;
            if let Some(v) = r {
                c.gauge.r = v;
            }
            if let Some(v) = phi {
                c.gauge.phi = Angle(v);
            }
            if let Some(v) = holonomy_radius {
                c.gauge.holonomy_radius = v;
            }
            commands::gauge(c)
        }
        Command::Spin { common, span, steps, r_ref } => {
            let mut c = common.into_config()?;
            if let Some(v) = span {
                c.spin.span = Angle(v);
            }
            if let Some(v) = steps {
                c.spin.steps = v;
            }
            set(&mut c.spin.r_ref, r_ref);
            commands::spin(c)
        }
        Command::Selftest { only, json } => commands::selftest(&only, json.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
