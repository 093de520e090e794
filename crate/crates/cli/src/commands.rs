use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use serde::Serialize;

use spinorbit::acceptance::{self, CriterionReport};
use spinorbit::classical::orbit_polyline;
use spinorbit::gauge::{field_records, holonomy_phase, FieldRecord};
use spinorbit::io::{self, Raster};
use spinorbit::qcc::{run_qcc, QccRun};
use spinorbit::quantum::{cam_spectrum, density_grid, spin_expectation_dynamics};

use crate::config::{config_error, parse_nu_range, Resolved, RunConfig};

fn prepare(config: RunConfig) -> Result<(Resolved, PathBuf)> {
    let resolved = config.resolve()?;
    let dir = resolved.config.output.dir.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok((resolved, dir))
}

/// Write through a buffer and report the path on stdout.
fn emit(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write(&mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn emit_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    emit(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

fn finish(resolved: &Resolved, dir: &Path) -> Result<ExitCode> {
    let path = resolved.write_config(dir)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

pub fn orbit(config: RunConfig) -> Result<ExitCode> {
    let (resolved, dir) = prepare(config)?;
    let c = &resolved.config;
    let spec = &resolved.orbit;
    let extent = c.orbit.extent * spec.a_c();
    let line = orbit_polyline(spec, c.orbit.samples_per_petal, extent)?;
    if let Some(w) = &line.warning {
        eprintln!("warning: {w}");
    }
    emit(&dir.join("orbit.csv"), |w| io::write_orbit_csv(w, &line))?;
    if c.output.heatmap {
        // closed orbits fit inside a_c; open ones are shown out to the extent
        let view = if spec.k() > 0.0 { 1.05 * spec.a_c() } else { extent };
        let img = io::orbit_raster(&line, view, c.output.heatmap_size);
        emit(&dir.join("orbit.ppm"), |w| img.write_ppm(w))?;
    }
    finish(&resolved, &dir)
}

pub fn density(config: RunConfig) -> Result<ExitCode> {
    let (mut resolved, dir) = prepare(config)?;
    let (state, grid) = resolved.state_and_grid()?;
    let field = density_grid(&state, &grid)?;
    emit(&dir.join("density.csv"), |w| io::write_density_csv(w, &field))?;
    let c = &resolved.config;
    if c.output.heatmap {
        let img: Raster = io::density_raster(&field, c.output.heatmap_size);
        emit(&dir.join("density.ppm"), |w| img.write_ppm(w))?;
    }
    finish(&resolved, &dir)
}

pub fn qcc(config: RunConfig) -> Result<ExitCode> {
    let (mut resolved, dir) = prepare(config)?;
    let (state, grid) = resolved.state_and_grid()?;
    let c = &resolved.config;
    let out = run_qcc(&QccRun {
        orbit: &resolved.orbit,
        state: &state,
        grid: Some(grid),
        measure: c.qcc.measure,
        scale_fit: c.qcc.scale_fit,
        max_denominator: c.qcc.max_denominator,
    })?;
    emit_json(&dir.join("qcc.json"), &out.report)?;
    emit(&dir.join("ridge.csv"), |w| io::write_ridge_csv(w, &out.ridge))?;
    if c.output.heatmap {
        let img = io::density_raster(&out.field, c.output.heatmap_size);
        emit(&dir.join("density.ppm"), |w| img.write_ppm(w))?;
    }
    let r = &out.report;
    println!(
        "k = {}: symmetry order {} (expected {}), mean relative deviation {:.4}",
        r.k, r.symmetry_order_detected, r.symmetry_order_expected, r.mean_relative_deviation
    );
    finish(&resolved, &dir)
}

#[derive(Serialize)]
struct SpectrumLevel {
    nu: u32,
    sign: i8,
    lambda: f64,
}

#[derive(Serialize)]
struct SpectrumReport {
    k: String,
    q: f64,
    levels: Vec<SpectrumLevel>,
}

pub fn spectrum(config: RunConfig) -> Result<ExitCode> {
    let (resolved, dir) = prepare(config)?;
    let range = parse_nu_range(&resolved.config.spectrum.nu)?;
    let spec = &resolved.orbit.potential;
    let levels = cam_spectrum(spec, range).map_err(config_error)?;
    let report = SpectrumReport {
        k: spec.k.to_string(),
        q: spec.q,
        levels: levels.iter().map(|l| SpectrumLevel { nu: l.nu, sign: l.sign, lambda: l.lambda }).collect(),
    };
    for l in &report.levels {
        println!("nu = {:>3} {} lambda = {}", l.nu, if l.sign > 0 { '+' } else { '-' }, io::fmt_e12(l.lambda));
    }
    emit_json(&dir.join("spectrum.json"), &report)?;
    finish(&resolved, &dir)
}

#[derive(Serialize)]
struct GaugeReport {
    beta: f64,
    eta: f64,
    q: f64,
    fields: Vec<FieldRecord>,
    holonomy: FieldRecord,
}

pub fn gauge(config: RunConfig) -> Result<ExitCode> {
    let (resolved, dir) = prepare(config)?;
    let g = &resolved.config.gauge;
    let params = resolved.field;
    let fields = field_records(&params, g.r, g.phi.0)?;
    let loop_matrix = holonomy_phase(&params, g.holonomy_radius)?;
    let report = GaugeReport {
        beta: params.beta,
        eta: params.eta,
        q: params.q(),
        fields,
        holonomy: FieldRecord::new("holonomy", g.holonomy_radius, 0.0, &loop_matrix),
    };
    emit_json(&dir.join("gauge.json"), &report)?;
    finish(&resolved, &dir)
}

pub fn spin(config: RunConfig) -> Result<ExitCode> {
    let (mut resolved, dir) = prepare(config)?;
    let (state, _) = resolved.state_and_grid()?;
    let r_ref = match resolved.config.spin.r_ref {
        Some(r) => r,
        None => state.peak_radius()?,
    };
    resolved.config.spin.r_ref = Some(r_ref);
    let s = &resolved.config.spin;
    let rows = spin_expectation_dynamics(&state, r_ref, s.span.0, s.steps)?;
    emit(&dir.join("spin.csv"), |w| io::write_csv(w, &["phi", "sx", "sy", "sz"], &rows))?;
    finish(&resolved, &dir)
}

type Criterion = fn() -> CriterionReport;

const CRITERIA: [Criterion; 11] = [
    acceptance::orbit_oracle,
    acceptance::orbit_closure,
    acceptance::spin_precession_check,
    acceptance::radial_normalisation,
    acceptance::special_functions,
    acceptance::gauge_checks,
    acceptance::holonomy_check,
    acceptance::spectrum_check,
    acceptance::qcc_check,
    acceptance::quantum_spin_check,
    acceptance::determinism_check,
];

pub fn selftest(only: &[u8], json: Option<&Path>) -> Result<ExitCode> {
    if let Some(bad) = only.iter().find(|&&i| i == 0 || i as usize > CRITERIA.len()) {
        return Err(config_error(format!("no criterion {bad}; numbers run from 1 to {}", CRITERIA.len())));
    }
    let mut reports = Vec::new();
    for (i, check) in CRITERIA.iter().enumerate() {
        if only.is_empty() || only.contains(&(i as u8 + 1)) {
            let report = check();
            println!("{report}");
            reports.push(report);
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("{} of {} criteria passed", reports.len() - failed, reports.len());
    if let Some(path) = json {
        emit_json(path, &reports)?;
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
