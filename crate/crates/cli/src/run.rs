//! Running a validated config: data files, gates and the manifest.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use qrf_core::classical::{
    analytic_oscillator_frame_c, classical_frame_switch, integrate_reduced_with, FrameLabel,
    Integrator, OscillatorParams, ReducedPhasePoint,
};
use qrf_core::grid::{Grid1D, WaveFunction};
use qrf_core::switch::oscillator_eigenfunction;
use qrf_core::wigner::{
    closed_form_eigenstate_wigner, eigenstate_wigner_fn, negativity_volume, route_deviation,
    switched_marginals, wigner_transform, DensityMatrix, Keep, WignerGrid,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::checks::{self, Check};
use crate::config::{ExperimentConfig, Kind};
use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";

/// Slack on the `|w| ≤ 1/π` bound.
const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub version: String,
    pub files: Vec<FileRecord>,
    pub metrics: BTreeMap<String, f64>,
    pub gates: Vec<Check>,
    pub passed: bool,
    pub wall_time_s: f64,
}

struct Output<'a> {
    dir: &'a Path,
    files: Vec<FileRecord>,
    metrics: BTreeMap<String, f64>,
    gates: Vec<Check>,
}

impl Output<'_> {
    fn write(&mut self, name: &str, columns: &[&str], bytes: Vec<u8>) -> Result<()> {
        let rows = bytes
            .iter()
            .filter(|b| **b == b'\n')
            .count()
            .saturating_sub(1);
        fs::write(self.dir.join(name), &bytes)?;
        self.files.push(FileRecord {
            name: name.to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
        Ok(())
    }

    fn table(&mut self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let mut text = columns.join(",");
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        self.write(name, columns, text.into_bytes())
    }

    fn wigner(&mut self, name: &str, w: &WignerGrid) -> Result<()> {
        let mut bytes = Vec::new();
        w.write_csv(&mut bytes)?;
        self.write(name, &["x", "xi", "w"], bytes)
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }
}

/// Runs `config`, writing its files and `manifest.json` into its output
/// directory. A tripped gate still writes everything, then returns
/// [`CliError::Numerical`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<Manifest> {
    config.validate()?;
    let start = Instant::now();
    fs::create_dir_all(&config.output_dir)?;
    let mut out = Output {
        dir: &config.output_dir,
        files: Vec::new(),
        metrics: BTreeMap::new(),
        gates: Vec::new(),
    };
    match config.kind {
        Kind::ClassicalTrajectory => classical_trajectory(config, &mut out)?,
        Kind::WignerStudy => wigner_study(config, &mut out)?,
        Kind::InvariantSuite => invariant_suite(config, &mut out)?,
    }
    let passed = out.gates.iter().all(|g| g.passed);
    let manifest = Manifest {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        files: out.files,
        metrics: out.metrics,
        gates: out.gates,
        passed,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(config.output_dir.join(MANIFEST), json)?;
    if !passed {
        let failed: Vec<&str> = manifest
            .gates
            .iter()
            .filter(|g| !g.passed)
            .map(|g| g.name.as_str())
            .collect();
        return Err(CliError::Numerical(format!(
            "gates failed: {}",
            failed.join(", ")
        )));
    }
    Ok(manifest)
}

fn grid_from(config: &ExperimentConfig, n: u64, length: f64) -> Result<Grid1D> {
    let n = config.integer_or("n", n)? as usize;
    let length = config.positive_or("length", length)?;
    Grid1D::new(n, length).map_err(|e| CliError::Config(e.to_string()))
}

fn level(config: &ExperimentConfig, key: &str) -> Result<u8> {
    match config.integer_or(key, 0)? {
        l @ 0..=1 => Ok(l as u8),
        l => Err(CliError::Config(format!("{key} must be 0 or 1, got {l}"))),
    }
}

const TRAJECTORY_COLUMNS: [&str; 5] = ["t", "x_A", "x_B", "q_B", "q_C"];

/// `(x_A, x_B)` seen from C and `(q_B, q_C)` seen from A.
fn both_views(rp: &ReducedPhasePoint) -> Result<[f64; 4]> {
    let a = classical_frame_switch(rp, FrameLabel::A)?;
    Ok([
        rp.position(FrameLabel::A).unwrap(),
        rp.position(FrameLabel::B).unwrap(),
        a.position(FrameLabel::B).unwrap(),
        a.position(FrameLabel::C).unwrap(),
    ])
}

fn identity_residual(row: &[f64]) -> f64 {
    let (xa, xb, qb, qc) = (row[1], row[2], row[3], row[4]);
    (qb - (xb - xa)).abs().max((qc + xa).abs())
}

fn classical_trajectory(config: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let params = OscillatorParams::from_frequencies(
        config.required("omega_a")?,
        config.required("omega_b")?,
        config.required("a0")?,
        config.required("b0")?,
        config.required("phi_a")?,
        config.required("phi_b")?,
    );
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let t_end = config.positive_or("t_end", 4.0 * PI)?;
    let dt = config.positive_or("dt", 1e-3)?;
    let every = config.integer_or("sample_every", 10)?.max(1) as usize;
    let tolerance = config.positive_or("tolerance", 1e-4)?;
    let integrator = match config.text("integrator").unwrap_or("yoshida4") {
        "yoshida4" => Integrator::Yoshida4,
        "leapfrog" => Integrator::Leapfrog,
        other => return Err(CliError::Config(format!("unknown integrator {other:?}"))),
    };
    let traj = integrate_reduced_with(
        &params.initial_frame_c()?,
        &params.potential(),
        &params.system()?,
        t_end,
        dt,
        integrator,
    )?;
    let mut numeric = Vec::new();
    let mut analytic = Vec::new();
    for (k, (t, rp)) in traj.times().iter().zip(traj.states()).enumerate() {
        if k % every != 0 && k + 1 != traj.len() {
            continue;
        }
        let mut row = vec![*t];
        row.extend(both_views(rp)?);
        numeric.push(row);
        let (xa, xb) = analytic_oscillator_frame_c(&params, *t);
        let exact = ReducedPhasePoint::new(FrameLabel::C, 3, vec![xa, xb], vec![0.0, 0.0])?;
        let mut row = vec![*t];
        row.extend(both_views(&exact)?);
        analytic.push(row);
    }
    let deviation = numeric
        .iter()
        .zip(&analytic)
        .flat_map(|(a, b)| a[1..].iter().zip(&b[1..]).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    let residual = |rows: &[Vec<f64>]| {
        rows.iter()
            .map(|r| identity_residual(r))
            .fold(0.0, f64::max)
    };
    out.metric(
        "max_abs_q_B",
        analytic.iter().map(|r| r[3].abs()).fold(0.0, f64::max),
    );
    out.metric("numerical_vs_analytic", deviation);
    out.metric("identity_residual_analytic", residual(&analytic));
    out.metric("identity_residual_numerical", residual(&numeric));
    out.gates.push(Check::at_most(
        "integrator vs closed form",
        deviation,
        tolerance,
        format!("dt = {dt}"),
    ));
    out.gates.push(Check::at_most(
        "relative coordinates",
        residual(&analytic),
        1e-10,
        "closed form",
    ));
    out.table("trajectory.csv", &TRAJECTORY_COLUMNS, &numeric)?;
    out.table("trajectory_analytic.csv", &TRAJECTORY_COLUMNS, &analytic)
}

fn wigner_bound(name: &str, w: &WignerGrid) -> Check {
    Check::at_most(
        &format!("{name} bound"),
        w.max_abs() - 1.0 / PI,
        BOUND_SLACK,
        "max |w| - 1/pi",
    )
}

fn wigner_study(config: &ExperimentConfig, out: &mut Output) -> Result<()> {
    match config.text("mode").unwrap_or_default() {
        "eigenstates" => eigenstates(config, out),
        "switched" => switched(config, out),
        other => Err(CliError::Config(format!(
            "mode must be eigenstates or switched, got {other:?}"
        ))),
    }
}

fn eigenstates(config: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let alpha = config.positive_or("alpha", 1.0)?;
    let grid = grid_from(config, 128, 20.0)?;
    for level in [0u8, 1] {
        let f = oscillator_eigenfunction(level, alpha)?;
        let psi = WaveFunction::from_position_fn(&[(FrameLabel::B, grid)], FrameLabel::A, |x| {
            Complex64::new(f(x[0]), 0.0)
        })?;
        let w = wigner_transform(&DensityMatrix::from_pure(&psi)?)?;
        let dev = w.max_deviation(&closed_form_eigenstate_wigner(level, alpha, &grid)?)?;
        out.metric(&format!("closed_form_deviation_f{level}"), dev);
        out.metric(&format!("negativity_f{level}"), negativity_volume(&w));
        out.gates.push(Check::at_most(
            &format!("f{level} closed form"),
            dev,
            1e-6,
            "pointwise",
        ));
        out.gates.push(wigner_bound(&format!("f{level}"), &w));
        out.wigner(&format!("wigner_f{level}.csv"), &w)?;
    }
    Ok(())
}

fn switched(config: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let alpha_a = config.positive_or("alpha_a", 1.0)?;
    let alpha_b = config.positive_or("alpha_b", 1.0)?;
    let (la, lb) = (level(config, "level_a")?, level(config, "level_b")?);
    let grid = grid_from(config, 256, 48.0)?;
    let m = switched_marginals(grid, la, lb, alpha_a, alpha_b)?;
    let f1 = negativity_volume(&WignerGrid::sample_on(&grid, eigenstate_wigner_fn(1, 1.0)?));
    out.metric("entropy", m.entropy);
    out.metric("negativity_f1", f1);
    for (name, w, keep) in [("B", &m.b, Keep::B), ("C", &m.c, Keep::C)] {
        let dev = route_deviation(w, la, lb, alpha_a, alpha_b, keep)?;
        out.metric(&format!("negativity_{name}"), negativity_volume(w));
        out.metric(&format!("route_deviation_{name}"), dev);
        out.gates.push(Check::at_most(
            &format!("marginal {name} routes"),
            dev,
            1e-3,
            "joint marginal vs partial trace",
        ));
        out.gates.push(Check::at_most(
            &format!("marginal {name} normalisation"),
            (w.integral() - 1.0).abs(),
            1e-4,
            "",
        ));
        out.gates.push(wigner_bound(&format!("marginal {name}"), w));
        out.wigner(&format!("wigner_{name}.csv"), w)?;
    }
    Ok(())
}

fn invariant_suite(config: &ExperimentConfig, out: &mut Output) -> Result<()> {
    let seed = config.seed;
    let states = config.integer_or("states", 12)? as usize;
    let grid = grid_from(config, 128, 20.0)?;
    let routes = Grid1D::new(128, 24.0)?;
    let mut all = Vec::new();
    all.extend(checks::classical_switch(200, seed)?);
    all.push(checks::dirac_brackets(20, seed)?);
    all.extend(checks::switch_unitarity(states, grid, seed)?);
    all.push(checks::observable_dictionary(states, grid, seed)?);
    all.push(checks::inner_product_forms(states, grid, seed)?);
    all.extend(checks::trivialization(seed)?);
    all.extend(checks::dynamics_commutation(grid, 0.25, seed)?);
    let (entropy, value) = checks::entanglement(grid)?;
    all.extend(entropy);
    all.extend(checks::wigner_golden(
        Grid1D::new(128, 20.0)?,
        routes,
        (1.0, 1.0),
    )?);
    out.metric("switched_entropy", value);
    let report = serde_json::json!({
        "seed": seed,
        "passed": all.iter().all(|c| c.passed),
        "checks": all,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    out.write("report.json", &[], text.into_bytes())?;
    out.gates = all;
    Ok(())
}
