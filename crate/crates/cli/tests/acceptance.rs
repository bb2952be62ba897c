//! The ten acceptance criteria, one line each, without the libtest harness.
//! Exits non-zero on any failure.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qrf_cli::checks::{self, Check};
use qrf_cli::presets::preset;
use qrf_cli::{run_experiment, ExperimentConfig};
use qrf_core::grid::Grid1D;

const SEED: u64 = 20_240_531;

/// Entropy of the switched ground-state product at `α_A/α_B = 1`, frozen
/// from the Gaussian-mode oracle below.
const SWITCHED_ENTROPY: f64 = 0.553_303_299_720_515_7;

fn gaussian_mode_entropy(ratio: f64) -> f64 {
    let nu = ((1.0 + ratio) / ratio).sqrt();
    let (a, b) = ((nu + 1.0) / 2.0, (nu - 1.0) / 2.0);
    a * a.ln() - b * b.ln()
}

struct Outcome {
    checks: Vec<Check>,
    error: Option<String>,
}

impl From<Vec<Check>> for Outcome {
    fn from(checks: Vec<Check>) -> Self {
        Outcome {
            checks,
            error: None,
        }
    }
}

fn run(
    id: usize,
    title: &str,
    budget: Duration,
    body: impl FnOnce() -> Result<Vec<Check>, String>,
) -> bool {
    let start = Instant::now();
    let outcome = match body() {
        Ok(checks) => Outcome::from(checks),
        Err(e) => Outcome {
            checks: Vec::new(),
            error: Some(e),
        },
    };
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let passed = outcome.error.is_none() && in_time && outcome.checks.iter().all(|c| c.passed);
    println!(
        "criterion {id:>2} {} {title} ({:.2}s of {}s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    for c in &outcome.checks {
        println!(
            "    {} {}: {:e} (limit {:e}) {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance,
            c.detail
        );
    }
    if let Some(e) = outcome.error {
        println!("    error: {e}");
    }
    if !in_time {
        println!("    over the time budget");
    }
    passed
}

fn grid(n: usize, length: f64) -> Grid1D {
    Grid1D::new(n, length).unwrap()
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or("empty csv")?
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|v| v.parse::<f64>().map_err(|e| e.to_string()))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}

/// Runs a trajectory config and checks its CSVs directly.
fn trajectory_checks(config: &ExperimentConfig, label: &str) -> Result<(Vec<Check>, f64), String> {
    run_experiment(config).map_err(|e| e.to_string())?;
    let (header, analytic) = read_csv(&config.output_dir.join("trajectory_analytic.csv"))?;
    let (_, numeric) = read_csv(&config.output_dir.join("trajectory.csv"))?;
    if header != ["t", "x_A", "x_B", "q_B", "q_C"] || analytic.len() != numeric.len() {
        return Err(format!("{label}: unexpected layout {header:?}"));
    }
    let mut identity: f64 = 0.0;
    let mut against: f64 = 0.0;
    let mut max_qb: f64 = 0.0;
    for (a, n) in analytic.iter().zip(&numeric) {
        identity = identity
            .max((a[3] - (a[2] - a[1])).abs())
            .max((a[4] + a[1]).abs());
        against = against.max((3..5).map(|k| (a[k] - n[k]).abs()).fold(0.0, f64::max));
        max_qb = max_qb.max(a[3].abs()).max(n[3].abs());
    }
    Ok((
        vec![
            Check::at_most(
                &format!("{label} q_B = x_B - x_A, q_C = -x_A"),
                identity,
                1e-10,
                "closed form",
            ),
            Check::at_most(
                &format!("{label} integrator vs closed form"),
                against,
                1e-4,
                "dt = 1e-3",
            ),
        ],
        max_qb,
    ))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let mut all = true;

    all &= run(
        1,
        "classical switch correctness",
        Duration::from_secs(1),
        || checks::classical_switch(1000, SEED).map_err(|e| e.to_string()),
    );

    all &= run(2, "Dirac bracket table", Duration::from_secs(1), || {
        checks::dirac_brackets(100, SEED)
            .map(|c| vec![c])
            .map_err(|e| e.to_string())
    });

    all &= run(3, "trajectory figures", Duration::from_secs(10), || {
        let mut out = Vec::new();
        for name in ["fig3", "fig4"] {
            let config = preset(name)
                .map_err(|e| e.to_string())?
                .with_output_dir(tmp.path().join(name));
            out.extend(trajectory_checks(&config, name)?.0);
        }
        let in_phase = ExperimentConfig::parse(&format!(
            "kind = classical-trajectory\noutput_dir = {}\nomega_a = 1\nomega_b = 1\na0 = 1\nb0 = 1\nphi_a = 0\nphi_b = 0\nt_end = 4*pi\n",
            tmp.path().join("in_phase").display()
        ))
        .map_err(|e| e.to_string())?;
        let (checks, max_qb) = trajectory_checks(&in_phase, "in-phase")?;
        out.extend(checks);
        out.push(Check::at_most(
            "in-phase max |q_B|",
            max_qb,
            1e-10,
            "equal frequencies and phases",
        ));
        Ok(out)
    });

    all &= run(
        4,
        "quantum switch unitarity and backend equivalence",
        Duration::from_secs(60),
        || checks::switch_unitarity(100, grid(128, 20.0), SEED).map_err(|e| e.to_string()),
    );

    all &= run(5, "observable dictionary", Duration::from_secs(30), || {
        checks::observable_dictionary(20, grid(128, 20.0), SEED)
            .map(|c| vec![c])
            .map_err(|e| e.to_string())
    });

    all &= run(
        6,
        "physical inner product forms",
        Duration::from_secs(30),
        || {
            checks::inner_product_forms(50, grid(128, 20.0), SEED)
                .map(|c| vec![c])
                .map_err(|e| e.to_string())
        },
    );

    all &= run(
        7,
        "trivialization k-independence",
        Duration::from_secs(60),
        || checks::trivialization(SEED).map_err(|e| e.to_string()),
    );

    all &= run(
        8,
        "dynamics and frame switch commute",
        Duration::from_secs(60),
        || checks::dynamics_commutation(grid(128, 20.0), 1.0, SEED).map_err(|e| e.to_string()),
    );

    all &= run(
        9,
        "frame-dependent entanglement",
        Duration::from_secs(120),
        || {
            let (mut out, entropy) =
                checks::entanglement(grid(128, 24.0)).map_err(|e| e.to_string())?;
            out.push(Check::at_most(
                "frozen entropy vs Gaussian-mode oracle",
                (SWITCHED_ENTROPY - gaussian_mode_entropy(1.0)).abs(),
                1e-12,
                "",
            ));
            out.push(Check::at_most(
                "switched entropy vs frozen value",
                (entropy - SWITCHED_ENTROPY).abs(),
                1e-8,
                "n = 128, L = 24",
            ));
            Ok(out)
        },
    );

    all &= run(
        10,
        "Wigner golden forms and oracle triangle",
        Duration::from_secs(120),
        || {
            let mut out = checks::wigner_golden(grid(128, 20.0), grid(256, 48.0), (0.1, 1.0))
                .map_err(|e| e.to_string())?;
            let f0 = qrf_core::wigner::eigenstate_wigner_fn(0, 1.0).map_err(|e| e.to_string())?;
            out.push(Check::at_most(
                "f0(0,0) against 1/pi literal",
                (f0(0.0, 0.0) - 1.0 / PI).abs(),
                1e-9,
                "",
            ));
            Ok(out)
        },
    );

    if all {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failures above");
        ExitCode::FAILURE
    }
}
