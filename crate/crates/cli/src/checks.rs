//! Property checks shared by `qrf suite` and the acceptance tests. Each
//! returns the worst observed value against its tolerance.

use std::f64::consts::PI;

use num_complex::Complex64;
use qrf_core::classical::{
    classical_frame_switch, dirac_bracket, ExtendedPhasePoint, FrameLabel, OscillatorParams,
    ReducedPhasePoint,
};
use qrf_core::dirac::{
    physical_inner_product_in, reduced_labels, trivialization_family_check, PhysicalState,
};
use qrf_core::grid::random::{band_limited_state, random_state_with};
use qrf_core::grid::{fidelity, Grid1D, Observable, WaveFunction};
use qrf_core::switch::{
    conjugate_observable, dynamics_frame_commutation, oscillator_product_state, switch_frame,
    FrameSwitch, SwitchBackend,
};
use qrf_core::wigner::{
    closed_form_eigenstate_wigner, eigenstate_wigner_fn, entanglement_entropy, negativity_volume,
    route_deviation, switched_marginals, wigner_transform, DensityMatrix, Keep, WignerGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;

const LABELS: [FrameLabel; 3] = [FrameLabel::A, FrameLabel::B, FrameLabel::C];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed: value <= tolerance,
            value,
            tolerance,
            detail: detail.into(),
        }
    }
}

fn all_switches() -> Vec<FrameSwitch> {
    let mut out = Vec::new();
    for f in LABELS {
        for g in LABELS {
            if f != g {
                out.push(FrameSwitch::new(f, g).expect("distinct labels"));
            }
        }
    }
    out
}

fn third(f: FrameLabel, g: FrameLabel) -> FrameLabel {
    FrameLabel(3 - f.0 - g.0)
}

fn random_frame_state(
    grid: Grid1D,
    frame: FrameLabel,
    rng: &mut ChaCha8Rng,
) -> Result<WaveFunction> {
    let [a, b] = reduced_labels(frame)?;
    Ok(random_state_with(&[(a, grid), (b, grid)], frame, rng))
}

/// The closed-form switch `q'_F = −q_G`, `p'_F = −(p_G + p_T)`,
/// `q'_T = q_T − q_G`, `p'_T = p_T` against the library map (exact), and
/// the round trip (relative 1e−12).
pub fn classical_switch(points: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map_dev: f64 = 0.0;
    let mut trip_dev: f64 = 0.0;
    for i in 0..points {
        let sw = all_switches()[i % 6];
        let (f, g) = (sw.from(), sw.to());
        let t = third(f, g);
        let q: Vec<f64> = (0..2).map(|_| rng.random_range(-100.0..100.0)).collect();
        let p: Vec<f64> = (0..2).map(|_| rng.random_range(-100.0..100.0)).collect();
        let rp = ReducedPhasePoint::new(f, 3, q, p)?;
        let out = classical_frame_switch(&rp, g)?;
        let (qg, pg) = (rp.position(g).unwrap(), rp.momentum(g).unwrap());
        let (qt, pt) = (rp.position(t).unwrap(), rp.momentum(t).unwrap());
        for (got, want) in [
            (out.position(f).unwrap(), -qg),
            (out.momentum(f).unwrap(), -(pg + pt)),
            (out.position(t).unwrap(), qt - qg),
            (out.momentum(t).unwrap(), pt),
        ] {
            map_dev = map_dev.max((got - want).abs());
        }
        let back = classical_frame_switch(&out, f)?;
        for (a, b) in back
            .q()
            .iter()
            .chain(back.p())
            .zip(rp.q().iter().chain(rp.p()))
        {
            trip_dev = trip_dev.max((a - b).abs() / (1.0 + b.abs()));
        }
    }
    Ok(vec![
        Check::at_most(
            "classical switch closed form",
            map_dev,
            0.0,
            format!("{points} points, all six frame pairs"),
        ),
        Check::at_most("classical switch round trip", trip_dev, 1e-12, "relative"),
    ])
}

/// `{q_A, p_A}_D = 0` and `{q_i, p_j}_D = δ_ij` in frame A on random points
/// of the gauge-fixed constraint surface.
pub fn dirac_brackets(points: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev: f64 = 0.0;
    for _ in 0..points {
        let q = vec![
            0.0,
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        ];
        let (pb, pc) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let point = ExtendedPhasePoint::new(q, vec![-(pb + pc), pb, pc])?;
        let qa = |x: &ExtendedPhasePoint| x.q[0];
        let pa = |x: &ExtendedPhasePoint| x.p[0];
        dev = dev.max(dirac_bracket(qa, pa, &point, FrameLabel::A).abs());
        for i in 1..3 {
            for j in 1..3 {
                let v = dirac_bracket(
                    |x: &ExtendedPhasePoint| x.q[i],
                    |x: &ExtendedPhasePoint| x.p[j],
                    &point,
                    FrameLabel::A,
                );
                dev = dev.max((v - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    Ok(Check::at_most(
        "Dirac bracket table",
        dev,
        1e-6,
        format!("{points} on-surface points, frame A"),
    ))
}

/// Norm drift and parity-shear against compositional fidelity over seeded
/// random states, cycling through all six switches.
pub fn switch_unitarity(states: usize, grid: Grid1D, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut drift, mut infidelity): (f64, f64) = (0.0, 0.0);
    for i in 0..states {
        let sw = all_switches()[i % 6];
        let psi = random_frame_state(grid, sw.from(), &mut rng)?;
        let shear = switch_frame(&psi, &sw)?;
        let composed = switch_frame(&psi, &sw.with_backend(SwitchBackend::Compositional))?;
        drift = drift
            .max((shear.norm() - psi.norm()).abs())
            .max((composed.norm() - psi.norm()).abs());
        infidelity = infidelity.max(1.0 - fidelity(&shear, &composed)?);
    }
    let detail = format!("{states} states on {0}x{0}", grid.n());
    Ok(vec![
        Check::at_most("switch norm drift", drift, 1e-10, detail.clone()),
        Check::at_most("backend infidelity", infidelity, 1e-8, detail),
    ])
}

/// `⟨ψ|O|ψ⟩ = ⟨Sψ|O′|Sψ⟩` for `O ∈ {q_T, q_G, p_T, p_G}`.
pub fn observable_dictionary(states: usize, grid: Grid1D, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev: f64 = 0.0;
    for i in 0..states {
        let sw = all_switches()[i % 6];
        let (g, t) = (sw.to(), third(sw.from(), sw.to()));
        let psi = random_frame_state(grid, sw.from(), &mut rng)?;
        let out = switch_frame(&psi, &sw)?;
        for obs in [
            Observable::q(t),
            Observable::q(g),
            Observable::p(t),
            Observable::p(g),
        ] {
            let before = obs.expectation(&psi)?;
            let after = conjugate_observable(&obs, &sw)?.expectation(&out)?;
            dev = dev.max((before - after).abs());
        }
    }
    Ok(Check::at_most(
        "observable dictionary",
        dev,
        1e-8,
        format!("4 lines x {states} states"),
    ))
}

/// Pairwise agreement of the physical inner product reduced in A, B and C.
pub fn inner_product_forms(states: usize, grid: Grid1D, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev: f64 = 0.0;
    for i in 0..states {
        let frame = LABELS[i % 3];
        let x = PhysicalState::new(random_frame_state(grid, frame, &mut rng)?)?;
        let y = PhysicalState::new(random_frame_state(grid, LABELS[(i + 1) % 3], &mut rng)?)?;
        let forms: Vec<Complex64> = LABELS
            .iter()
            .map(|&f| physical_inner_product_in(&x, &y, f))
            .collect::<qrf_core::Result<_>>()?;
        for a in 0..3 {
            for b in a + 1..3 {
                dev = dev.max((forms[a] - forms[b]).norm());
            }
        }
    }
    Ok(Check::at_most(
        "physical inner product forms",
        dev,
        1e-8,
        format!("{states} state pairs"),
    ))
}

/// Trivialization with `k ∈ {0, dp, 5dp}` on a 16³ dense oracle.
pub fn trivialization(seed: u64) -> Result<Vec<Check>> {
    let grid = Grid1D::new(16, 12.0)?;
    let [b, c] = reduced_labels(FrameLabel::A)?;
    let state = PhysicalState::new(band_limited_state(
        &[(b, grid), (c, grid)],
        FrameLabel::A,
        seed,
    ))?;
    let ks = [0.0, grid.dp(), 5.0 * grid.dp()];
    let reports = ks
        .iter()
        .map(|&k| trivialization_family_check(&state, k))
        .collect::<qrf_core::Result<Vec<_>>>()?;
    let mut infidelity: f64 = 0.0;
    let mut constraint: f64 = 0.0;
    for r in &reports {
        infidelity = infidelity
            .max(1.0 - fidelity(&r.reduced, &reports[0].reduced)?)
            .max(1.0 - r.fidelity);
        constraint = constraint.max(r.constraint_deviation);
    }
    Ok(vec![
        Check::at_most(
            "trivialization k-independence",
            infidelity,
            1e-8,
            "k = 0, dp, 5dp",
        ),
        Check::at_most(
            "conjugated constraint",
            constraint,
            1e-8,
            "16^3 dense oracle, unwrapped columns",
        ),
    ])
}

/// Evolve-then-switch against switch-then-evolve for the two-spring system,
/// and energy of switched eigenstate products.
pub fn dynamics_commutation(grid: Grid1D, t: f64, seed: u64) -> Result<Vec<Check>> {
    let params = OscillatorParams::from_frequencies(1.0, 1.5, 1.0, 1.0, 0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = random_frame_state(grid, FrameLabel::C, &mut rng)?;
    let infidelity = 1.0 - dynamics_frame_commutation(&psi, &params, t)?.fidelity;
    let mut energy: f64 = 0.0;
    for (la, lb) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
        let eig = oscillator_product_state(grid, params.alpha_a(), params.alpha_b(), la, lb)?
            .normalized()?;
        energy = energy.max(dynamics_frame_commutation(&eig, &params, 0.0)?.relative_energy_error);
    }
    Ok(vec![
        Check::at_most(
            "evolve/switch infidelity",
            infidelity,
            1e-6,
            format!("t = {t}"),
        ),
        Check::at_most(
            "switched eigenstate energy",
            energy,
            1e-6,
            "relative, levels 0 and 1",
        ),
    ])
}

/// Entropy before and after switching a ground-state product, and reduced
/// negativity of the excited marginals.
pub fn entanglement(grid: Grid1D) -> Result<(Vec<Check>, f64)> {
    let psi = oscillator_product_state(grid, 1.0, 1.0, 0, 0)?.normalized()?;
    let before = entanglement_entropy(&psi, FrameLabel::A)?;
    let after = entanglement_entropy(
        &switch_frame(&psi, &FrameSwitch::new(FrameLabel::C, FrameLabel::A)?)?,
        FrameLabel::B,
    )?;
    let f1 = negativity_volume(&WignerGrid::sample_on(&grid, eigenstate_wigner_fn(1, 1.0)?));
    let mut ratio: f64 = 0.0;
    for (la, lb) in [(0, 1), (1, 0)] {
        let m = switched_marginals(grid, la, lb, 1.0, 1.0)?;
        ratio = ratio
            .max(negativity_volume(&m.b) / f1)
            .max(negativity_volume(&m.c) / f1);
    }
    let checks = vec![
        Check::at_most("product state entropy", before, 1e-10, "frame C"),
        Check {
            name: "switched state entropy".into(),
            passed: after > 0.0,
            value: after,
            tolerance: 0.0,
            detail: "frame A, must be positive".into(),
        },
        Check {
            name: "marginal negativity ratio".into(),
            passed: ratio < 1.0,
            value: ratio,
            tolerance: 1.0,
            detail: "worst excited marginal over f1, must be below 1".into(),
        },
    ];
    Ok((checks, after))
}

/// Wigner transforms of grid eigenstates against the closed forms, the
/// closed forms at the origin, and the two routes to switched marginals.
pub fn wigner_golden(grid: Grid1D, routes: Grid1D, route_params: (f64, f64)) -> Result<Vec<Check>> {
    let mut dev: f64 = 0.0;
    for level in [0u8, 1] {
        let f = qrf_core::switch::oscillator_eigenfunction(level, 1.0)?;
        let psi = WaveFunction::from_position_fn(&[(FrameLabel::B, grid)], FrameLabel::A, |x| {
            Complex64::new(f(x[0]), 0.0)
        })?;
        let w = wigner_transform(&DensityMatrix::from_pure(&psi)?)?;
        dev = dev.max(w.max_deviation(&closed_form_eigenstate_wigner(level, 1.0, &grid)?)?);
    }
    let origin = (eigenstate_wigner_fn(0, 1.0)?(0.0, 0.0) - 1.0 / PI)
        .abs()
        .max((eigenstate_wigner_fn(1, 1.0)?(0.0, 0.0) + 1.0 / PI).abs());
    let (alpha_a, alpha_b) = route_params;
    let m = switched_marginals(routes, 0, 0, alpha_a, alpha_b)?;
    let mut route: f64 = 0.0;
    for (w, keep) in [(&m.b, Keep::B), (&m.c, Keep::C)] {
        route = route.max(route_deviation(w, 0, 0, alpha_a, alpha_b, keep)?);
    }
    Ok(vec![
        Check::at_most(
            "Wigner transform vs closed form",
            dev,
            1e-6,
            format!("levels 0 and 1 on n = {}", grid.n()),
        ),
        Check::at_most(
            "closed forms at origin",
            origin,
            1e-9,
            "f0 = 1/pi, f1 = -1/pi",
        ),
        Check::at_most(
            "marginal vs partial-trace route",
            route,
            1e-3,
            format!("alpha_A/alpha_B = {}", alpha_a / alpha_b),
        ),
    ])
}
