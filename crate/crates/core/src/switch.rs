//! The quantum frame switch between two-particle reductions.
//!
//! For a switch from frame `F` to frame `G` with third particle `T`,
//!
//! ```text
//! (S ψ)(q_F, q_T) = ψ(q_G = −q_F, q_T − q_F)
//! ```
//!
//! Two backends compute it. [`SwitchBackend::ParityShear`] applies the shear
//! `exp(i q_G p_T)`, reflects the `G` axis and relabels it `F`;
//! [`SwitchBackend::Compositional`] substitutes momenta as in
//! [`crate::dirac::reexpress`]. Both are exact permutations on a
//! commensurate grid.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::classical::{FrameLabel, OscillatorParams};
use crate::dirac::{reduced_labels, reduced_quantum_hamiltonian, substitute_momenta, PARTICLES};
use crate::error::{Error, Result};
use crate::grid::{apply_shear_phase, fidelity, AxisSpec, Factor, Observable, Op, WaveFunction};

/// Time step of the split-step evolution in [`dynamics_frame_commutation`].
pub const COMMUTATION_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwitchBackend {
    Compositional,
    #[default]
    ParityShear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSwitch {
    from: FrameLabel,
    to: FrameLabel,
    backend: SwitchBackend,
}

impl FrameSwitch {
    pub fn new(from: FrameLabel, to: FrameLabel) -> Result<Self> {
        let from = FrameLabel::new(from.0, PARTICLES)?;
        let to = FrameLabel::new(to.0, PARTICLES)?;
        if from == to {
            return Err(Error::SameFrame(from));
        }
        Ok(Self {
            from,
            to,
            backend: SwitchBackend::default(),
        })
    }

    pub fn with_backend(mut self, backend: SwitchBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn from(&self) -> FrameLabel {
        self.from
    }

    pub fn to(&self) -> FrameLabel {
        self.to
    }

    pub fn backend(&self) -> SwitchBackend {
        self.backend
    }

    pub fn inverse(&self) -> Self {
        Self {
            from: self.to,
            to: self.from,
            backend: self.backend,
        }
    }

    fn third(&self) -> FrameLabel {
        FrameLabel(PARTICLES * (PARTICLES - 1) / 2 - self.from.0 - self.to.0)
    }
}

/// Applies the switch; the output keeps the input's per-slot representations.
pub fn switch_frame(psi: &WaveFunction, sw: &FrameSwitch) -> Result<WaveFunction> {
    if psi.frame() != sw.from {
        return Err(Error::FrameMismatch {
            expected: sw.from,
            actual: psi.frame(),
        });
    }
    if psi.labels() != reduced_labels(sw.from)? {
        return Err(Error::GridMismatch(format!(
            "axes do not match a reduction in frame {}",
            sw.from
        )));
    }
    let reprs = psi.representations();
    let out = match sw.backend {
        SwitchBackend::Compositional => substitute_momenta(psi, sw.to)?,
        SwitchBackend::ParityShear => parity_shear(psi, sw)?,
    };
    out.to_representations(&reprs)
}

fn parity_shear(psi: &WaveFunction, sw: &FrameSwitch) -> Result<WaveFunction> {
    let (f, g, t) = (sw.from, sw.to, sw.third());
    let sheared = apply_shear_phase(psi, g, t, 1)?;
    let dg = sheared.axis_index(g)?;
    let grid = sheared.axes()[dg].grid;
    let src = sheared.amplitudes();
    let shape = src.shape().to_vec();
    let new_labels = reduced_labels(g)?;
    // slot of each new label in the sheared array; g's slot becomes f
    let slot_of = |label: FrameLabel| if label == f { dg } else { 1 - dg };
    let perm = [slot_of(new_labels[0]), slot_of(new_labels[1])];
    let amps = ArrayD::from_shape_fn(IxDyn(&[shape[perm[0]], shape[perm[1]]]), |idx| {
        let mut from = [0usize; 2];
        from[perm[0]] = idx[0];
        from[perm[1]] = idx[1];
        from[dg] = grid.reflect_index(from[dg]);
        src[[from[0], from[1]]]
    });
    let axes: Vec<AxisSpec> = perm
        .iter()
        .zip(new_labels)
        .map(|(&s, label)| AxisSpec {
            label,
            ..sheared.axes()[s]
        })
        .collect();
    WaveFunction::new(axes, amps, g)
}

/// `S O S†` written in the new frame's operators:
/// `q_T ↦ q_T − q_F`, `q_G ↦ −q_F`, `p_T ↦ p_T`, `p_G ↦ −p_T − p_F`.
pub fn conjugate_observable(obs: &Observable, sw: &FrameSwitch) -> Result<Observable> {
    let (f, g, t) = (sw.from, sw.to, sw.third());
    obs.substitute(|Factor { axis, op }| match (axis, op) {
        (a, Op::Q) if a == t => Ok(Observable::q(t) - Observable::q(f)),
        (a, Op::Q) if a == g => Ok(-Observable::q(f)),
        (a, Op::P) if a == t => Ok(Observable::p(t)),
        (a, Op::P) if a == g => Ok(-(Observable::p(t) + Observable::p(f))),
        _ => Err(Error::UnsupportedObservable(format!(
            "axis {axis} is not a reduced axis of frame {}",
            sw.from
        ))),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutationReport {
    /// Fidelity of evolve-then-switch against switch-then-evolve.
    pub fidelity: f64,
    /// `⟨H_C⟩` of the input.
    pub energy_before: f64,
    /// `⟨H_A⟩` of the switched input.
    pub energy_after: f64,
    pub relative_energy_error: f64,
}

/// Compares evolution under the frame-C Hamiltonian followed by the switch
/// to A with the switch followed by evolution under the frame-A Hamiltonian.
pub fn dynamics_frame_commutation(
    psi: &WaveFunction,
    params: &OscillatorParams,
    t: f64,
) -> Result<CommutationReport> {
    params.validate()?;
    let system = params.system()?;
    let potential = params.potential();
    let h_c = reduced_quantum_hamiltonian(FrameLabel::C, &potential, &system)?;
    let h_a = reduced_quantum_hamiltonian(FrameLabel::A, &potential, &system)?;
    let sw = FrameSwitch::new(FrameLabel::C, FrameLabel::A)?;
    let switched = switch_frame(psi, &sw)?;
    let (fid, energy_before, energy_after) = if t == 0.0 {
        (1.0, h_c.expectation(psi)?, h_a.expectation(&switched)?)
    } else {
        let evolve_first = switch_frame(&h_c.evolve(psi, t, COMMUTATION_STEP)?, &sw)?;
        let switch_first = h_a.evolve(&switched, t, COMMUTATION_STEP)?;
        let evolve_first = evolve_first.to_representations(&switch_first.representations())?;
        (
            fidelity(&evolve_first, &switch_first)?,
            h_c.expectation(psi)?,
            h_a.expectation(&switched)?,
        )
    };
    Ok(CommutationReport {
        fidelity: fid,
        energy_before,
        energy_after,
        relative_energy_error: ((energy_after - energy_before) / energy_before).abs(),
    })
}

/// Product of oscillator eigenstates `ψ_A^{j}(q_A) ψ_B^{k}(q_B)` (levels 0 or
/// 1) in frame C with widths `α_A`, `α_B`.
pub fn oscillator_product_state(
    grid: crate::grid::Grid1D,
    alpha_a: f64,
    alpha_b: f64,
    level_a: u8,
    level_b: u8,
) -> Result<WaveFunction> {
    let a = oscillator_eigenfunction(level_a, alpha_a)?;
    let b = oscillator_eigenfunction(level_b, alpha_b)?;
    WaveFunction::from_position_fn(
        &[(FrameLabel::A, grid), (FrameLabel::B, grid)],
        FrameLabel::C,
        |q| Complex64::new(a(q[0]) * b(q[1]), 0.0),
    )
}

/// Normalised harmonic-oscillator eigenfunction of level 0 or 1 with
/// inverse squared width `alpha` (ħ = 1).
pub fn oscillator_eigenfunction(level: u8, alpha: f64) -> Result<impl Fn(f64) -> f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidSystem(format!(
            "oscillator width must be positive, got {alpha}"
        )));
    }
    if level > 1 {
        return Err(Error::InvalidSystem(format!(
            "only levels 0 and 1 are supported, got {level}"
        )));
    }
    let norm = (alpha / std::f64::consts::PI).powf(0.25);
    Ok(move |x: f64| {
        let g = norm * (-0.5 * alpha * x * x).exp();
        if level == 0 {
            g
        } else {
            (2.0 * alpha).sqrt() * x * g
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{classical_frame_switch, ReducedPhasePoint};
    use crate::grid::random::random_state;
    use crate::grid::{inner_product, max_deviation, Grid1D, Representation};

    const A: FrameLabel = FrameLabel::A;
    const B: FrameLabel = FrameLabel::B;
    const C: FrameLabel = FrameLabel::C;

    fn grid() -> Grid1D {
        Grid1D::new(128, 20.0).unwrap()
    }

    fn reduced_state(frame: FrameLabel, seed: u64) -> WaveFunction {
        let [a, b] = reduced_labels(frame).unwrap();
        random_state(&[(a, grid()), (b, grid())], frame, seed)
    }

    fn all_switches() -> Vec<FrameSwitch> {
        let mut v = Vec::new();
        for f in [A, B, C] {
            for g in [A, B, C] {
                if f != g {
                    v.push(FrameSwitch::new(f, g).unwrap());
                }
            }
        }
        v
    }

    #[test]
    fn closed_form_of_the_switch() {
        let g = grid();
        let f = |u: f64, v: f64| {
            Complex64::new((-(u - 0.3).powi(2) - 0.7 * (v + 0.4).powi(2)).exp(), 0.0)
        };
        let psi = WaveFunction::from_position_fn(&[(B, g), (C, g)], A, |q| f(q[0], q[1])).unwrap();
        let sw = FrameSwitch::new(A, C).unwrap();
        let out = switch_frame(&psi, &sw).unwrap();
        // ψ_AB|C(q_A, q_B) = ψ_BC|A(q_B − q_A, −q_A)
        let expected =
            WaveFunction::from_position_fn(&[(A, g), (B, g)], C, |q| f(q[1] - q[0], -q[0]))
                .unwrap();
        assert!(max_deviation(&out, &expected).unwrap() < 1e-10);
        let via_momenta =
            switch_frame(&psi, &sw.with_backend(SwitchBackend::Compositional)).unwrap();
        assert!(max_deviation(&via_momenta, &expected).unwrap() < 1e-10);
    }

    #[test]
    fn product_ground_state_maps_to_entangled_form() {
        let g = grid();
        let (aa, ab) = (0.8, 1.5);
        let psi = oscillator_product_state(g, aa, ab, 0, 0).unwrap();
        let out = switch_frame(&psi, &FrameSwitch::new(C, A).unwrap()).unwrap();
        let fa = oscillator_eigenfunction(0, aa).unwrap();
        let fb = oscillator_eigenfunction(0, ab).unwrap();
        let expected = WaveFunction::from_position_fn(&[(B, g), (C, g)], A, |q| {
            Complex64::new(fa(-q[1]) * fb(q[0] - q[1]), 0.0)
        })
        .unwrap();
        assert!(max_deviation(&out, &expected).unwrap() < 1e-10);
    }

    #[test]
    fn backends_agree_and_preserve_norm() {
        for (i, sw) in all_switches().into_iter().enumerate() {
            let psi = reduced_state(sw.from(), i as u64);
            let a = switch_frame(&psi, &sw).unwrap();
            let b = switch_frame(&psi, &sw.with_backend(SwitchBackend::Compositional)).unwrap();
            assert!((a.norm() - psi.norm()).abs() < 1e-10);
            assert!((b.norm() - psi.norm()).abs() < 1e-10);
            assert!(max_deviation(&a, &b).unwrap() < 1e-8);
            let back = switch_frame(&a, &sw.inverse()).unwrap();
            assert!(max_deviation(&back, &psi).unwrap() < 1e-10);
        }
    }

    #[test]
    fn representation_is_kept_per_slot() {
        let psi = reduced_state(A, 3)
            .to_representation(C, Representation::Momentum)
            .unwrap();
        let out = switch_frame(&psi, &FrameSwitch::new(A, C).unwrap()).unwrap();
        assert_eq!(out.representations(), psi.representations());
        assert_eq!(out.labels(), vec![A, B]);
    }

    #[test]
    fn errors() {
        let psi = reduced_state(A, 0);
        assert!(matches!(
            switch_frame(&psi, &FrameSwitch::new(B, C).unwrap()),
            Err(Error::FrameMismatch { .. })
        ));
        assert!(matches!(FrameSwitch::new(A, A), Err(Error::SameFrame(_))));
        let sw = FrameSwitch::new(A, C).unwrap();
        assert!(matches!(
            conjugate_observable(&Observable::q(A), &sw),
            Err(Error::UnsupportedObservable(_))
        ));
    }

    #[test]
    fn dictionary_lines() {
        let sw = FrameSwitch::new(A, C).unwrap();
        assert_eq!(
            conjugate_observable(&Observable::q(B), &sw).unwrap(),
            Observable::q(B) - Observable::q(A)
        );
        assert_eq!(
            conjugate_observable(&Observable::q(C), &sw).unwrap(),
            -Observable::q(A)
        );
        assert_eq!(
            conjugate_observable(&Observable::p(B), &sw).unwrap(),
            Observable::p(B)
        );
        assert_eq!(
            conjugate_observable(&Observable::p(C), &sw).unwrap(),
            -Observable::p(B) - Observable::p(A)
        );
    }

    #[test]
    fn dictionary_matches_classical_switch() {
        let sw = FrameSwitch::new(A, C).unwrap();
        let rp = ReducedPhasePoint::new(A, 3, vec![0.7, -1.1], vec![0.4, 2.3]).unwrap();
        let cp = classical_frame_switch(&rp, C).unwrap();
        let value = |obs: &Observable| -> f64 {
            obs.terms()
                .iter()
                .map(|t| {
                    t.coef.re
                        * t.factors
                            .iter()
                            .map(|f| match f.op {
                                Op::Q => cp.position(f.axis).unwrap(),
                                Op::P => cp.momentum(f.axis).unwrap(),
                            })
                            .product::<f64>()
                })
                .sum()
        };
        for (obs, old) in [
            (Observable::q(B), rp.position(B).unwrap()),
            (Observable::q(C), rp.position(C).unwrap()),
            (Observable::p(B), rp.momentum(B).unwrap()),
            (Observable::p(C), rp.momentum(C).unwrap()),
        ] {
            let new = value(&conjugate_observable(&obs, &sw).unwrap());
            assert!((new - old).abs() < 1e-12);
        }
    }

    #[test]
    fn expectation_invariance() {
        let obs = Observable::q(B).pow(2)
            + Observable::weyl_qp(C)
            + (Observable::p(B) * Observable::q(C)).scale(0.5);
        for sw in all_switches().into_iter().filter(|s| s.from() == A) {
            let obs_new = conjugate_observable(&obs, &sw).unwrap();
            for seed in 0..3 {
                let psi = reduced_state(A, seed);
                let before = obs.expectation(&psi).unwrap();
                let after = obs_new
                    .expectation(&switch_frame(&psi, &sw).unwrap())
                    .unwrap();
                assert!((before - after).abs() < 1e-8, "{before} {after}");
            }
        }
    }

    #[test]
    fn commutation_with_dynamics() {
        let params = OscillatorParams::from_frequencies(1.0, 1.3, 1.0, 1.0, 0.0, 0.0);
        let psi =
            oscillator_product_state(grid(), params.alpha_a(), params.alpha_b(), 0, 0).unwrap();
        let r0 = dynamics_frame_commutation(&psi, &params, 0.0).unwrap();
        assert_eq!(r0.fidelity, 1.0);
        let r = dynamics_frame_commutation(&psi, &params, 0.2).unwrap();
        assert!(r.fidelity >= 1.0 - 1e-6);
        assert!(r.relative_energy_error < 1e-6);
        let expected = 0.5 * (params.omega_a() + params.omega_b());
        assert!((r.energy_before - expected).abs() < 1e-6);
        assert!(inner_product(&psi, &psi).unwrap().re > 0.0);
    }
}
