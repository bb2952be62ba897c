//! Hamiltonians and trajectories of the reduced classical theory.

use serde::{Deserialize, Serialize};

use super::{
    classical_frame_switch, embed_reduced, total_momentum, ExtendedPhasePoint, FrameLabel,
    ParticleSystem, Potential, ReducedPhasePoint, Spring,
};
use crate::error::{Error, Result};

/// Total Hamiltonian of unit-mass particles with Lagrange multiplier `λ`:
/// `½ Σ p_i² + V(q) + λ P`.
pub fn total_hamiltonian(point: &ExtendedPhasePoint, potential: &Potential, lambda: f64) -> f64 {
    0.5 * point.p.iter().map(|p| p * p).sum::<f64>()
        + potential.value(&point.q)
        + lambda * total_momentum(point)
}

/// Reduced Hamiltonian in the frame of `rp.frame()`.
///
/// With masses `m_i` and frame mass `m_F`:
/// `½ Σ (1/m_i + 1/m_F) p_i² + Σ_{i<j} p_i p_j / m_F + V`, where `V` is
/// evaluated on the gauge-fixed configuration (`q_F = 0`). For unit masses
/// this reduces to `Σ p_i² + Σ_{i<j} p_i p_j + V`.
pub fn reduced_hamiltonian(
    rp: &ReducedPhasePoint,
    potential: &Potential,
    system: &ParticleSystem,
) -> f64 {
    kinetic_energy(rp.p(), rp.labels(), rp.frame(), system) + potential.value(&embed_reduced(rp).q)
}

fn kinetic_energy(
    p: &[f64],
    labels: &[FrameLabel],
    frame: FrameLabel,
    system: &ParticleSystem,
) -> f64 {
    let inv_frame = 1.0 / system.mass(frame);
    let diag: f64 = p
        .iter()
        .zip(labels)
        .map(|(pi, l)| 0.5 * (1.0 / system.mass(*l) + inv_frame) * pi * pi)
        .sum();
    let mut cross = 0.0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            cross += p[i] * p[j];
        }
    }
    diag + cross * inv_frame
}

/// `∂T/∂p_i = p_i/m_i + (Σ_j p_j)/m_F`.
fn velocities(
    p: &[f64],
    labels: &[FrameLabel],
    frame: FrameLabel,
    system: &ParticleSystem,
    out: &mut [f64],
) {
    let total: f64 = p.iter().sum();
    let inv_frame = 1.0 / system.mass(frame);
    for ((o, pi), l) in out.iter_mut().zip(p).zip(labels) {
        *o = pi / system.mass(*l) + total * inv_frame;
    }
}

/// Splitting scheme for the separable reduced Hamiltonian `T(p) + V(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Integrator {
    /// Strang splitting (kick–drift–kick leapfrog), second order.
    #[default]
    Leapfrog,
    /// Triple-jump composition of three leapfrog steps, fourth order.
    Yoshida4,
}

impl Integrator {
    fn substeps(self) -> &'static [f64] {
        const W1: f64 = 1.351_207_191_959_657_8; // 1 / (2 − 2^{1/3})
        const W0: f64 = -1.702_414_383_919_315_3; // −2^{1/3} / (2 − 2^{1/3})
        match self {
            Integrator::Leapfrog => &[1.0],
            Integrator::Yoshida4 => &[W1, W0, W1],
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Integrator::Leapfrog => 2,
            Integrator::Yoshida4 => 4,
        }
    }
}

/// A sampled reduced trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<ReducedPhasePoint>,
    frame: FrameLabel,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<ReducedPhasePoint>) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                got: states.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSystem(
                "trajectory times must increase strictly".into(),
            ));
        }
        let frame = states[0].frame();
        if let Some(bad) = states.iter().find(|s| s.frame() != frame) {
            return Err(Error::FrameMismatch {
                expected: frame,
                actual: bad.frame(),
            });
        }
        Ok(Self {
            times,
            states,
            frame,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ReducedPhasePoint] {
        &self.states
    }

    pub fn frame(&self) -> FrameLabel {
        self.frame
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Position series of one particle; `None` if it is the frame.
    pub fn positions(&self, label: FrameLabel) -> Option<Vec<f64>> {
        self.states.iter().map(|s| s.position(label)).collect()
    }

    pub fn momenta(&self, label: FrameLabel) -> Option<Vec<f64>> {
        self.states.iter().map(|s| s.momentum(label)).collect()
    }

    /// Applies the classical frame switch to every sample.
    pub fn switch_frame(&self, new_frame: FrameLabel) -> Result<Trajectory> {
        let states = self
            .states
            .iter()
            .map(|s| classical_frame_switch(s, new_frame))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.times.clone(), states)
    }
}

struct Stepper<'a> {
    potential: &'a Potential,
    system: &'a ParticleSystem,
    frame: FrameLabel,
    labels: Vec<FrameLabel>,
    full_q: Vec<f64>,
    grad: Vec<f64>,
    vel: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(rp: &ReducedPhasePoint, potential: &'a Potential, system: &'a ParticleSystem) -> Self {
        let n = rp.n();
        Self {
            potential,
            system,
            frame: rp.frame(),
            labels: rp.labels().to_vec(),
            full_q: vec![0.0; n],
            grad: vec![0.0; n],
            vel: vec![0.0; n - 1],
        }
    }

    /// `p ← p − h ∂V/∂q` at reduced positions `q` (frame pinned at the origin).
    fn kick(&mut self, q: &[f64], p: &mut [f64], h: f64) {
        self.full_q[self.frame.0] = 0.0;
        for (k, l) in self.labels.iter().enumerate() {
            self.full_q[l.0] = q[k];
        }
        self.potential.gradient_into(&self.full_q, &mut self.grad);
        for (k, l) in self.labels.iter().enumerate() {
            p[k] -= h * self.grad[l.0];
        }
    }

    /// Exact free flow for time `h`.
    fn drift(&mut self, q: &mut [f64], p: &[f64], h: f64) {
        velocities(p, &self.labels, self.frame, self.system, &mut self.vel);
        for (qk, vk) in q.iter_mut().zip(&self.vel) {
            *qk += h * vk;
        }
    }

    fn leapfrog(&mut self, q: &mut [f64], p: &mut [f64], h: f64) {
        self.kick(q, p, 0.5 * h);
        self.drift(q, p, h);
        self.kick(q, p, 0.5 * h);
    }

    fn step(&mut self, q: &mut [f64], p: &mut [f64], h: f64, integrator: Integrator) {
        for w in integrator.substeps() {
            self.leapfrog(q, p, w * h);
        }
    }
}

/// Integrates the reduced Hamilton equations with the leapfrog splitting.
pub fn integrate_reduced(
    initial: &ReducedPhasePoint,
    potential: &Potential,
    system: &ParticleSystem,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_reduced_with(
        initial,
        potential,
        system,
        t_final,
        dt,
        Integrator::Leapfrog,
    )
}

/// Integrates from `t = 0` to `t_final` with uniform steps no longer than
/// `dt`; samples are recorded after every step.
pub fn integrate_reduced_with(
    initial: &ReducedPhasePoint,
    potential: &Potential,
    system: &ParticleSystem,
    t_final: f64,
    dt: f64,
    integrator: Integrator,
) -> Result<Trajectory> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidStep(dt));
    }
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::InvalidSystem(format!(
            "final time must be non-negative, got {t_final}"
        )));
    }
    check_sizes(initial, potential, system)?;

    let steps = (t_final / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 {
        0.0
    } else {
        t_final / steps as f64
    };
    let mut stepper = Stepper::new(initial, potential, system);
    let mut state = initial.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(state.clone());
    for k in 1..=steps {
        let mut q = state.q().to_vec();
        let mut p = state.p().to_vec();
        stepper.step(&mut q, &mut p, h, integrator);
        state.q_mut().copy_from_slice(&q);
        state.p_mut().copy_from_slice(&p);
        times.push(k as f64 * h);
        states.push(state.clone());
    }
    Trajectory::new(times, states)
}

fn check_sizes(
    rp: &ReducedPhasePoint,
    potential: &Potential,
    system: &ParticleSystem,
) -> Result<()> {
    for got in [potential.n(), system.n()] {
        if got != rp.n() {
            return Err(Error::DimensionMismatch {
                expected: rp.n(),
                got,
            });
        }
    }
    Ok(())
}

/// Parameters of the two-oscillator model: springs join A–C (`k_a`) and
/// B–C (`k_b`); amplitudes and phases describe the motion seen from C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub m_a: f64,
    pub m_b: f64,
    pub m_c: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub a0: f64,
    pub b0: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl OscillatorParams {
    /// Mass of the heavy particle C used when only frequencies are given.
    pub const HEAVY_MASS: f64 = 1e9;

    /// Unit masses for A and B, `k_i = ω_i²`, heavy C.
    pub fn from_frequencies(
        omega_a: f64,
        omega_b: f64,
        a0: f64,
        b0: f64,
        phi_a: f64,
        phi_b: f64,
    ) -> Self {
        Self {
            m_a: 1.0,
            m_b: 1.0,
            m_c: Self::HEAVY_MASS,
            k_a: omega_a * omega_a,
            k_b: omega_b * omega_b,
            a0,
            b0,
            phi_a,
            phi_b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m_a", self.m_a),
            ("m_b", self.m_b),
            ("m_c", self.m_c),
            ("k_a", self.k_a),
            ("k_b", self.k_b),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSystem(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn omega_a(&self) -> f64 {
        (self.k_a / self.m_a).sqrt()
    }

    pub fn omega_b(&self) -> f64 {
        (self.k_b / self.m_b).sqrt()
    }

    /// Inverse squared width `m ω` (ħ = 1) of A's oscillator eigenstates.
    pub fn alpha_a(&self) -> f64 {
        self.m_a * self.omega_a()
    }

    pub fn alpha_b(&self) -> f64 {
        self.m_b * self.omega_b()
    }

    pub fn system(&self) -> Result<ParticleSystem> {
        ParticleSystem::with_masses(vec![self.m_a, self.m_b, self.m_c])
    }

    /// `½ k_A (q_C − q_A)² + ½ k_B (q_C − q_B)²`.
    pub fn potential(&self) -> Potential {
        Potential::pairwise_springs(
            3,
            &[
                Spring {
                    i: 2,
                    j: 0,
                    k: self.k_a,
                },
                Spring {
                    i: 2,
                    j: 1,
                    k: self.k_b,
                },
            ],
        )
        .expect("fixed three-particle springs")
    }

    /// Initial point in C's frame reproducing the closed-form positions and
    /// velocities at `t = 0` under the finite-mass reduced Hamiltonian.
    pub fn initial_frame_c(&self) -> Result<ReducedPhasePoint> {
        let (xa, xb) = analytic_oscillator_frame_c(self, 0.0);
        let va = -self.a0 * self.omega_a() * self.phi_a.sin();
        let vb = -self.b0 * self.omega_b() * self.phi_b.sin();
        // velocities = M⁻¹ ξ with M⁻¹ = diag(1/m_A, 1/m_B) + 1/m_C
        let (ia, ib, ic) = (1.0 / self.m_a, 1.0 / self.m_b, 1.0 / self.m_c);
        let (m11, m12, m22) = (ia + ic, ic, ib + ic);
        let det = m11 * m22 - m12 * m12;
        let xi_a = (m22 * va - m12 * vb) / det;
        let xi_b = (m11 * vb - m12 * va) / det;
        ReducedPhasePoint::new(FrameLabel::C, 3, vec![xa, xb], vec![xi_a, xi_b])
    }
}

/// Decoupled-oscillator positions seen from C, valid for `m_C ≫ m_A, m_B`.
pub fn analytic_oscillator_frame_c(params: &OscillatorParams, t: f64) -> (f64, f64) {
    let xa = params.a0 * (params.omega_a() * t + params.phi_a).cos();
    let xb = params.b0 * (params.omega_b() * t + params.phi_b).cos();
    (xa, xb)
}

/// The same motion seen from A: `(q_B, q_C) = (x_B − x_A, −x_A)`.
pub fn analytic_oscillator_frame_a(params: &OscillatorParams, t: f64) -> (f64, f64) {
    let a = params.a0 * (params.omega_a() * t + params.phi_a).cos();
    let b = params.b0 * (params.omega_b() * t + params.phi_b).cos();
    (b - a, -a)
}

/// Compares second differences of a short unit-mass trajectory in A's frame
/// with `q̈_B = −2∂_B V − ∂_C V`, `q̈_C = −2∂_C V − ∂_B V`.
///
/// Returns the absolute residuals for B and C.
pub fn acceleration_identity_check(
    potential: &Potential,
    rp: &ReducedPhasePoint,
) -> Result<(f64, f64)> {
    const DT: f64 = 1e-3;
    if rp.n() != 3 || rp.frame() != FrameLabel::A {
        return Err(Error::InvalidSystem(
            "acceleration identity is stated for three particles in A's frame".into(),
        ));
    }
    let system = ParticleSystem::unit(3)?;
    check_sizes(rp, potential, &system)?;
    let q0 = rp.q();
    let mut stepper = Stepper::new(rp, potential, &system);

    // integrate displacements so the second difference is free of
    // cancellation against the absolute positions
    let displaced = |stepper: &mut Stepper, h: f64| {
        let mut q = q0.to_vec();
        let mut p = rp.p().to_vec();
        stepper.kick(&q, &mut p, 0.5 * h);
        velocities(
            &p,
            &stepper.labels,
            stepper.frame,
            stepper.system,
            &mut stepper.vel,
        );
        let d: Vec<f64> = stepper.vel.iter().map(|v| h * v).collect();
        for (qk, dk) in q.iter_mut().zip(&d) {
            *qk += dk;
        }
        d
    };
    let forward = displaced(&mut stepper, DT);
    let backward = displaced(&mut stepper, -DT);
    let accel: Vec<f64> = forward
        .iter()
        .zip(&backward)
        .map(|(f, b)| (f + b) / (DT * DT))
        .collect();

    let grad = potential.gradient(&embed_reduced(rp).q);
    let (db, dc) = (grad[1], grad[2]);
    let rhs_b = -2.0 * db - dc;
    let rhs_c = -2.0 * dc - db;
    Ok(((accel[0] - rhs_b).abs(), (accel[1] - rhs_c).abs()))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn frame_a(q: [f64; 2], p: [f64; 2]) -> ReducedPhasePoint {
        ReducedPhasePoint::new(FrameLabel::A, 3, q.to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn total_hamiltonian_examples() {
        let v = Potential::zero(3);
        let x = ExtendedPhasePoint::new(vec![0.0; 3], vec![1.0, 1.0, -2.0]).unwrap();
        assert_eq!(total_hamiltonian(&x, &v, 0.0), 3.0);
        assert_eq!(total_hamiltonian(&x, &v, 5.0), 3.0);
        // with λ = −p_A the frame stays put: q̇_A = p_A + λ = 0
        let y = ExtendedPhasePoint::new(vec![0.0; 3], vec![0.7, 0.1, -0.8]).unwrap();
        let lambda = -y.p[0];
        let h = 1e-6;
        let mut up = y.clone();
        up.p[0] += h;
        let mut down = y.clone();
        down.p[0] -= h;
        let qdot_a =
            (total_hamiltonian(&up, &v, lambda) - total_hamiltonian(&down, &v, lambda)) / (2.0 * h);
        assert!(qdot_a.abs() < 1e-9);
    }

    #[test]
    fn reduced_hamiltonian_examples() {
        let unit = ParticleSystem::unit(3).unwrap();
        let v = Potential::zero(3);
        assert_eq!(
            reduced_hamiltonian(&frame_a([0.0, 0.0], [1.0, 1.0]), &v, &unit),
            3.0
        );
        assert_eq!(
            reduced_hamiltonian(&frame_a([0.0, 0.0], [0.0, 0.0]), &v, &unit),
            0.0
        );

        let heavy = ParticleSystem::with_masses(vec![1e12, 1.0, 1.0]).unwrap();
        let springs = OscillatorParams::from_frequencies(1.0, 2.0, 1.0, 1.0, 0.0, 0.0).potential();
        let rp = frame_a([0.4, -0.9], [1.3, -0.6]);
        let got = reduced_hamiltonian(&rp, &springs, &heavy);
        let expected = 0.5 * (1.3f64.powi(2) + 0.6f64.powi(2)) + springs.value(&[0.0, 0.4, -0.9]);
        assert!(((got - expected) / expected).abs() < 1e-9);
    }

    #[test]
    fn free_flow_is_exact() {
        let unit = ParticleSystem::unit(3).unwrap();
        let rp = frame_a([0.5, -1.0], [0.3, 0.2]);
        let traj = integrate_reduced(&rp, &Potential::zero(3), &unit, 2.0, 0.01).unwrap();
        for (t, s) in traj.times().iter().zip(traj.states()) {
            let expected = 0.5 + (2.0 * 0.3 + 0.2) * t;
            assert!((s.q()[0] - expected).abs() < 1e-12);
        }
        assert!(matches!(
            integrate_reduced(&rp, &Potential::zero(3), &unit, 1.0, 0.0),
            Err(Error::InvalidStep(_))
        ));
        assert!(matches!(
            integrate_reduced(&rp, &Potential::zero(3), &unit, 1.0, -0.1),
            Err(Error::InvalidStep(_))
        ));
    }

    #[test]
    fn leapfrog_is_second_order_and_yoshida_fourth() {
        let params = OscillatorParams::from_frequencies(1.0, 3.0, 1.0, 0.5, 0.2, 1.0);
        let system = params.system().unwrap();
        let v = params.potential();
        let init =
            classical_frame_switch(&params.initial_frame_c().unwrap(), FrameLabel::A).unwrap();
        // reference: same integrator at a much finer step
        let error = |dt: f64, integ: Integrator| {
            let fine = integrate_reduced_with(&init, &v, &system, 2.0, dt / 16.0, integ).unwrap();
            let coarse = integrate_reduced_with(&init, &v, &system, 2.0, dt, integ).unwrap();
            let a = coarse.states().last().unwrap().q()[0];
            let b = fine.states().last().unwrap().q()[0];
            (a - b).abs()
        };
        let ratio = error(0.02, Integrator::Leapfrog) / error(0.01, Integrator::Leapfrog);
        assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
        let ratio = error(0.04, Integrator::Yoshida4) / error(0.02, Integrator::Yoshida4);
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn analytic_examples() {
        let fig3 = OscillatorParams::from_frequencies(1.0, 10.0, 1.0, 1.0, 0.0, PI / 2.0);
        let (xa, _) = analytic_oscillator_frame_c(&fig3, 0.0);
        assert_eq!(xa, 1.0);
        let (qb, qc) = analytic_oscillator_frame_a(&fig3, 0.0);
        assert!((qb + 1.0).abs() < 1e-15);
        assert_eq!(qc, -1.0);

        let in_phase = OscillatorParams::from_frequencies(2.0, 2.0, 0.7, 0.7, 0.3, 0.3);
        for k in 0..200 {
            let t = 0.05 * k as f64;
            assert_eq!(analytic_oscillator_frame_a(&in_phase, t).0, 0.0);
            let (xa, _) = analytic_oscillator_frame_c(&in_phase, t);
            assert_eq!(analytic_oscillator_frame_a(&in_phase, t).1, -xa);
        }
    }

    #[test]
    fn acceleration_identity() {
        let rp = frame_a([0.3, -0.8], [0.4, 0.1]);
        let (rb, rc) = acceleration_identity_check(&Potential::zero(3), &rp).unwrap();
        assert!(rb <= 1e-10 && rc <= 1e-10, "{rb} {rc}");

        let springs = OscillatorParams::from_frequencies(1.3, 2.1, 1.0, 1.0, 0.0, 0.0).potential();
        let (rb, rc) = acceleration_identity_check(&springs, &rp).unwrap();
        assert!(rb <= 1e-3 && rc <= 1e-3);

        // V depending only on q_B − q_A: q̈_B = −2∂_B V
        let only_b = Potential::new(3, |q| (q[1] - q[0]).powi(4));
        let (rb, _) = acceleration_identity_check(&only_b, &rp).unwrap();
        assert!(rb <= 1e-3);

        let wrong = ReducedPhasePoint::zero(FrameLabel::C, 3).unwrap();
        assert!(acceleration_identity_check(&Potential::zero(3), &wrong).is_err());
    }

    #[test]
    fn trajectory_validation() {
        let s = ReducedPhasePoint::zero(FrameLabel::A, 3).unwrap();
        assert!(Trajectory::new(vec![0.0, 0.0], vec![s.clone(), s.clone()]).is_err());
        assert!(Trajectory::new(vec![0.0], vec![s.clone(), s.clone()]).is_err());
        let t = Trajectory::new(vec![0.0, 1.0], vec![s.clone(), s]).unwrap();
        assert!(t.positions(FrameLabel::A).is_none());
        assert_eq!(t.positions(FrameLabel::B).unwrap(), vec![0.0, 0.0]);
    }
}
