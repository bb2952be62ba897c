//! Constrained classical mechanics of N particles on a line.
//!
//! The extended phase space carries canonical pairs `(q_i, p_i)`. Global
//! translations are generated by the total momentum `P = Σ p_i`, which is
//! constrained to vanish. Choosing particle `F` as the frame means fixing the
//! gauge `q_F = 0`; the reduced phase space is then coordinatised by the
//! remaining pairs, kept in ascending order of their original index.

mod dynamics;
mod potential;

pub use dynamics::{
    acceleration_identity_check, analytic_oscillator_frame_a, analytic_oscillator_frame_c,
    integrate_reduced, integrate_reduced_with, reduced_hamiltonian, total_hamiltonian, Integrator,
    OscillatorParams, Trajectory,
};
pub use potential::{Potential, Spring, POTENTIAL_FD_STEP};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Central finite-difference step used for Poisson brackets.
pub const BRACKET_FD_STEP: f64 = 1e-5;

/// Absolute tolerance for constraint-surface and gauge-surface membership.
pub const SURFACE_TOLERANCE: f64 = 1e-9;

/// Label of a particle, used both as a frame choice and as an axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FrameLabel(pub usize);

impl FrameLabel {
    pub const A: FrameLabel = FrameLabel(0);
    pub const B: FrameLabel = FrameLabel(1);
    pub const C: FrameLabel = FrameLabel(2);

    pub fn new(index: usize, n: usize) -> Result<Self> {
        if index < n {
            Ok(FrameLabel(index))
        } else {
            Err(Error::FrameOutOfRange { index, n })
        }
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// Parses `A`, `B`, ... or a bare index.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_uppercase() => {
                Some(FrameLabel((c as u8 - b'A') as usize))
            }
            _ => s.parse().ok().map(FrameLabel),
        }
    }
}

impl fmt::Display for FrameLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 < 26 {
            write!(f, "{}", (b'A' + self.0 as u8) as char)
        } else {
            write!(f, "#{}", self.0)
        }
    }
}

/// Particle count and masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSystem {
    masses: Vec<f64>,
}

impl ParticleSystem {
    /// `n` particles of unit mass.
    pub fn unit(n: usize) -> Result<Self> {
        Self::with_masses(vec![1.0; n])
    }

    pub fn with_masses(masses: Vec<f64>) -> Result<Self> {
        if masses.len() < 2 {
            return Err(Error::InvalidSystem(format!(
                "need at least two particles, got {}",
                masses.len()
            )));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidSystem(format!(
                "mass must be positive, got {m}"
            )));
        }
        Ok(Self { masses })
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, label: FrameLabel) -> f64 {
        self.masses[label.0]
    }

    pub fn frame(&self, index: usize) -> Result<FrameLabel> {
        FrameLabel::new(index, self.n())
    }
}

/// A point `(q, p)` of the extended phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedPhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl ExtendedPhasePoint {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                got: p.len(),
            });
        }
        if q.len() < 2 {
            return Err(Error::InvalidSystem("need at least two particles".into()));
        }
        if q.iter().chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem(
                "non-finite phase-space coordinate".into(),
            ));
        }
        Ok(Self { q, p })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn center_of_mass(&self) -> f64 {
        self.q.iter().sum::<f64>() / self.n() as f64
    }
}

/// A point of the reduced phase space seen from `frame`.
///
/// `labels` lists the surviving particles in ascending index order; `q[k]`
/// and `p[k]` belong to `labels[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedPhasePoint {
    frame: FrameLabel,
    labels: Vec<FrameLabel>,
    q: Vec<f64>,
    p: Vec<f64>,
}

impl ReducedPhasePoint {
    /// Builds a reduced point for an `n`-particle system; `q` and `p` are
    /// ordered by ascending label with the frame omitted.
    pub fn new(frame: FrameLabel, n: usize, q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSystem("need at least two particles".into()));
        }
        let frame = FrameLabel::new(frame.0, n)?;
        for v in [&q, &p] {
            if v.len() != n - 1 {
                return Err(Error::DimensionMismatch {
                    expected: n - 1,
                    got: v.len(),
                });
            }
        }
        if q.iter().chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem(
                "non-finite phase-space coordinate".into(),
            ));
        }
        let labels = (0..n).filter(|&i| i != frame.0).map(FrameLabel).collect();
        Ok(Self {
            frame,
            labels,
            q,
            p,
        })
    }

    pub fn zero(frame: FrameLabel, n: usize) -> Result<Self> {
        Self::new(frame, n, vec![0.0; n - 1], vec![0.0; n - 1])
    }

    pub fn frame(&self) -> FrameLabel {
        self.frame
    }

    pub fn n(&self) -> usize {
        self.labels.len() + 1
    }

    pub fn labels(&self) -> &[FrameLabel] {
        &self.labels
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub(crate) fn q_mut(&mut self) -> &mut [f64] {
        &mut self.q
    }

    pub(crate) fn p_mut(&mut self) -> &mut [f64] {
        &mut self.p
    }

    fn slot(&self, label: FrameLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn position(&self, label: FrameLabel) -> Option<f64> {
        self.slot(label).map(|k| self.q[k])
    }

    pub fn momentum(&self, label: FrameLabel) -> Option<f64> {
        self.slot(label).map(|k| self.p[k])
    }
}

/// Total momentum `P = Σ p_i`; the constraint surface is `P = 0`.
pub fn total_momentum(point: &ExtendedPhasePoint) -> f64 {
    point.p.iter().sum()
}

pub fn on_constraint_surface(point: &ExtendedPhasePoint) -> bool {
    total_momentum(point).abs() <= SURFACE_TOLERANCE
}

/// Flows along the gauge orbit generated by `P` for parameter distance `s`:
/// every position shifts by `s`, momenta are untouched.
pub fn gauge_flow(point: &ExtendedPhasePoint, s: f64) -> ExtendedPhasePoint {
    ExtendedPhasePoint {
        q: point.q.iter().map(|q| q + s).collect(),
        p: point.p.clone(),
    }
}

/// Embeds a reduced point into the constraint surface intersected with the
/// gauge `q_frame = 0`.
pub fn embed_reduced(rp: &ReducedPhasePoint) -> ExtendedPhasePoint {
    let n = rp.n();
    let f = rp.frame.0;
    let mut q = vec![0.0; n];
    let mut p = vec![0.0; n];
    for (k, label) in rp.labels.iter().enumerate() {
        q[label.0] = rp.q[k];
        p[label.0] = rp.p[k];
    }
    p[f] = -rp.p.iter().sum::<f64>();
    ExtendedPhasePoint { q, p }
}

/// Drops the frame's redundant pair from a gauge-fixed point.
pub fn project_reduced(point: &ExtendedPhasePoint, frame: FrameLabel) -> Result<ReducedPhasePoint> {
    let n = point.n();
    let frame = FrameLabel::new(frame.0, n)?;
    let total = total_momentum(point);
    let qf = point.q[frame.0];
    if total.abs() > SURFACE_TOLERANCE || qf.abs() > SURFACE_TOLERANCE {
        return Err(Error::ConstraintViolation {
            total_momentum: total,
            frame_position: qf,
        });
    }
    let keep = |v: &[f64]| {
        v.iter()
            .enumerate()
            .filter(|(i, _)| *i != frame.0)
            .map(|(_, x)| *x)
            .collect::<Vec<_>>()
    };
    ReducedPhasePoint::new(frame, n, keep(&point.q), keep(&point.p))
}

/// Switches the reduced description from `rp.frame()` to `new_frame`:
/// embed, flow by `-q_new`, project.
pub fn classical_frame_switch(
    rp: &ReducedPhasePoint,
    new_frame: FrameLabel,
) -> Result<ReducedPhasePoint> {
    let new_frame = FrameLabel::new(new_frame.0, rp.n())?;
    if new_frame == rp.frame {
        return Err(Error::SameFrame(new_frame));
    }
    let embedded = embed_reduced(rp);
    let shift = -embedded.q[new_frame.0];
    project_reduced(&gauge_flow(&embedded, shift), new_frame)
}

/// Poisson bracket `{f, g}` by central differences with [`BRACKET_FD_STEP`].
pub fn poisson_bracket<F, G>(f: F, g: G, point: &ExtendedPhasePoint) -> f64
where
    F: Fn(&ExtendedPhasePoint) -> f64,
    G: Fn(&ExtendedPhasePoint) -> f64,
{
    let h = BRACKET_FD_STEP;
    let grad = |func: &dyn Fn(&ExtendedPhasePoint) -> f64| {
        let n = point.n();
        let mut dq = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut work = point.clone();
        for i in 0..n {
            let q0 = work.q[i];
            work.q[i] = q0 + h;
            let plus = func(&work);
            work.q[i] = q0 - h;
            let minus = func(&work);
            work.q[i] = q0;
            dq[i] = (plus - minus) / (2.0 * h);

            let p0 = work.p[i];
            work.p[i] = p0 + h;
            let plus = func(&work);
            work.p[i] = p0 - h;
            let minus = func(&work);
            work.p[i] = p0;
            dp[i] = (plus - minus) / (2.0 * h);
        }
        (dq, dp)
    };
    let (fq, fp) = grad(&f);
    let (gq, gp) = grad(&g);
    (0..point.n()).map(|i| fq[i] * gp[i] - fp[i] * gq[i]).sum()
}

/// Dirac bracket for the second-class pair `(P, χ = q_frame)`:
/// `{f,g}_D = {f,g} − {f,P}{χ,g} + {f,χ}{P,g}`.
pub fn dirac_bracket<F, G>(f: F, g: G, point: &ExtendedPhasePoint, frame: FrameLabel) -> f64
where
    F: Fn(&ExtendedPhasePoint) -> f64,
    G: Fn(&ExtendedPhasePoint) -> f64,
{
    let a = frame.0;
    let big_p = |x: &ExtendedPhasePoint| total_momentum(x);
    let chi = move |x: &ExtendedPhasePoint| x.q[a];
    poisson_bracket(&f, &g, point)
        - poisson_bracket(&f, big_p, point) * poisson_bracket(chi, &g, point)
        + poisson_bracket(&f, chi, point) * poisson_bracket(big_p, &g, point)
}

/// Legendre map of the translation-invariant Lagrangian:
/// `p_i = q̇_i − (1/N) Σ_j q̇_j`.
pub fn lagrangian_momenta(velocities: &[f64]) -> Vec<f64> {
    let mean = velocities.iter().sum::<f64>() / velocities.len() as f64;
    velocities.iter().map(|v| v - mean).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(q: &[f64], p: &[f64]) -> ExtendedPhasePoint {
        ExtendedPhasePoint::new(q.to_vec(), p.to_vec()).unwrap()
    }

    #[test]
    fn total_momentum_examples() {
        assert_eq!(total_momentum(&point(&[0.0; 3], &[1.0, 2.0, -3.0])), 0.0);
        assert_eq!(total_momentum(&point(&[0.0; 3], &[1.0, 1.0, 1.0])), 3.0);
        let x = point(&[0.3, -1.0, 2.0], &[0.5, 0.25, -0.75]);
        assert_eq!(total_momentum(&gauge_flow(&x, 4.2)), total_momentum(&x));
    }

    #[test]
    fn gauge_flow_examples() {
        let x = point(&[0.0; 3], &[1.0, 2.0, -3.0]);
        assert_eq!(gauge_flow(&x, 2.0).q, vec![2.0; 3]);
        assert_eq!(gauge_flow(&x, 0.0), x);
        let y = point(&[0.5, -1.5, 3.0], &[0.0; 3]);
        let a = gauge_flow(&gauge_flow(&y, 0.25), 1.5);
        let b = gauge_flow(&y, 1.75);
        for (u, v) in a.q.iter().zip(&b.q) {
            assert!((u - v).abs() < 1e-15);
        }
    }

    #[test]
    fn embed_example() {
        let rp = ReducedPhasePoint::new(FrameLabel::A, 3, vec![1.0, 3.0], vec![2.0, 4.0]).unwrap();
        let x = embed_reduced(&rp);
        assert_eq!(x.q, vec![0.0, 1.0, 3.0]);
        assert_eq!(x.p, vec![-6.0, 2.0, 4.0]);
        assert_eq!(total_momentum(&x), 0.0);

        let zero = ReducedPhasePoint::zero(FrameLabel::B, 4).unwrap();
        let x = embed_reduced(&zero);
        assert!(x.q.iter().chain(&x.p).all(|v| *v == 0.0));
    }

    #[test]
    fn project_example_and_violation() {
        let x = point(&[0.0, 1.0, 3.0], &[-6.0, 2.0, 4.0]);
        let rp = project_reduced(&x, FrameLabel::A).unwrap();
        assert_eq!(rp.q(), &[1.0, 3.0]);
        assert_eq!(rp.p(), &[2.0, 4.0]);
        assert_eq!(rp.labels(), &[FrameLabel::B, FrameLabel::C]);

        let off = point(&[0.5, 1.0, 3.0], &[-6.0, 2.0, 4.0]);
        assert!(matches!(
            project_reduced(&off, FrameLabel::A),
            Err(Error::ConstraintViolation { .. })
        ));
        let off = point(&[0.0, 1.0, 3.0], &[-5.0, 2.0, 4.0]);
        assert!(matches!(
            project_reduced(&off, FrameLabel::A),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn switch_example() {
        let rp = ReducedPhasePoint::new(FrameLabel::A, 3, vec![1.0, 3.0], vec![2.0, 4.0]).unwrap();
        let out = classical_frame_switch(&rp, FrameLabel::C).unwrap();
        assert_eq!(out.frame(), FrameLabel::C);
        assert_eq!(out.labels(), &[FrameLabel::A, FrameLabel::B]);
        assert_eq!(out.q(), &[-3.0, -2.0]);
        assert_eq!(out.p(), &[-6.0, 2.0]);

        let zero = ReducedPhasePoint::zero(FrameLabel::A, 3).unwrap();
        let out = classical_frame_switch(&zero, FrameLabel::C).unwrap();
        assert!(out.q().iter().chain(out.p()).all(|v| *v == 0.0));

        let back = classical_frame_switch(
            &classical_frame_switch(&rp, FrameLabel::C).unwrap(),
            FrameLabel::A,
        )
        .unwrap();
        assert_eq!(back, rp);

        assert_eq!(
            classical_frame_switch(&rp, FrameLabel::A),
            Err(Error::SameFrame(FrameLabel::A))
        );
        assert!(matches!(
            classical_frame_switch(&rp, FrameLabel(3)),
            Err(Error::FrameOutOfRange { .. })
        ));
    }

    #[test]
    fn dirac_bracket_table() {
        let x = point(&[0.0, 0.7, -1.3], &[-0.2, 0.5, -0.3]);
        let q = |i: usize| move |x: &ExtendedPhasePoint| x.q[i];
        let p = |i: usize| move |x: &ExtendedPhasePoint| x.p[i];
        let a = FrameLabel::A;
        assert!(dirac_bracket(q(0), p(0), &x, a).abs() < 1e-6);
        assert!((dirac_bracket(q(1), p(1), &x, a) - 1.0).abs() < 1e-6);
        assert!(dirac_bracket(q(1), p(2), &x, a).abs() < 1e-6);
        // the plain Poisson bracket of the frame pair is still canonical
        assert!((poisson_bracket(q(0), p(0), &x) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(lagrangian_momenta(&[1.0, 1.0, 1.0]), vec![0.0; 3]);
        let p = lagrangian_momenta(&[1.0, 0.0, 0.0]);
        let expected = [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn label_parsing_and_display() {
        assert_eq!(FrameLabel::parse("C"), Some(FrameLabel::C));
        assert_eq!(FrameLabel::parse("4"), Some(FrameLabel(4)));
        assert_eq!(FrameLabel::B.to_string(), "B");
        assert!(ParticleSystem::with_masses(vec![1.0]).is_err());
        assert!(ParticleSystem::with_masses(vec![1.0, -2.0]).is_err());
    }
}
