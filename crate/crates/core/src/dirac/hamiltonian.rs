use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use super::{reduced_labels, PARTICLES};
use crate::classical::{FrameLabel, ParticleSystem, Potential};
use crate::error::{Error, Result};
use crate::grid::{inner_product, Grid1D, Observable, Representation, WaveFunction};

/// Reduced Hamiltonian of three particles seen from one of them.
///
/// The kinetic part is the quadratic form `Σ K_ij p_i p_j` with
/// `K_ii = ½(1/m_i + 1/m_F)` and `K_ij = 1/(2 m_F)`; the potential is the
/// full potential evaluated at `q_F = 0`. Kinetic terms act in momentum
/// representation and the potential in position representation.
#[derive(Debug, Clone)]
pub struct GridHamiltonian {
    frame: FrameLabel,
    labels: [FrameLabel; 2],
    kinetic: [[f64; 2]; 2],
    potential: Potential,
}

pub fn reduced_quantum_hamiltonian(
    frame: FrameLabel,
    potential: &Potential,
    system: &ParticleSystem,
) -> Result<GridHamiltonian> {
    if system.n() != PARTICLES || potential.n() != PARTICLES {
        return Err(Error::InvalidSystem(format!(
            "quantum reduction needs {PARTICLES} particles, got system {} and potential {}",
            system.n(),
            potential.n()
        )));
    }
    let labels = reduced_labels(frame)?;
    let inv_f = 1.0 / system.mass(frame);
    let diag = |l: FrameLabel| 0.5 * (1.0 / system.mass(l) + inv_f);
    Ok(GridHamiltonian {
        frame,
        labels,
        kinetic: [
            [diag(labels[0]), 0.5 * inv_f],
            [0.5 * inv_f, diag(labels[1])],
        ],
        potential: potential.clone(),
    })
}

impl GridHamiltonian {
    pub fn frame(&self) -> FrameLabel {
        self.frame
    }

    pub fn labels(&self) -> [FrameLabel; 2] {
        self.labels
    }

    pub fn kinetic_matrix(&self) -> [[f64; 2]; 2] {
        self.kinetic
    }

    pub fn kinetic_value(&self, p: &[f64]) -> f64 {
        let k = &self.kinetic;
        k[0][0] * p[0] * p[0] + 2.0 * k[0][1] * p[0] * p[1] + k[1][1] * p[1] * p[1]
    }

    pub fn potential_value(&self, q: &[f64]) -> f64 {
        let mut full = [0.0; PARTICLES];
        full[self.labels[0].0] = q[0];
        full[self.labels[1].0] = q[1];
        self.potential.value(&full)
    }

    /// Kinetic part as a polynomial observable.
    pub fn kinetic_observable(&self) -> Observable {
        let [a, b] = self.labels;
        let k = &self.kinetic;
        Observable::p(a).pow(2).scale(k[0][0])
            + (Observable::p(a) * Observable::p(b)).scale(2.0 * k[0][1])
            + Observable::p(b).pow(2).scale(k[1][1])
    }

    fn check(&self, psi: &WaveFunction) -> Result<Grid1D> {
        if psi.frame() != self.frame {
            return Err(Error::FrameMismatch {
                expected: self.frame,
                actual: psi.frame(),
            });
        }
        if psi.labels() != self.labels {
            return Err(Error::GridMismatch(format!(
                "Hamiltonian in frame {} acts on axes {}{}",
                self.frame, self.labels[0], self.labels[1]
            )));
        }
        Ok(psi.axes()[0].grid)
    }

    fn table(
        psi: &WaveFunction,
        repr: Representation,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> ArrayD<Complex64> {
        let axes = psi.axes();
        let coords: Vec<Vec<f64>> = axes
            .iter()
            .map(|a| match repr {
                Representation::Position => a.grid.positions(),
                Representation::Momentum => a.grid.momenta(),
            })
            .collect();
        let shape: Vec<usize> = axes.iter().map(|a| a.grid.n()).collect();
        ArrayD::from_shape_fn(IxDyn(&shape), |i| f(&[coords[0][i[0]], coords[1][i[1]]]))
    }

    /// `H ψ`, returned in `psi`'s representations.
    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        self.check(psi)?;
        let reprs = psi.representations();
        let mut kin = psi.to_all(Representation::Momentum);
        let t = Self::table(&kin, Representation::Momentum, |p| {
            Complex64::new(self.kinetic_value(p), 0.0)
        });
        *kin.amplitudes_mut() *= &t;
        let mut pot = psi.to_all(Representation::Position);
        let v = Self::table(&pot, Representation::Position, |q| {
            Complex64::new(self.potential_value(q), 0.0)
        });
        *pot.amplitudes_mut() *= &v;
        let mut out = kin.to_representations(&reprs)?;
        out.add_scaled(Complex64::new(1.0, 0.0), &pot.to_representations(&reprs)?)?;
        Ok(out)
    }

    /// `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expectation(&self, psi: &WaveFunction) -> Result<f64> {
        let z = inner_product(psi, &self.apply(psi)?)?;
        Ok(z.re / psi.norm_squared())
    }

    /// Strang split-step evolution `e^{−iV h/2} e^{−iT h} e^{−iV h/2}` over
    /// `t` with the largest uniform step `h ≤ dt`. The result is in
    /// position representation.
    pub fn evolve(&self, psi: &WaveFunction, t: f64, dt: f64) -> Result<WaveFunction> {
        self.split_step(psi, t, dt, false)
    }

    /// Imaginary-time relaxation over `tau`, renormalising after every step.
    pub fn imaginary_time(&self, psi: &WaveFunction, tau: f64, dtau: f64) -> Result<WaveFunction> {
        self.split_step(psi, tau, dtau, true)
    }

    fn split_step(
        &self,
        psi: &WaveFunction,
        t: f64,
        dt: f64,
        imaginary: bool,
    ) -> Result<WaveFunction> {
        self.check(psi)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidStep(dt));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidStep(t));
        }
        let mut work = psi.to_all(Representation::Position);
        if t == 0.0 {
            return Ok(work);
        }
        let steps = (t / dt).ceil().max(1.0) as usize;
        let h = t / steps as f64;
        let factor = |e: f64, s: f64| {
            if imaginary {
                Complex64::new((-e * s).exp(), 0.0)
            } else {
                Complex64::from_polar(1.0, -e * s)
            }
        };
        let half_v = Self::table(&work, Representation::Position, |q| {
            factor(self.potential_value(q), 0.5 * h)
        });
        let mom = work.to_all(Representation::Momentum);
        let full_t = Self::table(&mom, Representation::Momentum, |p| {
            factor(self.kinetic_value(p), h)
        });
        for _ in 0..steps {
            *work.amplitudes_mut() *= &half_v;
            for d in 0..2 {
                work.convert_axis(d, Representation::Momentum);
            }
            *work.amplitudes_mut() *= &full_t;
            for d in 0..2 {
                work.convert_axis(d, Representation::Position);
            }
            *work.amplitudes_mut() *= &half_v;
            if imaginary {
                let norm = work.norm();
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(Error::InvalidGrid(
                        "imaginary-time relaxation lost the state".into(),
                    ));
                }
                work.amplitudes_mut().mapv_inplace(|z| z / norm);
            }
        }
        if work
            .amplitudes()
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidGrid(
                "evolution produced non-finite amplitudes".into(),
            ));
        }
        Ok(work)
    }
}
