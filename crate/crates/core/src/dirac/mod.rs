//! Physical states of three particles with vanishing total momentum.
//!
//! A physical state is stored through one reduction: the momentum amplitude
//! `ψ_{·|F}` of the two particles other than the frame `F`. The reduction in
//! another frame `G` is the substitution
//!
//! ```text
//! ψ_{·|G}(p_F, p_T) = ψ_{·|F}(p_G = −p_F − p_T, p_T)
//! ```
//!
//! which on a commensurate momentum grid is an index permutation (indices
//! wrap modulo `n`; band-limited states are unaffected).

mod hamiltonian;
mod trivialization;

pub use hamiltonian::{reduced_quantum_hamiltonian, GridHamiltonian};
pub use trivialization::{trivialization_family_check, TrivializationReport};

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::classical::FrameLabel;
use crate::error::{Error, Result};
use crate::grid::fixture::WaveFunctionRecord;
use crate::grid::{inner_product, AxisSpec, Representation, WaveFunction};

const FIXTURE_NORM_TOLERANCE: f64 = 1e-10;

/// Number of particles in the quantum model.
pub const PARTICLES: usize = 3;

/// The two non-frame labels in ascending order.
pub fn reduced_labels(frame: FrameLabel) -> Result<[FrameLabel; 2]> {
    let frame = FrameLabel::new(frame.0, PARTICLES)?;
    let mut it = (0..PARTICLES).filter(|&i| i != frame.0).map(FrameLabel);
    Ok([it.next().unwrap(), it.next().unwrap()])
}

/// A physical state held through its reduction in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalState {
    canonical: WaveFunction,
}

impl PhysicalState {
    /// Wraps a reduced wavefunction; it is converted to momentum
    /// representation and normalised.
    pub fn new(reduced: WaveFunction) -> Result<Self> {
        let canonical = Self::validated(reduced)?.normalized()?;
        Ok(Self { canonical })
    }

    fn validated(reduced: WaveFunction) -> Result<WaveFunction> {
        let expected = reduced_labels(reduced.frame())?;
        if reduced.labels() != expected {
            return Err(Error::InvalidGrid(format!(
                "reduction in frame {} needs axes {}{}, got {:?}",
                reduced.frame(),
                expected[0],
                expected[1],
                reduced
                    .labels()
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
            )));
        }
        let axes = reduced.axes();
        if !axes[0].grid.approx_eq(&axes[1].grid) {
            return Err(Error::GridMismatch("both axes must share one grid".into()));
        }
        Ok(reduced.to_all(Representation::Momentum))
    }

    pub fn frame(&self) -> FrameLabel {
        self.canonical.frame()
    }

    /// Momentum amplitude of the stored reduction.
    pub fn canonical(&self) -> &WaveFunction {
        &self.canonical
    }

    /// The reduced wavefunction seen from `frame`, in momentum representation.
    pub fn reduction(&self, frame: FrameLabel) -> Result<WaveFunction> {
        if frame == self.frame() {
            Ok(self.canonical.clone())
        } else {
            Ok(reexpress(self, frame)?.canonical)
        }
    }

    pub fn to_json(&self) -> String {
        crate::grid::fixture::to_json(&self.canonical)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let record: WaveFunctionRecord =
            serde_json::from_str(s).map_err(|e| Error::Fixture(e.to_string()))?;
        let psi = record.to_wavefunction()?;
        if psi
            .representations()
            .iter()
            .any(|r| *r != Representation::Momentum)
        {
            return Err(Error::Fixture(
                "physical states are stored in momentum representation".into(),
            ));
        }
        if (psi.norm() - 1.0).abs() > FIXTURE_NORM_TOLERANCE {
            return Err(Error::Fixture(format!(
                "stored state has norm {}",
                psi.norm()
            )));
        }
        Ok(Self {
            canonical: Self::validated(psi)?,
        })
    }
}

/// Momentum substitution from the stored reduction to `new_frame`'s.
pub fn reexpress(state: &PhysicalState, new_frame: FrameLabel) -> Result<PhysicalState> {
    Ok(PhysicalState {
        canonical: substitute_momenta(&state.canonical, new_frame)?,
    })
}

/// Reduction of `psi` (any representation) in `new_frame`, returned in
/// momentum representation without renormalisation.
pub(crate) fn substitute_momenta(
    psi: &WaveFunction,
    new_frame: FrameLabel,
) -> Result<WaveFunction> {
    let old = psi.frame();
    let new_frame = FrameLabel::new(new_frame.0, PARTICLES)?;
    if new_frame == old {
        return Err(Error::SameFrame(old));
    }
    let old_labels = psi.labels();
    if old_labels != reduced_labels(old)? {
        return Err(Error::GridMismatch(format!(
            "axes do not match a reduction in frame {old}"
        )));
    }
    let grid = psi.axes()[0].grid;
    if !psi.axes()[1].grid.approx_eq(&grid) {
        return Err(Error::GridMismatch("both axes must share one grid".into()));
    }
    let new_labels = reduced_labels(new_frame)?;
    let n = grid.n();
    let mom = psi.to_all(Representation::Momentum);
    let src = mom.amplitudes();
    let amps = ArrayD::from_shape_fn(IxDyn(&[n, n]), |idx| {
        let sum = grid.centered(idx[0]) + grid.centered(idx[1]);
        let mut from = [0usize; 2];
        for (d, label) in old_labels.iter().enumerate() {
            from[d] = if *label == new_frame {
                grid.wrap_centered(-sum)
            } else {
                let slot = new_labels
                    .iter()
                    .position(|l| l == label)
                    .expect("shared label");
                idx[slot]
            };
        }
        src[[from[0], from[1]]]
    });
    let axes = new_labels
        .iter()
        .map(|l| AxisSpec::momentum(*l, grid))
        .collect();
    WaveFunction::new(axes, amps, new_frame)
}

/// Physical inner product, computed as the reduced inner product after
/// bringing `s2` into `s1`'s frame.
pub fn physical_inner_product(s1: &PhysicalState, s2: &PhysicalState) -> Result<Complex64> {
    let other = s2.reduction(s1.frame())?;
    inner_product(&s1.canonical, &other)
}

/// Physical inner product evaluated through the reduction in `frame`.
pub fn physical_inner_product_in(
    s1: &PhysicalState,
    s2: &PhysicalState,
    frame: FrameLabel,
) -> Result<Complex64> {
    inner_product(&s1.reduction(frame)?, &s2.reduction(frame)?)
}
