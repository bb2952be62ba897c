//! Wavefunctions on periodic tensor-product grids.
//!
//! Position samples sit at `x_j = −L/2 + j·dx` and momentum samples at
//! `p_k = (k − n/2)·dp` with `dx = L/n`, `dp = 2π/L`; both layouts are
//! ascending and symmetric about index `n/2`. The momentum amplitude is the
//! discretised unitary Fourier transform
//!
//! ```text
//! ψ̃(p_k) = dx/√(2π) · Σ_j e^{−i p_k x_j} ψ(x_j)
//! ψ(x_j) = dp/√(2π) · Σ_k e^{+i p_k x_j} ψ̃(p_k)
//! ```
//!
//! so `Σ|ψ|² dx = Σ|ψ̃|² dp` and the same norm formula (cell volume times
//! squared moduli) applies in either representation. Because `n` is a
//! multiple of four the transform reduces to an FFT bracketed by `(−1)^j`
//! and `(−1)^k` sign flips.

pub mod dense;
pub mod fixture;
mod observable;
pub mod random;

pub use observable::{expectation, Factor, Observable, Op, Term};

use std::cell::RefCell;
use std::f64::consts::PI;

use ndarray::{ArrayD, Axis, IxDyn};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::classical::FrameLabel;
use crate::error::{Error, Result};

/// Maximum number of tensor axes.
pub const MAX_AXES: usize = 3;

/// Tolerance for treating two grid lengths as equal.
const LENGTH_TOLERANCE: f64 = 1e-12;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// A uniform periodic grid of `n` points on a box of length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two ≥ 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn momentum(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.position(j)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.momentum(k)).collect()
    }

    /// Largest representable momentum magnitude, `π/dx`.
    pub fn max_momentum(&self) -> f64 {
        PI / self.dx()
    }

    /// Index of `−x_j` (equivalently `−p_k`) in the symmetric layout.
    pub fn reflect_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Wraps a signed offset from the centre (`j − n/2`) to an index.
    pub fn wrap_centered(&self, offset: i64) -> usize {
        let n = self.n as i64;
        (offset + n / 2).rem_euclid(n) as usize
    }

    pub fn centered(&self, j: usize) -> i64 {
        j as i64 - (self.n / 2) as i64
    }

    pub fn approx_eq(&self, other: &Grid1D) -> bool {
        self.n == other.n && (self.length - other.length).abs() <= LENGTH_TOLERANCE * self.length
    }

    fn cell(&self, repr: Representation) -> f64 {
        match repr {
            Representation::Position => self.dx(),
            Representation::Momentum => self.dp(),
        }
    }
}

/// Basis in which an axis' amplitudes are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }
}

/// One tensor factor of a wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub label: FrameLabel,
    pub grid: Grid1D,
    pub representation: Representation,
}

impl AxisSpec {
    pub fn position(label: FrameLabel, grid: Grid1D) -> Self {
        Self {
            label,
            grid,
            representation: Representation::Position,
        }
    }

    pub fn momentum(label: FrameLabel, grid: Grid1D) -> Self {
        Self {
            label,
            grid,
            representation: Representation::Momentum,
        }
    }
}

/// Complex amplitudes over a tensor grid, tagged with the frame whose
/// perspective they describe.
///
/// Axis 0 is the slowest-varying index of the row-major amplitude array.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    axes: Vec<AxisSpec>,
    amplitudes: ArrayD<Complex64>,
    frame: FrameLabel,
}

impl WaveFunction {
    pub fn new(
        axes: Vec<AxisSpec>,
        amplitudes: ArrayD<Complex64>,
        frame: FrameLabel,
    ) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_AXES {
            return Err(Error::InvalidGrid(format!(
                "1 to {MAX_AXES} axes supported, got {}",
                axes.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.label == a.label) {
                return Err(Error::InvalidGrid(format!(
                    "axis {} appears twice",
                    a.label
                )));
            }
            if a.label == frame {
                return Err(Error::InvalidGrid(format!(
                    "frame {frame} cannot also be an axis"
                )));
            }
            Grid1D::new(a.grid.n, a.grid.length)?;
        }
        let shape: Vec<usize> = axes.iter().map(|a| a.grid.n).collect();
        if amplitudes.shape() != shape.as_slice() {
            return Err(Error::InvalidGrid(format!(
                "amplitude shape {:?} does not match grid shape {shape:?}",
                amplitudes.shape()
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidGrid("non-finite amplitude".into()));
        }
        Ok(Self {
            axes,
            amplitudes,
            frame,
        })
    }

    /// Samples `f` at the grid points of the given axes, all in position
    /// representation.
    pub fn from_position_fn(
        axes: &[(FrameLabel, Grid1D)],
        frame: FrameLabel,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        let specs: Vec<AxisSpec> = axes
            .iter()
            .map(|(l, g)| AxisSpec::position(*l, *g))
            .collect();
        Self::from_fn(specs, frame, f)
    }

    /// Samples `f` at the coordinates (position or momentum per axis).
    pub fn from_fn(
        axes: Vec<AxisSpec>,
        frame: FrameLabel,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(|a| a.grid.n).collect();
        let mut coords = vec![0.0; axes.len()];
        let amps = ArrayD::from_shape_fn(IxDyn(&shape), |idx| {
            for (d, a) in axes.iter().enumerate() {
                coords[d] = match a.representation {
                    Representation::Position => a.grid.position(idx[d]),
                    Representation::Momentum => a.grid.momentum(idx[d]),
                };
            }
            f(&coords)
        });
        Self::new(axes, amps, frame)
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn labels(&self) -> Vec<FrameLabel> {
        self.axes.iter().map(|a| a.label).collect()
    }

    pub fn amplitudes(&self) -> &ArrayD<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> ArrayD<Complex64> {
        self.amplitudes
    }

    pub fn frame(&self) -> FrameLabel {
        self.frame
    }

    pub fn ndim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn axis_index(&self, label: FrameLabel) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.label == label)
            .ok_or(Error::UnknownAxis(label))
    }

    pub fn axis(&self, label: FrameLabel) -> Result<&AxisSpec> {
        Ok(&self.axes[self.axis_index(label)?])
    }

    pub fn representations(&self) -> Vec<Representation> {
        self.axes.iter().map(|a| a.representation).collect()
    }

    /// Product of the per-axis cell sizes in the current representations.
    pub fn cell_volume(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.grid.cell(a.representation))
            .product()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidGrid("cannot normalize a zero state".into()));
        }
        self.amplitudes.mapv_inplace(|z| z / norm);
        Ok(self)
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.amplitudes.mapv_inplace(|z| z * c);
        self
    }

    pub fn with_frame(mut self, frame: FrameLabel) -> Result<Self> {
        if self.axes.iter().any(|a| a.label == frame) {
            return Err(Error::InvalidGrid(format!(
                "frame {frame} cannot also be an axis"
            )));
        }
        self.frame = frame;
        Ok(self)
    }

    /// Renames axis labels and frame in one step.
    pub fn relabeled(mut self, labels: &[FrameLabel], frame: FrameLabel) -> Result<Self> {
        if labels.len() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.axes.len(),
                got: labels.len(),
            });
        }
        let mut axes = self.axes.clone();
        for (a, l) in axes.iter_mut().zip(labels) {
            a.label = *l;
        }
        let amps = std::mem::take(&mut self.amplitudes);
        Self::new(axes, amps, frame)
    }

    /// Largest boundary amplitude relative to the largest amplitude, with
    /// every axis in position representation.
    pub fn boundary_decay_ratio(&self) -> f64 {
        let pos = self.to_all(Representation::Position);
        let max = pos.amplitudes.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let mut boundary = 0.0f64;
        for (idx, z) in pos.amplitudes.indexed_iter() {
            let on_edge = (0..pos.ndim()).any(|d| idx[d] == 0 || idx[d] + 1 == pos.axes[d].grid.n);
            if on_edge {
                boundary = boundary.max(z.norm());
            }
        }
        boundary / max
    }

    /// Converts one axis to the target representation.
    pub fn to_representation(&self, label: FrameLabel, target: Representation) -> Result<Self> {
        let d = self.axis_index(label)?;
        let mut out = self.clone();
        out.convert_axis(d, target);
        Ok(out)
    }

    pub fn to_all(&self, target: Representation) -> Self {
        let mut out = self.clone();
        for d in 0..out.ndim() {
            out.convert_axis(d, target);
        }
        out
    }

    /// Converts every axis to match `reprs`.
    pub fn to_representations(&self, reprs: &[Representation]) -> Result<Self> {
        if reprs.len() != self.ndim() {
            return Err(Error::DimensionMismatch {
                expected: self.ndim(),
                got: reprs.len(),
            });
        }
        let mut out = self.clone();
        for (d, r) in reprs.iter().enumerate() {
            out.convert_axis(d, *r);
        }
        Ok(out)
    }

    pub(crate) fn convert_axis(&mut self, d: usize, target: Representation) {
        let spec = self.axes[d];
        if spec.representation == target {
            return;
        }
        let n = spec.grid.n;
        let (forward, scale) = match target {
            Representation::Momentum => (true, spec.grid.dx() / (2.0 * PI).sqrt()),
            Representation::Position => (false, spec.grid.dp() / (2.0 * PI).sqrt()),
        };
        let fft = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            if forward {
                p.plan_fft_forward(n)
            } else {
                p.plan_fft_inverse(n)
            }
        });
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for mut lane in self.amplitudes.lanes_mut(Axis(d)) {
            for (j, (b, z)) in buf.iter_mut().zip(lane.iter()).enumerate() {
                *b = if j % 2 == 0 { *z } else { -*z };
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for (k, (z, b)) in lane.iter_mut().zip(buf.iter()).enumerate() {
                *z = if k % 2 == 0 { *b * scale } else { -*b * scale };
            }
        }
        self.axes[d].representation = target;
    }

    /// Multiplies by `f(coordinate)` along one axis in its current
    /// representation.
    pub(crate) fn multiply_axis(&mut self, d: usize, f: impl Fn(f64) -> f64) {
        let spec = self.axes[d];
        let values: Vec<f64> = match spec.representation {
            Representation::Position => spec.grid.positions(),
            Representation::Momentum => spec.grid.momenta(),
        }
        .into_iter()
        .map(f)
        .collect();
        for mut lane in self.amplitudes.lanes_mut(Axis(d)) {
            for (z, v) in lane.iter_mut().zip(&values) {
                *z *= *v;
            }
        }
    }

    /// Multiplies pointwise by `f(coordinates)` in the current representations.
    pub fn multiply_pointwise(&mut self, f: impl Fn(&[f64]) -> Complex64) {
        let coords_of: Vec<Vec<f64>> = self
            .axes
            .iter()
            .map(|a| match a.representation {
                Representation::Position => a.grid.positions(),
                Representation::Momentum => a.grid.momenta(),
            })
            .collect();
        let mut coords = vec![0.0; self.ndim()];
        for (idx, z) in self.amplitudes.indexed_iter_mut() {
            for (d, c) in coords.iter_mut().enumerate() {
                *c = coords_of[d][idx[d]];
            }
            *z *= f(&coords);
        }
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.amplitudes
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.ndim() != other.ndim() {
            return Err(Error::GridMismatch(format!(
                "{} vs {} axes",
                self.ndim(),
                other.ndim()
            )));
        }
        for (a, b) in self.axes.iter().zip(&other.axes) {
            if a.label != b.label || !a.grid.approx_eq(&b.grid) {
                return Err(Error::GridMismatch(format!(
                    "axis {} vs {}",
                    a.label, b.label
                )));
            }
            if a.representation != b.representation {
                return Err(Error::GridMismatch(format!(
                    "axis {} in {} vs {} representation",
                    a.label,
                    a.representation.name(),
                    b.representation.name()
                )));
            }
        }
        Ok(())
    }

    /// Adds `c · other` in place; grids and representations must match.
    pub fn add_scaled(&mut self, c: Complex64, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        ndarray::Zip::from(&mut self.amplitudes)
            .and(&other.amplitudes)
            .for_each(|a, b| *a += c * b);
        Ok(())
    }
}

/// Converts one axis to `target`; see [`WaveFunction::to_representation`].
pub fn change_representation(
    psi: &WaveFunction,
    axis: FrameLabel,
    target: Representation,
) -> Result<WaveFunction> {
    psi.to_representation(axis, target)
}

/// `⟨ψ|φ⟩ = Σ conj(ψ) φ · cell volume`, conjugate-linear in `psi`.
pub fn inner_product(psi: &WaveFunction, phi: &WaveFunction) -> Result<Complex64> {
    psi.check_compatible(phi)?;
    let sum: Complex64 = psi
        .amplitudes
        .iter()
        .zip(phi.amplitudes.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * psi.cell_volume())
}

/// Phase-insensitive overlap `|⟨ψ|φ⟩|² / (⟨ψ|ψ⟩⟨φ|φ⟩)`.
pub fn fidelity(psi: &WaveFunction, phi: &WaveFunction) -> Result<f64> {
    let ov = inner_product(psi, phi)?;
    Ok(ov.norm_sqr() / (psi.norm_squared() * phi.norm_squared()))
}

/// Largest pointwise amplitude difference; grids and representations must match.
pub fn max_deviation(psi: &WaveFunction, phi: &WaveFunction) -> Result<f64> {
    psi.check_compatible(phi)?;
    Ok(psi
        .amplitudes
        .iter()
        .zip(phi.amplitudes.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Multiplies by `exp(sign · i · q_j · p_k)` with `q_j` the position on
/// `pos_axis` and `p_k` the momentum on `mom_axis`.
///
/// In full position representation this is the argument shift
/// `ψ(…, q_k + sign·q_j, …)`, exact on the periodic grid. The output keeps
/// the input's representations.
pub fn apply_shear_phase(
    psi: &WaveFunction,
    pos_axis: FrameLabel,
    mom_axis: FrameLabel,
    sign: i8,
) -> Result<WaveFunction> {
    if pos_axis == mom_axis {
        return Err(Error::AxisClash(pos_axis));
    }
    let dq = psi.axis_index(pos_axis)?;
    let dk = psi.axis_index(mom_axis)?;
    let reprs = psi.representations();
    let mut work = psi.clone();
    work.convert_axis(dq, Representation::Position);
    work.convert_axis(dk, Representation::Momentum);
    let s = if sign >= 0 { 1.0 } else { -1.0 };
    work.multiply_pointwise(|c| Complex64::from_polar(1.0, s * c[dq] * c[dk]));
    work.to_representations(&reprs)
}
