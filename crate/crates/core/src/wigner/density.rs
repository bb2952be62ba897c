use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::classical::FrameLabel;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Representation, WaveFunction};

const HERMITIAN_TOLERANCE: f64 = 1e-10;
const TRACE_TOLERANCE: f64 = 1e-10;
const EIGEN_TOLERANCE: f64 = 1e-8;

/// Density-matrix kernel `ρ(x_i, x_j)` on a 1D position grid, normalised so
/// that `Σ_i ρ(x_i, x_i) dx = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: Grid1D,
    kernel: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(grid: Grid1D, kernel: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.n();
        if kernel.shape() != (n, n) {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected {n}×{n}, got {}×{}",
                kernel.nrows(),
                kernel.ncols()
            )));
        }
        let dx = grid.dx();
        let scale = kernel.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for i in 0..n {
            for j in 0..=i {
                if (kernel[(i, j)] - kernel[(j, i)].conj()).norm() > HERMITIAN_TOLERANCE * scale {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        let trace: f64 = (0..n).map(|i| kernel[(i, i)].re).sum::<f64>() * dx;
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let min = hermitian_eigenvalues(&kernel, dx)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { grid, kernel })
    }

    /// `|ψ⟩⟨ψ|` for a normalised single-axis state.
    pub fn from_pure(psi: &WaveFunction) -> Result<Self> {
        if psi.ndim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: psi.ndim(),
            });
        }
        let pos = psi.to_all(Representation::Position).normalized()?;
        let v: Vec<Complex64> = pos.amplitudes().iter().copied().collect();
        let n = v.len();
        Self::new(
            pos.axes()[0].grid,
            DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()),
        )
    }

    /// Convex combination of pure states.
    pub fn mixture(parts: &[(f64, WaveFunction)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidDensityMatrix("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        let mut kernel = DMatrix::zeros(first.1.len(), first.1.len());
        let mut grid = None;
        for (w, psi) in parts {
            if *w < 0.0 {
                return Err(Error::InvalidDensityMatrix(format!("negative weight {w}")));
            }
            let pure = Self::from_pure(psi)?;
            if grid.is_some_and(|g: Grid1D| !g.approx_eq(&pure.grid)) {
                return Err(Error::GridMismatch(
                    "mixture components on different grids".into(),
                ));
            }
            grid = Some(pure.grid);
            kernel += pure.kernel * Complex64::new(w / total, 0.0);
        }
        Self::new(grid.expect("non-empty"), kernel)
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn kernel(&self) -> &DMatrix<Complex64> {
        &self.kernel
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        let dx = self.grid.dx();
        self.kernel.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx
    }

    /// Eigenvalues of the trace-one operator, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev = hermitian_eigenvalues(&self.kernel, self.grid.dx());
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

/// Entries below this fraction of the largest are zeroed before the
/// eigenvalue solve.
const FLUSH_RELATIVE: f64 = 1e-30;

fn hermitian_eigenvalues(kernel: &DMatrix<Complex64>, dx: f64) -> Vec<f64> {
    let max = kernel.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let h = (kernel + kernel.adjoint()) * Complex64::new(0.5 * dx, 0.0);
    let h = h.map(|z| {
        if z.norm() < FLUSH_RELATIVE * max * dx {
            Complex64::new(0.0, 0.0)
        } else {
            z
        }
    });
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// Reduced density matrix of `keep` for a two-axis pure state.
pub fn partial_trace(psi: &WaveFunction, keep: FrameLabel) -> Result<DensityMatrix> {
    if psi.ndim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: psi.ndim(),
        });
    }
    let dk = psi.axis_index(keep)?;
    let pos = psi.to_all(Representation::Position).normalized()?;
    let traced = pos.axes()[1 - dk].grid;
    let a = pos.amplitudes();
    let (n0, n1) = (a.shape()[0], a.shape()[1]);
    let m = DMatrix::from_fn(n0, n1, |i, j| a[[i, j]]);
    let m = if dk == 0 { m } else { m.transpose() };
    let kernel = (&m * m.adjoint()) * Complex64::new(traced.dx(), 0.0);
    DensityMatrix::new(pos.axes()[dk].grid, kernel)
}
