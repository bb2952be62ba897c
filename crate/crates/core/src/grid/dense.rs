//! Explicit matrices over small flattened grids, used as brute-force oracles
//! for the spectral operations.
//!
//! The basis is the position basis of every axis, flattened row-major
//! (axis 0 slowest). The momentum operator is built directly from its
//! definition `P_{jl} = (1/n) Σ_k p_k e^{i p_k (x_j − x_l)}` rather than from
//! an FFT, so the oracle shares no code path with [`WaveFunction`]
//! representation changes.

use nalgebra::{DMatrix, DVector};
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use super::{Grid1D, Observable, Op, Representation, WaveFunction};
use crate::error::{Error, Result};

/// Largest flattened dimension accepted by the oracle.
pub const MAX_DENSE_DIM: usize = 4096;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Symbolic description of an operator to materialise.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorExpr {
    Identity,
    /// Position operator on the given axis index.
    Position(usize),
    /// Momentum operator on the given axis index.
    Momentum(usize),
    Scale(Complex64, Box<OperatorExpr>),
    Sum(Vec<OperatorExpr>),
    /// Ordered product, leftmost factor applied last.
    Product(Vec<OperatorExpr>),
    /// `exp(i H)` for Hermitian `H`.
    ExpI(Box<OperatorExpr>),
}

impl OperatorExpr {
    pub fn scaled(self, c: f64) -> Self {
        OperatorExpr::Scale(Complex64::new(c, 0.0), Box::new(self))
    }

    pub fn exp_i(self) -> Self {
        OperatorExpr::ExpI(Box::new(self))
    }
}

/// A complex square matrix acting on the flattened position basis of `grids`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub matrix: DMatrix<Complex64>,
    pub grids: Vec<Grid1D>,
}

fn dimension(grids: &[Grid1D]) -> Result<usize> {
    let dim: usize = grids.iter().map(|g| g.n()).product();
    if dim > MAX_DENSE_DIM {
        return Err(Error::TooLarge {
            dim,
            limit: MAX_DENSE_DIM,
        });
    }
    Ok(dim)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Position operator of a single grid.
pub fn position_matrix_1d(grid: &Grid1D) -> DMatrix<Complex64> {
    DMatrix::from_fn(grid.n(), grid.n(), |i, j| {
        if i == j {
            Complex64::new(grid.position(i), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Unitary discrete Fourier matrix `U_{kj} = e^{−i p_k x_j}/√n` mapping
/// position samples to momentum samples (up to the `dx`/`dp` scalings,
/// which cancel in a similarity transform).
pub fn fourier_matrix_1d(grid: &Grid1D) -> DMatrix<Complex64> {
    let n = grid.n();
    let norm = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |k, j| {
        Complex64::from_polar(norm, -grid.momentum(k) * grid.position(j))
    })
}

/// Momentum operator of a single grid in the position basis.
pub fn momentum_matrix_1d(grid: &Grid1D) -> DMatrix<Complex64> {
    let n = grid.n();
    let xs = grid.positions();
    let ps = grid.momenta();
    DMatrix::from_fn(n, n, |j, l| {
        let s: Complex64 = ps
            .iter()
            .map(|p| Complex64::from_polar(*p, p * (xs[j] - xs[l])))
            .sum();
        s / n as f64
    })
}

fn embed_single(
    grids: &[Grid1D],
    axis: usize,
    single: DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    if axis >= grids.len() {
        return Err(Error::DimensionMismatch {
            expected: grids.len(),
            got: axis + 1,
        });
    }
    let mut acc = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for (d, g) in grids.iter().enumerate() {
        let factor = if d == axis {
            single.clone()
        } else {
            DMatrix::identity(g.n(), g.n())
        };
        acc = kron(&acc, &factor);
    }
    Ok(acc)
}

pub fn is_hermitian(m: &DMatrix<Complex64>, tol: f64) -> bool {
    let (r, c) = m.shape();
    r == c && (0..r).all(|i| (0..c).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// `exp(i H)` for Hermitian `H` via its eigendecomposition.
pub fn expm_i_hermitian(h: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if !is_hermitian(h, HERMITIAN_TOLERANCE * (1.0 + h.camax())) {
        return Err(Error::NonHermitianObservable(
            "generator of exp(iH) is not Hermitian".into(),
        ));
    }
    let eig = h.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|l| Complex64::from_polar(1.0, *l)),
    ));
    let v = &eig.eigenvectors;
    Ok(v * phases * v.adjoint())
}

/// Materialises `expr` over the tensor grid.
pub fn dense_operator(expr: &OperatorExpr, grids: &[Grid1D]) -> Result<DenseOperator> {
    let dim = dimension(grids)?;
    let matrix = build(expr, grids, dim)?;
    Ok(DenseOperator {
        matrix,
        grids: grids.to_vec(),
    })
}

fn build(expr: &OperatorExpr, grids: &[Grid1D], dim: usize) -> Result<DMatrix<Complex64>> {
    Ok(match expr {
        OperatorExpr::Identity => DMatrix::identity(dim, dim),
        OperatorExpr::Position(a) => embed_single(
            grids,
            *a,
            position_matrix_1d(&grids[(*a).min(grids.len() - 1)]),
        )?,
        OperatorExpr::Momentum(a) => embed_single(
            grids,
            *a,
            momentum_matrix_1d(&grids[(*a).min(grids.len() - 1)]),
        )?,
        OperatorExpr::Scale(c, inner) => build(inner, grids, dim)? * *c,
        OperatorExpr::Sum(parts) => {
            let mut acc = DMatrix::zeros(dim, dim);
            for p in parts {
                acc += build(p, grids, dim)?;
            }
            acc
        }
        OperatorExpr::Product(parts) => {
            let mut acc = DMatrix::identity(dim, dim);
            for p in parts {
                acc *= build(p, grids, dim)?;
            }
            acc
        }
        OperatorExpr::ExpI(inner) => expm_i_hermitian(&build(inner, grids, dim)?)?,
    })
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Dense form of a polynomial observable over the axes of `psi`.
    pub fn from_observable(observable: &Observable, psi: &WaveFunction) -> Result<Self> {
        let grids: Vec<Grid1D> = psi.axes().iter().map(|a| a.grid).collect();
        let dim = dimension(&grids)?;
        let mut acc = DMatrix::zeros(dim, dim);
        for t in observable.terms() {
            let mut prod = DMatrix::identity(dim, dim);
            for f in &t.factors {
                let d = psi.axis_index(f.axis)?;
                let single = match f.op {
                    Op::Q => position_matrix_1d(&grids[d]),
                    Op::P => momentum_matrix_1d(&grids[d]),
                };
                prod *= embed_single(&grids, d, single)?;
            }
            acc += prod * t.coef;
        }
        Ok(Self { matrix: acc, grids })
    }

    /// Applies the matrix to `psi` (converted to position representation).
    /// The result is in position representation.
    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        let grids: Vec<Grid1D> = psi.axes().iter().map(|a| a.grid).collect();
        if grids.len() != self.grids.len()
            || grids.iter().zip(&self.grids).any(|(a, b)| !a.approx_eq(b))
        {
            return Err(Error::GridMismatch(
                "dense operator built for different grids".into(),
            ));
        }
        let pos = psi.to_all(Representation::Position);
        let v = DVector::from_iterator(pos.len(), pos.amplitudes().iter().copied());
        let out = &self.matrix * v;
        let shape: Vec<usize> = grids.iter().map(|g| g.n()).collect();
        let amps = ArrayD::from_shape_vec(IxDyn(&shape), out.iter().copied().collect())
            .map_err(|e| Error::InvalidGrid(e.to_string()))?;
        WaveFunction::new(pos.axes().to_vec(), amps, pos.frame())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        is_hermitian(&self.matrix, tol)
    }
}
