//! The `k`-shifted constraint trivialization checked against dense matrices.
//!
//! With `T' = exp(i q_F (p_a + p_b + k))` the constraint `P = p_F + p_a + p_b`
//! is conjugated to `p_F − k`. The generator is block diagonal in the
//! momenta of the two reduced axes, so the 3-axis oracle is assembled from
//! dense `n × n` blocks in the frame axis: position basis for `T'`, and the
//! explicit discrete Fourier matrix to reach its momentum basis.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use num_complex::Complex64;

use super::PhysicalState;
use crate::error::{Error, Result};
use crate::grid::dense::{fourier_matrix_1d, momentum_matrix_1d, MAX_DENSE_DIM};
use crate::grid::{fidelity, AxisSpec, WaveFunction};

const K_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct TrivializationReport {
    pub k: f64,
    /// Largest entry of `T'PT'† − (p_F − k)` over the columns of every
    /// block whose momentum shift does not wrap around the grid.
    pub constraint_deviation: f64,
    /// The same over all entries, wrap-around columns included.
    pub constraint_deviation_full: f64,
    /// `‖P Ψ‖ / ‖Ψ‖` for the assembled 3-axis state.
    pub constraint_residual: f64,
    /// `‖(p_F − k) T'Ψ‖ / ‖Ψ‖`.
    pub annihilation_residual: f64,
    /// The two-particle amplitude `⟨p_F = k| T'Ψ`.
    pub reduced: WaveFunction,
    /// Fidelity of `reduced` with the state's own reduction.
    pub fidelity: f64,
}

/// Builds the 3-axis oracle for `state` and the shift `k` (an integer
/// multiple of `dp` inside the momentum grid) and reports how well the
/// trivialization identities hold.
pub fn trivialization_family_check(state: &PhysicalState, k: f64) -> Result<TrivializationReport> {
    let psi = state.canonical();
    let grid = psi.axes()[0].grid;
    let n = grid.n();
    if n * n * n > MAX_DENSE_DIM {
        return Err(Error::TooLarge {
            dim: n * n * n,
            limit: MAX_DENSE_DIM,
        });
    }
    let dp = grid.dp();
    let shift = (k / dp).round();
    let k_index = shift as i64 + (n / 2) as i64;
    if !k.is_finite() || (k / dp - shift).abs() > K_TOLERANCE || k_index < 0 || k_index >= n as i64
    {
        return Err(Error::KOutOfRange { k, dp });
    }
    let k_index = k_index as usize;

    let u = fourier_matrix_1d(&grid);
    let u_adj = u.adjoint();
    let p_pos = momentum_matrix_1d(&grid);
    let p_diag: Vec<f64> = grid.momenta();
    let xs = grid.positions();
    let amps = psi.amplitudes();

    let mut dev_window = 0.0f64;
    let mut dev_full = 0.0f64;
    let mut norm_sq = 0.0;
    let mut constraint_sq = 0.0;
    let mut annihilation_sq = 0.0;
    let mut reduced = Array2::<Complex64>::zeros((n, n));

    for ia in 0..n {
        for ib in 0..n {
            let pab = p_diag[ia] + p_diag[ib];
            let s = pab + k;
            let m = grid.centered(ia) + grid.centered(ib) + shift as i64;
            let t = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::from_polar(1.0, xs[i] * s)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            // conjugated constraint minus (p_F − k), in the frame's momentum basis
            let conj =
                &t * &p_pos * t.adjoint() + DMatrix::identity(n, n) * Complex64::new(pab, 0.0);
            let mut diff = &u * conj * &u_adj;
            for i in 0..n {
                diff[(i, i)] -= Complex64::new(p_diag[i] - k, 0.0);
            }
            for j in 0..n {
                let source = j as i64 - m;
                let unwrapped = (0..n as i64).contains(&source);
                for i in 0..n {
                    let e = diff[(i, j)].norm();
                    dev_full = dev_full.max(e);
                    if unwrapped {
                        dev_window = dev_window.max(e);
                    }
                }
            }

            let amp = amps[[ia, ib]];
            let frame_index = grid.wrap_centered(-(grid.centered(ia) + grid.centered(ib)));
            let column = DVector::from_fn(n, |i, _| {
                if i == frame_index {
                    amp
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            norm_sq += amp.norm_sqr();
            let total = p_diag[frame_index] + pab;
            constraint_sq += (total * amp).norm_sqr();
            let moved = &u * (&t * (&u_adj * column));
            for (i, z) in moved.iter().enumerate() {
                annihilation_sq += ((p_diag[i] - k) * z).norm_sqr();
            }
            reduced[[ia, ib]] = moved[k_index];
        }
    }

    let labels = psi.labels();
    let reduced = WaveFunction::new(
        vec![
            AxisSpec::momentum(labels[0], grid),
            AxisSpec::momentum(labels[1], grid),
        ],
        reduced.into_dyn(),
        psi.frame(),
    )?;
    let norm = norm_sq.sqrt();
    Ok(TrivializationReport {
        k,
        constraint_deviation: dev_window,
        constraint_deviation_full: dev_full,
        constraint_residual: constraint_sq.sqrt() / norm,
        annihilation_residual: annihilation_sq.sqrt() / norm,
        fidelity: fidelity(&reduced, psi)?,
        reduced,
    })
}
