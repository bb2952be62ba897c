//! Wigner functions, reduced states and entanglement (ħ = 1).
//!
//! The discrete transform of a density kernel on a grid with `n` points is
//!
//! ```text
//! W(x_j, ξ_k) = dx/2π · Σ_m ρ↑(2j + m, 2j − m) e^{−i ξ_k m dx}
//! ```
//!
//! where `ρ↑` is the kernel interpolated spectrally onto the grid of spacing
//! `dx/2`, so both chord endpoints `x ± m dx/2` are sample points. Indices
//! are periodic on the refined grid and `ξ_k` runs over the momentum grid.

mod density;
mod entropy;
mod joint;
mod routes;

pub use density::{partial_trace, DensityMatrix};
pub use entropy::entanglement_entropy;
pub use joint::{
    marginal_wigner, marginal_wigner_with, transformed_joint_wigner, JointWigner, Keep, Quadrature,
    MAX_SAMPLES_PER_AXIS,
};
pub use routes::{route_deviation, switched_marginals, SwitchedMarginals};

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Largest imaginary part tolerated in a computed Wigner value.
const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// A real function sampled on a uniform phase-space grid; `values[[i, k]]`
/// belongs to `(xs[i], xis[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    xs: Vec<f64>,
    xis: Vec<f64>,
    values: Array2<f64>,
}

fn spacing(v: &[f64]) -> f64 {
    if v.len() > 1 {
        v[1] - v[0]
    } else {
        1.0
    }
}

impl WignerGrid {
    pub fn new(xs: Vec<f64>, xis: Vec<f64>, values: Array2<f64>) -> Result<Self> {
        if values.shape() != [xs.len(), xis.len()] {
            return Err(Error::InvalidGrid(format!(
                "values {:?} do not match {}×{} samples",
                values.shape(),
                xs.len(),
                xis.len()
            )));
        }
        Ok(Self { xs, xis, values })
    }

    pub fn sample(xs: Vec<f64>, xis: Vec<f64>, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let rows: Vec<Vec<f64>> = xs
            .par_iter()
            .map(|&x| xis.iter().map(|&xi| f(x, xi)).collect())
            .collect();
        let values = Array2::from_shape_fn((xs.len(), xis.len()), |(i, k)| rows[i][k]);
        Self { xs, xis, values }
    }

    /// Samples on the position and momentum points of `grid`.
    pub fn sample_on(grid: &Grid1D, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        Self::sample(grid.positions(), grid.momenta(), f)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn xis(&self) -> &[f64] {
        &self.xis
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn cell_area(&self) -> f64 {
        spacing(&self.xs) * spacing(&self.xis)
    }

    pub fn integral(&self) -> f64 {
        self.values.sum() * self.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `2π ∫∫ w²`, equal to `tr ρ²` for a Wigner function.
    pub fn purity(&self) -> f64 {
        2.0 * PI * self.values.iter().map(|v| v * v).sum::<f64>() * self.cell_area()
    }

    /// `∫ w dξ` at each `x`.
    pub fn position_marginal(&self) -> Vec<f64> {
        let d = spacing(&self.xis);
        self.values
            .rows()
            .into_iter()
            .map(|r| r.sum() * d)
            .collect()
    }

    /// `∫ w dx` at each `ξ`.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        let d = spacing(&self.xs);
        self.values
            .columns()
            .into_iter()
            .map(|c| c.sum() * d)
            .collect()
    }

    /// Samples with `|x| ≤ x_max` and `|ξ| ≤ xi_max`.
    pub fn window(&self, x_max: f64, xi_max: f64) -> WignerGrid {
        let rows: Vec<usize> = (0..self.xs.len())
            .filter(|&i| self.xs[i].abs() <= x_max)
            .collect();
        let cols: Vec<usize> = (0..self.xis.len())
            .filter(|&k| self.xis[k].abs() <= xi_max)
            .collect();
        WignerGrid {
            xs: rows.iter().map(|&i| self.xs[i]).collect(),
            xis: cols.iter().map(|&k| self.xis[k]).collect(),
            values: Array2::from_shape_fn((rows.len(), cols.len()), |(a, b)| {
                self.values[[rows[a], cols[b]]]
            }),
        }
    }

    /// Largest pointwise difference; the sample points must coincide.
    pub fn max_deviation(&self, other: &WignerGrid) -> Result<f64> {
        if self.values.shape() != other.values.shape() {
            return Err(Error::GridMismatch("Wigner grids differ in shape".into()));
        }
        let same = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs()))
        };
        if !same(&self.xs, &other.xs) || !same(&self.xis, &other.xis) {
            return Err(Error::GridMismatch(
                "Wigner grids sample different points".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Writes `x,xi,w` rows (x slowest) with a header line; values use the
    /// shortest exponent form that reads back exactly.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "x,xi,w")?;
        for (i, x) in self.xs.iter().enumerate() {
            for (k, xi) in self.xis.iter().enumerate() {
                writeln!(out, "{x:e},{xi:e},{:e}", self.values[[i, k]])?;
            }
        }
        Ok(())
    }
}

/// `∫∫ max(−w, 0) dx dξ`.
pub fn negativity_volume(w: &WignerGrid) -> f64 {
    w.values.iter().map(|v| (-v).max(0.0)).sum::<f64>() * w.cell_area()
}

/// Closed-form Wigner function of oscillator level 0 or 1 with width `alpha`:
/// `f⁰ = e^{−αx²−ξ²/α}/π`, `f¹ = (2αx² + 2ξ²/α − 1) f⁰`.
pub fn eigenstate_wigner_fn(
    level: u8,
    alpha: f64,
) -> Result<impl Fn(f64, f64) -> f64 + Copy + Send + Sync> {
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
    Ok(move |x: f64, xi: f64| {
        let s = alpha * x * x + xi * xi / alpha;
        let f0 = (-s).exp() / PI;
        if level == 0 {
            f0
        } else {
            (2.0 * s - 1.0) * f0
        }
    })
}

/// Samples the closed form on the position/momentum points of `grid`.
pub fn closed_form_eigenstate_wigner(level: u8, alpha: f64, grid: &Grid1D) -> Result<WignerGrid> {
    let f = eigenstate_wigner_fn(level, alpha)?;
    Ok(WignerGrid::sample_on(grid, f))
}

/// Band-limited interpolation from `n` points to `2n` points (spacing
/// halved); the Nyquist mode is split symmetrically so real kernels stay
/// real.
fn refinement_matrix(grid: &Grid1D) -> DMatrix<Complex64> {
    let n = grid.n();
    let half = grid.dx() / 2.0;
    let ps = grid.momenta();
    // kernel(d) for offset (m − 2j)·dx/2, d in −2n..2n
    let kernel: Vec<f64> = (-(2 * n as i64)..(2 * n as i64))
        .map(|d| {
            let y = d as f64 * half;
            let s: f64 = ps[1..].iter().map(|p| (p * y).cos()).sum();
            (s + (ps[0] * y).cos()) / n as f64
        })
        .collect();
    DMatrix::from_fn(2 * n, n, |m, j| {
        let d = m as i64 - 2 * j as i64;
        Complex64::new(kernel[(d + 2 * n as i64) as usize], 0.0)
    })
}

/// Discrete Wigner transform on the position/momentum points of the
/// kernel's grid.
pub fn wigner_transform(rho: &DensityMatrix) -> Result<WignerGrid> {
    let grid = rho.grid();
    let n = grid.n();
    let two_n = 2 * n as i64;
    let refine = refinement_matrix(&grid);
    let up = &refine * rho.kernel() * refine.adjoint();
    let dx = grid.dx();
    let xis = grid.momenta();
    // e^{−i ξ_k m dx} is n-periodic in m
    let phases: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (k, m) = (idx / n, idx % n);
            Complex64::from_polar(1.0, -xis[k] * m as f64 * dx)
        })
        .collect();
    let rows: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut folded = vec![Complex64::new(0.0, 0.0); n];
            for m in -(n as i64)..(n as i64) {
                let (a, b) = (2 * j as i64 + m, 2 * j as i64 - m);
                if a < 0 || b < 0 || a >= two_n || b >= two_n {
                    continue;
                }
                folded[m.rem_euclid(n as i64) as usize] += up[(a as usize, b as usize)];
            }
            (0..n)
                .map(|k| {
                    let z: Complex64 = (0..n)
                        .map(|m| folded[m] * phases[k * n + m])
                        .sum::<Complex64>()
                        * dx
                        / (2.0 * PI);
                    if z.im.abs() > IMAGINARY_TOLERANCE {
                        return Err(Error::InvalidDensityMatrix(format!(
                            "Wigner value has imaginary part {:e}",
                            z.im
                        )));
                    }
                    Ok(z.re)
                })
                .collect()
        })
        .collect();
    let mut values = Array2::zeros((n, n));
    for (j, row) in rows.into_iter().enumerate() {
        for (k, v) in row?.into_iter().enumerate() {
            values[[j, k]] = v;
        }
    }
    WignerGrid::new(grid.positions(), xis, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::FrameLabel;
    use crate::grid::{Representation, WaveFunction};
    use crate::switch::oscillator_eigenfunction;

    fn grid() -> Grid1D {
        Grid1D::new(128, 20.0).unwrap()
    }

    fn eigenstate(level: u8, alpha: f64, x0: f64) -> WaveFunction {
        let f = oscillator_eigenfunction(level, alpha).unwrap();
        WaveFunction::from_position_fn(&[(FrameLabel::B, grid())], FrameLabel::A, |x| {
            Complex64::new(f(x[0] - x0), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn closed_forms_at_origin_and_zero_contour() {
        let f0 = eigenstate_wigner_fn(0, 1.7).unwrap();
        let f1 = eigenstate_wigner_fn(1, 1.7).unwrap();
        assert!((f0(0.0, 0.0) - 1.0 / PI).abs() < 1e-15);
        assert!((f1(0.0, 0.0) + 1.0 / PI).abs() < 1e-15);
        for theta in [0.0, 0.4, 1.3, 2.9] {
            // 2αx² + 2ξ²/α = 1
            let (x, xi) = (
                (0.5 / 1.7f64).sqrt() * f64::cos(theta),
                (0.5 * 1.7f64).sqrt() * f64::sin(theta),
            );
            assert!(f1(x, xi).abs() < 1e-15);
        }
        assert!(eigenstate_wigner_fn(2, 1.0).is_err());
        assert!(eigenstate_wigner_fn(0, -1.0).is_err());
    }

    #[test]
    fn transform_matches_closed_forms() {
        for level in [0u8, 1] {
            let alpha = 1.0;
            let w = wigner_transform(
                &DensityMatrix::from_pure(&eigenstate(level, alpha, 0.0)).unwrap(),
            )
            .unwrap();
            let exact = closed_form_eigenstate_wigner(level, alpha, &grid()).unwrap();
            assert!(w.max_deviation(&exact).unwrap() < 1e-6);
            assert!((w.integral() - 1.0).abs() < 1e-6);
            assert!(w.max_abs() <= 1.0 / PI + 1e-6);
            assert!((w.purity() - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn marginals_are_densities() {
        let psi = WaveFunction::from_position_fn(&[(FrameLabel::B, grid())], FrameLabel::A, |x| {
            let a = oscillator_eigenfunction(1, 1.3).unwrap()(x[0] - 0.7);
            let b = oscillator_eigenfunction(0, 0.8).unwrap()(x[0] + 1.1);
            Complex64::from_polar(1.0, 0.9 * x[0]) * (a + Complex64::new(0.0, 0.5) * b)
        })
        .unwrap()
        .normalized()
        .unwrap();
        let w = wigner_transform(&DensityMatrix::from_pure(&psi).unwrap()).unwrap();
        for (m, z) in w.position_marginal().iter().zip(psi.amplitudes().iter()) {
            assert!((m - z.norm_sqr()).abs() < 1e-6);
        }
        let mom = psi.to_all(Representation::Momentum);
        for (m, z) in w.momentum_marginal().iter().zip(mom.amplitudes().iter()) {
            assert!((m - z.norm_sqr()).abs() < 1e-6);
        }
        assert!(w.max_abs() <= 1.0 / PI + 1e-6);
    }

    #[test]
    fn mixed_state_stays_below_pure_peak() {
        let rho = DensityMatrix::mixture(&[
            (0.5, eigenstate(0, 1.0, -3.0)),
            (0.5, eigenstate(0, 1.0, 3.0)),
        ])
        .unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-6);
        let w = wigner_transform(&rho).unwrap();
        assert!(w.max_abs() < 1.0 / PI - 0.1);
        assert!((w.purity() - rho.purity()).abs() < 1e-4);
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn negativity_of_eigenstates() {
        let g = Grid1D::new(256, 24.0).unwrap();
        assert_eq!(
            negativity_volume(&closed_form_eigenstate_wigner(0, 1.0, &g).unwrap()),
            0.0
        );
        // polar integral of the negative core: 2e^{−1/2} − 1
        let oracle = 2.0 * (-0.5f64).exp() - 1.0;
        let f1 = eigenstate_wigner_fn(1, 1.0).unwrap();
        let at = |n: usize| {
            negativity_volume(&WignerGrid::sample(
                linspace(-4.0, 4.0, n),
                linspace(-4.0, 4.0, n),
                f1,
            ))
        };
        let (coarse, fine) = (at(801), at(1601));
        assert!((coarse - fine).abs() < 1e-4);
        assert!((fine - oracle).abs() < 1e-4, "{fine}");
        assert!((oracle - 0.213_061_319_425_266_8).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_density_matrices() {
        let g = Grid1D::new(8, 4.0).unwrap();
        let bad_trace = DMatrix::identity(8, 8);
        assert!(matches!(
            DensityMatrix::new(g, bad_trace),
            Err(Error::InvalidDensityMatrix(_))
        ));
        let mut skew = DMatrix::<Complex64>::identity(8, 8) / Complex64::new(4.0, 0.0);
        skew[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(DensityMatrix::new(g, skew).is_err());
        let mut negative = DMatrix::<Complex64>::zeros(8, 8);
        negative[(0, 0)] = Complex64::new(1.5, 0.0);
        negative[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(g, negative).is_err());
    }

    #[test]
    fn csv_layout() {
        let g = Grid1D::new(8, 4.0).unwrap();
        let w = closed_form_eigenstate_wigner(0, 1.0, &g).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert!(text.starts_with("x,xi,w\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn spectrum_of_wide_range_reduced_state() {
        use crate::switch::{oscillator_product_state, switch_frame, FrameSwitch};
        let g = Grid1D::new(256, 48.0).unwrap();
        let psi = oscillator_product_state(g, 1.0, 1.0, 1, 0)
            .unwrap()
            .normalized()
            .unwrap();
        let out = switch_frame(
            &psi,
            &FrameSwitch::new(FrameLabel::C, FrameLabel::A).unwrap(),
        )
        .unwrap();
        let svd = entanglement_entropy(&out, FrameLabel::B).unwrap();
        for keep in [FrameLabel::B, FrameLabel::C] {
            let sp = partial_trace(&out, keep).unwrap().spectrum();
            assert!(sp.iter().all(|l| *l > -1e-12));
            assert!((sp.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            let s: f64 = sp.iter().filter(|l| **l > 0.0).map(|l| -l * l.ln()).sum();
            assert!((s - svd).abs() < 1e-9, "{keep:?}: {s} vs {svd}");
        }
    }
}
