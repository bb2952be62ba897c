//! Joint Wigner function of B and C seen from A after switching a product
//! of oscillator eigenstates out of C's frame:
//!
//! ```text
//! f_{BC|A}(q_B, q_C, π_B, π_C) = f_A(−q_C, −π_B − π_C) · f_B(q_B − q_C, π_B)
//! ```
//!
//! The function is evaluated lazily; marginals integrate it over a uniform
//! rectangle rule whose nodes are chosen from the widths of the factors.

use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;

use super::WignerGrid;
use crate::error::{Error, Result};

/// Largest per-axis sample count accepted by [`JointWigner::sample`].
pub const MAX_SAMPLES_PER_AXIS: usize = 64;

/// `s = αx² + ξ²/α` above which an eigenstate factor is treated as zero.
const SUPPORT_EXPONENT: f64 = 40.0;

/// Quadrature step in units of the narrowest Gaussian standard deviation.
const STEP_PER_WIDTH: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointWigner {
    level_a: u8,
    level_b: u8,
    alpha_a: f64,
    alpha_b: f64,
}

/// Which particle's phase-space pair a marginal keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    B,
    C,
}

/// Uniform nodes `(min, max, count)` for the integrated position and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub q: (f64, f64, usize),
    pub pi: (f64, f64, usize),
}

fn nodes((lo, hi, n): (f64, f64, usize)) -> (Vec<f64>, f64) {
    if n < 2 {
        return (vec![0.5 * (lo + hi)], hi - lo);
    }
    let h = (hi - lo) / (n - 1) as f64;
    ((0..n).map(|i| lo + i as f64 * h).collect(), h)
}

fn span(lo: f64, hi: f64, step: f64) -> (f64, f64, usize) {
    (lo, hi, ((hi - lo) / step).ceil() as usize + 1)
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(*x), b.max(*x))
        })
}

pub fn transformed_joint_wigner(
    level_a: u8,
    level_b: u8,
    alpha_a: f64,
    alpha_b: f64,
) -> Result<JointWigner> {
    for (name, level, alpha) in [("A", level_a, alpha_a), ("B", level_b, alpha_b)] {
        if level > 1 {
            return Err(Error::InvalidSystem(format!(
                "level of {name} must be 0 or 1, got {level}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidSystem(format!(
                "width of {name} must be positive, got {alpha}"
            )));
        }
    }
    Ok(JointWigner {
        level_a,
        level_b,
        alpha_a,
        alpha_b,
    })
}

impl JointWigner {
    pub fn levels(&self) -> (u8, u8) {
        (self.level_a, self.level_b)
    }

    pub fn alphas(&self) -> (f64, f64) {
        (self.alpha_a, self.alpha_b)
    }

    pub fn eval(&self, q_b: f64, q_c: f64, pi_b: f64, pi_c: f64) -> f64 {
        let (xa, ya) = (-q_c, -pi_b - pi_c);
        let (xb, yb) = (q_b - q_c, pi_b);
        let sa = self.alpha_a * xa * xa + ya * ya / self.alpha_a;
        let sb = self.alpha_b * xb * xb + yb * yb / self.alpha_b;
        let mut v = (-(sa + sb)).exp() / (PI * PI);
        if self.level_a == 1 {
            v *= 2.0 * sa - 1.0;
        }
        if self.level_b == 1 {
            v *= 2.0 * sb - 1.0;
        }
        v
    }

    fn radius_x(alpha: f64) -> f64 {
        (SUPPORT_EXPONENT / alpha).sqrt()
    }

    fn radius_xi(alpha: f64) -> f64 {
        (SUPPORT_EXPONENT * alpha).sqrt()
    }

    fn width_x(alpha: f64) -> f64 {
        (0.5 / alpha).sqrt()
    }

    fn width_xi(alpha: f64) -> f64 {
        (0.5 * alpha).sqrt()
    }

    /// Materialises the function on a tensor grid (`q_B, q_C, π_B, π_C`,
    /// last index fastest).
    pub fn sample(&self, q_b: &[f64], q_c: &[f64], pi_b: &[f64], pi_c: &[f64]) -> Result<Vec<f64>> {
        for axis in [q_b, q_c, pi_b, pi_c] {
            if axis.len() > MAX_SAMPLES_PER_AXIS {
                return Err(Error::TooLarge {
                    dim: axis.len(),
                    limit: MAX_SAMPLES_PER_AXIS,
                });
            }
        }
        let mut out = Vec::with_capacity(q_b.len() * q_c.len() * pi_b.len() * pi_c.len());
        for &a in q_b {
            for &b in q_c {
                for &c in pi_b {
                    for &d in pi_c {
                        out.push(self.eval(a, b, c, d));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Rectangle-rule integral over the support with `nodes` points per axis.
    pub fn integral(&self, nodes_per_axis: usize) -> f64 {
        let (rxa, rxb) = (Self::radius_x(self.alpha_a), Self::radius_x(self.alpha_b));
        let (rya, ryb) = (Self::radius_xi(self.alpha_a), Self::radius_xi(self.alpha_b));
        let (qb, hqb) = nodes((-(rxa + rxb), rxa + rxb, nodes_per_axis));
        let (qc, hqc) = nodes((-rxa, rxa, nodes_per_axis));
        let (pb, hpb) = nodes((-ryb, ryb, nodes_per_axis));
        let (pc, hpc) = nodes((-(rya + ryb), rya + ryb, nodes_per_axis));
        let sum: f64 = qb
            .par_iter()
            .map(|&a| {
                let mut s = 0.0;
                for &b in &qc {
                    for &c in &pb {
                        for &d in &pc {
                            s += self.eval(a, b, c, d);
                        }
                    }
                }
                s
            })
            .sum();
        sum * hqb * hqc * hpb * hpc
    }

    /// Nodes covering the integrated pair for output samples `xs × xis`.
    pub fn quadrature_for(&self, keep: Keep, xs: &[f64], xis: &[f64]) -> Quadrature {
        let (xlo, xhi) = range(xs);
        let (ylo, yhi) = range(xis);
        let (wxa, wxb) = (Self::width_x(self.alpha_a), Self::width_x(self.alpha_b));
        let (wya, wyb) = (Self::width_xi(self.alpha_a), Self::width_xi(self.alpha_b));
        match keep {
            Keep::B => {
                let r = Self::radius_x(self.alpha_a);
                let ry = Self::radius_xi(self.alpha_a);
                Quadrature {
                    q: span(-r, r, STEP_PER_WIDTH * wxa.min(wxb)),
                    pi: span(-yhi - ry, -ylo + ry, STEP_PER_WIDTH * wya),
                }
            }
            Keep::C => {
                let r = Self::radius_x(self.alpha_b);
                let ry = Self::radius_xi(self.alpha_b);
                Quadrature {
                    q: span(xlo - r, xhi + r, STEP_PER_WIDTH * wxb),
                    pi: span(-ry, ry, STEP_PER_WIDTH * wya.min(wyb)),
                }
            }
        }
    }
}

/// Marginal Wigner function of the kept particle at `xs × xis`, with
/// nodes from [`JointWigner::quadrature_for`].
pub fn marginal_wigner(joint: &JointWigner, keep: Keep, xs: Vec<f64>, xis: Vec<f64>) -> WignerGrid {
    let quad = joint.quadrature_for(keep, &xs, &xis);
    marginal_wigner_with(joint, keep, xs, xis, &quad)
}

pub fn marginal_wigner_with(
    joint: &JointWigner,
    keep: Keep,
    xs: Vec<f64>,
    xis: Vec<f64>,
    quad: &Quadrature,
) -> WignerGrid {
    let (qn, hq) = nodes(quad.q);
    let (pn, hp) = nodes(quad.pi);
    let (rxa, rxb) = (
        JointWigner::radius_x(joint.alpha_a),
        JointWigner::radius_x(joint.alpha_b),
    );
    let (rya, ryb) = (
        JointWigner::radius_xi(joint.alpha_a),
        JointWigner::radius_xi(joint.alpha_b),
    );
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            xis.iter()
                .map(|&xi| {
                    // nodes outside both factors' supports contribute below e^{−40}
                    let (q_range, p_range) = match keep {
                        Keep::B => (
                            ((x - rxb).max(-rxa), (x + rxb).min(rxa)),
                            (-xi - rya, -xi + rya),
                        ),
                        Keep::C => (
                            (x - rxb, x + rxb),
                            ((-xi - rya).max(-ryb), (-xi + rya).min(ryb)),
                        ),
                    };
                    let mut s = 0.0;
                    for &q in &qn[clip(&qn, q_range)] {
                        for &p in &pn[clip(&pn, p_range)] {
                            s += match keep {
                                Keep::B => joint.eval(x, q, xi, p),
                                Keep::C => joint.eval(q, x, p, xi),
                            };
                        }
                    }
                    s * hq * hp
                })
                .collect()
        })
        .collect();
    let values = Array2::from_shape_fn((xs.len(), xis.len()), |(i, k)| rows[i][k]);
    WignerGrid::new(xs, xis, values).expect("shape built from the sample lists")
}

/// Indices of the sorted `nodes` lying in `[lo, hi]`.
fn clip(nodes: &[f64], (lo, hi): (f64, f64)) -> std::ops::Range<usize> {
    let start = nodes.partition_point(|v| *v < lo);
    let end = nodes.partition_point(|v| *v <= hi);
    start..end.max(start)
}
