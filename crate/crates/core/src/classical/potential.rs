use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Step of the central difference used when no analytic gradient is supplied.
pub const POTENTIAL_FD_STEP: f64 = 1e-5;

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// A spring `½ k (q_i − q_j)²` between particles `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spring {
    pub i: usize,
    pub j: usize,
    pub k: f64,
}

/// A potential on the full position list of an `n`-particle system.
///
/// Physical potentials depend only on differences `q_i − q_j`; this is not
/// enforced on construction but can be sampled with
/// [`Potential::translation_defect`].
#[derive(Clone)]
pub struct Potential {
    n: usize,
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradientFn>>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("n", &self.n)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl Potential {
    pub fn new(n: usize, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            n,
            value: Arc::new(value),
            gradient: None,
        }
    }

    /// Attaches an analytic gradient writing `∂V/∂q_i` into its second argument.
    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, |_| 0.0).with_gradient(|_, g| g.fill(0.0))
    }

    pub fn pairwise_springs(n: usize, springs: &[Spring]) -> Result<Self> {
        for s in springs {
            if s.i >= n || s.j >= n || s.i == s.j {
                return Err(Error::InvalidSystem(format!(
                    "spring between {} and {} invalid for {n} particles",
                    s.i, s.j
                )));
            }
        }
        let value_springs = springs.to_vec();
        let grad_springs = springs.to_vec();
        Ok(Self::new(n, move |q| {
            value_springs
                .iter()
                .map(|s| 0.5 * s.k * (q[s.i] - q[s.j]).powi(2))
                .sum()
        })
        .with_gradient(move |q, g| {
            g.fill(0.0);
            for s in &grad_springs {
                let f = s.k * (q[s.i] - q[s.j]);
                g[s.i] += f;
                g[s.j] -= f;
            }
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn value(&self, q: &[f64]) -> f64 {
        (self.value)(q)
    }

    pub fn gradient_into(&self, q: &[f64], out: &mut [f64]) {
        match &self.gradient {
            Some(g) => g(q, out),
            None => {
                let h = POTENTIAL_FD_STEP;
                let mut work = q.to_vec();
                for i in 0..q.len() {
                    let q0 = work[i];
                    work[i] = q0 + h;
                    let plus = self.value(&work);
                    work[i] = q0 - h;
                    let minus = self.value(&work);
                    work[i] = q0;
                    out[i] = (plus - minus) / (2.0 * h);
                }
            }
        }
    }

    pub fn gradient(&self, q: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; q.len()];
        self.gradient_into(q, &mut out);
        out
    }

    pub fn partial(&self, q: &[f64], i: usize) -> f64 {
        self.gradient(q)[i]
    }

    /// `|V(q + c·1) − V(q)|`.
    pub fn translation_defect(&self, q: &[f64], c: f64) -> f64 {
        let shifted: Vec<f64> = q.iter().map(|x| x + c).collect();
        (self.value(&shifted) - self.value(q)).abs()
    }
}
