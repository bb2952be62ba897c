use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{inner_product, Representation, WaveFunction};
use crate::classical::FrameLabel;
use crate::error::{Error, Result};

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// Canonical position or momentum operator on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Q,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub axis: FrameLabel,
    pub op: Op,
}

/// `coef · f_1 f_2 … f_m`, an ordered operator product (leftmost acts last).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: Complex64,
    pub factors: Vec<Factor>,
}

/// A polynomial in per-axis position and momentum operators.
///
/// Factors on different axes commute, so terms are kept with factors
/// stably sorted by axis; the order of factors on the same axis is kept.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Observable {
    terms: Vec<Term>,
}

impl Observable {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(vec![Term {
            coef: Complex64::new(c, 0.0),
            factors: vec![],
        }])
    }

    pub fn q(axis: FrameLabel) -> Self {
        Self::factor(axis, Op::Q)
    }

    pub fn p(axis: FrameLabel) -> Self {
        Self::factor(axis, Op::P)
    }

    fn factor(axis: FrameLabel, op: Op) -> Self {
        Self::from_terms(vec![Term {
            coef: Complex64::new(1.0, 0.0),
            factors: vec![Factor { axis, op }],
        }])
    }

    /// Symmetrically ordered `(q p + p q)/2` on one axis.
    pub fn weyl_qp(axis: FrameLabel) -> Self {
        (Self::q(axis) * Self::p(axis) + Self::p(axis) * Self::q(axis)).scale(0.5)
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut merged: BTreeMap<Vec<Factor>, Complex64> = BTreeMap::new();
        for mut t in terms {
            t.factors.sort_by_key(|f| f.axis);
            *merged.entry(t.factors).or_insert(Complex64::new(0.0, 0.0)) += t.coef;
        }
        Self {
            terms: merged
                .into_iter()
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .map(|(factors, coef)| Term { coef, factors })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn scale(&self, c: f64) -> Self {
        self.scale_complex(Complex64::new(c, 0.0))
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coef: t.coef * c,
                    factors: t.factors.clone(),
                })
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| acc * self.clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coef: t.coef.conj(),
                    factors: t.factors.iter().rev().copied().collect(),
                })
                .collect(),
        )
    }

    /// Rewrites every term with positions left of momenta on each axis,
    /// using `p q = q p − i`.
    pub fn normal_ordered(&self) -> Self {
        let mut pending: Vec<Term> = self.terms.clone();
        let mut done = Vec::new();
        while let Some(t) = pending.pop() {
            let swap = t
                .factors
                .windows(2)
                .position(|w| w[0].axis == w[1].axis && w[0].op == Op::P && w[1].op == Op::Q);
            match swap {
                None => done.push(t),
                Some(i) => {
                    let mut swapped = t.factors.clone();
                    swapped.swap(i, i + 1);
                    let mut contracted = t.factors.clone();
                    contracted.drain(i..i + 2);
                    pending.push(Term {
                        coef: t.coef,
                        factors: swapped,
                    });
                    pending.push(Term {
                        coef: t.coef * Complex64::new(0.0, -1.0),
                        factors: contracted,
                    });
                }
            }
        }
        Self::from_terms(done)
    }

    /// Hermiticity up to the canonical commutation relations: the normal
    /// ordered polynomial equals the normal ordered adjoint.
    pub fn is_hermitian(&self) -> bool {
        let diff = (self.clone() - self.adjoint()).normal_ordered();
        diff.terms
            .iter()
            .all(|t| t.coef.norm() <= HERMITIAN_TOLERANCE)
    }

    pub fn axes(&self) -> Vec<FrameLabel> {
        let mut v: Vec<FrameLabel> = self
            .terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.axis))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Replaces every factor by a polynomial and expands the products.
    pub fn substitute(&self, mut map: impl FnMut(Factor) -> Result<Observable>) -> Result<Self> {
        let mut out = Observable::zero();
        for t in &self.terms {
            let mut prod = Observable::constant(1.0);
            for f in &t.factors {
                prod = prod * map(*f)?;
            }
            out = out + prod.scale_complex(t.coef);
        }
        Ok(out)
    }

    /// Applies the operator to `psi`; the result keeps `psi`'s representations.
    pub fn apply(&self, psi: &WaveFunction) -> Result<WaveFunction> {
        for axis in self.axes() {
            psi.axis_index(axis)?;
        }
        let reprs = psi.representations();
        let mut acc = psi.clone().scaled(Complex64::new(0.0, 0.0));
        for t in &self.terms {
            let mut work = psi.clone();
            for f in t.factors.iter().rev() {
                let d = work.axis_index(f.axis)?;
                match f.op {
                    Op::Q => work.convert_axis(d, Representation::Position),
                    Op::P => work.convert_axis(d, Representation::Momentum),
                }
                work.multiply_axis(d, |x| x);
            }
            let work = work.to_representations(&reprs)?;
            acc.add_scaled(t.coef, &work)?;
        }
        Ok(acc)
    }

    /// `⟨ψ|O|ψ⟩` for normalised `psi` and Hermitian `O`.
    pub fn expectation(&self, psi: &WaveFunction) -> Result<f64> {
        if !self.is_hermitian() {
            return Err(Error::NonHermitianObservable(self.to_string()));
        }
        let z = inner_product(psi, &self.apply(psi)?)?;
        if z.im.abs() > IMAGINARY_TOLERANCE * (1.0 + z.re.abs()) {
            return Err(Error::NonHermitianObservable(format!(
                "expectation has imaginary part {:e}",
                z.im
            )));
        }
        Ok(z.re)
    }
}

/// `⟨ψ|O|ψ⟩`; see [`Observable::expectation`].
pub fn expectation(psi: &WaveFunction, observable: &Observable) -> Result<f64> {
    observable.expectation(psi)
}

impl Add for Observable {
    type Output = Observable;
    fn add(self, rhs: Observable) -> Observable {
        let mut terms = self.terms;
        terms.extend(rhs.terms);
        Observable::from_terms(terms)
    }
}

impl Sub for Observable {
    type Output = Observable;
    fn sub(self, rhs: Observable) -> Observable {
        self + rhs.scale(-1.0)
    }
}

impl Neg for Observable {
    type Output = Observable;
    fn neg(self) -> Observable {
        self.scale(-1.0)
    }
}

impl Mul for Observable {
    type Output = Observable;
    fn mul(self, rhs: Observable) -> Observable {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let mut factors = a.factors.clone();
                factors.extend_from_slice(&b.factors);
                terms.push(Term {
                    coef: a.coef * b.coef,
                    factors,
                });
            }
        }
        Observable::from_terms(terms)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", t.coef)?;
            for fac in &t.factors {
                let op = match fac.op {
                    Op::Q => "q",
                    Op::P => "p",
                };
                write!(f, "·{op}_{}", fac.axis)?;
            }
        }
        Ok(())
    }
}
