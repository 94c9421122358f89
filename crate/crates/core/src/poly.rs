//! Sparse multivariate polynomials with cyclotomic coefficients.
//!
//! Exponent vectors carry non-negative integers of a fixed length (the chart
//! dimension); terms live in a `BTreeMap` so iteration, printing and equality
//! follow the lexicographic order on exponent vectors. Logarithmic poles are
//! never stored here — the form basis of the `adapted` module carries them.

use std::collections::BTreeMap;
use std::fmt;

use crate::exactnum::{CyclotomicNumber, Rational};

/// Exponent vector of a monomial; fixed length per chart context.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(pub Vec<u64>);

impl ExponentVector {
    pub fn zero(nvars: usize) -> Self {
        ExponentVector(vec![0; nvars])
    }

    /// The exponent vector of the single variable `var`.
    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        ExponentVector(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree: the sum of all entries.
    pub fn total_degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "exponent dimension mismatch");
        ExponentVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    /// Entrywise dominance: `self[i] >= other[i]` for all `i`.
    pub fn dominates(&self, other: &Self) -> bool {
        assert_eq!(self.len(), other.len(), "exponent dimension mismatch");
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Entrywise difference; requires dominance.
    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.dominates(other), "exponent subtraction underflow");
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// A sparse polynomial: a map from exponent vectors to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<ExponentVector, CyclotomicNumber>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: CyclotomicNumber) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(ExponentVector::zero(nvars), c);
        p
    }

    pub fn one(nvars: usize, conductor: u64) -> Self {
        Self::constant(nvars, CyclotomicNumber::one(conductor))
    }

    /// The monomial `c * y^e`.
    pub fn monomial(e: ExponentVector, c: CyclotomicNumber) -> Self {
        let mut p = Self::zero(e.len());
        p.add_term(e, c);
        p
    }

    /// The variable `y_var` as a polynomial.
    pub fn variable(nvars: usize, var: usize, conductor: u64) -> Self {
        Self::monomial(
            ExponentVector::unit(nvars, var),
            CyclotomicNumber::one(conductor),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in lexicographic order on exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &CyclotomicNumber)> {
        self.terms.iter()
    }

    /// Largest total degree among the stored terms, zero for the zero polynomial.
    pub fn total_degree(&self) -> u64 {
        self.terms
            .keys()
            .map(ExponentVector::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Add `c * y^e` in place, removing the term if the sum cancels.
    pub fn add_term(&mut self, e: ExponentVector, c: CyclotomicNumber) {
        assert_eq!(e.len(), self.nvars, "term dimension mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            None => {
                self.terms.insert(e, c);
            }
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(e, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (e, c) in other.terms.iter() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomial dimension mismatch");
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in self.terms.iter() {
            for (e2, c2) in other.terms.iter() {
                out.add_term(e1.add(e2), c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        let mut out = Self::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (e, coeff) in self.terms.iter() {
            out.add_term(e.clone(), coeff.mul(c));
        }
        out
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, coeff) in self.terms.iter() {
            out.add_term(e.clone(), coeff.scale(q));
        }
        out
    }

    /// Substitute `y_i -> scalar_i * w_i^(exp_i)` into every term: a monomial
    /// `y^u` maps to `(prod scalar_i^(u_i)) * w^(exp .* u)`.
    pub fn substitute_monomial(&self, scalars: &[CyclotomicNumber], exps: &[u64]) -> Self {
        assert_eq!(scalars.len(), self.nvars, "substitution dimension mismatch");
        assert_eq!(exps.len(), self.nvars, "substitution dimension mismatch");
        assert!(
            scalars.iter().all(|s| !s.is_zero()),
            "substitution scalars must be nonzero"
        );
        let mut out = Self::zero(self.nvars);
        for (e, c) in self.terms.iter() {
            let mut coeff = c.clone();
            let mut new_e = Vec::with_capacity(self.nvars);
            for i in 0..self.nvars {
                if e.0[i] > 0 {
                    coeff = coeff.mul(&scalars[i].pow(e.0[i]));
                }
                new_e.push(
                    e.0[i]
                        .checked_mul(exps[i])
                        .expect("exponent overflow in substitution"),
                );
            }
            out.add_term(ExponentVector(new_e), coeff);
        }
        out
    }

    /// True iff every stored monomial exponent dominates `e` entrywise.
    /// The zero polynomial is divisible by anything.
    pub fn divisible_by_monomial(&self, e: &ExponentVector) -> bool {
        assert_eq!(e.len(), self.nvars, "divisibility dimension mismatch");
        self.terms.keys().all(|u| u.dominates(e))
    }

    /// The quotient `self / y^e`; requires divisibility.
    pub fn div_monomial(&self, e: &ExponentVector) -> Self {
        assert!(self.divisible_by_monomial(e), "monomial division underflow");
        let mut out = Self::zero(self.nvars);
        for (u, c) in self.terms.iter() {
            out.add_term(u.sub(e), c.clone());
        }
        out
    }
}

impl fmt::Display for SparsePoly {
    /// Debug-oriented rendering; the canonical grammar lives in the CLI crate.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, k)| format!("y{}^{}", i + 1, k))
                    .collect();
                format!("({}) {}", c, mono.join(" "))
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}
