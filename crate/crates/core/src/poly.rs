//! Sparse multivariate polynomials with `f64` coefficients.
//!
//! Terms are keyed by exponent vectors. Only exact zeros are pruned, so a
//! polynomial built by expansion is a faithful image of the arithmetic that
//! produced it.

use alloc::{collections::BTreeMap, vec, vec::Vec};
use core::cmp::Ordering;

use crate::{Error, Result};

/// Exponent vector over the real variables (bias excluded). The all-zero
/// vector is the constant item.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exponents: Vec<u16>,
    degree: u32,
}

impl Monomial {
    pub fn new(exponents: Vec<u16>) -> Self {
        let degree = exponents.iter().map(|&e| u32::from(e)).sum();
        Self { exponents, degree }
    }

    pub fn one(nvars: usize) -> Self {
        Self::new(vec![0; nvars])
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::new(e)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        if self.nvars() != other.nvars() {
            return Err(Error::VariableCountMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(exponents))
    }

    /// Π x_i^{e_i}; `x` must have one entry per variable.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.exponents.len());
        self.exponents
            .iter()
            .zip(x)
            .filter(|(e, _)| **e > 0)
            .map(|(&e, &v)| powi(v, e))
            .product()
    }

    /// Graded order: lower degree first, then by exponents read in
    /// `priority` order, larger exponent first.
    pub fn grlex_cmp(&self, other: &Monomial, priority: &[usize]) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            priority
                .iter()
                .map(|&i| other.exponents[i].cmp(&self.exponents[i]))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

fn powi(mut base: f64, mut exp: u16) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::variable(nvars, index), 1.0);
        p
    }

    /// Sums repeated monomials; panics if a monomial has the wrong arity.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, f64)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same as [`SparsePoly::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        assert_eq!(m.nvars(), self.nvars, "monomial arity");
        if c == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_vars(&self, other: &SparsePoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &SparsePoly, scale: f64) -> Result<()> {
        self.check_vars(other)?;
        if scale == 0.0 {
            return Ok(());
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), scale * c);
        }
        Ok(())
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        let mut out = self.clone();
        out.add_scaled(other, 1.0)?;
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), s * c);
        }
        out
    }

    pub fn neg(&self) -> SparsePoly {
        self.scale(-1.0)
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_vars(other)?;
        let mut out = SparsePoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                context: "polynomial evaluation",
                expected: self.nvars,
                found: x.len(),
            });
        }
        Ok(self.terms.iter().map(|(m, c)| c * m.eval(x)).sum())
    }
}
