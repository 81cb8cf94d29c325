//! Sparse multivariate Laurent polynomials over Q(i).
//!
//! Terms are kept in a `BTreeMap` keyed by [`Exponents`], whose ordering is
//! graded lexicographic, so iteration runs from the lowest to the leading term.
//! The zero polynomial is the empty map and no stored coefficient is zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("pole: variable {variable} is zero but occurs with a negative exponent")]
    Pole { variable: usize },
    #[error("expected {expected} coordinates, got {got}")]
    PointLength { expected: usize, got: usize },
    #[error("variable index {index} out of range for {n} variables")]
    VariableIndex { index: usize, n: usize },
    #[error("restriction is identically zero (the fixed point lies under a vertical component)")]
    VerticalFiber,
    #[error("polynomial needs at least one variable")]
    NoVariables,
}

/// Exponent tuple `t` of the monomial `z^t = z_1^t_1 ... z_n^t_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponents(pub Vec<i64>);

impl Exponents {
    pub fn zero(n: usize) -> Self {
        Exponents(vec![0; n])
    }

    pub fn unit(n: usize, var: usize) -> Self {
        let mut e = vec![0; n];
        e[var] = 1;
        Exponents(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Exponents {
        Exponents(self.0.iter().map(|e| -e).collect())
    }
}

impl Ord for Exponents {
    /// Graded lexicographic: total degree first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `beta * z^t` with `|beta| = 1`, a unit of the Laurent ring that preserves the torus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitMonomial {
    pub beta: GaussianRational,
    pub t: Exponents,
}

impl UnitMonomial {
    pub fn new(beta: GaussianRational, t: Exponents) -> Option<Self> {
        beta.is_unit_modulus().then_some(Self { beta, t })
    }

    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::monomial(self.t.clone(), self.beta.clone())
    }
}

/// `p = scale * z^shift * normalized`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalized {
    pub poly: LaurentPoly,
    pub scale: GaussianRational,
    pub shift: Exponents,
}

/// Witness of `q = scale * z^shift * p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociateWitness {
    pub scale: GaussianRational,
    pub shift: Exponents,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Association {
    /// `q = c z^t p` with `|c| = 1`.
    Unit(AssociateWitness),
    /// `q = c z^t p` with `|c| != 1`.
    NonUnit(AssociateWitness),
    Distinct,
}

impl Association {
    pub fn is_associate(&self) -> bool {
        !matches!(self, Association::Distinct)
    }

    pub fn witness(&self) -> Option<&AssociateWitness> {
        match self {
            Association::Unit(w) | Association::NonUnit(w) => Some(w),
            Association::Distinct => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// Univariate restriction of a polynomial, ready for root finding.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberPoly {
    /// Ascending coefficients of the cleared polynomial in the free variable.
    pub coeffs: Vec<Complex64>,
    /// Exponent of the free variable carried by `coeffs[0]` before clearing.
    pub shift: i64,
    /// Low-order coefficients that cancelled numerically; the root `0` they
    /// would introduce is excluded.
    pub spurious_zero_roots: usize,
    /// High-order coefficients that cancelled numerically (degree drop).
    pub dropped_degree: usize,
}

impl FiberPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentPoly {
    n: usize,
    #[serde(with = "term_list")]
    terms: BTreeMap<Exponents, GaussianRational>,
}

mod term_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Term {
        exps: Exponents,
        coef: GaussianRational,
    }

    pub fn serialize<S: Serializer>(
        terms: &BTreeMap<Exponents, GaussianRational>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let list: Vec<Term> = terms
            .iter()
            .rev()
            .map(|(e, c)| Term { exps: e.clone(), coef: c.clone() })
            .collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<Exponents, GaussianRational>, D::Error> {
        let list = Vec::<Term>::deserialize(d)?;
        let mut map = BTreeMap::new();
        for t in list {
            if t.coef.is_zero() {
                return Err(serde::de::Error::custom("zero coefficient in term list"));
            }
            if map.insert(t.exps, t.coef).is_some() {
                return Err(serde::de::Error::custom("duplicate exponent in term list"));
            }
        }
        Ok(map)
    }
}

impl LaurentPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: GaussianRational) -> Self {
        Self::monomial(Exponents::zero(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, GaussianRational::one())
    }

    pub fn var(n: usize, index: usize) -> Self {
        Self::monomial(Exponents::unit(n, index), GaussianRational::one())
    }

    pub fn monomial(exps: Exponents, c: GaussianRational) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated terms; equal exponents are summed.
    pub fn from_terms<I>(n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, GaussianRational)>,
    {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent vector length must equal the variable count");
            p.add_term(e, &c);
        }
        p
    }

    /// Convenience for tests and fixtures: integer exponents and integer
    /// (re, im) coefficients.
    pub fn from_int_terms(n: usize, terms: &[(&[i64], i64, i64)]) -> Self {
        Self::from_terms(
            n,
            terms
                .iter()
                .map(|(e, re, im)| (Exponents(e.to_vec()), GaussianRational::from_ints(*re, *im))),
        )
    }

    fn add_term(&mut self, e: Exponents, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &Exponents) -> Option<&GaussianRational> {
        self.terms.get(e)
    }

    pub fn leading_term(&self) -> Option<(&Exponents, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn check_n(&self, other: &Self) -> Result<(), LaurentError> {
        if self.n != other.n {
            return Err(LaurentError::VariableCountMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn ring_arith(&self, other: &Self, op: RingOp) -> Result<Self, LaurentError> {
        self.check_n(other)?;
        Ok(match op {
            RingOp::Add => {
                let mut r = self.clone();
                for (e, c) in &other.terms {
                    r.add_term(e.clone(), c);
                }
                r
            }
            RingOp::Sub => {
                let mut r = self.clone();
                for (e, c) in &other.terms {
                    r.add_term(e.clone(), &-c);
                }
                r
            }
            RingOp::Mul => {
                let mut r = Self::zero(self.n);
                for (e1, c1) in &self.terms {
                    for (e2, c2) in &other.terms {
                        r.add_term(e1.add(e2), &(c1 * c2));
                    }
                }
                r
            }
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.ring_arith(other, RingOp::Add)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.ring_arith(other, RingOp::Sub)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.ring_arith(other, RingOp::Mul)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the monomial `z^t`.
    pub fn shift(&self, t: &Exponents) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.add(t), v.clone())).collect(),
        }
    }

    /// Non-negative powers only; negative powers exist only for monomials, see [`Self::inverse_monomial`].
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse in the Laurent ring, which exists exactly for nonzero monomials.
    pub fn inverse_monomial(&self) -> Option<Self> {
        if !self.is_monomial() {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        Some(Self::monomial(e.neg(), c.inv()?))
    }

    /// Conjugate every coefficient and invert every variable:
    /// `p*(z) = conj(p(1/conj(z)))`. The result stays Laurent.
    pub fn star(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.neg(), c.conj())).collect(),
        }
    }

    /// Coefficientwise conjugation only (`p-bar`).
    pub fn conj_coeffs(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    pub fn min_exponents(&self) -> Option<Exponents> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| {
            Exponents(acc.0.iter().zip(&e.0).map(|(a, b)| *a.min(b)).collect())
        }))
    }

    pub fn max_exponents(&self) -> Option<Exponents> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, e| {
            Exponents(acc.0.iter().zip(&e.0).map(|(a, b)| *a.max(b)).collect())
        }))
    }

    /// `(min, max)` exponent of one variable, `None` for the zero polynomial.
    pub fn exponent_range(&self, var: usize) -> Option<(i64, i64)> {
        let lo = self.terms.keys().map(|e| e.0[var]).min()?;
        let hi = self.terms.keys().map(|e| e.0[var]).max()?;
        Some((lo, hi))
    }

    /// Degree in `var` after clearing negative powers.
    pub fn degree_span(&self, var: usize) -> i64 {
        self.exponent_range(var).map_or(0, |(lo, hi)| hi - lo)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.degree_span(var) > 0
    }

    /// Canonical representative of the class `{c z^t p}`: all exponents
    /// non-negative with every variable reaching zero, graded-lex leading
    /// coefficient `1`.
    pub fn normalize(&self) -> Result<Normalized, LaurentError> {
        let shift = self.min_exponents().ok_or(LaurentError::ZeroPolynomial)?;
        let shifted = self.shift(&shift.neg());
        let scale = shifted.leading_term().map(|(_, c)| c.clone()).expect("nonzero");
        let poly = shifted.scale(&scale.inv().expect("nonzero leading coefficient"));
        Ok(Normalized { poly, scale, shift })
    }

    pub fn is_normalized(&self) -> bool {
        match self.normalize() {
            Ok(n) => n.shift.is_zero() && n.scale.is_one(),
            Err(_) => false,
        }
    }

    /// Decides whether `other = c z^t self` and whether `|c| = 1`.
    pub fn associates(&self, other: &Self) -> Result<Association, LaurentError> {
        self.check_n(other)?;
        let a = self.normalize()?;
        let b = other.normalize()?;
        if a.poly != b.poly {
            return Ok(Association::Distinct);
        }
        let witness = AssociateWitness {
            scale: &b.scale / &a.scale,
            shift: b.shift.sub(&a.shift),
        };
        Ok(if witness.scale.is_unit_modulus() {
            Association::Unit(witness)
        } else {
            Association::NonUnit(witness)
        })
    }

    /// Complex coefficients, leading term first.
    pub fn to_complex_terms(&self) -> Vec<(Exponents, Complex64)> {
        self.terms.iter().rev().map(|(e, c)| (e.clone(), c.to_complex())).collect()
    }

    /// `sum |c|`, the sup of `|p|` over the torus.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_complex().norm()).sum()
    }

    /// Floating-point evaluation, term by term with `powi`. The rounding error
    /// is bounded by roughly `(terms + max |exponent|) * eps * sum |c z^t|`.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64, LaurentError> {
        if point.len() != self.n {
            return Err(LaurentError::PointLength { expected: self.n, got: point.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = c.to_complex();
            for (k, (&x, &p)) in point.iter().zip(&e.0).enumerate() {
                if p == 0 {
                    continue;
                }
                if x == Complex64::new(0.0, 0.0) && p < 0 {
                    return Err(LaurentError::Pole { variable: k });
                }
                m *= x.powi(p as i32);
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Substitutes `fixed` for every variable except `free` and clears the
    /// negative powers of `free`. `fixed` lists the remaining coordinates in
    /// variable order.
    pub fn fiber_restrict(&self, fixed: &[Complex64], free: usize) -> Result<FiberPoly, LaurentError> {
        if free >= self.n {
            return Err(LaurentError::VariableIndex { index: free, n: self.n });
        }
        if fixed.len() + 1 != self.n {
            return Err(LaurentError::PointLength { expected: self.n - 1, got: fixed.len() });
        }
        let (lo, hi) = self.exponent_range(free).ok_or(LaurentError::VerticalFiber)?;
        let len = (hi - lo + 1) as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        let mut scale = vec![0.0f64; len];
        for (e, c) in &self.terms {
            let mut m = c.to_complex();
            let mut fi = 0;
            for (k, &p) in e.0.iter().enumerate() {
                if k == free {
                    continue;
                }
                let x = fixed[fi];
                fi += 1;
                if p == 0 {
                    continue;
                }
                if x == Complex64::new(0.0, 0.0) && p < 0 {
                    return Err(LaurentError::Pole { variable: k });
                }
                m *= x.powi(p as i32);
            }
            let slot = (e.0[free] - lo) as usize;
            coeffs[slot] += m;
            scale[slot] += m.norm();
        }
        // A coefficient is treated as cancelled when it is at rounding level
        // relative to the magnitudes that were summed into it.
        let cancelled = |k: usize| coeffs[k].norm() <= 64.0 * f64::EPSILON * scale[k];
        let top = (0..len).rev().find(|&k| !cancelled(k)).ok_or(LaurentError::VerticalFiber)?;
        let bottom = (0..len).find(|&k| !cancelled(k)).expect("top exists");
        Ok(FiberPoly {
            coeffs: coeffs[bottom..=top].to_vec(),
            shift: lo + bottom as i64,
            spurious_zero_roots: bottom,
            dropped_degree: len - 1 - top,
        })
    }

    /// Keeps only the listed variables (all others must be absent).
    pub fn restrict_variables(&self, keep: &[usize]) -> Option<Self> {
        for e in self.terms.keys() {
            for (k, &p) in e.0.iter().enumerate() {
                if p != 0 && !keep.contains(&k) {
                    return None;
                }
            }
        }
        Some(Self {
            n: keep.len(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (Exponents(keep.iter().map(|&k| e.0[k]).collect()), c.clone()))
                .collect(),
        })
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = crate::parser::default_variable_names(self.n);
        f.write_str(&crate::parser::format_poly_with(self, &names))
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    /// Panics on a variable-count mismatch; use [`LaurentPoly::checked_add`] otherwise.
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        self.checked_add(o).expect("variable count mismatch")
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(o).expect("variable count mismatch")
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(o).expect("variable count mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&-GaussianRational::one())
    }
}
