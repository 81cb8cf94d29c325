//! Rational maps sending the torus to the unit circle.
//!
//! Up to a monomial factor every such map is `p / (z^t p*)`; in one variable
//! this is a finite Blaschke product
//! `λ z^k ∏ (z - α) / (1 - conj(α) z)`.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::Association;
use crate::parser::RationalExpr;
use crate::random::random_torus_point;
use crate::roots::roots;
use crate::{Exponents, GaussianRational, LaurentPoly};

/// Sampled maps count as violating when `||r| - 1|` exceeds this.
pub const REFUTE_GAP: f64 = 1e-6;
const GRID_SAMPLES: usize = 256;
const RANDOM_SAMPLES: usize = 512;
const ROOT_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verification {
    Proven,
    Sampled,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMap {
    pub numerator: LaurentPoly,
    pub denominator: LaurentPoly,
    pub verified: Verification,
}

impl CircleMap {
    pub fn eval(&self, x: &[Complex64]) -> Option<Complex64> {
        let d = self.denominator.eval(x).ok()?;
        let n = self.numerator.eval(x).ok()?;
        (d.norm() > 0.0).then(|| n / d)
    }

    pub fn to_rational(&self) -> RationalExpr {
        RationalExpr::new(self.numerator.clone(), self.denominator.clone()).expect("denominator is nonzero")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlaschkeError {
    #[error("the zero polynomial does not define a circle map")]
    ZeroPolynomial,
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("numerator and denominator have different variable counts")]
    VariableCountMismatch,
    #[error("factoring needs a proven map")]
    NotProven,
    #[error("factoring needs a map in one variable, got {0}")]
    NotUnivariate(usize),
    #[error("denominator roots do not mirror the numerator roots (worst mismatch {worst:e})")]
    RootMismatch { alphas: Vec<Complex64>, denominator_roots: Vec<Complex64>, worst: f64 },
    #[error("root finding failed: {0}")]
    Roots(String),
}

/// `p / (z^t p*)`, with `t` the least shift making the denominator a polynomial.
/// A numerator with negative exponents is shifted to a polynomial as well.
pub fn make_circle_map(p: &LaurentPoly) -> Result<CircleMap, BlaschkeError> {
    let lo = p.min_exponents().ok_or(BlaschkeError::ZeroPolynomial)?;
    let numerator = p.shift(&lo.neg().max_zero());
    let star = numerator.star();
    let t = star.min_exponents().expect("nonzero").neg();
    Ok(CircleMap { denominator: star.shift(&t), numerator, verified: Verification::Proven })
}

trait MaxZero {
    fn max_zero(&self) -> Self;
}

impl MaxZero for Exponents {
    fn max_zero(&self) -> Self {
        Exponents(self.0.iter().map(|&e| e.max(0)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CircleMapCheck {
    /// `denominator = beta * z^shift * star(numerator)` after reduction, `|beta| = 1`.
    Proven { beta: GaussianRational, shift: Exponents, reduced: RationalExpr },
    /// A torus point where `||r| - 1| > 1e-6`.
    Refuted { point: Vec<Complex64>, modulus: f64 },
    Unknown { reason: String },
}

impl CircleMapCheck {
    pub fn is_proven(&self) -> bool {
        matches!(self, CircleMapCheck::Proven { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, CircleMapCheck::Refuted { .. })
    }
}

pub fn verify_circle_map(r: &RationalExpr) -> Result<CircleMapCheck, BlaschkeError> {
    verify_circle_map_seeded(r, 0)
}

/// Reduces the quotient (scalar content, monomial factors and, in one
/// variable, the exact gcd), then tests the identity `den ~ z^t star(num)`.
/// When it fails the map is sampled on the torus: a regular grid of 256 points
/// in one variable, 512 seeded random points otherwise.
pub fn verify_circle_map_seeded(r: &RationalExpr, seed: u64) -> Result<CircleMapCheck, BlaschkeError> {
    if r.denominator.is_zero() {
        return Err(BlaschkeError::ZeroDenominator);
    }
    if r.numerator.nvars() != r.denominator.nvars() {
        return Err(BlaschkeError::VariableCountMismatch);
    }
    if r.numerator.is_zero() {
        return Ok(CircleMapCheck::Refuted { point: vec![Complex64::new(1.0, 0.0); r.numerator.nvars()], modulus: 0.0 });
    }
    let reduced = reduce(r);
    if let Association::Unit(w) = reduced.numerator.star().associates(&reduced.denominator).expect("nonzero") {
        return Ok(CircleMapCheck::Proven { beta: w.scale, shift: w.shift, reduced });
    }
    if let Some((point, modulus)) = counterexample(&reduced, seed) {
        return Ok(CircleMapCheck::Refuted { point, modulus });
    }
    Ok(CircleMapCheck::Unknown {
        reason: "no exact identity and no violating sample; the quotient may not be in lowest terms".into(),
    })
}

fn counterexample(r: &RationalExpr, seed: u64) -> Option<(Vec<Complex64>, f64)> {
    let n = r.numerator.nvars();
    let points: Vec<Vec<Complex64>> = if n == 1 {
        (0..GRID_SAMPLES)
            .map(|k| vec![Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 + 0.5) / GRID_SAMPLES as f64)])
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..RANDOM_SAMPLES).map(|_| random_torus_point(&mut rng, n)).collect()
    };
    let den_scale = r.denominator.l1_norm();
    for x in points {
        let den = r.denominator.eval(&x).ok()?;
        if den.norm() <= 1e-8 * den_scale {
            continue; // too close to a pole to judge
        }
        let modulus = (r.numerator.eval(&x).ok()? / den).norm();
        if (modulus - 1.0).abs() > REFUTE_GAP {
            return Some((x, modulus));
        }
    }
    None
}

/// Removes common monomials and, for univariate quotients, the exact gcd.
pub fn reduce(r: &RationalExpr) -> RationalExpr {
    let n = r.numerator.nvars();
    let num = r.numerator.normalize().expect("nonzero");
    let den = r.denominator.normalize().expect("nonzero");
    let mut numerator = num.poly.scale(&num.scale);
    let mut denominator = den.poly.scale(&den.scale);
    // monomial z^(shift_num - shift_den) is a unit of the Laurent ring; keep it on the numerator
    let shift = num.shift.sub(&den.shift);
    numerator = numerator.shift(&shift);
    let univariate = (0..n).filter(|&k| numerator.involves(k) || denominator.involves(k)).collect::<Vec<_>>();
    if univariate.len() == 1 {
        let var = univariate[0];
        let (ns, nd) = to_dense(&numerator, var);
        let (ds, dd) = to_dense(&denominator, var);
        let g = dense_gcd(&nd, &dd);
        if g.len() > 1 {
            numerator = from_dense(&dense_div(&nd, &g), ns, var, n);
            denominator = from_dense(&dense_div(&dd, &g), ds, var, n);
        }
    }
    RationalExpr { numerator, denominator }
}

type Dense = Vec<GaussianRational>;

fn to_dense(p: &LaurentPoly, var: usize) -> (i64, Dense) {
    let (lo, hi) = p.exponent_range(var).unwrap_or((0, 0));
    let mut out = vec![GaussianRational::zero(); (hi - lo + 1) as usize];
    for (e, c) in p.terms() {
        out[(e.0[var] - lo) as usize] = c.clone();
    }
    (lo, out)
}

fn from_dense(d: &[GaussianRational], shift: i64, var: usize, n: usize) -> LaurentPoly {
    LaurentPoly::from_terms(
        n,
        d.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| {
            let mut e = vec![0; n];
            e[var] = k as i64 + shift;
            (Exponents(e), c.clone())
        }),
    )
}

fn trim(mut d: Dense) -> Dense {
    while d.len() > 1 && d.last().is_some_and(Zero::is_zero) {
        d.pop();
    }
    d
}

/// Remainder and quotient of ascending dense polynomials.
fn dense_divmod(a: &[GaussianRational], b: &[GaussianRational]) -> (Dense, Dense) {
    let b = trim(b.to_vec());
    let lead_inv = b.last().and_then(GaussianRational::inv).expect("nonzero divisor");
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (vec![GaussianRational::zero()], rem);
    }
    let mut quot = vec![GaussianRational::zero(); rem.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + b.len() - 1] * &lead_inv;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[k + j] -= &(&c * bj);
            }
        }
        quot[k] = c;
    }
    (trim(quot), trim(rem))
}

fn dense_div(a: &[GaussianRational], b: &[GaussianRational]) -> Dense {
    dense_divmod(a, b).0
}

/// Monic gcd over Q(i).
fn dense_gcd(a: &[GaussianRational], b: &[GaussianRational]) -> Dense {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !(y.len() == 1 && y[0].is_zero()) {
        let (_, r) = dense_divmod(&x, &y);
        x = y;
        y = r;
    }
    let lead_inv = x.last().and_then(GaussianRational::inv).unwrap_or_else(GaussianRational::one);
    x.iter().map(|c| c * &lead_inv).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeFactors {
    pub alphas: Vec<Complex64>,
    /// Unit-modulus constant `λ`.
    pub prefactor: Complex64,
    /// Power `k` of the monomial `z^k` multiplying the product.
    pub power: i64,
}

impl BlaschkeFactors {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = self.prefactor * z.powi(self.power as i32);
        for &a in &self.alphas {
            v *= (z - a) / (1.0 - a.conj() * z);
        }
        v
    }

    /// Numerator `∏ (z - α)` and denominator `∏ (1 - conj(α) z)`, exactly, for
    /// Gaussian-rational `α`.
    pub fn expand_exact(alphas: &[GaussianRational]) -> CircleMap {
        let z = LaurentPoly::var(1, 0);
        let mut num = LaurentPoly::one(1);
        let mut den = LaurentPoly::one(1);
        for a in alphas {
            num = &num * &(&z - &LaurentPoly::constant(1, a.clone()));
            den = &den * &(&LaurentPoly::one(1) - &z.scale(&a.conj()));
        }
        CircleMap { numerator: num, denominator: den, verified: Verification::Unverified }
    }
}

/// Factors a proven univariate circle map into Blaschke factors.
pub fn blaschke_factor(map: &CircleMap) -> Result<BlaschkeFactors, BlaschkeError> {
    if map.verified != Verification::Proven {
        return Err(BlaschkeError::NotProven);
    }
    let n = map.numerator.nvars();
    if n != 1 {
        return Err(BlaschkeError::NotUnivariate(n));
    }
    let (num_shift, num) = to_dense(&map.numerator, 0);
    let (den_shift, den) = to_dense(&map.denominator, 0);
    let num_c: Vec<Complex64> = num.iter().map(GaussianRational::to_complex).collect();
    let den_c: Vec<Complex64> = den.iter().map(GaussianRational::to_complex).collect();
    let num_roots = univariate_roots(&num_c)?;
    let den_roots = univariate_roots(&den_c)?;
    // dense forms are stored with a nonzero constant term, so zero roots come only from the shifts
    let zero_alphas = num_shift.max(0) as usize;
    let den_zero = den_shift;
    let mirrors: Vec<Complex64> = num_roots.iter().map(|a| 1.0 / a.conj()).collect();
    let worst = multiset_distance(&mirrors, &den_roots);
    if num_roots.len() != den_roots.len() || worst > ROOT_MATCH_TOL {
        return Err(BlaschkeError::RootMismatch { alphas: num_roots, denominator_roots: den_roots, worst });
    }
    let lead_ratio = num_c.last().unwrap() / den_c.last().unwrap();
    let mut lambda = lead_ratio;
    for a in &num_roots {
        lambda *= -a.conj();
    }
    let mut alphas = vec![Complex64::new(0.0, 0.0); zero_alphas];
    alphas.extend(num_roots);
    // r = λ z^(num_shift - zero_alphas - den_shift) ∏ factors; negative numerator shifts stay in the power
    let power = num_shift - zero_alphas as i64 - den_zero;
    Ok(BlaschkeFactors { alphas, prefactor: lambda, power })
}

fn univariate_roots(c: &[Complex64]) -> Result<Vec<Complex64>, BlaschkeError> {
    if c.len() <= 1 {
        return Ok(vec![]);
    }
    roots(c).map(|rs| rs.values()).map_err(|e| BlaschkeError::Roots(e.to_string()))
}

/// Largest distance in a greedy one-to-one matching; infinite on a size mismatch.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm() / x.norm().max(y.norm()).max(1.0), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut ua = vec![false; a.len()];
    let mut ub = vec![false; b.len()];
    let mut worst = 0.0f64;
    for (d, i, j) in pairs {
        if !ua[i] && !ub[j] {
            ua[i] = true;
            ub[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// `(point, |r(point)|)` at `count` seeded torus points, skipping points
/// close to a pole.
pub fn sample_moduli(map: &CircleMap, count: usize, seed: u64) -> Vec<(Vec<Complex64>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = map.numerator.nvars();
    let den_scale = map.denominator.l1_norm();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * 100 {
        if out.len() == count {
            break;
        }
        let x = random_torus_point(&mut rng, n);
        let den = map.denominator.eval(&x).expect("torus point has no zero coordinate");
        if den.norm() <= 1e-6 * den_scale {
            continue;
        }
        let r = map.numerator.eval(&x).expect("torus point") / den;
        out.push((x, r.norm()));
    }
    out
}
