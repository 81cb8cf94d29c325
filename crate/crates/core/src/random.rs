//! Seeded generators for test fixtures and sampling.

use num_complex::Complex64;
use rand::Rng;

use crate::{Exponents, GaussianRational, LaurentPoly};

/// A uniformly random point on the `n`-torus.
pub fn random_torus_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// A random Laurent polynomial with up to `terms` terms, exponents in
/// `[-max_abs_exp, max_abs_exp]` and Gaussian-integer coefficients with parts
/// in `[-max_coef, max_coef]`.
pub fn random_laurent<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    terms: usize,
    max_abs_exp: i64,
    max_coef: i64,
) -> LaurentPoly {
    LaurentPoly::from_terms(
        n,
        (0..terms).map(|_| {
            let e: Vec<i64> = (0..n).map(|_| rng.random_range(-max_abs_exp..=max_abs_exp)).collect();
            let c = GaussianRational::from_ints(
                rng.random_range(-max_coef..=max_coef),
                rng.random_range(-max_coef..=max_coef),
            );
            (Exponents(e), c)
        }),
    )
}
