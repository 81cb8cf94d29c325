//! Exact and numeric tools for Laurent polynomials restricted to the unit torus.
//!
//! The central question is whether the zero set of a Laurent polynomial meets
//! the torus `|z_1| = ... = |z_n| = 1` in a positive-dimensional set (a
//! "dense" intersection) or only in finitely many points. See [`density::decide`].

pub mod blaschke;
pub mod density;
pub mod gaussian;
pub mod laurent;
pub mod parser;
pub mod random;
pub mod roots;
pub mod snf;
pub mod torus;
pub mod tracking;

pub use gaussian::GaussianRational;
pub use laurent::{Association, Exponents, LaurentError, LaurentPoly};
pub use parser::{parse_with, ParseError};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::{GaussianRational, LaurentPoly};
    use proptest::prelude::*;

    pub use crate::random::random_torus_point;

    /// Laurent polynomials in `n` variables with small rational Gaussian coefficients.
    pub fn arb_laurent(n: usize, max_terms: usize, max_abs_exp: i64) -> impl Strategy<Value = LaurentPoly> {
        let term = (
            prop::collection::vec(-max_abs_exp..=max_abs_exp, n),
            -9i64..=9,
            1i64..=4,
            -9i64..=9,
            1i64..=4,
        );
        prop::collection::vec(term, 0..=max_terms).prop_map(move |terms| {
            LaurentPoly::from_terms(
                n,
                terms.into_iter().map(|(e, a, b, c, d)| {
                    (crate::Exponents(e), GaussianRational::from_fractions(a, b, c, d))
                }),
            )
        })
    }
}
