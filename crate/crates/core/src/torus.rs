//! Exact solution of one-, two- and three-term equations in two variables on
//! the torus `|z| = |w| = 1`.
//!
//! A three-term equation is rescaled to `u + alpha*v = beta` with `u`, `v`
//! monomials. The unit circle and the circle `|beta - u| = |alpha|` meet in at
//! most two points (decided exactly over Q(i)), and each resulting pair
//! `(u0, v0)` is lifted back to `(z, w)` through the Smith normal form of the
//! exponent matrix.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::rat_to_f64;
use crate::roots::{circle_deviation, roots, RootError};
use crate::snf::{det2, extended_gcd, smith_normal_form, IntMatrix};
use crate::{GaussianRational, LaurentPoly};

/// Residual accepted when checking that a target is 1 in a degenerate system.
const UNIT_TARGET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub coords: Vec<Complex64>,
    /// `|p(point)|` for the source equation, when one is known.
    pub residual: f64,
}

impl TorusPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        let coords = coords.into_iter().map(|c| c / c.norm()).collect();
        TorusPoint { coords, residual: 0.0 }
    }

    /// Arguments in `[0, 2π)`.
    pub fn angles(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.arg().rem_euclid(TAU)).collect()
    }

    pub fn distance(&self, other: &TorusPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// The set `{ base * (ζ^k1, ζ^k2, ...) : base in base_points, ζ in S1^r }` where
/// each direction contributes one free parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetFamily {
    pub base_points: Vec<TorusPoint>,
    pub directions: Vec<Vec<i64>>,
    /// The monomial equation `z^a w^b = alpha` the family solves, if it came from one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equation: Option<MonomialEquation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialEquation {
    pub exponents: [i64; 2],
    pub alpha: Complex64,
}

impl CosetFamily {
    /// The point of component `component` at parameters `params`.
    pub fn point(&self, component: usize, params: &[Complex64]) -> TorusPoint {
        let base = &self.base_points[component];
        let mut coords = base.coords.clone();
        for (dir, &zeta) in self.directions.iter().zip(params) {
            for (c, &k) in coords.iter_mut().zip(dir) {
                *c *= zeta.powi(k as i32);
            }
        }
        TorusPoint::new(coords)
    }

    /// `count` points spread over the family, cycling through the components.
    pub fn samples(&self, count: usize) -> Vec<TorusPoint> {
        (0..count)
            .map(|k| {
                let zeta = Complex64::from_polar(1.0, TAU * k as f64 / count as f64 + 0.1);
                let params = vec![zeta; self.directions.len()];
                self.point(k % self.base_points.len(), &params)
            })
            .collect()
    }

    /// For a family solving `z^a w^b = alpha` with `b != 0`: all pairs
    /// `(ζ, w)` with `w^b = alpha ζ^-a`, using every b-th root.
    pub fn section(&self, zeta: Complex64) -> Option<Vec<TorusPoint>> {
        let eq = self.equation.as_ref()?;
        let [a, b] = eq.exponents;
        if b == 0 {
            return None;
        }
        let target = eq.alpha * zeta.powi(-a as i32);
        let principal = target.arg() / b as f64;
        Some(
            (0..b.unsigned_abs())
                .map(|m| {
                    let w = Complex64::from_polar(1.0, principal + TAU * m as f64 / b as f64);
                    TorusPoint::new(vec![zeta, w])
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Empty,
    Finite,
    CosetFamily,
}

/// Which branch of the case analysis produced a solution set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Provenance {
    /// A single monomial never vanishes on the torus.
    SingleTerm,
    /// `z^a w^b = alpha`; `unit_modulus` records whether `|alpha| = 1`.
    MonomialEquation { unit_modulus: bool },
    /// Both exponents of a monomial equation are zero.
    ConstantEquation,
    /// Three terms with invertible exponent matrix.
    CircleCircle { circles: CircleCase, det: i64 },
    /// Three terms whose exponent differences are parallel.
    DegenerateExponents,
    /// A monomial system solved through the Smith normal form.
    MonomialSystem { det: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusSolutionSet {
    pub kind: SolutionKind,
    pub points: Vec<TorusPoint>,
    pub families: Vec<CosetFamily>,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl TorusSolutionSet {
    pub fn empty(provenance: Provenance, note: Option<String>) -> Self {
        TorusSolutionSet { kind: SolutionKind::Empty, points: vec![], families: vec![], provenance, note }
    }

    fn finite(mut points: Vec<TorusPoint>, provenance: Provenance) -> Self {
        if points.is_empty() {
            return Self::empty(provenance, None);
        }
        sort_points(&mut points);
        TorusSolutionSet { kind: SolutionKind::Finite, points, families: vec![], provenance, note: None }
    }

    fn families(families: Vec<CosetFamily>, provenance: Provenance) -> Self {
        if families.is_empty() {
            return Self::empty(provenance, None);
        }
        TorusSolutionSet { kind: SolutionKind::CosetFamily, points: vec![], families, provenance, note: None }
    }

    pub fn is_finite(&self) -> bool {
        self.kind != SolutionKind::CosetFamily
    }

    /// Fills in `|p(point)|` for every listed point and family base point.
    pub fn with_residuals(mut self, p: &LaurentPoly) -> Self {
        let fill = |pt: &mut TorusPoint| {
            pt.residual = p.eval(&pt.coords).map(|v| v.norm()).unwrap_or(f64::INFINITY);
        };
        self.points.iter_mut().for_each(fill);
        for f in &mut self.families {
            f.base_points.iter_mut().for_each(fill);
        }
        self
    }
}

/// Lexicographic order by angle in `[0, 2π)`.
pub fn sort_points(points: &mut [TorusPoint]) {
    points.sort_by(|a, b| {
        a.angles()
            .iter()
            .zip(b.angles())
            .map(|(x, y)| x.total_cmp(&y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorusError {
    #[error("expected a polynomial in 2 variables, got {0}")]
    NotBivariate(usize),
    #[error("{0} terms; exact solving handles at most 3 (use the density pipeline instead)")]
    TooManyTerms(usize),
    #[error("the zero polynomial vanishes on the whole torus")]
    ZeroPolynomial,
    #[error("|alpha| and |beta| are too close to a tangency to compare in floating point")]
    AmbiguousModulus,
    #[error("root finding failed: {0}")]
    Roots(#[from] RootError),
}

// ---------------------------------------------------------------------------
// Monomial equations

/// Solutions of `z^a w^b = alpha` with exact `alpha`.
pub fn solve_monomial_eq(exponents: [i64; 2], alpha: &GaussianRational) -> TorusSolutionSet {
    if exponents == [0, 0] {
        return constant_equation(alpha.is_one());
    }
    if !alpha.is_unit_modulus() {
        return TorusSolutionSet::empty(
            Provenance::MonomialEquation { unit_modulus: false },
            Some("|alpha| != 1".into()),
        );
    }
    monomial_family(exponents, alpha.to_complex())
}

/// Floating-point variant: `|alpha| = 1` is tested with tolerance `tol`.
pub fn solve_monomial_eq_float(exponents: [i64; 2], alpha: Complex64, tol: f64) -> TorusSolutionSet {
    if exponents == [0, 0] {
        return constant_equation((alpha - 1.0).norm() <= tol);
    }
    if circle_deviation(alpha) > tol {
        return TorusSolutionSet::empty(
            Provenance::MonomialEquation { unit_modulus: false },
            Some("|alpha| != 1".into()),
        );
    }
    monomial_family(exponents, alpha / alpha.norm())
}

fn constant_equation(holds: bool) -> TorusSolutionSet {
    if holds {
        let mut s = TorusSolutionSet::families(
            vec![CosetFamily {
                base_points: vec![TorusPoint::new(vec![Complex64::new(1.0, 0.0); 2])],
                directions: vec![vec![1, 0], vec![0, 1]],
                equation: None,
            }],
            Provenance::ConstantEquation,
        );
        s.note = Some("equation holds identically".into());
        s
    } else {
        TorusSolutionSet::empty(Provenance::ConstantEquation, Some("equation is a nonzero constant".into()))
    }
}

fn monomial_family(exponents: [i64; 2], alpha: Complex64) -> TorusSolutionSet {
    let [a, b] = exponents;
    let (g, x, y) = extended_gcd(a, b);
    let (ar, br) = (a / g, b / g);
    let base_points = (0..g)
        .map(|m| {
            let gamma = Complex64::from_polar(1.0, (alpha.arg() + TAU * m as f64) / g as f64);
            TorusPoint::new(vec![gamma.powi(x as i32), gamma.powi(y as i32)])
        })
        .collect();
    TorusSolutionSet::families(
        vec![CosetFamily {
            base_points,
            directions: vec![vec![-br, ar]],
            equation: Some(MonomialEquation { exponents, alpha }),
        }],
        Provenance::MonomialEquation { unit_modulus: true },
    )
}

// ---------------------------------------------------------------------------
// Circle geometry

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleCase {
    DisjointOutside,
    /// External tangency, `|beta| = |alpha| + 1`.
    Tangent,
    TwoPoints,
    /// Internal tangency, `|beta| = ||alpha| - 1|` with `|alpha| != 1`.
    InnerTangent,
    DisjointNested,
    /// `beta = 0` and `|alpha| = 1`: every `z` works with `w = -z/alpha`.
    ConcentricEqual,
}

/// Solutions of `z + alpha*w = beta` on the torus, i.e. the intersection of the
/// unit circle with the circle of radius `|alpha|` about `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleIntersection {
    pub alpha_abs: f64,
    pub beta: Complex64,
    pub case: CircleCase,
    pub z_values: Vec<Complex64>,
    pub w_values: Vec<Complex64>,
}

/// Exact case analysis; `alpha` must be nonzero.
pub fn circle_circle(alpha: &GaussianRational, beta: &GaussianRational) -> CircleIntersection {
    assert!(!alpha.is_zero(), "alpha must be nonzero");
    let a2 = alpha.norm_sqr();
    let b2 = beta.norm_sqr();
    let one = BigRational::one();
    let four_a = &a2 * BigRational::from_integer(4.into());
    let case = if b2.is_zero() {
        if a2.is_one() {
            CircleCase::ConcentricEqual
        } else {
            CircleCase::DisjointNested
        }
    } else {
        let outer = &b2 - &a2 - &one;
        let inner = &a2 + &one - &b2;
        let sq = |x: &BigRational| x * x;
        if outer.is_positive() && sq(&outer) > four_a {
            CircleCase::DisjointOutside
        } else if !outer.is_negative() && sq(&outer) == four_a {
            CircleCase::Tangent
        } else if inner.is_positive() && sq(&inner) > four_a {
            CircleCase::DisjointNested
        } else if !inner.is_negative() && sq(&inner) == four_a {
            CircleCase::InnerTangent
        } else {
            CircleCase::TwoPoints
        }
    };
    let cos_psi = if b2.is_zero() {
        0.0
    } else {
        // law of cosines: |z - beta|^2 = 1 + |beta|^2 - 2|beta| cos(psi) = |alpha|^2
        (rat_to_f64(&(&one + &b2 - &a2)) / (2.0 * rat_to_f64(&b2).sqrt())).clamp(-1.0, 1.0)
    };
    intersection_points(alpha.to_complex(), beta.to_complex(), case, cos_psi)
}

/// Floating-point variant. Near-tangent configurations (relative gap below
/// `tol`) are refused, since tangency cannot be decided without exact data.
pub fn circle_circle_float(alpha: Complex64, beta: Complex64, tol: f64) -> Result<CircleIntersection, TorusError> {
    assert!(alpha.norm() > 0.0, "alpha must be nonzero");
    let r = alpha.norm();
    let b = beta.norm();
    let scale = 1.0 + r + b;
    let gaps = [b - (1.0 + r), b - (1.0 - r).abs()];
    if b > 0.0 && gaps.iter().any(|g| g.abs() <= tol * scale) {
        return Err(TorusError::AmbiguousModulus);
    }
    let case = if b == 0.0 {
        if (r - 1.0).abs() <= tol {
            CircleCase::ConcentricEqual
        } else {
            CircleCase::DisjointNested
        }
    } else if gaps[0] > 0.0 {
        CircleCase::DisjointOutside
    } else if gaps[1] < 0.0 {
        CircleCase::DisjointNested
    } else {
        CircleCase::TwoPoints
    };
    let cos_psi = if b == 0.0 { 0.0 } else { ((1.0 + b * b - r * r) / (2.0 * b)).clamp(-1.0, 1.0) };
    Ok(intersection_points(alpha, beta, case, cos_psi))
}

fn intersection_points(alpha: Complex64, beta: Complex64, case: CircleCase, cos_psi: f64) -> CircleIntersection {
    let direction = if beta.norm() > 0.0 { beta / beta.norm() } else { Complex64::new(1.0, 0.0) };
    let z_values: Vec<Complex64> = match case {
        CircleCase::Tangent => vec![direction],
        CircleCase::InnerTangent => {
            // the touching point is on the ray through beta, on the side given by cos(psi) = ±1
            vec![direction * cos_psi.signum()]
        }
        CircleCase::TwoPoints => {
            let psi = cos_psi.acos();
            vec![direction * Complex64::from_polar(1.0, psi), direction * Complex64::from_polar(1.0, -psi)]
        }
        _ => vec![],
    };
    let w_values = z_values
        .iter()
        .map(|&z| {
            let w = (beta - z) / alpha;
            w / w.norm()
        })
        .collect();
    CircleIntersection { alpha_abs: alpha.norm(), beta, case, z_values, w_values }
}

// ---------------------------------------------------------------------------
// Monomial systems

/// All torus solutions of `z^A[i][0] w^A[i][1] = targets[i]` for `i = 0, 1`.
///
/// With `P A Q = diag(d1, d2)`, the substitution `(z, w) = s^Q` turns the system
/// into `s_k^{d_k} = t_k` where `t = targets^P`; each invertible diagonal entry
/// contributes `d_k` roots and each zero one a free direction (or no solution
/// when its target differs from 1).
pub fn snf_enumerate(a: &IntMatrix, targets: [Complex64; 2]) -> TorusSolutionSet {
    let smith = smith_normal_form(a);
    let det = det2(a);
    let provenance = Provenance::MonomialSystem { det };
    let t: Vec<Complex64> = (0..2)
        .map(|i| {
            let v = targets[0].powi(smith.p[i][0] as i32) * targets[1].powi(smith.p[i][1] as i32);
            v / v.norm()
        })
        .collect();
    let diag = smith.diagonal();
    let mut choices: Vec<Vec<Complex64>> = Vec::new();
    let mut free = Vec::new();
    for k in 0..2 {
        let d = diag[k];
        if d == 0 {
            if (t[k] - 1.0).norm() > UNIT_TARGET_TOL {
                return TorusSolutionSet::empty(provenance, Some("inconsistent monomial system".into()));
            }
            choices.push(vec![Complex64::new(1.0, 0.0)]);
            free.push(k);
        } else {
            choices.push(
                (0..d).map(|m| Complex64::from_polar(1.0, (t[k].arg() + TAU * m as f64) / d as f64)).collect(),
            );
        }
    }
    let lift = |s: [Complex64; 2]| -> TorusPoint {
        let coords = (0..2)
            .map(|j| s[0].powi(smith.q[j][0] as i32) * s[1].powi(smith.q[j][1] as i32))
            .collect();
        TorusPoint::new(coords)
    };
    let mut points = Vec::new();
    for &s0 in &choices[0] {
        for &s1 in &choices[1] {
            points.push(lift([s0, s1]));
        }
    }
    if free.is_empty() {
        TorusSolutionSet::finite(points, provenance)
    } else {
        let directions = free.iter().map(|&k| vec![smith.q[0][k], smith.q[1][k]]).collect();
        TorusSolutionSet::families(vec![CosetFamily { base_points: points, directions, equation: None }], provenance)
    }
}

// ---------------------------------------------------------------------------
// Trinomials

/// Complete torus solution set of a bivariate Laurent polynomial with at most
/// three terms. Returned points carry their residual `|p(z, w)|`.
pub fn solve_trinomial(p: &LaurentPoly) -> Result<TorusSolutionSet, TorusError> {
    if p.nvars() != 2 {
        return Err(TorusError::NotBivariate(p.nvars()));
    }
    let terms: Vec<(Vec<i64>, GaussianRational)> = p.terms().rev().map(|(e, c)| (e.0.clone(), c.clone())).collect();
    let out = match terms.len() {
        0 => return Err(TorusError::ZeroPolynomial),
        1 => TorusSolutionSet::empty(Provenance::SingleTerm, Some("a monomial has no zeros on the torus".into())),
        2 => {
            // c0 m0 + c1 m1 = 0  <=>  m0/m1 = -c1/c0
            let e = [terms[0].0[0] - terms[1].0[0], terms[0].0[1] - terms[1].0[1]];
            let alpha = -(&terms[1].1 / &terms[0].1);
            solve_monomial_eq(e, &alpha)
        }
        3 => solve_three_terms(&terms)?,
        n => return Err(TorusError::TooManyTerms(n)),
    };
    Ok(out.with_residuals(p))
}

fn solve_three_terms(terms: &[(Vec<i64>, GaussianRational)]) -> Result<TorusSolutionSet, TorusError> {
    let (e1, c1) = &terms[0];
    let (e2, c2) = &terms[1];
    let (e3, c3) = &terms[2];
    // c1 m1 + c2 m2 + c3 m3 = 0  <=>  u + alpha v = beta with u = m1/m3, v = m2/m3
    let alpha = c2 / c1;
    let beta = -(c3 / c1);
    let a: IntMatrix = vec![vec![e1[0] - e3[0], e1[1] - e3[1]], vec![e2[0] - e3[0], e2[1] - e3[1]]];
    let det = det2(&a);
    if det == 0 {
        return solve_degenerate(&a, &alpha, &beta);
    }
    let ci = circle_circle(&alpha, &beta);
    let provenance = Provenance::CircleCircle { circles: ci.case, det };
    let mut points = Vec::new();
    for (&u0, &v0) in ci.z_values.iter().zip(&ci.w_values) {
        let sols = snf_enumerate(&a, [u0, v0]);
        points.extend(sols.points);
    }
    let mut set = TorusSolutionSet::finite(points, provenance);
    if set.kind == SolutionKind::Empty {
        set.note = Some(format!("{:?}", ci.case).to_lowercase());
    }
    Ok(set)
}

/// Parallel exponent rows: `(a, b) = k1 (e, f)` and `(c, d) = k2 (e, f)`, so the
/// equation only involves `m = z^e w^f` and reads `m^k1 + alpha m^k2 = beta`.
/// Its unit-modulus roots are found numerically; each gives a coset family.
fn solve_degenerate(
    a: &IntMatrix,
    alpha: &GaussianRational,
    beta: &GaussianRational,
) -> Result<TorusSolutionSet, TorusError> {
    let row = if a[0] != [0, 0] { &a[0] } else { &a[1] };
    let (g, _, _) = extended_gcd(row[0], row[1]);
    let (e, f) = (row[0] / g, row[1] / g);
    let k_of = |r: &Vec<i64>| if e != 0 { r[0] / e } else { r[1] / f };
    let (k1, k2) = (k_of(&a[0]), k_of(&a[1]));
    let lo = k1.min(k2).min(0);
    let hi = k1.max(k2).max(0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    coeffs[(k1 - lo) as usize] += 1.0;
    coeffs[(k2 - lo) as usize] += alpha.to_complex();
    coeffs[(0 - lo) as usize] -= beta.to_complex();
    let rs = roots(&coeffs)?;
    let mut families = Vec::new();
    for r in &rs.roots {
        if circle_deviation(r.value) <= crate::roots::DEFAULT_CIRCLE_TOL {
            let sol = solve_monomial_eq_float([e, f], r.value, crate::roots::DEFAULT_CIRCLE_TOL);
            families.extend(sol.families);
        }
    }
    let mut set = TorusSolutionSet::families(families, Provenance::DegenerateExponents);
    set.note = Some("exponent matrix is singular; unit-modulus roots located numerically".into());
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_with;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn g(a: i64, b: i64) -> GaussianRational {
        GaussianRational::from_ints(a, b)
    }

    fn zw(s: &str) -> LaurentPoly {
        parse_with(s, &["z", "w"]).unwrap()
    }

    #[test]
    fn monomial_equation_family() {
        let s = solve_monomial_eq([2, 1], &g(1, 0));
        assert_eq!(s.kind, SolutionKind::CosetFamily);
        let fam = &s.families[0];
        let p = zw("z^2*w - 1");
        for pt in fam.samples(16) {
            assert!(p.eval(&pt.coords).unwrap().norm() < 1e-12);
        }
        // (ζ, ζ^-2) lies in the family's section
        let zeta = Complex64::from_polar(1.0, 0.7);
        let sec = fam.section(zeta).unwrap();
        assert_eq!(sec.len(), 1);
        assert!((sec[0].coords[1] - zeta.powi(-2)).norm() < 1e-12);
    }

    #[test]
    fn monomial_equation_off_circle_is_empty() {
        let s = solve_trinomial(&zw("z*w - 2")).unwrap();
        assert_eq!(s.kind, SolutionKind::Empty);
        assert_eq!(s.note.as_deref(), Some("|alpha| != 1"));
    }

    #[test]
    fn monomial_equation_without_w() {
        // z^2 = -1: z ∈ {i, -i}, w free
        let s = solve_monomial_eq([2, 0], &g(-1, 0));
        let fam = &s.families[0];
        assert_eq!(fam.base_points.len(), 2);
        assert_eq!(fam.directions, vec![vec![0, 1]]);
        for pt in fam.samples(8) {
            assert!((pt.coords[0].powi(2) + 1.0).norm() < 1e-12);
        }
        assert!(fam.section(c(1.0, 0.0)).is_none());
    }

    #[test]
    fn section_enumerates_every_root() {
        let s = solve_monomial_eq([1, 3], &g(0, 1));
        let sec = s.families[0].section(Complex64::from_polar(1.0, 1.1)).unwrap();
        assert_eq!(sec.len(), 3);
        for pt in &sec {
            let v = pt.coords[0] * pt.coords[1].powi(3);
            assert!((v - c(0.0, 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn circle_cases() {
        let ci = circle_circle(&g(1, 0), &g(2, 0));
        assert_eq!(ci.case, CircleCase::Tangent);
        assert!((ci.z_values[0] - 1.0).norm() < 1e-15 && (ci.w_values[0] - 1.0).norm() < 1e-15);

        assert_eq!(circle_circle(&g(1, 0), &g(3, 0)).case, CircleCase::DisjointOutside);

        let ci = circle_circle(&g(0, 1), &g(1, 0));
        assert_eq!(ci.case, CircleCase::TwoPoints);
        let mut zs = ci.z_values.clone();
        zs.sort_by(|a, b| a.im.total_cmp(&b.im));
        let h = 3f64.sqrt() / 2.0;
        assert!((zs[0] - c(0.5, -h)).norm() < 1e-15);
        assert!((zs[1] - c(0.5, h)).norm() < 1e-15);
        for (z, w) in ci.z_values.iter().zip(&ci.w_values) {
            assert!((w - c(0.0, -1.0) * (1.0 - z)).norm() < 1e-14);
        }

        // |alpha| = 3, |beta| = 2 = |alpha| - 1
        let ci = circle_circle(&g(3, 0), &g(2, 0));
        assert_eq!(ci.case, CircleCase::InnerTangent);
        assert!((ci.z_values[0] + 1.0).norm() < 1e-15);
        assert_eq!(circle_circle(&g(3, 0), &g(1, 0)).case, CircleCase::DisjointNested);
        assert_eq!(circle_circle(&g(0, 1), &g(0, 0)).case, CircleCase::ConcentricEqual);
    }

    #[test]
    fn float_circles_refuse_tangency() {
        assert_eq!(circle_circle_float(c(1.0, 0.0), c(2.0, 0.0), 1e-12), Err(TorusError::AmbiguousModulus));
        let ci = circle_circle_float(c(0.0, 1.0), c(1.0, 0.0), 1e-12).unwrap();
        assert_eq!(ci.case, CircleCase::TwoPoints);
    }

    #[test]
    fn circle_solutions_rotate_with_beta() {
        let alpha = GaussianRational::from_fractions(1, 2, 1, 3);
        let beta = GaussianRational::from_fractions(6, 5, 0, 1);
        let rot = GaussianRational::from_fractions(3, 5, 4, 5);
        let a = circle_circle(&alpha, &beta);
        let b = circle_circle(&alpha, &(&beta * &rot));
        let r = rot.to_complex();
        assert_eq!(a.case, b.case);
        for z in &a.z_values {
            assert!(b.z_values.iter().any(|y| (y - z * r).norm() < 1e-12));
        }
        for w in &a.w_values {
            assert!(b.w_values.iter().any(|y| (y - w * r).norm() < 1e-12));
        }
    }

    #[test]
    fn snf_examples() {
        let s = snf_enumerate(&vec![vec![1, 1], vec![1, -1]], [c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(s.points.len(), 2);
        let expect = [[c(1.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(-1.0, 0.0)]];
        for e in expect {
            assert!(s.points.iter().any(|p| (p.coords[0] - e[0]).norm() < 1e-14 && (p.coords[1] - e[1]).norm() < 1e-14));
        }

        let (u0, v0) = (Complex64::from_polar(1.0, 0.4), Complex64::from_polar(1.0, -1.3));
        let s = snf_enumerate(&vec![vec![2, 3], vec![1, 2]], [u0, v0]);
        assert_eq!(s.points.len(), 1);
        assert!((s.points[0].coords[0] - u0.powi(2) * v0.powi(-3)).norm() < 1e-13);
        assert!((s.points[0].coords[1] - u0.powi(-1) * v0.powi(2)).norm() < 1e-13);

        let s = snf_enumerate(&vec![vec![1, 0], vec![0, 1]], [u0, v0]);
        assert_eq!(s.points.len(), 1);
        assert!((s.points[0].coords[0] - u0).norm() < 1e-14);
    }

    #[test]
    fn snf_singular_systems() {
        // z w^2 = u, z^2 w^4 = u^2 is consistent: one family
        let u = Complex64::from_polar(1.0, 0.3);
        let s = snf_enumerate(&vec![vec![1, 2], vec![2, 4]], [u, u * u]);
        assert_eq!(s.kind, SolutionKind::CosetFamily);
        for pt in s.families[0].samples(16) {
            assert!((pt.coords[0] * pt.coords[1].powi(2) - u).norm() < 1e-12);
        }
        let s = snf_enumerate(&vec![vec![1, 2], vec![2, 4]], [u, -u * u]);
        assert_eq!(s.kind, SolutionKind::Empty);
    }

    #[test]
    fn intro_trinomial_has_one_point() {
        let s = solve_trinomial(&zw("z + w - 2")).unwrap();
        assert_eq!(s.kind, SolutionKind::Finite);
        assert_eq!(s.points.len(), 1);
        assert!(s.points[0].distance(&TorusPoint::new(vec![c(1.0, 0.0), c(1.0, 0.0)])) < 1e-14);
    }

    #[test]
    fn exercise_one_has_two_points() {
        let p = zw("2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)");
        let s = solve_trinomial(&p).unwrap();
        assert_eq!(s.kind, SolutionKind::Finite);
        assert_eq!(s.points.len(), 2);
        for pt in &s.points {
            assert!(pt.residual <= 1e-9, "{}", pt.residual);
            assert!(pt.coords.iter().all(|c| (c.norm() - 1.0).abs() <= 1e-12));
        }
        assert!(s.points[0].distance(&s.points[1]) > 1e-3);
    }

    #[test]
    fn cardinality_law() {
        // z^2 w + i w^-1 - 1: the exponent differences (2, 2), (0, -2) have det -4
        let p = zw("z^2*w + i*w^-1 - 1");
        let s = solve_trinomial(&p).unwrap();
        let Provenance::CircleCircle { circles, det } = s.provenance.clone() else { panic!() };
        let pairs = match circles {
            CircleCase::TwoPoints => 2,
            CircleCase::Tangent | CircleCase::InnerTangent => 1,
            _ => 0,
        };
        assert_eq!(s.points.len(), pairs * det.unsigned_abs() as usize);
        assert!(s.points.iter().all(|p| p.residual < 1e-9));
    }

    #[test]
    fn degenerate_trinomial_gives_families() {
        // m = z w, m^2 + m + 1 = 0 has its roots at the primitive cube roots of unity
        let p = zw("z^2*w^2 + z*w + 1");
        let s = solve_trinomial(&p).unwrap();
        assert_eq!(s.kind, SolutionKind::CosetFamily);
        assert_eq!(s.families.len(), 2);
        for fam in &s.families {
            for pt in fam.samples(16) {
                assert!(p.eval(&pt.coords).unwrap().norm() < 1e-9);
            }
        }
        // m^2 + 3m + 1 has no unit-modulus roots
        let s = solve_trinomial(&zw("z^2*w^2 + 3*z*w + 1")).unwrap();
        assert_eq!(s.kind, SolutionKind::Empty);
    }

    #[test]
    fn misc_shapes() {
        assert_eq!(solve_trinomial(&zw("3*z^2*w")).unwrap().kind, SolutionKind::Empty);
        assert!(matches!(solve_trinomial(&zw("z + w + z*w + 1")), Err(TorusError::TooManyTerms(4))));
        assert!(matches!(
            solve_trinomial(&parse_with("z", &["z"]).unwrap()),
            Err(TorusError::NotBivariate(1))
        ));
        let s = solve_trinomial(&zw("z^2*w - 1")).unwrap();
        assert_eq!(s.kind, SolutionKind::CosetFamily);
    }
}
