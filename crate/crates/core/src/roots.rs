//! Univariate complex root finding and unit-circle classification.
//!
//! [`roots`] runs Aberth–Ehrlich simultaneous iteration and falls back to the
//! eigenvalues of the companion matrix when the iteration stalls. Every root is
//! Newton-polished and checked against a residual bound before it is returned.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_CIRCLE_TOL: f64 = 1e-9;
const CLUSTER_TOL: f64 = 1e-7;
const RESIDUAL_REL: f64 = 1e-10;
const MAX_ITER: usize = 600;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("constant polynomial has no roots")]
    Constant,
    #[error("root finder did not converge (worst residual {worst_residual:e})")]
    NoConvergence { best: Vec<Complex64>, worst_residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Nonzero roots of a polynomial, clustered into multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// Largest `|p(r)|` over the returned roots.
    pub residual_bound: f64,
    /// Multiplicity of the root `0`, which is stripped and not listed in `roots`.
    pub zero_roots: usize,
}

impl RootSet {
    /// Roots repeated according to multiplicity.
    pub fn values(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
            .collect()
    }

    pub fn distinct(&self) -> usize {
        self.roots.len()
    }

    /// Number of nonzero roots counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn from_values(values: &[Complex64]) -> Self {
        RootSet {
            roots: values.iter().map(|&value| Root { value, multiplicity: 1 }).collect(),
            residual_bound: 0.0,
            zero_roots: 0,
        }
    }
}

/// Horner evaluation of ascending coefficients, returning `(p, p')`.
pub fn horner(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn residual_tolerance(coeffs: &[Complex64], x: Complex64) -> f64 {
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let deg = (coeffs.len() - 1) as i32;
    RESIDUAL_REL * norm * x.norm().max(1.0).powi(deg)
}

/// All roots of `sum coeffs[k] w^k`.
///
/// Leading zeros are dropped; trailing zeros become `zero_roots`. Each returned
/// root `r` satisfies `|p(r)| <= 1e-10 * ||coeffs|| * max(1, |r|)^deg`, which is
/// the plain `1e-10 * ||coeffs||` bound on and inside the unit circle.
pub fn roots(coeffs: &[Complex64]) -> Result<RootSet, RootError> {
    let zero = Complex64::new(0.0, 0.0);
    let top = coeffs.iter().rposition(|c| *c != zero).ok_or(RootError::ZeroPolynomial)?;
    let low = coeffs.iter().position(|c| *c != zero).expect("nonzero");
    let poly = &coeffs[low..=top];
    if poly.len() == 1 {
        if low == 0 {
            return Err(RootError::Constant);
        }
        return Ok(RootSet { roots: vec![], residual_bound: 0.0, zero_roots: low });
    }
    let raw = match aberth(poly) {
        Some(r) => r,
        None => companion_roots(poly),
    };
    let polished: Vec<Complex64> = raw.into_iter().map(|r| polish(poly, r)).collect();
    let mut worst = 0.0f64;
    let mut failed = false;
    for &r in &polished {
        let res = horner(poly, r).0.norm();
        if !(res <= residual_tolerance(poly, r)) {
            failed = true;
        }
        worst = worst.max(res);
    }
    if failed {
        // retry once through the eigenvalue route before giving up
        let alt: Vec<Complex64> = companion_roots(poly).into_iter().map(|r| polish(poly, r)).collect();
        let ok = alt.iter().all(|&r| horner(poly, r).0.norm() <= residual_tolerance(poly, r));
        if !ok {
            return Err(RootError::NoConvergence { best: polished, worst_residual: worst });
        }
        return Ok(cluster(poly, &alt, low));
    }
    Ok(cluster(poly, &polished, low))
}

fn cluster(poly: &[Complex64], values: &[Complex64], zero_roots: usize) -> RootSet {
    let n = values.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(g: &mut [usize], k: usize) -> usize {
        let mut r = k;
        while g[r] != r {
            g[r] = g[g[r]];
            r = g[r];
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = values[i].norm().max(values[j].norm()).max(1.0);
            if (values[i] - values[j]).norm() <= CLUSTER_TOL * scale {
                let (a, b) = (find(&mut group, i), find(&mut group, j));
                if a != b {
                    group[b] = a;
                }
            }
        }
    }
    let mut out: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let g = find(&mut group, i);
        match out.iter_mut().find(|(h, _, _)| *h == g) {
            Some(entry) => {
                entry.1 += v;
                entry.2 += 1;
            }
            None => out.push((g, v, 1)),
        }
    }
    let roots: Vec<Root> = out
        .into_iter()
        .map(|(_, sum, m)| Root { value: sum / m as f64, multiplicity: m })
        .collect();
    let residual_bound = roots
        .iter()
        .map(|r| horner(poly, r.value).0.norm())
        .fold(0.0, f64::max);
    RootSet { roots, residual_bound, zero_roots }
}

fn polish(poly: &[Complex64], mut x: Complex64) -> Complex64 {
    let mut best = horner(poly, x).0.norm();
    for _ in 0..4 {
        let (p, dp) = horner(poly, x);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let next = x - p / dp;
        let r = horner(poly, next).0.norm();
        if r < best {
            best = r;
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Aberth–Ehrlich iteration on a polynomial with nonzero constant and leading terms.
fn aberth(poly: &[Complex64]) -> Option<Vec<Complex64>> {
    let deg = poly.len() - 1;
    let lead = poly[deg];
    if deg == 1 {
        return Some(vec![-poly[0] / lead]);
    }
    let radius = (poly[0] / lead).norm().powf(1.0 / deg as f64);
    let radius = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();
    let mut done = vec![false; deg];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for k in 0..deg {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(poly, z[k]);
            if p.norm() <= f64::EPSILON * residual_tolerance(poly, z[k]) / RESIDUAL_REL {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > 0.0 {
                        sum += d.inv();
                    }
                }
            }
            let corr = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !corr.re.is_finite() || !corr.im.is_finite() {
                return None;
            }
            z[k] -= corr;
            if corr.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Some(z);
        }
    }
    None
}

/// Eigenvalues of the companion matrix via a complex Schur decomposition.
fn companion_roots(poly: &[Complex64]) -> Vec<Complex64> {
    let deg = poly.len() - 1;
    let lead = poly[deg];
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -poly[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::new(m);
    match schur.eigenvalues() {
        Some(ev) => ev.iter().copied().collect(),
        None => {
            let (_, t) = schur.unpack();
            (0..deg).map(|i| t[(i, i)]).collect()
        }
    }
}

/// Roots of a polynomial split by their distance to the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleClass {
    pub on_circle: Vec<Root>,
    pub off_circle: Vec<Root>,
    /// Roots (from either list) with `tol/10 <= ||r| - 1| <= 10 tol`.
    pub ambiguous: Vec<Complex64>,
    pub tol: f64,
}

impl CircleClass {
    pub fn is_ambiguous(&self, value: Complex64) -> bool {
        self.ambiguous.contains(&value)
    }

    /// On-circle roots that are simple and not near the threshold.
    pub fn clean_on_circle(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.on_circle
            .iter()
            .filter(|r| r.multiplicity == 1 && !self.is_ambiguous(r.value))
            .map(|r| r.value)
    }
}

pub fn circle_deviation(r: Complex64) -> f64 {
    (r.norm() - 1.0).abs()
}

/// Partitions `rs` by `||r| - 1| <= tol`; roots within a factor of ten of the
/// threshold on either side are flagged as ambiguous.
pub fn circle_classify(rs: &RootSet, tol: f64) -> CircleClass {
    assert!(tol > 0.0, "circle tolerance must be positive");
    let mut on_circle = Vec::new();
    let mut off_circle = Vec::new();
    let mut ambiguous = Vec::new();
    for r in &rs.roots {
        let dev = circle_deviation(r.value);
        if dev <= tol {
            on_circle.push(*r);
        } else {
            off_circle.push(*r);
        }
        if dev >= tol / 10.0 && dev <= tol * 10.0 {
            ambiguous.push(r.value);
        }
    }
    CircleClass { on_circle, off_circle, ambiguous, tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    fn expand(roots: &[Complex64], lead: Complex64) -> Vec<Complex64> {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, &a) in coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            coeffs = next;
        }
        coeffs
    }

    #[test]
    fn simple_examples() {
        let rs = roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let v = sorted(rs.values());
        assert!((v[0] - c(-1.0, 0.0)).norm() < 1e-14 && (v[1] - c(1.0, 0.0)).norm() < 1e-14);

        let rs = roots(&[c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(rs.values().len(), 1);
        assert!((rs.values()[0] - c(1.0, 0.0)).norm() < 1e-15);

        let rs = roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let v = sorted(rs.values());
        assert!((v[0] - c(0.0, -1.0)).norm() < 1e-14 && (v[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(roots(&[c(0.0, 0.0)]), Err(RootError::ZeroPolynomial));
        assert_eq!(roots(&[c(3.0, 0.0), c(0.0, 0.0)]), Err(RootError::Constant));
        let rs = roots(&[c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(rs.zero_roots, 2);
        assert!(rs.roots.is_empty());
        let rs = roots(&[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(rs.zero_roots, 1);
        assert_eq!(rs.degree(), 1);
    }

    #[test]
    fn double_roots_are_clustered() {
        // (w - 1)^2 (w + 2)
        let coeffs = expand(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)], c(1.0, 0.0));
        let rs = roots(&coeffs).unwrap();
        assert_eq!(rs.distinct(), 2);
        let double = rs.roots.iter().find(|r| r.multiplicity == 2).unwrap();
        assert!((double.value - c(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn companion_route_agrees_with_aberth() {
        let coeffs = expand(&[c(0.5, 0.2), c(-1.5, 0.7), c(2.0, -2.0), c(0.1, 0.0)], c(2.0, 1.0));
        let a = sorted(aberth(&coeffs).unwrap());
        let b = sorted(companion_roots(&coeffs));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn classification_examples() {
        let tol = 1e-9;
        let cc = circle_classify(&RootSet::from_values(&[c(1.0, 0.0), c(-1.0, 0.0)]), tol);
        assert_eq!(cc.on_circle.len(), 2);
        assert!(cc.ambiguous.is_empty());

        let cc = circle_classify(&RootSet::from_values(&[c(2.0, 0.0), c(0.0, 1.0)]), tol);
        assert_eq!(cc.on_circle.len(), 1);
        assert_eq!(cc.on_circle[0].value, c(0.0, 1.0));
        assert_eq!(cc.off_circle[0].value, c(2.0, 0.0));

        let edge = c(1.0 + 5e-10, 0.0);
        let cc = circle_classify(&RootSet::from_values(&[edge]), tol);
        assert_eq!(cc.on_circle.len(), 1);
        assert!(cc.is_ambiguous(edge));
        assert_eq!(cc.clean_on_circle().count(), 0);
    }

    proptest! {
        #[test]
        fn residuals_and_reconstruction(
            parts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..=21),
        ) {
            let coeffs: Vec<Complex64> = parts.iter().map(|&(a, b)| c(a, b)).collect();
            prop_assume!(coeffs.last().unwrap().norm() > 0.1 && coeffs[0].norm() > 0.1);
            let rs = roots(&coeffs).unwrap();
            prop_assert_eq!(rs.degree(), coeffs.len() - 1);
            for r in rs.values() {
                prop_assert!(horner(&coeffs, r).0.norm() <= rs.residual_bound + 1e-300);
                prop_assert!(horner(&coeffs, r).0.norm() <= residual_tolerance(&coeffs, r));
            }
            let rebuilt = expand(&rs.values(), *coeffs.last().unwrap());
            let norm: f64 = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for (a, b) in rebuilt.iter().zip(&coeffs) {
                prop_assert!((a - b).norm() <= 1e-6 * norm, "{} vs {}", a, b);
            }
        }
    }
}
