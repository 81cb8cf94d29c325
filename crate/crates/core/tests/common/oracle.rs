//! Brute-force torus solver for bivariate polynomials with finitely many torus
//! zeros: scan an angle grid, then polish candidates with Newton's method in
//! `(θ, φ)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use torus_locus::LaurentPoly;

/// `g` and its derivatives in `θ` and `φ` at `(e^{iθ}, e^{iφ})`.
fn eval_angles(terms: &[(i64, i64, Complex64)], theta: f64, phi: f64) -> (Complex64, Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dt = v;
    let mut dp = v;
    for &(a, b, c) in terms {
        let m = c * Complex64::from_polar(1.0, a as f64 * theta + b as f64 * phi);
        v += m;
        dt += m * Complex64::new(0.0, a as f64);
        dp += m * Complex64::new(0.0, b as f64);
    }
    (v, dt, dp)
}

fn newton(terms: &[(i64, i64, Complex64)], mut theta: f64, mut phi: f64) -> Option<(f64, f64, f64)> {
    for _ in 0..60 {
        let (v, dt, dp) = eval_angles(terms, theta, phi);
        // real 2x2 system [Re, Im] of dt*x + dp*y = -v
        let det = dt.re * dp.im - dt.im * dp.re;
        if det.abs() < 1e-14 {
            return None;
        }
        let x = (-v.re * dp.im + v.im * dp.re) / det;
        let y = (-dt.re * v.im + dt.im * v.re) / det;
        theta += x;
        phi += y;
        if x.abs() + y.abs() < 1e-15 {
            break;
        }
    }
    let (v, _, _) = eval_angles(terms, theta, phi);
    Some((theta.rem_euclid(TAU), phi.rem_euclid(TAU), v.norm()))
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Distinct torus zeros of `g` as angle pairs, from an `n x n` grid.
pub fn torus_zeros(g: &LaurentPoly, n: usize) -> Vec<(f64, f64)> {
    let terms: Vec<(i64, i64, Complex64)> =
        g.to_complex_terms().into_iter().map(|(e, c)| (e.0[0], e.0[1], c)).collect();
    // |g| changes by at most lip * (|dθ| + |dφ|) between samples
    let lip: f64 = terms.iter().map(|(a, b, c)| c.norm() * (a.abs().max(b.abs()) as f64)).sum();
    let h = TAU / n as f64;
    let threshold = lip * h;
    let scale = g.l1_norm();
    let mut found: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let theta = h * i as f64;
        for j in 0..n {
            let phi = h * j as f64;
            let (v, _, _) = eval_angles(&terms, theta, phi);
            if v.norm() > threshold {
                continue;
            }
            let Some((t, p, r)) = newton(&terms, theta, phi) else { continue };
            if r > 1e-10 * scale {
                continue;
            }
            if !found.iter().any(|&(t2, p2)| angle_gap(t, t2) + angle_gap(p, p2) < 1e-7) {
                found.push((t, p));
            }
        }
    }
    found
}
