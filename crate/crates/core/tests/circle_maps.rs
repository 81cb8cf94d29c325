use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_locus::blaschke::{
    blaschke_factor, make_circle_map, multiset_distance, sample_moduli, verify_circle_map, BlaschkeFactors,
    CircleMap, Verification,
};
use torus_locus::parser::RationalExpr;
use torus_locus::random::random_laurent;
use torus_locus::{parse_with, GaussianRational, LaurentPoly};

#[test]
fn made_maps_are_proven_and_unimodular() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..60 {
        let n = 1 + k % 3;
        let terms = rng.random_range(1..=4);
        let p = random_laurent(&mut rng, n, terms, 3, 5);
        if p.is_zero() {
            continue;
        }
        let map = make_circle_map(&p).unwrap();
        assert!(verify_circle_map(&map.to_rational()).unwrap().is_proven(), "p = {p}");
        for (_, m) in sample_moduli(&map, 32, k as u64) {
            assert!((m - 1.0).abs() <= 1e-9, "p = {p}");
        }
    }
}

#[test]
fn perturbed_denominators_are_refuted() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let bump = GaussianRational::from_fractions(1, 1000, 0, 1);
    for k in 0..40 {
        let n = 1 + k % 3;
        let terms = rng.random_range(2..=4);
        let p = random_laurent(&mut rng, n, terms, 2, 5);
        if p.len() < 2 {
            continue;
        }
        let map = make_circle_map(&p).unwrap();
        let (e, _) = map.denominator.leading_term().unwrap();
        let den = &map.denominator + &LaurentPoly::monomial(e.clone(), bump.clone());
        let r = RationalExpr::new(map.numerator.clone(), den).unwrap();
        assert!(verify_circle_map(&r).unwrap().is_refuted(), "p = {p}");
    }
}

#[test]
fn verify_handles_common_factors() {
    let vars = ["z"];
    let num = parse_with("(z - 2)*(z + 3)", &vars).unwrap();
    let den = parse_with("(1 - 2*z)*(z + 3)", &vars).unwrap();
    assert!(verify_circle_map(&RationalExpr::new(num, den).unwrap()).unwrap().is_proven());
    let num = parse_with("z - 2", &vars).unwrap();
    let den = parse_with("1 - 3*z", &vars).unwrap();
    assert!(verify_circle_map(&RationalExpr::new(num, den).unwrap()).unwrap().is_refuted());
}

fn random_alphas(rng: &mut ChaCha8Rng, m: usize) -> Vec<GaussianRational> {
    let mut out: Vec<GaussianRational> = Vec::new();
    while out.len() < m {
        let a = GaussianRational::from_fractions(rng.random_range(-12..=12), 4, rng.random_range(-12..=12), 4);
        let c = a.to_complex();
        let apart = out.iter().all(|b| {
            let b = b.to_complex();
            (b - c).norm() > 0.05 && (b.norm() == 0.0 || (b.conj().inv() - c).norm() > 0.05)
        });
        if (c.norm() - 1.0).abs() >= 0.05 && c.norm() <= 3.0 && apart {
            out.push(a);
        }
    }
    out
}

#[test]
fn factor_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for m in 1..=8 {
        let alphas = random_alphas(&mut rng, m);
        let expanded = BlaschkeFactors::expand_exact(&alphas);
        let map = CircleMap { verified: Verification::Proven, ..expanded };
        let f = blaschke_factor(&map).unwrap();
        let want: Vec<Complex64> = alphas.iter().map(GaussianRational::to_complex).collect();
        assert!(multiset_distance(&f.alphas, &want) < 1e-6, "m = {m}");
        assert!((f.prefactor.norm() - 1.0).abs() < 1e-9);
        let z = Complex64::from_polar(1.0, 0.3);
        let direct = map.eval(&[z]).unwrap();
        assert!((f.eval(z) - direct).norm() < 1e-8);
    }
}

#[test]
fn unproven_maps_are_not_factored() {
    let num = parse_with("z - 2", &["z"]).unwrap();
    let map = CircleMap { denominator: LaurentPoly::one(1), numerator: num, verified: Verification::Unverified };
    assert!(blaschke_factor(&map).is_err());
}
