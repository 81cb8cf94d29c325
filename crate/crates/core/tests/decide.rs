use torus_locus::density::{decide, replay, Reason, VarietySpec, Verdict};
use torus_locus::parser::parse_with;

fn curve(text: &str) -> VarietySpec {
    VarietySpec::hypersurface(parse_with(text, &["z", "w"]).unwrap()).unwrap()
}

#[test]
fn verdicts_survive_monomial_shifts_and_star() {
    let cases = [
        ("z^2*w - 1", Verdict::Dense),
        ("w*(2 + z) - (1 + 2*z)", Verdict::Dense),
        ("2*z^2*(w^2 + 1) - w*(z^2 + 1)^2", Verdict::Dense),
        ("z + w - 2", Verdict::NotDense),
        ("z + w + z*w - 2*z^2", Verdict::NotDense),
    ];
    let shift = parse_with("z^3*w^-2", &["z", "w"]).unwrap();
    for (text, expected) in cases {
        let g = parse_with(text, &["z", "w"]).unwrap();
        for h in [g.clone(), &g * &shift, g.star()] {
            let d = decide(&VarietySpec::hypersurface(h.clone()).unwrap()).unwrap();
            assert_eq!(d.verdict, expected, "{h}");
            replay(&d).unwrap();
        }
    }
}

#[test]
fn dense_curves_carry_arcs_on_the_curve() {
    let d = decide(&curve("2*z^2*(w^2 + 1) - w*(z^2 + 1)^2")).unwrap();
    assert_eq!(d.verdict, Verdict::Dense);
    assert_eq!(d.real_dimension, Some(1));
    let arc = d.arc().expect("arc");
    let g = parse_with("2*z^2*(w^2 + 1) - w*(z^2 + 1)^2", &["z", "w"]).unwrap();
    for p in &arc.points {
        let z = num_complex::Complex64::from_polar(1.0, p.theta);
        let r = g.eval(&[z, p.value]).unwrap().norm();
        assert!(r <= 1e-9 * g.l1_norm(), "residual {r}");
        assert!((p.value.norm() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn empty_and_point_like_curves() {
    let d = decide(&curve("z^2 - 3*z*w + w^2")).unwrap();
    assert_eq!(d.verdict, Verdict::NotDense);
    let d = decide(&curve("z - 3")).unwrap();
    assert_ne!(d.verdict, Verdict::Dense);
    assert_ne!(d.reason, Reason::BranchWitness);
}
