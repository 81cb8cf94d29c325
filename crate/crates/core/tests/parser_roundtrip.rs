use proptest::prelude::*;
use torus_locus::parser::{format_poly_with, parse_poly, ExprSource};
use torus_locus::{parse_with, Exponents, GaussianRational, LaurentPoly};

fn arb_poly(n: usize) -> impl Strategy<Value = LaurentPoly> {
    let term = (prop::collection::vec(-5i64..=5, n), -20i64..=20, 1i64..=7, -20i64..=20, 1i64..=7);
    prop::collection::vec(term, 0..=6).prop_map(move |ts| {
        LaurentPoly::from_terms(
            n,
            ts.into_iter().map(|(e, a, b, c, d)| (Exponents(e), GaussianRational::from_fractions(a, b, c, d))),
        )
    })
}

fn names(n: usize) -> Vec<String> {
    torus_locus::parser::default_variable_names(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn format_then_parse_is_identity(p in (1usize..=4).prop_flat_map(arb_poly)) {
        let vars = names(p.nvars());
        let text = format_poly_with(&p, &vars);
        let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
        prop_assert_eq!(parse_with(&text, &refs).unwrap(), p);
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[zw0-9i+*^()/ .-]{0,40}") {
        let src = ExprSource::new(text, &["z", "w"]).unwrap();
        if let Err(e) = parse_poly(&src) {
            prop_assert!(e.position <= src.text.chars().count());
        }
    }

    #[test]
    fn products_parse_like_products(p in arb_poly(2), q in arb_poly(2)) {
        let vars = names(2);
        let text = format!("({})*({})", format_poly_with(&p, &vars), format_poly_with(&q, &vars));
        prop_assert_eq!(parse_with(&text, &["z", "w"]).unwrap(), &p * &q);
    }
}

#[test]
fn errors_report_positions() {
    let e = parse_with("z + * w", &["z", "w"]).unwrap_err();
    assert_eq!(e.position, 4);
    let e = parse_with("z + q", &["z", "w"]).unwrap_err();
    assert_eq!(e.position, 4);
    assert!(parse_with("", &["z", "w"]).is_err());
    assert!(parse_with("(z + 1)^-1", &["z", "w"]).is_err());
    assert_eq!(parse_with("z^-2*w", &["z", "w"]).unwrap(), parse_with("w*z^(-2)", &["z", "w"]).unwrap());
}
