use jetcomplex_cli::system_file::{parse_system, print_system};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = String> {
    (-40i64..=40, 1i64..=9).prop_map(|(p, q)| format!("{p}/{q}"))
}

proptest! {
    #[test]
    fn print_then_parse_keeps_coefficients(
        eqs in proptest::collection::vec(proptest::collection::vec((0usize..2, 0usize..3, rational()), 1..5), 1..4)
    ) {
        let equations: Vec<String> = eqs
            .iter()
            .map(|terms| {
                let ts: Vec<String> = terms
                    .iter()
                    .map(|(u, v, c)| format!(r#"{{"unknown": "u{u}", "variable": "x{v}", "coeff": "{c}"}}"#))
                    .collect();
                format!(r#"{{"terms": [{}]}}"#, ts.join(","))
            })
            .collect();
        let text = format!(
            r#"{{"schema_version": "1", "variables": ["x0", "x1", "x2"], "unknowns": ["u0", "u1"], "equations": [{}]}}"#,
            equations.join(",")
        );
        // equations whose terms cancel are rejected on both passes alike
        let Ok(sys) = parse_system(&text) else { return Ok(()) };
        let back = parse_system(&print_system(&sys)).unwrap();
        prop_assert_eq!(back.system.coeffs_nested(), sys.system.coeffs_nested());
        prop_assert_eq!(print_system(&back), print_system(&sys));
    }
}
