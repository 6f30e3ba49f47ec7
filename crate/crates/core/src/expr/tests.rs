use super::*;
use proptest::prelude::*;

const EQ16: &str = "ln(1+exp(2*x1))-x1";

#[test]
fn evaluates_closed_form_translator() {
    let e = Expression::parse(EQ16, 1).unwrap();
    assert!((e.eval(&[0.0]).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    let e = Expression::parse("0.5*x1", 1).unwrap();
    assert_eq!(e.eval(&[2.0]).unwrap(), 1.0);
}

#[test]
fn unknown_identifiers_and_arity() {
    assert!(matches!(
        Expression::parse("x3", 2),
        Err(Error::UnknownIdentifier { ref name, line: 1, column: 1 }) if name == "x3"
    ));
    assert!(matches!(Expression::parse("x0", 2), Err(Error::UnknownIdentifier { .. })));
    assert!(matches!(Expression::parse("foo + 1", 2), Err(Error::UnknownIdentifier { .. })));
    assert!(matches!(Expression::parse("exp(x1, x2)", 2), Err(Error::Arity { got: 2, .. })));
    assert!(matches!(Expression::parse("tanh", 2), Err(Error::Arity { got: 0, .. })));
}

#[test]
fn syntax_errors_carry_position() {
    match Expression::parse("1 +\n  * x1", 1) {
        Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
        other => panic!("{other:?}"),
    }
    // implicit multiplication
    assert!(matches!(Expression::parse("2x1", 1), Err(Error::Syntax { .. })));
    assert!(matches!(Expression::parse("x1(x1)", 1), Err(Error::Syntax { .. })));
    assert!(matches!(Expression::parse("(x1", 1), Err(Error::Syntax { .. })));
    assert!(matches!(Expression::parse("x1 $ 2", 1), Err(Error::Syntax { .. })));
}

#[test]
fn precedence_and_associativity() {
    let ev = |s: &str| Expression::parse(s, 2).unwrap().eval(&[2.0, 3.0]).unwrap();
    assert_eq!(ev("1 + 2*3"), 7.0);
    assert_eq!(ev("2^3^2"), 512.0);
    assert_eq!(ev("-x1^2"), -4.0);
    assert_eq!(ev("2^-1"), 0.5);
    assert_eq!(ev("x2 - x1 - 1"), 0.0);
    assert_eq!(ev("x2 / x1 / 3"), 0.5);
    assert_eq!(ev("1e-1 * 10"), 1.0);
    assert!((ev("sech(0) + cosh(0) + sinh(0) + tanh(0) + sqrt(4)") - 4.0).abs() < 1e-15);
}

#[test]
fn lists_split_on_semicolons() {
    let v = Expression::parse_list("ln(1+exp(2*x1))-x1; 0.5*x2;", 2).unwrap();
    assert_eq!(v.len(), 2);
    assert_eq!(v[1].eval(&[0.0, 4.0]).unwrap(), 2.0);
}

#[test]
fn domain_errors_name_the_subexpression() {
    let e = Expression::parse("1 + ln(x1 - 1)", 1).unwrap();
    match e.eval(&[0.5]) {
        Err(Error::Domain { subexpr, .. }) => assert_eq!(subexpr, "ln(x1 - 1.0)"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        Expression::parse("1/x1", 1).unwrap().eval(&[0.0]),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        Expression::parse("sqrt(x1)", 1).unwrap().eval(&[-1.0]),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        Expression::parse("x1^0.5", 1).unwrap().eval(&[-1.0]),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        Expression::parse("exp(x1)", 1).unwrap().eval(&[1000.0]),
        Err(Error::Domain { .. })
    ));
    // sqrt is evaluable at 0 but its jet is not
    let s = Expression::parse("sqrt(x1)", 1).unwrap();
    assert_eq!(s.eval(&[0.0]).unwrap(), 0.0);
    assert!(matches!(analytic_jet(&[s], &[0.0]), Err(Error::Domain { .. })));
    assert_eq!(Expression::parse("(-2)^3", 1).unwrap().eval(&[0.0]).unwrap(), -8.0);
}

#[test]
fn jets_of_closed_form() {
    let u = Expression::parse(EQ16, 2).unwrap();
    let jet = analytic_jet(std::slice::from_ref(&u), &[0.0, 0.0]).unwrap();
    assert!((jet.u(0) - std::f64::consts::LN_2).abs() < 1e-15);
    assert!(jet.du(0, 0).abs() < 1e-15);
    assert!((jet.d2u(0, 0, 0) - 1.0).abs() < 1e-15);
    let jet = analytic_jet(&[u], &[1.0, 0.0]).unwrap();
    assert!((jet.du(0, 0) - 0.761_594_155_955_764_9).abs() < 1e-15);

    let affine = Expression::parse_list("0.5*x1; 0.3*x2", 2).unwrap();
    let jet = analytic_jet(&affine, &[1.5, -2.0]).unwrap();
    for a in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(*jet.d2u(a, i, j), 0.0);
            }
        }
    }
}

#[test]
fn lifted_jet_carries_third_and_fourth_derivatives() {
    // u = x1^2 x2^2: u_112 = 4 x2, u_1122 = 4
    let u = Expression::parse("x1^2*x2^2", 2).unwrap();
    let jet = analytic_jet_lifted(&[u], &[0.5, 1.5]).unwrap();
    let u11 = jet.d2u(0, 0, 0);
    assert!((u11.val - 2.0 * 2.25).abs() < 1e-14);
    assert!((u11.grad[1] - 4.0 * 1.5).abs() < 1e-14);
    assert!((u11.hess_at(1, 1) - 4.0).abs() < 1e-14);
}

fn central_diff_grad(e: &Expression, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let (mut p, mut q) = (x.to_vec(), x.to_vec());
            p[i] += h;
            q[i] -= h;
            (e.eval(&p).unwrap() - e.eval(&q).unwrap()) / (2.0 * h)
        })
        .collect()
}

#[test]
fn gradients_match_central_differences_at_second_order() {
    let fixtures = [
        "ln(1+exp(2*x1))-x1",
        "0.3*x1^3 - x1*x2 + 0.1*x2^2",
        "tanh(x1)*sech(x2) + sqrt(2 + x1^2)",
        "sinh(0.5*x1)/cosh(x2) + 2^x1",
    ];
    let mut rng_state = 0x2545f4914f6cdd1d_u64;
    let mut next = move || {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        (rng_state >> 11) as f64 / (1u64 << 53) as f64 * 3.0 - 1.5
    };
    for src in fixtures {
        let e = Expression::parse(src, 2).unwrap();
        for _ in 0..100 {
            let x = [next(), next()];
            let jet = analytic_jet(std::slice::from_ref(&e), &x).unwrap();
            let err = |h: f64| {
                central_diff_grad(&e, &x, h)
                    .iter()
                    .enumerate()
                    .map(|(i, g)| (g - jet.du(0, i)).abs())
                    .fold(0.0, f64::max)
            };
            let (e1, e2) = (err(1e-2), err(5e-3));
            // O(h^2): halving h cuts the error by ~4, unless already at roundoff
            assert!(e2 < 1e-10 || e1 / e2 > 3.0, "{src} at {x:?}: {e1} {e2}");
        }
    }
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..1000).prop_map(|k| Expr::Num(f64::from(k) / 8.0)),
        (0usize..3).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        let funcs = prop_oneof![
            Just(Func::Exp),
            Just(Func::Ln),
            Just(Func::Sinh),
            Just(Func::Cosh),
            Just(Func::Tanh),
            Just(Func::Sech),
            Just(Func::Sqrt),
        ];
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Pow(Box::new(a), Box::new(b))),
            (funcs, inner).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
        ]
    })
}

proptest! {
    #[test]
    fn printer_round_trips(e in arb_expr()) {
        let printed = e.to_string();
        let reparsed = Expression::parse(&printed, 3).unwrap();
        prop_assert_eq!(reparsed.ast(), &e);
        prop_assert_eq!(reparsed.to_string(), printed);
    }

    #[test]
    fn jet_hessians_are_exactly_symmetric(e in arb_expr(), x in prop::array::uniform3(-2.0f64..2.0)) {
        let ex = Expression::from_expr(e, 3).unwrap();
        if let Ok(jet) = analytic_jet(&[ex], &x) {
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!(jet.d2u(0, i, j).to_bits(), jet.d2u(0, j, i).to_bits());
                }
            }
        }
    }
}
