use super::*;
use crate::interval::{Interval, RoundingPolicy};
use crate::rational::Rational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn parse_sqrt_is_half_power_of_sum() {
    let e = parse("sqrt(2+2*cos(phi1))").unwrap();
    let Node::Pow(b, p) = e.node() else { panic!("expected a power, got {e}") };
    assert_eq!(*p, q(1, 2));
    let Node::Add(xs) = b.node() else { panic!("expected a sum") };
    assert_eq!(xs[0], Expr::int(2));
    assert_eq!(xs[1], Expr::mul(vec![Expr::int(2), Expr::cos(Expr::var("phi1"))]));
}

#[test]
fn parse_zero_and_constant_products() {
    assert_eq!(parse("0").unwrap(), Expr::int(0));
    let e = parse("sin(pi/2)").unwrap();
    assert_eq!(e, Expr::sin(Expr::mul(vec![Expr::ratio(1, 2), Expr::pi()])));
    assert_eq!(parse("-3/4").unwrap(), Expr::ratio(-3, 4));
    assert_eq!(parse("1.25e-1").unwrap(), Expr::ratio(1, 8));
}

#[test]
fn parse_errors_report_positions() {
    match parse("1 + * 2") {
        Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 4),
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse("x^y").is_err());
    assert!(parse("sin x").is_err());
    assert!(parse("(x").is_err());
    assert!(parse("x)").is_err());
}

#[test]
fn render_parse_round_trip() {
    for s in [
        "sqrt(2+2*cos(phi1))",
        "-2*cos(a)*cos(b)*cos(c-d)+2-2*sin(a)*sin(b)",
        "x^(-3/2)*(1-y^2)^(1/3)/(2+x)",
        "arccos((15.67-2)/18)*(-2)",
        "exp(-x)+ln(2)-tan(y)*cot(y)+arctan(x)+arccot(x)+arcsin(x/3)",
        "(a*b)^(1/2)+(-3)^(1/3)",
    ] {
        let e = parse(s).unwrap();
        let back = parse(&e.to_string()).unwrap();
        assert_eq!(back, e, "{s} rendered as {e}");
    }
}

#[test]
fn derivative_of_distance() {
    let e = parse("sqrt(2+2*cos(phi1))").unwrap();
    let d = differentiate(&e, "phi1");
    let expected = parse("-sin(phi1)/sqrt(2+2*cos(phi1))").unwrap();
    assert_eq!(normalize(&d), normalize(&expected));
    assert_eq!(differentiate(&e, "phi2"), Expr::int(0));
}

#[test]
fn derivatives_match_finite_differences() {
    let env = |v: &str| match v {
        "x" => 0.37,
        "y" => -0.81,
        _ => unreachable!(),
    };
    for s in [
        "sin(x)*cos(y)^2",
        "tan(x)+cot(x+1)",
        "arcsin(x/2)+arccos(y/3)+arctan(x*y)+arccot(x-y)",
        "exp(x*y)*ln(2+x)",
        "(1+x^2)^(1/3)/(2-y)",
    ] {
        let e = parse(s).unwrap();
        for v in ["x", "y"] {
            let d = differentiate(&e, v).eval_f64(&env);
            let h = 1e-6;
            let plus = e.eval_f64(&|w| if w == v { env(w) + h } else { env(w) });
            let minus = e.eval_f64(&|w| if w == v { env(w) - h } else { env(w) });
            let fd = (plus - minus) / (2.0 * h);
            assert!((d - fd).abs() <= 1e-6 * (1.0 + fd.abs()), "{s} d/d{v}: {d} vs {fd}");
        }
    }
}

#[test]
fn normalize_collects_like_terms_and_fractions() {
    let x = Expr::var("x");
    assert_eq!(normalize(&Expr::add(vec![x.clone(), x.clone()])), Expr::mul(vec![Expr::int(2), x.clone()]));
    assert_eq!(normalize(&parse("x*x/x^3").unwrap()), parse("x^(-1)").unwrap());
    assert_eq!(normalize(&parse("x-x").unwrap()), Expr::int(0));

    let lhs = normalize(&parse("a/s+b/s").unwrap());
    let rhs = normalize(&parse("(a+b)/s").unwrap());
    assert_eq!(lhs, rhs);
    let Node::Mul(fs) = lhs.node() else { panic!("expected a product, got {lhs}") };
    assert_eq!(fs.len(), 2);
}

#[test]
fn expand_distributes_outside_radicands() {
    let e = expand(&parse("(x+1)*(x-1)").unwrap());
    assert_eq!(e, normalize(&parse("x^2-1").unwrap()));
    let e = expand(&parse("(x+y)^2-x^2-y^2").unwrap());
    assert_eq!(e, normalize(&parse("2*x*y").unwrap()));
    // Radicands and function arguments are left alone.
    let r = parse("sqrt((x+1)*(x+2))*sin((x+1)*y)").unwrap();
    assert_eq!(expand(&r), normalize(&r));
}

#[test]
fn normalize_and_expand_preserve_values() {
    let env = |v: &str| match v {
        "a" => 0.3,
        "b" => -1.7,
        "s" => 2.2,
        _ => 0.9,
    };
    for s in
        ["a/s+b/s-(a*b)/s^2+(a+s)*(b-s)/s", "sqrt(s)*s/sqrt(s)^3+(a+b)^3", "sin(a)*(cos(b)+sin(b))^2-(a-b)^2/(s*s)"]
    {
        let e = parse(s).unwrap();
        let v = e.eval_f64(&env);
        for n in [normalize(&e), expand(&e)] {
            let w = n.eval_f64(&env);
            assert!((v - w).abs() <= 1e-12 * (1.0 + v.abs()), "{s}: {v} vs {w} ({n})");
        }
    }
}

#[test]
fn program_matches_direct_evaluation() {
    let exprs: Vec<Expr> = [
        "sqrt(2+2*cos(x))+sqrt(2-2*cos(x)*cos(y))",
        "sin(x)*cos(y)-cos(x)*sin(y)",
        "(2+2*cos(x))^(-1/2)*sin(x)",
        "pi*x-y^2",
    ]
    .iter()
    .map(|s| parse(s).unwrap())
    .collect();
    let prog = Program::compile(&exprs, &["x", "y"]).unwrap();
    assert_eq!(prog.root_count(), exprs.len());
    let total: usize = exprs.iter().map(|e| e.dag_size()).sum();
    assert!(prog.len() < total, "shared subtrees are interned");

    let p = RoundingPolicy::default();
    let vals = vec![
        Interval::closed(Rational::from_decimal(3, -1), Rational::from_decimal(4, -1)),
        Interval::closed(Rational::from_decimal(-12, -1), Rational::from_decimal(-11, -1)),
    ];
    let vb = VarBox::from_parts(&["x", "y"], vals.clone());
    let mut ev = prog.evaluate(&vals, p);
    for (k, e) in exprs.iter().enumerate() {
        assert_eq!(ev.root(k).unwrap(), eval_interval(e, &vb, &p).unwrap());
    }
}

#[test]
fn evaluation_errors() {
    let p = RoundingPolicy::default();
    let vb = VarBox::from_parts(&["x"], vec![Interval::ints(-2, -1)]);
    assert!(matches!(eval_interval(&parse("sqrt(x)").unwrap(), &vb, &p), Err(ExprError::Interval(_))));
    assert!(matches!(eval_interval(&parse("y").unwrap(), &vb, &p), Err(ExprError::UnboundVariable(_))));
    assert!(Program::compile(&[parse("y").unwrap()], &["x"]).is_err());
}

#[test]
fn substitute_and_free_vars() {
    let e = parse("x*y+sin(x)").unwrap();
    assert_eq!(e.free_vars(), vec!["x".to_string(), "y".to_string()]);
    let s = e.substitute(&|v| (v == "x").then(|| Expr::int(0)));
    assert_eq!(s, Expr::sin(Expr::int(0)));
}
