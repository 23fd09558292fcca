use super::*;
use crate::expr::calculus::{diff, substitute, Bindings};
use crate::expr::equiv::{equiv, Equiv};
use crate::expr::eval::{eval_numeric, EvalError, NumBindings};

fn p(s: &str) -> Expr {
    parse_expr(s).unwrap()
}

#[test]
fn parse_basics() {
    assert_eq!(p("sin(theta)^2"), p("sin(theta)*sin(theta)"));
    assert_eq!(p("1/2 + 1/2"), Expr::one());
    assert_eq!(p("2^3"), Expr::integer(8));
    assert_eq!(p("x^-2"), Expr::one().div(&p("x*x")));
    assert_eq!(p("0.25"), Expr::rational(1, 4));
    assert_eq!(p("-x^2"), p("x^2").neg());
    assert_eq!(p("1 - 2"), Expr::integer(-1));
}

#[test]
fn parse_errors_carry_offsets() {
    match parse_expr("1 + ") {
        Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
        other => panic!("expected syntax error, got {:?}", other),
    }
    match parse_expr("foo(x)") {
        Err(ParseError::UnknownFunction { name, .. }) => assert_eq!(name, "foo"),
        other => panic!("expected unknown function, got {:?}", other),
    }
}

#[test]
fn pythagorean_rewrite() {
    assert_eq!(p("cos(x)^2 + sin(x)^2"), Expr::one());
    assert_eq!(p("exp(psi)*exp(-psi)"), Expr::one());
    assert!(p("(a+b)^2 - a^2 - 2*a*b - b^2").is_zero());
}

#[test]
fn double_angle_is_canonical() {
    assert_eq!(equiv(&p("cos(2*x)"), &p("1 - 2*sin(x)^2")), Equiv::Equal);
    assert_eq!(
        equiv(&p("sin(2*x)"), &p("2*sin(x)*cos(x)")),
        Equiv::Equal
    );
}

#[test]
fn sqrt_rules() {
    assert_eq!(p("sqrt(4)"), Expr::integer(2));
    assert_eq!(p("sqrt(x^2)"), p("x"));
    assert_eq!(p("sqrt(x)*sqrt(x)"), p("x"));
    assert_eq!(p("sqrt(exp(2*psi))"), p("exp(psi)"));
    assert_eq!(p("sqrt(4*x^2*y)"), p("2*x*sqrt(y)"));
}

#[test]
fn log_exp_inverses() {
    assert_eq!(p("log(exp(x))"), p("x"));
    assert_eq!(p("exp(log(x))"), p("x"));
    assert_eq!(p("log(1)"), Expr::zero());
    assert_eq!(p("log(sqrt(x))"), p("log(x)/2"));
}

#[test]
fn diff_basics() {
    let f = Fields::empty();
    assert_eq!(
        diff(&p("sin(theta)^2"), "theta", &f),
        p("2*sin(theta)*cos(theta)")
    );
    assert_eq!(diff(&p("log(beta)"), "beta", &f), p("1/beta"));
    assert_eq!(diff(&p("x^3 + 2*x"), "x", &f), p("3*x^2 + 2"));
    assert_eq!(diff(&p("1/x"), "x", &f), p("-1/x^2"));
    assert_eq!(diff(&p("sqrt(x)"), "x", &f), p("1/(2*sqrt(x))"));
    assert_eq!(diff(&p("y"), "x", &f), Expr::zero());
}

#[test]
fn diff_field_symbols() {
    let mut f = Fields::empty();
    f.declare("beta", vec!["x".into(), "y".into()]);
    // d/dx (c*log(beta)) = c * (d_beta_x / beta)
    let e = p("c*log(beta)");
    assert_eq!(diff(&e, "x", &f), p("c*d_beta_x/beta"));
    // mixed partials commute
    let first = diff(&p("beta^2"), "x", &f);
    let xy = diff(&first, "y", &f);
    let yx = diff(&diff(&p("beta^2"), "y", &f), "x", &f);
    assert_eq!(xy, yx);
}

#[test]
fn diff_linearity() {
    let f = Fields::empty();
    let e1 = p("sin(x)*x");
    let e2 = p("exp(x)+x^2");
    let lhs = diff(&p("3*sin(x)*x + exp(x)+x^2"), "x", &f);
    let rhs = diff(&e1, "x", &f).scale_int(3).add(&diff(&e2, "x", &f));
    assert_eq!(lhs, rhs);
}

#[test]
fn substitute_examples() {
    let b = Bindings::new().bind("phi", p("beta^2/m^2"));
    assert_eq!(substitute(&p("phi"), &b), p("beta^2/m^2"));
    assert_eq!(substitute(&p("x+y"), &Bindings::new()), p("x+y"));
    let mut f = Fields::empty();
    f.declare("beta", vec!["x".into()]);
    let w = diff(&p("-2*log(beta)"), "x", &f);
    assert_eq!(w, p("-2*d_beta_x/beta"));
}

#[test]
fn eval_examples() {
    let mut b = NumBindings::new();
    b.insert("x".into(), 0.7);
    let v = eval_numeric(&p("sin(x)^2+cos(x)^2"), &b).unwrap();
    assert!((v - 1.0).abs() < 1e-15);

    b.insert("x".into(), 0.0);
    assert!(matches!(
        eval_numeric(&p("1/x"), &b),
        Err(EvalError::Domain { .. })
    ));
}

#[test]
fn eval_exp_matches_series_oracle() {
    // independent Taylor-series oracle for exp
    fn exp_series(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..40 {
            term *= x / n as f64;
            sum += term;
        }
        sum
    }
    let mut b = NumBindings::new();
    b.insert("k".into(), 0.1);
    b.insert("A".into(), 1.0);
    let v = eval_numeric(&p("exp(k*A)"), &b).unwrap();
    assert!((v - exp_series(0.1)).abs() < 1e-14);
    assert!((v - 1.10517091808).abs() < 1e-10);
}

#[test]
fn equiv_verdicts() {
    assert_eq!(equiv(&p("cos(2*x)"), &p("1-2*sin(x)^2")), Equiv::Equal);
    match equiv(&p("x"), &p("x+1")) {
        Equiv::Unequal { lhs, rhs, .. } => assert!((lhs - rhs).abs() > 0.5),
        other => panic!("expected Unequal, got {:?}", other),
    }
}

#[test]
fn finite_difference_consistency() {
    let f = Fields::empty();
    let corpus = [
        "sin(x)*cos(x) + x^3",
        "exp(x)*x - log(x)",
        "sqrt(x) + 1/(x+2)",
        "sin(x^2)",
        "x^2*exp(2*x)",
    ];
    for src in corpus {
        let e = p(src);
        let de = diff(&e, "x", &f);
        for x0 in [0.4, 0.9, 1.3] {
            let mut b = NumBindings::new();
            let h = 1e-5;
            b.insert("x".into(), x0 + h);
            let fp = eval_numeric(&e, &b).unwrap();
            b.insert("x".into(), x0 - h);
            let fm = eval_numeric(&e, &b).unwrap();
            b.insert("x".into(), x0);
            let d = eval_numeric(&de, &b).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            assert!(
                (d - fd).abs() <= 1e-6 * (1.0 + d.abs()),
                "{src} at {x0}: {d} vs {fd}"
            );
        }
    }
}

#[test]
fn evaluation_homomorphism() {
    // simplify is the identity on canonical values; evaluating any
    // algebraically equal pair built by different routes must agree.
    let pairs = [
        ("(x+y)^2", "x^2+2*x*y+y^2"),
        ("sin(x+y)", "sin(x)*cos(y)+cos(x)*sin(y)"),
        ("(x^2-1)/(x-1)*(x-1)", "x^2-1"),
    ];
    for (a, bsrc) in pairs {
        let ea = p(a);
        let eb = p(bsrc);
        let mut b = NumBindings::new();
        b.insert("x".into(), 0.8);
        b.insert("y".into(), 1.1);
        let va = eval_numeric(&ea, &b).unwrap();
        let vb = eval_numeric(&eb, &b).unwrap();
        assert!((va - vb).abs() <= 1e-12 * (1.0 + va.abs()));
    }
}

#[test]
fn roundtrip_print_parse() {
    let samples = [
        "x^2 + 2*x*y + 1/3",
        "sin(theta)^2*cos(phi)",
        "exp(2*lam)*x - 1/(x+1)",
        "sqrt(x+y)",
        "-beta^2*r + (sigma+6)*dbeta2",
        "x/(y^2 - 1)",
        "2/3*x^5",
    ];
    for s in samples {
        let e = p(s);
        let printed = format!("{}", e);
        let back = parse_expr(&printed).unwrap_or_else(|err| {
            panic!("reparse of `{printed}` failed: {err}");
        });
        assert_eq!(back, e, "round trip of {s} via {printed}");
    }
}

#[test]
fn idempotence() {
    for s in ["cos(x)^2+sin(x)^2", "(a+b)^2", "sqrt(4*x^2)"] {
        let e = p(s);
        assert_eq!(simplify(&simplify(&e)), e);
    }
}
