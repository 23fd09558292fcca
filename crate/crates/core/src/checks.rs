//! The full verification pipeline behind `verify-paper`.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::actions::{
    self, assemble_cgr, cgr_i1, cgr_i2, dirac_integrand, drop_lambda_lm, match_actions,
    rosen_integrand, substitute_w_form, Generator, MatchResult,
};
use crate::catalog;
use crate::expr::{parse_expr, Equiv, Expr};
use crate::holonomy::{
    holonomy_defect, length_transport, transport_with_metric, LoopPath,
};
use crate::report::{Report, Status};
use crate::riemann::christoffel;
use crate::scenario::Scenario;
use crate::tensor::{Chart, Metric, TensorField, Variance};
use crate::weyl::{
    gauge_scale, gauge_transform, gradient, is_integrable, length_curvature,
    verify_weyl_scalar_identity, WeylStructure,
};

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Use the wrong-sign w convention; the scalar identity and I1 checks
    /// then fail (negative control).
    pub flip_w_sign: bool,
    /// Restrict to the given check ids.
    pub only: Option<BTreeSet<String>>,
}

pub const CHECK_IDS: [&str; 13] = [
    "compat",
    "colon",
    "integrability",
    "gauge",
    "scalar-identity",
    "reduction",
    "compose",
    "i1",
    "i2",
    "sigma-match",
    "transport",
    "defect",
    "length-law",
];

fn symbolic_w_names(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("wc{i}")).collect()
}

/// Chart, metric, and fully symbolic covector w for a catalog entry.
fn with_symbolic_w(s: &Scenario) -> (Arc<Chart>, Metric, TensorField) {
    let extra = symbolic_w_names(s.dim);
    let chart = s.chart_with_extra_fields(&extra).expect("catalog chart");
    let g = s.metric_on(chart.clone()).expect("catalog metric");
    let mut w = TensorField::zeros(chart.clone(), vec![Variance::Down]);
    for (i, name) in extra.iter().enumerate() {
        w.set(&[i], Expr::symbol(name));
    }
    (chart, g, w)
}

fn p(src: &str) -> Expr {
    parse_expr(src).expect("builtin expression")
}

fn check_compat() -> (Status, String) {
    for name in catalog::NAMES {
        let s = catalog::load(name).expect("catalog");
        let g = s.metric().expect("catalog metric");
        let conn = christoffel(&g).expect("christoffel");
        let grad = crate::riemann::covariant_deriv(&g.g, &conn).expect("covariant derivative");
        if !grad.is_zero() {
            return (Status::Fail, format!("covariant derivative of g nonzero on {name}"));
        }
    }
    (Status::Pass, "covariant derivative of g vanishes on all 7 catalog metrics".into())
}

/// The inverse-metric colon-derivative identity on one scenario with fully
/// symbolic w.
pub fn colon_identity_on(s: &Scenario) -> (Status, String) {
    let (_, g, w) = with_symbolic_w(s);
    let ws = WeylStructure::new(g, w).expect("weyl structure");
    let inv = ws.g.inverse().expect("inverse");
    let cd = match ws.colon_deriv(&inv) {
        Ok(t) => t,
        Err(e) => return (Status::Fail, format!("{e}")),
    };
    let d = ws.g.dim();
    for m in 0..d {
        for n in 0..d {
            for l in 0..d {
                let expected = inv.get(&[m, n]).mul(ws.w.get(&[l])).scale_int(-2);
                if !cd.get(&[m, n, l]).sub(&expected).is_zero() {
                    return (
                        Status::Fail,
                        format!("colon derivative mismatch at ({m},{n};{l})"),
                    );
                }
            }
        }
    }
    (Status::Pass, "colon derivative of g^(mu nu) equals -2*g^(mu nu)*w_lambda".into())
}

fn check_colon() -> (Status, String) {
    for name in catalog::NAMES {
        let s = catalog::load(name).expect("catalog");
        let (st, detail) = colon_identity_on(&s);
        if st != Status::Pass {
            return (st, format!("{name}: {detail}"));
        }
    }
    (Status::Pass, "inverse-metric colon derivative equals -2*g^(mu nu)*w_lambda on all catalog metrics".into())
}

fn check_integrability() -> (Status, String) {
    let mut fields = crate::expr::Fields::empty();
    fields.declare("beta", vec!["x".into(), "y".into()]);
    let chart = Chart::new(vec!["x".into(), "y".into()], fields).expect("chart");
    let corpus = [
        "x",
        "y",
        "x*y",
        "x^2*y",
        "sin(x)",
        "cos(x)*y",
        "exp(x)*y",
        "log(x)",
        "x^3 + y^2",
        "sqrt(x)",
        "c*log(beta)",
    ];
    for src in corpus {
        let w = gradient(&chart, &p(src));
        if !is_integrable(&w) {
            return (Status::Fail, format!("gradient of {src} not curl-free"));
        }
    }
    // shear covector (0, k*x): length curvature is antisym(-k)
    let mut w = TensorField::zeros(chart.clone(), vec![Variance::Down]);
    w.set(&[1], p("k*x"));
    let lc = length_curvature(&w);
    let ok = lc.get(&[0, 1]).sub(&p("-k")).is_zero()
        && lc.get(&[1, 0]).sub(&p("k")).is_zero()
        && lc.get(&[0, 0]).is_zero()
        && lc.get(&[1, 1]).is_zero();
    if !ok {
        return (Status::Fail, "shear covector length curvature mismatch".into());
    }
    (
        Status::Pass,
        format!("{} gradient potentials curl-free; shear case antisymmetric", corpus.len()),
    )
}

/// The full gauge-law suite on one scenario with symbolic lambda and w.
pub fn gauge_suite_on(s: &Scenario) -> (Status, String) {
    {
        let name = "scenario";
        let mut extra = symbolic_w_names(s.dim);
        extra.push("lam".into());
        let chart = s.chart_with_extra_fields(&extra).expect("chart");
        let g = s.metric_on(chart.clone()).expect("metric");
        let mut w = TensorField::zeros(chart.clone(), vec![Variance::Down]);
        for i in 0..s.dim {
            w.set(&[i], Expr::symbol(format!("wc{i}")));
        }
        let ws = WeylStructure::new(g, w).expect("weyl structure");
        let lambda = Expr::symbol("lam");
        let t = match gauge_transform(&ws, &lambda) {
            Ok(t) => t,
            Err(e) => return (Status::Fail, format!("{name}: {e}")),
        };
        // metric scaling
        let scale = p("exp(2*lam)");
        for idx in ws.g.g.indices() {
            if !t.g.g.get(&idx).sub(&ws.g.g.get(&idx).mul(&scale)).is_zero() {
                return (Status::Fail, format!("{name}: metric scaling violated"));
            }
        }
        // w shift
        for (i, c) in ws.chart().coords.clone().iter().enumerate() {
            let expected = ws
                .w
                .get(&[i])
                .add(&crate::expr::diff(&lambda, c, &ws.chart().fields));
            if !t.w.get(&[i]).sub(&expected).is_zero() {
                return (Status::Fail, format!("{name}: w shift violated"));
            }
        }
        // Gamma-hat invariance
        let hat = ws.gamma_hat().expect("gamma hat");
        let hat_t = t.gamma_hat().expect("gamma hat");
        if hat.components().sub(hat_t.components()).components().iter().any(|e| !e.is_zero()) {
            return (Status::Fail, format!("{name}: Gamma-hat not gauge invariant"));
        }
        // sqrt(-g) weight 4
        let sq = ws.g.determinant().neg().sqrt();
        let sq_t = t.g.determinant().neg().sqrt();
        if !sq_t.sub(&sq.mul(&p("exp(4*lam)"))).is_zero() {
            return (Status::Fail, format!("{name}: sqrt(-g) weight violated"));
        }
        // R-hat weight -2
        let r_hat = ws.scalar_curvature().expect("scalar curvature");
        let r_hat_t = t.scalar_curvature().expect("scalar curvature");
        let scaled = gauge_scale(&ws, "R_hat", &r_hat, &lambda).expect("weight table");
        if !r_hat_t.sub(&scaled).is_zero() {
            return (Status::Fail, format!("{name}: R-hat weight violated"));
        }
    }
    (
        Status::Pass,
        "metric scaling, w shift, Gamma-hat invariance, sqrt(-g) and R-hat weights".into(),
    )
}

fn check_gauge() -> (Status, String) {
    for name in ["flat4", "conf4"] {
        let s = catalog::load(name).expect("catalog");
        let (st, detail) = gauge_suite_on(&s);
        if st != Status::Pass {
            return (st, format!("{name}: {detail}"));
        }
    }
    (
        Status::Pass,
        "metric scaling, w shift, Gamma-hat invariance, sqrt(-g) and R-hat weights on flat4 and conf4".into(),
    )
}

/// The scalar-curvature identity on one scenario with fully symbolic w.
pub fn scalar_identity_on(s: &Scenario, flip: bool) -> (Status, String) {
    let (_, g, w) = with_symbolic_w(s);
    let ws = WeylStructure::new(g, w).expect("weyl structure");
    let out = match verify_weyl_scalar_identity(&ws, flip) {
        Ok(o) => o,
        Err(e) => return (Status::Fail, format!("{e}")),
    };
    let st = Status::from(&out.verdict);
    let detail = match out.verdict {
        Equiv::Equal => "EQUAL".to_string(),
        Equiv::LikelyEqual => "LIKELY_EQUAL".to_string(),
        Equiv::Unequal { .. } => "UNEQUAL".to_string(),
    };
    (st, detail)
}

fn check_scalar_identity(flip: bool) -> (Status, String) {
    let mut details = Vec::new();
    let mut status = Status::Pass;
    for name in ["conf4", "m4"] {
        let s = catalog::load(name).expect("catalog");
        let (st, verdict) = scalar_identity_on(&s, flip);
        details.push(format!("{name} {verdict}"));
        status = match (status, st) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::LikelyPass, _) | (_, Status::LikelyPass) => Status::LikelyPass,
            _ => Status::Pass,
        };
    }
    (status, details.join(", "))
}

fn check_reduction() -> (Status, String) {
    let sigma = Expr::symbol("sigma");
    let reduced = substitute_w_form(&drop_lambda_lm(&dirac_integrand(&sigma)), true, false);
    let ok = reduced.coeff(Generator::B2R).sub(&Expr::integer(-1)).is_zero()
        && reduced.coeff(Generator::Db2).sub(&p("sigma+6")).is_zero()
        && reduced.coeff(Generator::B2W2).is_zero()
        && reduced.coeff(Generator::BwDb).is_zero()
        && reduced.coeff(Generator::W2).is_zero();
    if ok {
        (Status::Pass, "reduces to -B2R + (sigma+6)*DB2; 4*sigma terms cancel exactly".into())
    } else {
        (Status::Fail, format!("reduction gave {reduced}"))
    }
}

fn check_compose() -> (Status, String) {
    let mut fields = crate::expr::Fields::empty();
    let coords: Vec<String> = ["t", "x", "y", "z"].map(String::from).to_vec();
    fields.declare("beta", coords.clone());
    let chart = Chart::new(coords, fields).expect("chart");
    let beta = Expr::symbol("beta");
    let w = gradient(&chart, &p("-2*log(beta)"));
    let zero = actions::compose_w(&w, &Expr::integer(2), &beta);
    if !zero.is_zero() {
        return (Status::Fail, "c = 2 composition did not vanish".into());
    }
    let same = actions::compose_w(&w, &Expr::zero(), &beta);
    if same.components() != w.components() {
        return (Status::Fail, "c = 0 composition changed w".into());
    }
    let generic = actions::compose_w(&w, &p("c"), &beta);
    if !is_integrable(&generic) {
        return (Status::Fail, "generic composition not curl-free".into());
    }
    // (c-2) * d log(beta) componentwise
    let expected = gradient(&chart, &p("(c-2)*log(beta)"));
    if generic.components() != expected.components() {
        return (Status::Fail, "generic composition != (c-2)*dlog(beta)".into());
    }
    (Status::Pass, "W = w + c*dlog(beta): vanishes at c = 2, curl-free for symbolic c".into())
}

fn check_i1(flip: bool) -> (Status, String) {
    let i1 = cgr_i1(flip);
    let residuals = [
        Generator::Db2,
        Generator::B2W2,
        Generator::BwDb,
        Generator::B2DivW,
        Generator::B2Rhat,
    ];
    let clean = residuals.iter().all(|g| i1.coeff(*g).is_zero());
    let r_ok = i1.coeff(Generator::B2R).sub(&p("1/m^2")).is_zero();
    if clean && r_ok && i1.ledger.len() == 1 {
        (Status::Pass, "I1 = (1/m^2)*B2R, all DB2-family residuals cancel, one divergence discarded".into())
    } else {
        (Status::Fail, format!("I1 residual: {i1}"))
    }
}

fn check_i2() -> (Status, String) {
    let i2 = cgr_i2(&Expr::symbol("alpha"));
    let ok = i2.coeff(Generator::Db2).sub(&p("-4*(alpha-3/2)/m^2")).is_zero()
        && i2.support() == vec![Generator::Db2]
        && cgr_i2(&p("3/2")).is_zero();
    if ok {
        (Status::Pass, "I2 = -(4*(alpha-3/2)/m^2)*DB2; vanishes at alpha = 3/2".into())
    } else {
        (Status::Fail, format!("I2 gave {i2}"))
    }
}

fn check_sigma_match() -> (Status, String) {
    let alpha = Expr::symbol("alpha");
    let general = match match_actions(&assemble_cgr(&alpha), &rosen_integrand(&Expr::symbol("sigma"))) {
        MatchResult::Solution { sigma } => sigma,
        MatchResult::NoSolution { reason } => return (Status::Fail, reason),
    };
    if !general.sub(&p("-4*alpha")).is_zero() {
        return (Status::Fail, format!("matching gave sigma = {general}"));
    }
    match match_actions(&assemble_cgr(&Expr::zero()), &rosen_integrand(&Expr::symbol("sigma"))) {
        MatchResult::Solution { sigma } if sigma.is_zero() => {}
        other => return (Status::Fail, format!("alpha = 0 case gave {other:?}")),
    }
    (Status::Pass, "sigma = -4*alpha exactly; alpha = 0 recovers sigma = 0".into())
}

fn check_transport() -> (Status, String) {
    let s = catalog::load("sphere2").expect("catalog");
    let g = s.metric().expect("metric");
    let conn = christoffel(&g).expect("christoffel");
    let path = s.loop_path(None).expect("loop");
    let out = match transport_with_metric(&conn, Some(&g), &path, &[1.0, 0.0]) {
        Ok(o) => o,
        Err(e) => return (Status::Fail, format!("{e}")),
    };
    let theta0 = std::f64::consts::PI / 3.0;
    let expected = 2.0 * std::f64::consts::PI * (1.0 - theta0.cos());
    let ang = out.rotation_angle.unwrap_or(f64::NAN);
    let drift = (out.final_length - out.initial_length).abs();
    if (ang - expected).abs() < 1e-6 && drift <= 1e-9 {
        (
            Status::Pass,
            format!("latitude holonomy angle {ang:.9} (expected {expected:.9}), length drift {drift:.2e}"),
        )
    } else {
        (
            Status::Fail,
            format!("angle {ang} vs {expected}, drift {drift:.2e}"),
        )
    }
}

fn check_defect() -> (Status, String) {
    let s = catalog::load("sphere2").expect("catalog");
    let g = s.metric().expect("metric");
    let conn = christoffel(&g).expect("christoffel");
    let corner = [1.0, 0.5];
    let b0 = [0.7, -0.2];
    let mut errs = Vec::new();
    for eps in [2e-2, 1e-2, 5e-3] {
        let out = match holonomy_defect(&conn, &corner, eps, (0, 1), &b0, 512) {
            Ok(o) => o,
            Err(e) => return (Status::Fail, format!("{e}")),
        };
        let err: f64 = out
            .delta
            .iter()
            .zip(&out.predicted)
            .map(|(d, q)| (d - q).abs())
            .fold(0.0, f64::max);
        errs.push(err / (eps * eps));
    }
    // err/eps^2 must vanish with measured order >= 2.8 in the residual
    let order = (errs[0] / errs[2]).log2() / 2.0 + 2.0;
    if errs[0] > errs[1] && errs[1] > errs[2] && order >= 2.8 {
        (Status::Pass, format!("defect matches curvature prediction, measured order {order:.2}"))
    } else {
        (Status::Fail, format!("normalized errors {errs:?}, order {order:.2}"))
    }
}

fn check_length_law() -> (Status, String) {
    let s = catalog::load("flat2").expect("catalog");
    let chart = s.chart().expect("chart");
    let square = |steps| {
        LoopPath::polygon(
            chart.clone(),
            &[
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
            steps,
        )
        .expect("loop")
    };
    let mut w = TensorField::zeros(chart.clone(), vec![Variance::Down]);
    w.set(&[1], p("0.1*x"));
    let ws = WeylStructure::new(s.metric().expect("metric"), w).expect("weyl structure");
    let out = match length_transport(&ws, &square(4096), 1.0) {
        Ok(o) => o,
        Err(e) => return (Status::Fail, format!("{e}")),
    };
    let expected = 0.1f64.exp();
    if (out.final_length - expected).abs() >= 1e-8 {
        return (
            Status::Fail,
            format!("square-loop ratio {} vs e^0.1 = {expected}", out.final_length),
        );
    }
    // integrable covector: ratio exactly 1
    let wi = gradient(&chart, &p("x^2*y"));
    let wsi = WeylStructure::new(s.metric().expect("metric"), wi).expect("weyl structure");
    let outi = length_transport(&wsi, &square(2048), 1.0).expect("transport");
    if (outi.final_length / outi.initial_length - 1.0).abs() >= 1e-9 {
        return (Status::Fail, format!("integrable ratio {}", outi.final_length));
    }
    // first-order prediction residual scales O(k^2)
    let resid = |k: f64| {
        let mut wk = TensorField::zeros(chart.clone(), vec![Variance::Down]);
        wk.set(&[1], Expr::from_f64(k).mul(&p("x")));
        let wsk = WeylStructure::new(s.metric().expect("metric"), wk).expect("weyl structure");
        let o = length_transport(&wsk, &square(1024), 1.0).expect("transport");
        (o.final_length - o.predicted_first_order).abs()
    };
    let ratio = resid(0.1) / resid(0.05);
    if !(3.5..4.5).contains(&ratio) {
        return (Status::Fail, format!("first-order residual ratio {ratio:.3}"));
    }
    (
        Status::Pass,
        format!(
            "square-loop factor {:.9} = e^0.1; integrable loop invariant; first-order residual quadratic (ratio {ratio:.2})",
            out.final_length
        ),
    )
}

pub fn verify_paper(opts: &VerifyOptions) -> Report {
    let mut report = Report::new();
    let wanted = |id: &str| match &opts.only {
        Some(set) => set.contains(id),
        None => true,
    };
    for id in CHECK_IDS {
        if !wanted(id) {
            continue;
        }
        let (status, detail) = match id {
            "compat" => check_compat(),
            "colon" => check_colon(),
            "integrability" => check_integrability(),
            "gauge" => check_gauge(),
            "scalar-identity" => check_scalar_identity(opts.flip_w_sign),
            "reduction" => check_reduction(),
            "compose" => check_compose(),
            "i1" => check_i1(opts.flip_w_sign),
            "i2" => check_i2(),
            "sigma-match" => check_sigma_match(),
            "transport" => check_transport(),
            "defect" => check_defect(),
            "length-law" => check_length_law(),
            _ => unreachable!(),
        };
        report.push(id, status, detail);
    }
    report
}
