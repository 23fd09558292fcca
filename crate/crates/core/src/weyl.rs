//! Weyl geometry: the Weyl connection, colon derivative, length curvature,
//! gauge transformations with weight bookkeeping, and the Weyl scalar
//! curvature identity.
//!
//! Convention notes, pinned empirically by the identity checks:
//! the Weyl covector for the conformal chain is w = -2 d log(beta), and the
//! Weyl scalar curvature is the scalar curvature of the Weyl connection
//! itself (not the Riemannian curvature of a rescaled metric).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::expr::{diff, equiv, Equiv, Expr};
use crate::riemann::{christoffel, covariant_deriv, riemann, ricci, Connection, ConnectionKind};
use crate::tensor::{raise_index, Chart, Metric, TensorError, TensorField, Variance};

/// A metric paired with a Weyl covector and a gauge-weight table.
#[derive(Debug, Clone)]
pub struct WeylStructure {
    pub g: Metric,
    pub w: TensorField,
    pub weights: BTreeMap<String, i64>,
}

pub fn default_weights() -> BTreeMap<String, i64> {
    BTreeMap::from([
        ("g_dd".to_string(), 2),
        ("g_uu".to_string(), -2),
        ("sqrt_g".to_string(), 4),
        ("Gamma_hat".to_string(), 0),
        ("B".to_string(), 1),
        ("R_hat".to_string(), -2),
    ])
}

impl WeylStructure {
    pub fn new(g: Metric, w: TensorField) -> Result<WeylStructure, TensorError> {
        assert_eq!(w.rank(), 1);
        if w.variance[0] != Variance::Down {
            return Err(TensorError::VarianceMismatch {
                slot: 0,
                found: w.variance[0],
                expected: Variance::Down,
            });
        }
        Ok(WeylStructure {
            g,
            w,
            weights: default_weights(),
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.g.chart
    }

    /// The Weyl connection, always recomputed from the current (g, w).
    pub fn gamma_hat(&self) -> Result<Connection, TensorError> {
        weyl_connection(&self.g, &self.w)
    }

    /// Weyl covariant derivative (colon derivative).
    pub fn colon_deriv(&self, t: &TensorField) -> Result<TensorField, TensorError> {
        covariant_deriv(t, &self.gamma_hat()?)
    }

    /// |w|^2 = g^{mu nu} w_mu w_nu.
    pub fn w_norm_sq(&self) -> Result<Expr, TensorError> {
        let inv = self.g.inverse()?;
        let d = self.g.dim();
        let mut acc = Expr::zero();
        for m in 0..d {
            for n in 0..d {
                acc = acc.add(&inv.get(&[m, n]).mul(self.w.get(&[m])).mul(self.w.get(&[n])));
            }
        }
        Ok(acc)
    }

    /// Riemannian divergence nabla_lambda w^lambda.
    pub fn w_divergence(&self) -> Result<Expr, TensorError> {
        let conn = christoffel(&self.g)?;
        let w_up = raise_index(&self.w, 0, &self.g)?;
        let grad = covariant_deriv(&w_up, &conn)?;
        let d = self.g.dim();
        let mut acc = Expr::zero();
        for l in 0..d {
            acc = acc.add(grad.get(&[l, l]));
        }
        Ok(acc)
    }

    /// Scalar curvature of the Weyl connection, contracted with g.
    pub fn scalar_curvature(&self) -> Result<Expr, TensorError> {
        let conn = self.gamma_hat()?;
        let ric = ricci(&riemann(&conn));
        let inv = self.g.inverse()?;
        let d = self.g.dim();
        let mut acc = Expr::zero();
        for s in 0..d {
            for n in 0..d {
                acc = acc.add(&inv.get(&[s, n]).mul(ric.get(&[s, n])));
            }
        }
        Ok(acc)
    }
}

/// Gamma-hat^l_{mn} = Gamma^l_{mn} + g_{mn} w^l - delta^l_n w_m - delta^l_m w_n.
pub fn weyl_connection(g: &Metric, w: &TensorField) -> Result<Connection, TensorError> {
    let base = christoffel(g)?;
    let w_up = raise_index(w, 0, g)?;
    let d = g.dim();
    let mut comps = TensorField::zeros(
        g.chart.clone(),
        vec![Variance::Up, Variance::Down, Variance::Down],
    );
    for l in 0..d {
        for m in 0..d {
            for n in 0..d {
                let mut acc = base.get(l, m, n).clone();
                acc = acc.add(&g.component(m, n).mul(w_up.get(&[l])));
                if l == n {
                    acc = acc.sub(w.get(&[m]));
                }
                if l == m {
                    acc = acc.sub(w.get(&[n]));
                }
                comps.set(&[l, m, n], acc);
            }
        }
    }
    Connection::new(g.chart.clone(), ConnectionKind::Weyl, comps)
}

/// Length curvature W_{mu nu} = d_nu w_mu - d_mu w_nu.
pub fn length_curvature(w: &TensorField) -> TensorField {
    let d = w.dim();
    let dw: Vec<TensorField> = (0..d).map(|k| w.partial_deriv(k)).collect();
    let mut out = TensorField::zeros(w.chart.clone(), vec![Variance::Down, Variance::Down]);
    for m in 0..d {
        for n in 0..d {
            out.set(&[m, n], dw[n].get(&[m]).sub(dw[m].get(&[n])));
        }
    }
    out
}

pub fn is_integrable(w: &TensorField) -> bool {
    length_curvature(w).is_zero()
}

/// Gradient covector of a scalar potential.
pub fn gradient(chart: &Arc<Chart>, potential: &Expr) -> TensorField {
    let mut w = TensorField::zeros(chart.clone(), vec![Variance::Down]);
    for (i, c) in chart.coords.iter().enumerate() {
        w.set(&[i], diff(potential, c, &chart.fields));
    }
    w
}

/// Local Weyl gauge transformation: g -> e^{2 lambda} g, w -> w + d lambda.
/// The weight table is carried over unchanged.
pub fn gauge_transform(ws: &WeylStructure, lambda: &Expr) -> Result<WeylStructure, TensorError> {
    let factor = Expr::apply(crate::expr::Func::Exp, lambda.scale_int(2));
    let g_new = ws.g.g.map(|c| c.mul(&factor));
    let g_new = Metric::new(g_new, &ws.g.sample)?;
    let w_new = ws.w.add(&gradient(ws.chart(), lambda));
    Ok(WeylStructure {
        g: g_new,
        w: w_new,
        weights: ws.weights.clone(),
    })
}

/// Scale a named quantity by its gauge weight: q -> e^{n lambda} q.
/// None when the quantity has no declared weight.
pub fn gauge_scale(
    ws: &WeylStructure,
    name: &str,
    value: &Expr,
    lambda: &Expr,
) -> Option<Expr> {
    let n = *ws.weights.get(name)?;
    let factor = Expr::apply(crate::expr::Func::Exp, lambda.scale_int(n));
    Some(value.mul(&factor))
}

/// Outcome of the Weyl scalar-curvature identity check in dim 4:
/// R-hat = R + 6 div(w) - 6 |w|^2.
///
/// The relative sign is forced: with the connection of `weyl_connection`
/// (pinned by the inverse-metric colon-derivative identity and by gauge
/// invariance) and the Ricci convention pinned by the 2-sphere anchor, the
/// |w|^2 term comes out negative for any covector. Equivalently this is the
/// printed identity read with the opposite sign convention for w.
#[derive(Debug, Clone)]
pub struct IdentityOutcome {
    pub lhs: Expr,
    pub rhs: Expr,
    pub verdict: Equiv,
}

pub fn verify_weyl_scalar_identity(
    ws: &WeylStructure,
    wrong_sign_control: bool,
) -> Result<IdentityOutcome, TensorError> {
    let lhs = ws.scalar_curvature()?;
    let r = crate::riemann::scalar_curvature(&ws.g)?;
    let norm_term = ws.w_norm_sq()?.scale_int(6);
    let mut rhs = r.add(&ws.w_divergence()?.scale_int(6));
    rhs = if wrong_sign_control {
        rhs.add(&norm_term)
    } else {
        rhs.sub(&norm_term)
    };
    let verdict = equiv(&lhs, &rhs);
    Ok(IdentityOutcome { lhs, rhs, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, Fields, NumBindings};

    fn p(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    fn sphere_with_fields(fields: Fields) -> Metric {
        let chart = Chart::new(vec!["theta".into(), "phi".into()], fields).unwrap();
        let mut g = TensorField::zeros(chart, vec![Variance::Down, Variance::Down]);
        g.set(&[0, 0], Expr::one());
        g.set(&[1, 1], p("sin(theta)^2"));
        Metric::new(g, &NumBindings::new()).unwrap()
    }

    fn symbolic_w(chart: &Arc<Chart>) -> TensorField {
        let mut w = TensorField::zeros(chart.clone(), vec![Variance::Down]);
        for i in 0..chart.dim() {
            w.set(&[i], Expr::symbol(format!("wc{i}")));
        }
        w
    }

    fn w_fields(coords: &[&str]) -> Fields {
        let mut f = Fields::empty();
        for i in 0..coords.len() {
            f.declare(
                format!("wc{i}"),
                coords.iter().map(|s| s.to_string()).collect(),
            );
        }
        f
    }

    #[test]
    fn zero_w_reduces_to_levi_civita() {
        let g = sphere_with_fields(Fields::empty());
        let w = TensorField::zeros(g.chart.clone(), vec![Variance::Down]);
        let hat = weyl_connection(&g, &w).unwrap();
        let base = christoffel(&g).unwrap();
        assert_eq!(hat.components(), base.components());
    }

    #[test]
    fn flat_metric_weyl_connection_components() {
        let fields = w_fields(&["x", "y"]);
        let chart = Chart::new(vec!["x".into(), "y".into()], fields).unwrap();
        let mut g = TensorField::zeros(chart.clone(), vec![Variance::Down, Variance::Down]);
        g.set(&[0, 0], Expr::one());
        g.set(&[1, 1], Expr::one());
        let g = Metric::new(g, &NumBindings::new()).unwrap();
        let w = symbolic_w(&chart);
        let hat = weyl_connection(&g, &w).unwrap();
        // Gamma-hat^0_{00} = w^0 - 2 w_0 = -w_0 on the flat metric
        assert_eq!(hat.get(0, 0, 0), &p("-wc0"));
        // Gamma-hat^0_{11} = g_{11} w^0 = w_0
        assert_eq!(hat.get(0, 1, 1), &p("wc0"));
        // Gamma-hat^0_{01} = -w_1
        assert_eq!(hat.get(0, 0, 1), &p("-wc1"));
    }

    #[test]
    fn colon_derivative_of_inverse_metric() {
        // g^{mu nu}_{: lambda} = -2 g^{mu nu} w_lambda with fully symbolic w
        let g = sphere_with_fields(w_fields(&["theta", "phi"]));
        let w = symbolic_w(&g.chart);
        let ws = WeylStructure::new(g, w).unwrap();
        let inv = ws.g.inverse().unwrap();
        let lhs = ws.colon_deriv(&inv).unwrap();
        for idx in lhs.indices() {
            let want = inv
                .get(&[idx[0], idx[1]])
                .mul(ws.w.get(&[idx[2]]))
                .scale_int(-2);
            assert_eq!(lhs.get(&idx), &want, "at {idx:?}");
        }
    }

    #[test]
    fn colon_reduces_to_semicolon_when_w_vanishes() {
        let g = sphere_with_fields(Fields::empty());
        let w = TensorField::zeros(g.chart.clone(), vec![Variance::Down]);
        let ws = WeylStructure::new(g, w).unwrap();
        let nabla_g = ws.colon_deriv(&ws.g.g.clone()).unwrap();
        assert!(nabla_g.is_zero());
    }

    #[test]
    fn gradient_w_is_integrable() {
        let mut fields = Fields::empty();
        fields.declare("beta", vec!["x".into(), "y".into()]);
        let chart = Chart::new(vec!["x".into(), "y".into()], fields).unwrap();
        for pot in [
            "x^2*y",
            "sin(x)*cos(y)",
            "exp(2*x)+y",
            "log(beta)",
            "-2*log(beta)",
            "sqrt(x+y)",
        ] {
            let w = gradient(&chart, &p(pot));
            assert!(is_integrable(&w), "potential {pot}");
        }
    }

    #[test]
    fn linear_shear_w_is_not_integrable() {
        let chart = Chart::new(vec!["x".into(), "y".into()], Fields::empty()).unwrap();
        let mut w = TensorField::zeros(chart, vec![Variance::Down]);
        w.set(&[1], p("k*x"));
        let curv = length_curvature(&w);
        assert_eq!(curv.get(&[0, 1]), &p("-k"));
        assert_eq!(curv.get(&[1, 0]), &p("k"));
        assert!(!is_integrable(&w));
    }

    fn flat4_with(fields: Fields) -> Metric {
        let chart = Chart::new(
            vec!["t".into(), "x".into(), "y".into(), "z".into()],
            fields,
        )
        .unwrap();
        let mut g = TensorField::zeros(chart, vec![Variance::Down, Variance::Down]);
        g.set(&[0, 0], Expr::integer(-1));
        for i in 1..4 {
            g.set(&[i, i], Expr::one());
        }
        Metric::new(g, &NumBindings::new()).unwrap()
    }

    fn gauge_fields() -> Fields {
        let coords: Vec<String> = ["t", "x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let mut f = Fields::empty();
        f.declare("lam", coords.clone());
        for i in 0..4 {
            f.declare(format!("wc{i}"), coords.clone());
        }
        f
    }

    #[test]
    fn gauge_identity_and_group_law() {
        let g = flat4_with(gauge_fields());
        let ws = WeylStructure::new(g, symbolic_w(&sphere_chart_of(&flat4_with(gauge_fields())))).unwrap();
        let id = gauge_transform(&ws, &Expr::zero()).unwrap();
        assert_eq!(id.g.g.components(), ws.g.g.components());
        assert_eq!(id.w.components(), ws.w.components());
    }

    fn sphere_chart_of(m: &Metric) -> Arc<Chart> {
        m.chart.clone()
    }

    #[test]
    fn gauge_transform_weights_and_invariance() {
        let g = flat4_with(gauge_fields());
        let chart = g.chart.clone();
        let ws = WeylStructure::new(g, symbolic_w(&chart)).unwrap();
        let lambda = Expr::symbol("lam");
        let t = gauge_transform(&ws, &lambda).unwrap();
        // sqrt(-g) scales with weight 4 in dim 4
        let sq = ws.g.determinant().neg().sqrt();
        let sq_t = t.g.determinant().neg().sqrt();
        assert_eq!(sq_t, sq.mul(&p("exp(4*lam)")));
        // Gamma-hat is gauge invariant
        let hat = ws.gamma_hat().unwrap();
        let hat_t = t.gamma_hat().unwrap();
        assert_eq!(hat_t.components(), hat.components());
        // group law
        let mut f2 = gauge_fields();
        f2.declare("mu", chart.coords.clone());
        let two = gauge_transform(&gauge_transform(&ws, &Expr::symbol("lam")).unwrap(), &Expr::symbol("mu")).unwrap();
        let once = gauge_transform(&ws, &p("lam+mu")).unwrap();
        assert_eq!(two.g.g.components(), once.g.g.components());
        assert_eq!(two.w.components(), once.w.components());
    }

    #[test]
    fn weyl_scalar_identity_flat4() {
        let g = flat4_with(gauge_fields());
        let chart = g.chart.clone();
        let ws = WeylStructure::new(g, symbolic_w(&chart)).unwrap();
        let out = verify_weyl_scalar_identity(&ws, false).unwrap();
        assert_eq!(out.verdict, Equiv::Equal, "lhs {} rhs {}", out.lhs, out.rhs);
    }

    #[test]
    fn weyl_scalar_identity_sign_flip_fails() {
        let g = flat4_with(gauge_fields());
        let chart = g.chart.clone();
        let ws = WeylStructure::new(g, symbolic_w(&chart)).unwrap();
        let out = verify_weyl_scalar_identity(&ws, true).unwrap();
        assert!(matches!(out.verdict, Equiv::Unequal { .. }));
    }

    #[test]
    fn gauge_weight_of_scalar_curvature() {
        let g = flat4_with(gauge_fields());
        let chart = g.chart.clone();
        let ws = WeylStructure::new(g, symbolic_w(&chart)).unwrap();
        let lambda = Expr::symbol("lam");
        let t = gauge_transform(&ws, &lambda).unwrap();
        let r_hat_t = t.scalar_curvature().unwrap();
        let scaled = gauge_scale(&ws, "R_hat", &ws.scalar_curvature().unwrap(), &lambda).unwrap();
        assert!(r_hat_t.sub(&scaled).is_zero(), "R_hat weight -2 violated");
    }
}
