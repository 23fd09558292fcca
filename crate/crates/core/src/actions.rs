//! Formal action-integrand algebra over a fixed generator set.
//!
//! Scalars like beta^2*R or beta*w^lambda*d_lambda(beta) are tracked as
//! opaque generators with exact rational-function coefficients in the theory
//! parameters (sigma, alpha, Lambda, m, c). The tensor layer independently
//! certifies every rewrite rule used here on concrete metrics.

use std::collections::BTreeMap;
use std::fmt;

use crate::expr::Expr;

/// Fixed generator set for the integrands under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    /// beta^2 * R (Riemannian scalar curvature term)
    B2R,
    /// beta^2 * R_hat (Weyl-connection scalar curvature term)
    B2Rhat,
    /// (d beta)^2
    Db2,
    /// beta^2 * div(w)
    B2DivW,
    /// beta * w^lambda * d_lambda(beta)
    BwDb,
    /// beta^2 * |w|^2
    B2W2,
    /// beta^4
    B4,
    /// W^{lambda mu} W_{lambda mu}
    W2,
    /// matter Lagrangian L_M
    Lm,
    /// (d phi_hat)^2 / phi_hat^2 * phi_hat
    DPsi2,
}

impl Generator {
    pub const ALL: [Generator; 10] = [
        Generator::B2R,
        Generator::B2Rhat,
        Generator::Db2,
        Generator::B2DivW,
        Generator::BwDb,
        Generator::B2W2,
        Generator::B4,
        Generator::W2,
        Generator::Lm,
        Generator::DPsi2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::B2R => "B2R",
            Generator::B2Rhat => "B2RHAT",
            Generator::Db2 => "DB2",
            Generator::B2DivW => "B2DIVW",
            Generator::BwDb => "BWDB",
            Generator::B2W2 => "B2W2",
            Generator::B4 => "B4",
            Generator::W2 => "W2",
            Generator::Lm => "LM",
            Generator::DPsi2 => "DPSI2",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Volume-density tag carried by an integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    SqrtG,
    SqrtGHat,
}

/// A total-divergence term discarded during integration by parts. The only
/// move used is div(beta^2 w), recorded with its coefficient.
#[derive(Debug, Clone)]
pub struct LedgerEntry {
    pub coeff: Expr,
    pub label: &'static str,
}

/// Linear combination of generators with exact symbolic coefficients.
#[derive(Debug, Clone)]
pub struct Integrand {
    terms: BTreeMap<Generator, Expr>,
    pub density: Density,
    pub ledger: Vec<LedgerEntry>,
}

impl Integrand {
    pub fn new(density: Density) -> Self {
        Integrand {
            terms: BTreeMap::new(),
            density,
            ledger: Vec::new(),
        }
    }

    pub fn coeff(&self, g: Generator) -> Expr {
        self.terms.get(&g).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn add_term(&mut self, g: Generator, c: &Expr) {
        let next = self.coeff(g).add(c);
        if next.is_zero() {
            self.terms.remove(&g);
        } else {
            self.terms.insert(g, next);
        }
    }

    pub fn set_term(&mut self, g: Generator, c: Expr) {
        if c.is_zero() {
            self.terms.remove(&g);
        } else {
            self.terms.insert(g, c);
        }
    }

    /// Generators with a nonzero coefficient, in fixed order.
    pub fn support(&self) -> Vec<Generator> {
        self.terms.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Expr) -> Integrand {
        let mut out = Integrand::new(self.density);
        out.ledger = self.ledger.clone();
        for (g, k) in &self.terms {
            out.set_term(*g, k.mul(c));
        }
        out
    }

    pub fn sub(&self, other: &Integrand) -> Integrand {
        let mut out = self.clone();
        for (g, k) in &other.terms {
            out.add_term(*g, &k.neg());
        }
        out
    }
}

impl fmt::Display for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (g, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({})*{}", c, g)?;
        }
        Ok(())
    }
}

fn inv_m2() -> Expr {
    Expr::symbol("m").powi(-2)
}

/// The unadulterated Weyl-Dirac integrand:
/// W^2 - beta^2 R + sigma beta^2 |w|^2 + (sigma+6)(d beta)^2
///   + 2 sigma beta w^l d_l beta + 2 Lambda beta^4 + L_M,
/// with density sqrt(-g). sigma = 0 gives the Dirac choice (no Proca terms).
pub fn dirac_integrand(sigma: &Expr) -> Integrand {
    let mut i = Integrand::new(Density::SqrtG);
    i.set_term(Generator::W2, Expr::one());
    i.set_term(Generator::B2R, Expr::integer(-1));
    i.set_term(Generator::B2W2, sigma.clone());
    i.set_term(Generator::Db2, sigma.add(&Expr::integer(6)));
    i.set_term(Generator::BwDb, sigma.scale_int(2));
    i.set_term(Generator::B4, Expr::symbol("Lambda").scale_int(2));
    i.set_term(Generator::Lm, Expr::one());
    i
}

/// Drop the cosmological and matter terms (B4, LM) where the derivation
/// path omits them.
pub fn drop_lambda_lm(i: &Integrand) -> Integrand {
    let mut out = i.clone();
    out.set_term(Generator::B4, Expr::zero());
    out.set_term(Generator::Lm, Expr::zero());
    out
}

/// Apply the integrable w-form rules: with w = -2 d(log beta),
/// beta^2|w|^2 = 4 (d beta)^2 and beta w^l d_l beta = -2 (d beta)^2, and
/// W_{mu nu} = 0 when `integrable`. `flipped_w` models the wrong-sign
/// covector w = +2 d(log beta) (negative control): it flips the BwDb rule
/// only, since |w|^2 is quadratic.
pub fn substitute_w_form(i: &Integrand, integrable: bool, flipped_w: bool) -> Integrand {
    let mut out = i.clone();
    let b2w2 = out.coeff(Generator::B2W2);
    let bwdb = out.coeff(Generator::BwDb);
    out.set_term(Generator::B2W2, Expr::zero());
    out.set_term(Generator::BwDb, Expr::zero());
    let bwdb_factor = if flipped_w { 2 } else { -2 };
    out.add_term(Generator::Db2, &b2w2.scale_int(4));
    out.add_term(Generator::Db2, &bwdb.scale_int(bwdb_factor));
    if integrable {
        out.set_term(Generator::W2, Expr::zero());
    }
    out
}

/// Integration by parts: each c * beta^2 div(w) becomes -2c * beta w^l d_l
/// beta plus a discarded divergence c * div(beta^2 w), appended to the
/// ledger.
pub fn integrate_by_parts(i: &Integrand) -> Integrand {
    let mut out = i.clone();
    let c = out.coeff(Generator::B2DivW);
    if c.is_zero() {
        return out;
    }
    out.set_term(Generator::B2DivW, Expr::zero());
    out.add_term(Generator::BwDb, &c.scale_int(-2));
    out.ledger.push(LedgerEntry {
        coeff: c,
        label: "div(beta^2*w)",
    });
    out
}

/// Expand each c * beta^2 R_hat into c * (beta^2 R - 6 beta^2 div(w)
/// + 6 beta^2 |w|^2), the generator-level scalar identity.
pub fn expand_rhat(i: &Integrand) -> Integrand {
    let mut out = i.clone();
    let c = out.coeff(Generator::B2Rhat);
    if c.is_zero() {
        return out;
    }
    out.set_term(Generator::B2Rhat, Expr::zero());
    out.add_term(Generator::B2R, &c);
    out.add_term(Generator::B2DivW, &c.scale_int(-6));
    out.add_term(Generator::B2W2, &c.scale_int(6));
    out
}

/// The first conformal-GR integral: phi_hat R_hat sqrt(-g_hat), density-
/// converted to (beta^2/m^2) R_hat sqrt(-g), then reduced. Returns
/// (1/m^2) beta^2 R with one divergence family in the ledger. With
/// `flipped_w` the (d beta)^2 terms fail to cancel.
pub fn cgr_i1(flipped_w: bool) -> Integrand {
    let mut start = Integrand::new(Density::SqrtG);
    start.set_term(Generator::B2Rhat, inv_m2());
    let expanded = expand_rhat(&start);
    let after_ibp = integrate_by_parts(&expanded);
    substitute_w_form(&after_ibp, true, flipped_w)
}

/// The second conformal-GR integral: -gamma (d phi_hat)^2 / phi_hat^2 *
/// phi_hat with gamma = alpha - 3/2 and phi = beta^2/m^2 reduces to
/// -(4 gamma / m^2) (d beta)^2.
pub fn cgr_i2(alpha: &Expr) -> Integrand {
    let gamma = alpha.sub(&Expr::rational(3, 2));
    let mut i = Integrand::new(Density::SqrtG);
    i.set_term(Generator::Db2, gamma.scale_int(-4).mul(&inv_m2()));
    i
}

/// I1 + I2: (1/m^2)(beta^2 R - 4 (alpha - 3/2) (d beta)^2).
pub fn assemble_cgr(alpha: &Expr) -> Integrand {
    let i1 = cgr_i1(false);
    let i2 = cgr_i2(alpha);
    let mut out = i1.clone();
    for g in i2.support() {
        out.add_term(g, &i2.coeff(g));
    }
    out
}

/// Kinetic part of the Rosen / integrable form:
/// -beta^2 R + (sigma + 6)(d beta)^2.
pub fn rosen_integrand(sigma: &Expr) -> Integrand {
    let mut i = Integrand::new(Density::SqrtG);
    i.set_term(Generator::B2R, Expr::integer(-1));
    i.set_term(Generator::Db2, sigma.add(&Expr::integer(6)));
    i
}

/// Result of matching two integrands on the {B2R, DB2} span.
#[derive(Debug, Clone)]
pub enum MatchResult {
    /// Exact symbolic assignment for sigma.
    Solution { sigma: Expr },
    /// The spans differ (a generator outside {B2R, DB2} is present, the R
    /// anchor is missing, or the sigma dependence is degenerate).
    NoSolution { reason: String },
}

/// Equate the (d beta)^2 coefficients of the two integrands after scaling
/// each so the beta^2 R coefficient has unit magnitude (overall 1/m^2
/// factors and the global sign of the R term are quotiented out; the two
/// forms carry R with opposite signs and are compared as equivalent
/// actions). Solves for the symbol `sigma`, which must appear linearly in
/// `rosen`'s (d beta)^2 coefficient.
pub fn match_actions(cgr: &Integrand, rosen: &Integrand) -> MatchResult {
    for i in [cgr, rosen] {
        for g in i.support() {
            if g != Generator::B2R && g != Generator::Db2 {
                return MatchResult::NoSolution {
                    reason: format!("generator {} outside the matching span", g),
                };
            }
        }
    }
    let cr = cgr.coeff(Generator::B2R);
    let rr = rosen.coeff(Generator::B2R);
    if cr.is_zero() || rr.is_zero() {
        return MatchResult::NoSolution {
            reason: "missing beta^2*R anchor term".into(),
        };
    }
    // scale so |coeff(B2R)| = 1 on both sides
    let target = match cgr.coeff(Generator::Db2).checked_div(&cr) {
        Some(e) => e,
        None => {
            return MatchResult::NoSolution {
                reason: "degenerate R coefficient".into(),
            }
        }
    };
    let rosen_db2 = match rosen.coeff(Generator::Db2).checked_div(&rr.neg()) {
        Some(e) => e,
        None => {
            return MatchResult::NoSolution {
                reason: "degenerate R coefficient".into(),
            }
        }
    };
    // rosen_db2 must be linear in sigma: a*sigma + b
    let subst = |v: Expr| {
        let b = crate::expr::Bindings::new().bind("sigma", v);
        crate::expr::substitute(&rosen_db2, &b)
    };
    let b = subst(Expr::zero());
    let a = subst(Expr::one()).sub(&b);
    if a.is_zero() || a.symbols().contains("sigma") {
        return MatchResult::NoSolution {
            reason: "sigma dependence is not linear".into(),
        };
    }
    let quad_probe = subst(Expr::integer(2)).sub(&b).sub(&a.scale_int(2));
    if !quad_probe.is_zero() {
        return MatchResult::NoSolution {
            reason: "sigma dependence is not linear".into(),
        };
    }
    match target.sub(&b).checked_div(&a) {
        Some(sigma) => MatchResult::Solution { sigma },
        None => MatchResult::NoSolution {
            reason: "degenerate sigma coefficient".into(),
        },
    }
}

/// The composed covector W = w + b with b_mu = c * d_mu(beta)/beta. For
/// w = -2 d(log beta) this is (c-2) d(log beta); it is curl-free for any c
/// when w is a gradient.
pub fn compose_w(
    w: &crate::tensor::TensorField,
    c: &Expr,
    beta: &Expr,
) -> crate::tensor::TensorField {
    let chart = w.chart.clone();
    let log_beta = Expr::apply(crate::expr::Func::Log, beta.clone());
    let mut out = w.clone();
    for (k, coord) in chart.coords.iter().enumerate() {
        let b_mu = crate::expr::diff(&log_beta, coord, &chart.fields).mul(c);
        out.set(&[k], w.get(&[k]).add(&b_mu));
    }
    out
}
