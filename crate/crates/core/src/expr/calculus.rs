//! Differentiation and substitution.

use std::collections::BTreeMap;

use num::{BigRational, One};

use super::atom::{Atom, Func, Monomial};
use super::fields::Fields;
use super::poly::{normalize_factors, Poly};
use super::Expr;

/// Simultaneous symbol-to-expression substitution map.
#[derive(Clone, Default, Debug)]
pub struct Bindings {
    map: BTreeMap<String, Expr>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn bind(mut self, name: impl Into<String>, e: Expr) -> Bindings {
        self.map.insert(name.into(), e);
        self
    }

    pub fn insert(&mut self, name: impl Into<String>, e: Expr) {
        self.map.insert(name.into(), e);
    }

    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.map.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Exact partial derivative of `e` with respect to the symbol `x`.
/// Declared fields differentiate to formal derivative symbols; everything
/// else not equal to `x` is treated as constant.
pub fn diff(e: &Expr, x: &str, fields: &Fields) -> Expr {
    let num = Expr::from_parts(e.num_poly().clone(), Poly::one());
    let den = Expr::from_parts(e.den_poly().clone(), Poly::one());
    let dn = diff_poly(e.num_poly(), x, fields);
    if e.den_poly().is_one() {
        return dn;
    }
    let dd = diff_poly(e.den_poly(), x, fields);
    (dn.mul(&den).sub(&num.mul(&dd))).div(&den.mul(&den))
}

fn diff_poly(p: &Poly, x: &str, fields: &Fields) -> Expr {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        acc = acc.add(&diff_monomial(m, c, x, fields));
    }
    acc
}

fn diff_monomial(m: &Monomial, c: &BigRational, x: &str, fields: &Fields) -> Expr {
    let mut acc = Expr::zero();
    for (i, (a, k)) in m.0.iter().enumerate() {
        let da = diff_atom(a, x, fields);
        if da.is_zero() {
            continue;
        }
        // c * k * a' * a^(k-1) * rest
        let mut factors: Vec<(Atom, u32)> = Vec::with_capacity(m.0.len());
        for (j, (b, kb)) in m.0.iter().enumerate() {
            let kk = if i == j { kb - 1 } else { *kb };
            if kk > 0 {
                factors.push((b.clone(), kk));
            }
        }
        let coeff = c * BigRational::from_integer((*k).into());
        let rest = Expr::from_parts(normalize_factors(coeff, factors), Poly::one());
        acc = acc.add(&rest.mul(&da));
    }
    acc
}

fn diff_atom(a: &Atom, x: &str, fields: &Fields) -> Expr {
    match a {
        Atom::Sym(s) => {
            if s == x {
                Expr::one()
            } else {
                match fields.derivative_symbol(s, x) {
                    Some(d) => Expr::symbol(d),
                    None => Expr::zero(),
                }
            }
        }
        Atom::Fun(f, u) => {
            let du = diff(u, x, fields);
            if du.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Sin => Expr::apply(Func::Cos, (**u).clone()),
                Func::Cos => Expr::apply(Func::Sin, (**u).clone()).neg(),
                Func::Exp => Expr::apply(Func::Exp, (**u).clone()),
                Func::Log => (**u).clone().recip(),
            };
            outer.mul(&du)
        }
        Atom::Pow(b, q) => {
            let base = Expr::from_parts((**b).clone(), Poly::one());
            let db = diff_poly(b, x, fields);
            if db.is_zero() {
                return Expr::zero();
            }
            let qm1 = q - BigRational::one();
            Expr::rational_from(q.clone())
                .mul(&base.pow_rational(&qm1))
                .mul(&db)
        }
    }
}

/// Simultaneous substitution followed by canonicalization. Unbound symbols
/// pass through. Panics if a denominator collapses to symbolic zero.
pub fn substitute(e: &Expr, b: &Bindings) -> Expr {
    if b.is_empty() {
        return e.clone();
    }
    let num = substitute_poly(e.num_poly(), b);
    if e.den_poly().is_one() {
        return num;
    }
    let den = substitute_poly(e.den_poly(), b);
    num.div(&den)
}

fn substitute_poly(p: &Poly, b: &Bindings) -> Expr {
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut term = Expr::rational_from(c.clone());
        for (a, k) in &m.0 {
            term = term.mul(&substitute_atom(a, b).powi(*k as i64));
        }
        acc = acc.add(&term);
    }
    acc
}

fn substitute_atom(a: &Atom, b: &Bindings) -> Expr {
    match a {
        Atom::Sym(s) => b
            .get(s)
            .cloned()
            .unwrap_or_else(|| Expr::symbol(s.clone())),
        Atom::Fun(f, u) => Expr::apply(*f, substitute(u, b)),
        Atom::Pow(base, q) => substitute_poly(base, b).pow_rational(q),
    }
}
