//! Exact symbolic scalar expressions.
//!
//! The canonical form is a rational function: expanded polynomial numerator
//! and denominator over the rationals, with function applications and
//! fractional powers treated as atoms after their arguments canonicalize.
//! Every constructor and arithmetic operation returns canonical values, so
//! `simplify` is the identity on anything built through this module.

mod atom;
mod calculus;
mod display;
mod equiv;
mod eval;
mod fields;
mod parse;
mod poly;
#[cfg(test)]
mod tests;

pub use atom::{Atom, Func, Monomial};
pub use calculus::{diff, substitute, Bindings};
pub use equiv::{equiv, Equiv};
pub use eval::{eval_numeric, EvalError, NumBindings};
pub use fields::Fields;
pub use parse::{parse_expr, ParseError};
pub use poly::Poly;

use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Expr {
    pub(crate) fn make(num: Poly, den: Poly) -> Expr {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Expr {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        // Cancel the common monomial content.
        let content = num.atom_content().gcd(&den.atom_content());
        let (mut num, mut den) = if content.is_unit() {
            (num, den)
        } else {
            (num.div_monomial(&content), den.div_monomial(&content))
        };
        // Normalize the denominator's leading coefficient to 1.
        let lc = den.leading().unwrap().1.clone();
        if !lc.is_one() {
            let inv = BigRational::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        if !den.is_one() {
            if let Some(q) = num.div_exact(&den) {
                return Expr {
                    num: q,
                    den: Poly::one(),
                };
            }
        }
        Expr { num, den }
    }

    pub fn zero() -> Expr {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Expr {
        Expr {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn integer(n: i64) -> Expr {
        Expr::rational_from(BigRational::from_integer(n.into()))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        assert!(den != 0);
        Expr::rational_from(BigRational::new(num.into(), den.into()))
    }

    /// Exact rational with the same value as a finite f64.
    pub fn from_f64(v: f64) -> Expr {
        Expr::rational_from(BigRational::from_float(v).expect("finite float"))
    }

    pub fn rational_from(r: BigRational) -> Expr {
        Expr {
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }

    pub fn symbol(name: impl Into<String>) -> Expr {
        Expr {
            num: Poly::from_atom(Atom::Sym(name.into())),
            den: Poly::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if !self.den.is_one() {
            return None;
        }
        if self.num.is_zero() {
            None // callers check is_zero first
        } else {
            self.num.as_constant()
        }
    }

    pub(crate) fn num_poly(&self) -> &Poly {
        &self.num
    }

    pub(crate) fn den_poly(&self) -> &Poly {
        &self.den
    }

    pub(crate) fn from_parts(num: Poly, den: Poly) -> Expr {
        Expr::make(num, den)
    }

    fn as_single_atom(&self) -> Option<&Atom> {
        if !self.den.is_one() {
            return None;
        }
        match self.num.terms().collect::<Vec<_>>().as_slice() {
            [(m, c)] if c.is_one() && m.0.len() == 1 && m.0[0].1 == 1 => Some(&m.0[0].0),
            _ => None,
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Expr::make(self.num.add(&other.num), self.den.clone());
        }
        if let Some(q) = other.den.div_exact(&self.den) {
            return Expr::make(self.num.mul(&q).add(&other.num), other.den.clone());
        }
        if let Some(q) = self.den.div_exact(&other.den) {
            return Expr::make(self.num.add(&other.num.mul(&q)), self.den.clone());
        }
        Expr::make(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        Expr::make(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &Expr) -> Expr {
        self.checked_div(other).expect("division by symbolic zero")
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        if other.is_zero() {
            return None;
        }
        Some(Expr::make(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn recip(&self) -> Expr {
        Expr::one().div(self)
    }

    pub fn scale_int(&self, k: i64) -> Expr {
        self.mul(&Expr::integer(k))
    }

    pub fn powi(&self, n: i64) -> Expr {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut acc = Expr::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact rational power, under the positive-branch policy for fractional
    /// exponents: (ab)^q = a^q b^q and (b^p)^q = b^(pq).
    pub fn pow_rational(&self, q: &BigRational) -> Expr {
        if q.is_zero() {
            return Expr::one();
        }
        if q.is_integer() {
            let n: i64 = q.to_integer().try_into().expect("exponent overflow");
            return self.powi(n);
        }
        if q.is_negative() {
            return self.recip().pow_rational(&-q);
        }
        if self.is_zero() {
            return Expr::zero();
        }
        pow_poly(&self.num, q).div(&pow_poly(&self.den, q))
    }

    pub fn sqrt(&self) -> Expr {
        self.pow_rational(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// Apply an elementary function, folding the small closed rule set.
    pub fn apply(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_rational() {
            match f {
                Func::Log if c.is_one() => return Expr::zero(),
                _ => {}
            }
        }
        if arg.is_zero() {
            match f {
                Func::Sin => return Expr::zero(),
                Func::Cos | Func::Exp => return Expr::one(),
                Func::Log => {} // kept formal; numeric eval reports the error
            }
        }
        // Parity normalization for trig.
        if poly::leading_is_negative(&arg.num) {
            match f {
                Func::Sin => return Expr::apply(Func::Sin, arg.neg()).neg(),
                Func::Cos => return Expr::apply(Func::Cos, arg.neg()),
                _ => {}
            }
        }
        // Angle addition and multiple angles, so trig identities share a
        // canonical form in sin/cos of primitive arguments.
        if matches!(f, Func::Sin | Func::Cos) {
            if let Some(e) = expand_trig(f, &arg) {
                return e;
            }
        }
        if let Some(atom) = arg.as_single_atom() {
            match (f, atom) {
                (Func::Exp, Atom::Fun(Func::Log, u)) => return (**u).clone(),
                (Func::Log, Atom::Fun(Func::Exp, u)) => return (**u).clone(),
                (Func::Log, Atom::Pow(b, q)) => {
                    let base = Expr {
                        num: (**b).clone(),
                        den: Poly::one(),
                    };
                    return Expr::apply(Func::Log, base).mul(&Expr::rational_from(q.clone()));
                }
                _ => {}
            }
        }
        Expr {
            num: Poly::from_atom(Atom::Fun(f, Arc::new(arg))),
            den: Poly::one(),
        }
    }

    pub fn tan(arg: Expr) -> Expr {
        Expr::apply(Func::Sin, arg.clone()).div(&Expr::apply(Func::Cos, arg))
    }

    /// All symbol names occurring anywhere in the tree.
    pub fn symbols(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    pub(crate) fn collect_symbols(&self, out: &mut std::collections::BTreeSet<String>) {
        for p in [&self.num, &self.den] {
            collect_poly_symbols(p, out);
        }
    }
}

fn collect_poly_symbols(p: &Poly, out: &mut std::collections::BTreeSet<String>) {
    for (m, _) in p.terms() {
        for (a, _) in &m.0 {
            match a {
                Atom::Sym(s) => {
                    out.insert(s.clone());
                }
                Atom::Fun(_, u) => u.collect_symbols(out),
                Atom::Pow(b, _) => collect_poly_symbols(b, out),
            }
        }
    }
}

/// Rewrite sin/cos of a sum via angle addition, and of an argument with a
/// rational coefficient > 1 via the recursion f((c)u) = f(u + (c-1)u).
/// None when the argument is already primitive.
fn expand_trig(f: Func, arg: &Expr) -> Option<Expr> {
    let terms: Vec<_> = arg.num_poly().terms().collect();
    let (u, v) = if terms.len() >= 2 {
        // split off the leading term
        let (m, c) = terms.last().unwrap();
        let head = Expr::from_parts(
            Poly::from_term((*m).clone(), (*c).clone()),
            arg.den_poly().clone(),
        );
        (head.clone(), arg.sub(&head))
    } else if terms.len() == 1 {
        let c = terms[0].1.clone();
        if c <= BigRational::one() {
            return None;
        }
        let unit = arg.div(&Expr::rational_from(c));
        (unit.clone(), arg.sub(&unit))
    } else {
        return None;
    };
    let (sin_u, cos_u) = (
        Expr::apply(Func::Sin, u.clone()),
        Expr::apply(Func::Cos, u),
    );
    let (sin_v, cos_v) = (
        Expr::apply(Func::Sin, v.clone()),
        Expr::apply(Func::Cos, v),
    );
    Some(match f {
        Func::Sin => sin_u.mul(&cos_v).add(&cos_u.mul(&sin_v)),
        Func::Cos => cos_u.mul(&cos_v).sub(&sin_u.mul(&sin_v)),
        _ => unreachable!(),
    })
}

/// q-th power of a denominator-free polynomial, q positive non-integer.
fn pow_poly(p: &Poly, q: &BigRational) -> Expr {
    debug_assert!(q.is_positive() && !q.is_integer());
    if p.is_zero() {
        return Expr::zero();
    }
    if p.is_one() {
        return Expr::one();
    }
    let terms: Vec<_> = p.terms().collect();
    if terms.len() == 1 {
        let (m, c) = terms[0];
        let mut acc = pow_const(c, q);
        for (a, k) in &m.0 {
            let t = q * BigRational::from_integer((*k).into());
            acc = acc.mul(&pow_atom(a, &t));
        }
        return acc;
    }
    // Factor out the monomial content, then keep the primitive part atomic.
    let content = p.atom_content();
    if !content.is_unit() {
        let rest = p.div_monomial(&content);
        let head = Poly::from_term(content, BigRational::one());
        return pow_poly_wrap(&rest, q).mul(&pow_poly(&head, q));
    }
    pow_poly_wrap(p, q)
}

fn pow_poly_wrap(p: &Poly, q: &BigRational) -> Expr {
    if p.is_one() {
        return Expr::one();
    }
    if let Some(c) = p.as_constant() {
        return pow_const(c, q);
    }
    if p.terms().count() == 1 {
        return pow_poly(p, q);
    }
    Expr {
        num: Poly::from_atom(Atom::Pow(Arc::new(p.clone()), q.clone())),
        den: Poly::one(),
    }
}

fn pow_atom(a: &Atom, t: &BigRational) -> Expr {
    if t.is_integer() {
        let n: i64 = t.to_integer().try_into().expect("exponent overflow");
        debug_assert!(n > 0);
        return Expr {
            num: poly::normalize_factors(BigRational::one(), vec![(a.clone(), n as u32)]),
            den: Poly::one(),
        };
    }
    match a {
        Atom::Fun(Func::Exp, u) => {
            Expr::apply(Func::Exp, (**u).clone().mul(&Expr::rational_from(t.clone())))
        }
        Atom::Pow(b, q) => {
            let total = q * t;
            if total.is_integer() {
                let n: i64 = total.to_integer().try_into().expect("exponent overflow");
                Expr {
                    num: b.powi(n as u32),
                    den: Poly::one(),
                }
            } else {
                pow_poly_wrap(b, &total)
            }
        }
        other => Expr {
            num: Poly::from_atom(Atom::Pow(
                Arc::new(Poly::from_atom(other.clone())),
                t.clone(),
            )),
            den: Poly::one(),
        },
    }
}

/// Exact q-th power of a rational constant when the root is rational,
/// otherwise a formal power atom.
fn pow_const(c: &BigRational, q: &BigRational) -> Expr {
    if c.is_one() {
        return Expr::one();
    }
    let s = q.numer();
    let t = q.denom();
    if let (Ok(t_small), Ok(s_small)) = (u32::try_from(t), i64::try_from(s)) {
        if let (Some(rn), Some(rd)) = (
            exact_root(c.numer(), t_small),
            exact_root(c.denom(), t_small),
        ) {
            return Expr::rational_from(BigRational::new(rn, rd)).powi(s_small);
        }
    }
    Expr {
        num: Poly::from_atom(Atom::Pow(Arc::new(Poly::constant(c.clone())), q.clone())),
        den: Poly::one(),
    }
}

fn exact_root(n: &BigInt, t: u32) -> Option<BigInt> {
    if n.is_negative() {
        if t % 2 == 1 {
            return exact_root(&-n, t).map(|r| -r);
        }
        return None;
    }
    let r = n.nth_root(t);
    if num::pow::pow(r.clone(), t as usize) == *n {
        Some(r)
    } else {
        None
    }
}

macro_rules! expr_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl std::ops::$trait for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$imp(self, rhs)
            }
        }
        impl std::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$imp(&self, &rhs)
            }
        }
    };
}

expr_binop!(Add, add, add);
expr_binop!(Sub, sub, sub);
expr_binop!(Mul, mul, mul);
expr_binop!(Div, div, div);

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

/// Canonicalization entry point. Values built through this module are already
/// canonical, so this is the identity; it exists as the stable public name.
pub fn simplify(e: &Expr) -> Expr {
    e.clone()
}
