//! Atoms and monomials: the variables of the polynomial layer.
//!
//! An atom is anything the rational-function normal form treats as opaque:
//! a named symbol, a unary function application with canonical argument, or
//! a non-integer rational power of a polynomial base.

use std::cmp::Ordering;
use std::sync::Arc;

use num::BigRational;

use super::poly::Poly;
use super::Expr;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Atom {
    Sym(String),
    Fun(Func, Arc<Expr>),
    /// base^q with q a positive non-integer rational; the base is a
    /// denominator-free polynomial with more than one term (single-term
    /// bases distribute over their factors at construction time).
    Pow(Arc<Poly>, BigRational),
}

/// Product of atom powers with positive integer exponents, sorted by atom.
/// The empty monomial is the unit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial(pub Vec<(Atom, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, k)| *k as u64).sum()
    }

    /// Exact monomial division; None when some factor of `other` is missing.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut it = self.0.iter();
        'outer: for (a, k) in &other.0 {
            for (b, j) in it.by_ref() {
                match b.cmp(a) {
                    Ordering::Less => out.push((b.clone(), *j)),
                    Ordering::Equal => {
                        if j < k {
                            return None;
                        }
                        if j > k {
                            out.push((b.clone(), j - k));
                        }
                        continue 'outer;
                    }
                    Ordering::Greater => return None,
                }
            }
            return None;
        }
        out.extend(it.cloned());
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents (gcd of the two monomials).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    let k = self.0[i].1.min(other.0[j].1);
                    out.push((self.0[i].0.clone(), k));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }
}

// Graded lexicographic order: compare total degree first, then exponent
// vectors with smaller atoms more significant. Compatible with monomial
// multiplication, which the exact-division routine relies on.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                // remaining factors sit on less significant atoms
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some((a, ka)), Some((b, kb))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ka.cmp(kb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
