//! Expanded multivariate polynomials over the rationals in atoms.
//!
//! Terms are kept sorted in graded-lex order with nonzero coefficients.
//! Multiplication routes every monomial product through `normalize_factors`,
//! which applies the closed rewrite set (exponent merging, exp-argument
//! addition, cos^2 -> 1 - sin^2, fractional-power folding) so that any value
//! built through the arithmetic layer is canonical by construction.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigRational, One, Signed, Zero};

use super::atom::{Atom, Func, Monomial};
use super::Expr;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Poly(pub Vec<(Monomial, BigRational)>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly(vec![(Monomial::unit(), c)])
        }
    }

    pub fn from_atom(a: Atom) -> Self {
        Poly(vec![(Monomial(vec![(a, 1)]), BigRational::one())])
    }

    pub fn from_term(m: Monomial, c: BigRational) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly(vec![(m, c)])
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].0.is_unit() && self.0[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        match self.0.as_slice() {
            [] => None, // zero handled by caller via is_zero
            [(m, c)] if m.is_unit() => Some(c),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, BigRational)> {
        self.0.last()
    }

    pub fn terms(&self) -> impl Iterator<Item = &(Monomial, BigRational)> {
        self.0.iter()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.0[i].1 + &other.0[j].1;
                    if !c.is_zero() {
                        out.push((self.0[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Poly(out)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, k)| (m.clone(), k * c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let mut factors: Vec<(Atom, u32)> =
                    Vec::with_capacity(ma.0.len() + mb.0.len());
                factors.extend(ma.0.iter().cloned());
                factors.extend(mb.0.iter().cloned());
                acc = acc.add(&normalize_factors(ca * cb, factors));
            }
        }
        acc
    }

    pub fn powi(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Greatest common monomial factor of all terms.
    pub fn atom_content(&self) -> Monomial {
        let mut it = self.0.iter();
        let mut acc = match it.next() {
            Some((m, _)) => m.clone(),
            None => return Monomial::unit(),
        };
        for (m, _) in it {
            if acc.is_unit() {
                break;
            }
            acc = acc.gcd(m);
        }
        acc
    }

    /// Divide every term by the given monomial; caller guarantees divisibility.
    pub fn div_monomial(&self, m: &Monomial) -> Poly {
        if m.is_unit() {
            return self.clone();
        }
        Poly(
            self.0
                .iter()
                .map(|(t, c)| (t.div(m).expect("content division"), c.clone()))
                .collect(),
        )
    }

    /// Exact polynomial division: Some(q) iff self = q * divisor termwise.
    /// Returns None when a rewrite rule interferes with the cancellation.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&(BigRational::one() / c)));
        }
        let (dm, dc) = divisor.leading().unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            let term = Poly::from_term(qm, qc);
            let next = rem.sub(&term.mul(divisor));
            match (next.leading(), rem.leading()) {
                (Some((nm, _)), Some((om, _))) if nm >= om => return None,
                _ => {}
            }
            quot = quot.add(&term);
            rem = next;
        }
        Some(quot)
    }
}

/// Build the canonical polynomial for `coeff * prod(atom^exp)`, applying the
/// rewrite rules that keep the representation closed.
pub fn normalize_factors(coeff: BigRational, factors: Vec<(Atom, u32)>) -> Poly {
    if coeff.is_zero() {
        return Poly::zero();
    }
    // Merge duplicate atoms; group fractional powers by base.
    let mut plain: BTreeMap<Atom, u32> = BTreeMap::new();
    let mut exp_arg: Option<Expr> = None;
    let mut pow_bases: BTreeMap<Arc<Poly>, BigRational> = BTreeMap::new();
    for (a, k) in factors {
        if k == 0 {
            continue;
        }
        match a {
            Atom::Fun(Func::Exp, u) => {
                let scaled = u.scale_int(k as i64);
                exp_arg = Some(match exp_arg {
                    Some(acc) => acc.add(&scaled),
                    None => scaled,
                });
            }
            Atom::Pow(b, q) => {
                let t = q * BigRational::from_integer(k.into());
                let e = pow_bases.entry(b).or_insert_with(BigRational::zero);
                *e += t;
            }
            other => {
                *plain.entry(other).or_insert(0) += k;
            }
        }
    }

    let mut pending: Vec<Poly> = Vec::new();
    let mut mono: Vec<(Atom, u32)> = Vec::new();

    if let Some(arg) = exp_arg {
        if !arg.is_zero() {
            mono.push((Atom::Fun(Func::Exp, Arc::new(arg)), 1));
        }
    }
    for (base, t) in pow_bases {
        if t.is_zero() {
            continue;
        }
        if t.is_integer() {
            let n: i64 = t.to_integer().try_into().expect("power exponent overflow");
            debug_assert!(n > 0);
            pending.push(base.powi(n as u32));
        } else {
            mono.push((Atom::Pow(base, t), 1));
        }
    }
    for (a, k) in plain {
        if let Atom::Fun(Func::Cos, u) = &a {
            if k >= 2 {
                // cos^2 u -> 1 - sin^2 u
                let sin2 = Poly::from_term(
                    Monomial(vec![(Atom::Fun(Func::Sin, u.clone()), 2)]),
                    BigRational::one(),
                );
                pending.push(Poly::one().sub(&sin2).powi(k / 2));
                if k % 2 == 1 {
                    mono.push((a, 1));
                }
                continue;
            }
        }
        mono.push((a, k));
    }
    mono.sort_by(|a, b| a.0.cmp(&b.0));
    let mut acc = Poly::from_term(Monomial(mono), coeff);
    for p in pending {
        acc = acc.mul(&p);
    }
    acc
}

/// Sign of the leading coefficient; used for display and parity rules.
pub fn leading_is_negative(p: &Poly) -> bool {
    p.leading().map(|(_, c)| c.is_negative()).unwrap_or(false)
}
