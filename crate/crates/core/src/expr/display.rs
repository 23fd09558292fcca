//! Grammar-conformant printing; `parse_expr(print(e)) == e` for canonical e.

use std::fmt;

use num::{BigRational, One, Signed};

use super::atom::{Atom, Monomial};
use super::poly::Poly;
use super::Expr;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_poly().is_one() {
            return write!(f, "{}", PolyFmt(self.num_poly(), false));
        }
        write!(
            f,
            "{}/({})",
            PolyFmt(self.num_poly(), true),
            PolyFmt(self.den_poly(), false)
        )
    }
}

struct PolyFmt<'a>(&'a Poly, bool); // bool: parenthesize multi-term sums

impl fmt::Display for PolyFmt<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<_> = self.0.terms().collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let wrap = self.1 && terms.len() > 1;
        if wrap {
            write!(f, "(")?;
        }
        // Leading term first.
        for (i, (m, c)) in terms.iter().rev().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write_term(f, m, &c.abs())?;
        }
        if wrap {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, m: &Monomial, c: &BigRational) -> fmt::Result {
    let mut first = true;
    if m.is_unit() || !c.is_one() {
        write_rational(f, c)?;
        first = false;
    }
    for (a, k) in &m.0 {
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write_atom(f, a)?;
        if *k > 1 {
            write!(f, "^{}", k)?;
        }
    }
    Ok(())
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, a: &Atom) -> fmt::Result {
    match a {
        Atom::Sym(s) => write!(f, "{}", s),
        Atom::Fun(func, u) => write!(f, "{}({})", func.name(), u),
        Atom::Pow(base, q) => {
            write!(
                f,
                "({})^({}/{})",
                PolyFmt(base, false),
                q.numer(),
                q.denom()
            )
        }
    }
}
