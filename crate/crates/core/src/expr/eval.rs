//! IEEE-double evaluation of canonical expressions.

use std::collections::BTreeMap;

use num::ToPrimitive;
use thiserror::Error;

use super::atom::{Atom, Func};
use super::poly::Poly;
use super::Expr;

pub type NumBindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain error: {what} in `{subexpr}`")]
    Domain { what: String, subexpr: String },
}

/// Evaluate with every symbol bound to a finite double. The constant `pi`
/// is built in and may be overridden by an explicit binding.
pub fn eval_numeric(e: &Expr, b: &NumBindings) -> Result<f64, EvalError> {
    let num = eval_poly(e.num_poly(), b)?;
    if e.den_poly().is_one() {
        return Ok(num);
    }
    let den = eval_poly(e.den_poly(), b)?;
    if den == 0.0 {
        return Err(EvalError::Domain {
            what: "division by zero".into(),
            subexpr: format!("{}", e),
        });
    }
    Ok(num / den)
}

fn eval_poly(p: &Poly, b: &NumBindings) -> Result<f64, EvalError> {
    let mut acc = 0.0;
    for (m, c) in p.terms() {
        let mut term = c.to_f64().ok_or_else(|| EvalError::Domain {
            what: "coefficient overflow".into(),
            subexpr: format!("{}", c),
        })?;
        for (a, k) in &m.0 {
            term *= eval_atom(a, b)?.powi(*k as i32);
        }
        acc += term;
    }
    Ok(acc)
}

fn eval_atom(a: &Atom, b: &NumBindings) -> Result<f64, EvalError> {
    match a {
        Atom::Sym(s) => match b.get(s) {
            Some(v) => Ok(*v),
            None if s == "pi" => Ok(std::f64::consts::PI),
            None => Err(EvalError::Unbound(s.clone())),
        },
        Atom::Fun(f, u) => {
            let v = eval_numeric(u, b)?;
            match f {
                Func::Sin => Ok(v.sin()),
                Func::Cos => Ok(v.cos()),
                Func::Exp => Ok(v.exp()),
                Func::Log => {
                    if v <= 0.0 {
                        Err(EvalError::Domain {
                            what: format!("log of non-positive value {v}"),
                            subexpr: format!("log({})", u),
                        })
                    } else {
                        Ok(v.ln())
                    }
                }
            }
        }
        Atom::Pow(base, q) => {
            let bv = eval_poly(base, b)?;
            let qv = q.to_f64().ok_or_else(|| EvalError::Domain {
                what: "exponent overflow".into(),
                subexpr: format!("{}", q),
            })?;
            if bv < 0.0 {
                Err(EvalError::Domain {
                    what: format!("fractional power of negative value {bv}"),
                    subexpr: format!("(..)^({})", q),
                })
            } else {
                Ok(bv.powf(qv))
            }
        }
    }
}
