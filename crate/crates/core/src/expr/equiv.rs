//! Equivalence testing: exact when the canonical difference vanishes,
//! otherwise deterministic numeric sampling in a singularity-safe box.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::eval::{eval_numeric, NumBindings};
use super::Expr;

const SAMPLE_POINTS: usize = 20;
const SAMPLE_BUDGET: usize = 400;
const SEED: u64 = 0x5EED_CAFE;
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Equiv {
    Equal,
    LikelyEqual,
    Unequal {
        witness: NumBindings,
        lhs: f64,
        rhs: f64,
    },
}

impl Equiv {
    pub fn holds(&self) -> bool {
        !matches!(self, Equiv::Unequal { .. })
    }
}

pub fn equiv(a: &Expr, b: &Expr) -> Equiv {
    if a.sub(b).is_zero() {
        return Equiv::Equal;
    }
    let mut syms = a.symbols();
    syms.extend(b.symbols());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut agreed = 0usize;
    for _ in 0..SAMPLE_BUDGET {
        if agreed >= SAMPLE_POINTS {
            break;
        }
        let mut point = NumBindings::new();
        for s in &syms {
            point.insert(s.clone(), rng.gen_range(0.2..1.5));
        }
        let (va, vb) = match (eval_numeric(a, &point), eval_numeric(b, &point)) {
            (Ok(va), Ok(vb)) => (va, vb),
            _ => continue, // out of domain, resample
        };
        let scale = 1.0_f64.max(va.abs()).max(vb.abs());
        if (va - vb).abs() <= REL_TOL * scale {
            agreed += 1;
        } else {
            return Equiv::Unequal {
                witness: point,
                lhs: va,
                rhs: vb,
            };
        }
    }
    Equiv::LikelyEqual
}
