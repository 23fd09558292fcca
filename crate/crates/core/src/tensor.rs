//! Coordinate charts and dense tensor fields of symbolic components.

use std::sync::Arc;

use thiserror::Error;

use crate::expr::{diff, eval_numeric, Expr, Fields, NumBindings};

pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TensorError {
    #[error("chart dimension {0} outside 1..={MAX_DIM}")]
    BadDimension(usize),
    #[error("coordinate names must be distinct")]
    DuplicateCoordinate,
    #[error("component count {got} does not match dim^rank = {want}")]
    BadComponentCount { got: usize, want: usize },
    #[error("declared symmetry violated at indices {0:?}")]
    SymmetryViolation(Vec<usize>),
    #[error("metric is singular: {0}")]
    SingularMetric(String),
    #[error("index slot {0} out of range")]
    SlotOutOfRange(usize),
    #[error("slot {slot} has variance {found:?}, expected {expected:?}")]
    VarianceMismatch {
        slot: usize,
        found: Variance,
        expected: Variance,
    },
    #[error("rank {0} not supported by this operation")]
    UnsupportedRank(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Up,
    Down,
}

/// A coordinate chart together with the declared field symbols living on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub coords: Vec<String>,
    pub fields: Fields,
}

impl Chart {
    pub fn new(coords: Vec<String>, fields: Fields) -> Result<Arc<Chart>, TensorError> {
        let dim = coords.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(TensorError::BadDimension(dim));
        }
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(TensorError::DuplicateCoordinate);
            }
        }
        Ok(Arc::new(Chart { coords, fields }))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Every coordinate at 0.7 unless overridden; deterministic and clear of
    /// the trig/log singularities of the catalog metrics.
    pub fn sample_point(&self, overrides: &NumBindings) -> NumBindings {
        let mut b = NumBindings::new();
        for c in &self.coords {
            b.insert(c.clone(), 0.7);
        }
        for (k, v) in overrides {
            b.insert(k.clone(), *v);
        }
        b
    }
}

/// Declared pair symmetry, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSymmetry {
    pub slots: (usize, usize),
    pub antisymmetric: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    pub chart: Arc<Chart>,
    pub variance: Vec<Variance>,
    components: Vec<Expr>, // dense, row-major over index tuples
    pub symmetries: Vec<PairSymmetry>,
    pub weight: Option<i64>,
}

impl TensorField {
    pub fn new(
        chart: Arc<Chart>,
        variance: Vec<Variance>,
        components: Vec<Expr>,
    ) -> Result<TensorField, TensorError> {
        let want = chart.dim().pow(variance.len() as u32);
        if components.len() != want {
            return Err(TensorError::BadComponentCount {
                got: components.len(),
                want,
            });
        }
        Ok(TensorField {
            chart,
            variance,
            components,
            symmetries: Vec::new(),
            weight: None,
        })
    }

    pub fn scalar(chart: Arc<Chart>, value: Expr) -> TensorField {
        TensorField {
            chart,
            variance: Vec::new(),
            components: vec![value],
            symmetries: Vec::new(),
            weight: None,
        }
    }

    pub fn zeros(chart: Arc<Chart>, variance: Vec<Variance>) -> TensorField {
        let n = chart.dim().pow(variance.len() as u32);
        TensorField {
            chart,
            variance,
            components: vec![Expr::zero(); n],
            symmetries: Vec::new(),
            weight: None,
        }
    }

    pub fn with_symmetry(mut self, sym: PairSymmetry) -> Result<TensorField, TensorError> {
        self.check_symmetry(&sym)?;
        self.symmetries.push(sym);
        Ok(self)
    }

    pub fn with_weight(mut self, w: i64) -> TensorField {
        self.weight = Some(w);
        self
    }

    fn check_symmetry(&self, sym: &PairSymmetry) -> Result<(), TensorError> {
        let (a, b) = sym.slots;
        let rank = self.rank();
        if a >= rank || b >= rank || a == b {
            return Err(TensorError::SlotOutOfRange(a.max(b)));
        }
        for idx in self.indices() {
            let mut swapped = idx.clone();
            swapped.swap(a, b);
            let lhs = self.get(&idx);
            let rhs = self.get(&swapped);
            let ok = if sym.antisymmetric {
                lhs.add(rhs).is_zero()
            } else {
                lhs.sub(rhs).is_zero()
            };
            if !ok {
                return Err(TensorError::SymmetryViolation(idx));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let d = self.dim();
        idx.iter().fold(0, |acc, &i| acc * d + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.components[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Expr) {
        let o = self.offset(idx);
        self.components[o] = value;
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// All index tuples in lexicographic order.
    pub fn indices(&self) -> IndexIter {
        IndexIter::new(self.dim(), self.rank())
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> TensorField {
        TensorField {
            chart: self.chart.clone(),
            variance: self.variance.clone(),
            components: self.components.iter().map(f).collect(),
            symmetries: Vec::new(),
            weight: self.weight,
        }
    }

    pub fn add(&self, other: &TensorField) -> TensorField {
        assert_eq!(self.variance, other.variance);
        TensorField {
            chart: self.chart.clone(),
            variance: self.variance.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
            symmetries: Vec::new(),
            weight: None,
        }
    }

    pub fn sub(&self, other: &TensorField) -> TensorField {
        self.add(&other.map(|c| c.neg()))
    }

    /// Componentwise partial derivative along coordinate `nu` (comma
    /// derivative; the variance is unchanged).
    pub fn partial_deriv(&self, nu: usize) -> TensorField {
        let x = self.chart.coords[nu].clone();
        let fields = self.chart.fields.clone();
        self.map(|c| diff(c, &x, &fields))
    }
}

pub struct IndexIter {
    dim: usize,
    rank: usize,
    next: Option<Vec<usize>>,
}

impl IndexIter {
    fn new(dim: usize, rank: usize) -> IndexIter {
        IndexIter {
            dim,
            rank,
            next: Some(vec![0; rank]),
        }
    }
}

impl Iterator for IndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for slot in (0..self.rank).rev() {
            succ[slot] += 1;
            if succ[slot] < self.dim {
                self.next = Some(succ);
                return Some(current);
            }
            succ[slot] = 0;
        }
        // rank 0 yields the empty tuple exactly once
        Some(current)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub chart: Arc<Chart>,
    pub g: TensorField,
    /// Sample-point overrides used for the invertibility probe; kept so
    /// derived metrics (e.g. gauge transforms) revalidate the same way.
    pub sample: NumBindings,
}

impl Metric {
    /// Validates symmetry exactly and invertibility numerically at the
    /// chart's standard sample point.
    pub fn new(
        g: TensorField,
        sample_overrides: &NumBindings,
    ) -> Result<Metric, TensorError> {
        assert_eq!(g.rank(), 2);
        let g = g.with_symmetry(PairSymmetry {
            slots: (0, 1),
            antisymmetric: false,
        })?;
        let chart = g.chart.clone();
        let det = det_expr(&g);
        let mut point = NumBindings::new();
        // parameters and field symbols get the standard sample value too
        for s in det.symbols() {
            point.insert(s, 0.7);
        }
        for (k, v) in chart.sample_point(sample_overrides) {
            point.insert(k, v);
        }
        match eval_numeric(&det, &point) {
            Ok(v) if v.abs() > 1e-9 => {}
            Ok(v) => {
                return Err(TensorError::SingularMetric(format!(
                    "determinant {v:.3e} at sample point"
                )))
            }
            Err(e) => {
                return Err(TensorError::SingularMetric(format!(
                    "determinant not evaluable: {e}"
                )))
            }
        }
        Ok(Metric {
            chart,
            g,
            sample: sample_overrides.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        self.g.get(&[i, j])
    }

    pub fn determinant(&self) -> Expr {
        det_expr(&self.g)
    }

    /// Exact symbolic inverse via adjugate over determinant.
    pub fn inverse(&self) -> Result<TensorField, TensorError> {
        let det = self.determinant();
        if det.is_zero() {
            return Err(TensorError::SingularMetric(
                "determinant is symbolically zero".into(),
            ));
        }
        let d = self.dim();
        let mut inv = TensorField::zeros(self.chart.clone(), vec![Variance::Up, Variance::Up]);
        for i in 0..d {
            for j in 0..d {
                let minor = minor_det(&self.g, i, j);
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                // adjugate transposes, but the metric is symmetric
                inv.set(&[i, j], minor.scale_int(sign).div(&det));
            }
        }
        Ok(inv)
    }
}

fn det_expr(g: &TensorField) -> Expr {
    let d = g.dim();
    let rows: Vec<Vec<Expr>> = (0..d)
        .map(|i| (0..d).map(|j| g.get(&[i, j]).clone()).collect())
        .collect();
    det_rows(&rows)
}

fn minor_det(g: &TensorField, row: usize, col: usize) -> Expr {
    let d = g.dim();
    let rows: Vec<Vec<Expr>> = (0..d)
        .filter(|&i| i != row)
        .map(|i| {
            (0..d)
                .filter(|&j| j != col)
                .map(|j| g.get(&[i, j]).clone())
                .collect()
        })
        .collect();
    det_rows(&rows)
}

fn det_rows(rows: &[Vec<Expr>]) -> Expr {
    let n = rows.len();
    if n == 0 {
        return Expr::one();
    }
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut acc = Expr::zero();
    for (j, pivot) in rows[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let sub: Vec<Vec<Expr>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = pivot.mul(&det_rows(&sub));
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

/// Contract one slot of `t` with the metric (lower) or its inverse (raise).
pub fn raise_index(
    t: &TensorField,
    slot: usize,
    g: &Metric,
) -> Result<TensorField, TensorError> {
    contract_metric(t, slot, &g.inverse()?, Variance::Down, Variance::Up)
}

pub fn lower_index(
    t: &TensorField,
    slot: usize,
    g: &Metric,
) -> Result<TensorField, TensorError> {
    contract_metric(t, slot, &g.g, Variance::Up, Variance::Down)
}

fn contract_metric(
    t: &TensorField,
    slot: usize,
    g: &TensorField,
    expect: Variance,
    result: Variance,
) -> Result<TensorField, TensorError> {
    if slot >= t.rank() {
        return Err(TensorError::SlotOutOfRange(slot));
    }
    if t.variance[slot] != expect {
        return Err(TensorError::VarianceMismatch {
            slot,
            found: t.variance[slot],
            expected: expect,
        });
    }
    let d = t.dim();
    let mut variance = t.variance.clone();
    variance[slot] = result;
    let mut out = TensorField::zeros(t.chart.clone(), variance);
    for idx in out.indices() {
        let mut acc = Expr::zero();
        for s in 0..d {
            let mut src = idx.clone();
            src[slot] = s;
            acc = acc.add(&g.get(&[idx[slot], s]).mul(t.get(&src)));
        }
        out.set(&idx, acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn chart2(names: [&str; 2]) -> Arc<Chart> {
        Chart::new(names.iter().map(|s| s.to_string()).collect(), Fields::empty()).unwrap()
    }

    fn metric_diag(chart: &Arc<Chart>, diag: [&str; 2]) -> Metric {
        let d = chart.dim();
        let mut g = TensorField::zeros(chart.clone(), vec![Variance::Down, Variance::Down]);
        for i in 0..d {
            g.set(&[i, i], parse_expr(diag[i]).unwrap());
        }
        Metric::new(g, &NumBindings::new()).unwrap()
    }

    #[test]
    fn diagonal_inverse() {
        let chart = chart2(["theta", "phi"]);
        let g = metric_diag(&chart, ["1", "sin(theta)^2"]);
        let inv = g.inverse().unwrap();
        assert_eq!(inv.get(&[1, 1]), &parse_expr("1/sin(theta)^2").unwrap());
        assert!(inv.get(&[0, 1]).is_zero());
    }

    #[test]
    fn general_2x2_inverse_is_adjugate() {
        let chart = chart2(["u", "v"]);
        let mut g = TensorField::zeros(chart.clone(), vec![Variance::Down, Variance::Down]);
        g.set(&[0, 0], Expr::symbol("a"));
        g.set(&[0, 1], Expr::symbol("b"));
        g.set(&[1, 0], Expr::symbol("b"));
        g.set(&[1, 1], Expr::symbol("c"));
        let mut overrides = NumBindings::new();
        overrides.insert("a".into(), 1.0);
        overrides.insert("b".into(), 0.3);
        overrides.insert("c".into(), 2.0);
        let m = Metric::new(g, &overrides).unwrap();
        let inv = m.inverse().unwrap();
        let det = parse_expr("a*c - b^2").unwrap();
        assert_eq!(inv.get(&[0, 0]), &Expr::symbol("c").div(&det));
        assert_eq!(inv.get(&[0, 1]), &Expr::symbol("b").neg().div(&det));
        // identity check g^{mu sigma} g_{sigma nu} = delta
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Expr::zero();
                for s in 0..2 {
                    acc = acc.add(&inv.get(&[i, s]).mul(m.component(s, j)));
                }
                let want = if i == j { Expr::one() } else { Expr::zero() };
                assert_eq!(acc, want, "delta at {i}{j}");
            }
        }
    }

    #[test]
    fn asymmetric_metric_rejected() {
        let chart = chart2(["x", "y"]);
        let mut g = TensorField::zeros(chart, vec![Variance::Down, Variance::Down]);
        g.set(&[0, 0], Expr::one());
        g.set(&[1, 1], Expr::one());
        g.set(&[0, 1], Expr::symbol("b"));
        assert!(matches!(
            Metric::new(g, &NumBindings::new()),
            Err(TensorError::SymmetryViolation(_))
        ));
    }

    #[test]
    fn raise_lower_roundtrip_on_sphere() {
        let chart = chart2(["theta", "phi"]);
        let g = metric_diag(&chart, ["1", "sin(theta)^2"]);
        let mut w = TensorField::zeros(chart, vec![Variance::Down]);
        w.set(&[1], Expr::one());
        let up = raise_index(&w, 0, &g).unwrap();
        assert_eq!(up.get(&[1]), &parse_expr("1/sin(theta)^2").unwrap());
        let back = lower_index(&up, 0, &g).unwrap();
        assert_eq!(back.get(&[1]), w.get(&[1]));
        assert_eq!(back.get(&[0]), w.get(&[0]));
    }

    #[test]
    fn partial_derivative_commutes() {
        let chart = chart2(["theta", "phi"]);
        let g = metric_diag(&chart, ["1", "sin(theta)^2"]);
        let d0 = g.g.partial_deriv(0);
        assert_eq!(
            d0.get(&[1, 1]),
            &parse_expr("2*sin(theta)*cos(theta)").unwrap()
        );
        let d01 = d0.partial_deriv(1);
        let d10 = g.g.partial_deriv(1).partial_deriv(0);
        for idx in d01.indices() {
            assert_eq!(d01.get(&idx), d10.get(&idx));
        }
    }
}
