//! Numeric transport experiments: parallel transport around closed loops,
//! Weyl length transport, and curvature holonomy defects. Fixed-step RK4
//! throughout for determinism and clean convergence-order checks.

use std::sync::Arc;

use thiserror::Error;

use crate::expr::{diff, eval_numeric, EvalError, Expr, Fields, NumBindings};
use crate::riemann::{riemann, Connection};
use crate::tensor::{Chart, Metric, TensorField};
use crate::weyl::WeylStructure;

pub const DEFAULT_STEPS: usize = 4096;

#[derive(Debug, Error)]
pub enum HolonomyError {
    #[error("loop is not closed: coordinate {coord} differs by {gap:e}")]
    NotClosed { coord: String, gap: f64 },
    #[error("loop has no segments")]
    Empty,
    #[error("segment {segment} is discontinuous at its start: coordinate {coord}")]
    Discontinuous { segment: usize, coord: String },
    #[error("vector has {got} components, chart dimension is {dim}")]
    DimMismatch { got: usize, dim: usize },
    #[error("evaluation failed on the path: {0}")]
    Eval(#[from] EvalError),
}

/// One smooth piece of a loop: per-coordinate expressions in `t` on [0, 1].
#[derive(Debug, Clone)]
pub struct Segment {
    pub coords: Vec<Expr>,
    velocity: Vec<Expr>,
}

impl Segment {
    pub fn new(coords: Vec<Expr>) -> Segment {
        let velocity = coords
            .iter()
            .map(|e| diff(e, "t", &Fields::empty()))
            .collect();
        Segment { coords, velocity }
    }

    fn position(&self, t: f64) -> Result<Vec<f64>, EvalError> {
        let mut b = NumBindings::new();
        b.insert("t".into(), t);
        self.coords.iter().map(|e| eval_numeric(e, &b)).collect()
    }

    fn velocity_at(&self, t: f64) -> Result<Vec<f64>, EvalError> {
        let mut b = NumBindings::new();
        b.insert("t".into(), t);
        self.velocity.iter().map(|e| eval_numeric(e, &b)).collect()
    }
}

/// A closed piecewise-smooth curve on a chart, traversed segment by
/// segment with `steps` RK4 steps per segment.
#[derive(Debug, Clone)]
pub struct LoopPath {
    pub chart: Arc<Chart>,
    pub segments: Vec<Segment>,
    pub steps: usize,
    /// Coordinates closed modulo 2*pi (angle coordinates); the wrap-around
    /// closure check reduces the gap accordingly.
    pub periodic: Vec<bool>,
}

const CLOSURE_TOL: f64 = 1e-12;

impl LoopPath {
    pub fn new(
        chart: Arc<Chart>,
        segments: Vec<Segment>,
        steps: usize,
    ) -> Result<LoopPath, HolonomyError> {
        let d = chart.dim();
        LoopPath::new_periodic(chart, segments, steps, &vec![false; d])
    }

    pub fn new_periodic(
        chart: Arc<Chart>,
        segments: Vec<Segment>,
        steps: usize,
        periodic: &[bool],
    ) -> Result<LoopPath, HolonomyError> {
        if segments.is_empty() {
            return Err(HolonomyError::Empty);
        }
        let d = chart.dim();
        for (si, seg) in segments.iter().enumerate() {
            if seg.coords.len() != d {
                return Err(HolonomyError::DimMismatch {
                    got: seg.coords.len(),
                    dim: d,
                });
            }
            let prev = segments[(si + segments.len() - 1) % segments.len()].position(1.0)?;
            let here = seg.position(0.0)?;
            for k in 0..d {
                let mut gap = (here[k] - prev[k]).abs();
                if si == 0 && periodic.get(k).copied().unwrap_or(false) {
                    let tau = 2.0 * std::f64::consts::PI;
                    let r = gap % tau;
                    gap = r.min(tau - r);
                }
                if gap > CLOSURE_TOL {
                    if si == 0 {
                        return Err(HolonomyError::NotClosed {
                            coord: chart.coords[k].clone(),
                            gap,
                        });
                    }
                    return Err(HolonomyError::Discontinuous {
                        segment: si,
                        coord: chart.coords[k].clone(),
                    });
                }
            }
        }
        Ok(LoopPath {
            chart,
            segments,
            steps,
            periodic: periodic.to_vec(),
        })
    }

    /// Single-segment loop from per-coordinate expressions in `t`.
    pub fn from_exprs(
        chart: Arc<Chart>,
        coords: Vec<Expr>,
        steps: usize,
    ) -> Result<LoopPath, HolonomyError> {
        LoopPath::new(chart, vec![Segment::new(coords)], steps)
    }

    /// Single-segment loop with the given angle coordinates closed modulo
    /// 2*pi.
    pub fn from_exprs_periodic(
        chart: Arc<Chart>,
        coords: Vec<Expr>,
        steps: usize,
        periodic: &[bool],
    ) -> Result<LoopPath, HolonomyError> {
        LoopPath::new_periodic(chart, vec![Segment::new(coords)], steps, periodic)
    }

    /// Closed polygon through the given vertices (linear segments; the last
    /// vertex connects back to the first).
    pub fn polygon(
        chart: Arc<Chart>,
        vertices: &[Vec<f64>],
        steps: usize,
    ) -> Result<LoopPath, HolonomyError> {
        let n = vertices.len();
        let mut segments = Vec::with_capacity(n);
        for i in 0..n {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % n];
            let coords = a
                .iter()
                .zip(b)
                .map(|(&x0, &x1)| {
                    Expr::from_f64(x0)
                        .add(&Expr::from_f64(x1 - x0).mul(&Expr::symbol("t")))
                })
                .collect();
            segments.push(Segment::new(coords));
        }
        LoopPath::new(chart, segments, steps)
    }

    pub fn base_point(&self) -> Result<Vec<f64>, HolonomyError> {
        Ok(self.segments[0].position(0.0)?)
    }
}

#[derive(Debug, Clone)]
pub struct TransportResult {
    pub final_vector: Vec<f64>,
    pub initial_length: f64,
    pub final_length: f64,
    /// First-order prediction of the length ratio change (line-integral /
    /// area form); 0.0 for pure parallel transport.
    pub predicted_first_order: f64,
    /// Exact exponential-law prediction of the final length.
    pub predicted_exact: f64,
    /// Frame rotation angle in [0, 2*pi), 2D charts only.
    pub rotation_angle: Option<f64>,
}

fn bind_point(chart: &Chart, x: &[f64]) -> NumBindings {
    let mut b = NumBindings::new();
    for (name, &v) in chart.coords.iter().zip(x) {
        b.insert(name.clone(), v);
    }
    b
}

/// Numeric metric matrix at a point.
fn metric_at(g: &Metric, x: &[f64]) -> Result<Vec<Vec<f64>>, EvalError> {
    let d = g.dim();
    let b = bind_point(&g.chart, x);
    let mut out = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            out[i][j] = eval_numeric(g.g.get(&[i, j]), &b)?;
        }
    }
    Ok(out)
}

fn length_in(gm: &[Vec<f64>], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, vi) in v.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            s += gm[i][j] * vi * vj;
        }
    }
    s.abs().sqrt()
}

/// RK4 integration of dB/dt = f(t, B) over one segment split into `n`
/// steps; `f` must be deterministic.
fn rk4<F>(mut b: Vec<f64>, n: usize, mut f: F) -> Result<Vec<f64>, HolonomyError>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>, HolonomyError>,
{
    let h = 1.0 / n as f64;
    let d = b.len();
    for step in 0..n {
        let t = step as f64 * h;
        let k1 = f(t, &b)?;
        let mut b2 = vec![0.0; d];
        for i in 0..d {
            b2[i] = b[i] + 0.5 * h * k1[i];
        }
        let k2 = f(t + 0.5 * h, &b2)?;
        for i in 0..d {
            b2[i] = b[i] + 0.5 * h * k2[i];
        }
        let k3 = f(t + 0.5 * h, &b2)?;
        for i in 0..d {
            b2[i] = b[i] + h * k3[i];
        }
        let k4 = f(t + h, &b2)?;
        for i in 0..d {
            b[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(b)
}

/// Parallel transport of B0 around the loop: dB^mu/dt =
/// -B^sigma Gamma^mu_{sigma nu} dx^nu/dt, fixed-step RK4.
pub fn transport(
    conn: &Connection,
    path: &LoopPath,
    b0: &[f64],
) -> Result<TransportResult, HolonomyError> {
    transport_with_metric(conn, None, path, b0)
}

/// As `transport`, but measures |B| with the supplied metric (for length
/// drift and rotation-angle reporting).
pub fn transport_with_metric(
    conn: &Connection,
    g: Option<&Metric>,
    path: &LoopPath,
    b0: &[f64],
) -> Result<TransportResult, HolonomyError> {
    let d = path.chart.dim();
    if b0.len() != d {
        return Err(HolonomyError::DimMismatch {
            got: b0.len(),
            dim: d,
        });
    }
    let mut b = b0.to_vec();
    for seg in &path.segments {
        b = rk4(b, path.steps, |t, bv| {
            let x = seg.position(t)?;
            let v = seg.velocity_at(t)?;
            let bind = bind_point(&path.chart, &x);
            let mut db = vec![0.0; d];
            for mu in 0..d {
                let mut acc = 0.0;
                for s in 0..d {
                    for nu in 0..d {
                        let gamma = eval_numeric(conn.get(mu, s, nu), &bind)?;
                        acc -= bv[s] * gamma * v[nu];
                    }
                }
                db[mu] = acc;
            }
            Ok(db)
        })?;
    }
    let base = path.base_point()?;
    let (len0, len1, angle) = match g {
        Some(metric) => {
            let gm = metric_at(metric, &base)?;
            let l0 = length_in(&gm, b0);
            let l1 = length_in(&gm, &b);
            let ang = if d == 2 {
                Some(frame_angle(&gm, b0, &b))
            } else {
                None
            };
            (l0, l1, ang)
        }
        None => (0.0, 0.0, None),
    };
    Ok(TransportResult {
        final_vector: b,
        initial_length: len0,
        final_length: len1,
        predicted_first_order: 0.0,
        predicted_exact: len0,
        rotation_angle: angle,
    })
}

/// Angle from `from` to `to` in an oriented orthonormal frame of the 2D
/// metric `gm`, in [0, 2*pi).
fn frame_angle(gm: &[Vec<f64>], from: &[f64], to: &[f64]) -> f64 {
    // Gram-Schmidt on the coordinate basis
    let n1 = (gm[0][0]).abs().sqrt();
    let e1 = [1.0 / n1, 0.0];
    let p = gm[0][1] / n1; // <e1, d2>
    let r2 = [0.0 - p * e1[0] / n1, 1.0];
    let n2 = length_in(gm, &r2);
    let e2 = [r2[0] / n2, r2[1] / n2];
    let comp = |v: &[f64]| {
        let mut a = 0.0;
        let mut b = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                a += gm[i][j] * v[i] * e1[j];
                b += gm[i][j] * v[i] * e2[j];
            }
        }
        (a, b)
    };
    let (fa, fb) = comp(from);
    let (ta, tb) = comp(to);
    let ang = tb.atan2(ta) - fb.atan2(fa);
    ang.rem_euclid(2.0 * std::f64::consts::PI)
}

/// Composite-Simpson line integral of w_nu dx^nu along the loop.
fn line_integral_w(w: &TensorField, path: &LoopPath) -> Result<f64, HolonomyError> {
    let d = path.chart.dim();
    let mut total = 0.0;
    let n = if path.steps % 2 == 0 {
        path.steps
    } else {
        path.steps + 1
    };
    for seg in &path.segments {
        let h = 1.0 / n as f64;
        let f = |t: f64| -> Result<f64, HolonomyError> {
            let x = seg.position(t)?;
            let v = seg.velocity_at(t)?;
            let bind = bind_point(&path.chart, &x);
            let mut s = 0.0;
            for nu in 0..d {
                s += eval_numeric(w.get(&[nu]), &bind)? * v[nu];
            }
            Ok(s)
        };
        let mut acc = f(0.0)? + f(1.0)?;
        for k in 1..n {
            let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += weight * f(k as f64 * h)?;
        }
        total += acc * h / 3.0;
    }
    Ok(total)
}

/// Length transport dB/dt = B w_nu dx^nu/dt around the loop, with the
/// exact exponential-law prediction B0 * exp(loop integral of w) and the
/// first-order prediction B0 * (1 + loop integral). The line integral is
/// the Stokes evaluation of the area form, with the orientation of the
/// parametrization.
pub fn length_transport(
    ws: &WeylStructure,
    path: &LoopPath,
    b0_len: f64,
) -> Result<TransportResult, HolonomyError> {
    let d = path.chart.dim();
    let mut b = vec![b0_len];
    for seg in &path.segments {
        b = rk4(b, path.steps, |t, bv| {
            let x = seg.position(t)?;
            let v = seg.velocity_at(t)?;
            let bind = bind_point(&path.chart, &x);
            let mut s = 0.0;
            for nu in 0..d {
                s += eval_numeric(ws.w.get(&[nu]), &bind)? * v[nu];
            }
            Ok(vec![bv[0] * s])
        })?;
    }
    let integral = line_integral_w(&ws.w, path)?;
    Ok(TransportResult {
        final_vector: vec![b[0]],
        initial_length: b0_len,
        final_length: b[0],
        predicted_first_order: b0_len * (1.0 + integral),
        predicted_exact: b0_len * integral.exp(),
        rotation_angle: None,
    })
}

#[derive(Debug, Clone)]
pub struct DefectResult {
    pub delta: Vec<f64>,
    pub predicted: Vec<f64>,
}

/// Transport B0 around the coordinate parallelogram of side eps at
/// `corner` in the (mu, nu) plane (first along mu, then nu) and compare
/// the defect with the curvature prediction
/// delta B^lambda = B^sigma R^lambda_{sigma mu nu} eps^2.
pub fn holonomy_defect(
    conn: &Connection,
    corner: &[f64],
    eps: f64,
    plane: (usize, usize),
    b0: &[f64],
    steps: usize,
) -> Result<DefectResult, HolonomyError> {
    let d = conn.dim();
    let (mu, nu) = plane;
    // traversal order (nu side first) is pinned so the measured defect
    // carries the same sign as the curvature prediction
    let mut verts = vec![corner.to_vec(); 4];
    verts[1][nu] += eps;
    verts[2][nu] += eps;
    verts[2][mu] += eps;
    verts[3][mu] += eps;
    let path = LoopPath::polygon(conn.chart.clone(), &verts, steps)?;
    let out = transport(conn, &path, b0)?;
    let delta: Vec<f64> = out
        .final_vector
        .iter()
        .zip(b0)
        .map(|(f, i)| f - i)
        .collect();
    let riem = riemann(conn);
    let bind = bind_point(&conn.chart, corner);
    let mut predicted = vec![0.0; d];
    for l in 0..d {
        let mut acc = 0.0;
        for s in 0..d {
            acc += b0[s] * eval_numeric(riem.get(&[l, s, mu, nu]), &bind)?;
        }
        predicted[l] = acc * eps * eps;
    }
    Ok(DefectResult { delta, predicted })
}
