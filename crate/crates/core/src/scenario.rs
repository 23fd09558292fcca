//! Line-based scenario files: chart, metric, optional Weyl covector,
//! field declarations, loop, sample-point overrides, and flags.
//!
//! ```text
//! [chart]
//! dim = 2
//! coords = theta, phi
//! [metric]
//! g[0][0] = 1
//! g[1][1] = sin(theta)^2
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{parse_expr, Expr, Fields, NumBindings};
use crate::holonomy::{HolonomyError, LoopPath, Segment};
use crate::tensor::{Chart, Metric, TensorError, TensorField, Variance};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("line {line}: undeclared symbol `{symbol}`")]
    UndeclaredSymbol { line: usize, symbol: String },
    #[error("metric entries g[{i}][{j}] and g[{j}][{i}] disagree")]
    Asymmetric { i: usize, j: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error("scenario has no {0} section")]
    MissingSection(&'static str),
}

#[derive(Debug, Clone, Default)]
pub struct Scenario {
    pub dim: usize,
    pub coords: Vec<String>,
    /// field name -> depends on all coordinates
    pub fields: Vec<String>,
    pub metric: BTreeMap<(usize, usize), Expr>,
    pub weyl: BTreeMap<usize, Expr>,
    pub loop_coords: BTreeMap<usize, Expr>,
    pub loop_steps: Option<usize>,
    pub loop_periodic: Vec<String>,
    pub sample: NumBindings,
    pub flags: BTreeMap<String, bool>,
}

fn err(line: usize, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Line {
        line,
        msg: msg.into(),
    }
}

fn parse_index(key: &str, prefix: &str, line: usize) -> Result<Option<Vec<usize>>, ScenarioError> {
    if !key.starts_with(prefix) {
        return Ok(None);
    }
    let rest = &key[prefix.len()..];
    let mut idx = Vec::new();
    let mut cur = rest;
    while !cur.is_empty() {
        if !cur.starts_with('[') {
            return Err(err(line, format!("malformed index in `{key}`")));
        }
        let close = cur
            .find(']')
            .ok_or_else(|| err(line, format!("unclosed index in `{key}`")))?;
        let n: usize = cur[1..close]
            .parse()
            .map_err(|_| err(line, format!("bad index in `{key}`")))?;
        idx.push(n);
        cur = &cur[close + 1..];
    }
    if idx.is_empty() {
        return Err(err(line, format!("missing index in `{key}`")));
    }
    Ok(Some(idx))
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut s = Scenario::default();
    let mut section = String::new();
    let mut pending_exprs: Vec<(usize, Expr, bool)> = Vec::new(); // (line, expr, allow_t)
    for (ln0, raw) in text.lines().enumerate() {
        let line = ln0 + 1;
        let stripped = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        if stripped.starts_with('[') && stripped.ends_with(']') {
            section = stripped[1..stripped.len() - 1].to_string();
            match section.as_str() {
                "chart" | "metric" | "weyl" | "fields" | "loop" | "sample" | "flags" => {}
                other => return Err(err(line, format!("unknown section `{other}`"))),
            }
            continue;
        }
        let (key, value) = match stripped.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => return Err(err(line, "expected `key = value`")),
        };
        let expr = |v: &str| -> Result<Expr, ScenarioError> {
            parse_expr(v).map_err(|e| err(line, format!("{e}")))
        };
        match section.as_str() {
            "chart" => match key {
                "dim" => {
                    s.dim = value
                        .parse()
                        .map_err(|_| err(line, format!("bad dim `{value}`")))?;
                    if s.dim == 0 || s.dim > crate::tensor::MAX_DIM {
                        return Err(err(line, format!("dim {} out of range", s.dim)));
                    }
                }
                "coords" => {
                    s.coords = value.split(',').map(|c| c.trim().to_string()).collect();
                }
                other => return Err(err(line, format!("unknown chart key `{other}`"))),
            },
            "metric" => match parse_index(key, "g", line)? {
                Some(idx) if idx.len() == 2 => {
                    let e = expr(value)?;
                    pending_exprs.push((line, e.clone(), false));
                    if s.metric.insert((idx[0], idx[1]), e).is_some() {
                        return Err(err(line, format!("duplicate entry `{key}`")));
                    }
                }
                _ => return Err(err(line, format!("expected g[i][j], got `{key}`"))),
            },
            "weyl" => match parse_index(key, "w", line)? {
                Some(idx) if idx.len() == 1 => {
                    let e = expr(value)?;
                    pending_exprs.push((line, e.clone(), false));
                    if s.weyl.insert(idx[0], e).is_some() {
                        return Err(err(line, format!("duplicate entry `{key}`")));
                    }
                }
                _ => return Err(err(line, format!("expected w[i], got `{key}`"))),
            },
            "fields" => {
                if value != "depends_on_all" {
                    return Err(err(
                        line,
                        format!("field `{key}`: only `depends_on_all` is supported"),
                    ));
                }
                s.fields.push(key.to_string());
            }
            "loop" => {
                if key == "steps" {
                    let n: usize = value
                        .parse()
                        .map_err(|_| err(line, format!("bad steps `{value}`")))?;
                    s.loop_steps = Some(n);
                } else if key == "periodic" {
                    s.loop_periodic = value.split(',').map(|c| c.trim().to_string()).collect();
                } else {
                    match parse_index(key, "x", line)? {
                        Some(idx) if idx.len() == 1 => {
                            let e = expr(value)?;
                            pending_exprs.push((line, e.clone(), true));
                            if s.loop_coords.insert(idx[0], e).is_some() {
                                return Err(err(line, format!("duplicate entry `{key}`")));
                            }
                        }
                        _ => return Err(err(line, format!("expected x[i] or steps, got `{key}`"))),
                    }
                }
            }
            "sample" => {
                let v: f64 = value
                    .parse()
                    .map_err(|_| err(line, format!("bad number `{value}`")))?;
                s.sample.insert(key.to_string(), v);
            }
            "flags" => {
                let v = match value {
                    "true" => true,
                    "false" => false,
                    other => return Err(err(line, format!("bad flag value `{other}`"))),
                };
                s.flags.insert(key.to_string(), v);
            }
            "" => return Err(err(line, "content before any section header")),
            other => return Err(err(line, format!("unknown section `{other}`"))),
        }
    }
    if s.coords.len() != s.dim {
        return Err(err(
            0,
            format!("chart has {} coords but dim = {}", s.coords.len(), s.dim),
        ));
    }

    // symbol hygiene: everything must be a coordinate, a declared field, a
    // derivative symbol of a declared field, a sample-declared parameter,
    // pi, or (in loops) t
    let mut known: BTreeSet<String> = s.coords.iter().cloned().collect();
    known.extend(s.fields.iter().cloned());
    known.extend(s.sample.keys().cloned());
    known.insert("pi".into());
    for (line, e, allow_t) in &pending_exprs {
        for sym in e.symbols() {
            if known.contains(&sym) || (*allow_t && sym == "t") {
                continue;
            }
            let is_field_deriv = sym
                .strip_prefix("d_")
                .and_then(|rest| {
                    s.fields
                        .iter()
                        .find(|f| rest.starts_with(&format!("{f}_")))
                })
                .is_some();
            if !is_field_deriv {
                return Err(ScenarioError::UndeclaredSymbol {
                    line: *line,
                    symbol: sym,
                });
            }
        }
    }

    // metric symmetry: mirror when only one triangle entry is given,
    // reject contradictions
    let pairs: Vec<(usize, usize)> = s.metric.keys().copied().collect();
    for (i, j) in pairs {
        if i == j {
            continue;
        }
        match (s.metric.get(&(i, j)).cloned(), s.metric.get(&(j, i)).cloned()) {
            (Some(a), Some(b)) => {
                if !a.sub(&b).is_zero() {
                    return Err(ScenarioError::Asymmetric { i, j });
                }
            }
            (Some(a), None) => {
                s.metric.insert((j, i), a);
            }
            _ => {}
        }
    }
    Ok(s)
}

impl Scenario {
    pub fn chart(&self) -> Result<Arc<Chart>, ScenarioError> {
        self.chart_with_extra_fields(&[])
    }

    /// Chart with additional symbolic fields declared on top of the
    /// scenario's own (used to adjoin a symbolic Weyl covector).
    pub fn chart_with_extra_fields(&self, extra: &[String]) -> Result<Arc<Chart>, ScenarioError> {
        let mut f = Fields::empty();
        for name in self.fields.iter().chain(extra) {
            f.declare(name.as_str(), self.coords.clone());
        }
        Ok(Chart::new(self.coords.clone(), f)?)
    }

    pub fn metric_on(&self, chart: Arc<Chart>) -> Result<Metric, ScenarioError> {
        if self.metric.is_empty() {
            return Err(ScenarioError::MissingSection("metric"));
        }
        let mut g = TensorField::zeros(chart, vec![Variance::Down, Variance::Down]);
        for (&(i, j), e) in &self.metric {
            if i >= self.dim || j >= self.dim {
                return Err(err(0, format!("metric index ({i},{j}) out of range")));
            }
            g.set(&[i, j], e.clone());
        }
        Ok(Metric::new(g, &self.sample)?)
    }

    pub fn metric(&self) -> Result<Metric, ScenarioError> {
        self.metric_on(self.chart()?)
    }

    /// Weyl covector from the [weyl] section, on the given chart.
    pub fn weyl_covector(&self, chart: Arc<Chart>) -> Result<TensorField, ScenarioError> {
        if self.weyl.is_empty() {
            return Err(ScenarioError::MissingSection("weyl"));
        }
        let mut w = TensorField::zeros(chart, vec![Variance::Down]);
        for (&i, e) in &self.weyl {
            if i >= self.dim {
                return Err(err(0, format!("weyl index {i} out of range")));
            }
            w.set(&[i], e.clone());
        }
        Ok(w)
    }

    pub fn loop_path(&self, steps_override: Option<usize>) -> Result<LoopPath, ScenarioError> {
        if self.loop_coords.is_empty() {
            return Err(ScenarioError::MissingSection("loop"));
        }
        let chart = self.chart()?;
        let mut coords = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            coords.push(
                self.loop_coords
                    .get(&i)
                    .cloned()
                    .ok_or_else(|| err(0, format!("loop is missing x[{i}]")))?,
            );
        }
        let steps = steps_override
            .or(self.loop_steps)
            .unwrap_or(crate::holonomy::DEFAULT_STEPS);
        let periodic: Vec<bool> = self
            .coords
            .iter()
            .map(|c| self.loop_periodic.contains(c))
            .collect();
        Ok(LoopPath::new_periodic(
            chart,
            vec![Segment::new(coords)],
            steps,
            &periodic,
        )?)
    }

    pub fn flag(&self, name: &str) -> bool {
        self.flags.get(name).copied().unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_round_trip() {
        let s = parse_scenario(
            "[chart]\ndim = 2\ncoords = theta, phi\n[metric]\ng[0][0] = 1\ng[1][1] = sin(theta)^2\n",
        )
        .unwrap();
        assert_eq!(s.dim, 2);
        assert_eq!(s.coords, vec!["theta", "phi"]);
        let m = s.metric().unwrap();
        assert_eq!(m.g.get(&[1, 1]), &parse_expr("sin(theta)^2").unwrap());
        assert!(m.g.get(&[0, 1]).is_zero());
    }

    #[test]
    fn symmetry_mirroring_and_rejection() {
        let s = parse_scenario(
            "[chart]\ndim = 2\ncoords = x, y\n[metric]\ng[0][0] = 1\ng[0][1] = x\ng[1][1] = 2\n",
        )
        .unwrap();
        assert_eq!(s.metric[&(1, 0)], parse_expr("x").unwrap());

        let bad = parse_scenario(
            "[chart]\ndim = 2\ncoords = x, y\n[metric]\ng[0][1] = x\ng[1][0] = y\n",
        );
        assert!(matches!(bad, Err(ScenarioError::Asymmetric { .. })));
    }

    #[test]
    fn undeclared_symbol_is_named() {
        let bad = parse_scenario("[chart]\ndim = 1\ncoords = x\n[metric]\ng[0][0] = q\n");
        match bad {
            Err(ScenarioError::UndeclaredSymbol { symbol, line }) => {
                assert_eq!(symbol, "q");
                assert_eq!(line, 5);
            }
            other => panic!("expected undeclared-symbol error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = parse_scenario("[chart]\ndim = 2\ncoords = x, y\nnonsense\n");
        match bad {
            Err(ScenarioError::Line { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loop_fields_flags_sample() {
        let s = parse_scenario(
            "[chart]\ndim = 2\ncoords = r, phi\n[metric]\ng[0][0] = 1\ng[1][1] = r^2\n\
             [fields]\nbeta = depends_on_all\n[loop]\nx[0] = 1\nx[1] = 2*pi*t\nsteps = 128\n\
             periodic = phi\n[sample]\nM = 0.5\n[flags]\nsign_flip_w = true\n",
        )
        .unwrap();
        assert!(s.flag("sign_flip_w"));
        assert_eq!(s.sample["M"], 0.5);
        let path = s.loop_path(None).unwrap();
        assert_eq!(path.steps, 128);
        assert_eq!(path.periodic, vec![false, true]);
    }
}
