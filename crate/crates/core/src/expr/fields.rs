//! Declared field symbols and their formal derivative symbols.
//!
//! A field is a named scalar depending on a declared set of coordinates.
//! Differentiating a field symbol produces a formal derivative symbol with
//! the naming convention `d_<field>_<coord>[_<coord>...]`, coordinates kept
//! sorted so mixed partials commute by construction.

use std::collections::BTreeMap;

#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct Fields {
    deps: BTreeMap<String, Vec<String>>,
}

impl Fields {
    pub fn empty() -> Fields {
        Fields::default()
    }

    pub fn declare(&mut self, name: impl Into<String>, coords: Vec<String>) {
        self.deps.insert(name.into(), coords);
    }

    pub fn is_field(&self, name: &str) -> bool {
        self.deps.contains_key(name)
    }

    pub fn depends_on(&self, field: &str, coord: &str) -> bool {
        self.deps
            .get(field)
            .map(|cs| cs.iter().any(|c| c == coord))
            .unwrap_or(false)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.deps.keys()
    }

    /// Interpret a symbol as a field or a formal derivative of one.
    /// Returns (field name, sorted derivative coordinates).
    pub fn split(&self, sym: &str) -> Option<(String, Vec<String>)> {
        if self.is_field(sym) {
            return Some((sym.to_string(), Vec::new()));
        }
        let rest = sym.strip_prefix("d_")?;
        for (field, coords) in &self.deps {
            if let Some(tail) = rest.strip_prefix(field.as_str()) {
                let Some(tail) = tail.strip_prefix('_') else {
                    continue;
                };
                let parts: Vec<&str> = tail.split('_').collect();
                if !parts.is_empty() && parts.iter().all(|p| coords.iter().any(|c| c == *p)) {
                    return Some((field.clone(), parts.iter().map(|s| s.to_string()).collect()));
                }
            }
        }
        None
    }

    /// Symbol name for one more partial derivative of `sym` along `coord`.
    /// None when `sym` is independent of `coord`.
    pub fn derivative_symbol(&self, sym: &str, coord: &str) -> Option<String> {
        let (field, mut coords) = self.split(sym)?;
        if !self.depends_on(&field, coord) {
            return None;
        }
        coords.push(coord.to_string());
        coords.sort();
        Some(encode(&field, &coords))
    }
}

fn encode(field: &str, coords: &[String]) -> String {
    let mut s = String::from("d_");
    s.push_str(field);
    for c in coords {
        s.push('_');
        s.push_str(c);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_symbols_sort_and_commute() {
        let mut f = Fields::empty();
        f.declare("beta", vec!["theta".into(), "phi".into()]);
        let d1 = f.derivative_symbol("beta", "theta").unwrap();
        assert_eq!(d1, "d_beta_theta");
        let d2 = f.derivative_symbol(&d1, "phi").unwrap();
        let d2b = f
            .derivative_symbol(&f.derivative_symbol("beta", "phi").unwrap(), "theta")
            .unwrap();
        assert_eq!(d2, d2b);
        assert_eq!(d2, "d_beta_phi_theta");
    }

    #[test]
    fn non_fields_are_opaque() {
        let f = Fields::empty();
        assert!(f.split("beta").is_none());
        assert!(f.derivative_symbol("sigma", "x").is_none());
    }
}
