//! Built-in scenario catalog, embedded at compile time.

use crate::scenario::{parse_scenario, Scenario, ScenarioError};

pub const NAMES: [&str; 7] = [
    "flat2", "polar2", "sphere2", "flat4", "conf4", "m4", "schw4",
];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "flat2" => include_str!("../scenarios/flat2.scn"),
        "polar2" => include_str!("../scenarios/polar2.scn"),
        "sphere2" => include_str!("../scenarios/sphere2.scn"),
        "flat4" => include_str!("../scenarios/flat4.scn"),
        "conf4" => include_str!("../scenarios/conf4.scn"),
        "m4" => include_str!("../scenarios/m4.scn"),
        "schw4" => include_str!("../scenarios/schw4.scn"),
        _ => return None,
    })
}

pub fn load(name: &str) -> Result<Scenario, ScenarioError> {
    let src = source(name).unwrap_or_else(|| panic!("unknown catalog entry `{name}`"));
    parse_scenario(src)
}
