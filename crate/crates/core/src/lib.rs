//! Symbolic tensor calculus for Weyl geometry, with a formal action-integrand
//! algebra and a numeric parallel-transport lab.

pub mod actions;
pub mod catalog;
pub mod checks;
pub mod expr;
pub mod holonomy;
pub mod report;
pub mod riemann;
pub mod scenario;
pub mod tensor;
pub mod weyl;
