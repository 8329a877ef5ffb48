//! Exact Puiseux-series arithmetic, plane tropical curves, Weierstrass models over a
//! valued field, and certification of numerically faithful tropicalizations of elliptic
//! curves with multiplicative reduction.

pub mod cli;
pub mod curve;
pub mod faithful;
pub mod literal;
pub mod newton;
pub mod puiseux;
pub mod rational;
pub mod svg;
pub mod tropical;
pub mod weierstrass;

pub use literal::ParseError;
pub use puiseux::{Precision, PuiseuxSeries, SeriesError, Valuation};
pub use rational::Q;
