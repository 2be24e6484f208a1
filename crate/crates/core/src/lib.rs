//! Exact q-series arithmetic, eta-quotient analysis and finite congruence
//! verification for the cubic partition function
//! `sum a(n) q^n = 1 / ((q;q)_inf (q^2;q^2)_inf)`.

pub mod arith;
pub mod congruence;
pub mod error;
pub mod etaquot;
pub mod parity;
pub mod qproducts;
pub mod series;

pub use error::{Error, Result};
pub use series::{CoefficientSeries, ModSeries, TruncatedSeries};
