//! Maximal operators, contraction semigroups and rank-one Dunkl analysis on
//! discretized domains, with seeded verification suites for the associated
//! weak- and strong-type inequalities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axis;
pub mod cli;
pub mod domain;
pub mod dunkl;
pub mod error;
pub mod maximal;
pub mod semigroups;
pub mod special;
pub mod verification;

pub use error::{Error, Result};
