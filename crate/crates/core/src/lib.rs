//! Analytic actions of SO°(p,q) on S^p×S^{q−1}, S^{p+q−1} and G×_P S¹,
//! built from parametric circle flows, together with orbit analysis,
//! dimension bookkeeping and seeded verification suites.

pub mod action_engine;
pub mod circleflow;
pub mod cli;
pub mod error;
pub mod ledger;
pub mod numkit;
pub mod orbit_lab;
pub mod report;
pub mod sampling;
pub mod sopq;
pub mod verify;

pub use error::{Error, Result};
pub use numkit::{DenseMatrix, Tolerances};
pub use sopq::{AlgebraElement, GroupElement, Signature};
