//! Postselected von Neumann measurements on superpositions of Gaussian and
//! Laguerre–Gaussian pointer beams.
//!
//! * [`fock`]: truncated two-mode Fock algebra and displacements.
//! * [`weakmeas`]: preparation, coupling and postselection of the pointer.
//! * [`closedform`]: analytic moments, fields and figures of merit.
//! * [`oracle`]: the same quantities from state vectors, plus comparison
//!   reports.

// `!(x >= tol)` guards must also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod error;
pub mod fock;
pub mod grid;
pub mod moments;
pub mod oracle;
pub mod weakmeas;

pub use closedform::{ClosedForm, FormulaSet, PositionConvention, Snr};
pub use error::{Error, Result};
pub use fock::{DisplaceMethod, Ladder, TwoModeState};
pub use grid::{FieldKind, GridSpec, ScalarField};
pub use moments::{ExpectationSet, Squeezing};
pub use oracle::{OracleRecord, ValidationReport};
pub use weakmeas::{MeasurementParams, WeakValue};
