//! Exact arithmetic: polynomials over Q, real algebraic numbers and the
//! case-split engine behind certificates.

pub mod algebraic;
pub mod casesplit;
pub mod mpoly;
pub mod upoly;

pub use algebraic::RealAlgebraic;
pub use casesplit::{CaseAnalysis, CaseSplitError, CaseSystem, Cell, Constraint, Elimination, ObservedValue, Sample, Value};
pub use mpoly::Poly;
pub use upoly::UPoly;
