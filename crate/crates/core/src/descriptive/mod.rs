//! Description-length complexities of states at toy scale: approximating
//! complexity `QCA` and `k`-separability distinguishing complexity `sQCD`,
//! realized as minima over exhaustively enumerated circuits.

mod audit;
mod enumerate;
mod estimate;

pub use audit::{bound_audit, AuditOptions, AuditReport, AuditRow, Check, FittedConstants, FROZEN_CONSTANTS};
pub use enumerate::{
    alphabet, census, enumerate_circuits, enumerate_shape, Enumeration, Shape, DEFAULT_BUDGET,
    ENUMERATION_WIDTH_LIMIT,
};
pub use estimate::{
    basis_overhead, qca, qca_given, qca_with, sqcd, sqcd_pair, sqcd_with, transfer_value, trivial_upper_bound,
    ComplexityEstimate, ComplexityKind, SearchOptions,
};
