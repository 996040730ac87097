//! Crate-wide error type.

use alloc::string::String;

use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Spec parameters violate a validation rule (ranges, emptiness, …).
    InvalidSpec(String),
    /// Exact rationals were dropped at or before this depth; only the
    /// log-space representation remains.
    ExactBudgetExceeded { depth: u64 },
    /// The operation would materialize more basic intervals (or points)
    /// than the enumeration budget allows.
    EnumerationBudget { requested: u128, limit: u128 },
    /// Configuration points must be pairwise distinct.
    DuplicatePoints,
    /// A product annulus with outer radius not exceeding `√2 ·` inner
    /// radius has no open ring.
    DegenerateAnnulus,
    /// A scaled component escaped its assigned annular ring.
    Containment { component: u32 },
    /// The approximation is too shallow for the requested depth.
    InsufficientDepth { needed: u64, have: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec(why) => write!(f, "invalid spec: {why}"),
            Error::ExactBudgetExceeded { depth } => {
                write!(f, "exact arithmetic budget exceeded at depth {depth}")
            }
            Error::EnumerationBudget { requested, limit } => {
                write!(f, "enumeration of {requested} items exceeds budget {limit}")
            }
            Error::DuplicatePoints => write!(f, "duplicate points in configuration"),
            Error::DegenerateAnnulus => write!(f, "degenerate annulus: R ≤ √2·r"),
            Error::Containment { component } => {
                write!(f, "component {component} escapes its assigned ring")
            }
            Error::InsufficientDepth { needed, have } => {
                write!(f, "operation needs depth {needed}, approximation has {have}")
            }
        }
    }
}
