//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by the data model and the numeric routines.
///
/// Variants split into two broad categories that front ends map onto
/// distinct exit codes: data/contract violations ([`Error::is_data`]) and
/// numeric degeneracies ([`Error::is_numeric`]).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Header or feature roster does not match the expected schema.
    Schema(String),
    /// A cell could not be parsed; coordinates are 1-based (header excluded).
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    /// Named column (or artifact) does not exist.
    Lookup(String),
    /// Column has the wrong kind for the requested operation.
    Kind {
        column: String,
        expected: &'static str,
    },
    /// Not enough present values to compute the requested quantity.
    InsufficientData(String),
    /// Central moments are undefined because the column is constant.
    UndefinedMoments(String),
    /// Fit rejected a zero-variance column.
    ConstantColumn(String),
    /// Pearson correlation undefined for a pair over its co-present rows.
    UndefinedCorrelation(String, String),
    /// A row shares no observed feature with any donor row.
    UnimputableRow(usize),
    /// A column has no present values to donate from.
    UnimputableColumn(String),
    /// Requested cardinality exceeds what the data can supply.
    Cardinality(String),
    /// Argument outside the mathematical domain of the operation.
    Domain(String),
    /// Invalid range bounds (for example an empty k sweep).
    Range(String),
    /// Vector or matrix shapes are inconsistent.
    Shape(String),
    /// Invalid generator or chart specification.
    Spec(String),
}

impl Error {
    /// True for contract/data violations (bad input, missing columns, shapes).
    pub fn is_data(&self) -> bool {
        !self.is_numeric()
    }

    /// True for numeric degeneracies (zero variance, undefined statistics).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::UndefinedMoments(_)
                | Error::ConstantColumn(_)
                | Error::UndefinedCorrelation(_, _)
                | Error::Domain(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Schema(msg) => write!(f, "schema error: {msg}"),
            Error::Parse {
                row,
                column,
                message,
            } => {
                write!(f, "parse error at row {row}, column {column}: {message}")
            }
            Error::Lookup(name) => write!(f, "unknown column: {name}"),
            Error::Kind { column, expected } => {
                write!(f, "column {column} is not {expected}")
            }
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::UndefinedMoments(col) => {
                write!(f, "moments undefined for constant column {col}")
            }
            Error::ConstantColumn(col) => write!(f, "column {col} has zero variance"),
            Error::UndefinedCorrelation(a, b) => {
                write!(f, "correlation undefined for pair ({a}, {b})")
            }
            Error::UnimputableRow(row) => {
                write!(f, "row {row} shares no observed feature with any donor")
            }
            Error::UnimputableColumn(col) => {
                write!(f, "column {col} has no present values to impute from")
            }
            Error::Cardinality(msg) => write!(f, "cardinality error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Range(msg) => write!(f, "range error: {msg}"),
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            Error::Spec(msg) => write!(f, "invalid spec: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
