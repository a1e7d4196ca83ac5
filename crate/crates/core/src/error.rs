use alloc::string::String;
use core::fmt;

use crate::localfield::Valuation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Coarse classification of errors, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input itself is malformed (non-prime modulus, bad recurrence, ...).
    Config,
    /// The request lies outside what is implemented or exceeds a budget.
    Unsupported,
    /// The working precision was exhausted before an answer was certified.
    Precision,
    /// A mathematical precondition of the operation is violated.
    Domain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    NotPrime(u64),
    FieldMismatch,
    /// The quadratic modulus has a root in `Q_p`; split it into linear factors.
    SplitModulus,
    UnsupportedExtension(String),
    NotInvertible,
    HenselCriterion {
        f_valuation: Valuation,
        derivative_valuation: Valuation,
    },
    NotASquare,
    OutsideLogDomain,
    OutsideExpDomain,
    /// `sinh_p` divides by 2, which is not a unit for `p = 2`.
    SinhAtTwo,
    NoTeichmullerLift,
    InvalidRecurrence(String),
    SplittingFieldUnsupported(String),
    InsufficientPrecision(String),
    TwoSidedUnavailable,
    InvalidArgument(String),
    StateBudgetExceeded {
        alpha: u32,
        budget: u64,
    },
    ExactDensityUnsupported(String),
    NoClosedForm(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NotPrime(_) | Error::InvalidRecurrence(_) | Error::InvalidArgument(_) => {
                ErrorKind::Config
            }
            Error::SplitModulus
            | Error::UnsupportedExtension(_)
            | Error::SplittingFieldUnsupported(_)
            | Error::StateBudgetExceeded { .. }
            | Error::ExactDensityUnsupported(_)
            | Error::NoClosedForm(_) => ErrorKind::Unsupported,
            Error::InsufficientPrecision(_) | Error::HenselCriterion { .. } => ErrorKind::Precision,
            Error::FieldMismatch
            | Error::NotInvertible
            | Error::NotASquare
            | Error::OutsideLogDomain
            | Error::OutsideExpDomain
            | Error::SinhAtTwo
            | Error::NoTeichmullerLift
            | Error::TwoSidedUnavailable => ErrorKind::Domain,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "p must be prime (got {p})"),
            Error::FieldMismatch => f.write_str("field mismatch"),
            Error::SplitModulus => f.write_str(
                "modulus has distinct roots in Q_p: the extension is trivial, split the modulus into linear factors",
            ),
            Error::UnsupportedExtension(why) => write!(f, "unsupported extension: {why}"),
            Error::NotInvertible => f.write_str("not invertible at this precision"),
            Error::HenselCriterion {
                f_valuation,
                derivative_valuation,
            } => write!(
                f,
                "Hensel criterion not satisfied: v(f(a)) = {f_valuation}, v(f'(a)) = {derivative_valuation}"
            ),
            Error::NotASquare => f.write_str("not a square"),
            Error::OutsideLogDomain => f.write_str("outside log domain (need x = 1 mod pi)"),
            Error::OutsideExpDomain => f.write_str("outside exp domain (need v_p(x) > 1/(p-1))"),
            Error::SinhAtTwo => f.write_str("sinh_p is not available for p = 2"),
            Error::NoTeichmullerLift => f.write_str("no Teichmüller lift of a non-unit"),
            Error::InvalidRecurrence(why) => write!(f, "invalid recurrence: {why}"),
            Error::SplittingFieldUnsupported(why) => {
                write!(f, "splitting field out of supported class: {why}")
            }
            Error::InsufficientPrecision(why) => write!(f, "insufficient precision: {why}"),
            Error::TwoSidedUnavailable => f.write_str(
                "two-sided extension unavailable: the characteristic polynomial has non-unit roots",
            ),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
            Error::StateBudgetExceeded { alpha, budget } => write!(
                f,
                "alpha too large for exact enumeration (alpha = {alpha}, state budget {budget})"
            ),
            Error::ExactDensityUnsupported(why) => {
                write!(f, "exact density unsupported; use empirical mode ({why})")
            }
            Error::NoClosedForm(why) => write!(f, "no closed form found: {why}"),
        }
    }
}

impl core::error::Error for Error {}
