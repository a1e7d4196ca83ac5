//! p-adic analysis of constant-recursive sequences.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! * [`localfield`]: capped-precision arithmetic in `Z_p` and in quadratic
//!   extensions of `Q_p` (valuations, inverses, square roots, Hensel lifting,
//!   uniformizer expansions);
//! * [`analytic`]: `log_p`, `exp_p`, `sinh_p`, the Teichmüller map and the
//!   exponent `q` that moves unit roots into the domain of `exp_p`;
//! * [`recurrence`]: linear recurrences over `Z_p`, their characteristic roots,
//!   Binet coefficients and interpolability class;
//! * [`interpolation`]: the (approximate) twisted interpolation family, its
//!   evaluation and `p`-adic limits of subsequences `s(a p^{fn} + b)`;
//! * [`density`]: residues attained modulo `p^α`, residue trees and limiting
//!   densities (empirical for any recurrence, exact for a class of order-2
//!   recurrences).
#![no_std]

extern crate alloc;

pub mod analytic;
pub mod density;
mod error;
pub mod interpolation;
pub mod localfield;
pub mod prime;
pub mod recurrence;

pub use error::{Error, ErrorKind, Result};
pub use localfield::{Digit, ExtensionField, FieldValue, PadicValue, Valuation};
pub use prime::Prime;
