//! Additive combinatorics of finite integer sets: h-fold sumsets, explicit
//! construction families with closed-form sizes, and computation of the
//! achievable-size set R(h, k) = { |hA| : A is a k-element set of integers }
//! with a witness set for every size.
//!
//! The fast path is a dense bit-vector kernel ([`kernel::hfold_sumset`]);
//! an independent composition-enumeration oracle ([`oracle`]) cross-checks
//! it. R(h, k) comes from closed forms, exhaustive canonical search, and
//! construction families ([`range`]), which validate one another wherever
//! they overlap.

pub mod constructions;
pub mod error;
pub mod kernel;
pub mod math;
pub mod oracle;
pub mod range;
pub mod set;

pub use error::{Error, Result};
pub use kernel::{hfold_sumset, Interval, SumsetValue};
pub use range::{RangeResult, SearchConfig};
pub use set::{AffineMap, IntegerSet};
