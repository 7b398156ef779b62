//! Continued-fraction cylinder geometry, certified Gauss-measure bounds,
//! s-gale constructions and the diagonal counterexample machinery.
//!
//! Everything numeric is either an exact rational or an [`Enclosure`]: an
//! interval with dyadic endpoints that provably contains the real value.

pub mod bigfloat;
pub mod bridge;
pub mod cf;
pub mod construction;
pub mod dyadic;
pub mod enclosure;
pub mod error;
pub mod gale;
pub mod measure;
pub mod verdict;
pub mod verify;

pub use bigfloat::{BigFloat, Round};
pub use cf::{CfWord, Convergents, Fan, RatInterval};
pub use dyadic::DyadicWord;
pub use enclosure::Enclosure;
pub use error::{Error, Result};
pub use verdict::{Status, Verdict};
