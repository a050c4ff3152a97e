//! Polar codes over binary-input symmetric channels: density-evolution
//! construction, successive-cancellation decoding, larger kernels and
//! concatenation with short block codes.

pub mod channel;
pub mod concat;
pub mod construct;
pub mod density;
pub mod error;
pub mod gf2;
pub mod kernels;
pub mod llr;
pub mod polar;
pub mod shortcodes;
pub mod sim;

pub use error::{Error, Result};
pub use llr::{Bit, Llr};
