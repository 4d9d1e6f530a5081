//! Special functions behind every closed form in the crate.
//!
//! Everything here is pure and reentrant.

mod band;
mod gamma;
pub(crate) mod gegenbauer;
pub mod quadrature;

pub use band::{band_measure, band_threshold, BandSpec};
pub use gamma::{log_binomial, log_factorial, log_gamma, log_pochhammer, tau, SignedLog};
pub use gegenbauer::{gegenbauer_eval, gegenbauer_expansion, gegenbauer_normalized, GegenbauerParams};
