//! Singular values of spherical and discrete Radon transforms, together with
//! Monte Carlo engines that measure how random geodesics, subspaces, lines
//! and arithmetic progressions intersect fixed sets.
//!
//! | module | contents |
//! |--------|----------|
//! | [`specfun`] | log-gamma, Pochhammer symbols, Gegenbauer polynomials, spherical band measures |
//! | [`spectrum`] | eigenvalues of `S_k = R_k* R_k`, their quadrature oracle, correlation eigenvalues |
//! | [`sphere_sim`] | Haar frames, geodesic/subspace sections of spherical bands |
//! | [`convex_sim`] | isotropic ball/cube/simplex, hit-and-run chords, slab zero-one experiment |
//! | [`torus_sim`] | Radon transform over `(Z/pZ)^n` and arithmetic-progression sampling |
//! | [`mc`] | deterministic chunked RNG streams and summary statistics |
//! | [`report`] | experiment reports and their CSV/JSON serialization |

pub mod convex_sim;
pub mod error;
pub mod mc;
pub mod report;
pub mod specfun;
pub mod spectrum;
pub mod sphere_sim;
pub mod torus_sim;

pub use error::{Error, Result};
