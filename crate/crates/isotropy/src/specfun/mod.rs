//! Self-contained special functions and quadrature.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! any number of threads; the only shared state is the read-mostly cache
//! of quadrature rules.

mod beta;
mod gamma;
mod gegenbauer;
mod hyper;
mod legendre;
mod trig;

pub use beta::{reg_inc_beta, reg_inc_beta_inv};
pub use gamma::{chi2_sf, ln_beta, ln_gamma, reg_inc_gamma_lower, reg_inc_gamma_upper};
pub use gegenbauer::{gegenbauer, gegenbauer_norm, gegenbauer_scan, PolyOrder};
pub use hyper::{cvm_coeff_prefactor, hyp4f3_unit};
pub use legendre::{gauss_legendre, QuadratureRule};
pub use trig::{cin, cosine_integral};

pub(crate) use beta::{ibeta, ibeta_inv};
