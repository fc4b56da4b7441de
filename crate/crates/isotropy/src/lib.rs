//! Uniformity tests on the unit hypersphere Ω_q ⊂ R^{q+1}.
//!
//! The library is organised around the projected-ecdf family of test
//! statistics: quadratic discrepancies between the empirical cdf of the
//! projections γ'X_i and the projected uniform cdf F_q, averaged over all
//! projection directions γ. Concrete members are extensions to Ω_q of the
//! Watson (Cramér–von Mises weight), Rothman/Ajne (two-atom weight), and
//! Anderson–Darling tests, together with the classical competitors used in
//! power studies (Rayleigh, Bingham, Ajne, Giné, Bakshaev, and the
//! random-projection Kolmogorov–Smirnov test).
//!
//! Modules, bottom up:
//!
//! * [`specfun`] — special functions and quadrature (incomplete beta,
//!   Gegenbauer/Chebyshev polynomials, Gauss–Legendre rules, a terminating
//!   ₄F₃ sum, cosine integral).
//! * [`projdist`] — density, cdf and quantile of the projected uniform
//!   variable γ'X.
//! * [`kernels`] — the cap-intersection function A(θ, x) and the pair
//!   kernels ψ_q^W for each weight.
//! * [`coeffs`] — Gegenbauer coefficients of the kernels and the mapping
//!   to weighted chi-squared mixtures.
//! * [`chi2mix`] — tail probabilities of Σ_k w_k χ²_{d_k} (Hall–Buckley–
//!   Eagleson and Imhof), asymptotic p-values and quantiles.
//! * [`stat`] — the test statistics themselves and p-value dispatch.
//! * [`sampling`] — uniform and alternative samplers on Ω_q.
//! * [`harness`] — Monte Carlo calibration, null audits, power studies.

pub mod chi2mix;
pub mod coeffs;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod projdist;
pub mod sampling;
pub mod specfun;
pub mod stat;

pub use error::{Error, Result};
pub use projdist::Dim;
