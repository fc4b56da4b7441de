//! Distribution of the projected uniform variable Π_q = γ'X for X uniform
//! on Ω_q: density f_q, cdf F_q, and quantile F_q^{-1}.

use crate::error::{Error, Result};
use crate::specfun::{ibeta, ibeta_inv, ln_beta};

/// Sphere dimension: Ω_q lives in R^{q+1}, so q = 1 is the circle and
/// q = 2 the ordinary sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dim(usize);

impl Dim {
    pub fn new(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("sphere dimension q must be >= 1"));
        }
        Ok(Dim(q))
    }

    /// The sphere dimension q.
    pub fn q(self) -> usize {
        self.0
    }

    /// Dimension of the ambient Euclidean space, q + 1.
    pub fn ambient(self) -> usize {
        self.0 + 1
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Density of Π_q at t ∈ [-1, 1]: B(1/2, q/2)^{-1} (1-t²)^{q/2-1}.
///
/// For q = 1 the density is unbounded at t = ±1 and the exact endpoints
/// return +∞.
pub fn proj_density(q: Dim, t: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&t));
    let qf = q.q() as f64;
    let log_norm = -ln_beta(0.5, qf / 2.0);
    let one_minus = 1.0 - t * t;
    if one_minus == 0.0 {
        return match q.q() {
            1 => f64::INFINITY,
            2 => 0.5,
            _ => 0.0,
        };
    }
    (log_norm + (qf / 2.0 - 1.0) * one_minus.ln()).exp()
}

/// Cdf F_q(x) = (1 + sign(x) I_{x²}(1/2, q/2)) / 2.
///
/// Satisfies F_q(-x) = 1 - F_q(x); the endpoints are exact.
pub fn proj_cdf(q: Dim, x: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&x), "x = {x}");
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    match q.q() {
        1 => 1.0 - x.acos() / std::f64::consts::PI,
        2 => 0.5 * (x + 1.0),
        q => {
            let i = ibeta(x * x, 0.5, q as f64 / 2.0);
            0.5 * (1.0 + x.signum() * i)
        }
    }
}

/// Quantile F_q^{-1}(p), with F_q^{-1}(1/2) = 0 exactly.
///
/// Closed forms for q = 1, 2; otherwise the incomplete-beta inverse with
/// the symmetry of F_q about zero.
pub fn proj_quantile(q: Dim, p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    if p <= 0.0 {
        return -1.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    if p == 0.5 {
        return 0.0;
    }
    match q.q() {
        1 => -(std::f64::consts::PI * p).cos(),
        2 => 2.0 * p - 1.0,
        q => {
            let tail = (2.0 * p - 1.0).abs();
            let x2 = ibeta_inv(tail, 0.5, q as f64 / 2.0);
            let x = x2.sqrt();
            if p > 0.5 {
                x
            } else {
                -x
            }
        }
    }
}
