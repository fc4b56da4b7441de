//! Gegenbauer and Chebyshev polynomials with the L² normalizing constants
//! for the weight (1-z²)^{q/2-1}.

use super::gamma::ln_gamma;

/// Polynomial order parameter: the Gegenbauer order λ for q ≥ 2, or the
/// Chebyshev (first kind) flag that plays the role of the q = 1 limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolyOrder {
    Chebyshev,
    Gegenbauer { lambda: f64 },
}

impl PolyOrder {
    /// The order matching the sphere dimension: Chebyshev for q = 1,
    /// Gegenbauer of order (q-1)/2 for q ≥ 2.
    pub fn for_dimension(q: usize) -> Self {
        assert!(q >= 1);
        if q == 1 {
            PolyOrder::Chebyshev
        } else {
            PolyOrder::Gegenbauer {
                lambda: (q as f64 - 1.0) / 2.0,
            }
        }
    }
}

/// C_k^λ(z) (or T_k(z) for the Chebyshev flag).
///
/// Gegenbauer values follow the three-term recurrence
/// k C_k = 2(k+λ-1) z C_{k-1} - (k+2λ-2) C_{k-2}, C_0 = 1, C_1 = 2λz.
/// Growth in k is polynomial for |z| ≤ 1, so the recurrence runs in plain
/// double precision without renormalization.
pub fn gegenbauer(k: usize, order: PolyOrder, z: f64) -> f64 {
    match order {
        PolyOrder::Chebyshev => (k as f64 * z.clamp(-1.0, 1.0).acos()).cos(),
        PolyOrder::Gegenbauer { lambda } => {
            assert!(lambda > 0.0, "Gegenbauer order must be positive");
            if k == 0 {
                return 1.0;
            }
            let mut prev = 1.0;
            let mut cur = 2.0 * lambda * z;
            for j in 2..=k {
                let jf = j as f64;
                let next =
                    (2.0 * (jf + lambda - 1.0) * z * cur - (jf + 2.0 * lambda - 2.0) * prev) / jf;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Runs `visit(k, value)` over C_k(z) for k = 0..=k_max in a single
/// recurrence pass. This is the O(k_max) path used when whole coefficient
/// families are accumulated at once.
pub fn gegenbauer_scan(order: PolyOrder, z: f64, k_max: usize, mut visit: impl FnMut(usize, f64)) {
    match order {
        PolyOrder::Chebyshev => {
            let theta = z.clamp(-1.0, 1.0).acos();
            for k in 0..=k_max {
                visit(k, (k as f64 * theta).cos());
            }
        }
        PolyOrder::Gegenbauer { lambda } => {
            let mut prev = 1.0;
            visit(0, prev);
            if k_max == 0 {
                return;
            }
            let mut cur = 2.0 * lambda * z;
            visit(1, cur);
            for j in 2..=k_max {
                let jf = j as f64;
                let next =
                    (2.0 * (jf + lambda - 1.0) * z * cur - (jf + 2.0 * lambda - 2.0) * prev) / jf;
                prev = cur;
                cur = next;
                visit(j, next);
            }
        }
    }
}

/// Normalizing constant c_{k,q} = ∫_{-1}^{1} C_k(z)² (1-z²)^{q/2-1} dz.
///
/// For q = 1 this is (1+δ_{k0}) π/2; for q ≥ 2,
/// c_{k,q} = 2^{3-q} π Γ(q+k-1) / ((q+2k-1) k! Γ((q-1)/2)²).
pub fn gegenbauer_norm(k: usize, q: usize) -> f64 {
    assert!(q >= 1);
    if q == 1 {
        let delta = if k == 0 { 1.0 } else { 0.0 };
        return (1.0 + delta) * std::f64::consts::FRAC_PI_2;
    }
    let qf = q as f64;
    let kf = k as f64;
    let log_num = (3.0 - qf) * std::f64::consts::LN_2
        + std::f64::consts::PI.ln()
        + ln_gamma(qf + kf - 1.0);
    let log_den =
        (qf + 2.0 * kf - 1.0).ln() + ln_gamma(kf + 1.0) + 2.0 * ln_gamma((qf - 1.0) / 2.0);
    (log_num - log_den).exp()
}
