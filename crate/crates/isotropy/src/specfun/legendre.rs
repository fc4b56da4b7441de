//! Gauss–Legendre quadrature rules on [-1, 1].

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

/// Nodes and weights of an `order`-point Gauss–Legendre rule on [-1, 1].
///
/// Exact for polynomials up to degree `2 * order - 1`. Values are immutable
/// after construction; shared instances come from [`gauss_legendre`].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
}

impl QuadratureRule {
    /// Abscissae in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Positive weights summing to 2.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// ∫_a^b f(x) dx by affine transport of the rule.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        half * sum
    }
}

fn build_rule(order: usize) -> QuadratureRule {
    assert!(order >= 1, "quadrature order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Asymptotic initial guess for the i-th root of P_n, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // The guesses enumerate roots from the largest down; store mirrored.
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        order,
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

static RULE_CACHE: Lazy<RwLock<HashMap<usize, Arc<QuadratureRule>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Shared Gauss–Legendre rule of the given order. Rules are computed once
/// per process and cached behind a read-mostly table.
pub fn gauss_legendre(order: usize) -> Arc<QuadratureRule> {
    if let Some(r) = RULE_CACHE.read().unwrap().get(&order) {
        return Arc::clone(r);
    }
    let rule = Arc::new(build_rule(order));
    let mut cache = RULE_CACHE.write().unwrap();
    Arc::clone(cache.entry(order).or_insert(rule))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_symmetric() {
        for &n in &[1usize, 2, 5, 31, 160, 513] {
            let r = gauss_legendre(n);
            let sum: f64 = r.weights().iter().sum();
            assert!((sum - 2.0).abs() < 1e-12, "order {n}");
            for i in 1..n {
                assert!(r.nodes()[i] > r.nodes()[i - 1]);
            }
            for i in 0..n {
                assert!((r.nodes()[i] + r.nodes()[n - 1 - i]).abs() < 1e-12);
            }
            assert!(r.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn exactness_on_monomials() {
        let r160 = gauss_legendre(160);
        assert!((r160.integrate(-1.0, 1.0, |_| 1.0) - 2.0).abs() < 1e-13);
        assert!((r160.integrate(-1.0, 1.0, |x| x * x) - 2.0 / 3.0).abs() < 1e-13);
        // degree 8 <= 2*5-1
        let r5 = gauss_legendre(5);
        assert!((r5.integrate(-1.0, 1.0, |x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-13);
        // degree 2n-1 exact, degree 2n not
        let r3 = gauss_legendre(3);
        assert!((r3.integrate(-1.0, 1.0, |x| x.powi(5)) - 0.0).abs() < 1e-14);
    }

    #[test]
    fn smooth_integrand() {
        let r = gauss_legendre(40);
        let v = r.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn high_order_rule_is_sane() {
        let r = gauss_legendre(5120);
        let sum: f64 = r.weights().iter().sum();
        assert!((sum - 2.0).abs() < 1e-11);
        let v = r.integrate(-1.0, 1.0, |x| (1.0 - x * x).sqrt());
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }
}
