//! Terminating ₄F₃ hypergeometric sum at unit argument.

use super::gamma::ln_gamma;

/// ₄F₃(1-k, q+k, (q+1)/2, 3q/2; q+1, q/2+1, (3q+1)/2; 1) for k ≥ 1,
/// q ≥ 2.
///
/// The first numerator parameter 1-k is a non-positive integer, so the
/// series terminates after k terms. Terms are carried as (sign, log
/// magnitude) pairs and combined through a signed log-sum-exp, since the
/// raw Pochhammer products overflow for k in the hundreds. The alternating
/// sum loses roughly one digit per ~3 units of k; callers needing large-k
/// coefficient values should prefer the quadrature route.
pub fn hyp4f3_unit(k: usize, q: usize) -> f64 {
    assert!(k >= 1, "series index k must be positive");
    assert!(q >= 2, "defined for q >= 2");
    let qf = q as f64;
    let num = [1.0 - k as f64, qf + k as f64, (qf + 1.0) / 2.0, 1.5 * qf];
    let den = [qf + 1.0, qf / 2.0 + 1.0, (3.0 * qf + 1.0) / 2.0];

    // Accumulate log-magnitude and sign of each term t_j, then reduce.
    let mut logs = Vec::with_capacity(k);
    let mut signs = Vec::with_capacity(k);
    let mut log_t = 0.0f64;
    let mut sign = 1.0f64;
    logs.push(log_t);
    signs.push(sign);
    for j in 0..(k - 1) {
        let jf = j as f64;
        let mut ratio_log = -( jf + 1.0).ln();
        for &a in &num {
            let f = a + jf;
            ratio_log += f.abs().ln();
            if f < 0.0 {
                sign = -sign;
            }
        }
        for &b in &den {
            ratio_log -= (b + jf).ln();
        }
        log_t += ratio_log;
        logs.push(log_t);
        signs.push(sign);
    }
    let max_log = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = 0.0;
    for (l, s) in logs.iter().zip(&signs) {
        acc += s * (l - max_log).exp();
    }
    acc * max_log.exp()
}

/// Prefactor multiplying the ₄F₃ value in the closed-form Gegenbauer
/// coefficient of the Cramér–von Mises kernel for q ≥ 2:
/// (q-1)² (2k+q-1) Γ((q-1)/2)³ Γ(3q/2) / (8π q² Γ(q/2)³ Γ((3q+1)/2)).
pub fn cvm_coeff_prefactor(k: usize, q: usize) -> f64 {
    let qf = q as f64;
    let kf = k as f64;
    let log = 2.0 * (qf - 1.0).ln() + (2.0 * kf + qf - 1.0).ln()
        + 3.0 * ln_gamma((qf - 1.0) / 2.0)
        + ln_gamma(1.5 * qf)
        - (8.0 * std::f64::consts::PI).ln()
        - 2.0 * qf.ln()
        - 3.0 * ln_gamma(qf / 2.0)
        - ln_gamma((3.0 * qf + 1.0) / 2.0);
    log.exp()
}
