//! Gegenbauer/Chebyshev coefficients of the kernels ψ_q^W and their
//! mapping to weighted chi-squared mixtures.
//!
//! The coefficient of degree k of θ ↦ A(θ, x) is a_{k,q}^x; integrating it
//! against dW(F_q(x)) gives the kernel coefficient b_{k,q}^W. Closed forms
//! exist for the Cramér–von Mises, Anderson–Darling (q ≤ 2), and Rothman
//! weights; a quadrature route covers the rest. The asymptotic null law of
//! the statistic is Σ_k w_k χ²_{d_{k,q}} with w_k = b_k/2 for q = 1 and
//! b_k/(1 + 2k/(q-1)) for q ≥ 2.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;

use crate::chi2mix::ChiSqMixture;
use crate::error::{Error, Result};
use crate::kernels::WeightSpec;
use crate::projdist::{proj_cdf, proj_quantile, Dim};
use crate::specfun::{gauss_legendre, gegenbauer_scan, ln_gamma, PolyOrder};

/// Quadrature order of the high-accuracy coefficient path.
pub const COEFF_QUAD_ORDER: usize = 5120;

/// Default truncation length of coefficient sequences.
pub const DEFAULT_K_MAX: usize = 50_000;

/// Dimension d_{k,q} of the k-th eigenspace: C(q+k-2, q-1) + C(q+k-1, q-1).
///
/// Returned as f64: the value is exact while it fits the 53-bit mantissa
/// (always for q ≤ 3 at the truncations used here) and correctly rounded
/// beyond, where d_{k,q} only ever enters products with far-sub-unit
/// weights. d_{k,1} = 2 for all k ≥ 1.
pub fn eigen_dim(k: usize, q: Dim) -> f64 {
    assert!(k >= 1);
    let r = q.q() - 1;
    let binom = |shift: usize| -> f64 {
        // C(k - 1 + shift + r, r) as a running product over small r.
        let base = (k - 1 + shift) as f64;
        let mut v = 1.0;
        for j in 1..=r {
            v *= (base + j as f64) / j as f64;
        }
        v
    };
    binom(0) + binom(1)
}

/// Gegenbauer coefficient a_{k,q}^x of the cap-intersection function
/// θ ↦ A(θ, x).
pub fn a_coeff(k: usize, q: Dim, x: f64) -> f64 {
    if k == 0 {
        let f = proj_cdf(q, x);
        return f * f;
    }
    if q.q() == 1 {
        let kf = k as f64;
        let t2k = (2.0 * kf * x.clamp(-1.0, 1.0).acos()).cos();
        return (1.0 - t2k) / (kf * kf * std::f64::consts::PI * std::f64::consts::PI);
    }
    let mut out = 0.0;
    a_coeff_family(q, x, k, |j, v| {
        if j == k {
            out = v;
        }
    });
    out
}

/// Runs `visit(k, a_{k,q}^x)` for k = 0..=k_max in one O(k_max) pass.
///
/// For q ≥ 2, a_{k,q}^x = (1 + 2k/(q-1)) τ_{k,q} (1-x²)^q
/// (C_{k-1}^{(q+1)/2}(x))² with τ_{k,q} = (2^{q-1} Γ((q+1)/2)² Γ(k) /
/// (π Γ(k+q)))²; τ is carried by its ratio τ_k/τ_{k-1} = ((k-1)/(k+q-1))²,
/// so no large factorials appear.
pub fn a_coeff_family(q: Dim, x: f64, k_max: usize, mut visit: impl FnMut(usize, f64)) {
    let f = proj_cdf(q, x);
    visit(0, f * f);
    if k_max == 0 {
        return;
    }
    if q.q() == 1 {
        let alpha = x.clamp(-1.0, 1.0).acos();
        for k in 1..=k_max {
            let kf = k as f64;
            let v = (1.0 - (2.0 * kf * alpha).cos())
                / (kf * kf * std::f64::consts::PI * std::f64::consts::PI);
            visit(k, v);
        }
        return;
    }
    let qf = q.q() as f64;
    // τ at k = 1: (2^{q-1} Γ((q+1)/2)² / (π Γ(1+q)))².
    let log_tau1 = 2.0
        * ((qf - 1.0) * std::f64::consts::LN_2 + 2.0 * ln_gamma((qf + 1.0) / 2.0)
            - std::f64::consts::PI.ln()
            - ln_gamma(1.0 + qf));
    let mut tau = log_tau1.exp();
    let pow = (1.0 - x * x).powi(q.q() as i32);
    let order = PolyOrder::Gegenbauer {
        lambda: (qf + 1.0) / 2.0,
    };
    gegenbauer_scan(order, x, k_max - 1, |j, c| {
        let k = j + 1;
        let kf = k as f64;
        if k > 1 {
            let r = (kf - 1.0) / (kf + qf - 1.0);
            tau *= r * r;
        }
        let v = (1.0 + 2.0 * kf / (qf - 1.0)) * tau * pow * c * c;
        visit(k, v);
    });
}

/// Cramér–von Mises coefficients b_{k,q}^CvM: closed forms for q ≤ 3, the
/// high-accuracy quadrature route beyond.
pub fn b_cvm(k: usize, q: Dim) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    if k == 0 {
        return 1.0 / 3.0;
    }
    let kf = k as f64;
    match q.q() {
        1 => 1.0 / (pi2 * kf * kf),
        2 => 1.0 / (2.0 * (2.0 * kf + 3.0) * (2.0 * kf - 1.0)),
        3 => {
            if k == 1 {
                35.0 / (72.0 * pi2)
            } else {
                (3.0 * kf * kf + 6.0 * kf + 4.0)
                    / (2.0 * pi2 * kf * kf * (kf + 1.0) * (kf + 2.0) * (kf + 2.0))
            }
        }
        _ => b_coeff_generic(&WeightSpec::Cvm, k, q, COEFF_QUAD_ORDER)
            .expect("CvM weight is always valid"),
    }
}

/// Anderson–Darling coefficients; closed forms for q ≤ 2, quadrature
/// beyond. b_{0,q}^AD = -1 for every q.
pub fn b_ad(k: usize, q: Dim) -> f64 {
    if k == 0 {
        return -1.0;
    }
    let kf = k as f64;
    match q.q() {
        1 => {
            // (1/(π k²)) ∫_0^π (1 - cos 2kθ)/((π-θ)θ) dθ; splitting the
            // rational factor and folding θ -> π-θ turns the integral into
            // 2 Cin(2kπ), giving 2 Cin(2kπ)/(π² k²).
            let pi = std::f64::consts::PI;
            2.0 * crate::specfun::cin(2.0 * kf * pi) / (pi * pi * kf * kf)
        }
        2 => 1.0 / (kf * (kf + 1.0)),
        _ => b_coeff_generic(&WeightSpec::AndersonDarling, k, q, COEFF_QUAD_ORDER)
            .expect("AD weight is always valid"),
    }
}

/// Direct quadrature of the circular Anderson–Darling coefficient
/// integral, the independent oracle for the Cin-based closed form.
pub fn b_ad_circle_quadrature(k: usize) -> f64 {
    assert!(k >= 1);
    let pi = std::f64::consts::PI;
    let kf = k as f64;
    // The integrand (1 - cos 2kθ)/((π-θ)θ) is bounded (zeros of the
    // numerator cancel both poles); resolve its 2k oscillations with
    // panels scaled to the frequency.
    let rule = gauss_legendre(32);
    let panels = 8 * k.max(4);
    let mut sum = 0.0;
    for j in 0..panels {
        let a = pi * j as f64 / panels as f64;
        let b = pi * (j + 1) as f64 / panels as f64;
        sum += rule.integrate(a, b, |theta| {
            (1.0 - (2.0 * kf * theta).cos()) / ((pi - theta) * theta)
        });
    }
    sum / (pi * kf * kf)
}

/// Rothman coefficients: closed form for q = 1, the single a-coefficient
/// at x = F_q^{-1}(t_m) for q ≥ 2.
pub fn b_rothman(k: usize, q: Dim, t: f64) -> f64 {
    let tm = t.min(1.0 - t);
    if k == 0 {
        return 0.5 - tm * (1.0 - tm);
    }
    let kf = k as f64;
    if q.q() == 1 {
        let pi = std::f64::consts::PI;
        let s = (kf * pi * tm).sin();
        2.0 * s * s / (kf * kf * pi * pi)
    } else {
        a_coeff(k, q, proj_quantile(q, tm))
    }
}

/// Generic coefficient b_{k,q}^W = ∫ a_{k,q}^x dW(F_q(x)) for a single k.
///
/// Probability densities and the AD weight integrate in u = F_q(x)
/// coordinates under the high-accuracy rule; atomic weights evaluate the
/// a-coefficient directly. For AD the integrand a/(u(1-u)) stays bounded
/// at the endpoints because a_{k,q}^x vanishes like (1-x²)^q.
pub fn b_coeff_generic(weight: &WeightSpec, k: usize, q: Dim, order: usize) -> Result<f64> {
    let mut family = Vec::new();
    family_impl(weight, q, k, order, &mut family)?;
    Ok(family[k])
}

/// Coefficient sequence b_{0..K} of a kernel, with its provenance.
#[derive(Debug, Clone)]
pub struct CoeffSeq {
    weight_id: String,
    q: usize,
    b: Vec<f64>,
}

impl CoeffSeq {
    pub fn weight_id(&self) -> &str {
        &self.weight_id
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Coefficients b_0..=b_K.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn k_max(&self) -> usize {
        self.b.len() - 1
    }

    /// Mixture weights and degrees of freedom of the asymptotic null law
    /// Σ_{k≥1} w_k χ²_{d_{k,q}}, truncated at `k_max` terms. b_0 is the
    /// centering constant and is dropped; zero weights are dropped;
    /// negative coefficients (a non-positive-definite weight) are
    /// rejected.
    pub fn mixture(&self, k_max: usize) -> Result<ChiSqMixture> {
        let q = Dim::new(self.q)?;
        let k_top = k_max.min(self.k_max());
        let mut terms = Vec::with_capacity(k_top);
        for k in 1..=k_top {
            let b = self.b[k];
            if b < 0.0 {
                return Err(Error::invalid(format!(
                    "negative Gegenbauer coefficient b_{k} = {b}; weight is not positive-definite"
                )));
            }
            if b == 0.0 {
                continue;
            }
            let w = if self.q == 1 {
                b / 2.0
            } else {
                b / (1.0 + 2.0 * k as f64 / (self.q as f64 - 1.0))
            };
            terms.push((w, eigen_dim(k, q)));
        }
        ChiSqMixture::new(terms)
    }

    /// Writes the sequence as a little-endian binary file: magic "ISOC",
    /// format version, q, weight id, then the coefficient doubles.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(b"ISOC")?;
        f.write_all(&1u32.to_le_bytes())?;
        f.write_all(&(self.q as u64).to_le_bytes())?;
        let id = self.weight_id.as_bytes();
        f.write_all(&(id.len() as u64).to_le_bytes())?;
        f.write_all(id)?;
        f.write_all(&(self.b.len() as u64).to_le_bytes())?;
        for &v in &self.b {
            f.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let mut f = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != b"ISOC" {
            return Err(Error::invalid("not a coefficient cache file"));
        }
        let mut u32b = [0u8; 4];
        f.read_exact(&mut u32b)?;
        if u32::from_le_bytes(u32b) != 1 {
            return Err(Error::invalid("unsupported coefficient cache version"));
        }
        let mut u64b = [0u8; 8];
        f.read_exact(&mut u64b)?;
        let q = u64::from_le_bytes(u64b) as usize;
        f.read_exact(&mut u64b)?;
        let id_len = u64::from_le_bytes(u64b) as usize;
        if id_len > 4096 {
            return Err(Error::invalid("corrupt coefficient cache header"));
        }
        let mut id = vec![0u8; id_len];
        f.read_exact(&mut id)?;
        f.read_exact(&mut u64b)?;
        let n = u64::from_le_bytes(u64b) as usize;
        let mut b = Vec::with_capacity(n);
        let mut buf = [0u8; 8];
        for _ in 0..n {
            f.read_exact(&mut buf)?;
            b.push(f64::from_le_bytes(buf));
        }
        Ok(CoeffSeq {
            weight_id: String::from_utf8_lossy(&id).into_owned(),
            q,
            b,
        })
    }
}

type CacheKey = (String, usize, usize);

static COEFF_CACHE: Lazy<RwLock<HashMap<CacheKey, Arc<CoeffSeq>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// The coefficient sequence for (weight, q) with at least `k_max + 1`
/// entries, built with the most specific available expression and cached
/// in memory per (weight, q, order).
pub fn coeff_seq(weight: &WeightSpec, q: Dim, k_max: usize, order: usize) -> Result<Arc<CoeffSeq>> {
    let key: CacheKey = (weight.id(), q.q(), order);
    if let Some(seq) = COEFF_CACHE.read().unwrap().get(&key) {
        if seq.k_max() >= k_max {
            return Ok(Arc::clone(seq));
        }
    }
    let mut b = Vec::new();
    family_impl(weight, q, k_max, order, &mut b)?;
    clamp_negative_noise(&mut b);
    let seq = Arc::new(CoeffSeq {
        weight_id: weight.id(),
        q: q.q(),
        b,
    });
    let mut cache = COEFF_CACHE.write().unwrap();
    let entry = cache.entry(key).or_insert_with(|| Arc::clone(&seq));
    if entry.k_max() < seq.k_max() {
        *entry = Arc::clone(&seq);
    }
    Ok(Arc::clone(entry))
}

/// Quadrature noise can leave coefficients that are mathematically
/// non-negative a hair below zero deep in the tail; zero those without
/// masking a genuinely indefinite weight.
fn clamp_negative_noise(b: &mut [f64]) {
    let max = b.iter().skip(1).fold(0.0f64, |m, &v| m.max(v.abs()));
    let tol = 1e-10 * max;
    for v in b.iter_mut().skip(1) {
        if *v < 0.0 && *v > -tol {
            *v = 0.0;
        }
    }
}

fn family_impl(
    weight: &WeightSpec,
    q: Dim,
    k_max: usize,
    order: usize,
    out: &mut Vec<f64>,
) -> Result<()> {
    out.clear();
    out.resize(k_max + 1, 0.0);
    match (weight, q.q()) {
        (WeightSpec::Cvm, 1..=3) => {
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = b_cvm(k, q);
            }
        }
        (WeightSpec::AndersonDarling, 1..=2) => {
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = b_ad(k, q);
            }
        }
        (WeightSpec::Rothman { t }, 1) => {
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = b_rothman(k, q, *t);
            }
        }
        (WeightSpec::Rothman { t }, _) => {
            let tm = t.min(1.0 - *t);
            let x_m = proj_quantile(q, tm);
            a_coeff_family(q, x_m, k_max, |k, a| out[k] = a);
            out[0] = 0.5 - tm * (1.0 - tm);
        }
        (WeightSpec::Dirac { u }, _) => {
            if *u == 1.0 {
                a_coeff_family(q, 1.0, k_max, |k, a| out[k] = a);
            } else {
                let tm = u.min(1.0 - u);
                let x_lo = proj_quantile(q, tm);
                let x_hi = proj_quantile(q, 1.0 - tm);
                a_coeff_family(q, x_lo, k_max, |k, a| out[k] = 0.5 * a);
                a_coeff_family(q, x_hi, k_max, |k, a| out[k] += 0.5 * a);
            }
        }
        (WeightSpec::Cvm | WeightSpec::AndersonDarling, _) => {
            quadrature_family(weight, q, k_max, order, out);
            out[0] = if matches!(weight, WeightSpec::AndersonDarling) {
                -1.0 // regularized value; the raw k = 0 integral diverges
            } else {
                1.0 / 3.0
            };
        }
        (WeightSpec::Density { cdf, .. }, _) => {
            stieltjes_family(cdf.as_ref(), q, k_max, out);
        }
    }
    Ok(())
}

/// b_k = ∫_0^1 a_{k,q}^{F_q^{-1}(u)} h(u) du under the high-accuracy rule,
/// where h ≡ 1 for the CvM weight and h(u) = 1/(u(1-u)) for AD.
///
/// One Gegenbauer recurrence pass per node accumulates every k at once;
/// node blocks run in parallel and reduce in a fixed order, so the result
/// does not depend on scheduling.
fn quadrature_family(weight: &WeightSpec, q: Dim, k_max: usize, order: usize, out: &mut [f64]) {
    use rayon::prelude::*;
    let rule = gauss_legendre(order);
    let nodes: Vec<(f64, f64)> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&z, &w)| (0.5 * (z + 1.0), 0.5 * w))
        .collect();
    let ad = matches!(weight, WeightSpec::AndersonDarling);
    let partials: Vec<Vec<f64>> = nodes
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = vec![0.0; k_max + 1];
            for &(u, w) in chunk {
                let x = proj_quantile(q, u);
                let h = if ad { 1.0 / (u * (1.0 - u)) } else { 1.0 };
                a_coeff_family(q, x, k_max, |k, a| acc[k] += w * h * a);
            }
            acc
        })
        .collect();
    for slot in out.iter_mut() {
        *slot = 0.0;
    }
    for part in partials {
        for (slot, v) in out.iter_mut().zip(part) {
            *slot += v;
        }
    }
}

/// Midpoint Riemann–Stieltjes integration against a user cdf, for weights
/// only available through W.
fn stieltjes_family(
    cdf: &(dyn Fn(f64) -> f64 + Send + Sync),
    q: Dim,
    k_max: usize,
    out: &mut [f64],
) {
    let panels = 8192;
    for slot in out.iter_mut() {
        *slot = 0.0;
    }
    let mut w_prev = cdf(0.0);
    for j in 0..panels {
        let u_hi = (j + 1) as f64 / panels as f64;
        let u_mid = (j as f64 + 0.5) / panels as f64;
        let w_hi = cdf(u_hi);
        let mass = w_hi - w_prev;
        w_prev = w_hi;
        if mass == 0.0 {
            continue;
        }
        let x = proj_quantile(q, u_mid);
        a_coeff_family(q, x, k_max, |k, a| out[k] += mass * a);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{cvm_coeff_prefactor, gegenbauer, gegenbauer_norm, hyp4f3_unit};
    use std::f64::consts::PI;

    fn dim(q: usize) -> Dim {
        Dim::new(q).unwrap()
    }

    #[test]
    fn eigen_dims() {
        assert_eq!(eigen_dim(3, dim(1)), 2.0);
        assert_eq!(eigen_dim(1, dim(2)), 3.0);
        assert_eq!(eigen_dim(2, dim(2)), 5.0);
        for k in 1..=20 {
            assert_eq!(eigen_dim(k, dim(1)), 2.0);
            assert_eq!(eigen_dim(k, dim(2)), 2.0 * k as f64 + 1.0);
        }
        // q = 3: C(k+1,2) + C(k+2,2) = (k+1)^2.
        for k in 1..=10 {
            assert_eq!(eigen_dim(k, dim(3)), ((k + 1) * (k + 1)) as f64);
        }
    }

    #[test]
    fn a_coeff_values() {
        for &q in &[1usize, 2, 5] {
            for &x in &[-0.7, 0.0, 0.4] {
                let f = proj_cdf(dim(q), x);
                assert!((a_coeff(0, dim(q), x) - f * f).abs() < 1e-14);
            }
            // (1-x^2)^q factor kills k >= 1 at the poles for q >= 2.
            if q >= 2 {
                assert_eq!(a_coeff(3, dim(q), 1.0), 0.0);
                assert_eq!(a_coeff(2, dim(q), -1.0), 0.0);
            }
        }
        // q=1, k=2, x=0: T_4(0) = 1 so the coefficient vanishes.
        assert!(a_coeff(2, dim(1), 0.0).abs() < 1e-15);
    }

    #[test]
    fn a_family_matches_direct_gegenbauer_projection() {
        // Project A(θ, x) onto the basis by quadrature in θ and compare.
        let rule = gauss_legendre(320);
        for &q in &[2usize, 3] {
            let x = 0.3;
            for k in 0..=6usize {
                let order = PolyOrder::for_dimension(q);
                let num = rule.integrate(0.0, PI, |th| {
                    crate::kernels::cap_intersection(dim(q), th, x)
                        * gegenbauer(k, order, th.cos())
                        * th.sin().powi(q as i32 - 1)
                });
                let projected = num / gegenbauer_norm(k, q);
                let direct = a_coeff(k, dim(q), x);
                assert!(
                    (projected - direct).abs() < 1e-8,
                    "q={q} k={k}: {projected} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn cvm_closed_forms() {
        let pi2 = PI * PI;
        assert!((b_cvm(1, dim(1)) - 1.0 / pi2).abs() < 1e-15);
        assert!((b_cvm(2, dim(2)) - 1.0 / 42.0).abs() < 1e-15);
        assert!((b_cvm(1, dim(3)) - 35.0 / (72.0 * pi2)).abs() < 1e-15);
        for &q in &[1usize, 2, 3] {
            assert!((b_cvm(0, dim(q)) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cvm_hypergeometric_route_matches_closed_forms() {
        // Prefactor times the terminating 4F3 against the printed q = 2, 3
        // closed forms, k <= 10.
        for &q in &[2usize, 3] {
            for k in 1..=10usize {
                let via_hyp = cvm_coeff_prefactor(k, q) * hyp4f3_unit(k, q);
                let closed = b_cvm(k, dim(q));
                assert!(
                    (via_hyp - closed).abs() < 1e-10 * closed.max(1e-3),
                    "q={q} k={k}: {via_hyp} vs {closed}"
                );
            }
        }
        // b_{3,2} = 1/90 pins the example value hyp4f3(3,2) = 1/21.
        assert!((cvm_coeff_prefactor(3, 2) * (1.0 / 21.0) - 1.0 / 90.0).abs() < 1e-15);
    }

    #[test]
    fn ad_closed_forms() {
        assert!((b_ad(3, dim(2)) - 1.0 / 12.0).abs() < 1e-15);
        for &q in &[1usize, 2, 3, 7] {
            assert_eq!(b_ad(0, dim(q)), -1.0);
        }
        // Cin route against the direct oscillatory quadrature.
        for k in 1..=50usize {
            let closed = b_ad(k, dim(1));
            let quad = b_ad_circle_quadrature(k);
            assert!((closed - quad).abs() < 1e-11, "k={k}: {closed} vs {quad}");
        }
        // O(log k / k^2) decay: k^2 b_k / log k stays bounded.
        let ratio40 = 1600.0 * b_ad(40, dim(1)) / 40f64.ln();
        let ratio400 = 160_000.0 * b_ad(400, dim(1)) / 400f64.ln();
        assert!(ratio40 < 2.0 && ratio400 < 2.0 && ratio400 > 0.3);
    }

    #[test]
    fn rothman_closed_forms() {
        assert!(b_rothman(2, dim(1), 0.5).abs() < 1e-30);
        assert!((b_rothman(1, dim(1), 0.5) - 2.0 / (PI * PI)).abs() < 1e-15);
        assert!((b_rothman(0, dim(2), 1.0 / 3.0) - 5.0 / 18.0).abs() < 1e-15);
        // Even coefficients vanish at t = 1/2 for every q (Ajne).
        for &q in &[2usize, 3] {
            for k in [2usize, 4, 6] {
                assert!(b_rothman(k, dim(q), 0.5).abs() < 1e-14, "q={q} k={k}");
            }
        }
    }

    #[test]
    fn generic_matches_closed_forms() {
        // CvM: |closed - generic| <= 1e-7 for q in {1,2}, k <= 20.
        for &q in &[1usize, 2] {
            for k in 1..=20usize {
                let gen = b_coeff_generic(&WeightSpec::Cvm, k, dim(q), 640).unwrap();
                let closed = b_cvm(k, dim(q));
                assert!((gen - closed).abs() < 1e-7, "cvm q={q} k={k} {gen} {closed}");
            }
        }
        // AD via the u-substitution against the closed forms, 1e-6.
        for &q in &[1usize, 2] {
            for k in 1..=20usize {
                let gen = b_coeff_generic(&WeightSpec::AndersonDarling, k, dim(q), 640).unwrap();
                let closed = b_ad(k, dim(q));
                assert!((gen - closed).abs() < 1e-6, "ad q={q} k={k} {gen} {closed}");
            }
        }
        // Dirac(t_m) evaluates the a-coefficient directly.
        let t = 0.3;
        for k in 1..=8usize {
            let gen = b_coeff_generic(&WeightSpec::dirac(t).unwrap(), k, dim(2), 640).unwrap();
            let direct = a_coeff(k, dim(2), proj_quantile(dim(2), t));
            assert!((gen - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn ad_generic_integrand_bounded_at_endpoints() {
        // a_{k,q}^x / (u(1-u)) stays finite as u -> 0, 1 because a
        // vanishes like (1-x^2)^q ~ u^2.
        for &q in &[2usize, 3, 10] {
            for &u in &[1e-6, 1e-4, 1.0 - 1e-4, 1.0 - 1e-6] {
                let x = proj_quantile(dim(q), u);
                let v = a_coeff(2, dim(q), x) / (u * (1.0 - u));
                assert!(v.is_finite() && v.abs() < 10.0, "q={q} u={u} v={v}");
            }
        }
    }

    #[test]
    fn mixture_mapping() {
        // CvM q=1: w_k = 1/(2 π² k²), d_k = 2; mixture mean -> 1/6.
        let seq = coeff_seq(&WeightSpec::Cvm, dim(1), 2000, 640).unwrap();
        let mix = seq.mixture(2000).unwrap();
        let mean: f64 = mix.terms().iter().map(|&(w, d)| w * d).sum();
        assert!((mean - 1.0 / 6.0).abs() < 1e-3);
        let (w1, d1) = mix.terms()[0];
        assert!((w1 - 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
        assert_eq!(d1, 2.0);

        // AD q=2: w_k = 1/(k(k+1)(2k+1)), d_k = 2k+1; mean -> 1.
        let seq = coeff_seq(&WeightSpec::AndersonDarling, dim(2), 2000, 640).unwrap();
        let mix = seq.mixture(2000).unwrap();
        let mean: f64 = mix.terms().iter().map(|&(w, d)| w * d).sum();
        assert!((mean - 1.0).abs() < 1e-3);
        let (w2, d2) = mix.terms()[1];
        assert!((w2 - 1.0 / (2.0 * 3.0 * 5.0)).abs() < 1e-15);
        assert_eq!(d2, 5.0);

        // Rothman t=1/2, q=1: even-k weights dropped as exact zeros.
        let seq = coeff_seq(&WeightSpec::rothman(0.5).unwrap(), dim(1), 100, 640).unwrap();
        let mix = seq.mixture(100).unwrap();
        assert_eq!(mix.terms().len(), 50);
    }

    #[test]
    fn kernel_reconstruction() {
        // Partial Gegenbauer sums of the coefficients reproduce the
        // kernels within 1e-3 at K = 1000 for q = 2.
        let q = dim(2);
        let order = PolyOrder::for_dimension(2);
        for (w, psi_exact) in [
            (
                WeightSpec::Cvm,
                Box::new(|th: f64| crate::kernels::psi_cvm(dim(2), th)) as Box<dyn Fn(f64) -> f64>,
            ),
            (
                WeightSpec::rothman(1.0 / 3.0).unwrap(),
                Box::new(|th: f64| crate::kernels::psi_rothman(dim(2), th, 1.0 / 3.0)),
            ),
        ] {
            let seq = coeff_seq(&w, q, 1000, 640).unwrap();
            for j in 1..20 {
                let theta = PI * j as f64 / 20.0;
                let mut sum = 0.0;
                gegenbauer_scan(order, theta.cos(), 1000, |k, c| {
                    sum += seq.b()[k] * c;
                });
                let exact = psi_exact(theta);
                assert!(
                    (sum - exact).abs() < 1e-3,
                    "{w:?} theta={theta}: {sum} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn cap_reconstruction_from_a_coeffs() {
        // Σ a_k C_k(cos θ) reproduces A(θ, x) for q = 2 within 1e-4 at
        // K = 500 on interior angles.
        let q = dim(2);
        let order = PolyOrder::for_dimension(2);
        for &x in &[-0.5, 0.1, 0.6] {
            let mut coefs = vec![0.0; 501];
            a_coeff_family(q, x, 500, |k, a| coefs[k] = a);
            for j in 3..=15 {
                let theta = PI * j as f64 / 18.0;
                let mut sum = 0.0;
                gegenbauer_scan(order, theta.cos(), 500, |k, c| {
                    sum += coefs[k] * c;
                });
                let exact = crate::kernels::cap_intersection(q, theta, x);
                assert!(
                    (sum - exact).abs() < 1e-4,
                    "x={x} theta={theta}: {sum} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn summability_block_ratios() {
        // Partial sums of b_k d_{k,q} have decreasing 100-term blocks for
        // CvM and AD at q in {1,2,3,10}.
        for &q in &[1usize, 2, 3, 10] {
            for w in [WeightSpec::Cvm, WeightSpec::AndersonDarling] {
                let seq = coeff_seq(&w, dim(q), 1000, 1280).unwrap();
                let block = |range: std::ops::Range<usize>| -> f64 {
                    range.map(|k| seq.b()[k] * eigen_dim(k, dim(q))).sum()
                };
                let b1 = block(1..101);
                let b2 = block(101..201);
                let b3 = block(201..301);
                assert!(b2 < b1 && b3 < b2, "{w:?} q={q}: {b1} {b2} {b3}");
                assert!(b2 > 0.0 && b3 > 0.0);
            }
        }
    }

    #[test]
    fn coefficients_nonnegative() {
        for &q in &[1usize, 2, 3] {
            for k in 1..=200usize {
                assert!(b_cvm(k, dim(q)) > 0.0, "cvm q={q} k={k}");
            }
        }
        for &q in &[1usize, 2] {
            for k in 1..=200usize {
                assert!(b_ad(k, dim(q)) > 0.0, "ad q={q} k={k}");
            }
        }
    }

    #[test]
    fn disk_round_trip() {
        let seq = coeff_seq(&WeightSpec::Cvm, dim(2), 64, 640).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cvm_q2.coef");
        seq.write_to(&path).unwrap();
        let back = CoeffSeq::read_from(&path).unwrap();
        assert_eq!(back.q(), 2);
        assert_eq!(back.weight_id(), seq.weight_id());
        assert_eq!(back.b(), seq.b());
    }
}
