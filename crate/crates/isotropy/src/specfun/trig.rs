//! Cosine integral Ci and the entire variant Cin.

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Ci(x) = γ + ln x + ∫_0^x (cos t - 1)/t dt, for x > 0.
///
/// Power series below x = 4, Lentz continued fraction on E₁(ix) above.
pub fn cosine_integral(x: f64) -> f64 {
    assert!(x > 0.0, "Ci is evaluated for x > 0");
    if x < 4.0 {
        ci_series(x)
    } else {
        ci_cf(x)
    }
}

/// Cin(x) = ∫_0^x (1 - cos t)/t dt = γ + ln x − Ci(x). Entire in x; the
/// form used by the circular Anderson–Darling coefficients.
pub fn cin(x: f64) -> f64 {
    assert!(x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < 1e-4 {
        // Leading series terms; avoids the ln-cancellation at tiny x.
        return x * x / 4.0 - x.powi(4) / 96.0;
    }
    EULER_GAMMA + x.ln() - cosine_integral(x)
}

fn ci_series(x: f64) -> f64 {
    // Ci(x) = gamma + ln x + sum_{n>=1} (-x^2)^n / (2n (2n)!)
    let mut sum = 0.0;
    let mut term = 1.0f64; // x^{2n}/(2n)! carrier
    let x2 = x * x;
    for n in 1..200 {
        let nf = n as f64;
        term *= -x2 / ((2.0 * nf - 1.0) * (2.0 * nf));
        let add = term / (2.0 * nf);
        sum += add;
        if add.abs() < 1e-18 * (1.0 + sum.abs()) {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

/// Continued fraction for E₁(ix) via complex Lentz; Ci(x) = -Re h and
/// si(x) = Im h after multiplying by e^{-ix}.
fn ci_cf(x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    let (mut br, bi) = (1.0f64, x);
    let (mut cr, mut ci_) = (1.0 / FPMIN, 0.0f64);
    let (mut dr, mut di) = cdiv(1.0, 0.0, br, bi);
    let (mut hr, mut hi) = (dr, di);
    for i in 2..1000 {
        let a = -((i - 1) as f64 * (i - 1) as f64);
        br += 2.0;
        // d = 1 / (a*d + b)
        let (tr, ti) = (a * dr + br, a * di + bi);
        let (ndr, ndi) = cdiv(1.0, 0.0, tr, ti);
        dr = ndr;
        di = ndi;
        // c = b + a/c
        let (qr, qi) = cdiv(a, 0.0, cr, ci_);
        cr = br + qr;
        ci_ = bi + qi;
        // del = c * d
        let delr = cr * dr - ci_ * di;
        let deli = cr * di + ci_ * dr;
        let (nhr, nhi) = (hr * delr - hi * deli, hr * deli + hi * delr);
        hr = nhr;
        hi = nhi;
        if (delr - 1.0).abs() + deli.abs() < EPS {
            break;
        }
    }
    // h *= (cos x, -sin x)
    let (c, s) = (x.cos(), x.sin());
    let re = hr * c + hi * s;
    -re
}

fn cdiv(ar: f64, ai: f64, br: f64, bi: f64) -> (f64, f64) {
    let den = br * br + bi * bi;
    ((ar * br + ai * bi) / den, (ai * br - ar * bi) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gauss_legendre;

    #[test]
    fn series_and_cf_agree_on_overlap() {
        for i in 0..=40 {
            let x = 2.0 + 6.0 * i as f64 / 40.0;
            let a = ci_series(x);
            let b = ci_cf(x);
            assert!((a - b).abs() < 1e-13, "x={x} series={a} cf={b}");
        }
    }

    #[test]
    fn known_value() {
        // Ci(2) = 0.4229808287748650 (tabulated).
        assert!((cosine_integral(2.0) - 0.422_980_828_774_865).abs() < 1e-12);
    }

    #[test]
    fn cin_matches_quadrature() {
        let rule = gauss_legendre(200);
        for &x in &[0.3, 1.0, 2.0 * std::f64::consts::PI, 20.0, 75.0] {
            let direct = rule.integrate(0.0, x, |t| {
                if t.abs() < 1e-12 {
                    0.0
                } else {
                    (1.0 - t.cos()) / t
                }
            });
            assert!((cin(x) - direct).abs() < 1e-9, "x={x}");
        }
    }
}
