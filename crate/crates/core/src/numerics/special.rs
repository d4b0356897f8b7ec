//! Distribution tails built on statrs' incomplete beta/gamma and libm's erf.
//! Survival functions are evaluated directly, never as `1 - cdf`.

use std::f64::consts::{FRAC_PI_2, PI};

use libm::{erf, erfc};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use super::quad::{integrate, Tolerance};

/// Survival function of the F(d1, d2) distribution.
pub fn f_sf(d1: f64, d2: f64, x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    let z = d2 / (d2 + d1 * x);
    beta_reg(0.5 * d2, 0.5 * d1, z)
}

/// Cumulative distribution function of F(d1, d2).
pub fn f_cdf(d1: f64, d2: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let z = d1 * x / (d1 * x + d2);
    beta_reg(0.5 * d1, 0.5 * d2, z)
}

pub fn chi2_sf(df: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if df == 1.0 {
        return erfc((0.5 * x).sqrt());
    }
    if df == 2.0 {
        return (-0.5 * x).exp();
    }
    gamma_ur(0.5 * df, 0.5 * x)
}

pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

fn two_weight_tol() -> Tolerance {
    Tolerance {
        abs: 1e-300,
        rel: 1e-13,
        max_intervals: 200,
    }
}

/// P(w1 Q1² + w2 Q2² > x) for iid χ²₁ variables, w1, w2 ≥ 0.
pub fn two_weight_chisq_sf(w1: f64, w2: f64, x: f64) -> f64 {
    let (w1, w2) = if w1 >= w2 { (w1, w2) } else { (w2, w1) };
    if x <= 0.0 {
        return 1.0;
    }
    if w1 <= 0.0 {
        return 0.0;
    }
    if w2 <= 0.0 {
        return erfc((0.5 * x / w1).sqrt());
    }
    match polar_mean(w1, w2, |w| (-0.5 * x / w).exp()) {
        Some(v) => v,
        None => sf_by_conditioning(w1, w2, x),
    }
}

/// Conditions on Q1 = √(x/w1)·sin θ; every term is positive, so relative
/// accuracy holds far into the tail. Requires w1 ≥ w2 > 0.
fn sf_by_conditioning(w1: f64, w2: f64, x: f64) -> f64 {
    let big_x = x / w1;
    let c = (x / (2.0 * w2)).sqrt();
    let body = integrate(
        |th: f64| (-0.5 * big_x * th.sin().powi(2)).exp() * th.cos() * erfc(th.cos() * c),
        0.0,
        FRAC_PI_2,
        two_weight_tol(),
    );
    erfc((0.5 * big_x).sqrt()) + (2.0 * big_x / PI).sqrt() * body.value
}

/// P(w1 Q1² + w2 Q2² ≤ x), the companion of [`two_weight_chisq_sf`].
pub fn two_weight_chisq_cdf(w1: f64, w2: f64, x: f64) -> f64 {
    let (w1, w2) = if w1 >= w2 { (w1, w2) } else { (w2, w1) };
    if x <= 0.0 {
        return 0.0;
    }
    if w1 <= 0.0 {
        return 1.0;
    }
    if w2 <= 0.0 {
        return erf((0.5 * x / w1).sqrt());
    }
    match polar_mean(w1, w2, |w| -(-0.5 * x / w).exp_m1()) {
        Some(v) => v,
        None => cdf_by_conditioning(w1, w2, x),
    }
}

fn cdf_by_conditioning(w1: f64, w2: f64, x: f64) -> f64 {
    let big_x = x / w1;
    let c = (x / (2.0 * w2)).sqrt();
    let body = integrate(
        |th: f64| (-0.5 * big_x * th.sin().powi(2)).exp() * th.cos() * erf(th.cos() * c),
        0.0,
        FRAC_PI_2,
        two_weight_tol(),
    );
    (2.0 * big_x / PI).sqrt() * body.value
}

/// Mean of g(w1 cos²φ + w2 sin²φ) over a period of φ. Writing (Q1, Q2) in
/// polar form, R² is χ²₂ and independent of the uniform angle, so both
/// two-weight tails are such means. The integrand is periodic and
/// analytic, so the midpoint rule converges geometrically; None when the
/// doubling has not settled by 1024 nodes (tiny w2/w1 or extreme x).
fn polar_mean<G: Fn(f64) -> f64>(w1: f64, w2: f64, g: G) -> Option<f64> {
    const REL: f64 = 1e-14;
    let eval = |phi: f64| {
        let c = phi.cos();
        g(w2 + (w1 - w2) * c * c)
    };
    // Symmetry about 0 and π/2: nodes in (0, π/2) suffice.
    let mut m = 4usize;
    let mut sum: f64 = (0..m).map(|j| eval((j as f64 + 0.5) * FRAC_PI_2 / m as f64)).sum();
    let mut prev = sum / m as f64;
    while m < 1024 {
        // tripling keeps the old midpoints as nodes of the refined rule
        let h = FRAC_PI_2 / (3 * m) as f64;
        let mut add = 0.0;
        for j in 0..m {
            let centre = (3 * j + 1) as f64 + 0.5;
            add += eval((centre - 1.0) * h) + eval((centre + 1.0) * h);
        }
        sum += add;
        m *= 3;
        let cur = sum / m as f64;
        if (cur - prev).abs() <= REL * cur && m >= 36 {
            return Some(cur);
        }
        prev = cur;
    }
    None
}

/// Shortest decimal representation that round-trips to the same f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NA".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}
