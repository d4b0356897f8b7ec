//! Gauss ₂F₁ and Appell F₁ on the real axis.
//!
//! Both use power series near the origin and Euler-type integral
//! representations elsewhere. Results can overflow for large first
//! parameters with arguments close to 1; callers that only need a scaled
//! value (the generalized F CDF) evaluate the scaled integrand directly.

use std::f64::consts::FRAC_PI_2;

use statrs::function::gamma::ln_gamma;

use super::quad::{integrate, Tolerance};
use crate::error::{GdcError, Result};

const SERIES_CAP: usize = 200_000;

fn is_nonpositive_int(c: f64) -> bool {
    c <= 0.0 && c == c.round()
}

fn euler_tol() -> Tolerance {
    Tolerance {
        abs: 0.0,
        rel: 1e-13,
        max_intervals: 400,
    }
}

/// Γ(c) / (Γ(p) Γ(c − p)) for c > p > 0.
fn euler_norm(p: f64, c: f64) -> f64 {
    (ln_gamma(c) - ln_gamma(p) - ln_gamma(c - p)).exp()
}

fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= 1e-17 * sum.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(GdcError::Convergence {
        what: "hyp2f1_series",
        partial: sum,
        bound: term.abs(),
    })
}

/// Euler integral for c > b > 0, with t = sin²θ to soften the endpoints.
fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let e1 = 2.0 * b - 1.0;
    let e2 = 2.0 * (c - b) - 1.0;
    let r = integrate(
        |th: f64| {
            let s = th.sin();
            let co = th.cos();
            2.0 * s.powf(e1) * co.powf(e2) * (1.0 - z * s * s).powf(-a)
        },
        0.0,
        FRAC_PI_2,
        euler_tol(),
    );
    let v = euler_norm(b, c) * r.value;
    if !r.converged && r.abs_err > 1e-10 * r.value.abs() {
        return Err(GdcError::Convergence {
            what: "hyp2f1_euler",
            partial: v,
            bound: euler_norm(b, c) * r.abs_err,
        });
    }
    Ok(v)
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real z < 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_int(c) {
        return Err(GdcError::InvalidParameter(format!("c = {c} is a nonpositive integer")));
    }
    if !(z < 1.0) || !z.is_finite() {
        return Err(GdcError::Domain(format!("hyp2f1 needs z < 1, got {z}")));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if z < 0.0 {
        // Pfaff: maps z onto (0, 1) and keeps the series free of cancellation.
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * hyp2f1(a, c - b, c, w)?);
    }
    if z <= 0.75 {
        return hyp2f1_series(a, b, c, z);
    }
    if c > b && b > 0.0 {
        hyp2f1_euler(a, b, c, z)
    } else if c > a && a > 0.0 {
        hyp2f1_euler(b, a, c, z)
    } else {
        hyp2f1_series(a, b, c, z)
    }
}

fn appell_series(a: f64, b1: f64, b2: f64, c: f64, x: f64, y: f64) -> Result<f64> {
    let mut row = 1.0;
    let mut total = 0.0;
    let mut quiet = 0;
    for m in 0..SERIES_CAP {
        let mf = m as f64;
        let mut t = row;
        let mut row_sum = t;
        let mut inner_quiet = 0;
        for j in 0..SERIES_CAP {
            let jf = j as f64;
            t *= (a + mf + jf) * (b2 + jf) / ((c + mf + jf) * (jf + 1.0)) * y;
            row_sum += t;
            if t.abs() <= 1e-17 * row_sum.abs() || t == 0.0 {
                inner_quiet += 1;
                if inner_quiet >= 3 {
                    break;
                }
            } else {
                inner_quiet = 0;
            }
        }
        total += row_sum;
        if row_sum.abs() <= 1e-17 * total.abs() || row == 0.0 {
            quiet += 1;
            if quiet >= 3 {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        row *= (a + mf) * (b1 + mf) / ((c + mf) * (mf + 1.0)) * x;
    }
    Err(GdcError::Convergence {
        what: "appell_series",
        partial: total,
        bound: row.abs(),
    })
}

/// Euler integral in the second variable:
/// F₁ = Γ(c)/(Γ(b2)Γ(c−b2)) ∫₀¹ t^{b2−1}(1−t)^{c−b2−1}(1−yt)^{−a} ₂F₁(a, b1; c−b2; x(1−t)/(1−yt)) dt.
fn appell_euler_second(a: f64, b1: f64, b2: f64, c: f64, x: f64, y: f64) -> Result<f64> {
    let e1 = 2.0 * b2 - 1.0;
    let e2 = 2.0 * (c - b2) - 1.0;
    let mut failure: Option<GdcError> = None;
    let r = integrate(
        |th: f64| {
            let s = th.sin();
            let co = th.cos();
            let t = s * s;
            let omt = co * co;
            let den = 1.0 - y * t;
            let inner = match hyp2f1(a, b1, c - b2, x * omt / den) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
            2.0 * s.powf(e1) * co.powf(e2) * den.powf(-a) * inner
        },
        0.0,
        FRAC_PI_2,
        euler_tol(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let norm = euler_norm(b2, c);
    if !r.converged && r.abs_err > 1e-10 * r.value.abs() {
        return Err(GdcError::Convergence {
            what: "appell_euler",
            partial: norm * r.value,
            bound: norm * r.abs_err,
        });
    }
    Ok(norm * r.value)
}

/// Classical Euler integral, valid for c > a > 0.
fn appell_euler_first(a: f64, b1: f64, b2: f64, c: f64, x: f64, y: f64) -> Result<f64> {
    let e1 = 2.0 * a - 1.0;
    let e2 = 2.0 * (c - a) - 1.0;
    let r = integrate(
        |th: f64| {
            let s = th.sin();
            let co = th.cos();
            let t = s * s;
            2.0 * s.powf(e1) * co.powf(e2) * (1.0 - x * t).powf(-b1) * (1.0 - y * t).powf(-b2)
        },
        0.0,
        FRAC_PI_2,
        euler_tol(),
    );
    let norm = euler_norm(a, c);
    if !r.converged && r.abs_err > 1e-10 * r.value.abs() {
        return Err(GdcError::Convergence {
            what: "appell_euler",
            partial: norm * r.value,
            bound: norm * r.abs_err,
        });
    }
    Ok(norm * r.value)
}

/// Appell hypergeometric function F₁(a; b1, b2; c; x, y) for real x, y < 1.
pub fn appell_f1(a: f64, b1: f64, b2: f64, c: f64, x: f64, y: f64) -> Result<f64> {
    if is_nonpositive_int(c) {
        return Err(GdcError::InvalidParameter(format!("c = {c} is a nonpositive integer")));
    }
    if !(x < 1.0 && y < 1.0) || !x.is_finite() || !y.is_finite() {
        return Err(GdcError::Domain(format!("appell_f1 needs x, y < 1, got ({x}, {y})")));
    }
    if x == 0.0 && y == 0.0 {
        return Ok(1.0);
    }
    if y == 0.0 {
        return hyp2f1(a, b1, c, x);
    }
    if x == 0.0 {
        return hyp2f1(a, b2, c, y);
    }
    if x.abs() <= 0.5 && y.abs() <= 0.5 {
        return appell_series(a, b1, b2, c, x, y);
    }
    if c > b2 && b2 > 0.0 {
        appell_euler_second(a, b1, b2, c, x, y)
    } else if c > b1 && b1 > 0.0 {
        appell_euler_second(a, b2, b1, c, y, x)
    } else if c > a && a > 0.0 {
        appell_euler_first(a, b1, b2, c, x, y)
    } else {
        Err(GdcError::InvalidParameter(format!(
            "no convergent representation for F1({a}; {b1}, {b2}; {c}; {x}, {y})"
        )))
    }
}
