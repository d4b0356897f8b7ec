//! P(Σ wⱼ χ²_{hⱼ} > x) by numerical inversion of the characteristic
//! function (Imhof's formula):
//!
//!   P(Q > x) = ½ + (1/π) ∫₀^∞ sin θ(u) / (u ρ(u)) du,
//!   θ(u) = ½ Σ hⱼ atan(wⱼu) − ½xu,   ρ(u) = Π (1 + wⱼ²u²)^{hⱼ/4}.
//!
//! Absolute accuracy is around 1e-11; tiny tails lose relative accuracy.

use std::f64::consts::PI;

use crate::error::{GdcError, Result};
use crate::numerics::quad::{integrate, integrate_with_breaks, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImhofResult {
    pub value: f64,
    pub abs_err: f64,
}

const TARGET: f64 = 1e-12;
const MAX_PANELS: usize = 4000;

/// Tail with one degree of freedom per weight.
pub fn weighted_chisq_tail(weights: &[f64], threshold: f64) -> Result<ImhofResult> {
    let terms: Vec<(f64, f64)> = weights.iter().map(|&w| (w, 1.0)).collect();
    weighted_chisq_tail_dof(&terms, threshold)
}

/// Tail for (weight, degrees of freedom) pairs.
pub fn weighted_chisq_tail_dof(terms: &[(f64, f64)], threshold: f64) -> Result<ImhofResult> {
    let terms: Vec<(f64, f64)> = terms.iter().copied().filter(|&(w, h)| w != 0.0 && h > 0.0).collect();
    if terms.is_empty() {
        return Err(GdcError::InvalidParameter("weighted chi-square needs a nonzero weight".into()));
    }
    if terms.iter().any(|&(w, h)| !w.is_finite() || !h.is_finite()) || !threshold.is_finite() {
        return Err(GdcError::Domain("non-finite weight or threshold".into()));
    }
    if terms.iter().all(|&(w, _)| w > 0.0) && threshold <= 0.0 {
        return Ok(ImhofResult { value: 1.0, abs_err: 0.0 });
    }
    if terms.iter().all(|&(w, _)| w < 0.0) && threshold >= 0.0 {
        return Ok(ImhofResult { value: 0.0, abs_err: 0.0 });
    }
    let scale = terms.iter().map(|&(w, _)| w.abs()).fold(0.0, f64::max);
    let lam: Vec<(f64, f64)> = terms.iter().map(|&(w, h)| (w / scale, h)).collect();
    let x = threshold / scale;
    let half_dof: f64 = 0.5 * lam.iter().map(|&(_, h)| h).sum::<f64>();

    let g = |u: f64| -> f64 {
        if u == 0.0 {
            return 0.5 * (lam.iter().map(|&(l, h)| h * l).sum::<f64>() - x);
        }
        let mut theta = -0.5 * x * u;
        let mut ln_rho = 0.0;
        for &(l, h) in &lam {
            theta += 0.5 * h * (l * u).atan();
            ln_rho += 0.25 * h * (l * u).powi(2).ln_1p();
        }
        theta.sin() / (u * ln_rho.exp())
    };

    // Features of the integrand sit near u ≈ 1/|λⱼ|.
    let mut marks: Vec<f64> = lam.iter().map(|&(l, _)| 1.0 / l.abs()).collect();
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    marks.dedup_by(|a, b| (*a / *b - 1.0).abs() < 1e-3);
    let u_knee = 4.0 * marks.last().copied().unwrap_or(1.0);

    let tol = Tolerance {
        abs: 0.1 * TARGET,
        rel: 0.0,
        max_intervals: 2000,
    };

    let mut points = vec![0.0];
    points.extend(marks.iter().copied().filter(|&m| m < u_knee));
    points.push(u_knee);

    let (integral, err) = if x == 0.0 {
        // No oscillation: integrate the tail with u = u_knee / τ.
        let head = integrate_with_breaks(g, &points, tol);
        let tail = integrate_with_breaks(
            |tau: f64| {
                let u = u_knee / tau;
                g(u) * u_knee / (tau * tau)
            },
            &[0.0, 1.0],
            tol,
        );
        (head.value + tail.value, head.abs_err + tail.abs_err)
    } else {
        let head = integrate_with_breaks(g, &points, tol);
        let (t, e) = oscillatory_tail(&g, u_knee, x.abs(), &lam, half_dof)?;
        (head.value + t, head.abs_err + e)
    };
    let value = 0.5 + integral / PI;
    let abs_err = err / PI;
    if abs_err > 1e-8 {
        return Err(GdcError::Convergence {
            what: "imhof",
            partial: value,
            bound: abs_err,
        });
    }
    Ok(ImhofResult { value, abs_err })
}

/// ∫_{u0}^∞ g over half-period panels; stops on Imhof's truncation bound or
/// on agreement of successive ε-algorithm extrapolations.
fn oscillatory_tail<G: Fn(f64) -> f64>(
    g: &G,
    u0: f64,
    x_abs: f64,
    lam: &[(f64, f64)],
    half_dof: f64,
) -> Result<(f64, f64)> {
    let width = 2.0 * PI / x_abs;
    let log_prod: f64 = lam.iter().map(|&(l, h)| 0.5 * h * l.abs().ln()).sum();
    let bound_at = |u: f64| -> f64 { (-(PI * half_dof).ln() - half_dof * u.ln() - log_prod).exp() };

    let mut f = |u: f64| g(u);
    let panel_tol = Tolerance {
        abs: 0.01 * TARGET,
        rel: 0.0,
        max_intervals: 200,
    };
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut partial = Vec::new();
    let mut last_extrap = f64::NAN;
    let mut u = u0;
    for j in 0..MAX_PANELS {
        let panel = integrate(&mut f, u, u + width, panel_tol);
        let (v, e) = (panel.value, panel.abs_err);
        sum += v;
        err += e;
        u += width;
        partial.push(sum);
        if bound_at(u) < 0.1 * TARGET {
            return Ok((sum, err + bound_at(u)));
        }
        if j >= 8 && j % 4 == 0 {
            let window = &partial[partial.len().saturating_sub(24)..];
            let est = wynn_epsilon(window);
            if (est - last_extrap).abs() < TARGET {
                return Ok((est, err + (est - last_extrap).abs()));
            }
            last_extrap = est;
        }
    }
    Err(GdcError::Convergence {
        what: "imhof_tail",
        partial: sum,
        bound: bound_at(u),
    })
}

/// Wynn's ε-algorithm on a sequence of partial sums.
fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    if n < 3 {
        return *s.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = s[n - 1];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d == 0.0 {
                return if k % 2 == 0 { cur[j + 1] } else { best };
            }
            next.push(prev[j + 1] + 1.0 / d);
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}
