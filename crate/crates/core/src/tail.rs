//! Closed-form two-regime tail bounds `P(|η| ≥ t) ≤ 2 exp(−g(t))`.
//!
//! The universal constant `C` that appears in the chaos and sub-exponential
//! bounds has no known numeric value; it is always an explicit argument.

use serde::Serialize;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// Constants of the MGF condition `E exp(tη) ≤ exp(a²t²/2)` for `|t| ≤ b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernsteinParams {
    pub a: f64,
    pub b: f64,
}

impl BernsteinParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!(
                "Bernstein parameters must be positive and finite, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// Where the exponent switches from quadratic to linear: `a²b`.
    pub fn knee(&self) -> f64 {
        self.a * self.a * self.b
    }
}

/// `s²/(2a²)` up to the knee `a²b`, `bs − a²b²/2` beyond it.
pub fn g_piecewise(s: f64, params: &BernsteinParams) -> f64 {
    let s = s.max(0.0);
    let BernsteinParams { a, b } = *params;
    if s <= params.knee() {
        s * s / (2.0 * a * a)
    } else {
        b * s - a * a * b * b / 2.0
    }
}

/// `min{t²/(2a²), bt/2}`, a lower bound for [`g_piecewise`].
pub fn bernstein_min_form(t: f64, params: &BernsteinParams) -> f64 {
    let t = t.max(0.0);
    (t * t / (2.0 * params.a * params.a)).min(params.b * t / 2.0)
}

/// `2 exp(−g)` capped at 2.
pub fn tail_from_exponent(g: f64) -> f64 {
    (2.0 * (-g).exp()).min(2.0)
}

/// Parameters for a centered variable with `‖η‖ψ₁` known:
/// `a = √2·C·‖η‖ψ₁`, `b = 1/(C·‖η‖ψ₁)`.
pub fn subexp_params(psi1_norm: f64, c: f64) -> Result<BernsteinParams> {
    if !(psi1_norm > 0.0 && c > 0.0) {
        return Err(Error::Domain(format!(
            "need a positive psi_1 norm and C, got {psi1_norm} and {c}"
        )));
    }
    BernsteinParams::new(SQRT_2 * c * psi1_norm, 1.0 / (c * psi1_norm))
}

/// Exponent of the order-`d` chaos bound for a given scale
/// `s = C‖A‖_{d′}‖ξ‖_{E_d}^d`: `t²/(16s²)` up to `4s`, then `t/(2s) − 1`.
pub fn chaos_tail_exponent(t: f64, s: f64) -> f64 {
    let t = t.max(0.0);
    if s == 0.0 {
        return if t > 0.0 { f64::INFINITY } else { 0.0 };
    }
    if t <= 4.0 * s {
        t * t / (16.0 * s * s)
    } else {
        t / (2.0 * s) - 1.0
    }
}

/// `C‖A‖_{d′}‖ξ‖_{E_d}^d`.
pub fn chaos_scale(a_norm: f64, e_d_norm: f64, d: usize, c: f64) -> f64 {
    c * a_norm * e_d_norm.powi(d as i32)
}

/// `P(|S_d(ξ) − E S_d(ξ)| ≥ t) ≤ 2 exp(−g(t))` with the chaos exponent.
pub fn chaos_tail_bound(t: f64, a_norm: f64, e_d_norm: f64, d: usize, c: f64) -> f64 {
    tail_from_exponent(chaos_tail_exponent(t, chaos_scale(a_norm, e_d_norm, d, c)))
}

/// `min{t²/(16C²‖A‖²K⁴), t/(4C‖A‖K²)}` for a quadratic form with operator
/// norm `‖A‖` and `K = ‖ξ‖_{E_2}`.
pub fn hanson_wright_exponent(t: f64, op_norm: f64, k: f64, c: f64) -> f64 {
    let t = t.max(0.0);
    let s = c * op_norm * k * k;
    if s == 0.0 {
        return if t > 0.0 { f64::INFINITY } else { 0.0 };
    }
    (t * t / (16.0 * s * s)).min(t / (4.0 * s))
}

pub fn hanson_wright_bound(t: f64, op_norm: f64, k: f64, c: f64) -> f64 {
    tail_from_exponent(hanson_wright_exponent(t, op_norm, k, c))
}

/// A tail curve evaluated on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCurve {
    pub t_grid: Vec<f64>,
    pub bound: Vec<f64>,
    pub label: String,
}

/// Checks that a grid is non-empty, finite, non-negative and strictly
/// increasing.
pub fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::GridMismatch("t-grid is empty".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::GridMismatch("t-grid values must be finite and >= 0".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::GridMismatch("t-grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `n` equally spaced points from `0` to `t_max`.
pub fn linear_grid(t_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

impl TailCurve {
    pub fn new(t_grid: Vec<f64>, bound: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        check_grid(&t_grid)?;
        if bound.len() != t_grid.len() {
            return Err(Error::DimensionMismatch {
                expected: t_grid.len(),
                got: bound.len(),
            });
        }
        Ok(Self {
            t_grid,
            bound,
            label: label.into(),
        })
    }

    pub fn from_fn(t_grid: &[f64], label: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(t_grid.to_vec(), t_grid.iter().map(|&t| f(t)).collect(), label)
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    /// Columns `t,bound,label`, values with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,bound,label\n");
        for (t, b) in self.t_grid.iter().zip(&self.bound) {
            s.push_str(&format!("{t:.16e},{b:.16e},{}\n", self.label));
        }
        s
    }
}
