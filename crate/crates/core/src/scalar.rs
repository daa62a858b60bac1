//! Scalar exponential Orlicz norms.
//!
//! * the Luxemburg `ψ_p` norm `inf{K > 0 : E exp(|ξ/K|^p) ≤ 2}`,
//! * the moment norm `sup_{α ≥ 1} α^{-1/p} (E|ξ|^α)^{1/α}`,
//! * the standardized Young function `φ_p` and its numeric conjugate,
//! * the MGF-based norm `τ_φp` of centered variables,
//! * the constants of the three equivalent tail/moment characterizations.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::LN_2;

use crate::distribution::{DistributionSpec, SampleBatch};
use crate::error::{Error, Result};

/// Upper end of the geometric bracket search; beyond it a norm is reported
/// as infinite.
pub const BRACKET_CAP: f64 = 1e12;
pub const DEFAULT_TOL_ANALYTIC: f64 = 1e-9;
pub const DEFAULT_TOL_EMPIRICAL: f64 = 1e-6;
const MAX_BISECTIONS: usize = 2000;

/// Where expectations come from: a closed-form law or a fixed sample.
#[derive(Debug, Clone, Copy)]
pub enum MomentSource<'a> {
    Analytic(DistributionSpec),
    Empirical(&'a SampleBatch),
}

impl<'a> MomentSource<'a> {
    pub fn is_empirical(&self) -> bool {
        matches!(self, MomentSource::Empirical(_))
    }

    pub fn default_tol(&self) -> f64 {
        if self.is_empirical() {
            DEFAULT_TOL_EMPIRICAL
        } else {
            DEFAULT_TOL_ANALYTIC
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormStatus {
    Finite,
    Infinite,
    IterationCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub status: NormStatus,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

impl NormResult {
    pub fn is_finite(&self) -> bool {
        self.status == NormStatus::Finite
    }

    fn zero() -> Self {
        NormResult {
            value: 0.0,
            status: NormStatus::Finite,
            bracket: (0.0, 0.0),
            evaluations: 0,
        }
    }
}

/// Deterministic parallel mean of `f` over `values`: fixed chunks, summed in
/// order, so the result does not depend on the thread count.
pub(crate) fn chunked_mean<F>(values: &[f64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    const CHUNK: usize = 1 << 14;
    let partial: Vec<f64> = values
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|&v| f(v)).sum::<f64>())
        .collect();
    partial.iter().sum::<f64>() / values.len() as f64
}

/// `ln((1/N) Σ exp(a_i))` for a slice of exponents.
pub(crate) fn log_mean_exp(exponents: &[f64]) -> f64 {
    let m = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = exponents.iter().map(|a| (a - m).exp()).sum();
    m + (s / exponents.len() as f64).ln()
}

/// Whether `E exp(|ξ/K|^p)` is finite for some `K`, i.e. whether the law
/// belongs to the `ψ_p` Orlicz space.
pub fn in_psi_space(dist: &DistributionSpec, p: f64) -> bool {
    use DistributionSpec::*;
    match *dist {
        Gaussian { .. } => p <= 2.0,
        Weibull { shape, .. } | SymmetrizedWeibull { shape, .. } => p <= shape,
        Exponential { .. } => p <= 1.0,
        Rademacher { .. } | UniformSymmetric { .. } | PointMass { .. } => true,
    }
}

/// `E exp(|ξ/K|^p)` for an analytic law.
pub fn analytic_exp_moment(dist: &DistributionSpec, k: f64, p: f64) -> f64 {
    use DistributionSpec::*;
    match *dist {
        PointMass { c } => return (c.abs() / k).powf(p).exp(),
        Rademacher { scale } => return (scale / k).powf(p).exp(),
        _ => {}
    }
    // Critical exponent: decay rate is exactly matched, finite iff K is
    // large enough, and a closed form is available.
    match *dist {
        Gaussian { mean, sigma } if p == 2.0 => {
            let denom = k * k - 2.0 * sigma * sigma;
            return if denom > 0.0 {
                (1.0 - 2.0 * sigma * sigma / (k * k)).powf(-0.5) * (mean * mean / denom).exp()
            } else {
                f64::INFINITY
            };
        }
        Weibull { lambda, shape } | SymmetrizedWeibull { lambda, shape } if p == shape => {
            let r = (lambda / k).powf(shape);
            return if r < 1.0 { 1.0 / (1.0 - r) } else { f64::INFINITY };
        }
        Exponential { rate } if p == 1.0 => {
            let r = 1.0 / (rate * k);
            return if r < 1.0 { 1.0 / (1.0 - r) } else { f64::INFINITY };
        }
        UniformSymmetric { half_width } if p == 1.0 => {
            let x = half_width / k;
            return x.exp_m1() / x;
        }
        _ => {}
    }
    if !in_psi_space(dist, p) {
        return f64::INFINITY;
    }
    dist.log_expect_exp(&|x: f64| (x.abs() / k).powf(p)).exp()
}

/// `E exp(|ξ/K|^p)`; strictly decreasing in `K`, at least 1, possibly `+∞`.
pub fn exp_moment(src: &MomentSource<'_>, k: f64, p: f64) -> f64 {
    match src {
        MomentSource::Analytic(d) => analytic_exp_moment(d, k, p),
        MomentSource::Empirical(b) => {
            let kp = k.powf(p);
            chunked_mean(b.values(), |x| (x.abs().powf(p) / kp).exp())
        }
    }
}

/// Smallest `K` with `expect(K) ≤ 2` for a map that is non-increasing in
/// `K`, located by geometric bracketing from `K = 1` followed by bisection.
pub fn solve_luxemburg<F: FnMut(f64) -> f64>(mut expect: F, tol: f64) -> NormResult {
    let mut evaluations = 0;
    let mut feasible = |k: f64, evals: &mut usize| {
        *evals += 1;
        let v = expect(k);
        v <= 2.0
    };
    let (mut lo, mut hi);
    if feasible(1.0, &mut evaluations) {
        hi = 1.0;
        lo = 0.5;
        while feasible(lo, &mut evaluations) {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return NormResult {
                    value: 0.0,
                    status: NormStatus::Finite,
                    bracket: (0.0, hi),
                    evaluations,
                };
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while !feasible(hi, &mut evaluations) {
            lo = hi;
            hi *= 2.0;
            if hi > BRACKET_CAP {
                return NormResult {
                    value: f64::INFINITY,
                    status: NormStatus::Infinite,
                    bracket: (lo, f64::INFINITY),
                    evaluations,
                };
            }
        }
    }
    let mut steps = 0;
    while hi - lo > tol.max(1e-15 * hi) {
        if steps >= MAX_BISECTIONS {
            return NormResult {
                value: hi,
                status: NormStatus::IterationCap,
                bracket: (lo, hi),
                evaluations,
            };
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid, &mut evaluations) {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    NormResult {
        value: hi,
        status: NormStatus::Finite,
        bracket: (lo, hi),
        evaluations,
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("exponent p must be >= 1, got {p}")))
    }
}

/// The Luxemburg `ψ_p` norm.
pub fn luxemburg_norm(src: &MomentSource<'_>, p: f64, tol: f64) -> Result<NormResult> {
    check_p(p)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    match src {
        MomentSource::Analytic(d) => {
            d.validate()?;
            if let DistributionSpec::PointMass { c } = d {
                if *c == 0.0 {
                    return Ok(NormResult::zero());
                }
            }
            Ok(solve_luxemburg(|k| analytic_exp_moment(d, k, p), tol))
        }
        MomentSource::Empirical(b) => {
            if b.values().iter().all(|&v| v == 0.0) {
                return Ok(NormResult::zero());
            }
            let pows: Vec<f64> = b.values().iter().map(|x| x.abs().powf(p)).collect();
            Ok(solve_luxemburg(
                |k| {
                    let kp = k.powf(p);
                    chunked_mean(&pows, |v| (v / kp).exp())
                },
                tol,
            ))
        }
    }
}

/// The Luxemburg norm of a constant: `|c| / (ln 2)^{1/p}`.
pub fn point_mass_norm(c: f64, p: f64) -> f64 {
    c.abs() / LN_2.powf(1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentNormResult {
    pub value: f64,
    pub argmax_alpha: f64,
    /// Largest α actually probed (`ln N` for empirical sources).
    pub alpha_cap: f64,
}

fn ln_abs_moment(src: &MomentSource<'_>, alpha: f64) -> Result<f64> {
    match src {
        MomentSource::Analytic(d) => d.ln_moment_abs(alpha),
        MomentSource::Empirical(b) => {
            let exps: Vec<f64> = b.values().iter().map(|x| alpha * x.abs().ln()).collect();
            Ok(log_mean_exp(&exps))
        }
    }
}

/// `sup_{1 ≤ α ≤ alpha_max} α^{-1/p} (E|ξ|^α)^{1/α}` over a geometric grid
/// refined by golden-section search around the best grid point.
///
/// Empirical sources cap α at `ln N`: above it the empirical moment is
/// essentially the largest sample point.
pub fn moment_norm(src: &MomentSource<'_>, p: f64, alpha_max: f64) -> Result<MomentNormResult> {
    check_p(p)?;
    if !(alpha_max >= 1.0) {
        return Err(Error::Domain(format!("alpha_max must be >= 1, got {alpha_max}")));
    }
    let cap = match src {
        MomentSource::Analytic(_) => alpha_max,
        MomentSource::Empirical(b) => alpha_max.min((b.len() as f64).ln()).max(1.0),
    };
    let objective = |alpha: f64| -> Result<f64> { Ok(ln_abs_moment(src, alpha)? / alpha - alpha.ln() / p) };
    if cap == 1.0 {
        let v = objective(1.0)?;
        return Ok(MomentNormResult {
            value: v.exp(),
            argmax_alpha: 1.0,
            alpha_cap: cap,
        });
    }
    const POINTS: usize = 200;
    let grid: Vec<f64> = (0..POINTS).map(|i| cap.powf(i as f64 / (POINTS - 1) as f64)).collect();
    let vals = grid.iter().map(|&a| objective(a)).collect::<Result<Vec<_>>>()?;
    let (imax, &vmax) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    if vmax == f64::NEG_INFINITY {
        return Ok(MomentNormResult {
            value: 0.0,
            argmax_alpha: 1.0,
            alpha_cap: cap,
        });
    }
    let lo = grid[imax.saturating_sub(1)];
    let hi = grid[(imax + 1).min(POINTS - 1)];
    let (mut best_a, mut best_v) = (grid[imax], vmax);
    let (a, v) = golden_max(|a| objective(a).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-10);
    if v > best_v {
        best_a = a;
        best_v = v;
    }
    Ok(MomentNormResult {
        value: best_v.exp(),
        argmax_alpha: best_a,
        alpha_cap: cap,
    })
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
pub(crate) fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, rel: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if (b - a).abs() <= rel * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn check_p_strict(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("φ_p needs p > 1, got {p}")))
    }
}

/// Conjugate exponent `p / (p - 1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

fn varphi_unchecked(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        0.5 * a * a
    } else {
        a.powf(p) / p - 1.0 / p + 0.5
    }
}

/// The standardization of `|x|^p`: quadratic on `[-1, 1]`, `|x|^p/p - 1/p + 1/2` outside.
pub fn varphi(x: f64, p: f64) -> Result<f64> {
    check_p_strict(p)?;
    Ok(varphi_unchecked(x, p))
}

/// Inverse of `φ_p` on `[0, ∞)`.
pub fn varphi_inverse(y: f64, p: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if y <= 0.5 {
        (2.0 * y).sqrt()
    } else {
        (p * (y - 0.5) + 1.0).powf(1.0 / p)
    }
}

/// Numeric Young transform `sup_x (xy - φ_p(x))` at each `y`.
pub fn young_conjugate(p: f64, y_grid: &[f64]) -> Result<Vec<f64>> {
    check_p_strict(p)?;
    Ok(y_grid.iter().map(|&y| conjugate_at(p, y)).collect())
}

fn conjugate_at(p: f64, y: f64) -> f64 {
    let y = y.abs();
    if y == 0.0 {
        return 0.0;
    }
    // The inner map is concave with maximizer on the side of y; bracket it
    // by doubling until the slope y - φ'(x) turns negative.
    let slope = |x: f64| if x <= 1.0 { y - x } else { y - x.powf(p - 1.0) };
    let mut hi = 1.0;
    while slope(hi) > 0.0 {
        hi *= 2.0;
    }
    let (_, v) = golden_max(|x| x * y - varphi_unchecked(x, p), 0.0, hi, 1e-13);
    v
}

/// Log-MGF access for the τ-norm search.
enum LogMgf<'a> {
    Analytic(DistributionSpec),
    Empirical(Vec<f64>),
    Custom(&'a dyn Fn(f64) -> f64),
}

impl LogMgf<'_> {
    fn eval(&self, t: f64) -> f64 {
        match self {
            LogMgf::Analytic(d) => d.log_mgf(t),
            LogMgf::Empirical(v) => {
                let m = v.iter().map(|x| t * x).fold(f64::NEG_INFINITY, f64::max);
                let s: f64 = v.iter().map(|x| (t * x - m).exp()).sum();
                m + (s / v.len() as f64).ln()
            }
            LogMgf::Custom(f) => f(t),
        }
    }
}

/// Relative standard error of the empirical MGF at `t`.
fn empirical_mgf_rel_se(values: &[f64], t: f64) -> f64 {
    let m = values.iter().map(|x| t * x).fold(f64::NEG_INFINITY, f64::max);
    let n = values.len() as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for x in values {
        let w = (t * x - m).exp();
        s1 += w;
        s2 += w * w;
    }
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    (var / n).sqrt() / mean
}

/// Options for the τ-norm search over `t`.
#[derive(Debug, Clone, Copy)]
pub struct TauSearch {
    /// Characteristic scale of the variable; the t-grid spans
    /// `[1e-2, 1e3] / scale` on each side.
    pub scale: f64,
    /// `lim_{t→0} K_t = sqrt(Var ξ)`.
    pub variance: f64,
    /// Upper limit on `|t|` (empirical reliability cut-off).
    pub t_max: f64,
    pub tol: f64,
}

/// Smallest `K` with `Λ(t) ≤ φ_q(Kt)` for every `t`, `Λ` the log-MGF.
///
/// Feasibility of `K` is monotone, and at each `t` the binding `K` is
/// `φ_q^{-1}(Λ(t)) / |t|`, so the norm is the supremum of that pointwise
/// threshold over `t`. The search runs over a two-sided geometric grid,
/// includes the `t → 0` limit `sqrt(Var)`, and refines the grid argmax by
/// golden-section search.
fn tau_search(lmgf: &LogMgf<'_>, p: f64, opts: TauSearch) -> NormResult {
    let q = conjugate_exponent(p);
    let mut evaluations = 0usize;
    let mut threshold = |t: f64| -> f64 {
        evaluations += 1;
        let l = lmgf.eval(t);
        if l == f64::INFINITY {
            return f64::INFINITY;
        }
        varphi_inverse(l, q) / t.abs()
    };
    let limit0 = opts.variance.max(0.0).sqrt();
    let mut best = (0.0, limit0);
    let mut lower = limit0;

    const PER_DECADE: i32 = 40;
    const EXTENDED_MAX: i32 = 6 * PER_DECADE;
    for sign in [1.0, -1.0] {
        let mut ts: Vec<f64> = Vec::new();
        let mut k = -2 * PER_DECADE;
        loop {
            let t = 10f64.powf(k as f64 / PER_DECADE as f64) / opts.scale;
            if t > opts.t_max || k > 3 * PER_DECADE {
                break;
            }
            ts.push(t);
            k += 1;
        }
        if ts.is_empty() {
            continue;
        }
        let mut vals: Vec<f64> = ts.iter().map(|&t| threshold(sign * t)).collect();
        // Extend while the maximum sits on the outer edge of the grid.
        while ts.len() > 1 {
            let imax = argmax(&vals);
            let last = *ts.last().expect("non-empty");
            if imax + 1 < ts.len() || k > EXTENDED_MAX || vals[imax].is_infinite() {
                break;
            }
            let t = last * 10f64.powf(1.0 / PER_DECADE as f64);
            if t > opts.t_max {
                break;
            }
            ts.push(t);
            vals.push(threshold(sign * t));
            k += 1;
        }
        let imax = argmax(&vals);
        let v = vals[imax];
        if v == f64::INFINITY {
            return NormResult {
                value: f64::INFINITY,
                status: NormStatus::Infinite,
                bracket: (v, v),
                evaluations,
            };
        }
        lower = lower.max(v);
        if v > best.1 {
            best = (sign * ts[imax], v);
        }
        if imax + 1 == ts.len() && k > EXTENDED_MAX {
            // still climbing at the cap
            return NormResult {
                value: v,
                status: NormStatus::IterationCap,
                bracket: (v, f64::INFINITY),
                evaluations,
            };
        }
        let lo = ts[imax.saturating_sub(1)];
        let hi = ts[(imax + 1).min(ts.len() - 1)];
        if hi > lo {
            let (t, rv) = golden_max(|t| threshold(sign * t), lo, hi, opts.tol.min(1e-9));
            if rv > best.1 {
                best = (sign * t, rv);
            }
        }
    }
    let value = best.1;
    NormResult {
        value,
        status: NormStatus::Finite,
        bracket: (lower.min(value), value),
        evaluations,
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

fn tau_unsupported() -> Error {
    Error::Unsupported(
        "the tau norm is undefined at p = 1: moment generating functions of sub-exponential \
         variables are finite only near zero"
            .into(),
    )
}

/// The `τ_φp` norm `inf{K > 0 : E exp(tξ) ≤ exp φ_q(Kt) ∀t}` of a centered
/// variable, `q = p/(p-1)`.
///
/// Empirical sources must have a mean within three standard errors of zero;
/// the batch is then centered exactly and `|t|` is limited to the range where
/// the empirical MGF has relative standard error at most 10%, which makes the
/// result a lower bound.
pub fn tau_norm(src: &MomentSource<'_>, p: f64, tol: f64) -> Result<NormResult> {
    if p == 1.0 {
        return Err(tau_unsupported());
    }
    check_p_strict(p)?;
    match src {
        MomentSource::Analytic(d) => {
            d.validate()?;
            if !d.is_centered() {
                return Err(Error::Precondition(format!("{d} is not centered")));
            }
            if !in_psi_space(d, p) {
                return Ok(NormResult {
                    value: f64::INFINITY,
                    status: NormStatus::Infinite,
                    bracket: (f64::INFINITY, f64::INFINITY),
                    evaluations: 0,
                });
            }
            if let DistributionSpec::PointMass { .. } = d {
                return Ok(NormResult::zero());
            }
            let opts = TauSearch {
                scale: d.scale(),
                variance: d.variance(),
                t_max: f64::INFINITY,
                tol,
            };
            Ok(tau_search(&LogMgf::Analytic(*d), p, opts))
        }
        MomentSource::Empirical(b) => {
            let mean = b.mean();
            let se = b.standard_error();
            if mean.abs() > 3.0 * se {
                return Err(Error::Precondition(format!(
                    "sample mean {mean} is more than 3 standard errors ({se}) from zero"
                )));
            }
            let centered = b.centered();
            let values = centered.values().to_vec();
            let variance = values.iter().map(|x| x * x).sum::<f64>() / values.len() as f64;
            if variance == 0.0 {
                return Ok(NormResult::zero());
            }
            let scale = variance.sqrt();
            let t_max = empirical_t_max(&values, scale);
            let opts = TauSearch {
                scale,
                variance,
                t_max,
                tol,
            };
            Ok(tau_search(&LogMgf::Empirical(values), p, opts))
        }
    }
}

/// Largest `|t|` (searched on the τ grid) at which the empirical MGF still
/// has relative standard error ≤ 10% on both sides.
pub fn empirical_t_max(values: &[f64], scale: f64) -> f64 {
    let mut t_max = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let mut last_ok = 0.0;
        for k in -80..=240 {
            let t = 10f64.powf(k as f64 / 40.0) / scale;
            if empirical_mgf_rel_se(values, sign * t) > 0.1 {
                break;
            }
            last_ok = t;
        }
        t_max = t_max.min(last_ok);
    }
    t_max
}

/// τ-norm of a centered variable given only its log-MGF (for sums and
/// other composite variables).
pub fn tau_norm_from_log_mgf(
    log_mgf: &dyn Fn(f64) -> f64,
    p: f64,
    scale: f64,
    variance: f64,
    tol: f64,
) -> Result<NormResult> {
    if p == 1.0 {
        return Err(tau_unsupported());
    }
    check_p_strict(p)?;
    let opts = TauSearch {
        scale,
        variance,
        t_max: f64::INFINITY,
        tol,
    };
    Ok(tau_search(&LogMgf::Custom(log_mgf), p, opts))
}

/// Minimal constants making each of the three equivalent characterizations
/// hold on the probed grids: Luxemburg norm `K`, tail constant `L` with
/// `P(|ξ| ≥ t) ≤ 2 exp(-(t/L)^p)`, moment constant `M` with
/// `E|ξ|^α ≤ 2 M^α Γ(α/p + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacterizationConstants {
    pub k: f64,
    pub l: f64,
    pub m: f64,
    pub p: f64,
}

/// Default grids: t geometric on `[1e-3 K, 20 K]`, α geometric on `[1, α_max]`.
pub fn default_grids(k_hat: f64, alpha_max: f64) -> (Vec<f64>, Vec<f64>) {
    let geom = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
    };
    let t = geom(1e-3 * k_hat, 20.0 * k_hat, 200);
    let alpha = if alpha_max > 1.0 {
        geom(1.0, alpha_max, 60)
    } else {
        vec![1.0]
    };
    (t, alpha)
}

fn tail_constant(t: f64, tail: f64, p: f64) -> f64 {
    if tail <= 0.0 || t <= 0.0 {
        return 0.0;
    }
    let lr = (2.0 / tail).ln();
    t / lr.powf(1.0 / p)
}

fn moment_constant(ln_moment: f64, alpha: f64, p: f64) -> f64 {
    ((ln_moment - LN_2 - libm::lgamma(alpha / p + 1.0)) / alpha).exp()
}

/// Characterization constants from a sample.
///
/// `L` is evaluated at the grid points and at every sample magnitude inside
/// the grid range (the empirical tail is a step function, so its binding
/// points are the sample values); only points with at least 10 exceedances
/// are used.
pub fn characterization_constants(
    sample: &SampleBatch,
    p: f64,
    alpha_grid: Option<&[f64]>,
    t_grid: Option<&[f64]>,
) -> Result<CharacterizationConstants> {
    check_p(p)?;
    if sample.values().iter().all(|&v| v == 0.0) {
        return Err(Error::Precondition("sample is degenerate (all zeros)".into()));
    }
    let n = sample.len();
    let src = MomentSource::Empirical(sample);
    let k = luxemburg_norm(&src, p, DEFAULT_TOL_EMPIRICAL)?.value;
    let (dt, da) = default_grids(k, (n as f64).ln());
    let t_grid = t_grid.unwrap_or(&dt);
    let alpha_grid = alpha_grid.unwrap_or(&da);

    let mut mags: Vec<f64> = sample.values().iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let count_ge = |t: f64| n - mags.partition_point(|&m| m < t);
    let min_count = n.min(10);
    let (t_lo, t_hi) = t_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    let candidates = t_grid
        .iter()
        .copied()
        .chain(mags.iter().copied().filter(|&m| m >= t_lo && m <= t_hi));
    let mut l = 0.0f64;
    for t in candidates {
        let c = count_ge(t);
        if c < min_count {
            continue;
        }
        l = l.max(tail_constant(t, c as f64 / n as f64, p));
    }

    let mut m = 0.0f64;
    for &alpha in alpha_grid {
        let lm = ln_abs_moment(&src, alpha)?;
        m = m.max(moment_constant(lm, alpha, p));
    }
    Ok(CharacterizationConstants { k, l, m, p })
}

/// Characterization constants of an analytic law on the given grids.
pub fn characterization_constants_analytic(
    dist: &DistributionSpec,
    p: f64,
    alpha_grid: &[f64],
    t_grid: &[f64],
) -> Result<CharacterizationConstants> {
    let k = luxemburg_norm(&MomentSource::Analytic(*dist), p, DEFAULT_TOL_ANALYTIC)?.value;
    let l = t_grid
        .iter()
        .map(|&t| tail_constant(t, dist.tail(t), p))
        .fold(0.0, f64::max);
    let mut m = 0.0f64;
    for &alpha in alpha_grid {
        m = m.max(moment_constant(dist.ln_moment_abs(alpha)?, alpha, p));
    }
    Ok(CharacterizationConstants { k, l, m, p })
}

/// Measured two-sided equivalence ratio `max(τ/ψ, ψ/τ)` over the centered
/// zoo members whose norms are both finite at this `p`.
pub fn measure_cp(p: f64) -> Result<f64> {
    let cases = [
        DistributionSpec::Gaussian { mean: 0.0, sigma: 1.0 },
        DistributionSpec::Rademacher { scale: 1.0 },
        DistributionSpec::UniformSymmetric { half_width: 1.0 },
        DistributionSpec::SymmetrizedWeibull {
            lambda: 1.0,
            shape: 1.5,
        },
        DistributionSpec::SymmetrizedWeibull {
            lambda: 1.0,
            shape: 2.0,
        },
        DistributionSpec::SymmetrizedWeibull {
            lambda: 1.0,
            shape: 3.0,
        },
        DistributionSpec::SymmetrizedWeibull {
            lambda: 1.0,
            shape: p.max(1.0),
        },
    ];
    let mut cp = 1.0f64;
    for d in cases.iter().filter(|d| in_psi_space(d, p)) {
        let src = MomentSource::Analytic(*d);
        let psi = luxemburg_norm(&src, p, DEFAULT_TOL_ANALYTIC)?;
        let tau = tau_norm(&src, p, DEFAULT_TOL_ANALYTIC)?;
        if psi.is_finite() && tau.is_finite() && psi.value > 0.0 {
            let r = tau.value / psi.value;
            cp = cp.max(r).max(1.0 / r);
        }
    }
    Ok(cp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use DistributionSpec::*;

    fn analytic(d: DistributionSpec) -> MomentSource<'static> {
        MomentSource::Analytic(d)
    }

    #[test]
    fn exp_moment_closed_forms() {
        let w = Weibull {
            lambda: 1.0,
            shape: 1.5,
        };
        let k: f64 = 1.7;
        let want = 1.0 / (1.0 - k.powf(-1.5));
        assert!((exp_moment(&analytic(w), k, 1.5) - want).abs() < 1e-12);
        let pm = PointMass { c: -2.0 };
        assert!((exp_moment(&analytic(pm), 3.0, 2.0) - (4.0f64 / 9.0).exp()).abs() < 1e-14);
        let g = Gaussian { mean: 0.0, sigma: 0.8 };
        let want = (1.0 - 2.0 * 0.64 / 4.0f64).powf(-0.5);
        assert!((exp_moment(&analytic(g), 2.0, 2.0) - want).abs() < 1e-14);
    }

    #[test]
    fn exp_moment_quadrature_matches_closed_form_at_critical_exponent() {
        // Weibull(1, 2) at p = 1.5 has no closed form; compare quadrature
        // against a direct trapezoid-free check via a different exponent path:
        // E exp(W^2/K^2) closed form vs quadrature of the same integrand.
        let d = Weibull {
            lambda: 1.0,
            shape: 2.0,
        };
        let k: f64 = 1.6;
        let closed = analytic_exp_moment(&d, k, 2.0);
        let quad = d.log_expect_exp(&|x: f64| (x / k).powi(2)).exp();
        assert!((closed - quad).abs() < 1e-10 * closed);
    }

    #[test]
    fn exp_moment_decreasing_in_k() {
        for d in crate::distribution::zoo() {
            for p in [1.0, 1.5, 2.0] {
                let mut prev = f64::INFINITY;
                for i in 1..40 {
                    let k = 0.25 * i as f64 * d.scale();
                    let v = exp_moment(&analytic(d), k, p);
                    assert!(v >= 1.0);
                    if prev.is_finite() {
                        assert!(v < prev || (v == 1.0 && prev == 1.0), "{d} p={p} k={k}");
                    }
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn luxemburg_closed_forms() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let r = luxemburg_norm(&analytic(Weibull { lambda: 1.0, shape: p }), p, 1e-9).unwrap();
            assert_eq!(r.status, NormStatus::Finite);
            assert!((r.value - 2f64.powf(1.0 / p)).abs() < 1e-8, "p={p}: {}", r.value);
            assert!(r.bracket.1 - r.bracket.0 <= 1e-9);
        }
        let sigma = 1.7;
        let r = luxemburg_norm(&analytic(Gaussian { mean: 0.0, sigma }), 2.0, 1e-9).unwrap();
        assert!((r.value - sigma * (8.0f64 / 3.0).sqrt()).abs() < 1e-8);
        for p in [1.0, 2.0, 3.5] {
            let r = luxemburg_norm(&analytic(PointMass { c: -2.5 }), p, 1e-12).unwrap();
            assert!((r.value - point_mass_norm(2.5, p)).abs() < 1e-9);
        }
    }

    #[test]
    fn luxemburg_infinite_and_degenerate() {
        let r = luxemburg_norm(&analytic(Exponential { rate: 1.0 }), 2.0, 1e-9).unwrap();
        assert_eq!(r.status, NormStatus::Infinite);
        assert_eq!(r.value, f64::INFINITY);
        let zeros = SampleBatch::new(vec![0.0; 10], 0, "zeros").unwrap();
        let r = luxemburg_norm(&MomentSource::Empirical(&zeros), 2.0, 1e-6).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.status, NormStatus::Finite);
    }

    #[test]
    fn luxemburg_quadrature_path() {
        // Gaussian at p = 1: E exp(|X|/K) = 2 e^{1/(2K²)} Φ(1/K).
        let r = luxemburg_norm(&analytic(Gaussian { mean: 0.0, sigma: 1.0 }), 1.0, 1e-10).unwrap();
        let k = r.value;
        let phi = 0.5 * libm::erfc(-(1.0 / k) / std::f64::consts::SQRT_2);
        let e = 2.0 * (0.5 / (k * k)).exp() * phi;
        assert!((e - 2.0).abs() < 1e-8, "{e}");
    }

    #[test]
    fn moment_norm_examples() {
        let r = moment_norm(&analytic(PointMass { c: 3.0 }), 2.0, 50.0).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!((r.argmax_alpha - 1.0).abs() < 1e-9);
        let r = moment_norm(&analytic(Rademacher { scale: 1.0 }), 2.0, 50.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        // dense-grid oracle
        for p in [1.0, 1.5, 2.0, 3.0] {
            let oracle = (0..=200_000)
                .map(|i| 1.0 + 199.0 * i as f64 / 200_000.0)
                .map(|a: f64| (libm::lgamma(a / p + 1.0) / a - a.ln() / p).exp())
                .fold(0.0, f64::max);
            let r = moment_norm(&analytic(Weibull { lambda: 1.0, shape: p }), p, 200.0).unwrap();
            assert!((r.value - oracle).abs() < 1e-9, "p={p}: {} vs {oracle}", r.value);
        }
    }

    #[test]
    fn empirical_moment_norm_caps_alpha() {
        let b = Weibull {
            lambda: 1.0,
            shape: 2.0,
        }
        .sample(10_000, 5)
        .unwrap();
        let r = moment_norm(&MomentSource::Empirical(&b), 2.0, 200.0).unwrap();
        assert!((r.alpha_cap - (10_000f64).ln()).abs() < 1e-12);
        assert!(r.argmax_alpha <= r.alpha_cap);
    }

    #[test]
    fn varphi_examples() {
        for p in [1.2, 2.0, 3.0, 7.0] {
            assert_eq!(varphi(1.0, p).unwrap(), 0.5);
        }
        for x in [-3.0, -0.2, 0.0, 0.9, 4.0] {
            assert!((varphi(x, 2.0).unwrap() - x * x / 2.0).abs() < 1e-15);
        }
        assert!((varphi(2.0, 3.0).unwrap() - 17.0 / 6.0).abs() < 1e-15);
        assert!(varphi(1.0, 1.0).is_err());
        for p in [1.5, 3.0] {
            for y in [0.0, 0.3, 2.0, 7.5] {
                assert!((varphi_inverse(varphi(y, p).unwrap(), p) - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn young_conjugate_examples() {
        assert!((young_conjugate(2.0, &[1.0]).unwrap()[0] - 0.5).abs() < 1e-12);
        assert_eq!(young_conjugate(3.7, &[0.0]).unwrap()[0], 0.0);
        let ys: Vec<f64> = (0..200).map(|i| -10.0 + 20.0 * i as f64 / 199.0).collect();
        let got = young_conjugate(3.0, &ys).unwrap();
        for (y, c) in ys.iter().zip(got) {
            assert!((c - varphi(*y, 1.5).unwrap()).abs() <= 1e-6);
        }
    }

    #[test]
    fn tau_gaussian_and_rademacher() {
        for sigma in [0.5, 1.0, 3.0] {
            let r = tau_norm(&analytic(Gaussian { mean: 0.0, sigma }), 2.0, 1e-9).unwrap();
            assert!((r.value - sigma).abs() < 1e-9 * sigma.max(1.0), "{}", r.value);
        }
        let r = tau_norm(&analytic(Rademacher { scale: 1.0 }), 2.0, 1e-9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tau_rejects_p_one_and_uncentered() {
        let d = Gaussian { mean: 0.0, sigma: 1.0 };
        assert!(matches!(tau_norm(&analytic(d), 1.0, 1e-9), Err(Error::Unsupported(_))));
        let w = Weibull {
            lambda: 1.0,
            shape: 2.0,
        };
        assert!(matches!(tau_norm(&analytic(w), 2.0, 1e-9), Err(Error::Precondition(_))));
        let b = w.sample(10_000, 1).unwrap();
        assert!(matches!(
            tau_norm(&MomentSource::Empirical(&b), 2.0, 1e-6),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tau_infinite_outside_space() {
        let r = tau_norm(&analytic(Gaussian { mean: 0.0, sigma: 1.0 }), 3.0, 1e-9).unwrap();
        assert_eq!(r.status, NormStatus::Infinite);
    }

    #[test]
    fn empirical_tau_is_close_for_gaussian() {
        let d = Gaussian { mean: 0.0, sigma: 1.0 };
        let b = d.sample(200_000, 17).unwrap();
        let r = tau_norm(&MomentSource::Empirical(&b), 2.0, 1e-6).unwrap();
        assert!((r.value - 1.0).abs() < 0.03, "{}", r.value);
    }

    #[test]
    fn characterization_point_mass() {
        let c = 1.5;
        let b = PointMass { c }.sample(100, 0).unwrap();
        for p in [1.0, 2.0] {
            let cc = characterization_constants(&b, p, None, None).unwrap();
            let want = point_mass_norm(c, p);
            assert!((cc.l - want).abs() < 1e-12, "{} vs {want}", cc.l);
            assert!((cc.k - want).abs() < 1e-5);
        }
        let zeros = SampleBatch::new(vec![0.0; 4], 0, "z").unwrap();
        assert!(characterization_constants(&zeros, 2.0, None, None).is_err());
    }

    #[test]
    fn measured_cp_is_reasonable() {
        let cp = measure_cp(2.0).unwrap();
        assert!((1.0..10.0).contains(&cp), "{cp}");
    }
}
