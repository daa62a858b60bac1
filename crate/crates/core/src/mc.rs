//! Seeded Monte Carlo checks of tail bounds.
//!
//! Empirical tails are compared through the exact one-sided 99% binomial
//! upper limit rather than the raw frequency, and grid points where a bound
//! is below `4/N` are left out as unresolvable at that sample size.

use libm::tgamma;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::chaos::{array_norm, chaos_samples, exact_mean, operator_norm, ChaosArray};
use crate::distribution::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::{luxemburg_norm, solve_luxemburg, tau_norm_from_log_mgf, MomentSource, DEFAULT_TOL_ANALYTIC};
use crate::tail::{
    chaos_tail_bound, check_grid, g_piecewise, hanson_wright_bound, linear_grid, subexp_params, tail_from_exponent,
    TailCurve,
};
use crate::vector::{e_p_norm, RandomVectorSource, VectorOptions};

pub const CONFIDENCE: f64 = 0.99;

/// Sampling parameters of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    /// `None` picks a grid from the sample.
    pub t_grid: Option<Vec<f64>>,
    /// Worker threads, 0 for the default pool.
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            t_grid: None,
            workers: 0,
        }
    }
}

/// Exceedance counts `#{|x| ≥ t}` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalTail {
    pub t_grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub samples: usize,
    pub frequency: Vec<f64>,
    pub upper99: Vec<f64>,
}

impl EmpiricalTail {
    /// The 99% upper limits as a curve.
    pub fn upper_curve(&self, label: impl Into<String>) -> TailCurve {
        TailCurve {
            t_grid: self.t_grid.clone(),
            bound: self.upper99.clone(),
            label: label.into(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,count,frequency,upper99\n");
        for i in 0..self.t_grid.len() {
            s.push_str(&format!(
                "{:.16e},{},{:.16e},{:.16e}\n",
                self.t_grid[i], self.counts[i], self.frequency[i], self.upper99[i]
            ));
        }
        s
    }
}

/// One-sided exact (Clopper-Pearson) upper confidence limit for a binomial
/// proportion with `k` successes out of `n`.
pub fn clopper_pearson_upper(k: u64, n: u64, confidence: f64) -> f64 {
    if n == 0 || k >= n {
        return 1.0;
    }
    let alpha = 1.0 - confidence;
    if k == 0 {
        return 1.0 - alpha.powf(1.0 / n as f64);
    }
    // P(Bin(n, u) ≤ k) = 1 − I_u(k+1, n−k) decreases in u; solve for alpha.
    let (a, b) = ((k + 1) as f64, (n - k) as f64);
    let (mut lo, mut hi) = (k as f64 / n as f64, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - beta_reg(a, b, mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

/// Fraction of `|x| ≥ t` for every grid point, with 99% upper limits.
pub fn empirical_tail(values: &[f64], t_grid: &[f64]) -> Result<EmpiricalTail> {
    check_grid(t_grid)?;
    if values.is_empty() {
        return Err(Error::Invalid("no values to count".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Invalid("values contain NaN".into()));
    }
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_unstable_by(f64::total_cmp);
    let n = abs.len();
    let counts: Vec<u64> = t_grid
        .iter()
        .map(|&t| (n - abs.partition_point(|&v| v < t)) as u64)
        .collect();
    let frequency = counts.iter().map(|&k| k as f64 / n as f64).collect();
    let upper99 = counts
        .iter()
        .map(|&k| clopper_pearson_upper(k, n as u64, CONFIDENCE))
        .collect();
    Ok(EmpiricalTail {
        t_grid: t_grid.to_vec(),
        counts,
        samples: n,
        frequency,
        upper99,
    })
}

/// Smallest grid point `t` whose empirical frequency of `|x| ≥ t` is at
/// most `level`; used to size grids.
pub fn empirical_quantile(values: &[f64], level: f64) -> f64 {
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_unstable_by(f64::total_cmp);
    let keep = ((level * abs.len() as f64).floor() as usize).clamp(1, abs.len());
    abs[abs.len() - keep]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointCheck {
    pub t: f64,
    pub upper: f64,
    pub bound: f64,
    pub ratio: f64,
    pub resolved: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailVerification {
    pub worst_ratio: f64,
    pub verdict: bool,
    pub resolved_points: usize,
    /// Grid points left out because the bound is below `4/N`.
    pub excluded_points: Vec<f64>,
    pub points: Vec<PointCheck>,
}

/// Compares an empirical upper curve against a bound curve on the same
/// grid. The verdict needs at least one resolvable point.
pub fn verify_tail_bound(empirical: &TailCurve, bound: &TailCurve, samples: usize) -> Result<TailVerification> {
    if empirical.t_grid != bound.t_grid {
        return Err(Error::GridMismatch(format!(
            "empirical curve '{}' and bound '{}' use different t-grids",
            empirical.label, bound.label
        )));
    }
    let floor = 4.0 / samples.max(1) as f64;
    let points: Vec<PointCheck> = empirical
        .t_grid
        .iter()
        .zip(empirical.bound.iter().zip(&bound.bound))
        .map(|(&t, (&upper, &b))| {
            let resolved = b >= floor;
            PointCheck {
                t,
                upper,
                bound: b,
                ratio: if b > 0.0 { upper / b } else { f64::INFINITY },
                resolved,
                passed: !resolved || upper <= b,
            }
        })
        .collect();
    let resolved: Vec<&PointCheck> = points.iter().filter(|c| c.resolved).collect();
    let worst_ratio = resolved.iter().map(|c| c.ratio).fold(0.0, f64::max);
    Ok(TailVerification {
        worst_ratio,
        verdict: !resolved.is_empty() && resolved.iter().all(|c| c.passed),
        resolved_points: resolved.len(),
        excluded_points: points.iter().filter(|c| !c.resolved).map(|c| c.t).collect(),
        points,
    })
}

/// Which closed-form bound a chaos run is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `‖A‖_{d′}` and `‖ξ‖_{E_d}^d`, any order.
    Chaos,
    /// Operator norm and `‖ξ‖_{E_2}²`, quadratic forms only.
    HansonWright,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChaosVerification {
    pub case: String,
    pub kind: BoundKind,
    pub c: f64,
    pub samples: usize,
    pub seed: u64,
    pub order: usize,
    pub dim: usize,
    /// `‖A‖_{d′}` or the operator norm.
    pub a_norm: f64,
    pub e_d: f64,
    /// Mean used for centering.
    pub mean: f64,
    pub mean_is_exact: bool,
    pub worst_ratio: f64,
    pub verdict: bool,
    pub excluded_points: Vec<f64>,
    pub empirical: EmpiricalTail,
    pub bound: TailCurve,
    pub check: TailVerification,
}

/// Draws `S_d(ξ)`, centers it, and checks its tail against the chosen bound
/// with constant `c`. Without a grid, 60 points from 0 to the empirical
/// `10⁻⁴` tail quantile are used.
pub fn verify_chaos(
    case: &str,
    a: &ChaosArray,
    xi: &RandomVectorSource,
    kind: BoundKind,
    c: f64,
    cfg: &McConfig,
) -> Result<ChaosVerification> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("C must be > 0, got {c}")));
    }
    if kind == BoundKind::HansonWright && a.order() != 2 {
        return Err(Error::Invalid("the Hanson-Wright form applies to order 2 only".into()));
    }
    rng::with_workers(cfg.workers, || {
        let d = a.order();
        let e = e_p_norm(
            xi,
            d as f64,
            &VectorOptions {
                seed: cfg.seed,
                ..Default::default()
            },
        )?;
        if !e.is_finite() {
            return Err(Error::Precondition(format!(
                "the E_{d} norm of the vector is not finite"
            )));
        }
        let a_norm = match kind {
            BoundKind::Chaos => array_norm(a, d as f64 / (d as f64 - 1.0))?,
            BoundKind::HansonWright => operator_norm(a)?,
        };
        let batch = chaos_samples(a, xi, cfg.samples, cfg.seed)?;
        let (mean, exact) = match xi {
            RandomVectorSource::IndependentProduct(coords) => (exact_mean(a, coords)?, true),
            _ => (batch.mean(), false),
        };
        let centered: Vec<f64> = batch.values().iter().map(|v| v - mean).collect();
        let grid = match &cfg.t_grid {
            Some(g) => g.clone(),
            None => {
                let top = empirical_quantile(&centered, 1e-4);
                if top > 0.0 {
                    linear_grid(top, 60)
                } else {
                    linear_grid(1.0, 60)
                }
            }
        };
        let empirical = empirical_tail(&centered, &grid)?;
        let bound = match kind {
            BoundKind::Chaos => TailCurve::from_fn(&grid, case, |t| chaos_tail_bound(t, a_norm, e.value, d, c))?,
            BoundKind::HansonWright => TailCurve::from_fn(&grid, case, |t| hanson_wright_bound(t, a_norm, e.value, c))?,
        };
        let check = verify_tail_bound(&empirical.upper_curve(case), &bound, cfg.samples)?;
        Ok(ChaosVerification {
            case: case.to_string(),
            kind,
            c,
            samples: cfg.samples,
            seed: cfg.seed,
            order: d,
            dim: a.dim(),
            a_norm,
            e_d: e.value,
            mean,
            mean_is_exact: exact,
            worst_ratio: check.worst_ratio,
            verdict: check.verdict,
            excluded_points: check.excluded_points.clone(),
            empirical,
            bound,
            check,
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    /// `τ(Σ t_i ξ_i)`.
    pub lhs: f64,
    /// `(Σ τ(t_i ξ_i)^r)^{1/r}`.
    pub rhs: f64,
    pub terms: Vec<f64>,
    pub ratio: f64,
    pub verdict: bool,
    pub tol: f64,
}

/// Checks `τ(Σ t_i ξ_i)^r ≤ Σ τ(t_i ξ_i)^r`, `r = min(2, q)`, for
/// independent centered coordinates, using exact log-MGFs.
pub fn rotation_invariance_check(
    coords: &[DistributionSpec],
    weights: &[f64],
    p: f64,
    tol: f64,
) -> Result<RotationReport> {
    if p == 1.0 {
        return Err(Error::Unsupported(
            "the tau norm is undefined at p = 1, so there is nothing to compare".into(),
        ));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent p must be > 1, got {p}")));
    }
    if coords.is_empty() || coords.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: coords.len(),
            got: weights.len(),
        });
    }
    for d in coords {
        d.validate()?;
        if !d.is_centered() {
            return Err(Error::Precondition(format!("{d} is not centered")));
        }
    }
    let q = p / (p - 1.0);
    let r = q.min(2.0);
    let mut terms = Vec::with_capacity(coords.len());
    for (d, &w) in coords.iter().zip(weights) {
        if w == 0.0 || matches!(d, DistributionSpec::PointMass { .. }) {
            terms.push(0.0);
            continue;
        }
        let lm = |s: f64| d.log_mgf(w * s);
        let res = tau_norm_from_log_mgf(&lm, p, w.abs() * d.scale(), w * w * d.variance(), tol)?;
        terms.push(res.value);
    }
    let active: Vec<(DistributionSpec, f64)> = coords
        .iter()
        .zip(weights)
        .filter(|(d, &w)| w != 0.0 && !matches!(d, DistributionSpec::PointMass { .. }))
        .map(|(d, &w)| (*d, w))
        .collect();
    let lhs = if active.is_empty() {
        0.0
    } else {
        let lm = |s: f64| active.iter().map(|(d, w)| d.log_mgf(w * s)).sum::<f64>();
        let variance: f64 = active.iter().map(|(d, w)| w * w * d.variance()).sum();
        let scale = active.iter().map(|(d, w)| w.abs() * d.scale()).fold(0.0, f64::max);
        tau_norm_from_log_mgf(&lm, p, scale, variance, tol)?.value
    };
    let rhs = terms.iter().map(|t| t.powf(r)).sum::<f64>().powf(1.0 / r);
    Ok(RotationReport {
        p,
        q,
        r,
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { f64::NAN },
        verdict: lhs <= rhs * (1.0 + 5.0 * tol),
        terms,
        tol,
    })
}

/// `P(|X − E X| ≥ t)` in closed form.
pub fn centered_abs_tail(dist: &DistributionSpec, t: f64) -> f64 {
    use DistributionSpec::*;
    let t = t.max(0.0);
    let one_sided = |surv: &dyn Fn(f64) -> f64, mu: f64| {
        let upper = surv(mu + t);
        let lower = if t < mu { 1.0 - surv(mu - t) } else { 0.0 };
        (upper + lower).min(1.0)
    };
    match *dist {
        Gaussian { sigma, .. } => Gaussian { mean: 0.0, sigma }.tail(t),
        Exponential { rate } => one_sided(&|x| (-rate * x).exp(), 1.0 / rate),
        Weibull { lambda, shape } => one_sided(
            &|x| (-(x / lambda).powf(shape)).exp(),
            lambda * tgamma(1.0 + 1.0 / shape),
        ),
        PointMass { .. } => {
            if t == 0.0 {
                1.0
            } else {
                0.0
            }
        }
        _ => dist.tail(t),
    }
}

/// `‖X − E X‖ψ₁`.
pub fn centered_psi1(dist: &DistributionSpec) -> Result<f64> {
    if dist.is_centered() {
        return Ok(luxemburg_norm(&MomentSource::Analytic(*dist), 1.0, DEFAULT_TOL_ANALYTIC)?.value);
    }
    if let DistributionSpec::Gaussian { sigma, .. } = *dist {
        let g = DistributionSpec::Gaussian { mean: 0.0, sigma };
        return Ok(luxemburg_norm(&MomentSource::Analytic(g), 1.0, DEFAULT_TOL_ANALYTIC)?.value);
    }
    let mu = dist.mean();
    let res = solve_luxemburg(
        |k| dist.log_expect_exp(&|x: f64| (x - mu).abs() / k).exp(),
        DEFAULT_TOL_ANALYTIC,
    );
    if !res.is_finite() {
        return Err(Error::Precondition(format!("{dist} has no finite psi_1 norm")));
    }
    Ok(res.value)
}

/// A centered sub-exponential variable used to calibrate `C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationCase {
    pub label: String,
    pub dist: DistributionSpec,
    pub t_grid: Vec<f64>,
}

impl CalibrationCase {
    /// Grid of `points` values from 0 to where the exact tail of `|X − EX|`
    /// falls to `tail_floor`.
    pub fn new(label: impl Into<String>, dist: DistributionSpec, tail_floor: f64, points: usize) -> Result<Self> {
        dist.validate()?;
        if !(tail_floor > 0.0 && tail_floor < 1.0) {
            return Err(Error::Domain(format!("tail floor must be in (0, 1), got {tail_floor}")));
        }
        let mut hi = dist.scale().max(1e-300);
        while centered_abs_tail(&dist, hi) > tail_floor {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Domain(format!("{dist} has no tail below {tail_floor}")));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if centered_abs_tail(&dist, mid) > tail_floor {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Self {
            label: label.into(),
            dist,
            t_grid: linear_grid(hi, points),
        })
    }
}

/// Tail floor of the default calibration grids.
pub const CALIBRATION_TAIL_FLOOR: f64 = 1e-3;

/// Laplace, centered standard exponential and standard Gaussian.
pub fn default_calibration_cases() -> Vec<CalibrationCase> {
    [
        (
            "laplace",
            DistributionSpec::SymmetrizedWeibull {
                lambda: 1.0,
                shape: 1.0,
            },
        ),
        ("centered_exponential", DistributionSpec::Exponential { rate: 1.0 }),
        ("gaussian", DistributionSpec::Gaussian { mean: 0.0, sigma: 1.0 }),
    ]
    .into_iter()
    .map(|(l, d)| CalibrationCase::new(l, d, CALIBRATION_TAIL_FLOOR, 40).expect("valid default case"))
    .collect()
}

/// The candidate constants `2^{k/4}`, `k = −8..=16`.
pub fn calibration_grid() -> Vec<(i32, f64)> {
    (-8..=16).map(|k| (k, 2f64.powf(k as f64 / 4.0))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseCalibration {
    pub label: String,
    pub psi1: f64,
    pub worst_ratio: f64,
    pub excluded_points: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub c: f64,
    /// `C = 2^{k/4}`.
    pub k: i32,
    pub samples: usize,
    pub seed: u64,
    pub cases: Vec<CaseCalibration>,
}

/// Smallest `C = 2^{k/4}` for which `2 exp(−g(t))`, with the
/// sub-exponential parameters of each case, dominates the case's 99% upper
/// tail limits on its grid.
pub fn calibrate_c(cases: &[CalibrationCase], samples: usize, seed: u64) -> Result<CalibrationReport> {
    if cases.is_empty() {
        return Err(Error::Invalid("no calibration cases".into()));
    }
    if samples < 10_000 {
        return Err(Error::Invalid(format!(
            "tail verification needs at least 10^4 samples, got {samples}"
        )));
    }
    let mut prepared = Vec::with_capacity(cases.len());
    for (i, case) in cases.iter().enumerate() {
        let psi1 = centered_psi1(&case.dist)?;
        let mu = case.dist.mean();
        let values: Vec<f64> = case
            .dist
            .sample_values(samples, rng::derive_seed(seed, i as u64))
            .into_iter()
            .map(|x| x - mu)
            .collect();
        let tail = empirical_tail(&values, &case.t_grid)?;
        prepared.push((case, psi1, tail.upper_curve(case.label.clone())));
    }
    let mut last_failure = String::new();
    for (k, c) in calibration_grid() {
        let mut summaries = Vec::with_capacity(prepared.len());
        let mut ok = true;
        for (case, psi1, upper) in &prepared {
            let params = subexp_params(*psi1, c)?;
            let bound = TailCurve::from_fn(&case.t_grid, case.label.clone(), |t| {
                tail_from_exponent(g_piecewise(t, &params))
            })?;
            let v = verify_tail_bound(upper, &bound, samples)?;
            if !v.verdict {
                ok = false;
                last_failure = format!(
                    "case '{}' is not dominated at C = {c} (worst ratio {:.4})",
                    case.label, v.worst_ratio
                );
                break;
            }
            summaries.push(CaseCalibration {
                label: case.label.clone(),
                psi1: *psi1,
                worst_ratio: v.worst_ratio,
                excluded_points: v.excluded_points,
            });
        }
        if ok {
            return Ok(CalibrationReport {
                c,
                k,
                samples,
                seed,
                cases: summaries,
            });
        }
    }
    Err(Error::Calibration(format!(
        "no C in the grid works; largest candidate failed: {last_failure}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use DistributionSpec::*;

    #[test]
    fn empirical_tail_basics() {
        let zeros = vec![0.0; 100];
        let e = empirical_tail(&zeros, &[0.0, 0.1]).unwrap();
        assert_eq!(e.frequency, vec![1.0, 0.0]);
        assert_eq!(e.upper99[0], 1.0);
        assert!(e.upper99[1] > 0.0 && e.upper99[1] < 0.05);
        assert!(empirical_tail(&zeros, &[0.1, 0.0]).is_err());
    }

    #[test]
    fn gaussian_tail_frequency() {
        let g = Gaussian { mean: 0.0, sigma: 1.0 };
        let x = g.sample_values(1_000_000, 42);
        let e = empirical_tail(&x, &[0.0, 1.0]).unwrap();
        assert_eq!(e.frequency[0], 1.0);
        assert!((e.frequency[1] - g.tail(1.0)).abs() < 0.002, "{}", e.frequency[1]);
        assert!((g.tail(1.0) - 0.3173).abs() < 1e-4);
    }

    #[test]
    fn clopper_pearson_oracle() {
        // k = 0: (1 - u)^n = alpha.
        let u = clopper_pearson_upper(0, 1000, 0.99);
        assert!(((1.0 - u).powi(1000) - 0.01).abs() < 1e-12);
        // Direct binomial CDF at the limit equals alpha.
        for (k, n) in [(1u64, 10u64), (3, 20), (50, 400)] {
            let u = clopper_pearson_upper(k, n, 0.99);
            let cdf: f64 = (0..=k)
                .map(|j| {
                    let ln_c =
                        libm::lgamma((n + 1) as f64) - libm::lgamma((j + 1) as f64) - libm::lgamma((n - j + 1) as f64);
                    (ln_c + j as f64 * u.ln() + (n - j) as f64 * (1.0 - u).ln()).exp()
                })
                .sum();
            assert!((cdf - 0.01).abs() < 1e-9, "k={k} n={n}: {cdf}");
        }
        assert_eq!(clopper_pearson_upper(5, 5, 0.99), 1.0);
    }

    #[test]
    fn verification_examples() {
        let grid = linear_grid(5.0, 11);
        let two = TailCurve::from_fn(&grid, "two", |_| 2.0).unwrap();
        let emp = TailCurve::from_fn(&grid, "e", |t| (-t).exp()).unwrap();
        let v = verify_tail_bound(&emp, &two, 1000).unwrap();
        assert!(v.verdict);
        let half = TailCurve::from_fn(&grid, "half", |t| (-t).exp() / 2.0).unwrap();
        let bound = TailCurve::from_fn(&grid, "b", |t| (-t).exp()).unwrap();
        let v = verify_tail_bound(&half, &bound, 1_000_000).unwrap();
        assert!(v.verdict);
        assert!((v.worst_ratio - 0.5).abs() < 1e-15);
        let other = TailCurve::from_fn(&linear_grid(4.0, 11), "o", |_| 1.0).unwrap();
        assert!(matches!(
            verify_tail_bound(&emp, &other, 100),
            Err(Error::GridMismatch(_))
        ));
        // Points with bound below 4/N are excluded, not failed.
        let v = verify_tail_bound(&emp, &bound, 10).unwrap();
        assert!(!v.excluded_points.is_empty());
    }

    #[test]
    fn deterministic_across_workers() {
        let g = SymmetrizedWeibull {
            lambda: 1.0,
            shape: 1.5,
        };
        let grid = linear_grid(4.0, 20);
        let run = |w| rng::with_workers(w, || empirical_tail(&g.sample_values(100_000, 9), &grid).unwrap());
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn rotation_gaussian_equality() {
        let coords = vec![Gaussian { mean: 0.0, sigma: 1.0 }; 4];
        let r = rotation_invariance_check(&coords, &[1.0; 4], 2.0, 1e-9).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-6, "{}", r.lhs);
        assert!((r.rhs - 2.0).abs() < 1e-6);
        assert!(r.verdict);
        assert!((r.ratio - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rotation_single_and_weibull() {
        let one = [SymmetrizedWeibull {
            lambda: 1.0,
            shape: 3.0,
        }];
        let r = rotation_invariance_check(&one, &[0.7], 3.0, 1e-9).unwrap();
        assert_eq!(r.lhs, r.rhs);
        let pair = [SymmetrizedWeibull {
            lambda: 1.0,
            shape: 3.0,
        }; 2];
        let r = rotation_invariance_check(&pair, &[1.0, 1.0], 3.0, 1e-9).unwrap();
        assert!(r.verdict, "{r:?}");
        assert_eq!(r.r, 1.5);
        assert!(matches!(
            rotation_invariance_check(&pair, &[1.0, 1.0], 1.0, 1e-9),
            Err(Error::Unsupported(_))
        ));
        let skew = [Exponential { rate: 1.0 }];
        assert!(matches!(
            rotation_invariance_check(&skew, &[1.0], 2.0, 1e-9),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn centered_tail_and_psi1() {
        let e = Exponential { rate: 1.0 };
        assert!((centered_abs_tail(&e, 2.0) - (-3.0f64).exp()).abs() < 1e-15);
        let want = (-1.5f64).exp() + 1.0 - (-0.5f64).exp();
        assert!((centered_abs_tail(&e, 0.5) - want).abs() < 1e-15);
        // ψ₁ of E − 1 solves K/(K+1)·(e^{1/K} − e^{-1}) + e^{-1}·K/(K−1) = 2.
        let k = centered_psi1(&e).unwrap();
        let em1 = (-1.0f64).exp();
        let f = k / (k + 1.0) * ((1.0 / k).exp() - em1) + em1 * k / (k - 1.0);
        assert!((f - 2.0).abs() < 1e-8, "{k} {f}");
        let lap = SymmetrizedWeibull {
            lambda: 1.0,
            shape: 1.0,
        };
        assert!((centered_psi1(&lap).unwrap() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn calibration_is_scale_equivariant() {
        let base = CalibrationCase::new(
            "laplace",
            SymmetrizedWeibull {
                lambda: 1.0,
                shape: 1.0,
            },
            1e-3,
            30,
        )
        .unwrap();
        let scaled = CalibrationCase::new(
            "laplace3",
            SymmetrizedWeibull {
                lambda: 3.0,
                shape: 1.0,
            },
            1e-3,
            30,
        )
        .unwrap();
        let a = calibrate_c(&[base], 100_000, 4).unwrap();
        let b = calibrate_c(&[scaled], 100_000, 4).unwrap();
        assert_eq!(a.k, b.k);
        assert!(calibrate_c(&[], 100_000, 4).is_err());
    }
}
