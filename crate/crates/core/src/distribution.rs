//! The distribution zoo: scalar laws with exact absolute moments, moment
//! generating functions, tail functions and seeded samplers.
//!
//! These are the ground truth the norm solvers are checked against. Every
//! law here has super-polynomially decaying tails, so all expectations that
//! lack a closed form are computed by log-space quadrature.

use libm::{erfc, lgamma as ln_gamma};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::{ln_integral, log_add_exp};
use crate::rng;

/// Analytic description of a scalar random variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Gaussian {
        mean: f64,
        sigma: f64,
    },
    Weibull {
        lambda: f64,
        shape: f64,
    },
    /// `ε·W` with `W ~ Weibull(lambda, shape)` and an independent sign `ε`.
    SymmetrizedWeibull {
        lambda: f64,
        shape: f64,
    },
    Rademacher {
        scale: f64,
    },
    UniformSymmetric {
        half_width: f64,
    },
    PointMass {
        c: f64,
    },
    Exponential {
        rate: f64,
    },
}

use DistributionSpec::*;

/// A batch of draws together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    values: Vec<f64>,
    seed: u64,
    source_description: String,
}

impl SampleBatch {
    pub fn new(values: Vec<f64>, seed: u64, source_description: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("sample batch is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("sample value {i} is not finite")));
        }
        Ok(Self {
            values,
            seed,
            source_description: source_description.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source_description(&self) -> &str {
        &self.source_description
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Standard error of the sample mean.
    pub fn standard_error(&self) -> f64 {
        let n = self.values.len() as f64;
        if self.values.len() < 2 {
            return 0.0;
        }
        let m = self.mean();
        let var = self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }

    /// Returns a copy with the sample mean subtracted.
    pub fn centered(&self) -> SampleBatch {
        let m = self.mean();
        SampleBatch {
            values: self.values.iter().map(|v| v - m).collect(),
            seed: self.seed,
            source_description: format!("{} (centered)", self.source_description),
        }
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> SampleBatch {
        SampleBatch {
            values: self.values.iter().map(|v| v * factor).collect(),
            seed: self.seed,
            source_description: format!("{} x {factor}", self.source_description),
        }
    }
}

/// One integration branch of a continuous law: the ray `origin + dir·u`,
/// `u ∈ [0, length]`, with log-density `ln_density(u)`.
struct Branch<'a> {
    origin: f64,
    dir: f64,
    length: f64,
    ln_density: Box<dyn Fn(f64) -> f64 + 'a>,
}

fn weibull_ln_pdf(u: f64, lambda: f64, shape: f64) -> f64 {
    let z = u / lambda;
    let mut v = (shape / lambda).ln() - z.powf(shape);
    if shape != 1.0 {
        v += (shape - 1.0) * z.ln();
    }
    v
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        match *self {
            Gaussian { mean, sigma } => {
                if !mean.is_finite() {
                    return Err(Error::Domain("gaussian mean must be finite".into()));
                }
                positive("sigma", sigma)
            }
            Weibull { lambda, shape } | SymmetrizedWeibull { lambda, shape } => {
                positive("lambda", lambda)?;
                if !(shape.is_finite() && shape >= 1.0) {
                    return Err(Error::Domain(format!("weibull shape must be >= 1, got {shape}")));
                }
                Ok(())
            }
            Rademacher { scale } => positive("scale", scale),
            UniformSymmetric { half_width } => positive("half_width", half_width),
            PointMass { c } => {
                if c.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain("point mass location must be finite".into()))
                }
            }
            Exponential { rate } => positive("rate", rate),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gaussian { .. } => "gaussian",
            Weibull { .. } => "weibull",
            SymmetrizedWeibull { .. } => "symmetrized_weibull",
            Rademacher { .. } => "rademacher",
            UniformSymmetric { .. } => "uniform_symmetric",
            PointMass { .. } => "point_mass",
            Exponential { .. } => "exponential",
        }
    }

    pub fn is_centered(&self) -> bool {
        match *self {
            Gaussian { mean, .. } => mean == 0.0,
            SymmetrizedWeibull { .. } | Rademacher { .. } | UniformSymmetric { .. } => true,
            PointMass { c } => c == 0.0,
            Weibull { .. } | Exponential { .. } => false,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Rademacher { .. } | PointMass { .. })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Gaussian { mean, .. } => mean,
            Weibull { lambda, shape } => lambda * (ln_gamma(1.0 / shape + 1.0)).exp(),
            SymmetrizedWeibull { .. } | Rademacher { .. } | UniformSymmetric { .. } => 0.0,
            PointMass { c } => c,
            Exponential { rate } => 1.0 / rate,
        }
    }

    pub fn variance(&self) -> f64 {
        self.raw_moment(2) - self.mean().powi(2)
    }

    /// The law of `s·ξ` for `s > 0`.
    pub fn scaled(&self, s: f64) -> DistributionSpec {
        match *self {
            Gaussian { mean, sigma } => Gaussian {
                mean: mean * s,
                sigma: sigma * s,
            },
            Weibull { lambda, shape } => Weibull {
                lambda: lambda * s,
                shape,
            },
            SymmetrizedWeibull { lambda, shape } => SymmetrizedWeibull {
                lambda: lambda * s,
                shape,
            },
            Rademacher { scale } => Rademacher { scale: scale * s },
            UniformSymmetric { half_width } => UniformSymmetric {
                half_width: half_width * s,
            },
            PointMass { c } => PointMass { c: c * s },
            Exponential { rate } => Exponential { rate: rate / s },
        }
    }

    /// Characteristic length used to place integration and search grids.
    pub fn scale(&self) -> f64 {
        let s = match *self {
            Gaussian { mean, sigma } => sigma.max(mean.abs() * 1e-3),
            Weibull { lambda, .. } | SymmetrizedWeibull { lambda, .. } => lambda,
            Rademacher { scale } => scale,
            UniformSymmetric { half_width } => half_width,
            PointMass { c } => c.abs(),
            Exponential { rate } => 1.0 / rate,
        };
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// `ln E|ξ|^α` by closed form.
    pub fn ln_moment_abs(&self, alpha: f64) -> Result<f64> {
        if !(alpha >= 1.0) {
            return Err(Error::Domain(format!("moment order must be >= 1, got {alpha}")));
        }
        Ok(match *self {
            Gaussian { mean: 0.0, sigma } => {
                alpha * sigma.ln() + 0.5 * alpha * LN_2 + ln_gamma(0.5 * (alpha + 1.0)) - 0.5 * PI.ln()
            }
            Gaussian { .. } => self.ln_moment_abs_quadrature(alpha),
            Weibull { lambda, shape } | SymmetrizedWeibull { lambda, shape } => {
                alpha * lambda.ln() + ln_gamma(alpha / shape + 1.0)
            }
            Rademacher { scale } => alpha * scale.ln(),
            UniformSymmetric { half_width } => alpha * half_width.ln() - (alpha + 1.0).ln(),
            PointMass { c } => alpha * c.abs().ln(),
            Exponential { rate } => ln_gamma(alpha + 1.0) - alpha * rate.ln(),
        })
    }

    /// `E|ξ|^α`, exact where a closed form exists.
    pub fn moment_abs(&self, alpha: f64) -> Result<f64> {
        Ok(self.ln_moment_abs(alpha)?.exp())
    }

    /// `ln E|ξ|^α` computed by quadrature regardless of closed forms.
    pub fn ln_moment_abs_quadrature(&self, alpha: f64) -> f64 {
        self.log_expect_exp(&|x: f64| alpha * x.abs().ln())
    }

    /// `E ξ^k` for integer `k`.
    pub fn raw_moment(&self, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let even = k.is_multiple_of(2);
        let kf = k as f64;
        match *self {
            Gaussian { mean, sigma } => {
                let (mut m0, mut m1) = (1.0, mean);
                for j in 2..=k {
                    let m2 = mean * m1 + (j - 1) as f64 * sigma * sigma * m0;
                    m0 = m1;
                    m1 = m2;
                }
                m1
            }
            Weibull { lambda, shape } => (kf * lambda.ln() + ln_gamma(kf / shape + 1.0)).exp(),
            SymmetrizedWeibull { lambda, shape } if even => (kf * lambda.ln() + ln_gamma(kf / shape + 1.0)).exp(),
            Rademacher { scale } if even => scale.powi(k as i32),
            UniformSymmetric { half_width } if even => half_width.powi(k as i32) / (kf + 1.0),
            SymmetrizedWeibull { .. } | Rademacher { .. } | UniformSymmetric { .. } => 0.0,
            PointMass { c } => c.powi(k as i32),
            Exponential { rate } => (ln_gamma(kf + 1.0) - kf * rate.ln()).exp(),
        }
    }

    fn branches(&self) -> Vec<Branch<'_>> {
        match *self {
            Gaussian { mean, sigma } => {
                let norm = -(sigma * (2.0 * PI).sqrt()).ln();
                [1.0, -1.0]
                    .into_iter()
                    .map(|dir| Branch {
                        origin: mean,
                        dir,
                        length: f64::INFINITY,
                        ln_density: Box::new(move |u: f64| norm - 0.5 * (u / sigma).powi(2)),
                    })
                    .collect()
            }
            Weibull { lambda, shape } => vec![Branch {
                origin: 0.0,
                dir: 1.0,
                length: f64::INFINITY,
                ln_density: Box::new(move |u| weibull_ln_pdf(u, lambda, shape)),
            }],
            SymmetrizedWeibull { lambda, shape } => [1.0, -1.0]
                .into_iter()
                .map(|dir| Branch {
                    origin: 0.0,
                    dir,
                    length: f64::INFINITY,
                    ln_density: Box::new(move |u| weibull_ln_pdf(u, lambda, shape) - LN_2),
                })
                .collect(),
            UniformSymmetric { half_width } => [1.0, -1.0]
                .into_iter()
                .map(|dir| Branch {
                    origin: 0.0,
                    dir,
                    length: half_width,
                    ln_density: Box::new(move |_| -(2.0 * half_width).ln()),
                })
                .collect(),
            Exponential { rate } => vec![Branch {
                origin: 0.0,
                dir: 1.0,
                length: f64::INFINITY,
                ln_density: Box::new(move |u| rate.ln() - rate * u),
            }],
            Rademacher { .. } | PointMass { .. } => Vec::new(),
        }
    }

    /// `ln E exp(g(ξ))`, by exact sums for discrete laws and log-space
    /// quadrature otherwise. Returns `+∞` when the expectation diverges.
    pub fn log_expect_exp(&self, g: &dyn Fn(f64) -> f64) -> f64 {
        match *self {
            Rademacher { scale } => log_add_exp(g(scale), g(-scale)) - LN_2,
            PointMass { c } => g(c),
            _ => {
                let scale = self.scale();
                self.branches()
                    .iter()
                    .map(|b| ln_integral(|u| g(b.origin + b.dir * u) + (b.ln_density)(u), b.length, scale))
                    .fold(f64::NEG_INFINITY, log_add_exp)
            }
        }
    }

    /// Natural log of the moment generating function; `+∞` outside its domain.
    pub fn log_mgf(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match *self {
            Gaussian { mean, sigma } => mean * t + 0.5 * sigma * sigma * t * t,
            Weibull { lambda, shape: 1.0 } => {
                if lambda * t < 1.0 {
                    -(-lambda * t).ln_1p()
                } else {
                    f64::INFINITY
                }
            }
            SymmetrizedWeibull { lambda, shape: 1.0 } => {
                let x = lambda * t;
                if x.abs() < 1.0 {
                    -(-x * x).ln_1p()
                } else {
                    f64::INFINITY
                }
            }
            Weibull { .. } | SymmetrizedWeibull { .. } => self.log_expect_exp(&|x| t * x),
            Rademacher { scale } => ln_cosh(scale * t),
            UniformSymmetric { half_width } => {
                let x = (half_width * t).abs();
                if x < 1e-4 {
                    let x2 = x * x;
                    (x2 / 6.0 + x2 * x2 / 120.0).ln_1p()
                } else {
                    // ln(sinh x / x)
                    x + (-(-2.0 * x).exp()).ln_1p() - LN_2 - x.ln()
                }
            }
            PointMass { c } => c * t,
            Exponential { rate } => {
                if t < rate {
                    -(-t / rate).ln_1p()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `E exp(tξ)`; `+∞` when the integral diverges.
    pub fn mgf(&self, t: f64) -> f64 {
        self.log_mgf(t).exp()
    }

    /// `P(|ξ| ≥ t)`.
    pub fn tail(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        let step = |edge: f64| if t <= edge { 1.0 } else { 0.0 };
        match *self {
            Gaussian { mean, sigma } => {
                if t == 0.0 {
                    return 1.0;
                }
                let s = sigma * std::f64::consts::SQRT_2;
                (0.5 * erfc((t - mean) / s) + 0.5 * erfc((t + mean) / s)).min(1.0)
            }
            Weibull { lambda, shape } | SymmetrizedWeibull { lambda, shape } => (-(t / lambda).powf(shape)).exp(),
            Rademacher { scale } => step(scale),
            UniformSymmetric { half_width } => (1.0 - t / half_width).max(0.0),
            PointMass { c } => step(c.abs()),
            Exponential { rate } => (-rate * t).exp(),
        }
    }

    /// Draws a single value.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Gaussian { mean, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sigma * z
            }
            Weibull { lambda, shape } => {
                let e: f64 = rng.sample(Exp1);
                lambda * e.powf(1.0 / shape)
            }
            SymmetrizedWeibull { lambda, shape } => {
                let e: f64 = rng.sample(Exp1);
                let w = lambda * e.powf(1.0 / shape);
                if rng.random::<bool>() {
                    w
                } else {
                    -w
                }
            }
            Rademacher { scale } => {
                if rng.random::<bool>() {
                    scale
                } else {
                    -scale
                }
            }
            UniformSymmetric { half_width } => half_width * (2.0 * rng.random::<f64>() - 1.0),
            PointMass { c } => c,
            Exponential { rate } => {
                let e: f64 = rng.sample(Exp1);
                e / rate
            }
        }
    }

    /// `n` draws, deterministic in `(self, n, seed)` and independent of the
    /// number of worker threads.
    pub fn sample_values(&self, n: usize, seed: u64) -> Vec<f64> {
        let chunks: Vec<Vec<f64>> = rng::blocks(n)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(k, range)| {
                let mut r = rng::block_rng(seed, k);
                range.map(|_| self.draw(&mut r)).collect()
            })
            .collect();
        chunks.concat()
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleBatch> {
        if n == 0 {
            return Err(Error::Invalid("sample size must be >= 1".into()));
        }
        self.validate()?;
        SampleBatch::new(self.sample_values(n, seed), seed, format!("{self}"))
    }
}

impl std::fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Gaussian { mean, sigma } => write!(f, "gaussian(mean={mean}, sigma={sigma})"),
            Weibull { lambda, shape } => write!(f, "weibull(lambda={lambda}, shape={shape})"),
            SymmetrizedWeibull { lambda, shape } => {
                write!(f, "symmetrized_weibull(lambda={lambda}, shape={shape})")
            }
            Rademacher { scale } => write!(f, "rademacher(scale={scale})"),
            UniformSymmetric { half_width } => write!(f, "uniform_symmetric(half_width={half_width})"),
            PointMass { c } => write!(f, "point_mass(c={c})"),
            Exponential { rate } => write!(f, "exponential(rate={rate})"),
        }
    }
}

/// A representative member of every family, used for listings and sweeps.
pub fn zoo() -> Vec<DistributionSpec> {
    vec![
        Gaussian { mean: 0.0, sigma: 1.0 },
        Gaussian { mean: 0.5, sigma: 1.5 },
        Weibull {
            lambda: 1.0,
            shape: 1.0,
        },
        Weibull {
            lambda: 1.0,
            shape: 1.5,
        },
        Weibull {
            lambda: 1.0,
            shape: 2.0,
        },
        Weibull {
            lambda: 2.0,
            shape: 3.0,
        },
        SymmetrizedWeibull {
            lambda: 1.0,
            shape: 1.0,
        },
        SymmetrizedWeibull {
            lambda: 1.0,
            shape: 1.5,
        },
        SymmetrizedWeibull {
            lambda: 1.0,
            shape: 2.0,
        },
        SymmetrizedWeibull {
            lambda: 1.0,
            shape: 3.0,
        },
        Rademacher { scale: 1.0 },
        UniformSymmetric { half_width: 1.0 },
        PointMass { c: 3.0 },
        Exponential { rate: 1.0 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::tgamma as gamma;

    #[test]
    fn weibull_moments_are_gamma_values() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let d = Weibull { lambda: 1.0, shape: p };
            for alpha in [1.0, 2.5, 7.0] {
                let m = d.moment_abs(alpha).unwrap();
                let want = gamma(alpha / p + 1.0);
                assert!((m - want).abs() <= 1e-12 * want, "p={p} a={alpha}");
            }
        }
        let d = Weibull {
            lambda: 2.0,
            shape: 2.0,
        };
        let want = 2f64.powf(3.0) * gamma(2.5);
        assert!((d.moment_abs(3.0).unwrap() - want).abs() < 1e-11 * want);
    }

    #[test]
    fn simple_moments() {
        assert!((PointMass { c: 3.0 }.moment_abs(2.0).unwrap() - 9.0).abs() < 1e-12);
        let g = Gaussian { mean: 0.0, sigma: 1.0 };
        assert!((g.moment_abs(2.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((g.moment_abs(4.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(g.moment_abs(0.5).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form_moments() {
        let mut alphas = Vec::new();
        let mut a = 1.0;
        while a <= 20.0 {
            alphas.push(a);
            a += 0.5;
        }
        for d in zoo().into_iter().filter(|d| !d.is_discrete()) {
            for &alpha in &alphas {
                let closed = d.ln_moment_abs(alpha).unwrap().exp();
                let quad = d.ln_moment_abs_quadrature(alpha).exp();
                let rel = (closed - quad).abs() / closed;
                assert!(rel <= 1e-8, "{d} alpha={alpha}: {closed} vs {quad} rel {rel}");
            }
        }
    }

    #[test]
    fn shifted_gaussian_moment_by_quadrature() {
        let d = Gaussian { mean: 1.0, sigma: 2.0 };
        // E X^2 = mu^2 + sigma^2
        assert!((d.moment_abs(2.0).unwrap() - 5.0).abs() < 1e-10);
        assert!((d.raw_moment(2) - 5.0).abs() < 1e-14);
        // E X^4 = mu^4 + 6 mu^2 s^2 + 3 s^4
        assert!((d.raw_moment(4) - (1.0 + 24.0 + 48.0)).abs() < 1e-12);
        assert!((d.moment_abs(4.0).unwrap() - 73.0).abs() < 1e-8);
    }

    #[test]
    fn mgf_examples() {
        let g = Gaussian { mean: 0.0, sigma: 2.0 };
        assert!((g.mgf(0.7) - (4.0f64 * 0.49 / 2.0).exp()).abs() < 1e-13);
        let r = Rademacher { scale: 1.0 };
        for t in [-3.0, -0.1, 0.2, 5.0, 40.0] {
            let want: f64 = f64::cosh(t);
            assert!((r.mgf(t) - want).abs() <= 1e-13 * want);
        }
        assert_eq!(Exponential { rate: 1.0 }.mgf(1.0), f64::INFINITY);
        assert_eq!(
            Weibull {
                lambda: 1.0,
                shape: 1.0
            }
            .mgf(2.0),
            f64::INFINITY
        );
        assert!((Exponential { rate: 2.0 }.mgf(1.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn mgf_quadrature_against_series() {
        // Weibull shape 2 has E e^{tW} = 1 + t·√π/2·e^{t²/4}(1 + erf(t/2)).
        let d = Weibull {
            lambda: 1.0,
            shape: 2.0,
        };
        for t in [-2.0, -0.3, 0.4, 1.5, 3.0] {
            let erf = 1.0 - erfc(t / 2.0);
            let want: f64 = 1.0 + t * PI.sqrt() / 2.0 * (t * t / 4.0).exp() * (1.0 + erf);
            let got = d.mgf(t);
            assert!((got - want).abs() < 1e-11 * want, "t={t}: {got} vs {want}");
        }
        let s = SymmetrizedWeibull {
            lambda: 1.0,
            shape: 2.0,
        };
        let want = 0.5 * (d.mgf(1.5) + d.mgf(-1.5));
        assert!((s.mgf(1.5) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn centered_mgfs_are_one_at_zero_and_convex() {
        for d in zoo().into_iter().filter(|d| d.is_centered()) {
            assert_eq!(d.mgf(0.0), 1.0);
            let ts: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.1).collect();
            let v: Vec<f64> = ts.iter().map(|&t| d.mgf(t)).collect();
            for w in v.windows(3) {
                if w.iter().all(|x| x.is_finite()) {
                    assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-9 * w[1], "{d}");
                }
            }
        }
    }

    #[test]
    fn tail_examples() {
        let w = Weibull {
            lambda: 1.0,
            shape: 2.5,
        };
        assert!((w.tail(1.3) - (-(1.3f64).powf(2.5)).exp()).abs() < 1e-15);
        let pm = PointMass { c: 2.0 };
        assert_eq!(pm.tail(1.0), 1.0);
        assert_eq!(pm.tail(3.0), 0.0);
        assert_eq!(Gaussian { mean: 0.0, sigma: 1.0 }.tail(0.0), 1.0);
        let g = Gaussian { mean: 0.0, sigma: 1.0 };
        assert!((g.tail(1.0) - 0.317_310_507_862_914_1).abs() < 1e-12);
    }

    #[test]
    fn tails_are_non_increasing() {
        for d in zoo() {
            let mut prev = 1.0;
            for k in 0..400 {
                let t = k as f64 * 0.02 * d.scale();
                let v = d.tail(t);
                assert!((0.0..=1.0).contains(&v));
                assert!(v <= prev, "{d} at {t}");
                prev = v;
            }
        }
    }

    #[test]
    fn centering_flags() {
        assert!(SymmetrizedWeibull {
            lambda: 1.0,
            shape: 2.0
        }
        .is_centered());
        assert!(Gaussian { mean: 0.0, sigma: 3.0 }.is_centered());
        assert!(!Weibull {
            lambda: 1.0,
            shape: 2.0
        }
        .is_centered());
        assert!(!PointMass { c: 1.0 }.is_centered());
        assert!(!Exponential { rate: 1.0 }.is_centered());
    }

    #[test]
    fn shape_below_one_rejected() {
        assert!(Weibull {
            lambda: 1.0,
            shape: 0.5
        }
        .validate()
        .is_err());
        assert!(SymmetrizedWeibull {
            lambda: 1.0,
            shape: 0.9
        }
        .validate()
        .is_err());
        assert!(Weibull {
            lambda: 1.0,
            shape: 1.0
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = PointMass { c: 1.5 };
        assert_eq!(d.sample(5, 9).unwrap().values(), &[1.5; 5]);
        let g = SymmetrizedWeibull {
            lambda: 1.0,
            shape: 2.0,
        };
        let a = g.sample(50_000, 3).unwrap();
        let b = g.sample(50_000, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values(), g.sample(50_000, 4).unwrap().values());
    }

    #[test]
    fn rademacher_sample_mean() {
        let d = Rademacher { scale: 1.0 };
        let b = d.sample(1_000_000, 1).unwrap();
        assert!(b.mean().abs() < 0.005);
    }

    #[test]
    fn empirical_moments_converge() {
        let d = Weibull {
            lambda: 1.0,
            shape: 2.0,
        };
        let b = d.sample(400_000, 11).unwrap();
        let m2 = b.values().iter().map(|x| x * x).sum::<f64>() / b.len() as f64;
        assert!((m2 - 1.0).abs() < 0.01);
    }

    #[test]
    fn serde_shape() {
        let d: DistributionSpec = serde_json::from_str(r#"{"kind": "weibull", "lambda": 1.0, "shape": 2.0}"#).unwrap();
        assert_eq!(
            d,
            Weibull {
                lambda: 1.0,
                shape: 2.0
            }
        );
        let s = serde_json::to_string(&SymmetrizedWeibull {
            lambda: 1.0,
            shape: 3.0,
        })
        .unwrap();
        assert_eq!(s, r#"{"kind":"symmetrized_weibull","lambda":1.0,"shape":3.0}"#);
        assert!(serde_json::from_str::<DistributionSpec>(
            r#"{"kind": "weibull", "lambda": 1.0, "shape": 2.0, "extra": 1}"#
        )
        .is_err());
    }
}
