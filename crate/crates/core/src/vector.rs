//! Norms of random vectors.
//!
//! Three quantities are computed for a random vector `ξ ∈ ℝⁿ`:
//!
//! * the largest coordinate norm `max_i ‖ξ_i‖ψp`,
//! * the directional norm `‖ξ‖ψp = sup_{|t|_q = 1} ‖⟨ξ, t⟩‖ψp`,
//! * the `E_p` norm, the Luxemburg norm of `|ξ|_p`.
//!
//! When the law of every linear combination `⟨ξ, t⟩` is known exactly
//! (Gaussian and constant coordinates, or a single coordinate) everything
//! is analytic. Otherwise all quantities are computed from one fixed sample
//! matrix, so that the ordering between them is exact for that sample.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::borrow::Cow;

use crate::distribution::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::{
    analytic_exp_moment, in_psi_space, luxemburg_norm, measure_cp, solve_luxemburg, MomentSource, NormResult,
    NormStatus, DEFAULT_TOL_EMPIRICAL,
};

pub const DEFAULT_VECTOR_SAMPLES: usize = 20_000;

/// `N` observations of an `n`-dimensional vector, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    data: Vec<f64>,
    cols: usize,
    seed: u64,
}

impl SampleMatrix {
    pub fn new(data: Vec<f64>, cols: usize, seed: u64) -> Result<Self> {
        if cols == 0 {
            return Err(Error::Invalid("sample matrix needs at least one column".into()));
        }
        if data.is_empty() || !data.len().is_multiple_of(cols) {
            return Err(Error::Invalid(format!(
                "{} values do not form rows of length {cols}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "sample matrix entry ({}, {}) is not finite",
                i / cols,
                i % cols
            )));
        }
        Ok(Self { data, cols, seed })
    }

    pub fn from_rows(rows: &[Vec<f64>], seed: u64) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: rows[i].len(),
            });
        }
        Self::new(rows.concat(), cols, seed)
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.cols
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.iter().skip(j).step_by(self.cols).copied().collect()
    }

    /// `X t` for a direction `t`.
    pub fn project(&self, t: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.cols)
            .map(|r| r.iter().zip(t).map(|(x, w)| x * w).sum())
            .collect()
    }
}

/// A random vector, described analytically or by samples.
#[derive(Debug, Clone, PartialEq)]
pub enum RandomVectorSource {
    /// Independent coordinates with the given laws.
    IndependentProduct(Vec<DistributionSpec>),
    /// `ξ = M ζ` where `ζ` has independent coordinates `base` and `M` is
    /// `n × m` (one inner vector per row).
    LinearMix {
        base: Vec<DistributionSpec>,
        matrix: Vec<Vec<f64>>,
    },
    EmpiricalMatrix(SampleMatrix),
}

impl RandomVectorSource {
    pub fn iid(dist: DistributionSpec, n: usize) -> Self {
        RandomVectorSource::IndependentProduct(vec![dist; n])
    }

    pub fn dim(&self) -> usize {
        match self {
            RandomVectorSource::IndependentProduct(c) => c.len(),
            RandomVectorSource::LinearMix { matrix, .. } => matrix.len(),
            RandomVectorSource::EmpiricalMatrix(m) => m.cols(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RandomVectorSource::IndependentProduct(coords) => {
                if coords.is_empty() {
                    return Err(Error::Invalid("vector needs at least one coordinate".into()));
                }
                coords.iter().try_for_each(DistributionSpec::validate)
            }
            RandomVectorSource::LinearMix { base, matrix } => {
                if base.is_empty() || matrix.is_empty() {
                    return Err(Error::Invalid("linear mix needs a non-empty base and matrix".into()));
                }
                base.iter().try_for_each(DistributionSpec::validate)?;
                for row in matrix {
                    if row.len() != base.len() {
                        return Err(Error::DimensionMismatch {
                            expected: base.len(),
                            got: row.len(),
                        });
                    }
                    if row.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Invalid("mixing matrix has a non-finite entry".into()));
                    }
                }
                Ok(())
            }
            RandomVectorSource::EmpiricalMatrix(_) => Ok(()),
        }
    }

    /// Whether every coordinate has mean zero.
    pub fn is_centered(&self) -> bool {
        match self {
            RandomVectorSource::IndependentProduct(c) => c.iter().all(DistributionSpec::is_centered),
            RandomVectorSource::LinearMix { base, .. } => base.iter().all(DistributionSpec::is_centered),
            RandomVectorSource::EmpiricalMatrix(m) => {
                let n = m.rows() as f64;
                (0..m.cols()).all(|j| {
                    let col = m.column(j);
                    let mean = col.iter().sum::<f64>() / n;
                    let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                    mean.abs() <= 3.0 * (var / n).sqrt()
                })
            }
        }
    }

    /// `N` draws of the vector. An empirical source returns its own rows.
    pub fn sample_matrix(&self, n_samples: usize, seed: u64) -> Result<SampleMatrix> {
        self.validate()?;
        let draw_rows = |base: &[DistributionSpec]| -> Vec<f64> {
            let m = base.len();
            let chunks: Vec<Vec<f64>> = rng::blocks(n_samples)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|(k, range)| {
                    let mut r = rng::block_rng(seed, k);
                    let mut out = Vec::with_capacity(range.len() * m);
                    for _ in range {
                        out.extend(base.iter().map(|d| d.draw(&mut r)));
                    }
                    out
                })
                .collect();
            chunks.concat()
        };
        match self {
            RandomVectorSource::EmpiricalMatrix(m) => Ok(m.clone()),
            _ if n_samples == 0 => Err(Error::Invalid("sample size must be >= 1".into())),
            RandomVectorSource::IndependentProduct(coords) => SampleMatrix::new(draw_rows(coords), coords.len(), seed),
            RandomVectorSource::LinearMix { base, matrix } => {
                let zeta = draw_rows(base);
                let data = zeta
                    .chunks_exact(base.len())
                    .flat_map(|z| {
                        matrix
                            .iter()
                            .map(move |row| row.iter().zip(z).map(|(a, b)| a * b).sum::<f64>())
                    })
                    .collect();
                SampleMatrix::new(data, matrix.len(), seed)
            }
        }
    }

    /// Multiplies every coordinate by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            RandomVectorSource::IndependentProduct(coords) => {
                RandomVectorSource::IndependentProduct(coords.iter().map(|d| d.scaled(lambda)).collect())
            }
            RandomVectorSource::LinearMix { base, matrix } => RandomVectorSource::LinearMix {
                base: base.clone(),
                matrix: matrix.iter().map(|r| r.iter().map(|a| a * lambda).collect()).collect(),
            },
            RandomVectorSource::EmpiricalMatrix(m) => RandomVectorSource::EmpiricalMatrix(SampleMatrix {
                data: m.data.iter().map(|x| x * lambda).collect(),
                cols: m.cols,
                seed: m.seed,
            }),
        }
    }
}

/// Options shared by the vector norm routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VectorOptions {
    pub tol: f64,
    /// Sample size used when a sample matrix has to be drawn.
    pub samples: usize,
    pub seed: u64,
    /// Number of local ascents; `None` means `8 + n`.
    pub restarts: Option<usize>,
}

impl Default for VectorOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL_EMPIRICAL,
            samples: DEFAULT_VECTOR_SAMPLES,
            seed: 0,
            restarts: None,
        }
    }
}

/// How the numbers in a report were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EvaluationMode {
    Analytic,
    Sampled { samples: usize, seed: u64 },
}

#[inline]
fn abs_pow(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x.abs()
    } else if p == 2.0 {
        x * x
    } else {
        x.abs().powf(p)
    }
}

fn empirical_solve(pows: &[f64], p: f64, tol: f64) -> NormResult {
    if pows.iter().all(|&v| v == 0.0) {
        return NormResult {
            value: 0.0,
            status: NormStatus::Finite,
            bracket: (0.0, 0.0),
            evaluations: 0,
        };
    }
    solve_luxemburg(|k| mean_exp(pows, k.powf(p)), tol)
}

/// `(1/N) Σ exp(v_i / kp)` with a fixed summation order.
fn mean_exp(pows: &[f64], kp: f64) -> f64 {
    const CHUNK: usize = 1 << 14;
    let partial: Vec<f64> = pows
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|&v| (v / kp).exp()).sum::<f64>())
        .collect();
    partial.iter().sum::<f64>() / pows.len() as f64
}

fn exact_linear_laws(coords: &[DistributionSpec]) -> bool {
    coords.len() == 1
        || coords.iter().all(|d| {
            matches!(
                d,
                DistributionSpec::Gaussian { .. } | DistributionSpec::PointMass { .. }
            )
        })
}

/// Evaluates directional expectations either exactly or on a fixed sample.
enum Evaluator<'a> {
    Exact(&'a [DistributionSpec]),
    Batch(Cow<'a, SampleMatrix>),
}

impl<'a> Evaluator<'a> {
    fn for_source(src: &'a RandomVectorSource, opts: &VectorOptions) -> Result<Self> {
        src.validate()?;
        Ok(match src {
            RandomVectorSource::IndependentProduct(c) if exact_linear_laws(c) => Evaluator::Exact(c),
            RandomVectorSource::EmpiricalMatrix(m) => Evaluator::Batch(Cow::Borrowed(m)),
            _ => Evaluator::Batch(Cow::Owned(src.sample_matrix(opts.samples, opts.seed)?)),
        })
    }

    fn mode(&self) -> EvaluationMode {
        match self {
            Evaluator::Exact(_) => EvaluationMode::Analytic,
            Evaluator::Batch(m) => EvaluationMode::Sampled {
                samples: m.rows(),
                seed: m.seed(),
            },
        }
    }

    /// `E exp(|⟨ξ, t⟩ / K|^p)` in the exact case.
    fn exact_moment(coords: &[DistributionSpec], t: &[f64], k: f64, p: f64) -> f64 {
        if coords.len() == 1 {
            return if t[0] == 0.0 {
                1.0
            } else {
                analytic_exp_moment(&coords[0], k / t[0].abs(), p)
            };
        }
        let (mut mean, mut var) = (0.0, 0.0);
        for (d, w) in coords.iter().zip(t) {
            mean += w * d.mean();
            var += w * w * d.variance();
        }
        let law = if var > 0.0 {
            DistributionSpec::Gaussian {
                mean,
                sigma: var.sqrt(),
            }
        } else {
            DistributionSpec::PointMass { c: mean }
        };
        analytic_exp_moment(&law, k, p)
    }

    fn direction_norm(&self, t: &[f64], p: f64, tol: f64) -> NormResult {
        match self {
            Evaluator::Exact(c) => {
                if t.iter()
                    .zip(c.iter())
                    .all(|(w, d)| *w == 0.0 || matches!(d, DistributionSpec::PointMass { c } if *c == 0.0))
                {
                    return empirical_solve(&[0.0], p, tol);
                }
                solve_luxemburg(|k| Self::exact_moment(c, t, k, p), tol)
            }
            Evaluator::Batch(m) => {
                let pows: Vec<f64> = m.project(t).into_iter().map(|y| abs_pow(y, p)).collect();
                empirical_solve(&pows, p, tol)
            }
        }
    }

    /// Whether `‖⟨ξ, t⟩‖ψp > level`, using a single expectation.
    fn direction_exceeds(&self, t: &[f64], p: f64, level: f64) -> bool {
        if level <= 0.0 {
            return self.direction_norm(t, p, 1e-12).value > 0.0;
        }
        match self {
            Evaluator::Exact(c) => Self::exact_moment(c, t, level, p) > 2.0,
            Evaluator::Batch(m) => {
                let kp = level.powf(p);
                let cols = m.cols();
                let total: f64 = m
                    .data()
                    .par_chunks(cols << 12)
                    .map(|block| {
                        block
                            .chunks_exact(cols)
                            .map(|r| {
                                let y: f64 = r.iter().zip(t).map(|(x, w)| x * w).sum();
                                (abs_pow(y, p) / kp).exp()
                            })
                            .sum::<f64>()
                    })
                    .collect::<Vec<_>>()
                    .iter()
                    .sum();
                total / m.rows() as f64 > 2.0
            }
        }
    }

    fn coordinate_norms(&self, p: f64, tol: f64) -> Result<Vec<NormResult>> {
        match self {
            Evaluator::Exact(c) => c
                .iter()
                .map(|d| luxemburg_norm(&MomentSource::Analytic(*d), p, tol))
                .collect(),
            Evaluator::Batch(m) => Ok((0..m.cols())
                .map(|j| {
                    let pows: Vec<f64> = m.column(j).into_iter().map(|y| abs_pow(y, p)).collect();
                    empirical_solve(&pows, p, tol)
                })
                .collect()),
        }
    }

    fn e_p(&self, p: f64, tol: f64) -> NormResult {
        match self {
            Evaluator::Exact(c) => product_e_p(c, p, tol),
            Evaluator::Batch(m) => {
                let pows: Vec<f64> = m
                    .data()
                    .chunks_exact(m.cols())
                    .map(|r| r.iter().map(|&x| abs_pow(x, p)).sum())
                    .collect();
                empirical_solve(&pows, p, tol)
            }
        }
    }
}

/// `E_p` norm of independent coordinates: the expectation factorizes.
fn product_e_p(coords: &[DistributionSpec], p: f64, tol: f64) -> NormResult {
    if coords
        .iter()
        .all(|d| matches!(d, DistributionSpec::PointMass { c } if *c == 0.0))
    {
        return empirical_solve(&[0.0], p, tol);
    }
    solve_luxemburg(
        |k| {
            coords
                .iter()
                .map(|d| analytic_exp_moment(d, k, p).ln())
                .sum::<f64>()
                .exp()
        },
        tol,
    )
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("exponent p must be >= 1, got {p}")))
    }
}

/// `max_i ‖ξ_i‖ψp`. Independent products are handled analytically.
pub fn max_coordinate_norm(src: &RandomVectorSource, p: f64, opts: &VectorOptions) -> Result<f64> {
    check_p(p)?;
    src.validate()?;
    let norms = match src {
        RandomVectorSource::IndependentProduct(c) => Evaluator::Exact(c).coordinate_norms(p, opts.tol)?,
        _ => Evaluator::for_source(src, opts)?.coordinate_norms(p, opts.tol)?,
    };
    Ok(norms.iter().map(|r| r.value).fold(0.0, f64::max))
}

/// `‖ξ‖_{E_p} = inf{K : E exp(Σ_i |ξ_i/K|^p) ≤ 2}`.
pub fn e_p_norm(src: &RandomVectorSource, p: f64, opts: &VectorOptions) -> Result<NormResult> {
    check_p(p)?;
    src.validate()?;
    Ok(match src {
        RandomVectorSource::IndependentProduct(c) => product_e_p(c, p, opts.tol),
        _ => Evaluator::for_source(src, opts)?.e_p(p, opts.tol),
    })
}

/// Best value found on the sphere and where.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereSearch {
    pub value: f64,
    pub direction: Vec<f64>,
    pub evaluations: usize,
}

/// An objective on the `q`-sphere with a cheap comparison against a level.
pub trait SphereObjective: Sync {
    fn value(&self, t: &[f64]) -> f64;

    fn exceeds(&self, t: &[f64], level: f64) -> bool {
        self.value(t) > level
    }
}

pub fn q_norm(t: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        t.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else {
        t.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

fn normalize(t: &mut [f64], q: f64) -> bool {
    let s = q_norm(t, q);
    if !(s > 0.0) || !s.is_finite() {
        return false;
    }
    t.iter_mut().for_each(|x| *x /= s);
    true
}

fn random_sphere_point(n: usize, q: f64, seed: u64) -> Vec<f64> {
    let mut r = rng::block_rng(seed, 0);
    loop {
        let mut t: Vec<f64> = (0..n).map(|_| r.sample(StandardNormal)).collect();
        if normalize(&mut t, q) {
            return t;
        }
    }
}

/// Coordinate-perturbation ascent with a halving step, re-projected onto
/// the sphere after every move.
fn ascend<O: SphereObjective + ?Sized>(
    obj: &O,
    mut t: Vec<f64>,
    mut v: f64,
    q: f64,
    min_step: f64,
) -> (f64, Vec<f64>, usize) {
    const MAX_EVALS: usize = 20_000;
    let mut evals = 0;
    let mut step = 0.25;
    while step >= min_step && evals < MAX_EVALS {
        let mut improved = false;
        for i in 0..t.len() {
            for s in [1.0, -1.0] {
                let mut cand = t.clone();
                cand[i] += s * step;
                if !normalize(&mut cand, q) {
                    continue;
                }
                evals += 1;
                if obj.exceeds(&cand, v) {
                    evals += 1;
                    let w = obj.value(&cand);
                    if w > v {
                        v = w;
                        t = cand;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (v, t, evals)
}

fn sign_vector(n: usize, bits: u64) -> Vec<f64> {
    (0..n).map(|i| if bits >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()
}

/// Multi-start maximization of `obj` over `{t : |t|_q = 1}`.
///
/// Starts are the basis vectors, their negatives, the uniform direction and
/// seeded random points; the best `restarts` of them are refined by
/// [`ascend`]. On the `∞`-sphere the sign vectors are probed instead (all of
/// them up to `n = 12`), since a convex objective peaks at an extreme point.
pub fn maximize_on_sphere<O: SphereObjective>(
    obj: &O,
    n: usize,
    q: f64,
    restarts: usize,
    seed: u64,
    min_step: f64,
) -> SphereSearch {
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            starts.push(e);
        }
    }
    if q.is_infinite() {
        if n <= 12 {
            starts.extend((0..1u64 << (n - 1)).map(|b| sign_vector(n, b)));
        } else {
            starts.extend((0..4096u64).map(|i| {
                let mut r = rng::block_rng(seed, i);
                sign_vector(n, r.random())
            }));
        }
    } else {
        let mut u = vec![1.0; n];
        normalize(&mut u, q);
        starts.push(u);
        starts.extend((0..restarts as u64).map(|i| random_sphere_point(n, q, rng::derive_seed(seed, i))));
    }

    if q.is_infinite() {
        // Only record-setting points need a full evaluation.
        let mut evaluations = 0;
        let mut best = (f64::NEG_INFINITY, starts[0].clone());
        for t in starts {
            evaluations += 1;
            if best.0 == f64::NEG_INFINITY || obj.exceeds(&t, best.0) {
                evaluations += 1;
                let v = obj.value(&t);
                if v > best.0 {
                    best = (v, t);
                }
            }
        }
        return SphereSearch {
            value: best.0,
            direction: best.1,
            evaluations,
        };
    }
    let mut evaluations = starts.len();
    let mut scored: Vec<(f64, Vec<f64>)> = starts.into_iter().map(|t| (obj.value(&t), t)).collect();
    // Stable sort: ties keep the start order.
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].clone();
    scored.truncate(restarts.max(1));
    let results: Vec<(f64, Vec<f64>, usize)> = scored
        .into_par_iter()
        .map(|(v, t)| ascend(obj, t, v, q, min_step))
        .collect();
    for (v, t, e) in results {
        evaluations += e;
        if v > best.0 {
            best = (v, t);
        }
    }
    SphereSearch {
        value: best.0,
        direction: best.1,
        evaluations,
    }
}

struct DirectionalNorm<'e, 'a> {
    eval: &'e Evaluator<'a>,
    p: f64,
    tol: f64,
}

impl SphereObjective for DirectionalNorm<'_, '_> {
    fn value(&self, t: &[f64]) -> f64 {
        self.eval.direction_norm(t, self.p, self.tol).value
    }

    fn exceeds(&self, t: &[f64], level: f64) -> bool {
        self.eval.direction_exceeds(t, self.p, level)
    }
}

/// The conjugate exponent on the sphere side: `q = p/(p−1)`, `∞` at `p = 1`.
pub fn sphere_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

fn search_directions(eval: &Evaluator<'_>, n: usize, p: f64, opts: &VectorOptions) -> SphereSearch {
    let min_step = match eval {
        Evaluator::Exact(_) => 1e-7,
        Evaluator::Batch(_) => 1e-3,
    };
    let obj = DirectionalNorm { eval, p, tol: opts.tol };
    maximize_on_sphere(
        &obj,
        n,
        sphere_exponent(p),
        opts.restarts.unwrap_or(8 + n),
        opts.seed,
        min_step,
    )
}

/// `sup_{|t|_q = 1} ‖⟨ξ, t⟩‖ψp`, as the best value found by the sphere
/// search. The value is attained by the returned direction, so it is a
/// lower bound on the supremum.
pub fn psi_vector_norm(src: &RandomVectorSource, p: f64, opts: &VectorOptions) -> Result<SphereSearch> {
    check_p(p)?;
    let eval = Evaluator::for_source(src, opts)?;
    Ok(search_directions(&eval, src.dim(), p, opts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormChainReport {
    pub p: f64,
    pub n: usize,
    pub max_coord: f64,
    pub psi_vec: f64,
    pub e_p: f64,
    /// `n^{1/p} · max_coord`.
    pub upper: f64,
    pub chain_holds: bool,
    pub argmax_direction: Vec<f64>,
    pub evaluation: EvaluationMode,
    pub tol: f64,
}

/// Computes `max_i ‖ξ_i‖ ≤ ‖ξ‖ψp ≤ ‖ξ‖_{E_p} ≤ n^{1/p} max_i ‖ξ_i‖` on a
/// common footing and checks the ordering with slack `10·tol`.
pub fn chain_check(src: &RandomVectorSource, p: f64, opts: &VectorOptions) -> Result<NormChainReport> {
    check_p(p)?;
    let laws = match src {
        RandomVectorSource::IndependentProduct(c) => c.as_slice(),
        RandomVectorSource::LinearMix { base, .. } => base.as_slice(),
        RandomVectorSource::EmpiricalMatrix(_) => &[],
    };
    if let Some(d) = laws.iter().find(|d| !in_psi_space(d, p)) {
        return Err(Error::Precondition(format!("{d} has no finite psi_{p} norm")));
    }
    let eval = Evaluator::for_source(src, opts)?;
    let n = src.dim();
    let coords = eval.coordinate_norms(p, opts.tol)?;
    if let Some(i) = coords.iter().position(|r| !r.is_finite()) {
        return Err(Error::Precondition(format!(
            "coordinate {i} has no finite psi_{p} norm"
        )));
    }
    let max_coord = coords.iter().map(|r| r.value).fold(0.0, f64::max);
    let search = search_directions(&eval, n, p, opts);
    let e_p = eval.e_p(p, opts.tol).value;
    let upper = (n as f64).powf(1.0 / p) * max_coord;
    let eps = 10.0 * opts.tol;
    let chain_holds = max_coord <= search.value + eps && search.value <= e_p + eps && e_p <= upper + eps;
    Ok(NormChainReport {
        p,
        n,
        max_coord,
        psi_vec: search.value,
        e_p,
        upper,
        chain_holds,
        argmax_direction: search.direction,
        evaluation: eval.mode(),
        tol: opts.tol,
    })
}

/// `sup_{|t|_q = 1} |t|_r = n^{1/r − 1/q}` for `1 ≤ r ≤ q ≤ ∞`.
pub fn holder_sup_identity(n: usize, q: f64, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if !(r >= 1.0) || !(q >= r) {
        return Err(Error::Domain(format!("need 1 <= r <= q, got r={r}, q={q}")));
    }
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    Ok((n as f64).powf(1.0 / r - inv_q))
}

struct RNorm(f64);

impl SphereObjective for RNorm {
    fn value(&self, t: &[f64]) -> f64 {
        q_norm(t, self.0)
    }
}

/// Largest `|t|_r` over `samples` random points of the `q`-sphere, then
/// refined by local ascent from the best point.
pub fn sampled_sphere_sup(n: usize, q: f64, r: f64, samples: usize, seed: u64) -> Result<SphereSearch> {
    holder_sup_identity(n, q, r)?;
    let obj = RNorm(r);
    let (v, t) = (0..samples.max(1) as u64)
        .map(|i| {
            let t = random_sphere_point(n, q, rng::derive_seed(seed, i));
            (obj.value(&t), t)
        })
        .fold((f64::NEG_INFINITY, Vec::new()), |a, b| if b.0 > a.0 { b } else { a });
    if q.is_infinite() {
        return Ok(SphereSearch {
            value: v,
            direction: t,
            evaluations: samples,
        });
    }
    let (value, direction, e) = ascend(&obj, t, v, q, 1e-9);
    Ok(SphereSearch {
        value,
        direction,
        evaluations: samples + e,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependentBoundReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub n: usize,
    pub c_p: f64,
    /// `n^{1/r − 1/q}`.
    pub dimension_factor: f64,
    pub max_coord: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub evaluation: EvaluationMode,
}

/// Checks `‖ξ‖ψp ≤ n^{1/r − 1/q} c_p² max_i ‖ξ_i‖ψp`, `r = min(q, 2)`, for
/// independent centered coordinates. Without an explicit `c_p` the measured
/// equivalence constant of [`measure_cp`] is used.
pub fn independent_bound_check(
    src: &RandomVectorSource,
    p: f64,
    c_p: Option<f64>,
    opts: &VectorOptions,
) -> Result<IndependentBoundReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent p must be > 1, got {p}")));
    }
    let coords = match src {
        RandomVectorSource::IndependentProduct(c) => c,
        _ => {
            return Err(Error::Precondition(
                "the bound applies to independent coordinates only".into(),
            ))
        }
    };
    src.validate()?;
    if let Some(i) = coords.iter().position(|d| !d.is_centered()) {
        return Err(Error::Precondition(format!(
            "coordinate {i} ({}) is not centered",
            coords[i]
        )));
    }
    let c_p = match c_p {
        Some(c) if c > 0.0 => c,
        Some(c) => return Err(Error::Domain(format!("c_p must be > 0, got {c}"))),
        None => measure_cp(p)?,
    };
    let n = coords.len();
    let q = sphere_exponent(p);
    let r = q.min(2.0);
    let dimension_factor = holder_sup_identity(n, q, r)?;
    let max_coord = max_coordinate_norm(src, p, opts)?;
    let eval = Evaluator::for_source(src, opts)?;
    let lhs = search_directions(&eval, n, p, opts).value;
    let rhs = dimension_factor * c_p * c_p * max_coord;
    Ok(IndependentBoundReport {
        p,
        q,
        r,
        n,
        c_p,
        dimension_factor,
        max_coord,
        lhs,
        rhs,
        holds: lhs <= rhs + 10.0 * opts.tol,
        evaluation: eval.mode(),
    })
}
