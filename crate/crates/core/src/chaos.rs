//! Polynomial chaoses `S_d(x) = Σ a_{i1…id} x_{i1}⋯x_{id}` with dense
//! coefficient arrays, and the ψ₁ bounds built from the `E_d` norm.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{DistributionSpec, SampleBatch};
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::{luxemburg_norm, point_mass_norm, MomentSource, NormStatus};
use crate::vector::{e_p_norm, RandomVectorSource, SampleMatrix, VectorOptions};

/// Largest number of coefficients a dense array may hold.
pub const MAX_COEFFICIENTS: usize = 10_000_000;

/// Dense order-`d` array over `{0..n}^d`, stored in lexicographic order
/// (the last index varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosArray {
    order: usize,
    dim: usize,
    coefficients: Vec<f64>,
}

fn entry_count(order: usize, dim: usize) -> Option<usize> {
    let mut c: usize = 1;
    for _ in 0..order {
        c = c.checked_mul(dim)?;
        if c > MAX_COEFFICIENTS {
            return None;
        }
    }
    Some(c)
}

impl ChaosArray {
    pub fn new(order: usize, dim: usize, coefficients: Vec<f64>) -> Result<Self> {
        if order < 2 {
            return Err(Error::Invalid(format!("chaos order must be >= 2, got {order}")));
        }
        if dim == 0 {
            return Err(Error::Invalid("chaos dimension must be >= 1".into()));
        }
        let count = entry_count(order, dim).ok_or_else(|| {
            Error::Invalid(format!(
                "{dim}^{order} coefficients exceed the dense limit of {MAX_COEFFICIENTS}"
            ))
        })?;
        if coefficients.len() != count {
            return Err(Error::DimensionMismatch {
                expected: count,
                got: coefficients.len(),
            });
        }
        if let Some(i) = coefficients.iter().position(|a| !a.is_finite()) {
            return Err(Error::Invalid(format!("coefficient {i} is not finite")));
        }
        Ok(Self {
            order,
            dim,
            coefficients,
        })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let count = entry_count(order, dim).unwrap_or(0);
        Self::new(order, dim, vec![0.0; count])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut a = vec![0.0; n * n];
        (0..n).for_each(|i| a[i * n + i] = 1.0);
        Self::new(2, n, a)
    }

    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: r.len(),
            });
        }
        Self::new(2, n, rows.concat())
    }

    /// `a_{i1…id} = u_{i1}⋯u_{id}`.
    pub fn rank_one(u: &[f64], order: usize) -> Result<Self> {
        let mut coefficients = vec![1.0];
        for _ in 0..order {
            coefficients = coefficients.iter().flat_map(|c| u.iter().map(move |x| c * x)).collect();
        }
        Self::new(order, u.len(), coefficients)
    }

    /// Independent standard normal coefficients.
    pub fn random(order: usize, dim: usize, seed: u64) -> Result<Self> {
        let count = entry_count(order, dim).unwrap_or(0);
        let mut r = rng::block_rng(seed, 0);
        Self::new(order, dim, (0..count).map(|_| r.sample(StandardNormal)).collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        let flat = index.iter().fold(0, |acc, &i| acc * self.dim + i);
        self.coefficients[flat]
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            order: self.order,
            dim: self.dim,
            coefficients: self.coefficients.iter().map(|a| a * lambda).collect(),
        }
    }

    /// Text form: a header `order,dim`, a line with the two values, then one
    /// coefficient per line in lexicographic order.
    pub fn to_csv(&self) -> String {
        let mut s = format!("order,dim\n{},{}\n", self.order, self.dim);
        for a in &self.coefficients {
            s.push_str(&format!("{a:.16e}\n"));
        }
        s
    }

    /// Parses [`to_csv`](Self::to_csv) output. The `order,dim` label line is
    /// optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let mut head = lines
            .next()
            .ok_or_else(|| Error::Invalid("empty chaos array file".into()))?;
        if head.replace(' ', "").eq_ignore_ascii_case("order,dim") {
            head = lines
                .next()
                .ok_or_else(|| Error::Invalid("missing order,dim values".into()))?;
        }
        let fields: Vec<&str> = head.split(',').map(str::trim).collect();
        let parse_count = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad order/dim field {s:?}")))
        };
        let [order, dim] = fields[..] else {
            return Err(Error::Invalid(format!("expected `order,dim`, got {head:?}")));
        };
        let (order, dim) = (parse_count(order)?, parse_count(dim)?);
        let coefficients = lines
            .enumerate()
            .map(|(i, l)| {
                l.parse::<f64>()
                    .map_err(|_| Error::Invalid(format!("coefficient {i}: cannot parse {l:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Self::new(order, dim, coefficients)
    }
}

/// `S_d(x)`, contracting the last index first.
pub fn evaluate(a: &ChaosArray, x: &[f64]) -> Result<f64> {
    if x.len() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: x.len(),
        });
    }
    Ok(contract(&a.coefficients, a.order, x))
}

fn contract(coefficients: &[f64], order: usize, x: &[f64]) -> f64 {
    let n = x.len();
    let mut v: Vec<f64> = coefficients
        .chunks_exact(n)
        .map(|c| c.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect();
    for _ in 1..order {
        v = v
            .chunks_exact(n)
            .map(|c| c.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
    }
    v[0]
}

/// `S_d` at every row of a sample matrix, in row order.
pub fn evaluate_batch(a: &ChaosArray, x: &SampleMatrix) -> Result<Vec<f64>> {
    if x.cols() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: x.cols(),
        });
    }
    Ok(x.data()
        .par_chunks_exact(a.dim)
        .map(|row| contract(&a.coefficients, a.order, row))
        .collect())
}

/// Entrywise `p`-norm of the coefficients, `p = ∞` giving the largest entry.
pub fn array_norm(a: &ChaosArray, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("array norm needs p >= 1, got {p}")));
    }
    let c = &a.coefficients;
    Ok(if p.is_infinite() {
        c.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else if p == 1.0 {
        c.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        // Scaled to avoid overflow of the squares.
        let m = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if m == 0.0 {
            0.0
        } else {
            m * c.iter().map(|x| (x / m).powi(2)).sum::<f64>().sqrt()
        }
    } else {
        let m = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if m == 0.0 {
            0.0
        } else {
            m * c.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    })
}

/// Largest singular value of a matrix, by power iteration on `AᵀA`.
pub fn operator_norm(a: &ChaosArray) -> Result<f64> {
    if a.order != 2 {
        return Err(Error::Invalid(format!(
            "operator norm needs a matrix, got order {}",
            a.order
        )));
    }
    let n = a.dim;
    let m = &a.coefficients;
    if m.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / n as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..100_000 {
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= s);
        let av: Vec<f64> = m
            .chunks_exact(n)
            .map(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        let mut w = vec![0.0; n];
        for (row, y) in m.chunks_exact(n).zip(&av) {
            w.iter_mut().zip(row).for_each(|(wi, a)| *wi += a * y);
        }
        let next = av.iter().map(|y| y * y).sum::<f64>();
        if (next - lambda).abs() <= 1e-10 * next {
            return Ok(next.sqrt());
        }
        lambda = next;
        v = w;
    }
    Ok(lambda.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderBound {
    pub bound: f64,
    pub value: f64,
    pub holds: bool,
}

/// `|S_d(x)| ≤ ‖A‖_{p/(p−1)} |x|_p^d`.
pub fn holder_bound(a: &ChaosArray, x: &[f64], p: f64) -> Result<HolderBound> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("need p > 1, got {p}")));
    }
    let value = evaluate(a, x)?.abs();
    let xp = x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
    let bound = array_norm(a, p / (p - 1.0))? * xp.powi(a.order as i32);
    Ok(HolderBound {
        bound,
        value,
        holds: value <= bound * (1.0 + 1e-12) + f64::MIN_POSITIVE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChaosBound {
    pub value: f64,
    /// `‖A‖_{d/(d−1)}`.
    pub array_norm: f64,
    /// `‖ξ‖_{E_d}`.
    pub e_d: f64,
    pub finite: bool,
}

/// `‖S_d(ξ)‖ψ₁ ≤ ‖A‖_{d/(d−1)} ‖ξ‖_{E_d}^d`.
pub fn chaos_psi1_bound(a: &ChaosArray, xi: &RandomVectorSource, opts: &VectorOptions) -> Result<ChaosBound> {
    if xi.dim() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: xi.dim(),
        });
    }
    let d = a.order as f64;
    let norm_a = array_norm(a, d / (d - 1.0))?;
    let e = e_p_norm(xi, d, opts)?;
    let finite = e.status == NormStatus::Finite;
    let value = if norm_a == 0.0 {
        0.0
    } else if finite {
        norm_a * e.value.powi(a.order as i32)
    } else {
        f64::INFINITY
    };
    Ok(ChaosBound {
        value,
        array_norm: norm_a,
        e_d: e.value,
        finite,
    })
}

/// Twice [`chaos_psi1_bound`], which bounds `‖S_d(ξ) − E S_d(ξ)‖ψ₁`.
pub fn centered_chaos_psi1_bound(a: &ChaosArray, xi: &RandomVectorSource, opts: &VectorOptions) -> Result<ChaosBound> {
    let b = chaos_psi1_bound(a, xi, opts)?;
    Ok(ChaosBound {
        value: 2.0 * b.value,
        ..b
    })
}

/// `E S_d(ξ)` for independent coordinates, from raw moments of each
/// coordinate according to how often its index repeats.
pub fn exact_mean(a: &ChaosArray, coords: &[DistributionSpec]) -> Result<f64> {
    if coords.len() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: coords.len(),
        });
    }
    let d = a.order;
    let moments: Vec<Vec<f64>> = coords
        .iter()
        .map(|c| (0..=d as u32).map(|k| c.raw_moment(k)).collect())
        .collect();
    let mut index = vec![0usize; d];
    let mut counts = vec![0u32; a.dim];
    let mut total = 0.0;
    for &coef in &a.coefficients {
        if coef != 0.0 {
            index.iter().for_each(|&i| counts[i] += 1);
            let m: f64 = index
                .iter()
                .filter_map(|&i| {
                    let k = std::mem::take(&mut counts[i]);
                    (k > 0).then(|| moments[i][k as usize])
                })
                .product();
            total += coef * m;
        }
        for slot in index.iter_mut().rev() {
            *slot += 1;
            if *slot < a.dim {
                break;
            }
            *slot = 0;
        }
    }
    Ok(total)
}

/// `N` seeded draws of `S_d(ξ)`.
pub fn chaos_samples(a: &ChaosArray, xi: &RandomVectorSource, n: usize, seed: u64) -> Result<SampleBatch> {
    if xi.dim() != a.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: xi.dim(),
        });
    }
    let x = xi.sample_matrix(n, seed)?;
    SampleBatch::new(evaluate_batch(a, &x)?, seed, format!("order-{} chaos", a.order))
}

/// The step `‖E S_d(ξ)‖ψ₁ ≤ ‖S_d(ξ)‖ψ₁` checked on a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenCheck {
    pub mean_estimate: f64,
    pub mean_standard_error: f64,
    pub exact_mean: Option<f64>,
    /// ψ₁ norm of the constant `E S_d(ξ)` (exact mean when known).
    pub mean_norm: f64,
    pub empirical_psi1: f64,
    pub holds: bool,
}

pub fn jensen_check(a: &ChaosArray, xi: &RandomVectorSource, samples: usize, seed: u64) -> Result<JensenCheck> {
    let batch = chaos_samples(a, xi, samples, seed)?;
    let exact = match xi {
        RandomVectorSource::IndependentProduct(c) => Some(exact_mean(a, c)?),
        _ => None,
    };
    let mean = exact.unwrap_or_else(|| batch.mean());
    let mean_norm = point_mass_norm(mean, 1.0);
    let empirical_psi1 = luxemburg_norm(&MomentSource::Empirical(&batch), 1.0, 1e-9)?.value;
    Ok(JensenCheck {
        mean_estimate: batch.mean(),
        mean_standard_error: batch.standard_error(),
        exact_mean: exact,
        mean_norm,
        empirical_psi1,
        holds: mean_norm <= empirical_psi1,
    })
}
