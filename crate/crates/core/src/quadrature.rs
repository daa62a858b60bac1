//! Adaptive Gauss-Kronrod quadrature and log-space integration over
//! half-lines.
//!
//! The expectations needed by the norm solvers span hundreds of orders of
//! magnitude (high moments, moment generating functions at large arguments),
//! so integrals of `exp(L(u))` are computed as `L* + ln ∫ exp(L(u) - L*)`,
//! where `L*` is the maximum of the log-integrand.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = h * x;
        let pair = f(c - dx) + f(c + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive G7-K15 integration of `f` over `[a, b]`.
///
/// Subdivides the interval with the largest error estimate until the total
/// estimate drops below `max(abs_tol, rel_tol * |I|)` or 4000 intervals are
/// in use.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) && parts.len() < 4000 {
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, pv, pe) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine precision
            parts.push((lo, hi, pv, 0.0));
            err -= pe;
            continue;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        total += v1 + v2 - pv;
        err += e1 + e2 - pe;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
    // resum to shed accumulated update error
    parts.iter().map(|p| p.2).sum()
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
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
        if (b - a) <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn finite_or_neg_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Computes `ln ∫_0^length exp(L(u)) du` for a log-integrand `L` on a
/// half-line (`length = ∞`) or a finite segment.
///
/// `scale` is the characteristic length of the integrand (the distribution
/// scale). Returns `+∞` when the integral diverges and `-∞` when the
/// integrand vanishes identically.
pub fn ln_integral<L: Fn(f64) -> f64>(log_f: L, length: f64, scale: f64) -> f64 {
    let l = |u: f64| finite_or_neg_inf(log_f(u));

    // Coarse scan for the mode on a geometric grid.
    let mut grid: Vec<f64> = vec![0.0];
    for k in -120..=170 {
        let u = scale * 10f64.powf(k as f64 / 20.0);
        if u >= length {
            break;
        }
        grid.push(u);
    }
    if length.is_finite() {
        grid.push(length);
    }
    let vals: Vec<f64> = grid.iter().map(|&u| l(u)).collect();
    if vals.contains(&f64::INFINITY) {
        return f64::INFINITY;
    }
    let (imax, &vmax) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    if vmax == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if length.is_infinite() && imax + 1 == grid.len() {
        return f64::INFINITY;
    }

    let lo = grid[imax.saturating_sub(1)];
    let hi = grid[(imax + 1).min(grid.len() - 1)];
    let (mode, lmax) = if hi > lo {
        let (m, v) = golden_max(&l, lo, hi, 200);
        if v >= vmax {
            (m, v)
        } else {
            (grid[imax], vmax)
        }
    } else {
        (grid[imax], vmax)
    };

    // Past this size the rounding noise of L exceeds the width of the peak,
    // while ln ∫ differs from L* only by the log of that width, a relative
    // error below 1e-10.
    if lmax.abs() > 1e12 {
        return lmax;
    }

    // exp(L - L*) inherits the rounding noise of L, which scales with |L*|.
    let rel_tol = (1e-14f64).max(1e-15 * lmax.abs());
    let g = |u: f64| {
        let v = l(u) - lmax;
        if v < -745.0 {
            0.0
        } else {
            v.exp()
        }
    };

    // Local width: distance at which the log-integrand has dropped by one.
    let base = (hi - lo).max(scale * 1e-12) * 0.05;
    let width = |dir: f64, limit: f64| -> f64 {
        let mut d = base.min(limit);
        // A peak far narrower than the grid spacing (large |L*|) would be
        // stepped over entirely, so shrink first.
        let floor = (mode.abs() * 1e-15).max(f64::MIN_POSITIVE);
        while d > floor && l(mode + dir * d) < lmax - 1.0 {
            d *= 0.5;
        }
        while d < limit && l(mode + dir * d) > lmax - 1.0 && d < scale * 1e18 {
            d *= 2.0;
        }
        d.min(limit)
    };

    let mut total = 0.0;
    // rightwards
    let right_limit = length - mode;
    if right_limit > 0.0 {
        let mut step = width(1.0, right_limit);
        let mut start = mode;
        let mut pieces = 0;
        loop {
            let end = (start + step).min(length);
            if end.is_infinite() {
                return f64::INFINITY;
            }
            let piece = integrate(g, start, end, 1e-300, rel_tol);
            total += piece;
            pieces += 1;
            if end >= length {
                break;
            }
            if pieces >= 3 && piece <= 1e-17 * total {
                break;
            }
            if pieces > 400 || !total.is_finite() {
                return f64::INFINITY;
            }
            start = end;
            step *= 2.0;
        }
    }
    // leftwards, down to zero
    if mode > 0.0 {
        let mut step = width(-1.0, mode);
        let mut end = mode;
        let mut pieces = 0;
        let mut graded = false;
        loop {
            // Pieces shrink geometrically near the origin so that algebraic
            // endpoint singularities of the density cost O(log) work.
            if !graded && end - step <= 0.0 {
                graded = true;
            }
            let start = if graded { 0.5 * end } else { end - step };
            let piece = integrate(g, start, end, 1e-300, rel_tol);
            total += piece;
            pieces += 1;
            if pieces >= 3 && piece <= 1e-17 * total {
                break;
            }
            if start < 1e-300 {
                break;
            }
            end = start;
            step *= 2.0;
        }
    }
    if total <= 0.0 {
        return f64::NEG_INFINITY;
    }
    lmax + total.ln()
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}
