//! Error metrics, operation counts, and the interpolation experiments on
//! `sin`.

use alloc::vec::Vec;

use crate::block::Block;
use crate::codec::NodeScheme;
use crate::error::{Error, Result};
use crate::interp::{FhBasis, FhInterpolant};

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub n: usize,
    pub d: usize,
    pub mse: f64,
    pub max_abs: f64,
    pub node_scheme: NodeScheme,
    pub interval: (f64, f64),
    pub grid: usize,
}

/// `n` nodes on `[a, b]`: equispaced, or Chebyshev points of the second kind
/// mapped affinely.
pub fn interval_nodes(n: usize, a: f64, b: f64, scheme: NodeScheme) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Empty("nodes"));
    }
    if n == 1 {
        return Ok(alloc::vec![0.5 * (a + b)]);
    }
    let last = (n - 1) as f64;
    match scheme {
        NodeScheme::Equispaced => Ok((0..n).map(|i| a + (b - a) * i as f64 / last).collect()),
        NodeScheme::Chebyshev2 => Ok((0..n)
            .map(|i| 0.5 * (a + b) - 0.5 * (b - a) * libm::cos(i as f64 * core::f64::consts::PI / last))
            .collect()),
        NodeScheme::Custom => Err(Error::InvalidParameter("custom nodes have no default placement".into())),
    }
}

/// `grid` uniform points on `[a, b]`, endpoints included.
pub fn uniform_grid(a: f64, b: f64, grid: usize) -> Vec<f64> {
    if grid == 1 {
        return alloc::vec![a];
    }
    (0..grid).map(|i| a + (b - a) * i as f64 / (grid - 1) as f64).collect()
}

/// Interpolates `sin` at `n` nodes on `[a, b]` with blending degree `d` and
/// measures the error on a uniform grid.
pub fn sin_experiment(
    n: usize,
    d: usize,
    interval: (f64, f64),
    grid: usize,
    scheme: NodeScheme,
) -> Result<ErrorReport> {
    let (a, b) = interval;
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two nodes".into()));
    }
    if d >= n {
        return Err(Error::DegreeOutOfRange { d, max: n - 1 });
    }
    if grid < 100 {
        return Err(Error::InvalidParameter("grid must have at least 100 points".into()));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter("interval must satisfy a < b".into()));
    }
    let nodes = interval_nodes(n, a, b, scheme)?;
    let values: Vec<f64> = nodes.iter().map(|&x| libm::sin(x)).collect();
    let h = FhInterpolant::from_scalars(&nodes, &values, d)?;
    let mut sq = 0.0;
    let mut max_abs: f64 = 0.0;
    for x in uniform_grid(a, b, grid) {
        let e = h.eval_scalar(x)? - libm::sin(x);
        sq += e * e;
        max_abs = max_abs.max(e.abs());
    }
    Ok(ErrorReport {
        n,
        d,
        mse: sq / grid as f64,
        max_abs,
        node_scheme: scheme,
        interval,
        grid,
    })
}

/// One report per `(n, d)` pair, `n` outer. Every `d` must be below every `n`.
pub fn mse_table(
    ns: &[usize],
    ds: &[usize],
    interval: (f64, f64),
    grid: usize,
    scheme: NodeScheme,
) -> Result<Vec<ErrorReport>> {
    let mut out = Vec::with_capacity(ns.len() * ds.len());
    for &n in ns {
        for &d in ds {
            out.push(sin_experiment(n, d, interval, grid, scheme)?);
        }
    }
    Ok(out)
}

/// Errors for eight nodes at every admissible degree `d = 0..=7`.
pub fn n8_series(interval: (f64, f64), grid: usize, scheme: NodeScheme) -> Result<Vec<ErrorReport>> {
    (0..8).map(|d| sin_experiment(8, d, interval, grid, scheme)).collect()
}

/// Operation counts with unit constants: a `(d+1)`-point local Lagrange
/// combination of `s × t` blocks costs `(d+1)st` multiplications and there
/// are `m − d + 1` of them per evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexityCounts {
    pub encode_per_worker: u64,
    pub encode_total: u64,
    pub decode: u64,
    /// Symbols of one encoded block.
    pub master_to_worker: u64,
    pub master_to_worker_total: u64,
    /// Symbols of `k` returned `t × t` results.
    pub worker_to_master: u64,
}

pub fn complexity_counts(m: usize, d: usize, s: usize, t: usize, workers: usize, k: usize) -> Result<ComplexityCounts> {
    if s == 0 || t == 0 || workers == 0 || k == 0 {
        return Err(Error::InvalidParameter("counts need positive s, t, N and k".into()));
    }
    if d > m {
        return Err(Error::DegreeOutOfRange { d, max: m });
    }
    if d > k {
        return Err(Error::DegreeOutOfRange { d, max: k });
    }
    let (m, d, s, t, n, k) = (m as u64, d as u64, s as u64, t as u64, workers as u64, k as u64);
    let encode_per_worker = (m - d + 1) * (d + 1) * s * t;
    Ok(ComplexityCounts {
        encode_per_worker,
        encode_total: encode_per_worker * n,
        decode: (k - d + 1) * (d + 1) * s * t,
        master_to_worker: s * t,
        master_to_worker_total: s * t * n,
        worker_to_master: k * t * t,
    })
}

/// Mean of squared entrywise differences over a sequence of blocks.
pub fn mse(estimate: &[Block], truth: &[Block]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::ShapeMismatch {
            expected: (truth.len(), 1),
            found: (estimate.len(), 1),
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (e, t) in estimate.iter().zip(truth) {
        e.check_same_shape(t)?;
        for (a, b) in e.as_slice().iter().zip(t.as_slice()) {
            sum += (a - b) * (a - b);
        }
        count += e.len();
    }
    if count == 0 {
        return Err(Error::Empty("mse input"));
    }
    Ok(sum / count as f64)
}

/// Least-squares slope of `log(error)` against `log(n)`.
pub fn convergence_slope(ns: &[usize], errors: &[f64]) -> Result<f64> {
    if ns.len() != errors.len() || ns.len() < 2 {
        return Err(Error::InvalidParameter("need at least two (n, error) pairs".into()));
    }
    if errors.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Degenerate("errors must be positive and finite for a log fit"));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| libm::log(n as f64)).collect();
    let ys: Vec<f64> = errors.iter().map(|&e| libm::log(e)).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all n are equal"));
    }
    Ok(sxy / sxx)
}

/// Smallest `|Σ λ_i(x)|` over `grid` uniform points spanning the nodes,
/// skipping points that coincide with a node.
pub fn min_abs_denominator(basis: &FhBasis, grid: usize) -> Result<f64> {
    let nodes = basis.nodes();
    let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
    let mut best = f64::INFINITY;
    for x in uniform_grid(a, b, grid) {
        match basis.denominator(x) {
            Ok(v) => best = best.min(v.abs()),
            Err(Error::AtNode(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}
