//! Coded gradient descent for least-squares linear regression.
//!
//! The master splits `A` into `m + 1` row blocks, encodes them once, and in
//! every iteration asks each worker for `ÃᵢᵀÃᵢw`. From whichever workers
//! return it decodes approximations of `AᵢᵀAᵢw` at the source nodes, sums
//! them, and takes a gradient step on `½‖Aw − y‖²`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;

use crate::block::{combine, Block};
use crate::codec::{
    decode, encode, encoder, lcc_decode, lcc_encode, make_nodes, CodecConfig, NodeScheme, NodeSet, Share, WorkerResult,
};
use crate::error::{Error, Result};
use crate::interp::FhInterpolant;
use crate::rng::{normal, stream_rng};
use crate::sim::{sample_arrivals, Arrivals, DelayModel, KPolicy};
use crate::tasks::{apply_task, partition_rows, TaskSpec};

/// Power-iteration steps used to estimate `λ_max(AᵀA)`.
pub const POWER_ITERATIONS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LearningRate {
    Fixed(f64),
    /// `scale / λ̂_max(AᵀA)`.
    PowerIteration {
        scale: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrainScheme {
    Bri,
    Lcc,
    /// Exact gradients, waiting time of the modeled recovery threshold.
    Ep,
    /// Plain data partitioning; waits for all workers.
    Uncoded,
    /// Single-machine gradient descent on exact gradients.
    Centralized,
}

impl TrainScheme {
    pub const ALL: [TrainScheme; 5] = [
        TrainScheme::Bri,
        TrainScheme::Lcc,
        TrainScheme::Ep,
        TrainScheme::Uncoded,
        TrainScheme::Centralized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TrainScheme::Bri => "bri",
            TrainScheme::Lcc => "lcc",
            TrainScheme::Ep => "ep",
            TrainScheme::Uncoded => "uncoded",
            TrainScheme::Centralized => "centralized",
        }
    }
}

impl fmt::Display for TrainScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TrainScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TrainScheme::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("unknown training scheme '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LrConfig {
    /// Number of row blocks `m + 1`.
    pub parts: usize,
    pub workers: usize,
    pub stragglers: usize,
    /// Blending degree of the encoder.
    pub d: usize,
    /// Blending degree of the decoder; the encoder's when unset.
    pub d_decode: Option<usize>,
    pub learning_rate: LearningRate,
    pub iterations: usize,
    pub delay: DelayModel,
    pub seed: u64,
    /// Obtain `Aᵀy` from one coded round instead of computing it directly.
    pub coded_aty: bool,
    /// Recovery threshold used for the EP time model; `(m + 1)²` when unset.
    pub ep_threshold: Option<usize>,
    pub node_scheme: NodeScheme,
}

impl LrConfig {
    pub fn new(parts: usize, workers: usize, stragglers: usize, d: usize) -> Self {
        Self {
            parts,
            workers,
            stragglers,
            d,
            d_decode: None,
            learning_rate: LearningRate::PowerIteration { scale: 1.0 },
            iterations: 100,
            delay: DelayModel::zero(),
            seed: 0,
            coded_aty: false,
            ep_threshold: None,
            node_scheme: NodeScheme::Chebyshev2,
        }
    }

    pub fn m(&self) -> usize {
        self.parts - 1
    }

    pub fn decode_degree(&self) -> usize {
        self.d_decode.unwrap_or(self.d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parts == 0 {
            return Err(Error::InvalidParameter("parts must be at least 1".into()));
        }
        if self.d > self.m() {
            return Err(Error::DegreeOutOfRange {
                d: self.d,
                max: self.m(),
            });
        }
        if self.workers == 0 || self.stragglers > self.workers {
            return Err(Error::InvalidParameter(
                "need 0 ≤ stragglers ≤ workers and workers ≥ 1".into(),
            ));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be at least 1".into()));
        }
        let eta_ok = match self.learning_rate {
            LearningRate::Fixed(v) => v.is_finite() && v >= 0.0,
            LearningRate::PowerIteration { scale } => scale.is_finite() && scale > 0.0,
        };
        if !eta_ok {
            return Err(Error::InvalidParameter(
                "learning rate must be finite and non-negative".into(),
            ));
        }
        self.delay.validate()
    }
}

/// Everything the master prepares once: partitions, nodes and shares.
#[derive(Clone, Debug)]
pub struct LrProblem {
    pub a: Block,
    pub y: Vec<f64>,
    pub blocks: Vec<Block>,
    pub nodes: NodeSet,
    pub shares: Vec<Share>,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LrState {
    pub w: Vec<f64>,
    pub iteration: usize,
    pub loss_history: Vec<f64>,
    /// `Aᵀy`, obtained once at setup.
    pub aty: Vec<f64>,
    pub eta: f64,
}

/// `½‖Aw − y‖²`.
pub fn loss(a: &Block, y: &[f64], w: &[f64]) -> Result<f64> {
    let pred = a.mul_vec(w)?;
    Ok(0.5 * pred.iter().zip(y).map(|(p, v)| (p - v) * (p - v)).sum::<f64>())
}

/// `λ_max(AᵀA)` by power iteration from the all-ones vector.
pub fn estimate_lambda_max(a: &Block, steps: usize) -> Result<f64> {
    let t = a.cols();
    let mut v = vec![1.0 / libm::sqrt(t as f64); t];
    let mut lambda = 0.0;
    for _ in 0..steps {
        let av = a.tmul_vec(&a.mul_vec(&v)?)?;
        let norm = libm::sqrt(av.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            return Err(Error::Degenerate("AᵀA annihilates the power-iteration vector"));
        }
        lambda = v.iter().zip(&av).map(|(p, q)| p * q).sum();
        v = av.iter().map(|x| x / norm).collect();
    }
    Ok(lambda)
}

pub fn lr_setup(a: &Block, y: &[f64], config: &LrConfig) -> Result<(LrProblem, LrState)> {
    config.validate()?;
    if y.len() != a.rows() {
        return Err(Error::ShapeMismatch {
            expected: (a.rows(), 1),
            found: (y.len(), 1),
        });
    }
    if a.rows() < config.parts {
        return Err(Error::InvalidParameter("matrix has fewer rows than parts".into()));
    }
    let blocks = partition_rows(a, config.parts)?.blocks;
    let mut codec = CodecConfig::new(config.m(), config.workers, config.d);
    codec.node_scheme = config.node_scheme;
    let nodes = make_nodes(&codec)?;
    let shares = encode(&blocks, &nodes, config.d)?;

    let aty = if config.coded_aty {
        coded_aty(&blocks, y, &nodes, config)?
    } else {
        a.tmul_vec(y)?
    };
    let eta = match config.learning_rate {
        LearningRate::Fixed(v) => v,
        LearningRate::PowerIteration { scale } => scale / estimate_lambda_max(a, POWER_ITERATIONS)?,
    };
    let state = LrState {
        w: vec![0.0; a.cols()],
        iteration: 0,
        loss_history: Vec::new(),
        aty,
        eta,
    };
    let problem = LrProblem {
        a: a.clone(),
        y: y.to_vec(),
        blocks,
        nodes,
        shares,
        d: config.d,
    };
    Ok((problem, state))
}

/// `Aᵀy` from one coded round: `y` is split like `A`, encoded with the same
/// interpolant, and the non-straggling workers return `Ãᵢᵀỹᵢ`.
fn coded_aty(blocks: &[Block], y: &[f64], nodes: &NodeSet, config: &LrConfig) -> Result<Vec<f64>> {
    let y_blocks = partition_rows(&Block::column(y), config.parts)?.blocks;
    let ua = encoder(blocks, nodes, config.d)?;
    let uy = encoder(&y_blocks, nodes, config.d)?;
    let mut rng = stream_rng(config.seed, u64::MAX - 1);
    let arrivals = sample_arrivals(&config.delay, config.workers, config.stragglers, &mut rng);
    let results = returned_ids(&arrivals)
        .into_iter()
        .map(|i| {
            let z = nodes.zs()[i];
            let ai = ua.eval_weights_form(z)?;
            let yi = uy.eval_weights_form(z)?;
            Ok(WorkerResult {
                worker_id: i,
                z,
                block: Block::column(&ai.tmul_vec(yi.as_slice())?),
                arrival_time: arrivals.times[i],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sum_decoded(&results, nodes, config.decode_degree())
}

fn returned_ids(arrivals: &Arrivals) -> Vec<usize> {
    KPolicy::AllNonStragglers
        .collect(arrivals)
        .map(|(ids, _)| ids)
        .unwrap_or_default()
}

fn sum_decoded(results: &[WorkerResult], nodes: &NodeSet, d: usize) -> Result<Vec<f64>> {
    let decoded = decode(results, nodes, d, nodes.alphas())?;
    let shape = decoded[0].shape();
    Ok(combine(decoded.iter().map(|b| (1.0, b)), shape).into_vec())
}

/// Exact `Aᵀ(Aw) − Aᵀy`.
pub fn exact_gradient(a: &Block, aty: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let ata_w = a.tmul_vec(&a.mul_vec(w)?)?;
    Ok(ata_w.iter().zip(aty).map(|(g, b)| g - b).collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationStats {
    /// `‖g − ∇L‖ / ‖∇L‖` for the gradient actually applied.
    pub grad_error_rel: f64,
    pub k_used: usize,
}

fn relative_error(g: &[f64], truth: &[f64]) -> f64 {
    let num: f64 = g.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = truth.iter().map(|b| b * b).sum();
    if den > 0.0 {
        libm::sqrt(num / den)
    } else {
        libm::sqrt(num)
    }
}

fn step(problem: &LrProblem, state: &mut LrState, g: &[f64]) -> Result<()> {
    for (w, gi) in state.w.iter_mut().zip(g) {
        *w -= state.eta * gi;
    }
    state.iteration += 1;
    state.loss_history.push(loss(&problem.a, &problem.y, &state.w)?);
    Ok(())
}

/// One coded iteration using the results of the workers in `returned`.
pub fn lr_iteration(
    problem: &LrProblem,
    state: &mut LrState,
    d_decode: usize,
    returned: &[usize],
) -> Result<IterationStats> {
    if returned.is_empty() {
        return Err(Error::Empty("returned workers"));
    }
    let task = TaskSpec::matvec();
    let results = returned
        .iter()
        .map(|&i| {
            let share = problem.shares.get(i).ok_or(Error::UnknownNode(i as f64))?;
            Ok(WorkerResult {
                worker_id: i,
                z: share.z,
                block: apply_task(&task, &share.block, Some(&state.w))?,
                arrival_time: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    apply_results(problem, state, d_decode, &results)
}

/// One coded iteration from worker results computed elsewhere, each holding
/// `ÃᵢᵀÃᵢw` for the current weights.
pub fn apply_results(
    problem: &LrProblem,
    state: &mut LrState,
    d_decode: usize,
    results: &[WorkerResult],
) -> Result<IterationStats> {
    let sum = sum_decoded(results, &problem.nodes, d_decode)?;
    let g: Vec<f64> = sum.iter().zip(&state.aty).map(|(s, b)| s - b).collect();
    let truth = exact_gradient(&problem.a, &state.aty, &state.w)?;
    let stats = IterationStats {
        grad_error_rel: relative_error(&g, &truth),
        k_used: results.len(),
    };
    step(problem, state, &g)?;
    Ok(stats)
}

/// Exact-gradient step: `w ← w − η(Aᵀ(Aw) − Aᵀy)`.
pub fn centralized_iteration(problem: &LrProblem, state: &mut LrState) -> Result<()> {
    let g = exact_gradient(&problem.a, &state.aty, &state.w)?;
    step(problem, state, &g)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRow {
    pub iteration: usize,
    pub loss: f64,
    pub grad_error_rel: f64,
    pub k_used: usize,
    /// Cumulative virtual seconds at the end of this iteration.
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainLog {
    pub scheme: TrainScheme,
    pub rows: Vec<LogRow>,
    pub w: Vec<f64>,
}

impl TrainLog {
    pub fn final_loss(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.loss)
    }

    pub fn total_time(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.time)
    }
}

/// Runs `config.iterations` iterations of `scheme` from a fresh state. The
/// straggler draw of iteration `t` comes from stream `t` of `config.seed`, so
/// every scheme faces the same stragglers.
pub fn train(problem: &LrProblem, initial: &LrState, config: &LrConfig, scheme: TrainScheme) -> Result<TrainLog> {
    config.validate()?;
    let mut state = initial.clone();
    let n = config.workers;
    let m = config.m();
    let exact_threshold = match scheme {
        TrainScheme::Lcc => Some(2 * m + 1),
        TrainScheme::Ep => Some(config.ep_threshold.unwrap_or((m + 1) * (m + 1))),
        TrainScheme::Uncoded => Some(n),
        _ => None,
    };
    if let Some(k) = exact_threshold {
        if k > n {
            return Err(Error::InsufficientResults { needed: k, got: n });
        }
    }
    let lcc_shares = if scheme == TrainScheme::Lcc {
        lcc_encode(&problem.blocks, &problem.nodes)?
    } else {
        Vec::new()
    };
    let task = TaskSpec::matvec();
    let mut rows = Vec::with_capacity(config.iterations);
    let mut clock = 0.0;
    for it in 0..config.iterations {
        let mut rng = stream_rng(config.seed, it as u64);
        let arrivals = sample_arrivals(&config.delay, n, config.stragglers, &mut rng);
        let (stats, elapsed) = match scheme {
            TrainScheme::Bri => {
                let (ids, t) = KPolicy::AllNonStragglers
                    .collect(&arrivals)
                    .ok_or(Error::InsufficientResults { needed: 1, got: 0 })?;
                (lr_iteration(problem, &mut state, config.decode_degree(), &ids)?, t)
            }
            TrainScheme::Lcc => {
                let k = 2 * m + 1;
                let order = arrivals.order();
                let results = order[..k]
                    .iter()
                    .map(|&i| {
                        Ok(WorkerResult {
                            worker_id: i,
                            z: lcc_shares[i].z,
                            block: apply_task(&task, &lcc_shares[i].block, Some(&state.w))?,
                            arrival_time: arrivals.times[i],
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let decoded = lcc_decode(&results, &problem.nodes, problem.nodes.alphas(), task.degree)?;
                let sum = combine(decoded.iter().map(|b| (1.0, b)), decoded[0].shape()).into_vec();
                let g: Vec<f64> = sum.iter().zip(&state.aty).map(|(s, b)| s - b).collect();
                let truth = exact_gradient(&problem.a, &state.aty, &state.w)?;
                let stats = IterationStats {
                    grad_error_rel: relative_error(&g, &truth),
                    k_used: k,
                };
                step(problem, &mut state, &g)?;
                (stats, arrivals.kth_time(k))
            }
            TrainScheme::Ep | TrainScheme::Uncoded => {
                let k = exact_threshold.unwrap_or(n);
                centralized_iteration(problem, &mut state)?;
                (
                    IterationStats {
                        grad_error_rel: 0.0,
                        k_used: k,
                    },
                    arrivals.kth_time(k),
                )
            }
            TrainScheme::Centralized => {
                centralized_iteration(problem, &mut state)?;
                let single = config.delay.base_compute * config.parts as f64;
                (
                    IterationStats {
                        grad_error_rel: 0.0,
                        k_used: 1,
                    },
                    single,
                )
            }
        };
        clock += elapsed;
        rows.push(LogRow {
            iteration: state.iteration,
            loss: *state.loss_history.last().expect("step appends a loss"),
            grad_error_rel: stats.grad_error_rel,
            k_used: stats.k_used,
            time: clock,
        });
    }
    Ok(TrainLog {
        scheme,
        rows,
        w: state.w,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SyntheticDesign {
    /// I.i.d. standard normal entries.
    Iid,
    /// Every one of `parts` row blocks is a shared base block plus
    /// `perturbation` times independent noise. Smooth across blocks, so the
    /// rational code decodes it accurately with few results.
    Replicated { parts: usize, perturbation: f64 },
}

/// `A` (`rows × cols`) and `y = A w* + noise·ε` with `w*` standard normal.
pub fn synthetic_regression(
    rows: usize,
    cols: usize,
    noise: f64,
    design: SyntheticDesign,
    seed: u64,
) -> Result<(Block, Vec<f64>)> {
    if rows == 0 || cols == 0 {
        return Err(Error::Empty("synthetic shape"));
    }
    let mut rng = stream_rng(seed, 0);
    let a = match design {
        SyntheticDesign::Iid => Block::from_fn(rows, cols, |_, _| normal(&mut rng)),
        SyntheticDesign::Replicated { parts, perturbation } => {
            if parts == 0 {
                return Err(Error::InvalidParameter("parts must be at least 1".into()));
            }
            let per = rows.div_ceil(parts);
            let base = Block::from_fn(per, cols, |_, _| normal(&mut rng));
            Block::from_fn(rows, cols, |r, c| {
                base.get(r % per, c) + perturbation * normal(&mut rng)
            })
        }
    };
    let w_star: Vec<f64> = (0..cols).map(|_| normal(&mut rng)).collect();
    let y = a
        .mul_vec(&w_star)?
        .into_iter()
        .map(|v| v + noise * normal(&mut rng))
        .collect();
    Ok((a, y))
}

/// Upper bound on the decoding error of the coded gradient with `S`
/// stragglers among `N` workers on second-kind Chebyshev nodes:
/// `sin((S+1)π/2N)^{d+1} · ‖ϖ^{(d+2)}‖`, plus `‖ϖ^{(d+1)}‖/(d+1)` inside the
/// bracket when `N − S` is even.
pub fn theorem2_bound(n: usize, s: usize, d: usize, deriv_norm_d1: f64, deriv_norm_d2: f64) -> Result<f64> {
    if s + 2 >= n {
        return Err(Error::Hypothesis(alloc::format!(
            "bound requires S < N - 2, got S = {s}, N = {n}"
        )));
    }
    if d == 0 {
        return Err(Error::Hypothesis("bound requires d ≥ 1".into()));
    }
    if !(deriv_norm_d1 >= 0.0 && deriv_norm_d2 >= 0.0) {
        return Err(Error::InvalidParameter("derivative norms must be non-negative".into()));
    }
    let h = libm::sin((s + 1) as f64 * core::f64::consts::PI / (2 * n) as f64);
    let factor = libm::pow(h, (d + 1) as f64);
    let bracket = if (n - s) % 2 == 1 {
        deriv_norm_d2
    } else {
        deriv_norm_d2 + deriv_norm_d1 / (d + 1) as f64
    };
    Ok(factor * bracket)
}

/// Sup norm of the `order`-th derivative over `[a, b]`, by central binomial
/// differences with step `h` at `grid` points.
pub fn derivative_sup_norm(
    f: impl Fn(f64) -> Result<f64>,
    order: usize,
    a: f64,
    b: f64,
    grid: usize,
    h: f64,
) -> Result<f64> {
    let mut binom = vec![1.0f64; order + 1];
    for k in 1..=order {
        binom[k] = binom[k - 1] * (order - k + 1) as f64 / k as f64;
    }
    let scale = libm::pow(h, order as f64);
    let mut best: f64 = 0.0;
    for g in 0..grid {
        let x = a + (b - a) * g as f64 / (grid - 1) as f64;
        let mut acc = 0.0;
        for (k, c) in binom.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * c * f(x + (order as f64 / 2.0 - k as f64) * h)?;
        }
        best = best.max((acc / scale).abs());
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub draws: usize,
    pub violations: usize,
    /// Largest observed error divided by its bound.
    pub worst_ratio: f64,
}

/// Empirical check of [`theorem2_bound`] on scalar blocks: for each draw,
/// random scalars `a_0..a_m` and weight `w` define `ϖ(x) = u(x)² w` with `u`
/// the encoder; `N − S` random workers return `ϖ(z_i)`; the decoding error at
/// the source nodes is compared against the bound with derivative norms of
/// `ϖ` measured by finite differences on `[-1, 1]`.
pub fn theorem2_check(n: usize, s: usize, d: usize, m: usize, draws: usize, seed: u64) -> Result<BoundCheck> {
    let mut cfg = CodecConfig::new(m, n, d);
    cfg.node_scheme = NodeScheme::Chebyshev2;
    let nodes = make_nodes(&cfg)?;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for draw in 0..draws {
        let mut rng = stream_rng(seed, draw as u64);
        let a: Vec<f64> = (0..=m).map(|_| normal(&mut rng)).collect();
        let w = normal(&mut rng);
        let u = FhInterpolant::from_scalars(nodes.alphas(), &a, d)?;
        let varpi = |x: f64| -> Result<f64> {
            let v = u.eval_scalar(x)?;
            Ok(v * v * w)
        };
        let n1 = derivative_sup_norm(varpi, d + 1, -1.0, 1.0, 801, 1e-2)?;
        let n2 = derivative_sup_norm(varpi, d + 2, -1.0, 1.0, 801, 1e-2)?;
        let bound = theorem2_bound(n, s, d, n1, n2)?;

        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut rng);
        let results = ids[s..]
            .iter()
            .map(|&i| {
                let z = nodes.zs()[i];
                Ok(WorkerResult {
                    worker_id: i,
                    z,
                    block: Block::scalar(varpi(z)?),
                    arrival_time: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let decoded = decode(&results, &nodes, d, nodes.alphas())?;
        let err = decoded
            .iter()
            .zip(nodes.alphas())
            .map(|(b, &x)| Ok((b.as_slice()[0] - varpi(x)?).abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if err > bound {
            violations += 1;
        }
        let ratio = if bound > 0.0 {
            err / bound
        } else if err > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(ratio);
    }
    Ok(BoundCheck {
        draws,
        violations,
        worst_ratio: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_odd_branch_value() {
        let b = theorem2_bound(20, 3, 1, 1.0, 1.0).unwrap();
        let s = libm::sin(core::f64::consts::PI / 10.0);
        assert!((b - s * s).abs() < 1e-15);
        assert!((b - 0.09549).abs() < 1e-5);
    }

    #[test]
    fn bound_even_branch_and_errors() {
        let b = theorem2_bound(20, 4, 1, 1.0, 1.0).unwrap();
        let h = libm::sin(5.0 * core::f64::consts::PI / 40.0);
        assert!((b - h * h * 1.5).abs() < 1e-15);
        assert_eq!(theorem2_bound(20, 3, 2, 0.0, 0.0).unwrap(), 0.0);
        assert!(matches!(theorem2_bound(20, 18, 1, 1.0, 1.0), Err(Error::Hypothesis(_))));
        assert!(theorem2_bound(20, 17, 1, 1.0, 1.0).is_ok());
        assert!(matches!(theorem2_bound(20, 19, 1, 1.0, 1.0), Err(Error::Hypothesis(_))));
        assert!(matches!(theorem2_bound(20, 3, 0, 1.0, 1.0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn finite_difference_norms() {
        let f = |x: f64| Ok(x * x * x);
        let d1 = derivative_sup_norm(f, 1, -1.0, 1.0, 101, 1e-3).unwrap();
        let d3 = derivative_sup_norm(f, 3, -1.0, 1.0, 101, 1e-2).unwrap();
        assert!((d1 - 3.0).abs() < 1e-5);
        assert!((d3 - 6.0).abs() < 1e-6);
    }

    #[test]
    fn power_iteration_on_diagonal() {
        let a = Block::from_fn(3, 3, |r, c| if r == c { (r + 1) as f64 } else { 0.0 });
        let l = estimate_lambda_max(&a, 200).unwrap();
        assert!((l - 9.0).abs() < 1e-9);
    }

    #[test]
    fn single_part_share_is_a() {
        let (a, y) = synthetic_regression(6, 3, 0.1, SyntheticDesign::Iid, 4).unwrap();
        let cfg = LrConfig::new(1, 5, 0, 0);
        let (p, st) = lr_setup(&a, &y, &cfg).unwrap();
        assert_eq!(p.shares.len(), 5);
        assert!(p.shares.iter().all(|s| s.block == a));
        assert_eq!(st.w, vec![0.0; 3]);
        assert!(st.loss_history.is_empty());
    }

    #[test]
    fn zero_rate_keeps_weights() {
        let (a, y) = synthetic_regression(40, 4, 0.1, SyntheticDesign::Iid, 1).unwrap();
        let mut cfg = LrConfig::new(4, 10, 2, 1);
        cfg.learning_rate = LearningRate::Fixed(0.0);
        cfg.iterations = 5;
        let (p, st) = lr_setup(&a, &y, &cfg).unwrap();
        let log = train(&p, &st, &cfg, TrainScheme::Bri).unwrap();
        assert_eq!(log.w, vec![0.0; 4]);
        assert!(log.rows.iter().all(|r| r.loss == log.rows[0].loss));
    }

    #[test]
    fn setup_shape_errors() {
        let (a, y) = synthetic_regression(10, 2, 0.0, SyntheticDesign::Iid, 0).unwrap();
        let cfg = LrConfig::new(3, 5, 0, 0);
        assert!(matches!(lr_setup(&a, &y[..9], &cfg), Err(Error::ShapeMismatch { .. })));
        let cfg = LrConfig::new(11, 5, 0, 0);
        assert!(lr_setup(&a, &y, &cfg).is_err());
    }

    #[test]
    fn iteration_needs_results() {
        let (a, y) = synthetic_regression(10, 2, 0.0, SyntheticDesign::Iid, 0).unwrap();
        let cfg = LrConfig::new(2, 5, 0, 0);
        let (p, mut st) = lr_setup(&a, &y, &cfg).unwrap();
        assert_eq!(lr_iteration(&p, &mut st, 0, &[]), Err(Error::Empty("returned workers")));
    }
}
