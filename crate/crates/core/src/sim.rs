//! Virtual-time master/worker simulation of coded computing under stragglers.
//!
//! Each trial draws a straggler set and a completion time per worker from a
//! dedicated random stream. Fixed-threshold schemes wait for their threshold
//! order statistic; the flexible schemes wait according to a [`KPolicy`] and
//! actually decode the collected results so their approximation error is
//! measured against the directly computed task outputs.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::block::{relative_frobenius_error, Block};
use crate::codec::{
    bacc_decode, decode, encode, make_nodes, scheme_threshold, CodecConfig, NodeScheme, NodeSet, Scheme, Threshold,
    WorkerResult,
};
use crate::error::{Error, Result};
use crate::rng::{normal, stream_rng, uniform, StreamRng};
use crate::tasks::{apply_task, TaskSpec};

/// Distribution of the delay added to a straggler's completion time, in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtraDelay {
    Fixed(f64),
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    /// The straggler never returns.
    Never,
}

impl ExtraDelay {
    /// Maps a uniform draw `u ∈ [0, 1)` to a delay by inversion, so the same
    /// draw gives ordered delays under ordered parameters.
    pub fn from_uniform(&self, u: f64) -> f64 {
        match *self {
            ExtraDelay::Fixed(v) => v,
            ExtraDelay::Uniform { lo, hi } => lo + (hi - lo) * u,
            ExtraDelay::Exponential { rate } => -libm::log1p(-u) / rate,
            ExtraDelay::Never => f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ExtraDelay::Fixed(v) => v.is_finite() && v >= 0.0,
            ExtraDelay::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi,
            ExtraDelay::Exponential { rate } => rate.is_finite() && rate > 0.0,
            ExtraDelay::Never => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!(
                "invalid straggler delay {self:?}"
            )))
        }
    }
}

/// Worker completion time: `latency + base·(1 + jitter·u) + extra` where
/// `extra` is drawn only for stragglers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayModel {
    /// Seconds of compute per task on a healthy worker.
    pub base_compute: f64,
    /// Relative spread of healthy compute times.
    pub jitter: f64,
    /// Fixed dispatch and return latency paid by every worker.
    pub latency: f64,
    pub straggler_extra: ExtraDelay,
}

impl DelayModel {
    /// Compute proportional to `s·t²` at one nanosecond per multiply-add,
    /// stragglers slowed by 5 to 15 times that, and a round-trip latency of
    /// 20 compute units.
    pub fn flop_proportional(s: usize, t: usize) -> Self {
        let base = 1e-9 * (s * t * t) as f64;
        Self {
            base_compute: base,
            jitter: 0.1,
            latency: 20.0 * base,
            straggler_extra: ExtraDelay::Uniform {
                lo: 5.0 * base,
                hi: 15.0 * base,
            },
        }
    }

    pub fn zero() -> Self {
        Self {
            base_compute: 0.0,
            jitter: 0.0,
            latency: 0.0,
            straggler_extra: ExtraDelay::Fixed(0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("base_compute", self.base_compute),
            ("jitter", self.jitter),
            ("latency", self.latency),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "{name} must be finite and non-negative"
                )));
            }
        }
        self.straggler_extra.validate()
    }
}

/// Completion times for one round.
#[derive(Clone, Debug, PartialEq)]
pub struct Arrivals {
    pub times: Vec<f64>,
    pub is_straggler: Vec<bool>,
}

impl Arrivals {
    /// Worker ids by completion time, ties broken by id.
    pub fn order(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.times.len()).collect();
        ids.sort_by(|&a, &b| self.times[a].total_cmp(&self.times[b]).then(a.cmp(&b)));
        ids
    }

    /// Arrival time of the `k`-th fastest worker; infinite when `k` exceeds
    /// the worker count.
    pub fn kth_time(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let order = self.order();
        order.get(k - 1).map_or(f64::INFINITY, |&i| self.times[i])
    }

    pub fn non_stragglers(&self) -> Vec<usize> {
        (0..self.times.len()).filter(|&i| !self.is_straggler[i]).collect()
    }
}

/// Draws `stragglers` distinct straggler ids uniformly and a completion time
/// for every worker. The number of draws does not depend on `stragglers`, so
/// on a fixed stream a larger straggler count only adds delays.
pub fn sample_arrivals(model: &DelayModel, workers: usize, stragglers: usize, rng: &mut StreamRng) -> Arrivals {
    let mut perm: Vec<usize> = (0..workers).collect();
    perm.shuffle(rng);
    let mut is_straggler = alloc::vec![false; workers];
    for &w in perm.iter().take(stragglers) {
        is_straggler[w] = true;
    }
    let times = (0..workers)
        .map(|w| {
            let healthy = model.base_compute * (1.0 + model.jitter * uniform(rng));
            let u = uniform(rng);
            let extra = if is_straggler[w] {
                model.straggler_extra.from_uniform(u)
            } else {
                0.0
            };
            model.latency + healthy + extra
        })
        .collect();
    Arrivals { times, is_straggler }
}

/// When a flexible-threshold master stops waiting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KPolicy {
    FirstK(usize),
    /// Take whatever arrived by the deadline (at least the first result).
    Deadline(f64),
    AllNonStragglers,
}

impl KPolicy {
    /// Collected worker ids and the time the master starts decoding.
    /// `None` when the policy can never be met.
    pub fn collect(&self, arrivals: &Arrivals) -> Option<(Vec<usize>, f64)> {
        let order = arrivals.order();
        let n = order.len();
        let upto = |k: usize| -> Option<(Vec<usize>, f64)> {
            if k == 0 || k > n {
                return None;
            }
            let t = arrivals.times[order[k - 1]];
            t.is_finite().then(|| (order[..k].to_vec(), t))
        };
        match *self {
            KPolicy::FirstK(k) => upto(k),
            KPolicy::Deadline(deadline) => {
                let k = order.iter().filter(|&&i| arrivals.times[i] <= deadline).count();
                if k == 0 {
                    return upto(1);
                }
                let (ids, last) = upto(k)?;
                Some((ids, if k == n { last } else { deadline }))
            }
            KPolicy::AllNonStragglers => {
                let healthy = arrivals.non_stragglers();
                if healthy.is_empty() {
                    return upto(1);
                }
                let t = healthy.iter().map(|&i| arrivals.times[i]).fold(0.0, f64::max);
                let k = order.iter().filter(|&&i| arrivals.times[i] <= t).count();
                upto(k)
            }
        }
    }
}

/// A scheme taking part in a scenario, with an optional threshold override.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeModel {
    pub scheme: Scheme,
    pub threshold: Option<usize>,
}

impl SchemeModel {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            threshold: None,
        }
    }

    pub fn with_threshold(scheme: Scheme, threshold: usize) -> Self {
        Self {
            scheme,
            threshold: Some(threshold),
        }
    }

    pub fn threshold(&self, m: usize, f_degree: usize) -> Threshold {
        match self.threshold {
            Some(k) => Threshold::Fixed(k),
            None => scheme_threshold(self.scheme, m, f_degree),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimScenario {
    pub workers: usize,
    pub m: usize,
    pub stragglers: usize,
    pub schemes: Vec<SchemeModel>,
    pub trials: usize,
    pub seed: u64,
    pub k_policy: KPolicy,
    pub delay: DelayModel,
    /// Blending degree of the rational code.
    pub d: usize,
    pub node_scheme: NodeScheme,
    pub task: TaskSpec,
    /// Shape of each source block.
    pub block_rows: usize,
    pub block_cols: usize,
}

impl SimScenario {
    /// `N` workers, `m + 1` source blocks of 100×100, Gram task, `d = 2`,
    /// every scheme at its default threshold, 50 trials, first `N − S` policy.
    pub fn new(workers: usize, m: usize, stragglers: usize) -> Self {
        Self {
            workers,
            m,
            stragglers,
            schemes: Scheme::ALL.iter().map(|&s| SchemeModel::new(s)).collect(),
            trials: 50,
            seed: 0,
            k_policy: KPolicy::FirstK(workers.saturating_sub(stragglers).max(1)),
            delay: DelayModel::flop_proportional(100, 100),
            d: 2,
            node_scheme: NodeScheme::Chebyshev2,
            task: TaskSpec::gram(),
            block_rows: 100,
            block_cols: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidParameter("at least one worker is required".into()));
        }
        if self.stragglers > self.workers {
            return Err(Error::InvalidParameter("stragglers exceed workers".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Empty("schemes"));
        }
        if self.block_rows == 0 || self.block_cols == 0 {
            return Err(Error::Empty("block shape"));
        }
        if self.d > self.m {
            return Err(Error::DegreeOutOfRange { d: self.d, max: self.m });
        }
        if let KPolicy::FirstK(0) = self.k_policy {
            return Err(Error::InvalidParameter("first_k needs k ≥ 1".into()));
        }
        self.task.validate()?;
        self.delay.validate()
    }

    /// Whether the straggler count satisfies `S < N − 2`, the regime covered
    /// by the linear-regression error bound.
    pub fn in_bound_regime(&self) -> bool {
        self.stragglers + 2 < self.workers
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub scheme: Scheme,
    pub trial: usize,
    /// Seconds until the master can decode; infinite for a failed trial.
    pub waiting_time: f64,
    /// Relative Frobenius error of the decoded outputs (flexible schemes).
    pub decode_error: Option<f64>,
    pub k_used: usize,
    pub failed: bool,
}

/// Encoded data and ground truth for a scenario, built once and reused by
/// every trial.
pub struct Simulator {
    scenario: SimScenario,
    nodes: NodeSet,
    bri_results: Vec<Block>,
    bacc_results: Vec<Block>,
    truth: Vec<Block>,
}

impl Simulator {
    pub fn new(scenario: SimScenario) -> Result<Self> {
        scenario.validate()?;
        let mut cfg = CodecConfig::new(scenario.m, scenario.workers, scenario.d);
        cfg.node_scheme = scenario.node_scheme;
        let nodes = make_nodes(&cfg)?;

        // Data comes from its own stream, independent of the trial streams.
        let mut rng = stream_rng(scenario.seed, u64::MAX);
        let blocks: Vec<Block> = (0..=scenario.m)
            .map(|_| Block::from_fn(scenario.block_rows, scenario.block_cols, |_, _| normal(&mut rng)))
            .collect();
        let f = |b: &Block| apply_task(&scenario.task, b, None);
        let truth = blocks.iter().map(f).collect::<Result<Vec<_>>>()?;

        let uses = |s: Scheme| scenario.schemes.iter().any(|m| m.scheme == s);
        let worker_outputs =
            |d: usize| -> Result<Vec<Block>> { encode(&blocks, &nodes, d)?.iter().map(|s| f(&s.block)).collect() };
        let bri_results = if uses(Scheme::Bri) {
            worker_outputs(scenario.d)?
        } else {
            Vec::new()
        };
        let bacc_results = if uses(Scheme::Bacc) {
            worker_outputs(0)?
        } else {
            Vec::new()
        };
        Ok(Self {
            scenario,
            nodes,
            bri_results,
            bacc_results,
            truth,
        })
    }

    pub fn scenario(&self) -> &SimScenario {
        &self.scenario
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn arrivals(&self, trial: usize) -> Arrivals {
        let sc = &self.scenario;
        let mut rng = stream_rng(sc.seed, trial as u64);
        sample_arrivals(&sc.delay, sc.workers, sc.stragglers, &mut rng)
    }

    pub fn run_trial(&self, trial: usize) -> Result<Vec<TrialRecord>> {
        let arrivals = self.arrivals(trial);
        let sc = &self.scenario;
        sc.schemes
            .iter()
            .map(|model| match model.scheme {
                Scheme::Bri | Scheme::Bacc => self.flexible_record(model.scheme, trial, &arrivals),
                _ => {
                    let k = model.threshold(sc.m, sc.task.degree).min_results(sc.workers);
                    let t = arrivals.kth_time(k);
                    Ok(TrialRecord {
                        scheme: model.scheme,
                        trial,
                        waiting_time: t,
                        decode_error: None,
                        k_used: k,
                        failed: !t.is_finite(),
                    })
                }
            })
            .collect()
    }

    fn flexible_record(&self, scheme: Scheme, trial: usize, arrivals: &Arrivals) -> Result<TrialRecord> {
        let Some((ids, t)) = self.scenario.k_policy.collect(arrivals) else {
            return Ok(TrialRecord {
                scheme,
                trial,
                waiting_time: f64::INFINITY,
                decode_error: None,
                k_used: 1,
                failed: true,
            });
        };
        let outputs = if scheme == Scheme::Bri {
            &self.bri_results
        } else {
            &self.bacc_results
        };
        let results: Vec<WorkerResult> = ids
            .iter()
            .map(|&i| WorkerResult {
                worker_id: i,
                z: self.nodes.zs()[i],
                block: outputs[i].clone(),
                arrival_time: arrivals.times[i],
            })
            .collect();
        let decoded = if scheme == Scheme::Bri {
            decode(&results, &self.nodes, self.scenario.d, self.nodes.alphas())?
        } else {
            bacc_decode(&results, &self.nodes, self.nodes.alphas())?
        };
        Ok(TrialRecord {
            scheme,
            trial,
            waiting_time: t,
            decode_error: Some(relative_frobenius_error(&decoded, &self.truth)?),
            k_used: ids.len(),
            failed: false,
        })
    }

    /// All trials in order, schemes in scenario order within a trial.
    pub fn run_all(&self) -> Result<Vec<TrialRecord>> {
        let mut out = Vec::with_capacity(self.scenario.trials * self.scenario.schemes.len());
        for trial in 0..self.scenario.trials {
            out.extend(self.run_trial(trial)?);
        }
        Ok(out)
    }
}

fn sorted_times(records: &[TrialRecord], scheme: Scheme) -> Result<Vec<f64>> {
    let mut times: Vec<f64> = records
        .iter()
        .filter(|r| r.scheme == scheme)
        .map(|r| r.waiting_time)
        .collect();
    if times.is_empty() {
        return Err(Error::Empty("records for scheme"));
    }
    times.sort_by(f64::total_cmp);
    Ok(times)
}

/// Empirical CDF as `(time, P[T ≤ time])` steps at each distinct finite
/// waiting time. Failed trials count toward the total, so the last step stays
/// below 1 when any trial failed.
pub fn waiting_time_cdf(records: &[TrialRecord], scheme: Scheme) -> Result<Vec<(f64, f64)>> {
    let times = sorted_times(records, scheme)?;
    let n = times.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        if !t.is_finite() {
            break;
        }
        let p = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == t => last.1 = p,
            _ => out.push((t, p)),
        }
    }
    Ok(out)
}

pub fn cdf_at(records: &[TrialRecord], scheme: Scheme, t: f64) -> Result<f64> {
    let times = sorted_times(records, scheme)?;
    Ok(times.iter().filter(|&&v| v <= t).count() as f64 / times.len() as f64)
}

/// Smallest waiting time at which the empirical CDF reaches `q`.
pub fn quantile(records: &[TrialRecord], scheme: Scheme, q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter("quantile must lie in (0, 1]".into()));
    }
    let times = sorted_times(records, scheme)?;
    let idx = libm::ceil(q * times.len() as f64 - 1e-9) as usize;
    Ok(times[idx.max(1) - 1])
}

pub fn mean_waiting_time(records: &[TrialRecord], scheme: Scheme) -> Result<f64> {
    let times = sorted_times(records, scheme)?;
    Ok(times.iter().sum::<f64>() / times.len() as f64)
}

/// `(t_b − t_a) / t_b` at CDF level `q`: the fraction of `b`'s waiting time
/// saved by `a`. Equals 1 when only `b` never completes.
pub fn relative_improvement(records: &[TrialRecord], a: Scheme, b: Scheme, q: f64) -> Result<f64> {
    let ta = quantile(records, a, q)?;
    let tb = quantile(records, b, q)?;
    match (ta.is_finite(), tb.is_finite()) {
        (true, true) if tb > 0.0 => Ok((tb - ta) / tb),
        (true, true) => Err(Error::Degenerate("reference waiting time is zero")),
        (true, false) => Ok(1.0),
        (false, true) => Ok(f64::NEG_INFINITY),
        (false, false) => Err(Error::Degenerate("both waiting times are unbounded")),
    }
}
