//! Encoders and decoders: the barycentric rational code with any-k decoding,
//! its Berrut (`d = 0`) special case, and the Lagrange coded computing
//! baseline with its fixed recovery threshold.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::block::{combine, Block};
use crate::error::{Error, Result};
use crate::interp::{FhBasis, FhInterpolant, NODE_GUARD};

/// Minimum distance between any source node and any worker node.
pub const MIN_NODE_GAP: f64 = 1e-9;

/// Tolerance used to match a result's node against the worker nodes.
const NODE_MATCH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeScheme {
    /// Worker nodes at Chebyshev points of the second kind on `[-1, 1]`,
    /// source nodes at interleaved first-kind (midpoint) angles.
    Chebyshev2,
    /// Worker nodes equispaced on `[-1, 1]`, source nodes at cell midpoints.
    Equispaced,
    /// Caller-supplied nodes, see [`NodeSet::new`].
    Custom,
}

impl FromStr for NodeScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chebyshev2" | "chebyshev" => Ok(NodeScheme::Chebyshev2),
            "equispaced" => Ok(NodeScheme::Equispaced),
            "custom" => Ok(NodeScheme::Custom),
            _ => Err(Error::InvalidParameter(alloc::format!("unknown node scheme '{s}'"))),
        }
    }
}

impl fmt::Display for NodeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeScheme::Chebyshev2 => "chebyshev2",
            NodeScheme::Equispaced => "equispaced",
            NodeScheme::Custom => "custom",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodecConfig {
    /// Number of source blocks minus one.
    pub m: usize,
    /// Number of workers `N`.
    pub workers: usize,
    pub d_encode: usize,
    /// Clamped to `k - 1` at decode time.
    pub d_decode: usize,
    pub node_scheme: NodeScheme,
}

impl CodecConfig {
    pub fn new(m: usize, workers: usize, d: usize) -> Self {
        Self {
            m,
            workers,
            d_encode: d,
            d_decode: d,
            node_scheme: NodeScheme::Chebyshev2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidParameter("at least one worker is required".into()));
        }
        if self.d_encode > self.m {
            return Err(Error::DegreeOutOfRange {
                d: self.d_encode,
                max: self.m,
            });
        }
        Ok(())
    }
}

/// Source nodes `α_0..α_m` and worker nodes `z_0..z_{N-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    alphas: Vec<f64>,
    zs: Vec<f64>,
}

impl NodeSet {
    /// Validates distinctness within each set and the gap between the sets.
    pub fn new(alphas: Vec<f64>, zs: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Empty("source nodes"));
        }
        if zs.is_empty() {
            return Err(Error::Empty("worker nodes"));
        }
        if alphas.iter().chain(&zs).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("node"));
        }
        check_distinct(&alphas)?;
        check_distinct(&zs)?;
        if min_cross_gap(&alphas, &zs) <= MIN_NODE_GAP {
            return Err(Error::NodeCollision);
        }
        Ok(Self { alphas, zs })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn zs(&self) -> &[f64] {
        &self.zs
    }

    pub fn m(&self) -> usize {
        self.alphas.len() - 1
    }

    pub fn workers(&self) -> usize {
        self.zs.len()
    }

    /// Worker id owning node `z`.
    pub fn worker_index(&self, z: f64) -> Option<usize> {
        self.zs.iter().position(|&v| (v - z).abs() <= NODE_MATCH_TOL)
    }

    /// Smallest `|α_i - z_j|`.
    pub fn min_gap(&self) -> f64 {
        min_cross_gap(&self.alphas, &self.zs)
    }
}

fn check_distinct(nodes: &[f64]) -> Result<()> {
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    for w in sorted.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::DuplicateNode(w[0], w[1]));
        }
    }
    Ok(())
}

fn min_cross_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| (x - y).abs()))
        .fold(f64::INFINITY, f64::min)
}

/// Offsets tried, in order, when the default source nodes land on a worker
/// node. Each shifts every source angle by `δ` cells and widens the grid to
/// `m + 1 + δ` cells so the points stay inside the interval.
const ALPHA_OFFSETS: [f64; 8] = [0.0, 0.25, 0.5, 0.125, 0.375, 0.625, 0.75, 0.875];

pub fn make_nodes(config: &CodecConfig) -> Result<NodeSet> {
    config.validate()?;
    let n = config.workers;
    let m = config.m;
    let zs: Vec<f64> = match config.node_scheme {
        NodeScheme::Chebyshev2 => chebyshev2_points(n),
        NodeScheme::Equispaced => equispaced_points(n),
        NodeScheme::Custom => {
            return Err(Error::InvalidParameter(
                "custom nodes are supplied through NodeSet::new".into(),
            ))
        }
    };
    for delta in ALPHA_OFFSETS {
        let cells = (m + 1) as f64 + delta;
        let alphas: Vec<f64> = (0..=m)
            .map(|i| {
                let frac = (i as f64 + 0.5 + delta) / cells;
                match config.node_scheme {
                    NodeScheme::Chebyshev2 => -libm::cos(frac * core::f64::consts::PI),
                    _ => -1.0 + 2.0 * frac,
                }
            })
            .collect();
        if min_cross_gap(&alphas, &zs) > MIN_NODE_GAP {
            return NodeSet::new(alphas, zs);
        }
    }
    Err(Error::NodeCollision)
}

/// `-cos(iπ/(N-1))` for `i = 0..N`, ascending over `[-1, 1]`; `{0}` for `N = 1`.
pub fn chebyshev2_points(n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![0.0];
    }
    (0..n)
        .map(|i| -libm::cos(i as f64 * core::f64::consts::PI / (n - 1) as f64))
        .collect()
}

pub fn equispaced_points(n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![0.0];
    }
    (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect()
}

/// Encoded block sent to one worker.
#[derive(Clone, Debug, PartialEq)]
pub struct Share {
    pub worker_id: usize,
    pub z: f64,
    pub block: Block,
}

/// A worker's returned computation, as seen by the master.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkerResult {
    pub worker_id: usize,
    pub z: f64,
    pub block: Block,
    /// Seconds since the task was issued (virtual or wall-clock).
    pub arrival_time: f64,
}

/// The encoding interpolant `r(x)` with `r(α_i) = X_i`.
pub fn encoder(blocks: &[Block], nodes: &NodeSet, d: usize) -> Result<FhInterpolant> {
    if blocks.len() != nodes.alphas.len() {
        return Err(Error::ShapeMismatch {
            expected: (nodes.alphas.len(), 1),
            found: (blocks.len(), 1),
        });
    }
    let m = blocks.len() - 1;
    if d > m {
        return Err(Error::DegreeOutOfRange { d, max: m });
    }
    FhInterpolant::new(&nodes.alphas, blocks.to_vec(), d)
}

/// `Share[i].block = r(z_i)`.
pub fn encode(blocks: &[Block], nodes: &NodeSet, d: usize) -> Result<Vec<Share>> {
    let r = encoder(blocks, nodes, d)?;
    nodes
        .zs
        .iter()
        .enumerate()
        .map(|(worker_id, &z)| {
            Ok(Share {
                worker_id,
                z,
                block: r.eval_weights_form(z)?,
            })
        })
        .collect()
}

/// Checks results against the node set and returns them sorted by node.
fn sorted_results<'a>(results: &'a [WorkerResult], nodes: &NodeSet) -> Result<Vec<&'a WorkerResult>> {
    let first = results.first().ok_or(Error::Empty("worker results"))?;
    for r in results {
        if nodes.worker_index(r.z).is_none() {
            return Err(Error::UnknownNode(r.z));
        }
        first.block.check_same_shape(&r.block)?;
    }
    let mut sorted: Vec<&WorkerResult> = results.iter().collect();
    sorted.sort_by(|a, b| a.z.total_cmp(&b.z));
    for w in sorted.windows(2) {
        if (w[1].z - w[0].z).abs() <= NODE_MATCH_TOL {
            return Err(Error::DuplicateNode(w[0].z, w[1].z));
        }
    }
    Ok(sorted)
}

/// Approximates `f(X_t)` at every target from any `k ≥ 1` worker results.
///
/// The results are relabeled in ascending node order as `x_0..x_{k-1}` and
/// interpolated with blending degree `min(d, k - 1)`.
pub fn decode(results: &[WorkerResult], nodes: &NodeSet, d: usize, targets: &[f64]) -> Result<Vec<Block>> {
    let sorted = sorted_results(results, nodes)?;
    let k = sorted.len();
    let d_eff = d.min(k - 1);
    let basis = FhBasis::new(sorted.iter().map(|r| r.z).collect(), d_eff)?;
    let values: Vec<Block> = sorted.iter().map(|r| r.block.clone()).collect();
    targets
        .iter()
        .map(|&x| Ok(basis.coefficients(x)?.apply(&values)))
        .collect()
}

/// Berrut decoder, written directly from the alternating-sign weights
/// `(-1)^i / (x - z_i)`. Equal to `decode(.., d = 0, ..)`.
pub fn bacc_decode(results: &[WorkerResult], nodes: &NodeSet, targets: &[f64]) -> Result<Vec<Block>> {
    let sorted = sorted_results(results, nodes)?;
    let shape = sorted[0].block.shape();
    let span = sorted[sorted.len() - 1].z - sorted[0].z;
    let guard = NODE_GUARD * span;
    targets
        .iter()
        .map(|&x| {
            if !x.is_finite() {
                return Err(Error::NonFinite("evaluation point"));
            }
            if sorted.len() == 1 {
                return Ok(sorted[0].block.clone());
            }
            if let Some(hit) = sorted.iter().find(|r| (x - r.z).abs() < guard) {
                return Ok(hit.block.clone());
            }
            let terms: Vec<f64> = sorted
                .iter()
                .enumerate()
                .map(|(i, r)| if i % 2 == 0 { 1.0 } else { -1.0 } / (x - r.z))
                .collect();
            let den: f64 = terms.iter().sum();
            Ok(combine(
                terms.iter().map(|t| t / den).zip(sorted.iter().map(|r| &r.block)),
                shape,
            ))
        })
        .collect()
}

fn lagrange_basis(nodes: &[f64], j: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &xk)| (x - xk) / (nodes[j] - xk))
        .product()
}

/// Lagrange encoder: `Share[i].block = Σ_j X_j ℓ_j(z_i)` with `ℓ_j` the
/// Lagrange basis on the source nodes.
pub fn lcc_encode(blocks: &[Block], nodes: &NodeSet) -> Result<Vec<Share>> {
    if blocks.len() != nodes.alphas.len() {
        return Err(Error::ShapeMismatch {
            expected: (nodes.alphas.len(), 1),
            found: (blocks.len(), 1),
        });
    }
    for b in &blocks[1..] {
        blocks[0].check_same_shape(b)?;
    }
    let shape = blocks[0].shape();
    Ok(nodes
        .zs
        .iter()
        .enumerate()
        .map(|(worker_id, &z)| {
            let coeffs: Vec<f64> = (0..blocks.len()).map(|j| lagrange_basis(&nodes.alphas, j, z)).collect();
            Share {
                worker_id,
                z,
                block: combine(coeffs.into_iter().zip(blocks), shape),
            }
        })
        .collect())
}

/// Lagrange decoder. Needs at least `f_degree · m + 1` results; interpolates
/// all supplied results exactly and evaluates at the targets.
pub fn lcc_decode(results: &[WorkerResult], nodes: &NodeSet, targets: &[f64], f_degree: usize) -> Result<Vec<Block>> {
    let needed = f_degree * nodes.m() + 1;
    if results.len() < needed {
        return Err(Error::InsufficientResults {
            needed,
            got: results.len(),
        });
    }
    let sorted = sorted_results(results, nodes)?;
    let shape = sorted[0].block.shape();
    let zs: Vec<f64> = sorted.iter().map(|r| r.z).collect();
    targets
        .iter()
        .map(|&x| {
            if !x.is_finite() {
                return Err(Error::NonFinite("evaluation point"));
            }
            let coeffs: Vec<f64> = (0..zs.len()).map(|j| lagrange_basis(&zs, j, x)).collect();
            Ok(combine(coeffs.into_iter().zip(sorted.iter().map(|r| &r.block)), shape))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Bri,
    Bacc,
    Lcc,
    MatDot,
    Ep,
    Uncoded,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Bri,
        Scheme::Bacc,
        Scheme::Lcc,
        Scheme::MatDot,
        Scheme::Ep,
        Scheme::Uncoded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bri => "BRI",
            Scheme::Bacc => "BACC",
            Scheme::Lcc => "LCC",
            Scheme::MatDot => "MatDot",
            Scheme::Ep => "EP",
            Scheme::Uncoded => "uncoded",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("unknown scheme '{s}'")))
    }
}

/// How many worker results a scheme must collect before it can decode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    /// Any `k ≥ 1`.
    Flexible,
    Fixed(usize),
    /// Every worker.
    All,
}

impl Threshold {
    /// Minimum result count with `workers` workers.
    pub fn min_results(self, workers: usize) -> usize {
        match self {
            Threshold::Flexible => 1,
            Threshold::Fixed(k) => k,
            Threshold::All => workers,
        }
    }
}

/// Recovery threshold model per scheme. EP assumes the `XᵀX` family split
/// into `m + 1` blocks on both sides (`(m+1)²`), MatDot `p = m + 1` inner
/// partitions (`2p - 1`).
pub fn scheme_threshold(scheme: Scheme, m: usize, f_degree: usize) -> Threshold {
    match scheme {
        Scheme::Bri | Scheme::Bacc => Threshold::Flexible,
        Scheme::Lcc => Threshold::Fixed(f_degree * m + 1),
        Scheme::Ep => Threshold::Fixed((m + 1) * (m + 1)),
        Scheme::MatDot => Threshold::Fixed(2 * (m + 1) - 1),
        Scheme::Uncoded => Threshold::All,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn results_from(shares: &[Share], f: impl Fn(&Block) -> Block) -> Vec<WorkerResult> {
        shares
            .iter()
            .map(|s| WorkerResult {
                worker_id: s.worker_id,
                z: s.z,
                block: f(&s.block),
                arrival_time: 0.0,
            })
            .collect()
    }

    #[test]
    fn chebyshev_two_workers() {
        let nodes = make_nodes(&CodecConfig::new(0, 2, 0)).unwrap();
        assert_eq!(nodes.zs(), &[-1.0, 1.0]);
    }

    #[test]
    fn chebyshev_twenty_workers_middle_node() {
        let nodes = make_nodes(&CodecConfig::new(9, 20, 2)).unwrap();
        let expected = -libm::cos(10.0 * core::f64::consts::PI / 19.0);
        assert_eq!(nodes.zs()[10], expected);
        assert!((nodes.zs()[10] - 0.0825).abs() < 1e-4);
    }

    #[test]
    fn make_nodes_keeps_gap_for_all_small_configs() {
        for scheme in [NodeScheme::Chebyshev2, NodeScheme::Equispaced] {
            for m in 0..12 {
                for n in 1..30 {
                    let mut cfg = CodecConfig::new(m, n, 0);
                    cfg.node_scheme = scheme;
                    let nodes = make_nodes(&cfg).unwrap();
                    assert!(nodes.min_gap() > MIN_NODE_GAP, "{scheme} m={m} n={n}");
                    assert_eq!(nodes.alphas().len(), m + 1);
                    assert_eq!(nodes.zs().len(), n);
                }
            }
        }
    }

    #[test]
    fn custom_scheme_needs_explicit_nodes() {
        let mut cfg = CodecConfig::new(2, 5, 0);
        cfg.node_scheme = NodeScheme::Custom;
        assert!(make_nodes(&cfg).is_err());
        assert_eq!(NodeSet::new(vec![0.0, 1.0], vec![1.0, 2.0]), Err(Error::NodeCollision));
    }

    #[test]
    fn constant_blocks_encode_to_constant() {
        let nodes = make_nodes(&CodecConfig::new(4, 9, 2)).unwrap();
        let c = Block::from_fn(3, 2, |r, k| 1.0 + r as f64 - k as f64);
        let shares = encode(&vec![c.clone(); 5], &nodes, 2).unwrap();
        for s in shares {
            for (a, b) in s.block.as_slice().iter().zip(c.as_slice()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn berrut_share_value() {
        let nodes = NodeSet::new(vec![-1.0, 0.0, 1.0], vec![2.0]).unwrap();
        let blocks = [1.0, 2.0, 3.0].map(Block::scalar);
        let shares = encode(&blocks, &nodes, 0).unwrap();
        assert!((shares[0].block.to_scalar().unwrap() - 2.8).abs() < 1e-14);
    }

    #[test]
    fn encode_paper_sized_instance() {
        let nodes = make_nodes(&CodecConfig::new(9, 20, 2)).unwrap();
        let blocks: Vec<Block> = (0..10)
            .map(|i| Block::from_fn(100, 100, |r, c| libm::sin((i * 31 + r * 7 + c) as f64)))
            .collect();
        let shares = encode(&blocks, &nodes, 2).unwrap();
        assert_eq!(shares.len(), 20);
        assert!(shares.iter().all(|s| s.block.shape() == (100, 100)));
        assert!(shares
            .iter()
            .enumerate()
            .all(|(i, s)| s.worker_id == i && s.z == nodes.zs()[i]));
    }

    #[test]
    fn encode_rejects_bad_inputs() {
        let nodes = make_nodes(&CodecConfig::new(2, 5, 0)).unwrap();
        let blocks = vec![Block::zeros(2, 2), Block::zeros(2, 2), Block::zeros(3, 2)];
        assert!(matches!(encode(&blocks, &nodes, 0), Err(Error::ShapeMismatch { .. })));
        let blocks = vec![Block::zeros(2, 2); 3];
        assert_eq!(
            encode(&blocks, &nodes, 3),
            Err(Error::DegreeOutOfRange { d: 3, max: 2 })
        );
    }

    #[test]
    fn single_block_decodes_exactly_for_any_k() {
        let nodes = make_nodes(&CodecConfig::new(0, 6, 0)).unwrap();
        let x0 = Block::from_fn(3, 2, |r, c| (r as f64 + 1.0) * (c as f64 - 0.5));
        let shares = encode(core::slice::from_ref(&x0), &nodes, 0).unwrap();
        let truth = x0.gram();
        let results = results_from(&shares, Block::gram);
        for k in 1..=6 {
            let out = decode(&results[..k], &nodes, 3, nodes.alphas()).unwrap();
            assert!(out[0].sub(&truth).unwrap().max_abs() <= 1e-13 * truth.max_abs());
        }
    }

    #[test]
    fn one_result_gives_constant_fit() {
        let nodes = make_nodes(&CodecConfig::new(3, 8, 2)).unwrap();
        let r = WorkerResult {
            worker_id: 5,
            z: nodes.zs()[5],
            block: Block::scalar(7.5),
            arrival_time: 1.0,
        };
        let out = decode(&[r], &nodes, 2, nodes.alphas()).unwrap();
        assert!(out.iter().all(|b| b.to_scalar() == Some(7.5)));
    }

    #[test]
    fn decode_errors() {
        let nodes = make_nodes(&CodecConfig::new(2, 5, 0)).unwrap();
        assert_eq!(decode(&[], &nodes, 0, &[0.0]), Err(Error::Empty("worker results")));
        let r = WorkerResult {
            worker_id: 0,
            z: nodes.zs()[0],
            block: Block::scalar(1.0),
            arrival_time: 0.0,
        };
        let dup = vec![r.clone(), r.clone()];
        assert!(matches!(decode(&dup, &nodes, 0, &[0.0]), Err(Error::DuplicateNode(..))));
        let mut stray = r;
        stray.z = 0.123456;
        assert!(matches!(
            decode(&[stray], &nodes, 0, &[0.0]),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn bacc_matches_hand_value() {
        let nodes = NodeSet::new(vec![2.0], vec![-1.0, 0.0, 1.0]).unwrap();
        let results: Vec<WorkerResult> = [1.0, 2.0, 3.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| WorkerResult {
                worker_id: i,
                z: nodes.zs()[i],
                block: Block::scalar(v),
                arrival_time: 0.0,
            })
            .collect();
        let out = bacc_decode(&results, &nodes, &[2.0]).unwrap();
        assert!((out[0].to_scalar().unwrap() - 2.8).abs() < 1e-14);
        let constant: Vec<WorkerResult> = results
            .iter()
            .map(|r| WorkerResult {
                block: Block::scalar(4.0),
                ..r.clone()
            })
            .collect();
        let out = bacc_decode(&constant, &nodes, &[2.0, -0.5, 0.0]).unwrap();
        for b in out {
            assert!((b.to_scalar().unwrap() - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn lcc_encoder_values() {
        let nodes = NodeSet::new(vec![-1.0, 0.0, 1.0], vec![2.0, 0.5]).unwrap();
        let blocks = [1.0, 2.0, 3.0].map(Block::scalar);
        let shares = lcc_encode(&blocks, &nodes).unwrap();
        assert!((shares[0].block.to_scalar().unwrap() - 4.0).abs() < 1e-14);
        assert!((shares[1].block.to_scalar().unwrap() - 2.5).abs() < 1e-14);
        let c = vec![Block::scalar(3.3); 3];
        for s in lcc_encode(&c, &nodes).unwrap() {
            assert!((s.block.to_scalar().unwrap() - 3.3).abs() < 1e-14);
        }
    }

    #[test]
    fn lcc_threshold_and_identity_recovery() {
        let nodes = make_nodes(&CodecConfig::new(2, 9, 0)).unwrap();
        let blocks: Vec<Block> = (0..3)
            .map(|i| Block::from_fn(3, 2, |r, c| libm::cos((i * 5 + r * 2 + c) as f64)))
            .collect();
        let shares = lcc_encode(&blocks, &nodes).unwrap();
        let gram = results_from(&shares, Block::gram);
        let out = lcc_decode(&gram[2..7], &nodes, nodes.alphas(), 2).unwrap();
        for (o, b) in out.iter().zip(&blocks) {
            let t = b.gram();
            assert!(o.sub(&t).unwrap().frobenius_norm() <= 1e-6 * t.frobenius_norm());
        }
        assert_eq!(
            lcc_decode(&gram[..4], &nodes, nodes.alphas(), 2),
            Err(Error::InsufficientResults { needed: 5, got: 4 })
        );
        let ident = results_from(&shares, Clone::clone);
        let out = lcc_decode(&ident[4..7], &nodes, nodes.alphas(), 1).unwrap();
        for (o, b) in out.iter().zip(&blocks) {
            assert!(o.sub(b).unwrap().frobenius_norm() <= 1e-10);
        }
    }

    #[test]
    fn thresholds() {
        assert_eq!(scheme_threshold(Scheme::Lcc, 2, 2), Threshold::Fixed(5));
        assert_eq!(scheme_threshold(Scheme::Ep, 2, 2), Threshold::Fixed(9));
        assert_eq!(scheme_threshold(Scheme::MatDot, 2, 2), Threshold::Fixed(5));
        assert_eq!(scheme_threshold(Scheme::Bri, 9, 2), Threshold::Flexible);
        assert_eq!(scheme_threshold(Scheme::Bacc, 9, 2).min_results(20), 1);
        assert_eq!(scheme_threshold(Scheme::Uncoded, 9, 2).min_results(20), 20);
        assert_eq!("matdot".parse::<Scheme>().unwrap(), Scheme::MatDot);
        assert!("nope".parse::<Scheme>().is_err());
    }
}
