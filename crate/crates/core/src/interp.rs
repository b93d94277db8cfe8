//! Floater–Hormann barycentric rational interpolation, scalar and
//! matrix-valued.
//!
//! For ascending nodes `x_0 < … < x_n` and a blending degree `0 ≤ d ≤ n` the
//! interpolant is
//!
//! ```text
//!          Σ_{i=0}^{n-d} λ_i(x) p_i(x)                    (-1)^i
//!   r(x) = ---------------------------,   λ_i(x) = ----------------------
//!             Σ_{i=0}^{n-d} λ_i(x)                  Π_{j=i}^{i+d} (x - x_j)
//! ```
//!
//! where `p_i` is the degree-`d` Lagrange polynomial through nodes
//! `i..=i+d`. The blending functions `φ_i(x) = Π_{j<i}(x-x_j) Π_{k>i+d}(x_k-x)`
//! differ from `λ_i` by the common factor `(-1)^{n-d} Π_j (x - x_j)`, which
//! cancels in the quotient. The denominator never vanishes on the real line,
//! so the interpolant has no real poles for any `d`.
//!
//! Two evaluation routes are provided: the blended form ([`FhInterpolant::eval`])
//! builds each local polynomial block and blends them, and the barycentric
//! weight form ([`FhInterpolant::eval_weights_form`]) folds everything into one
//! weight per node so a matrix-valued evaluation is a single linear
//! combination of the data blocks.
//!
//! The weight form carries its weights, coefficients and the final
//! combination in double-double arithmetic. In plain `f64` its rounding error
//! scales with the Lebesgue function `Σ|c_k|`, which reaches `1e8` on
//! clustered nodes with `d` near 9, while the blended form stays accurate.

use alloc::vec;
use alloc::vec::Vec;

use twofloat::TwoFloat;

use crate::block::{combine, Block};
use crate::error::{Error, Result};

/// Relative width of the near-node guard: evaluations within
/// `NODE_GUARD * (x_n - x_0)` of a node return that node's value exactly.
pub const NODE_GUARD: f64 = 1e-13;

/// Scalar coefficients expressing `r(x)` as a combination of the data values.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    /// `x` is (within the guard of) node `j`: `r(x) = values[j]`.
    Node(usize),
    /// `r(x) = Σ_k c_k values[k]`, coefficients in double-double.
    Weights(Vec<TwoFloat>),
}

impl Coefficients {
    /// `Σ_k c_k values[k]`, accumulated entrywise in double-double and
    /// rounded once.
    pub fn apply(&self, values: &[Block]) -> Block {
        match self {
            Coefficients::Node(j) => values[*j].clone(),
            Coefficients::Weights(c) => {
                let (rows, cols) = values[0].shape();
                let mut acc = vec![TwoFloat::from(0.0); rows * cols];
                for (&ck, vk) in c.iter().zip(values) {
                    if ck == TwoFloat::from(0.0) {
                        continue;
                    }
                    for (a, &v) in acc.iter_mut().zip(vk.as_slice()) {
                        *a += ck * v;
                    }
                }
                Block::from_vec(rows, cols, acc.into_iter().map(f64::from).collect())
                    .expect("accumulator matches block shape")
            }
        }
    }

    /// The coefficient vector, with a unit vector for the node case.
    pub fn dense(&self, len: usize) -> Vec<f64> {
        match self {
            Coefficients::Node(j) => {
                let mut v = vec![0.0; len];
                v[*j] = 1.0;
                v
            }
            Coefficients::Weights(c) => c.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// Node set plus blending degree, without data. Decoders that evaluate many
/// targets or data sets over one node set build this once.
#[derive(Clone, Debug, PartialEq)]
pub struct FhBasis {
    nodes: Vec<f64>,
    d: usize,
    guard: f64,
    weights: Vec<TwoFloat>,
}

impl FhBasis {
    /// `nodes` must be strictly ascending and separated by more than the
    /// near-node guard.
    pub fn new(nodes: Vec<f64>, d: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Empty("interpolation nodes"));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("interpolation node"));
        }
        let n = nodes.len() - 1;
        if d > n {
            return Err(Error::DegreeOutOfRange { d, max: n });
        }
        let guard = NODE_GUARD * (nodes[n] - nodes[0]);
        for pair in nodes.windows(2) {
            if pair[1] - pair[0] <= guard || pair[1] <= pair[0] {
                if pair[1] < pair[0] {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "nodes not ascending at {} > {}",
                        pair[0],
                        pair[1]
                    )));
                }
                return Err(Error::DuplicateNode(pair[0], pair[1]));
            }
        }
        let weights = barycentric_weights(&nodes, d);
        Ok(Self {
            nodes,
            d,
            guard,
            weights,
        })
    }

    /// Sorts `nodes` ascending and returns the basis together with the
    /// permutation applied (`sorted[k] = nodes[perm[k]]`).
    pub fn sorted(nodes: &[f64], d: usize) -> Result<(Self, Vec<usize>)> {
        if nodes.iter().any(|x| x.is_nan()) {
            return Err(Error::NonFinite("interpolation node"));
        }
        let mut perm: Vec<usize> = (0..nodes.len()).collect();
        perm.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
        let sorted = perm.iter().map(|&i| nodes[i]).collect();
        Ok((Self::new(sorted, d)?, perm))
    }

    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn span(&self) -> f64 {
        self.nodes[self.nodes.len() - 1] - self.nodes[0]
    }

    /// Width of the near-node guard.
    pub fn guard(&self) -> f64 {
        self.guard
    }

    /// Barycentric weights `w_k` of the single-sum form, rounded to `f64`.
    pub fn weights(&self) -> Vec<f64> {
        self.weights.iter().map(|&w| f64::from(w)).collect()
    }

    /// Index of the node `x` falls on, if it is within the guard of one.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        if self.nodes.len() == 1 {
            return Some(0);
        }
        let pos = self.nodes.partition_point(|&v| v < x);
        let mut best = None;
        for j in [pos.wrapping_sub(1), pos] {
            if let Some(&v) = self.nodes.get(j) {
                if (x - v).abs() < self.guard {
                    best = Some(j);
                }
            }
        }
        best
    }

    /// Coefficients of `r(x)` over the data values, via the barycentric
    /// weights. `O(n)` per point.
    pub fn coefficients(&self, x: f64) -> Result<Coefficients> {
        if !x.is_finite() {
            return Err(Error::NonFinite("evaluation point"));
        }
        if let Some(j) = self.node_index(x) {
            return Ok(Coefficients::Node(j));
        }
        let mut c: Vec<TwoFloat> = self
            .weights
            .iter()
            .zip(&self.nodes)
            .map(|(&w, &xk)| w * dd_recip(TwoFloat::new_sub(x, xk)))
            .collect();
        let total = c.iter().fold(TwoFloat::from(0.0), |acc, &v| acc + v);
        if total.hi() == 0.0 || !total.hi().is_finite() {
            return Err(Error::Degenerate("barycentric denominator"));
        }
        let inv = dd_recip(total);
        for v in &mut c {
            *v *= inv;
        }
        Ok(Coefficients::Weights(c))
    }

    /// The normalized denominator `Σ_i λ_i(x)`, i.e. `Σ_i φ_i(x)` divided by
    /// `(-1)^{n-d} Π_j (x - x_j)`. For `d = 0` this is the Berrut sum
    /// `Σ_i (-1)^i / (x - x_i)`.
    pub fn denominator(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite("evaluation point"));
        }
        if self.nodes.iter().any(|&v| (x - v).abs() < self.guard || x == v) {
            return Err(Error::AtNode(x));
        }
        let n = self.nodes.len() - 1;
        let d = self.d;
        Ok((0..=n - d).map(|i| self.lambda(i, x)).sum())
    }

    /// `λ_i(x) = (-1)^i / Π_{j=i}^{i+d} (x - x_j)`.
    fn lambda(&self, i: usize, x: f64) -> f64 {
        let prod: f64 = self.nodes[i..=i + self.d].iter().map(|&v| x - v).product();
        let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign / prod
    }

    /// The un-normalized blending function
    /// `φ_i(x) = Π_{j<i} (x - x_j) · Π_{k>i+d} (x_k - x)`; empty products
    /// are 1.
    pub fn blending_function(&self, i: usize, x: f64) -> f64 {
        let left: f64 = self.nodes[..i].iter().map(|&v| x - v).product();
        let right: f64 = self.nodes[i + self.d + 1..].iter().map(|&v| v - x).product();
        left * right
    }

    /// Lagrange basis values of piece `i` (nodes `i..=i+d`) at `x`.
    fn local_lagrange(&self, i: usize, x: f64, out: &mut Vec<f64>) {
        out.clear();
        let window = &self.nodes[i..=i + self.d];
        for (k, &xk) in window.iter().enumerate() {
            let mut l = 1.0;
            for (j, &xj) in window.iter().enumerate() {
                if j != k {
                    l *= (x - xj) / (xk - xj);
                }
            }
            out.push(l);
        }
    }
}

/// `w_k = Σ_{i ∈ J_k} (-1)^i / Π_{j=i, j≠k}^{i+d} (x_k - x_j)` with
/// `J_k = {i : max(0, k-d) ≤ i ≤ min(k, n-d)}`.
fn barycentric_weights(nodes: &[f64], d: usize) -> Vec<TwoFloat> {
    let n = nodes.len() - 1;
    (0..=n)
        .map(|k| {
            let lo = k.saturating_sub(d);
            let hi = k.min(n - d);
            (lo..=hi).fold(TwoFloat::from(0.0), |acc, i| {
                let prod = (i..=i + d)
                    .filter(|&j| j != k)
                    .fold(TwoFloat::from(1.0), |p, j| p * TwoFloat::new_sub(nodes[k], nodes[j]));
                let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
                acc + dd_recip(prod) * sign
            })
        })
        .collect()
}

/// Double-double reciprocal: an `f64` estimate refined by one Newton step.
/// `twofloat`'s own division skips the fused residual and keeps only `f64`
/// accuracy.
fn dd_recip(v: TwoFloat) -> TwoFloat {
    let r = TwoFloat::from(1.0 / v.hi());
    r + r * (TwoFloat::from(1.0) - v * r)
}

/// Matrix-valued Floater–Hormann interpolant: ascending nodes, one block per
/// node, blending degree `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct FhInterpolant {
    basis: FhBasis,
    values: Vec<Block>,
}

impl FhInterpolant {
    /// Nodes may come in any order; they are sorted with the values
    /// co-permuted. Nodes closer than the near-node guard are rejected.
    pub fn new(nodes: &[f64], values: Vec<Block>, d: usize) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::ShapeMismatch {
                expected: (nodes.len(), 1),
                found: (values.len(), 1),
            });
        }
        let first = values.first().ok_or(Error::Empty("interpolation values"))?;
        for v in &values {
            first.check_same_shape(v)?;
        }
        let (basis, perm) = FhBasis::sorted(nodes, d)?;
        let mut slots: Vec<Option<Block>> = values.into_iter().map(Some).collect();
        let values = perm
            .iter()
            .map(|&i| slots[i].take().expect("permutation is a bijection"))
            .collect();
        Ok(Self { basis, values })
    }

    pub fn from_scalars(nodes: &[f64], values: &[f64], d: usize) -> Result<Self> {
        Self::new(nodes, values.iter().map(|&v| Block::scalar(v)).collect(), d)
    }

    /// Pairs an existing basis with data (already in basis order).
    pub fn with_basis(basis: FhBasis, values: Vec<Block>) -> Result<Self> {
        if basis.len() != values.len() {
            return Err(Error::ShapeMismatch {
                expected: (basis.len(), 1),
                found: (values.len(), 1),
            });
        }
        for v in &values[1..] {
            values[0].check_same_shape(v)?;
        }
        Ok(Self { basis, values })
    }

    pub fn basis(&self) -> &FhBasis {
        &self.basis
    }

    pub fn nodes(&self) -> &[f64] {
        self.basis.nodes()
    }

    pub fn values(&self) -> &[Block] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn value_shape(&self) -> (usize, usize) {
        self.values[0].shape()
    }

    /// Blended-form evaluation `Σ φ_i l_i / Σ φ_j`, building each local
    /// polynomial block explicitly.
    pub fn eval(&self, x: f64) -> Result<Block> {
        let mut muls = 0;
        self.eval_counted(x, &mut muls)
    }

    /// As [`eval`](Self::eval), adding the number of block-entry
    /// multiplications performed to `muls`.
    pub fn eval_counted(&self, x: f64, muls: &mut u64) -> Result<Block> {
        if !x.is_finite() {
            return Err(Error::NonFinite("evaluation point"));
        }
        if let Some(j) = self.basis.node_index(x) {
            return Ok(self.values[j].clone());
        }
        let n = self.basis.len() - 1;
        let d = self.basis.degree();
        let (s, t) = self.value_shape();
        let entries = (s * t) as u64;

        let mut num = Block::zeros(s, t);
        let mut den = 0.0;
        let mut lagrange = Vec::with_capacity(d + 1);
        for i in 0..=n - d {
            let phi = self.basis.lambda(i, x);
            self.basis.local_lagrange(i, x, &mut lagrange);
            let local = combine(lagrange.iter().copied().zip(&self.values[i..=i + d]), (s, t));
            *muls += (d as u64 + 1) * entries;
            num.add_scaled(phi, &local)?;
            *muls += entries;
            den += phi;
        }
        if den == 0.0 || !den.is_finite() {
            return Err(Error::Degenerate("blended denominator"));
        }
        num.scale(1.0 / den);
        *muls += entries;
        Ok(num)
    }

    /// Single-sum barycentric evaluation: one scalar weight per node, then
    /// one linear combination of the blocks.
    pub fn eval_weights_form(&self, x: f64) -> Result<Block> {
        Ok(self.basis.coefficients(x)?.apply(&self.values))
    }

    /// Weights-form evaluation of a scalar interpolant.
    pub fn eval_scalar(&self, x: f64) -> Result<f64> {
        if self.value_shape() != (1, 1) {
            return Err(Error::ShapeMismatch {
                expected: (1, 1),
                found: self.value_shape(),
            });
        }
        Ok(match self.basis.coefficients(x)? {
            Coefficients::Node(j) => self.values[j].as_slice()[0],
            Coefficients::Weights(c) => f64::from(
                c.iter()
                    .zip(&self.values)
                    .fold(TwoFloat::from(0.0), |acc, (&c, v)| acc + c * v.as_slice()[0]),
            ),
        })
    }

    /// See [`FhBasis::denominator`].
    pub fn denominator(&self, x: f64) -> Result<f64> {
        self.basis.denominator(x)
    }
}

/// Upper bound on the sup-norm interpolation error for `d ≥ 1`.
///
/// With `n = n_points - 1` and `h` the largest node spacing:
/// `h^{d+1} (b-a) ‖f^{(d+2)}‖ / (d+2)` when `n - d` is odd, and
/// `h^{d+1} [(b-a) ‖f^{(d+2)}‖ / (d+2) + ‖f^{(d+1)}‖ / (d+1)]` when even.
pub fn theorem1_bound(
    d: usize,
    n_points: usize,
    a: f64,
    b: f64,
    max_spacing: f64,
    deriv_norm_d1: f64,
    deriv_norm_d2: f64,
) -> Result<f64> {
    if d == 0 {
        return Err(Error::Hypothesis("error bound requires d >= 1".into()));
    }
    if n_points == 0 || n_points - 1 < d {
        return Err(Error::DegreeOutOfRange {
            d,
            max: n_points.saturating_sub(1),
        });
    }
    if max_spacing.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater)
        || b.partial_cmp(&a) != Some(core::cmp::Ordering::Greater)
    {
        return Err(Error::InvalidParameter(
            "spacing and interval length must be positive".into(),
        ));
    }
    if deriv_norm_d1 < 0.0 || deriv_norm_d2 < 0.0 {
        return Err(Error::InvalidParameter("derivative norms must be non-negative".into()));
    }
    let n = n_points - 1;
    let h = libm::pow(max_spacing, (d + 1) as f64);
    let main = (b - a) * deriv_norm_d2 / (d + 2) as f64;
    Ok(if (n - d) % 2 == 1 {
        h * main
    } else {
        h * (main + deriv_norm_d1 / (d + 1) as f64)
    })
}
