//! Barycentric rational coded distributed computing.
//!
//! A master splits its input into `m + 1` blocks, encodes them with a
//! Floater–Hormann rational interpolant evaluated at one node per worker,
//! and decodes an approximation of `f(X_i)` from *any* subset of the worker
//! results. The crate also carries the fixed-threshold baselines the scheme
//! is compared against, a virtual-time straggler simulator, a coded gradient
//! descent trainer for linear regression, and the error-bound tooling.
//!
//! Everything here is `no_std` + `alloc`; file formats and the CLI live in
//! the `bri` companion crate.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod block;
pub mod codec;
pub mod error;
pub mod interp;
pub mod lr;
pub mod rng;
pub mod sim;
pub mod tasks;

pub use block::Block;
pub use codec::{
    bacc_decode, decode, encode, lcc_decode, lcc_encode, make_nodes, scheme_threshold, CodecConfig, NodeScheme,
    NodeSet, Scheme, Share, Threshold, WorkerResult,
};
pub use error::{Error, Result};
pub use interp::{theorem1_bound, FhBasis, FhInterpolant};
pub use tasks::{apply_task, partition_rows, TaskKind, TaskSpec};
