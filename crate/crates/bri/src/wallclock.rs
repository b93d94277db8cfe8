//! Thread-backed rounds: each worker is an OS thread that sleeps for its
//! sampled delay, computes, and sends its serialized result to the master.

use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use bri_core::sim::Arrivals;
use bri_core::{Block, WorkerResult};

use crate::wire;

/// Worker computation: worker id to `(node, output)`.
pub type Work = Arc<dyn Fn(usize) -> (f64, Block) + Send + Sync>;

/// Runs one round and returns the first `k` results to reach the master
/// together with the elapsed wall time in seconds. Delays are
/// `arrivals.times` multiplied by `time_scale`; a worker with an infinite
/// delay never answers. Late workers keep running detached and their results
/// are discarded.
pub fn run_round(arrivals: &Arrivals, time_scale: f64, k: usize, work: Work) -> (Vec<WorkerResult>, f64) {
    let (tx, rx) = mpsc::channel::<Vec<u8>>();
    let start = Instant::now();
    for (id, &t) in arrivals.times.iter().enumerate() {
        if !t.is_finite() {
            continue;
        }
        let tx = tx.clone();
        let work = Arc::clone(&work);
        let delay = Duration::from_secs_f64((t * time_scale).max(0.0));
        thread::spawn(move || {
            thread::sleep(delay);
            let (z, block) = work(id);
            let result = WorkerResult {
                worker_id: id,
                z,
                block,
                arrival_time: start.elapsed().as_secs_f64(),
            };
            let _ = tx.send(wire::encode_result(&result));
        });
    }
    drop(tx);
    let mut results = Vec::with_capacity(k);
    while results.len() < k {
        match rx.recv() {
            Ok(bytes) => results.push(wire::decode_result(&bytes).expect("workers send well-formed messages")),
            Err(_) => break,
        }
    }
    (results, start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_workers_win() {
        let arrivals = Arrivals {
            times: vec![0.5, 0.0, f64::INFINITY, 0.01],
            is_straggler: vec![true, false, true, false],
        };
        let work: Work = Arc::new(|id| (id as f64, Block::scalar(id as f64 * 2.0)));
        let (results, elapsed) = run_round(&arrivals, 1.0, 2, work);
        let mut ids: Vec<usize> = results.iter().map(|r| r.worker_id).collect();
        ids.sort_unstable();
        assert_eq!(ids, vec![1, 3]);
        assert!(elapsed < 0.4);
        assert!(results
            .iter()
            .all(|r| r.block.to_scalar() == Some(r.worker_id as f64 * 2.0)));
    }

    #[test]
    fn silent_workers_end_the_round() {
        let arrivals = Arrivals {
            times: vec![f64::INFINITY, 0.0],
            is_straggler: vec![true, false],
        };
        let work: Work = Arc::new(|_| (0.0, Block::scalar(1.0)));
        let (results, _) = run_round(&arrivals, 1.0, 2, work);
        assert_eq!(results.len(), 1);
    }
}
