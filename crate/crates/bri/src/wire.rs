//! Binary encoding of shares and worker results.
//!
//! Little-endian throughout: `u64` worker id, `f64` node, `u64` rows,
//! `u64` cols, then `rows * cols` `f64` entries in row-major order. A worker
//! result appends its `f64` arrival time.

use bri_core::{Block, Share, WorkerResult};

const HEADER: usize = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WireError {
    #[error("truncated message: need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("{0} trailing bytes after message")]
    Trailing(usize),
    #[error("block dimensions overflow")]
    Overflow,
}

fn put_block(out: &mut Vec<u8>, worker_id: usize, z: f64, block: &Block) {
    out.extend_from_slice(&(worker_id as u64).to_le_bytes());
    out.extend_from_slice(&z.to_le_bytes());
    out.extend_from_slice(&(block.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(block.cols() as u64).to_le_bytes());
    for v in block.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn word(bytes: &[u8], at: usize) -> [u8; 8] {
    bytes[at..at + 8].try_into().expect("length checked")
}

/// Parses the common prefix and returns it with the number of bytes used.
fn take_block(bytes: &[u8]) -> Result<(usize, f64, Block, usize), WireError> {
    if bytes.len() < HEADER {
        return Err(WireError::Truncated {
            needed: HEADER,
            have: bytes.len(),
        });
    }
    let worker_id = u64::from_le_bytes(word(bytes, 0)) as usize;
    let z = f64::from_le_bytes(word(bytes, 8));
    let rows = u64::from_le_bytes(word(bytes, 16)) as usize;
    let cols = u64::from_le_bytes(word(bytes, 24)) as usize;
    let len = rows.checked_mul(cols).ok_or(WireError::Overflow)?;
    let end = len
        .checked_mul(8)
        .and_then(|b| b.checked_add(HEADER))
        .ok_or(WireError::Overflow)?;
    if bytes.len() < end {
        return Err(WireError::Truncated {
            needed: end,
            have: bytes.len(),
        });
    }
    let data = (0..len)
        .map(|i| f64::from_le_bytes(word(bytes, HEADER + 8 * i)))
        .collect();
    let block = Block::from_vec(rows, cols, data).expect("length matches shape");
    Ok((worker_id, z, block, end))
}

pub fn encode_share(share: &Share) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + 8 * share.block.len());
    put_block(&mut out, share.worker_id, share.z, &share.block);
    out
}

pub fn decode_share(bytes: &[u8]) -> Result<Share, WireError> {
    let (worker_id, z, block, used) = take_block(bytes)?;
    if used != bytes.len() {
        return Err(WireError::Trailing(bytes.len() - used));
    }
    Ok(Share { worker_id, z, block })
}

pub fn encode_result(result: &WorkerResult) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + 8 + 8 * result.block.len());
    put_block(&mut out, result.worker_id, result.z, &result.block);
    out.extend_from_slice(&result.arrival_time.to_le_bytes());
    out
}

pub fn decode_result(bytes: &[u8]) -> Result<WorkerResult, WireError> {
    let (worker_id, z, block, used) = take_block(bytes)?;
    if bytes.len() < used + 8 {
        return Err(WireError::Truncated {
            needed: used + 8,
            have: bytes.len(),
        });
    }
    if bytes.len() > used + 8 {
        return Err(WireError::Trailing(bytes.len() - used - 8));
    }
    Ok(WorkerResult {
        worker_id,
        z,
        block,
        arrival_time: f64::from_le_bytes(word(bytes, used)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Share {
        Share {
            worker_id: 3,
            z: -0.5,
            block: Block::from_vec(1, 2, vec![1.0, 2.0]).unwrap(),
        }
    }

    #[test]
    fn golden_share_bytes() {
        let bytes = encode_share(&sample());
        assert_eq!(
            hex::encode(&bytes),
            concat!(
                "0300000000000000",
                "000000000000e0bf",
                "0100000000000000",
                "0200000000000000",
                "000000000000f03f",
                "0000000000000040"
            )
        );
        assert_eq!(decode_share(&bytes).unwrap(), sample());
    }

    #[test]
    fn result_carries_arrival_time() {
        let r = WorkerResult {
            worker_id: 7,
            z: 0.25,
            block: Block::identity(2),
            arrival_time: 1.5,
        };
        let bytes = encode_result(&r);
        assert_eq!(bytes.len(), HEADER + 4 * 8 + 8);
        assert_eq!(decode_result(&bytes).unwrap(), r);
    }

    #[test]
    fn malformed_messages() {
        let bytes = encode_share(&sample());
        assert!(matches!(
            decode_share(&bytes[..40]),
            Err(WireError::Truncated { needed: 48, have: 40 })
        ));
        let mut long = bytes.clone();
        long.push(0);
        assert_eq!(decode_share(&long), Err(WireError::Trailing(1)));
        let mut huge = bytes;
        huge[16..24].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(decode_share(&huge).is_err());
    }
}
