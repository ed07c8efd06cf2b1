//! Bootstrapped-chain layout of the public key.
//!
//! `pk = block_0 || block_1 || ... || block_d`, each block framed as
//! `index (4, big-endian) || strategy tag (1) || body`. Block 0's body is the
//! sub-public-key `pk_0`; block `i >= 1` carries `pk_i` followed by the
//! `lambda` bridge payloads encrypting `sk_{i-1}` under `sk_i` at level 0.

use super::{key_id, seal, Ciphertext, FheError, FheParams, KeyPair, PublicKey, SecretKey};

pub const SUB_PK_LEN: usize = 8;
pub const BRIDGE_LEN_PER_BIT: usize = 8;
pub const FRAME_LEN: usize = 5;
pub const TAG_BOOTSTRAPPED: u8 = 0;
pub const TAG_GARBLED: u8 = 1;

pub fn frame(index: u32, tag: u8, body: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(FRAME_LEN + body.len());
    v.extend_from_slice(&index.to_be_bytes());
    v.push(tag);
    v.extend_from_slice(body);
    v
}

pub fn block_len(lambda: usize, i: usize) -> usize {
    if i == 0 {
        FRAME_LEN + SUB_PK_LEN
    } else {
        FRAME_LEN + SUB_PK_LEN + BRIDGE_LEN_PER_BIT * lambda
    }
}

fn block_offset(lambda: usize, i: usize) -> usize {
    if i == 0 {
        0
    } else {
        block_len(lambda, 0) + (i - 1) * block_len(lambda, 1)
    }
}

pub fn depth_from_len(lambda: usize, len: usize) -> Option<usize> {
    let first = block_len(lambda, 0);
    let rest = len.checked_sub(first)?;
    (rest % block_len(lambda, 1) == 0).then_some(rest / block_len(lambda, 1))
}

/// Body of bootstrapped block `i`, regenerated from the tape alone.
pub fn block_body(lambda: usize, tape: u64, i: usize) -> Vec<u8> {
    let i32_ = i as u32;
    let mut body = seal::sub_public(lambda, tape, i32_).to_vec();
    if i > 0 {
        let sk = seal::sub_secret(lambda, tape, i32_);
        let prev = seal::sub_secret(lambda, tape, i32_ - 1);
        for j in 0..lambda {
            let nonce = seal::bridge_nonce(lambda, tape, i32_, j as u32);
            let t = seal::tag(sk, 0, nonce, prev >> j & 1 == 1);
            body.extend_from_slice(&nonce.to_be_bytes());
            body.extend_from_slice(&t.to_be_bytes());
        }
    }
    body
}

pub fn block_bytes(lambda: usize, tape: u64, i: usize) -> Vec<u8> {
    frame(i as u32, TAG_BOOTSTRAPPED, &block_body(lambda, tape, i))
}

pub(crate) fn chain_keygen(params: FheParams, tape: u64) -> KeyPair {
    let lambda = params.lambda;
    let bytes: Vec<u8> = (0..=params.depth).flat_map(|i| block_bytes(lambda, tape, i)).collect();
    let top = seal::sub_public(lambda, tape, params.depth as u32);
    let sk = SecretKey::new(lambda, seal::sub_secret(lambda, tape, params.depth as u32), key_id(&top));
    KeyPair { pk: PublicKey { params, bytes }, sk }
}

pub(crate) fn validate(lambda: usize, bytes: &[u8]) -> Result<(), FheError> {
    let depth = depth_from_len(lambda, bytes.len()).ok_or_else(|| FheError::Malformed("length".into()))?;
    for i in 0..=depth {
        let at = block_offset(lambda, i);
        let index = u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap());
        if index as usize != i || bytes[at + 4] != TAG_BOOTSTRAPPED {
            return Err(FheError::Malformed(format!("block {i} framing")));
        }
    }
    Ok(())
}

pub(crate) fn sub_public_at(lambda: usize, bytes: &[u8], i: usize) -> [u8; 8] {
    let at = block_offset(lambda, i) + FRAME_LEN;
    bytes[at..at + SUB_PK_LEN].try_into().unwrap()
}

pub(crate) fn bridge_at(lambda: usize, bytes: &[u8], i: usize) -> Vec<Ciphertext> {
    assert!(i >= 1, "block 0 has no bridge");
    let kid = key_id(&sub_public_at(lambda, bytes, i));
    let at = block_offset(lambda, i) + FRAME_LEN + SUB_PK_LEN;
    bytes[at..at + BRIDGE_LEN_PER_BIT * lambda]
        .chunks(BRIDGE_LEN_PER_BIT)
        .map(|p| Ciphertext {
            key_id: kid,
            level: 0,
            nonce: u32::from_be_bytes(p[..4].try_into().unwrap()),
            tag: u32::from_be_bytes(p[4..].try_into().unwrap()),
        })
        .collect()
}

/// Sub-secret-key `i` of the chain for a tape, as a standalone key.
pub fn sub_secret_key(lambda: usize, tape: u64, i: usize) -> SecretKey {
    let pk_i = seal::sub_public(lambda, tape, i as u32);
    SecretKey::new(lambda, seal::sub_secret(lambda, tape, i as u32), key_id(&pk_i))
}
