//! Boolean-circuit forms of key generation.
//!
//! [`keygen_circuit`] computes the full chain public key from the tape; it
//! is what the garbled decomposition garbles. [`chain_block_bits`] computes
//! one framed block and works with either the tape or the index supplied as
//! circuit wires.

use super::seal::{self, DOM_NONCE, DOM_SALT, DOM_SK, SEAL_KEY};
use crate::circuit_ir::builder::{Bit, CircuitBuilder};
use crate::circuit_ir::BooleanCircuit;
use crate::prf::{simon_encrypt_circuit, simon_schedule_circuit};

fn const_bits(v: u64, n: usize) -> Vec<Bit> {
    (0..n).map(|j| Bit::Const(v >> j & 1 == 1)).collect()
}

/// 32 bits, least significant first, to 4 bytes big-endian, each byte
/// most significant bit first.
fn be_bytes(v: &[Bit]) -> Vec<Bit> {
    v.iter().rev().copied().collect()
}

/// Simon schedule of the tape PRF key; `tape` holds `lambda` bits.
pub fn tape_schedule(b: &mut CircuitBuilder, lambda: usize, tape: &[Bit]) -> Vec<Bit> {
    assert_eq!(tape.len(), lambda);
    let mut key = tape.to_vec();
    key.extend(const_bits(seal::tape_key(lambda, 0) >> lambda, 64 - lambda));
    simon_schedule_circuit(b, &key)
}

/// `domain << 24 | low`, `low` at most 24 bits.
fn domain_word(domain: u32, low: &[Bit]) -> Vec<Bit> {
    let mut w = low.to_vec();
    w.resize(24, Bit::ZERO);
    w.extend(const_bits(domain as u64, 8));
    w
}

fn sub_secret_bits(b: &mut CircuitBuilder, lambda: usize, sched: &[Bit], index: &[Bit]) -> Vec<Bit> {
    let out = simon_encrypt_circuit(b, sched, &domain_word(DOM_SK, index));
    out[..lambda].to_vec()
}

/// Framed chain block `i` (`index`, 24 bits least significant first);
/// `prev_index` is `i - 1` and is read only when `bridge` is set.
pub fn chain_block_bits(
    b: &mut CircuitBuilder,
    lambda: usize,
    sched: &[Bit],
    index: &[Bit],
    prev_index: &[Bit],
    bridge: bool,
) -> Vec<Bit> {
    assert_eq!(index.len(), 24);
    let mut out = Vec::new();
    let mut idx32 = index.to_vec();
    idx32.resize(32, Bit::ZERO);
    out.extend(be_bytes(&idx32));
    out.extend(const_bits(0, 8));

    let sk = sub_secret_bits(b, lambda, sched, index);
    let salt = simon_encrypt_circuit(b, sched, &domain_word(DOM_SALT, index));
    let seal_sched = simon_schedule_circuit(b, &const_bits(SEAL_KEY, 64));
    let seal_mask = simon_encrypt_circuit(b, &seal_sched, &salt);
    let mut masked: Vec<Bit> = (0..lambda).map(|j| b.xor(sk[j], seal_mask[j])).collect();
    masked.resize(32, Bit::ZERO);
    out.extend(be_bytes(&salt));
    out.extend(be_bytes(&masked));

    if bridge {
        let prev = sub_secret_bits(b, lambda, sched, prev_index);
        let mut tag_key = const_bits(seal::tag_key(0, 0), 64);
        for j in 0..lambda {
            tag_key[j] = b.xor(tag_key[j], sk[j]);
        }
        let tag_sched = simon_schedule_circuit(b, &tag_key);
        for (j, &p) in prev.iter().enumerate() {
            let mut low = const_bits(j as u64, 8);
            low.extend_from_slice(&index[..16]);
            let nonce = simon_encrypt_circuit(b, sched, &domain_word(DOM_NONCE, &low));
            let mut m = nonce.clone();
            m[31] = b.xor(m[31], p);
            let t = simon_encrypt_circuit(b, &tag_sched, &m);
            out.extend(be_bytes(&nonce));
            out.extend(be_bytes(&t));
        }
    }
    out
}

/// The chain KeyGen as a circuit: `lambda` tape bits in, the public key's
/// bytes out (most significant bit first). Gates are emitted block by block,
/// so the circuit for depth `d` is a gate-prefix of the one for `d + 1`.
pub fn keygen_circuit(lambda: usize, depth: usize) -> BooleanCircuit {
    keygen_circuit_with_bounds(lambda, depth).0
}

/// Also returns, per block, the gate count once that block is emitted.
pub fn keygen_circuit_with_bounds(lambda: usize, depth: usize) -> (BooleanCircuit, Vec<usize>) {
    let mut bounds = Vec::with_capacity(depth + 1);
    let mut b = CircuitBuilder::with_leading_consts(lambda);
    let tape = b.inputs();
    let sched = tape_schedule(&mut b, lambda, &tape);
    let mut outs = Vec::new();
    for i in 0..=depth {
        let idx = const_bits(i as u64, 24);
        let prev = const_bits(i.saturating_sub(1) as u64, 24);
        outs.extend(chain_block_bits(&mut b, lambda, &sched, &idx, &prev, i > 0));
        bounds.push(b.gate_count());
    }
    (b.finish(&outs), bounds)
}
