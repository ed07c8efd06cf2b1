//! Decomposable public keys: the key as independently generated blocks.
//!
//! Two strategies. *Bootstrapped*: block `i` is chain block `i` of the key,
//! regenerated from the tape, and assembly is concatenation. *Garbled*:
//! block 0 holds the active input labels of the tape and block `j >= 1` is
//! garbled gate `j - 1` of the KeyGen circuit; assembly evaluates them.

use crate::bits::{self, Bits};
use crate::circuit_ir::{BooleanCircuit, GateKind};
use crate::fhe_core::chain::{self, frame, FRAME_LEN, TAG_BOOTSTRAPPED, TAG_GARBLED};
use crate::fhe_core::circuits::keygen_circuit_with_bounds;
use crate::fhe_core::{FheError, PublicKey, RandomTape};
use crate::garbling::{self, GarbleError, GarbledGate, Label, LABEL_LEN};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Bootstrapped,
    Garbled,
}

impl Strategy {
    fn tag(self) -> u8 {
        match self {
            Strategy::Bootstrapped => TAG_BOOTSTRAPPED,
            Strategy::Garbled => TAG_GARBLED,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("no blocks")]
    Empty,
    #[error("block {got} found where block {expected} belongs")]
    OutOfOrder { expected: usize, got: usize },
    #[error("blocks mix strategies")]
    MixedStrategy,
    #[error("{0} blocks match no key depth")]
    BlockCount(usize),
    #[error("garbled gate {0} carries no decode bit for an output wire")]
    MissingDecode(usize),
    #[error("malformed block {0}")]
    Malformed(usize),
    #[error(transparent)]
    Garble(#[from] GarbleError),
    #[error(transparent)]
    Fhe(#[from] FheError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyBlock {
    pub index: usize,
    pub strategy: Strategy,
    pub body: Vec<u8>,
}

impl KeyBlock {
    /// `index (4, big-endian) || strategy tag (1) || body`.
    pub fn to_bytes(&self) -> Vec<u8> {
        frame(self.index as u32, self.strategy.tag(), &self.body)
    }

    pub fn from_bytes(b: &[u8]) -> Option<KeyBlock> {
        if b.len() < FRAME_LEN {
            return None;
        }
        let strategy = match b[4] {
            TAG_BOOTSTRAPPED => Strategy::Bootstrapped,
            TAG_GARBLED => Strategy::Garbled,
            _ => return None,
        };
        let index = u32::from_be_bytes(b[..4].try_into().unwrap()) as usize;
        Some(KeyBlock { index, strategy, body: b[FRAME_LEN..].to_vec() })
    }
}

/// Number of the last block, `K(lambda, d)`.
pub fn last_block(lambda: usize, d: usize, strategy: Strategy) -> usize {
    match strategy {
        Strategy::Bootstrapped => d,
        Strategy::Garbled => keygen_topology(lambda, d).gates().len(),
    }
}

struct KeygenCache {
    circuit: Arc<BooleanCircuit>,
    bounds: Vec<usize>,
    /// First block at whose depth a wire becomes a key output.
    output_from: HashMap<usize, usize>,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<KeygenCache>>> {
    static C: OnceLock<Mutex<HashMap<usize, Arc<KeygenCache>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// The cached KeyGen circuit for `lambda`, built to at least depth `d`.
fn keygen_cache(lambda: usize, d: usize) -> Arc<KeygenCache> {
    let mut map = cache().lock().unwrap();
    if let Some(c) = map.get(&lambda) {
        if c.bounds.len() > d {
            return c.clone();
        }
    }
    let (circuit, bounds) = keygen_circuit_with_bounds(lambda, d.max(8));
    let mut output_from = HashMap::new();
    let mut at = 0;
    for i in 0..bounds.len() {
        let n = 8 * chain::block_len(lambda, i);
        for &w in &circuit.output_wires()[at..at + n] {
            output_from.entry(w).or_insert(i);
        }
        at += n;
    }
    let c = Arc::new(KeygenCache { circuit: Arc::new(circuit), bounds, output_from });
    map.insert(lambda, c.clone());
    c
}

/// KeyGen circuit topology for depth `d`: a gate-prefix of the cached one.
pub fn keygen_topology(lambda: usize, d: usize) -> BooleanCircuit {
    let c = keygen_cache(lambda, d);
    let full = &c.circuit;
    let gates = c.bounds[d];
    let outputs = 8 * (0..=d).map(|i| chain::block_len(lambda, i)).sum::<usize>();
    BooleanCircuit::new(
        lambda,
        lambda + gates,
        full.gates()[..gates].to_vec(),
        full.output_wires()[..outputs].to_vec(),
    )
    .expect("prefix of a well-formed circuit")
}

/// The cache entry containing gate `j`, and the smallest depth whose
/// KeyGen circuit contains it.
fn depth_of_gate(lambda: usize, j: usize) -> (Arc<KeygenCache>, usize) {
    let mut d = 8;
    loop {
        let c = keygen_cache(lambda, d);
        if let Some(k) = c.bounds.iter().position(|&b| b > j) {
            return (c, k);
        }
        d *= 2;
    }
}

fn garbling_seed(r_prime: &RandomTape) -> Vec<u8> {
    let mut s = vec![r_prime.len() as u8];
    s.extend(bits::to_bytes(r_prime.bits()));
    s
}

/// The decode byte of a garbled block: `0` for none, `2 | permute bit`
/// when the gate's wire is a key output or a constant.
fn decode_byte(present: bool, permute: bool) -> u8 {
    if present {
        2 | permute as u8
    } else {
        0
    }
}

pub fn block_gen(lambda: usize, i: usize, r: &RandomTape, r_prime: &RandomTape, strategy: Strategy) -> KeyBlock {
    assert_eq!(r.len(), lambda, "tape length");
    let body = match strategy {
        Strategy::Bootstrapped => chain::block_body(lambda, r.value(), i),
        Strategy::Garbled => {
            let seed = garbling_seed(r_prime);
            if i == 0 {
                (0..lambda)
                    .flat_map(|w| garbling::wire_labels(&seed, w).get(r.bits()[w]))
                    .collect()
            } else {
                let j = i - 1;
                let (cache, d) = depth_of_gate(lambda, j);
                let g = &cache.circuit.gates()[j];
                let is_out = g.kind.arity() == 0 || cache.output_from.get(&g.output).is_some_and(|&k| k <= d);
                let mut body = garbling::garble_gate(&cache.circuit, j, &seed).expect("gate in range").to_bytes();
                body.push(decode_byte(is_out, garbling::permute_bit(&seed, g.output)));
                body
            }
        }
    };
    KeyBlock { index: i, strategy, body }
}

pub fn key_blocks(lambda: usize, d: usize, r: &RandomTape, r_prime: &RandomTape, strategy: Strategy) -> Vec<KeyBlock> {
    use rayon::prelude::*;
    (0..=last_block(lambda, d, strategy))
        .into_par_iter()
        .map(|i| block_gen(lambda, i, r, r_prime, strategy))
        .collect()
}

fn check_order(blocks: &[KeyBlock]) -> Result<Strategy, DecomposeError> {
    let strategy = blocks.first().ok_or(DecomposeError::Empty)?.strategy;
    for (k, b) in blocks.iter().enumerate() {
        if b.index != k {
            return Err(DecomposeError::OutOfOrder { expected: k, got: b.index });
        }
        if b.strategy != strategy {
            return Err(DecomposeError::MixedStrategy);
        }
    }
    Ok(strategy)
}

pub fn assemble(lambda: usize, blocks: &[KeyBlock]) -> Result<PublicKey, DecomposeError> {
    match check_order(blocks)? {
        Strategy::Bootstrapped => {
            let bytes = blocks.iter().flat_map(KeyBlock::to_bytes).collect();
            Ok(PublicKey::from_bytes(lambda, bytes)?)
        }
        Strategy::Garbled => assemble_garbled(lambda, blocks),
    }
}

fn garbled_depth(lambda: usize, gates: usize) -> Option<usize> {
    let mut d = 8;
    loop {
        let c = keygen_cache(lambda, d);
        if let Some(k) = c.bounds.iter().position(|&b| b >= gates) {
            return (c.bounds[k] == gates).then_some(k);
        }
        d *= 2;
    }
}

fn assemble_garbled(lambda: usize, blocks: &[KeyBlock]) -> Result<PublicKey, DecomposeError> {
    let gates = blocks.len() - 1;
    let d = garbled_depth(lambda, gates).ok_or(DecomposeError::BlockCount(blocks.len()))?;
    let topo = keygen_topology(lambda, d);
    if blocks[0].body.len() != lambda * LABEL_LEN {
        return Err(DecomposeError::Malformed(0));
    }
    let inputs: Vec<Label> = blocks[0].body.chunks(LABEL_LEN).map(|c| c.try_into().unwrap()).collect();
    let mut garbled = Vec::with_capacity(gates);
    let mut decode: HashMap<usize, bool> = HashMap::new();
    for (j, b) in blocks[1..].iter().enumerate() {
        let (last, gate) = b.body.split_last().ok_or(DecomposeError::Malformed(j + 1))?;
        let gg = GarbledGate::from_bytes(gate).map_err(|_| DecomposeError::Malformed(j + 1))?;
        if *last & 2 != 0 {
            decode.insert(topo.gates()[j].output, *last & 1 == 1);
        }
        garbled.push(gg);
    }
    let labels = garbling::evaluate_gates(&topo, &garbled, &inputs)?;
    let pk_bits: Bits = topo
        .output_wires()
        .iter()
        .zip(&labels)
        .map(|(w, l)| {
            let p = decode.get(w).ok_or(DecomposeError::MissingDecode(w - lambda))?;
            Ok(garbling::colour(l) ^ p)
        })
        .collect::<Result<_, DecomposeError>>()?;
    Ok(PublicKey::from_bytes(lambda, bits::to_bytes(&pk_bits))?)
}

/// Block simulator: from the public key alone. `seed` plays the role of the
/// simulator's randomness and is used only by the garbled strategy.
pub fn sim_blocks(lambda: usize, pk: &PublicKey, strategy: Strategy, seed: &[u8]) -> Result<Vec<KeyBlock>, DecomposeError> {
    let d = pk.params().depth;
    if pk.params().lambda != lambda {
        return Err(DecomposeError::Fhe(FheError::Malformed("lambda mismatch".into())));
    }
    match strategy {
        Strategy::Bootstrapped => {
            let mut at = 0;
            (0..=d)
                .map(|i| {
                    let len = chain::block_len(lambda, i);
                    let b = KeyBlock::from_bytes(&pk.bytes()[at..at + len]).ok_or(DecomposeError::Malformed(i))?;
                    at += len;
                    if b.index != i {
                        return Err(DecomposeError::Malformed(i));
                    }
                    Ok(b)
                })
                .collect()
        }
        Strategy::Garbled => {
            let topo = keygen_topology(lambda, d);
            let (gc, inputs) = garbling::simulate(&topo, &bits::from_bytes(pk.bytes()), seed);
            let mut decode: HashMap<usize, bool> =
                topo.output_wires().iter().copied().zip(gc.decode.iter().copied()).collect();
            for (g, gg) in topo.gates().iter().zip(&gc.gates) {
                if g.kind.arity() == 0 {
                    let active: Label = gg.rows[0][..LABEL_LEN].try_into().unwrap();
                    decode.insert(g.output, garbling::colour(&active) ^ (g.kind == GateKind::Const1));
                }
            }
            let mut blocks = vec![KeyBlock { index: 0, strategy, body: inputs.concat() }];
            for (j, (g, gg)) in topo.gates().iter().zip(&gc.gates).enumerate() {
                let mut body = gg.to_bytes();
                let p = decode.get(&g.output);
                body.push(decode_byte(p.is_some(), p.copied().unwrap_or(false)));
                blocks.push(KeyBlock { index: j + 1, strategy, body });
            }
            Ok(blocks)
        }
    }
}
