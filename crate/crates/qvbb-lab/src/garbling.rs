//! Point-and-permute garbled circuits.
//!
//! Labels are 128 bits. The least significant bit of a label is its colour:
//! `colour(label_v) = v ⊕ permute(w)`. A two-input gate has four rows stored
//! in colour order `2·ca + cb`; one-input gates have two rows, constant gates
//! one. Each row is `(output label || 0x00) ⊕ pad`, with
//! `pad = SHA-256(key = seed-free, "gc-row", in labels || gate index || row)[..17]`,
//! and the trailing zero byte lets the evaluator detect a wrong row.

use crate::circuit_ir::{BooleanCircuit, Gate, GateKind};
use crate::prf::expand;
use rand::{Rng, RngCore};
use thiserror::Error;

pub const LABEL_LEN: usize = 16;
pub const ROW_LEN: usize = LABEL_LEN + 1;

pub type Label = [u8; LABEL_LEN];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GarbleError {
    #[error("gate index {index} out of range ({count} gates)")]
    OutOfRange { index: usize, count: usize },
    #[error("row check failed at gate {0}")]
    InactiveLabel(usize),
    #[error("expected {expected} input labels, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("malformed garbled gate")]
    Malformed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WireLabels {
    pub label0: Label,
    pub label1: Label,
}

impl WireLabels {
    pub fn permute_bit(&self) -> bool {
        colour(&self.label0)
    }
    pub fn get(&self, v: bool) -> Label {
        if v {
            self.label1
        } else {
            self.label0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GarbledGate {
    pub index: usize,
    pub rows: Vec<[u8; ROW_LEN]>,
}

impl GarbledGate {
    /// `index (4, big-endian) || row count (1) || rows`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(5 + ROW_LEN * self.rows.len());
        v.extend_from_slice(&(self.index as u32).to_be_bytes());
        v.push(self.rows.len() as u8);
        for r in &self.rows {
            v.extend_from_slice(r);
        }
        v
    }

    pub fn from_bytes(b: &[u8]) -> Result<GarbledGate, GarbleError> {
        if b.len() < 5 || b.len() != 5 + ROW_LEN * b[4] as usize {
            return Err(GarbleError::Malformed);
        }
        let index = u32::from_be_bytes(b[..4].try_into().unwrap()) as usize;
        let rows = b[5..].chunks(ROW_LEN).map(|r| r.try_into().unwrap()).collect();
        Ok(GarbledGate { index, rows })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GarbledCircuit {
    pub topology: BooleanCircuit,
    pub gates: Vec<GarbledGate>,
    pub encode: Vec<WireLabels>,
    /// Permute bit of each output wire.
    pub decode: Vec<bool>,
}

pub fn colour(l: &Label) -> bool {
    l[LABEL_LEN - 1] & 1 == 1
}

pub fn rows_for(kind: GateKind) -> usize {
    match kind.arity() {
        0 => 1,
        1 => 2,
        _ => 4,
    }
}

pub fn permute_bit(seed: &[u8], wire: usize) -> bool {
    expand(seed, "gc-permute", &(wire as u64).to_be_bytes(), 1)[0] & 1 == 1
}

pub fn wire_labels(seed: &[u8], wire: usize) -> WireLabels {
    let p = permute_bit(seed, wire);
    let raw = expand(seed, "gc-label", &(wire as u64).to_be_bytes(), 2 * LABEL_LEN);
    let mut label0: Label = raw[..LABEL_LEN].try_into().unwrap();
    let mut label1: Label = raw[LABEL_LEN..].try_into().unwrap();
    label0[LABEL_LEN - 1] = (label0[LABEL_LEN - 1] & !1) | p as u8;
    label1[LABEL_LEN - 1] = (label1[LABEL_LEN - 1] & !1) | !p as u8;
    WireLabels { label0, label1 }
}

fn pad(ins: &[&Label], index: usize, row: usize) -> [u8; ROW_LEN] {
    let mut input = Vec::with_capacity(2 * LABEL_LEN + 9);
    for l in ins {
        input.extend_from_slice(&l[..]);
    }
    input.extend_from_slice(&(index as u64).to_be_bytes());
    input.push(row as u8);
    expand(&[], "gc-row", &input, ROW_LEN).try_into().unwrap()
}

fn seal_row(out: &Label, pad: [u8; ROW_LEN]) -> [u8; ROW_LEN] {
    let mut r = pad;
    for (x, y) in r.iter_mut().zip(out) {
        *x ^= y;
    }
    r
}

fn garble_with(g: &Gate, index: usize, labels: &mut impl FnMut(usize) -> WireLabels) -> GarbledGate {
    let out = labels(g.output);
    let rows = match g.kind.arity() {
        0 => vec![seal_row(&out.get(g.kind.apply(false, false)), [0; ROW_LEN])],
        1 => {
            let a = labels(g.inputs[0]);
            (0..2)
                .map(|ca| {
                    let va = (ca == 1) ^ a.permute_bit();
                    let la = a.get(va);
                    seal_row(&out.get(g.kind.apply(va, false)), pad(&[&la], index, ca))
                })
                .collect()
        }
        _ => {
            let a = labels(g.inputs[0]);
            let b = labels(g.inputs[1]);
            (0..4)
                .map(|r| {
                    let va = (r >> 1 == 1) ^ a.permute_bit();
                    let vb = (r & 1 == 1) ^ b.permute_bit();
                    let (la, lb) = (a.get(va), b.get(vb));
                    seal_row(&out.get(g.kind.apply(va, vb)), pad(&[&la, &lb], index, r))
                })
                .collect()
        }
    };
    GarbledGate { index, rows }
}

/// Garbles a single gate; reads only the seed, the index and the gate's wires.
pub fn garble_gate(c: &BooleanCircuit, i: usize, seed: &[u8]) -> Result<GarbledGate, GarbleError> {
    let g = c.gates().get(i).ok_or(GarbleError::OutOfRange { index: i, count: c.gates().len() })?;
    Ok(garble_with(g, i, &mut |w| wire_labels(seed, w)))
}

pub fn garble(c: &BooleanCircuit, seed: &[u8]) -> GarbledCircuit {
    let labels: Vec<WireLabels> = (0..c.n_wires()).map(|w| wire_labels(seed, w)).collect();
    let gates = c
        .gates()
        .iter()
        .enumerate()
        .map(|(i, g)| garble_with(g, i, &mut |w| labels[w]))
        .collect();
    GarbledCircuit {
        topology: c.clone(),
        gates,
        encode: labels[..c.n_inputs()].to_vec(),
        decode: c.output_wires().iter().map(|&w| labels[w].permute_bit()).collect(),
    }
}

pub fn encode(gc: &GarbledCircuit, x: &[bool]) -> Vec<Label> {
    gc.encode.iter().zip(x).map(|(l, &v)| l.get(v)).collect()
}

/// Runs the garbled gates on active input labels; returns active output labels.
pub fn evaluate_gates(
    topology: &BooleanCircuit,
    gates: &[GarbledGate],
    inputs: &[Label],
) -> Result<Vec<Label>, GarbleError> {
    if inputs.len() != topology.n_inputs() {
        return Err(GarbleError::Arity { expected: topology.n_inputs(), got: inputs.len() });
    }
    let mut active = vec![[0u8; LABEL_LEN]; topology.n_wires()];
    active[..inputs.len()].copy_from_slice(inputs);
    for (i, (g, gg)) in topology.gates().iter().zip(gates).enumerate() {
        if gg.rows.len() != rows_for(g.kind) {
            return Err(GarbleError::Malformed);
        }
        let (row, p) = match g.kind.arity() {
            0 => (0, [0; ROW_LEN]),
            1 => {
                let la = &active[g.inputs[0]];
                let r = colour(la) as usize;
                (r, pad(&[la], i, r))
            }
            _ => {
                let (la, lb) = (&active[g.inputs[0]], &active[g.inputs[1]]);
                let r = 2 * colour(la) as usize + colour(lb) as usize;
                (r, pad(&[la, lb], i, r))
            }
        };
        let plain = seal_row(&gg.rows[row][..LABEL_LEN].try_into().unwrap(), p);
        if gg.rows[row][LABEL_LEN] != p[LABEL_LEN] {
            return Err(GarbleError::InactiveLabel(i));
        }
        active[g.output] = plain[..LABEL_LEN].try_into().unwrap();
    }
    Ok(topology.output_wires().iter().map(|&w| active[w]).collect())
}

pub fn evaluate(gc: &GarbledCircuit, inputs: &[Label]) -> Result<Vec<Label>, GarbleError> {
    evaluate_gates(&gc.topology, &gc.gates, inputs)
}

pub fn decode(gc: &GarbledCircuit, outputs: &[Label]) -> Vec<bool> {
    outputs.iter().zip(&gc.decode).map(|(l, &p)| colour(l) ^ p).collect()
}

/// Privacy simulator: builds a garbling of `topology` from the output alone.
/// Returns the circuit and the single encoded input it is meant to run on.
pub fn simulate(topology: &BooleanCircuit, output: &[bool], seed: &[u8]) -> (GarbledCircuit, Vec<Label>) {
    assert_eq!(output.len(), topology.output_wires().len(), "output length");
    let mut rng = crate::prf::rng(seed, "gc-simulate", &[]);
    let random_label = |rng: &mut rand_chacha::ChaCha20Rng| {
        let mut l = [0u8; LABEL_LEN];
        rng.fill_bytes(&mut l);
        l
    };
    let mut active: Vec<Label> = (0..topology.n_wires()).map(|_| random_label(&mut rng)).collect();
    let mut gates = Vec::with_capacity(topology.gates().len());
    for (i, g) in topology.gates().iter().enumerate() {
        let out = active[g.output];
        let rows = match g.kind.arity() {
            0 => vec![seal_row(&out, [0; ROW_LEN])],
            1 => {
                let la = active[g.inputs[0]];
                let live = colour(&la) as usize;
                (0..2)
                    .map(|r| if r == live { seal_row(&out, pad(&[&la], i, r)) } else { random_row(&mut rng) })
                    .collect()
            }
            _ => {
                let (la, lb) = (active[g.inputs[0]], active[g.inputs[1]]);
                let live = 2 * colour(&la) as usize + colour(&lb) as usize;
                (0..4)
                    .map(|r| if r == live { seal_row(&out, pad(&[&la, &lb], i, r)) } else { random_row(&mut rng) })
                    .collect()
            }
        };
        gates.push(GarbledGate { index: i, rows });
    }
    let decode = topology
        .output_wires()
        .iter()
        .zip(output)
        .map(|(&w, &y)| colour(&active[w]) ^ y)
        .collect();
    let inputs: Vec<Label> = active[..topology.n_inputs()].to_vec();
    let encode = inputs
        .iter()
        .map(|&l| {
            let mut other = random_label(&mut rng);
            other[LABEL_LEN - 1] = (other[LABEL_LEN - 1] & !1) | !colour(&l) as u8;
            WireLabels { label0: l, label1: other }
        })
        .collect();
    active.clear();
    (GarbledCircuit { topology: topology.clone(), gates, encode, decode }, inputs)
}

fn random_row(rng: &mut impl Rng) -> [u8; ROW_LEN] {
    let mut r = [0u8; ROW_LEN];
    rng.fill_bytes(&mut r);
    r
}
