//! The universal interpreter `J`.
//!
//! `desc` holds `g_max` gate records `kind(3) ‖ in1(a) ‖ in2(a)` followed by
//! `n_out` output addresses, every field least significant bit first. Wire
//! `w < n_in` is input bit `w`; wire `n_in + g` is gate slot `g`. `J` runs
//! `sweeps` synchronous rounds: every slot starts at 0 and each round
//! recomputes all slots from the previous round's values. A topologically
//! ordered netlist of depth at most `sweeps` has settled by the end.
//! Addresses past the last wire read 0; kind codes 3, 6 and 7 are constant 0.

use super::CandidateError;
use crate::bits::{self, Bits};
use crate::circuit_ir::builder::{Bit, CircuitBuilder};
use crate::circuit_ir::{BooleanCircuit, GateKind};
use crate::qfhe::ClassicalProgram;
use serde::{Deserialize, Serialize};

pub const SWEEPS: usize = 16;
const KIND_BITS: usize = 3;
/// Wire capacity per input or output bit, before rounding up to a power of 2.
const IO_FACTOR: usize = 6;
const MATERIALIZE_LIMIT: usize = 4_000_000;

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InterpreterShape {
    pub n_in: usize,
    pub n_out: usize,
    pub g_max: usize,
    pub sweeps: usize,
}

impl InterpreterShape {
    /// The public shape for a width pair.
    pub fn for_io(n_in: usize, n_out: usize) -> InterpreterShape {
        let cap = (IO_FACTOR * (n_in + n_out)).max(8).next_power_of_two();
        InterpreterShape { n_in, n_out, g_max: cap - n_in, sweeps: SWEEPS }
    }

    pub fn wires(&self) -> usize {
        self.n_in + self.g_max
    }

    pub fn addr_bits(&self) -> usize {
        ceil_log2(self.wires()).max(1)
    }

    pub fn record_bits(&self) -> usize {
        KIND_BITS + 2 * self.addr_bits()
    }

    pub fn desc_len(&self) -> usize {
        self.g_max * self.record_bits() + self.n_out * self.addr_bits()
    }

    /// Toffoli depth of `J`: address decoding, three per sweep, output select.
    pub fn q(&self) -> usize {
        ceil_log2(self.addr_bits()) + 3 * self.sweeps + 1
    }

    /// Positions of desc that a circuit with `n_gates` gates actually uses.
    pub fn used_positions(&self, n_gates: usize) -> Vec<usize> {
        let rec = self.record_bits();
        (0..n_gates * rec).chain(self.g_max * rec..self.desc_len()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Record {
    pub kind: u8,
    pub in1: usize,
    pub in2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Desc {
    pub records: Vec<Record>,
    pub outputs: Vec<usize>,
}

const CONST0: u8 = 3;

fn kind_code(k: GateKind) -> u8 {
    match k {
        GateKind::And => 0,
        GateKind::Xor => 1,
        GateKind::Not => 2,
        GateKind::Const0 => CONST0,
        GateKind::Const1 => 4,
        GateKind::Copy => 5,
    }
}

fn apply(kind: u8, x: bool, y: bool) -> bool {
    match kind {
        0 => x & y,
        1 => x ^ y,
        2 => !x,
        4 => true,
        5 => x,
        _ => false,
    }
}

pub fn encode_desc(shape: &InterpreterShape, c: &BooleanCircuit) -> Result<Bits, CandidateError> {
    let unsupported = |m: String| Err(CandidateError::Unsupported(m));
    if (c.n_inputs(), c.n_outputs()) != (shape.n_in, shape.n_out) {
        return unsupported(format!("widths {}/{} for a {}/{} interpreter", c.n_inputs(), c.n_outputs(), shape.n_in, shape.n_out));
    }
    if c.gates().len() > shape.g_max {
        return unsupported(format!("{} gates, capacity {}", c.gates().len(), shape.g_max));
    }
    if c.depth() > shape.sweeps {
        return unsupported(format!("depth {}, capacity {}", c.depth(), shape.sweeps));
    }
    let mut slot: Vec<usize> = (0..c.n_wires()).collect();
    for (g, gate) in c.gates().iter().enumerate() {
        slot[gate.output] = shape.n_in + g;
    }
    let a = shape.addr_bits();
    let mut v = Vec::with_capacity(shape.desc_len());
    for g in 0..shape.g_max {
        let (kind, i1, i2) = match c.gates().get(g) {
            Some(gate) => {
                let ins = gate.used_inputs();
                let i1 = ins.first().map(|&w| slot[w]).unwrap_or(0);
                let i2 = ins.get(1).map(|&w| slot[w]).unwrap_or(0);
                (kind_code(gate.kind), i1, i2)
            }
            None => (CONST0, 0, 0),
        };
        v.extend(bits::from_u64(kind as u64, KIND_BITS));
        v.extend(bits::from_u64(i1 as u64, a));
        v.extend(bits::from_u64(i2 as u64, a));
    }
    for &w in c.output_wires() {
        v.extend(bits::from_u64(slot[w] as u64, a));
    }
    Ok(v)
}

pub fn decode_desc(shape: &InterpreterShape, desc: &[bool]) -> Desc {
    assert_eq!(desc.len(), shape.desc_len(), "desc width");
    let a = shape.addr_bits();
    let rec = shape.record_bits();
    let field = |at: usize, len: usize| bits::to_u64(&desc[at..at + len]) as usize;
    let records = (0..shape.g_max)
        .map(|g| {
            let at = g * rec;
            Record { kind: field(at, KIND_BITS) as u8, in1: field(at + KIND_BITS, a), in2: field(at + KIND_BITS + a, a) }
        })
        .collect();
    let base = shape.g_max * rec;
    let outputs = (0..shape.n_out).map(|o| field(base + o * a, a)).collect();
    Desc { records, outputs }
}

/// `J` on one basis input, evaluated directly.
pub fn jacobi_eval(shape: &InterpreterShape, desc: &[bool], x: &[bool]) -> Bits {
    assert_eq!(x.len(), shape.n_in, "input width");
    let d = decode_desc(shape, desc);
    let w = shape.wires();
    // slot `w` stays 0 and stands in for every out-of-range address
    let clamp = |a: usize| a.min(w);
    let recs: Vec<(u8, usize, usize)> = d.records.iter().map(|r| (r.kind, clamp(r.in1), clamp(r.in2))).collect();
    let mut cur = vec![0u8; w + 1];
    x.iter().enumerate().for_each(|(i, &v)| cur[i] = v as u8);
    let mut next = cur.clone();
    for _ in 0..shape.sweeps {
        for (g, &(kind, i1, i2)) in recs.iter().enumerate() {
            next[shape.n_in + g] = apply(kind, cur[i1] == 1, cur[i2] == 1) as u8;
        }
        std::mem::swap(&mut cur, &mut next);
        // a sweep that changes nothing has reached the fixed point
        if cur == next {
            break;
        }
    }
    d.outputs.iter().map(|&o| cur[clamp(o)] == 1).collect()
}

/// The public interpreter for one shape. Its input register is
/// `desc ‖ x`; its output register is `C(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpreter {
    shape: InterpreterShape,
}

impl Interpreter {
    pub fn new(shape: InterpreterShape) -> Interpreter {
        Interpreter { shape }
    }

    pub fn shape(&self) -> &InterpreterShape {
        &self.shape
    }

    pub fn q(&self) -> usize {
        self.shape.q()
    }

    /// `J` as a gate-level circuit, for shapes small enough to build.
    pub fn materialize(&self) -> Result<BooleanCircuit, CandidateError> {
        let s = self.shape;
        let (a, w, m) = (s.addr_bits(), s.wires(), s.desc_len());
        let estimate = 2 * s.g_max * w * a + s.sweeps * s.g_max * (4 * w + 8) + s.n_out * w * (a + 2);
        if estimate > MATERIALIZE_LIMIT {
            return Err(CandidateError::TooLarge(estimate));
        }
        let mut b = CircuitBuilder::new(m + s.n_in);
        let ins = b.inputs();
        let (desc, x) = ins.split_at(m);
        let rec = s.record_bits();

        let one_hot = |b: &mut CircuitBuilder, field: &[Bit], count: usize| -> Vec<Bit> {
            let neg: Vec<Bit> = field.iter().map(|&f| b.not(f)).collect();
            (0..count)
                .map(|v| {
                    let lits: Vec<Bit> = (0..field.len()).map(|k| if v >> k & 1 == 1 { field[k] } else { neg[k] }).collect();
                    b.and_all(&lits)
                })
                .collect()
        };
        let mut kinds = Vec::with_capacity(s.g_max);
        let mut sel = Vec::with_capacity(s.g_max);
        for g in 0..s.g_max {
            let at = g * rec;
            kinds.push(one_hot(&mut b, &desc[at..at + KIND_BITS], 6));
            let s1 = one_hot(&mut b, &desc[at + KIND_BITS..at + KIND_BITS + a], w);
            let s2 = one_hot(&mut b, &desc[at + KIND_BITS + a..at + rec], w);
            sel.push((s1, s2));
        }
        let base = s.g_max * rec;
        let out_sel: Vec<Vec<Bit>> = (0..s.n_out).map(|o| one_hot(&mut b, &desc[base + o * a..base + (o + 1) * a], w)).collect();

        let pick = |b: &mut CircuitBuilder, sel: &[Bit], val: &[Bit]| -> Bit {
            let terms: Vec<Bit> = sel.iter().zip(val).map(|(&s, &v)| b.and(s, v)).collect();
            b.xor_all(&terms)
        };
        let mut val: Vec<Bit> = x.to_vec();
        val.resize(w, Bit::ZERO);
        for _ in 0..s.sweeps {
            let mut next = x.to_vec();
            for g in 0..s.g_max {
                let v1 = pick(&mut b, &sel[g].0, &val);
                let v2 = pick(&mut b, &sel[g].1, &val);
                let k = &kinds[g];
                let and = b.and(v1, v2);
                let xor = b.xor(v1, v2);
                let not = b.not(v1);
                let terms = [b.and(k[0], and), b.and(k[1], xor), b.and(k[2], not), k[4], b.and(k[5], v1)];
                next.push(b.xor_all(&terms));
            }
            val = next;
        }
        let outs: Vec<Bit> = out_sel.iter().map(|os| pick(&mut b, os, &val)).collect();
        Ok(b.finish(&outs))
    }
}

impl ClassicalProgram for Interpreter {
    fn n_inputs(&self) -> usize {
        self.shape.desc_len() + self.shape.n_in
    }
    fn n_outputs(&self) -> usize {
        self.shape.n_out
    }
    fn sealed_depth(&self) -> usize {
        self.shape.q()
    }
    fn run(&self, input: &[bool]) -> Bits {
        let (desc, x) = input.split_at(self.shape.desc_len());
        jacobi_eval(&self.shape, desc, x)
    }
}
