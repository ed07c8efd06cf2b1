//! The circuit families the attacks tell apart.
//!
//! With auxiliary input: `MBPF_{α→β}` or the zero function on `λ` bits,
//! paired with `(pk, Enc(α), O(CC[Dec_sk, β]))`.
//!
//! Without: a member takes a choice value `b` (two bits, least significant
//! first) and `x` (`λ` bits) and outputs a `⊥` flag followed by a payload:
//! * `b = 0`: the baked `(Enc(α), o)` bytes, whatever `x` is;
//! * `b = 1`: key block `x` of a depth-`d` key when `x ≤ d`, else `⊥`;
//! * `b = 2`: `MBPF_{α→β}(x)` for POINT members, `0^λ` for ZERO members;
//! * `b = 3`: `⊥`.
//!
//! `⊥` is the flag bit set and an all-ones payload.

use crate::bits::{self, Bits};
use crate::cc_obf::{obf_cc, Capability, CcObfuscation};
use crate::circuit_ir::builder::{Bit, CircuitBuilder};
use crate::circuit_ir::{build_function, BooleanCircuit, CircuitError, FunctionSpec};
use crate::fhe_core::chain::{block_bytes, block_len};
use crate::fhe_core::circuits::{chain_block_bits, tape_schedule};
use crate::fhe_core::{enc, keygen, serialize_cts, Ciphertext, FheParams, PublicKey, RandomTape, SecretKey, CIPHERTEXT_LEN};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberKind {
    Point,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockPath {
    /// Precomputed block table, looked up by index.
    Table,
    /// Key blocks computed in-circuit from the baked tapes.
    Circuit,
}

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("malformed member header")]
    Header,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("malformed aux bytes")]
    Aux,
}

/// `(Enc(α), o)`: the part of the auxiliary information a member bakes in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberAux {
    pub alpha_ct: Vec<Ciphertext>,
    pub o: CcObfuscation,
}

impl MemberAux {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = serialize_cts(&self.alpha_ct);
        v.extend(self.o.to_bytes());
        v
    }

    pub fn from_bytes(lambda: usize, b: &[u8]) -> Result<MemberAux, FamilyError> {
        let split = lambda * CIPHERTEXT_LEN;
        if b.len() < split {
            return Err(FamilyError::Aux);
        }
        Ok(MemberAux {
            alpha_ct: crate::fhe_core::deserialize_cts(&b[..split]).map_err(|_| FamilyError::Aux)?,
            o: CcObfuscation::from_bytes(&b[split..]).map_err(|_| FamilyError::Aux)?,
        })
    }

    /// Byte length for `lambda`, the same for every depth.
    pub fn byte_len(lambda: usize) -> usize {
        lambda * CIPHERTEXT_LEN + CcObfuscation::byte_len(&cc_params(lambda))
    }
}

fn cc_params(lambda: usize) -> crate::cc_obf::CcParams {
    crate::cc_obf::CcParams { input_len: 8 * CIPHERTEXT_LEN * lambda, output_len: 1, lambda }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxInfo {
    pub pk: PublicKey,
    pub alpha_ct: Vec<Ciphertext>,
    pub o: CcObfuscation,
}

impl AuxInfo {
    pub fn member_aux(&self) -> MemberAux {
        MemberAux { alpha_ct: self.alpha_ct.clone(), o: self.o.clone() }
    }
}

/// Harness-side output of a sampler: never handed to an attack.
#[derive(Debug, Clone)]
pub struct Sampled<A> {
    pub aux: A,
    pub sk: SecretKey,
    pub beta: Bits,
}

fn sample_beta(lambda: usize, rng: &mut impl Rng) -> Bits {
    bits::random_nonzero(rng, lambda)
}

fn aux_from_key(lambda: usize, pk: &PublicKey, sk: &SecretKey, alpha: &[bool], beta: &[bool], rng: &mut impl Rng) -> MemberAux {
    let alpha_ct = enc(pk, alpha, rng);
    let o = obf_cc(Capability::Dec { sk: sk.clone(), count: lambda }, beta, None, lambda, rng);
    MemberAux { alpha_ct, o }
}

/// Fresh keys at depth `d`, `Enc(α)`, uniform nonzero `β`, `O(CC[Dec_sk, β])`.
pub fn sample_d(lambda: usize, alpha: &[bool], d: usize, rng: &mut impl Rng) -> Sampled<AuxInfo> {
    assert_eq!(alpha.len(), lambda);
    let k = keygen(FheParams::new(lambda, d), &RandomTape::random(lambda, rng));
    let beta = sample_beta(lambda, rng);
    let m = aux_from_key(lambda, &k.pk, &k.sk, alpha, &beta, rng);
    Sampled { aux: AuxInfo { pk: k.pk, alpha_ct: m.alpha_ct, o: m.o }, sk: k.sk, beta }
}

/// As [`sample_d`] with keys fixed by the tape `r`; `rng` drives `β` and
/// the encryption randomness only.
pub fn sample_d_r(lambda: usize, alpha: &[bool], d: usize, r: &RandomTape, rng: &mut impl Rng) -> Sampled<MemberAux> {
    assert_eq!(alpha.len(), lambda);
    let k = keygen(FheParams::new(lambda, d), r);
    let beta = sample_beta(lambda, rng);
    let aux = aux_from_key(lambda, &k.pk, &k.sk, alpha, &beta, rng);
    Sampled { aux, sk: k.sk, beta }
}

/// The auxiliary-input pair: `MBPF_{α→β}` or `Z_λ`, with its aux.
pub fn build_aux_member_v4(kind: MemberKind, alpha: &[bool], beta: &[bool], aux: AuxInfo) -> (FunctionSpec, AuxInfo) {
    let spec = match kind {
        MemberKind::Point => FunctionSpec::multibit_point(alpha, beta),
        MemberKind::Zero => FunctionSpec::zero(alpha.len()),
    };
    (spec, aux)
}

/// Member input and output widths: `(2 + λ, 1 + payload)`.
pub fn member_io(lambda: usize) -> (usize, usize) {
    (2 + lambda, 1 + payload_len(lambda))
}

pub fn payload_len(lambda: usize) -> usize {
    (8 * MemberAux::byte_len(lambda)).max(8 * block_len(lambda, 1)).max(lambda)
}

pub fn member_input(b: u8, x: &[bool]) -> Bits {
    let mut v = vec![b & 1 == 1, b & 2 == 2];
    v.extend_from_slice(x);
    v
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MemberOutput {
    Bottom,
    Payload(Bits),
}

impl MemberOutput {
    pub fn decode(bits: &[bool]) -> MemberOutput {
        if bits[0] {
            MemberOutput::Bottom
        } else {
            MemberOutput::Payload(bits[1..].to_vec())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMember {
    pub kind: MemberKind,
    pub lambda: usize,
    pub alpha: Bits,
    pub beta: Bits,
    pub d: usize,
    pub r: RandomTape,
    pub r_prime: RandomTape,
    pub aux: MemberAux,
    pub path: BlockPath,
    pub circuit: BooleanCircuit,
}

/// Wires shared between the branches of a member circuit.
struct Selectors {
    sel: [Bit; 4],
    x: Vec<Bit>,
}

fn selectors(b: &mut CircuitBuilder, lambda: usize) -> Selectors {
    let ins = b.inputs();
    let (b0, b1) = (ins[0], ins[1]);
    let (n0, n1) = (b.not(b0), b.not(b1));
    let sel = [b.and(n0, n1), b.and(b0, n1), b.and(n0, b1), b.and(b0, b1)];
    Selectors { sel, x: ins[2..2 + lambda].to_vec() }
}

/// One-hot equality wires of `xs` against every value below `count`.
fn one_hots(b: &mut CircuitBuilder, xs: &[Bit], count: usize) -> Vec<Bit> {
    (0..count).map(|v| b.eq_const(xs, &bits::from_u64(v as u64, xs.len()))).collect()
}

/// XOR of the low one-hots selected by an 8-bit pattern, built from
/// balanced halves and shared across patterns.
struct Patterns<'a> {
    low: &'a [Bit],
    memo: HashMap<(u32, usize, usize), Bit>,
}

impl Patterns<'_> {
    fn get(&mut self, b: &mut CircuitBuilder, p: u32, lo: usize, hi: usize) -> Bit {
        let mask = ((1u32 << hi) - 1) & !((1u32 << lo) - 1);
        let p = p & mask;
        if p == 0 {
            return Bit::ZERO;
        }
        if hi - lo == 1 {
            return self.low[lo];
        }
        if let Some(&w) = self.memo.get(&(p, lo, hi)) {
            return w;
        }
        let mid = (lo + hi) / 2;
        let (x, y) = (self.get(b, p, lo, mid), self.get(b, p, mid, hi));
        let w = b.xor(x, y);
        self.memo.insert((p, lo, hi), w);
        w
    }
}

/// Block branch by table lookup: payload bits and the out-of-range flag.
fn table_branch(b: &mut CircuitBuilder, s: &Selectors, lambda: usize, table: &[Vec<u8>]) -> (Vec<Bit>, Bit) {
    let low_bits = lambda.min(3);
    let nlow = 1usize << low_bits;
    let low = one_hots(b, &s.x[..low_bits], nlow);
    let last = table.len() - 1;
    let nhigh = last / nlow + 1;
    let high = one_hots(b, &s.x[low_bits..], nhigh);
    let gated: Vec<Bit> = high.iter().map(|&h| b.and(h, s.sel[1])).collect();
    let mut pats = Patterns { low: &low, memo: HashMap::new() };

    let mut in_range_terms: Vec<Bit> = high[..nhigh - 1].to_vec();
    let tail = pats.get(b, (1u32 << (last % nlow + 1)) - 1, 0, nlow);
    in_range_terms.push(b.and(high[nhigh - 1], tail));
    let in_range = b.xor_all(&in_range_terms);

    let table_bits: Vec<Bits> = table.iter().map(|t| bits::from_bytes(t)).collect();
    let width = table_bits.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = Vec::with_capacity(width);
    for j in 0..width {
        let mut terms = Vec::new();
        for (h, &g) in gated.iter().enumerate() {
            let mut p = 0u32;
            for l in 0..nlow {
                let i = h * nlow + l;
                if i <= last && table_bits[i].get(j).copied().unwrap_or(false) {
                    p |= 1 << l;
                }
            }
            if p != 0 {
                let sp = pats.get(b, p, 0, nlow);
                terms.push(b.and(g, sp));
            }
        }
        out.push(b.xor_all(&terms));
    }
    (out, in_range)
}

/// `i - 1` for `i ≥ 1`, least significant first.
fn decrement(b: &mut CircuitBuilder, x: &[Bit]) -> Vec<Bit> {
    let mut borrow = Bit::ONE;
    let mut out = Vec::with_capacity(x.len());
    for &xi in x {
        out.push(b.xor(xi, borrow));
        let nx = b.not(xi);
        borrow = b.and(borrow, nx);
    }
    out
}

/// `x ≤ k` for a constant `k`, least significant first.
fn le_const(b: &mut CircuitBuilder, x: &[Bit], k: usize) -> Bit {
    if k >= (1usize << x.len()) - 1 {
        return Bit::ONE;
    }
    // scan from the most significant bit: x < k + 1
    let bound = bits::from_u64(k as u64 + 1, x.len());
    let mut lt = Bit::ZERO;
    let mut eq = Bit::ONE;
    for j in (0..x.len()).rev() {
        let nx = b.not(x[j]);
        if bound[j] {
            let t = b.and(eq, nx);
            lt = b.or(lt, t);
            eq = b.and(eq, x[j]);
        } else {
            eq = b.and(eq, nx);
        }
    }
    lt
}

/// Block branch computed in-circuit from the baked tape.
fn circuit_branch(b: &mut CircuitBuilder, s: &Selectors, lambda: usize, r: &RandomTape, d: usize) -> (Vec<Bit>, Bit) {
    let tape: Vec<Bit> = r.bits().iter().map(|&v| Bit::Const(v)).collect();
    let sched = tape_schedule(b, lambda, &tape);
    let mut index = s.x.clone();
    index.resize(24, Bit::ZERO);
    let mut prev = decrement(b, &s.x);
    prev.resize(24, Bit::ZERO);
    let full = chain_block_bits(b, lambda, &sched, &index, &prev, true);
    let zeros: Vec<bool> = vec![false; lambda];
    let is0 = b.eq_const(&s.x, &zeros);
    let not0 = b.not(is0);
    let head = 8 * block_len(lambda, 0);
    let in_range = le_const(b, &s.x, d);
    let live = b.and(s.sel[1], in_range);
    let live_tail = b.and(live, not0);
    let out = full
        .iter()
        .enumerate()
        .map(|(j, &w)| if j < head { b.and(w, live) } else { b.and(w, live_tail) })
        .collect();
    (out, in_range)
}

#[allow(clippy::too_many_arguments)]
pub fn build_member(
    kind: MemberKind,
    lambda: usize,
    alpha: &[bool],
    beta: &[bool],
    d: usize,
    r: &RandomTape,
    r_prime: &RandomTape,
    aux: MemberAux,
    path: BlockPath,
) -> FamilyMember {
    assert_eq!((alpha.len(), beta.len(), r.len()), (lambda, lambda, lambda));
    assert!(d < 1 << lambda, "index input holds at most lambda bits");
    let (n_in, _) = member_io(lambda);
    let width = payload_len(lambda);
    let mut b = CircuitBuilder::new(n_in);
    let s = selectors(&mut b, lambda);

    let aux_bits = bits::from_bytes(&aux.to_bytes());
    let (block, in_range) = match path {
        BlockPath::Table => {
            let table: Vec<Vec<u8>> = (0..=d).map(|i| block_bytes(lambda, r.value(), i)).collect();
            table_branch(&mut b, &s, lambda, &table)
        }
        BlockPath::Circuit => circuit_branch(&mut b, &s, lambda, r, d),
    };
    let hit = match kind {
        MemberKind::Point => {
            let e = b.eq_const(&s.x, alpha);
            b.and(e, s.sel[2])
        }
        MemberKind::Zero => Bit::ZERO,
    };
    let out_of_range = b.not(in_range);
    let bad_index = b.and(s.sel[1], out_of_range);
    let bottom = b.xor(s.sel[3], bad_index);

    let mut outs = vec![bottom];
    for j in 0..width {
        let mut terms = vec![bottom];
        if aux_bits.get(j).copied().unwrap_or(false) {
            terms.push(s.sel[0]);
        }
        if let Some(&w) = block.get(j) {
            terms.push(w);
        }
        if j < lambda && beta[j] {
            terms.push(hit);
        }
        outs.push(b.xor_all(&terms));
    }
    let circuit = b.finish(&outs);
    FamilyMember {
        kind,
        lambda,
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        d,
        r: r.clone(),
        r_prime: r_prime.clone(),
        aux,
        path,
        circuit,
    }
}

impl FamilyMember {
    pub fn eval(&self, b: u8, x: &[bool]) -> Bits {
        self.circuit.eval(&member_input(b, x)).expect("member input width")
    }

    /// The case split computed directly, without the circuit.
    pub fn reference(&self, b: u8, x: &[bool]) -> Bits {
        let width = payload_len(self.lambda);
        let payload = |mut v: Bits| {
            v.resize(width, false);
            let mut out = vec![false];
            out.extend(v);
            out
        };
        let bottom = || vec![true; width + 1];
        match b {
            0 => payload(bits::from_bytes(&self.aux.to_bytes())),
            1 => {
                let i = bits::to_u64(x) as usize;
                if i <= self.d {
                    payload(bits::from_bytes(&block_bytes(self.lambda, self.r.value(), i)))
                } else {
                    bottom()
                }
            }
            2 => payload(match self.kind {
                MemberKind::Point if x == self.alpha.as_slice() => self.beta.clone(),
                _ => vec![false; self.lambda],
            }),
            _ => bottom(),
        }
    }

    /// `member <kind> <lambda> <d or "redacted">` then the netlist.
    pub fn serialize(&self, redact_d: bool) -> String {
        let kind = match self.kind {
            MemberKind::Point => "point",
            MemberKind::Zero => "zero",
        };
        let d = if redact_d { "redacted".to_string() } else { self.d.to_string() };
        format!("member {kind} {} {d}\n{}", self.lambda, self.circuit.to_netlist())
    }
}

/// Parses a serialized member: `(kind, lambda, d if present, circuit)`.
pub fn parse_member(text: &str) -> Result<(MemberKind, usize, Option<usize>, BooleanCircuit), FamilyError> {
    let (head, body) = text.split_once('\n').ok_or(FamilyError::Header)?;
    let f: Vec<&str> = head.split_whitespace().collect();
    if f.len() != 4 || f[0] != "member" {
        return Err(FamilyError::Header);
    }
    let kind = match f[1] {
        "point" => MemberKind::Point,
        "zero" => MemberKind::Zero,
        _ => return Err(FamilyError::Header),
    };
    let lambda = f[2].parse().map_err(|_| FamilyError::Header)?;
    let d = match f[3] {
        "redacted" => None,
        v => Some(v.parse().map_err(|_| FamilyError::Header)?),
    };
    Ok((kind, lambda, d, BooleanCircuit::from_netlist(body)?))
}

/// The function part of the auxiliary-input pair as a circuit.
pub fn aux_member_circuit(spec: &FunctionSpec) -> BooleanCircuit {
    build_function(spec)
}

#[cfg(test)]
mod tests;
