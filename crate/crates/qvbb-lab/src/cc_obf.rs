//! Compute-and-compare obfuscation: a hash-locked comparator.
//!
//! `CC[f, y, z](x) = z if f(x) = y else 0^|z|` (plain CC is `z = 1`). The
//! obfuscation stores a random salt, `lock = H(salt, y)` and
//! `pad = z ⊕ KDF(salt, y)`; the target is never stored. `f` itself is a
//! sealed capability: a handle into a process-wide registry, so that an
//! obfuscation of `CC[Dec_sk, ·]` can be shipped as bytes without exposing
//! `sk`. The registry is the seal boundary.

use crate::bits::{self, Bits};
use crate::circuit_ir::BooleanCircuit;
use crate::fhe_core::{self, deserialize_cts, keygen, FheParams, RandomTape, SecretKey, CIPHERTEXT_LEN};
use crate::prf::expand;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};
use thiserror::Error;

pub const SALT_LEN: usize = 16;
pub const LOCK_LEN: usize = 16;
pub const CAP_ID_LEN: usize = 16;
pub const PARAMS_LEN: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CcError {
    #[error("input of {got} bits, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("unknown capability")]
    UnknownCapability,
    #[error("malformed obfuscation")]
    Malformed,
}

/// The function compared against the hidden target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Capability {
    Identity { n: usize },
    Circuit(BooleanCircuit),
    /// `x` is `count` serialized ciphertexts; `f(x) = Dec_sk(x)`, undefined
    /// when any ciphertext fails to decrypt.
    Dec { sk: SecretKey, count: usize },
}

impl Capability {
    pub fn input_len(&self) -> usize {
        match self {
            Capability::Identity { n } => *n,
            Capability::Circuit(c) => c.n_inputs(),
            Capability::Dec { count, .. } => 8 * CIPHERTEXT_LEN * count,
        }
    }

    pub fn output_len(&self) -> usize {
        match self {
            Capability::Identity { n } => *n,
            Capability::Circuit(c) => c.output_wires().len(),
            Capability::Dec { count, .. } => *count,
        }
    }

    fn apply(&self, x: &[bool]) -> Option<Bits> {
        match self {
            Capability::Identity { .. } => Some(x.to_vec()),
            Capability::Circuit(c) => c.eval(x).ok(),
            Capability::Dec { sk, .. } => {
                let cts = deserialize_cts(&bits::to_bytes(x)).ok()?;
                fhe_core::dec(sk, &cts).ok()
            }
        }
    }

    fn id(&self) -> [u8; CAP_ID_LEN] {
        let body = match self {
            Capability::Identity { n } => [b"id".to_vec(), (*n as u64).to_be_bytes().to_vec()].concat(),
            Capability::Circuit(c) => [b"circuit".to_vec(), c.to_netlist().into_bytes()].concat(),
            Capability::Dec { sk, count } => {
                [b"dec".to_vec(), sk.to_bytes(), (*count as u64).to_be_bytes().to_vec()].concat()
            }
        };
        expand(b"qvbb/cc", "cc-capability", &body, CAP_ID_LEN).try_into().unwrap()
    }
}

fn registry() -> &'static RwLock<HashMap<[u8; CAP_ID_LEN], Arc<Capability>>> {
    static R: OnceLock<RwLock<HashMap<[u8; CAP_ID_LEN], Arc<Capability>>>> = OnceLock::new();
    R.get_or_init(Default::default)
}

/// Seals a capability and returns its handle.
pub fn seal_capability(cap: Capability) -> [u8; CAP_ID_LEN] {
    let id = cap.id();
    registry().write().unwrap().entry(id).or_insert_with(|| Arc::new(cap));
    id
}

fn resolve(id: &[u8; CAP_ID_LEN]) -> Result<Arc<Capability>, CcError> {
    registry().read().unwrap().get(id).cloned().ok_or(CcError::UnknownCapability)
}

/// Public metadata: no key- or target-dependent content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CcParams {
    pub input_len: usize,
    pub output_len: usize,
    pub lambda: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CcObfuscation {
    pub salt: [u8; SALT_LEN],
    pub lock: [u8; LOCK_LEN],
    pub pad: Bits,
    pub capability: [u8; CAP_ID_LEN],
    pub params: CcParams,
}

fn lock_of(salt: &[u8], y: &[bool]) -> [u8; LOCK_LEN] {
    let mut input = (y.len() as u32).to_be_bytes().to_vec();
    input.extend(bits::to_bytes(y));
    expand(salt, "cc-lock", &input, LOCK_LEN).try_into().unwrap()
}

fn kdf(salt: &[u8], y: &[bool], n: usize) -> Bits {
    let mut input = (y.len() as u32).to_be_bytes().to_vec();
    input.extend(bits::to_bytes(y));
    bits::from_bytes(&expand(salt, "cc-kdf", &input, n.div_ceil(8)))[..n].to_vec()
}

/// Obfuscates `CC[f, y]` (`z = None`) or `MBCC[f, y, z]`.
pub fn obf_cc(f: Capability, y: &[bool], z: Option<&[bool]>, lambda: usize, rng: &mut impl Rng) -> CcObfuscation {
    assert_eq!(y.len(), f.output_len(), "target length");
    let z: Bits = z.map(<[bool]>::to_vec).unwrap_or_else(|| vec![true]);
    let mut salt = [0u8; SALT_LEN];
    rng.fill(&mut salt);
    let params = CcParams { input_len: f.input_len(), output_len: z.len(), lambda };
    CcObfuscation {
        salt,
        lock: lock_of(&salt, y),
        pad: bits::xor(&z, &kdf(&salt, y, z.len())),
        capability: seal_capability(f),
        params,
    }
}

pub fn eval_obf(o: &CcObfuscation, x: &[bool]) -> Result<Bits, CcError> {
    if x.len() != o.params.input_len {
        return Err(CcError::Length { expected: o.params.input_len, got: x.len() });
    }
    let cap = resolve(&o.capability)?;
    let n = o.params.output_len;
    Ok(match cap.apply(x) {
        Some(fx) if lock_of(&o.salt, &fx) == o.lock => bits::xor(&o.pad, &kdf(&o.salt, &fx, n)),
        _ => vec![false; n],
    })
}

/// Simulator: random lock and pad over the decryption capability of a
/// freshly generated key.
pub fn sim_cc(lambda: usize, params: CcParams, rng: &mut impl Rng) -> CcObfuscation {
    let count = params.input_len / (8 * CIPHERTEXT_LEN);
    assert_eq!(params.input_len, 8 * CIPHERTEXT_LEN * count, "params describe a decryption comparator");
    let sk = keygen(FheParams::new(lambda, 0), &RandomTape::random(lambda, rng)).sk;
    let mut salt = [0u8; SALT_LEN];
    let mut lock = [0u8; LOCK_LEN];
    rng.fill(&mut salt);
    rng.fill(&mut lock);
    CcObfuscation {
        salt,
        lock,
        pad: bits::random(rng, params.output_len),
        capability: seal_capability(Capability::Dec { sk, count }),
        params,
    }
}

impl CcObfuscation {
    /// `salt (16) || lock (16) || pad (packed) || capability id (16) ||
    /// input len (4) || output len (4) || lambda (2)`, integers big-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        v.extend_from_slice(&self.salt);
        v.extend_from_slice(&self.lock);
        v.extend(bits::to_bytes(&self.pad));
        v.extend_from_slice(&self.capability);
        v.extend_from_slice(&(self.params.input_len as u32).to_be_bytes());
        v.extend_from_slice(&(self.params.output_len as u32).to_be_bytes());
        v.extend_from_slice(&(self.params.lambda as u16).to_be_bytes());
        v
    }

    pub fn byte_len(params: &CcParams) -> usize {
        SALT_LEN + LOCK_LEN + params.output_len.div_ceil(8) + CAP_ID_LEN + PARAMS_LEN
    }

    pub fn from_bytes(b: &[u8]) -> Result<CcObfuscation, CcError> {
        if b.len() < SALT_LEN + LOCK_LEN + CAP_ID_LEN + PARAMS_LEN {
            return Err(CcError::Malformed);
        }
        let p = &b[b.len() - PARAMS_LEN..];
        let params = CcParams {
            input_len: u32::from_be_bytes(p[..4].try_into().unwrap()) as usize,
            output_len: u32::from_be_bytes(p[4..8].try_into().unwrap()) as usize,
            lambda: u16::from_be_bytes(p[8..].try_into().unwrap()) as usize,
        };
        if b.len() != Self::byte_len(&params) {
            return Err(CcError::Malformed);
        }
        let pad_end = SALT_LEN + LOCK_LEN + params.output_len.div_ceil(8);
        Ok(CcObfuscation {
            salt: b[..SALT_LEN].try_into().unwrap(),
            lock: b[SALT_LEN..SALT_LEN + LOCK_LEN].try_into().unwrap(),
            pad: bits::from_bytes(&b[SALT_LEN + LOCK_LEN..pad_end])[..params.output_len].to_vec(),
            capability: b[pad_end..pad_end + CAP_ID_LEN].try_into().unwrap(),
            params,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fhe_core::enc;
    use crate::prf::stream_rng;
    use crate::stats::{chi2_critical, chi2_uniform, Z_999};

    #[test]
    fn identity_comparator() {
        let mut rng = stream_rng(1, "cc", &[]);
        let y = bits::from_str01("1010");
        let o = obf_cc(Capability::Identity { n: 4 }, &y, None, 6, &mut rng);
        assert_eq!(eval_obf(&o, &y).unwrap(), vec![true]);
        assert_eq!(eval_obf(&o, &bits::from_str01("1011")).unwrap(), vec![false]);
        assert!(matches!(eval_obf(&o, &y[..3]), Err(CcError::Length { .. })));
    }

    #[test]
    fn decryption_comparator() {
        let mut rng = stream_rng(2, "cc", &[]);
        let k = keygen(FheParams::new(6, 2), &RandomTape::random(6, &mut rng));
        let beta = bits::from_str01("110100");
        let o = obf_cc(Capability::Dec { sk: k.sk.clone(), count: 6 }, &beta, None, 6, &mut rng);
        let as_bits = |m: &[bool], rng: &mut _| bits::from_bytes(&fhe_core::serialize_cts(&enc(&k.pk, m, rng)));
        assert_eq!(eval_obf(&o, &as_bits(&beta, &mut rng)).unwrap(), vec![true]);
        let mut other = beta.clone();
        other[0] ^= true;
        assert_eq!(eval_obf(&o, &as_bits(&other, &mut rng)).unwrap(), vec![false]);
        assert_eq!(eval_obf(&o, &vec![false; o.params.input_len]).unwrap(), vec![false]);
    }

    #[test]
    fn multibit_payload() {
        let mut rng = stream_rng(3, "cc", &[]);
        let z = bits::from_str01("0110111");
        let o = obf_cc(Capability::Identity { n: 3 }, &[true, false, true], Some(&z), 6, &mut rng);
        assert_eq!(eval_obf(&o, &[true, false, true]).unwrap(), z);
        assert_eq!(eval_obf(&o, &[true, true, true]).unwrap(), vec![false; 7]);
    }

    #[test]
    fn exhaustive_against_direct_cc() {
        let mut rng = stream_rng(4, "cc", &[]);
        let c = crate::circuit_ir::random_circuit(&mut rng, 10, 25, 3);
        let y = vec![true, false, true];
        let z = vec![true, true];
        let o = obf_cc(Capability::Circuit(c.clone()), &y, Some(&z), 6, &mut rng);
        for x in 0..1u64 << 10 {
            let x = bits::from_u64(x, 10);
            let want = if c.eval(&x).unwrap() == y { z.clone() } else { vec![false; 2] };
            assert_eq!(eval_obf(&o, &x).unwrap(), want);
        }
    }

    #[test]
    fn simulator_shape_and_rejection() {
        let mut rng = stream_rng(5, "cc", &[]);
        let k = keygen(FheParams::new(6, 1), &RandomTape::random(6, &mut rng));
        let real = obf_cc(Capability::Dec { sk: k.sk, count: 6 }, &[true; 6], None, 6, &mut rng);
        let sim = sim_cc(6, real.params, &mut rng);
        assert_eq!(sim.params, real.params);
        assert_eq!(sim.to_bytes().len(), real.to_bytes().len());
        for _ in 0..1000 {
            let x = bits::random(&mut rng, sim.params.input_len);
            assert_eq!(eval_obf(&sim, &x).unwrap(), vec![false]);
        }
    }

    #[test]
    fn bytes_roundtrip() {
        let mut rng = stream_rng(6, "cc", &[]);
        let o = obf_cc(Capability::Identity { n: 5 }, &[true; 5], Some(&[true, false, true]), 6, &mut rng);
        let b = o.to_bytes();
        assert_eq!(b.len(), 16 + 16 + 1 + 16 + 10);
        assert_eq!(CcObfuscation::from_bytes(&b).unwrap(), o);
        assert_eq!(CcObfuscation::from_bytes(&b[1..]), Err(CcError::Malformed));
    }

    #[test]
    fn lock_bytes_look_uniform_across_targets() {
        let mut rng = stream_rng(7, "cc", &[]);
        let mut counts = [0u64; 256];
        for _ in 0..1000 {
            let y = bits::random(&mut rng, 6);
            let o = obf_cc(Capability::Identity { n: 6 }, &y, None, 6, &mut rng);
            for b in o.lock {
                counts[b as usize] += 1;
            }
        }
        assert!(chi2_uniform(&counts) < chi2_critical(255, Z_999));
    }
}
