//! Leveled classical FHE: the bootstrapped-chain key structure over a sealed
//! reference backend.
//!
//! A key pair for depth `d` is a chain of `d + 1` sub-key pairs derived from
//! the random tape; sub-key `i` encrypts sub-secret-key `i - 1` ("bridge"
//! ciphertexts). The public key is the concatenation of the chain's framed
//! blocks; the secret key is the top sub-secret-key and has constant size.
//!
//! # Security fiction
//!
//! A ciphertext is a random nonce and an authentication tag computed under
//! the sub-secret-key; the plaintext bit is carried only by which of the two
//! candidate tags verifies. Sub-public-keys hold their secret sealed under a
//! backend-internal key, so encryption and homomorphic evaluation (which
//! decrypts, evaluates and re-encrypts) work from the public key alone.
//! Evaluation correctness and the depth budget are real; semantic security
//! is assumed at this seal boundary and not provided.

pub mod chain;
pub mod circuits;
pub(crate) mod seal;

use crate::bits::Bits;
use crate::circuit_ir::BooleanCircuit;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use chain::{BRIDGE_LEN_PER_BIT, SUB_PK_LEN};

pub const MIN_LAMBDA: usize = 4;
pub const MAX_LAMBDA: usize = 32;
pub const CIPHERTEXT_LEN: usize = 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FheError {
    #[error("circuit depth {need} exceeds remaining level {have}")]
    DepthExceeded { need: usize, have: usize },
    #[error("ciphertext key id does not match the key")]
    WrongKey,
    #[error("ciphertext failed authentication")]
    Authentication,
    #[error("expected {expected} ciphertexts, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("malformed: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FheParams {
    pub lambda: usize,
    pub depth: usize,
}

impl FheParams {
    pub fn new(lambda: usize, depth: usize) -> FheParams {
        assert!(
            (MIN_LAMBDA..=MAX_LAMBDA).contains(&lambda),
            "lambda must lie in {MIN_LAMBDA}..={MAX_LAMBDA}"
        );
        assert!(depth < 1 << 16, "depth must fit the level field");
        FheParams { lambda, depth }
    }
}

/// The key-generation random tape: exactly `lambda` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomTape {
    bits: Bits,
}

impl RandomTape {
    pub fn new(bits: Bits) -> RandomTape {
        assert!(bits.len() <= MAX_LAMBDA);
        RandomTape { bits }
    }
    pub fn random(lambda: usize, rng: &mut impl Rng) -> RandomTape {
        RandomTape::new(crate::bits::random(rng, lambda))
    }
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
    pub fn len(&self) -> usize {
        self.bits.len()
    }
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
    /// Tape bits read least significant first.
    pub fn value(&self) -> u64 {
        crate::bits::to_u64(&self.bits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PublicKey {
    params: FheParams,
    bytes: Vec<u8>,
}

impl PublicKey {
    /// Parses a chain public key; the depth is read off the length.
    pub fn from_bytes(lambda: usize, bytes: Vec<u8>) -> Result<PublicKey, FheError> {
        let depth = chain::depth_from_len(lambda, bytes.len())
            .ok_or_else(|| FheError::Malformed(format!("public key of {} bytes", bytes.len())))?;
        chain::validate(lambda, &bytes)?;
        Ok(PublicKey { params: FheParams::new(lambda, depth), bytes })
    }
    pub fn params(&self) -> FheParams {
        self.params
    }
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }
    pub fn sub_public(&self, i: usize) -> [u8; 8] {
        chain::sub_public_at(self.params.lambda, &self.bytes, i)
    }
    /// Fingerprint of the top sub-public-key; stamped on every ciphertext.
    pub fn key_id(&self) -> [u8; 8] {
        key_id(&self.sub_public(self.params.depth))
    }
    /// Bridge ciphertexts `Enc_{pk_i}(sk_{i-1})`, `i >= 1`.
    pub fn bridge(&self, i: usize) -> Vec<Ciphertext> {
        chain::bridge_at(self.params.lambda, &self.bytes, i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SecretKey {
    lambda: usize,
    material: u32,
    key_id: [u8; 8],
}

impl SecretKey {
    pub(crate) fn new(lambda: usize, material: u32, key_id: [u8; 8]) -> SecretKey {
        SecretKey { lambda, material, key_id }
    }
    pub fn key_id(&self) -> [u8; 8] {
        self.key_id
    }
    /// The secret as `lambda` bits, least significant first.
    pub fn bits(&self) -> Bits {
        crate::bits::from_u64(self.material as u64, self.lambda)
    }
    /// `lambda (1) || material (4) || key id (8)`: constant size for every depth.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = vec![self.lambda as u8];
        v.extend_from_slice(&self.material.to_be_bytes());
        v.extend_from_slice(&self.key_id);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    pub pk: PublicKey,
    pub sk: SecretKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ciphertext {
    pub key_id: [u8; 8],
    pub level: u16,
    pub nonce: u32,
    pub tag: u32,
}

impl Ciphertext {
    /// `key id (8) || level (2, big-endian) || payload (nonce 4 || tag 4)`.
    pub fn to_bytes(&self) -> [u8; CIPHERTEXT_LEN] {
        let mut out = [0u8; CIPHERTEXT_LEN];
        out[..8].copy_from_slice(&self.key_id);
        out[8..10].copy_from_slice(&self.level.to_be_bytes());
        out[10..14].copy_from_slice(&self.nonce.to_be_bytes());
        out[14..].copy_from_slice(&self.tag.to_be_bytes());
        out
    }

    pub fn from_bytes(b: &[u8]) -> Result<Ciphertext, FheError> {
        if b.len() != CIPHERTEXT_LEN {
            return Err(FheError::Malformed(format!("ciphertext of {} bytes", b.len())));
        }
        Ok(Ciphertext {
            key_id: b[..8].try_into().unwrap(),
            level: u16::from_be_bytes([b[8], b[9]]),
            nonce: u32::from_be_bytes(b[10..14].try_into().unwrap()),
            tag: u32::from_be_bytes(b[14..].try_into().unwrap()),
        })
    }

    pub fn payload(&self) -> [u8; 8] {
        let mut p = [0u8; 8];
        p[..4].copy_from_slice(&self.nonce.to_be_bytes());
        p[4..].copy_from_slice(&self.tag.to_be_bytes());
        p
    }
}

pub fn serialize_cts(cts: &[Ciphertext]) -> Vec<u8> {
    cts.iter().flat_map(|c| c.to_bytes()).collect()
}

pub fn deserialize_cts(b: &[u8]) -> Result<Vec<Ciphertext>, FheError> {
    if b.len() % CIPHERTEXT_LEN != 0 {
        return Err(FheError::Malformed("ciphertext list length".into()));
    }
    b.chunks(CIPHERTEXT_LEN).map(Ciphertext::from_bytes).collect()
}

pub fn key_id(sub_pk: &[u8; 8]) -> [u8; 8] {
    let mut h = Sha256::new();
    h.update(b"qvbb/key-id");
    h.update(sub_pk);
    h.finalize()[..8].try_into().unwrap()
}

/// The five-operation backend seam. [`SealedBackend`] is the reference.
pub trait FheBackend {
    fn keygen(&self, params: FheParams, r: &RandomTape) -> KeyPair;
    fn enc(&self, pk: &PublicKey, m: &[bool], rng: &mut dyn rand::RngCore) -> Vec<Ciphertext>;
    fn dec(&self, sk: &SecretKey, cts: &[Ciphertext]) -> Result<Bits, FheError>;
    fn eval(&self, pk: &PublicKey, c: &BooleanCircuit, cts: &[Ciphertext]) -> Result<Vec<Ciphertext>, FheError>;
    fn xor_const(&self, pk: &PublicKey, ct: &Ciphertext, bit: bool) -> Result<Ciphertext, FheError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SealedBackend;

pub fn keygen(params: FheParams, r: &RandomTape) -> KeyPair {
    SealedBackend.keygen(params, r)
}

pub fn enc(pk: &PublicKey, m: &[bool], rng: &mut (impl Rng + ?Sized)) -> Vec<Ciphertext> {
    let v = Sealed::new(pk);
    m.iter().map(|&b| v.seal(b, v.level, rng.gen())).collect()
}

pub fn dec(sk: &SecretKey, cts: &[Ciphertext]) -> Result<Bits, FheError> {
    cts.iter().map(|c| decrypt_bit(sk.material, sk.key_id, c)).collect()
}

pub fn eval(pk: &PublicKey, c: &BooleanCircuit, cts: &[Ciphertext]) -> Result<Vec<Ciphertext>, FheError> {
    SealedBackend.eval(pk, c, cts)
}

/// `Enc(m) -> Enc(m ⊕ bit)` without consuming a level.
pub fn xor_const(pk: &PublicKey, ct: &Ciphertext, bit: bool) -> Result<Ciphertext, FheError> {
    SealedBackend.xor_const(pk, ct, bit)
}

pub(crate) fn encrypt_bit(sk: u32, key_id: [u8; 8], level: u16, nonce: u32, bit: bool) -> Ciphertext {
    Ciphertext { key_id, level, nonce, tag: seal::tag(sk, level, nonce, bit) }
}

pub(crate) fn decrypt_bit(sk: u32, key_id: [u8; 8], c: &Ciphertext) -> Result<bool, FheError> {
    if c.key_id != key_id {
        return Err(FheError::WrongKey);
    }
    if c.tag == seal::tag(sk, c.level, c.nonce, false) {
        Ok(false)
    } else if c.tag == seal::tag(sk, c.level, c.nonce, true) {
        Ok(true)
    } else {
        Err(FheError::Authentication)
    }
}

/// Backend-internal view of a public key's top sub-key (inside the seal).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sealed {
    sk: u32,
    key_id: [u8; 8],
    pub level: u16,
}

impl Sealed {
    pub fn new(pk: &PublicKey) -> Sealed {
        Sealed {
            sk: seal::unseal(pk.params.lambda, &pk.sub_public(pk.params.depth)),
            key_id: pk.key_id(),
            level: pk.params.depth as u16,
        }
    }
    pub fn open(&self, c: &Ciphertext) -> Result<bool, FheError> {
        decrypt_bit(self.sk, self.key_id, c)
    }
    pub fn seal(&self, bit: bool, level: u16, nonce: u32) -> Ciphertext {
        encrypt_bit(self.sk, self.key_id, level, nonce, bit)
    }
}

/// `Enc(x), Enc(y) -> Enc(x ⊕ y)` at the lower of the two levels, without
/// consuming one.
pub fn add(pk: &PublicKey, x: &Ciphertext, y: &Ciphertext) -> Result<Ciphertext, FheError> {
    let v = Sealed::new(pk);
    let m = v.open(x)? ^ v.open(y)?;
    let n = derived_nonces("add", &[*x, *y], &[], 1)[0];
    Ok(v.seal(m, x.level.min(y.level), n))
}

/// Deterministic nonces for re-encryption, bound to the inputs.
pub(crate) fn derived_nonces(domain: &str, inputs: &[Ciphertext], salt: &[u8], count: usize) -> Vec<u32> {
    let mut seed = serialize_cts(inputs);
    seed.extend_from_slice(salt);
    crate::prf::expand(b"qvbb/reencrypt", domain, &seed, 4 * count)
        .chunks(4)
        .map(|c| u32::from_be_bytes(c.try_into().unwrap()))
        .collect()
}

impl FheBackend for SealedBackend {
    fn keygen(&self, params: FheParams, r: &RandomTape) -> KeyPair {
        assert_eq!(r.len(), params.lambda, "random tape must have lambda bits");
        chain::chain_keygen(params, r.value())
    }

    fn enc(&self, pk: &PublicKey, m: &[bool], rng: &mut dyn rand::RngCore) -> Vec<Ciphertext> {
        enc(pk, m, rng)
    }

    fn dec(&self, sk: &SecretKey, cts: &[Ciphertext]) -> Result<Bits, FheError> {
        dec(sk, cts)
    }

    fn eval(&self, pk: &PublicKey, c: &BooleanCircuit, cts: &[Ciphertext]) -> Result<Vec<Ciphertext>, FheError> {
        if cts.len() != c.n_inputs() {
            return Err(FheError::Arity { expected: c.n_inputs(), got: cts.len() });
        }
        let have = cts.iter().map(|x| x.level as usize).min().unwrap_or(pk.params.depth);
        let need = c.depth();
        if need > have {
            return Err(FheError::DepthExceeded { need, have });
        }
        let v = Sealed::new(pk);
        let m: Bits = cts.iter().map(|x| v.open(x)).collect::<Result<_, _>>()?;
        let y = c.eval(&m).map_err(|e| FheError::Malformed(e.to_string()))?;
        let level = (have - need) as u16;
        let salt = [c.gates().len().to_be_bytes(), need.to_be_bytes()].concat();
        let nonces = derived_nonces("eval", cts, &salt, y.len());
        Ok(y.iter().zip(nonces).map(|(&b, n)| v.seal(b, level, n)).collect())
    }

    fn xor_const(&self, pk: &PublicKey, ct: &Ciphertext, bit: bool) -> Result<Ciphertext, FheError> {
        let v = Sealed::new(pk);
        let m = v.open(ct)?;
        let n = derived_nonces("xor-const", std::slice::from_ref(ct), &[bit as u8], 1)[0];
        Ok(v.seal(m ^ bit, ct.level, n))
    }
}
