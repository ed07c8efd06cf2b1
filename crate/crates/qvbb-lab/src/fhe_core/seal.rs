//! Backend-internal key material.
//!
//! Everything here is reachable only through the FHE operations; the fixed
//! seal key stands in for the hardness assumption of a real scheme.

use crate::prf::simon32;

pub(crate) const SEAL_KEY: u64 = 0x5ea1_b0c5_7e11_9a3d;

pub(crate) const DOM_SK: u32 = 0x01;
pub(crate) const DOM_SALT: u32 = 0x02;
pub(crate) const DOM_NONCE: u32 = 0x03;

pub(crate) fn mask(lambda: usize) -> u32 {
    if lambda >= 32 {
        u32::MAX
    } else {
        (1u32 << lambda) - 1
    }
}

/// Key of the tape PRF: the tape value with the tape length folded in.
pub(crate) fn tape_key(lambda: usize, tape: u64) -> u64 {
    tape | ((lambda as u64) << 40)
}

pub(crate) fn tape_prf(lambda: usize, tape: u64, domain: u32, i: u32) -> u32 {
    debug_assert!(i < 1 << 24);
    simon32(tape_key(lambda, tape), domain << 24 | i)
}

pub(crate) fn sub_secret(lambda: usize, tape: u64, i: u32) -> u32 {
    tape_prf(lambda, tape, DOM_SK, i) & mask(lambda)
}

/// Sub-public-key bytes: `salt || (sk ⊕ E_seal(salt))`, both big-endian.
pub(crate) fn sub_public(lambda: usize, tape: u64, i: u32) -> [u8; 8] {
    let salt = tape_prf(lambda, tape, DOM_SALT, i);
    let masked = sub_secret(lambda, tape, i) ^ (simon32(SEAL_KEY, salt) & mask(lambda));
    let mut out = [0u8; 8];
    out[..4].copy_from_slice(&salt.to_be_bytes());
    out[4..].copy_from_slice(&masked.to_be_bytes());
    out
}

pub(crate) fn unseal(lambda: usize, sub_pk: &[u8; 8]) -> u32 {
    let salt = u32::from_be_bytes(sub_pk[..4].try_into().unwrap());
    let masked = u32::from_be_bytes(sub_pk[4..].try_into().unwrap());
    (masked ^ simon32(SEAL_KEY, salt)) & mask(lambda)
}

pub(crate) fn tag_key(sk: u32, level: u16) -> u64 {
    SEAL_KEY ^ ((level as u64) << 48) ^ sk as u64
}

pub(crate) fn tag(sk: u32, level: u16, nonce: u32, bit: bool) -> u32 {
    simon32(tag_key(sk, level), nonce ^ ((bit as u32) << 31))
}

pub(crate) fn bridge_nonce(lambda: usize, tape: u64, i: u32, j: u32) -> u32 {
    tape_prf(lambda, tape, DOM_NONCE, i << 8 | j)
}
