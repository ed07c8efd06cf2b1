//! Deterministic randomness.
//!
//! Two primitives live here:
//! * a SHA-256 keyed hash in counter mode, used for every seed, label and
//!   lock in the crate;
//! * the Simon32/64 block cipher, used by the FHE reference backend as its
//!   keyed function because it has a small Boolean-circuit form
//!   ([`simon_circuit`]) that the garbled KeyGen and in-circuit BlockGen
//!   paths evaluate gate by gate.

use crate::circuit_ir::builder::{Bit, CircuitBuilder};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// `SHA-256(len(key) || key || len(domain) || domain || input || ctr)` blocks,
/// concatenated and truncated to `len` bytes.
pub fn expand(key: &[u8], domain: &str, input: &[u8], len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len + 32);
    let mut ctr: u32 = 0;
    while out.len() < len {
        let mut h = Sha256::new();
        h.update((key.len() as u32).to_be_bytes());
        h.update(key);
        h.update((domain.len() as u32).to_be_bytes());
        h.update(domain.as_bytes());
        h.update(input);
        h.update(ctr.to_be_bytes());
        out.extend_from_slice(&h.finalize());
        ctr += 1;
    }
    out.truncate(len);
    out
}

pub fn hash32(domain: &str, input: &[u8]) -> [u8; 32] {
    let v = expand(&[], domain, input, 32);
    v.try_into().unwrap()
}

/// A ChaCha20 stream keyed by the PRF output on `(key, domain, input)`.
pub fn rng(key: &[u8], domain: &str, input: &[u8]) -> ChaCha20Rng {
    let seed: [u8; 32] = expand(key, domain, input, 32).try_into().unwrap();
    ChaCha20Rng::from_seed(seed)
}

/// Per-stream RNG derived from a user seed and a list of stream indices.
pub fn stream_rng(seed: u64, domain: &str, indices: &[u64]) -> ChaCha20Rng {
    let mut input = Vec::with_capacity(8 * indices.len());
    for i in indices {
        input.extend_from_slice(&i.to_be_bytes());
    }
    rng(&seed.to_be_bytes(), domain, &input)
}

const Z0: u64 = 0b11111010001001010110000111001101111101000100101011000011100110;
const SIMON_ROUNDS: usize = 32;
const SIMON_C: u16 = 0xfffc;

fn z0_bit(j: usize) -> u16 {
    ((Z0 >> (61 - (j % 62))) & 1) as u16
}

pub fn simon_round_keys(key: u64) -> [u16; SIMON_ROUNDS] {
    let mut k = [0u16; SIMON_ROUNDS];
    for (i, w) in k.iter_mut().take(4).enumerate() {
        *w = (key >> (16 * i)) as u16;
    }
    for i in 4..SIMON_ROUNDS {
        let mut tmp = k[i - 1].rotate_right(3) ^ k[i - 3];
        tmp ^= tmp.rotate_right(1);
        k[i] = SIMON_C ^ z0_bit(i - 4) ^ k[i - 4] ^ tmp;
    }
    k
}

/// Simon32/64 encryption; `block` is `x << 16 | y`, `key` is `k3 k2 k1 k0`.
pub fn simon32(key: u64, block: u32) -> u32 {
    let rk = simon_round_keys(key);
    let (mut x, mut y) = ((block >> 16) as u16, block as u16);
    for k in rk {
        let f = (x.rotate_left(1) & x.rotate_left(8)) ^ x.rotate_left(2);
        let nx = y ^ f ^ k;
        y = x;
        x = nx;
    }
    (x as u32) << 16 | y as u32
}

/// A 16-bit word of circuit bits, index `j` holds bit `2^j`.
type Word = [Bit; 16];

fn rotl(w: &Word, r: usize) -> Word {
    std::array::from_fn(|j| w[(j + 16 - r) % 16])
}

fn xor_w(b: &mut CircuitBuilder, u: &Word, v: &Word) -> Word {
    std::array::from_fn(|j| b.xor(u[j], v[j]))
}

fn const_word(c: u16) -> Word {
    std::array::from_fn(|j| Bit::Const((c >> j) & 1 == 1))
}

/// Circuit form of the Simon32/64 key schedule: 32 round keys of 16 bits,
/// flattened. `key` holds 64 bits, least significant first.
pub fn simon_schedule_circuit(b: &mut CircuitBuilder, key: &[Bit]) -> Vec<Bit> {
    assert_eq!(key.len(), 64);
    let mut k: Vec<Word> = (0..4)
        .map(|i| std::array::from_fn(|j| key[16 * i + j]))
        .collect();
    for i in 4..SIMON_ROUNDS {
        let t = rotl(&k[i - 1], 16 - 3);
        let t = xor_w(b, &t, &k[i - 3]);
        let t1 = rotl(&t, 16 - 1);
        let t = xor_w(b, &t, &t1);
        let c = const_word(SIMON_C ^ z0_bit(i - 4));
        let u = xor_w(b, &k[i - 4], &t);
        k.push(xor_w(b, &u, &c));
    }
    k.into_iter().flatten().collect()
}

/// Encrypts a 32-bit `block` (least significant first) under a schedule from
/// [`simon_schedule_circuit`]. Output order matches [`simon32`]'s value.
pub fn simon_encrypt_circuit(b: &mut CircuitBuilder, schedule: &[Bit], block: &[Bit]) -> Vec<Bit> {
    assert_eq!(schedule.len(), 16 * SIMON_ROUNDS);
    assert_eq!(block.len(), 32);
    let mut y: Word = std::array::from_fn(|j| block[j]);
    let mut x: Word = std::array::from_fn(|j| block[16 + j]);
    for rk in schedule.chunks(16) {
        let a = rotl(&x, 1);
        let c = rotl(&x, 8);
        let s2 = rotl(&x, 2);
        let f: Word = std::array::from_fn(|j| {
            let t = b.and(a[j], c[j]);
            b.xor(t, s2[j])
        });
        let rk: Word = std::array::from_fn(|j| rk[j]);
        let nx = xor_w(b, &y, &f);
        let nx = xor_w(b, &nx, &rk);
        y = x;
        x = nx;
    }
    y.iter().chain(x.iter()).copied().collect()
}

/// Circuit form of [`simon32`]. `key` holds 64 bits, `block` 32 bits, both
/// least significant first. Constant inputs fold away.
pub fn simon_circuit(b: &mut CircuitBuilder, key: &[Bit], block: &[Bit]) -> Vec<Bit> {
    let schedule = simon_schedule_circuit(b, key);
    simon_encrypt_circuit(b, &schedule, block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits;
    use rand::Rng;

    #[test]
    fn simon32_64_reference_vector() {
        assert_eq!(simon32(0x1918_1110_0908_0100, 0x6565_6877), 0xc69b_e9bb);
    }

    #[test]
    fn simon_circuit_agrees_with_native() {
        let mut b = CircuitBuilder::new(96);
        let ins = b.inputs();
        let out = simon_circuit(&mut b, &ins[..64], &ins[64..]);
        let c = b.finish(&out);
        let mut rng = stream_rng(1, "simon-test", &[]);
        for _ in 0..20 {
            let key: u64 = rng.gen();
            let blk: u32 = rng.gen();
            let mut x = bits::from_u64(key, 64);
            x.extend(bits::from_u64(blk as u64, 32));
            let y = c.eval(&x).unwrap();
            assert_eq!(bits::to_u64(&y) as u32, simon32(key, blk));
        }
    }

    #[test]
    fn expand_is_domain_separated_and_prefix_stable() {
        let a = expand(b"k", "one", b"x", 80);
        let b = expand(b"k", "two", b"x", 80);
        assert_ne!(a, b);
        assert_eq!(&expand(b"k", "one", b"x", 40)[..], &a[..40]);
    }
}
