//! Bit-string helpers. Bits are `bool`s, index 0 first; bytes expand
//! most-significant bit first.

pub type Bits = Vec<bool>;

pub fn from_str01(s: &str) -> Bits {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => false,
            '1' => true,
            other => panic!("not a bit: {other:?}"),
        })
        .collect()
}

pub fn to_str01(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

pub fn from_bytes(bytes: &[u8]) -> Bits {
    let mut out = Vec::with_capacity(bytes.len() * 8);
    for &byte in bytes {
        for k in (0..8).rev() {
            out.push((byte >> k) & 1 == 1);
        }
    }
    out
}

/// Packs bits into bytes, zero-padding the final byte.
pub fn to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|ch| {
            ch.iter()
                .enumerate()
                .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << (7 - k)))
        })
        .collect()
}

/// Low `n` bits of `v`, least significant first.
pub fn from_u64(v: u64, n: usize) -> Bits {
    (0..n).map(|k| k < 64 && (v >> k) & 1 == 1).collect()
}

pub fn to_u64(bits: &[bool]) -> u64 {
    bits.iter()
        .take(64)
        .enumerate()
        .fold(0u64, |acc, (k, &b)| acc | ((b as u64) << k))
}

pub fn xor(a: &[bool], b: &[bool]) -> Bits {
    assert_eq!(a.len(), b.len(), "xor of unequal lengths");
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

pub fn random(rng: &mut impl rand::Rng, n: usize) -> Bits {
    (0..n).map(|_| rng.gen::<bool>()).collect()
}

/// Uniform over `{0,1}^n` minus the all-zero string.
pub fn random_nonzero(rng: &mut impl rand::Rng, n: usize) -> Bits {
    assert!(n > 0);
    loop {
        let b = random(rng, n);
        if b.iter().any(|&x| x) {
            return b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_expansion_is_msb_first() {
        assert_eq!(to_str01(&from_bytes(&[0b1010_0001])), "10100001");
        assert_eq!(to_bytes(&from_str01("101")), vec![0b1010_0000]);
    }

    #[test]
    fn u64_roundtrip_is_lsb_first() {
        assert_eq!(to_str01(&from_u64(6, 4)), "0110");
        assert_eq!(to_u64(&from_u64(0xdead, 16)), 0xdead);
    }
}
