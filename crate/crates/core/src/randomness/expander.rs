//! Keyed expanders. `G` and `R` run AES-128 in counter mode; `hash_bits`
//! (SHA-256 in counter mode) serves the protocol-internal random oracles.

use aes::cipher::{BlockEncrypt, KeyInit};
use aes::{Aes128, Block};
use sha2::{Digest, Sha256};

use super::RandomnessError;
use crate::bits::BitString;

/// `nbits` pseudorandom bits from SHA-256 over `domain ∥ parts ∥ counter`.
///
/// Every part is length-prefixed, so distinct part lists never collide.
pub fn hash_bits(domain: &[u8], parts: &[&[u8]], nbits: usize) -> BitString {
    let mut base = Sha256::new();
    base.update((domain.len() as u32).to_be_bytes());
    base.update(domain);
    for p in parts {
        base.update((p.len() as u64).to_be_bytes());
        base.update(p);
    }
    let blocks = nbits.div_ceil(256);
    let mut bytes = Vec::with_capacity(blocks * 32);
    for ctr in 0..blocks as u64 {
        let mut h = base.clone();
        h.update(ctr.to_be_bytes());
        bytes.extend_from_slice(&h.finalize());
    }
    BitString::from_bytes(&bytes, nbits)
}

/// AES-128 key for a bit-string key: keys up to 128 bits are packed and
/// zero-padded, longer ones are compressed with SHA-256.
fn cipher_for(key: &BitString) -> Aes128 {
    let mut k = [0u8; 16];
    if key.len() <= 128 {
        let packed = key.to_bytes();
        k[..packed.len()].copy_from_slice(&packed);
    } else {
        k.copy_from_slice(&Sha256::digest(key.to_bytes())[..16]);
    }
    Aes128::new(&k.into())
}

/// Keystream of `nbits` bits: AES over the big-endian counters 0, 1, ….
fn keystream(cipher: &Aes128, nbits: usize) -> BitString {
    let mut blocks: Vec<Block> = (0..nbits.div_ceil(128) as u128).map(|c| Block::from(c.to_be_bytes())).collect();
    cipher.encrypt_blocks(&mut blocks);
    let bytes: Vec<u8> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
    BitString::from_bytes(&bytes, nbits)
}

/// `(G_0(key), G_1(key))`: the first and last `nk+1` bits of a `2nk+2`-bit
/// expansion of a `k`-bit key.
pub fn expand_g_pair(key: &BitString, n: usize, k: usize) -> Result<(BitString, BitString), RandomnessError> {
    if key.len() != k {
        return Err(RandomnessError::KeyLength { expected: k, got: key.len() });
    }
    Ok(AesExpander.g_pair(key, n * k + 1))
}

pub fn expand_g(key: &BitString, n: usize, k: usize, selector: bool) -> Result<BitString, RandomnessError> {
    let (g0, g1) = expand_g_pair(key, n, k)?;
    Ok(if selector { g1 } else { g0 })
}

fn split_halves(full: BitString, half: usize) -> (BitString, BitString) {
    (full.slice(0..half), full.slice(half..2 * half))
}

/// One share-mask bit `R(seed, j, gate_id, entry_id)`: the first bit of the
/// encryption of the index block under the pair seed.
///
/// The index block is 16 bytes, big-endian: 64-bit `gate_id`, then a 64-bit
/// word holding `entry_id` in its top two bits and `j` in the low 62.
pub fn expand_r(pair_seed: &BitString, j: u64, gate_id: u64, entry_id: u8) -> bool {
    debug_assert!(entry_id < 4 && j < (1 << 62));
    let mut block = [0u8; 16];
    block[..8].copy_from_slice(&gate_id.to_be_bytes());
    let tail = ((entry_id as u64 & 3) << 62) | (j & ((1 << 62) - 1));
    block[8..].copy_from_slice(&tail.to_be_bytes());
    let mut b = Block::from(block);
    cipher_for(pair_seed).encrypt_block(&mut b);
    b[0] & 1 == 1
}

/// The `G` expander as seen by garbling and evaluation code.
pub trait Expander: Send + Sync {
    /// `(G_0(key), G_1(key))`, each `half_len` bits.
    fn g_pair(&self, key: &BitString, half_len: usize) -> (BitString, BitString);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AesExpander;

impl Expander for AesExpander {
    fn g_pair(&self, key: &BitString, half_len: usize) -> (BitString, BitString) {
        split_halves(keystream(&cipher_for(key), 2 * half_len), half_len)
    }
}

/// Always returns zeros; isolates table lookups in evaluator tests.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroExpander;

impl Expander for ZeroExpander {
    fn g_pair(&self, _key: &BitString, half_len: usize) -> (BitString, BitString) {
        (BitString::zeros(half_len), BitString::zeros(half_len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn g_halves_have_the_right_length() {
        let key = BitString::from_u64(0b1011, 4);
        let (g0, g1) = expand_g_pair(&key, 3, 4).unwrap();
        assert_eq!(g0.len() + g1.len(), 2 * 3 * 4 + 2);
        assert_eq!(expand_g(&key, 3, 4, false).unwrap(), g0);
        assert_eq!(expand_g(&key, 3, 4, true).unwrap(), g1);
        assert_eq!(AesExpander.g_pair(&key, 13), (g0, g1));
    }

    #[test]
    fn aes_known_answer() {
        // FIPS-197 test vector: key 000102..0f, plaintext 00112233..ff.
        let key = BitString::from_bytes(&(0u8..16).collect::<Vec<_>>(), 128);
        let mut b = Block::from([
            0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0xcc, 0xdd, 0xee, 0xff,
        ]);
        cipher_for(&key).encrypt_block(&mut b);
        assert_eq!(b[..4], [0x69, 0xc4, 0xe0, 0xd8]);
    }

    #[test]
    fn g_rejects_wrong_key_length() {
        let key = BitString::zeros(5);
        assert_eq!(expand_g(&key, 2, 4, false), Err(RandomnessError::KeyLength { expected: 4, got: 5 }));
    }

    #[test]
    fn g_avalanche() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (n, k) = (3, 16);
        let mut total = 0;
        for t in 0..100 {
            let key = BitString::random(&mut rng, k);
            let mut other = key.clone();
            other.flip(t % k);
            let a = expand_g(&key, n, k, t % 2 == 0).unwrap();
            let b = expand_g(&other, n, k, t % 2 == 0).unwrap();
            let d = a.hamming(&b);
            assert!(4 * d >= a.len(), "trial {t}: only {d} of {} bits differ", a.len());
            total += d;
        }
        assert!(total > 100 * (n * k + 1) * 2 / 5);
    }

    #[test]
    fn r_is_deterministic_and_balanced() {
        let seed = BitString::from_u64(0xdead_beef, 32);
        let mut ones = 0;
        for gate in 0..50u64 {
            for entry in 0..4u8 {
                for j in 1..=10 {
                    let b = expand_r(&seed, j, gate, entry);
                    assert_eq!(b, expand_r(&seed, j, gate, entry));
                    ones += b as usize;
                }
            }
        }
        assert!((900..=1100).contains(&ones), "{ones}");
    }

    #[test]
    fn r_separates_fields() {
        let seed = BitString::from_u64(5, 8);
        let a: Vec<bool> = (0..64).map(|j| expand_r(&seed, j + 1, 1, 0)).collect();
        let b: Vec<bool> = (0..64).map(|j| expand_r(&seed, j + 1, 0, 1)).collect();
        assert_ne!(a, b);
    }
}
