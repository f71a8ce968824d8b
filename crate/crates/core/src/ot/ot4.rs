use num_bigint::BigUint;
use rand::RngCore;

use super::{bit_bytes, Ot2Chooser, Ot2Cipher, Ot2Sender, OtError, SafePrimeGroup};
use crate::bits::BitString;
use crate::randomness::hash_bits;

/// `F_key(index)`: a `k`-bit mask.
pub fn keyed_mask(key: &BitString, index: u8, k: usize) -> BitString {
    hash_bits(b"ot-F", &[&(key.len() as u64).to_be_bytes(), &key.to_bytes(), &[index]], k)
}

/// Sender → chooser: `C_L ∥ C_R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ot4Flight1 {
    pub c: [BigUint; 2],
}

/// Chooser → sender: `PK0_L ∥ PK0_R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ot4Flight2 {
    pub pk0: [BigUint; 2],
}

/// Sender → chooser: the two 1-of-2 ciphertext pairs and `E_00 .. E_11`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ot4Flight3 {
    pub keys: [[Ot2Cipher; 2]; 2],
    pub e: [BitString; 4],
}

fn put_elements(group: &SafePrimeGroup, xs: &[&BigUint], out: &mut Vec<u8>) {
    for x in xs {
        out.extend(group.encode(x));
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], OtError> {
        if self.bytes.len() < n {
            return Err(OtError::Decode(format!("need {n} more bytes, have {}", self.bytes.len())));
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn element(&mut self, group: &SafePrimeGroup) -> Result<BigUint, OtError> {
        Ok(group.decode(self.take(group.element_bytes())?))
    }

    fn bits(&mut self, k: usize) -> Result<BitString, OtError> {
        Ok(BitString::from_bytes(self.take(bit_bytes(k))?, k))
    }
}

impl Ot4Flight1 {
    pub fn payload_bits(group: &SafePrimeGroup) -> u64 {
        2 * group.p_bits()
    }

    pub fn encode(&self, group: &SafePrimeGroup, out: &mut Vec<u8>) {
        put_elements(group, &[&self.c[0], &self.c[1]], out);
    }

    pub fn encoded_len(group: &SafePrimeGroup) -> usize {
        2 * group.element_bytes()
    }

    pub fn decode(group: &SafePrimeGroup, bytes: &[u8]) -> Result<Self, OtError> {
        let mut r = Reader { bytes };
        Ok(Self { c: [r.element(group)?, r.element(group)?] })
    }
}

impl Ot4Flight2 {
    pub fn payload_bits(group: &SafePrimeGroup) -> u64 {
        2 * group.p_bits()
    }

    pub fn encode(&self, group: &SafePrimeGroup, out: &mut Vec<u8>) {
        put_elements(group, &[&self.pk0[0], &self.pk0[1]], out);
    }

    pub fn encoded_len(group: &SafePrimeGroup) -> usize {
        2 * group.element_bytes()
    }

    pub fn decode(group: &SafePrimeGroup, bytes: &[u8]) -> Result<Self, OtError> {
        let mut r = Reader { bytes };
        Ok(Self { pk0: [r.element(group)?, r.element(group)?] })
    }
}

impl Ot4Flight3 {
    pub fn payload_bits(group: &SafePrimeGroup, k: usize) -> u64 {
        4 * group.p_bits() + 8 * k as u64
    }

    pub fn encode(&self, group: &SafePrimeGroup, out: &mut Vec<u8>) {
        for pair in &self.keys {
            for c in pair {
                out.extend(group.encode(&c.u));
                out.extend(c.v.to_bytes());
            }
        }
        for e in &self.e {
            out.extend(e.to_bytes());
        }
    }

    pub fn encoded_len(group: &SafePrimeGroup, k: usize) -> usize {
        4 * (group.element_bytes() + bit_bytes(k)) + 4 * bit_bytes(k)
    }

    pub fn decode(group: &SafePrimeGroup, k: usize, bytes: &[u8]) -> Result<Self, OtError> {
        let mut r = Reader { bytes };
        let mut cipher = || -> Result<Ot2Cipher, OtError> { Ok(Ot2Cipher { u: r.element(group)?, v: r.bits(k)? }) };
        let keys = [[cipher()?, cipher()?], [cipher()?, cipher()?]];
        let e = [r.bits(k)?, r.bits(k)?, r.bits(k)?, r.bits(k)?];
        Ok(Self { keys, e })
    }
}

pub struct Ot4Sender {
    halves: [Ot2Sender; 2],
}

impl Ot4Sender {
    pub fn start<R: RngCore + ?Sized>(group: &SafePrimeGroup, rng: &mut R) -> (Self, Ot4Flight1) {
        let (l, cl) = Ot2Sender::start(group, rng);
        let (r, cr) = Ot2Sender::start(group, rng);
        (Self { halves: [l, r] }, Ot4Flight1 { c: [cl, cr] })
    }

    /// Draws key pairs `(L_0, L_1)`, `(R_0, R_1)` and seals
    /// `E_ij = M_ij ⊕ F_{L_i}(2i+j+1) ⊕ F_{R_j}(2i+j+1)`.
    pub fn finish<R: RngCore + ?Sized>(
        &self,
        group: &SafePrimeGroup,
        flight: &Ot4Flight2,
        msgs: &[BitString; 4],
        rng: &mut R,
    ) -> Result<Ot4Flight3, OtError> {
        let k = msgs[0].len();
        if let Some(m) = msgs.iter().find(|m| m.len() != k) {
            return Err(OtError::MessageLength { expected: k, got: m.len() });
        }
        let l = [BitString::random(rng, k), BitString::random(rng, k)];
        let r = [BitString::random(rng, k), BitString::random(rng, k)];
        let keys = [
            self.halves[0].respond(group, &flight.pk0[0], &l[0], &l[1], rng)?,
            self.halves[1].respond(group, &flight.pk0[1], &r[0], &r[1], rng)?,
        ];
        let e = std::array::from_fn(|ij| {
            let idx = ij as u8 + 1;
            let mut out = msgs[ij].clone();
            out ^= &keyed_mask(&l[ij >> 1], idx, k);
            out ^= &keyed_mask(&r[ij & 1], idx, k);
            out
        });
        Ok(Ot4Flight3 { keys, e })
    }

    /// Random bits the sender draws per transfer, at declared sizes:
    /// `|p|` for each of `C_L, C_R` and the four `r` values, plus four `k`-bit keys.
    pub fn random_bits(group: &SafePrimeGroup, k: usize) -> u64 {
        6 * group.p_bits() + 4 * k as u64
    }
}

pub struct Ot4Chooser {
    choice: (bool, bool),
    halves: [Ot2Chooser; 2],
}

impl Ot4Chooser {
    pub fn respond<R: RngCore + ?Sized>(
        group: &SafePrimeGroup,
        flight: &Ot4Flight1,
        choice: (bool, bool),
        rng: &mut R,
    ) -> Result<(Self, Ot4Flight2), OtError> {
        let (l, pl) = Ot2Chooser::choose(group, &flight.c[0], choice.0, rng)?;
        let (r, pr) = Ot2Chooser::choose(group, &flight.c[1], choice.1, rng)?;
        Ok((Self { choice, halves: [l, r] }, Ot4Flight2 { pk0: [pl, pr] }))
    }

    pub fn finish(&self, group: &SafePrimeGroup, flight: &Ot4Flight3) -> Result<BitString, OtError> {
        let l = self.halves[0].finish(group, &flight.keys[0])?;
        let r = self.halves[1].finish(group, &flight.keys[1])?;
        let ij = 2 * self.choice.0 as usize + self.choice.1 as usize;
        let k = flight.e[ij].len();
        let mut out = flight.e[ij].clone();
        out ^= &keyed_mask(&l, ij as u8 + 1, k);
        out ^= &keyed_mask(&r, ij as u8 + 1, k);
        Ok(out)
    }

    /// `|q|` bits for each of the two secret exponents.
    pub fn random_bits(group: &SafePrimeGroup) -> u64 {
        2 * group.q_bits()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ot4Transcript {
    pub flight1: Ot4Flight1,
    pub flight2: Ot4Flight2,
    pub flight3: Ot4Flight3,
}

impl Ot4Transcript {
    /// Measured payload bits: `|p|` per element plus every masked string.
    pub fn payload_bits(&self, group: &SafePrimeGroup) -> u64 {
        let elements = 2 + 2 + 4;
        let strings: usize = self.flight3.keys.iter().flatten().map(|c| c.v.len()).sum::<usize>()
            + self.flight3.e.iter().map(BitString::len).sum::<usize>();
        elements * group.p_bits() + strings as u64
    }
}

pub fn ot4<R: RngCore + ?Sized>(
    group: &SafePrimeGroup,
    msgs: &[BitString; 4],
    choice: (bool, bool),
    rng: &mut R,
) -> Result<(BitString, Ot4Transcript), OtError> {
    let (sender, flight1) = Ot4Sender::start(group, rng);
    let (chooser, flight2) = Ot4Chooser::respond(group, &flight1, choice, rng)?;
    let flight3 = sender.finish(group, &flight2, msgs, rng)?;
    let out = chooser.finish(group, &flight3)?;
    Ok((out, Ot4Transcript { flight1, flight2, flight3 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn msgs(rng: &mut ChaCha20Rng, k: usize) -> [BitString; 4] {
        std::array::from_fn(|_| BitString::random(rng, k))
    }

    #[test]
    fn exhaustive_choices() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let g = SafePrimeGroup::bits64();
        for _ in 0..20 {
            let m = msgs(&mut rng, 12);
            for ij in 0..4 {
                let choice = (ij >> 1 == 1, ij & 1 == 1);
                let (out, tr) = ot4(&g, &m, choice, &mut rng).unwrap();
                assert_eq!(out, m[ij]);
                assert_eq!(tr.payload_bits(&g), 8 * (64 + 12));
            }
        }
    }

    #[test]
    fn equal_messages() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let g = SafePrimeGroup::tiny();
        let m = BitString::random(&mut rng, 9);
        let all = [m.clone(), m.clone(), m.clone(), m.clone()];
        for ij in 0..4 {
            assert_eq!(ot4(&g, &all, (ij >> 1 == 1, ij & 1 == 1), &mut rng).unwrap().0, m);
        }
    }

    #[test]
    fn full_size_payload_is_3200_bytes() {
        let g = SafePrimeGroup::modp3072();
        let bits = Ot4Flight1::payload_bits(&g) + Ot4Flight2::payload_bits(&g) + Ot4Flight3::payload_bits(&g, 128);
        assert_eq!(bits, 25_600);
        assert_eq!(bits / 8, 3200);
    }

    #[test]
    fn mask_unmask_and_index_separation() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let mut collisions = 0;
        for _ in 0..200 {
            let key = BitString::random(&mut rng, 32);
            let m = BitString::random(&mut rng, 32);
            let masked = &m ^ &keyed_mask(&key, 3, 32);
            assert_eq!(&masked ^ &keyed_mask(&key, 3, 32), m);
            let masks: Vec<BitString> = (1..=4).map(|i| keyed_mask(&key, i, 32)).collect();
            for a in 0..4 {
                for b in a + 1..4 {
                    collisions += (masks[a] == masks[b]) as usize;
                }
            }
        }
        assert_eq!(collisions, 0);
    }

    #[test]
    fn flights_roundtrip_through_bytes() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let g = SafePrimeGroup::bits256();
        let k = 13;
        let m = msgs(&mut rng, k);
        let (_, tr) = ot4(&g, &m, (true, false), &mut rng).unwrap();
        let mut b1 = Vec::new();
        tr.flight1.encode(&g, &mut b1);
        assert_eq!(b1.len(), Ot4Flight1::encoded_len(&g));
        assert_eq!(Ot4Flight1::decode(&g, &b1).unwrap(), tr.flight1);
        let mut b2 = Vec::new();
        tr.flight2.encode(&g, &mut b2);
        assert_eq!(Ot4Flight2::decode(&g, &b2).unwrap(), tr.flight2);
        let mut b3 = Vec::new();
        tr.flight3.encode(&g, &mut b3);
        assert_eq!(b3.len(), Ot4Flight3::encoded_len(&g, k));
        assert_eq!(Ot4Flight3::decode(&g, k, &b3).unwrap(), tr.flight3);
        assert!(Ot4Flight3::decode(&g, k, &b3[1..]).is_err());
    }

    #[test]
    fn mismatched_message_lengths_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let g = SafePrimeGroup::tiny();
        let mut m = msgs(&mut rng, 4);
        m[2] = BitString::zeros(5);
        assert!(matches!(ot4(&g, &m, (false, false), &mut rng), Err(OtError::MessageLength { .. })));
    }
}
