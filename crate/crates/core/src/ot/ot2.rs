use num_bigint::BigUint;
use rand::RngCore;

use super::{OtError, SafePrimeGroup};
use crate::bits::BitString;
use crate::randomness::hash_bits;

/// `H`: SHA-256 of the fixed-width element encoding, cut or stretched to `k` bits.
pub fn hash_to_bits(group: &SafePrimeGroup, x: &BigUint, k: usize) -> BitString {
    hash_bits(b"ot-H", &[&group.encode(x)], k)
}

/// `(PK_0, PK_1)` for choice `σ` and secret exponent `κ`:
/// `PK_σ = g^κ`, `PK_{1-σ} = C · PK_σ^{-1}`.
pub fn public_keys(group: &SafePrimeGroup, c: &BigUint, sigma: bool, kappa: &BigUint) -> (BigUint, BigUint) {
    let chosen = group.pow_g(kappa);
    let other = group.mul(c, &group.inv(&chosen));
    if sigma {
        (other, chosen)
    } else {
        (chosen, other)
    }
}

/// `E_i = (g^{r_i}, H(PK_i^{r_i}) ⊕ M_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ot2Cipher {
    pub u: BigUint,
    pub v: BitString,
}

#[derive(Clone, Debug)]
pub struct Ot2Sender {
    c: BigUint,
}

impl Ot2Sender {
    /// Samples `C = g^c` for a random exponent.
    pub fn start<R: RngCore + ?Sized>(group: &SafePrimeGroup, rng: &mut R) -> (Self, BigUint) {
        let c = group.pow_g(&group.random_exponent(rng));
        (Self { c: c.clone() }, c)
    }

    pub fn with_c(c: BigUint) -> Self {
        Self { c }
    }

    pub fn c(&self) -> &BigUint {
        &self.c
    }

    pub fn respond<R: RngCore + ?Sized>(
        &self,
        group: &SafePrimeGroup,
        pk0: &BigUint,
        m0: &BitString,
        m1: &BitString,
        rng: &mut R,
    ) -> Result<[Ot2Cipher; 2], OtError> {
        let r0 = group.random_exponent(rng);
        let r1 = group.random_exponent(rng);
        self.respond_with(group, pk0, [m0, m1], [&r0, &r1])
    }

    /// Sender's second step with explicit exponents `r_0`, `r_1`.
    pub fn respond_with(
        &self,
        group: &SafePrimeGroup,
        pk0: &BigUint,
        m: [&BitString; 2],
        r: [&BigUint; 2],
    ) -> Result<[Ot2Cipher; 2], OtError> {
        if m[0].len() != m[1].len() {
            return Err(OtError::MessageLength { expected: m[0].len(), got: m[1].len() });
        }
        group.check(pk0, "PK0")?;
        let pk1 = group.mul(&self.c, &group.inv(pk0));
        let seal = |pk: &BigUint, r: &BigUint, msg: &BitString| Ot2Cipher {
            u: group.pow_g(r),
            v: &hash_to_bits(group, &group.pow(pk, r), msg.len()) ^ msg,
        };
        Ok([seal(pk0, r[0], m[0]), seal(&pk1, r[1], m[1])])
    }
}

#[derive(Clone, Debug)]
pub struct Ot2Chooser {
    sigma: bool,
    kappa: BigUint,
}

impl Ot2Chooser {
    pub fn choose<R: RngCore + ?Sized>(
        group: &SafePrimeGroup,
        c: &BigUint,
        sigma: bool,
        rng: &mut R,
    ) -> Result<(Self, BigUint), OtError> {
        Self::choose_with(group, c, sigma, group.random_exponent(rng))
    }

    /// Chooser's step with an explicit `κ`; returns the state and `PK_0`.
    pub fn choose_with(
        group: &SafePrimeGroup,
        c: &BigUint,
        sigma: bool,
        kappa: BigUint,
    ) -> Result<(Self, BigUint), OtError> {
        group.check(c, "C")?;
        let (pk0, _) = public_keys(group, c, sigma, &kappa);
        Ok((Self { sigma, kappa }, pk0))
    }

    /// `M_σ = H(u_σ^κ) ⊕ v_σ`.
    pub fn finish(&self, group: &SafePrimeGroup, e: &[Ot2Cipher; 2]) -> Result<BitString, OtError> {
        let chosen = &e[self.sigma as usize];
        group.check(&chosen.u, "g^r")?;
        Ok(&hash_to_bits(group, &group.pow(&chosen.u, &self.kappa), chosen.v.len()) ^ &chosen.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ot2Transcript {
    pub c: BigUint,
    pub pk0: BigUint,
    pub e: [Ot2Cipher; 2],
}

impl Ot2Transcript {
    /// Measured payload: `|p|` per group element plus the masked message bits.
    pub fn payload_bits(&self, group: &SafePrimeGroup) -> u64 {
        4 * group.p_bits() + (self.e[0].v.len() + self.e[1].v.len()) as u64
    }
}

/// Runs both sides in-process.
pub fn ot2<R: RngCore + ?Sized>(
    group: &SafePrimeGroup,
    m0: &BitString,
    m1: &BitString,
    sigma: bool,
    rng: &mut R,
) -> Result<(BitString, Ot2Transcript), OtError> {
    let (sender, c) = Ot2Sender::start(group, rng);
    let (chooser, pk0) = Ot2Chooser::choose(group, &c, sigma, rng)?;
    let e = sender.respond(group, &pk0, m0, m1, rng)?;
    let out = chooser.finish(group, &e)?;
    Ok((out, Ot2Transcript { c, pk0, e }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn tiny_group_worked_example() {
        let g = SafePrimeGroup::tiny();
        let c = BigUint::from(9u32);
        let (chooser, pk0) = Ot2Chooser::choose_with(&g, &c, false, 3u32.into()).unwrap();
        assert_eq!(pk0, BigUint::from(18u32));
        assert_eq!(public_keys(&g, &c, false, &3u32.into()).1, BigUint::from(12u32));
        let m0 = BitString::from_u64(0b1010, 4);
        let m1 = BitString::from_u64(0b0110, 4);
        let e = Ot2Sender::with_c(c).respond_with(&g, &pk0, [&m0, &m1], [&5u32.into(), &7u32.into()]).unwrap();
        assert_eq!(chooser.finish(&g, &e).unwrap(), m0);
        // PK1 as the sender sees it is the same 12
        assert_eq!(e[1].u, g.pow_g(&7u32.into()));
    }

    #[test]
    fn equal_messages_give_that_message() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let g = SafePrimeGroup::bits64();
        let m = BitString::random(&mut rng, 16);
        for sigma in [false, true] {
            assert_eq!(ot2(&g, &m, &m, sigma, &mut rng).unwrap().0, m);
        }
    }

    #[test]
    fn payload_size_matches_formula() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let g = SafePrimeGroup::bits64();
        for t in 0..100 {
            let k = 1 + t % 40;
            let m0 = BitString::random(&mut rng, k);
            let m1 = BitString::random(&mut rng, k);
            let (out, tr) = ot2(&g, &m0, &m1, t % 3 == 0, &mut rng).unwrap();
            assert_eq!(out, if t % 3 == 0 { m1 } else { m0 });
            assert_eq!(tr.payload_bits(&g), 4 * 64 + 2 * k as u64);
        }
    }

    #[test]
    fn pk0_is_uniform_for_either_choice() {
        let g = SafePrimeGroup::tiny();
        let c = g.pow_g(&6u32.into());
        for sigma in [false, true] {
            let mut seen: Vec<BigUint> =
                (1..=11u32).map(|kappa| Ot2Chooser::choose_with(&g, &c, sigma, kappa.into()).unwrap().1).collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), 11, "sigma={sigma}");
        }
    }

    #[test]
    fn non_member_elements_rejected() {
        let g = SafePrimeGroup::tiny();
        assert_eq!(
            Ot2Chooser::choose_with(&g, &5u32.into(), false, 2u32.into()).unwrap_err(),
            OtError::NotInSubgroup("C")
        );
        let m = BitString::zeros(3);
        let err = Ot2Sender::with_c(9u32.into()).respond_with(&g, &5u32.into(), [&m, &m], [&1u32.into(), &1u32.into()]);
        assert_eq!(err.unwrap_err(), OtError::NotInSubgroup("PK0"));
    }
}
