//! Safe-prime groups `p = 2q + 1` with a generator `g` of the order-`q`
//! subgroup of quadratic residues.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive};
use rand::RngCore;

use super::OtError;

/// The 3072-bit MODP prime from RFC 3526 (generator 2).
const MODP_3072: [&str; 12] = [
    "ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74",
    "020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437",
    "4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed",
    "ee386bfb5a899fa5ae9f24117c4b1fe649286651ece45b3dc2007cb8a163bf05",
    "98da48361c55d39a69163fa8fd24cf5f83655d23dca3ad961c62f356208552bb",
    "9ed529077096966d670c354e4abc9804f1746c08ca18217c32905e462e36ce3b",
    "e39e772c180e86039b2783a2ec07a28fb5c55df06f4c52c9de2bcbf695581718",
    "3995497cea956ae515d2261898fa051015728e5a8aaac42dad33170d04507a33",
    "a85521abdf1cba64ecfb850458dbef0a8aea71575d060c7db3970f85a6e1e4c7",
    "abf5ae8cdb0933d71e8c94e04a25619dcee3d2261ad2ee6bf12ffa06d98a0864",
    "d87602733ec86a64521f2b18177b200cbbe117577a615d6c770988c0bad946e2",
    "08e24fa074e5ab3143db5bfce0fd108e4b82d120a93ad2caffffffffffffffff",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SafePrimeGroup {
    pub name: &'static str,
    p: BigUint,
    q: BigUint,
    g: BigUint,
    /// `p` as a machine word when it fits.
    word: Option<u64>,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn powmod(mut base: u64, e: &BigUint, m: u64) -> u64 {
    base %= m;
    let mut acc = 1 % m;
    for i in 0..e.bits() {
        if e.bit(i) {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
    }
    acc
}

impl SafePrimeGroup {
    /// Validates `p = 2q + 1`, `g ≠ 1` and `g^q = 1`. Primality of `q` is
    /// checked only for the bundled profiles, in tests.
    pub fn new(name: &'static str, p: BigUint, g: BigUint) -> Result<Self, OtError> {
        if p < BigUint::from(7u32) || !p.bit(0) {
            return Err(OtError::Group("p must be an odd prime above 5".into()));
        }
        let q = (&p - 1u32) >> 1;
        if g <= BigUint::one() || g >= p || !g.modpow(&q, &p).is_one() {
            return Err(OtError::Group("g must generate the order-q subgroup".into()));
        }
        let word = p.to_u64();
        Ok(Self { name, p, q, g, word })
    }

    fn from_hex(name: &'static str, p: &str, g: u32) -> Self {
        let p = BigUint::parse_bytes(p.as_bytes(), 16).expect("valid hex");
        Self::new(name, p, g.into()).expect("bundled group is valid")
    }

    /// `p = 23`, `q = 11`, `g = 4`: for hand-checkable examples only.
    pub fn tiny() -> Self {
        Self::from_hex("tiny", "17", 4)
    }

    /// The smallest safe prime above `2^63`.
    pub fn bits64() -> Self {
        Self::from_hex("64", "8000000000000a77", 4)
    }

    /// The smallest safe prime above `2^255`.
    pub fn bits256() -> Self {
        Self::from_hex("256", "800000000000000000000000000000000000000000000000000000000002ff7f", 4)
    }

    pub fn modp3072() -> Self {
        Self::from_hex("3072", &MODP_3072.concat(), 2)
    }

    /// Looks a profile up by name: `tiny`, `64`, `256` or `3072`.
    pub fn profile(name: &str) -> Option<Self> {
        match name {
            "tiny" => Some(Self::tiny()),
            "64" => Some(Self::bits64()),
            "256" => Some(Self::bits256()),
            "3072" => Some(Self::modp3072()),
            _ => None,
        }
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn g(&self) -> &BigUint {
        &self.g
    }

    /// `|p|` in bits: the declared size of one group element on the wire.
    pub fn p_bits(&self) -> u64 {
        self.p.bits()
    }

    pub fn q_bits(&self) -> u64 {
        self.q.bits()
    }

    pub fn element_bytes(&self) -> usize {
        self.p_bits().div_ceil(8) as usize
    }

    pub fn pow_g(&self, e: &BigUint) -> BigUint {
        self.pow(&self.g, e)
    }

    pub fn pow(&self, x: &BigUint, e: &BigUint) -> BigUint {
        match (self.word, x.to_u64()) {
            (Some(m), Some(x)) => powmod(x, e, m).into(),
            _ => x.modpow(e, &self.p),
        }
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        match (self.word, a.to_u64(), b.to_u64()) {
            (Some(m), Some(a), Some(b)) => mulmod(a, b, m).into(),
            _ => a * b % &self.p,
        }
    }

    pub fn inv(&self, a: &BigUint) -> BigUint {
        self.pow(a, &(&self.p - 2u32))
    }

    /// Uniform exponent in `[1, q]`.
    pub fn random_exponent<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        rng.gen_biguint_range(&BigUint::one(), &(&self.q + 1u32))
    }

    /// Membership in the order-`q` subgroup.
    pub fn contains(&self, x: &BigUint) -> bool {
        *x >= BigUint::one() && *x < self.p && self.pow(x, &self.q).is_one()
    }

    pub fn check(&self, x: &BigUint, what: &'static str) -> Result<(), OtError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(OtError::NotInSubgroup(what))
        }
    }

    /// Big-endian, fixed width.
    pub fn encode(&self, x: &BigUint) -> Vec<u8> {
        let raw = x.to_bytes_be();
        let mut out = vec![0u8; self.element_bytes() - raw.len()];
        out.extend(raw);
        out
    }

    pub fn decode(&self, bytes: &[u8]) -> BigUint {
        BigUint::from_bytes_be(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::is_probable_prime;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn bundled_profiles_are_safe_primes() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for (g, bits) in [
            (SafePrimeGroup::tiny(), 5),
            (SafePrimeGroup::bits64(), 64),
            (SafePrimeGroup::bits256(), 256),
            (SafePrimeGroup::modp3072(), 3072),
        ] {
            assert_eq!(g.p_bits(), bits, "{}", g.name);
            let rounds = if bits > 1000 { 2 } else { 20 };
            assert!(is_probable_prime(g.p(), rounds, &mut rng), "{}", g.name);
            assert!(is_probable_prime(g.q(), rounds, &mut rng), "{}", g.name);
            assert_eq!(g.q_bits(), bits - 1);
        }
    }

    #[test]
    fn subgroup_membership() {
        let g = SafePrimeGroup::tiny();
        let members: Vec<u32> = (1..23u32).filter(|&x| g.contains(&x.into())).collect();
        assert_eq!(members, vec![1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18]);
        assert!(!g.contains(&0u32.into()));
        assert!(!g.contains(&23u32.into()));
    }

    #[test]
    fn encoding_is_fixed_width() {
        let g = SafePrimeGroup::bits256();
        let x = BigUint::from(5u32);
        let e = g.encode(&x);
        assert_eq!(e.len(), 32);
        assert_eq!(g.decode(&e), x);
    }

    #[test]
    fn bad_generator_rejected() {
        assert!(SafePrimeGroup::new("x", 23u32.into(), 5u32.into()).is_err());
        assert!(SafePrimeGroup::new("x", 23u32.into(), 1u32.into()).is_err());
    }

    #[test]
    fn word_path_agrees_with_bigint() {
        let g = SafePrimeGroup::bits64();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = g.pow_g(&g.random_exponent(&mut rng));
            let e = g.random_exponent(&mut rng);
            assert_eq!(g.pow(&x, &e), x.modpow(&e, g.p()));
            let y = g.pow_g(&e);
            assert_eq!(g.mul(&x, &y), &x * &y % g.p());
            assert!(g.mul(&x, &g.inv(&x)).is_one());
        }
    }
}
