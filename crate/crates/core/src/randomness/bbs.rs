use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::RandomnessError;

/// Public generator parameters held by a party: the modulus and its seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbsPublic {
    pub modulus: BigUint,
    pub seed: BigUint,
}

impl BbsPublic {
    pub fn new(modulus: BigUint, seed: BigUint) -> Result<Self, RandomnessError> {
        if modulus.is_even() || modulus <= BigUint::from(8u32) {
            return Err(RandomnessError::Modulus("N must be odd and greater than 8".into()));
        }
        if !seed.gcd(&modulus).is_one() {
            return Err(RandomnessError::Seed);
        }
        Ok(Self { modulus, seed })
    }
}

/// The factorization of `N`, known only to the client.
#[derive(Clone, PartialEq, Eq)]
pub struct BbsTrapdoor {
    p: BigUint,
    q: BigUint,
    n: BigUint,
    carmichael: BigUint,
}

impl std::fmt::Debug for BbsTrapdoor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BbsTrapdoor").field("n", &self.n).finish_non_exhaustive()
    }
}

impl BbsTrapdoor {
    pub fn new(p: BigUint, q: BigUint) -> Result<Self, RandomnessError> {
        let three = BigUint::from(3u32);
        if &p % 4u32 != three || &q % 4u32 != three {
            return Err(RandomnessError::Modulus("both factors must be 3 mod 4".into()));
        }
        if p == q {
            return Err(RandomnessError::Modulus("factors must differ".into()));
        }
        let n = &p * &q;
        let carmichael = (&p - 1u32).lcm(&(&q - 1u32));
        Ok(Self { p, q, n, carmichael })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    pub fn carmichael(&self) -> &BigUint {
        &self.carmichael
    }

    pub fn factors(&self) -> (&BigUint, &BigUint) {
        (&self.p, &self.q)
    }
}

/// Sequential generator: `x_j = x_{j-1}^2 mod N`, output `LSB(x_j)`.
#[derive(Clone, Debug)]
pub struct BbsState {
    modulus: BigUint,
    x: BigUint,
    index: u64,
}

impl BbsState {
    pub fn new(public: &BbsPublic) -> Self {
        Self { modulus: public.modulus.clone(), x: public.seed.clone(), index: 0 }
    }

    /// Index of the last bit produced (0 before the first call).
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn next_bit(&mut self) -> bool {
        self.x = &self.x * &self.x % &self.modulus;
        self.index += 1;
        self.x.bit(0)
    }

    pub fn take(&mut self, count: usize) -> Vec<bool> {
        (0..count).map(|_| self.next_bit()).collect()
    }
}

/// Left-to-right square-and-multiply that counts modular multiplications.
fn counted_modpow(base: &BigUint, exp: &BigUint, modulus: &BigUint, mults: &mut u64) -> BigUint {
    if let (Some(b), Some(m)) = (base.to_u64(), modulus.to_u64()) {
        return BigUint::from(counted_modpow_u64(b, exp, m, mults));
    }
    let mut acc = BigUint::one() % modulus;
    let bits = exp.bits();
    for i in (0..bits).rev() {
        if i + 1 != bits {
            acc = &acc * &acc % modulus;
            *mults += 1;
        }
        if exp.bit(i) {
            acc = if i + 1 == bits { base % modulus } else { &acc * base % modulus };
            if i + 1 != bits {
                *mults += 1;
            }
        }
    }
    acc
}

/// Same schedule on native words for moduli below `2^64`.
fn counted_modpow_u64(base: u64, exp: &BigUint, modulus: u64, mults: &mut u64) -> u64 {
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % modulus as u128) as u64;
    let mut acc = 1 % modulus;
    let bits = exp.bits();
    for i in (0..bits).rev() {
        if i + 1 != bits {
            acc = mulmod(acc, acc);
            *mults += 1;
        }
        if exp.bit(i) {
            if i + 1 == bits {
                acc = base % modulus;
            } else {
                acc = mulmod(acc, base);
                *mults += 1;
            }
        }
    }
    acc
}

/// The `j`-th generator bit computed directly from the trapdoor, together
/// with the number of modular multiplications spent.
pub fn bbs_bit_at_counted(trapdoor: &BbsTrapdoor, seed: &BigUint, j: u64) -> Result<(bool, u64), RandomnessError> {
    if j < 1 {
        return Err(RandomnessError::Index(j));
    }
    let mut mults = 0;
    let e = counted_modpow(&BigUint::from(2u32), &BigUint::from(j), &trapdoor.carmichael, &mut mults);
    let x = counted_modpow(seed, &e, &trapdoor.n, &mut mults);
    Ok((x.bit(0), mults))
}

/// The `j`-th generator bit (`j ≥ 1`) without stepping through `1..j`.
pub fn bbs_bit_at(trapdoor: &BbsTrapdoor, seed: &BigUint, j: u64) -> Result<bool, RandomnessError> {
    bbs_bit_at_counted(trapdoor, seed, j).map(|(b, _)| b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_path_agrees_with_bigint() {
        let mut x = 0x9e37_79b9_7f4a_7c15u64;
        for _ in 0..200 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            let m = (x >> 1) | 1;
            let (b, e) = (x % m, BigUint::from(x.rotate_left(17)));
            let mut c = 0;
            let got = counted_modpow_u64(b, &e, m, &mut c);
            assert_eq!(BigUint::from(got), BigUint::from(b).modpow(&e, &BigUint::from(m)));
            assert!(c <= 2 * e.bits());
        }
    }
    use crate::randomness::{generate_trapdoor, random_seed};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy() -> (BbsTrapdoor, BbsPublic) {
        let t = BbsTrapdoor::new(7u32.into(), 11u32.into()).unwrap();
        let p = BbsPublic::new(77u32.into(), 2u32.into()).unwrap();
        (t, p)
    }

    #[test]
    fn sequential_matches_hand_computation() {
        let (_, p) = toy();
        let mut s = BbsState::new(&p);
        // 4, 16, 25
        assert_eq!(s.take(3), vec![false, false, true]);
        assert_eq!(s.index(), 3);
    }

    #[test]
    fn seed_one_is_a_fixed_point() {
        let p = BbsPublic::new(77u32.into(), 1u32.into()).unwrap();
        assert!(BbsState::new(&p).take(20).into_iter().all(|b| b));
    }

    #[test]
    fn shortcut_small_example() {
        let (t, p) = toy();
        assert_eq!(t.carmichael(), &BigUint::from(30u32));
        assert!(bbs_bit_at(&t, &p.seed, 3).unwrap());
        let mut s = BbsState::new(&p);
        assert_eq!(bbs_bit_at(&t, &p.seed, 1).unwrap(), s.next_bit());
        assert_eq!(bbs_bit_at(&t, &p.seed, 0), Err(RandomnessError::Index(0)));
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(BbsPublic::new(77u32.into(), 7u32.into()).is_err());
        assert!(BbsPublic::new(78u32.into(), 5u32.into()).is_err());
        assert!(BbsTrapdoor::new(5u32.into(), 11u32.into()).is_err());
    }

    #[test]
    fn monobit_sanity_at_512_bits() {
        let mut rng = ChaCha20Rng::seed_from_u64(512);
        let t = generate_trapdoor(512, &mut rng).unwrap();
        let seed = random_seed(t.modulus(), &mut rng);
        let mut s = BbsState::new(&BbsPublic::new(t.modulus().clone(), seed).unwrap());
        let ones = s.take(1000).into_iter().filter(|&b| b).count();
        assert!((450..=550).contains(&ones), "{ones}");
    }

    #[test]
    fn shortcut_cost_is_logarithmic() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let t = generate_trapdoor(64, &mut rng).unwrap();
        let seed = random_seed(t.modulus(), &mut rng);
        for j in [1u64, 2, 1000, 1 << 40, u64::MAX] {
            let (_, m) = bbs_bit_at_counted(&t, &seed, j).unwrap();
            let bound = 2 * (t.carmichael().bits() + BigUint::from(j).bits());
            assert!(m <= bound, "j={j}: {m} > {bound}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn shortcut_matches_sequential(seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let t = generate_trapdoor(48, &mut rng).unwrap();
            let s = random_seed(t.modulus(), &mut rng);
            let mut st = BbsState::new(&BbsPublic::new(t.modulus().clone(), s.clone()).unwrap());
            for j in 1..=300 {
                prop_assert_eq!(st.next_bit(), bbs_bit_at(&t, &s, j).unwrap());
            }
        }
    }
}
