use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

use super::{BbsTrapdoor, RandomnessError};

const SMALL_PRIMES: [u32; 24] =
    [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];
const MR_ROUNDS: usize = 40;
const MAX_ATTEMPTS: usize = 1_000_000;

/// Miller-Rabin with `rounds` random bases.
pub fn is_probable_prime<R: RngCore + ?Sized>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    if n.is_even() {
        return *n == two;
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A random `bits`-bit prime `p ≡ 3 (mod 4)` with its two top bits set, so
/// the product of two such primes has exactly `2·bits` bits.
pub fn random_blum_prime<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> Result<BigUint, RandomnessError> {
    if bits < 3 {
        return Err(RandomnessError::PrimeGeneration { bits, attempts: 0 });
    }
    for _ in 0..MAX_ATTEMPTS {
        let mut c = rng.gen_biguint(bits);
        c.set_bit(bits - 1, true);
        c.set_bit(bits - 2, true);
        c.set_bit(0, true);
        c.set_bit(1, true);
        if is_probable_prime(&c, MR_ROUNDS, rng) {
            return Ok(c);
        }
    }
    Err(RandomnessError::PrimeGeneration { bits, attempts: MAX_ATTEMPTS })
}

/// Generates `N = p·q` of exactly `modulus_bits` bits (even, ≥ 8).
pub fn generate_trapdoor<R: RngCore + ?Sized>(modulus_bits: u64, rng: &mut R) -> Result<BbsTrapdoor, RandomnessError> {
    if modulus_bits < 8 || modulus_bits % 2 == 1 {
        return Err(RandomnessError::Modulus(format!(
            "modulus size must be even and at least 8 bits, got {modulus_bits}"
        )));
    }
    let p = random_blum_prime(modulus_bits / 2, rng)?;
    loop {
        let q = random_blum_prime(modulus_bits / 2, rng)?;
        if q != p {
            return BbsTrapdoor::new(p, q);
        }
    }
}

/// A uniformly random seed in `Z*_N` other than 1.
pub fn random_seed<R: RngCore + ?Sized>(n: &BigUint, rng: &mut R) -> BigUint {
    let two = BigUint::from(2u32);
    loop {
        let s = rng.gen_biguint_range(&two, n);
        if s.gcd(n).is_one() {
            return s;
        }
    }
}
