//! Input sharing without messages: every share a party holds of another
//! party's input is drawn from the pair's common seed through `R`.

use std::collections::BTreeMap;

use crate::bits::BitString;
use crate::randomness::{expand_r, hash_bits};

/// Key for masks on inputs owned by `owner`, derived from the pair seed so
/// the two directions of a pair never reuse a mask.
pub fn directional_seed(pair_seed: &BitString, owner: usize) -> BitString {
    hash_bits(
        b"pair-direction",
        &[&(pair_seed.len() as u64).to_be_bytes(), &pair_seed.to_bytes(), &(owner as u64).to_be_bytes()],
        pair_seed.len(),
    )
}

/// A party's view of the pairwise seeds, ready for share derivation.
#[derive(Clone, Debug)]
pub struct ShareKeys {
    me: usize,
    /// `(partner, key for my inputs, key for partner's inputs)`.
    partners: Vec<(usize, BitString, BitString)>,
}

impl ShareKeys {
    /// `pair_seeds` maps every other party index to the seed shared with it.
    pub fn new(me: usize, n: usize, pair_seeds: &BTreeMap<usize, BitString>) -> Option<Self> {
        let partners = (1..=n)
            .filter(|&k| k != me)
            .map(|k| pair_seeds.get(&k).map(|s| (k, directional_seed(s, me), directional_seed(s, k))))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { me, partners })
    }

    pub fn me(&self) -> usize {
        self.me
    }

    /// This party's shares of `owner`'s `m` inputs for one circuit instance.
    /// `private` must be given exactly when `owner` is this party.
    /// `r_bits` is incremented by the number of `R` evaluations.
    pub fn share_inputs(
        &self,
        owner: usize,
        private: Option<&[bool]>,
        m: usize,
        gate_id: u64,
        entry_id: u8,
        r_bits: &mut u64,
    ) -> Vec<bool> {
        let r = |key: &BitString, j: usize| expand_r(key, j as u64 + 1, gate_id, entry_id);
        if owner == self.me {
            let x = private.expect("own inputs required");
            assert_eq!(x.len(), m);
            *r_bits += (m * self.partners.len()) as u64;
            (0..m).map(|j| self.partners.iter().fold(x[j], |acc, (_, mine, _)| acc ^ r(mine, j))).collect()
        } else {
            let (_, _, theirs) = self.partners.iter().find(|(k, _, _)| *k == owner).expect("owner is a partner");
            *r_bits += m as u64;
            (0..m).map(|j| r(theirs, j)).collect()
        }
    }
}
