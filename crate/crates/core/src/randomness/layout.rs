use num_bigint::BigUint;

use super::{bbs_bit_at, BbsTrapdoor, RandomnessError};
use crate::bits::BitString;

/// Where wire `ω`'s bits sit in a party's generator stream: indices
/// `ω(2k+1)+1 ..= (ω+1)(2k+1)`, split as share of `ω₀` (k bits), share of
/// `ω₁` (k bits), then the λ share.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WireShareLayout {
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireShare {
    pub share0: BitString,
    pub share1: BitString,
    pub lambda: bool,
}

impl WireShare {
    pub fn share(&self, bit: bool) -> &BitString {
        if bit {
            &self.share1
        } else {
            &self.share0
        }
    }
}

impl WireShareLayout {
    pub fn new(k: usize) -> Self {
        Self { k }
    }

    pub fn bits_per_wire(&self) -> usize {
        2 * self.k + 1
    }

    /// `Ω = ω(2k+1)`; the wire's first bit is at `Ω + 1`.
    pub fn base(&self, wire: usize) -> u64 {
        (wire * self.bits_per_wire()) as u64
    }

    pub fn indices(&self, wire: usize) -> std::ops::RangeInclusive<u64> {
        let base = self.base(wire);
        base + 1..=base + self.bits_per_wire() as u64
    }

    pub fn total_bits(&self, wires: usize) -> usize {
        wires * self.bits_per_wire()
    }

    /// Splits a wire's `2k+1` consecutive stream bits.
    pub fn split(&self, bits: &[bool]) -> WireShare {
        assert_eq!(bits.len(), self.bits_per_wire());
        let k = self.k;
        WireShare {
            share0: BitString::from_bools(bits[..k].to_vec()),
            share1: BitString::from_bools(bits[k..2 * k].to_vec()),
            lambda: bits[2 * k],
        }
    }

    /// Splits a sequential stream covering wires `0..W` in order.
    pub fn split_stream(&self, stream: &[bool]) -> Vec<WireShare> {
        stream.chunks(self.bits_per_wire()).map(|c| self.split(c)).collect()
    }
}

/// One party's shares for wire `ω`, read directly via the trapdoor.
pub fn derive_wire_shares(
    trapdoor: &BbsTrapdoor,
    seed: &BigUint,
    layout: WireShareLayout,
    wire: usize,
) -> Result<WireShare, RandomnessError> {
    let bits = layout.indices(wire).map(|j| bbs_bit_at(trapdoor, seed, j)).collect::<Result<Vec<_>, _>>()?;
    Ok(layout.split(&bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomness::{BbsPublic, BbsState};

    #[test]
    fn first_wire_uses_bits_one_to_five() {
        let l = WireShareLayout::new(2);
        assert_eq!(l.indices(0), 1..=5);
        assert_eq!(l.indices(1), 6..=10);
        let s = l.split(&[true, false, false, true, true]);
        assert_eq!(s.share0.as_bools(), &[true, false]);
        assert_eq!(s.share1.as_bools(), &[false, true]);
        assert!(s.lambda);
    }

    #[test]
    fn layouts_tile_the_stream() {
        for k in 1..6 {
            let l = WireShareLayout::new(k);
            let mut next = 1;
            for w in 0..20 {
                let r = l.indices(w);
                assert_eq!(*r.start(), next);
                next = r.end() + 1;
            }
            assert_eq!(next - 1, l.total_bits(20) as u64);
        }
    }

    #[test]
    fn shortcut_shares_match_the_sequential_stream() {
        let t = BbsTrapdoor::new(1019u32.into(), 1031u32.into()).unwrap();
        let seed = BigUint::from(4242u32);
        let layout = WireShareLayout::new(3);
        let mut st = BbsState::new(&BbsPublic::new(t.modulus().clone(), seed.clone()).unwrap());
        let stream = st.take(layout.total_bits(6));
        let seq = layout.split_stream(&stream);
        for (w, s) in seq.iter().enumerate() {
            assert_eq!(&derive_wire_shares(&t, &seed, layout, w).unwrap(), s);
        }
    }
}
