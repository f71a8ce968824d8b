use crate::bits::BitString;

use super::BmrError;

/// Header of the serialized garbled circuit: `n` (u16), `k` (u16), gate
/// count (u32), circuit digest (32 bytes), all big-endian.
pub const GC_HEADER_BYTES: usize = 40;

/// Per-gate rows `[A00, A01, A10, A11]`, each `nk + 1` bits, in gate order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GarbledCircuit {
    pub n: usize,
    pub k: usize,
    pub circuit_digest: [u8; 32],
    pub tables: Vec<[BitString; 4]>,
}

impl GarbledCircuit {
    pub fn value_bits(&self) -> usize {
        self.n * self.k + 1
    }

    pub fn num_gates(&self) -> usize {
        self.tables.len()
    }

    /// `4 N_g (nk + 1)`.
    pub fn size_bits(&self) -> usize {
        4 * self.num_gates() * self.value_bits()
    }

    pub fn to_bits(&self) -> BitString {
        BitString::concat(self.tables.iter().flatten())
    }

    pub fn from_bits(
        n: usize,
        k: usize,
        circuit_digest: [u8; 32],
        gates: usize,
        bits: &BitString,
    ) -> Result<Self, BmrError> {
        let v = n * k + 1;
        if bits.len() != 4 * gates * v {
            return Err(BmrError::Length { what: "garbled circuit", expected: 4 * gates * v, got: bits.len() });
        }
        let tables =
            (0..gates).map(|g| std::array::from_fn(|e| bits.slice((4 * g + e) * v..(4 * g + e + 1) * v))).collect();
        Ok(Self { n, k, circuit_digest, tables })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(GC_HEADER_BYTES + self.size_bits().div_ceil(8));
        out.extend((self.n as u16).to_be_bytes());
        out.extend((self.k as u16).to_be_bytes());
        out.extend((self.num_gates() as u32).to_be_bytes());
        out.extend(self.circuit_digest);
        out.extend(self.to_bits().to_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, BmrError> {
        if bytes.len() < GC_HEADER_BYTES {
            return Err(BmrError::Length {
                what: "garbled circuit header",
                expected: GC_HEADER_BYTES,
                got: bytes.len(),
            });
        }
        let n = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
        let k = u16::from_be_bytes([bytes[2], bytes[3]]) as usize;
        let gates = u32::from_be_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
        let digest: [u8; 32] = bytes[8..40].try_into().expect("32 bytes");
        let nbits = 4 * gates * (n * k + 1);
        let body = &bytes[GC_HEADER_BYTES..];
        if body.len() != nbits.div_ceil(8) {
            return Err(BmrError::Length {
                what: "garbled circuit body bytes",
                expected: nbits.div_ceil(8),
                got: body.len(),
            });
        }
        Self::from_bits(n, k, digest, gates, &BitString::from_bytes(body, nbits))
    }
}

/// One party's XOR share of the garbled circuit: its share of every row,
/// gate by gate, rows in `(a, b)` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcShare {
    pub party: usize,
    pub bits: BitString,
}

/// XORs all parties' shares. `shares[i]` must come from party `i + 1`;
/// `None` marks a share that never arrived.
pub fn combine_shares(
    n: usize,
    k: usize,
    circuit_digest: [u8; 32],
    gates: usize,
    shares: &[Option<GcShare>],
) -> Result<GarbledCircuit, BmrError> {
    let expected = 4 * gates * (n * k + 1);
    if shares.len() != n {
        return Err(BmrError::Length { what: "share list", expected: n, got: shares.len() });
    }
    let mut acc = BitString::zeros(expected);
    for (i, s) in shares.iter().enumerate() {
        let s = s.as_ref().ok_or(BmrError::MissingShare { party: i + 1 })?;
        if s.bits.len() != expected {
            return Err(BmrError::ShareLength { party: i + 1, expected, got: s.bits.len() });
        }
        acc ^= &s.bits;
    }
    GarbledCircuit::from_bits(n, k, circuit_digest, gates, &acc)
}
