use rand::seq::SliceRandom;
use rand::Rng;

use super::{BooleanCircuit, CircuitError, Gate, TruthTable, Wire};

/// A random circuit with arbitrary gate tables; gate inputs are drawn from
/// all earlier wires and the outputs are the last `outputs` gate wires.
pub fn random_circuit<R: Rng + ?Sized>(
    rng: &mut R,
    inputs: usize,
    gates: usize,
    outputs: usize,
) -> Result<BooleanCircuit, CircuitError> {
    if inputs == 0 || gates == 0 || outputs == 0 || outputs > gates {
        return Err(CircuitError::Parameter(format!(
            "random circuit with {inputs} inputs, {gates} gates, {outputs} outputs"
        )));
    }
    let mut gs = Vec::with_capacity(gates);
    for t in 0..gates {
        let avail = inputs + t;
        let left = Wire(rng.gen_range(0..avail));
        let right = Wire(rng.gen_range(0..avail));
        gs.push(Gate { left, right, out: Wire(avail), table: TruthTable(rng.gen_range(0..16)) });
    }
    let ins = (0..inputs).map(Wire).collect();
    let outs = (inputs + gates - outputs..inputs + gates).map(Wire).collect();
    BooleanCircuit::new(inputs + gates, gs, ins, outs, None)
}

/// Like [`random_circuit`] but with tables drawn from `tables`.
pub fn random_circuit_with<R: Rng + ?Sized>(
    rng: &mut R,
    inputs: usize,
    gates: usize,
    outputs: usize,
    tables: &[TruthTable],
) -> Result<BooleanCircuit, CircuitError> {
    let c = random_circuit(rng, inputs, gates, outputs)?;
    let gs =
        c.gates().iter().map(|g| Gate { table: *tables.choose(rng).expect("non-empty table set"), ..*g }).collect();
    BooleanCircuit::new(c.wire_count(), gs, c.inputs().to_vec(), c.outputs().to_vec(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn shape() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let c = random_circuit(&mut rng, 4, 10, 3).unwrap();
        assert_eq!((c.wire_count(), c.num_gates(), c.outputs().len()), (14, 10, 3));
        let x = random_circuit_with(&mut rng, 2, 5, 1, &[TruthTable::XOR]).unwrap();
        assert_eq!(x.gate_counts(), (5, 0));
        assert!(random_circuit(&mut rng, 2, 2, 3).is_err());
    }
}
