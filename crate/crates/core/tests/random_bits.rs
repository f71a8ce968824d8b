//! Per-garbler randomness counters against the cost model.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use svcloud::circuit::{build_adder, build_manhattan, random_circuit};
use svcloud::cost::{predict_random_bits, random_bits, CostParams};
use svcloud::{run_protocol, ProtocolConfig};

fn check(circuit: &svcloud::circuit::BooleanCircuit, n: usize, k: usize) {
    let cfg = ProtocolConfig { modulus_bits: 64, ..ProtocolConfig::desk(n, k) };
    let bits = vec![true; circuit.num_user_inputs()];
    let out = run_protocol(circuit, &bits, &cfg).unwrap();
    let p = CostParams::for_circuit(circuit, n, k, cfg.group.p_bits(), cfg.modulus_bits);
    let want = predict_random_bits(circuit, &p, cfg.group.q_bits());
    let sum = |f: fn(&svcloud::bmr::GarblerStats) -> u64| out.garbler_stats.iter().map(f).sum::<u64>();
    assert_eq!(sum(|s| s.bbs_bits), want.b1, "generator bits, n={n} k={k}");
    assert_eq!(sum(|s| s.g_bits), want.b2, "expander bits, n={n} k={k}");
    assert_eq!(sum(|s| s.r_bits), want.b3, "mask bits, n={n} k={k}");
    assert_eq!(sum(|s| s.gmw.ot_random_bits), want.b4, "transfer bits, n={n} k={k}");
    // b1 and b3 need no class or wire refinement.
    let flat = random_bits(&p);
    assert_eq!((flat.b1, flat.b3), (want.b1, want.b3));
}

#[test]
fn counters_match_prediction_on_builders() {
    for (n, k) in [(2, 2), (3, 4)] {
        check(&build_adder(3).unwrap(), n, k);
        check(&build_manhattan(2).unwrap(), n, k);
    }
}

#[test]
fn counters_match_prediction_on_random_circuits() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..4 {
        let c = random_circuit(&mut rng, 4, 8, 2).unwrap();
        check(&c, 2, 3);
    }
}
