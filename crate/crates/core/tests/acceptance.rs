//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use svcloud::bits::BitString;
use svcloud::bmr::{dealer_garble, WireSecrets};
use svcloud::circuit::atm::salt_lake_locations;
use svcloud::circuit::{
    build_adder, build_manhattan, build_min_tree, build_nearest_atm, bundled_adder_32, circuit_digest, random_circuit,
    BooleanCircuit, CircuitBuilder, TruthTable,
};
use svcloud::client::coalition_lambda_candidates;
use svcloud::cost::{self, CostParams};
use svcloud::evaluator::CheatMode;
use svcloud::ot::{ot2, ot4, SafePrimeGroup};
use svcloud::randomness::{
    bbs_bit_at_counted, generate_trapdoor, random_seed, AesExpander, BbsPublic, BbsState, WireShareLayout,
};
use svcloud::{run_protocol, ProtocolConfig};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn and_circuit() -> BooleanCircuit {
    let mut b = CircuitBuilder::new();
    let x = b.input();
    let y = b.input();
    let z = b.gate(TruthTable::AND, x, y);
    b.output(z);
    b.finish().expect("valid circuit")
}

fn input_sets(c: &BooleanCircuit, rng: &mut ChaCha20Rng) -> Vec<Vec<bool>> {
    let m = c.num_user_inputs();
    if m <= 8 {
        (0u32..1 << m).map(|v| (0..m).map(|i| v >> i & 1 == 1).collect()).collect()
    } else {
        (0..500).map(|_| (0..m).map(|_| rng.gen()).collect()).collect()
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let circuits = [
        ("AND", and_circuit()),
        ("adder(4)", build_adder(4).map_err(|e| e.to_string())?),
        ("manhattan(4)", build_manhattan(4).map_err(|e| e.to_string())?),
        ("min-tree(L=4)", build_min_tree(3, 2, 4).map_err(|e| e.to_string())?),
    ];
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut cases = 0;
    for (name, c) in &circuits {
        for n in [2, 3] {
            for k in [2, 8] {
                let inputs = input_sets(c, &mut rng);
                let cfg = ProtocolConfig { seed: rng.gen(), modulus_bits: 64, ..ProtocolConfig::desk(n, k) };
                let mut out = run_protocol(c, &inputs[0], &cfg).map_err(|e| format!("{name} n={n} k={k}: {e}"))?;
                for (i, x) in inputs.iter().enumerate() {
                    let v = if i == 0 {
                        out.verification.clone()
                    } else {
                        out.evaluate_again(c, x, None).map_err(|e| e.to_string())?
                    };
                    let want = c
                        .eval_plaintext(&c.assemble_inputs(x).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    check(v.accepted(), || format!("{name} n={n} k={k}: rejected {x:?}"))?;
                    check(v.plaintext.as_deref() == Some(&want[..]), || {
                        format!("{name} n={n} k={k}: wrong output for {x:?}")
                    })?;
                    cases += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(60), || format!("took {t:.1?}, target 60 s"))?;
    Ok(format!("{cases} evaluations over 16 configurations, all correct and accepted, {:.1?}", t))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut entries = 0;
    for t in 0..50 {
        let n = 2 + t % 2;
        let k = 1 + (t / 2) % 2;
        let c = random_circuit(&mut rng, 4, 10, 3).map_err(|e| e.to_string())?;
        let x: Vec<bool> = (0..c.num_user_inputs()).map(|_| rng.gen()).collect();
        let cfg = ProtocolConfig { seed: t as u64, modulus_bits: 64, ..ProtocolConfig::desk(n, k) };
        let out = run_protocol(&c, &x, &cfg).map_err(|e| e.to_string())?;
        let layout = WireShareLayout::new(k);
        let shares = (1..=n)
            .map(|i| layout.split_stream(&BbsState::new(&out.client.public(i)).take(layout.total_bits(c.wire_count()))))
            .collect();
        let dealer = dealer_garble(&c, &WireSecrets { n, k, shares }, &AesExpander, circuit_digest(&c));
        for (g, (a, b)) in out.gc.tables.iter().zip(&dealer.tables).enumerate() {
            for e in 0..4 {
                check(a[e] == b[e], || format!("circuit {t} gate {g} entry {e} differs"))?;
                entries += 1;
            }
        }
    }
    Ok(format!("50 circuits, {entries} entries, 0 mismatches"))
}

fn criterion_3() -> Outcome {
    let atm = build_nearest_atm(11, &salt_lake_locations()).map_err(|e| e.to_string())?;
    let (x, a) = atm.gate_counts();
    check((x, a) == (2596, 854), || format!("nearest ATM counts ({x}, {a})"))?;
    let adder = bundled_adder_32();
    let shape = (adder.num_gates(), adder.wire_count(), adder.outputs().len());
    check(shape == (375, 439, 33), || format!("adder (N_g, W, W_o) = {shape:?}"))?;
    let entry = svcloud::bmr::build_entry_circuit(6, 128, TruthTable::AND, false, true).map_err(|e| e.to_string())?;
    let ec = entry.gate_counts();
    check(ec == (10782, 769), || format!("entry circuit counts {ec:?}"))?;
    Ok(format!("ATM XOR={x} AND={a}; adder N_g=375 W=439 W_o=33; entry circuit {ec:?}"))
}

fn criterion_4() -> Outcome {
    let s14 = cost::ot4_bits(3072, 128);
    check(s14 == 3200 * 8, || format!("s14 = {s14} bits"))?;
    let t = cost::entry_traffic(5, 128, 3072);
    check(t == 164_099_205, || format!("T = {t}"))?;
    let mb = format!("{:.2}", cost::mbytes(t));
    check(mb == "19.56", || format!("T = {mb} MB"))?;
    let adder = bundled_adder_32();
    let rb = cost::random_bits(&CostParams::for_circuit(&adder, 5, 128, 3072, 3072));
    let per_entry = rb.per_entry_mbits(375);
    check((per_entry - 153.41).abs() <= 0.005, || format!("random bits per entry {per_entry:.4} Mbit"))?;
    let gv = cost::garbled_value_bits(5, 128);
    check(gv == 641, || format!("garbled value {gv} bits"))?;
    Ok(format!("s14=3200 B, T={t} bits ({mb} MB), {per_entry:.2} Mbit per entry, garbled value {gv} bits"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut compared = 0;
    for n in [2, 3] {
        for k in [2, 8] {
            let c = random_circuit(&mut rng, 3, 5, 2).map_err(|e| e.to_string())?;
            let x: Vec<bool> = (0..c.num_user_inputs()).map(|_| rng.gen()).collect();
            let out = run_protocol(&c, &x, &ProtocolConfig::desk(n, k)).map_err(|e| e.to_string())?;
            for (phase, got, want) in out.phase_comparison() {
                check(got == want, || format!("n={n} k={k} {}: measured {got}, predicted {want}", phase.name()))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} phase totals equal their predictions"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut checked = 0u64;
    for pair in 0..20 {
        let t = generate_trapdoor(64, &mut rng).map_err(|e| e.to_string())?;
        let seed = random_seed(t.modulus(), &mut rng);
        let bbs = BbsPublic::new(t.modulus().clone(), seed.clone()).map_err(|e| e.to_string())?;
        let mut sampled: Vec<u64> = (0..100).map(|_| rng.gen_range(1..=1_000_000)).collect();
        sampled.sort_unstable();
        let mut next = sampled.iter().peekable();
        let mut st = BbsState::new(&bbs);
        let bound = |j: u64| 2 * (t.carmichael().bits() + (64 - j.leading_zeros() as u64));
        for j in 1..=1_000_000u64 {
            let b = st.next_bit();
            let dense = j <= 10_000;
            let mut sampled_here = false;
            while next.peek() == Some(&&j) {
                next.next();
                sampled_here = true;
            }
            if dense || sampled_here {
                let (s, mults) = bbs_bit_at_counted(&t, &seed, j).map_err(|e| e.to_string())?;
                check(s == b, || format!("pair {pair}: bit {j} differs"))?;
                check(mults <= bound(j), || format!("pair {pair}: {mults} multiplications at j={j}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("20 moduli, {checked} indices, 0 mismatches, cost within 2(bitlen C + bitlen j)"))
}

fn criterion_7() -> Outcome {
    let g = SafePrimeGroup::bits256();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let k = 128;
    for trial in 0..1000 {
        let m: [BitString; 4] = std::array::from_fn(|_| BitString::random(&mut rng, k));
        for sigma in [false, true] {
            let (got, tr) = ot2(&g, &m[0], &m[1], sigma, &mut rng).map_err(|e| e.to_string())?;
            check(got == m[sigma as usize], || format!("trial {trial}: 1-of-2 returned the wrong message"))?;
            check(tr.payload_bits(&g) == cost::ot2_bits(g.p_bits(), k as u64), || "1-of-2 payload".into())?;
        }
        for choice in 0..4 {
            let sel = (choice >> 1 == 1, choice & 1 == 1);
            let (got, tr) = ot4(&g, &m, sel, &mut rng).map_err(|e| e.to_string())?;
            check(got == m[choice], || format!("trial {trial}: 1-of-4 returned the wrong message"))?;
            check(tr.payload_bits(&g) == cost::ot4_bits(g.p_bits(), k as u64), || "1-of-4 payload".into())?;
        }
    }
    Ok(format!("1000 message sets, 6000 transfers at |p|={}, payloads exact", g.p_bits()))
}

fn criterion_8() -> Outcome {
    let c = build_adder(4).map_err(|e| e.to_string())?;
    check(c.outputs().len() == 5, || "adder(4) should have 5 outputs".into())?;
    let (n, k) = (2, 4);
    let x = vec![true, false, true, false, false, true, true, false, false];
    let mut out = run_protocol(&c, &x, &ProtocolConfig::desk(n, k)).map_err(|e| e.to_string())?;
    let mut rejected = 0;
    for trial in 0..1000 {
        let v =
            out.evaluate_again(&c, &x, Some(CheatMode::RandomOutputs { seed: trial })).map_err(|e| e.to_string())?;
        rejected += !v.accepted() as usize;
    }
    check(rejected == 1000, || format!("random outputs rejected {rejected}/1000"))?;
    let v = n * k + 1;
    for output in 0..5 {
        for position in 0..v {
            let r =
                out.evaluate_again(&c, &x, Some(CheatMode::FlipBit { output, position })).map_err(|e| e.to_string())?;
            check(!r.accepted(), || format!("flip of bit {position} in output {output} accepted"))?;
        }
    }
    Ok(format!("random outputs rejected 1000/1000 at nk+1={v}; all {} single-bit flips rejected", 5 * v))
}

fn criterion_9() -> Outcome {
    let c = build_adder(3).map_err(|e| e.to_string())?;
    let n = 3;
    let out = run_protocol(&c, &[false; 7], &ProtocolConfig::desk(n, 2)).map_err(|e| e.to_string())?;
    let mut client = out.client;
    let mut subsets = 0;
    for w in 0..c.wire_count() {
        let shares = client.lambda_shares(w);
        for mask in 0u32..(1 << n) - 1 {
            let coalition: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let cands = coalition_lambda_candidates(&shares, &coalition);
            check(cands == [false, true], || format!("wire {w}: coalition {coalition:?} determines the mask"))?;
            subsets += 1;
        }
    }
    Ok(format!("{} wires x 7 strict coalitions: mask undetermined in all {subsets} cases", c.wire_count()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("end-to-end correctness", criterion_1),
        ("dealer equivalence", criterion_2),
        ("gate counts", criterion_3),
        ("cost formulas", criterion_4),
        ("ledger vs model", criterion_5),
        ("generator shortcut", criterion_6),
        ("oblivious transfer", criterion_7),
        ("cheating detection", criterion_8),
        ("coalition structure", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| label.contains(p.as_str()) || name.contains(p.as_str())) {
            continue;
        }
        match f() {
            Ok(detail) => println!("PASS {label} ({name}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {label} ({name}): {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
