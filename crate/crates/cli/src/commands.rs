use std::fs::File;
use std::path::Path;
use std::time::Instant;

use svcloud::bits::{bits_to_u64, u64_to_bits};
use svcloud::circuit::atm::{load_atm_csv, nearest_plain, salt_lake_atms, AtmLocation};
use svcloud::circuit::{
    build_adder, build_nearest_atm, bundled_adder_32, circuit_digest, parse_circuit_file, serialize_circuit,
    BooleanCircuit,
};
use svcloud::client::Verdict;
use svcloud::cost::{self, CostParams};
use svcloud::evaluator::CheatMode;
use svcloud::exec::Exec;
use svcloud::ot::SafePrimeGroup;
use svcloud::{run_protocol, ProtocolConfig, RunOutcome};

use crate::args::{AnalyzeArgs, CheatArg, CircuitAction, CircuitSource, Cli, Command, RunArgs};
use crate::error::{CliError, EXIT_REJECT};
use crate::report::Report;

/// Parameters used by `--full-accounting`.
const FULL_K: usize = 128;
const FULL_P_BITS: u64 = 3072;
const FULL_MODULUS_BITS: u64 = 3072;

pub enum Outcome {
    Ok,
    Rejected,
}

impl Outcome {
    pub fn code(&self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Rejected => EXIT_REJECT,
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::DemoAdder { run, x, y, width } => demo_adder(&run, x, y, width),
        Command::DemoAtm { run, east, south, atm_csv, width } => {
            let atms = match atm_csv {
                Some(path) => {
                    let f = File::open(&path).map_err(|e| CliError::io(&path, e))?;
                    load_atm_csv(f)?
                }
                None => salt_lake_atms(),
            };
            demo_atm(&run, east, south, &atms, width)
        }
        Command::Circuit { action } => circuit_tool(action).map(|()| Outcome::Ok),
        Command::Analyze(args) => analyze(&args).map(|()| Outcome::Ok),
    }
}

fn protocol_config(run: &RunArgs) -> Result<ProtocolConfig, CliError> {
    let group = SafePrimeGroup::profile(&run.group_profile).ok_or_else(|| {
        CliError::Usage(format!("unknown group profile {:?} (tiny, 64, 256, 3072)", run.group_profile))
    })?;
    if run.n < 2 {
        return Err(CliError::Usage("at least 2 garblers are required".into()));
    }
    if run.k == 0 {
        return Err(CliError::Usage("k must be positive".into()));
    }
    let mut cfg = ProtocolConfig {
        modulus_bits: run.modulus_bits,
        group,
        seed: run.seed,
        concurrent: run.threads,
        exec: if run.sequential { Exec::Sequential } else { Exec::default() },
        ..ProtocolConfig::desk(run.n, run.k)
    };
    match run.cheat {
        None => {}
        Some(CheatArg::Random) => cfg.cheat = Some(CheatMode::RandomOutputs { seed: run.seed }),
        Some(CheatArg::Flip { output, position }) => cfg.cheat = Some(CheatMode::FlipBit { output, position }),
        Some(CheatArg::DropShare { garbler }) => {
            if garbler >= run.n {
                return Err(CliError::Usage(format!("garbler {garbler} does not exist (n = {})", run.n)));
            }
            cfg.drop_share_from = Some(garbler);
        }
    }
    Ok(cfg)
}

fn check_width(name: &str, value: u64, width: usize) -> Result<(), CliError> {
    if width < 64 && value >> width != 0 {
        return Err(CliError::Usage(format!("{name} = {value} does not fit in {width} bits")));
    }
    Ok(())
}

/// Runs the protocol and writes the common part of a demo report.
fn run_demo(
    run: &RunArgs,
    title: &str,
    circuit: &BooleanCircuit,
    user_bits: &[bool],
    report: &mut Report,
) -> Result<RunOutcome, CliError> {
    let cfg = protocol_config(run)?;
    let (xor, and) = circuit.gate_counts();
    report.line(format!("== {title}"));
    report.kv("seed", run.seed);
    report.kv("garblers", format!("n={} k={}", run.n, run.k));
    report.kv("generator modulus", format!("{} bits", run.modulus_bits));
    report.kv("OT group", format!("{} (|p|={})", cfg.group.name, cfg.group.p_bits()));
    report.kv("scheduler", if run.threads { "concurrent" } else { "deterministic" });
    report.kv(
        "circuit",
        format!(
            "W={} W_i={} W_o={} N_g={}",
            circuit.wire_count(),
            circuit.inputs().len(),
            circuit.outputs().len(),
            circuit.num_gates()
        ),
    );
    report.kv("gate counts", format!("XOR={xor} AND={and}"));

    let start = Instant::now();
    let outcome = run_protocol(circuit, user_bits, &cfg)?;
    eprintln!("protocol run took {:.3?}", start.elapsed());

    if let Some(path) = &run.csv {
        std::fs::write(path, outcome.ledger.to_csv()).map_err(|e| CliError::io(path, e))?;
    }

    report.kv("scheduler steps", outcome.steps);
    report.line("traffic by phase (payload bits):");
    report.line(format!("  {:<20}{:>14}{:>14}{:>8}", "phase", "measured", "model", "delta"));
    for (phase, got, want) in outcome.phase_comparison() {
        let delta = got as i128 - want as i128;
        report.line(format!("  {:<20}{got:>14}{want:>14}{delta:>8}", phase.to_string()));
    }
    let params = CostParams::for_circuit(circuit, run.n, run.k, cfg.group.p_bits(), run.modulus_bits);
    report.kv("client bits", format!("{} (model {})", outcome.client_ledger.total(), cost::client_bits(&params)));
    Ok(outcome)
}

/// Writes the verdict line and returns the decoded plaintext on acceptance.
fn verdict<'a>(outcome: &'a RunOutcome, report: &mut Report) -> Option<&'a [bool]> {
    match outcome.verification.verdict {
        Verdict::Accept => {
            report.kv("verdict", "accept");
            outcome.verification.plaintext.as_deref()
        }
        Verdict::Reject { output, wire } => {
            report.kv("verdict", format!("reject (output {output}, wire {wire})"));
            None
        }
    }
}

fn full_accounting(run: &RunArgs, circuit: &BooleanCircuit, report: &mut Report) {
    if !run.full_accounting {
        return;
    }
    let p = CostParams::for_circuit(circuit, run.n, FULL_K, FULL_P_BITS, FULL_MODULUS_BITS);
    let row = cost::analyze(&p);
    let n = run.n;
    let entries = 4 * circuit.num_gates() as u64;
    let server = entries * row.entry_traffic_bits + row.gc_bits;
    report.line(format!("full-size accounting (n={n}, k={FULL_K}, |p|={FULL_P_BITS}, |N|={FULL_MODULUS_BITS}):"));
    report.kv("  garbled value", format!("{} bits", row.garbled_value_bits));
    report.kv("  traffic per entry", format!("{} bits ({:.2} MB)", row.entry_traffic_bits, row.entry_traffic_mb));
    report.kv("  random bits/entry", format!("{:.2} Mbit", row.random_mbits_per_entry));
    report.kv("  garbled circuit", format!("{} bits ({:.2} MB)", row.gc_bits, row.gc_mb));
    report.kv("  server-side bits", format!("{server} ({:.2} GB)", cost::mbytes(server) / 1024.0));
    report.kv("  client-side bits", format!("{} ({:.2} Kibit)", row.client_bits, row.client_bits as f64 / 1024.0));
    report.kv("  server/client", format!("{:.3e}", server as f64 / row.client_bits as f64));
}

fn demo_adder(run: &RunArgs, x: u64, y: u64, width: usize) -> Result<Outcome, CliError> {
    check_width("x", x, width)?;
    check_width("y", y, width)?;
    let (circuit, carry_in) = if width == 32 { (bundled_adder_32(), false) } else { (build_adder(width)?, true) };
    let mut bits = u64_to_bits(x, width);
    bits.extend(u64_to_bits(y, width));
    if carry_in {
        bits.push(false);
    }

    let mut report = Report::default();
    let outcome = run_demo(run, "adder", &circuit, &bits, &mut report)?;
    report.kv("inputs", format!("x={x} y={y}"));
    let result = verdict(&outcome, &mut report).map(bits_to_u64);
    if let Some(sum) = result {
        report.kv("sum", sum);
    }
    full_accounting(run, &circuit, &mut report);
    report.emit(run.out.as_deref())?;
    Ok(if result.is_some() { Outcome::Ok } else { Outcome::Rejected })
}

fn demo_atm(run: &RunArgs, east: u64, south: u64, atms: &[AtmLocation], width: usize) -> Result<Outcome, CliError> {
    check_width("east", east, width)?;
    check_width("south", south, width)?;
    let locations: Vec<(u64, u64)> = atms.iter().map(|a| (a.east, a.south)).collect();
    let circuit = build_nearest_atm(width, &locations)?;
    let mut bits = u64_to_bits(east, width);
    bits.extend(u64_to_bits(south, width));

    let mut report = Report::default();
    let outcome = run_demo(run, "nearest ATM", &circuit, &bits, &mut report)?;
    report.kv("locations", atms.len());
    report.kv("position", format!("east={east} south={south}"));
    let accepted = match verdict(&outcome, &mut report) {
        Some(pt) => {
            let (e, s) = (bits_to_u64(&pt[..width]), bits_to_u64(&pt[width..2 * width]));
            let d = bits_to_u64(&pt[2 * width..]);
            let name = atms.iter().find(|a| (a.east, a.south) == (e, s)).map_or("?", |a| a.name.as_str());
            report.kv("nearest", format!("{name} at east={e} south={s}"));
            report.kv("distance", d);
            if let Some((i, want)) = nearest_plain(atms, east, south) {
                let agrees = (atms[i].east, atms[i].south, want) == (e, s, d);
                report.kv("plaintext check", if agrees { "agrees" } else { "DISAGREES" });
            }
            true
        }
        None => false,
    };
    full_accounting(run, &circuit, &mut report);
    report.emit(run.out.as_deref())?;
    Ok(if accepted { Outcome::Ok } else { Outcome::Rejected })
}

fn load_circuit(source: &CircuitSource) -> Result<BooleanCircuit, CliError> {
    match source {
        CircuitSource::Adder32 => Ok(bundled_adder_32()),
        CircuitSource::Atm => {
            let locations: Vec<(u64, u64)> = salt_lake_atms().iter().map(|a| (a.east, a.south)).collect();
            Ok(build_nearest_atm(11, &locations)?)
        }
        CircuitSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_circuit_file(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
        }
    }
}

fn circuit_tool(action: CircuitAction) -> Result<(), CliError> {
    match action {
        CircuitAction::Info { source } => {
            let c = load_circuit(&source)?;
            let report = c.gate_count_report();
            let mut r = Report::default();
            r.kv("W", c.wire_count());
            r.kv("W_i", c.inputs().len());
            r.kv("W_o", c.outputs().len());
            r.kv("N_g", c.num_gates());
            r.kv("XOR-class", report.xor_class);
            r.kv("AND-class", report.and_class);
            r.kv("constant one", c.const_one().map_or("none".to_string(), |w| format!("wire {w}")));
            r.kv("digest", circuit_digest(&c).iter().map(|b| format!("{b:02x}")).collect::<String>());
            if report.breakdown.len() > 1 {
                r.line("blocks:");
                for b in &report.breakdown {
                    r.line(format!("  {:<20}XOR={} AND={}", b.name, b.xor_class, b.and_class));
                }
            }
            r.emit(None)
        }
        CircuitAction::Check { source } => {
            let c = load_circuit(&source)?;
            println!("ok: {} gates, {} wires", c.num_gates(), c.wire_count());
            Ok(())
        }
        CircuitAction::Convert { source, out } => {
            let text = serialize_circuit(&load_circuit(&source)?);
            write_or_print(out.as_deref(), &text)
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let circuit = load_circuit(&args.circuit)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for &n in &args.n.0 {
        if n < 2 {
            return Err(CliError::Usage(format!("n = {n}: at least 2 garblers are required")));
        }
        for &k in &args.k.0 {
            for &p_bits in &args.p_bits.0 {
                let p = CostParams::for_circuit(&circuit, n as usize, k as usize, p_bits, args.modulus_bits);
                w.serialize(cost::analyze(&p))?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    write_or_print(args.out.as_deref(), &String::from_utf8_lossy(&bytes))
}
