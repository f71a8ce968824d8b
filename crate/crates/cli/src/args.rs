use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "svcloud", version, about = "Multi-server garbled circuits with client-side verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add two integers end to end and verify the result.
    DemoAdder {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 7)]
        x: u64,
        #[arg(long, default_value_t = 9)]
        y: u64,
        /// Operand width; 32 uses the bundled netlist.
        #[arg(long, default_value_t = 32)]
        width: usize,
    },
    /// Find the nearest bank location to a private position.
    DemoAtm {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0)]
        east: u64,
        #[arg(long, default_value_t = 0)]
        south: u64,
        /// `name,east,south` CSV; defaults to the bundled Salt Lake table.
        #[arg(long)]
        atm_csv: Option<PathBuf>,
        /// Coordinate width in bits.
        #[arg(long, default_value_t = 11)]
        width: usize,
    },
    /// Circuit file tooling.
    Circuit {
        #[command(subcommand)]
        action: CircuitAction,
    },
    /// Cost-model table as CSV over a parameter grid.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Subcommand)]
pub enum CircuitAction {
    /// Print wire and gate statistics.
    Info { source: CircuitSource },
    /// Parse and validate; exits non-zero with a line diagnostic on error.
    Check { source: CircuitSource },
    /// Rewrite a native or Bristol file in the native format.
    Convert {
        source: CircuitSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A circuit file path, or `bundled:adder32` / `bundled:atm`.
#[derive(Clone, Debug)]
pub enum CircuitSource {
    Adder32,
    Atm,
    File(PathBuf),
}

impl FromStr for CircuitSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix("bundled:") {
            Some("adder32") => Ok(CircuitSource::Adder32),
            Some("atm") => Ok(CircuitSource::Atm),
            Some(other) => Err(format!("unknown bundled circuit {other:?} (adder32, atm)")),
            None => Ok(CircuitSource::File(s.into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheatArg {
    Random,
    Flip { output: usize, position: usize },
    DropShare { garbler: usize },
}

impl FromStr for CheatArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| format!("bad number {t:?} in cheat mode {s:?}"));
        match parts.as_slice() {
            ["random"] => Ok(CheatArg::Random),
            ["flip", o, p] => Ok(CheatArg::Flip { output: num(o)?, position: num(p)? }),
            ["drop-share", g] => Ok(CheatArg::DropShare { garbler: num(g)? }),
            _ => Err(format!("unknown cheat mode {s:?} (random, flip:<output>:<bit>, drop-share:<garbler>)")),
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Number of garblers.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Generator bits per wire label share.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    /// Bit length of the generator modulus.
    #[arg(long, default_value_t = 128)]
    pub modulus_bits: u64,
    /// OT group: tiny, 64, 256 or 3072.
    #[arg(long, default_value = "tiny")]
    pub group_profile: String,
    /// Seeds key generation and the scheduler.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Misbehaviour to inject: random, flip:<output>:<bit>, drop-share:<garbler>.
    #[arg(long)]
    pub cheat: Option<CheatArg>,
    /// Write the per-channel traffic ledger as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// One thread per party with free interleaving.
    #[arg(long)]
    pub threads: bool,
    /// Run batch loops on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
    /// Append cost-model totals at k=128 with 3072-bit moduli.
    #[arg(long)]
    pub full_accounting: bool,
}

#[derive(Clone, Debug, Args)]
pub struct AnalyzeArgs {
    /// Garbler counts, e.g. `2..8` or `2,4,5`.
    #[arg(long, default_value = "2..8")]
    pub n: Grid,
    #[arg(long, default_value = "128")]
    pub k: Grid,
    /// OT prime bit lengths.
    #[arg(long, default_value = "3072")]
    pub p_bits: Grid,
    #[arg(long, default_value_t = 3072)]
    pub modulus_bits: u64,
    /// Circuit the sizes refer to.
    #[arg(long, default_value = "bundled:adder32")]
    pub circuit: CircuitSource,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Comma-separated values and inclusive `a..b` ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid(pub Vec<u64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad number {t:?} in {s:?}"));
        let mut out = Vec::new();
        for item in s.split(',') {
            match item.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b)?);
                    if a > b {
                        return Err(format!("empty range {item:?}"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(num(item)?),
            }
        }
        Ok(Grid(out))
    }
}
