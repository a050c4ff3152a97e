use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polarcodes::channel::{ChannelParam, DiscreteSymmetricChannel};
use polarcodes::concat::{
    concat_decode, concat_encode, concat_fer_bound, design_report, dp_allocate, ColumnErrorTable, ConcatSpec,
};
use polarcodes::construct::{analyze, construct, BoxMode};
use polarcodes::density::LlrGrid;
use polarcodes::llr::TieBreak;
use polarcodes::polar::{encode, format_bits, parse_bits, sc_decode, PolarCodeSpec};
use polarcodes::shortcodes::{min_distance, CodeTable, REFERENCE_DISTANCES};
use polarcodes::sim::{run_mc, sweep_csv, McOptions, PolarCodec, SweepPoint};
use polarcodes::Error;

#[derive(Parser)]
#[command(name = "polar", version, about = "Polar and concatenated polar codes")]
struct Cli {
    /// Worker threads for Monte-Carlo and density evolution (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a polar code by density evolution.
    Construct(ConstructArgs),
    /// Design a concatenated code: per-column code choice by dynamic programming.
    ConstructConcat(ConstructConcatArgs),
    /// Monte-Carlo frame error rate, as CSV.
    Simulate(SimulateArgs),
    /// Union bound of an existing code on a channel.
    Analyze(AnalyzeArgs),
    /// Encode information bits.
    Encode(CodingArgs),
    /// Decode channel LLRs to information bits.
    Decode(DecodeArgs),
    /// Recompute the minimum distance of every code in a table and compare
    /// with the reference list.
    VerifyCodes(VerifyArgs),
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Largest representable LLR.
    #[arg(long = "grid-a", default_value_t = 60.0)]
    a: f64,
    /// Grid points per side.
    #[arg(long = "grid-q", default_value_t = 8192)]
    q: usize,
    /// Check-node convolution: `fast` or `exact`.
    #[arg(long = "box", default_value = "fast")]
    mode: BoxMode,
}

impl GridArgs {
    fn grid(&self) -> polarcodes::Result<LlrGrid> {
        LlrGrid::with_bound(self.q, self.a)
    }
}

/// Either a polar frozen-set file or a concatenated assignment.
#[derive(Args, Clone)]
struct CodeArgs {
    /// Frozen-set file of a polar code.
    #[arg(long, conflicts_with = "concat", required_unless_present = "concat")]
    code: Option<PathBuf>,
    /// Assignment file of a concatenated code.
    #[arg(long)]
    concat: Option<PathBuf>,
    /// Code table for `--concat` (default: the built-in length-32 table).
    #[arg(long, requires = "concat")]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    /// `bsc:p`, `bec:p`, `awgn:snr_db` or a channel file.
    #[arg(long)]
    channel: String,
    /// log2 of the code length.
    #[arg(long)]
    n: usize,
    /// Information bits.
    #[arg(long, conflicts_with = "rate", required_unless_present = "rate")]
    k: Option<usize>,
    /// K as a fraction of the length, rounded to the nearest integer.
    #[arg(long)]
    rate: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    /// Frozen-set output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-bit error profile output.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructConcatArgs {
    /// `bsc:p`, `bec:p`, `awgn:snr_db` or a channel file.
    #[arg(long)]
    channel: String,
    /// log2 of the row length N.
    #[arg(long)]
    n: usize,
    /// Column length; must match the table.
    #[arg(long, default_value_t = 32)]
    m: usize,
    /// Total information bits.
    #[arg(long)]
    k: usize,
    /// Column code table (default: the built-in length-32 table).
    #[arg(long)]
    table: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    /// Assignment output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Design report: per-column choice and estimated error.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Channel, or the family of a sweep (`bsc`, `bec`, `awgn`) when `--params` is given.
    #[arg(long)]
    channel: String,
    /// Comma-separated channel parameters to sweep.
    #[arg(long, value_delimiter = ',')]
    params: Vec<f64>,
    /// Frames per parameter point.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random-number streams; results depend on this, not on `--threads`.
    #[arg(long, default_value_t = polarcodes::sim::DEFAULT_SHARDS)]
    shards: usize,
    /// Send random messages instead of the all-zero codeword.
    #[arg(long)]
    random_messages: bool,
    /// Leave the de_bound column empty instead of running density evolution.
    #[arg(long)]
    no_bound: bool,
    #[command(flatten)]
    grid: GridArgs,
    /// CSV output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// `bsc:p`, `bec:p`, `awgn:snr_db` or a channel file.
    #[arg(long)]
    channel: String,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct CodingArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Bit text file (`-` or absent: stdin).
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Whitespace-separated channel LLRs, or channel outputs with `--channel`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Treat the input as channel outputs of this channel.
    #[arg(long)]
    channel: Option<String>,
    /// Seed for random tie breaking in SC decisions.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Table file (default: the built-in table).
    table: Option<PathBuf>,
}

/// A `K_target` no assignment reaches.
#[derive(Debug)]
struct Infeasible(String);

impl std::fmt::Display for Infeasible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Infeasible {}

enum Code {
    Polar(PolarCodeSpec),
    Concat(ConcatSpec),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error[config]: {e}");
        return ExitCode::FAILURE;
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = classify(&e);
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{kind}]: {msg}");
            ExitCode::from(code)
        }
    }
}

fn classify(e: &anyhow::Error) -> (&'static str, u8) {
    if e.downcast_ref::<Infeasible>().is_some() {
        return ("infeasible", 3);
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Io { .. }) => ("io", 1),
        Some(Error::Parse { .. }) => ("parse", 1),
        Some(Error::CodeMismatch(_)) => ("mismatch", 4),
        Some(_) => ("invalid", 2),
        None if e.downcast_ref::<io::Error>().is_some() => ("io", 1),
        None => ("invalid", 2),
    }
}

fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Construct(a) => cmd_construct(a),
        Command::ConstructConcat(a) => cmd_construct_concat(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::VerifyCodes(a) => cmd_verify_codes(a),
    }
}

/// Named shorthand first, then a channel file.
fn load_channel(arg: &str) -> anyhow::Result<DiscreteSymmetricChannel> {
    if let Ok(param) = arg.parse::<ChannelParam>() {
        return Ok(param.build()?);
    }
    let path = Path::new(arg);
    if !path.exists() && arg.contains(':') {
        // Looks like shorthand: report the parse error rather than a missing file.
        arg.parse::<ChannelParam>()?;
    }
    let file = fs::File::open(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    Ok(DiscreteSymmetricChannel::from_text(arg, io::BufReader::new(file))?)
}

fn open(path: &Path) -> polarcodes::Result<io::BufReader<fs::File>> {
    fs::File::open(path).map(io::BufReader::new).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

fn read_input(path: Option<&Path>) -> anyhow::Result<String> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = fs::read_to_string(p).map_err(|e| Error::Io {
                path: p.into(),
                source: e,
            })?;
        }
        _ => {
            io::stdin().read_to_string(&mut text).map_err(|e| Error::Io {
                path: "<stdin>".into(),
                source: e,
            })?;
        }
    }
    Ok(text)
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| {
            Error::Io {
                path: p.into(),
                source: e,
            }
            .into()
        }),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_table(path: Option<&Path>) -> anyhow::Result<CodeTable> {
    Ok(match path {
        Some(p) => CodeTable::load(p)?,
        None => CodeTable::shipped()?,
    })
}

fn load_code(args: &CodeArgs) -> anyhow::Result<Code> {
    if let Some(path) = &args.code {
        return Ok(Code::Polar(PolarCodeSpec::from_text(open(path)?)?));
    }
    let path = args
        .concat
        .as_ref()
        .ok_or_else(|| anyhow!("one of --code or --concat is required"))?;
    let table = Arc::new(load_table(args.table.as_deref())?);
    let assignment = ConcatSpec::load_assignment(path)?;
    if !assignment.len().is_power_of_two() {
        return Err(Error::InvalidParameter(format!("{} columns is not a power of two", assignment.len())).into());
    }
    let n = assignment.len().trailing_zeros() as usize;
    Ok(Code::Concat(ConcatSpec::new(n, table, assignment)?))
}

fn resolve_k(n: usize, k: Option<usize>, rate: Option<f64>) -> anyhow::Result<usize> {
    let len = 1usize << n;
    match (k, rate) {
        (Some(k), _) => Ok(k),
        (None, Some(r)) if (0.0..=1.0).contains(&r) => Ok((r * len as f64).round() as usize),
        (None, Some(r)) => Err(Error::InvalidParameter(format!("rate {r} outside [0, 1]")).into()),
        (None, None) => bail!("one of --k or --rate is required"),
    }
}

fn cmd_construct(a: ConstructArgs) -> anyhow::Result<()> {
    let channel = load_channel(&a.channel)?;
    let k = resolve_k(a.n, a.k, a.rate)?;
    let c = construct(&channel, a.n, k, a.grid.grid()?, a.grid.mode)?;
    write_output(a.out.as_deref(), &c.spec.to_text())?;
    if let Some(p) = &a.profile {
        write_output(Some(p), &c.profile.to_text())?;
    }
    eprintln!("N={} K={} bound={:e}", c.spec.len(), c.spec.k(), c.bound);
    Ok(())
}

fn cmd_construct_concat(a: ConstructConcatArgs) -> anyhow::Result<()> {
    let channel = load_channel(&a.channel)?;
    let table = Arc::new(load_table(a.table.as_deref())?);
    if table.code_len() != a.m {
        return Err(Error::LengthMismatch {
            expected: a.m,
            actual: table.code_len(),
        }
        .into());
    }
    let e = ColumnErrorTable::build(&channel, a.n, &table, a.grid.grid()?, a.grid.mode, None)?;
    let dims: Vec<usize> = table.codes().iter().map(|c| c.k()).collect();
    let alloc = dp_allocate(&e, &dims, a.k)?
        .ok_or_else(|| Infeasible(format!("no assignment of {} columns reaches K = {}", e.columns(), a.k)))?;
    let spec = ConcatSpec::new(a.n, table, alloc.assignment)?;
    write_output(a.out.as_deref(), &spec.assignment_text())?;
    if let Some(p) = &a.report {
        write_output(Some(p), &design_report(&spec, &e, a.k))?;
    }
    eprintln!(
        "N={} M={} K={} bound={:e}",
        spec.row_len(),
        spec.col_len(),
        spec.k(),
        alloc.bound
    );
    Ok(())
}

fn bound_of(code: &Code, channel: &DiscreteSymmetricChannel, grid: &GridArgs) -> anyhow::Result<f64> {
    Ok(match code {
        Code::Polar(spec) => analyze(spec, channel, grid.grid()?, grid.mode)?,
        Code::Concat(spec) => {
            let e = ColumnErrorTable::build(channel, spec.n(), spec.table(), grid.grid()?, grid.mode, None)?;
            concat_fer_bound(&e, spec.assignment())
        }
    })
}

fn cmd_analyze(a: AnalyzeArgs) -> anyhow::Result<()> {
    let code = load_code(&a.code)?;
    let channel = load_channel(&a.channel)?;
    println!("bound={:e}", bound_of(&code, &channel, &a.grid)?);
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let code = load_code(&a.code)?;
    let opts = McOptions {
        shards: a.shards,
        random_messages: a.random_messages,
    };
    let points: Vec<(f64, DiscreteSymmetricChannel)> = if a.params.is_empty() {
        let value = a.channel.parse::<ChannelParam>().map_or(f64::NAN, |p| p.value());
        vec![(value, load_channel(&a.channel)?)]
    } else {
        // A bare `bsc`/`bec`/`awgn` names the family; any value is replaced.
        let family: ChannelParam = match a.channel.contains(':') {
            true => a.channel.parse()?,
            false => format!("{}:0", a.channel).parse()?,
        };
        a.params
            .iter()
            .map(|&v| Ok((v, family.with_value(v).build()?)))
            .collect::<anyhow::Result<_>>()?
    };
    let mut rows = Vec::with_capacity(points.len());
    for (param, channel) in &points {
        let result = match &code {
            Code::Polar(spec) => run_mc(&PolarCodec::new(spec.clone()), channel, a.trials, a.seed, opts)?,
            Code::Concat(spec) => run_mc(spec, channel, a.trials, a.seed, opts)?,
        };
        let de_bound = if a.no_bound {
            f64::NAN
        } else {
            bound_of(&code, channel, &a.grid)?
        };
        rows.push(SweepPoint {
            param: *param,
            result,
            de_bound,
        });
    }
    write_output(a.out.as_deref(), &sweep_csv(&rows))
}

fn cmd_encode(a: CodingArgs) -> anyhow::Result<()> {
    let code = load_code(&a.code)?;
    let info = parse_bits(&read_input(a.input.as_deref())?)?;
    let word = match &code {
        Code::Polar(spec) => encode(&info, spec)?,
        Code::Concat(spec) => concat_encode(&info, spec)?,
    };
    println!("{}", format_bits(&word));
    Ok(())
}

fn cmd_decode(a: DecodeArgs) -> anyhow::Result<()> {
    let code = load_code(&a.code)?;
    let text = read_input(a.input.as_deref())?;
    let values = text
        .split_whitespace()
        .enumerate()
        .map(|(i, t)| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("value {i} `{t}` is not a number")))
        })
        .collect::<polarcodes::Result<Vec<f64>>>()?;
    let llrs = match &a.channel {
        Some(ch) => {
            let channel = load_channel(ch)?;
            values
                .iter()
                .map(|&y| channel.llr_of(y))
                .collect::<polarcodes::Result<_>>()?
        }
        None => values,
    };
    let info = match &code {
        Code::Polar(spec) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            sc_decode(&llrs, spec, TieBreak::Random, &mut rng)?.info
        }
        Code::Concat(spec) => concat_decode(&llrs, spec)?.info,
    };
    println!("{}", format_bits(&info));
    Ok(())
}

fn cmd_verify_codes(a: VerifyArgs) -> anyhow::Result<()> {
    let table = load_table(a.table.as_deref())?;
    let mut passed = 0;
    for (i, &(k, d)) in REFERENCE_DISTANCES.iter().enumerate() {
        let found = table.codes().iter().find(|c| c.k() == k);
        let status = match found {
            None => "missing".to_string(),
            Some(c) if c.k() == 0 => {
                if d.is_none() {
                    passed += 1;
                    "pass".to_string()
                } else {
                    "fail d=inf".to_string()
                }
            }
            Some(c) => {
                let (dist, _) = min_distance(c)?;
                if Some(dist) == d {
                    passed += 1;
                    "pass".to_string()
                } else {
                    format!("fail d={dist}")
                }
            }
        };
        let want = d.map_or("inf".to_string(), |d| d.to_string());
        println!("{:>2} K={k:<2} d={want:<3} {status}", i + 1);
    }
    println!("{passed}/{} pass", REFERENCE_DISTANCES.len());
    if passed != REFERENCE_DISTANCES.len() {
        return Err(
            Error::CodeMismatch(format!("{passed}/{} table entries verified", REFERENCE_DISTANCES.len())).into(),
        );
    }
    Ok(())
}
