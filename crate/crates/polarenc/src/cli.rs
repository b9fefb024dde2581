//! Command-line front-end: code construction, encoding, pair statistics,
//! reference verification, and benchmarking over the library's file
//! formats.
//!
//! Every command prints a line-oriented `key=value` report on stdout (or a
//! flat JSON object with `--format structured`). Every failure exits
//! nonzero after printing a single `error: ...` line on stderr. Outputs are
//! deterministic given the seed flags.
//!
//! `POLARCODE_PROFILE=checked` (the default) routes encodes through a live
//! operation ledger and reports the counts; `POLARCODE_PROFILE=release`
//! uses the no-op sink so instrumentation cannot distort throughput.

use std::fmt::Display;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::bits::BitBuffer;
use crate::config::{case_d_pairs, classify_pair, PairCase};
use crate::construct::{construct_awgn_ga, construct_bec, ebno_to_esno_db, select_info_set};
use crate::encoder::{encode_nspc_with_sink, encode_spc_with_sink};
use crate::files::{read_bits, read_frozen_set, write_bits, write_frozen_set, BitFileFormat};
use crate::instrument::{assert_complexity, benchmark, EncodeMode, NoopSink, OpLedger};
use crate::oracle::{encode_nonsystematic_oracle, encode_systematic_oracle, MAX_ORACLE_EXPONENT};
use crate::parallel::{encode_spc_parallel2_with_sink, propagation_stats};
use crate::verify::{run_verify, VerifyMode, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "polarenc",
    version,
    about = "Systematic polar code encoding with N-bit working memory"
)]
struct Cli {
    /// Report style: key=value lines or a flat JSON object.
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Kv)]
    format: ReportFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a frozen set from channel reliabilities and write it to a file.
    Construct(ConstructArgs),
    /// Encode a payload file into a codeword file.
    Encode(EncodeArgs),
    /// Report pair-case counts and the two-bit speedup model for a frozen set.
    Stats(StatsArgs),
    /// Sweep the in-place encoders against the dense reference encoder.
    Verify(VerifyArgs),
    /// Measure encoder throughput on seeded random payloads.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Kv,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Erasure-probability recursion for the binary erasure channel.
    Bec,
    /// Gaussian-approximation density evolution for BPSK over AWGN.
    Ga,
}

#[derive(Clone, Copy, ValueEnum)]
enum SnrTypeArg {
    /// --param is Eb/N0 in dB (converted using the code rate K/N).
    Ebno,
    /// --param is Es/N0 in dB, used as given.
    Esno,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodeModeArg {
    /// Serial in-place systematic encoder.
    Spc,
    /// Two-bit-parallel systematic encoder.
    SpcPar2,
    /// Nonsystematic encoder (input is the full source word u).
    Nspc,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchModeArg {
    Serial,
    Parallel2,
    Nspc,
}

#[derive(Clone, Copy, ValueEnum)]
enum BitFormatArg {
    /// ASCII '0'/'1' characters; whitespace ignored on read.
    Ascii,
    /// Packed bytes, bit 0 of each byte first.
    Raw,
}

impl From<BitFormatArg> for BitFileFormat {
    fn from(arg: BitFormatArg) -> Self {
        match arg {
            BitFormatArg::Ascii => BitFileFormat::Ascii,
            BitFormatArg::Raw => BitFileFormat::Raw,
        }
    }
}

#[derive(Args)]
struct ConstructArgs {
    /// Block-length exponent n (N = 2^n).
    #[arg(long)]
    n: u32,
    /// Information-set size K.
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// BEC erasure probability, or AWGN design SNR in dB.
    #[arg(long)]
    param: f64,
    /// How --param is read for the ga method.
    #[arg(long, value_enum, default_value_t = SnrTypeArg::Ebno)]
    snr_type: SnrTypeArg,
    /// Destination frozen-set file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    /// Frozen-set file defining the code.
    #[arg(long)]
    frozen_set: PathBuf,
    #[arg(long, value_enum, default_value_t = EncodeModeArg::Spc)]
    mode: EncodeModeArg,
    /// Input bit file: K user bits for systematic modes (N with --full-x),
    /// N source bits for nspc.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Destination codeword file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = BitFormatArg::Ascii)]
    in_format: BitFormatArg,
    #[arg(long, value_enum, default_value_t = BitFormatArg::Ascii)]
    out_format: BitFormatArg,
    /// Also write the source word u (systematic modes only).
    #[arg(long, value_name = "FILE")]
    emit_u: Option<PathBuf>,
    /// Frozen bit values as a bit file of N-K bits (default all zero),
    /// read with --in-format.
    #[arg(long, value_name = "FILE")]
    frozen_values: Option<PathBuf>,
    /// Treat the input as a full N-bit codeword and take the user bits
    /// from its information positions.
    #[arg(long)]
    full_x: bool,
    /// Re-encode through the dense reference and assert output and
    /// operation-count equality.
    #[arg(long)]
    check: bool,
    /// Fall back to the serial encoder when spc-par2 rejects the config.
    #[arg(long)]
    force_serial: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    frozen_set: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("sweep").required(true).args(["exhaustive", "trials"])))]
struct VerifyArgs {
    /// Block-length exponent n (N = 2^n), at most 16.
    #[arg(long)]
    n: u32,
    /// Sweep every info set and every input split (n <= 3).
    #[arg(long)]
    exhaustive: bool,
    /// Number of random (info set, input) samples.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corrupt one encoder operation so the sweep must fail; exists to
    /// prove the sweep detects single-gate errors.
    #[arg(long, hide = true)]
    inject_mutation: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Frozen-set file defining the code
    #[arg(long)]
    frozen_set: PathBuf,
    /// Encoder under measurement
    #[arg(long, value_enum, default_value_t = BenchModeArg::Serial)]
    mode: BenchModeArg,
    /// Number of timed trials (the mean and stddev are reported across them)
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    /// Seed for the random payloads
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Profile {
    Checked,
    Release,
}

impl Profile {
    fn name(self) -> &'static str {
        match self {
            Profile::Checked => "checked",
            Profile::Release => "release",
        }
    }
}

fn profile_from_env() -> Result<Profile, String> {
    match std::env::var("POLARCODE_PROFILE") {
        Err(_) => Ok(Profile::Checked),
        Ok(value) => match value.as_str() {
            "checked" => Ok(Profile::Checked),
            "release" => Ok(Profile::Release),
            other => Err(format!(
                "unknown POLARCODE_PROFILE value `{other}` (expected `checked` or `release`)"
            )),
        },
    }
}

/// Ordered key/value report, printable as kv lines or flat JSON.
struct Report {
    format: ReportFormat,
    pairs: Vec<(String, String)>,
}

impl Report {
    fn new(format: ReportFormat, command: &str) -> Self {
        Report {
            format,
            pairs: vec![("command".into(), command.into())],
        }
    }

    fn push(&mut self, key: &str, value: impl Display) {
        self.pairs.push((key.into(), value.to_string()));
    }

    /// Absorbs a multi-line `key=value` Display rendering.
    fn push_display(&mut self, rendered: impl Display) {
        for line in rendered.to_string().lines() {
            if let Some((key, value)) = line.split_once('=') {
                self.push(key, value);
            }
        }
    }

    fn print(&self) {
        match self.format {
            ReportFormat::Kv => {
                for (key, value) in &self.pairs {
                    println!("{key}={value}");
                }
            }
            ReportFormat::Structured => {
                let body: Vec<String> = self
                    .pairs
                    .iter()
                    .map(|(k, v)| format!("\"{}\": {}", json_escape(k), json_value(v)))
                    .collect();
                println!("{{{}}}", body.join(", "));
            }
        }
    }
}

fn json_escape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for ch in raw.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Renders a kv value as a JSON scalar: bools and plain numbers stay bare,
/// everything else becomes a string.
fn json_value(raw: &str) -> String {
    if raw == "true" || raw == "false" {
        return raw.into();
    }
    let shaped = !raw.is_empty()
        && raw
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        && raw
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || c == '-');
    if shaped && raw.parse::<f64>().is_ok_and(|v| v.is_finite()) {
        raw.into()
    } else {
        format!("\"{}\"", json_escape(raw))
    }
}

fn set_string(set: &[usize]) -> String {
    let body: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", body.join(","))
}

/// Parses arguments, runs the selected command, and returns the process
/// exit code. All failures come back as one `error:` line on stderr.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                print!("{err}");
                return 0;
            }
            // Collapse clap's message block (everything before the usage
            // section) into the single-line error contract.
            let text = err.to_string();
            let joined = text
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect::<Vec<_>>()
                .join(" ");
            let line = joined.trim_start_matches("error: ");
            if line.is_empty() {
                eprintln!("error: invalid arguments");
            } else {
                eprintln!("error: {line}");
            }
            return 2;
        }
    };
    let format = cli.format;
    let outcome = match cli.command {
        Command::Construct(args) => cmd_construct(args, format),
        Command::Encode(args) => cmd_encode(args, format),
        Command::Stats(args) => cmd_stats(args, format),
        Command::Verify(args) => cmd_verify(args, format),
        Command::Bench(args) => cmd_bench(args, format),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn cmd_construct(args: ConstructArgs, format: ReportFormat) -> Result<i32, String> {
    let block_len = 1usize
        .checked_shl(args.n)
        .ok_or_else(|| format!("exponent {} too large", args.n))?;
    let mut report = Report::new(format, "construct");
    report.push("n", args.n);
    report.push("block_len", block_len);
    report.push("k", args.k);
    report.push("param", args.param);

    let profile = match args.method {
        MethodArg::Bec => {
            report.push("method", "bec");
            construct_bec(args.n, args.param).map_err(|e| e.to_string())?
        }
        MethodArg::Ga => {
            report.push("method", "ga");
            let esno_db = match args.snr_type {
                SnrTypeArg::Esno => args.param,
                SnrTypeArg::Ebno => {
                    if args.k == 0 {
                        return Err(
                            "Eb/N0 is undefined at rate 0; use --snr-type esno for k=0".into()
                        );
                    }
                    ebno_to_esno_db(args.param, args.k as f64 / block_len as f64)
                }
            };
            report.push("esno_db", format!("{esno_db:.4}"));
            construct_awgn_ga(args.n, esno_db).map_err(|e| e.to_string())?
        }
    };
    let selection = select_info_set(&profile, args.k).map_err(|e| e.to_string())?;
    let valid = selection.case_d_pairs.is_empty();
    write_frozen_set(&args.out, &selection.config, !valid).map_err(|e| e.to_string())?;
    report.push("out", args.out.display());

    let mut counts = [0usize; 4];
    for psi in 0..block_len / 2 {
        let slot = match classify_pair(&selection.config, psi) {
            PairCase::BothUser => 0,
            PairCase::BothFrozen => 1,
            PairCase::FrozenTopUserBottom => 2,
            PairCase::UserTopFrozenBottom => 3,
        };
        counts[slot] += 1;
    }
    report.push("count_a", counts[0]);
    report.push("count_b", counts[1]);
    report.push("count_c", counts[2]);
    if counts[3] > 0 {
        report.push("count_d", counts[3]);
        report.push("case_d_pairs", set_string(&selection.case_d_pairs));
    }
    report.push("valid", valid);
    if valid {
        let stats = propagation_stats(&selection.config).map_err(|e| e.to_string())?;
        report.push("total_propagations", stats.total_propagations);
        report.push("speedup_percent", format!("{:.2}", stats.speedup_percent()));
    }
    report.print();
    if valid {
        Ok(0)
    } else {
        eprintln!(
            "error: selection contains user-above-frozen pairs psi={}",
            set_string(&selection.case_d_pairs)
        );
        Ok(1)
    }
}

fn cmd_encode(args: EncodeArgs, format: ReportFormat) -> Result<i32, String> {
    let profile = profile_from_env()?;
    let (config, warned) = read_frozen_set(&args.frozen_set).map_err(|e| e.to_string())?;
    let n = config.exponent();
    let block = config.block_len();
    let k = config.info_len();
    let in_format: BitFileFormat = args.in_format.into();
    let out_format: BitFileFormat = args.out_format.into();
    if args.check && n > MAX_ORACLE_EXPONENT {
        return Err(format!(
            "--check needs the dense reference, which supports n <= {MAX_ORACLE_EXPONENT} (got n={n})"
        ));
    }
    // --check must observe operation counts regardless of profile.
    let counting = profile == Profile::Checked || args.check;

    let mut report = Report::new(format, "encode");
    report.push("n", n);
    report.push("block_len", block);
    report.push("k", k);
    report.push("profile", profile.name());
    if warned {
        report.push("frozen_set_warning", true);
    }

    let mut ledger = OpLedger::new();
    match args.mode {
        EncodeModeArg::Nspc => {
            report.push("mode", "nspc");
            for (flag, given) in [
                ("--full-x", args.full_x),
                ("--emit-u", args.emit_u.is_some()),
                ("--frozen-values", args.frozen_values.is_some()),
            ] {
                if given {
                    return Err(format!("{flag} applies only to the systematic modes"));
                }
            }
            let u = read_bits(&args.input, block, in_format).map_err(|e| e.to_string())?;
            let x = if counting {
                encode_nspc_with_sink(n, &u, &mut ledger)
            } else {
                encode_nspc_with_sink(n, &u, &mut NoopSink)
            }
            .map_err(|e| e.to_string())?;
            if args.check {
                let x_ref = encode_nonsystematic_oracle(&config, &u).map_err(|e| e.to_string())?;
                if x != x_ref {
                    return Err(
                        "check failed: nonsystematic output disagrees with the dense reference"
                            .into(),
                    );
                }
                let complexity = assert_complexity(&config, &ledger);
                if !complexity.pass {
                    return Err(format!(
                        "check failed: expected {} xors and {} working bits, observed {} and {}",
                        complexity.expected_xor_count,
                        complexity.expected_peak_aux_model_bits,
                        complexity.observed_xor_count,
                        complexity.observed_peak_aux_model_bits
                    ));
                }
                report.push("check", "pass");
            }
            write_bits(&args.out, &x, out_format).map_err(|e| e.to_string())?;
            report.push("out", args.out.display());
        }
        EncodeModeArg::Spc | EncodeModeArg::SpcPar2 => {
            let x_info = if args.full_x {
                let x_full = read_bits(&args.input, block, in_format).map_err(|e| e.to_string())?;
                x_full.gather(config.info_set())
            } else {
                read_bits(&args.input, k, in_format).map_err(|e| e.to_string())?
            };
            let u_frozen = match &args.frozen_values {
                Some(path) => read_bits(path, block - k, in_format).map_err(|e| e.to_string())?,
                None => BitBuffer::zeros(block - k),
            };
            let emit_u = args.emit_u.is_some() || args.check;

            let parallel = match args.mode {
                EncodeModeArg::SpcPar2 => {
                    report.push("mode", "spc-par2");
                    let violations = case_d_pairs(&config);
                    if violations.is_empty() {
                        true
                    } else if args.force_serial {
                        report.push("fallback", "serial");
                        false
                    } else {
                        return Err(format!(
                            "pair schedule rejects this config (user-above-frozen pairs psi={}); rerun with --force-serial or --mode spc",
                            set_string(&violations)
                        ));
                    }
                }
                _ => {
                    report.push("mode", "spc");
                    false
                }
            };

            let (x, u) = match (counting, parallel) {
                (true, true) => {
                    encode_spc_parallel2_with_sink(&config, &x_info, &u_frozen, emit_u, &mut ledger)
                }
                (true, false) => {
                    encode_spc_with_sink(&config, &x_info, &u_frozen, emit_u, &mut ledger)
                }
                (false, true) => encode_spc_parallel2_with_sink(
                    &config,
                    &x_info,
                    &u_frozen,
                    emit_u,
                    &mut NoopSink,
                ),
                (false, false) => {
                    encode_spc_with_sink(&config, &x_info, &u_frozen, emit_u, &mut NoopSink)
                }
            }
            .map_err(|e| e.to_string())?;

            if args.check {
                let u = u.as_ref().expect("check forces emit_u");
                let (u_ref, x_ref) = encode_systematic_oracle(&config, &x_info, &u_frozen)
                    .map_err(|e| e.to_string())?;
                if x != x_ref || *u != u_ref {
                    return Err(
                        "check failed: systematic output disagrees with the dense reference".into(),
                    );
                }
                let complexity = assert_complexity(&config, &ledger);
                if !complexity.pass {
                    return Err(format!(
                        "check failed: expected {} xors and {} working bits, observed {} and {}",
                        complexity.expected_xor_count,
                        complexity.expected_peak_aux_model_bits,
                        complexity.observed_xor_count,
                        complexity.observed_peak_aux_model_bits
                    ));
                }
                report.push("check", "pass");
            }
            write_bits(&args.out, &x, out_format).map_err(|e| e.to_string())?;
            report.push("out", args.out.display());
            if let Some(path) = &args.emit_u {
                let u = u.as_ref().expect("emit_u was requested");
                write_bits(path, u, out_format).map_err(|e| e.to_string())?;
                report.push("emit_u", path.display());
            }
        }
    }
    if counting {
        report.push("xor_count", ledger.xor_count);
        report.push("copy_count", ledger.copy_count);
        report.push("peak_aux_model_bits", ledger.peak_aux_model_bits);
        report.push("propagations", ledger.propagations);
    }
    report.print();
    Ok(0)
}

fn cmd_stats(args: StatsArgs, format: ReportFormat) -> Result<i32, String> {
    let (config, warned) = read_frozen_set(&args.frozen_set).map_err(|e| e.to_string())?;
    let violations = case_d_pairs(&config);
    if !violations.is_empty() {
        return Err(format!(
            "pair schedule rejects this config (user-above-frozen pairs psi={})",
            set_string(&violations)
        ));
    }
    let stats = propagation_stats(&config).map_err(|e| e.to_string())?;
    let mut report = Report::new(format, "stats");
    report.push("block_len", stats.block_len);
    report.push("k", config.info_len());
    if warned {
        report.push("frozen_set_warning", true);
    }
    report.push("count_a", stats.count_a);
    report.push("count_b", stats.count_b);
    report.push("count_c", stats.count_c);
    report.push("total_propagations", stats.total_propagations);
    report.push("speedup_ratio", format!("{:.4}", stats.speedup_ratio));
    report.push("speedup_percent", format!("{:.2}", stats.speedup_percent()));
    report.print();
    Ok(0)
}

fn cmd_verify(args: VerifyArgs, format: ReportFormat) -> Result<i32, String> {
    let mode = if args.exhaustive {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Trials(args.trials.expect("clap group guarantees one of the two"))
    };
    let options = VerifyOptions {
        exponent: args.n,
        mode,
        seed: args.seed,
        inject_mutation: args.inject_mutation,
    };
    let outcome = run_verify(&options).map_err(|e| e.to_string())?;
    let mut report = Report::new(format, "verify");
    report.push("seed", args.seed);
    report.push_display(&outcome);
    report.print();
    Ok(if outcome.passed() { 0 } else { 1 })
}

fn cmd_bench(args: BenchArgs, format: ReportFormat) -> Result<i32, String> {
    let profile = profile_from_env()?;
    let (config, _) = read_frozen_set(&args.frozen_set).map_err(|e| e.to_string())?;
    let mode = match args.mode {
        BenchModeArg::Serial => EncodeMode::Serial,
        BenchModeArg::Parallel2 => EncodeMode::Parallel2,
        BenchModeArg::Nspc => EncodeMode::Nspc,
    };
    let counting = profile == Profile::Checked;
    let outcome =
        benchmark(&config, mode, args.trials, args.seed, counting).map_err(|e| e.to_string())?;
    let mut report = Report::new(format, "bench");
    report.push("profile", profile.name());
    report.push("seed", args.seed);
    report.push_display(&outcome);
    report.print();
    Ok(0)
}
