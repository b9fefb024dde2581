//! Operation and memory accounting, plus wall-clock benchmarking.
//!
//! Encoders are generic over an [`OpSink`]; monomorphization with
//! [`NoopSink`] compiles the accounting out entirely, while [`OpLedger`]
//! counts every XOR, every direct copy, model-bit allocations and
//! per-connection propagations. The counters make the complexity targets
//! (exactly (N/2)·log2 N XORs, N working bits) checkable assertions rather
//! than documentation.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitBuffer;
use crate::config::CodeConfig;
use crate::encoder::{encode_nspc_with_sink, encode_spc_with_sink, EncodeError};
use crate::parallel::{encode_spc_parallel2_with_sink, propagation_stats};

/// Receiver for encoding cost events.
///
/// One XOR or copy event is emitted per layer step (one line crossing one
/// layer). Input/output staging moves (loading a source bit into working
/// memory, extracting a finished bit) are free, mirroring the cost model in
/// which only the butterfly operations count.
pub trait OpSink {
    #[inline]
    fn xor(&mut self) {}
    #[inline]
    fn copy(&mut self) {}
    /// Reports one working-memory allocation of `bits` model bits.
    #[inline]
    fn alloc_model_bits(&mut self, _bits: usize) {}
    /// Reports one horizontal propagation pass.
    #[inline]
    fn propagation(&mut self) {}
}

/// Sink that discards all events; the release/throughput path.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoopSink;

impl OpSink for NoopSink {}

/// Exact operation counters for one encode call.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct OpLedger {
    pub xor_count: u64,
    pub copy_count: u64,
    /// Peak working-memory size in model bits, excluding input and output
    /// buffers.
    pub peak_aux_model_bits: u64,
    pub propagations: u64,
}

impl OpLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Clears all counters; call between encodes when reusing a ledger.
    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

impl OpSink for OpLedger {
    #[inline]
    fn xor(&mut self) {
        self.xor_count += 1;
    }

    #[inline]
    fn copy(&mut self) {
        self.copy_count += 1;
    }

    #[inline]
    fn alloc_model_bits(&mut self, bits: usize) {
        self.peak_aux_model_bits = self.peak_aux_model_bits.max(bits as u64);
    }

    #[inline]
    fn propagation(&mut self) {
        self.propagations += 1;
    }
}

/// Expected-versus-observed complexity of one encode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityReport {
    pub block_len: usize,
    pub expected_xor_count: u64,
    pub observed_xor_count: u64,
    pub expected_peak_aux_model_bits: u64,
    pub observed_peak_aux_model_bits: u64,
    pub pass: bool,
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "block_len={}", self.block_len)?;
        writeln!(f, "expected_xor_count={}", self.expected_xor_count)?;
        writeln!(f, "observed_xor_count={}", self.observed_xor_count)?;
        writeln!(
            f,
            "expected_peak_aux_model_bits={}",
            self.expected_peak_aux_model_bits
        )?;
        writeln!(
            f,
            "observed_peak_aux_model_bits={}",
            self.observed_peak_aux_model_bits
        )?;
        write!(f, "complexity_pass={}", self.pass)
    }
}

/// Checks a completed encode's ledger against the targets: exactly
/// (N/2)·log2 N XORs and exactly N peak working bits.
pub fn assert_complexity(config: &CodeConfig, ledger: &OpLedger) -> ComplexityReport {
    let n = config.block_len() as u64;
    let expected_xor = n / 2 * config.exponent() as u64;
    ComplexityReport {
        block_len: config.block_len(),
        expected_xor_count: expected_xor,
        observed_xor_count: ledger.xor_count,
        expected_peak_aux_model_bits: n,
        observed_peak_aux_model_bits: ledger.peak_aux_model_bits,
        pass: ledger.xor_count == expected_xor && ledger.peak_aux_model_bits == n,
    }
}

/// Which encoder a benchmark or CLI encode drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodeMode {
    Serial,
    Parallel2,
    Nspc,
}

impl fmt::Display for EncodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EncodeMode::Serial => "serial",
            EncodeMode::Parallel2 => "parallel2",
            EncodeMode::Nspc => "nspc",
        };
        f.write_str(name)
    }
}

/// Throughput measurement over repeated encodes of seeded random inputs.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub mode: EncodeMode,
    pub block_len: usize,
    pub trials: u32,
    pub iters_per_trial: u32,
    /// Model-level propagation passes per encode: N for the serial modes,
    /// the pair-schedule total for parallel2.
    pub propagations_per_encode: u64,
    pub encodes_per_sec_mean: f64,
    pub encodes_per_sec_stddev: f64,
    /// True when the timed path ran with counting enabled.
    pub counting_enabled: bool,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode={}", self.mode)?;
        writeln!(f, "block_len={}", self.block_len)?;
        writeln!(f, "trials={}", self.trials)?;
        writeln!(f, "iters_per_trial={}", self.iters_per_trial)?;
        writeln!(
            f,
            "propagations_per_encode={}",
            self.propagations_per_encode
        )?;
        writeln!(f, "encodes_per_sec_mean={:.1}", self.encodes_per_sec_mean)?;
        writeln!(
            f,
            "encodes_per_sec_stddev={:.1}",
            self.encodes_per_sec_stddev
        )?;
        write!(f, "counting_enabled={}", self.counting_enabled)
    }
}

fn random_bits<R: Rng>(rng: &mut R, len: usize) -> BitBuffer {
    (0..len).map(|_| rng.gen::<bool>()).collect()
}

/// Times `trials` batches of encodes on seeded random inputs.
///
/// `counting` selects the instrumented path (a live [`OpLedger`] in the
/// timed loop) versus the compiled-out [`NoopSink`] path, so the cost of
/// counting itself can be measured rather than guessed.
pub fn benchmark(
    config: &CodeConfig,
    mode: EncodeMode,
    trials: u32,
    seed: u64,
    counting: bool,
) -> Result<BenchReport, EncodeError> {
    assert!(trials >= 1, "benchmark needs at least one trial");
    let block = config.block_len();
    let propagations_per_encode = match mode {
        EncodeMode::Serial | EncodeMode::Nspc => block as u64,
        EncodeMode::Parallel2 => propagation_stats(config)?.total_propagations as u64,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x_info = random_bits(&mut rng, config.info_len());
    let u_frozen = random_bits(&mut rng, config.frozen_len());
    let u_full = random_bits(&mut rng, block);

    let iters_per_trial = (1usize << 20).div_ceil(block).clamp(8, 1 << 16) as u32;
    let mut rates = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let start = Instant::now();
        for _ in 0..iters_per_trial {
            if counting {
                let mut ledger = OpLedger::new();
                run_one(config, mode, &x_info, &u_frozen, &u_full, &mut ledger)?;
            } else {
                run_one(config, mode, &x_info, &u_frozen, &u_full, &mut NoopSink)?;
            }
        }
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        rates.push(iters_per_trial as f64 / secs);
    }
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let stddev = if rates.len() > 1 {
        (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (rates.len() - 1) as f64).sqrt()
    } else {
        0.0
    };

    Ok(BenchReport {
        mode,
        block_len: block,
        trials,
        iters_per_trial,
        propagations_per_encode,
        encodes_per_sec_mean: mean,
        encodes_per_sec_stddev: stddev,
        counting_enabled: counting,
    })
}

fn run_one<S: OpSink>(
    config: &CodeConfig,
    mode: EncodeMode,
    x_info: &BitBuffer,
    u_frozen: &BitBuffer,
    u_full: &BitBuffer,
    sink: &mut S,
) -> Result<(), EncodeError> {
    match mode {
        EncodeMode::Serial => {
            let out = encode_spc_with_sink(config, x_info, u_frozen, false, sink)?;
            std::hint::black_box(out);
        }
        EncodeMode::Parallel2 => {
            let out = encode_spc_parallel2_with_sink(config, x_info, u_frozen, false, sink)?;
            std::hint::black_box(out);
        }
        EncodeMode::Nspc => {
            let out = encode_nspc_with_sink(config.exponent(), u_full, sink)?;
            std::hint::black_box(out);
        }
    }
    Ok(())
}
