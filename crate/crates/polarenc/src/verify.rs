//! Equivalence sweeps: in-place encoders versus the dense reference.
//!
//! One verification case takes a config and an input split, runs the serial
//! encoder with counting, checks the output word pair against the dense
//! GF(2) reference encoder, checks the operation counts against the
//! complexity targets, runs the pair encoder and checks it against the
//! serial result (or that it rejects exactly the malformed-pair configs),
//! and cross-checks the nonsystematic path. Sweeps abort at the first
//! failure and report it with enough detail to replay by hand.
//!
//! The mutation switch reruns the sweep with a deliberately broken serial
//! encoder (its first XOR demoted to a copy) and exists to prove the sweep
//! can fail: a verification run that cannot detect a single wrong gate
//! would be vacuous.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitBuffer;
use crate::config::{case_d_pairs, CodeConfig};
use crate::encoder::{
    encode_nspc_with_sink, encode_spc_mutated_first_xor, encode_spc_with_sink, EncodeError,
};
use crate::instrument::{assert_complexity, OpLedger};
use crate::oracle::{
    encode_nonsystematic_oracle, encode_systematic_oracle, OracleError, MAX_ORACLE_EXPONENT,
};
use crate::parallel::encode_spc_parallel2_with_sink;

/// Exhaustive sweeps cover all 2^N info sets times all 2^N inputs, so they
/// are limited to tiny blocks.
pub const MAX_EXHAUSTIVE_EXPONENT: u32 = 3;

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("verification exponent {0} outside 1..={MAX_ORACLE_EXPONENT}")]
    ExponentOutOfRange(u32),
    #[error("exhaustive verification supports exponent <= {MAX_EXHAUSTIVE_EXPONENT}, got {0}")]
    ExhaustiveTooLarge(u32),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every info set and every input split for the given exponent.
    Exhaustive,
    /// The given number of uniformly random (info set, input) samples.
    Trials(u64),
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub exponent: u32,
    pub mode: VerifyMode,
    pub seed: u64,
    /// Swap in the first-XOR-demoted encoder; the sweep is then expected
    /// to fail.
    pub inject_mutation: bool,
}

/// Outcome of a verification sweep. `failure` is `None` iff every case
/// agreed with the reference.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub exponent: u32,
    pub configs_checked: u64,
    pub systematic_encodes: u64,
    pub parallel_encodes: u64,
    pub nonsystematic_encodes: u64,
    pub case_d_rejections: u64,
    pub mutation_injected: bool,
    pub failure: Option<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "exponent={}", self.exponent)?;
        writeln!(f, "configs_checked={}", self.configs_checked)?;
        writeln!(f, "systematic_encodes={}", self.systematic_encodes)?;
        writeln!(f, "parallel_encodes={}", self.parallel_encodes)?;
        writeln!(f, "nonsystematic_encodes={}", self.nonsystematic_encodes)?;
        writeln!(f, "case_d_rejections={}", self.case_d_rejections)?;
        writeln!(f, "mutation_injected={}", self.mutation_injected)?;
        if let Some(failure) = &self.failure {
            writeln!(f, "failure={failure}")?;
        }
        write!(f, "passed={}", self.passed())
    }
}

fn bit_string(bits: &BitBuffer) -> String {
    bits.iter().map(|b| if b { '1' } else { '0' }).collect()
}

fn set_string(set: &[usize]) -> String {
    let body: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", body.join(","))
}

fn replay_tag(config: &CodeConfig, x_info: &BitBuffer, u_frozen: &BitBuffer) -> String {
    format!(
        "n={} A={} x_A={} u_frozen={}",
        config.exponent(),
        set_string(config.info_set()),
        bit_string(x_info),
        bit_string(u_frozen)
    )
}

/// Runs the configured sweep. `Err` means the sweep itself could not run;
/// a clean run that found a mismatch returns `Ok` with the failure in the
/// report.
pub fn run_verify(options: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let n = options.exponent;
    if !(1..=MAX_ORACLE_EXPONENT).contains(&n) {
        return Err(VerifyError::ExponentOutOfRange(n));
    }
    let block = 1usize << n;
    let mut report = VerifyReport {
        exponent: n,
        configs_checked: 0,
        systematic_encodes: 0,
        parallel_encodes: 0,
        nonsystematic_encodes: 0,
        case_d_rejections: 0,
        mutation_injected: options.inject_mutation,
        failure: None,
    };

    match options.mode {
        VerifyMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_EXPONENT {
                return Err(VerifyError::ExhaustiveTooLarge(n));
            }
            for mask in 0u64..1 << block {
                let info: Vec<usize> = (0..block).filter(|&i| mask >> i & 1 == 1).collect();
                let config = CodeConfig::new(n, info).map_err(EncodeError::from)?;
                report.configs_checked += 1;
                let k = config.info_len();
                for input in 0u64..1 << block {
                    let x_info = BitBuffer::from_bits((0..k).map(|i| input >> i & 1 == 1));
                    let u_frozen = BitBuffer::from_bits((k..block).map(|i| input >> i & 1 == 1));
                    if !check_one(&config, &x_info, &u_frozen, options, &mut report)? {
                        return Ok(report);
                    }
                    let u_full = BitBuffer::from_bits((0..block).map(|i| input >> i & 1 == 1));
                    if !check_nspc(&config, &u_full, &mut report)? {
                        return Ok(report);
                    }
                }
            }
        }
        VerifyMode::Trials(trials) => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            for _ in 0..trials {
                let info: Vec<usize> = (0..block).filter(|_| rng.gen_bool(0.5)).collect();
                let config = CodeConfig::new(n, info).map_err(EncodeError::from)?;
                report.configs_checked += 1;
                let x_info: BitBuffer = (0..config.info_len()).map(|_| rng.gen()).collect();
                let u_frozen: BitBuffer = (0..config.frozen_len()).map(|_| rng.gen()).collect();
                if !check_one(&config, &x_info, &u_frozen, options, &mut report)? {
                    return Ok(report);
                }
                let u_full: BitBuffer = (0..block).map(|_| rng.gen()).collect();
                if !check_nspc(&config, &u_full, &mut report)? {
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// Checks one systematic case; returns false (with the report updated)
/// on the first mismatch.
fn check_one(
    config: &CodeConfig,
    x_info: &BitBuffer,
    u_frozen: &BitBuffer,
    options: &VerifyOptions,
    report: &mut VerifyReport,
) -> Result<bool, VerifyError> {
    let mut ledger = OpLedger::new();
    let (x, u) = if options.inject_mutation {
        encode_spc_mutated_first_xor(config, x_info, u_frozen, true, &mut ledger)?
    } else {
        encode_spc_with_sink(config, x_info, u_frozen, true, &mut ledger)?
    };
    let u = u.expect("emit_u was requested");
    report.systematic_encodes += 1;

    let (u_ref, x_ref) = encode_systematic_oracle(config, x_info, u_frozen)?;
    if x != x_ref || u != u_ref {
        report.failure = Some(format!(
            "systematic mismatch: {} expected_x={} got_x={} expected_u={} got_u={}",
            replay_tag(config, x_info, u_frozen),
            bit_string(&x_ref),
            bit_string(&x),
            bit_string(&u_ref),
            bit_string(&u)
        ));
        return Ok(false);
    }
    let complexity = assert_complexity(config, &ledger);
    if !complexity.pass {
        report.failure = Some(format!(
            "complexity mismatch: {} expected_xor={} got_xor={} expected_bits={} got_bits={}",
            replay_tag(config, x_info, u_frozen),
            complexity.expected_xor_count,
            complexity.observed_xor_count,
            complexity.expected_peak_aux_model_bits,
            complexity.observed_peak_aux_model_bits
        ));
        return Ok(false);
    }

    let violations = case_d_pairs(config);
    let mut pair_ledger = OpLedger::new();
    match encode_spc_parallel2_with_sink(config, x_info, u_frozen, true, &mut pair_ledger) {
        Ok((px, pu)) => {
            report.parallel_encodes += 1;
            if !violations.is_empty() {
                report.failure = Some(format!(
                    "pair encoder accepted a user-above-frozen config: {} pairs={}",
                    replay_tag(config, x_info, u_frozen),
                    set_string(&violations)
                ));
                return Ok(false);
            }
            if px != x || pu.as_ref() != Some(&u) {
                report.failure = Some(format!(
                    "pair/serial mismatch: {} serial_x={} pair_x={}",
                    replay_tag(config, x_info, u_frozen),
                    bit_string(&x),
                    bit_string(&px)
                ));
                return Ok(false);
            }
            if pair_ledger.xor_count != ledger.xor_count
                || pair_ledger.peak_aux_model_bits != ledger.peak_aux_model_bits
            {
                report.failure = Some(format!(
                    "pair/serial cost mismatch: {} serial_xor={} pair_xor={} serial_bits={} pair_bits={}",
                    replay_tag(config, x_info, u_frozen),
                    ledger.xor_count,
                    pair_ledger.xor_count,
                    ledger.peak_aux_model_bits,
                    pair_ledger.peak_aux_model_bits
                ));
                return Ok(false);
            }
        }
        Err(EncodeError::CaseDViolation { psi }) => {
            report.case_d_rejections += 1;
            if violations.is_empty() {
                report.failure = Some(format!(
                    "spurious pair rejection at psi={psi}: {}",
                    replay_tag(config, x_info, u_frozen)
                ));
                return Ok(false);
            }
        }
        Err(other) => return Err(other.into()),
    }
    Ok(true)
}

fn check_nspc(
    config: &CodeConfig,
    u_full: &BitBuffer,
    report: &mut VerifyReport,
) -> Result<bool, VerifyError> {
    let mut ledger = OpLedger::new();
    let x = encode_nspc_with_sink(config.exponent(), u_full, &mut ledger)?;
    report.nonsystematic_encodes += 1;
    let x_ref = encode_nonsystematic_oracle(config, u_full)?;
    if x != x_ref {
        report.failure = Some(format!(
            "nonsystematic mismatch: n={} u={} expected_x={} got_x={}",
            config.exponent(),
            bit_string(u_full),
            bit_string(&x_ref),
            bit_string(&x)
        ));
        return Ok(false);
    }
    let complexity = assert_complexity(config, &ledger);
    if !complexity.pass {
        report.failure = Some(format!(
            "nonsystematic complexity mismatch: n={} u={} expected_xor={} got_xor={}",
            config.exponent(),
            bit_string(u_full),
            complexity.expected_xor_count,
            complexity.observed_xor_count
        ));
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_n2_passes() {
        let report = run_verify(&VerifyOptions {
            exponent: 2,
            mode: VerifyMode::Exhaustive,
            seed: 0,
            inject_mutation: false,
        })
        .unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.configs_checked, 16);
        assert_eq!(report.systematic_encodes, 16 * 16);
        // Info sets where some pair is user-above-frozen: the pair encoder
        // must have rejected every input of every such config.
        assert!(report.case_d_rejections > 0);
        assert_eq!(
            report.parallel_encodes + report.case_d_rejections,
            report.systematic_encodes
        );
    }

    #[test]
    fn random_trials_pass() {
        for n in [1u32, 4, 6] {
            let report = run_verify(&VerifyOptions {
                exponent: n,
                mode: VerifyMode::Trials(200),
                seed: 42,
                inject_mutation: false,
            })
            .unwrap();
            assert!(report.passed(), "{report}");
            assert_eq!(report.configs_checked, 200);
        }
    }

    #[test]
    fn mutation_is_caught() {
        let report = run_verify(&VerifyOptions {
            exponent: 2,
            mode: VerifyMode::Exhaustive,
            seed: 0,
            inject_mutation: true,
        })
        .unwrap();
        assert!(!report.passed());
        let failure = report.failure.unwrap();
        assert!(
            failure.contains("mismatch"),
            "unexpected failure: {failure}"
        );
    }

    #[test]
    fn option_bounds_enforced() {
        assert_eq!(
            run_verify(&VerifyOptions {
                exponent: 0,
                mode: VerifyMode::Trials(1),
                seed: 0,
                inject_mutation: false,
            })
            .unwrap_err(),
            VerifyError::ExponentOutOfRange(0)
        );
        assert_eq!(
            run_verify(&VerifyOptions {
                exponent: 17,
                mode: VerifyMode::Trials(1),
                seed: 0,
                inject_mutation: false,
            })
            .unwrap_err(),
            VerifyError::ExponentOutOfRange(17)
        );
        assert_eq!(
            run_verify(&VerifyOptions {
                exponent: 4,
                mode: VerifyMode::Exhaustive,
                seed: 0,
                inject_mutation: false,
            })
            .unwrap_err(),
            VerifyError::ExhaustiveTooLarge(4)
        );
    }
}
