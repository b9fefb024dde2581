//! Two-bit-per-step systematic encoding.
//!
//! Consecutive connections (2ψ, 2ψ+1) share every layer selector above
//! layer 0, so they can cross the structure together. How a pair is
//! processed depends on which of its bits are user bits:
//!
//! * both user — one joint right-to-left pass;
//! * both frozen — one joint left-to-right pass;
//! * frozen on top, user at the bottom — the two opposite-direction passes
//!   cannot merge, so the pair costs two serial propagations;
//! * user on top, frozen at the bottom — rejected as [`EncodeError::CaseDViolation`]:
//!   reliabilities on a symmetric binary memoryless channel never freeze
//!   the odd index of a pair while keeping the even one, so hitting this
//!   pattern signals a malformed frozen set rather than a scheduling gap.
//!
//! Pair processing replaces the serial temporary bit with a second layer-0
//! register cell, leaving the total working memory at N model bits and the
//! XOR count at exactly (N/2)·log2 N, identical to the serial encoder.

use crate::bits::BitBuffer;
use crate::config::{case_d_pairs, classify_pair, CodeConfig, PairCase};
use crate::encoder::EncodeError;
use crate::instrument::{NoopSink, OpSink};

/// Working memory of the pair encoder: layer 0 holds two bits (the pair's
/// own values), each layer λ ≥ 1 holds 2^λ bits, N model bits in all.
/// Layer λ ≥ 1 sits at offset 2^λ in the packed buffer; layer 0 at 0.
#[derive(Debug)]
pub struct PairRegisters {
    exponent: u32,
    cells: BitBuffer,
    #[cfg(debug_assertions)]
    written: Vec<bool>,
}

impl PairRegisters {
    pub fn new<S: OpSink>(exponent: u32, sink: &mut S) -> Self {
        assert!(exponent >= 1);
        let block_len = 1usize << exponent;
        sink.alloc_model_bits(block_len);
        Self {
            exponent,
            cells: BitBuffer::zeros(block_len),
            #[cfg(debug_assertions)]
            written: vec![false; block_len],
        }
    }

    pub fn model_bits(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    fn cell_index(&self, lambda: u32, a: usize) -> usize {
        debug_assert!(lambda < self.exponent);
        if lambda == 0 {
            debug_assert!(a < 2, "layer-0 address {a} invalid");
            a
        } else {
            debug_assert!(
                a < 1usize << lambda,
                "address {a} invalid for layer {lambda}"
            );
            (1usize << lambda) + a
        }
    }

    #[inline]
    fn read(&self, lambda: u32, a: usize) -> bool {
        let idx = self.cell_index(lambda, a);
        #[cfg(debug_assertions)]
        debug_assert!(
            self.written[idx],
            "read of unwritten cell: layer {lambda} address {a}"
        );
        self.cells.get(idx)
    }

    #[inline]
    fn write(&mut self, lambda: u32, a: usize, value: bool) {
        let idx = self.cell_index(lambda, a);
        #[cfg(debug_assertions)]
        {
            self.written[idx] = true;
        }
        self.cells.set(idx, value);
    }
}

/// Register address of connection `phi` at layer `lambda` in the pair
/// layout: φ mod 2^λ above layer 0, and the φ-parity bit at layer 0 (the
/// even line owns cell 0, the odd line cell 1).
#[inline]
fn pair_addr(phi: usize, lambda: u32) -> usize {
    if lambda == 0 {
        phi & 1
    } else {
        phi & ((1usize << lambda) - 1)
    }
}

/// Pair-scheduled systematic encode with the default sink. See
/// [`encode_spc_parallel2_with_sink`].
pub fn encode_spc_parallel2(
    config: &CodeConfig,
    x_info: &BitBuffer,
    u_frozen: &BitBuffer,
    emit_u: bool,
) -> Result<(BitBuffer, Option<BitBuffer>), EncodeError> {
    encode_spc_parallel2_with_sink(config, x_info, u_frozen, emit_u, &mut NoopSink)
}

/// Pair-scheduled systematic encode, bit-identical to the serial
/// [`crate::encoder::encode_spc_with_sink`] on every accepted config, with
/// the same XOR count and working-memory footprint. Rejects configs with a
/// user-above-frozen pair.
pub fn encode_spc_parallel2_with_sink<S: OpSink>(
    config: &CodeConfig,
    x_info: &BitBuffer,
    u_frozen: &BitBuffer,
    emit_u: bool,
    sink: &mut S,
) -> Result<(BitBuffer, Option<BitBuffer>), EncodeError> {
    if x_info.len() != config.info_len() {
        return Err(EncodeError::LengthMismatch {
            role: "information payload",
            expected: config.info_len(),
            got: x_info.len(),
        });
    }
    if u_frozen.len() != config.frozen_len() {
        return Err(EncodeError::LengthMismatch {
            role: "frozen values",
            expected: config.frozen_len(),
            got: u_frozen.len(),
        });
    }
    if let Some(&psi) = case_d_pairs(config).first() {
        return Err(EncodeError::CaseDViolation { psi });
    }

    let n = config.exponent();
    let block = config.block_len();
    let mut mem = PairRegisters::new(n, sink);

    let mut x = BitBuffer::zeros(block);
    x.scatter(config.info_set(), x_info);
    let mut u = emit_u.then(|| {
        let mut u = BitBuffer::zeros(block);
        u.scatter(config.frozen_set(), u_frozen);
        u
    });

    let mut info_slot = config.info_len();
    let mut frozen_slot = config.frozen_len();

    for psi in (0..block / 2).rev() {
        let phi = 2 * psi;
        match classify_pair(config, psi) {
            PairCase::BothUser => {
                sink.propagation();
                info_slot -= 2;
                let x_top = x_info.get(info_slot);
                let x_bot = x_info.get(info_slot + 1);
                sink.copy();
                mem.write(0, 1, x_bot);
                sink.xor();
                mem.write(0, 0, x_top ^ x_bot);
                for lam in 1..n {
                    let a = pair_addr(phi, lam);
                    let pa = pair_addr(phi, lam - 1);
                    let carried_top = mem.read(lam - 1, pa);
                    let carried_bot = mem.read(lam - 1, pa + 1);
                    if phi >> lam & 1 == 0 {
                        sink.xor();
                        mem.write(lam, a, mem.read(lam, a) ^ carried_top);
                        sink.xor();
                        mem.write(lam, a + 1, mem.read(lam, a + 1) ^ carried_bot);
                    } else {
                        sink.copy();
                        mem.write(lam, a, carried_top);
                        sink.copy();
                        mem.write(lam, a + 1, carried_bot);
                    }
                }
                if let Some(u) = &mut u {
                    let top = pair_addr(phi, n - 1);
                    u.set(phi, mem.read(n - 1, top));
                    u.set(phi + 1, mem.read(n - 1, top + 1));
                }
            }
            PairCase::BothFrozen => {
                sink.propagation();
                frozen_slot -= 2;
                // The two layer-0 cells serve as the walking temporaries.
                mem.write(0, 0, u_frozen.get(frozen_slot));
                mem.write(0, 1, u_frozen.get(frozen_slot + 1));
                for lam in (1..n).rev() {
                    let a = pair_addr(phi, lam);
                    if phi >> lam & 1 == 0 {
                        sink.xor();
                        mem.write(0, 0, mem.read(0, 0) ^ mem.read(lam, a));
                        sink.xor();
                        mem.write(0, 1, mem.read(0, 1) ^ mem.read(lam, a + 1));
                    } else {
                        sink.copy();
                        mem.write(lam, a, mem.read(0, 0));
                        sink.copy();
                        mem.write(lam, a + 1, mem.read(0, 1));
                    }
                }
                sink.xor();
                x.set(phi, mem.read(0, 0) ^ mem.read(0, 1));
                sink.copy();
                x.set(phi + 1, mem.read(0, 1));
            }
            PairCase::FrozenTopUserBottom => {
                // Opposite propagation directions: two serial passes, user
                // line first so its layer-0 value is ready for the fold.
                sink.propagation();
                info_slot -= 1;
                frozen_slot -= 1;
                let q = phi + 1;
                sink.copy();
                mem.write(0, 1, x_info.get(info_slot));
                for lam in 1..n {
                    let a = pair_addr(q, lam);
                    let carried = mem.read(lam - 1, pair_addr(q, lam - 1));
                    if q >> lam & 1 == 0 {
                        sink.xor();
                        mem.write(lam, a, mem.read(lam, a) ^ carried);
                    } else {
                        sink.copy();
                        mem.write(lam, a, carried);
                    }
                }
                if let Some(u) = &mut u {
                    u.set(q, mem.read(n - 1, pair_addr(q, n - 1)));
                }

                sink.propagation();
                mem.write(0, 0, u_frozen.get(frozen_slot));
                for lam in (1..n).rev() {
                    let a = pair_addr(phi, lam);
                    if phi >> lam & 1 == 0 {
                        sink.xor();
                        mem.write(0, 0, mem.read(0, 0) ^ mem.read(lam, a));
                    } else {
                        sink.copy();
                        mem.write(lam, a, mem.read(0, 0));
                    }
                }
                sink.xor();
                x.set(phi, mem.read(0, 1) ^ mem.read(0, 0));
            }
            PairCase::UserTopFrozenBottom => unreachable!("rejected above"),
        }
    }
    Ok((x, u))
}

/// Pair-case census and the propagation cost of the pair schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationStats {
    pub block_len: usize,
    pub count_a: usize,
    pub count_b: usize,
    pub count_c: usize,
    /// Propagation passes per encode: one per pair for the joint cases,
    /// two for the mixed case.
    pub total_propagations: usize,
    /// Serial propagations (N) over pair-schedule propagations.
    pub speedup_ratio: f64,
}

impl PropagationStats {
    /// Throughput gain over the serial schedule, in percent.
    pub fn speedup_percent(&self) -> f64 {
        (self.speedup_ratio - 1.0) * 100.0
    }
}

/// Counts pair cases for `config` and derives the propagation totals.
/// Errors with the first offending pair if any user-above-frozen pair
/// exists.
pub fn propagation_stats(config: &CodeConfig) -> Result<PropagationStats, EncodeError> {
    let mut count_a = 0;
    let mut count_b = 0;
    let mut count_c = 0;
    for psi in 0..config.block_len() / 2 {
        match classify_pair(config, psi) {
            PairCase::BothUser => count_a += 1,
            PairCase::BothFrozen => count_b += 1,
            PairCase::FrozenTopUserBottom => count_c += 1,
            PairCase::UserTopFrozenBottom => {
                return Err(EncodeError::CaseDViolation { psi });
            }
        }
    }
    let total = count_a + count_b + 2 * count_c;
    Ok(PropagationStats {
        block_len: config.block_len(),
        count_a,
        count_b,
        count_c,
        total_propagations: total,
        speedup_ratio: config.block_len() as f64 / total as f64,
    })
}
