//! Frozen-set construction from channel reliability models.
//!
//! Two standard constructions are provided. For the binary erasure channel
//! the Bhattacharyya parameter z of every synthesized bit-channel is exact
//! under the recursion z ↦ (2z − z², z²). For the binary-input AWGN channel
//! the Gaussian approximation of density evolution tracks the mean LLR
//! μ ↦ (φ⁻¹(1 − (1 − φ(μ))²), 2μ).
//!
//! Both recursions consume the channel index most-significant bit first,
//! matching the encoder's natural (non-bit-reversed) index order, and both
//! guarantee — including under floating-point rounding — that the odd
//! member of every index pair is at least as reliable as the even member.
//! Combined with ties breaking toward the larger index, a top-K selection
//! therefore never freezes the odd index of a pair while keeping the even
//! one, for any K.

use thiserror::Error;

use crate::config::{case_d_pairs, CodeConfig};

/// Largest supported construction exponent (metric storage is 2^n floats).
pub const MAX_CONSTRUCTION_EXPONENT: u32 = 20;

#[derive(Debug, Error, PartialEq)]
pub enum ConstructError {
    #[error("construction exponent {0} outside 1..={MAX_CONSTRUCTION_EXPONENT}")]
    ExponentOutOfRange(u32),
    #[error("erasure probability {0} outside the open interval (0, 1)")]
    ErasureOutOfRange(f64),
    #[error("design SNR {0} dB outside the supported range [-40, 40]")]
    SnrOutOfRange(f64),
    #[error("info-set size {k} out of range for block length {block_len}")]
    KOutOfRange { k: usize, block_len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionMethod {
    BecBhattacharyya,
    AwgnGaussianApprox,
}

/// Per-bit-channel reliability scores for one block length; higher means
/// more reliable. Scores are finite for every supported parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    exponent: u32,
    metric: Vec<f64>,
    method: ConstructionMethod,
}

impl ReliabilityProfile {
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn block_len(&self) -> usize {
        1 << self.exponent
    }

    /// Reliability score per channel index.
    pub fn metric(&self) -> &[f64] {
        &self.metric
    }

    pub fn method(&self) -> ConstructionMethod {
        self.method
    }
}

fn check_exponent(exponent: u32) -> Result<(), ConstructError> {
    if !(1..=MAX_CONSTRUCTION_EXPONENT).contains(&exponent) {
        return Err(ConstructError::ExponentOutOfRange(exponent));
    }
    Ok(())
}

/// Bhattacharyya construction for a binary erasure channel with erasure
/// probability `erasure`. Reliability is 1 − z.
///
/// The even child is computed as z·(2 − z) and the odd child as z·z; since
/// 2 − z ≥ z holds for z ≤ 1 and float multiplication is monotone, the odd
/// child never scores worse than its sibling even after rounding.
pub fn construct_bec(exponent: u32, erasure: f64) -> Result<ReliabilityProfile, ConstructError> {
    check_exponent(exponent)?;
    if !(erasure > 0.0 && erasure < 1.0) {
        return Err(ConstructError::ErasureOutOfRange(erasure));
    }
    let mut z = vec![erasure];
    for _ in 0..exponent {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &parent in &z {
            next.push(parent * (2.0 - parent));
            next.push(parent * parent);
        }
        z = next;
    }
    Ok(ReliabilityProfile {
        exponent,
        metric: z.iter().map(|&zi| 1.0 - zi).collect(),
        method: ConstructionMethod::BecBhattacharyya,
    })
}

// Two-segment fit of the Gaussian-approximation transform
// φ(x) = 1 − E[tanh(L/2)] for L ~ N(x, 2x), from S.-Y. Chung, T. Richardson
// and R. Urbanke, "Analysis of sum-product decoding of low-density
// parity-check codes using a Gaussian approximation" (IEEE Trans. Inf.
// Theory, 2001), as commonly used for polar code design (P. Trifonov,
// "Efficient design and decoding of polar codes", IEEE Trans. Commun.,
// 2012).
const GA_ALPHA: f64 = 0.4527;
const GA_BETA: f64 = 0.0218;
const GA_GAMMA: f64 = 0.86;
const GA_SPLIT: f64 = 10.0;

/// ln φ(x) for x ≥ 0, clamped to φ ≤ 1.
fn phi_ln(x: f64) -> f64 {
    if x < GA_SPLIT {
        (-GA_ALPHA * x.powf(GA_GAMMA) + GA_BETA).min(0.0)
    } else {
        0.5 * (std::f64::consts::PI.ln() - x.ln()) - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Inverse of [`phi_ln`]: the x ≥ 0 with ln φ(x) = ln_y.
///
/// The small-x segment inverts in closed form; the tail is bisected in the
/// log domain, where it is strictly decreasing and cannot underflow.
fn phi_inv_ln(ln_y: f64) -> f64 {
    let split_value = -GA_ALPHA * GA_SPLIT.powf(GA_GAMMA) + GA_BETA;
    if ln_y >= split_value {
        return ((GA_BETA - ln_y) / GA_ALPHA).powf(1.0 / GA_GAMMA);
    }
    let mut lo = GA_SPLIT;
    let mut hi = 4.0 * -ln_y + 40.0;
    debug_assert!(phi_ln(hi) <= ln_y);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi_ln(mid) > ln_y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of the check-node (even-index) child channel, computed in the
/// log domain and clamped into [0, μ] so the even child never beats its
/// parent (exactly true of the underlying transform).
fn check_node_mean(mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    let lp = phi_ln(mu);
    let ln_y = (lp + (2.0 - lp.exp()).ln()).min(0.0);
    phi_inv_ln(ln_y).clamp(0.0, mu)
}

/// Gaussian-approximation construction for a binary-input AWGN channel at
/// the given symbol SNR (Es/N0) in dB. Reliability is the mean LLR.
///
/// The initial mean is 4·Es/N0 (BPSK, unit symbol energy). The odd child
/// 2μ is at least the even child by the clamp in [`check_node_mean`], so
/// the pair ordering survives rounding here as well. Callers working from
/// a per-information-bit budget convert with [`ebno_to_esno_db`] first.
pub fn construct_awgn_ga(
    exponent: u32,
    esno_db: f64,
) -> Result<ReliabilityProfile, ConstructError> {
    check_exponent(exponent)?;
    if !esno_db.is_finite() || !(-40.0..=40.0).contains(&esno_db) {
        return Err(ConstructError::SnrOutOfRange(esno_db));
    }
    let mu0 = 4.0 * 10f64.powf(esno_db / 10.0);
    let mut mu = vec![mu0];
    for _ in 0..exponent {
        let mut next = Vec::with_capacity(mu.len() * 2);
        for &parent in &mu {
            next.push(check_node_mean(parent));
            next.push(2.0 * parent);
        }
        mu = next;
    }
    Ok(ReliabilityProfile {
        exponent,
        metric: mu,
        method: ConstructionMethod::AwgnGaussianApprox,
    })
}

/// Converts an information-bit SNR (Eb/N0) to the symbol SNR (Es/N0) for a
/// rate K/N code: Es/N0 = Eb/N0 · K/N.
pub fn ebno_to_esno_db(ebno_db: f64, rate: f64) -> f64 {
    ebno_db + 10.0 * rate.log10()
}

/// Result of a top-K selection: the code config plus the (expected empty)
/// list of user-above-frozen pairs found when validating it.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub config: CodeConfig,
    pub case_d_pairs: Vec<usize>,
}

/// Selects the K most reliable channels as the information set, breaking
/// score ties toward the larger index, and validates the pair ordering of
/// the resulting config.
pub fn select_info_set(
    profile: &ReliabilityProfile,
    k: usize,
) -> Result<Selection, ConstructError> {
    let block_len = profile.block_len();
    if k > block_len {
        return Err(ConstructError::KOutOfRange { k, block_len });
    }
    let mut order: Vec<usize> = (0..block_len).collect();
    order.sort_by(|&i, &j| {
        profile.metric[j]
            .total_cmp(&profile.metric[i])
            .then(j.cmp(&i))
    });
    let mut info_set: Vec<usize> = order[..k].to_vec();
    info_set.sort_unstable();
    let config =
        CodeConfig::new(profile.exponent, info_set).expect("selection produces a valid info set");
    let case_d = case_d_pairs(&config);
    Ok(Selection {
        config,
        case_d_pairs: case_d,
    })
}
