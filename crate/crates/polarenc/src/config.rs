//! Code parameters: block length, information set, frozen set, frozen values.

use thiserror::Error;

use crate::bits::BitBuffer;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("block exponent must be at least 1")]
    ExponentTooSmall,
    #[error("info-set index {0} out of range for block length {1}")]
    IndexOutOfRange(usize, usize),
    #[error("info set must be strictly increasing (saw {0} after {1})")]
    NotStrictlyIncreasing(usize, usize),
    #[error("frozen values length {got} does not match frozen-set size {expected}")]
    FrozenValuesLength { expected: usize, got: usize },
}

/// Block length, information set and frozen set of one polar code.
///
/// Indices are 0-based. The information set indexes positions of the
/// codeword `x` (systematic payload) and, equally, rows of the source
/// word `u`; the frozen set is its complement and carries known values
/// (zero unless overridden).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeConfig {
    exponent: u32,
    block_len: usize,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    info_mask: BitBuffer,
    frozen_values: BitBuffer,
}

impl CodeConfig {
    /// Builds a config for block length `2^exponent` with the given
    /// information set (strictly increasing). Frozen values default to zero.
    pub fn new(exponent: u32, info_set: Vec<usize>) -> Result<Self, ConfigError> {
        if exponent < 1 {
            return Err(ConfigError::ExponentTooSmall);
        }
        let block_len = 1usize << exponent;
        let mut info_mask = BitBuffer::zeros(block_len);
        let mut prev: Option<usize> = None;
        for &i in &info_set {
            if i >= block_len {
                return Err(ConfigError::IndexOutOfRange(i, block_len));
            }
            if let Some(p) = prev {
                if i <= p {
                    return Err(ConfigError::NotStrictlyIncreasing(i, p));
                }
            }
            prev = Some(i);
            info_mask.set(i, true);
        }
        let frozen_set: Vec<usize> = (0..block_len).filter(|&i| !info_mask.get(i)).collect();
        let frozen_values = BitBuffer::zeros(frozen_set.len());
        Ok(Self {
            exponent,
            block_len,
            info_set,
            frozen_set,
            info_mask,
            frozen_values,
        })
    }

    /// Replaces the default all-zero frozen values. `values` is aligned with
    /// the frozen set in ascending index order.
    pub fn with_frozen_values(mut self, values: BitBuffer) -> Result<Self, ConfigError> {
        if values.len() != self.frozen_set.len() {
            return Err(ConfigError::FrozenValuesLength {
                expected: self.frozen_set.len(),
                got: values.len(),
            });
        }
        self.frozen_values = values;
        Ok(self)
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Block length N.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Number of information positions K.
    pub fn info_len(&self) -> usize {
        self.info_set.len()
    }

    pub fn frozen_len(&self) -> usize {
        self.frozen_set.len()
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    #[inline]
    pub fn is_info(&self, index: usize) -> bool {
        self.info_mask.get(index)
    }

    /// Frozen values aligned with `frozen_set()`.
    pub fn frozen_values(&self) -> &BitBuffer {
        &self.frozen_values
    }

    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.block_len as f64
    }
}

/// Frozen/user pattern of the consecutive index pair (2ψ, 2ψ+1).
///
/// The top of the pair is the even index. The letters a-d used in stats
/// reporting correspond to the variants in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCase {
    /// (a) both indices carry user bits.
    BothUser,
    /// (b) both indices are frozen.
    BothFrozen,
    /// (c) frozen on top (2ψ), user at the bottom (2ψ+1).
    FrozenTopUserBottom,
    /// (d) user on top (2ψ), frozen at the bottom (2ψ+1). Cannot occur for
    /// codes constructed on symmetric binary memoryless channels.
    UserTopFrozenBottom,
}

/// Classifies pair `psi` by membership of indices 2ψ and 2ψ+1 in the
/// information set.
pub fn classify_pair(config: &CodeConfig, psi: usize) -> PairCase {
    assert!(
        psi < config.block_len() / 2,
        "pair index {psi} out of range"
    );
    match (config.is_info(2 * psi), config.is_info(2 * psi + 1)) {
        (true, true) => PairCase::BothUser,
        (false, false) => PairCase::BothFrozen,
        (false, true) => PairCase::FrozenTopUserBottom,
        (true, false) => PairCase::UserTopFrozenBottom,
    }
}

/// All pair indices ψ whose pair has a user bit on top of a frozen bit.
/// Empty for any frozen set that respects the channel ordering.
pub fn case_d_pairs(config: &CodeConfig) -> Vec<usize> {
    (0..config.block_len() / 2)
        .filter(|&psi| classify_pair(config, psi) == PairCase::UserTopFrozenBottom)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builds_and_partitions() {
        let cfg = CodeConfig::new(3, vec![1, 3, 5, 6, 7]).unwrap();
        assert_eq!(cfg.block_len(), 8);
        assert_eq!(cfg.info_len(), 5);
        assert_eq!(cfg.frozen_set(), &[0, 2, 4]);
        assert_eq!(cfg.frozen_values().len(), 3);
        assert!(cfg.frozen_values().is_zero());
    }

    #[test]
    fn rejects_bad_sets() {
        assert_eq!(
            CodeConfig::new(0, vec![]),
            Err(ConfigError::ExponentTooSmall)
        );
        assert_eq!(
            CodeConfig::new(2, vec![4]),
            Err(ConfigError::IndexOutOfRange(4, 4))
        );
        assert_eq!(
            CodeConfig::new(2, vec![2, 1]),
            Err(ConfigError::NotStrictlyIncreasing(1, 2))
        );
        assert_eq!(
            CodeConfig::new(2, vec![1, 1]),
            Err(ConfigError::NotStrictlyIncreasing(1, 1))
        );
        let cfg = CodeConfig::new(2, vec![3]).unwrap();
        assert!(matches!(
            cfg.with_frozen_values(BitBuffer::zeros(2)),
            Err(ConfigError::FrozenValuesLength {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn classify_pair_examples() {
        let cfg = CodeConfig::new(3, vec![1, 3, 5, 6, 7]).unwrap();
        assert_eq!(classify_pair(&cfg, 3), PairCase::BothUser);
        assert_eq!(classify_pair(&cfg, 0), PairCase::FrozenTopUserBottom);

        let empty = CodeConfig::new(1, vec![]).unwrap();
        assert_eq!(classify_pair(&empty, 0), PairCase::BothFrozen);

        let d = CodeConfig::new(2, vec![2]).unwrap();
        assert_eq!(classify_pair(&d, 1), PairCase::UserTopFrozenBottom);
        assert_eq!(case_d_pairs(&d), vec![1]);
    }

    proptest! {
        // Every index is in exactly one of the information and frozen sets,
        // and classify_pair is total over all pair indices.
        #[test]
        fn partition_and_total_classification(n in 1u32..7, mask in any::<u64>()) {
            let block = 1usize << n;
            let info: Vec<usize> = (0..block).filter(|&i| (mask >> i) & 1 == 1).collect();
            let cfg = CodeConfig::new(n, info).unwrap();
            for i in 0..block {
                let in_info = cfg.info_set().contains(&i);
                let in_frozen = cfg.frozen_set().contains(&i);
                prop_assert!(in_info != in_frozen);
                prop_assert_eq!(cfg.is_info(i), in_info);
            }
            for psi in 0..block / 2 {
                let _ = classify_pair(&cfg, psi);
            }
        }
    }
}
