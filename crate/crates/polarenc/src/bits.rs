//! Packed bit vectors used for source words, codewords, and GF(2) matrix rows.

use std::fmt;

/// A fixed-length sequence of bits, packed 64 per word.
///
/// Index 0 is the least significant bit of word 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitBuffer {
    len: usize,
    words: Vec<u64>,
}

impl BitBuffer {
    /// An all-zero buffer of `len` bits.
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits<I>(bits: I) -> Self
    where
        I: IntoIterator<Item = bool>,
    {
        let mut out = Self {
            len: 0,
            words: Vec::new(),
        };
        for bit in bits {
            if out.len.is_multiple_of(64) {
                out.words.push(0);
            }
            let i = out.len;
            out.len += 1;
            out.set(i, bit);
        }
        out
    }

    /// Buffer from a slice of `0`/`1` bytes. Panics on other values.
    pub fn from_u8_bits(bits: &[u8]) -> Self {
        Self::from_bits(bits.iter().map(|&b| match b {
            0 => false,
            1 => true,
            other => panic!("bit value out of range: {other}"),
        }))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range (len {})",
            self.len
        );
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range (len {})",
            self.len
        );
        let mask = 1u64 << (index % 64);
        if value {
            self.words[index / 64] |= mask;
        } else {
            self.words[index / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(
            index < self.len,
            "bit index {index} out of range (len {})",
            self.len
        );
        self.words[index / 64] ^= 1u64 << (index % 64);
    }

    /// Elementwise modulo-2 addition of `other` into `self`.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor_assign length mismatch");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Bits at `indices`, in the order given.
    pub fn gather(&self, indices: &[usize]) -> Self {
        Self::from_bits(indices.iter().map(|&i| self.get(i)))
    }

    /// Writes `values` into `self` at `indices`, in the order given.
    pub fn scatter(&mut self, indices: &[usize], values: &Self) {
        assert_eq!(indices.len(), values.len(), "scatter length mismatch");
        for (slot, &i) in indices.iter().enumerate() {
            self.set(i, values.get(slot));
        }
    }
}

impl fmt::Debug for BitBuffer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBuffer[")?;
        for bit in self.iter() {
            write!(f, "{}", u8::from(bit))?;
        }
        write!(f, "]")
    }
}

impl FromIterator<bool> for BitBuffer {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bits(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_then_get_roundtrip() {
        let mut b = BitBuffer::zeros(130);
        b.set(0, true);
        b.set(63, true);
        b.set(64, true);
        b.set(129, true);
        assert!(b.get(0) && b.get(63) && b.get(64) && b.get(129));
        assert_eq!(b.count_ones(), 4);
        b.set(64, false);
        assert!(!b.get(64));
        assert_eq!(b.count_ones(), 3);
    }

    #[test]
    fn gather_scatter_inverse() {
        let mut b = BitBuffer::zeros(8);
        let vals = BitBuffer::from_u8_bits(&[1, 0, 1]);
        b.scatter(&[1, 4, 7], &vals);
        assert_eq!(b.gather(&[1, 4, 7]), vals);
        assert_eq!(b.count_ones(), 2);
    }

    proptest! {
        // Writing bit i leaves every other index unchanged.
        #[test]
        fn write_is_local(len in 1usize..200, idx in 0usize..200, v: bool) {
            let idx = idx % len;
            let mut b = BitBuffer::from_bits((0..len).map(|i| i % 3 == 0));
            let before: Vec<bool> = b.iter().collect();
            b.set(idx, v);
            prop_assert_eq!(b.get(idx), v);
            for (i, &was) in before.iter().enumerate() {
                if i != idx {
                    prop_assert_eq!(b.get(i), was);
                }
            }
        }

        // In-place XOR equals elementwise modulo-2 addition.
        #[test]
        fn xor_matches_elementwise(bits_a in proptest::collection::vec(any::<bool>(), 1..200)) {
            let bits_b: Vec<bool> = bits_a.iter().map(|&b| !b).collect();
            let mut a = BitBuffer::from_bits(bits_a.iter().copied());
            let b = BitBuffer::from_bits(bits_b.iter().copied());
            a.xor_assign(&b);
            for (i, (&x, &y)) in bits_a.iter().zip(&bits_b).enumerate() {
                prop_assert_eq!(a.get(i), x ^ y);
            }
        }
    }
}
