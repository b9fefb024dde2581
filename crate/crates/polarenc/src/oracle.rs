//! Dense GF(2) reference encoders.
//!
//! Ground truth for equivalence testing of the in-place encoders: builds the
//! full generator matrix, inverts submatrices by Gauss-Jordan elimination,
//! and encodes by explicit vector-matrix products. Deliberately naive and
//! capped at desk scale.

use thiserror::Error;

use crate::bits::BitBuffer;
use crate::config::CodeConfig;

/// Largest exponent the oracle accepts. The dense generator for n=16 is
/// 2^32 bits; anything larger is out of the oracle's job description.
pub const MAX_ORACLE_EXPONENT: u32 = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle exponent {0} outside 1..={MAX_ORACLE_EXPONENT}")]
    ExponentOutOfRange(u32),
    #[error("index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("index set must be sorted ascending")]
    UnsortedIndexSet,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular over GF(2)")]
    Singular,
    #[error("operand shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Dense GF(2) matrix with word-packed rows, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitBuffer>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows).map(|_| BitBuffer::zeros(cols)).collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row].get(col)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row].set(col, value);
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &Self) -> Result<Self, OracleError> {
        if self.cols != other.rows {
            return Err(OracleError::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    out.data[i].xor_assign(&other.data[k]);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `u * M` over GF(2).
    pub fn vec_mul(&self, u: &BitBuffer) -> Result<BitBuffer, OracleError> {
        if u.len() != self.rows {
            return Err(OracleError::LengthMismatch {
                expected: self.rows,
                got: u.len(),
            });
        }
        let mut out = BitBuffer::zeros(self.cols);
        for i in 0..self.rows {
            if u.get(i) {
                out.xor_assign(&self.data[i]);
            }
        }
        Ok(out)
    }
}

/// The 2x2 polarization kernel [[1,0],[1,1]].
pub fn kernel() -> Gf2Matrix {
    let mut f = Gf2Matrix::zeros(2, 2);
    f.set(0, 0, true);
    f.set(1, 0, true);
    f.set(1, 1, true);
    f
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &Gf2Matrix, b: &Gf2Matrix) -> Gf2Matrix {
    let mut out = Gf2Matrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i1 in 0..a.rows() {
        for j1 in 0..a.cols() {
            if !a.get(i1, j1) {
                continue;
            }
            for i2 in 0..b.rows() {
                for j2 in 0..b.cols() {
                    if b.get(i2, j2) {
                        out.set(i1 * b.rows() + i2, j1 * b.cols() + j2, true);
                    }
                }
            }
        }
    }
    out
}

/// n-th Kronecker power of the kernel: the 2^n x 2^n generator matrix.
pub fn kron_power(exponent: u32) -> Result<Gf2Matrix, OracleError> {
    if !(1..=MAX_ORACLE_EXPONENT).contains(&exponent) {
        return Err(OracleError::ExponentOutOfRange(exponent));
    }
    let f = kernel();
    let mut g = f.clone();
    for _ in 1..exponent {
        g = kron(&f, &g);
    }
    Ok(g)
}

/// Submatrix selected by sorted row and column index sets.
pub fn submatrix(
    m: &Gf2Matrix,
    row_set: &[usize],
    col_set: &[usize],
) -> Result<Gf2Matrix, OracleError> {
    for set in [row_set, col_set] {
        if set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(OracleError::UnsortedIndexSet);
        }
    }
    if let Some(&r) = row_set.iter().find(|&&r| r >= m.rows()) {
        return Err(OracleError::IndexOutOfRange(r, m.rows()));
    }
    if let Some(&c) = col_set.iter().find(|&&c| c >= m.cols()) {
        return Err(OracleError::IndexOutOfRange(c, m.cols()));
    }
    let mut out = Gf2Matrix::zeros(row_set.len(), col_set.len());
    for (i, &r) in row_set.iter().enumerate() {
        for (j, &c) in col_set.iter().enumerate() {
            out.set(i, j, m.get(r, c));
        }
    }
    Ok(out)
}

/// Inverse over GF(2) by Gauss-Jordan elimination on the augmented matrix,
/// pivoting on the first nonzero row in each column.
pub fn gf2_invert(m: &Gf2Matrix) -> Result<Gf2Matrix, OracleError> {
    if m.rows() != m.cols() {
        return Err(OracleError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let dim = m.rows();
    // Augmented rows [M | I], width 2*dim.
    let mut aug: Vec<BitBuffer> =
        (0..dim)
            .map(|i| {
                BitBuffer::from_bits((0..2 * dim).map(|j| {
                    if j < dim {
                        m.get(i, j)
                    } else {
                        j - dim == i
                    }
                }))
            })
            .collect();
    for col in 0..dim {
        let pivot = (col..dim)
            .find(|&r| aug[r].get(col))
            .ok_or(OracleError::Singular)?;
        aug.swap(col, pivot);
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
    }
    let mut out = Gf2Matrix::zeros(dim, dim);
    for (i, row) in aug.iter().enumerate() {
        for j in 0..dim {
            out.set(i, j, row.get(dim + j));
        }
    }
    Ok(out)
}

/// Reference nonsystematic encode: `x = u * G`.
pub fn encode_nonsystematic_oracle(
    config: &CodeConfig,
    u: &BitBuffer,
) -> Result<BitBuffer, OracleError> {
    if u.len() != config.block_len() {
        return Err(OracleError::LengthMismatch {
            expected: config.block_len(),
            got: u.len(),
        });
    }
    let g = kron_power(config.exponent())?;
    g.vec_mul(u)
}

/// Reference systematic encode.
///
/// Solves the block-partitioned form of `x = u G` for the unknown halves:
/// recovers `u_A = (x_A + u_frozen G_{A^c A}) G_{A A}^{-1}`, then re-encodes
/// the full `u` to obtain `x`. Returns `(u, x)`.
pub fn encode_systematic_oracle(
    config: &CodeConfig,
    x_info: &BitBuffer,
    u_frozen: &BitBuffer,
) -> Result<(BitBuffer, BitBuffer), OracleError> {
    if x_info.len() != config.info_len() {
        return Err(OracleError::LengthMismatch {
            expected: config.info_len(),
            got: x_info.len(),
        });
    }
    if u_frozen.len() != config.frozen_len() {
        return Err(OracleError::LengthMismatch {
            expected: config.frozen_len(),
            got: u_frozen.len(),
        });
    }
    let g = kron_power(config.exponent())?;
    let info = config.info_set();
    let frozen = config.frozen_set();

    let g_fi = submatrix(&g, frozen, info)?;
    let g_ii = submatrix(&g, info, info)?;
    let g_ii_inv = gf2_invert(&g_ii)?;

    let mut rhs = x_info.clone();
    rhs.xor_assign(&g_fi.vec_mul(u_frozen)?);
    let u_info = g_ii_inv.vec_mul(&rhs)?;

    let mut u = BitBuffer::zeros(config.block_len());
    u.scatter(info, &u_info);
    u.scatter(frozen, u_frozen);
    let x = g.vec_mul(&u)?;
    Ok((u, x))
}
