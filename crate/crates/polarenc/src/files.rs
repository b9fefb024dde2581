//! On-disk formats: frozen-set files and bit files.
//!
//! A frozen-set file is line-oriented text: a header
//! `polar-frozen v1 N=<N> K=<K>`, an optional `warning case-d` marker (for
//! sets that failed pair-order validation but were written anyway), then
//! exactly K information-set indices in ascending order, one per line.
//!
//! Bit files come in two encodings: `ascii` (one '0' or '1' character per
//! bit, any ASCII whitespace ignored) and `raw` (packed bytes, bit i stored
//! in bit i mod 8 — least significant first — of byte i/8). Neither carries
//! a length; the reader is told how many bits to expect. Raw padding bits
//! are written as zero and ignored on read.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bits::BitBuffer;
use crate::config::{CodeConfig, ConfigError};

pub const FROZEN_SET_MAGIC: &str = "polar-frozen v1";
pub const CASE_D_WARNING_LINE: &str = "warning case-d";

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: bad frozen-set header: {detail}", path.display())]
    BadHeader { path: PathBuf, detail: String },
    #[error("{} line {line}: bad info-set index: {detail}", path.display())]
    BadIndexLine {
        path: PathBuf,
        line: usize,
        detail: String,
    },
    #[error("{}: expected {expected} info indices, found {got}", path.display())]
    IndexCount {
        path: PathBuf,
        expected: usize,
        got: usize,
    },
    #[error("{}: bad bit character {ch:?}", path.display())]
    BadBitChar { path: PathBuf, ch: char },
    #[error("{}: expected {expected} bits, found {got}", path.display())]
    BitCount {
        path: PathBuf,
        expected: usize,
        got: usize,
    },
    #[error("{}: expected {expected} bytes for the declared length, found {got}", path.display())]
    RawLength {
        path: PathBuf,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn io_err(path: &Path, source: io::Error) -> FileError {
    FileError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `config` as a frozen-set file; `case_d_warning` adds the marker
/// line recording that pair-order validation failed.
pub fn write_frozen_set(
    path: &Path,
    config: &CodeConfig,
    case_d_warning: bool,
) -> Result<(), FileError> {
    let mut out = format!(
        "{FROZEN_SET_MAGIC} N={} K={}\n",
        config.block_len(),
        config.info_len()
    );
    if case_d_warning {
        out.push_str(CASE_D_WARNING_LINE);
        out.push('\n');
    }
    for &i in config.info_set() {
        out.push_str(&i.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads a frozen-set file back into a config, reporting whether the
/// case-d warning marker was present.
pub fn read_frozen_set(path: &Path) -> Result<(CodeConfig, bool), FileError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad_header = |detail: &str| FileError::BadHeader {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad_header("empty file"))?;
    let mut fields = header.split_whitespace();
    if (fields.next(), fields.next()) != (Some("polar-frozen"), Some("v1")) {
        return Err(bad_header("missing `polar-frozen v1` magic"));
    }
    let block_len: usize = fields
        .next()
        .and_then(|f| f.strip_prefix("N="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad_header("missing or malformed N= field"))?;
    let k: usize = fields
        .next()
        .and_then(|f| f.strip_prefix("K="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad_header("missing or malformed K= field"))?;
    if fields.next().is_some() {
        return Err(bad_header("trailing fields after K="));
    }
    if block_len < 2 || !block_len.is_power_of_two() {
        return Err(bad_header(&format!(
            "N={block_len} is not a power of two >= 2"
        )));
    }
    if k > block_len {
        return Err(bad_header(&format!("K={k} exceeds N={block_len}")));
    }
    let exponent = block_len.trailing_zeros();

    let mut warned = false;
    let mut info_set = Vec::with_capacity(k);
    for (line_no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == CASE_D_WARNING_LINE && info_set.is_empty() && !warned {
            warned = true;
            continue;
        }
        let index: usize = line.parse().map_err(|_| FileError::BadIndexLine {
            path: path.to_path_buf(),
            line: line_no + 1,
            detail: format!("{line:?} is not a decimal index"),
        })?;
        info_set.push(index);
    }
    if info_set.len() != k {
        return Err(FileError::IndexCount {
            path: path.to_path_buf(),
            expected: k,
            got: info_set.len(),
        });
    }
    let config = CodeConfig::new(exponent, info_set)?;
    Ok((config, warned))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitFileFormat {
    Ascii,
    Raw,
}

/// Writes `bits` to `path` in the chosen encoding.
pub fn write_bits(path: &Path, bits: &BitBuffer, format: BitFileFormat) -> Result<(), FileError> {
    match format {
        BitFileFormat::Ascii => {
            let mut text: String = bits.iter().map(|b| if b { '1' } else { '0' }).collect();
            text.push('\n');
            fs::write(path, text).map_err(|e| io_err(path, e))
        }
        BitFileFormat::Raw => {
            let mut bytes = vec![0u8; bits.len().div_ceil(8)];
            for (i, bit) in bits.iter().enumerate() {
                if bit {
                    bytes[i / 8] |= 1 << (i % 8);
                }
            }
            fs::write(path, bytes).map_err(|e| io_err(path, e))
        }
    }
}

/// Reads exactly `expected_len` bits from `path`.
pub fn read_bits(
    path: &Path,
    expected_len: usize,
    format: BitFileFormat,
) -> Result<BitBuffer, FileError> {
    match format {
        BitFileFormat::Ascii => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let mut values = Vec::with_capacity(expected_len);
            for ch in text.chars() {
                match ch {
                    '0' => values.push(false),
                    '1' => values.push(true),
                    c if c.is_ascii_whitespace() => continue,
                    c => {
                        return Err(FileError::BadBitChar {
                            path: path.to_path_buf(),
                            ch: c,
                        })
                    }
                }
            }
            if values.len() != expected_len {
                return Err(FileError::BitCount {
                    path: path.to_path_buf(),
                    expected: expected_len,
                    got: values.len(),
                });
            }
            Ok(values.into_iter().collect())
        }
        BitFileFormat::Raw => {
            let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
            let expected_bytes = expected_len.div_ceil(8);
            if bytes.len() != expected_bytes {
                return Err(FileError::RawLength {
                    path: path.to_path_buf(),
                    expected: expected_bytes,
                    got: bytes.len(),
                });
            }
            Ok(BitBuffer::from_bits(
                (0..expected_len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1),
            ))
        }
    }
}
