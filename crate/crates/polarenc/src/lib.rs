//! Memory-minimal systematic polar code encoding.
//!
//! Implements serial and two-bit-parallel in-place encoders that produce a
//! systematic codeword using N bits of working memory and exactly
//! (N/2)*log2(N) XOR operations, alongside a dense GF(2) reference encoder,
//! channel-based code construction (BEC Bhattacharyya recursion and an AWGN
//! Gaussian approximation), operation-exact instrumentation, and a CLI.

pub mod bits;
pub mod cli;
pub mod config;
pub mod construct;
pub mod encoder;
pub mod files;
pub mod instrument;
pub mod oracle;
pub mod parallel;
pub mod verify;

pub use bits::BitBuffer;
pub use config::{CodeConfig, ConfigError, PairCase};
pub use construct::{
    construct_awgn_ga, construct_bec, ebno_to_esno_db, select_info_set, ConstructError,
    ConstructionMethod, ReliabilityProfile, Selection,
};
pub use encoder::{
    encode_nspc, encode_nspc_with_sink, encode_spc, encode_spc_with_sink, schedule_indices,
    ConnectionIndex, EncodeError,
};
pub use files::{
    read_bits, read_frozen_set, write_bits, write_frozen_set, BitFileFormat, FileError,
};
pub use instrument::{assert_complexity, benchmark, EncodeMode, NoopSink, OpLedger, OpSink};
pub use oracle::{Gf2Matrix, OracleError};
pub use parallel::{
    encode_spc_parallel2, encode_spc_parallel2_with_sink, propagation_stats, PropagationStats,
};
pub use verify::{run_verify, VerifyError, VerifyMode, VerifyOptions, VerifyReport};
