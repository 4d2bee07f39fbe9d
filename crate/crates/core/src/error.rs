use thiserror::Error;

use crate::code::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field extension degree {0} (expected 3..=16)")]
    UnsupportedFieldDegree(u32),

    #[error("polynomial {poly:#x} is not primitive of degree {nu}")]
    NotPrimitive { nu: u32, poly: u32 },

    #[error("BCH(nu={nu}, t={t}): generator degree {degree} != nu*t = {expected}")]
    GeneratorDegree { nu: u32, t: u32, degree: usize, expected: usize },

    #[error("BCH(nu={nu}, t={t}, n={n}): {reason}")]
    InvalidBch { nu: u32, t: u32, n: usize, reason: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch { expected_rows: usize, expected_cols: usize, rows: usize, cols: usize },

    #[error("{cols} columns not divisible into {q} sub-blocks")]
    Indivisible { cols: usize, q: usize },

    #[error("invalid parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidParams(Vec<Violation>),

    #[error("information source exhausted at block {block}")]
    InsufficientInfo { block: usize },

    #[error("invalid decoder configuration: {0}")]
    DecoderConfig(String),

    #[error("miscorrection-free decoding requires the transmitted blocks")]
    MissingTruth,

    #[error("chain of {len} blocks is shorter than the decoding window {window}")]
    ChainTooShort { len: usize, window: usize },

    #[error("invalid density evolution setup: {0}")]
    DensityEvolution(String),

    #[error("invalid design query: {0}")]
    Design(String),

    #[error("outside the analyzed regime: {0}")]
    Regime(String),

    #[error("search budget exceeded after {0} nodes")]
    SearchBudget(u64),

    #[error("invalid channel: {0}")]
    Channel(String),

    #[error("invalid simulation configuration: {0}")]
    SimConfig(String),

    #[error("malformed block stream: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
