use serde::Serialize;
use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("index 0 at byte {offset}; De Bruijn indices start at 1")]
    ZeroIndex { offset: usize },
    #[error("term is not closed")]
    NotClosed,
    #[error("bound k must be at least 1, got {k}")]
    InvalidBound { k: u32 },
    #[error("mark {mark} is not valid for {family} with k = {k}")]
    InvalidMark { mark: String, family: String, k: u32 },
    #[error("no closed terms of size {n}")]
    EmptySize { n: usize },
    #[error("size {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("radicands stay positive on (0, 1]; the system has no singularity there")]
    NoRootInRange,
    #[error("k = {k} is degenerate: the limit law has zero variance")]
    DegenerateBound { k: u32 },
    #[error("unsupported: {what}")]
    Unsupported { what: String },
    #[error("k = {k} is not of the form N_j")]
    NotBoundary { k: u32 },
    #[error("l = {l} is outside {lo}..={hi}")]
    LevelOutOfRange { l: u32, lo: u32, hi: u32 },
    #[error("cache file {path}: {message}")]
    Cache { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
