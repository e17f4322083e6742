use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot coarsen by refine: level {from} to {to}")]
    CannotCoarsen { from: u32, to: u32 },

    #[error("level {level} exceeds the configured cap {cap}")]
    LevelCap { level: u32, cap: u32 },

    #[error("coefficient count {got} does not match 2^{level}")]
    BadLength { level: u32, got: usize },

    #[error("not a norm exponent: {0}")]
    NotANormExponent(String),

    #[error("norm values were computed with different exponents ({0} vs {1})")]
    ExponentMismatch(String, String),

    #[error("non-conjugate exponents: 1/{p} + 1/{q} != 1")]
    NonConjugate { p: String, q: String },

    #[error("wrong direction: inclusion goes r into p (got p = {p}, r = {r})")]
    WrongInclusion { p: String, r: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("target violates {axiom}: {detail}")]
    Axiom { axiom: String, detail: String },

    #[error("step level {level} exceeds table max level {max}; recompile with --max-level {level} or higher")]
    LevelOverflow { level: u32, max: u32 },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid measure space: {0}")]
    InvalidSpace(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("target does not define {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
