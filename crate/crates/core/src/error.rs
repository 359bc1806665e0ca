use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i64, m: i64 },
    #[error("{0} is outside the supported factorization range")]
    OutOfRange(u64),
    #[error("modulus must be positive, got {0}")]
    InvalidModulus(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("coefficient overflow in cyclotomic arithmetic")]
    Overflow,
    #[error("order {0} exceeds the configured bound {1}")]
    OrderTooLarge(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error("modulus {0} outside the supported range")]
    OutOfRange(u64),
    #[error("character mod {0} is not primitive")]
    NotPrimitive(u64),
    #[error("bad character index: {0}")]
    BadIndex(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("argument {0} outside the supported domain")]
    OutOfDomain(f64),
    #[error("pole of the gamma factor at s = {0}")]
    PoleError(String),
    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModformError {
    #[error("unsupported weight or precision: {0}")]
    OutOfRange(String),
    #[error("precision exhausted: need coefficient {need}, have {have}")]
    PrecisionExhausted { need: usize, have: usize },
    #[error("cache io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),
    #[error("accuracy not certified: {0}")]
    AccuracyNotCertified(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Modform(#[from] ModformError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}
