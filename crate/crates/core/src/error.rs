use thiserror::Error;

use crate::layout::Party;

/// Errors produced by layout construction, tensor operations, state
/// constructors, and the optimizer.
#[derive(Debug, Clone, Error)]
pub enum BekError {
    #[error("layout must contain at least one factor")]
    EmptyLayout,

    #[error("factor dimensions must be >= 1")]
    ZeroFactorDim,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator matrix must be square, got {rows}x{cols}")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("layouts do not match")]
    LayoutMismatch,

    #[error("invalid permutation of {expected} factors: {detail}")]
    InvalidPermutation { expected: usize, detail: String },

    #[error("factor index {index} out of range for {count} factors")]
    FactorIndexOutOfRange { index: usize, count: usize },

    #[error("cannot trace out every factor; use trace() instead")]
    TraceAllFactors,

    #[error("matrix is not Hermitian: max |X - X^dag| entry = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("trace deviates from 1 by {deviation:.3e}")]
    TraceNotUnit { deviation: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eig:.3e}")]
    NotPositive { min_eig: f64 },

    #[error("operator has no {0:?} factor; a bipartite cut requires both parties")]
    SingleParty(Party),

    #[error("Werner parameter lambda = {lambda} has singular normalization (8*lambda - 1 = 0)")]
    SingularWernerNormalization { lambda: f64 },

    #[error("Werner parameter lambda = {lambda} is below 1/2; the construction is not positive semidefinite there")]
    WernerLambdaBelowHalf { lambda: f64 },

    #[error("parameter b = {b} is outside the working range (1/6, 1/5]")]
    BOutOfRange { b: f64 },

    #[error("parameter lambda = {lambda} is outside the working range [2, inf)")]
    LambdaOutOfRange { lambda: f64 },

    #[error("tensor power would have dimension {dim}, exceeding the cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("expected a nonzero vector")]
    ZeroVector,

    #[error("witness vector family has wrong length: expected {expected}, got {actual}")]
    WitnessFamilySize { expected: usize, actual: usize },

    #[error("witness evaluation requires lambda > 1/8, got {lambda}")]
    WitnessLambdaPole { lambda: f64 },

    #[error("expectation value has non-negligible imaginary part {imag:.3e}; input is not Hermitian enough")]
    ImaginaryExpectation { imag: f64 },

    #[error("invalid see-saw configuration: {0}")]
    InvalidConfig(String),

    #[error("all {0} starts were degenerate (singular Gram metric after regularization)")]
    AllStartsDegenerate(usize),

    #[error("copy count n = {0} is outside the supported range")]
    CopyCountOutOfRange(usize),
}

pub type Result<T> = std::result::Result<T, BekError>;
