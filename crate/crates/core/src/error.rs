//! Engine-wide error type. Every validation failure names the rule it violates.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unstable moduli space: (g,n)=({g},{n}) requires 2g-2+n > 0")]
    Unstable { g: usize, n: usize },

    #[error("stability violated: (h,m)=({h},{m}) gives 2h-2+m <= 0")]
    UnstableGamma { h: usize, m: usize },

    #[error("parity condition violated: deg={deg}, m={m}")]
    Parity { deg: usize, m: usize },

    #[error("parity condition violated: ungraded mode requires even degree, got deg={deg}")]
    ParityUngraded { deg: usize },

    #[error("degree must be positive: a minimal class on (h,m)=({h},{m}) has positive degree")]
    DegreeNotPositive { h: usize, m: usize },

    #[error("genus 0 with 3 markings carries only the degree-0 class; got deg={deg}")]
    TrivialBranchDegree { deg: usize },

    #[error("the trivial branch (h,m)=(0,3) routes to the constant theory and has no correction evaluator")]
    TrivialBranch,

    #[error("basis index {index} out of range 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("not a permutation of 1..={n}")]
    NotAPermutation { n: usize },

    #[error("space mismatch: class lives on ({class_g},{class_n}), expected ({want_g},{want_n})")]
    SpaceMismatch {
        class_g: usize,
        class_n: usize,
        want_g: usize,
        want_n: usize,
    },

    #[error("keep list has {got} markings, expected m={m}")]
    KeepSize { got: usize, m: usize },

    #[error("invalid marking {marking}: markings range over 1..={n}")]
    InvalidMarking { marking: usize, n: usize },

    #[error("duplicate marking {marking} in keep list")]
    DuplicateMarking { marking: usize },

    #[error("deformation entry outside declared bounds: (g,n)=({g},{n}) with bounds g<={g_max}, n<={n_max}")]
    OutOfBounds {
        g: usize,
        n: usize,
        g_max: usize,
        n_max: usize,
    },

    #[error("cannot parse basis token `{token}`")]
    BadToken { token: String },

    #[error("cannot parse rational `{text}`")]
    BadRational { text: String },

    #[error("invalid separating graph: {reason}")]
    BadGraph { reason: String },

    #[error("invalid deformation table: {reason}")]
    BadTable { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
