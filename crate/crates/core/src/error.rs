use thiserror::Error;

use crate::field::NumberField;
use crate::poly::RationalPolynomial;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("defining polynomial is not squarefree (gcd with derivative is {0})")]
    NotSquarefree(RationalPolynomial),
    #[error("defining polynomial must be monic of degree at least 1")]
    InvalidModulus,
    #[error("embedding rectangle does not isolate exactly one root ({roots} roots found)")]
    RectNotIsolating { roots: usize },
    #[error("root isolation failed: {0}")]
    RootIsolation(String),
    #[error("zero has no inverse")]
    ZeroInput,
    #[error("element is not real")]
    NotRealInput,
    /// The ambient algebra was found to be reducible; the carried field is
    /// the factor containing the selected root. Callers re-map their data
    /// into it and retry.
    #[error("reducible modulus, split into {}", .0.min_poly())]
    SplitRequired(NumberField),
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("generators are not R-linearly independent (lattice not discrete of rank three)")]
    NotDiscreteOrRankDeficient,
    #[error("generators do not span C^2 over C")]
    DegenerateSpan,
    #[error("no normalizing basis found up to height {0}")]
    SearchExhausted(u32),
    #[error("lattice vector lies in the maximal complex line of the real span")]
    InHyperplane,
    #[error("triple is zero or not primitive")]
    NotPrimitive,
    #[error("1, alpha, beta are Q-linearly dependent")]
    DegenerateV,
    #[error("period ratio is real")]
    RealRatio,
    #[error("element is not of degree three")]
    NotCubicElement,
    #[error("Q(lambda) vanishes, matrix is singular")]
    QVanishes,
    #[error("cubic has a rational root")]
    ReducibleCubic,
    #[error("lattice does not split (relation space has dimension {0})")]
    NotSplit(usize),
    #[error("imaginary part of tau is not positive")]
    WrongOrientation,
    #[error("no non-isogenous quotient pair found up to height {0}")]
    WitnessSearchExhausted(u32),
    #[error("isogeny report contradicts classification: {0}")]
    ConsistencyViolation(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
