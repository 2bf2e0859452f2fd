use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("exponent list is empty")]
    EmptyExponents,
    #[error("exponent {0} is not positive")]
    NonPositiveExponent(i64),
    #[error("p^e = {p}^{e} does not fit in 63 bits")]
    ModulusTooLarge { p: u64, e: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry ({row},{col}) is not divisible by p^(e_i - e_j)")]
    NotInRp { row: usize, col: usize },
    #[error("matrix does not satisfy the restricted congruences: {0}")]
    NotRestricted(String),
    #[error("e_1 = {0} but the restricted count needs e_1 >= 2")]
    ExponentTooSmall(u32),
    #[error("hypothesis violated: {}", .0.join("; "))]
    HypothesisViolation(Vec<String>),
    #[error("enumeration of {size} residue classes exceeds the bound {bound}")]
    EnumerationTooLarge { size: String, bound: u64 },
    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),
    #[error("cocycle identity fails at (x, y, z) = ({x}, {y}, {z})")]
    CocycleIdentityFailed { x: usize, y: usize, z: usize },
    #[error("cocycle is not normalized at ({x}, {y})")]
    NotNormalized { x: usize, y: usize },
    #[error("group of order {order} exceeds the exhaustion bound {bound}")]
    GroupTooLarge { order: String, bound: u64 },
    #[error("p-central and p^2-abelian have not been verified for this group")]
    PreconditionNotChecked,
    #[error("group is not p-central: {0}")]
    NotPCentral(String),
    #[error("entry {0} of A - I is not divisible by p")]
    DivisionImpossible(String),
    #[error("homomorphism check failed: {0}")]
    HomomorphismCheckFailed(String),
    #[error("group of order {0} is not a p-group for p = {1}")]
    NotAPGroup(usize, u64),
    #[error("operation requires an odd prime, got p = {0}")]
    EvenPrime(u64),
    #[error("matrix is not an automorphism")]
    NotAnAutomorphism,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
