use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot primitivize the zero vector")]
    ZeroVector,

    #[error("datum violates axioms: {0}")]
    AxiomViolation(String),

    #[error("datum is not valid ({count} violation(s)); first: {first}")]
    InvalidDatum { count: usize, first: String },

    #[error("vector {0} does not lie in the weight lattice")]
    NotInWeightLattice(String),

    #[error("character does not vanish on the doubled spherical roots")]
    NotAnAutomorphismCharacter,

    #[error("character takes value {value} on simple root {root}; expected 0 or 1/2")]
    OddValueOnA { root: String, value: String },

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("action of element {element} is not a lattice automorphism")]
    NotLatticeAutomorphism { element: usize },

    #[error("action of element {element} does not permute the simple roots: {reason}")]
    NotDiagramAction { element: usize, reason: String },

    #[error("action of element {element} does not preserve the combinatorial invariants")]
    InvariantsNotPreserved { element: usize },

    #[error("model count is undefined for verdict {0}")]
    CountUndefined(String),

    #[error("instance too large for brute force: {0}")]
    TooLarge(String),

    #[error("no cover supplied for generator {generator}")]
    MissingCover { generator: usize },

    #[error("fiber sizes differ along an orbit: |fiber({a})| = {size_a}, |fiber({b})| = {size_b}")]
    FiberMismatch {
        a: String,
        size_a: usize,
        b: String,
        size_b: usize,
    },

    #[error("permutation for element {element} does not cover the action on the base: {reason}")]
    InconsistentCover { element: usize, reason: String },

    #[error("cone contains a line")]
    NotPointed,

    #[error("cone generator is zero")]
    ZeroGenerator,

    #[error("fan contains the same colored cone twice")]
    DuplicateCone,

    #[error("color action of element {element} is ambiguous on a two-color fiber; supply an explicit color permutation")]
    AmbiguousColorAction { element: usize },

    #[error("unknown color {0}")]
    UnknownColor(String),

    #[error("unknown simple root {0}")]
    UnknownRoot(String),

    #[error("unknown fixture {0}")]
    UnknownFixture(String),

    #[error("parse error: {0}")]
    Parse(String),
}
