use crate::groups::MASK_BITS;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("group order must be at least 1")]
    EmptyGroup,

    #[error("group order {0} exceeds the {MASK_BITS}-bit subset capacity")]
    OrderTooLarge(u64),

    #[error("element {element} is outside a group of order {order}")]
    ElementOutOfRange { element: u32, order: u32 },

    #[error("tuple {got} has wrong arity for a product of {want} factors")]
    BadArity { got: usize, want: usize },

    #[error("operation requires a cyclic group, got a product group")]
    NotCyclic,

    #[error("subset must be nonempty")]
    EmptySubset,

    #[error("fold count h must be at least 1")]
    ZeroFold,

    #[error("{a} is not invertible modulo {n}")]
    NotAUnit { a: u32, n: u32 },

    #[error("{d} does not divide {n}")]
    NotADivisor { d: u32, n: u32 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("construction places two elements on the same residue")]
    Collision,

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("results cache line {line}: {msg}")]
    CacheParse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
