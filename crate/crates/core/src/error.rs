use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("color {color} is outside 1..={d}")]
    ColorOutOfRange { color: u32, d: u32 },

    #[error("color types must be nonempty")]
    EmptyColorType,

    #[error("colored vertex set has no vertices")]
    EmptyVertexSet,

    #[error("color {color} has multiplicity {left} on the white side but {right} on the black side")]
    Incompatible { color: u32, left: usize, right: usize },

    #[error("color {color} is not used by any vertex")]
    UnusedColor { color: u32 },

    #[error("bad bijection for color {color}: {reason}")]
    BadSigma { color: u32, reason: String },

    #[error("not an element of the type-preserving group: {0}")]
    BadGroupElement(String),

    #[error("vertex {vertex} on the {side} side: {reason}")]
    BadIncidence {
        side: Side,
        vertex: usize,
        reason: String,
    },

    #[error("search space of size {size} exceeds the bound {bound}")]
    TooLarge { size: String, bound: u64 },

    #[error("every vertex must carry all {d} colors")]
    NotFullType { d: u32 },

    #[error("matrix for color {color} is not unitary (max |U†U - 1| = {defect})")]
    NotUnitary { color: u32, defect: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("no tensor supplied for color type {0}")]
    MissingTensor(String),

    #[error("malformed spec file: {0}")]
    SpecFormat(String),

    #[error("color type {ty} listed twice on the {side} side")]
    DuplicateType { side: Side, ty: String },

    #[error("spec family is invalid at s = {s}: {source}")]
    Family { s: u32, source: Box<Error> },

    #[error("empty range {0}")]
    EmptyRange(String),

    #[error("orbit sum {numer}/{denom} is not an integer")]
    NonIntegral { numer: String, denom: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    White,
    Black,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::White => write!(f, "white"),
            Side::Black => write!(f, "black"),
        }
    }
}
