use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("instance is empty")]
    EmptyInstance,
    #[error("instance has {n} points but only one color")]
    MonochromaticInstance { n: usize },
    #[error("points {first} and {second} share a position")]
    DuplicatePoint { first: usize, second: usize },
    #[error("coordinate {value} exceeds the exact range after scaling")]
    CoordinateRange { value: String },
    #[error("bottleneck is zero for an instance with {n} points")]
    DegenerateLambda { n: usize },
    #[error("invariant violated in {stage}: {detail}")]
    InvariantViolation { stage: String, detail: String },
    #[error("could not attach point {point} to the tree of cell {cell} without a crossing")]
    AttachFailure { cell: usize, point: usize },
    #[error("empty-triangle sweep exhausted in cell {cell}")]
    SweepExhausted { cell: usize },
    #[error("{components} components remain after stitching")]
    ForestRemains { components: usize },
    #[error("no planar bichromatic spanning tree exists")]
    Infeasible,
    #[error("instance has {n} points; the exact solver accepts at most {bound}")]
    InstanceTooLarge { n: usize, bound: usize },
    #[error("invalid generator spec: {0}")]
    DegenerateSpec(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn invariant(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::InvariantViolation { stage: stage.into(), detail: detail.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
