pub mod colored;
pub mod contraction;
pub mod counting;
pub mod error;
pub mod oracle;
pub mod partitions;
pub mod sample;
pub mod specfile;

pub use colored::{
    check_compatible, materialize, Color, ColorType, ColoredBipartiteGraph, ColoredVertexSet,
    ContractionSpec, Edge, SigmaTuple, Skeleton,
};
pub use error::{Error, Result, Side};
pub use partitions::{partitions_of, Partition};
