use crate::geometry::ComplexPoint;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} lies outside the domain")]
    OutsideDomain(ComplexPoint),

    #[error("point {0} is not strictly interior: defining function value {1} must be negative")]
    NotInterior(ComplexPoint, f64),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("inadmissible weight: {0}")]
    InadmissibleWeight(String),

    #[error("weight is nonpositive ({value}) at node {index} ({point})")]
    NonpositiveWeightAtNode {
        index: usize,
        point: ComplexPoint,
        value: f64,
    },

    #[error("derivative order ({alpha}, {beta}) exceeds the supported bound {bound}")]
    DerivativeOrder { alpha: usize, beta: usize, bound: usize },

    #[error("series did not reach the requested tail bound: {0}")]
    SeriesTruncation(String),

    #[error("degenerate Gram matrix: {0}")]
    DegenerateGram(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
