//! Error types. Every variant has a stable machine-readable kind.

use thiserror::Error;

/// Rejections raised while validating a generating polygon.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("expected an even number of at least 4 vertices, got {count}")]
    TooFewVertices { count: usize },
    #[error("vertex {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("edge {index} has zero length")]
    DegenerateEdge { index: usize },
    #[error("vertex {index} is not the negative of vertex {opposite}")]
    NotCentrallySymmetric { index: usize, opposite: usize },
    #[error("vertices are listed clockwise")]
    WrongOrientation,
    #[error("polygon is not strictly convex at vertex {index}")]
    NotConvex { index: usize },
}

impl GeometryError {
    pub fn kind(&self) -> &'static str {
        match self {
            GeometryError::TooFewVertices { .. } => "TooFewVertices",
            GeometryError::NonFinite { .. } => "NonFinite",
            GeometryError::DegenerateEdge { .. } => "DegenerateEdge",
            GeometryError::NotCentrallySymmetric { .. } => "NotCentrallySymmetric",
            GeometryError::WrongOrientation => "WrongOrientation",
            GeometryError::NotConvex { .. } => "NotConvex",
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("trace-path length vanishes for panel ({i}, {j})")]
    DegenerateMu { i: usize, j: usize },
    #[error("panel coordinates out of range: {0}")]
    InvalidCoords(String),
    #[error("point is outside the wall cone of edge {0}")]
    OutsideCone(usize),
    #[error("point has gauge {0} > 1")]
    OutsideDisk(f64),
    #[error("no panel contains the point ({0}, {1})")]
    NoPanelFound(f64, f64),
    #[error("point is not on the unit sphere (d_e = {0})")]
    NotOnSphere(f64),
    #[error("the identity has no direction")]
    OriginPoint,
    #[error("the distance is not smooth at this point ({0})")]
    NotSmoothPoint(String),
    #[error("interpolation parameter s = {0} outside [0, 1]")]
    InvalidS(f64),
    #[error("target is not a member of the family: {0}")]
    UnreachableTarget(String),
    #[error("action fit residual {0} exceeds tolerance")]
    ActionFit(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Geometry(g) => g.kind(),
            Error::NonPositiveLambda(_) => "NonPositiveLambda",
            Error::DegenerateMu { .. } => "DegenerateMu",
            Error::InvalidCoords(_) => "InvalidCoords",
            Error::OutsideCone(_) => "OutsideCone",
            Error::OutsideDisk(_) => "OutsideDisk",
            Error::NoPanelFound(..) => "NoPanelFound",
            Error::NotOnSphere(_) => "NotOnSphere",
            Error::OriginPoint => "OriginPoint",
            Error::NotSmoothPoint(_) => "NotSmoothPoint",
            Error::InvalidS(_) => "InvalidS",
            Error::UnreachableTarget(_) => "UnreachableTarget",
            Error::ActionFit(_) => "ActionFit",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
