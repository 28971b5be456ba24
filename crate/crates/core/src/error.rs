use std::fmt;

use thiserror::Error;

/// Which block of the saddle-point system a region-related error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionRole {
    Data,
    Target,
}

impl fmt::Display for RegionRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionRole::Data => f.write_str("data region omega"),
            RegionRole::Target => f.write_str("target region B"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid subdivision counts nx={nx}, ny={ny}")]
    InvalidSubdivision { nx: usize, ny: usize },

    #[error("degenerate rectangle [{x0}, {x1}] x [{y0}, {y1}]")]
    DegenerateRectangle { x0: f64, x1: f64, y0: f64, y1: f64 },

    #[error("face {face} is not an interior face (mesh has {count})")]
    NotInteriorFace { face: usize, count: usize },

    #[error("element index {index} out of range (mesh has {count} triangles)")]
    InvalidElement { index: usize, count: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{0} contains no mesh elements")]
    EmptyRegion(RegionRole),

    #[error("{0} has zero norm of the exact solution; relative error undefined")]
    ZeroReferenceNorm(RegionRole),

    #[error("factorization failed: {reason}")]
    Factorization { reason: String },

    #[error("solve residual {residual:.3e} exceeds bound {bound:.3e} (estimated 1-norm condition {condition:.3e})")]
    Residual {
        residual: f64,
        bound: f64,
        condition: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("refinement level {level} (n = {n}) failed: {source}")]
    Level {
        level: usize,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
