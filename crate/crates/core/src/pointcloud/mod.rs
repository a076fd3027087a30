//! Orbit maps for 3D point clouds under translation, scaling and rotation:
//! centering, mean-radius normalization, PCA alignment with sign
//! disambiguation, and their composition into a similarity-invariant map.

mod cloud;
mod grid;
mod io;
mod pca;

use thiserror::Error;

pub use cloud::{center, scale_normalize, PointCloud};
pub use grid::{rotation_grid, SCALE_SET, TRANSLATION_SET};
pub use io::{read_cloud, write_cloud, CloudFormat};
pub use pca::{
    orbit_map_similarity, orbit_map_similarity_with, pca_align, pca_align_with, PcaAlignment,
    PcaDiagnostics, PcaOptions, SignRule, EPS_GAP, EPS_SIGN,
};

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("empty input")]
    Empty,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { got: usize, need: usize },
    #[error("degenerate spectrum: relative singular-value gaps {relative_gaps:?}")]
    DegenerateSpectrum { relative_gaps: [f64; 2] },
    #[error("ambiguous sign for principal axis {axis}")]
    AmbiguousSign { axis: usize },
    #[error("degenerate scale: all points at the origin")]
    DegenerateScale,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
