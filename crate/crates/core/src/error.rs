use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("chord too short: |q - p| = {0:e}")]
    NearDiagonal(f64),
    #[error("offset distance {delta} exceeds the feasible bound {bound}")]
    OffsetTooLarge { delta: f64, bound: f64 },
    #[error(
        "curvature vanishes near t = {t} (kappa = {kappa:e}); apply an inversion centred outside the curvature tube first"
    )]
    VanishingCurvature { t: f64, kappa: f64 },
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("point lies outside the domain: {0}")]
    OutsideDomain(String),
    #[error("extrapolation unreliable: {0}")]
    Extrapolation(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("singular map: {0}")]
    Singular(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag, used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateCurve(_) => "degenerate_curve",
            Error::NearDiagonal(_) => "near_diagonal",
            Error::OffsetTooLarge { .. } => "offset_too_large",
            Error::VanishingCurvature { .. } => "vanishing_curvature",
            Error::Geometry(_) => "geometry",
            Error::OutsideDomain(_) => "outside_domain",
            Error::Extrapolation(_) => "extrapolation",
            Error::DegenerateSample(_) => "degenerate_sample",
            Error::Resolution(_) => "resolution",
            Error::Singular(_) => "singular_map",
            Error::Config(_) => "config",
            Error::Schema(_) => "schema",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
