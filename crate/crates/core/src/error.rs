use thiserror::Error;

/// Errors raised while building meshes, interface geometry, IFE spaces or solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// (H2)/(H3)-type violations detected during classification.
    #[error("mesh too coarse for interface: {0}")]
    MeshTooCoarse(String),

    #[error("unresolvable interface element {element}: {reason}")]
    UnresolvableElement { element: usize, reason: String },

    #[error("non-canonical cut in element {element} (minus-vertex mask {mask:#010b})")]
    NonCanonicalCut { element: usize, mask: u8 },

    #[error("collinear intersection points in element {0}")]
    CollinearPoints(usize),

    #[error("maximum angle {angle_deg:.4} deg of the plane triangle exceeds 135 deg in element {element}")]
    MaxAngleViolated { element: usize, angle_deg: f64 },

    #[error("point {point:?} lies outside element {element}")]
    OutsideElement { element: usize, point: [f64; 3] },

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("cut-cell decomposition failed in element {element}: {reason}")]
    Decomposition { element: usize, reason: String },

    #[error("missing geometry or basis for interface element {0}")]
    MissingBasis(usize),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
