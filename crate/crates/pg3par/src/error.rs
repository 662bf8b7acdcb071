use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate line: spanning points coincide (angular separation {sep:.3e})")]
    DegenerateLine { sep: f64 },

    #[error("cannot normalize a near-zero quaternion (norm {norm:.3e})")]
    ZeroQuaternion { norm: f64 },

    #[error("cannot normalize a near-zero vector (norm {norm:.3e})")]
    ZeroVector { norm: f64 },

    #[error("six-tuple is not a line: Klein quadric residual {residual:.3e} exceeds {limit:.1e}")]
    OffQuadric { residual: f64, limit: f64 },

    #[error("ruling radius must be positive, got {radius}")]
    InvalidRadius { radius: f64 },

    #[error("point lies on the axis (distance {rho:.3e}); it is covered by the axis line itself")]
    AxisPoint { rho: f64 },

    #[error("invalid spread profile: {0}")]
    InvalidProfile(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no class found for line (best residual {best_residual:.3e} above threshold {threshold:.1e})")]
    NoClassFound { best_residual: f64, threshold: f64 },

    #[error("singular projective map (|det| = {det:.3e})")]
    SingularMap { det: f64 },
}
