use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("insufficient grid resolution: need at least {needed} points, have {have}")]
    InsufficientResolution { needed: usize, have: usize },
    #[error("integration overflow at x = {x}")]
    IntegrationOverflow { x: f64 },
    #[error("scattering requires positive energy (got {0})")]
    NonPositiveEnergy(f64),
    #[error(
        "grid [{x_min}, {x_max}] does not extend beyond the potential support [{left}, {right}]"
    )]
    GridInsideSupport {
        x_min: f64,
        x_max: f64,
        left: f64,
        right: f64,
    },
    #[error("degenerate primary solution on [{a}, {b}]")]
    DegeneratePrimary { a: f64, b: f64 },
    #[error("dependent basis: Wronskian {0:e} is zero to working precision")]
    DependentBasis(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("energy mismatch: {0} vs {1}")]
    EnergyMismatch(f64, f64),
    #[error("point {x} is not on the grid")]
    OffGrid { x: f64 },
    #[error("image F(x) = {image} of x = {x} lies outside the grid")]
    ImageOutsideGrid { x: f64, image: f64 },
    #[error("domain [{a}, {b}] contains no grid points")]
    EmptyDomain { a: f64, b: f64 },
    #[error("scenario geometry invalid: {0}")]
    GeometryInvalid(String),
    #[error("wave packet touches the boundary (edge amplitude {0:e})")]
    PacketTouchesBoundary(f64),
    #[error("propagation unstable: relative norm drift {drift:e} at step {step}")]
    Unstable { step: usize, drift: f64 },
    #[error("channel {channel} failed: {source}")]
    Channel {
        channel: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}
