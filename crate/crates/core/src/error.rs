use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown material cut: {0}")]
    UnknownCut(String),
    #[error("invalid wavelength: {0} m")]
    InvalidWavelength(f64),
    #[error("invalid anisotropy profile: {0}")]
    InvalidProfile(String),
    #[error("contour collision at ring {ring}")]
    ContourCollision { ring: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sub-wavelength resonator: r_eff = {r_eff} m cannot hold a node at lambda = {lambda} m")]
    SubWavelengthResonator { r_eff: f64, lambda: f64 },
    #[error("grid too small: extent {extent} m is below one wavelength {lambda} m")]
    GridTooSmall { extent: f64, lambda: f64 },
    #[error("undersampled grid: {points_per_wavelength:.2} points per SAW wavelength (need >= 8)")]
    UndersampledGrid { points_per_wavelength: f64 },
    #[error("spot out of bounds: ({x}, {z}) m")]
    SpotOutOfBounds { x: f64, z: f64 },
    #[error("fit failed after {iterations} iterations (residual rms {residual_rms:.3e})")]
    FitFailed { iterations: usize, residual_rms: f64 },
    #[error("no resonance found")]
    NoResonanceFound,
    #[error("modulation too deep for small-signal model: |phi| = {0}")]
    ModulationTooDeep(f64),
    #[error("nonphysical reflection: |S11| = {0}")]
    NonphysicalReflection(f64),
    #[error("empty resonator calibration: phonon number must be >= 1")]
    EmptyResonatorCalibration,
    #[error("overcoupled beyond total loss: kappa_ext {kappa_ext} Hz > kappa {kappa} Hz")]
    Overcoupled { kappa_ext: f64, kappa: f64 },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}
