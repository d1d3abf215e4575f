use core::fmt;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Potential geometry or heights rejected.
    InvalidPotential(&'static str),
    /// `kappa` must be finite and positive.
    InvalidScale(f64),
    LayerOutOfRange { layer: usize, layers: usize },
    /// The regular solution is identically zero at `k = 0`.
    ZeroWavenumber,
    NegativeRadius(f64),
    NonPositiveEnergy(f64),
    /// `k` is numerically a zero of the Jost function in the denominator.
    Pole { k: Complex64 },
    InvalidGrid(&'static str),
    InvalidRegion(&'static str),
    /// Argument-principle count disagrees with the number of refined roots.
    MissedRoots { winding: i64, found: usize },
    /// Contour and derivative residues disagree.
    IllConditionedResidue {
        k: Complex64,
        contour: Complex64,
        derivative: Complex64,
        relative_gap: f64,
    },
    NonConvergent(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPotential(msg) => write!(f, "invalid potential: {msg}"),
            Error::InvalidScale(kappa) => write!(f, "invalid scale: kappa = {kappa} must be finite and > 0"),
            Error::LayerOutOfRange { layer, layers } => {
                write!(f, "layer {layer} out of range (potential has {layers} layers)")
            }
            Error::ZeroWavenumber => write!(f, "k = 0 is degenerate: the regular solution vanishes"),
            Error::NegativeRadius(r) => write!(f, "radius must be >= 0, got {r}"),
            Error::NonPositiveEnergy(e) => write!(f, "energy must be > 0, got {e}"),
            Error::Pole { k } => write!(f, "k = {k} is a zero of the Jost function"),
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidRegion(msg) => write!(f, "invalid search region: {msg}"),
            Error::MissedRoots { winding, found } => write!(
                f,
                "missed roots: argument principle counts {winding} zeros but {found} were refined"
            ),
            Error::IllConditionedResidue {
                k,
                contour,
                derivative,
                relative_gap,
            } => write!(
                f,
                "ill-conditioned residue at k = {k}: contour {contour} vs derivative {derivative} (relative gap {relative_gap:.3e})"
            ),
            Error::NonConvergent(msg) => write!(f, "no convergence: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
