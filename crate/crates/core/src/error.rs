use thiserror::Error;

/// Errors raised by the spectral calculus, the residual evaluation and the
/// continuation driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("symmetry multiplicity must be at least 2, got {0}")]
    Multiplicity(usize),

    #[error("lattice coefficient vector must be non-empty")]
    EmptyCoefficients,

    #[error("lattice coefficient {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error(
        "grid of {grid} nodes cannot resolve frequency {frequency} (need at least {required})"
    )]
    GridTooSmall {
        grid: usize,
        frequency: usize,
        required: usize,
    },

    #[error("grid size mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("coefficients have multiplicity {found}, discretization expects {expected}")]
    MultiplicityMismatch { expected: usize, found: usize },

    #[error("coefficient vector has {found} modes, discretization expects {expected}")]
    ModeCountMismatch { expected: usize, found: usize },

    #[error("relative symmetry defect {relative:.3e} exceeds tolerance {tolerance:.3e}")]
    SymmetryViolation { relative: f64, tolerance: f64 },

    #[error("divisor magnitude {min:.3e} fell below floor {floor:.3e}")]
    DivisionFloor { min: f64, floor: f64 },

    #[error("degenerate map: min |Z_alpha| = {min:.3e} is below floor {floor:.3e}")]
    DegenerateMap { min: f64, floor: f64 },

    #[error("curvature is not real: sup |Im kappa| = {imag:.3e}")]
    ComplexCurvature { imag: f64 },

    #[error("lattice index {k} out of range for {modes} modes")]
    IndexOutOfRange { k: usize, modes: usize },

    #[error("seed amplitude {0} exceeds 0.05")]
    StepTooLarge(f64),

    #[error("finite-difference step {0} outside [1e-7, 1e-3]")]
    FiniteDifferenceStep(f64),

    #[error("newton correction failed after {iterations} iterations (residual {residual:.3e})")]
    NewtonFailure { iterations: usize, residual: f64 },

    #[error("bordered jacobian is singular (condition estimate {condition:.3e})")]
    SingularJacobian { condition: f64 },

    #[error("jacobian has a {dimension}-dimensional null space; tangent is ambiguous")]
    RankDeficient { dimension: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
