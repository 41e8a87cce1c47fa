//! Rotating hollow vortex droplets with `m`-fold symmetry: spectral operators
//! on the unit circle, the boundary residual of the conformal map, its exact
//! linearisation, bifurcation data on the circle family and numerical
//! continuation of the bifurcating branches.

pub mod bifurcation;
pub mod continuation;
pub mod discretization;
pub mod error;
pub mod residual;
pub mod spectral;

pub use bifurcation::{
    bifurcation_speed, branch_seed, half_turn, make_bifurcation_point, BifurcationPoint,
};
pub use continuation::{
    classify_alternative, compute_tangent, continue_branch, evaluate_point, newton_correct,
    BranchRecord, BranchStatus, Constraint, ContinuationConfig, SolutionPoint,
};
pub use discretization::{recommended_grid, Discretization, DEFAULT_MODES};
pub use error::{Error, Result};
pub use residual::{
    apply_derivative, c1_norm, chord_arc_constant, curvature, decay_slope, diagnostics,
    jacobian_analytic, jacobian_fd, potential_diagnostics, real_form_grid, residual_complex,
    residual_real, residual_vector, trivial_linearization, DiagnosticsReport, PotentialReport,
    ResidualReport,
};
pub use spectral::{
    cauchy_project, circle_average, d_alpha, hilbert, to_coeffs, to_grid, BoundaryGrid,
    LatticeCoeffs, Pointwise, SymmetryDefect,
};
