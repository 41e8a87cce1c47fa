//! Shared inputs for the criterion benches.

use dropwave_core::{Discretization, LatticeCoeffs};

/// A smooth, non-degenerate map with geometric coefficient decay, standing in
/// for a mid-branch solution.
pub fn sample_map(m: usize, modes: usize) -> (Discretization, LatticeCoeffs) {
    let disc = Discretization::auto(m, modes).expect("valid discretization");
    let coeffs = (0..modes)
        .map(|n| {
            if n == 0 {
                1.0
            } else {
                0.2 * 0.5f64.powi(n as i32)
            }
        })
        .collect();
    (
        disc,
        LatticeCoeffs::new(m, coeffs).expect("finite coefficients"),
    )
}
