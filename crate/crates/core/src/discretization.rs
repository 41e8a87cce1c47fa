use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{min_grid, LatticeCoeffs};

pub const DEFAULT_MODES: usize = 64;
pub const DEFAULT_TOL_FLOOR: f64 = 1e-10;
pub const DEFAULT_TOL_SYM: f64 = 1e-9;

/// Truncation and quadrature setup shared by every residual evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    /// Symmetry multiplicity.
    pub m: usize,
    /// Number of retained lattice modes `N`.
    pub modes: usize,
    /// Number of boundary nodes `M`.
    pub grid: usize,
    /// Lower bound on `|Z_alpha|` below which a map counts as degenerate.
    pub tol_floor: f64,
    /// Largest relative symmetry defect tolerated by strict projections.
    pub tol_sym: f64,
}

impl Discretization {
    pub fn new(m: usize, modes: usize, grid: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Multiplicity(m));
        }
        if modes == 0 {
            return Err(Error::EmptyCoefficients);
        }
        let required = min_grid(m, modes);
        if grid < required {
            return Err(Error::GridTooSmall {
                grid,
                frequency: m * (modes - 1) + 1,
                required,
            });
        }
        Ok(Self {
            m,
            modes,
            grid,
            tol_floor: DEFAULT_TOL_FLOOR,
            tol_sym: DEFAULT_TOL_SYM,
        })
    }

    /// Uses [`recommended_grid`] for the node count.
    pub fn auto(m: usize, modes: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Multiplicity(m));
        }
        Self::new(m, modes, recommended_grid(m, modes))
    }

    pub fn with_tolerances(mut self, tol_floor: f64, tol_sym: f64) -> Self {
        self.tol_floor = tol_floor;
        self.tol_sym = tol_sym;
        self
    }

    /// Same multiplicity and tolerances with `modes` slots on `grid` nodes.
    pub fn refined(&self, modes: usize, grid: usize) -> Result<Self> {
        Ok(Self::new(self.m, modes, grid)?.with_tolerances(self.tol_floor, self.tol_sym))
    }

    pub fn identity(&self) -> LatticeCoeffs {
        LatticeCoeffs::identity(self.m, self.modes).expect("validated discretization")
    }

    pub fn check(&self, z: &LatticeCoeffs) -> Result<()> {
        if z.m() != self.m {
            return Err(Error::MultiplicityMismatch {
                expected: self.m,
                found: z.m(),
            });
        }
        if z.len() != self.modes {
            return Err(Error::ModeCountMismatch {
                expected: self.modes,
                found: z.len(),
            });
        }
        Ok(())
    }
}

/// Grid of at least `max(4 (m (N-1) + 1), 16 N)` nodes whose size is the odd
/// part of `m` times a power of two, so the rotation by `2 pi / m` maps nodes
/// onto nodes and aliasing never leaves the symmetry lattice.
pub fn recommended_grid(m: usize, modes: usize) -> usize {
    let m = m.max(1);
    let need = (4 * (m * modes.saturating_sub(1) + 1))
        .max(16 * modes)
        .max(8);
    let odd = m >> m.trailing_zeros();
    let mut grid = odd;
    while grid < need {
        grid *= 2;
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_sizes() {
        assert_eq!(recommended_grid(2, 64), 1024);
        assert_eq!(recommended_grid(4, 64), 1024);
        assert_eq!(recommended_grid(2, 32), 512);
        assert_eq!(recommended_grid(3, 64), 1536);
        assert_eq!(recommended_grid(6, 16) % 3, 0);
    }

    #[test]
    fn rejects_undersized_grid() {
        assert!(matches!(
            Discretization::new(2, 64, 128),
            Err(Error::GridTooSmall { .. })
        ));
        assert_eq!(Discretization::auto(1, 8), Err(Error::Multiplicity(1)));
    }
}
