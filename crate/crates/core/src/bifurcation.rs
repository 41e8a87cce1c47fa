//! Closed-form bifurcation data along the trivial branch `(Z_0, c)`.
//!
//! The linearisation at the circle is diagonal on the lattice with entries
//! `2, -(m^2 k^2 - c^2 m k - 1)`, so the circle loses local uniqueness exactly
//! at `c_{mk} = sqrt(mk - 1/(mk))`, with one-dimensional kernel `w^(mk+1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::LatticeCoeffs;

/// Largest seed amplitude accepted by [`branch_seed`].
pub const MAX_SEED: f64 = 0.05;
pub const DEFAULT_SEED: f64 = 0.01;

/// `sqrt(mk - 1/(mk))`. Depends on `m` and `k` only through the product.
pub fn bifurcation_speed(m: usize, k: usize) -> Result<f64> {
    let mk = m * k;
    if mk < 1 {
        return Err(Error::Config(format!(
            "bifurcation speed needs mk >= 1, got {mk}"
        )));
    }
    let mk = mk as f64;
    Ok((mk - 1.0 / mk).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub m: usize,
    pub k: usize,
    /// Positive bifurcation speed; `-c` bifurcates identically.
    pub c: f64,
    /// Unit vector at lattice index `k`.
    pub kernel: LatticeCoeffs,
    /// `2 c m k`, the mixed derivative paired against the kernel.
    pub transversality: f64,
}

pub fn make_bifurcation_point(m: usize, k: usize, modes: usize) -> Result<BifurcationPoint> {
    if m < 2 {
        return Err(Error::Multiplicity(m));
    }
    if k == 0 || k >= modes {
        return Err(Error::IndexOutOfRange { k, modes });
    }
    let c = bifurcation_speed(m, k)?;
    Ok(BifurcationPoint {
        m,
        k,
        c,
        kernel: LatticeCoeffs::unit(m, modes, k)?,
        transversality: 2.0 * c * (m * k) as f64,
    })
}

/// First-order predictor `(Z_0 + s0 * kernel, c_{mk})`; the speed does not move
/// at first order along the bifurcating curve.
pub fn branch_seed(bp: &BifurcationPoint, s0: f64) -> Result<(LatticeCoeffs, f64)> {
    if s0.abs() > MAX_SEED || !s0.is_finite() {
        return Err(Error::StepTooLarge(s0));
    }
    let mut coeffs = bp
        .kernel
        .coeffs()
        .iter()
        .map(|e| s0 * e)
        .collect::<Vec<_>>();
    coeffs[0] += 1.0;
    Ok((LatticeCoeffs::new(bp.m, coeffs)?, bp.c))
}

/// Half-period rotation `Z(w) -> e^{-i pi/(mk)} Z(e^{i pi/(mk)} w)` on maps with
/// `mk`-fold symmetry: coefficient `n` (a multiple of `k`) picks up
/// `(-1)^(n/k)`. Returns `None` if some index off the `mk` sub-lattice carries
/// more than `tol`.
pub fn half_turn(z: &LatticeCoeffs, k: usize, tol: f64) -> Option<LatticeCoeffs> {
    if k == 0 {
        return None;
    }
    let mut out = Vec::with_capacity(z.len());
    for (n, &a) in z.coeffs().iter().enumerate() {
        if n % k != 0 {
            if a.abs() > tol {
                return None;
            }
            out.push(0.0);
        } else if (n / k) % 2 == 1 {
            out.push(-a);
        } else {
            out.push(a);
        }
    }
    LatticeCoeffs::new(z.m(), out).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residual::trivial_linearization;

    #[test]
    fn speeds_match_closed_form() {
        assert!((bifurcation_speed(2, 1).unwrap() - 1.224744871391589).abs() < 1e-15);
        assert!((bifurcation_speed(3, 1).unwrap() - 1.632993161855452).abs() < 1e-15);
        assert!((bifurcation_speed(2, 2).unwrap() - 1.936491673103709).abs() < 1e-15);
        assert_eq!(
            bifurcation_speed(2, 2).unwrap(),
            bifurcation_speed(4, 1).unwrap()
        );
    }

    #[test]
    fn speed_depends_on_product_only() {
        for m in 2..=10 {
            for k in 1..=10 {
                let a = bifurcation_speed(m, k).unwrap();
                let b = bifurcation_speed(m * k, 1).unwrap();
                assert!((a - b).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn speeds_increase_with_mk() {
        let speeds: Vec<f64> = (1..=50)
            .map(|mk| bifurcation_speed(mk, 1).unwrap())
            .collect();
        assert!(speeds.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn diagonal_vanishes_only_at_kernel_index() {
        for m in 2..=6 {
            for k in 1..=8 {
                let c = bifurcation_speed(m, k).unwrap();
                let diag = trivial_linearization(m, 16, c);
                for (n, d) in diag.iter().enumerate().skip(1) {
                    if n == k {
                        assert!(d.abs() < 1e-12);
                    } else {
                        assert!(d.abs() > 0.1, "m={m} k={k} n={n} d={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn point_construction() {
        let bp = make_bifurcation_point(2, 1, 64).unwrap();
        assert!((bp.c - 1.224744871391589).abs() < 1e-15);
        assert!((bp.transversality - 4.898979485566356).abs() < 1e-12);
        assert_eq!(bp.kernel.coeffs().iter().filter(|&&a| a != 0.0).count(), 1);
        assert_eq!(bp.kernel.coeffs()[1], 1.0);
        let c2 = bp.c * bp.c;
        assert!((c2 - (2.0 - 0.5)).abs() < 1e-14);

        assert!(matches!(
            make_bifurcation_point(2, 1, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        let bp = make_bifurcation_point(5, 2, 64).unwrap();
        assert!((bp.c - 9.9f64.sqrt()).abs() < 1e-15);
        assert!((bp.c - 3.146426544510455).abs() < 1e-12);
    }

    #[test]
    fn seeds() {
        let bp = make_bifurcation_point(2, 1, 8).unwrap();
        let (z, c) = branch_seed(&bp, 0.01).unwrap();
        assert_eq!(z.coeffs(), &[1.0, 0.01, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(c, bp.c);
        let (z, _) = branch_seed(&bp, 0.0).unwrap();
        assert_eq!(z, LatticeCoeffs::identity(2, 8).unwrap());
        let (z, _) = branch_seed(&bp, -0.01).unwrap();
        assert_eq!(z.coeffs()[1], -0.01);
        assert_eq!(branch_seed(&bp, 0.06), Err(Error::StepTooLarge(0.06)));
    }

    #[test]
    fn half_turn_flips_odd_sublattice_indices() {
        let z = LatticeCoeffs::new(2, vec![1.0, 0.2, 0.03, -0.004]).unwrap();
        let r = half_turn(&z, 1, 0.0).unwrap();
        assert_eq!(r.coeffs(), &[1.0, -0.2, 0.03, 0.004]);
        let z = LatticeCoeffs::new(2, vec![1.0, 0.0, 0.2, 0.0, 0.03]).unwrap();
        let r = half_turn(&z, 2, 1e-14).unwrap();
        assert_eq!(r.coeffs(), &[1.0, 0.0, -0.2, 0.0, 0.03]);
        let bad = LatticeCoeffs::new(2, vec![1.0, 0.1, 0.2]).unwrap();
        assert!(half_turn(&bad, 2, 1e-14).is_none());
    }
}
