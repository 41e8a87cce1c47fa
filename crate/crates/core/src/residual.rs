//! Traveling-wave residual of a rotating capillary drop and its derivatives.
//!
//! With surface tension and Bernoulli constant normalised to one, a symmetric
//! Riemann map `Z` and speed `c` solve
//!
//! ```text
//! F(Z, c) = 2 C(Z_a / |Z_a|)_a - 2 i Z_a + c^2 C(Z H(|Z|^2)_a) = 0
//! ```
//!
//! where `C` is the Cauchy projection, `H` the circle Hilbert transform and
//! `_a` the angular derivative. A general capillarity `sigma` is recovered by
//! replacing `c^2` with `c^2 / sigma`. Nonlinear terms are evaluated pointwise
//! on the oversampled grid and projected onto the lattice afterwards.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::spectral::{
    self, apply_multiplier, cauchy_project, circle_average, d_alpha, spectrum, to_coeffs, to_grid,
    BoundaryGrid, LatticeCoeffs, SymmetryDefect,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficient of the quadratic potential term in the pointwise boundary
/// equation. Multiplying the bracketed dynamic condition by `2i` and using
/// `Phi_a = -i c C(|Z|^2)_a` gives `-i c^2 [conj C(|Z|^2)_a]^2 / conj(Z_a)`.
pub const REAL_FORM_POTENTIAL_COEFF: f64 = 1.0;

/// Projected residual together with its pointwise counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Lattice coefficients of `F(Z, c)`.
    pub residual: LatticeCoeffs,
    /// Sup over the grid of the lattice-projected residual.
    pub norm_complex: f64,
    /// Sup over the grid of the pointwise boundary equation.
    pub norm_real: f64,
    pub defect: SymmetryDefect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub curvature_min: f64,
    pub curvature_max: f64,
    pub chord_arc: f64,
    pub c1_norm: f64,
    pub decay_slope: f64,
    pub min_deriv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialReport {
    /// Boundary trace of `Phi_a` at `t = 0`.
    pub phi_alpha: BoundaryGrid,
    /// `Avg (Phi_a)^2 / Z_a`, which vanishes for every Riemann map.
    pub bernoulli_avg: Complex64,
}

/// Grid fields of a map that every residual and derivative evaluation reuses.
struct MapFields {
    z: BoundaryGrid,
    z_alpha: BoundaryGrid,
    z_aa: BoundaryGrid,
    speed: Vec<f64>,
    /// `(|Z|^2)_a`, real valued.
    q_alpha: BoundaryGrid,
    /// `H((|Z|^2)_a)`, real valued.
    hq: BoundaryGrid,
}

impl MapFields {
    fn new(disc: &Discretization, z: &LatticeCoeffs) -> Result<Self> {
        disc.check(z)?;
        let zg = to_grid(z, disc.grid)?;
        let z_alpha = lattice_derivative(z, disc.grid)?;
        let z_aa = lattice_derivative2(z, disc.grid)?;
        let speed: Vec<f64> = z_alpha.values().iter().map(|v| v.norm()).collect();
        let min = speed.iter().copied().fold(f64::INFINITY, f64::min);
        if min <= disc.tol_floor {
            return Err(Error::DegenerateMap {
                min,
                floor: disc.tol_floor,
            });
        }
        let modulus_sq = zg.map(|v| Complex64::new(v.norm_sqr(), 0.0));
        let q_alpha = d_alpha(&modulus_sq);
        // H composed with d/da acts on mode n as |n|.
        let hq = apply_multiplier(&modulus_sq, |f, nyq| {
            if nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(f.unsigned_abs() as f64, 0.0)
            }
        });
        Ok(Self {
            z: zg,
            z_alpha,
            z_aa,
            speed,
            q_alpha,
            hq,
        })
    }

    fn unit_tangent(&self) -> BoundaryGrid {
        BoundaryGrid::from_vec_unchecked(
            self.z_alpha
                .values()
                .iter()
                .zip(&self.speed)
                .map(|(v, s)| v / s)
                .collect(),
        )
    }

    /// `(Z_a / |Z_a|)_a` evaluated pointwise from exact `Z_a` and `Z_aa`.
    fn tangent_derivative(&self) -> BoundaryGrid {
        BoundaryGrid::from_vec_unchecked(
            self.z_alpha
                .values()
                .iter()
                .zip(self.z_aa.values())
                .zip(&self.speed)
                .map(|((za, zaa), s)| zaa / s - za * (za.conj() * zaa).re / (s * s * s))
                .collect(),
        )
    }

    /// Complex residual on the grid (before lattice projection).
    fn residual_grid(&self, c: f64) -> BoundaryGrid {
        let bending = d_alpha(&cauchy_project(&self.unit_tangent()));
        let rotation = cauchy_project(&self.z.mul(&self.hq).expect("same grid"));
        let c2 = c * c;
        BoundaryGrid::from_vec_unchecked(
            bending
                .values()
                .iter()
                .zip(self.z_alpha.values())
                .zip(rotation.values())
                .map(|((b, za), r)| 2.0 * b - 2.0 * I * za + c2 * r)
                .collect(),
        )
    }

    /// Left side of the pointwise boundary equation.
    fn real_form_grid(&self, c: f64) -> BoundaryGrid {
        let bending = self.tangent_derivative();
        let potential = cauchy_project(&self.q_alpha);
        let c2 = c * c;
        let vals = (0..self.z.len())
            .map(|j| {
                let za = self.z_alpha.values()[j];
                let p = potential.values()[j].conj();
                -2.0 * I * za
                    + c2 * self.z.values()[j] * self.hq.values()[j]
                    + 2.0 * bending.values()[j]
                    - REAL_FORM_POTENTIAL_COEFF * I * c2 * p * p / za.conj()
            })
            .collect();
        BoundaryGrid::from_vec_unchecked(vals)
    }
}

/// `Z_a` sampled on the grid, computed exactly from the lattice series.
fn lattice_derivative(z: &LatticeCoeffs, grid: usize) -> Result<BoundaryGrid> {
    let scaled: Vec<f64> = z
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| a * z.frequency(n) as f64)
        .collect();
    Ok(to_grid(&LatticeCoeffs::new(z.m(), scaled)?, grid)?.scale(I))
}

/// `Z_aa` sampled on the grid.
fn lattice_derivative2(z: &LatticeCoeffs, grid: usize) -> Result<BoundaryGrid> {
    let scaled: Vec<f64> = z
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let f = z.frequency(n) as f64;
            -a * f * f
        })
        .collect();
    to_grid(&LatticeCoeffs::new(z.m(), scaled)?, grid)
}

fn project(disc: &Discretization, g: &BoundaryGrid) -> Result<(LatticeCoeffs, SymmetryDefect)> {
    to_coeffs(g, disc.m, disc.modes, Some(disc.tol_sym))
}

/// Lattice coefficients of `F(Z, c)` only; used inside Newton iterations.
pub fn residual_vector(disc: &Discretization, z: &LatticeCoeffs, c: f64) -> Result<Vec<f64>> {
    let fields = MapFields::new(disc, z)?;
    Ok(project(disc, &fields.residual_grid(c))?.0.into_coeffs())
}

fn report(disc: &Discretization, fields: &MapFields, c: f64) -> Result<ResidualReport> {
    let (residual, defect) = project(disc, &fields.residual_grid(c))?;
    let norm_complex = to_grid(&residual, disc.grid)?.sup_norm();
    let norm_real = fields.real_form_grid(c).sup_norm();
    Ok(ResidualReport {
        residual,
        norm_complex,
        norm_real,
        defect,
    })
}

/// Projected residual `F(Z, c)` with both norms and the symmetry defect.
pub fn residual_complex(
    disc: &Discretization,
    z: &LatticeCoeffs,
    c: f64,
) -> Result<ResidualReport> {
    let fields = MapFields::new(disc, z)?;
    report(disc, &fields, c)
}

/// Same report as [`residual_complex`]; kept as the entry point for callers
/// interested in the pointwise boundary equation.
pub fn residual_real(disc: &Discretization, z: &LatticeCoeffs, c: f64) -> Result<ResidualReport> {
    residual_complex(disc, z, c)
}

/// Grid values of the pointwise boundary equation
/// `-2i Z_a + c^2 Z H(|Z|^2)_a + 2 (Z_a/|Z_a|)_a - i c^2 [conj C(|Z|^2)_a]^2 / conj Z_a`.
pub fn real_form_grid(disc: &Discretization, z: &LatticeCoeffs, c: f64) -> Result<BoundaryGrid> {
    Ok(MapFields::new(disc, z)?.real_form_grid(c))
}

/// Directional derivative `D_Z F(Z, c)[zeta]` projected onto the lattice.
pub fn apply_derivative(
    disc: &Discretization,
    z: &LatticeCoeffs,
    c: f64,
    zeta: &LatticeCoeffs,
) -> Result<Vec<f64>> {
    let fields = MapFields::new(disc, z)?;
    disc.check(zeta)?;
    derivative_in_direction(disc, &fields, c, zeta)
}

fn derivative_in_direction(
    disc: &Discretization,
    fields: &MapFields,
    c: f64,
    zeta: &LatticeCoeffs,
) -> Result<Vec<f64>> {
    let grid = disc.grid;
    let zeta_g = to_grid(zeta, grid)?;
    let zeta_a = lattice_derivative(zeta, grid)?;

    // zeta_a / |Z_a| - Z_a^2 conj(zeta_a) / |Z_a|^3
    let leading = BoundaryGrid::from_vec_unchecked(
        (0..grid)
            .map(|j| {
                let za = fields.z_alpha.values()[j];
                let s = fields.speed[j];
                let da = zeta_a.values()[j];
                da / s - za * za * da.conj() / (s * s * s)
            })
            .collect(),
    );
    // zeta conj Z + conj(zeta) Z
    let dq = BoundaryGrid::from_vec_unchecked(
        zeta_g
            .values()
            .iter()
            .zip(fields.z.values())
            .map(|(d, zv)| Complex64::new(2.0 * (d * zv.conj()).re, 0.0))
            .collect(),
    );
    let hdq = apply_multiplier(&dq, |f, nyq| {
        if nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f.unsigned_abs() as f64, 0.0)
        }
    });
    let rotation = BoundaryGrid::from_vec_unchecked(
        (0..grid)
            .map(|j| {
                zeta_g.values()[j] * fields.hq.values()[j] + fields.z.values()[j] * hdq.values()[j]
            })
            .collect(),
    );
    let lead_hat = spectrum(&leading);
    let rot_hat = spectrum(&rotation);
    let c2 = c * c;
    Ok((0..disc.modes)
        .map(|n| {
            let f = disc.m * n + 1;
            let bin = f % grid;
            let value = I * f as f64 * lead_hat[bin] + c2 * rot_hat[bin];
            value.re + 2.0 * f as f64 * zeta.coeffs()[n]
        })
        .collect())
}

fn speed_derivative(disc: &Discretization, fields: &MapFields, c: f64) -> Vec<f64> {
    let rot = fields.z.mul(&fields.hq).expect("same grid");
    let hat = spectrum(&rot);
    (0..disc.modes)
        .map(|n| 2.0 * c * hat[(disc.m * n + 1) % disc.grid].re)
        .collect()
}

/// Dense `N x (N+1)` Jacobian: one column per lattice direction, then `dF/dc`.
pub fn jacobian_analytic(disc: &Discretization, z: &LatticeCoeffs, c: f64) -> Result<DMatrix<f64>> {
    let fields = MapFields::new(disc, z)?;
    let n = disc.modes;
    let mut jac = DMatrix::zeros(n, n + 1);
    for col in 0..n {
        let dir = LatticeCoeffs::unit(disc.m, n, col)?;
        let values = derivative_in_direction(disc, &fields, c, &dir)?;
        jac.column_mut(col).copy_from_slice(&values);
    }
    jac.column_mut(n)
        .copy_from_slice(&speed_derivative(disc, &fields, c));
    Ok(jac)
}

/// Central-difference Jacobian of the projected residual.
pub fn jacobian_fd(
    disc: &Discretization,
    z: &LatticeCoeffs,
    c: f64,
    h: f64,
) -> Result<DMatrix<f64>> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::FiniteDifferenceStep(h));
    }
    disc.check(z)?;
    let n = disc.modes;
    let mut jac = DMatrix::zeros(n, n + 1);
    for col in 0..=n {
        let (plus, minus) = if col < n {
            let mut zp = z.coeffs().to_vec();
            let mut zm = z.coeffs().to_vec();
            zp[col] += h;
            zm[col] -= h;
            (
                residual_vector(disc, &LatticeCoeffs::new(disc.m, zp)?, c)?,
                residual_vector(disc, &LatticeCoeffs::new(disc.m, zm)?, c)?,
            )
        } else {
            (
                residual_vector(disc, z, c + h)?,
                residual_vector(disc, z, c - h)?,
            )
        };
        for row in 0..n {
            jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Diagonal of `D_Z F(Z_0, c)`: `2` at index 0, `-(m^2 k^2 - c^2 m k - 1)` at `k >= 1`.
pub fn trivial_linearization(m: usize, modes: usize, c: f64) -> Vec<f64> {
    (0..modes)
        .map(|k| {
            if k == 0 {
                2.0
            } else {
                let mk = (m * k) as f64;
                -(mk * mk - c * c * mk - 1.0)
            }
        })
        .collect()
}

/// Curvature `kappa = (Z_a / |Z_a|)_a / (i Z_a)` on the grid.
pub fn curvature(disc: &Discretization, z: &LatticeCoeffs) -> Result<BoundaryGrid> {
    let fields = MapFields::new(disc, z)?;
    let turn = fields.tangent_derivative();
    let kappa: Vec<Complex64> = turn
        .values()
        .iter()
        .zip(fields.z_alpha.values())
        .map(|(t, za)| t / (I * za))
        .collect();
    let sup = kappa.iter().map(|k| k.re.abs()).fold(0.0, f64::max);
    let imag = kappa.iter().map(|k| k.im.abs()).fold(0.0, f64::max);
    if imag > 1e-8 * (1.0 + sup) {
        return Err(Error::ComplexCurvature { imag });
    }
    Ok(BoundaryGrid::from_vec_unchecked(
        kappa
            .into_iter()
            .map(|k| Complex64::new(k.re, 0.0))
            .collect(),
    ))
}

/// Off-diagonal pairs closer than this count as a self-contact.
const CHORD_CONTACT: f64 = 1e-14;

/// Sup over node pairs of `|tau_1 - tau_2| / |Z(tau_1) - Z(tau_2)|`, with the
/// diagonal value `1 / |Z_a|`. Returns `+inf` on (near) self-contact.
pub fn chord_arc_constant(disc: &Discretization, z: &LatticeCoeffs) -> Result<f64> {
    disc.check(z)?;
    let zg = to_grid(z, disc.grid)?;
    let za = lattice_derivative(z, disc.grid)?;
    Ok(chord_arc_from_samples(zg.values(), za.values()))
}

pub(crate) fn chord_arc_from_samples(z: &[Complex64], z_alpha: &[Complex64]) -> f64 {
    let grid = z.len();
    let nodes: Vec<Complex64> = (0..grid).map(|j| spectral::node(j, grid)).collect();
    let mut sup = z_alpha.iter().map(|v| 1.0 / v.norm()).fold(0.0, f64::max);
    for j in 0..grid {
        for l in (j + 1)..grid {
            let den = (z[j] - z[l]).norm();
            if den < CHORD_CONTACT {
                return f64::INFINITY;
            }
            let ratio = (nodes[j] - nodes[l]).norm() / den;
            if ratio > sup {
                sup = ratio;
            }
        }
    }
    sup
}

/// `sup |Z| + sup |Z_a|` over the grid.
pub fn c1_norm(disc: &Discretization, z: &LatticeCoeffs) -> Result<f64> {
    disc.check(z)?;
    Ok(to_grid(z, disc.grid)?.sup_norm() + lattice_derivative(z, disc.grid)?.sup_norm())
}

/// Coefficients smaller than this fraction of the leading one are treated as
/// round-off and excluded from the decay fit.
pub const DECAY_FLOOR: f64 = 1e-13;

/// Least-squares slope of `ln |a_n|` against `n` over the upper half of the
/// resolved spectrum (indices up to the last coefficient above the round-off
/// floor). A map with no resolved mode beyond `a_0` reports `ln(DECAY_FLOOR)`,
/// the slope of a drop from `a_0` straight to the floor.
pub fn decay_slope(z: &LatticeCoeffs) -> f64 {
    let a = z.coeffs();
    let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return DECAY_FLOOR.ln();
    }
    let floor = DECAY_FLOOR * scale;
    let last = match a.iter().rposition(|v| v.abs() > floor) {
        Some(0) | None => return DECAY_FLOOR.ln(),
        Some(last) => last,
    };
    let start = if last == 1 { 0 } else { last.div_ceil(2) };
    let pts: Vec<(f64, f64)> = (start..=last)
        .filter(|&n| a[n].abs() > floor)
        .map(|n| (n as f64, a[n].abs().ln()))
        .collect();
    if pts.len() < 2 {
        return DECAY_FLOOR.ln();
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Geometric diagnostics of a candidate drop.
pub fn diagnostics(disc: &Discretization, z: &LatticeCoeffs) -> Result<DiagnosticsReport> {
    let fields = MapFields::new(disc, z)?;
    let kappa = curvature(disc, z)?;
    let (curvature_min, curvature_max) = kappa
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| {
            (lo.min(k.re), hi.max(k.re))
        });
    let min_deriv = fields.speed.iter().copied().fold(f64::INFINITY, f64::min);
    let max_deriv = fields.speed.iter().copied().fold(0.0, f64::max);
    Ok(DiagnosticsReport {
        curvature_min,
        curvature_max,
        chord_arc: chord_arc_from_samples(fields.z.values(), fields.z_alpha.values()),
        c1_norm: fields.z.sup_norm() + max_deriv,
        decay_slope: decay_slope(z),
        min_deriv,
    })
}

/// Boundary trace of `Phi_a = -i c C((|Z|^2)_a)` and the average of
/// `(Phi_a)^2 / Z_a`.
pub fn potential_diagnostics(
    disc: &Discretization,
    z: &LatticeCoeffs,
    c: f64,
) -> Result<PotentialReport> {
    let fields = MapFields::new(disc, z)?;
    let phi_alpha = cauchy_project(&fields.q_alpha).scale(-I * c);
    let ratio = phi_alpha
        .mul(&phi_alpha)?
        .div(&fields.z_alpha, disc.tol_floor)?;
    Ok(PotentialReport {
        bernoulli_avg: circle_average(&ratio),
        phi_alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(m: usize, modes: usize) -> Discretization {
        Discretization::auto(m, modes).unwrap()
    }

    fn lattice(m: usize, modes: usize, entries: &[(usize, f64)]) -> LatticeCoeffs {
        let mut a = vec![0.0; modes];
        a[0] = 1.0;
        for &(n, v) in entries {
            a[n] = v;
        }
        LatticeCoeffs::new(m, a).unwrap()
    }

    #[test]
    fn circle_is_a_solution_for_every_speed() {
        let d = disc(3, 16);
        for c in [0.0, 0.7, 1.5, 3.0] {
            let r = residual_complex(&d, &d.identity(), c).unwrap();
            assert!(r.norm_complex < 1e-12, "c={c}: {}", r.norm_complex);
            assert!(r.norm_real < 1e-12);
        }
    }

    #[test]
    fn scaled_circle_residual() {
        let d = disc(2, 8);
        let z = lattice(2, 8, &[(0, 1.3)]);
        let r = residual_complex(&d, &z, 1.0).unwrap();
        assert!((r.residual.coeffs()[0] - 0.6).abs() < 1e-12);
        assert!(r.residual.coeffs()[1..].iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn degenerate_map_is_rejected() {
        let d = disc(2, 8);
        // Z_a vanishes at tau = +-i when 1 + 3 a_1 tau^2 = 0, i.e. a_1 = 1/3.
        let z = lattice(2, 8, &[(1, 1.0 / 3.0)]);
        assert!(matches!(
            residual_complex(&d, &z, 1.0),
            Err(Error::DegenerateMap { .. })
        ));
        assert!(matches!(
            potential_diagnostics(&d, &z, 1.0),
            Err(Error::DegenerateMap { .. })
        ));
    }

    #[test]
    fn trivial_diagonal_values() {
        let d = trivial_linearization(2, 3, 1.5f64.sqrt());
        assert_eq!(d[0], 2.0);
        assert!(d[1].abs() < 1e-14);
        assert!((d[2] + 9.0).abs() < 1e-12);
        assert!((trivial_linearization(3, 2, 0.0)[1] + 8.0).abs() < 1e-14);
    }

    #[test]
    fn jacobian_at_circle_is_the_trivial_diagonal() {
        let (m, modes, c) = (2, 8, 0.9);
        let d = disc(m, modes);
        let jac = jacobian_analytic(&d, &d.identity(), c).unwrap();
        let diag = trivial_linearization(m, modes, c);
        for i in 0..modes {
            for j in 0..=modes {
                let expect = if i == j { diag[i] } else { 0.0 };
                assert!(
                    (jac[(i, j)] - expect).abs() < 1e-11,
                    "({i},{j}) {}",
                    jac[(i, j)]
                );
            }
        }
    }

    #[test]
    fn curvature_of_circles() {
        let d = disc(2, 8);
        let k = curvature(&d, &d.identity()).unwrap();
        assert!(k.values().iter().all(|v| (v.re - 1.0).abs() < 1e-13));
        let z = lattice(2, 8, &[(0, 2.0)]);
        let k = curvature(&d, &z).unwrap();
        assert!(k.values().iter().all(|v| (v.re - 0.5).abs() < 1e-13));
    }

    #[test]
    fn chord_arc_and_c1_of_circles() {
        let d = disc(2, 8);
        assert!((chord_arc_constant(&d, &d.identity()).unwrap() - 1.0).abs() < 1e-12);
        assert!((c1_norm(&d, &d.identity()).unwrap() - 2.0).abs() < 1e-13);
        let z = lattice(2, 8, &[(0, 1.7)]);
        assert!((chord_arc_constant(&d, &z).unwrap() - 1.0 / 1.7).abs() < 1e-12);
        assert!((c1_norm(&d, &z).unwrap() - 3.4).abs() < 1e-13);
    }

    #[test]
    fn potential_vanishes_on_circle() {
        let d = disc(2, 8);
        let p = potential_diagnostics(&d, &d.identity(), 1.3).unwrap();
        assert!(p.phi_alpha.sup_norm() < 1e-13);
        assert!(p.bernoulli_avg.norm() < 1e-13);
    }

    #[test]
    fn decay_slope_of_geometric_sequence() {
        let a: Vec<f64> = (0..20).map(|n| 0.5f64.powi(n)).collect();
        let z = LatticeCoeffs::new(2, a).unwrap();
        assert!((decay_slope(&z) - 0.5f64.ln()).abs() < 1e-12);
        let trivial = LatticeCoeffs::identity(2, 20).unwrap();
        assert!(decay_slope(&trivial) < -29.0);
    }

    #[test]
    fn fd_step_is_range_checked() {
        let d = disc(2, 4);
        assert!(matches!(
            jacobian_fd(&d, &d.identity(), 1.0, 1e-2),
            Err(Error::FiniteDifferenceStep(_))
        ));
    }
}
