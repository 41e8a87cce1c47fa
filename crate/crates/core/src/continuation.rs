//! Newton correction and pseudo-arclength continuation of bifurcating branches.
//!
//! The unknown is `x = (a_0, ..., a_{N-1}, c)` in `R^{N+1}`. The residual
//! supplies `N` equations; an affine constraint `normal . x = offset` closes the
//! square system, which is solved by damped Newton with a dense LU of the
//! bordered Jacobian.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bifurcation::{bifurcation_speed, BifurcationPoint};
use crate::discretization::{recommended_grid, Discretization, DEFAULT_TOL_FLOOR, DEFAULT_TOL_SYM};
use crate::error::{Error, Result};
use crate::residual::{
    diagnostics, jacobian_analytic, residual_complex, residual_vector, DiagnosticsReport,
};
use crate::spectral::{to_grid, LatticeCoeffs};

/// Bordered systems with a larger 1-norm condition estimate count as singular.
pub const MAX_CONDITION: f64 = 1e14;
/// Singular values below this bound span the numerical null space.
pub const RANK_TOL: f64 = 1e-8;
/// Minimum alignment between a previous tangent and a multi-dimensional null
/// space for the projection to be accepted as the continuation direction.
const NULL_SPACE_ALIGNMENT: f64 = 0.999;
const MAX_DAMPING_HALVINGS: usize = 10;
/// Corrected points this close to the circle are rejected as a fall-back onto
/// the trivial branch.
const TRIVIAL_BRANCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuationConfig {
    /// Retained lattice modes.
    #[serde(rename = "N")]
    pub modes: usize,
    /// Boundary nodes; `None` picks [`recommended_grid`].
    #[serde(rename = "M")]
    pub grid: Option<usize>,
    pub tol_newton: f64,
    pub max_newton: usize,
    pub ds_init: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub c1_max: f64,
    pub chord_arc_max: f64,
    pub loop_eps: f64,
    pub loop_s_min: f64,
    /// Total number of points in a record, the trivial point included.
    pub max_steps: usize,
    pub tol_floor: f64,
    pub tol_sym: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            modes: crate::discretization::DEFAULT_MODES,
            grid: None,
            tol_newton: 1e-11,
            max_newton: 25,
            ds_init: 0.01,
            ds_min: 1e-5,
            ds_max: 0.1,
            c1_max: 100.0,
            chord_arc_max: 100.0,
            loop_eps: 1e-6,
            loop_s_min: 0.5,
            max_steps: 200,
            tol_floor: DEFAULT_TOL_FLOOR,
            tol_sym: DEFAULT_TOL_SYM,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol_newton", self.tol_newton),
            ("ds_min", self.ds_min),
            ("c1_max", self.c1_max),
            ("chord_arc_max", self.chord_arc_max),
            ("loop_eps", self.loop_eps),
            ("tol_floor", self.tol_floor),
            ("tol_sym", self.tol_sym),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if !(self.ds_min <= self.ds_init && self.ds_init <= self.ds_max) {
            return Err(Error::Config(format!(
                "step sizes must satisfy ds_min <= ds_init <= ds_max, got {} / {} / {}",
                self.ds_min, self.ds_init, self.ds_max
            )));
        }
        if self.modes < 2 {
            return Err(Error::Config("need at least 2 lattice modes".into()));
        }
        if self.max_newton == 0 || self.max_steps == 0 {
            return Err(Error::Config(
                "max_newton and max_steps must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn discretization(&self, m: usize) -> Result<Discretization> {
        let grid = self.grid.unwrap_or_else(|| recommended_grid(m, self.modes));
        Ok(Discretization::new(m, self.modes, grid)?.with_tolerances(self.tol_floor, self.tol_sym))
    }
}

/// A converged point on a branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPoint {
    pub z: LatticeCoeffs,
    pub c: f64,
    /// Accumulated pseudo-arclength.
    pub s: f64,
    pub diagnostics: DiagnosticsReport,
    pub norm_complex: f64,
    pub norm_real: f64,
    /// Relative symmetry defect of the residual.
    pub defect: f64,
    pub newton_iters: usize,
    /// Unit tangent in `R^{N+1}`, when known.
    pub tangent: Option<Vec<f64>>,
}

impl SolutionPoint {
    /// The state vector `(a_0, ..., a_{N-1}, c)`.
    pub fn state(&self) -> Vec<f64> {
        let mut x = self.z.coeffs().to_vec();
        x.push(self.c);
        x
    }
}

/// Why a branch record ended (or `Continuing` while it has not).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchStatus {
    Continuing,
    MaxSteps,
    C1Blowup,
    ChordArcBlowup,
    LoopClosed,
    NewtonFailure,
}

impl BranchStatus {
    pub fn is_terminal(self) -> bool {
        self != BranchStatus::Continuing
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BranchStatus::Continuing => "continuing",
            BranchStatus::MaxSteps => "max-steps",
            BranchStatus::C1Blowup => "c1-blowup",
            BranchStatus::ChordArcBlowup => "chord-arc-blowup",
            BranchStatus::LoopClosed => "loop-closed",
            BranchStatus::NewtonFailure => "newton-failure",
        }
    }
}

impl std::fmt::Display for BranchStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    pub m: usize,
    pub k: usize,
    /// Sign of the bifurcation speed; branches are computed for `c >= 0` and
    /// the mirror `-c` branch is identical up to that sign.
    pub sign: i8,
    /// Orientation of the kernel direction at the start.
    pub direction: i8,
    pub points: Vec<SolutionPoint>,
    pub status: BranchStatus,
    /// Error that terminated the run, if any.
    pub note: Option<String>,
}

/// Affine functional `normal . x = offset` on `R^{N+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Constraint {
    /// Pins the speed to `c`.
    pub fn fix_speed(modes: usize, c: f64) -> Self {
        let mut normal = vec![0.0; modes + 1];
        normal[modes] = 1.0;
        Self { normal, offset: c }
    }

    /// Pins lattice coefficient `k` to `value`.
    pub fn fix_coefficient(modes: usize, k: usize, value: f64) -> Self {
        let mut normal = vec![0.0; modes + 1];
        normal[k] = 1.0;
        Self {
            normal,
            offset: value,
        }
    }

    /// `tangent . (x - anchor) = ds`.
    pub fn arclength(tangent: &[f64], anchor: &[f64], ds: f64) -> Self {
        Self {
            normal: tangent.to_vec(),
            offset: dot(tangent, anchor) + ds,
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn split(m: usize, x: &[f64]) -> Result<(LatticeCoeffs, f64)> {
    let (coeffs, c) = x.split_at(x.len() - 1);
    Ok((LatticeCoeffs::new(m, coeffs.to_vec())?, c[0]))
}

fn lattice_sup(disc: &Discretization, residual: &[f64]) -> Result<f64> {
    Ok(to_grid(&LatticeCoeffs::new(disc.m, residual.to_vec())?, disc.grid)?.sup_norm())
}

/// Builds a fully populated [`SolutionPoint`] at `(z, c)`.
pub fn evaluate_point(disc: &Discretization, z: LatticeCoeffs, c: f64) -> Result<SolutionPoint> {
    let report = residual_complex(disc, &z, c)?;
    let diagnostics = diagnostics(disc, &z)?;
    Ok(SolutionPoint {
        z,
        c,
        s: 0.0,
        diagnostics,
        norm_complex: report.norm_complex,
        norm_real: report.norm_real,
        defect: report.defect.relative,
        newton_iters: 0,
        tangent: None,
    })
}

/// Solves `F(z, c) = 0` together with `constraint` by damped Newton, starting
/// from `(z0, c0)`.
pub fn newton_correct(
    disc: &Discretization,
    z0: &LatticeCoeffs,
    c0: f64,
    constraint: &Constraint,
    cfg: &ContinuationConfig,
) -> Result<SolutionPoint> {
    disc.check(z0)?;
    let n = disc.modes;
    if constraint.normal.len() != n + 1 {
        return Err(Error::Config(format!(
            "constraint has {} entries, expected {}",
            constraint.normal.len(),
            n + 1
        )));
    }
    let mut x = z0.coeffs().to_vec();
    x.push(c0);

    let residual_at = |x: &[f64]| -> Result<(Vec<f64>, f64)> {
        let (z, c) = split(disc.m, x)?;
        Ok((residual_vector(disc, &z, c)?, constraint.eval(x)))
    };
    let merit = |f: &[f64], g: f64| (dot(f, f) + g * g).sqrt();

    let (mut f, mut g) = residual_at(&x)?;
    let mut iters = 0;
    loop {
        let sup = lattice_sup(disc, &f)?;
        if sup <= cfg.tol_newton && g.abs() <= cfg.tol_newton {
            break;
        }
        if iters >= cfg.max_newton {
            return Err(Error::NewtonFailure {
                iterations: iters,
                residual: sup.max(g.abs()),
            });
        }
        let (z, c) = split(disc.m, &x)?;
        let jac = jacobian_analytic(disc, &z, c)?;
        let step = solve_bordered(&jac, &constraint.normal, &f, g)?;

        let current = merit(&f, g);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_DAMPING_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a - lambda * d).collect();
            match residual_at(&trial) {
                Ok((ft, gt)) => {
                    let m = merit(&ft, gt);
                    if m < current || m <= cfg.tol_newton {
                        accepted = Some((trial, ft, gt));
                        break;
                    }
                }
                Err(Error::DegenerateMap { .. }) | Err(Error::SymmetryViolation { .. }) => {}
                Err(e) => return Err(e),
            }
            lambda *= 0.5;
        }
        iters += 1;
        match accepted {
            Some((xt, ft, gt)) => {
                x = xt;
                f = ft;
                g = gt;
            }
            None => {
                return Err(Error::NewtonFailure {
                    iterations: iters,
                    residual: current,
                })
            }
        }
    }
    let (z, c) = split(disc.m, &x)?;
    let mut point = evaluate_point(disc, z, c)?;
    point.newton_iters = iters;
    Ok(point)
}

/// Solves `[J; normal^T] dx = [f; g]` by LU with partial pivoting.
fn solve_bordered(jac: &DMatrix<f64>, normal: &[f64], f: &[f64], g: f64) -> Result<Vec<f64>> {
    let n = jac.nrows();
    let mut a = jac.clone().insert_row(n, 0.0);
    a.row_mut(n).copy_from_slice(normal);
    let mut rhs = DVector::from_column_slice(f).insert_row(n, 0.0);
    rhs[n] = g;

    let norm_1 = |m: &DMatrix<f64>| {
        m.column_iter()
            .map(|col| col.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let lu = a.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::SingularJacobian {
        condition: f64::INFINITY,
    })?;
    let condition = norm_1(&a) * norm_1(&inverse);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::SingularJacobian { condition });
    }
    let lu = a.lu();
    let sol = lu.solve(&rhs).ok_or(Error::SingularJacobian {
        condition: f64::INFINITY,
    })?;
    Ok(sol.iter().copied().collect())
}

/// Unit null vector of the `N x (N+1)` Jacobian at `(z, c)`.
///
/// With a one-dimensional null space the sign is chosen to agree with `prev`
/// (or, without `prev`, so that the largest component is positive). A larger
/// null space is only accepted when `prev` lies in it, in which case the
/// projection of `prev` is returned; otherwise the tangent is ambiguous.
pub fn compute_tangent(
    disc: &Discretization,
    z: &LatticeCoeffs,
    c: f64,
    prev: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let jac = jacobian_analytic(disc, z, c)?;
    tangent_from_jacobian(&jac, prev)
}

pub fn tangent_from_jacobian(jac: &DMatrix<f64>, prev: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = jac.nrows();
    let square = jac.clone().insert_row(n, 0.0);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let null: Vec<Vec<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= RANK_TOL)
        .map(|(i, _)| v_t.row(i).iter().copied().collect())
        .collect();

    let orient = |mut t: Vec<f64>| {
        let flip = match prev {
            Some(p) => dot(&t, p) < 0.0,
            None => {
                let big = t
                    .iter()
                    .copied()
                    .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
                big < 0.0
            }
        };
        if flip {
            t.iter_mut().for_each(|v| *v = -*v);
        }
        t
    };

    match null.len() {
        0 => {
            // The padded row guarantees a zero singular value; fall back to
            // the smallest one if round-off pushed it above the bound.
            let (i, _) =
                svd.singular_values
                    .iter()
                    .enumerate()
                    .fold(
                        (0, f64::INFINITY),
                        |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
                    );
            Ok(orient(v_t.row(i).iter().copied().collect()))
        }
        1 => Ok(orient(null.into_iter().next().unwrap())),
        dimension => {
            let Some(p) = prev else {
                return Err(Error::RankDeficient { dimension });
            };
            let mut proj = vec![0.0; p.len()];
            for v in &null {
                let w = dot(v, p);
                proj.iter_mut().zip(v).for_each(|(a, b)| *a += w * b);
            }
            let len = norm(&proj);
            if len < NULL_SPACE_ALIGNMENT * norm(p) {
                return Err(Error::RankDeficient { dimension });
            }
            Ok(proj.into_iter().map(|v| v / len).collect())
        }
    }
}

/// Checks the last point of a (partial) record against the blow-up thresholds
/// and the loop criterion.
pub fn classify_alternative(points: &[SolutionPoint], cfg: &ContinuationConfig) -> BranchStatus {
    let Some(last) = points.last() else {
        return BranchStatus::Continuing;
    };
    if last.diagnostics.c1_norm > cfg.c1_max {
        return BranchStatus::C1Blowup;
    }
    if last.diagnostics.chord_arc > cfg.chord_arc_max {
        return BranchStatus::ChordArcBlowup;
    }
    if points.len() > 2 && last.s > cfg.loop_s_min {
        let anchor = &points[1];
        let gap: f64 = last
            .state()
            .iter()
            .zip(anchor.state())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if gap < cfg.loop_eps {
            if let (Some(t1), Some(t0)) = (&last.tangent, &anchor.tangent) {
                if dot(t1, t0) > 0.99 {
                    return BranchStatus::LoopClosed;
                }
            }
        }
    }
    BranchStatus::Continuing
}

/// Follows the branch bifurcating from `bp` in the kernel orientation
/// `direction`, calling `observer` on every accepted point as soon as it is
/// known.
pub fn continue_branch(
    bp: &BifurcationPoint,
    direction: i8,
    cfg: &ContinuationConfig,
    mut observer: impl FnMut(&SolutionPoint),
) -> Result<BranchRecord> {
    cfg.validate()?;
    if direction != 1 && direction != -1 {
        return Err(Error::Config(format!(
            "direction must be +1 or -1, got {direction}"
        )));
    }
    let disc = cfg.discretization(bp.m)?;
    if bp.kernel.len() != disc.modes || bp.k >= disc.modes {
        return Err(Error::IndexOutOfRange {
            k: bp.k,
            modes: disc.modes,
        });
    }
    let n = disc.modes;
    let c_bif = bifurcation_speed(bp.m, bp.k)?;

    let mut tangent = vec![0.0; n + 1];
    tangent[bp.k] = f64::from(direction);

    let mut origin = evaluate_point(&disc, disc.identity(), c_bif)?;
    origin.tangent = Some(tangent.clone());
    observer(&origin);

    let mut record = BranchRecord {
        m: bp.m,
        k: bp.k,
        sign: 1,
        direction,
        points: vec![origin],
        status: BranchStatus::MaxSteps,
        note: None,
    };

    let identity = disc.identity();
    let mut x = record.points[0].state();
    let mut s = 0.0;
    let mut ds = cfg.ds_init;
    while record.points.len() < cfg.max_steps {
        let predicted: Vec<f64> = x.iter().zip(&tangent).map(|(a, t)| a + ds * t).collect();
        let (z_pred, c_pred) = split(disc.m, &predicted)?;
        let constraint = Constraint::arclength(&tangent, &x, ds);
        let corrected = newton_correct(&disc, &z_pred, c_pred, &constraint, cfg).and_then(|p| {
            if p.z.max_abs_diff(&identity) < TRIVIAL_BRANCH_TOL {
                Err(Error::NewtonFailure {
                    iterations: p.newton_iters,
                    residual: 0.0,
                })
            } else {
                Ok(p)
            }
        });
        let mut point = match corrected {
            Ok(p) => p,
            Err(e) => {
                ds *= 0.5;
                if ds < cfg.ds_min {
                    record.status = BranchStatus::NewtonFailure;
                    record.note = Some(e.to_string());
                    return Ok(record);
                }
                continue;
            }
        };
        let next_tangent = match compute_tangent(&disc, &point.z, point.c, Some(&tangent)) {
            Ok(t) => t,
            Err(e) => {
                s += ds;
                point.s = s;
                observer(&point);
                record.points.push(point);
                record.status = BranchStatus::NewtonFailure;
                record.note = Some(e.to_string());
                return Ok(record);
            }
        };
        s += ds;
        point.s = s;
        point.tangent = Some(next_tangent.clone());
        let fast = point.newton_iters <= 3;
        x = point.state();
        observer(&point);
        record.points.push(point);
        tangent = next_tangent;

        let status = classify_alternative(&record.points, cfg);
        if status.is_terminal() {
            record.status = status;
            return Ok(record);
        }
        if fast {
            ds = (ds * 1.3).min(cfg.ds_max);
        }
    }
    record.status = BranchStatus::MaxSteps;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifurcation::make_bifurcation_point;

    fn small_cfg() -> ContinuationConfig {
        ContinuationConfig {
            modes: 16,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(ContinuationConfig::default().validate().is_ok());
        let bad = ContinuationConfig {
            ds_init: 1.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = ContinuationConfig {
            tol_newton: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn newton_at_exact_solution_takes_no_steps() {
        let cfg = small_cfg();
        let disc = cfg.discretization(2).unwrap();
        let p = newton_correct(
            &disc,
            &disc.identity(),
            1.0,
            &Constraint::fix_speed(disc.modes, 1.0),
            &cfg,
        )
        .unwrap();
        assert_eq!(p.newton_iters, 0);
        assert_eq!(p.c, 1.0);
    }

    #[test]
    fn newton_returns_to_circle_away_from_bifurcation() {
        let cfg = small_cfg();
        let disc = cfg.discretization(2).unwrap();
        let mut a = vec![0.0; disc.modes];
        a[0] = 1.0;
        a[1] = 0.005;
        let z0 = LatticeCoeffs::new(2, a).unwrap();
        let p = newton_correct(
            &disc,
            &z0,
            0.7,
            &Constraint::fix_speed(disc.modes, 0.7),
            &cfg,
        )
        .unwrap();
        assert!(p.z.max_abs_diff(&disc.identity()) < 1e-12);
        assert!((p.c - 0.7).abs() < 1e-14);
    }

    #[test]
    fn tangent_on_trivial_branch_is_speed_direction() {
        let cfg = small_cfg();
        let disc = cfg.discretization(2).unwrap();
        let t = compute_tangent(&disc, &disc.identity(), 0.7, None).unwrap();
        assert!((t[disc.modes] - 1.0).abs() < 1e-12);
        assert!(t[..disc.modes].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn tangent_at_bifurcation_needs_a_hint() {
        let cfg = small_cfg();
        let disc = cfg.discretization(2).unwrap();
        let bp = make_bifurcation_point(2, 1, disc.modes).unwrap();
        assert!(matches!(
            compute_tangent(&disc, &disc.identity(), bp.c, None),
            Err(Error::RankDeficient { dimension: 2 })
        ));
        let mut hint = vec![0.0; disc.modes + 1];
        hint[1] = 1.0;
        let t = compute_tangent(&disc, &disc.identity(), bp.c, Some(&hint)).unwrap();
        assert!((t[1] - 1.0).abs() < 1e-8);
        assert!(t[disc.modes].abs() < 1e-8);
    }

    #[test]
    fn status_strings() {
        assert_eq!(BranchStatus::ChordArcBlowup.as_str(), "chord-arc-blowup");
        assert_eq!(
            serde_json_like(BranchStatus::LoopClosed),
            "loop-closed".to_string()
        );
    }

    fn serde_json_like(s: BranchStatus) -> String {
        s.to_string()
    }
}
