//! Self-checks of the operator identities, the linearisation and the
//! geometric diagnostics, runnable from an installed binary.

use std::f64::consts::PI;

use dropwave_core::{
    bifurcation_speed, cauchy_project, circle_average, continue_branch, curvature, d_alpha,
    hilbert, jacobian_analytic, jacobian_fd, make_bifurcation_point, newton_correct,
    potential_diagnostics, trivial_linearization, BoundaryGrid, BranchStatus, Constraint,
    ContinuationConfig, Discretization, LatticeCoeffs,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;
const QUICK_MODES: usize = 32;
const QUICK_GRID: usize = 512;
const SAMPLES: usize = 20;
const SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn result(name: &'static str, error: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: error <= tol,
        detail: format!("max error {error:.2e} (tol {tol:.0e})"),
    }
}

fn max_diff(a: &BoundaryGrid, b: &BoundaryGrid) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn poly(
    rng: &mut ChaCha8Rng,
    grid: usize,
    freqs: impl Iterator<Item = i64>,
    real: bool,
) -> (BoundaryGrid, Vec<(i64, Complex64)>) {
    let coeffs: Vec<(i64, Complex64)> = freqs
        .map(|n| {
            let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
            (n, Complex64::new(rng.gen_range(-1.0..1.0), im))
        })
        .collect();
    let g = BoundaryGrid::from_fn(grid, |tau| {
        coeffs.iter().map(|&(n, c)| c * tau.powi(n as i32)).sum()
    })
    .expect("finite samples");
    (g, coeffs)
}

/// Largest deviation from `C f = Avg f / 2 + f / 2 + (i/2) H f` over random
/// trigonometric polynomials, with the Hilbert transform supplied by the caller.
pub fn plemelj_defect(hilbert_op: impl Fn(&BoundaryGrid) -> BoundaryGrid) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let half_i = Complex64::new(0.0, 0.5);
    (0..SAMPLES)
        .map(|_| {
            let deg = rng.gen_range(1..(QUICK_GRID / 4) as i64);
            let (f, _) = poly(&mut rng, QUICK_GRID, -deg..=deg, false);
            let avg = circle_average(&f);
            let h = hilbert_op(&f);
            let rhs = BoundaryGrid::new(
                f.values()
                    .iter()
                    .zip(h.values())
                    .map(|(v, hv)| 0.5 * avg + 0.5 * v + half_i * hv)
                    .collect(),
            )
            .expect("finite");
            max_diff(&cauchy_project(&f), &rhs)
        })
        .fold(0.0, f64::max)
}

fn titchmarsh() -> [f64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = [0.0f64; 4];
    for _ in 0..SAMPLES {
        let deg = rng.gen_range(0..64);
        let (f, coeffs) = poly(&mut rng, QUICK_GRID, 0..=deg, false);
        let f0 = coeffs[0].1;
        let expect = |g: &dyn Fn(Complex64) -> Complex64| f.map(g);
        worst[0] = worst[0].max(max_diff(&cauchy_project(&f), &f));
        worst[1] = worst[1].max(max_diff(
            &cauchy_project(&f.conj()),
            &expect(&|_| f0.conj()),
        ));
        let re = f.map(|v| Complex64::new(v.re, 0.0));
        worst[2] = worst[2].max(max_diff(
            &cauchy_project(&re),
            &expect(&|v| 0.5 * v + 0.5 * f0.conj()),
        ));
        let im = f.map(|v| Complex64::new(0.0, v.im));
        worst[3] = worst[3].max(max_diff(
            &cauchy_project(&im),
            &expect(&|v| 0.5 * v - 0.5 * f0.conj()),
        ));
    }
    worst
}

fn shifted(g: &BoundaryGrid, by: usize) -> BoundaryGrid {
    let n = g.len();
    BoundaryGrid::new((0..n).map(|j| g.values()[(j + by) % n]).collect()).expect("finite")
}

fn reflected(g: &BoundaryGrid) -> BoundaryGrid {
    let n = g.len();
    BoundaryGrid::new((0..n).map(|j| g.values()[(n - j) % n]).collect()).expect("finite")
}

fn rotation_symmetry() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let m = rng.gen_range(2..7usize);
        let grid = 64 * m;
        let (f, _) = poly(&mut rng, grid, (-5..6).map(|n| m as i64 * n + 1), false);
        let rot = Complex64::from_polar(1.0, 2.0 * PI / m as f64);
        for g in [d_alpha(&f), cauchy_project(&f), hilbert(&f)] {
            let e = max_diff(&shifted(&g, grid / m), &g.scale(rot)) / (1.0 + g.sup_norm());
            worst = worst.max(e);
        }
    }
    worst
}

fn conjugation_symmetry() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let neg = Complex64::new(-1.0, 0.0);
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let deg = rng.gen_range(1..64);
        let (f, _) = poly(&mut rng, QUICK_GRID, -deg..=deg, true);
        let fa = d_alpha(&f);
        let cf = cauchy_project(&f);
        let hf = hilbert(&f);
        worst = worst
            .max(max_diff(&fa.conj(), &reflected(&fa).scale(neg)) / (1.0 + fa.sup_norm()))
            .max(max_diff(&cf.conj(), &reflected(&cf)))
            .max(max_diff(&hf.conj(), &reflected(&hf).scale(neg)));
    }
    worst
}

/// Near-circular univalent maps: the weighted coefficient sum stays below a_0.
fn random_map(rng: &mut ChaCha8Rng, m: usize, modes: usize) -> LatticeCoeffs {
    let a0: f64 = rng.gen_range(0.7..1.4);
    let mut a = vec![a0];
    for n in 1..modes {
        let cap = 0.35 * a0 * 0.5f64.powi(n as i32) / (m * n + 1) as f64;
        a.push(rng.gen_range(-cap..cap));
    }
    LatticeCoeffs::new(m, a).expect("finite")
}

fn fd_jacobian() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst: f64 = 0.0;
    for trial in 0..5 {
        let m = 2 + trial % 3;
        let disc = Discretization::auto(m, 12).expect("valid");
        let z = random_map(&mut rng, m, 12);
        let c = rng.gen_range(0.0..3.0);
        let (Ok(a), Ok(f)) = (
            jacobian_analytic(&disc, &z, c),
            jacobian_fd(&disc, &z, c, 1e-5),
        ) else {
            return f64::INFINITY;
        };
        let scale = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
        worst = worst.max((a - f).iter().map(|v| v.abs()).fold(0.0, f64::max) / scale);
    }
    worst
}

fn trivial_diagonal() -> f64 {
    let mut worst: f64 = 0.0;
    for m in 2..=4 {
        let disc = Discretization::auto(m, 8).expect("valid");
        for k in 1..=3 {
            let c = bifurcation_speed(m, k).expect("valid");
            let Ok(jac) = jacobian_analytic(&disc, &disc.identity(), c) else {
                return f64::INFINITY;
            };
            let diag = trivial_linearization(m, 8, c);
            for i in 0..8 {
                for j in 0..=8 {
                    let expect = if i == j { diag[i] } else { 0.0 };
                    worst = worst.max((jac[(i, j)] - expect).abs());
                }
            }
        }
    }
    worst
}

fn gauss_bonnet() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst: f64 = 0.0;
    for trial in 0..SAMPLES {
        let m = 2 + trial % 4;
        let disc = Discretization::auto(m, 16).expect("valid");
        let z = random_map(&mut rng, m, 16);
        let Ok(kappa) = curvature(&disc, &z) else {
            return f64::INFINITY;
        };
        let speed = dropwave_core::to_grid(
            &LatticeCoeffs::new(
                m,
                z.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(n, a)| a * z.frequency(n) as f64)
                    .collect(),
            )
            .expect("finite"),
            disc.grid,
        )
        .expect("grid fits");
        let turning: f64 = kappa
            .values()
            .iter()
            .zip(speed.values())
            .map(|(k, s)| k.re * s.norm())
            .sum::<f64>()
            * 2.0
            * PI
            / disc.grid as f64;
        worst = worst.max((turning - 2.0 * PI).abs());
    }
    worst
}

fn bernoulli_average() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut worst: f64 = 0.0;
    for trial in 0..SAMPLES {
        let m = 2 + trial % 4;
        let disc = Discretization::auto(m, QUICK_MODES).expect("valid");
        let z = random_map(&mut rng, m, QUICK_MODES);
        let avg = potential_diagnostics(&disc, &z, rng.gen_range(0.0..3.0))
            .map(|p| p.bernoulli_avg.norm())
            .unwrap_or(f64::INFINITY);
        worst = worst.max(avg);
    }
    worst
}

fn branch_smoke() -> CheckResult {
    let cfg = ContinuationConfig {
        modes: QUICK_MODES,
        max_steps: 12,
        ..Default::default()
    };
    let outcome = make_bifurcation_point(2, 1, cfg.modes)
        .and_then(|bp| continue_branch(&bp, 1, &cfg, |_| {}));
    match outcome {
        Ok(rec) => {
            let worst = rec
                .points
                .iter()
                .map(|p| p.norm_complex)
                .fold(0.0, f64::max);
            CheckResult {
                name: "branch-smoke",
                passed: rec.status == BranchStatus::MaxSteps
                    && rec.points.len() == cfg.max_steps
                    && worst <= cfg.tol_newton,
                detail: format!(
                    "{} points, status {}, max residual {worst:.2e}",
                    rec.points.len(),
                    rec.status
                ),
            }
        }
        Err(e) => CheckResult {
            name: "branch-smoke",
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Re-solves a small-amplitude branch point with twice the modes and grid.
fn refinement_stability() -> CheckResult {
    let cfg = ContinuationConfig {
        modes: QUICK_MODES,
        ..Default::default()
    };
    let run = || -> dropwave_core::Result<f64> {
        let disc = cfg.discretization(2)?;
        let bp = make_bifurcation_point(2, 1, cfg.modes)?;
        let (z, c) = dropwave_core::branch_seed(&bp, 0.05)?;
        let coarse = newton_correct(
            &disc,
            &z,
            c,
            &Constraint::fix_coefficient(cfg.modes, 1, 0.05),
            &cfg,
        )?;
        let modes = 2 * cfg.modes;
        let fine = disc.refined(modes, 2 * disc.grid)?;
        let fine_cfg = ContinuationConfig {
            modes,
            grid: Some(fine.grid),
            ..cfg.clone()
        };
        let refined = newton_correct(
            &fine,
            &z.resized(modes)?,
            c,
            &Constraint::fix_coefficient(modes, 1, 0.05),
            &fine_cfg,
        )?;
        Ok(refined
            .z
            .resized(cfg.modes)?
            .max_abs_diff(&coarse.z)
            .max((refined.c - coarse.c).abs()))
    };
    match run() {
        Ok(change) => result("refinement-stability", change, 1e-8),
        Err(e) => CheckResult {
            name: "refinement-stability",
            passed: false,
            detail: e.to_string(),
        },
    }
}

pub fn run(full: bool) -> Vec<CheckResult> {
    let t = titchmarsh();
    let mut out = vec![
        result("Plemelj", plemelj_defect(hilbert), TOL),
        result("Titchmarsh-1", t[0], TOL),
        result("Titchmarsh-2", t[1], TOL),
        result("Titchmarsh-3", t[2], TOL),
        result("Titchmarsh-4", t[3], TOL),
        result("rot-sym", rotation_symmetry(), TOL),
        result("conj-sym", conjugation_symmetry(), TOL),
        result("FD-Jacobian", fd_jacobian(), 1e-5),
        result("trivial-diagonal", trivial_diagonal(), 1e-11),
        result("Gauss-Bonnet", gauss_bonnet(), 1e-8),
        result("bernoulli-avg", bernoulli_average(), 1e-10),
    ];
    if full {
        out.push(refinement_stability());
        out.push(branch_smoke());
    }
    out
}
