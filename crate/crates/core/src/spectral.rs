//! Boundary calculus for functions holomorphic in the unit disk.
//!
//! A symmetric map is stored as real coefficients on the lattice of
//! frequencies `m n + 1`; boundary traces live on an equispaced grid of `M`
//! nodes `tau_j = exp(2 pi i j / M)`. Every linear operator here (angular
//! derivative, Cauchy projection, circle Hilbert transform) acts as a Fourier
//! multiplier on the full grid spectrum, so no principal-value quadrature is
//! ever performed.
//!
//! Signed frequencies follow the usual FFT layout: bin `k < M/2` is frequency
//! `k`, bin `k > M/2` is `k - M`. The Nyquist bin `M/2` is its own mirror
//! image; the derivative and the Hilbert transform annihilate it and the
//! Cauchy projection keeps half of it, which keeps the Plemelj identity exact
//! on the grid.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Real coefficients `a_n` of `f(w) = sum_n a_n w^(m n + 1)`.
///
/// Any such series satisfies `f(e^{2 pi i/m} w) = e^{2 pi i/m} f(w)` and
/// `conj(f(w)) = f(conj(w))` by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeCoeffs {
    m: usize,
    coeffs: Vec<f64>,
}

impl LatticeCoeffs {
    pub fn new(m: usize, coeffs: Vec<f64>) -> Result<Self> {
        if m < 2 {
            return Err(Error::Multiplicity(m));
        }
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { m, coeffs })
    }

    /// The trivial drop `Z_0(w) = w` with `modes` lattice slots.
    pub fn identity(m: usize, modes: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; modes];
        if let Some(first) = coeffs.first_mut() {
            *first = 1.0;
        }
        Self::new(m, coeffs)
    }

    /// Unit vector at lattice index `k`.
    pub fn unit(m: usize, modes: usize, k: usize) -> Result<Self> {
        if k >= modes {
            return Err(Error::IndexOutOfRange { k, modes });
        }
        let mut coeffs = vec![0.0; modes];
        coeffs[k] = 1.0;
        Self::new(m, coeffs)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Frequency carried by lattice index `n`.
    pub fn frequency(&self, n: usize) -> usize {
        self.m * n + 1
    }

    pub fn max_frequency(&self) -> usize {
        self.frequency(self.len() - 1)
    }

    /// Smallest grid that reproduces these coefficients alias-free.
    pub fn min_grid(&self) -> usize {
        min_grid(self.m, self.len())
    }

    /// Zero-pads (or truncates) to `modes` lattice slots.
    pub fn resized(&self, modes: usize) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(modes, 0.0);
        Self::new(self.m, coeffs)
    }

    /// Re-expresses the coefficients on the coarser lattice of multiplicity
    /// `m * factor`, provided every index not divisible by `factor` vanishes
    /// (up to `tol`).
    pub fn coarsen(&self, factor: usize, tol: f64) -> Option<Self> {
        if factor == 0 {
            return None;
        }
        if self
            .coeffs
            .iter()
            .enumerate()
            .any(|(n, a)| n % factor != 0 && a.abs() > tol)
        {
            return None;
        }
        let coeffs = self.coeffs.iter().step_by(factor).copied().collect();
        Self::new(self.m * factor, coeffs).ok()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let len = self.len().max(other.len());
        (0..len)
            .map(|n| {
                let a = self.coeffs.get(n).copied().unwrap_or(0.0);
                let b = other.coeffs.get(n).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Minimum grid size for `modes` lattice slots at multiplicity `m`.
pub fn min_grid(m: usize, modes: usize) -> usize {
    2 * (m * modes.saturating_sub(1) + 1) + 2
}

/// Samples of a boundary function at the nodes `tau_j = exp(2 pi i j / M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    values: Vec<Complex64>,
}

impl BoundaryGrid {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::GridTooSmall {
                grid: values.len(),
                frequency: 0,
                required: 2,
            });
        }
        if let Some((index, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                index,
                value: if v.re.is_finite() { v.im } else { v.re },
            });
        }
        Ok(Self { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: usize, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new((0..grid).map(|j| f(node(j, grid))).collect())
    }

    pub fn constant(grid: usize, value: Complex64) -> Result<Self> {
        Self::new(vec![value; grid])
    }

    /// The pure mode `tau^n`.
    pub fn mode(grid: usize, n: i64) -> Result<Self> {
        Self::from_fn(grid, |tau| tau.powi(n as i32))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn node(&self, j: usize) -> Complex64 {
        node(j, self.len())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn min_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Root-mean-square of the samples, equal to the discrete L2 norm of the
    /// spectrum by Parseval.
    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.len() as f64).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.check_same_len(other)?;
        Ok(Self::from_vec_unchecked(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_vec_unchecked(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Elementwise quotient; fails when some `|other_j|` is at or below `floor`.
    pub fn div(&self, other: &Self, floor: f64) -> Result<Self> {
        self.check_same_len(other)?;
        let min = other.min_abs();
        if min <= floor {
            return Err(Error::DivisionFloor { min, floor });
        }
        self.zip_with(other, |a, b| a / b)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn scale(&self, a: Complex64) -> Self {
        self.map(|v| a * v)
    }

    /// `a * self + y`.
    pub fn axpy(&self, a: Complex64, y: &Self) -> Result<Self> {
        self.zip_with(y, |x, y| a * x + y)
    }
}

/// Pointwise operations exposed as a single dispatch for callers that pick the
/// operation at run time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pointwise {
    Mul,
    Div { floor: f64 },
    Conj,
    Abs,
    Axpy { a: Complex64 },
}

pub fn pointwise(a: &BoundaryGrid, b: &BoundaryGrid, op: Pointwise) -> Result<BoundaryGrid> {
    a.check_same_len(b)?;
    match op {
        Pointwise::Mul => a.mul(b),
        Pointwise::Div { floor } => a.div(b, floor),
        Pointwise::Conj => Ok(a.conj()),
        Pointwise::Abs => Ok(a.abs()),
        Pointwise::Axpy { a: alpha } => a.axpy(alpha, b),
    }
}

/// Distance of a grid function from the symmetry lattice.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymmetryDefect {
    /// L2 mass of off-lattice modes and imaginary parts of lattice modes.
    pub absolute: f64,
    /// `absolute / max(1, ||input||)`.
    pub relative: f64,
    /// L2 mass of real lattice modes beyond the retained `N` (truncation
    /// tail); symmetric, so not counted as a defect.
    pub tail: f64,
}

pub fn node(j: usize, grid: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / grid as f64)
}

/// Signed frequency of FFT bin `k`. The Nyquist bin reports `+M/2`.
pub fn signed_frequency(k: usize, grid: usize) -> i64 {
    if 2 * k <= grid {
        k as i64
    } else {
        k as i64 - grid as i64
    }
}

fn is_nyquist(k: usize, grid: usize) -> bool {
    grid.is_multiple_of(2) && 2 * k == grid
}

fn bin_of(freq: i64, grid: usize) -> usize {
    freq.rem_euclid(grid as i64) as usize
}

/// Normalised discrete Fourier coefficients: `c_k = (1/M) sum_j v_j tau_j^{-k}`.
pub fn spectrum(g: &BoundaryGrid) -> Vec<Complex64> {
    let grid = g.len();
    let mut buf = g.values.clone();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(grid).process(&mut buf));
    let scale = 1.0 / grid as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`spectrum`]: `v_j = sum_k c_k tau_j^k`.
pub fn synthesize(mut coeffs: Vec<Complex64>) -> BoundaryGrid {
    let grid = coeffs.len();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(grid).process(&mut coeffs));
    BoundaryGrid::from_vec_unchecked(coeffs)
}

/// Applies a Fourier multiplier `mult(freq, is_nyquist)` to every bin.
pub fn apply_multiplier(g: &BoundaryGrid, mult: impl Fn(i64, bool) -> Complex64) -> BoundaryGrid {
    let grid = g.len();
    let mut spec = spectrum(g);
    for (k, c) in spec.iter_mut().enumerate() {
        *c *= mult(signed_frequency(k, grid), is_nyquist(k, grid));
    }
    synthesize(spec)
}

pub(crate) fn d_alpha_multiplier(freq: i64, nyquist: bool) -> Complex64 {
    if nyquist {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, freq as f64)
    }
}

pub(crate) fn cauchy_multiplier(freq: i64, nyquist: bool) -> Complex64 {
    if nyquist {
        Complex64::new(0.5, 0.0)
    } else if freq >= 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

pub(crate) fn hilbert_multiplier(freq: i64, nyquist: bool) -> Complex64 {
    if nyquist || freq == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, -(freq.signum() as f64))
    }
}

/// Samples `sum_n a_n tau^(m n + 1)` on a grid of `grid` nodes.
pub fn to_grid(z: &LatticeCoeffs, grid: usize) -> Result<BoundaryGrid> {
    let required = z.min_grid();
    if grid < required {
        return Err(Error::GridTooSmall {
            grid,
            frequency: z.max_frequency(),
            required,
        });
    }
    let mut spec = vec![Complex64::new(0.0, 0.0); grid];
    for (n, &a) in z.coeffs().iter().enumerate() {
        spec[bin_of(z.frequency(n) as i64, grid)] += a;
    }
    Ok(synthesize(spec))
}

/// Orthogonal projection of a grid function onto the first `modes` lattice
/// slots. With `strict = Some(tol)` the call fails if the relative symmetry
/// defect exceeds `tol`.
pub fn to_coeffs(
    g: &BoundaryGrid,
    m: usize,
    modes: usize,
    strict: Option<f64>,
) -> Result<(LatticeCoeffs, SymmetryDefect)> {
    if m < 2 {
        return Err(Error::Multiplicity(m));
    }
    if modes == 0 {
        return Err(Error::EmptyCoefficients);
    }
    let grid = g.len();
    let required = min_grid(m, modes);
    if grid < required {
        return Err(Error::GridTooSmall {
            grid,
            frequency: m * (modes - 1) + 1,
            required,
        });
    }
    let spec = spectrum(g);
    let mut coeffs = vec![0.0; modes];
    let mut defect_sq = 0.0;
    let mut tail_sq = 0.0;
    let mut total_sq = 0.0;
    for (k, c) in spec.iter().enumerate() {
        total_sq += c.norm_sqr();
        let f = signed_frequency(k, grid);
        let on_lattice = f >= 1 && (f - 1) % m as i64 == 0;
        if !on_lattice {
            defect_sq += c.norm_sqr();
            continue;
        }
        let n = ((f - 1) / m as i64) as usize;
        defect_sq += c.im * c.im;
        if n < modes {
            coeffs[n] = c.re;
        } else {
            tail_sq += c.re * c.re;
        }
    }
    let absolute = defect_sq.sqrt();
    let defect = SymmetryDefect {
        absolute,
        relative: absolute / total_sq.sqrt().max(1.0),
        tail: tail_sq.sqrt(),
    };
    if let Some(tol) = strict {
        if defect.relative > tol {
            return Err(Error::SymmetryViolation {
                relative: defect.relative,
                tolerance: tol,
            });
        }
    }
    Ok((LatticeCoeffs::new(m, coeffs)?, defect))
}

/// Angular derivative `f_alpha = i w f'(w)`: mode `tau^n` goes to `i n tau^n`.
pub fn d_alpha(g: &BoundaryGrid) -> BoundaryGrid {
    apply_multiplier(g, d_alpha_multiplier)
}

/// Boundary trace of the Cauchy integral: keeps modes `n >= 0`.
pub fn cauchy_project(g: &BoundaryGrid) -> BoundaryGrid {
    apply_multiplier(g, cauchy_multiplier)
}

/// Circle Hilbert transform: `tau^n -> -i sgn(n) tau^n`, constants to zero.
pub fn hilbert(g: &BoundaryGrid) -> BoundaryGrid {
    apply_multiplier(g, hilbert_multiplier)
}

/// Trapezoidal circle average `(1/M) sum_j f(tau_j)`.
pub fn circle_average(g: &BoundaryGrid) -> Complex64 {
    g.values.iter().sum::<Complex64>() / g.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_map_samples_nodes() {
        let z = LatticeCoeffs::new(2, vec![1.0]).unwrap();
        let g = to_grid(&z, 8).unwrap();
        for j in 0..8 {
            assert!((g.values()[j] - node(j, 8)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_lattice_mode() {
        let z = LatticeCoeffs::new(2, vec![0.0, 1.0]).unwrap();
        let g = to_grid(&z, 16).unwrap();
        for j in 0..16 {
            let expect = Complex64::from_polar(1.0, 3.0 * 2.0 * PI * j as f64 / 16.0);
            assert!((g.values()[j] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn to_grid_rejects_small_grid() {
        let z = LatticeCoeffs::new(2, vec![1.0, 0.5]).unwrap();
        // m(N-1)+1 = 3, so the grid needs 2*3+2 = 8 nodes.
        assert!(matches!(
            to_grid(&z, 7),
            Err(Error::GridTooSmall { required: 8, .. })
        ));
        assert!(to_grid(&z, 8).is_ok());
    }

    #[test]
    fn lattice_rejects_bad_input() {
        assert_eq!(
            LatticeCoeffs::new(1, vec![1.0]),
            Err(Error::Multiplicity(1))
        );
        assert_eq!(LatticeCoeffs::new(2, vec![]), Err(Error::EmptyCoefficients));
        assert!(matches!(
            LatticeCoeffs::new(2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn projection_of_identity() {
        let g = BoundaryGrid::mode(32, 1).unwrap();
        let (z, defect) = to_coeffs(&g, 2, 4, Some(1e-9)).unwrap();
        assert_eq!(z.len(), 4);
        assert!((z.coeffs()[0] - 1.0).abs() < 1e-15);
        assert!(z.coeffs()[1..].iter().all(|a| a.abs() < 1e-15));
        assert!(defect.absolute < 1e-15);
    }

    #[test]
    fn off_lattice_mode_is_rejected_in_strict_mode() {
        let g = BoundaryGrid::mode(32, 2).unwrap();
        assert!(matches!(
            to_coeffs(&g, 2, 4, Some(1e-9)),
            Err(Error::SymmetryViolation { .. })
        ));
        let (_, defect) = to_coeffs(&g, 2, 4, None).unwrap();
        assert!((defect.absolute - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tiny_imaginary_part_is_accepted() {
        let g = BoundaryGrid::from_fn(32, |t| c(1.0, 1e-15) * t).unwrap();
        let (z, defect) = to_coeffs(&g, 2, 4, Some(1e-9)).unwrap();
        assert!((z.coeffs()[0] - 1.0).abs() < 1e-14);
        assert!(defect.relative > 0.5e-15 && defect.relative < 2e-15);
    }

    #[test]
    fn operator_mode_actions() {
        let grid = 16;
        let t3 = BoundaryGrid::mode(grid, 3).unwrap();
        let tm2 = BoundaryGrid::mode(grid, -2).unwrap();
        let tm1 = BoundaryGrid::mode(grid, -1).unwrap();
        let one = BoundaryGrid::constant(grid, c(1.0, 0.0)).unwrap();
        let zero = BoundaryGrid::constant(grid, c(0.0, 0.0)).unwrap();

        assert!(d_alpha(&t3).max_abs_diff(&t3.scale(c(0.0, 3.0))) < 1e-13);
        assert!(d_alpha(&one).max_abs_diff(&zero) < 1e-13);
        assert!(d_alpha(&tm2).max_abs_diff(&tm2.scale(c(0.0, -2.0))) < 1e-13);

        let t2 = BoundaryGrid::mode(grid, 2).unwrap();
        assert!(cauchy_project(&t2).max_abs_diff(&t2) < 1e-14);
        assert!(cauchy_project(&tm1).max_abs_diff(&zero) < 1e-14);

        assert!(hilbert(&t3).max_abs_diff(&t3.scale(c(0.0, -1.0))) < 1e-14);
        assert!(hilbert(&tm2).max_abs_diff(&tm2.scale(c(0.0, 1.0))) < 1e-14);
        assert!(hilbert(&one).max_abs_diff(&zero) < 1e-14);
    }

    #[test]
    fn averages() {
        let g = BoundaryGrid::constant(12, c(5.0, 1.0)).unwrap();
        assert!((circle_average(&g) - c(5.0, 1.0)).norm() < 1e-15);
        for n in [-11i64, -3, 1, 7, 11] {
            let g = BoundaryGrid::mode(12, n).unwrap();
            assert!(circle_average(&g).norm() < 1e-15);
        }
        let z0 = BoundaryGrid::mode(12, 1).unwrap();
        let sq = z0.mul(&z0.conj()).unwrap();
        assert!((circle_average(&sq) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pointwise_ops() {
        let t = BoundaryGrid::mode(8, 1).unwrap();
        let tinv = BoundaryGrid::mode(8, -1).unwrap();
        let one = BoundaryGrid::constant(8, c(1.0, 0.0)).unwrap();
        assert!(
            pointwise(&t, &tinv, Pointwise::Mul)
                .unwrap()
                .max_abs_diff(&one)
                < 1e-15
        );
        let it = t.scale(c(0.0, 1.0));
        assert!(
            pointwise(&it, &it, Pointwise::Abs)
                .unwrap()
                .max_abs_diff(&one)
                < 1e-15
        );

        let mut v = vec![c(1.0, 0.0); 8];
        v[3] = c(1e-16, 0.0);
        let b = BoundaryGrid::new(v).unwrap();
        assert!(matches!(
            pointwise(&one, &b, Pointwise::Div { floor: 1e-10 }),
            Err(Error::DivisionFloor { .. })
        ));
        let short = BoundaryGrid::mode(4, 1).unwrap();
        assert!(matches!(one.mul(&short), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn coarsen_reindexes_sublattice() {
        let z = LatticeCoeffs::new(2, vec![1.0, 0.0, 0.3, 0.0, 0.1]).unwrap();
        let coarse = z.coarsen(2, 1e-12).unwrap();
        assert_eq!(coarse.m(), 4);
        assert_eq!(coarse.coeffs(), &[1.0, 0.3, 0.1]);
        let w = LatticeCoeffs::new(2, vec![1.0, 0.2]).unwrap();
        assert!(w.coarsen(2, 1e-12).is_none());
    }
}
