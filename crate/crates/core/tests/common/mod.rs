#![allow(dead_code)]

use dropwave_core::{BoundaryGrid, LatticeCoeffs};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Trigonometric polynomial with frequencies in `-degree..=degree`.
pub fn trig_poly(rng: &mut ChaCha8Rng, grid: usize, degree: i64) -> BoundaryGrid {
    let coeffs: Vec<(i64, Complex64)> = (-degree..=degree)
        .map(|n| (n, random_complex(rng)))
        .collect();
    sample(grid, &coeffs)
}

/// Holomorphic polynomial with frequencies in `0..=degree`; returns the grid
/// and its value at the origin.
pub fn holo_poly(rng: &mut ChaCha8Rng, grid: usize, degree: i64) -> (BoundaryGrid, Complex64) {
    let coeffs: Vec<(i64, Complex64)> = (0..=degree).map(|n| (n, random_complex(rng))).collect();
    (sample(grid, &coeffs), coeffs[0].1)
}

/// Sum of `c tau^n` evaluated directly at every node.
pub fn sample(grid: usize, coeffs: &[(i64, Complex64)]) -> BoundaryGrid {
    BoundaryGrid::from_fn(grid, |tau| {
        coeffs.iter().map(|&(n, c)| c * tau.powi(n as i32)).sum()
    })
    .unwrap()
}

/// A near-circular univalent map: `sum |f_n a_n| <= 0.35 a_0` keeps `Z'`
/// away from zero in the closed disk.
pub fn random_map(rng: &mut ChaCha8Rng, m: usize, modes: usize) -> LatticeCoeffs {
    let a0 = rng.gen_range(0.7..1.4);
    let mut a = vec![a0; 1];
    let mut budget = 0.35 * a0;
    for n in 1..modes {
        let f = (m * n + 1) as f64;
        let cap = budget * 0.5f64.powi(n as i32) / f;
        let v = rng.gen_range(-cap..cap);
        a.push(v);
    }
    budget -= a[1..]
        .iter()
        .enumerate()
        .map(|(i, v)| (m * (i + 1) + 1) as f64 * v.abs())
        .sum::<f64>();
    assert!(budget >= 0.0);
    LatticeCoeffs::new(m, a).unwrap()
}

pub fn max_diff(a: &BoundaryGrid, b: &BoundaryGrid) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
