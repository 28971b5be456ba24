//! Finite-difference oracles shared by the integration tests.
#![allow(dead_code)]

use helmuc::{ProblemCase, Rect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-4;

/// Every problem family at a few parameter choices.
pub fn all_cases() -> Vec<ProblemCase> {
    let mut v = Vec::new();
    for k in [1.0, 10.0, 50.0] {
        v.push(ProblemCase::gaussian_bump(k).unwrap());
    }
    for (k, n) in [(10.0, 12), (10.0, 10), (10.0, 5), (3.0, 1)] {
        v.push(ProblemCase::hadamard(k, n).unwrap());
    }
    v.push(ProblemCase::wkb_leading(10.0, 0.2).unwrap());
    v.push(ProblemCase::wkb_leading(25.0, 0.1).unwrap());
    v.push(ProblemCase::affine(2.0, -3.0, 0.5, 0.0, Rect::UNIT).unwrap());
    v.push(ProblemCase::affine(1.0, 1.0, 1.0, 4.0, Rect::UNIT).unwrap());
    v
}

/// Random points kept 1% away from the boundary so stencils stay inside.
pub fn samples(domain: Rect, count: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mx, my) = (0.01 * domain.width(), 0.01 * domain.height());
    (0..count)
        .map(|_| {
            [
                rng.random_range(domain.x0 + mx..domain.x1 - mx),
                rng.random_range(domain.y0 + my..domain.y1 - my),
            ]
        })
        .collect()
}

// fourth-order central differences
pub fn d1(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (-f(x + 2.0 * STEP) + 8.0 * f(x + STEP) - 8.0 * f(x - STEP) + f(x - 2.0 * STEP)) / (12.0 * STEP)
}

pub fn d2(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (-f(x + 2.0 * STEP) + 16.0 * f(x + STEP) - 30.0 * f(x) + 16.0 * f(x - STEP) - f(x - 2.0 * STEP))
        / (12.0 * STEP * STEP)
}

pub fn fd_laplacian(case: &ProblemCase, p: [f64; 2]) -> f64 {
    d2(|x| case.u([x, p[1]]), p[0]) + d2(|y| case.u([p[0], y]), p[1])
}

/// Largest `|Δ_h u + k²u + f| / (1 + k² max|u|)` over 200 sample points.
pub fn max_scaled_pde_residual(case: &ProblemCase, seed: u64) -> f64 {
    let pts = samples(case.domain(), 200, seed);
    let k2 = case.k() * case.k();
    let umax = pts.iter().map(|&p| case.u(p).abs()).fold(0.0, f64::max);
    pts.iter()
        .map(|&p| (fd_laplacian(case, p) + k2 * case.u(p) + case.f(p)).abs())
        .fold(0.0, f64::max)
        / (1.0 + k2 * umax)
}
