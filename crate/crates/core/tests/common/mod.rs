//! Shared helpers and independent oracles for the integration suites.
#![allow(dead_code)] // each test target uses a different subset

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gabor_core::{Grid, HermiteBasis, SampledSignal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: &SampledSignal, b: &SampledSignal) -> f64 {
    a.sub(b).unwrap().norm() / b.norm()
}

/// Random unit-norm signal spanned by the first `modes` basis vectors.
pub fn random_basis_limited(
    basis: &HermiteBasis,
    modes: usize,
    rng: &mut ChaCha8Rng,
) -> SampledSignal {
    let mut c = DVector::<Complex64>::zeros(basis.modes());
    for j in 0..modes.min(basis.modes()) {
        c[j] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let f = basis.synthesize(&c);
    let n = f.norm();
    f.scaled(Complex64::new(1.0 / n, 0.0))
}

/// Independent quarter-turn oracle: the unitary DFT on the balanced grid
/// with kernel e^{+i xi t}, evaluated as a direct O(n^2) sum. The balanced
/// grid maps to itself under this transform, and the matrix is exactly
/// unitary in the dt-weighted inner product.
pub fn balanced_dft_plus(f: &SampledSignal) -> SampledSignal {
    let grid = f.grid();
    let n = grid.len();
    let dt = grid.dt();
    let scale = dt / (2.0 * std::f64::consts::PI).sqrt();
    let values: Vec<Complex64> = (0..n)
        .map(|j| {
            let xi = grid.time(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, v) in f.values().iter().enumerate() {
                acc += Complex64::from_polar(1.0, xi * grid.time(k)) * v;
            }
            acc * scale
        })
        .collect();
    SampledSignal::new(grid, values).unwrap()
}

/// Print the per-criterion verdict line. The assert that follows carries
/// the same information for the harness.
pub fn verdict(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

pub fn balanced(n: usize) -> Grid {
    Grid::balanced(n).unwrap()
}
