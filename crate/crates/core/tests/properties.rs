//! Cross-module property checks that need more machinery than the
//! per-module unit tests: the frame inequality against eigen bounds, and
//! the consistency of the two bound methods on random inputs.

mod common;

use common::*;
use num_complex::Complex64;
use rand::Rng;

use gabor_core::frame::{coverage_indices, COVERAGE_THRESHOLD};
use gabor_core::*;

/// Random signal supported on the coverage region of a frame.
fn random_covered_signal(
    frame: &GaborFrame,
    seed_rng: &mut rand_chacha::ChaCha8Rng,
) -> SampledSignal {
    let idx = coverage_indices(frame, COVERAGE_THRESHOLD);
    let grid = frame.grid();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for &k in &idx {
        values[k] = Complex64::new(seed_rng.gen_range(-1.0..1.0), seed_rng.gen_range(-1.0..1.0));
    }
    SampledSignal::new(grid, values).unwrap()
}

#[test]
fn frame_inequality_holds_with_eigen_bounds() {
    // Aligned half-step hann frame with the full Nyquist class: the eigen
    // bounds are the quadratic form's extremes by definition; fifty random
    // covered signals must sit between them.
    let grid = Grid::new(256, 1.0 / 32.0, -4.0).unwrap();
    let g = sample_window(
        &WindowSpec::Hann {
            start: 0.0,
            len: 1.0,
        },
        grid,
    )
    .unwrap();
    let m_range = LatticeSpec::nyquist_m_range(grid, 1.0).unwrap();
    let spec = LatticeSpec::new(1.0, 0.5, m_range, (-8, 7)).unwrap();
    let frame = GaborFrame::from_spec(g, spec).unwrap();
    let bounds = frame_bounds_eigen(&frame).unwrap();
    assert!(bounds.a > 0.0);

    let mut r = rng(0xAB);
    for _ in 0..50 {
        let f = random_covered_signal(&frame, &mut r);
        let energy: f64 = analyze(&frame, &f)
            .unwrap()
            .values
            .iter()
            .map(|v| v.norm_sqr())
            .sum();
        let nsq = f.norm_sq();
        assert!(
            bounds.a * nsq - 1e-9 <= energy && energy <= bounds.b * nsq + 1e-9,
            "energy {energy} outside [{}, {}] * {nsq}",
            bounds.a,
            bounds.b
        );
    }
}

#[test]
fn bound_methods_agree_for_compact_aligned_frames() {
    // For compactly supported windows on aligned full-Nyquist lattices the
    // frame operator is diagonal, so the two bound routes (periodization
    // extremes, compressed-operator eigenvalues) measure the same thing.
    let grid = Grid::new(256, 1.0 / 32.0, -4.0).unwrap();
    for (window, t_step) in [
        (
            WindowSpec::Rectangular {
                start: 0.0,
                len: 1.0,
            },
            0.5,
        ),
        (
            WindowSpec::Hann {
                start: 0.0,
                len: 1.0,
            },
            0.25,
        ),
        (
            WindowSpec::Hann {
                start: 0.0,
                len: 1.0,
            },
            0.5,
        ),
    ] {
        let g = sample_window(&window, grid).unwrap();
        let per = bounds_from_periodization(&periodization(&g, t_step, 1.0).unwrap()).unwrap();
        let m_range = LatticeSpec::nyquist_m_range(grid, 1.0).unwrap();
        let shifts = (8.0 / t_step) as i64;
        let spec = LatticeSpec::new(1.0, t_step, m_range, (-shifts / 2, shifts / 2 - 1)).unwrap();
        let frame = GaborFrame::from_spec(g, spec).unwrap();
        let eig = frame_bounds_eigen(&frame).unwrap();
        assert!(
            (eig.a - per.a).abs() / per.a <= 0.02,
            "{window:?} T={t_step}: a {} vs {}",
            eig.a,
            per.a
        );
        assert!(
            (eig.b - per.b).abs() / per.b <= 0.02,
            "{window:?} T={t_step}: b {} vs {}",
            eig.b,
            per.b
        );
    }
}

#[test]
fn spectral_translation_composes_and_inverts() {
    let grid = balanced(256);
    let g = sample_window(&WindowSpec::Gaussian { width: 1.0 }, grid).unwrap();
    let mut r = rng(0xCD);
    for _ in 0..20 {
        let a = r.gen_range(-2.0..2.0);
        let b = r.gen_range(-2.0..2.0);
        let two = translate(&translate(&g, a), b);
        let one = translate(&g, a + b);
        assert!(rel_err(&two, &one) <= 1e-10);
    }
}

#[test]
fn rotation_quarter_turn_reproduces_oracle_on_random_low_modes() {
    let basis = HermiteBasis::new(balanced(256), 128).unwrap();
    let mut r = rng(0xEF);
    for _ in 0..5 {
        let f = random_basis_limited(&basis, 48, &mut r);
        let spectral = frft_apply(&basis, RotationAngle::new(std::f64::consts::FRAC_PI_2), &f)
            .unwrap()
            .signal;
        let oracle =
            balanced_dft_plus(&f).scaled(Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4));
        assert!(rel_err(&spectral, &oracle) <= 1e-8);
    }
}
