//! Discrete Gabor frames and their deformations under the harmonic
//! oscillator rotation group.
//!
//! The crate builds frames of translated and modulated windows on uniform
//! sampling grids, computes their frame bounds two independent ways
//! (periodization and frame-operator spectra), applies the fractional
//! Fourier rotation to windows and lattices, and verifies numerically that
//! the deformation preserves the bounds.
//!
//! Module map:
//!
//! * [`signal`] - grids, sampled signals, windows, inner products
//! * [`weyl`] - modulation/translation operators, atoms, the group law
//! * [`frft`] - the rotation group W(theta), spectral and kernel paths
//! * [`frame`] - lattices, periodization, tightening, bounds, reconstruction
//! * [`deform`] - label rotation, transport phase, bound invariance
//! * [`io`] - CSV/JSON wire formats
//!
//! Every value type is immutable after construction and every operation is
//! a pure function of its inputs, so values can be shared across threads
//! and identical inputs give identical outputs.

pub mod deform;
pub mod error;
pub mod frame;
pub mod frft;
pub mod io;
pub mod signal;
pub mod weyl;

pub use deform::{
    bounds_invariance_report, coefficient_identity_residual, deform_frame, deform_window,
    phase_factor, rotate_point, theorem1_residual, DeformationReport, DeformedFrame,
};
pub use error::{GaborError, Result};
pub use frame::{
    analyze, bounds_from_periodization, frame_bounds_eigen, frame_operator, periodization,
    synthesize_compact, tighten_window, BoundsMethod, BoundsReport, Coefficients, GaborFrame,
    LatticeSpec,
};
pub use frft::{
    frft_apply, mehler_apply, observable_rotation_residual, singular_case, FrftOutput,
    HermiteBasis, RotationAngle,
};
pub use signal::{inner_product, norm, sample_window, Grid, SampledSignal, WindowSpec};
pub use weyl::{
    apply_group_element, bch_check, gabor_atom, group_compose, modulate, translate,
    translate_with_path, GroupElement, ShiftPath, TimeFreqPoint,
};
