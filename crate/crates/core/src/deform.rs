//! Deformation of Gabor frames by the oscillator rotation group: phase
//! factor, label rotation, deformed windows and frames, the transport
//! identity residual, and frame-bound invariance reporting.
//!
//! The label transport implemented here is the one the operator algebra
//! actually produces,
//!
//! ```text
//! omega(theta) = omega cos(theta) + s sin(theta)
//! s(theta)     = s cos(theta) - omega sin(theta)
//! ```
//!
//! together with the phase
//! gamma = exp[i/4 (omega^2 - s^2) sin(2 theta) + i omega s sin^2(theta)].
//! A quarter turn carries a pure modulation (omega, 0) to a pure translation
//! by -omega, which pins the direction: conjugating U(omega) through W(theta)
//! lands on e^{i omega (Q cos + P sin)}, and the P part translates backwards.
//! The residual check below is the empirical witness for this convention.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};
use crate::frame::{coverage_indices, frame_operator, submatrix, GaborFrame};
use crate::frft::{frft_apply, HermiteBasis, RotationAngle};
use crate::signal::SampledSignal;
use crate::weyl::{gabor_atom, TimeFreqPoint};

/// Rotate a time-frequency label by theta.
pub fn rotate_point(p: TimeFreqPoint, angle: RotationAngle) -> TimeFreqPoint {
    let (c, s) = (angle.alpha(), angle.beta());
    TimeFreqPoint::new(p.omega * c + p.s * s, p.s * c - p.omega * s)
}

/// The unimodular phase gamma(omega, s, theta) attached to the transport of
/// an atom through W(theta).
pub fn phase_factor(p: TimeFreqPoint, angle: RotationAngle) -> Complex64 {
    let theta = angle.theta();
    let exponent = 0.25 * (p.omega * p.omega - p.s * p.s) * (2.0 * theta).sin()
        + p.omega * p.s * angle.beta() * angle.beta();
    Complex64::from_polar(1.0, exponent)
}

/// The deformed window g^theta = W(theta) g, with its truncation leakage.
pub fn deform_window(
    basis: &HermiteBasis,
    g: &SampledSignal,
    angle: RotationAngle,
) -> Result<(SampledSignal, f64)> {
    let out = frft_apply(basis, angle, g)?;
    Ok((out.signal, out.leakage))
}

/// Relative residual of the transport identity
/// W(theta) g_{omega,s} = gamma * (g^theta)_{rotated label}.
///
/// Exact in the continuum; the returned number measures discretization and
/// truncation error only. Thresholds belong to the callers.
pub fn theorem1_residual(
    basis: &HermiteBasis,
    g: &SampledSignal,
    p: TimeFreqPoint,
    angle: RotationAngle,
) -> Result<f64> {
    let lhs = frft_apply(basis, angle, &gabor_atom(g, p))?.signal;
    let (g_theta, _) = deform_window(basis, g, angle)?;
    let rhs = gabor_atom(&g_theta, rotate_point(p, angle)).scaled(phase_factor(p, angle));
    Ok(lhs.sub(&rhs)?.norm() / g.norm())
}

/// A frame pushed through W(theta): deformed window plus rotated labels.
#[derive(Debug, Clone)]
pub struct DeformedFrame {
    base: GaborFrame,
    theta: RotationAngle,
    window_theta: SampledSignal,
    lattice_theta: Vec<TimeFreqPoint>,
    leakage: f64,
}

impl DeformedFrame {
    pub fn base(&self) -> &GaborFrame {
        &self.base
    }

    pub fn theta(&self) -> RotationAngle {
        self.theta
    }

    pub fn window_theta(&self) -> &SampledSignal {
        &self.window_theta
    }

    pub fn lattice_theta(&self) -> &[TimeFreqPoint] {
        &self.lattice_theta
    }

    /// Hermite truncation leakage of the window transport.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    /// View the deformed family as a plain frame (arbitrary lattice).
    pub fn as_frame(&self) -> Result<GaborFrame> {
        GaborFrame::from_points(
            self.window_theta.clone(),
            self.lattice_theta.clone(),
            format!("deformed(theta = {})", self.theta.theta()),
        )
    }
}

/// Deform a frame: window through W(theta), labels through the rotation.
pub fn deform_frame(
    basis: &HermiteBasis,
    frame: &GaborFrame,
    angle: RotationAngle,
) -> Result<DeformedFrame> {
    if frame.grid() != basis.grid() {
        return Err(GaborError::GridMismatch);
    }
    let (window_theta, leakage) = deform_window(basis, frame.window(), angle)?;
    let lattice_theta = frame
        .lattice()
        .iter()
        .map(|&p| rotate_point(p, angle))
        .collect();
    Ok(DeformedFrame {
        base: frame.clone(),
        theta: angle,
        window_theta,
        lattice_theta,
        leakage,
    })
}

/// Relative mismatch of the coefficient-level invariance
/// sum over rotated labels of |<g^theta_p, f>|^2 versus
/// sum over base labels of |<g_p, W(-theta) f>|^2.
/// This is the mechanism behind bound invariance, testable without any
/// eigensolve.
pub fn coefficient_identity_residual(
    basis: &HermiteBasis,
    frame: &GaborFrame,
    angle: RotationAngle,
    f: &SampledSignal,
) -> Result<f64> {
    let deformed = deform_frame(basis, frame, angle)?;
    let dframe = deformed.as_frame()?;
    let lhs: f64 = crate::frame::analyze(&dframe, f)?
        .values
        .iter()
        .map(|v| v.norm_sqr())
        .sum();
    let back = frft_apply(basis, RotationAngle::new(-angle.theta()), f)?.signal;
    let rhs: f64 = crate::frame::analyze(frame, &back)?
        .values
        .iter()
        .map(|v| v.norm_sqr())
        .sum();
    if rhs == 0.0 {
        return Ok(lhs.abs());
    }
    Ok((lhs - rhs).abs() / rhs)
}

/// One row of a bound-invariance study.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeformationReport {
    pub theta: f64,
    #[serde(rename = "A_base")]
    pub a_base: f64,
    #[serde(rename = "B_base")]
    pub b_base: f64,
    #[serde(rename = "A_theta")]
    pub a_theta: f64,
    #[serde(rename = "B_theta")]
    pub b_theta: f64,
    #[serde(rename = "rel_dev_A")]
    pub rel_dev_a: f64,
    #[serde(rename = "rel_dev_B")]
    pub rel_dev_b: f64,
    pub leakage: f64,
    pub n: usize,
    pub m: usize,
}

/// Eigen bounds of each deformed frame against the base frame, compared on
/// matched subspaces: the base coverage subspace, mapped through W(theta)
/// for the deformed side. Rotation moves the covered region, so comparing
/// each side on its own region would report deviations that have nothing
/// to do with the frames themselves.
pub fn bounds_invariance_report(
    basis: &HermiteBasis,
    frame: &GaborFrame,
    thetas: &[RotationAngle],
    coverage_threshold: f64,
) -> Result<Vec<DeformationReport>> {
    if frame.is_empty() {
        return Err(GaborError::EmptyLattice);
    }
    let idx = coverage_indices(frame, coverage_threshold);
    if idx.is_empty() {
        return Err(GaborError::EmptyCoverage);
    }
    let s_base = frame_operator(frame)?;
    let m_base = submatrix(&s_base, &idx);
    let (a_base, b_base) = extremal(&m_base)?;

    let n = frame.grid().len();
    let mut out = Vec::with_capacity(thetas.len());
    for &angle in thetas {
        let deformed = deform_frame(basis, frame, angle)?;
        let s_theta = frame_operator(&deformed.as_frame()?)?;
        let w = basis.rotation_matrix(angle);

        // Columns of W at the coverage indices span the transported
        // subspace. For a complete basis they are orthonormal; a truncated
        // basis loses norm to leakage, so whiten with the Gram factor.
        let d = idx.len();
        let mut w_v = DMatrix::<Complex64>::zeros(n, d);
        for (j, &k) in idx.iter().enumerate() {
            w_v.set_column(j, &w.column(k));
        }
        let gram = w_v.adjoint() * &w_v;
        let compressed = w_v.adjoint() * &s_theta * &w_v;
        let chol = nalgebra::Cholesky::new(gram).ok_or(GaborError::EigenFailed)?;
        let l_inv = chol.l().try_inverse().ok_or(GaborError::EigenFailed)?;
        let whitened = &l_inv * compressed * l_inv.adjoint();
        let (a_theta, b_theta) = extremal(&whitened)?;

        out.push(DeformationReport {
            theta: angle.theta(),
            a_base,
            b_base,
            a_theta,
            b_theta,
            rel_dev_a: (a_theta - a_base).abs() / a_base.abs().max(f64::MIN_POSITIVE),
            rel_dev_b: (b_theta - b_base).abs() / b_base.abs().max(f64::MIN_POSITIVE),
            leakage: deformed.leakage(),
            n,
            m: basis.modes(),
        });
    }
    Ok(out)
}

/// One row of a leading-spectrum invariance study.
///
/// For lattices whose modulations cover only part of the band, the
/// time-coverage subspace contains directions the frame does not reach at
/// all, and its minimum eigenvalue is an exact zero that says nothing. The
/// robust finite-truncation form of bound invariance is spectral: the
/// deformed operator is unitarily transported, so its leading eigenvalues
/// must pair with the base operator's. `a_*` is the k-th leading
/// eigenvalue, where k counts base eigenvalues above `floor * b_base`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralInvarianceReport {
    pub theta: f64,
    pub floor: f64,
    pub k: usize,
    #[serde(rename = "A_base")]
    pub a_base: f64,
    #[serde(rename = "B_base")]
    pub b_base: f64,
    #[serde(rename = "A_theta")]
    pub a_theta: f64,
    #[serde(rename = "B_theta")]
    pub b_theta: f64,
    #[serde(rename = "rel_dev_A")]
    pub rel_dev_a: f64,
    #[serde(rename = "rel_dev_B")]
    pub rel_dev_b: f64,
    /// Worst relative deviation over all paired leading eigenvalues.
    pub max_pair_dev: f64,
    pub leakage: f64,
    pub n: usize,
    pub m: usize,
}

/// Compare the leading spectrum of the base frame operator against the
/// deformed operator compressed onto the transported leading eigenspace.
pub fn spectral_invariance_report(
    basis: &HermiteBasis,
    frame: &GaborFrame,
    thetas: &[RotationAngle],
    floor: f64,
) -> Result<Vec<SpectralInvarianceReport>> {
    let s_base = frame_operator(frame)?;
    let n = frame.grid().len();

    // Rows where the atoms carry no measurable energy contribute nothing
    // above the floor; drop them before the eigensolve (zero and denormal
    // columns trip up the Householder reduction).
    let diag_max = (0..n).fold(0.0f64, |acc, k| acc.max(s_base[(k, k)].re));
    let support: Vec<usize> = (0..n)
        .filter(|&k| s_base[(k, k)].re > diag_max * 1e-30)
        .collect();
    if support.is_empty() {
        return Err(GaborError::EmptyCoverage);
    }
    let sub = submatrix(&s_base, &support);
    let sym = (&sub + sub.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, 1e-13, 0).ok_or(GaborError::EigenFailed)?;

    let d = support.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let b_base = eig.eigenvalues[order[0]];
    let k = order
        .iter()
        .take_while(|&&i| eig.eigenvalues[i] >= floor * b_base)
        .count()
        .max(1);
    let base_leading: Vec<f64> = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let a_base = base_leading[k - 1];
    let mut u_k = DMatrix::<Complex64>::zeros(n, k);
    for (col, &i) in order[..k].iter().enumerate() {
        for (row, &kk) in support.iter().enumerate() {
            u_k[(kk, col)] = eig.eigenvectors[(row, i)];
        }
    }

    let mut out = Vec::with_capacity(thetas.len());
    for &angle in thetas {
        let deformed = deform_frame(basis, frame, angle)?;
        let s_theta = frame_operator(&deformed.as_frame()?)?;
        let w = basis.rotation_matrix(angle);
        let b = &w * &u_k;
        let gram = b.adjoint() * &b;
        let compressed = b.adjoint() * &s_theta * &b;
        let chol = nalgebra::Cholesky::new(gram).ok_or(GaborError::EigenFailed)?;
        let l_inv = chol.l().try_inverse().ok_or(GaborError::EigenFailed)?;
        let whitened = &l_inv * compressed * l_inv.adjoint();
        let sym_w = (&whitened + whitened.adjoint()).scale(0.5);
        let eig_w = SymmetricEigen::try_new(sym_w, 1e-13, 0).ok_or(GaborError::EigenFailed)?;
        let mut theta_leading: Vec<f64> = eig_w.eigenvalues.iter().copied().collect();
        theta_leading.sort_by(|x, y| y.partial_cmp(x).unwrap());

        let mut max_pair_dev = 0.0f64;
        for (lb, lt) in base_leading.iter().zip(&theta_leading) {
            max_pair_dev = max_pair_dev.max((lt - lb).abs() / lb.abs().max(f64::MIN_POSITIVE));
        }
        let a_theta = theta_leading[k - 1];
        let b_theta = theta_leading[0];
        out.push(SpectralInvarianceReport {
            theta: angle.theta(),
            floor,
            k,
            a_base,
            b_base,
            a_theta,
            b_theta,
            rel_dev_a: (a_theta - a_base).abs() / a_base.abs().max(f64::MIN_POSITIVE),
            rel_dev_b: (b_theta - b_base).abs() / b_base.abs().max(f64::MIN_POSITIVE),
            max_pair_dev,
            leakage: deformed.leakage(),
            n,
            m: basis.modes(),
        });
    }
    Ok(out)
}

fn extremal(mat: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    let sym = (mat + mat.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, 1e-13, 0).ok_or(GaborError::EigenFailed)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &l in eig.eigenvalues.iter() {
        lo = lo.min(l);
        hi = hi.max(l);
    }
    Ok((lo, hi))
}
