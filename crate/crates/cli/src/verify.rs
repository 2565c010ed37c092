//! The verify bundle: numeric self-checks with pinned default thresholds.
//!
//! Each check reports its measured residual next to the threshold it was
//! judged against. Checks whose probe signals exceed the configured
//! leakage threshold are reported as skipped (with the leakage), never
//! silently passed. Threshold overrides looser than the defaults are
//! echoed as warnings.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use gabor_core::*;

use crate::config::JobConfig;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub measured: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leakage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub const DEFAULT_THRESHOLDS: &[(&str, f64)] = &[
    ("unitarity", 1e-10),
    ("group-law", 1e-9),
    ("bch", 1e-6),
    ("rotation", 1e-10),
    ("theorem1", 1e-6),
    ("corollary2", 1e-8),
];

pub const DEFAULT_LEAKAGE_THRESHOLD: f64 = 1e-6;

fn threshold_for(cfg: &JobConfig, name: &str, warnings: &mut Vec<String>) -> f64 {
    let default = DEFAULT_THRESHOLDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .expect("known check");
    match cfg.tolerances.as_ref().and_then(|t| t.get(name)) {
        Some(&over) => {
            if over > default {
                warnings.push(format!(
                    "threshold for {name} loosened from {default:.1e} to {over:.1e}"
                ));
            }
            over
        }
        None => default,
    }
}

fn random_basis_limited(basis: &HermiteBasis, modes: usize, rng: &mut ChaCha8Rng) -> SampledSignal {
    let coeffs: Vec<Complex64> = (0..modes.min(basis.modes()))
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let f = basis.synthesize_slice(&coeffs);
    let n = f.norm();
    f.scaled(Complex64::new(1.0 / n, 0.0))
}

pub struct VerifyOutcome {
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
}

impl VerifyOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

/// Run the named checks (`all` runs every one).
pub fn run_checks(cfg: &JobConfig, which: &str) -> CliResult<VerifyOutcome> {
    let grid = cfg.grid_or_default()?;
    let m = cfg.basis_or_default();
    let basis = HermiteBasis::new(grid, m).map_err(CliError::Domain)?;
    let leakage_threshold = cfg.leakage_threshold.unwrap_or(DEFAULT_LEAKAGE_THRESHOLD);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_or_default());
    let mut warnings = Vec::new();
    let mut checks = Vec::new();

    let wanted = |name: &str| which == "all" || which == name;

    if wanted("unitarity") {
        let threshold = threshold_for(cfg, "unitarity", &mut warnings);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let f = random_basis_limited(&basis, m, &mut rng);
            let theta = rng.gen_range(-PI..3.0 * PI);
            let wf = frft_apply(&basis, RotationAngle::new(theta), &f)
                .map_err(CliError::Domain)?
                .signal;
            worst = worst.max((wf.norm() - f.norm()).abs());
        }
        checks.push(CheckResult {
            name: "unitarity".into(),
            status: if worst <= threshold {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: worst,
            threshold,
            leakage: None,
            note: None,
        });
    }

    if wanted("group-law") {
        let threshold = threshold_for(cfg, "group-law", &mut warnings);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let f = random_basis_limited(&basis, m, &mut rng);
            let t1 = rng.gen_range(-PI..PI);
            let t2 = rng.gen_range(-PI..PI);
            let one = frft_apply(&basis, RotationAngle::new(t1 + t2), &f)
                .map_err(CliError::Domain)?
                .signal;
            let step = frft_apply(&basis, RotationAngle::new(t2), &f)
                .map_err(CliError::Domain)?
                .signal;
            let two = frft_apply(&basis, RotationAngle::new(t1), &step)
                .map_err(CliError::Domain)?
                .signal;
            worst = worst.max(two.sub(&one).map_err(CliError::Domain)?.norm() / f.norm());
        }
        checks.push(CheckResult {
            name: "group-law".into(),
            status: if worst <= threshold {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: worst,
            threshold,
            leakage: None,
            note: None,
        });
    }

    if wanted("bch") {
        let threshold = threshold_for(cfg, "bch", &mut warnings);
        let h0 = basis.vector(0);
        let mut worst = 0.0f64;
        let mut worst_leak = 0.0f64;
        for (a, b) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, -1.0)] {
            let probe = modulate(&translate(&h0, -b), a);
            worst_leak = worst_leak.max(basis.leakage(&probe).map_err(CliError::Domain)?);
            worst = worst.max(bch_check(&basis, a, b, &h0).map_err(CliError::Domain)?);
        }
        let (status, note) = if worst_leak > leakage_threshold {
            (
                CheckStatus::Skipped,
                Some(format!(
                    "probe leakage {worst_leak:.2e} above threshold {leakage_threshold:.1e}; \
                     enlarge the basis to run this check"
                )),
            )
        } else if worst <= threshold {
            (CheckStatus::Pass, None)
        } else {
            (CheckStatus::Fail, None)
        };
        if status == CheckStatus::Skipped {
            warnings.push(format!("bch skipped: leakage {worst_leak:.2e}"));
        }
        checks.push(CheckResult {
            name: "bch".into(),
            status,
            measured: worst,
            threshold,
            leakage: Some(worst_leak),
            note,
        });
    }

    if wanted("rotation") {
        let threshold = threshold_for(cfg, "rotation", &mut warnings);
        let mut worst = 0.0f64;
        for theta in [FRAC_PI_6, FRAC_PI_2, 1.0] {
            let (rq, rp) = observable_rotation_residual(&basis, RotationAngle::new(theta));
            worst = worst.max(rq).max(rp);
        }
        checks.push(CheckResult {
            name: "rotation".into(),
            status: if worst <= threshold {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: worst,
            threshold,
            leakage: None,
            note: None,
        });
    }

    if wanted("theorem1") {
        let threshold = threshold_for(cfg, "theorem1", &mut warnings);
        let h0 = basis.vector(0);
        let points = [
            TimeFreqPoint::new(1.0, 0.0),
            TimeFreqPoint::new(0.0, 1.0),
            TimeFreqPoint::new(2.0, -1.0),
        ];
        let angles = [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3];
        let mut worst = 0.0f64;
        let mut worst_leak = 0.0f64;
        for &p in &points {
            let atom = gabor_atom(&h0, p);
            worst_leak = worst_leak.max(basis.leakage(&atom).map_err(CliError::Domain)?);
            for &theta in &angles {
                let angle = RotationAngle::new(theta);
                let r = if cfg.flip_gamma {
                    // Sensitivity control: the conjugate phase must break
                    // the identity by orders of magnitude.
                    let lhs = frft_apply(&basis, angle, &gabor_atom(&h0, p))
                        .map_err(CliError::Domain)?
                        .signal;
                    let (gt, _) = deform_window(&basis, &h0, angle).map_err(CliError::Domain)?;
                    let rhs = gabor_atom(&gt, rotate_point(p, angle))
                        .scaled(phase_factor(p, angle).conj());
                    lhs.sub(&rhs).map_err(CliError::Domain)?.norm() / h0.norm()
                } else {
                    theorem1_residual(&basis, &h0, p, angle).map_err(CliError::Domain)?
                };
                worst = worst.max(r);
            }
        }
        let (status, note) = if worst_leak > leakage_threshold {
            (
                CheckStatus::Skipped,
                Some(format!(
                    "atom leakage {worst_leak:.2e} above threshold {leakage_threshold:.1e}"
                )),
            )
        } else if worst <= threshold {
            (CheckStatus::Pass, None)
        } else {
            (CheckStatus::Fail, None)
        };
        if status == CheckStatus::Skipped {
            warnings.push(format!("theorem1 skipped: leakage {worst_leak:.2e}"));
        }
        checks.push(CheckResult {
            name: "theorem1".into(),
            status,
            measured: worst,
            threshold,
            leakage: Some(worst_leak),
            note,
        });
    }

    if wanted("corollary2") {
        let threshold = threshold_for(cfg, "corollary2", &mut warnings);
        let tau = 2.0 * PI.sqrt();
        let g =
            sample_window(&WindowSpec::Gaussian { width: 1.0 }, grid).map_err(CliError::Domain)?;
        let spec = LatticeSpec::new(tau, tau / 2.0, (-3, 3), (-3, 3)).map_err(CliError::Domain)?;
        let frame = GaborFrame::from_spec(g, spec).map_err(CliError::Domain)?;
        let mut worst = 0.0f64;
        let mut worst_leak = 0.0f64;
        for _ in 0..10 {
            let f = random_basis_limited(&basis, 40.min(m), &mut rng);
            for theta in [FRAC_PI_6, FRAC_PI_2] {
                let angle = RotationAngle::new(theta);
                let d = deform_frame(&basis, &frame, angle).map_err(CliError::Domain)?;
                worst_leak = worst_leak.max(d.leakage());
                worst = worst.max(
                    coefficient_identity_residual(&basis, &frame, angle, &f)
                        .map_err(CliError::Domain)?,
                );
            }
        }
        let (status, note) = if worst_leak > leakage_threshold {
            (
                CheckStatus::Skipped,
                Some(format!(
                    "deformed-window leakage {worst_leak:.2e} above threshold \
                     {leakage_threshold:.1e}"
                )),
            )
        } else if worst <= threshold {
            (CheckStatus::Pass, None)
        } else {
            (CheckStatus::Fail, None)
        };
        if status == CheckStatus::Skipped {
            warnings.push(format!("corollary2 skipped: leakage {worst_leak:.2e}"));
        }
        checks.push(CheckResult {
            name: "corollary2".into(),
            status,
            measured: worst,
            threshold,
            leakage: Some(worst_leak),
            note,
        });
    }

    if checks.is_empty() {
        return Err(CliError::Config(format!(
            "unknown verify target {which:?}; expected one of unitarity, group-law, bch, \
             rotation, theorem1, corollary2, all"
        )));
    }
    Ok(VerifyOutcome { checks, warnings })
}
