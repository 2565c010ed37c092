//! The demo's numerics, kept separate from the wasm glue so the native
//! test suite can drive them directly.

use gabor_core::deform::rotate_point;
use gabor_core::{
    bounds_from_periodization, frft_apply, periodization, sample_window, tighten_window,
    GaborError, Grid, HermiteBasis, Result, RotationAngle, SampledSignal, TimeFreqPoint,
    WindowSpec,
};

pub fn window_spec(kind: &str) -> Result<WindowSpec> {
    match kind {
        "gaussian" => Ok(WindowSpec::Gaussian { width: 1.0 }),
        "rectangular" => Ok(WindowSpec::Rectangular {
            start: -0.5,
            len: 1.0,
        }),
        "hann" => Ok(WindowSpec::Hann {
            start: -0.5,
            len: 1.0,
        }),
        other => Err(GaborError::Format(format!("unknown window kind {other:?}"))),
    }
}

pub struct DeformContext {
    basis: HermiteBasis,
    pub last_leakage: f64,
}

impl DeformContext {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        let grid = Grid::balanced(n)?;
        Ok(DeformContext {
            basis: HermiteBasis::new(grid, m)?,
            last_leakage: 0.0,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        self.basis.grid().times().collect()
    }

    pub fn deform(&mut self, kind: &str, theta: f64) -> Result<Vec<f64>> {
        let g = sample_window(&window_spec(kind)?, self.basis.grid())?;
        let out = frft_apply(&self.basis, RotationAngle::new(theta), &g)?;
        self.last_leakage = out.leakage;
        let n = out.signal.len();
        let mut buf = Vec::with_capacity(3 * n);
        buf.extend(out.signal.values().iter().map(|v| v.re));
        buf.extend(out.signal.values().iter().map(|v| v.im));
        buf.extend(out.signal.values().iter().map(|v| v.norm()));
        Ok(buf)
    }
}

pub fn rotate_lattice(
    tau: f64,
    t_step: f64,
    m_max: i64,
    n_max: i64,
    theta: f64,
) -> Result<Vec<f64>> {
    if tau.is_nan() || t_step.is_nan() || tau <= 0.0 || t_step <= 0.0 || m_max < 0 || n_max < 0 {
        return Err(GaborError::Format(
            "lattice needs tau > 0, T > 0 and non-negative ranges".into(),
        ));
    }
    let angle = RotationAngle::new(theta);
    let mut base = Vec::new();
    let mut rotated = Vec::new();
    for n in -n_max..=n_max {
        for m in -m_max..=m_max {
            let p = TimeFreqPoint::new(
                2.0 * std::f64::consts::PI * m as f64 / tau,
                n as f64 * t_step,
            );
            let q = rotate_point(p, angle);
            base.push(p.omega);
            base.push(p.s);
            rotated.push(q.omega);
            rotated.push(q.s);
        }
    }
    base.extend(rotated);
    Ok(base)
}

/// Aligned reference grid for the tightening view: span [-4, 4), dt = 1/32.
pub fn tighten_grid() -> Grid {
    Grid::new(256, 1.0 / 32.0, -4.0).expect("valid grid")
}

fn tighten_pair(kind: &str, t_step: f64) -> Result<(SampledSignal, SampledSignal)> {
    let grid = tighten_grid();
    let spec = match window_spec(kind)? {
        // Compact windows move to [0, 1) so every translate stays in-grid.
        WindowSpec::Rectangular { .. } => WindowSpec::Rectangular {
            start: 0.0,
            len: 1.0,
        },
        WindowSpec::Hann { .. } => WindowSpec::Hann {
            start: 0.0,
            len: 1.0,
        },
        w => w,
    };
    let g = sample_window(&spec, grid)?;
    let h = tighten_window(&g, t_step, 1.0)?;
    Ok((g, h))
}

pub fn tighten_curves(kind: &str, t_step: f64) -> Result<Vec<f64>> {
    let (g, h) = tighten_pair(kind, t_step)?;
    let per_before = gabor_core::frame::periodization_on_grid(&g, t_step, 1.0)?;
    let per_after = gabor_core::frame::periodization_on_grid(&h, t_step, 1.0)?;
    let n = g.len();
    let mut buf = Vec::with_capacity(4 * n);
    buf.extend(per_before);
    buf.extend(per_after);
    buf.extend(g.values().iter().map(|v| v.norm()));
    buf.extend(h.values().iter().map(|v| v.norm()));
    Ok(buf)
}

pub fn tighten_summary(kind: &str, t_step: f64) -> Result<Vec<f64>> {
    let (g, h) = tighten_pair(kind, t_step)?;
    let bounds = bounds_from_periodization(&periodization(&g, t_step, 1.0)?)?;
    Ok(vec![
        bounds.a,
        bounds.b,
        g.norm_sq(),
        h.norm_sq(),
        t_step / 1.0,
    ])
}
