//! Uniform-grid sampled complex signals: the numeric substrate.
//!
//! All quadrature is a plain Riemann sum with weight `dt`. That choice makes
//! the discrete modulation and translation operators exactly unitary on the
//! grid, which the frame-bound machinery depends on. The inner product is
//! conjugate-linear in the FIRST argument.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};

/// Uniform sampling grid: `n` samples spaced `dt` apart starting at `t0`.
///
/// Sample times are `t_k = t0 + k*dt`, reproduced exactly by [`Grid::time`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    n: usize,
    dt: f64,
    t0: f64,
}

/// Wire form of [`Grid`]; deserialization revalidates the invariants.
#[derive(Serialize, Deserialize)]
struct GridRepr {
    n: usize,
    dt: f64,
    t0: f64,
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr {
            n: g.n,
            dt: g.dt,
            t0: g.t0,
        }
    }
}

impl TryFrom<GridRepr> for Grid {
    type Error = GaborError;

    fn try_from(r: GridRepr) -> Result<Self> {
        Grid::new(r.n, r.dt, r.t0)
    }
}

impl Grid {
    /// Build a grid; rejects `n < 2` and non-positive or non-finite `dt`.
    pub fn new(n: usize, dt: f64, t0: f64) -> Result<Self> {
        if n < 2 {
            return Err(GaborError::InvalidGrid(format!("n = {n}, need n >= 2")));
        }
        if dt.is_nan() || dt <= 0.0 || !dt.is_finite() {
            return Err(GaborError::InvalidGrid(format!("dt = {dt}, need dt > 0")));
        }
        if !t0.is_finite() {
            return Err(GaborError::InvalidGrid(format!("t0 = {t0} not finite")));
        }
        Ok(Grid { n, dt, t0 })
    }

    /// The "balanced" symmetric grid `dt = sqrt(2*pi/n)`, `t0 = -(n/2)*dt`.
    ///
    /// This grid is mapped to itself by the unitary discrete Fourier
    /// transform, which makes the quarter-turn of the oscillator group
    /// testable against a DFT.
    pub fn balanced(n: usize) -> Result<Self> {
        let dt = (2.0 * std::f64::consts::PI / n as f64).sqrt();
        Grid::new(n, dt, -((n / 2) as f64) * dt)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Time of sample `k`: exactly `t0 + k*dt`.
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + (k as f64) * self.dt
    }

    /// Iterator over all sample times.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.time(k))
    }

    /// Total span `n*dt` (the circumference of the sampling torus).
    pub fn span(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Half-open span `[t0, t0 + n*dt)` as a pair.
    pub fn span_interval(&self) -> (f64, f64) {
        (self.t0, self.t0 + self.span())
    }
}

/// A complex signal sampled on a [`Grid`]. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(GaborError::InvalidGrid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(SampledSignal { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        SampledSignal {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Sample a real- or complex-valued function of time.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = grid.times().map(&mut f).collect();
        SampledSignal { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
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

    pub fn scaled(&self, c: Complex64) -> Self {
        SampledSignal {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        check_same_grid(self, rhs)?;
        Ok(SampledSignal {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        check_same_grid(self, rhs)?;
        Ok(SampledSignal {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&rhs.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn norm_sq(&self) -> f64 {
        self.grid.dt() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

pub(crate) fn check_same_grid(f: &SampledSignal, g: &SampledSignal) -> Result<()> {
    if f.grid() != g.grid() {
        return Err(GaborError::GridMismatch);
    }
    Ok(())
}

/// Discrete inner product `dt * sum conj(f_k) g_k`.
///
/// Conjugate-linear in the first argument, so that the Gabor coefficient
/// of `f` against an atom comes out as `<g_atom, f>` with the `e^{-i w t}`
/// factor on the window side.
pub fn inner_product(f: &SampledSignal, g: &SampledSignal) -> Result<Complex64> {
    check_same_grid(f, g)?;
    let acc: Complex64 = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(acc * f.grid().dt())
}

/// Discrete L2 norm `sqrt(Re <f,f>)`.
pub fn norm(f: &SampledSignal) -> f64 {
    f.norm_sq().max(0.0).sqrt()
}

/// Analytic window shapes plus explicit samples.
///
/// Compact-support kinds evaluate to zero outside `[start, start + len)`.
/// Normalization to unit discrete norm happens at sampling time, because
/// the discrete norm depends on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowSpec {
    Rectangular {
        #[serde(rename = "support_start")]
        start: f64,
        #[serde(rename = "support_length")]
        len: f64,
    },
    Hann {
        #[serde(rename = "support_start")]
        start: f64,
        #[serde(rename = "support_length")]
        len: f64,
    },
    /// `exp(-t^2 / (2 width^2))` centered at t = 0.
    Gaussian { width: f64 },
    /// Explicit samples; must match the target grid length.
    Custom {
        #[serde(with = "crate::io::complex_pairs")]
        samples: Vec<Complex64>,
    },
}

impl WindowSpec {
    /// Nominal support interval for compact kinds.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            WindowSpec::Rectangular { start, len } | WindowSpec::Hann { start, len } => {
                Some((*start, *start + *len))
            }
            _ => None,
        }
    }
}

/// Sample a window on a grid and normalize it to unit discrete norm.
///
/// Compact-support kinds must fit inside the grid span.
pub fn sample_window(spec: &WindowSpec, grid: Grid) -> Result<SampledSignal> {
    if let Some((lo, hi)) = spec.support() {
        let (glo, ghi) = grid.span_interval();
        let slack = 1e-12 * grid.span();
        if lo < glo - slack || hi > ghi + slack {
            return Err(GaborError::SupportOutsideGrid {
                start: lo,
                end: hi,
                lo: glo,
                hi: ghi,
            });
        }
        if !(match spec {
            WindowSpec::Rectangular { len, .. } | WindowSpec::Hann { len, .. } => *len > 0.0,
            _ => true,
        }) {
            return Err(GaborError::InvalidGrid(
                "window length must be positive".into(),
            ));
        }
    }
    let raw = match spec {
        WindowSpec::Rectangular { start, len } => SampledSignal::from_fn(grid, |t| {
            if t >= *start && t < *start + *len {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
        WindowSpec::Hann { start, len } => SampledSignal::from_fn(grid, |t| {
            if t >= *start && t <= *start + *len {
                let x = std::f64::consts::PI * (t - *start) / *len;
                Complex64::new(x.sin().powi(2), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
        WindowSpec::Gaussian { width } => {
            if width.is_nan() || *width <= 0.0 {
                return Err(GaborError::InvalidGrid(
                    "gaussian width must be positive".into(),
                ));
            }
            let w2 = 2.0 * width * width;
            SampledSignal::from_fn(grid, |t| Complex64::new((-t * t / w2).exp(), 0.0))
        }
        WindowSpec::Custom { samples } => SampledSignal::new(grid, samples.clone())?,
    };
    let nrm = raw.norm();
    if nrm <= 0.0 {
        return Err(GaborError::ZeroWindow);
    }
    Ok(raw.scaled(Complex64::new(1.0 / nrm, 0.0)))
}
