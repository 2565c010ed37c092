//! Interactive browser demo for window deformation, lattice rotation and
//! window tightening. The numerics live in [`ops`]; the `#[wasm_bindgen]`
//! layer only shuttles flat float buffers to the page.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Deformation explorer: holds the grid and Hermite basis so slider moves
/// only pay for one spectral transform.
#[wasm_bindgen]
pub struct DeformDemo {
    inner: ops::DeformContext,
}

#[wasm_bindgen]
impl DeformDemo {
    /// Balanced grid with `n` samples, `m` Hermite modes.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, m: usize) -> Result<DeformDemo, JsValue> {
        Ok(DeformDemo {
            inner: ops::DeformContext::new(n, m).map_err(js_err)?,
        })
    }

    /// Sample times of the grid.
    pub fn times(&self) -> Vec<f64> {
        self.inner.times()
    }

    /// Deform the named window (`gaussian`, `rectangular`, `hann`) by
    /// theta. Returns [re..., im..., abs...] concatenated; read the
    /// leakage of the last call from `leakage()`.
    pub fn deform(&mut self, kind: &str, theta: f64) -> Result<Vec<f64>, JsValue> {
        self.inner.deform(kind, theta).map_err(js_err)
    }

    /// Hermite truncation leakage of the last `deform` call.
    pub fn leakage(&self) -> f64 {
        self.inner.last_leakage
    }
}

/// Rotate a separable lattice: returns [omega, s] pairs of the base points
/// followed by the rotated points (2 * 2 * count floats).
#[wasm_bindgen]
pub fn rotate_lattice(
    tau: f64,
    t_step: f64,
    m_max: i64,
    n_max: i64,
    theta: f64,
) -> Result<Vec<f64>, JsValue> {
    ops::rotate_lattice(tau, t_step, m_max, n_max, theta).map_err(js_err)
}

/// Tightening explorer on the aligned reference grid: returns the
/// periodization before and after tightening plus the window magnitudes,
/// as [h_before..., h_after..., win_before..., win_after...] over the grid,
/// with the scalar summary available through `tighten_summary`.
#[wasm_bindgen]
pub fn tighten_curves(kind: &str, t_step: f64) -> Result<Vec<f64>, JsValue> {
    ops::tighten_curves(kind, t_step).map_err(js_err)
}

/// Summary of the same tightening: [a, b, norm_sq_before, norm_sq_after,
/// t_over_tau].
#[wasm_bindgen]
pub fn tighten_summary(kind: &str, t_step: f64) -> Result<Vec<f64>, JsValue> {
    ops::tighten_summary(kind, t_step).map_err(js_err)
}

/// Sample times of the tightening grid.
#[wasm_bindgen]
pub fn tighten_times() -> Vec<f64> {
    ops::tighten_grid().times().collect()
}
