//! WebAssembly bindings for the interactive demo in `www/`.
//!
//! Each operation has a plain Rust form returning `sepfront::error::Result`
//! and a `#[wasm_bindgen]` wrapper that flattens the result into a typed
//! array for JavaScript.

use sepfront::criterion::{
    entanglement_flag, frontier_y, linear_grid, log_grid, FrontierOptions, QScanConfig,
};
use sepfront::entropy::{s_conditional, QValue};
use sepfront::error::{Error, Result};
use sepfront::model::ModelParams;
use wasm_bindgen::prelude::*;

/// Cell codes in [`entangled_map`].
pub const SEPARABLE: u8 = 0;
pub const ENTANGLED: u8 = 1;
pub const OUTSIDE: u8 = 2;

/// Lighter scan settings so a full curve stays interactive in the browser.
fn demo_scan() -> QScanConfig {
    let mut q_grid = log_grid(0.1, 100.0, 40);
    q_grid.retain(|&q| q != 1.0);
    QScanConfig {
        q_grid,
        refine: false,
        include_infinity: true,
    }
}

fn demo_frontier() -> FrontierOptions {
    FrontierOptions {
        coarse_points: 32,
        y_tol: 1e-6,
    }
}

fn check_count(n: usize, min: usize) -> Result<()> {
    if n < min || n > 400 {
        return Err(Error::Config(format!(
            "point count {n} outside [{min}, 400]"
        )));
    }
    Ok(())
}

/// `(q, S_q(A|B))` on a log grid from `q_lo` to `q_hi`.
pub fn entropy_curve(
    x: f64,
    y: f64,
    t: f64,
    alpha: f64,
    q_lo: f64,
    q_hi: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    check_count(n, 2)?;
    if !(q_lo > 0.0 && q_hi > q_lo && q_hi.is_finite()) {
        return Err(Error::Config(format!(
            "need 0 < q_lo < q_hi, got {q_lo}, {q_hi}"
        )));
    }
    let p = ModelParams::new(x, y, t, alpha)?;
    log_grid(q_lo, q_hi, n)
        .into_iter()
        .map(|q| Ok((q, s_conditional(&p, QValue::new(q)?)?)))
        .collect()
}

/// `(x, y_f)` along `x` in `[0, 1]`; `y_f` is NaN where no entangled region exists.
pub fn frontier_curve(t: f64, alpha: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    check_count(n, 2)?;
    let (cfg, opts) = (demo_scan(), demo_frontier());
    linear_grid(0.0, 1.0, n)
        .into_iter()
        .map(|x| {
            let y = frontier_y(x, t, alpha, &cfg, &opts)?
                .point()
                .map_or(f64::NAN, |pt| pt.y_frontier);
            Ok((x, y))
        })
        .collect()
}

/// Row-major `n x n` map over cell centres, rows in `y`, columns in `x`.
pub fn entangled_map(t: f64, alpha: f64, n: usize) -> Result<Vec<u8>> {
    check_count(n, 1)?;
    ModelParams::new(0.0, 0.0, t, alpha)?;
    let cfg = demo_scan();
    let centre = |i: usize| (i as f64 + 0.5) / n as f64;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (centre(i), centre(j));
            let code = if x + y > 1.0 {
                OUTSIDE
            } else if entanglement_flag(&ModelParams::new(x, y, t, alpha)?, &cfg)? {
                ENTANGLED
            } else {
                SEPARABLE
            };
            cells.push(code);
        }
    }
    Ok(cells)
}

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn flatten(pairs: Vec<(f64, f64)>) -> Vec<f64> {
    pairs.into_iter().flat_map(|(a, b)| [a, b]).collect()
}

/// Interleaved `[q0, s0, q1, s1, ...]`.
#[wasm_bindgen(js_name = entropyCurve)]
pub fn entropy_curve_js(
    x: f64,
    y: f64,
    t: f64,
    alpha: f64,
    q_lo: f64,
    q_hi: f64,
    n: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    entropy_curve(x, y, t, alpha, q_lo, q_hi, n)
        .map(flatten)
        .map_err(js_err)
}

/// Interleaved `[x0, y0, x1, y1, ...]`.
#[wasm_bindgen(js_name = frontierCurve)]
pub fn frontier_curve_js(t: f64, alpha: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    frontier_curve(t, alpha, n).map(flatten).map_err(js_err)
}

#[wasm_bindgen(js_name = entangledMap)]
pub fn entangled_map_js(t: f64, alpha: f64, n: usize) -> std::result::Result<Vec<u8>, JsError> {
    entangled_map(t, alpha, n).map_err(js_err)
}
