//! Entanglement decisions and the separable-entangled frontier.
//!
//! A point is flagged entangled when `S_q(A|B) < 0` for some scanned `q`
//! (finite grid, the von Neumann point `q = 1`, or the dominance limit
//! `q → ∞`). The frontier in `y` is found by a coarse scan followed by
//! bisection on that flag.

use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{self, conditional_sign_at_infinity, InfinitySign, QValue};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// How `q` is searched for a negative conditional entropy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QScanConfig {
    pub q_grid: Vec<f64>,
    /// Golden-section refinement of the minimizing `q`.
    pub refine: bool,
    pub include_infinity: bool,
}

impl Default for QScanConfig {
    fn default() -> Self {
        Self {
            q_grid: log_grid(0.1, 100.0, 60),
            refine: true,
            include_infinity: true,
        }
    }
}

impl QScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q_grid.is_empty() {
            return Err(Error::Config("q grid is empty".into()));
        }
        if self
            .q_grid
            .iter()
            .any(|&q| !(q > 0.0) || !q.is_finite() || q == 1.0)
        {
            return Err(Error::Config(
                "q grid entries must be finite, positive and different from 1".into(),
            ));
        }
        if self.q_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("q grid must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Finite grid with `q = 1` merged in, ascending.
    fn finite_points(&self) -> Vec<QValue> {
        let mut points: Vec<QValue> = self.q_grid.iter().map(|&q| QValue::Finite(q)).collect();
        let at = self.q_grid.partition_point(|&q| q < 1.0);
        points.insert(at, QValue::One);
        points
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Entanglement {
    /// `S_q(A|B) < 0` at the witnessing `q`.
    Entangled(QValue),
    /// The entropic condition holds for every scanned `q`. This does not
    /// certify separability.
    SeparableByCriterion,
}

impl Entanglement {
    pub fn is_entangled(&self) -> bool {
        matches!(self, Entanglement::Entangled(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Frontier set by `q → ∞`.
    Linear,
    /// Frontier set at a finite minimizing `q`.
    Curved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub x: f64,
    pub t: f64,
    pub alpha: f64,
    pub y_frontier: f64,
    pub q_min: QValue,
    pub branch: Branch,
    /// More than one sign change was seen in the coarse `y` scan.
    pub multi_bracket: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FrontierOutcome {
    Boundary(FrontierPoint),
    NoEntangledRegion,
}

impl FrontierOutcome {
    pub fn point(&self) -> Option<&FrontierPoint> {
        match self {
            FrontierOutcome::Boundary(p) => Some(p),
            FrontierOutcome::NoEntangledRegion => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierOptions {
    /// Points in the coarse `y` scan over `(0, 1-x]`.
    pub coarse_points: usize,
    /// Bisection tolerance in `y`.
    pub y_tol: f64,
}

impl Default for FrontierOptions {
    fn default() -> Self {
        Self {
            coarse_points: 64,
            y_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CriticalTemperature {
    Critical(f64),
    NeverEntangled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalOptions {
    /// Upper end of the initial coarse scan; doubled while still entangled.
    pub t_max: f64,
    pub coarse_points: usize,
    pub t_tol: f64,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        Self {
            t_max: 5.0,
            coarse_points: 200,
            t_tol: 1e-6,
        }
    }
}

/// `S_q(A|B)` over the whole scan at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QScan {
    /// `(q, S_q(A|B))` for the grid with `q = 1` merged in, ascending.
    pub values: Vec<(f64, f64)>,
    pub infinity: Option<InfinitySign>,
    /// Index into `values` minimizing the conditional Rényi entropy
    /// [`renyi_conditional`], which has the sign of `S_q(A|B)` but no
    /// `1/(q-1)` decay, so the minimum marks the most restrictive `q`.
    pub argmin: usize,
}

impl QScan {
    fn finite_witness(&self) -> bool {
        self.values.iter().any(|&(q, s)| is_negative_value(q, s))
    }

    /// `S_q` nonincreasing over the last decade of the grid (within 1e-9).
    fn monotone_tail(&self) -> bool {
        let q_max = self.values.last().map(|v| v.0).unwrap_or(0.0);
        let tail: Vec<f64> = self
            .values
            .iter()
            .filter(|v| v.0 >= q_max / 10.0)
            .map(|v| v.1)
            .collect();
        tail.windows(2).all(|w| w[1] <= w[0] + 1e-9)
    }

    /// Whether the scan attributes the infimum of `S_q(A|B)` to `q → ∞`.
    pub fn infimum_at_infinity(&self) -> bool {
        self.infinity == Some(InfinitySign::Negative)
            && (!self.finite_witness() || self.monotone_tail())
    }

    /// Grid-level minimizing `q`: `∞` when [`Self::infimum_at_infinity`],
    /// else the smallest scanned value.
    pub fn q_min(&self) -> QValue {
        if self.infimum_at_infinity() {
            return QValue::Infinity;
        }
        match self.values[self.argmin].0 {
            1.0 => QValue::One,
            q => QValue::Finite(q),
        }
    }
}

/// Sign test on a computed `S_q(A|B)`, with the same noise floor as
/// [`entropy::conditional_is_negative`].
fn is_negative_value(q: f64, s: f64) -> bool {
    // |1 - R| = |S·(q-1)|, or |S| itself at q = 1
    let scale = if q == 1.0 { 1.0 } else { (q - 1.0).abs() };
    s < 0.0 && (s * scale).abs() > entropy::NEGATIVITY_NOISE
}

fn s_at(params: &ModelParams, q: f64) -> Result<f64> {
    let qv = if q == 1.0 {
        QValue::One
    } else {
        QValue::Finite(q)
    };
    entropy::s_conditional(params, qv)
}

/// Evaluates `S_q(A|B)` on the configured grid plus `q = 1` and the `∞` sign.
pub fn scan_q(params: &ModelParams, cfg: &QScanConfig) -> Result<QScan> {
    cfg.validate()?;
    let values = cfg
        .finite_points()
        .into_iter()
        .map(|q| {
            let qf = q.as_f64();
            entropy::s_conditional(params, q).map(|s| (qf, s))
        })
        .collect::<Result<Vec<_>>>()?;
    let argmin = values
        .iter()
        .map(|&(q, s)| renyi_conditional(q, s))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let infinity = cfg
        .include_infinity
        .then(|| conditional_sign_at_infinity(params));
    Ok(QScan {
        values,
        infinity,
        argmin,
    })
}

/// Conditional Rényi entropy `ln(Tr ρ^q / Tr ρ_B^q) / (1 - q)` recovered
/// from the Tsallis value `s = S_q(A|B)`; equal to `s` at `q = 1`.
pub fn renyi_conditional(q: f64, s: f64) -> f64 {
    if q == 1.0 {
        s
    } else {
        (1.0 - (q - 1.0) * s).ln() / (1.0 - q)
    }
}

/// Golden-section minimum of `S_q(A|B)` on `[lo, hi]`.
pub fn refine_q_min(params: &ModelParams, lo: f64, hi: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = s_at(params, c)?;
    let mut fd = s_at(params, d)?;
    for _ in 0..60 {
        if (b - a).abs() <= 1e-7 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = s_at(params, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = s_at(params, d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Entropic entanglement test returning the first witnessing `q` (ascending,
/// with `q = ∞` last).
pub fn is_entangled(params: &ModelParams, cfg: &QScanConfig) -> Result<Entanglement> {
    cfg.validate()?;
    for q in cfg.finite_points() {
        if entropy::conditional_is_negative(params, q)? {
            return Ok(Entanglement::Entangled(q));
        }
    }
    if cfg.include_infinity && conditional_sign_at_infinity(params) == InfinitySign::Negative {
        return Ok(Entanglement::Entangled(QValue::Infinity));
    }
    Ok(Entanglement::SeparableByCriterion)
}

/// Same decision as [`is_entangled`], checking the cheap `q → ∞` test first
/// and stopping at any witness.
pub fn entanglement_flag(params: &ModelParams, cfg: &QScanConfig) -> Result<bool> {
    if cfg.include_infinity && conditional_sign_at_infinity(params) == InfinitySign::Negative {
        return Ok(true);
    }
    // large q first: near the frontier the witness usually sits there
    for q in cfg.finite_points().into_iter().rev() {
        if entropy::conditional_is_negative(params, q)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Boundary value `y*(x, T)` of the `q → ∞` region: the root of `λ_singlet = p_0`.
pub fn y_star(x: f64, t: f64) -> f64 {
    let u = if t == 0.0 { 0.0 } else { (-1.0 / t).exp() };
    (1.0 - x) / (3.0 - 2.0 * u * (2.0 + u - 2.0 * u * u))
}

/// Boundary value `x*(y, T, α)` of the `q → ∞` region: the root of `λ_singlet = p_2`.
pub fn x_star(y: f64, t: f64, alpha: f64) -> f64 {
    let (u, v, one_minus_u2) = if t == 0.0 {
        (0.0, 0.0, 1.0)
    } else {
        (
            (-1.0 / t).exp(),
            (-2.0 * alpha / t).exp(),
            -(-2.0 / t).exp_m1(),
        )
    };
    let coef = 2.0 * one_minus_u2 * (2.0 - 3.0 * u + u.powi(3) - u.powi(4)) - 1.0;
    (coef * y + 1.0) / (5.0 - 4.0 * v)
}

/// The `y` at which `x = x*(y, T, α)`, if the coefficient of `y` is nonzero.
pub fn y_on_x_star(x: f64, t: f64, alpha: f64) -> Option<f64> {
    let slope = x_star(1.0, t, alpha) - x_star(0.0, t, alpha);
    if slope == 0.0 {
        return None;
    }
    Some((x - x_star(0.0, t, alpha)) / slope)
}

fn params_at(x: f64, y: f64, t: f64, alpha: f64) -> Result<ModelParams> {
    // clamp rounding in y = (1-x)·k/n so that x + y ≤ 1 holds exactly
    ModelParams::new(x, y.min(1.0 - x).max(0.0), t, alpha)
}

/// Labels the branch at an entangled point just above the frontier.
fn classify(params: &ModelParams, cfg: &QScanConfig) -> Result<(QValue, Branch)> {
    let scan = scan_q(params, cfg)?;
    if scan.infimum_at_infinity() {
        return Ok((QValue::Infinity, Branch::Linear));
    }
    let i = scan.argmin;
    let q_grid = scan.values[i].0;
    let q_min = if cfg.refine && i > 0 && i + 1 < scan.values.len() {
        refine_q_min(params, scan.values[i - 1].0, scan.values[i + 1].0)?.0
    } else {
        q_grid
    };
    let q_min = if q_min == 1.0 {
        QValue::One
    } else {
        QValue::Finite(q_min)
    };
    Ok((q_min, Branch::Curved))
}

/// Solves for the separable-entangled boundary in `y` at fixed `(x, T, α)`.
pub fn frontier_y(
    x: f64,
    t: f64,
    alpha: f64,
    cfg: &QScanConfig,
    opts: &FrontierOptions,
) -> Result<FrontierOutcome> {
    cfg.validate()?;
    params_at(x, 0.0, t, alpha)?;
    if opts.coarse_points == 0 || !(opts.y_tol > 0.0) {
        return Err(Error::Config(
            "frontier scan needs coarse_points > 0 and y_tol > 0".into(),
        ));
    }
    let span = 1.0 - x;
    if span <= 0.0 {
        return Ok(FrontierOutcome::NoEntangledRegion);
    }
    let n = opts.coarse_points;
    let ys: Vec<f64> = (1..=n)
        .map(|i| {
            if i == n {
                span
            } else {
                span * i as f64 / n as f64
            }
        })
        .collect();
    let flags = ys
        .iter()
        .map(|&y| entanglement_flag(&params_at(x, y, t, alpha)?, cfg))
        .collect::<Result<Vec<bool>>>()?;

    let Some(first) = flags.iter().position(|&f| f) else {
        return Ok(FrontierOutcome::NoEntangledRegion);
    };
    // y = 0 is a diagonal mixture and never entangled
    let changes = std::iter::once(false)
        .chain(flags.iter().copied())
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| w[0] != w[1])
        .count();

    let mut lo = if first == 0 { 0.0 } else { ys[first - 1] };
    let mut hi = ys[first];
    while hi - lo > opts.y_tol {
        let mid = 0.5 * (lo + hi);
        if entanglement_flag(&params_at(x, mid, t, alpha)?, cfg)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (q_min, branch) = classify(&params_at(x, hi, t, alpha)?, cfg)?;
    Ok(FrontierOutcome::Boundary(FrontierPoint {
        x,
        t,
        alpha,
        y_frontier: 0.5 * (lo + hi),
        q_min,
        branch,
        multi_bracket: changes > 1,
    }))
}

/// Whether any entangled `y` exists at `(x, T, α)`. The entangled set always
/// reaches the edge `y = 1 - x`, so that single point decides.
pub fn region_exists(x: f64, t: f64, alpha: f64, cfg: &QScanConfig) -> Result<bool> {
    if x >= 1.0 {
        return Ok(false);
    }
    entanglement_flag(&params_at(x, 1.0 - x, t, alpha)?, cfg)
}

/// Largest `T` at which an entangled region remains at `(x, α)`.
pub fn t_critical(
    x: f64,
    alpha: f64,
    cfg: &QScanConfig,
    opts: &CriticalOptions,
) -> Result<CriticalTemperature> {
    cfg.validate()?;
    if opts.coarse_points == 0 || !(opts.t_max > 0.0) || !(opts.t_tol > 0.0) {
        return Err(Error::Config(
            "critical-temperature scan needs positive t_max, coarse_points and t_tol".into(),
        ));
    }
    let mut t_max = opts.t_max;
    loop {
        if !region_exists(x, t_max, alpha, cfg)? {
            break;
        }
        t_max *= 2.0;
        if t_max > 1e4 {
            return Err(Error::Config(
                "entangled region persists beyond T = 1e4".into(),
            ));
        }
    }
    let n = opts.coarse_points;
    let ts = linear_grid(0.0, t_max, n + 1);
    let flags = ts
        .par_iter()
        .map(|&t| region_exists(x, t, alpha, cfg))
        .collect::<Result<Vec<bool>>>()?;
    let Some(last) = flags.iter().rposition(|&f| f) else {
        return Ok(CriticalTemperature::NeverEntangled);
    };
    let (mut lo, mut hi) = (ts[last], ts[last + 1]);
    while hi - lo > opts.t_tol {
        let mid = 0.5 * (lo + hi);
        if region_exists(x, mid, alpha, cfg)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalTemperature::Critical(0.5 * (lo + hi)))
}

/// `x` at which the frontier switches between its linear and curved pieces
/// at fixed `(T, α)`, searched on `x ∈ [0, 0.95]`.
pub fn vertex_locus(
    t: f64,
    alpha: f64,
    cfg: &QScanConfig,
    opts: &FrontierOptions,
) -> Result<Option<f64>> {
    let xs = linear_grid(0.0, 0.95, 20);
    let branches = xs
        .iter()
        .map(|&x| {
            Ok(frontier_y(x, t, alpha, cfg, opts)?
                .point()
                .map(|p| p.branch))
        })
        .collect::<Result<Vec<_>>>()?;
    vertex_on_row(&xs, &branches, t, alpha, cfg, opts)
}

/// Refines the first branch switch along an `x` row of already solved
/// frontier labels.
pub fn vertex_on_row(
    xs: &[f64],
    branches: &[Option<Branch>],
    t: f64,
    alpha: f64,
    cfg: &QScanConfig,
    opts: &FrontierOptions,
) -> Result<Option<f64>> {
    for i in 0..xs.len().saturating_sub(1) {
        let (Some(b0), Some(b1)) = (branches[i], branches[i + 1]) else {
            continue;
        };
        if b0 == b1 {
            continue;
        }
        let (mut lo, mut hi) = (xs[i], xs[i + 1]);
        while hi - lo > 1e-5 {
            let mid = 0.5 * (lo + hi);
            match frontier_y(mid, t, alpha, cfg, opts)?
                .point()
                .map(|p| p.branch)
            {
                Some(b) if b == b0 => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        return Ok(Some(0.5 * (lo + hi)));
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepNode {
    pub x: f64,
    pub t: f64,
    pub alpha: f64,
    pub outcome: std::result::Result<FrontierOutcome, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Row-major over `(T, x)`: all `x` for the first `T`, then the next.
    pub nodes: Vec<SweepNode>,
    /// `(T, vertex x)` for every distinct `T`.
    pub vertices: Vec<(f64, Option<f64>)>,
}

/// One frontier solve per `(x, T)` node plus the vertex locus per `T`,
/// located between neighbouring `x` nodes of that row.
///
/// Nodes are evaluated in parallel on the current rayon pool; output order
/// follows the input grids. Per-node failures are recorded, not propagated.
pub fn sweep_surface(
    xs: &[f64],
    ts: &[f64],
    alpha: f64,
    cfg: &QScanConfig,
    opts: &FrontierOptions,
    with_vertices: bool,
) -> Result<Sweep> {
    cfg.validate()?;
    let grid: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| xs.iter().map(move |&x| (x, t)))
        .collect();
    let nodes: Vec<SweepNode> = grid
        .par_iter()
        .map(|&(x, t)| SweepNode {
            x,
            t,
            alpha,
            outcome: frontier_y(x, t, alpha, cfg, opts),
        })
        .collect();
    let vertices = if with_vertices {
        ts.iter()
            .enumerate()
            .map(|(k, &t)| {
                let row: &[SweepNode] = &nodes[k * xs.len()..(k + 1) * xs.len()];
                let branches: Vec<Option<Branch>> = row
                    .iter()
                    .map(|n| {
                        n.outcome
                            .as_ref()
                            .ok()
                            .and_then(|o| o.point().map(|p| p.branch))
                    })
                    .collect();
                (
                    t,
                    vertex_on_row(xs, &branches, t, alpha, cfg, opts)
                        .ok()
                        .flatten(),
                )
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(Sweep { nodes, vertices })
}

/// Number of entangled cell centers `((i+½)/n, (j+½)/n)` with `x + y ≤ 1`.
pub fn entangled_area(n: usize, t: f64, alpha: f64, cfg: &QScanConfig) -> Result<usize> {
    let cells: Vec<(f64, f64)> = (0..n)
        .flat_map(|i| {
            (0..n).map(move |j| ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64))
        })
        .filter(|&(x, y)| x + y <= 1.0)
        .collect();
    let flags = cells
        .par_iter()
        .map(|&(x, y)| entanglement_flag(&ModelParams::new(x, y, t, alpha)?, cfg))
        .collect::<Result<Vec<bool>>>()?;
    Ok(flags.into_iter().filter(|&f| f).count())
}
