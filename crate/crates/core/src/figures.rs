//! Plot-ready data for the standard figure presets.
//!
//! Each preset fixes its parameter grid so that the emitted table is
//! reproducible; plotting is left to external tools.

use std::fmt;
use std::str::FromStr;

use crate::criterion::{
    linear_grid, log_grid, sweep_surface, Branch, FrontierOptions, QScanConfig,
};
use crate::entropy::{s_conditional, QValue};
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `S_q(A|B)` over `(x, y)` at `α = 1`, `T = 0.1` for several `q`.
    Fig1,
    /// `S_q(A|B)` over `(x, y)` at `α = 1`, `q = 5` for several `T`.
    Fig2,
    /// The zero line of `S_q(A|B)` in `(y, q)` at `T = 0.5`, `α = 1`.
    Fig3,
    /// Frontiers in `(x, y)` for several `T` and `α`.
    Fig4,
    /// Vertex locus of the frontiers in preset `4`.
    Fig4Vertices,
    /// Frontier `y(T)` at fixed `x` for `α = 0.1` and `α = 1`.
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig4Vertices,
        Preset::Fig5,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Preset::Fig1 => "1",
            Preset::Fig2 => "2",
            Preset::Fig3 => "3",
            Preset::Fig4 => "4",
            Preset::Fig4Vertices => "4-vertices",
            Preset::Fig5 => "5",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown figure preset {s:?} (expected 1, 2, 3, 4, 4-vertices or 5)"
                ))
            })
    }
}

/// A rectangular numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_finite())
    }
}

pub const FIG1_QS: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 50.0];
pub const FIG2_TS: [f64; 4] = [0.0, 0.1, 0.5, 1.0];
pub const FIG3_XS: [f64; 5] = [0.0, 0.2, 0.4, 0.6, 0.8];
pub const FIG4_TS: [f64; 5] = [0.0, 0.2, 0.5, 0.8, 1.1];
pub const FIG4_ALPHAS: [f64; 3] = [0.1, 1.0, 5.0];
pub const FIG5_XS: [f64; 3] = [0.0, 0.3, 0.6];
pub const FIG5_ALPHAS: [f64; 2] = [0.1, 1.0];

/// Points of the simplex `x + y ≤ 1` on a square grid of spacing `1/steps`.
fn simplex_grid(steps: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for i in 0..=steps {
        for j in 0..=(steps - i) {
            pts.push((i as f64 / steps as f64, j as f64 / steps as f64));
        }
    }
    pts
}

fn qvalue(q: f64) -> QValue {
    if q == 1.0 {
        QValue::One
    } else {
        QValue::Finite(q)
    }
}

fn surface(table: &mut FigureTable, lead: f64, q: f64, t: f64) -> Result<()> {
    for (x, y) in simplex_grid(20) {
        let s = s_conditional(&ModelParams::new(x, y, t, 1.0)?, qvalue(q))?;
        table.rows.push(vec![lead, x, y, s]);
    }
    Ok(())
}

fn fig1() -> Result<FigureTable> {
    let mut table = FigureTable::new(&["q", "x", "y", "s_conditional"]);
    for q in FIG1_QS {
        surface(&mut table, q, q, 0.1)?;
    }
    Ok(table)
}

fn fig2() -> Result<FigureTable> {
    let mut table = FigureTable::new(&["t", "x", "y", "s_conditional"]);
    for t in FIG2_TS {
        surface(&mut table, t, 5.0, t)?;
    }
    Ok(table)
}

/// Smallest `y ∈ (0, 1-x]` with `S_q(A|B) = 0`, by scan and bisection.
pub fn zero_line_y(x: f64, q: f64, t: f64, alpha: f64) -> Result<Option<f64>> {
    let s = |y: f64| -> Result<f64> {
        s_conditional(&ModelParams::new(x, y.min(1.0 - x), t, alpha)?, qvalue(q))
    };
    let ys = linear_grid(0.0, 1.0 - x, 51);
    for w in ys.windows(2) {
        if s(w[1])? < 0.0 {
            let (mut lo, mut hi) = (w[0], w[1]);
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if s(mid)? < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
    }
    Ok(None)
}

fn fig3() -> Result<FigureTable> {
    let mut table = FigureTable::new(&["x", "q", "y_zero"]);
    let mut qs = log_grid(0.1, 100.0, 40);
    let at = qs.partition_point(|&q| q < 1.0);
    qs.insert(at, 1.0);
    for x in FIG3_XS {
        for &q in &qs {
            if let Some(y) = zero_line_y(x, q, 0.5, 1.0)? {
                table.rows.push(vec![x, q, y]);
            }
        }
    }
    Ok(table)
}

fn branch_code(b: Branch) -> f64 {
    match b {
        Branch::Linear => 0.0,
        Branch::Curved => 1.0,
    }
}

fn fig4(vertices: bool) -> Result<FigureTable> {
    let cfg = QScanConfig::default();
    let opts = FrontierOptions::default();
    let xs = linear_grid(0.0, 0.95, 20);
    let mut table = if vertices {
        FigureTable::new(&["alpha", "t", "x_vertex"])
    } else {
        FigureTable::new(&["alpha", "t", "x", "y_frontier", "branch"])
    };
    for alpha in FIG4_ALPHAS {
        let sweep = sweep_surface(&xs, &FIG4_TS, alpha, &cfg, &opts, vertices)?;
        if vertices {
            for (t, v) in sweep.vertices {
                if let Some(xv) = v {
                    table.rows.push(vec![alpha, t, xv]);
                }
            }
            continue;
        }
        for node in sweep.nodes {
            if let Some(p) = node.outcome?.point() {
                table.rows.push(vec![
                    alpha,
                    node.t,
                    node.x,
                    p.y_frontier,
                    branch_code(p.branch),
                ]);
            }
        }
    }
    Ok(table)
}

fn fig5() -> Result<FigureTable> {
    let cfg = QScanConfig::default();
    let opts = FrontierOptions::default();
    let ts = linear_grid(0.0, 1.6, 41);
    let mut table = FigureTable::new(&["alpha", "x", "t", "y_frontier"]);
    for alpha in FIG5_ALPHAS {
        for x in FIG5_XS {
            let sweep = sweep_surface(&[x], &ts, alpha, &cfg, &opts, false)?;
            for node in sweep.nodes {
                if let Some(p) = node.outcome?.point() {
                    table.rows.push(vec![alpha, x, node.t, p.y_frontier]);
                }
            }
        }
    }
    Ok(table)
}

/// Computes the table for one preset.
pub fn generate(preset: Preset) -> Result<FigureTable> {
    match preset {
        Preset::Fig1 => fig1(),
        Preset::Fig2 => fig2(),
        Preset::Fig3 => fig3(),
        Preset::Fig4 => fig4(false),
        Preset::Fig4Vertices => fig4(true),
        Preset::Fig5 => fig5(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_ids_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.id().parse::<Preset>().unwrap(), p);
        }
        assert!("6".parse::<Preset>().is_err());
    }

    #[test]
    fn simplex_grid_stays_physical() {
        let pts = simplex_grid(20);
        assert_eq!(pts.len(), 21 * 22 / 2);
        assert!(pts.iter().all(|&(x, y)| x + y <= 1.0 + 1e-15));
    }

    #[test]
    fn surfaces_are_finite() {
        for p in [Preset::Fig1, Preset::Fig2] {
            let t = generate(p).unwrap();
            assert!(t.all_finite());
            assert_eq!(t.rows.len(), 231 * if p == Preset::Fig1 { 5 } else { 4 });
        }
    }

    #[test]
    fn zero_line_at_large_q_approaches_the_limit() {
        // at x = 0 the zero line tends to y*(0, 0.5) as q grows
        let y = zero_line_y(0.0, 200.0, 0.5, 1.0).unwrap().unwrap();
        let limit = crate::criterion::y_star(0.0, 0.5);
        assert!(y > limit - 1e-3 && y < limit + 0.02, "{y} vs {limit}");
    }
}
