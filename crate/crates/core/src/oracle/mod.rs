//! Brute-force ground truth on a truncated Fock space.
//!
//! The joint state is materialized over `|n,m⟩`, `n, m < N`, and every
//! quantity is recomputed from matrix entries: partial traces by index
//! summation, `Tr ρ^q` from the eigenvalues of the 1×1 and 2×2 blocks, and
//! the Peres test from the spectrum of the partial transpose.

pub mod jacobi;

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{JointSpectrum, MarginalSpectrum, ModelParams};

pub use jacobi::{symmetric_eigenvalues, SymMatrix, JACOBI_MAX_SWEEPS, JACOBI_TOL};

/// Truncation used when nothing else is requested.
pub const DEFAULT_LEVELS: usize = 30;

/// Largest truncation the level search will consider.
pub const MAX_LEVELS: usize = 4000;

/// Eigenvalues in `[-CLAMP, 0)` are rounding and are set to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Default negativity tolerance for the partial-transpose flag.
pub const DEFAULT_PPT_TOL: f64 = 1e-10;

/// One of the two oscillators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Party {
    A,
    B,
}

/// A symmetric off-diagonal entry `(row, col)` with `row < col`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffDiagonal {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// The joint state cut at `N` levels per oscillator.
///
/// Stored as its diagonal plus the off-diagonal list; for the mixed-state
/// family the only couplings are `|n,m⟩ ↔ |m,n⟩`, so this holds the full
/// `N² × N²` matrix without the quadratic memory.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    n_levels: usize,
    diag: Vec<f64>,
    off: Vec<OffDiagonal>,
    tail_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    pub entangled_flag: bool,
    /// Trace of the partially transposed matrix.
    pub trace: f64,
}

impl TruncatedState {
    /// Product-basis index of `|n,m⟩`.
    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.n_levels + m
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn dim(&self) -> usize {
        self.n_levels * self.n_levels
    }

    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[OffDiagonal] {
        &self.off
    }

    /// Entry `(i, j)` of the full matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let (r, c) = if i < j { (i, j) } else { (j, i) };
        self.off
            .iter()
            .filter(|o| o.row == r && o.col == c)
            .map(|o| o.value)
            .sum()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Dense copy; only sensible for small `N`.
    pub fn to_dense(&self) -> SymMatrix {
        let mut m = SymMatrix::from_diagonal(&self.diag);
        for o in &self.off {
            m.add(o.row, o.col, o.value);
            m.add(o.col, o.row, o.value);
        }
        m
    }

    /// Diagonal product state `ρ_A ⊗ ρ_B` from two level distributions of equal length.
    pub fn product(rho_a: &[f64], rho_b: &[f64]) -> Result<Self> {
        if rho_a.len() != rho_b.len() || rho_a.len() < 2 {
            return Err(Error::Config(
                "product fixture needs two distributions of equal length ≥ 2".into(),
            ));
        }
        let n = rho_a.len();
        let mut diag = vec![0.0; n * n];
        for (i, &pa) in rho_a.iter().enumerate() {
            for (j, &pb) in rho_b.iter().enumerate() {
                diag[i * n + j] = pa * pb;
            }
        }
        Ok(Self {
            n_levels: n,
            diag,
            off: Vec::new(),
            tail_weight: 0.0,
        })
    }

    /// Writes every nonzero entry as `row col value`, one per line.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut entries: Vec<(usize, usize, f64)> = self
            .diag
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, i, v))
            .collect();
        for o in &self.off {
            entries.push((o.row, o.col, o.value));
            entries.push((o.col, o.row, o.value));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        for (r, c, v) in entries {
            writeln!(out, "{r} {c} {v}")?;
        }
        Ok(())
    }
}

/// Smallest `N ≥ 2` whose discarded probability is at most `tol`.
pub fn levels_for_tol(params: &ModelParams, tol: f64) -> Result<usize> {
    let js = JointSpectrum::new(params);
    (2..=MAX_LEVELS)
        .find(|&n| js.tail_weight(n) <= tol)
        .ok_or(Error::TruncationTooSmall {
            n_levels: MAX_LEVELS,
            tail: js.tail_weight(MAX_LEVELS),
            tol,
        })
}

/// Smallest `N ≥ 2` such that the eigenvalues left out of both the joint and
/// the marginal contribute at most `tol` to `Σ λ^q`.
pub fn levels_for_q_tail(params: &ModelParams, q: f64, tol: f64) -> Result<usize> {
    let js = JointSpectrum::new(params);
    let ms = MarginalSpectrum::new(params);
    let t = params.t();
    let pow = |b: f64| if b <= 0.0 { 0.0 } else { b.powf(q) };
    let (vq, one_minus_vq) = if t == 0.0 {
        (0.0, 1.0)
    } else {
        (
            (-2.0 * params.alpha() * q / t).exp(),
            -(-2.0 * params.alpha() * q / t).exp_m1(),
        )
    };
    let (wq, one_minus_wq) = if t == 0.0 {
        (0.0, 1.0)
    } else {
        ((-q / t).exp(), -(-q / t).exp_m1())
    };
    let diag_q = pow(js.diag_family.amplitude);
    let anti_q = pow(js.antisym_family.amplitude);
    let marg_x = pow(ms.x_family().amplitude);
    let marg_y = pow(2.0 * ms.anti_scale());
    let two_q = 2f64.powf(q);
    let geo = |amp: f64, r: f64, k: usize, denom: f64| {
        if amp == 0.0 {
            0.0
        } else {
            amp * crate::model::pow_usize(r, k) / denom
        }
    };

    // Also keep enough levels that the marginal truncation error (≲ tail weight)
    // stays far below tol.
    for n in 2..=MAX_LEVELS {
        let joint_tail = geo(diag_q, vq, n - 2, one_minus_vq)
            + geo(anti_q, wq, n - 1, one_minus_wq * one_minus_wq);
        let marg_tail =
            two_q * (geo(marg_x, vq, n - 2, one_minus_vq) + geo(marg_y, wq, n - 1, one_minus_wq));
        if joint_tail <= tol && marg_tail <= tol && js.tail_weight(n) <= tol {
            return Ok(n);
        }
    }
    Err(Error::TruncationTooSmall {
        n_levels: MAX_LEVELS,
        tail: js.tail_weight(MAX_LEVELS),
        tol,
    })
}

/// Builds the truncated joint state entry by entry.
pub fn materialize(params: &ModelParams, n_levels: usize, tol: f64) -> Result<TruncatedState> {
    if n_levels < 2 {
        return Err(Error::Config(format!(
            "need at least 2 levels, got {n_levels}"
        )));
    }
    let js = JointSpectrum::new(params);
    let tail = js.tail_weight(n_levels);
    if tail > tol {
        return Err(Error::TruncationTooSmall {
            n_levels,
            tail,
            tol,
        });
    }
    let nl = n_levels;
    let idx = |n: usize, m: usize| n * nl + m;
    let mut diag = vec![0.0; nl * nl];
    let mut off = Vec::new();

    let l = js.lambda_uniform;
    for (n, m) in [(0, 0), (1, 1), (1, 0), (0, 1)] {
        diag[idx(n, m)] += l;
    }
    for n in 2..nl {
        diag[idx(n, n)] += js.diag_term(n);
    }
    // each |n,m⁻⟩⟨n,m⁻| = ½(|n,m⟩⟨n,m| + |m,n⟩⟨m,n| - |n,m⟩⟨m,n| - |m,n⟩⟨n,m|)
    for n in 1..nl {
        for m in 0..n {
            let w = js.antisym_term(n, m);
            if w == 0.0 {
                continue;
            }
            diag[idx(n, m)] += 0.5 * w;
            diag[idx(m, n)] += 0.5 * w;
            off.push(OffDiagonal {
                row: idx(m, n),
                col: idx(n, m),
                value: -0.5 * w,
            });
        }
    }
    Ok(TruncatedState {
        n_levels: nl,
        diag,
        off,
        tail_weight: tail,
    })
}

/// Reduced state of the party that is kept when `over` is traced out.
pub fn partial_trace(state: &TruncatedState, over: Party) -> SymMatrix {
    let n = state.n_levels;
    let mut reduced = SymMatrix::zeros(n);
    // (a, b) are the (A, B) labels of a product index
    let split = |i: usize| (i / n, i % n);
    let mut accumulate = |i: usize, j: usize, value: f64| {
        let ((ai, bi), (aj, bj)) = (split(i), split(j));
        match over {
            Party::B if bi == bj => reduced.add(ai, aj, value),
            Party::A if ai == aj => reduced.add(bi, bj, value),
            _ => {}
        }
    };
    for (i, &d) in state.diag.iter().enumerate() {
        if d != 0.0 {
            accumulate(i, i, d);
        }
    }
    for o in &state.off {
        accumulate(o.row, o.col, o.value);
        accumulate(o.col, o.row, o.value);
    }
    reduced
}

fn clamp_eigenvalue(lambda: f64) -> Result<f64> {
    if lambda < -NEGATIVE_CLAMP {
        Err(Error::NegativeEigenvalue(lambda))
    } else {
        Ok(lambda.max(0.0))
    }
}

/// All eigenvalues of the state, from its 1×1 and 2×2 blocks.
pub fn eigenvalues(state: &TruncatedState) -> Result<Vec<f64>> {
    let mut paired = vec![false; state.dim()];
    let mut eig = Vec::with_capacity(state.dim());
    for o in &state.off {
        if paired[o.row] || paired[o.col] {
            return Err(Error::Config(
                "index coupled to more than one partner; not block 2×2".into(),
            ));
        }
        paired[o.row] = true;
        paired[o.col] = true;
        let (lo, hi) = jacobi::eigenvalues_2x2(state.diag[o.row], o.value, state.diag[o.col]);
        eig.push(clamp_eigenvalue(lo)?);
        eig.push(clamp_eigenvalue(hi)?);
    }
    for (i, &d) in state.diag.iter().enumerate() {
        if !paired[i] {
            eig.push(clamp_eigenvalue(d)?);
        }
    }
    Ok(eig)
}

fn power_sum(eig: &[f64], q: f64) -> f64 {
    eig.iter().filter(|&&l| l > 0.0).map(|&l| l.powf(q)).sum()
}

/// `Σ λ_i^q` over the eigenvalues of the truncated joint state.
pub fn eigen_trace_q(state: &TruncatedState, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::domain(format!("q must be positive, got {q}")));
    }
    Ok(power_sum(&eigenvalues(state)?, q))
}

/// Eigenvalues of the reduced state of the kept party.
pub fn marginal_eigenvalues(state: &TruncatedState, over: Party) -> Result<Vec<f64>> {
    let reduced = partial_trace(state, over);
    let eig = if reduced.is_diagonal() {
        reduced.diagonal()
    } else {
        symmetric_eigenvalues(&reduced, JACOBI_TOL, JACOBI_MAX_SWEEPS)?
    };
    eig.into_iter().map(clamp_eigenvalue).collect()
}

/// `Σ p_i^q` over the marginal eigenvalues.
pub fn marginal_trace_q(state: &TruncatedState, over: Party, q: f64) -> Result<f64> {
    Ok(power_sum(&marginal_eigenvalues(state, over)?, q))
}

fn von_neumann(eig: &[f64]) -> f64 {
    eig.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum()
}

/// `S_q(A|B)` computed from the matrix, with `B` the conditioning party.
/// `q = 1` gives the von Neumann difference.
pub fn conditional_entropy(state: &TruncatedState, q: f64) -> Result<f64> {
    let joint = eigenvalues(state)?;
    let marg = marginal_eigenvalues(state, Party::A)?;
    if q == 1.0 {
        return Ok(von_neumann(&joint) - von_neumann(&marg));
    }
    Ok((1.0 - power_sum(&joint, q) / power_sum(&marg, q)) / (q - 1.0))
}

/// `S_q` of the reduced state kept after tracing out `over`.
pub fn marginal_entropy(state: &TruncatedState, over: Party, q: f64) -> Result<f64> {
    let marg = marginal_eigenvalues(state, over)?;
    if q == 1.0 {
        return Ok(von_neumann(&marg));
    }
    Ok((1.0 - power_sum(&marg, q)) / (q - 1.0))
}

/// Partial transpose on `over` as (diagonal, off-diagonal list).
pub fn partial_transpose(state: &TruncatedState, over: Party) -> (Vec<f64>, Vec<OffDiagonal>) {
    let n = state.n_levels;
    let mut off: Vec<OffDiagonal> = Vec::with_capacity(state.off.len());
    for o in &state.off {
        let (a1, b1) = (o.row / n, o.row % n);
        let (a2, b2) = (o.col / n, o.col % n);
        let (r, c) = match over {
            Party::B => (a1 * n + b2, a2 * n + b1),
            Party::A => (a2 * n + b1, a1 * n + b2),
        };
        let (r, c) = if r <= c { (r, c) } else { (c, r) };
        off.push(OffDiagonal {
            row: r,
            col: c,
            value: o.value,
        });
    }
    // diagonal entries map to themselves
    (state.diag.clone(), off)
}

/// Peres test: least eigenvalue of the partial transpose on `over`.
///
/// The transposed couplings all land in the `{|k,k⟩}` block, which is
/// diagonalized by cyclic Jacobi; every other product state keeps its
/// diagonal entry as an eigenvalue.
pub fn ppt_check_on(state: &TruncatedState, over: Party, tol: f64) -> Result<PptReport> {
    let n = state.n_levels;
    let (diag, off) = partial_transpose(state, over);
    let kk = |k: usize| k * n + k;

    let mut block = SymMatrix::zeros(n);
    for k in 0..n {
        block.set(k, k, diag[kk(k)]);
    }
    for o in &off {
        let (a1, b1) = (o.row / n, o.row % n);
        let (a2, b2) = (o.col / n, o.col % n);
        if a1 != b1 || a2 != b2 {
            return Err(Error::Config(
                "partial transpose couples states outside the {|k,k⟩} block".into(),
            ));
        }
        if a1 == a2 {
            block.add(a1, a1, o.value);
        } else {
            block.add(a1, a2, o.value);
            block.add(a2, a1, o.value);
        }
    }

    let block_eig = symmetric_eigenvalues(&block, JACOBI_TOL, JACOBI_MAX_SWEEPS)?;
    let mut min_eigenvalue = block_eig.first().copied().unwrap_or(f64::INFINITY);
    for a in 0..n {
        for b in 0..n {
            if a != b {
                min_eigenvalue = min_eigenvalue.min(diag[a * n + b]);
            }
        }
    }
    Ok(PptReport {
        min_eigenvalue,
        entangled_flag: min_eigenvalue < -tol,
        trace: diag.iter().sum(),
    })
}

/// Peres test with the transpose taken on `B`.
pub fn ppt_check(state: &TruncatedState, tol: f64) -> Result<PptReport> {
    ppt_check_on(state, Party::B, tol)
}
