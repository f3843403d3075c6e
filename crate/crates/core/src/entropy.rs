//! Tsallis traces, entropies and the conditional entropy `S_q(A|B)`.
//!
//! `Tr ρ^q` of the joint state is a four-term closed form. `Tr ρ_B^q` keeps
//! an infinite series over `n ≥ 2` which is summed until a geometric tail
//! bound drops below a relative tolerance. `q = 1` (von Neumann) and
//! `q → ∞` (eigenvalue dominance) have their own code paths.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{JointSpectrum, Level, MarginalSpectrum, ModelParams};

/// Default relative tolerance for the marginal series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

/// Term budget for the marginal series before giving up.
pub const MAX_SERIES_TERMS: usize = 20_000_000;

/// Below this magnitude `Tr ρ^q / Tr ρ_B^q - 1` (or `S_1(A|B)`) is treated as
/// rounding, not as a sign.
pub const NEGATIVITY_NOISE: f64 = 1e-10;

/// The entropic index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum QValue {
    /// `q > 0`, `q ≠ 1`.
    Finite(f64),
    /// Boltzmann-Gibbs / von Neumann limit.
    One,
    /// Dominance limit `q → ∞`.
    Infinity,
}

impl QValue {
    /// Maps `1.0` to [`QValue::One`] and `+∞` to [`QValue::Infinity`].
    pub fn new(q: f64) -> Result<Self> {
        if q.is_nan() || q <= 0.0 {
            return Err(Error::domain(format!("q must be positive, got {q}")));
        }
        Ok(if q == 1.0 {
            QValue::One
        } else if q.is_infinite() {
            QValue::Infinity
        } else {
            QValue::Finite(q)
        })
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            QValue::Finite(q) => q,
            QValue::One => 1.0,
            QValue::Infinity => f64::INFINITY,
        }
    }
}

/// Which reduced state an entropy refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subsystem {
    /// The full state `A+B`.
    Joint,
    /// `ρ_B` (equal to `ρ_A` for this family).
    Marginal,
}

/// Sign of `S_q(A|B)` as `q → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InfinitySign {
    Positive,
    Negative,
    Tie,
}

/// A series value with the bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub q: f64,
    pub tr_joint_q: f64,
    pub tr_marginal_q: f64,
    pub s_joint: f64,
    pub s_marginal: f64,
    pub s_conditional: f64,
    pub truncation_error: f64,
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "q must be positive and finite, got {q}"
        )))
    }
}

/// `1 - e^(-k/T)` without cancellation; `1` at `T = 0`.
fn one_minus_exp_over_t(k: f64, t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        -(-k / t).exp_m1()
    }
}

/// `e^(-k/T)`; `0` at `T = 0`.
fn exp_over_t(k: f64, t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        (-k / t).exp()
    }
}

fn pow_q(base: f64, q: f64) -> f64 {
    if base <= 0.0 {
        0.0
    } else {
        base.powf(q)
    }
}

/// Closed-form `Tr(ρ_{A+B})^q` for any `q > 0`.
pub fn tr_joint_q(params: &ModelParams, q: f64) -> Result<f64> {
    check_q(q)?;
    let js = JointSpectrum::new(params);
    let t = params.t();
    let mut total = 3.0 * pow_q(js.lambda_uniform, q) + pow_q(js.lambda_singlet.value(), q);

    let diag_amp = js.diag_family.amplitude;
    if diag_amp > 0.0 {
        // x^q (1-v)^q / (1 - v^q)
        total += pow_q(diag_amp, q) / one_minus_exp_over_t(2.0 * params.alpha() * q, t);
    }

    let anti_amp = js.antisym_family.amplitude;
    if anti_amp > 0.0 && t > 0.0 {
        // (y·b·u)^q · w(1 + w - w²) / ((1-w)(1-w²)),  w = u^q
        let w = exp_over_t(q, t);
        if w > 0.0 {
            let shape = w * (1.0 + w - w * w)
                / (one_minus_exp_over_t(q, t) * one_minus_exp_over_t(2.0 * q, t));
            total += pow_q(anti_amp, q) * shape;
        }
    }
    Ok(total)
}

/// Sums `head + Σ_{n ≥ first} term(n)`, stopping once `tail_from(n)` bounds the
/// remainder below `tol` times the running total.
fn sum_series(
    head: f64,
    first: usize,
    tol: f64,
    mut term: impl FnMut(usize) -> f64,
    mut tail_from: impl FnMut(usize) -> Option<f64>,
) -> Result<SeriesSum> {
    let mut value = head;
    let mut n = first;
    let mut last_bound = f64::INFINITY;
    loop {
        if let Some(bound) = tail_from(n) {
            last_bound = bound;
            if bound <= tol * value.abs() || bound == 0.0 {
                return Ok(SeriesSum {
                    value,
                    tail_bound: bound,
                    terms: n - first,
                });
            }
        }
        if n - first >= MAX_SERIES_TERMS {
            return Err(Error::NonConvergence {
                terms: n - first,
                tail_bound: last_bound,
                target: tol * value.abs(),
            });
        }
        value += term(n);
        n += 1;
    }
}

/// Powers of a geometric family `amp · r^i`, with `Σ_{i ≥ i0} (amp·r^i)^q` in closed form.
struct PoweredGeometric {
    amp_q: f64,
    ratio_q: f64,
    one_minus_ratio_q: f64,
}

impl PoweredGeometric {
    /// `amp · e^(-k·i/T)` raised to `q`.
    fn new(amp: f64, k: f64, t: f64, q: f64) -> Self {
        Self {
            amp_q: pow_q(amp, q),
            ratio_q: exp_over_t(k * q, t),
            one_minus_ratio_q: one_minus_exp_over_t(k * q, t),
        }
    }

    fn tail(&self, i0: usize) -> f64 {
        if self.amp_q == 0.0 {
            return 0.0;
        }
        self.amp_q * crate::model::pow_usize(self.ratio_q, i0) / self.one_minus_ratio_q
    }
}

/// `Tr(ρ_B)^q`: two closed terms plus the `n ≥ 2` series.
pub fn tr_marginal_q(params: &ModelParams, q: f64, tol: f64) -> Result<SeriesSum> {
    check_q(q)?;
    if !(tol > 0.0) {
        return Err(Error::Config(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let ms = MarginalSpectrum::new(params);
    let t = params.t();
    let head = pow_q(ms.p(0), q) + pow_q(ms.p(1), q);

    // p_n ≤ X_n + Y_n with X_n = x(1-v)v^(n-2), Y_n = y(1-u²)u^(n-1), and
    // (X + Y)^q ≤ 2^q (X^q + Y^q).
    let x_pow = PoweredGeometric::new(ms.x_family().amplitude, 2.0 * params.alpha(), t, q);
    let y_pow = PoweredGeometric::new(2.0 * ms.anti_scale(), 1.0, t, q);
    let two_q = 2f64.powf(q);

    sum_series(
        head,
        2,
        tol,
        |n| pow_q(ms.p(n), q),
        |n| Some(two_q * (x_pow.tail(n - 2) + y_pow.tail(n - 1))),
    )
}

/// `-z ln z` with `0 ln 0 = 0`.
fn neg_z_ln_z(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        -z * z.ln()
    }
}

/// Von Neumann entropy of the joint state, in closed form.
pub fn von_neumann_joint(params: &ModelParams) -> f64 {
    let js = JointSpectrum::new(params);
    let t = params.t();
    let mut s = 3.0 * neg_z_ln_z(js.lambda_uniform) + neg_z_ln_z(js.lambda_singlet.value());

    let x = params.x();
    let diag_amp = js.diag_family.amplitude;
    if diag_amp > 0.0 {
        // -Σ A v^k (ln A + k ln v) = -x ln A - x v ln v / (1-v)
        s -= x * diag_amp.ln();
        let v = js.diag_family.ratio;
        if v > 0.0 {
            let ln_v = -2.0 * params.alpha() / t;
            s -= x * v * ln_v / js.noise().one_minus_v;
        }
    }

    let anti_amp = js.antisym_family.amplitude;
    let u = js.antisym_family.ratio;
    if anti_amp > 0.0 && u > 0.0 {
        // eigenvalues B·u^(j-1) with multiplicity ceil(j/2), j ≥ 2
        let y = params.y();
        let nf = js.noise();
        let ln_u = -1.0 / t;
        let mass = y * (1.0 - nf.bu());
        let weighted_order = y * (u / nf.one_minus_u + 2.0 * u * u / nf.one_minus_u2);
        s -= mass * anti_amp.ln() + ln_u * weighted_order;
    }
    s
}

/// Von Neumann entropy of `ρ_B`, summed with a tail bound.
pub fn von_neumann_marginal(params: &ModelParams, tol: f64) -> Result<SeriesSum> {
    let ms = MarginalSpectrum::new(params);
    let t = params.t();
    let head = neg_z_ln_z(ms.p(0)) + neg_z_ln_z(ms.p(1));
    let x_amp = ms.x_family().amplitude;
    let y_amp = 2.0 * ms.anti_scale();
    let ln_v = if t == 0.0 {
        f64::NEG_INFINITY
    } else {
        -2.0 * params.alpha() / t
    };
    let ln_u = if t == 0.0 {
        f64::NEG_INFINITY
    } else {
        -1.0 / t
    };
    let v = ms.x_family().ratio;
    let u = ms.noise().u;

    // Σ_{i ≥ i0} f(A r^i) ≤ A(|ln A| Σ r^i + |ln r| Σ i r^i) while A r^i ≤ 1/e
    let entropy_tail = |amp: f64, r: f64, ln_r: f64, i0: usize| -> f64 {
        if amp == 0.0 || r == 0.0 && i0 > 0 {
            return 0.0;
        }
        let r_i0 = crate::model::pow_usize(r, i0);
        let one_minus_r = 1.0 - r;
        let s0 = r_i0 / one_minus_r;
        let s1 = r_i0 * (i0 as f64 / one_minus_r + r / (one_minus_r * one_minus_r));
        amp * (amp.ln().abs() * s0 + ln_r.abs() * s1)
    };

    sum_series(
        head,
        2,
        tol,
        |n| neg_z_ln_z(ms.p(n)),
        |n| {
            let (xb, yb) = ms.sector_bounds(n);
            if xb + yb > (-1f64).exp() {
                return None;
            }
            Some(entropy_tail(x_amp, v, ln_v, n - 2) + entropy_tail(y_amp, u, ln_u, n - 1))
        },
    )
}

/// `S_q` of the joint state or of a marginal.
pub fn s_q(params: &ModelParams, q: QValue, which: Subsystem) -> Result<f64> {
    match q {
        QValue::Finite(q) => {
            let tr = match which {
                Subsystem::Joint => tr_joint_q(params, q)?,
                Subsystem::Marginal => tr_marginal_q(params, q, DEFAULT_SERIES_TOL)?.value,
            };
            Ok((1.0 - tr) / (q - 1.0))
        }
        QValue::One => Ok(match which {
            Subsystem::Joint => von_neumann_joint(params),
            Subsystem::Marginal => von_neumann_marginal(params, DEFAULT_SERIES_TOL)?.value,
        }),
        QValue::Infinity => Err(Error::Config(
            "S_q at q = infinity is only available as a sign; use conditional_sign_at_infinity"
                .into(),
        )),
    }
}

/// All entropies at one `(params, q)`.
pub fn entropy_report(params: &ModelParams, q: QValue) -> Result<EntropyReport> {
    match q {
        QValue::Finite(qv) => {
            let tr_joint = tr_joint_q(params, qv)?;
            let marg = tr_marginal_q(params, qv, DEFAULT_SERIES_TOL)?;
            Ok(EntropyReport {
                q: qv,
                tr_joint_q: tr_joint,
                tr_marginal_q: marg.value,
                s_joint: (1.0 - tr_joint) / (qv - 1.0),
                s_marginal: (1.0 - marg.value) / (qv - 1.0),
                s_conditional: (1.0 - tr_joint / marg.value) / (qv - 1.0),
                truncation_error: marg.tail_bound,
            })
        }
        QValue::One => {
            let s_joint = von_neumann_joint(params);
            let marg = von_neumann_marginal(params, DEFAULT_SERIES_TOL)?;
            Ok(EntropyReport {
                q: 1.0,
                tr_joint_q: 1.0,
                tr_marginal_q: 1.0,
                s_joint,
                s_marginal: marg.value,
                s_conditional: s_joint - marg.value,
                truncation_error: marg.tail_bound,
            })
        }
        QValue::Infinity => Err(Error::Config(
            "no finite entropy report at q = infinity; use conditional_sign_at_infinity".into(),
        )),
    }
}

/// `S_q(A|B)`; equal to `S_q(B|A)` since the two marginals coincide.
pub fn s_conditional(params: &ModelParams, q: QValue) -> Result<f64> {
    Ok(entropy_report(params, q)?.s_conditional)
}

/// Whether `S_q(A|B) < 0` beyond rounding noise. At `q = ∞` this is the
/// dominance test.
pub fn conditional_is_negative(params: &ModelParams, q: QValue) -> Result<bool> {
    match q {
        QValue::Finite(qv) => {
            let tr_joint = tr_joint_q(params, qv)?;
            let tr_marg = tr_marginal_q(params, qv, DEFAULT_SERIES_TOL)?.value;
            let excess = tr_joint / tr_marg - 1.0;
            // S = -excess / (q - 1)
            Ok(if qv > 1.0 {
                excess > NEGATIVITY_NOISE
            } else {
                excess < -NEGATIVITY_NOISE
            })
        }
        QValue::One => Ok(s_conditional(params, QValue::One)? < -NEGATIVITY_NOISE),
        QValue::Infinity => Ok(conditional_sign_at_infinity(params) == InfinitySign::Negative),
    }
}

/// Distinct nonzero eigenvalues (descending) with multiplicities.
type Spectrum = Vec<(Level, usize)>;

fn merge_levels(mut levels: Vec<(Level, usize)>, cutoff: f64) -> Spectrum {
    levels.retain(|(l, _)| !l.is_zero() && l.value() > cutoff);
    levels.sort_by(|a, b| b.0.cmp_value(&a.0));
    let mut merged: Spectrum = Vec::with_capacity(levels.len());
    for (level, mult) in levels {
        match merged.last_mut() {
            Some((prev, m)) if prev.cmp_value(&level) == Ordering::Equal => *m += mult,
            _ => merged.push((level, mult)),
        }
    }
    merged
}

/// Top of both spectra, generated with `depth` terms per family. Returns the
/// two lists and the value below which neither list is complete.
fn leading_spectra(params: &ModelParams, depth: usize) -> (Spectrum, Spectrum, f64) {
    let js = JointSpectrum::new(params);
    let ms = MarginalSpectrum::new(params);

    let mut joint = vec![
        (
            Level {
                uniform: js.lambda_uniform,
                ..Level::default()
            },
            3,
        ),
        (js.lambda_singlet, 1),
    ];
    for k in 0..depth {
        joint.push((
            Level {
                diag: js.diag_family.term(k),
                ..Level::default()
            },
            1,
        ));
    }
    for j in 2..depth + 2 {
        let anti = js.antisym_family.term(j - 1);
        joint.push((
            Level {
                anti,
                ..Level::default()
            },
            JointSpectrum::antisym_multiplicity(j),
        ));
    }
    let joint_cut = js
        .diag_family
        .term(depth)
        .max(js.antisym_family.term(depth + 1));

    let mut marginal = Vec::with_capacity(depth + 2);
    for n in 0..depth + 2 {
        marginal.push((ms.level(n), 1));
    }
    let (xb, yb) = ms.sector_bounds(depth + 2);
    let cutoff = joint_cut.max(xb + yb);

    (
        merge_levels(joint, cutoff),
        merge_levels(marginal, cutoff),
        cutoff,
    )
}

/// Sign of `S_q(A|B)` as `q → ∞`.
///
/// `Tr ρ^q` is dominated by the largest eigenvalue, then by its multiplicity,
/// then by the next distinct value, and so on. The joint side winning means
/// `Tr ρ^q > Tr ρ_B^q`, i.e. a negative conditional entropy.
pub fn conditional_sign_at_infinity(params: &ModelParams) -> InfinitySign {
    let mut depth = 16;
    loop {
        let (joint, marginal, cutoff) = leading_spectra(params, depth);
        for i in 0.. {
            match (joint.get(i), marginal.get(i)) {
                (None, None) => break,
                (Some(_), None) => return InfinitySign::Negative,
                (None, Some(_)) => return InfinitySign::Positive,
                (Some((lj, mj)), Some((lm, mm))) => match lj.cmp_value(lm) {
                    Ordering::Greater => return InfinitySign::Negative,
                    Ordering::Less => return InfinitySign::Positive,
                    Ordering::Equal => match mj.cmp(mm) {
                        Ordering::Greater => return InfinitySign::Negative,
                        Ordering::Less => return InfinitySign::Positive,
                        Ordering::Equal => {}
                    },
                },
            }
        }
        if cutoff == 0.0 || depth >= 4096 {
            return InfinitySign::Tie;
        }
        depth *= 4;
    }
}
