//! Seeded cross-validation suite: analytic results against the truncated
//! oracle, closed-form frontiers against root finding, and Peres containment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::criterion::{self, entanglement_flag, frontier_y, Branch, FrontierOptions, QScanConfig};
use crate::entropy::{self, QValue, DEFAULT_SERIES_TOL};
use crate::error::Result;
use crate::model::{JointSpectrum, MarginalSpectrum, ModelParams};
use crate::oracle::{self, Party, DEFAULT_PPT_TOL};

pub const ORACLE_QS: [f64; 6] = [0.5, 1.0, 2.0, 2.5, 5.0, 20.0];
pub const ORACLE_REL_TOL: f64 = 1e-8;
pub const ORACLE_TAIL_TOL: f64 = 1e-10;
pub const CLOSED_FORM_TOL: f64 = 1e-6;
pub const ROOT_TOL: f64 = 1e-10;
/// Truncation used for the Peres test; a negative eigenvalue of a
/// truncation is also one of the full state.
pub const PPT_TAIL_TOL: f64 = 1e-8;

/// Draws a valid point: `(x, y)` uniform on the simplex, `T ∈ [0, 2]` with
/// one draw in ten at exactly `T = 0`, `α ∈ [0.1, 5]`.
pub fn random_point(rng: &mut impl Rng) -> ModelParams {
    let (mut x, mut y): (f64, f64) = (rng.random(), rng.random());
    if x + y > 1.0 {
        (x, y) = (1.0 - x, 1.0 - y);
    }
    let t = if rng.random_bool(0.1) {
        0.0
    } else {
        rng.random_range(0.0..2.0)
    };
    let alpha = rng.random_range(0.1..5.0);
    ModelParams::new(x, y.min(1.0 - x), t, alpha).expect("sampled point is valid")
}

/// `n` points from a ChaCha8 stream seeded with `seed`.
pub fn random_points(seed: u64, n: usize) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_point(&mut rng)).collect()
}

/// The closed forms under test; replaceable to check that the suite notices
/// a wrong formula.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForms {
    pub y_star: fn(f64, f64) -> f64,
    pub x_star: fn(f64, f64, f64) -> f64,
}

impl Default for ClosedForms {
    fn default() -> Self {
        Self {
            y_star: criterion::y_star,
            x_star: criterion::x_star,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub forms: ClosedForms,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20240101,
            samples: 100,
            forms: ClosedForms::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    /// Description of the first failing point, in sample order.
    pub first_failure: Option<String>,
}

impl PropertyResult {
    pub fn ok(&self) -> bool {
        self.passed == self.checked
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::ok)
    }

    pub fn first_failure(&self) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| !p.ok())
    }
}

/// Outcome of one property at one point: `None` when not applicable.
type Check = Option<std::result::Result<(), String>>;

fn describe(p: &ModelParams) -> String {
    format!("x={} y={} T={} alpha={}", p.x(), p.y(), p.t(), p.alpha())
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn bisect_root(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> Option<f64> {
    let (glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Some(lo);
    }
    if ghi == 0.0 {
        return Some(hi);
    }
    if (glo > 0.0) == (ghi > 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Closed-form traces and the `q = 1` entropy against eigenvalue sums of the
/// truncated state.
pub fn check_oracle_equivalence(p: &ModelParams) -> std::result::Result<(), String> {
    let run = || -> Result<std::result::Result<(), String>> {
        for &q in &ORACLE_QS {
            let n = oracle::levels_for_q_tail(p, q, ORACLE_TAIL_TOL)?;
            let state = oracle::materialize(p, n, ORACLE_TAIL_TOL)?;
            if q == 1.0 {
                let exact = entropy::s_conditional(p, QValue::One)?;
                let brute = oracle::conditional_entropy(&state, 1.0)?;
                if (exact - brute).abs() > ORACLE_REL_TOL * exact.abs().max(1.0) {
                    return Ok(Err(format!("S_1(A|B) {exact} vs oracle {brute} (N={n})")));
                }
                continue;
            }
            let joint = entropy::tr_joint_q(p, q)?;
            let joint_brute = oracle::eigen_trace_q(&state, q)?;
            if !rel_close(joint, joint_brute, ORACLE_REL_TOL) {
                return Ok(Err(format!(
                    "Tr rho^{q}: {joint} vs oracle {joint_brute} (N={n})"
                )));
            }
            let marg = entropy::tr_marginal_q(p, q, DEFAULT_SERIES_TOL)?.value;
            let marg_brute = oracle::marginal_trace_q(&state, Party::A, q)?;
            if !rel_close(marg, marg_brute, ORACLE_REL_TOL) {
                return Ok(Err(format!(
                    "Tr rho_B^{q}: {marg} vs oracle {marg_brute} (N={n})"
                )));
            }
        }
        Ok(Ok(()))
    };
    run().unwrap_or_else(|e| Err(e.to_string()))
}

/// Every entropic-entangled point is PPT-entangled. `None` when the
/// criterion does not fire.
pub fn check_ppt_containment(p: &ModelParams, cfg: &QScanConfig) -> Check {
    let run = || -> Result<Check> {
        if !entanglement_flag(p, cfg)? {
            return Ok(None);
        }
        let n = oracle::levels_for_tol(p, PPT_TAIL_TOL)?;
        let report = oracle::ppt_check(&oracle::materialize(p, n, PPT_TAIL_TOL)?, DEFAULT_PPT_TOL)?;
        Ok(Some(if report.entangled_flag {
            Ok(())
        } else {
            Err(format!(
                "entropic-entangled but PPT min eigenvalue {} (N={n})",
                report.min_eigenvalue
            ))
        }))
    };
    run().unwrap_or_else(|e| Some(Err(e.to_string())))
}

/// On the linear branch the frontier is `max(y*, y on x*)` for `T > 0` and
/// `y*` at `T = 0`.
pub fn check_closed_form_agreement(
    p: &ModelParams,
    cfg: &QScanConfig,
    forms: &ClosedForms,
) -> Check {
    let (x, t, a) = (p.x(), p.t(), p.alpha());
    let outcome = match frontier_y(x, t, a, cfg, &FrontierOptions::default()) {
        Ok(o) => o,
        Err(e) => return Some(Err(e.to_string())),
    };
    let pt = outcome.point()?;
    if pt.branch != Branch::Linear {
        return None;
    }
    let ys = (forms.y_star)(x, t);
    // x < x*(y) rewritten as a bound on y; at T = 0 the x-sector tie is
    // broken in favour of entanglement and only y* remains
    let slope = (forms.x_star)(1.0, t, a) - (forms.x_star)(0.0, t, a);
    let yx = if t > 0.0 && slope > 0.0 {
        (x - (forms.x_star)(0.0, t, a)) / slope
    } else {
        f64::NEG_INFINITY
    };
    let expected = ys.max(yx);
    Some(if (pt.y_frontier - expected).abs() <= CLOSED_FORM_TOL {
        Ok(())
    } else {
        Err(format!(
            "linear frontier {} vs closed form {expected} (y*={ys}, x*-bound={yx})",
            pt.y_frontier
        ))
    })
}

/// `y*` is the root of `λ_singlet = p_0` in `y`, and `x*` the root of
/// `λ_singlet = p_2` in `x`.
pub fn check_eigen_form_duality(
    p: &ModelParams,
    forms: &ClosedForms,
) -> std::result::Result<(), String> {
    let (x, y, t, a) = (p.x(), p.y(), p.t(), p.alpha());
    let gap = |xx: f64, yy: f64, level: usize| -> f64 {
        let Ok(q) = ModelParams::new(xx, yy, t, a) else {
            return f64::NAN;
        };
        JointSpectrum::new(&q).lambda_singlet.value() - MarginalSpectrum::new(&q).p(level)
    };
    let ys = (forms.y_star)(x, t);
    if ys > 0.0 && ys < 1.0 - x {
        match bisect_root(0.0, 1.0 - x, |yy| gap(x, yy, 0)) {
            Some(r) if (r - ys).abs() <= ROOT_TOL => {}
            r => return Err(format!("y* = {ys} but singlet = p_0 root at {r:?}")),
        }
    }
    let xs = (forms.x_star)(y, t, a);
    if xs > 0.0 && xs < 1.0 - y {
        match bisect_root(0.0, 1.0 - y, |xx| gap(xx, y, 2)) {
            Some(r) if (r - xs).abs() <= ROOT_TOL => {}
            r => return Err(format!("x* = {xs} but singlet = p_2 root at {r:?}")),
        }
    }
    Ok(())
}

/// Spectra sum to one and the oracle's partial trace reproduces `p_n`.
pub fn check_normalization(p: &ModelParams) -> std::result::Result<(), String> {
    let run = || -> Result<std::result::Result<(), String>> {
        let n = oracle::levels_for_tol(p, 1e-13)?;
        let js = JointSpectrum::new(p);
        let total = js.truncated_sum(n) + js.tail_weight(n);
        if (total - 1.0).abs() > 1e-12 {
            return Ok(Err(format!("joint spectrum sums to {total}")));
        }
        let state = oracle::materialize(p, n.min(200), 1.0)?;
        let ms = MarginalSpectrum::new(p);
        let (ra, rb) = (
            oracle::partial_trace(&state, Party::A),
            oracle::partial_trace(&state, Party::B),
        );
        if ra != rb {
            return Ok(Err("partial traces over A and B differ".into()));
        }
        // levels cut from the truncation only reach p_k through terms with an index ≥ N
        let cut = state.n_levels();
        for k in 0..cut {
            let missing = ms.tail_weight(cut) + js.tail_weight(cut);
            if (ra.get(k, k) - ms.p(k)).abs() > 1e-12 + missing {
                return Ok(Err(format!(
                    "partial trace p_{k} = {} vs {}",
                    ra.get(k, k),
                    ms.p(k)
                )));
            }
        }
        Ok(Ok(()))
    };
    run().unwrap_or_else(|e| Err(e.to_string()))
}

/// The partial transpose keeps the trace and the flag does not depend on the
/// transposed party.
pub fn check_ppt_symmetry(p: &ModelParams) -> std::result::Result<(), String> {
    let run = || -> Result<std::result::Result<(), String>> {
        let n = oracle::levels_for_tol(p, PPT_TAIL_TOL)?;
        let state = oracle::materialize(p, n, PPT_TAIL_TOL)?;
        let on_a = oracle::ppt_check_on(&state, Party::A, DEFAULT_PPT_TOL)?;
        let on_b = oracle::ppt_check_on(&state, Party::B, DEFAULT_PPT_TOL)?;
        if on_a.entangled_flag != on_b.entangled_flag {
            return Ok(Err(format!(
                "PPT flag differs: A {} vs B {}",
                on_a.min_eigenvalue, on_b.min_eigenvalue
            )));
        }
        if (on_b.trace - state.trace()).abs() > 1e-14 {
            return Ok(Err(format!(
                "partial transpose trace {} vs {}",
                on_b.trace,
                state.trace()
            )));
        }
        Ok(Ok(()))
    };
    run().unwrap_or_else(|e| Err(e.to_string()))
}

fn tally(name: &'static str, points: &[ModelParams], checks: &[Check]) -> PropertyResult {
    let mut result = PropertyResult {
        name,
        checked: 0,
        passed: 0,
        first_failure: None,
    };
    for (p, c) in points.iter().zip(checks) {
        match c {
            None => {}
            Some(Ok(())) => {
                result.checked += 1;
                result.passed += 1;
            }
            Some(Err(msg)) => {
                result.checked += 1;
                result
                    .first_failure
                    .get_or_insert_with(|| format!("{} at {}", msg, describe(p)));
            }
        }
    }
    result
}

/// Runs every property on `cfg.samples` seeded points. Points are evaluated
/// in parallel; the report does not depend on the thread count.
pub fn run_suite(cfg: &VerifyConfig) -> VerifyReport {
    let points = random_points(cfg.seed, cfg.samples);
    let scan = QScanConfig::default();
    let rows: Vec<[Check; 6]> = points
        .par_iter()
        .map(|p| {
            [
                Some(check_normalization(p)),
                Some(check_oracle_equivalence(p)),
                Some(check_eigen_form_duality(p, &cfg.forms)),
                check_closed_form_agreement(p, &scan, &cfg.forms),
                check_ppt_containment(p, &scan),
                Some(check_ppt_symmetry(p)),
            ]
        })
        .collect();
    let names = [
        "normalization",
        "oracle_equivalence",
        "eigen_form_duality",
        "closed_form_agreement",
        "ppt_containment",
        "ppt_symmetry",
    ];
    let properties = names
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            let column: Vec<Check> = rows.iter().map(|r| r[i].clone()).collect();
            tally(name, &points, &column)
        })
        .collect();
    VerifyReport {
        seed: cfg.seed,
        samples: cfg.samples,
        properties,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn negated_y_star(x: f64, t: f64) -> f64 {
        let u = if t == 0.0 { 0.0 } else { (-1.0 / t).exp() };
        (1.0 - x) / (3.0 + 2.0 * u * (2.0 + u - 2.0 * u * u))
    }

    #[test]
    fn sampler_is_reproducible_and_valid() {
        let a = random_points(3, 50);
        assert_eq!(a, random_points(3, 50));
        assert_ne!(a, random_points(4, 50));
        for p in &a {
            assert!(p.x() + p.y() <= 1.0);
            assert!((0.0..=2.0).contains(&p.t()));
            assert!((0.1..5.0).contains(&p.alpha()));
        }
    }

    #[test]
    fn small_suite_passes() {
        let report = run_suite(&VerifyConfig {
            samples: 12,
            ..VerifyConfig::default()
        });
        assert!(report.all_passed(), "{:?}", report.first_failure());
        assert_eq!(report.properties.len(), 6);
    }

    #[test]
    fn single_sample_is_deterministic() {
        let cfg = VerifyConfig {
            seed: 99,
            samples: 1,
            ..VerifyConfig::default()
        };
        assert_eq!(run_suite(&cfg), run_suite(&cfg));
    }

    #[test]
    fn negated_closed_form_is_caught() {
        let forms = ClosedForms {
            y_star: negated_y_star,
            ..ClosedForms::default()
        };
        // finite T so that the sign flip changes the value
        let p = ModelParams::new(0.1, 0.5, 0.8, 1.0).unwrap();
        let check = check_closed_form_agreement(&p, &QScanConfig::default(), &forms);
        assert!(matches!(check, Some(Err(_))), "{check:?}");
        assert!(check_eigen_form_duality(&p, &forms).is_err());
    }
}
