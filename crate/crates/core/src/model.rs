//! Parameter space of the oscillator mixture and its analytic spectra.
//!
//! The joint state mixes three sectors: a uniform block on the four lowest
//! product states, a diagonal family `|n,n⟩` (n ≥ 2) with geometric weights in
//! `v = e^(-2α/T)`, and antisymmetric pairs `|n,m⁻⟩` (n > m) with weights in
//! `u = e^(-1/T)`. Every eigenvalue of the joint state and of its marginal is
//! available in closed form, so the spectra here are lazy descriptors rather
//! than materialized lists.
//!
//! All weights are written in terms of `u`, `v` and the stable products
//! `b·u = (1-u)(1-u²)` and `u·sinh(1/T) = (1-u²)/2`, which keeps `T = 0`
//! (where `a`, `b` and `sinh` diverge) an ordinary evaluation with `u = v = 0`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

/// A point `(x, y, T, α)` of the mixed-state family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    x: f64,
    y: f64,
    t: f64,
    alpha: f64,
}

impl ModelParams {
    /// Validates and builds a parameter point.
    ///
    /// Rejects non-finite input, negative values, `x + y > 1`, and the
    /// non-normalizable combination `x > 0, T > 0, α = 0`.
    pub fn new(x: f64, y: f64, t: f64, alpha: f64) -> Result<Self> {
        Self { x, y, t, alpha }.validate()
    }

    /// Returns the parameters unchanged iff every admissibility constraint holds.
    pub fn validate(self) -> Result<Self> {
        let Self { x, y, t, alpha } = self;
        for (name, value) in [("x", x), ("y", y), ("T", t), ("alpha", alpha)] {
            if !value.is_finite() {
                return Err(Error::domain(format!("{name} must be finite, got {value}")));
            }
            if value < 0.0 {
                return Err(Error::domain(format!(
                    "{name} must be nonnegative, got {value}"
                )));
            }
        }
        if x > 1.0 {
            return Err(Error::domain(format!("x must be at most 1, got {x}")));
        }
        if y > 1.0 {
            return Err(Error::domain(format!("y must be at most 1, got {y}")));
        }
        if x + y > 1.0 + 1e-15 {
            return Err(Error::domain(format!("x+y exceeds 1 (x={x}, y={y})")));
        }
        if x > 0.0 && t > 0.0 && alpha == 0.0 {
            return Err(Error::domain(
                "alpha = 0 with x > 0 and T > 0 makes the diagonal family non-normalizable",
            ));
        }
        Ok(self)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// The noise temperature `T`.
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(1 - x - y)`, clamped at zero against rounding in `x + y`.
    pub fn uniform_mass(&self) -> f64 {
        (1.0 - self.x - self.y).max(0.0)
    }

    /// Same point with a different `y`.
    pub fn with_y(&self, y: f64) -> Result<Self> {
        Self::new(self.x, y, self.t, self.alpha)
    }

    /// Same point with a different `T`.
    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.x, self.y, t, self.alpha)
    }
}

/// Derived quantities of the two noise channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseFactors {
    /// `e^(-1/T)`
    pub u: f64,
    /// `e^(-2α/T)`
    pub v: f64,
    /// Diagonal normalization `(1-v)·e^(4α/T)`; infinite at `T = 0`.
    pub a: f64,
    /// Antisymmetric normalization `2(1-u)·sinh(1/T)`; infinite at `T = 0`.
    pub b: f64,
    /// `sinh(1/T)`; infinite at `T = 0`.
    pub sh: f64,
    /// `1 - u`, computed without cancellation.
    pub one_minus_u: f64,
    /// `1 - u²`
    pub one_minus_u2: f64,
    /// `1 - v`
    pub one_minus_v: f64,
}

impl NoiseFactors {
    pub fn new(params: &ModelParams) -> Self {
        let t = params.t;
        if t == 0.0 {
            return Self {
                u: 0.0,
                v: 0.0,
                a: f64::INFINITY,
                b: f64::INFINITY,
                sh: f64::INFINITY,
                one_minus_u: 1.0,
                one_minus_u2: 1.0,
                one_minus_v: 1.0,
            };
        }
        let beta = 1.0 / t;
        let u = (-beta).exp();
        let v = (-2.0 * params.alpha * beta).exp();
        let one_minus_u = -(-beta).exp_m1();
        let one_minus_u2 = -(-2.0 * beta).exp_m1();
        let one_minus_v = -(-2.0 * params.alpha * beta).exp_m1();
        let sh = beta.sinh();
        Self {
            u,
            v,
            a: one_minus_v * (4.0 * params.alpha * beta).exp(),
            b: 2.0 * one_minus_u * sh,
            sh,
            one_minus_u,
            one_minus_u2,
            one_minus_v,
        }
    }

    /// `b·u = (1-u)(1-u²)`: total weight of the lowest antisymmetric pair per unit `y`.
    pub fn bu(&self) -> f64 {
        self.one_minus_u * self.one_minus_u2
    }

    /// `u·sinh(1/T) = (1-u²)/2`.
    pub fn u_sh(&self) -> f64 {
        0.5 * self.one_minus_u2
    }
}

/// An eigenvalue split by the sector it comes from.
///
/// Comparing two levels subtracts sector by sector, so a tiny contribution
/// sitting on top of an identical large one (e.g. `p_2` versus `d_2` at very
/// small `T`) still orders correctly instead of being rounded into a tie.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Level {
    pub uniform: f64,
    pub diag: f64,
    pub anti: f64,
}

impl Level {
    pub fn value(&self) -> f64 {
        self.uniform + self.diag + self.anti
    }

    /// Signed difference `self - other`, accumulated per sector.
    pub fn diff(&self, other: &Level) -> f64 {
        (self.uniform - other.uniform) + (self.diag - other.diag) + (self.anti - other.anti)
    }

    pub fn cmp_value(&self, other: &Level) -> Ordering {
        self.diff(other)
            .partial_cmp(&0.0)
            .unwrap_or(Ordering::Equal)
    }

    pub fn is_zero(&self) -> bool {
        self.uniform == 0.0 && self.diag == 0.0 && self.anti == 0.0
    }
}

/// `amplitude · ratio^k` for `k ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricFamily {
    pub amplitude: f64,
    pub ratio: f64,
}

impl GeometricFamily {
    pub fn term(&self, k: usize) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * pow_usize(self.ratio, k)
    }

    /// `Σ_{j ≥ k} amplitude · ratio^j`.
    pub fn tail(&self, k: usize) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.term(k) / (1.0 - self.ratio)
    }
}

/// Eigenvalue families of the joint density operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointSpectrum {
    /// `(1-x-y)/4`, threefold (`|0,0⟩`, `|1,1⟩`, `|1,0⁺⟩`).
    pub lambda_uniform: f64,
    /// Eigenvalue on `|1,0⁻⟩`.
    pub lambda_singlet: Level,
    /// `d_n = x(1-v)v^(n-2)` indexed by `k = n - 2`.
    pub diag_family: GeometricFamily,
    /// `s_{n,m} = y·b·u^(n+m)` for `n ≥ 2`, `0 ≤ m < n`, stored as `amplitude · u^(n+m-1)`.
    pub antisym_family: GeometricFamily,
    noise: NoiseFactors,
}

impl JointSpectrum {
    pub fn new(params: &ModelParams) -> Self {
        let nf = NoiseFactors::new(params);
        let l = params.uniform_mass() / 4.0;
        let singlet_anti = if params.y == 0.0 {
            0.0
        } else {
            params.y * nf.bu()
        };
        Self {
            lambda_uniform: l,
            lambda_singlet: Level {
                uniform: l,
                diag: 0.0,
                anti: singlet_anti,
            },
            diag_family: GeometricFamily {
                amplitude: params.x * nf.one_minus_v,
                ratio: nf.v,
            },
            antisym_family: GeometricFamily {
                amplitude: singlet_anti,
                ratio: nf.u,
            },
            noise: nf,
        }
    }

    pub fn noise(&self) -> &NoiseFactors {
        &self.noise
    }

    /// `d_n` for `n ≥ 2`.
    pub fn diag_term(&self, n: usize) -> f64 {
        assert!(n >= 2, "diagonal family starts at n = 2");
        self.diag_family.term(n - 2)
    }

    /// `s_{n,m}` for `n ≥ 1`, `m < n`. `(1, 0)` is the antisymmetric part of the singlet.
    pub fn antisym_term(&self, n: usize, m: usize) -> f64 {
        assert!(m < n, "antisymmetric pairs need m < n");
        self.antisym_family.term(n + m - 1)
    }

    /// Number of antisymmetric eigenvalues with `n + m = j`, `n ≥ 2`.
    pub fn antisym_multiplicity(j: usize) -> usize {
        if j < 2 {
            0
        } else {
            j.div_ceil(2)
        }
    }

    /// Probability mass outside the product levels `0..n_levels` of either oscillator.
    pub fn tail_weight(&self, n_levels: usize) -> f64 {
        assert!(n_levels >= 2, "truncation must keep at least two levels");
        let u = self.noise.u;
        let diag = self.diag_family.amplitude / self.noise.one_minus_v.max(f64::MIN_POSITIVE)
            * pow_usize(self.diag_family.ratio, n_levels - 2);
        let diag = if self.diag_family.amplitude == 0.0 {
            0.0
        } else {
            diag
        };
        let anti = if self.antisym_family.amplitude == 0.0 {
            0.0
        } else {
            // y((1+u)u^(N-1) - u^(2N-1)), with y = amplitude / bu
            let y = self.antisym_family.amplitude / self.noise.bu();
            y * ((1.0 + u) * pow_usize(u, n_levels - 1) - pow_usize(u, 2 * n_levels - 1))
        };
        (diag + anti).max(0.0)
    }

    /// Sum of all eigenvalues with both oscillators below `n_levels`.
    pub fn truncated_sum(&self, n_levels: usize) -> f64 {
        let mut total = 3.0 * self.lambda_uniform + self.lambda_singlet.value();
        for n in 2..n_levels {
            total += self.diag_term(n);
            for m in 0..n {
                total += self.antisym_term(n, m);
            }
        }
        total
    }
}

/// Diagonal of the marginal `ρ_B` (identical to `ρ_A`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalSpectrum {
    uniform: f64,
    x_family: GeometricFamily,
    /// `y·u·sinh(1/T) = y(1-u²)/2`
    anti_scale: f64,
    noise: NoiseFactors,
}

impl MarginalSpectrum {
    pub fn new(params: &ModelParams) -> Self {
        let nf = NoiseFactors::new(params);
        Self {
            uniform: params.uniform_mass() / 2.0,
            x_family: GeometricFamily {
                amplitude: params.x * nf.one_minus_v,
                ratio: nf.v,
            },
            anti_scale: if params.y == 0.0 {
                0.0
            } else {
                params.y * nf.u_sh()
            },
            noise: nf,
        }
    }

    /// `p_n` split by sector.
    pub fn level(&self, n: usize) -> Level {
        let u = self.noise.u;
        // y·sh·(u^n - u^(2n) + u^(2n+1)) = anti_scale·(u^(n-1) - u^(2n-1) + u^(2n))
        let shape = match n {
            0 => 1.0,
            1 => 1.0 - u + u * u,
            _ => pow_usize(u, n - 1) * (1.0 - pow_usize(u, n) + pow_usize(u, n + 1)),
        };
        let anti = if self.anti_scale == 0.0 {
            0.0
        } else {
            self.anti_scale * shape
        };
        match n {
            0 | 1 => Level {
                uniform: self.uniform,
                diag: 0.0,
                anti,
            },
            _ => Level {
                uniform: 0.0,
                diag: self.x_family.term(n - 2),
                anti,
            },
        }
    }

    pub fn p(&self, n: usize) -> f64 {
        self.level(n).value()
    }

    /// Upper bound on `p_n` for `n ≥ 2` split into its two geometric sectors:
    /// `(x(1-v)·v^(n-2), y(1-u²)·u^(n-1))`.
    pub fn sector_bounds(&self, n: usize) -> (f64, f64) {
        debug_assert!(n >= 2);
        let x_part = self.x_family.term(n - 2);
        let y_part = if self.anti_scale == 0.0 {
            0.0
        } else {
            2.0 * self.anti_scale * pow_usize(self.noise.u, n - 1)
        };
        (x_part, y_part)
    }

    /// `Σ_{n ≥ k} p_n` for `k ≥ 2`.
    pub fn tail_weight(&self, k: usize) -> f64 {
        assert!(k >= 2);
        let u = self.noise.u;
        let x_tail = if self.x_family.amplitude == 0.0 {
            0.0
        } else {
            self.x_family.amplitude / self.noise.one_minus_v * pow_usize(self.x_family.ratio, k - 2)
        };
        let y_tail = if self.anti_scale == 0.0 {
            0.0
        } else {
            let y = self.anti_scale / self.noise.u_sh();
            0.5 * y
                * ((1.0 + u) * pow_usize(u, k - 1)
                    - self.noise.one_minus_u * pow_usize(u, 2 * k - 1))
        };
        (x_tail + y_tail).max(0.0)
    }

    pub fn noise(&self) -> &NoiseFactors {
        &self.noise
    }

    pub fn x_family(&self) -> &GeometricFamily {
        &self.x_family
    }

    /// `y(1-u²)/2`, the scale of the antisymmetric contribution.
    pub fn anti_scale(&self) -> f64 {
        self.anti_scale
    }
}

/// Validates and returns the parameters (free-function form).
pub fn validate(params: ModelParams) -> Result<ModelParams> {
    params.validate()
}

pub fn noise_factors(params: &ModelParams) -> NoiseFactors {
    NoiseFactors::new(params)
}

pub fn joint_spectrum(params: &ModelParams) -> JointSpectrum {
    JointSpectrum::new(params)
}

pub fn marginal_spectrum(params: &ModelParams) -> MarginalSpectrum {
    MarginalSpectrum::new(params)
}

/// `base^k` with `0^0 = 1`.
pub(crate) fn pow_usize(base: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if base == 0.0 {
        return 0.0;
    }
    if k <= i32::MAX as usize {
        base.powi(k as i32)
    } else {
        base.powf(k as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(x: f64, y: f64, t: f64, alpha: f64) -> ModelParams {
        ModelParams::new(x, y, t, alpha).unwrap()
    }

    #[test]
    fn validate_accepts_interior_point() {
        let params = p(0.2, 0.3, 1.0, 1.0);
        assert_eq!(params.validate().unwrap(), params);
    }

    #[test]
    fn validate_rejects_x_plus_y_above_one() {
        let err = ModelParams::new(0.6, 0.5, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("x+y exceeds 1"), "{err}");
    }

    #[test]
    fn validate_rejects_unnormalizable_diagonal_family() {
        let err = ModelParams::new(0.5, 0.0, 1.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("non-normalizable"), "{err}");
        // the same alpha is fine when the diagonal sector is empty or frozen
        assert!(ModelParams::new(0.0, 0.5, 1.0, 0.0).is_ok());
        assert!(ModelParams::new(0.5, 0.2, 0.0, 0.0).is_ok());
    }

    #[test]
    fn validate_rejects_negative_and_nan() {
        assert!(ModelParams::new(-0.1, 0.3, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.1, 0.3, -1.0, 1.0).is_err());
        assert!(ModelParams::new(0.1, 0.3, 1.0, -1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 0.3, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.1, 0.3, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn noise_factors_at_unit_temperature() {
        let nf = noise_factors(&p(0.2, 0.3, 1.0, 1.0));
        assert_relative_eq!(nf.v, 0.1353352832366127, max_relative = 1e-12);
        assert_relative_eq!(nf.a, 47.209094, max_relative = 1e-7);
        assert_relative_eq!(nf.b, 1.4857377, max_relative = 1e-7);
    }

    #[test]
    fn noise_identities_hold_to_machine_precision() {
        for &t in &[0.05, 0.3, 1.0, 1.45, 3.0, 25.0] {
            let nf = noise_factors(&p(0.1, 0.1, t, 0.7));
            assert_relative_eq!(nf.b * nf.u, nf.bu(), max_relative = 1e-14);
            assert_relative_eq!(nf.u * nf.sh, nf.u_sh(), max_relative = 1e-14);
            assert_relative_eq!(
                nf.b * nf.u,
                (1.0 - nf.u) * (1.0 - nf.u * nf.u),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn zero_temperature_uses_limit_convention() {
        let params = p(0.4, 0.3, 0.0, 1.0);
        let nf = noise_factors(&params);
        assert_eq!((nf.u, nf.v), (0.0, 0.0));
        assert_eq!(nf.bu(), 1.0);
        let js = joint_spectrum(&params);
        assert_eq!(js.diag_term(2), 0.4);
        assert_eq!(js.diag_term(3), 0.0);
        assert_eq!(js.antisym_term(2, 0), 0.0);
        assert_relative_eq!(
            js.lambda_singlet.value(),
            0.3 / 4.0 + 0.3,
            max_relative = 1e-15
        );
    }

    #[test]
    fn joint_spectrum_fully_random() {
        for &(t, alpha) in &[(0.0, 1.0), (0.7, 0.2), (5.0, 3.0)] {
            let js = joint_spectrum(&p(0.0, 0.0, t, alpha));
            assert_eq!(js.lambda_uniform, 0.25);
            assert_eq!(js.lambda_singlet.value(), 0.25);
            assert_eq!(js.diag_term(2), 0.0);
            assert_eq!(js.antisym_term(3, 1), 0.0);
        }
    }

    #[test]
    fn joint_spectrum_epr_point() {
        let js = joint_spectrum(&p(0.0, 1.0, 0.0, 1.0));
        assert_eq!(js.lambda_uniform, 0.0);
        assert_eq!(js.lambda_singlet.value(), 1.0);
    }

    #[test]
    fn joint_spectrum_zero_temperature_mixture() {
        let js = joint_spectrum(&p(0.6, 0.3, 0.0, 1.0));
        assert_relative_eq!(js.lambda_uniform, 0.025, max_relative = 1e-14);
        assert_relative_eq!(js.lambda_singlet.value(), 0.325, max_relative = 1e-14);
        assert_eq!(js.diag_term(2), 0.6);
    }

    #[test]
    fn marginal_spectrum_examples() {
        let m = marginal_spectrum(&p(0.0, 0.0, 1.3, 1.0));
        assert_eq!((m.p(0), m.p(1), m.p(2), m.p(7)), (0.5, 0.5, 0.0, 0.0));

        let m = marginal_spectrum(&p(0.0, 1.0, 0.0, 1.0));
        assert_eq!((m.p(0), m.p(1), m.p(2)), (0.5, 0.5, 0.0));

        let m = marginal_spectrum(&p(0.6, 0.3, 0.0, 1.0));
        assert_relative_eq!(m.p(0), 0.2, max_relative = 1e-14);
        assert_relative_eq!(m.p(1), 0.2, max_relative = 1e-14);
        assert_eq!(m.p(2), 0.6);
        assert_eq!(m.p(3), 0.0);
    }

    #[test]
    fn marginal_matches_sinh_form() {
        // p_n as written with sinh(1/T) and e^(-n/T) directly
        let params = p(0.25, 0.35, 0.8, 0.6);
        let m = marginal_spectrum(&params);
        let (x, y, t, a) = (0.25, 0.35, 0.8, 0.6);
        let e = |k: f64| (-k / t).exp();
        let sh = (1.0 / t).sinh();
        let l = (1.0 - x - y) / 2.0;
        assert_relative_eq!(m.p(0), l + y * e(1.0) * sh, max_relative = 1e-13);
        assert_relative_eq!(
            m.p(1),
            l + y * sh * (e(1.0) - e(2.0) + e(3.0)),
            max_relative = 1e-13
        );
        for n in 2..12 {
            let nf = n as f64;
            let expected = x * (1.0 - (-2.0 * a / t).exp()) * (-2.0 * (nf - 2.0) * a / t).exp()
                + y * sh * (e(nf) - e(2.0 * nf) + e(2.0 * nf + 1.0));
            assert_relative_eq!(m.p(n), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn joint_matches_exponential_form() {
        let (x, y, t, a) = (0.3, 0.45, 1.2, 0.9);
        let js = joint_spectrum(&p(x, y, t, a));
        let big_a = (1.0 - (-2.0 * a / t).exp()) * (4.0 * a / t).exp();
        let big_b = 2.0 * (1.0 - (-1.0 / t).exp()) * (1.0 / t).sinh();
        for n in 2..10 {
            let nf = n as f64;
            assert_relative_eq!(
                js.diag_term(n),
                x * big_a * (-2.0 * nf * a / t).exp(),
                max_relative = 1e-12
            );
            for m in 0..n {
                let s = y * big_b * (-((n + m) as f64) / t).exp();
                assert_relative_eq!(js.antisym_term(n, m), s, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn tail_weights_match_truncated_sums() {
        let params = p(0.2, 0.3, 1.0, 1.0);
        let js = joint_spectrum(&params);
        for n in [2, 3, 5, 12] {
            assert_relative_eq!(
                js.truncated_sum(n) + js.tail_weight(n),
                1.0,
                epsilon = 1e-14
            );
        }
        let m = marginal_spectrum(&params);
        for k in [2, 4, 9] {
            let head: f64 = (0..k).map(|n| m.p(n)).sum();
            assert_relative_eq!(head + m.tail_weight(k), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn spectra_converge_to_zero_temperature_values() {
        let limit = joint_spectrum(&p(0.3, 0.4, 0.0, 0.5));
        let mut prev = f64::INFINITY;
        for t in [0.2, 0.1, 0.05, 0.02, 0.01] {
            let js = joint_spectrum(&p(0.3, 0.4, t, 0.5));
            let gap = (js.lambda_singlet.value() - limit.lambda_singlet.value()).abs()
                + (js.diag_term(2) - limit.diag_term(2)).abs()
                + js.antisym_term(2, 0)
                + js.diag_term(3);
            assert!(gap <= prev, "gap {gap} grew at T={t}");
            prev = gap;
        }
        assert!(prev < 1e-8);
    }

    #[test]
    fn level_diff_survives_tiny_sector() {
        let big = Level {
            uniform: 0.0,
            diag: 0.6,
            anti: 0.0,
        };
        let bumped = Level {
            uniform: 0.0,
            diag: 0.6,
            anti: 1e-40,
        };
        assert_eq!(big.value(), bumped.value());
        assert_eq!(bumped.cmp_value(&big), Ordering::Greater);
    }

    #[test]
    fn antisym_multiplicities() {
        let counts: Vec<usize> = (0..7).map(JointSpectrum::antisym_multiplicity).collect();
        assert_eq!(counts, vec![0, 0, 1, 2, 2, 3, 3]);
    }
}
