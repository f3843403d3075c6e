//! Cyclic Jacobi eigenvalues for small dense symmetric matrices.

use crate::error::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    /// Sets `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, value: f64) {
        self.set(i, j, value);
        self.set(j, i, value);
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] += value;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `sqrt(Σ_{i≠j} a_ij²)`
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    sum += self.get(i, j).powi(2);
                }
            }
        }
        sum.sqrt()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0.0))
    }
}

pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps run over all pairs `p < q` until the off-diagonal Frobenius norm is
/// below `tol`.
pub fn symmetric_eigenvalues(matrix: &SymMatrix, tol: f64, max_sweeps: usize) -> Result<Vec<f64>> {
    let n = matrix.n;
    let mut a = matrix.data.clone();
    let idx = |i: usize, j: usize| i * n + j;

    let mut sweeps = 0;
    loop {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[idx(p, q)] * a[idx(p, q)];
            }
        }
        let off = off.sqrt();
        if off < tol {
            break;
        }
        if sweeps >= max_sweeps {
            return Err(Error::EigensolverStall {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;

        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
                a[idx(p, q)] = 0.0;
                a[idx(q, p)] = 0.0;
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

/// Eigenvalues of `[[a, b], [b, d]]`, smaller first.
pub fn eigenvalues_2x2(a: f64, b: f64, d: f64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(b);
    (mean - radius, mean + radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// `Q diag(λ) Qᵀ` with `Q` a product of random Givens rotations.
    fn conjugated(spectrum: &[f64], rng: &mut ChaCha8Rng) -> SymMatrix {
        let n = spectrum.len();
        let mut m = SymMatrix::from_diagonal(spectrum);
        for _ in 0..4 * n * n {
            let p = rng.random_range(0..n);
            let q = rng.random_range(0..n);
            if p == q {
                continue;
            }
            let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (s, c) = angle.sin_cos();
            for k in 0..n {
                let (mkp, mkq) = (m.get(k, p), m.get(k, q));
                m.set(k, p, c * mkp - s * mkq);
                m.set(k, q, s * mkp + c * mkq);
            }
            for k in 0..n {
                let (mpk, mqk) = (m.get(p, k), m.get(q, k));
                m.set(p, k, c * mpk - s * mqk);
                m.set(q, k, s * mpk + c * mqk);
            }
        }
        // symmetrize away rounding asymmetry
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (m.get(i, j) + m.get(j, i));
                m.set_sym(i, j, avg);
            }
        }
        m
    }

    #[test]
    fn recovers_known_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 5, 8, 13, 24] {
            for _ in 0..5 {
                let mut spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                if n > 3 {
                    // include a degenerate pair
                    spectrum[1] = spectrum[0];
                }
                let m = conjugated(&spectrum, &mut rng);
                assert!(m.off_diagonal_norm() > 1e-3);
                let got = symmetric_eigenvalues(&m, JACOBI_TOL, JACOBI_MAX_SWEEPS).unwrap();
                spectrum.sort_by(|a, b| a.total_cmp(b));
                for (g, e) in got.iter().zip(&spectrum) {
                    assert!((g - e).abs() < 1e-10, "n={n}: {g} vs {e}");
                }
            }
        }
    }

    #[test]
    fn diagonal_input_needs_no_sweeps() {
        let m = SymMatrix::from_diagonal(&[3.0, -1.0, 2.0]);
        assert_eq!(
            symmetric_eigenvalues(&m, JACOBI_TOL, 0).unwrap(),
            vec![-1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn stall_is_reported() {
        let mut m = SymMatrix::zeros(3);
        m.set_sym(0, 1, 1.0);
        m.set_sym(1, 2, 1.0);
        let err = symmetric_eigenvalues(&m, JACOBI_TOL, 0).unwrap_err();
        assert!(matches!(err, Error::EigensolverStall { sweeps: 0, .. }));
    }

    #[test]
    fn closed_form_2x2_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (a, b, d) = (
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let mut m = SymMatrix::zeros(2);
            m.set(0, 0, a);
            m.set(1, 1, d);
            m.set_sym(0, 1, b);
            let jac = symmetric_eigenvalues(&m, 1e-15, 50).unwrap();
            let (lo, hi) = eigenvalues_2x2(a, b, d);
            assert!((jac[0] - lo).abs() < 1e-12 && (jac[1] - hi).abs() < 1e-12);
        }
    }
}
