//! Symmetric banded matrices with Cholesky factorization.
//!
//! The Maxwell quadratic form couples only edges that share a plaquette, so
//! in the lexicographic variable order its matrix has bandwidth about
//! `d·n^{d-1}` — tiny compared to its dimension. A banded factorization keeps
//! the fill inside the band and runs in `O(dim · band²)`.

use crate::error::{Error, Result};

/// Lower-band storage of a symmetric matrix: entry `(i, j)` with
/// `i - band ≤ j ≤ i` lives at `data[i·(band+1) + (j + band - i)]`.
#[derive(Debug, Clone)]
pub(crate) struct BandMatrix {
    dim: usize,
    band: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(dim: usize, band: usize) -> Self {
        let band = band.min(dim.saturating_sub(1));
        BandMatrix {
            dim,
            band,
            data: vec![0.0; dim * (band + 1)],
        }
    }

    #[allow(dead_code)]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.band);
        i * (self.band + 1) + (j + self.band - i)
    }

    /// Symmetric read access.
    #[allow(dead_code)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.band {
            0.0
        } else {
            self.data[self.slot(hi, lo)]
        }
    }

    /// Accumulates into the lower-triangle entry `(i, j)`, `i ≥ j`.
    pub fn add_lower(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    /// `y = A x` using symmetry.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        y.fill(0.0);
        for i in 0..self.dim {
            let jmin = i.saturating_sub(self.band);
            let diag = self.data[self.slot(i, i)];
            y[i] += diag * x[i];
            for j in jmin..i {
                let a = self.data[self.slot(i, j)];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
        }
    }

    /// Quadratic form `x^T A x`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let jmin = i.saturating_sub(self.band);
            acc += self.data[self.slot(i, i)] * x[i] * x[i];
            for j in jmin..i {
                acc += 2.0 * self.data[self.slot(i, j)] * x[i] * x[j];
            }
        }
        acc
    }

    /// Cholesky factorization `A = L L^T`. Fails with the offending row and
    /// pivot when the matrix is not positive definite.
    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (dim, band) = (self.dim, self.band);
        let mut l = self.data.clone();
        let w = band + 1;
        for i in 0..dim {
            let jmin = i.saturating_sub(band);
            for j in jmin..=i {
                let mut sum = l[i * w + (j + band - i)];
                let kmin = jmin.max(j.saturating_sub(band));
                for k in kmin..j {
                    sum -= l[i * w + (k + band - i)] * l[j * w + (k + band - j)];
                }
                if j == i {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: sum });
                    }
                    l[i * w + band] = sum.sqrt();
                } else {
                    l[i * w + (j + band - i)] = sum / l[j * w + band];
                }
            }
        }
        Ok(BandCholesky {
            dim,
            band,
            data: l,
        })
    }
}

/// Lower Cholesky factor in the same band layout.
#[derive(Debug, Clone)]
pub(crate) struct BandCholesky {
    dim: usize,
    band: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        i * (self.band + 1) + (j + self.band - i)
    }

    /// `log det A = 2 Σ log L_ii`, accumulated with compensated summation.
    pub fn log_det(&self) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for i in 0..self.dim {
            let term = self.data[self.slot(i, i)].ln();
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        2.0 * sum
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower(&self, b: &mut [f64]) {
        for i in 0..self.dim {
            let jmin = i.saturating_sub(self.band);
            let mut acc = b[i];
            for j in jmin..i {
                acc -= self.data[self.slot(i, j)] * b[j];
            }
            b[i] = acc / self.data[self.slot(i, i)];
        }
    }

    /// Solves `L^T x = b` in place.
    pub fn solve_upper(&self, b: &mut [f64]) {
        for i in (0..self.dim).rev() {
            let kmax = (i + self.band).min(self.dim - 1);
            let mut acc = b[i];
            for k in (i + 1)..=kmax {
                acc -= self.data[self.slot(k, i)] * b[k];
            }
            b[i] = acc / self.data[self.slot(i, i)];
        }
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        self.solve_lower(b);
        self.solve_upper(b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_from(m: &BandMatrix) -> Vec<Vec<f64>> {
        (0..m.dim())
            .map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect())
            .collect()
    }

    fn tridiagonal(dim: usize, diag: f64, off: f64) -> BandMatrix {
        let mut m = BandMatrix::zeros(dim, 1);
        for i in 0..dim {
            m.add_lower(i, i, diag);
            if i > 0 {
                m.add_lower(i, i - 1, off);
            }
        }
        m
    }

    #[test]
    fn cholesky_matches_known_tridiagonal_determinant() {
        // det of the n x n tridiagonal with 2 on the diagonal and -1 off it
        // is n + 1.
        for dim in 1..=12 {
            let m = tridiagonal(dim, 2.0, -1.0);
            let f = m.cholesky().unwrap();
            let expected = ((dim + 1) as f64).ln();
            assert!((f.log_det() - expected).abs() < 1e-12, "dim={dim}");
        }
    }

    #[test]
    fn solve_inverts_matvec() {
        let m = tridiagonal(9, 3.0, 1.0);
        let f = m.cholesky().unwrap();
        let x: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut y = vec![0.0; 9];
        m.matvec(&x, &mut y);
        f.solve(&mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_form_agrees_with_dense_evaluation() {
        let mut m = BandMatrix::zeros(6, 2);
        for i in 0..6 {
            m.add_lower(i, i, 4.0 + i as f64);
            for j in i.saturating_sub(2)..i {
                m.add_lower(i, j, 0.3 * (i + j) as f64);
            }
        }
        let dense = dense_from(&m);
        let x: Vec<f64> = (0..6).map(|i| 1.0 - 0.4 * i as f64).collect();
        let mut expected = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                expected += x[i] * dense[i][j] * x[j];
            }
        }
        assert!((m.quadratic(&x) - expected).abs() < 1e-12);
    }

    #[test]
    fn indefinite_matrix_is_reported() {
        let mut m = BandMatrix::zeros(3, 1);
        m.add_lower(0, 0, 1.0);
        m.add_lower(1, 1, -2.0);
        m.add_lower(2, 2, 1.0);
        match m.cholesky() {
            Err(Error::NotPositiveDefinite { row, .. }) => assert_eq!(row, 1),
            other => panic!("expected indefiniteness, got {other:?}"),
        }
    }
}
