//! Dense complex matrices of small order.
//!
//! Everything here is sized for the matrix orders that occur in practice
//! (N up to a handful); storage is inline up to 4×4 so the Monte Carlo hot
//! loops never touch the heap.

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

type Storage = SmallVec<[Complex64; 16]>;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    a: Storage,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            a: SmallVec::from_elem(Complex64::ZERO, n * n),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * rhs.a[k * n + j];
                }
            }
        }
        out
    }

    /// `self * rhs^H` without materializing the adjoint.
    pub fn mul_adjoint(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        CMatrix::from_fn(n, |i, j| {
            let mut acc = Complex64::ZERO;
            for k in 0..n {
                acc += self.a[i * n + k] * rhs.a[j * n + k].conj();
            }
            acc
        })
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(&rhs.a) {
            *x += *y;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(&rhs.a) {
            *x -= *y;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for x in out.a.iter_mut() {
            *x *= s;
        }
        out
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hs_distance(&self, rhs: &CMatrix) -> Result<f64> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.n,
            });
        }
        let mut acc = 0.0;
        for (x, y) in self.a.iter().zip(&rhs.a) {
            acc += (*x - *y).norm_sqr();
        }
        Ok(acc.sqrt())
    }

    /// ‖I - self‖ in Hilbert–Schmidt norm.
    pub fn hs_distance_to_identity(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut z = self.a[i * n + j];
                if i == j {
                    z -= Complex64::ONE;
                }
                acc += z.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// ‖self^H self - I‖; zero for exactly unitary matrices.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).hs_distance_to_identity()
    }

    /// Orthonormalizes the columns in place by modified Gram–Schmidt. The
    /// triangular factor of the implied QR has positive real diagonal, which
    /// is exactly the phase convention required for Haar sampling. Fails on
    /// numerically rank-deficient input.
    pub fn orthonormalize_columns(&mut self) -> Result<()> {
        let n = self.n;
        for k in 0..n {
            for j in 0..k {
                // proj = <q_j, v_k>
                let mut proj = Complex64::ZERO;
                for i in 0..n {
                    proj += self.a[i * n + j].conj() * self.a[i * n + k];
                }
                for i in 0..n {
                    let qij = self.a[i * n + j];
                    self.a[i * n + k] -= proj * qij;
                }
            }
            let norm: f64 = (0..n)
                .map(|i| self.a[i * n + k].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if norm < 1e-12 {
                return Err(Error::Precondition(
                    "rank-deficient matrix in orthonormalization".into(),
                ));
            }
            let inv = 1.0 / norm;
            for i in 0..n {
                self.a[i * n + k] *= inv;
            }
        }
        Ok(())
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, V)` with eigenvalues ascending and `A = V Λ V^H`.
/// Input is assumed Hermitian; only the Hermitian part is consulted.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.order();
    if n == 1 {
        return (vec![a.get(0, 0).re], CMatrix::identity(1));
    }
    // Work on the exactly Hermitian part to keep rotations stable.
    let mut m = CMatrix::from_fn(n, |i, j| (a.get(i, j) + a.get(j, i).conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let scale = m.hs_norm().max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let r = apq.norm();
                if r <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / r;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns p,q of the rotation: [[c, s], [-phase^* s, phase^* c]].
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;
                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, mip * c + miq * vqp);
                    m.set(i, q, mip * s + miq * vqq);
                }
                for j in 0..n {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, mpj * c + mqj * vqp.conj());
                    m.set(q, j, mpj * s + mqj * vqq.conj());
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c + viq * vqp);
                    v.set(i, q, vip * s + viq * vqq);
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (m.get(i, i).re, i)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let eigvals: Vec<f64> = pairs.iter().map(|&(l, _)| l).collect();
    let vsorted = CMatrix::from_fn(n, |i, j| v.get(i, pairs[j].1));
    (eigvals, vsorted)
}

/// Eigenvalue phases of a unitary (more generally, normal) matrix, in
/// `[-π, π)`, unsorted.
///
/// Uses the fact that a normal matrix shares eigenvectors with a generic real
/// combination of its Hermitian and skew-Hermitian parts.
pub fn eigenangles(u: &CMatrix) -> Vec<f64> {
    let n = u.order();
    if n == 1 {
        return vec![u.get(0, 0).arg()];
    }
    // (alpha, beta) pairs; retried if a degenerate combination is hit.
    let combos = [(1.0, 0.618_033_988_749_894_9), (0.329, 1.0), (1.0, -0.777)];
    let mut best: Option<(f64, Vec<f64>)> = None;
    for &(alpha, beta) in &combos {
        let herm = CMatrix::from_fn(n, |i, j| {
            let uij = u.get(i, j);
            let uji_c = u.get(j, i).conj();
            let re_part = (uij + uji_c) * 0.5;
            let im_part = (uij - uji_c) * Complex64::new(0.0, -0.5);
            re_part * alpha + im_part * beta
        });
        let (_, v) = hermitian_eigen(&herm);
        let d = v.adjoint().mul(&u.mul(&v));
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += d.get(i, j).norm_sqr();
                }
            }
        }
        let off = off.sqrt();
        let angles: Vec<f64> = (0..n).map(|i| d.get(i, i).arg()).collect();
        if off < 1e-8 * (n as f64) {
            return angles;
        }
        match &best {
            Some((b, _)) if *b <= off => {}
            _ => best = Some((off, angles)),
        }
    }
    best.expect("at least one combination attempted").1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            let d: f64 = rng.sample(StandardNormal);
            m.set(i, i, Complex64::new(d, 0.0));
            for j in (i + 1)..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                m.set(i, j, Complex64::new(re, im));
                m.set(j, i, Complex64::new(re, -im));
            }
        }
        m
    }

    #[test]
    fn jacobi_reconstructs_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for _ in 0..20 {
                let a = random_hermitian(n, &mut rng);
                let (vals, v) = hermitian_eigen(&a);
                assert!(v.unitarity_defect() < 1e-12, "V not unitary at n={n}");
                let lambda = CMatrix::from_fn(n, |i, j| {
                    if i == j {
                        Complex64::new(vals[i], 0.0)
                    } else {
                        Complex64::ZERO
                    }
                });
                let rebuilt = v.mul(&lambda).mul_adjoint(&v);
                let err = rebuilt.hs_distance(&a).unwrap();
                assert!(err < 1e-11 * a.hs_norm().max(1.0), "n={n} err={err}");
                for w in vals.windows(2) {
                    assert!(w[0] <= w[1]);
                }
            }
        }
    }

    #[test]
    fn gram_schmidt_produces_unitary_with_positive_diagonal_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            let g = CMatrix::from_fn(n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let mut q = g.clone();
            q.orthonormalize_columns().unwrap();
            assert!(q.unitarity_defect() < 1e-12);
            // R = Q^H G must have positive real diagonal.
            let r = q.adjoint().mul(&g);
            for i in 0..n {
                let rii = r.get(i, i);
                assert!(rii.re > 0.0);
                assert!(rii.im.abs() < 1e-10 * rii.re.max(1.0));
            }
        }
    }

    #[test]
    fn eigenangles_of_diagonal_unitary() {
        let u = CMatrix::from_fn(2, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, if i == 0 { 0.4 } else { -1.3 })
            } else {
                Complex64::ZERO
            }
        });
        let mut angles = eigenangles(&u);
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((angles[0] + 1.3).abs() < 1e-12);
        assert!((angles[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn eigenangles_of_conjugated_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4 {
            let mut w = CMatrix::from_fn(n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            w.orthonormalize_columns().unwrap();
            let thetas: Vec<f64> = (0..n).map(|i| -2.0 + 1.1 * i as f64).collect();
            let d = CMatrix::from_fn(n, |i, j| {
                if i == j {
                    Complex64::from_polar(1.0, thetas[i])
                } else {
                    Complex64::ZERO
                }
            });
            let u = w.mul(&d).mul_adjoint(&w);
            let mut angles = eigenangles(&u);
            angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut expected = thetas.clone();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, e) in angles.iter().zip(&expected) {
                assert!((a - e).abs() < 1e-9, "angle {a} vs {e}");
            }
        }
    }

    #[test]
    fn hs_norm_is_submultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let a = CMatrix::from_fn(3, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let b = CMatrix::from_fn(3, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            assert!(a.mul(&b).hs_norm() <= a.hs_norm() * b.hs_norm() + 1e-12);
        }
    }

    #[test]
    fn mul_adjoint_matches_explicit_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = CMatrix::from_fn(3, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let b = CMatrix::from_fn(3, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let d = a.mul_adjoint(&b).hs_distance(&a.mul(&b.adjoint())).unwrap();
        assert!(d < 1e-13);
    }
}
