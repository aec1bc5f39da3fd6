//! U(N) and Hermitian-matrix primitives: Haar sampling, the plaquette
//! potential `phi(U) = Re Tr(I - U)`, Hilbert–Schmidt geometry, the matrix
//! exponential `H ↦ e^{iH}`, GUE draws, and small-ball constants of the Haar
//! measure near the identity.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::tol;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const TAU: f64 = std::f64::consts::TAU;

/// An N×N unitary matrix (`U^H U = I` within construction tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    /// Wraps a matrix after checking unitarity to the construction tolerance.
    pub fn try_new(m: CMatrix) -> Result<Self> {
        let defect = m.unitarity_defect();
        if defect > tol::CONSTRUCTION {
            return Err(Error::Precondition(format!(
                "matrix is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(UnitaryMatrix(m))
    }

    /// Wraps without checking; for products and rearrangements of matrices
    /// that are unitary by construction.
    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        UnitaryMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix(CMatrix::identity(n))
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn mul(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(self.0.mul(&rhs.0))
    }

    /// The inverse, which for a unitary matrix is the conjugate transpose.
    pub fn inverse(&self) -> UnitaryMatrix {
        UnitaryMatrix(self.0.adjoint())
    }
}

/// `phi(U) = Re Tr(I - U)`, the per-plaquette potential of the Wilson action.
pub fn phi(u: &UnitaryMatrix) -> f64 {
    u.order() as f64 - u.as_matrix().trace().re
}

/// Hilbert–Schmidt distance between two matrices of equal order.
pub fn hs_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    a.hs_distance(b)
}

/// An N×N Hermitian matrix stored through its N² canonical real coordinates:
/// the diagonal `y_jj` followed by `(z_jk, w_jk)` for `j < k` in
/// lexicographic order, with off-diagonal entries `(z + i w)/√2`.
///
/// The coordinate map is an isometry onto Euclidean N²-space, so the
/// Hilbert–Schmidt norm is the plain Euclidean norm of the coordinates, and
/// Hermiticity holds exactly by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    coords: Vec<f64>,
}

impl HermitianMatrix {
    pub fn zero(n: usize) -> Self {
        HermitianMatrix {
            n,
            coords: vec![0.0; n * n],
        }
    }

    pub fn from_coords(n: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: coords.len(),
            });
        }
        Ok(HermitianMatrix { n, coords })
    }

    /// Extracts coordinates from a matrix, requiring Hermiticity within the
    /// construction tolerance.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        let n = m.order();
        let defect = m.hs_distance(&m.adjoint())?;
        if defect > tol::CONSTRUCTION * (1.0 + m.hs_norm()) {
            return Err(Error::Precondition(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let mut h = HermitianMatrix::zero(n);
        for j in 0..n {
            h.coords[j] = m.get(j, j).re;
            for k in (j + 1)..n {
                let a = (m.get(j, k) + m.get(k, j).conj()) * 0.5;
                let slot = h.pair_slot(j, k);
                h.coords[slot] = SQRT_2 * a.re;
                h.coords[slot + 1] = SQRT_2 * a.im;
            }
        }
        Ok(h)
    }

    fn pair_slot(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < k && k < self.n);
        let pair_rank = j * self.n - j * (j + 1) / 2 + (k - j - 1);
        self.n + 2 * pair_rank
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Complex64::new(self.coords[i], 0.0),
            Less => {
                let s = self.pair_slot(i, j);
                Complex64::new(self.coords[s], self.coords[s + 1]) / SQRT_2
            }
            Greater => {
                let s = self.pair_slot(j, i);
                Complex64::new(self.coords[s], -self.coords[s + 1]) / SQRT_2
            }
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self.entry(i, j))
    }

    /// Hilbert–Schmidt norm, equal to the Euclidean norm of the coordinates.
    pub fn hs_norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix {
            n: self.n,
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn sub(&self, rhs: &HermitianMatrix) -> HermitianMatrix {
        debug_assert_eq!(self.n, rhs.n);
        HermitianMatrix {
            n: self.n,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Haar-distributed unitary matrix: orthonormalize a matrix of i.i.d.
/// standard complex Gaussians; the implied triangular factor has positive
/// real diagonal, which fixes the phases correctly.
pub fn haar_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if n < 1 {
        return Err(Error::OrderTooSmall(n));
    }
    // A degenerate Gaussian draw has probability zero; redraw on numerical
    // rank deficiency.
    for _ in 0..64 {
        let mut g = CMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if g.orthonormalize_columns().is_ok() {
            return Ok(UnitaryMatrix::new_unchecked(g));
        }
    }
    Err(Error::Precondition(
        "persistent rank deficiency in Haar sampling".into(),
    ))
}

/// GUE draw: all N² canonical coordinates are i.i.d. standard real Gaussians
/// (diagonal entries standard normal, off-diagonal `(z + i w)/√2`).
pub fn gue_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HermitianMatrix> {
    if n < 1 {
        return Err(Error::OrderTooSmall(n));
    }
    let coords = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    Ok(HermitianMatrix { n, coords })
}

/// `e^{iH}` via eigendecomposition `H = V Λ V^H`, so the result is unitary
/// up to roundoff regardless of ‖H‖.
pub fn exp_hermitian(h: &HermitianMatrix) -> UnitaryMatrix {
    let (vals, v) = hermitian_eigen(&h.to_matrix());
    let n = h.order();
    let mut scaled = CMatrix::zeros(n);
    for j in 0..n {
        let eig = Complex64::from_polar(1.0, vals[j]);
        for i in 0..n {
            scaled.set(i, j, v.get(i, j) * eig);
        }
    }
    UnitaryMatrix::new_unchecked(scaled.mul_adjoint(&v))
}

/// Result of checking the two-sided Lipschitz bounds of `ψ(H) = e^{iH}` on
/// the ball of radius `r`:
/// `(2 - e^r)‖H1-H2‖ ≤ ‖ψ(H1)-ψ(H2)‖ ≤ e^r‖H1-H2‖`.
#[derive(Debug, Clone, Copy)]
pub struct ExpMapBounds {
    /// `‖ψ(H1)-ψ(H2)‖ / ((2-e^r)‖H1-H2‖)`; at least 1 when the lower bound
    /// holds, `+∞` when `2 - e^r ≤ 0` makes it vacuous, 1 for `H1 = H2`.
    pub ratio_lower: f64,
    /// `‖ψ(H1)-ψ(H2)‖ / (e^r‖H1-H2‖)`; at most 1 when the upper bound holds.
    pub ratio_upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn exp_map_bounds_check(
    h1: &HermitianMatrix,
    h2: &HermitianMatrix,
    r: f64,
) -> Result<ExpMapBounds> {
    if h1.order() != h2.order() {
        return Err(Error::DimensionMismatch {
            expected: h1.order(),
            got: h2.order(),
        });
    }
    if h1.hs_norm() > r || h2.hs_norm() > r {
        return Err(Error::Precondition(format!(
            "both matrices must lie in the ball of radius {r}"
        )));
    }
    let diff = h1.sub(h2).hs_norm();
    if diff == 0.0 {
        return Ok(ExpMapBounds {
            ratio_lower: 1.0,
            ratio_upper: 1.0,
            lower_holds: true,
            upper_holds: true,
        });
    }
    let psi_diff = exp_hermitian(h1)
        .as_matrix()
        .hs_distance(exp_hermitian(h2).as_matrix())?;
    let lower_factor = 2.0 - r.exp();
    let slop = 1.0 + 1e-12;
    let (ratio_lower, lower_holds) = if lower_factor > 0.0 {
        let ratio = psi_diff / (lower_factor * diff);
        (ratio, ratio * slop >= 1.0)
    } else {
        (f64::INFINITY, true)
    };
    let ratio_upper = psi_diff / (r.exp() * diff);
    Ok(ExpMapBounds {
        ratio_lower,
        ratio_upper,
        lower_holds,
        upper_holds: ratio_upper <= slop,
    })
}

/// The two closed-form constants of the small-ball asymptotics near the
/// identity of U(N).
#[derive(Debug, Clone, Copy)]
pub struct SmallBallConstant {
    pub order: usize,
    /// `lim_{δ→0} σ(‖I-U‖ ≤ δ)/δ^{N²}
    ///  = ∏_{j=1}^{N-1} j! / ((2π)^{N/2} 2^{N²/2} Γ(N²/2 + 1))`.
    pub value: f64,
    /// `C_N = ∏_{j=1}^{N-1} j! / (2π)^{N(N+1)/2}`, the density of the Haar
    /// measure against Lebesgue measure on Hermitian matrices near 0.
    pub lie_constant: f64,
}

/// Evaluates both constants exactly, in log-domain arithmetic.
pub fn small_ball_constant(n: usize) -> Result<SmallBallConstant> {
    if n < 1 {
        return Err(Error::OrderTooSmall(n));
    }
    let nf = n as f64;
    let log_superfact: f64 = (1..n).map(|j| ln_gamma(j as f64 + 1.0)).sum();
    let n2 = nf * nf;
    let log_value =
        log_superfact - 0.5 * nf * TAU.ln() - 0.5 * n2 * 2f64.ln() - ln_gamma(0.5 * n2 + 1.0);
    let log_lie = log_superfact - 0.5 * nf * (nf + 1.0) * TAU.ln();
    Ok(SmallBallConstant {
        order: n,
        value: log_value.exp(),
        lie_constant: log_lie.exp(),
    })
}

/// Monte Carlo estimate of `σ({U : ‖I-U‖ ≤ δ})` with its binomial standard
/// error. Requires `0 < δ < √N` (the diameter of U(N) is `2√N`, but the
/// asymptotic regime of interest sits below `√N`).
pub fn small_ball_estimate<R: Rng + ?Sized>(
    n: usize,
    delta: f64,
    samples: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::OrderTooSmall(n));
    }
    if !(delta > 0.0 && delta < (n as f64).sqrt()) {
        return Err(Error::Precondition(format!(
            "delta must lie in (0, sqrt(N)) = (0, {}), got {delta}",
            (n as f64).sqrt()
        )));
    }
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let mut hits = 0u64;
    for _ in 0..samples {
        let u = haar_sample(n, rng)?;
        if u.as_matrix().hs_distance_to_identity() <= delta {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let stderr = (p * (1.0 - p) / samples as f64).sqrt();
    Ok((p, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn phi_trivial_cases() {
        assert_eq!(phi(&UnitaryMatrix::identity(3)), 0.0);
        // N=1, U = -1.
        let m = CMatrix::from_fn(1, |_, _| Complex64::new(-1.0, 0.0));
        assert_eq!(phi(&UnitaryMatrix::try_new(m).unwrap()), 2.0);
        // N=2, U = diag(i, -i).
        let m = CMatrix::from_fn(2, |i, j| {
            if i == j {
                Complex64::new(0.0, if i == 0 { 1.0 } else { -1.0 })
            } else {
                Complex64::ZERO
            }
        });
        assert!((phi(&UnitaryMatrix::try_new(m).unwrap()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn phi_equals_half_squared_distance_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            for _ in 0..1000 {
                let u = haar_sample(n, &mut rng).unwrap();
                let lhs = phi(&u);
                let d = u.as_matrix().hs_distance_to_identity();
                assert!((lhs - 0.5 * d * d).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn haar_samples_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=5 {
            let u = haar_sample(n, &mut rng).unwrap();
            assert!(u.as_matrix().unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn left_invariance_of_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let u = haar_sample(3, &mut rng).unwrap();
            let v = haar_sample(3, &mut rng).unwrap();
            let lhs = v.as_matrix().hs_distance(u.as_matrix()).unwrap();
            let rhs = v
                .inverse()
                .mul(&u)
                .as_matrix()
                .hs_distance_to_identity();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_triangle_over_products_and_inverse_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let u1 = haar_sample(2, &mut rng).unwrap();
            let u2 = haar_sample(2, &mut rng).unwrap();
            let prod = u1.mul(&u2);
            let lhs = prod.as_matrix().hs_distance_to_identity();
            let rhs = u1.as_matrix().hs_distance_to_identity()
                + u2.as_matrix().hs_distance_to_identity();
            assert!(lhs <= rhs + 1e-12);
            let inv = u1.inverse().as_matrix().hs_distance_to_identity();
            assert!((inv - u1.as_matrix().hs_distance_to_identity()).abs() < 1e-12);
        }
    }

    #[test]
    fn hs_distance_rejects_mismatched_orders() {
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert!(matches!(
            hs_distance(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exp_hermitian_basics() {
        assert!(
            exp_hermitian(&HermitianMatrix::zero(3))
                .as_matrix()
                .hs_distance_to_identity()
                < 1e-15
        );
        // N=1, H = pi -> e^{i pi} = -1.
        let h = HermitianMatrix::from_coords(1, vec![PI]).unwrap();
        let u = exp_hermitian(&h);
        assert!((u.as_matrix().get(0, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn exp_hermitian_cubic_remainder_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let g = gue_sample(3, &mut rng).unwrap();
            let h = g.scale(0.1 / g.hs_norm());
            let u = exp_hermitian(&h);
            let hm = h.to_matrix();
            let taylor = CMatrix::identity(3)
                .add(&hm.scale(Complex64::new(0.0, 1.0)))
                .sub(&hm.mul(&hm).scale(Complex64::new(0.5, 0.0)));
            let err = u.as_matrix().hs_distance(&taylor).unwrap();
            assert!(err <= 0.1f64.powi(3) / 6.0 + 1e-14, "err {err}");
        }
    }

    #[test]
    fn exp_hermitian_eigenvalues_on_unit_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=4 {
            let h = gue_sample(n, &mut rng).unwrap();
            let u = exp_hermitian(&h);
            assert!(u.as_matrix().unitarity_defect() < 1e-12);
            for angle in crate::linalg::eigenangles(u.as_matrix()) {
                assert!(angle.is_finite());
            }
        }
    }

    #[test]
    fn exp_map_bounds_identity_case_and_preconditions() {
        let h = HermitianMatrix::zero(2);
        let b = exp_map_bounds_check(&h, &h, 0.1).unwrap();
        assert_eq!(b.ratio_lower, 1.0);
        assert_eq!(b.ratio_upper, 1.0);
        let big = HermitianMatrix::from_coords(2, vec![5.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(exp_map_bounds_check(&big, &h, 0.1).is_err());
    }

    #[test]
    fn exp_map_bounds_hold_for_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &r in &[0.1, 0.5] {
            for _ in 0..200 {
                let a = gue_sample(2, &mut rng).unwrap();
                let b = gue_sample(2, &mut rng).unwrap();
                let h1 = a.scale(r * rng.random::<f64>() / a.hs_norm());
                let h2 = b.scale(r * rng.random::<f64>() / b.hs_norm());
                let res = exp_map_bounds_check(&h1, &h2, r).unwrap();
                assert!(res.lower_holds, "lower bound failed at r={r}");
                assert!(res.upper_holds, "upper bound failed at r={r}");
            }
        }
    }

    #[test]
    fn small_ball_constants_match_hand_evaluations() {
        // N=1: 1/((2π)^{1/2} 2^{1/2} Γ(3/2)) = 1/π.
        let c1 = small_ball_constant(1).unwrap();
        assert!((c1.value - 1.0 / PI).abs() < 1e-14);
        // N=2: empty product, (2π)·2²·Γ(3) = 16π.
        let c2 = small_ball_constant(2).unwrap();
        assert!((c2.value - 1.0 / (16.0 * PI)).abs() < 1e-15);
        // Lie constants: C_1 = 1/(2π), C_2 = 1/(2π)³.
        assert!((c1.lie_constant - 1.0 / TAU).abs() < 1e-15);
        assert!((c2.lie_constant - TAU.powi(-3)).abs() < 1e-18);
        assert!(small_ball_constant(5).unwrap().value > 0.0);
        assert!(small_ball_constant(0).is_err());
    }

    #[test]
    fn small_ball_estimate_rejects_out_of_range_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(small_ball_estimate(1, 2.0, 10, &mut rng).is_err());
        assert!(small_ball_estimate(1, 0.0, 10, &mut rng).is_err());
        assert!(small_ball_estimate(1, 0.5, 0, &mut rng).is_err());
    }

    #[test]
    fn gue_coordinates_match_matrix_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = gue_sample(3, &mut rng).unwrap();
        let m = h.to_matrix();
        assert!(m.hs_distance(&m.adjoint()).unwrap() < 1e-15);
        // Isometry: coordinate norm equals Hilbert-Schmidt norm.
        assert!((h.hs_norm() - m.hs_norm()).abs() < 1e-12);
        let back = HermitianMatrix::from_matrix(&m).unwrap();
        for (a, b) in back.coords().iter().zip(h.coords()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
