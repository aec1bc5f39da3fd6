//! Shared oracles for the integration tests. Everything here is computed by
//! a route independent of the implementation it checks: quadrature, dense
//! linear algebra, or closed forms.
//!
//! Each test binary compiles this module separately, so not every oracle is
//! used from every binary.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

/// σ({U ∈ U(2): ‖I-U‖ ≤ δ}) by midpoint quadrature of the eigenangle (Weyl)
/// density `|e^{iθ1}-e^{iθ2}|² / (2(2π)²)` over the region
/// `2(1-cos θ1) + 2(1-cos θ2) ≤ δ²`.
pub fn small_ball_u2_quadrature(delta: f64) -> f64 {
    let a = 2.0 * (delta / 2.0).asin();
    let m = 4000usize;
    let h = 2.0 * a / m as f64;
    let mut acc = 0.0;
    for i in 0..m {
        let t1 = -a + h * (i as f64 + 0.5);
        let c1 = 2.0 * (1.0 - t1.cos());
        for j in 0..m {
            let t2 = -a + h * (j as f64 + 0.5);
            if c1 + 2.0 * (1.0 - t2.cos()) <= delta * delta {
                let diff = (num_complex::Complex64::from_polar(1.0, t1)
                    - num_complex::Complex64::from_polar(1.0, t2))
                .norm_sqr();
                acc += diff;
            }
        }
    }
    acc * h * h / (2.0 * TAU * TAU)
}

/// `E[1 - cos θ]` under the single-plaquette measure `∝ e^{-β(1-cos θ)}`,
/// by the trapezoid rule on the periodic integrand (spectrally accurate).
pub fn single_plaquette_mean_phi(beta: f64) -> f64 {
    let m = 8192usize;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..m {
        let theta = -PI + TAU * (i as f64 + 0.5) / m as f64;
        let phi = 1.0 - theta.cos();
        let w = (-beta * phi).exp();
        num += phi * w;
        den += w;
    }
    num / den
}

/// `log(e^{-β} I₀(β))` by the same quadrature (independent of the series /
/// asymptotic implementation in the crate).
pub fn log_z_quadrature(beta: f64) -> f64 {
    let m = 8192usize;
    let mut acc = 0.0;
    for i in 0..m {
        let theta = -PI + TAU * (i as f64 + 0.5) / m as f64;
        acc += (-beta * (1.0 - theta.cos())).exp();
    }
    (acc / m as f64).ln()
}

/// CDF of the χ² distribution with 4 degrees of freedom:
/// `P(χ²₄ ≤ x) = 1 - e^{-x/2}(1 + x/2)`.
pub fn chi2_4_cdf(x: f64) -> f64 {
    1.0 - (-x / 2.0).exp() * (1.0 + x / 2.0)
}

/// Dense log-determinant through LU with partial pivoting; fails on
/// non-positive determinants.
pub fn dense_logdet(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut log_abs = 0.0f64;
    let mut sign = 1.0f64;
    for col in 0..n {
        let (piv, piv_val) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        assert!(piv_val > 0.0, "singular matrix");
        if piv != col {
            a.swap(piv, col);
            sign = -sign;
        }
        let diag = a[col][col];
        log_abs += diag.abs().ln();
        if diag < 0.0 {
            sign = -sign;
        }
        for r in (col + 1)..n {
            let f = a[r][col] / diag;
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    assert!(sign > 0.0, "negative determinant");
    log_abs
}

/// Densifies the standard Maxwell form (axial edges frozen at zero) straight
/// from the plaquette enumeration.
pub fn dense_maxwell_matrix(lat: &lgt::lattice::Lattice) -> Vec<Vec<f64>> {
    let dim = lat.free_edge_count();
    let mut dense = vec![vec![0.0f64; dim]; dim];
    for p in lat.plaquettes() {
        let vars: Vec<(usize, f64)> = p
            .edges
            .iter()
            .filter_map(|&(e, s)| lat.edge(e).free_index.map(|v| (v, s as f64)))
            .collect();
        for &(vi, si) in &vars {
            for &(vj, sj) in &vars {
                dense[vi][vj] += si * sj;
            }
        }
    }
    dense
}
