//! Lattice Maxwell theory: the quadratic form over free edges obtained by
//! freezing a superset of the axial edges, its log-determinant and the
//! constant `K_{n,d} = -log det M_n^0 / (2 n^d)`, the Maxwell free energy
//! `F_M(B_n) = K_{n,d} + (|E_n^1| / 2n^d) log 2π`, extrapolation of `K_d`,
//! and exact sampling from the associated Gaussian measure.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::band::{BandCholesky, BandMatrix};
use crate::error::{Error, Result};
use crate::lattice::{EdgeClass, Lattice};

/// Frozen-edge assignment `θ`. Assembly requires the keys to cover every
/// axial edge; any further edges may be frozen on top of that.
#[derive(Debug, Clone, Default)]
pub struct FrozenEdges {
    values: BTreeMap<usize, f64>,
}

impl FrozenEdges {
    /// Freezes exactly the axial edges, all at θ = 0. This is the standard
    /// form whose determinant defines `K_{n,d}`.
    pub fn axial_zero(lat: &Lattice) -> Self {
        let values = lat
            .edges()
            .iter()
            .filter(|e| e.class == EdgeClass::Axial)
            .map(|e| (e.index, 0.0))
            .collect();
        FrozenEdges { values }
    }

    pub fn from_map(values: BTreeMap<usize, f64>) -> Self {
        FrozenEdges { values }
    }

    /// Freezes an additional edge at the given value.
    pub fn set(&mut self, edge: usize, theta: f64) {
        self.values.insert(edge, theta);
    }

    pub fn values(&self) -> &BTreeMap<usize, f64> {
        &self.values
    }
}

/// Scalar field on the unfrozen edges of a model, in variable order. For the
/// standard form (axial edges frozen) the variable order coincides with the
/// dense free-edge indexing of the lattice.
#[derive(Debug, Clone)]
pub struct EdgeField {
    values: Vec<f64>,
}

impl EdgeField {
    pub fn zeros(dim: usize) -> Self {
        EdgeField {
            values: vec![0.0; dim],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        EdgeField { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// The quadratic form `M_{E,θ,n}(t) = t^T Q t + v^T t + c` on the unfrozen
/// edges, with `Q` banded positive definite.
#[derive(Debug)]
pub struct QuadraticModel {
    lat: Arc<Lattice>,
    frozen: BTreeMap<usize, f64>,
    var_of_edge: Vec<usize>,
    edge_of_var: Vec<usize>,
    q: BandMatrix,
    v: Vec<f64>,
    c: f64,
    chol: OnceLock<Result<BandCholesky>>,
}

/// Assembles `M_{E,θ,n}` for the given frozen set. Fails if an axial edge is
/// missing from the frozen set (the form would be degenerate) or if a key is
/// not a valid edge index.
pub fn assemble_form(lat: &Arc<Lattice>, frozen: &FrozenEdges) -> Result<QuadraticModel> {
    let n_edges = lat.edges().len();
    for &e in frozen.values().keys() {
        if e >= n_edges {
            return Err(Error::InvalidEdge(e));
        }
    }
    for e in lat.edges() {
        if e.class == EdgeClass::Axial && !frozen.values().contains_key(&e.index) {
            return Err(Error::MissingAxialEdge(e.index));
        }
    }

    let mut var_of_edge = vec![usize::MAX; n_edges];
    let mut edge_of_var = Vec::new();
    for e in lat.edges() {
        if !frozen.values().contains_key(&e.index) {
            var_of_edge[e.index] = edge_of_var.len();
            edge_of_var.push(e.index);
        }
    }
    let dim = edge_of_var.len();

    // Bandwidth: maximal variable-index spread inside a plaquette.
    let mut band = 0usize;
    for p in lat.plaquettes() {
        let mut lo = usize::MAX;
        let mut hi = 0usize;
        for &(e, _) in &p.edges {
            let v = var_of_edge[e];
            if v != usize::MAX {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if lo != usize::MAX {
            band = band.max(hi - lo);
        }
    }

    let mut q = BandMatrix::zeros(dim, band);
    let mut v = vec![0.0; dim];
    let mut c = 0.0;
    let mut vars: Vec<(usize, f64)> = Vec::with_capacity(4);
    for p in lat.plaquettes() {
        vars.clear();
        let mut fixed = 0.0;
        for &(e, sign) in &p.edges {
            let s = sign as f64;
            match var_of_edge[e] {
                usize::MAX => fixed += s * frozen.values()[&e],
                var => vars.push((var, s)),
            }
        }
        for &(vi, si) in &vars {
            for &(vj, sj) in &vars {
                if vj <= vi {
                    q.add_lower(vi, vj, si * sj);
                }
            }
            v[vi] += 2.0 * si * fixed;
        }
        c += fixed * fixed;
    }

    Ok(QuadraticModel {
        lat: Arc::clone(lat),
        frozen: frozen.values().clone(),
        var_of_edge,
        edge_of_var,
        q,
        v,
        c,
        chol: OnceLock::new(),
    })
}

impl QuadraticModel {
    pub fn dim(&self) -> usize {
        self.edge_of_var.len()
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    /// Global edge index of each variable, in variable order.
    pub fn variable_edges(&self) -> &[usize] {
        &self.edge_of_var
    }

    /// Variable index of a global edge, if it is unfrozen.
    pub fn variable_of_edge(&self, edge: usize) -> Option<usize> {
        match self.var_of_edge.get(edge) {
            Some(&v) if v != usize::MAX => Some(v),
            _ => None,
        }
    }

    pub fn frozen(&self) -> &BTreeMap<usize, f64> {
        &self.frozen
    }

    /// Evaluates `t^T Q t + v^T t + c`.
    pub fn evaluate(&self, t: &EdgeField) -> Result<f64> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: t.len(),
            });
        }
        let x = t.values();
        let linear: f64 = self.v.iter().zip(x).map(|(a, b)| a * b).sum();
        Ok(self.q.quadratic(x) + linear + self.c)
    }

    fn factor(&self) -> Result<&BandCholesky> {
        let r = self.chol.get_or_init(|| self.q.cholesky());
        match r {
            Ok(f) => Ok(f),
            Err(_) => {
                // Re-run to surface an owned copy of the error.
                Err(self.q.cholesky().unwrap_err())
            }
        }
    }

    /// `log det Q` via the Cholesky factor; zero-dimensional models have
    /// log-determinant 0 by the empty-product convention.
    pub fn log_det(&self) -> Result<f64> {
        if self.dim() == 0 {
            return Ok(0.0);
        }
        Ok(self.factor()?.log_det())
    }

    /// Exact sampler for the Gaussian measure with density `∝ e^{-M(t)}`.
    pub fn sampler(&self) -> Result<GaussianSampler<'_>> {
        let dim = self.dim();
        if dim == 0 {
            return Ok(GaussianSampler {
                chol: None,
                mean: Vec::new(),
            });
        }
        let chol = self.factor()?;
        // μ = -Σ v with Σ = Q^{-1}/2.
        let mut mean = self.v.clone();
        chol.solve(&mut mean);
        for m in mean.iter_mut() {
            *m *= -0.5;
        }
        Ok(GaussianSampler {
            chol: Some(chol),
            mean,
        })
    }

    /// Covariance entry `Σ_ij = (Q^{-1})_ij / 2` of the Gaussian measure.
    pub fn covariance(&self, i: usize, j: usize) -> Result<f64> {
        let chol = self.factor()?;
        let mut e = vec![0.0; self.dim()];
        e[j] = 1.0;
        chol.solve(&mut e);
        Ok(0.5 * e[i])
    }

    /// Power-iteration estimates of the extremal eigenvalues of `Q`.
    pub fn extremal_eigenvalues(&self, iterations: usize) -> Result<(f64, f64)> {
        let dim = self.dim();
        if dim == 0 {
            return Err(Error::Precondition("empty model".into()));
        }
        let chol = self.factor()?;
        let mut x: Vec<f64> = (0..dim).map(|i| 1.0 + (1.7 * i as f64).sin()).collect();
        normalize(&mut x);
        let mut y = vec![0.0; dim];
        let mut lambda_max = 0.0;
        for _ in 0..iterations {
            self.q.matvec(&x, &mut y);
            lambda_max = dot(&x, &y);
            std::mem::swap(&mut x, &mut y);
            normalize(&mut x);
        }
        let mut x: Vec<f64> = (0..dim).map(|i| 1.0 + (0.9 * i as f64).cos()).collect();
        normalize(&mut x);
        let mut lambda_min = 0.0;
        for _ in 0..iterations {
            let mut z = x.clone();
            chol.solve(&mut z);
            // Rayleigh quotient of Q^{-1} is 1/λ at convergence.
            let rq = dot(&x, &z);
            lambda_min = 1.0 / rq;
            x = z;
            normalize(&mut x);
        }
        Ok((lambda_min, lambda_max))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

/// Draws from the Gaussian measure `∝ e^{-M(t)}`: mean `μ = -Q^{-1} v / 2`
/// and covariance `Q^{-1}/2`, realized as `μ + L^{-T} z / √2`.
pub struct GaussianSampler<'a> {
    chol: Option<&'a BandCholesky>,
    mean: Vec<f64>,
}

impl GaussianSampler<'_> {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EdgeField {
        let dim = self.mean.len();
        let mut z: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(chol) = self.chol {
            chol.solve_upper(&mut z);
        }
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for (zi, mi) in z.iter_mut().zip(&self.mean) {
            *zi = *zi * inv_sqrt2 + mi;
        }
        EdgeField::from_values(z)
    }
}

/// `K_{n,d} = -log det M_n^0 / (2 n^d)`.
pub fn knd(lat: &Arc<Lattice>) -> Result<f64> {
    let model = assemble_form(lat, &FrozenEdges::axial_zero(lat))?;
    let logdet = model.log_det()?;
    Ok(-logdet / (2.0 * lat.vertex_count() as f64))
}

/// Maxwell free energy per site, `F_M(B_n) = K_{n,d} + (|E_n^1|/2n^d) log 2π`.
pub fn maxwell_free_energy(lat: &Arc<Lattice>) -> Result<f64> {
    let k = knd(lat)?;
    let free = lat.free_edge_count() as f64;
    let sites = lat.vertex_count() as f64;
    Ok(k + free / (2.0 * sites) * std::f64::consts::TAU.ln())
}

/// Result of extrapolating `K_{n,d} → K_d` with the model `K + a/n`.
#[derive(Debug, Clone)]
pub struct KdEstimate {
    pub kd: f64,
    /// Max |fit residual| plus the gap between the largest-n data point and
    /// the extrapolated value.
    pub uncertainty: f64,
    /// Fitted `1/n` coefficient.
    pub slope: f64,
    pub residuals: Vec<f64>,
}

/// Least-squares fit of `K_{n,d} = K_d + a/n` over at least three increasing
/// box sizes.
pub fn extrapolate_kd(points: &[(usize, f64)]) -> Result<KdEstimate> {
    if points.len() < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 points to extrapolate, got {}",
            points.len()
        )));
    }
    if !points.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(Error::Precondition(
            "box sizes must be strictly increasing".into(),
        ));
    }
    let m = points.len() as f64;
    let (mut su, mut suu, mut sk, mut suk) = (0.0, 0.0, 0.0, 0.0);
    for &(n, k) in points {
        let u = 1.0 / n as f64;
        su += u;
        suu += u * u;
        sk += k;
        suk += u * k;
    }
    let det = m * suu - su * su;
    if det.abs() < 1e-300 {
        return Err(Error::Precondition("degenerate fit".into()));
    }
    let kd = (suu * sk - su * suk) / det;
    let slope = (m * suk - su * sk) / det;
    let residuals: Vec<f64> = points
        .iter()
        .map(|&(n, k)| k - (kd + slope / n as f64))
        .collect();
    let max_resid = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let last_gap = (points.last().unwrap().1 - kd).abs();
    Ok(KdEstimate {
        kd,
        uncertainty: max_resid + last_gap,
        slope,
        residuals,
    })
}

/// Monte Carlo estimate of the τ_n-probability that every listed free edge
/// carries a value of magnitude at most `η`. Returns `(1, 0)` for an empty
/// edge set.
pub fn maxwell_small_ball<R: Rng + ?Sized>(
    lat: &Arc<Lattice>,
    edges: &[usize],
    eta: f64,
    samples: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if edges.is_empty() {
        return Ok((1.0, 0.0));
    }
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::Precondition(format!(
            "eta must lie in (0, 1/2], got {eta}"
        )));
    }
    if samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let model = assemble_form(lat, &FrozenEdges::axial_zero(lat))?;
    let mut vars = Vec::with_capacity(edges.len());
    for &e in edges {
        if e >= lat.edges().len() {
            return Err(Error::InvalidEdge(e));
        }
        match model.variable_of_edge(e) {
            Some(v) => vars.push(v),
            None => {
                return Err(Error::Precondition(format!(
                    "edge {e} is axial; the subset must lie in the free edges"
                )))
            }
        }
    }
    let sampler = model.sampler()?;
    let mut hits = 0u64;
    for _ in 0..samples {
        let t = sampler.sample(rng);
        if vars.iter().all(|&v| t.values()[v].abs() <= eta) {
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

    fn lat(d: usize, n: usize) -> Arc<Lattice> {
        Arc::new(Lattice::new(d, n).unwrap())
    }

    #[test]
    fn single_plaquette_form_is_one_by_one_identity() {
        let lat = lat(2, 2);
        let model = assemble_form(&lat, &FrozenEdges::axial_zero(&lat)).unwrap();
        assert_eq!(model.dim(), 1);
        assert!((model.q.get(0, 0) - 1.0).abs() < 1e-15);
        assert_eq!(model.v, vec![0.0]);
        assert_eq!(model.c, 0.0);
        assert!((model.log_det().unwrap()).abs() < 1e-15);
        let zero = EdgeField::zeros(1);
        assert_eq!(model.evaluate(&zero).unwrap(), 0.0);
        let one = EdgeField::from_values(vec![1.0]);
        assert!((model.evaluate(&one).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_axial_edge_is_rejected() {
        let lat = lat(2, 3);
        let mut frozen = FrozenEdges::axial_zero(&lat);
        let first_axial = *frozen.values().keys().next().unwrap();
        let mut map = frozen.values().clone();
        map.remove(&first_axial);
        frozen = FrozenEdges::from_map(map);
        assert!(matches!(
            assemble_form(&lat, &frozen),
            Err(Error::MissingAxialEdge(e)) if e == first_axial
        ));
    }

    #[test]
    fn invalid_frozen_key_is_rejected() {
        let lat = lat(2, 2);
        let mut frozen = FrozenEdges::axial_zero(&lat);
        frozen.set(10_000, 1.0);
        assert!(matches!(
            assemble_form(&lat, &frozen),
            Err(Error::InvalidEdge(10_000))
        ));
    }

    #[test]
    fn diagonal_counts_plaquettes_containing_the_edge() {
        let lat = lat(2, 3);
        let model = assemble_form(&lat, &FrozenEdges::axial_zero(&lat)).unwrap();
        for (var, &edge) in model.variable_edges().iter().enumerate() {
            let expected = lat.plaquettes_of_edge(edge).len() as f64;
            let mut t = EdgeField::zeros(model.dim());
            t.values_mut()[var] = 1.0;
            let val = model.evaluate(&t).unwrap();
            assert!((val - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn variable_order_matches_free_indexing_for_standard_form() {
        let lat = lat(3, 3);
        let model = assemble_form(&lat, &FrozenEdges::axial_zero(&lat)).unwrap();
        for e in lat.free_edges() {
            assert_eq!(model.variable_of_edge(e.index), e.free_index);
        }
    }

    #[test]
    fn two_dimensional_log_det_vanishes() {
        for n in 2..=16 {
            let lat = lat(2, n);
            let model = assemble_form(&lat, &FrozenEdges::axial_zero(&lat)).unwrap();
            let ld = model.log_det().unwrap();
            assert!(ld.abs() < 1e-9, "n={n} logdet={ld}");
            assert!(knd(&lat).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn maxwell_free_energy_small_cases() {
        let l22 = lat(2, 2);
        let expected = std::f64::consts::TAU.ln() / 8.0;
        assert!((maxwell_free_energy(&l22).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_handles_exact_and_constant_inputs() {
        let zeros: Vec<(usize, f64)> = (2..=8).map(|n| (n, 0.0)).collect();
        let est = extrapolate_kd(&zeros).unwrap();
        assert!(est.kd.abs() < 1e-12);
        assert!(est.uncertainty < 1e-12);

        let consts: Vec<(usize, f64)> = vec![(4, 0.7), (6, 0.7), (8, 0.7)];
        let est = extrapolate_kd(&consts).unwrap();
        assert!((est.kd - 0.7).abs() < 1e-10);

        assert!(extrapolate_kd(&consts[..2]).is_err());
        let unsorted = vec![(6, 0.1), (4, 0.2), (8, 0.3)];
        assert!(extrapolate_kd(&unsorted).is_err());
    }

    #[test]
    fn small_ball_edge_cases() {
        use rand::SeedableRng;
        let lat = lat(2, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let (p, se) = maxwell_small_ball(&lat, &[], 0.3, 10, &mut rng).unwrap();
        assert_eq!((p, se), (1.0, 0.0));
        // Axial edge in the subset is rejected.
        let axial = lat
            .edges()
            .iter()
            .find(|e| e.class == EdgeClass::Axial)
            .unwrap()
            .index;
        assert!(maxwell_small_ball(&lat, &[axial], 0.3, 10, &mut rng).is_err());
        let free = lat.free_edges().next().unwrap().index;
        assert!(maxwell_small_ball(&lat, &[free], 0.6, 10, &mut rng).is_err());
    }
}
