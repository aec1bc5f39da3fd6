//! Wilson-action side of the model: unitary configurations on edges,
//! plaquette products, gauge transforms, axial gauge fixing, the lift of
//! Hermitian edge fields through `H ↦ e^{iH}`, and the gap between the
//! Wilson action and half the Maxwell action.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{EdgeClass, Lattice, Plaquette};
use crate::linalg::CMatrix;
use crate::maxwell::{assemble_form, EdgeField, FrozenEdges};
use crate::tol;
use crate::unitary::{exp_hermitian, haar_sample, phi, HermitianMatrix, UnitaryMatrix};

/// One unitary matrix per positively oriented edge; the reversed edge is
/// represented by the inverse (conjugate transpose), so only one copy is
/// stored.
#[derive(Debug, Clone)]
pub struct GaugeConfig {
    lat: Arc<Lattice>,
    order_n: usize,
    links: Vec<UnitaryMatrix>,
}

impl GaugeConfig {
    pub fn identity(lat: &Arc<Lattice>, order_n: usize) -> Self {
        GaugeConfig {
            lat: Arc::clone(lat),
            order_n,
            links: vec![UnitaryMatrix::identity(order_n); lat.edges().len()],
        }
    }

    /// Independent Haar matrices on every edge (the reference measure).
    pub fn haar<R: Rng + ?Sized>(lat: &Arc<Lattice>, order_n: usize, rng: &mut R) -> Result<Self> {
        let links = lat
            .edges()
            .iter()
            .map(|_| haar_sample(order_n, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaugeConfig {
            lat: Arc::clone(lat),
            order_n,
            links,
        })
    }

    /// A point of `U_0(B_n)`: identity on axial edges, Haar on free edges.
    pub fn haar_axial_fixed<R: Rng + ?Sized>(
        lat: &Arc<Lattice>,
        order_n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let links = lat
            .edges()
            .iter()
            .map(|e| match e.class {
                EdgeClass::Axial => Ok(UnitaryMatrix::identity(order_n)),
                EdgeClass::Free => haar_sample(order_n, rng),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GaugeConfig {
            lat: Arc::clone(lat),
            order_n,
            links,
        })
    }

    pub fn from_links(lat: &Arc<Lattice>, links: Vec<UnitaryMatrix>) -> Result<Self> {
        if links.len() != lat.edges().len() {
            return Err(Error::DimensionMismatch {
                expected: lat.edges().len(),
                got: links.len(),
            });
        }
        let order_n = links.first().map(|u| u.order()).unwrap_or(1);
        if links.iter().any(|u| u.order() != order_n) {
            return Err(Error::Precondition("links of mixed order".into()));
        }
        Ok(GaugeConfig {
            lat: Arc::clone(lat),
            order_n,
            links,
        })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    pub fn order(&self) -> usize {
        self.order_n
    }

    pub fn link(&self, edge: usize) -> &UnitaryMatrix {
        &self.links[edge]
    }

    /// Ordered product of the four boundary matrices of a plaquette, with
    /// inverses where the traversal runs against the positive orientation.
    pub fn plaquette_matrix(&self, p: &Plaquette) -> UnitaryMatrix {
        let m = plaquette_product(&self.links, p);
        UnitaryMatrix::new_unchecked(m)
    }

    /// Wilson action: `Σ_plaquettes phi(U(x,j,k))`, accumulated with
    /// compensated summation.
    pub fn wilson_action(&self) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for p in self.lat.plaquettes() {
            let term = phi(&self.plaquette_matrix(p));
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    /// Applies the gauge transform `V(x,y) = G(x) U(x,y) G(y)^{-1}`.
    pub fn gauge_transform(&self, g: &GaugeTransform) -> Result<GaugeConfig> {
        if g.order_n != self.order_n {
            return Err(Error::DimensionMismatch {
                expected: self.order_n,
                got: g.order_n,
            });
        }
        if g.lat.dimension() != self.lat.dimension() || g.lat.side() != self.lat.side() {
            return Err(Error::Precondition("gauge transform on a different box".into()));
        }
        let links = self
            .lat
            .edges()
            .iter()
            .map(|e| {
                let gt = &g.site[self.lat.vertex_index(&e.tail)];
                let gh = &g.site[self.lat.vertex_index(&e.head)];
                UnitaryMatrix::new_unchecked(
                    gt.as_matrix()
                        .mul(self.links[e.index].as_matrix())
                        .mul_adjoint(gh.as_matrix()),
                )
            })
            .collect();
        Ok(GaugeConfig {
            lat: Arc::clone(&self.lat),
            order_n: self.order_n,
            links,
        })
    }

    /// Axial gauge fixing: builds the transform `G_U` inductively along the
    /// lexicographic vertex order and returns `G_U · U`, which carries the
    /// identity on every axial edge and leaves the action unchanged.
    pub fn axial_gauge_fix(&self) -> GaugeConfig {
        let g = self.axial_fixing_transform();
        self.gauge_transform(&g).expect("transform built on same box")
    }

    /// The gauge transform used by `axial_gauge_fix`.
    pub fn axial_fixing_transform(&self) -> GaugeTransform {
        let lat = &self.lat;
        let d = lat.dimension();
        let n = lat.side();
        let nv = lat.vertex_count();
        let mut site: Vec<UnitaryMatrix> = Vec::with_capacity(nv);
        site.push(UnitaryMatrix::identity(self.order_n));
        let mut coords = vec![0i32; d];
        for v in 1..nv {
            // Advance the odometer to the coordinates of vertex v.
            for i in (0..d).rev() {
                if (coords[i] as usize) + 1 < n {
                    coords[i] += 1;
                    break;
                }
                coords[i] = 0;
            }
            let j = (0..d).rev().find(|&i| coords[i] != 0).expect("v > 0");
            let prev = v - lat.vertex_stride(j);
            let edge = lat
                .edge_at(prev, j)
                .expect("edge (x - e_j, x) exists inside the box");
            let g = site[prev].mul(&self.links[edge]);
            site.push(g);
        }
        GaugeTransform {
            lat: Arc::clone(lat),
            order_n: self.order_n,
            site,
        }
    }

    /// Whether every axial edge carries the identity within `tolerance`.
    pub fn is_axial_fixed(&self, tolerance: f64) -> bool {
        self.lat
            .edges()
            .iter()
            .filter(|e| e.class == EdgeClass::Axial)
            .all(|e| self.links[e.index].as_matrix().hs_distance_to_identity() <= tolerance)
    }
}

/// Shared product helper so the Monte Carlo sweep can reuse it on raw
/// matrices.
pub(crate) fn plaquette_product(links: &[UnitaryMatrix], p: &Plaquette) -> CMatrix {
    let (e1, _) = p.edges[0];
    let (e2, _) = p.edges[1];
    let (e3, _) = p.edges[2];
    let (e4, _) = p.edges[3];
    links[e1]
        .as_matrix()
        .mul(links[e2].as_matrix())
        .mul_adjoint(links[e3].as_matrix())
        .mul_adjoint(links[e4].as_matrix())
}

/// One unitary matrix per vertex.
#[derive(Debug, Clone)]
pub struct GaugeTransform {
    lat: Arc<Lattice>,
    order_n: usize,
    site: Vec<UnitaryMatrix>,
}

impl GaugeTransform {
    pub fn identity(lat: &Arc<Lattice>, order_n: usize) -> Self {
        GaugeTransform {
            lat: Arc::clone(lat),
            order_n,
            site: vec![UnitaryMatrix::identity(order_n); lat.vertex_count()],
        }
    }

    pub fn haar<R: Rng + ?Sized>(lat: &Arc<Lattice>, order_n: usize, rng: &mut R) -> Result<Self> {
        let site = (0..lat.vertex_count())
            .map(|_| haar_sample(order_n, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaugeTransform {
            lat: Arc::clone(lat),
            order_n,
            site,
        })
    }

    /// The constant transform `G(x) ≡ W`.
    pub fn constant(lat: &Arc<Lattice>, w: UnitaryMatrix) -> Self {
        GaugeTransform {
            lat: Arc::clone(lat),
            order_n: w.order(),
            site: vec![w; lat.vertex_count()],
        }
    }

    /// Pointwise product `(G1 G2)(x) = G1(x) G2(x)`.
    pub fn compose(&self, other: &GaugeTransform) -> GaugeTransform {
        GaugeTransform {
            lat: Arc::clone(&self.lat),
            order_n: self.order_n,
            site: self
                .site
                .iter()
                .zip(&other.site)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    pub fn site(&self, vertex_linear: usize) -> &UnitaryMatrix {
        &self.site[vertex_linear]
    }
}

/// One Hermitian matrix per free edge; axial edges implicitly carry zero and
/// the reversed edge carries the negation.
#[derive(Debug, Clone)]
pub struct HermitianField {
    lat: Arc<Lattice>,
    order_n: usize,
    mats: Vec<HermitianMatrix>,
}

impl HermitianField {
    pub fn zero(lat: &Arc<Lattice>, order_n: usize) -> Self {
        HermitianField {
            lat: Arc::clone(lat),
            order_n,
            mats: vec![HermitianMatrix::zero(order_n); lat.free_edge_count()],
        }
    }

    pub fn from_mats(lat: &Arc<Lattice>, mats: Vec<HermitianMatrix>) -> Result<Self> {
        if mats.len() != lat.free_edge_count() {
            return Err(Error::DimensionMismatch {
                expected: lat.free_edge_count(),
                got: mats.len(),
            });
        }
        let order_n = mats.first().map(|m| m.order()).unwrap_or(1);
        if mats.iter().any(|m| m.order() != order_n) {
            return Err(Error::Precondition("matrices of mixed order".into()));
        }
        Ok(HermitianField {
            lat: Arc::clone(lat),
            order_n,
            mats,
        })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lat
    }

    pub fn order(&self) -> usize {
        self.order_n
    }

    pub fn mats(&self) -> &[HermitianMatrix] {
        &self.mats
    }

    pub fn mats_mut(&mut self) -> &mut [HermitianMatrix] {
        &mut self.mats
    }

    /// Largest ‖H(x,y)‖ over the field.
    pub fn max_norm(&self) -> f64 {
        self.mats.iter().map(|m| m.hs_norm()).fold(0.0, f64::max)
    }

    /// Lifts the field to the configuration `U(x,y) = e^{iH(x,y)}`; axial
    /// edges map to the identity, so the result lies in `U_0(B_n)`.
    pub fn lift(&self) -> GaugeConfig {
        let links = self
            .lat
            .edges()
            .iter()
            .map(|e| match e.free_index {
                Some(f) => exp_hermitian(&self.mats[f]),
                None => UnitaryMatrix::identity(self.order_n),
            })
            .collect();
        GaugeConfig {
            lat: Arc::clone(&self.lat),
            order_n: self.order_n,
            links,
        }
    }

    /// Maxwell action `M_n(H) = Σ_plaquettes ‖H(x,j,k)‖²`, computed in the
    /// canonical real coordinates (the signed plaquette sum commutes with the
    /// coordinate isometry).
    pub fn maxwell_action(&self) -> f64 {
        let ncoords = self.order_n * self.order_n;
        let mut acc = vec![0.0f64; ncoords];
        let mut total = 0.0;
        for p in self.lat.plaquettes() {
            acc.fill(0.0);
            for &(e, sign) in &p.edges {
                if let Some(f) = self.lat.edge(e).free_index {
                    let s = sign as f64;
                    for (a, c) in acc.iter_mut().zip(self.mats[f].coords()) {
                        *a += s * c;
                    }
                }
            }
            total += acc.iter().map(|a| a * a).sum::<f64>();
        }
        total
    }

    /// The scalar field formed by one canonical coordinate of every free
    /// edge, aligned with the variable order of the standard Maxwell form.
    pub fn coordinate_field(&self, coord: usize) -> EdgeField {
        EdgeField::from_values(self.mats.iter().map(|m| m.coords()[coord]).collect())
    }
}

/// `|S(e^{iH}) - M_n(H)/2|` for a field with all edge norms at most `r ≤ 1`.
pub fn action_gap(h: &HermitianField, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Precondition(format!("r must lie in [0, 1], got {r}")));
    }
    let max = h.max_norm();
    if max > r * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "field norm {max} exceeds the stated radius {r}"
        )));
    }
    let wilson = h.lift().wilson_action();
    let maxwell = h.maxwell_action();
    Ok((wilson - 0.5 * maxwell).abs())
}

/// Outcome of checking `‖I - U(x,y)‖² ≤ 2 |x|₁ S(U)` on every edge of an
/// axially fixed configuration.
#[derive(Debug, Clone, Copy)]
pub struct PoincareReport {
    pub edges_checked: usize,
    pub violations: usize,
    /// Max of `‖I - U(x,y)‖² / (2 |x|₁ S)`, with 0/0 read as 0.
    pub max_ratio: f64,
    pub action: f64,
}

pub fn poincare_check(cfg: &GaugeConfig) -> Result<PoincareReport> {
    if !cfg.is_axial_fixed(tol::ALGEBRAIC) {
        return Err(Error::Precondition(
            "configuration is not axial-gauge fixed".into(),
        ));
    }
    let action = cfg.wilson_action();
    let mut max_ratio = 0.0f64;
    let mut violations = 0usize;
    for e in cfg.lat.edges() {
        let lhs = cfg.links[e.index].as_matrix().hs_distance_to_identity();
        let lhs2 = lhs * lhs;
        let bound = 2.0 * e.tail_l1() as f64 * action;
        if bound > 0.0 {
            max_ratio = max_ratio.max(lhs2 / bound);
            if lhs2 > bound * (1.0 + 1e-9) + 1e-12 {
                violations += 1;
            }
        } else if lhs2 > 1e-12 {
            violations += 1;
            max_ratio = f64::INFINITY;
        }
    }
    Ok(PoincareReport {
        edges_checked: cfg.lat.edges().len(),
        violations,
        max_ratio,
        action,
    })
}

/// Cross-check of the matrix decomposition `M_n(H) = Σ_coords M_n(t_coord)`:
/// evaluates the scalar Maxwell form on every coordinate field and sums.
pub fn maxwell_action_by_coordinates(h: &HermitianField) -> Result<f64> {
    let model = assemble_form(h.lattice(), &FrozenEdges::axial_zero(h.lattice()))?;
    let mut total = 0.0;
    for c in 0..h.order() * h.order() {
        total += model.evaluate(&h.coordinate_field(c))?;
    }
    Ok(total)
}
