//! Combinatorics of the box `{0, …, n-1}^d`: vertices, positively oriented
//! edges with their axial/free split, and plaquettes with signed boundaries.
//!
//! Everything is enumerated in a fixed deterministic order (lexicographic on
//! `(tail, axis)` for edges, on `(base, axis pair)` for plaquettes) so that
//! matrix assemblies and RNG streams are reproducible across runs.

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Vertex coordinates; inline storage covers every dimension used in practice.
pub type Coords = SmallVec<[i32; 4]>;

/// Hard cap on the side length. Desk-scale runs stay far below this; the cap
/// keeps coordinate arithmetic comfortably inside `i32`.
pub const MAX_SIDE: usize = 1 << 20;

/// Cap on the number of enumerated edges, to fail fast instead of exhausting
/// memory on absurd inputs.
const MAX_EDGES: u128 = 50_000_000;

/// Classification of a positively oriented edge.
///
/// `Axial` edges are the tree-like set fixed to the identity by axial gauge
/// fixing: `(x, x + e_j)` is axial exactly when every coordinate of `x` after
/// position `j` is zero. `Free` edges are the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    Axial,
    Free,
}

/// A positively oriented nearest-neighbour edge `(tail, tail + e_axis)`.
#[derive(Debug, Clone)]
pub struct Edge {
    pub tail: Coords,
    pub head: Coords,
    /// Coordinate direction, 0-based (`head = tail + e_axis`).
    pub axis: usize,
    pub class: EdgeClass,
    /// Position in the global enumeration order.
    pub index: usize,
    /// Dense id among free edges (`0..free_edge_count`), in enumeration order.
    pub free_index: Option<usize>,
}

impl Edge {
    /// ℓ¹ norm of the tail vertex.
    pub fn tail_l1(&self) -> u64 {
        self.tail.iter().map(|&c| c.unsigned_abs() as u64).sum()
    }
}

/// The unit square `(base, axes.0, axes.1)` with its four boundary edges.
///
/// `edges` lists `(edge index, sign)` in traversal order
/// `x → x+e_j → x+e_j+e_k → x+e_k → x`; the last two legs run against the
/// positive orientation, hence signs `(+1, +1, -1, -1)`.
#[derive(Debug, Clone)]
pub struct Plaquette {
    pub base: Coords,
    /// The two coordinate directions, 0-based, `axes.0 < axes.1`.
    pub axes: (usize, usize),
    pub edges: [(usize, i8); 4],
}

/// The box `B_n = {0, …, n-1}^d` together with its edge and plaquette
/// enumerations. Immutable after construction; shareable across threads.
#[derive(Debug)]
pub struct Lattice {
    d: usize,
    n: usize,
    edges: Vec<Edge>,
    plaquettes: Vec<Plaquette>,
    free_edge_count: usize,
    /// `(vertex linear index) * d + axis -> edge index`, `usize::MAX` if absent.
    edge_lookup: Vec<usize>,
    /// CSR adjacency: plaquette ids containing each edge.
    plaq_offsets: Vec<u32>,
    plaq_items: Vec<u32>,
}

impl Lattice {
    /// Builds the lattice and its enumerations. Fails for `d < 2`, `n < 2`,
    /// or sizes beyond the enumeration cap.
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if n < 2 {
            return Err(Error::SideTooSmall(n));
        }
        if n > MAX_SIDE {
            return Err(Error::SizeCapExceeded(format!(
                "side length {n} exceeds the cap {MAX_SIDE}"
            )));
        }
        let counts = edge_counts(d, n)?;
        if counts.total as u128 > MAX_EDGES {
            return Err(Error::SizeCapExceeded(format!(
                "{} edges exceed the enumeration cap {MAX_EDGES}",
                counts.total
            )));
        }

        let nv = (n as u128).pow(d as u32) as usize;
        let mut edges = Vec::with_capacity(counts.total as usize);
        let mut edge_lookup = vec![usize::MAX; nv * d];
        let mut free_edge_count = 0usize;

        let mut coords: Coords = SmallVec::from_elem(0, d);
        for v in 0..nv {
            for axis in 0..d {
                if coords[axis] as usize + 1 >= n {
                    continue;
                }
                let mut head = coords.clone();
                head[axis] += 1;
                let class = if coords[axis + 1..].iter().all(|&c| c == 0) {
                    EdgeClass::Axial
                } else {
                    EdgeClass::Free
                };
                let free_index = match class {
                    EdgeClass::Free => {
                        free_edge_count += 1;
                        Some(free_edge_count - 1)
                    }
                    EdgeClass::Axial => None,
                };
                let index = edges.len();
                edge_lookup[v * d + axis] = index;
                edges.push(Edge {
                    tail: coords.clone(),
                    head,
                    axis,
                    class,
                    index,
                    free_index,
                });
            }
            next_vertex(&mut coords, n);
        }
        debug_assert_eq!(edges.len() as u64, counts.total);
        debug_assert_eq!(free_edge_count as u64, counts.free);

        let mut lat = Lattice {
            d,
            n,
            edges,
            plaquettes: Vec::new(),
            free_edge_count,
            edge_lookup,
            plaq_offsets: Vec::new(),
            plaq_items: Vec::new(),
        };
        lat.enumerate_plaquettes_internal();
        lat.build_plaquette_adjacency();
        Ok(lat)
    }

    fn enumerate_plaquettes_internal(&mut self) {
        let (d, n) = (self.d, self.n);
        let nv = self.vertex_count();
        let mut plaquettes = Vec::new();
        let mut coords: Coords = SmallVec::from_elem(0, d);
        for v in 0..nv {
            for j in 0..d {
                if coords[j] as usize + 1 >= n {
                    continue;
                }
                for k in (j + 1)..d {
                    if coords[k] as usize + 1 >= n {
                        continue;
                    }
                    // Traversal x -> x+e_j -> x+e_j+e_k -> x+e_k -> x.
                    let e1 = self.edge_lookup[v * d + j];
                    let vj = v + self.vertex_stride(j);
                    let e2 = self.edge_lookup[vj * d + k];
                    let vk = v + self.vertex_stride(k);
                    let e3 = self.edge_lookup[vk * d + j];
                    let e4 = self.edge_lookup[v * d + k];
                    debug_assert!(
                        e1 != usize::MAX && e2 != usize::MAX && e3 != usize::MAX && e4 != usize::MAX
                    );
                    plaquettes.push(Plaquette {
                        base: coords.clone(),
                        axes: (j, k),
                        edges: [(e1, 1), (e2, 1), (e3, -1), (e4, -1)],
                    });
                }
            }
            next_vertex(&mut coords, n);
        }
        self.plaquettes = plaquettes;
    }

    fn build_plaquette_adjacency(&mut self) {
        let mut counts = vec![0u32; self.edges.len()];
        for p in &self.plaquettes {
            for &(e, _) in &p.edges {
                counts[e] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(self.edges.len() + 1);
        let mut acc = 0u32;
        offsets.push(0);
        for &c in &counts {
            acc += c;
            offsets.push(acc);
        }
        let mut items = vec![0u32; acc as usize];
        let mut cursor: Vec<u32> = offsets[..self.edges.len()].to_vec();
        for (pid, p) in self.plaquettes.iter().enumerate() {
            for &(e, _) in &p.edges {
                items[cursor[e] as usize] = pid as u32;
                cursor[e] += 1;
            }
        }
        self.plaq_offsets = offsets;
        self.plaq_items = items;
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        (self.n as u128).pow(self.d as u32) as usize
    }

    /// All positively oriented edges, in enumeration order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn free_edge_count(&self) -> usize {
        self.free_edge_count
    }

    /// Iterator over the free edges in dense-index order.
    pub fn free_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.class == EdgeClass::Free)
    }

    /// Stride of the linear vertex index along `axis` (lexicographic layout).
    pub fn vertex_stride(&self, axis: usize) -> usize {
        (self.n as u128).pow((self.d - 1 - axis) as u32) as usize
    }

    /// Linear index of a vertex in lexicographic order.
    pub fn vertex_index(&self, coords: &[i32]) -> usize {
        let mut idx = 0usize;
        for &c in coords {
            idx = idx * self.n + c as usize;
        }
        idx
    }

    /// Edge index of `(vertex, vertex + e_axis)` if that edge exists.
    pub fn edge_at(&self, vertex_linear: usize, axis: usize) -> Option<usize> {
        match self.edge_lookup[vertex_linear * self.d + axis] {
            usize::MAX => None,
            e => Some(e),
        }
    }

    /// Plaquette ids containing the given edge (at most `2(d-1)`).
    pub fn plaquettes_of_edge(&self, edge: usize) -> &[u32] {
        let lo = self.plaq_offsets[edge] as usize;
        let hi = self.plaq_offsets[edge + 1] as usize;
        &self.plaq_items[lo..hi]
    }
}

fn next_vertex(coords: &mut Coords, n: usize) {
    for i in (0..coords.len()).rev() {
        if (coords[i] as usize) + 1 < n {
            coords[i] += 1;
            return;
        }
        coords[i] = 0;
    }
}

/// Exact edge counts of `B_n` from the closed forms
/// `|E_n| = d n^{d-1}(n-1)`, `|E_n^0| = n^d - 1`,
/// `|E_n^1| = (d-1) n^d - d n^{d-1} + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeCounts {
    pub total: u64,
    pub axial: u64,
    pub free: u64,
}

/// Evaluates the closed-form edge counts without enumerating anything.
pub fn edge_counts(d: usize, n: usize) -> Result<EdgeCounts> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    if n < 2 {
        return Err(Error::SideTooSmall(n));
    }
    let n = n as u128;
    let d128 = d as u128;
    let pow = |e: u32| -> Result<u128> {
        n.checked_pow(e)
            .ok_or_else(|| Error::SizeCapExceeded("edge count overflow".into()))
    };
    let nd = pow(d as u32)?;
    let nd1 = pow((d - 1) as u32)?;
    let total = d128 * nd1 * (n - 1);
    let axial = nd - 1;
    let free = total - axial;
    let to64 = |v: u128| -> Result<u64> {
        u64::try_from(v).map_err(|_| Error::SizeCapExceeded("edge count overflow".into()))
    };
    Ok(EdgeCounts {
        total: to64(total)?,
        axial: to64(axial)?,
        free: to64(free)?,
    })
}

/// Closed-form plaquette count `C(d,2) (n-1)^2 n^{d-2}`.
pub fn plaquette_count(d: usize, n: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    if n < 2 {
        return Err(Error::SideTooSmall(n));
    }
    let n = n as u128;
    let pairs = (d * (d - 1) / 2) as u128;
    let count = pairs
        * (n - 1)
        * (n - 1)
        * n
            .checked_pow((d - 2) as u32)
            .ok_or_else(|| Error::SizeCapExceeded("plaquette count overflow".into()))?;
    u64::try_from(count).map_err(|_| Error::SizeCapExceeded("plaquette count overflow".into()))
}
