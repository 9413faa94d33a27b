//! Cell complexes Hom(G,H) and Hom₊(G,H).
//!
//! A cell is stored as a `u128` key with bit `v * |V(H)| + y` set iff
//! `y ∈ η(v)`. Bit order is the lexicographic order on V(G)×V(H), which is also
//! the vertex order used to orient Hom₊ simplices.

pub mod export;
pub mod maps;
pub mod poset;
pub mod simplicial;

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::chain::{ChainComplex, Csc};
use crate::graph::{bits, Graph};
use crate::{Error, Result};

pub use simplicial::SimplicialComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Prodsimplicial,
    Simplicial,
    Delta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// Hom(G,H): every list nonempty, cells are products of simplices.
    Hom,
    /// Hom₊(G,H): lists may be empty, cells are simplices.
    HomPlus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Layout {
    pub ng: usize,
    pub nh: usize,
}

impl Layout {
    pub fn new(ng: usize, nh: usize) -> Result<Layout> {
        if ng * nh > 128 {
            return Err(Error::resource(format!(
                "|V(G)|·|V(H)| = {} exceeds the 128-bit cell key",
                ng * nh
            )));
        }
        Ok(Layout { ng, nh })
    }

    pub fn block_mask(&self) -> u128 {
        if self.nh == 128 {
            u128::MAX
        } else {
            (1u128 << self.nh) - 1
        }
    }

    /// η(v) as a mask over V(H).
    pub fn list(&self, key: u128, v: usize) -> u128 {
        (key >> (v * self.nh)) & self.block_mask()
    }

    pub fn bit(&self, v: usize, y: usize) -> u128 {
        1u128 << (v * self.nh + y)
    }

    pub fn support(&self, key: u128) -> u128 {
        (0..self.ng).filter(|&v| self.list(key, v) != 0).fold(0, |m, v| m | 1 << v)
    }

    pub fn to_cell(&self, key: u128) -> MultihomCell {
        MultihomCell { lists: (0..self.ng).map(|v| bits(self.list(key, v)).collect()).collect() }
    }

    pub fn to_key(&self, cell: &MultihomCell) -> Result<u128> {
        if cell.lists.len() != self.ng {
            return Err(Error::arg("cell has wrong number of lists"));
        }
        let mut k = 0u128;
        for (v, l) in cell.lists.iter().enumerate() {
            for &y in l {
                if y >= self.nh {
                    return Err(Error::arg("cell list entry out of range"));
                }
                k |= self.bit(v, y);
            }
        }
        Ok(k)
    }

    /// Composes a cell with a vertex permutation of G: (η∘γ)(x) = η(γ(x)).
    pub fn compose(&self, key: u128, gamma: &[usize]) -> u128 {
        let mut out = 0u128;
        for x in 0..self.ng {
            out |= self.list(key, gamma[x]) << (x * self.nh);
        }
        out
    }

    pub fn hom_dim(&self, key: u128) -> usize {
        key.count_ones() as usize - self.ng
    }
}

/// A multihomomorphism η: V(G) → 2^{V(H)}, lists sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultihomCell {
    pub lists: Vec<Vec<usize>>,
}

impl MultihomCell {
    pub fn hom_dim(&self) -> isize {
        self.lists.iter().map(|l| l.len() as isize - 1).sum()
    }

    pub fn simplex_dim(&self) -> isize {
        self.lists.iter().map(|l| l.len() as isize).sum::<isize>() - 1
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.lists.len()).filter(|&v| !self.lists[v].is_empty()).collect()
    }

    /// All adjacent lists map into edges of H.
    pub fn is_valid(&self, g: &Graph, h: &Graph) -> bool {
        self.lists.len() == g.n()
            && g.edges().iter().all(|&(a, b)| {
                self.lists[a].iter().all(|&x| self.lists[b].iter().all(|&y| h.has_edge(x, y)))
            })
    }
}

#[derive(Clone, Debug)]
pub struct HomComplex {
    pub flavor: Flavor,
    pub g: Graph,
    pub h: Graph,
    pub layout: Layout,
    /// Keys per dimension, sorted ascending.
    cells: Vec<Vec<u128>>,
    /// Enumeration stopped at this dimension (cells above it may exist).
    pub cap: Option<usize>,
}

/// Enumerates multihomomorphisms G → H, vertex by vertex with the lists of
/// earlier neighbours restricting the candidates. `allow_empty` gives Hom₊
/// (the all-empty assignment is skipped). `cap` bounds the cell dimension.
fn enumerate(g: &Graph, h: &Graph, allow_empty: bool, cap: Option<usize>, limit: usize) -> Result<Vec<Vec<u128>>> {
    let lay = Layout::new(g.n(), h.n())?;
    let ng = g.n();
    let full = lay.block_mask();
    if ng == 0 {
        // Hom(∅,H) is a point; Hom₊(∅,H) is the empty complex
        return Ok(if allow_empty { Vec::new() } else { vec![vec![0]] });
    }
    let cap = cap.unwrap_or(usize::MAX);
    let looped_h = (0..h.n()).filter(|&y| h.has_loop(y)).fold(0u128, |m, y| m | 1 << y);

    struct Ctx<'a> {
        g: &'a Graph,
        h: &'a Graph,
        lay: Layout,
        full: u128,
        looped_h: u128,
        allow_empty: bool,
        cap: usize,
        limit: usize,
        count: AtomicUsize,
    }

    fn clique_ok(h: &Graph, l: u128) -> bool {
        bits(l).all(|x| l & !h.nbr_mask(x) == 0)
    }

    fn rec(c: &Ctx, v: usize, key: u128, weight: usize, out: &mut Vec<Vec<u128>>) {
        let ng = c.g.n();
        if c.count.load(Ordering::Relaxed) > c.limit {
            return;
        }
        if v == ng {
            if key == 0 {
                return;
            }
            c.count.fetch_add(1, Ordering::Relaxed);
            let d = if c.allow_empty { key.count_ones() as usize - 1 } else { weight };
            if out.len() <= d {
                out.resize(d + 1, Vec::new());
            }
            out[d].push(key);
            return;
        }
        let mut allowed = c.full;
        for u in bits(c.g.nbr_mask(v) & ((1u128 << v) - 1)) {
            for x in bits(c.lay.list(key, u)) {
                allowed &= c.h.nbr_mask(x);
            }
        }
        let looped = c.g.has_loop(v);
        if looped {
            allowed &= c.looped_h;
        }
        if c.allow_empty {
            rec(c, v + 1, key, weight, out);
        }
        let mut sub = allowed;
        while sub != 0 {
            let w = if c.allow_empty {
                (key.count_ones() + sub.count_ones()) as usize - 1
            } else {
                weight + sub.count_ones() as usize - 1
            };
            if w <= c.cap && (!looped || clique_ok(c.h, sub)) {
                rec(c, v + 1, key | sub << (v * c.lay.nh), w, out);
            }
            sub = (sub - 1) & allowed;
        }
    }

    let ctx = Ctx { g, h, lay, full, looped_h, allow_empty, cap, limit, count: AtomicUsize::new(0) };
    // split on the list of vertex 0 for parallelism
    let mut firsts: Vec<u128> = Vec::new();
    let mut sub = full & if g.has_loop(0) { looped_h } else { full };
    while sub != 0 {
        if !g.has_loop(0) || clique_ok(h, sub) {
            firsts.push(sub);
        }
        sub = (sub - 1) & (full & if g.has_loop(0) { looped_h } else { full });
    }
    if allow_empty {
        firsts.push(0);
    }
    let parts: Vec<Vec<Vec<u128>>> = firsts
        .par_iter()
        .map(|&f| {
            let mut out = Vec::new();
            let w = (f.count_ones() as usize).saturating_sub(1);
            if f != 0 && w > ctx.cap {
                return out;
            }
            rec(&ctx, 1, f, w, &mut out);
            out
        })
        .collect();
    if ctx.count.load(Ordering::Relaxed) > limit {
        return Err(Error::resource(format!("more than {limit} cells")));
    }
    let top = parts.iter().map(|p| p.len()).max().unwrap_or(0);
    let mut cells: Vec<Vec<u128>> = vec![Vec::new(); top];
    for p in parts {
        for (d, v) in p.into_iter().enumerate() {
            cells[d].extend(v);
        }
    }
    for c in cells.iter_mut() {
        c.par_sort_unstable();
    }
    Ok(cells)
}

impl HomComplex {
    fn build(g: &Graph, h: &Graph, flavor: Flavor, cap: Option<usize>) -> Result<HomComplex> {
        HomComplex::build_within(g, h, flavor, cap, usize::MAX)
    }

    /// Like [`hom_complex`] or [`hom_plus_complex`], failing with a resource
    /// error once more than `max_cells` cells have been enumerated.
    pub fn build_within(g: &Graph, h: &Graph, flavor: Flavor, cap: Option<usize>, max_cells: usize) -> Result<HomComplex> {
        let layout = Layout::new(g.n(), h.n())?;
        let cells = enumerate(g, h, flavor == Flavor::HomPlus, cap, max_cells)?;
        let bound = match flavor {
            Flavor::Hom => g.n() * h.n().saturating_sub(1),
            Flavor::HomPlus => (g.n() * h.n()).saturating_sub(1),
        };
        // with no cells in dimension `cap` there are none above it either
        let cap = cap.filter(|&c| c < bound && cells.get(c).is_some_and(|d| !d.is_empty()));
        Ok(HomComplex { flavor, g: g.clone(), h: h.clone(), layout, cells, cap })
    }

    /// The number of incidence entries the full complex would have, summed
    /// over dimensions up to `cap`; used for budget checks before building
    /// boundary matrices.
    pub fn incidence_count(&self) -> usize {
        self.cells
            .iter()
            .flatten()
            .map(|&k| match self.flavor {
                Flavor::HomPlus => k.count_ones() as usize,
                Flavor::Hom => (0..self.layout.ng)
                    .map(|v| {
                        let c = self.layout.list(k, v).count_ones() as usize;
                        if c >= 2 {
                            c
                        } else {
                            0
                        }
                    })
                    .sum(),
            })
            .sum()
    }

    /// Top dimension present (−1 when empty).
    pub fn dim(&self) -> isize {
        self.cells.len() as isize - 1
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn kind(&self) -> Kind {
        match self.flavor {
            Flavor::Hom => Kind::Prodsimplicial,
            Flavor::HomPlus => Kind::Simplicial,
        }
    }

    pub fn num_cells(&self, d: usize) -> usize {
        self.cells.get(d).map_or(0, |c| c.len())
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    pub fn keys(&self, d: usize) -> &[u128] {
        self.cells.get(d).map_or(&[], |c| c.as_slice())
    }

    pub fn key(&self, d: usize, i: usize) -> u128 {
        self.cells[d][i]
    }

    pub fn cell(&self, d: usize, i: usize) -> MultihomCell {
        self.layout.to_cell(self.cells[d][i])
    }

    pub fn dim_of_key(&self, key: u128) -> usize {
        match self.flavor {
            Flavor::Hom => self.layout.hom_dim(key),
            Flavor::HomPlus => key.count_ones() as usize - 1,
        }
    }

    pub fn index_of(&self, key: u128) -> Option<(usize, usize)> {
        if key == 0 {
            return None;
        }
        if self.flavor == Flavor::Hom && (0..self.layout.ng).any(|v| self.layout.list(key, v) == 0) {
            return None;
        }
        let d = self.dim_of_key(key);
        let cs = self.cells.get(d)?;
        cs.binary_search(&key).ok().map(|i| (d, i))
    }

    /// Boundary faces of cell (d,i) as (face index in dimension d−1, sign).
    /// For Hom₊ vertices the empty face is omitted.
    pub fn boundary(&self, d: usize, i: usize) -> Vec<(u32, i32)> {
        let key = self.cells[d][i];
        let mut out = Vec::new();
        if d == 0 {
            return out;
        }
        let lay = &self.layout;
        match self.flavor {
            Flavor::HomPlus => {
                for (pos, b) in bits(key).enumerate() {
                    let face = key & !(1u128 << b);
                    let fi = self.cells[d - 1].binary_search(&face).expect("face of a simplex is a simplex");
                    out.push((fi as u32, if pos % 2 == 0 { 1 } else { -1 }));
                }
            }
            Flavor::Hom => {
                let mut offset = 0usize;
                for v in 0..lay.ng {
                    let l = lay.list(key, v);
                    let c = l.count_ones() as usize;
                    if c >= 2 {
                        for (k, y) in bits(l).enumerate() {
                            let face = key & !lay.bit(v, y);
                            let fi = self.cells[d - 1].binary_search(&face).expect("face of a cell is a cell");
                            let e = k + offset;
                            out.push((fi as u32, if e % 2 == 0 { 1 } else { -1 }));
                        }
                    }
                    offset += c.saturating_sub(1);
                }
            }
        }
        out
    }

    /// Cellular chain complex in degrees 0..=dim. With `reduced`, a
    /// degree −1 generator (the empty cell) is added and every vertex maps
    /// to it with coefficient 1.
    pub fn chain_complex(&self, reduced: bool) -> ChainComplex {
        let mut bds = Vec::new();
        if reduced {
            bds.push(Csc::zero(0, 1));
        }
        for d in 0..self.cells.len() {
            let rows = if d == 0 { usize::from(reduced) } else { self.cells[d - 1].len() };
            let cols: Vec<Vec<(u32, i32)>> = if d == 0 {
                (0..self.cells[0].len()).map(|_| if reduced { vec![(0, 1)] } else { vec![] }).collect()
            } else {
                (0..self.cells[d].len()).into_par_iter().map(|i| self.boundary(d, i)).collect()
            };
            bds.push(Csc::from_columns(rows, cols));
        }
        if bds.is_empty() {
            return ChainComplex::empty_at(0);
        }
        let mut c = ChainComplex { lo: if reduced { -1 } else { 0 }, boundaries: bds, truncated: false };
        c.truncated = self.cap.is_some();
        c
    }

    /// Hom₊ as a plain simplicial complex on the vertices V(G)×V(H), with
    /// the same orientations (simplices get renumbered).
    pub fn to_simplicial(&self) -> Result<SimplicialComplex> {
        if self.flavor != Flavor::HomPlus {
            return Err(Error::arg("only Hom₊ complexes are simplicial"));
        }
        let simplices = self.cells.iter().flatten().map(|&k| bits(k).map(|b| b as u32).collect()).collect();
        SimplicialComplex::from_simplices(self.layout.ng * self.layout.nh, simplices)
    }

    /// Cells with full support, i.e. the image of Hom(G,H) in Hom₊(G,H).
    pub fn full_support_keys(&self, d: usize) -> Vec<u128> {
        let full = if self.layout.ng == 128 { u128::MAX } else { (1u128 << self.layout.ng) - 1 };
        self.keys(d).iter().copied().filter(|&k| self.layout.support(k) == full).collect()
    }
}

/// Hom(G,H), optionally only up to dimension `cap`.
pub fn hom_complex(g: &Graph, h: &Graph, cap: Option<usize>) -> Result<HomComplex> {
    HomComplex::build(g, h, Flavor::Hom, cap)
}

/// Hom₊(G,H) as a simplicial complex on V(G)×V(H).
pub fn hom_plus_complex(g: &Graph, h: &Graph, cap: Option<usize>) -> Result<HomComplex> {
    HomComplex::build(g, h, Flavor::HomPlus, cap)
}

/// Ind(G) = Hom₊(G, K₁): vertex v of G is bit v.
pub fn independence_complex(g: &Graph) -> Result<HomComplex> {
    HomComplex::build(g, &crate::graph::complete(1), Flavor::HomPlus, None)
}

impl ChainComplex {
    pub fn empty_at(lo: i32) -> ChainComplex {
        ChainComplex { lo, boundaries: Vec::new(), truncated: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{self, tensor_product, complement};

    #[test]
    fn cell_counts() {
        let k = hom_complex(&graph::complete(2), &graph::complete(3), None).unwrap();
        assert_eq!(k.f_vector(), vec![6, 6]);
        let c = hom_complex(&graph::cycle(5), &graph::complete(4), None).unwrap();
        assert_eq!(c.f_vector(), vec![240, 780, 840, 300]);
        let c5 = hom_complex(&graph::cycle(5), &graph::complete(5), None).unwrap();
        assert_eq!(c5.f_vector(), vec![1020, 5700, 13000, 15000, 8750, 2070]);
        let t = hom_complex(&graph::cycle(5), &graph::complete(5), Some(2)).unwrap();
        assert_eq!(t.f_vector(), vec![1020, 5700, 13000]);
        assert_eq!(t.cap, Some(2));
    }

    #[test]
    fn hom_plus_is_independence_complex() {
        let g = graph::cycle(5);
        let h = graph::complete(3);
        let hp = hom_plus_complex(&g, &h, None).unwrap();
        let ind = independence_complex(&tensor_product(&g, &complement(&h)).unwrap()).unwrap();
        assert_eq!(hp.f_vector(), ind.f_vector());
        for d in 0..hp.cells.len() {
            assert_eq!(hp.keys(d), ind.keys(d));
        }
        // (1 + 5x + 5x²)³
        // (1 + 5x + 5x²)³ without the constant term
        assert_eq!(hp.f_vector(), vec![15, 90, 275, 450, 375, 125]);
    }

    #[test]
    fn boundary_squares_to_zero() {
        for (g, h) in [
            (graph::cycle(5), graph::complete(4)),
            (graph::complete(3), graph::complete(4)),
            (graph::path(3), graph::complete(3)),
        ] {
            let c = hom_complex(&g, &h, None).unwrap();
            c.chain_complex(false).check_d_squared().unwrap();
            let p = hom_plus_complex(&g, &h, None).unwrap();
            p.chain_complex(true).check_d_squared().unwrap();
        }
    }

    #[test]
    fn loops_in_target() {
        let mut e = graph::complete(2).edges();
        e.push((0, 0));
        let h = Graph::new(2, &e).unwrap();
        let c = hom_complex(&graph::complete(2), &h, None).unwrap();
        // η(0) ⊆ N(η(1)) etc: ({0},{0}), ({0},{1}), ({1},{0}), ({0},{0,1}), ({0,1},{0})
        assert_eq!(c.f_vector(), vec![3, 2]);
    }
}
