use std::collections::HashMap;

use crate::algebra::chain::{ChainComplex, Csc};
use crate::complex::poset::FacePoset;
use crate::complex::SimplicialComplex;
use crate::equivariant::action::CellInvolution;
use crate::{Error, Result};

/// Ordered Δ-complex: `face(d, i, j)` is the (d−1)-simplex opposite vertex j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaComplex {
    faces: Vec<Vec<u32>>,
    counts: Vec<usize>,
}

impl DeltaComplex {
    pub fn new(counts: Vec<usize>, faces: Vec<Vec<u32>>) -> Result<DeltaComplex> {
        if counts.len() != faces.len() {
            return Err(Error::arg("face table and cell counts disagree"));
        }
        for d in 0..counts.len() {
            let want = if d == 0 { 0 } else { counts[d] * (d + 1) };
            if faces[d].len() != want || (d > 0 && faces[d].iter().any(|&f| f as usize >= counts[d - 1])) {
                return Err(Error::arg(format!("bad face table in dimension {d}")));
            }
        }
        let dc = DeltaComplex { faces, counts };
        // simplicial identities d_i d_j = d_{j-1} d_i for i < j
        for d in 2..dc.counts.len() {
            for s in 0..dc.counts[d] as u32 {
                for j in 1..=d {
                    for i in 0..j {
                        if dc.face(d - 1, dc.face(d, s, j), i) != dc.face(d - 1, dc.face(d, s, i), j - 1) {
                            return Err(Error::contract("face maps violate the simplicial identities"));
                        }
                    }
                }
            }
        }
        Ok(dc)
    }

    pub fn from_simplicial(sc: &SimplicialComplex) -> DeltaComplex {
        let mut counts = Vec::new();
        let mut faces = Vec::new();
        for d in 0..(sc.dim() + 1) as usize {
            counts.push(sc.count(d));
            let mut f = Vec::new();
            if d > 0 {
                f.reserve(sc.count(d) * (d + 1));
                for i in 0..sc.count(d) {
                    let s = sc.simplex(d, i);
                    for j in 0..=d {
                        let t: Vec<u32> = s.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect();
                        f.push(sc.find(&t).expect("closed complex") as u32);
                    }
                }
            }
            faces.push(f);
        }
        DeltaComplex { faces, counts }
    }

    pub fn dim(&self) -> isize {
        self.counts.len() as isize - 1
    }

    pub fn count(&self, d: usize) -> usize {
        self.counts.get(d).copied().unwrap_or(0)
    }

    pub fn f_vector(&self) -> &[usize] {
        &self.counts
    }

    #[inline]
    pub fn face(&self, d: usize, i: u32, j: usize) -> u32 {
        self.faces[d][i as usize * (d + 1) + j]
    }

    /// Front p-face: vertices 0..=p.
    pub fn front(&self, d: usize, mut i: u32, p: usize) -> u32 {
        for e in (p + 1..=d).rev() {
            i = self.face(e, i, e);
        }
        i
    }

    /// Back q-face: vertices d−q..=d.
    pub fn back(&self, d: usize, mut i: u32, q: usize) -> u32 {
        for e in (q + 1..=d).rev() {
            i = self.face(e, i, 0);
        }
        i
    }

    pub fn vertex(&self, d: usize, i: u32, k: usize) -> u32 {
        self.back(k, self.front(d, i, k), 0)
    }

    /// The edge from vertex k−1 to vertex k.
    pub fn spine_edge(&self, d: usize, i: u32, k: usize) -> u32 {
        self.back(k, self.front(d, i, k), 1)
    }

    pub fn chain_complex(&self) -> ChainComplex {
        if self.counts.is_empty() {
            return ChainComplex::empty_at(0);
        }
        let mut bds = Vec::new();
        for d in 0..self.counts.len() {
            let rows = if d == 0 { 0 } else { self.counts[d - 1] };
            let cols = (0..self.counts[d])
                .map(|i| {
                    if d == 0 {
                        return Vec::new();
                    }
                    (0..=d).map(|j| (self.face(d, i as u32, j), if j % 2 == 0 { 1 } else { -1 })).collect()
                })
                .collect();
            bds.push(Csc::from_columns(rows, cols));
        }
        ChainComplex { lo: 0, boundaries: bds, truncated: false }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts.iter().enumerate().map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    /// Cup product of ℤ₂ cochains: (a∪b)(σ) = a(front_p σ)·b(back_q σ).
    pub fn cup(&self, p: usize, a: &[bool], q: usize, b: &[bool]) -> Vec<bool> {
        let d = p + q;
        (0..self.count(d) as u32)
            .map(|s| a[self.front(d, s, p) as usize] && b[self.back(d, s, q) as usize])
            .collect()
    }
}

/// A Δ-complex with an order-two automorphism compatible with face maps.
#[derive(Clone, Debug)]
pub struct Cover {
    pub complex: DeltaComplex,
    pub action: Vec<Vec<u32>>,
}

impl Cover {
    pub fn new(complex: DeltaComplex, action: Vec<Vec<u32>>) -> Result<Cover> {
        let c = Cover { complex, action };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        let x = &self.complex;
        for d in 0..x.counts.len() {
            let a = &self.action[d];
            if a.len() != x.counts[d] || (0..a.len()).any(|i| a[a[i] as usize] as usize != i) {
                return Err(Error::contract("cover action is not an involution"));
            }
            if d > 0 {
                for i in 0..a.len() as u32 {
                    for j in 0..=d {
                        if x.face(d, a[i as usize], j) != self.action[d - 1][x.face(d, i, j) as usize] {
                            return Err(Error::contract("action does not commute with face maps"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// A vertex involution that preserves the vertex order of every
    /// simplex; errors otherwise.
    pub fn from_simplicial(sc: &SimplicialComplex, vmap: &[u32]) -> Result<Cover> {
        let mut action = Vec::new();
        for d in 0..(sc.dim() + 1) as usize {
            let mut a = Vec::with_capacity(sc.count(d));
            for i in 0..sc.count(d) {
                let t: Vec<u32> = sc.simplex(d, i).iter().map(|&v| vmap[v as usize]).collect();
                if t.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::contract("vertex involution does not preserve simplex orientation"));
                }
                a.push(sc.find(&t).ok_or_else(|| Error::arg("vertex map is not simplicial"))? as u32);
            }
            action.push(a);
        }
        Cover::new(DeltaComplex::from_simplicial(sc), action)
    }

    /// Barycentric subdivision of a regular cell complex with a cellular
    /// involution; chains are ordered by rank.
    pub fn subdivide(c: &ChainComplex, a: &CellInvolution, limit: u64) -> Result<Cover> {
        let sd = FacePoset::from_chain_complex(c)?.order_complex(limit)?;
        let vmap = a.global_image();
        Cover::from_simplicial(&sd, &vmap)
    }

    /// Tries the complex as it is, and subdivides once when the action
    /// reverses some simplex.
    pub fn from_simplicial_action(sc: &SimplicialComplex, vmap: &[u32], limit: u64) -> Result<Cover> {
        match Cover::from_simplicial(sc, vmap) {
            Ok(c) => Ok(c),
            Err(Error::Contract(_)) => {
                let a = crate::equivariant::action::simplicial_involution(sc, vmap)?;
                Cover::subdivide(&sc.chain_complex(false), &a, limit)
            }
            Err(e) => Err(e),
        }
    }

    pub fn is_free(&self) -> bool {
        self.action.iter().all(|a| a.iter().enumerate().all(|(i, &j)| i != j as usize))
    }
}

/// Orbits of the cover as an ordered Δ-complex, with the bookkeeping that
/// relates the two.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub delta: DeltaComplex,
    /// Cover simplex → orbit.
    pub orbit: Vec<Vec<u32>>,
    /// Orbit → its smaller cover simplex.
    pub rep: Vec<Vec<u32>>,
    /// Invariant simplices per dimension (the fixed subcomplex).
    pub fixed: Vec<usize>,
    pub cover_euler: i64,
    /// Cover vertices (first, last) of each representative edge.
    pub edge_ends: Vec<(u32, u32)>,
}

impl Quotient {
    pub fn is_free(&self) -> bool {
        self.fixed.iter().all(|&n| n == 0)
    }

    pub fn fixed_euler(&self) -> i64 {
        self.fixed.iter().enumerate().map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    /// 0/1 indicating which lift of the orbit a cover simplex is.
    pub fn sheet(&self, d: usize, cover_id: u32) -> bool {
        self.rep[d][self.orbit[d][cover_id as usize] as usize] != cover_id
    }
}

pub fn quotient(cover: &Cover) -> Result<Quotient> {
    let x = &cover.complex;
    let mut orbit = Vec::new();
    let mut rep = Vec::new();
    let mut fixed = Vec::new();
    for d in 0..x.counts.len() {
        let a = &cover.action[d];
        let mut o = vec![u32::MAX; a.len()];
        let mut r = Vec::new();
        let mut nf = 0;
        for i in 0..a.len() {
            if o[i] != u32::MAX {
                continue;
            }
            let j = a[i] as usize;
            if j == i {
                nf += 1;
                for k in 0..=d {
                    let v = x.vertex(d, i as u32, k);
                    if cover.action[0][v as usize] != v {
                        return Err(Error::contract(format!(
                            "invariant {d}-simplex {i} is not fixed pointwise"
                        )));
                    }
                }
            }
            o[i] = r.len() as u32;
            o[j] = r.len() as u32;
            r.push(i as u32);
        }
        orbit.push(o);
        rep.push(r);
        fixed.push(nf);
    }
    let counts: Vec<usize> = rep.iter().map(|r| r.len()).collect();
    let mut faces = vec![Vec::new()];
    for d in 1..counts.len() {
        let mut f = Vec::with_capacity(counts[d] * (d + 1));
        for &s in &rep[d] {
            for j in 0..=d {
                f.push(orbit[d - 1][x.face(d, s, j) as usize]);
            }
        }
        faces.push(f);
    }
    let edge_ends = match rep.get(1) {
        Some(r) => r.iter().map(|&e| (x.face(1, e, 1), x.face(1, e, 0))).collect(),
        None => Vec::new(),
    };
    let delta = DeltaComplex::new(counts, faces)?;
    let q = Quotient { delta, orbit, rep, fixed, cover_euler: x.euler_characteristic(), edge_ends };
    if q.cover_euler != 2 * q.delta.euler_characteristic() - q.fixed_euler() {
        return Err(Error::contract("Euler characteristics of cover, quotient and fixed set disagree"));
    }
    Ok(q)
}

/// Splits every edge {v, γv} of the complex at a new midpoint, so that no
/// simplex contains a vertex together with its image. Vertices are then
/// renumbered by orbit, which makes γ preserve the vertex order of every
/// simplex. Returns the subdivision and its vertex involution.
pub fn midpoint_subdivision(sc: &SimplicialComplex, vmap: &[u32]) -> Result<(SimplicialComplex, Vec<u32>)> {
    let n = sc.nverts;
    if vmap.len() != n || (0..n).any(|v| vmap[vmap[v] as usize] as usize != v) {
        return Err(Error::arg("vertex map is not an involution"));
    }
    // midpoint ids n.. for flipped edges
    let mut mid: HashMap<u32, u32> = HashMap::new();
    let mut next = n as u32;
    if sc.dim() >= 1 {
        for i in 0..sc.count(1) {
            let s = sc.simplex(1, i);
            if vmap[s[0] as usize] == s[1] {
                mid.insert(s[0], next);
                mid.insert(s[1], next);
                next += 1;
            }
        }
    }
    let total = next as usize;
    let mut out: Vec<Vec<u32>> = Vec::new();
    for d in 0..(sc.dim() + 1) as usize {
        for i in 0..sc.count(d) {
            let s = sc.simplex(d, i);
            let mut base = Vec::new();
            let mut pairs = Vec::new();
            for &v in s {
                let w = vmap[v as usize];
                if w != v && s.binary_search(&w).is_ok() {
                    if v < w {
                        pairs.push((v, w));
                    }
                } else {
                    base.push(v);
                }
            }
            let k = pairs.len() as u32;
            for code in 0..3u32.pow(k) {
                let mut t = base.clone();
                let mut c = code;
                for &(v, w) in &pairs {
                    t.push(mid[&v]);
                    match c % 3 {
                        1 => t.push(v),
                        2 => t.push(w),
                        _ => {}
                    }
                    c /= 3;
                }
                out.push(t);
            }
        }
    }
    // orbit relabelling: one key per orbit, the two members adjacent
    let mut key: Vec<(u32, u32, u32)> = Vec::with_capacity(total);
    for v in 0..n as u32 {
        let w = vmap[v as usize];
        key.push((v.min(w), u32::from(v > w), v));
    }
    for m in n as u32..next {
        key.push((m, 0, m));
    }
    key.sort_unstable();
    let mut relabel = vec![0u32; total];
    for (new, &(_, _, old)) in key.iter().enumerate() {
        relabel[old as usize] = new as u32;
    }
    let mut nmap = vec![0u32; total];
    for v in 0..total {
        let img = if v < n { vmap[v] as usize } else { v };
        nmap[relabel[v] as usize] = relabel[img];
    }
    let out = out.into_iter().map(|t| t.into_iter().map(|v| relabel[v as usize]).collect()).collect();
    Ok((SimplicialComplex::from_simplices(total, out)?, nmap))
}

/// X/γ for a free cellular involution, as a cell complex over ℤ₂, together
/// with the orbit representatives it was built from.
#[derive(Clone, Debug)]
pub struct CellularQuotient {
    /// Boundary over ℤ₂ (entries 1).
    pub chain: ChainComplex,
    pub rep: Vec<Vec<u32>>,
    pub orbit: Vec<Vec<u32>>,
    /// d ↦ matrix C^d(Y) → C^{d+1}(Y) of the connecting map of the transfer
    /// sequence, which is cup product with ϖ₁.
    pub gysin: Vec<Csc>,
}

pub fn cellular_quotient(c: &ChainComplex, a: &CellInvolution) -> Result<CellularQuotient> {
    if let Some((d, i)) = a.first_fixed() {
        return Err(Error::domain(format!("action fixes the {d}-cell {i}")));
    }
    if c.lo != 0 {
        return Err(Error::arg("cellular quotient needs an unreduced complex"));
    }
    let top = c.hi().max(-1);
    let mut orbit = Vec::new();
    let mut rep = Vec::new();
    for d in 0..=top {
        let im = &a.image[d as usize];
        let mut o = vec![u32::MAX; im.len()];
        let mut r = Vec::new();
        for i in 0..im.len() {
            if o[i] == u32::MAX {
                o[i] = r.len() as u32;
                o[im[i] as usize] = r.len() as u32;
                r.push(i as u32);
            }
        }
        orbit.push(o);
        rep.push(r);
    }
    let mut bds = Vec::new();
    let mut gysin = Vec::new();
    for d in 0..=top {
        let du = d as usize;
        let b = c.boundary_ref(d).unwrap();
        let rows = if d == 0 { 0 } else { rep[du - 1].len() };
        let mut cols = Vec::with_capacity(rep[du].len());
        let mut gcols = Vec::with_capacity(rep[du].len());
        for &s in &rep[du] {
            let mut col: Vec<(u32, i32)> = Vec::new();
            let mut gcol: Vec<(u32, i32)> = Vec::new();
            for (f, v) in b.col(s as usize) {
                if v % 2 == 0 {
                    continue;
                }
                let o = orbit[du - 1][f as usize];
                col.push((o, 1));
                if rep[du - 1][o as usize] == f {
                    gcol.push((o, 1));
                }
            }
            cols.push(mod2(col));
            gcols.push(mod2(gcol));
        }
        bds.push(Csc::from_columns(rows, cols));
        if d > 0 {
            // rows: d-cells, columns: (d−1)-cells, i.e. transpose of gcols
            gysin.push(Csc::from_columns(rows, gcols).transpose());
        }
    }
    let chain = if bds.is_empty() { ChainComplex::empty_at(0) } else { ChainComplex { lo: 0, boundaries: bds, truncated: c.truncated } };
    Ok(CellularQuotient { chain, rep, orbit, gysin })
}

fn mod2(mut col: Vec<(u32, i32)>) -> Vec<(u32, i32)> {
    col.sort_unstable();
    let mut out: Vec<(u32, i32)> = Vec::new();
    for (i, _) in col {
        if out.last().is_some_and(|l| l.0 == i) {
            out.pop();
        } else {
            out.push((i, 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{homology, Z2};
    use crate::complex::{hom_complex, hom_plus_complex};
    use crate::equivariant::action::{induced_involution, plus_vertex_map};
    use crate::graph::{complete, complete_swap, cycle, cycle_reflection};

    fn z2_betti(c: &ChainComplex) -> Vec<usize> {
        homology(c, Z2, None).unwrap().iter().map(|g| g.free_rank).collect()
    }

    #[test]
    fn hexagon_and_sphere_quotients() {
        let x = hom_complex(&complete(2), &complete(3), None).unwrap();
        let a = induced_involution(&x, &complete_swap(2).unwrap()).unwrap();
        let cov = Cover::subdivide(&x.chain_complex(false), &a, 1 << 20).unwrap();
        let q = quotient(&cov).unwrap();
        assert!(q.is_free());
        assert_eq!(z2_betti(&q.delta.chain_complex()), vec![1, 1]);

        let x = hom_complex(&complete(2), &complete(4), None).unwrap();
        let a = induced_involution(&x, &complete_swap(2).unwrap()).unwrap();
        let cov = Cover::subdivide(&x.chain_complex(false), &a, 1 << 20).unwrap();
        let q = quotient(&cov).unwrap();
        assert_eq!(z2_betti(&q.delta.chain_complex()), vec![1, 1, 1]);
        assert_eq!(q.cover_euler, 2 * q.delta.euler_characteristic());
    }

    #[test]
    fn octahedral_sphere_is_ordered() {
        let s = SimplicialComplex::octahedral_sphere(2);
        let vmap: Vec<u32> = (0..6).map(|v| v ^ 1).collect();
        let q = quotient(&Cover::from_simplicial(&s, &vmap).unwrap()).unwrap();
        assert_eq!(q.delta.f_vector(), &[3, 6, 4]);
        assert_eq!(z2_betti(&q.delta.chain_complex()), vec![1, 1, 1]);
    }

    #[test]
    fn midpoints_agree_with_barycentric() {
        let x = hom_plus_complex(&cycle(5), &complete(3), None).unwrap();
        let g = cycle_reflection(5).unwrap();
        let sc = x.to_simplicial().unwrap();
        let vm = plus_vertex_map(&x, &g);
        let (sd, nm) = midpoint_subdivision(&sc, &vm).unwrap();
        assert_eq!(sd.euler_characteristic(), sc.euler_characteristic());
        let q1 = quotient(&Cover::from_simplicial(&sd, &nm).unwrap()).unwrap();
        let a = induced_involution(&x, &g).unwrap();
        let q2 = quotient(&Cover::subdivide(&x.chain_complex(false), &a, 1 << 24).unwrap()).unwrap();
        let b1 = z2_betti(&q1.delta.chain_complex());
        assert_eq!(b1, z2_betti(&q2.delta.chain_complex()));
        // S² * ℝP² has reduced ℤ₂ Betti numbers 1 in degrees 4 and 5
        assert_eq!(b1, vec![1, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn cellular_quotient_matches_subdivision() {
        let x = hom_complex(&cycle(5), &complete(4), None).unwrap();
        let a = induced_involution(&x, &cycle_reflection(5).unwrap()).unwrap();
        let c = x.chain_complex(false);
        let cq = cellular_quotient(&c, &a).unwrap();
        cq.chain.check_d_squared_mod2().unwrap();
        let q = quotient(&Cover::subdivide(&c, &a, 1 << 22).unwrap()).unwrap();
        assert_eq!(z2_betti(&cq.chain), z2_betti(&q.delta.chain_complex()));
    }
}
