use rayon::prelude::*;

use crate::algebra::chain::Csc;
use crate::algebra::homology::{induced_cohomology_map, InducedMap, ReducedComplex};
use crate::algebra::Coeff;
use crate::complex::poset::FacePoset;
use crate::complex::{Flavor, HomComplex, Layout, SimplicialComplex};
use crate::graph::{bits, VertexMap};
use crate::{Error, Result};

fn sort_sign(seq: &[usize]) -> i32 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Image of one cell of Hom(G',H) under η ↦ η∘φ, as (key, sign); `None`
/// when the cell collapses onto a lower-dimensional one.
pub fn precompose_cell(
    src: &Layout,
    dst: &Layout,
    flavor: Flavor,
    key: u128,
    phi: &[usize],
) -> Result<Option<(u128, i32)>> {
    let mut img = 0u128;
    for (v, &w) in phi.iter().enumerate() {
        img |= src.list(key, w) << (v * dst.nh);
    }
    match flavor {
        Flavor::Hom => {
            let mut pre = vec![Vec::new(); src.ng];
            for (v, &w) in phi.iter().enumerate() {
                pre[w].push(v);
            }
            let mut order = Vec::new();
            let mut dims = Vec::new();
            let mut collapsed = false;
            for w in 0..src.ng {
                let d = src.list(key, w).count_ones() as usize - 1;
                if d == 0 {
                    continue;
                }
                match pre[w].len() {
                    0 => collapsed = true,
                    1 => {
                        order.push(pre[w][0]);
                        dims.push(d);
                    }
                    _ => {
                        return Err(Error::Unsupported(
                            "precomposition with a map that is not injective on a nontrivial list is not cellular".into(),
                        ))
                    }
                }
            }
            if collapsed {
                return Ok(None);
            }
            let mut e = 0usize;
            for i in 0..order.len() {
                for j in i + 1..order.len() {
                    if order[i] > order[j] {
                        e += dims[i] * dims[j];
                    }
                }
            }
            Ok(Some((img, if e % 2 == 0 { 1 } else { -1 })))
        }
        Flavor::HomPlus => {
            let mut pre = vec![usize::MAX; src.ng];
            for (v, &w) in phi.iter().enumerate() {
                if pre[w] != usize::MAX {
                    return Err(Error::Unsupported("Hom₊ precomposition needs an injective map".into()));
                }
                pre[w] = v;
            }
            let mut seq = Vec::new();
            for b in bits(key) {
                let (w, y) = (b / src.nh, b % src.nh);
                if pre[w] == usize::MAX {
                    return Ok(None);
                }
                seq.push(pre[w] * dst.nh + y);
            }
            Ok(Some((img, sort_sign(&seq))))
        }
    }
}

/// The chain map C_*(Hom(G',H)) → C_*(Hom(G,H)) induced by a graph map
/// φ: G → G', one sparse matrix per dimension (rows: cells of `dst`).
pub fn precompose_chain_map(src: &HomComplex, dst: &HomComplex, phi: &VertexMap) -> Result<Vec<Csc>> {
    if src.flavor != dst.flavor {
        return Err(Error::arg("chain map between different complex flavours"));
    }
    if phi.image.len() != dst.g.n() || !phi.is_homomorphism(&dst.g, &src.g) {
        return Err(Error::domain("map is not a graph homomorphism G → G'"));
    }
    if src.h != dst.h {
        return Err(Error::arg("precomposition needs a common target graph"));
    }
    let top = src.dim().max(-1);
    let mut out = Vec::new();
    for d in 0..=top {
        let d = d as usize;
        let cols: Result<Vec<Vec<(u32, i32)>>> = src
            .keys(d)
            .par_iter()
            .map(|&k| match precompose_cell(&src.layout, &dst.layout, src.flavor, k, &phi.image)? {
                None => Ok(Vec::new()),
                Some((img, s)) => {
                    if dst.dim_of_key(img) != d {
                        return Ok(Vec::new());
                    }
                    match dst.index_of(img) {
                        Some((_, i)) => Ok(vec![(i as u32, s)]),
                        None if dst.cap.is_some_and(|c| d > c) => Ok(Vec::new()),
                        None => Err(Error::contract("image cell missing from target complex")),
                    }
                }
            })
            .collect();
        out.push(Csc::from_columns(dst.num_cells(d), cols?));
    }
    Ok(out)
}

/// (−1)^{c(η)} with c(η) the total size of the lists at even positions,
/// counting G-vertices from 1.
pub fn rho_sign(layout: &Layout, key: u128) -> i32 {
    let c: u32 = (1..layout.ng).step_by(2).map(|v| layout.list(key, v).count_ones()).sum();
    if c % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Checks that η₊* ↦ (−1)^{c(η)} η* intertwines the coboundary of the
/// full-support part of C*(Hom₊(G,H)) with that of C*(Hom(G,H)), in every
/// degree where both are available.
pub fn check_rho_cochain_iso(hom: &HomComplex, plus: &HomComplex) -> Result<()> {
    if hom.flavor != Flavor::Hom || plus.flavor != Flavor::HomPlus || hom.g != plus.g || hom.h != plus.h {
        return Err(Error::arg("need Hom(G,H) and Hom₊(G,H) of the same pair"));
    }
    let ng = hom.layout.ng;
    let shift = ng - 1;
    for d in 0..=hom.dim().max(-1) as usize {
        let full: Vec<u128> = plus.full_support_keys(d + shift);
        if full.len() != hom.num_cells(d) || full.as_slice() != hom.keys(d) {
            return Err(Error::contract(format!("full-support simplices differ from Hom cells in dimension {d}")));
        }
    }
    // δ on X: coefficient of τ₊* in δσ₊* equals [σ : τ] in ∂τ; compare
    // ρδ_X(σ*) and δ_Hom ρ(σ*) entrywise through the boundary of each τ
    for d in 1..=hom.dim().max(-1) as usize {
        for j in 0..hom.num_cells(d) {
            let tau = hom.key(d, j);
            let hb = hom.boundary(d, j);
            let (pd, pj) = plus.index_of(tau).ok_or_else(|| Error::contract("missing Hom₊ simplex"))?;
            let pb = plus.boundary(pd, pj);
            for (fi, s_plus) in pb {
                let face = plus.key(pd - 1, fi as usize);
                if plus.layout.support(face).count_ones() as usize != ng {
                    continue;
                }
                let hi = hom.index_of(face).ok_or_else(|| Error::contract("missing face"))?.1;
                let s_hom = hb.iter().find(|e| e.0 as usize == hi).map(|e| e.1).unwrap_or(0);
                // ρ(δσ₊*)(τ) = ρ(τ)·s_plus, δ(ρσ₊*)(τ) = ρ(σ)·s_hom
                if rho_sign(&hom.layout, tau) * s_plus != rho_sign(&hom.layout, face) * s_hom {
                    return Err(Error::contract(format!("ρ fails to commute at cell {tau:#x}")));
                }
            }
            if hb.len() != plus.boundary(pd, pj).iter().filter(|(fi, _)| {
                plus.layout.support(plus.key(pd - 1, *fi as usize)).count_ones() as usize == ng
            }).count() {
                return Err(Error::contract("face counts differ"));
            }
        }
    }
    Ok(())
}

/// For φ: G → G' the cell map Hom(G',H) → Hom(G,H) induces
/// Hᵏ(Hom(G,H);ℤ) → Hᵏ(Hom(G',H);ℤ); `src` is Hom(G',H), `dst` is Hom(G,H).
pub fn precompose_on_cohomology(src: &HomComplex, dst: &HomComplex, phi: &VertexMap, k: i32) -> Result<InducedMap> {
    let f = precompose_chain_map(src, dst, phi)?;
    let rs = ReducedComplex::new(&src.chain_complex(false), Coeff::Z, true)?;
    let rd = ReducedComplex::new(&dst.chain_complex(false), Coeff::Z, true)?;
    let (ps, pd) = (rs.cohomology_presentation(k)?, rd.cohomology_presentation(k)?);
    let fk = f.get(k as usize).ok_or_else(|| Error::arg("degree outside the complex"))?;
    // (z∘f)(σ) = z(f σ)
    induced_cohomology_map(&rd, &pd, &rs, &ps, |z| Ok(fk.mul_vec_t(z)))
}

/// supp η = V(G) ∖ η⁻¹(∅).
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SupportVector {
    pub support: Vec<usize>,
}

/// The support of every cell, dimension by dimension.
pub fn support_map(x: &HomComplex) -> Vec<Vec<SupportVector>> {
    (0..(x.dim() + 1).max(0) as usize)
        .map(|d| x.keys(d).iter().map(|&k| SupportVector { support: bits(x.layout.support(k)).collect() }).collect())
        .collect()
}

/// η ↦ ψ∘η on keys, lists replaced by their images.
pub fn postcompose_key(src: &Layout, dst: &Layout, key: u128, psi: &[usize]) -> u128 {
    let mut img = 0u128;
    for v in 0..src.ng {
        for y in bits(src.list(key, v)) {
            img |= dst.bit(v, psi[y]);
        }
    }
    img
}

/// Hom(G,ψ) for ψ: H → H′ as a monotone map of face posets, with its
/// simplicial chain map between the order complexes.
pub struct CovariantMap {
    pub src: SimplicialComplex,
    pub dst: SimplicialComplex,
    /// Face-poset element of the source ↦ element of the target.
    pub poset_map: Vec<u32>,
    pub matrices: Vec<Csc>,
}

pub fn induced_map_covariant(x: &HomComplex, y: &HomComplex, psi: &VertexMap, limit: u64) -> Result<CovariantMap> {
    if x.flavor != y.flavor || x.g != y.g {
        return Err(Error::arg("covariant maps need a common source graph and flavour"));
    }
    if psi.image.len() != x.h.n() || !psi.is_homomorphism(&x.h, &y.h) {
        return Err(Error::arg("map is not a graph homomorphism H → H'"));
    }
    if x.cap.is_some() || y.cap.is_some() {
        return Err(Error::Unsupported("covariant maps need complete complexes".into()));
    }
    let cx = x.chain_complex(false);
    let cy = y.chain_complex(false);
    let px = FacePoset::from_chain_complex(&cx)?;
    let py = FacePoset::from_chain_complex(&cy)?;
    let mut poset_map = Vec::with_capacity(px.len());
    for d in 0..(x.dim() + 1).max(0) as usize {
        for &k in x.keys(d) {
            let img = postcompose_key(&x.layout, &y.layout, k, &psi.image);
            let (e, j) = y.index_of(img).ok_or_else(|| Error::contract("image cell missing"))?;
            poset_map.push(py.global(e, j));
        }
    }
    let src = px.order_complex(limit)?;
    let dst = py.order_complex(limit)?;
    let mut matrices = Vec::new();
    for d in 0..(src.dim() + 1).max(0) as usize {
        let cols = (0..src.count(d))
            .map(|i| {
                let t: Vec<u32> = src.simplex(d, i).iter().map(|&v| poset_map[v as usize]).collect();
                if t.windows(2).any(|w| w[0] >= w[1]) {
                    return Ok(Vec::new());
                }
                let j = dst.find(&t).ok_or_else(|| Error::contract("image chain is not a chain"))?;
                Ok(vec![(j as u32, 1)])
            })
            .collect::<Result<Vec<_>>>()?;
        matrices.push(Csc::from_columns(dst.count(d), cols));
    }
    Ok(CovariantMap { src, dst, poset_map, matrices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{hom_complex, hom_plus_complex};
    use crate::graph;

    #[test]
    fn identity_map_is_identity() {
        let g = graph::cycle(5);
        let h = graph::complete(3);
        let c = hom_complex(&g, &h, None).unwrap();
        let id = VertexMap { image: (0..5).collect() };
        let m = precompose_chain_map(&c, &c, &id).unwrap();
        for (d, mat) in m.iter().enumerate() {
            assert_eq!(mat.nnz(), c.num_cells(d));
            assert!((0..mat.ncols).all(|j| mat.get(j, j) == 1));
        }
    }

    #[test]
    fn rho_commutes() {
        for (g, h) in [(graph::cycle(5), graph::complete(4)), (graph::path(3), graph::complete(3))] {
            let hom = hom_complex(&g, &h, None).unwrap();
            let plus = hom_plus_complex(&g, &h, None).unwrap();
            check_rho_cochain_iso(&hom, &plus).unwrap();
        }
    }

    #[test]
    fn covariant_maps_are_chain_maps() {
        let g = graph::path(3);
        let x = hom_complex(&g, &graph::complete(3), None).unwrap();
        let y = hom_complex(&g, &graph::complete(4), None).unwrap();
        let incl = VertexMap { image: vec![0, 1, 2] };
        let m = induced_map_covariant(&x, &y, &incl, 1_000_000).unwrap();
        let (a, b) = (m.src.chain_complex(false), m.dst.chain_complex(false));
        for d in 1..m.matrices.len() {
            let l = b.boundary(d as i32).matmul(&m.matrices[d]).unwrap();
            let r = m.matrices[d - 1].matmul(&a.boundary(d as i32)).unwrap();
            assert_eq!(l, r);
        }
        let id = VertexMap { image: vec![0, 1, 2] };
        let m = induced_map_covariant(&x, &x, &id, 1_000_000).unwrap();
        assert!(m.matrices.iter().enumerate().all(|(d, mat)| mat.nnz() == m.src.count(d)));
        // a non-injective ψ: K₃ → K₂ is not a homomorphism
        let fold = VertexMap { image: vec![0, 1, 0] };
        assert!(induced_map_covariant(&x, &hom_complex(&g, &graph::complete(2), None).unwrap(), &fold, 1000).is_err());
    }

    #[test]
    fn supports() {
        let x = hom_plus_complex(&graph::path(2), &graph::complete(2), None).unwrap();
        let s = support_map(&x);
        assert_eq!(s[0].len(), 4);
        assert!(s[0].iter().all(|v| v.support.len() == 1));
        assert_eq!(s[1].iter().filter(|v| v.support.len() == 2).count(), 2);
    }
}
