use crate::algebra::chain::{ChainComplex, Csc};
use crate::algebra::homology::{induced_cohomology_map, InducedMap, ReducedComplex};
use crate::algebra::Coeff;
use crate::complex::maps::precompose_cell;
use crate::complex::{Flavor, HomComplex, SimplicialComplex};
use crate::graph::{is_homomorphism, Involution, VertexMap};
use crate::{Error, Result};

/// An order-two permutation of the cells of a complex, with the sign
/// comparing the orientation of γ(σ) with the standard one of its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellInvolution {
    pub image: Vec<Vec<u32>>,
    pub sign: Vec<Vec<i8>>,
}

impl CellInvolution {
    pub fn identity(f_vector: &[usize]) -> CellInvolution {
        CellInvolution {
            image: f_vector.iter().map(|&n| (0..n as u32).collect()).collect(),
            sign: f_vector.iter().map(|&n| vec![1; n]).collect(),
        }
    }

    pub fn dim(&self) -> isize {
        self.image.len() as isize - 1
    }

    pub fn fixed_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.image
            .iter()
            .enumerate()
            .flat_map(|(d, im)| im.iter().enumerate().filter(|&(i, &j)| i == j as usize).map(move |(i, _)| (d, i)))
    }

    pub fn first_fixed(&self) -> Option<(usize, usize)> {
        self.fixed_cells().next()
    }

    /// No cell is mapped to itself.
    pub fn is_free(&self) -> bool {
        self.first_fixed().is_none()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().all(|im| im.iter().enumerate().all(|(i, &j)| i == j as usize))
            && self.sign.iter().flatten().all(|&s| s == 1)
    }

    /// Signed permutation matrix in each dimension.
    pub fn matrices(&self) -> Vec<Csc> {
        self.image
            .iter()
            .zip(&self.sign)
            .map(|(im, sg)| {
                Csc::from_columns(im.len(), im.iter().zip(sg).map(|(&j, &s)| vec![(j, s as i32)]).collect())
            })
            .collect()
    }

    /// γ² = 1 with signs, and γ∂ = ∂γ as integer matrices.
    pub fn check(&self, c: &ChainComplex) -> Result<()> {
        if c.lo != 0 || c.ranks() != self.image.iter().map(|v| v.len()).collect::<Vec<_>>() {
            return Err(Error::contract("involution does not match the complex"));
        }
        for (im, sg) in self.image.iter().zip(&self.sign) {
            for i in 0..im.len() {
                let j = im[i] as usize;
                if im[j] as usize != i || sg[i] * sg[j] != 1 {
                    return Err(Error::contract("cell map is not an involution"));
                }
            }
        }
        let m = self.matrices();
        for d in 1..m.len() {
            let b = c.boundary_ref(d as i32).unwrap();
            if b.matmul(&m[d])? != m[d - 1].matmul(b)? {
                return Err(Error::contract(format!("involution does not commute with the boundary in degree {d}")));
            }
        }
        Ok(())
    }

    /// The action seen as a cochain map: (γ*z)(σ) = sign(σ) z(γσ).
    pub fn apply_cochain(&self, d: usize, z: &[i64]) -> Vec<i64> {
        (0..z.len()).map(|i| self.sign[d][i] as i64 * z[self.image[d][i] as usize]).collect()
    }

    /// All cells as global ids (dimension by dimension).
    pub fn global_image(&self) -> Vec<u32> {
        let mut off = 0u32;
        let mut out = Vec::new();
        for im in &self.image {
            out.extend(im.iter().map(|&j| j + off));
            off += im.len() as u32;
        }
        out
    }
}

/// η ↦ η∘γ on Hom(G,H) or Hom₊(G,H), signs from the block permutation.
pub fn induced_involution(x: &HomComplex, gamma: &Involution) -> Result<CellInvolution> {
    let vm = VertexMap { image: gamma.image.clone() };
    if gamma.image.len() != x.g.n() || !is_homomorphism(&x.g, &x.g, &vm) {
        return Err(Error::arg("involution is not a graph automorphism of the source graph"));
    }
    let mut image = Vec::new();
    let mut sign = Vec::new();
    for d in 0..(x.dim() + 1) as usize {
        let mut im = Vec::with_capacity(x.num_cells(d));
        let mut sg = Vec::with_capacity(x.num_cells(d));
        for &k in x.keys(d) {
            let (img, s) = precompose_cell(&x.layout, &x.layout, x.flavor, k, &gamma.image)?
                .ok_or_else(|| Error::contract("automorphism collapsed a cell"))?;
            let (dd, j) = x.index_of(img).ok_or_else(|| Error::contract("image cell missing"))?;
            debug_assert_eq!(dd, d);
            im.push(j as u32);
            sg.push(s as i8);
        }
        image.push(im);
        sign.push(sg);
    }
    Ok(CellInvolution { image, sign })
}

/// γ* on Hᵏ(X;ℤ) as a matrix in the generators of a presentation.
pub fn action_on_cohomology(x: &HomComplex, gamma: &Involution, k: i32) -> Result<InducedMap> {
    let a = induced_involution(x, gamma)?;
    let r = ReducedComplex::new(&x.chain_complex(false), Coeff::Z, true)?;
    let p = r.cohomology_presentation(k)?;
    if k < 0 || k as usize >= a.image.len() {
        return Err(Error::arg("degree outside the complex"));
    }
    induced_cohomology_map(&r, &p, &r, &p, |z| Ok(a.apply_cochain(k as usize, z)))
}

/// Signs from the closed formulas: (−1)^c on Hom₊ with
/// c = Σ_{i<j≤2r} |η(i)||η(j)|, and (−1)^d on Hom with d = c + Σ_{i≤2r}|η(i)| + r,
/// for γ reversing the first 2r vertices.
pub fn closed_form_sign(x: &HomComplex, r: usize, key: u128) -> i8 {
    let sizes: Vec<u32> = (0..2 * r).map(|v| x.layout.list(key, v).count_ones()).collect();
    let mut c = 0u32;
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            c += sizes[i] * sizes[j];
        }
    }
    let e = match x.flavor {
        Flavor::HomPlus => c,
        Flavor::Hom => c + sizes.iter().sum::<u32>() + r as u32,
    };
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Vertex map of Hom₊(G,H) = Ind(G×∁H) induced by γ: (x,y) ↦ (γx,y).
pub fn plus_vertex_map(x: &HomComplex, gamma: &Involution) -> Vec<u32> {
    let nh = x.layout.nh;
    (0..x.layout.ng * nh).map(|b| (gamma.apply(b / nh) * nh + b % nh) as u32).collect()
}

/// The action of a vertex involution on a simplicial complex; signs are
/// those of the permutation sorting the image vertices.
pub fn simplicial_involution(sc: &SimplicialComplex, vmap: &[u32]) -> Result<CellInvolution> {
    if vmap.len() != sc.nverts || vmap.iter().enumerate().any(|(v, &w)| vmap[w as usize] as usize != v) {
        return Err(Error::arg("vertex map is not an involution"));
    }
    let mut image = Vec::new();
    let mut sign = Vec::new();
    for d in 0..(sc.dim() + 1) as usize {
        let mut im = Vec::with_capacity(sc.count(d));
        let mut sg = Vec::with_capacity(sc.count(d));
        for i in 0..sc.count(d) {
            let mut t: Vec<u32> = sc.simplex(d, i).iter().map(|&v| vmap[v as usize]).collect();
            let mut inv = 0usize;
            for a in 0..t.len() {
                for b in a + 1..t.len() {
                    if t[a] > t[b] {
                        inv += 1;
                    }
                }
            }
            t.sort_unstable();
            let j = sc.find(&t).ok_or_else(|| Error::arg("vertex map is not simplicial"))?;
            im.push(j as u32);
            sg.push(if inv % 2 == 0 { 1 } else { -1 });
        }
        image.push(im);
        sign.push(sg);
    }
    Ok(CellInvolution { image, sign })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{hom_complex, hom_plus_complex};
    use crate::graph::{complete, complete_swap, cycle, cycle_reflection};

    #[test]
    fn reflection_is_free_on_hom_and_matches_closed_form() {
        let x = hom_complex(&cycle(5), &complete(4), None).unwrap();
        let g = cycle_reflection(5).unwrap();
        let a = induced_involution(&x, &g).unwrap();
        assert!(a.is_free());
        a.check(&x.chain_complex(false)).unwrap();
        for d in 0..=x.dim() as usize {
            for (i, &k) in x.keys(d).iter().enumerate() {
                assert_eq!(a.sign[d][i], closed_form_sign(&x, 2, k));
            }
        }
    }

    #[test]
    fn plus_action_has_fixed_cells_and_closed_form() {
        let x = hom_plus_complex(&cycle(5), &complete(4), None).unwrap();
        let g = cycle_reflection(5).unwrap();
        let a = induced_involution(&x, &g).unwrap();
        assert!(!a.is_free());
        a.check(&x.chain_complex(false)).unwrap();
        for d in 0..=x.dim() as usize {
            for (i, &k) in x.keys(d).iter().enumerate() {
                assert_eq!(a.sign[d][i], closed_form_sign(&x, 2, k));
            }
        }
        let sc = x.to_simplicial().unwrap();
        let b = simplicial_involution(&sc, &plus_vertex_map(&x, &g)).unwrap();
        b.check(&sc.chain_complex(false)).unwrap();
        assert_eq!(b.fixed_cells().count(), a.fixed_cells().count());
        for d in 0..sc.count(1).min(1) + 1 {
            let mut s1: Vec<i8> = a.sign[d].clone();
            let mut s2: Vec<i8> = b.sign[d].clone();
            s1.sort_unstable();
            s2.sort_unstable();
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn identity_and_swap() {
        let x = hom_complex(&complete(2), &complete(3), None).unwrap();
        let id = induced_involution(&x, &Involution::identity(&complete(2))).unwrap();
        assert!(id.is_identity());
        let a = induced_involution(&x, &complete_swap(2).unwrap()).unwrap();
        assert!(a.is_free());
        assert_eq!(a.image.iter().map(|v| v.len()).sum::<usize>(), 12);
    }

    #[test]
    fn reflection_on_cohomology_of_c5_k4() {
        let x = hom_complex(&cycle(5), &complete(4), None).unwrap();
        let g = cycle_reflection(5).unwrap();
        let m = action_on_cohomology(&x, &g, 0).unwrap();
        assert_eq!(m.free_block(), vec![vec![num_bigint::BigInt::from(1)]]);
        let m = action_on_cohomology(&x, &g, 2).unwrap();
        assert_eq!(m.dst.torsion, vec![2]);
    }
}
