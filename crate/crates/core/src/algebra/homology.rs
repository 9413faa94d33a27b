use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::chain::ChainComplex;
use crate::algebra::reduce::{Reduction, Residual};
use crate::algebra::snf::{self, mat_vec, smith_dense, transpose, Dense, Kernel};
use crate::algebra::{Coeff, DEFAULT_BUDGET};
use crate::{Error, Result};

/// A finitely generated abelian group ℤ^free ⊕ ⊕ℤ/tᵢ, or a vector space of
/// dimension `free_rank` for field coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub degree: i32,
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn zero(degree: i32) -> HomologyGroup {
        HomologyGroup { degree, free_rank: 0, torsion: Vec::new() }
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let t = self.torsion[i];
            let mut j = i;
            while j < self.torsion.len() && self.torsion[j] == t {
                j += 1;
            }
            parts.push(if j - i == 1 { format!("Z{t}") } else { format!("Z{t}^{}", j - i) });
            i = j;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

fn to_u64(b: &BigInt) -> Result<u64> {
    b.to_u64().ok_or_else(|| Error::resource("torsion coefficient does not fit in 64 bits"))
}

/// A chain complex together with its reduction.
pub struct ReducedComplex {
    pub coeff: Coeff,
    pub red: Reduction,
    pub res: Residual,
    pub lo: i32,
    /// Highest degree whose homology is determined by the stored cells.
    pub valid_hi: i32,
    /// Invariant factors of each residual boundary, indexed like `res.bd`.
    inv: Vec<Vec<BigInt>>,
}

impl ReducedComplex {
    pub fn new(c: &ChainComplex, coeff: Coeff, record: bool) -> Result<ReducedComplex> {
        ReducedComplex::with_budget(c, coeff, record, DEFAULT_BUDGET)
    }

    pub fn with_budget(c: &ChainComplex, coeff: Coeff, record: bool, budget: usize) -> Result<ReducedComplex> {
        if c.nnz() > budget {
            return Err(Error::resource(format!(
                "complex has {} incidence entries, budget is {budget}",
                c.nnz()
            )));
        }
        let mut red = Reduction::new(c, coeff, record, budget)?;
        red.run()?;
        let res = red.residual();
        let inv = res
            .bd
            .iter()
            .map(|m| {
                if coeff == Coeff::Z {
                    smith_dense(m, m.first().map_or(0, |r| r.len()), false).diag
                } else {
                    // field case: every surviving entry would have been a pivot
                    debug_assert!(m.iter().all(|r| r.iter().all(|v| v.is_zero())));
                    Vec::new()
                }
            })
            .collect();
        let valid_hi = if c.truncated { c.hi() - 1 } else { c.hi() };
        Ok(ReducedComplex { coeff, red, res, lo: c.lo, valid_hi, inv })
    }

    fn invariants(&self, deg: i32) -> &[BigInt] {
        if deg <= self.lo || deg > self.lo + self.inv.len() as i32 - 1 {
            &[]
        } else {
            &self.inv[(deg - self.lo) as usize]
        }
    }

    fn check(&self, deg: i32) -> Result<()> {
        if deg > self.valid_hi && deg >= self.lo {
            return Err(Error::contract(format!(
                "degree {deg} lies at or above the truncation of the complex"
            )));
        }
        Ok(())
    }

    pub fn homology_group(&self, k: i32) -> Result<HomologyGroup> {
        self.check(k)?;
        let n = self.res.count(k);
        let rk = self.invariants(k).len();
        let rk1 = self.invariants(k + 1).len();
        let torsion = if self.coeff == Coeff::Z {
            self.invariants(k + 1).iter().filter(|d| !d.is_one()).map(to_u64).collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(HomologyGroup { degree: k, free_rank: n - rk - rk1, torsion })
    }

    /// Cohomology through the universal coefficient theorem:
    /// Hᵏ ≅ Free(H_k) ⊕ Tors(H_{k−1}) over ℤ, and Hᵏ ≅ H_k over a field.
    pub fn cohomology_group(&self, k: i32) -> Result<HomologyGroup> {
        let h = self.homology_group(k)?;
        if self.coeff != Coeff::Z {
            return Ok(h);
        }
        let torsion = if k > self.lo { self.homology_group(k - 1)?.torsion } else { Vec::new() };
        Ok(HomologyGroup { degree: k, free_rank: h.free_rank, torsion })
    }

    /// Hᵏ with explicit generators over ℤ (needs a recorded reduction to move
    /// cochains in and out).
    pub fn cohomology_presentation(&self, k: i32) -> Result<CohomologyPresentation> {
        self.check(k)?;
        if self.coeff != Coeff::Z {
            return Err(Error::Unsupported("presentations are computed over Z".into()));
        }
        let n = self.res.count(k);
        let din = transpose(&self.res.boundary(k), n); // C^{k-1} → C^k
        let dout = transpose(&self.res.boundary(k + 1), self.res.count(k + 1)); // C^k → C^{k+1}
        Ok(CohomologyPresentation::new(k, &din, self.res.count(k - 1), &dout, n))
    }

    pub fn residual_count(&self, k: i32) -> usize {
        self.res.count(k)
    }

    /// A cochain on the full complex representing a residual cochain.
    pub fn lift_cochain(&self, k: i32, z: &[BigInt]) -> Result<Vec<i64>> {
        let z: Vec<i64> = z.iter().map(|v| v.to_i64().ok_or_else(|| Error::resource("cochain value overflow"))).collect::<Result<_>>()?;
        self.red.pull_cochain(&self.res, k, &z)
    }

    pub fn restrict_cochain(&self, k: i32, z: &[i64]) -> Result<Vec<BigInt>> {
        Ok(self.red.push_cochain(&self.res, k, z)?.into_iter().map(BigInt::from).collect())
    }

    pub fn lift_chain(&self, k: i32, x: &[BigInt]) -> Result<Vec<i64>> {
        let x: Vec<i64> = x.iter().map(|v| v.to_i64().ok_or_else(|| Error::resource("chain value overflow"))).collect::<Result<_>>()?;
        self.red.pull_chain(&self.res, k, &x)
    }

    pub fn restrict_chain(&self, k: i32, x: &[i64]) -> Result<Vec<BigInt>> {
        Ok(self.red.push_chain(&self.res, k, x)?.into_iter().map(BigInt::from).collect())
    }
}

/// Hᵏ = ker(δᵏ)/im(δᵏ⁻¹) of a (residual) cochain complex, with generators:
/// torsion generators first, then free ones.
#[derive(Clone, Debug)]
pub struct CohomologyPresentation {
    pub degree: i32,
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
    /// Generators as cochains on the residual complex.
    pub gens: Vec<Vec<BigInt>>,
    u: Dense,
    rank_in: usize,
    diag: Vec<BigInt>,
    tors_idx: Vec<usize>,
    kernel: Kernel,
    dout: Dense,
}

impl CohomologyPresentation {
    fn new(degree: i32, din: &Dense, n_prev: usize, dout: &Dense, n: usize) -> CohomologyPresentation {
        let s = smith_dense(din, n_prev, true);
        let r = s.rank();
        let tors_idx: Vec<usize> = (0..r).filter(|&i| !s.diag[i].is_one()).collect();
        // δᵏ in the coordinates y = U z, restricted to the non-image part
        let bu = snf::matmul(dout, &s.u_inv, n, n);
        let tail: Dense = bu.iter().map(|row| row[r..].to_vec()).collect();
        let kernel = Kernel::new(&tail, n - r);
        let mut gens = Vec::new();
        for &i in &tors_idx {
            gens.push(s.u_inv.iter().map(|row| row[i].clone()).collect());
        }
        for b in &kernel.basis {
            let mut y = vec![BigInt::zero(); n];
            y[r..].clone_from_slice(b);
            gens.push(mat_vec(&s.u_inv, &y));
        }
        CohomologyPresentation {
            degree,
            torsion: tors_idx.iter().map(|&i| s.diag[i].clone()).collect(),
            free_rank: kernel.dim(),
            gens,
            u: s.u,
            rank_in: r,
            diag: s.diag,
            tors_idx,
            kernel,
            dout: dout.clone(),
        }
    }

    pub fn group(&self) -> Result<HomologyGroup> {
        Ok(HomologyGroup {
            degree: self.degree,
            free_rank: self.free_rank,
            torsion: self.torsion.iter().map(to_u64).collect::<Result<_>>()?,
        })
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn is_cocycle(&self, z: &[BigInt]) -> bool {
        mat_vec(&self.dout, z).iter().all(|v| v.is_zero())
    }

    /// Coordinates of a residual cocycle: torsion parts reduced into
    /// [0, tᵢ), then free parts.
    pub fn coords(&self, z: &[BigInt]) -> Result<Vec<BigInt>> {
        if !self.is_cocycle(z) {
            return Err(Error::contract("coordinates requested for a non-cocycle"));
        }
        let y = mat_vec(&self.u, z);
        let mut out = Vec::new();
        for &i in &self.tors_idx {
            out.push(y[i].mod_floor(&self.diag[i]));
        }
        out.extend(self.kernel.coords(&y[self.rank_in..]));
        Ok(out)
    }

    /// Whether a residual cocycle is a coboundary.
    pub fn is_coboundary(&self, z: &[BigInt]) -> Result<bool> {
        Ok(self.coords(z)?.iter().all(|c| c.is_zero()))
    }
}

/// Matrix of an induced map Hᵏ(src) → Hᵏ(dst) between presentations, given
/// the cochain map on full cochains. Columns follow `src` generators, rows
/// `dst` generators; torsion rows are reduced modulo their orders.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub src: HomologyGroup,
    pub dst: HomologyGroup,
    pub matrix: Vec<Vec<BigInt>>,
}

impl InducedMap {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| r.iter().all(|v| v.is_zero()))
    }

    /// Free-rank block (rows and columns of free generators only).
    pub fn free_block(&self) -> Vec<Vec<BigInt>> {
        let (ts, td) = (self.src.torsion.len(), self.dst.torsion.len());
        self.matrix[td..].iter().map(|r| r[ts..].to_vec()).collect()
    }
}

pub fn induced_cohomology_map(
    src: &ReducedComplex,
    src_p: &CohomologyPresentation,
    dst: &ReducedComplex,
    dst_p: &CohomologyPresentation,
    cochain_map: impl Fn(&[i64]) -> Result<Vec<i64>>,
) -> Result<InducedMap> {
    let k = src_p.degree;
    let mut cols = Vec::new();
    for g in &src_p.gens {
        let full = src.lift_cochain(k, g)?;
        let img = cochain_map(&full)?;
        let r = dst.restrict_cochain(dst_p.degree, &img)?;
        cols.push(dst_p.coords(&r)?);
    }
    let rows = dst_p.num_gens();
    let matrix = (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    Ok(InducedMap { src: src_p.group()?, dst: dst_p.group()?, matrix })
}

fn window(c: &ChainComplex, degrees: Option<(i32, i32)>) -> (i32, i32) {
    let hi = if c.truncated { c.hi() - 1 } else { c.hi() };
    degrees.unwrap_or((c.lo, hi))
}

/// Homology groups in a degree window (default: every trusted degree).
pub fn homology(c: &ChainComplex, coeff: Coeff, degrees: Option<(i32, i32)>) -> Result<Vec<HomologyGroup>> {
    let (a, b) = window(c, degrees);
    if c.boundaries.is_empty() {
        return Ok((a..=b).map(HomologyGroup::zero).collect());
    }
    let r = ReducedComplex::new(c, coeff, false)?;
    (a..=b).map(|k| if k < c.lo || k > c.hi() { Ok(HomologyGroup::zero(k)) } else { r.homology_group(k) }).collect()
}

pub fn cohomology(c: &ChainComplex, coeff: Coeff, degrees: Option<(i32, i32)>) -> Result<Vec<HomologyGroup>> {
    let (a, b) = window(c, degrees);
    if c.boundaries.is_empty() {
        return Ok((a..=b).map(HomologyGroup::zero).collect());
    }
    let r = ReducedComplex::new(c, coeff, false)?;
    (a..=b).map(|k| if k < c.lo || k > c.hi() { Ok(HomologyGroup::zero(k)) } else { r.cohomology_group(k) }).collect()
}

/// Rank of an integer matrix over ℤ/p.
pub fn rank_mod_p(m: &crate::algebra::Csc, p: u32) -> Result<usize> {
    let c = ChainComplex { lo: 0, boundaries: vec![crate::algebra::Csc::zero(0, m.nrows), m.clone()], truncated: false };
    let mut r = Reduction::new(&c, Coeff::Zp(p), false, usize::MAX)?;
    r.run()?;
    Ok(r.eliminated_pairs())
}

/// Integer rank (the number of nonzero invariant factors).
pub fn rank_z(m: &crate::algebra::Csc) -> Result<usize> {
    let (units, rest) = crate::algebra::reduce::eliminate_matrix(m)?;
    let s = smith_dense(&rest, rest.first().map_or(0, |r| r.len()), false);
    Ok(units + s.rank())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::chain::Csc;
    use crate::complex::simplicial::SimplicialComplex;
    use crate::complex::{hom_complex, simplicial};
    use crate::graph::{complete, cycle};

    pub(crate) fn rp2() -> SimplicialComplex {
        let f: Vec<Vec<u32>> = [
            [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
            [1, 2, 4], [2, 3, 5], [1, 3, 4], [1, 3, 5], [2, 4, 5],
        ]
        .iter()
        .map(|t| t.to_vec())
        .collect();
        simplicial::SimplicialComplex::from_facets(6, &f).unwrap()
    }

    // direct dense SNF of every boundary, no reduction
    fn oracle(c: &ChainComplex) -> Vec<HomologyGroup> {
        let inv: Vec<Vec<BigInt>> = (c.lo..=c.hi())
            .map(|d| {
                let b = c.boundary(d);
                smith_dense(&snf::from_csc(&b), b.ncols, false).diag
            })
            .collect();
        (c.lo..=c.hi())
            .map(|d| {
                let i = (d - c.lo) as usize;
                let up = inv.get(i + 1).cloned().unwrap_or_default();
                HomologyGroup {
                    degree: d,
                    free_rank: c.rank(d) - inv[i].len() - up.len(),
                    torsion: up.iter().filter(|x| !x.is_one()).map(|x| x.to_u64().unwrap()).collect(),
                }
            })
            .collect()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn circle_and_projective_plane() {
        let hex = hom_complex(&complete(2), &complete(3), None).unwrap().chain_complex(false);
        let h = homology(&hex, Coeff::Z, None).unwrap();
        assert_eq!(h.iter().map(|g| g.free_rank).collect::<Vec<_>>(), vec![1, 1]);
        let p = rp2().chain_complex(false);
        let h = homology(&p, Coeff::Z, None).unwrap();
        assert_eq!(h, oracle(&p));
        assert_eq!(h[1].torsion, vec![2]);
        assert_eq!(h[2].free_rank, 0);
        let co = cohomology(&p, Coeff::Z, None).unwrap();
        assert_eq!(co[1], HomologyGroup::zero(1));
        assert_eq!(co[2].torsion, vec![2]);
        let z2 = cohomology(&p, crate::algebra::Z2, None).unwrap();
        assert_eq!(z2.iter().map(|g| g.free_rank).collect::<Vec<_>>(), vec![1, 1, 1]);
        assert_eq!(z2[1].to_string(), "Z");
        assert_eq!(co[2].to_string(), "Z2");
    }

    #[test]
    fn hom_c5_k4_matches_oracle() {
        let c = hom_complex(&cycle(5), &complete(4), None).unwrap().chain_complex(false);
        let h = homology(&c, Coeff::Z, None).unwrap();
        assert_eq!(h, oracle(&c));
        let co = cohomology(&c, Coeff::Z, Some((1, 2))).unwrap();
        assert!(co[0].is_zero());
        assert_eq!(co[1].torsion, vec![2]);
        assert_eq!(co[1].free_rank, 0);
    }

    #[test]
    fn presentation_of_rp2() {
        let c = rp2().chain_complex(false);
        let r = ReducedComplex::new(&c, Coeff::Z, true).unwrap();
        let p = r.cohomology_presentation(2).unwrap();
        assert_eq!(p.group().unwrap().torsion, vec![2]);
        // any single triangle generates H²
        let mut z = vec![0i64; c.rank(2)];
        z[3] = 1;
        let res = r.restrict_cochain(2, &z).unwrap();
        assert_eq!(p.coords(&res).unwrap(), big(&[1]));
        let id = induced_cohomology_map(&r, &p, &r, &p, |x| Ok(x.to_vec())).unwrap();
        assert_eq!(id.matrix, vec![big(&[1])]);
        // generators lifted and restricted come back with the same class
        for g in &p.gens {
            let full = r.lift_cochain(2, g).unwrap();
            let back = r.restrict_cochain(2, &full).unwrap();
            assert_eq!(p.coords(&back).unwrap(), p.coords(g).unwrap());
        }
    }

    #[test]
    fn split_cocycle_gives_witness() {
        let s = rp2();
        let c = s.chain_complex(false);
        let b = c.boundary(2);
        let r = ReducedComplex::new(&c, crate::algebra::Z2, true).unwrap();
        let x: Vec<i64> = (0..c.rank(1)).map(|i| (i % 3 == 0) as i64).collect();
        let z: Vec<i64> = b.mul_vec_t(&x).iter().map(|v| v.rem_euclid(2)).collect();
        let (w, zres) = r.red.split_cocycle(&r.res, 2, &z).unwrap();
        assert!(zres.iter().all(|&v| v == 0));
        let dz: Vec<i64> = b.mul_vec_t(&w).iter().map(|v| v.rem_euclid(2)).collect();
        assert_eq!(dz, z);
    }

    #[test]
    fn ranks() {
        let m = Csc::from_columns(2, vec![vec![(0, 2), (1, 4)], vec![(0, 6), (1, 8)]]);
        assert_eq!(rank_z(&m).unwrap(), 2);
        assert_eq!(rank_mod_p(&m, 2).unwrap(), 0);
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 2);
    }
}
