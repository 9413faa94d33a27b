use crate::algebra::chain::{ChainComplex, Csc};
use crate::algebra::Coeff;
use crate::complex::{hom_plus_complex, HomComplex};
use crate::graph::Graph;
use crate::{Error, Result};

/// A cochain complex with a decreasing filtration F⁰ ⊇ F¹ ⊇ …, given by
/// the level of every basis cochain. Cells are those of `chain`; the
/// coboundary is the transpose of its boundary.
#[derive(Clone, Debug)]
pub struct FilteredCochainComplex {
    pub chain: ChainComplex,
    pub level: Vec<Vec<u32>>,
    pub coeff: Coeff,
}

impl FilteredCochainComplex {
    pub fn new(chain: ChainComplex, level: Vec<Vec<u32>>, coeff: Coeff) -> Result<FilteredCochainComplex> {
        if chain.lo != 0 || chain.truncated {
            return Err(Error::arg("filtered complexes start in degree 0 and are not truncated"));
        }
        if level.len() != chain.ranks().len() || level.iter().zip(chain.ranks()).any(|(l, r)| l.len() != r) {
            return Err(Error::arg("filtration levels do not match the cells"));
        }
        let f = FilteredCochainComplex { chain, level, coeff };
        f.check()?;
        Ok(f)
    }

    /// δ never lowers the level.
    pub fn check(&self) -> Result<()> {
        for d in 1..self.level.len() {
            let b = self.chain.boundary_ref(d as i32).unwrap();
            for j in 0..b.ncols {
                for (i, v) in b.col(j) {
                    if v != 0 && self.level[d][j] < self.level[d - 1][i as usize] {
                        return Err(Error::contract(format!("coboundary lowers the level of the {}-cell {i}", d - 1)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> i32 {
        self.level.len() as i32 - 1
    }

    /// Number of distinct possible levels, max level + 1.
    pub fn num_levels(&self) -> u32 {
        self.level.iter().flatten().max().map_or(0, |&m| m + 1)
    }

    /// The cochain complex F^p/F^{p+1}, as a chain complex on the cells of
    /// level exactly p (degrees unchanged).
    pub fn graded_piece(&self, p: u32) -> ChainComplex {
        self.restrict(|l| l == p)
    }

    /// The subcomplex F^p.
    pub fn subcomplex(&self, p: u32) -> ChainComplex {
        self.restrict(|l| l >= p)
    }

    fn restrict(&self, keep: impl Fn(u32) -> bool) -> ChainComplex {
        let idx: Vec<Vec<u32>> = self
            .level
            .iter()
            .map(|ls| {
                let mut next = 0u32;
                ls.iter()
                    .map(|&l| {
                        if keep(l) {
                            next += 1;
                            next - 1
                        } else {
                            u32::MAX
                        }
                    })
                    .collect()
            })
            .collect();
        let ranks: Vec<usize> = idx.iter().map(|v| v.iter().filter(|&&i| i != u32::MAX).count()).collect();
        let mut bds = Vec::new();
        for d in 0..ranks.len() {
            if d == 0 {
                bds.push(Csc::zero(0, ranks[0]));
                continue;
            }
            let b = self.chain.boundary_ref(d as i32).unwrap();
            let mut cols = Vec::with_capacity(ranks[d]);
            for j in 0..b.ncols {
                if idx[d][j] == u32::MAX {
                    continue;
                }
                cols.push(b.col(j).filter(|&(i, _)| idx[d - 1][i as usize] != u32::MAX).map(|(i, v)| (idx[d - 1][i as usize], v)).collect());
            }
            bds.push(Csc::from_columns(ranks[d - 1], cols));
        }
        ChainComplex { lo: 0, boundaries: bds, truncated: false }
    }
}

/// Filtration of C*(Hom₊(G,H)) by |supp η| ≥ p+1.
pub fn support_filtration(g: &Graph, h: &Graph, coeff: Coeff) -> Result<(HomComplex, FilteredCochainComplex)> {
    let x = hom_plus_complex(g, h, None)?;
    if x.incidence_count() > crate::algebra::DEFAULT_BUDGET {
        return Err(Error::resource("support filtration exceeds the incidence budget"));
    }
    let level = (0..(x.dim() + 1).max(0) as usize)
        .map(|d| x.keys(d).iter().map(|&k| x.layout.support(k).count_ones() - 1).collect())
        .collect();
    let c = x.chain_complex(false);
    let f = FilteredCochainComplex::new(c, level, coeff)?;
    Ok((x, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::homology::cohomology;
    use crate::complex::hom_complex;
    use crate::graph::{complete, cycle};

    #[test]
    fn levels_and_top_quotient() {
        let (x, f) = support_filtration(&cycle(5), &complete(4), Coeff::Z).unwrap();
        assert_eq!(f.num_levels(), 5);
        let full = x.keys(4).iter().position(|&k| x.layout.support(k).count_ones() == 5).unwrap();
        assert_eq!(f.level[4][full], 4);
        // F⁴/F⁵ is C*(Hom(C₅,K₄)) shifted by 4
        let top = f.graded_piece(4);
        let hom = hom_complex(&cycle(5), &complete(4), None).unwrap();
        let r: Vec<usize> = top.ranks().into_iter().skip(4).collect();
        assert_eq!(r, hom.f_vector());
        let a = cohomology(&top, Coeff::Z, Some((4, 7))).unwrap();
        let b = cohomology(&hom.chain_complex(false), Coeff::Z, Some((0, 3))).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_eq!((u.free_rank, &u.torsion), (v.free_rank, &v.torsion));
        }
    }
}
