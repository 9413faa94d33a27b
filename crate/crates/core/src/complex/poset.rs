use crate::algebra::chain::ChainComplex;
use crate::complex::SimplicialComplex;
use crate::{Error, Result};

/// Face poset of a regular cell complex, read off the nonzero incidences of
/// its cellular boundary. Elements are numbered globally, dimension by
/// dimension, so a chain listed by increasing element id is listed by
/// increasing rank.
#[derive(Clone, Debug)]
pub struct FacePoset {
    pub offsets: Vec<usize>,
    pub rank: Vec<u32>,
    /// All proper faces of each element, sorted.
    pub below: Vec<Vec<u32>>,
}

impl FacePoset {
    pub fn from_chain_complex(c: &ChainComplex) -> Result<FacePoset> {
        if c.lo != 0 {
            return Err(Error::arg("face poset needs an unreduced complex starting in degree 0"));
        }
        let mut offsets = vec![0usize];
        for d in 0..=c.hi().max(-1) {
            offsets.push(offsets.last().unwrap() + c.rank(d));
        }
        let total = *offsets.last().unwrap();
        let mut rank = Vec::with_capacity(total);
        let mut below: Vec<Vec<u32>> = Vec::with_capacity(total);
        for d in 0..=c.hi().max(-1) {
            let b = c.boundary_ref(d).unwrap();
            for j in 0..b.ncols {
                rank.push(d as u32);
                let mut s: Vec<u32> = Vec::new();
                if d > 0 {
                    for (i, _) in b.col(j) {
                        let f = (offsets[d as usize - 1] + i as usize) as u32;
                        s.push(f);
                        s.extend_from_slice(&below[f as usize]);
                    }
                    s.sort_unstable();
                    s.dedup();
                }
                below.push(s);
            }
        }
        Ok(FacePoset { offsets, rank, below })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn global(&self, d: usize, i: usize) -> u32 {
        (self.offsets[d] + i) as u32
    }

    pub fn local(&self, g: u32) -> (usize, usize) {
        let d = self.rank[g as usize] as usize;
        (d, g as usize - self.offsets[d])
    }

    /// Number of chains (simplices of the order complex).
    pub fn chain_count(&self) -> u64 {
        // chains with top element c: 1 + Σ_{f < c} chains(f)
        let mut with_top = vec![0u64; self.len()];
        for c in 0..self.len() {
            with_top[c] = 1 + self.below[c].iter().map(|&f| with_top[f as usize]).sum::<u64>();
        }
        with_top.iter().sum()
    }

    /// Order complex (barycentric subdivision); refuses more than `limit`
    /// simplices.
    pub fn order_complex(&self, limit: u64) -> Result<SimplicialComplex> {
        let count = self.chain_count();
        if count > limit {
            return Err(Error::resource(format!("order complex has {count} simplices, limit {limit}")));
        }
        let mut out: Vec<Vec<u32>> = Vec::with_capacity(count as usize);
        let mut stack = Vec::new();
        fn rec(p: &FacePoset, c: u32, stack: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            stack.push(c);
            let mut s = stack.clone();
            s.reverse();
            out.push(s);
            for &f in &p.below[c as usize] {
                rec(p, f, stack, out);
            }
            stack.pop();
        }
        for c in 0..self.len() as u32 {
            rec(self, c, &mut stack, &mut out);
        }
        SimplicialComplex::from_simplices(self.len(), out)
    }
}

/// Barycentric subdivision of a regular cell complex.
pub fn barycentric_subdivision(c: &ChainComplex, limit: u64) -> Result<SimplicialComplex> {
    FacePoset::from_chain_complex(c)?.order_complex(limit)
}
