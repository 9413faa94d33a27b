use rayon::prelude::*;

use crate::algebra::chain::{ChainComplex, Csc};
use crate::{Error, Result};

/// Abstract simplicial complex on vertices `0..nverts`. Simplices are stored
/// flat per dimension, each as its vertex list in increasing order, and the
/// lists of one dimension are sorted lexicographically. Vertex order is the
/// orientation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    pub nverts: usize,
    flat: Vec<Vec<u32>>,
}

impl SimplicialComplex {
    /// From a face-closed list of simplices (any order, any vertex order).
    pub fn from_simplices(nverts: usize, simplices: Vec<Vec<u32>>) -> Result<SimplicialComplex> {
        let mut per: Vec<Vec<Vec<u32>>> = Vec::new();
        for mut s in simplices {
            if s.is_empty() {
                continue;
            }
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) || s.iter().any(|&v| v as usize >= nverts) {
                return Err(Error::arg("simplex with repeated or out-of-range vertex"));
            }
            let d = s.len() - 1;
            if per.len() <= d {
                per.resize(d + 1, Vec::new());
            }
            per[d].push(s);
        }
        let flat = per
            .into_iter()
            .map(|mut l| {
                l.par_sort_unstable();
                l.dedup();
                l.concat()
            })
            .collect();
        let sc = SimplicialComplex { nverts, flat };
        sc.check_closed()?;
        Ok(sc)
    }

    /// All faces of the given facets.
    pub fn from_facets(nverts: usize, facets: &[Vec<u32>]) -> Result<SimplicialComplex> {
        let mut all = std::collections::BTreeSet::new();
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            if f.len() > 30 {
                return Err(Error::resource("facet too large to expand"));
            }
            for m in 1u32..(1 << f.len()) {
                all.insert((0..f.len()).filter(|&i| m >> i & 1 == 1).map(|i| f[i]).collect::<Vec<_>>());
            }
        }
        SimplicialComplex::from_simplices(nverts, all.into_iter().collect())
    }

    fn check_closed(&self) -> Result<()> {
        for d in 1..self.flat.len() {
            for i in 0..self.count(d) {
                let s = self.simplex(d, i);
                for j in 0..=d {
                    let f: Vec<u32> = s.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect();
                    if self.find(&f).is_none() {
                        return Err(Error::arg(format!("face {f:?} of {s:?} missing")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> isize {
        self.flat.len() as isize - 1
    }

    pub fn count(&self, d: usize) -> usize {
        self.flat.get(d).map_or(0, |f| f.len() / (d + 1))
    }

    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.flat.len()).map(|d| self.count(d)).collect()
    }

    pub fn len(&self) -> usize {
        self.f_vector().iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn simplex(&self, d: usize, i: usize) -> &[u32] {
        &self.flat[d][i * (d + 1)..(i + 1) * (d + 1)]
    }

    /// Index of a sorted vertex list, if present.
    pub fn find(&self, s: &[u32]) -> Option<usize> {
        if s.is_empty() {
            return None;
        }
        let d = s.len() - 1;
        let f = self.flat.get(d)?;
        let n = f.len() / (d + 1);
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match f[mid * (d + 1)..(mid + 1) * (d + 1)].cmp(s) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Faces of (d,i) as (index, sign) with sign (−1)^j for the j-th vertex removed.
    pub fn boundary(&self, d: usize, i: usize) -> Vec<(u32, i32)> {
        if d == 0 {
            return Vec::new();
        }
        let s = self.simplex(d, i);
        let mut f = Vec::with_capacity(d);
        (0..=d)
            .map(|j| {
                f.clear();
                f.extend(s.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v));
                let idx = self.find(&f).expect("closed complex");
                (idx as u32, if j % 2 == 0 { 1 } else { -1 })
            })
            .collect()
    }

    pub fn chain_complex(&self, reduced: bool) -> ChainComplex {
        let mut bds = Vec::new();
        if reduced {
            bds.push(Csc::zero(0, 1));
        }
        for d in 0..self.flat.len() {
            let n = self.count(d);
            if d == 0 {
                let cols = (0..n).map(|_| if reduced { vec![(0u32, 1i32)] } else { vec![] }).collect();
                bds.push(Csc::from_columns(usize::from(reduced), cols));
            } else {
                let cols: Vec<_> = (0..n).into_par_iter().map(|i| self.boundary(d, i)).collect();
                bds.push(Csc::from_columns(self.count(d - 1), cols));
            }
        }
        if bds.is_empty() {
            return ChainComplex::empty_at(0);
        }
        ChainComplex { lo: if reduced { -1 } else { 0 }, boundaries: bds, truncated: false }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().iter().enumerate().map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    /// Join with another complex; vertices of `other` are shifted by `self.nverts`.
    pub fn join(&self, other: &SimplicialComplex) -> Result<SimplicialComplex> {
        let shift = self.nverts as u32;
        let mut out = Vec::new();
        let a: Vec<Vec<u32>> = std::iter::once(Vec::new())
            .chain((0..self.flat.len()).flat_map(|d| (0..self.count(d)).map(move |i| (d, i))).map(|(d, i)| self.simplex(d, i).to_vec()))
            .collect();
        let b: Vec<Vec<u32>> = std::iter::once(Vec::new())
            .chain((0..other.flat.len()).flat_map(|d| (0..other.count(d)).map(move |i| (d, i))).map(|(d, i)| other.simplex(d, i).iter().map(|v| v + shift).collect()))
            .collect();
        for x in &a {
            for y in &b {
                let mut s = x.clone();
                s.extend_from_slice(y);
                if !s.is_empty() {
                    out.push(s);
                }
            }
        }
        SimplicialComplex::from_simplices(self.nverts + other.nverts, out)
    }

    /// Boundary of the cross-polytope: the join of d+1 copies of S⁰, a
    /// d-sphere on vertices 2i, 2i+1 (i = 0..=d) with antipode v ↦ v ^ 1.
    pub fn octahedral_sphere(d: usize) -> SimplicialComplex {
        let mut s = SimplicialComplex::from_simplices(2, vec![vec![0], vec![1]]).unwrap();
        for _ in 0..d {
            let s0 = SimplicialComplex::from_simplices(2, vec![vec![0], vec![1]]).unwrap();
            s = s.join(&s0).unwrap();
        }
        s
    }
}
