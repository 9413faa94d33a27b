use crate::{Error, Result};

/// Compressed sparse columns with small integer entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Csc {
    pub nrows: usize,
    pub ncols: usize,
    pub colptr: Vec<usize>,
    pub rowidx: Vec<u32>,
    pub vals: Vec<i32>,
}

impl Csc {
    pub fn zero(nrows: usize, ncols: usize) -> Csc {
        Csc { nrows, ncols, colptr: vec![0; ncols + 1], rowidx: Vec::new(), vals: Vec::new() }
    }

    /// Builds from per-column entry lists; entries within a column are
    /// sorted and merged, zeros dropped.
    pub fn from_columns(nrows: usize, cols: Vec<Vec<(u32, i32)>>) -> Csc {
        let ncols = cols.len();
        let mut colptr = Vec::with_capacity(ncols + 1);
        let nnz: usize = cols.iter().map(|c| c.len()).sum();
        let mut rowidx = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        colptr.push(0);
        for mut c in cols {
            c.sort_unstable_by_key(|e| e.0);
            let mut i = 0;
            while i < c.len() {
                let r = c[i].0;
                let mut v = 0i32;
                while i < c.len() && c[i].0 == r {
                    v += c[i].1;
                    i += 1;
                }
                if v != 0 {
                    debug_assert!((r as usize) < nrows);
                    rowidx.push(r);
                    vals.push(v);
                }
            }
            colptr.push(rowidx.len());
        }
        Csc { nrows, ncols, colptr, rowidx, vals }
    }

    pub fn nnz(&self) -> usize {
        self.rowidx.len()
    }

    pub fn col(&self, j: usize) -> impl Iterator<Item = (u32, i32)> + '_ {
        let (a, b) = (self.colptr[j], self.colptr[j + 1]);
        self.rowidx[a..b].iter().copied().zip(self.vals[a..b].iter().copied())
    }

    pub fn col_len(&self, j: usize) -> usize {
        self.colptr[j + 1] - self.colptr[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.col(j).find(|e| e.0 as usize == i).map_or(0, |e| e.1)
    }

    pub fn transpose(&self) -> Csc {
        let mut cols: Vec<Vec<(u32, i32)>> = vec![Vec::new(); self.nrows];
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                cols[i as usize].push((j as u32, v));
            }
        }
        Csc::from_columns(self.ncols, cols)
    }

    /// `self * other` with i64 accumulation; fails on i32 overflow.
    pub fn matmul(&self, other: &Csc) -> Result<Csc> {
        if self.ncols != other.nrows {
            return Err(Error::arg("matrix shapes do not compose"));
        }
        let mut cols = Vec::with_capacity(other.ncols);
        let mut acc = vec![0i64; self.nrows];
        let mut touched = Vec::new();
        for j in 0..other.ncols {
            for (k, v) in other.col(j) {
                for (i, w) in self.col(k as usize) {
                    if acc[i as usize] == 0 {
                        touched.push(i);
                    }
                    acc[i as usize] += v as i64 * w as i64;
                }
            }
            let mut c = Vec::new();
            for &i in &touched {
                let v = acc[i as usize];
                if v != 0 {
                    c.push((i, i32::try_from(v).map_err(|_| Error::resource("entry overflow"))?));
                }
                acc[i as usize] = 0;
            }
            touched.clear();
            cols.push(c);
        }
        Ok(Csc::from_columns(self.nrows, cols))
    }

    pub fn is_zero(&self) -> bool {
        self.vals.iter().all(|&v| v == 0)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.ncols]; self.nrows];
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                d[i as usize][j] = v as i64;
            }
        }
        d
    }

    pub fn from_dense(d: &[Vec<i64>], ncols: usize) -> Result<Csc> {
        let mut cols = vec![Vec::new(); ncols];
        for (i, row) in d.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    cols[j].push((i as u32, i32::try_from(v).map_err(|_| Error::resource("entry overflow"))?));
                }
            }
        }
        Ok(Csc::from_columns(d.len(), cols))
    }

    /// Matrix-vector product over ℤ₂ for a 0/1 vector.
    pub fn mul_vec_z2(&self, x: &[bool]) -> Vec<bool> {
        let mut y = vec![false; self.nrows];
        for j in 0..self.ncols {
            if x[j] {
                for (i, v) in self.col(j) {
                    if v & 1 == 1 {
                        y[i as usize] ^= true;
                    }
                }
            }
        }
        y
    }

    pub fn mul_vec(&self, x: &[i64]) -> Vec<i64> {
        let mut y = vec![0i64; self.nrows];
        for j in 0..self.ncols {
            if x[j] != 0 {
                for (i, v) in self.col(j) {
                    y[i as usize] += v as i64 * x[j];
                }
            }
        }
        y
    }

    pub fn mul_vec_t(&self, x: &[i64]) -> Vec<i64> {
        (0..self.ncols).map(|j| self.col(j).map(|(i, v)| v as i64 * x[i as usize]).sum()).collect()
    }
}

/// A finite free chain complex C_lo ← ... ← C_hi. `boundaries[k]` is
/// ∂: C_{lo+k} → C_{lo+k-1} (with zero rows for k = 0).
///
/// A complex built only up to some dimension is marked `truncated`; its top
/// group then carries cycles but no boundaries from above, so homology is
/// only trusted strictly below the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub lo: i32,
    pub boundaries: Vec<Csc>,
    pub truncated: bool,
}

impl ChainComplex {
    pub fn new(lo: i32, ranks: &[usize], mut bds: Vec<Csc>) -> Result<ChainComplex> {
        if bds.len() + 1 == ranks.len() {
            bds.insert(0, Csc::zero(0, ranks.first().copied().unwrap_or(0)));
        }
        if bds.len() != ranks.len() {
            return Err(Error::arg("boundary count does not match ranks"));
        }
        for (k, b) in bds.iter().enumerate() {
            let rows = if k == 0 { 0 } else { ranks[k - 1] };
            if b.ncols != ranks[k] || b.nrows != rows {
                return Err(Error::arg(format!("boundary {k} has shape {}x{}", b.nrows, b.ncols)));
            }
        }
        Ok(ChainComplex { lo, boundaries: bds, truncated: false })
    }

    pub fn empty() -> ChainComplex {
        ChainComplex { lo: 0, boundaries: Vec::new(), truncated: false }
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.boundaries.len() as i32 - 1
    }

    pub fn rank(&self, deg: i32) -> usize {
        if deg < self.lo || deg > self.hi() {
            0
        } else {
            self.boundaries[(deg - self.lo) as usize].ncols
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.boundaries.iter().map(|b| b.ncols).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.ranks().iter().sum()
    }

    /// ∂: C_deg → C_{deg-1}; zero matrix outside the stored range.
    pub fn boundary(&self, deg: i32) -> Csc {
        if deg < self.lo || deg > self.hi() {
            Csc::zero(self.rank(deg - 1), self.rank(deg))
        } else {
            self.boundaries[(deg - self.lo) as usize].clone()
        }
    }

    pub fn boundary_ref(&self, deg: i32) -> Option<&Csc> {
        if deg < self.lo || deg > self.hi() {
            None
        } else {
            Some(&self.boundaries[(deg - self.lo) as usize])
        }
    }

    pub fn nnz(&self) -> usize {
        self.boundaries.iter().map(|b| b.nnz()).sum()
    }

    /// Checks ∂∘∂ = 0 exactly.
    pub fn check_d_squared_mod2(&self) -> Result<()> {
        for d in self.lo + 2..=self.hi() {
            let p = self.boundary(d - 1).matmul(&self.boundary(d))?;
            if (0..p.ncols).any(|j| p.col(j).any(|(_, v)| v % 2 != 0)) {
                return Err(Error::contract(format!("∂∂ ≠ 0 mod 2 in degree {d}")));
            }
        }
        Ok(())
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for k in 2..self.boundaries.len() {
            let p = self.boundaries[k - 1].matmul(&self.boundaries[k])?;
            if !p.is_zero() {
                return Err(Error::contract(format!("∂∂ ≠ 0 in degree {}", self.lo + k as i32)));
            }
        }
        Ok(())
    }

    /// The dual cochain complex, returned as a chain complex in negated
    /// degrees: degree -k holds C^k and the differential is δ = ∂ᵀ.
    pub fn dual(&self) -> ChainComplex {
        let n = self.boundaries.len();
        let mut out = Vec::with_capacity(n);
        for k in (0..n).rev() {
            if k + 1 < n {
                out.push(self.boundaries[k + 1].transpose());
            } else {
                out.push(Csc::zero(0, self.boundaries[k].ncols));
            }
        }
        ChainComplex { lo: -self.hi(), boundaries: out, truncated: false }
    }

    /// Keeps degrees ≤ top.
    pub fn truncate(&self, top: i32) -> ChainComplex {
        if top >= self.hi() {
            return self.clone();
        }
        let keep = (top - self.lo + 1).max(0) as usize;
        ChainComplex { lo: self.lo, boundaries: self.boundaries[..keep].to_vec(), truncated: true }
    }

    pub fn euler_characteristic(&self) -> i64 {
        (self.lo..=self.hi()).map(|d| if d.rem_euclid(2) == 0 { 1 } else { -1 } * self.rank(d) as i64).sum()
    }
}
