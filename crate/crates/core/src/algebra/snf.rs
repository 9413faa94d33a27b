//! Smith normal form over ℤ with arbitrary-precision entries.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::chain::Csc;
use crate::{Error, Result};

pub type Dense = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn zeros(m: usize, n: usize) -> Dense {
    vec![vec![BigInt::zero(); n]; m]
}

pub fn matmul(a: &Dense, b: &Dense, inner: usize, ncols: usize) -> Dense {
    let m = a.len();
    let mut out = zeros(m, ncols);
    for i in 0..m {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..ncols {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &Dense, x: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(x).filter(|(r, _)| !r.is_zero()).map(|(r, v)| r * v).sum())
        .collect()
}

pub fn from_csc(c: &Csc) -> Dense {
    let mut d = zeros(c.nrows, c.ncols);
    for j in 0..c.ncols {
        for (i, v) in c.col(j) {
            d[i as usize][j] = BigInt::from(v);
        }
    }
    d
}

pub fn transpose(a: &Dense, ncols: usize) -> Dense {
    (0..ncols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Sparse integer matrix in CSC form with arbitrary-precision values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub colptr: Vec<usize>,
    pub rowidx: Vec<usize>,
    pub vals: Vec<BigInt>,
}

impl SparseIntMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, t: &[(usize, usize, BigInt)]) -> Result<SparseIntMatrix> {
        let mut cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); ncols];
        for (i, j, v) in t {
            if *i >= nrows || *j >= ncols {
                return Err(Error::arg("triplet out of range"));
            }
            cols[*j].push((*i, v.clone()));
        }
        let mut colptr = vec![0];
        let mut rowidx = Vec::new();
        let mut vals = Vec::new();
        for mut c in cols {
            c.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < c.len() {
                let r = c[k].0;
                let mut v = BigInt::zero();
                while k < c.len() && c[k].0 == r {
                    v += &c[k].1;
                    k += 1;
                }
                if !v.is_zero() {
                    rowidx.push(r);
                    vals.push(v);
                }
            }
            colptr.push(rowidx.len());
        }
        Ok(SparseIntMatrix { nrows, ncols, colptr, rowidx, vals })
    }

    pub fn from_dense(d: &Dense, ncols: usize) -> SparseIntMatrix {
        let mut t = Vec::new();
        for (i, r) in d.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                if !v.is_zero() {
                    t.push((i, j, v.clone()));
                }
            }
        }
        SparseIntMatrix::from_triplets(d.len(), ncols, &t).unwrap()
    }

    pub fn from_csc(c: &Csc) -> SparseIntMatrix {
        let mut t = Vec::new();
        for j in 0..c.ncols {
            for (i, v) in c.col(j) {
                t.push((i as usize, j, BigInt::from(v)));
            }
        }
        SparseIntMatrix::from_triplets(c.nrows, c.ncols, &t).unwrap()
    }

    pub fn to_dense(&self) -> Dense {
        let mut d = zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            for k in self.colptr[j]..self.colptr[j + 1] {
                d[self.rowidx[k]][j] = self.vals[k].clone();
            }
        }
        d
    }

    /// The same matrix with i32 entries, if they all fit.
    pub fn to_csc(&self) -> Option<Csc> {
        let mut cols = Vec::with_capacity(self.ncols);
        for j in 0..self.ncols {
            let mut c = Vec::new();
            for k in self.colptr[j]..self.colptr[j + 1] {
                let v: i32 = (&self.vals[k]).try_into().ok()?;
                c.push((self.rowidx[k] as u32, v));
            }
            cols.push(c);
        }
        Some(Csc::from_columns(self.nrows, cols))
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

/// U·A·V = diag(d₁,…,d_r,0,…) with d₁ | d₂ | … | d_r, all positive.
#[derive(Clone, Debug)]
pub struct Snf {
    pub nrows: usize,
    pub ncols: usize,
    pub diag: Vec<BigInt>,
    pub u: Dense,
    pub u_inv: Dense,
    pub v: Dense,
    pub v_inv: Dense,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

struct Work {
    a: Dense,
    m: usize,
    n: usize,
    tu: bool,
    tv: bool,
    u: Dense,
    ui: Dense,
    v: Dense,
    vi: Dense,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if self.tu {
            self.u.swap(i, j);
            for r in self.ui.iter_mut() {
                r.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        if self.tv {
            for r in self.v.iter_mut() {
                r.swap(i, j);
            }
            self.vi.swap(i, j);
        }
    }

    /// row_i ← row_i − q·row_t
    fn row_axpy(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let (ri, rt) = two_rows(&mut self.a, i, t);
        for (x, y) in ri.iter_mut().zip(rt.iter()) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
        if self.tu {
            let (ri, rt) = two_rows(&mut self.u, i, t);
            for (x, y) in ri.iter_mut().zip(rt.iter()) {
                if !y.is_zero() {
                    *x -= q * y;
                }
            }
            for r in self.ui.iter_mut() {
                if !r[i].is_zero() {
                    let add = q * &r[i];
                    r[t] += add;
                }
            }
        }
    }

    /// col_j ← col_j − q·col_t
    fn col_axpy(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in self.a.iter_mut() {
            if !r[t].is_zero() {
                let s = q * &r[t];
                r[j] -= s;
            }
        }
        if self.tv {
            for r in self.v.iter_mut() {
                if !r[t].is_zero() {
                    let s = q * &r[t];
                    r[j] -= s;
                }
            }
            let (rt, rj) = two_rows(&mut self.vi, t, j);
            for (x, y) in rt.iter_mut().zip(rj.iter()) {
                if !y.is_zero() {
                    *x += q * y;
                }
            }
        }
    }

    fn negate_row(&mut self, t: usize) {
        for x in self.a[t].iter_mut() {
            *x = -std::mem::take(x);
        }
        if self.tu {
            for x in self.u[t].iter_mut() {
                *x = -std::mem::take(x);
            }
            for r in self.ui.iter_mut() {
                r[t] = -std::mem::take(&mut r[t]);
            }
        }
    }
}

fn two_rows(a: &mut Dense, i: usize, j: usize) -> (&mut Vec<BigInt>, &mut Vec<BigInt>) {
    assert_ne!(i, j);
    if i < j {
        let (x, y) = a.split_at_mut(j);
        (&mut x[i], &mut y[0])
    } else {
        let (x, y) = a.split_at_mut(i);
        (&mut y[0], &mut x[j])
    }
}

/// Dense Smith normal form. With `track`, the unimodular transforms and
/// their inverses are returned too (otherwise those fields are empty).
pub fn smith_dense(a: &Dense, ncols: usize, track: bool) -> Snf {
    smith_dense_tracking(a, ncols, track, track)
}

/// As `smith_dense`, tracking the row transforms U and the column
/// transforms V separately.
pub fn smith_dense_tracking(a: &Dense, ncols: usize, rows: bool, cols: bool) -> Snf {
    let m = a.len();
    let n = ncols;
    let mut w = Work {
        a: a.clone(),
        m,
        n,
        tu: rows,
        tv: cols,
        u: if rows { identity(m) } else { Vec::new() },
        ui: if rows { identity(m) } else { Vec::new() },
        v: if cols { identity(n) } else { Vec::new() },
        vi: if cols { identity(n) } else { Vec::new() },
    };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !w.a[i][j].is_zero() && best.is_none_or(|(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((p, q)) = best else { break };
        w.swap_rows(t, p);
        w.swap_cols(t, q);
        loop {
            let mut changed = false;
            for i in t + 1..w.m {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                w.row_axpy(i, t, &q);
                if !w.a[i][t].is_zero() {
                    w.swap_rows(t, i);
                    changed = true;
                }
            }
            for j in t + 1..w.n {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                w.col_axpy(j, t, &q);
                if !w.a[t][j].is_zero() {
                    w.swap_cols(t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            let piv = w.a[t][t].clone();
            let mut bad = None;
            'outer: for i in t + 1..w.m {
                for j in t + 1..w.n {
                    if !w.a[i][j].is_multiple_of(&piv) {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    // row_t += row_i
                    w.row_axpy(t, i, &BigInt::from(-1));
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        diag.push(w.a[t][t].clone());
        t += 1;
    }
    Snf { nrows: m, ncols: n, diag, u: w.u, u_inv: w.ui, v: w.v, v_inv: w.vi }
}

/// Invariant factors of a sparse matrix. Entries that fit in i32 go through
/// sparse unit-pivot elimination first; the remainder is solved densely.
pub fn smith_invariants(a: &SparseIntMatrix) -> Result<Vec<BigInt>> {
    match a.to_csc() {
        Some(c) => {
            let (units, rest) = crate::algebra::reduce::eliminate_matrix(&c)?;
            let mut d: Vec<BigInt> = vec![BigInt::one(); units];
            let s = smith_dense(&rest, rest.first().map_or(0, |r| r.len()), false);
            d.extend(s.diag);
            Ok(d)
        }
        None => Ok(smith_dense(&a.to_dense(), a.ncols, false).diag),
    }
}

/// Smith normal form with transforms of a sparse matrix (dense internally).
pub fn smith_normal_form(a: &SparseIntMatrix) -> Snf {
    smith_dense(&a.to_dense(), a.ncols, true)
}

/// Integer kernel basis of `a` (columns), saturated, and the map sending a
/// kernel vector to its coordinates.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub basis: Vec<Vec<BigInt>>,
    rank: usize,
    v_inv: Dense,
}

impl Kernel {
    pub fn new(a: &Dense, ncols: usize) -> Kernel {
        let s = smith_dense_tracking(a, ncols, false, true);
        let r = s.rank();
        let basis = (r..ncols).map(|j| s.v.iter().map(|row| row[j].clone()).collect()).collect();
        Kernel { basis, rank: r, v_inv: s.v_inv }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a kernel vector in `basis`.
    pub fn coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = mat_vec(&self.v_inv, x);
        y[self.rank..].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> Dense {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn small_snf() {
        let a = dense(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_dense(&a, 3, true);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let d = matmul(&matmul(&s.u, &a, 3, 3), &s.v, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], e);
            }
        }
        assert_eq!(matmul(&s.u, &s.u_inv, 3, 3), identity(3));
        assert_eq!(matmul(&s.v_inv, &s.v, 3, 3), identity(3));
    }

    #[test]
    fn kernel_basis() {
        let a = dense(&[&[1, 2, 3]]);
        let k = Kernel::new(&a, 3);
        assert_eq!(k.dim(), 2);
        for b in &k.basis {
            assert!(mat_vec(&a, b)[0].is_zero());
        }
        let x = vec![BigInt::from(1), BigInt::from(1), BigInt::from(-1)];
        let c = k.coords(&x);
        let back: Vec<BigInt> = (0..3).map(|i| k.basis.iter().zip(&c).map(|(b, ci)| &b[i] * ci).sum()).collect();
        assert_eq!(back, x);
    }
}
