//! Linear algebra over ℤ₂ on packed bit vectors.

use crate::algebra::chain::{ChainComplex, Csc};
use crate::algebra::homology::ReducedComplex;
use crate::algebra::Z2;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> BitVec {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bools(b: &[bool]) -> BitVec {
        let mut v = BitVec::zeros(b.len());
        for (i, &x) in b.iter().enumerate() {
            if x {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_i64(z: &[i64]) -> BitVec {
        let mut v = BitVec::zeros(z.len());
        for (i, &x) in z.iter().enumerate() {
            if x.rem_euclid(2) == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, o: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, o: &BitVec) -> bool {
        self.words.iter().zip(&o.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + t)
                }
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn to_i64(&self) -> Vec<i64> {
        (0..self.len).map(|i| self.get(i) as i64).collect()
    }
}

pub fn csc_col(m: &Csc, j: usize) -> BitVec {
    let mut v = BitVec::zeros(m.nrows);
    for (i, x) in m.col(j) {
        if x.rem_euclid(2) == 1 {
            v.flip(i as usize);
        }
    }
    v
}

pub fn mul_vec(m: &Csc, x: &BitVec) -> BitVec {
    let mut out = BitVec::zeros(m.nrows);
    for j in x.ones() {
        for (i, v) in m.col(j) {
            if v.rem_euclid(2) == 1 {
                out.flip(i as usize);
            }
        }
    }
    out
}

/// Echelon form of a growing set of vectors, each row remembering which
/// inserted vectors it is the sum of.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    combos: Vec<BitVec>,
    inserted: usize,
    capacity: usize,
}

impl Echelon {
    /// `capacity` bounds the number of vectors that will be inserted.
    pub fn new(width: usize, capacity: usize) -> Echelon {
        Echelon { width, rows: Vec::new(), pivots: Vec::new(), combos: Vec::new(), inserted: 0, capacity }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces v against the rows; returns the remainder and the set of
    /// inserted vectors subtracted.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut v = v.clone();
        let mut c = BitVec::zeros(self.capacity);
        for (k, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_assign(&self.rows[k]);
                c.xor_assign(&self.combos[k]);
            }
        }
        (v, c)
    }

    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert!(self.inserted < self.capacity && v.len() == self.width);
        let (r, mut c) = self.reduce(v);
        c.flip(self.inserted);
        self.inserted += 1;
        match r.first_one() {
            Some(p) => {
                self.rows.push(r);
                self.pivots.push(p);
                self.combos.push(c);
                true
            }
            None => false,
        }
    }

    /// A vector annihilating every row with ⟨y, v⟩ = 1, when v is outside
    /// the span.
    pub fn separating(&self, v: &BitVec) -> Option<BitVec> {
        let (r, _) = self.reduce(v);
        let f = r.first_one()?;
        let mut y = BitVec::zeros(self.width);
        y.set(f, true);
        // rows are reduced against earlier pivots only, so solve newest first
        for k in (0..self.rows.len()).rev() {
            let mut row = self.rows[k].clone();
            row.set(self.pivots[k], false);
            y.set(self.pivots[k], row.dot(&y));
        }
        Some(y)
    }
}

pub fn rank(cols: &[BitVec], width: usize) -> usize {
    let mut e = Echelon::new(width, cols.len());
    for c in cols {
        e.insert(c);
    }
    e.rank()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solve {
    /// δx = z.
    Coboundary(BitVec),
    /// A cycle y (∂y = 0) with ⟨z, y⟩ = 1.
    Obstruction(BitVec),
}

/// Decides whether z ∈ im δ where δ has the given matrix (rows: degree k,
/// columns: degree k−1). Dense; meant for moderate sizes.
pub fn coboundary_solve(delta: &Csc, z: &BitVec) -> Solve {
    let mut e = Echelon::new(delta.nrows, delta.ncols);
    for j in 0..delta.ncols {
        e.insert(&csc_col(delta, j));
    }
    let (r, c) = e.reduce(z);
    if r.is_zero() {
        let mut x = BitVec::zeros(delta.ncols);
        for ones in c.ones() {
            x.flip(ones);
        }
        Solve::Coboundary(x)
    } else {
        Solve::Obstruction(e.separating(z).unwrap())
    }
}

/// Coboundary problems δx = z over ℤ₂ on one chain complex, answered by a
/// recorded reduction so that both outcomes come with a certificate.
pub struct CoboundarySolver {
    pub chain: ChainComplex,
    red: ReducedComplex,
}

impl CoboundarySolver {
    pub fn new(chain: ChainComplex) -> Result<CoboundarySolver> {
        let red = ReducedComplex::new(&chain, Z2, true)?;
        Ok(CoboundarySolver { chain, red })
    }

    /// δ applied to a (k−1)-cochain.
    pub fn coboundary(&self, k: i32, x: &BitVec) -> BitVec {
        match self.chain.boundary_ref(k) {
            Some(b) if k > self.chain.lo => mul_vec(&b.transpose(), x),
            _ => BitVec::zeros(self.chain.rank(k)),
        }
    }

    pub fn boundary(&self, k: i32, y: &BitVec) -> BitVec {
        match self.chain.boundary_ref(k) {
            Some(b) if k > self.chain.lo => mul_vec(b, y),
            _ => BitVec::zeros(self.chain.rank(k - 1)),
        }
    }

    pub fn is_cocycle(&self, k: i32, z: &BitVec) -> bool {
        self.coboundary(k + 1, z).is_zero()
    }

    pub fn solve(&self, k: i32, z: &BitVec) -> Result<Solve> {
        if z.len() != self.chain.rank(k) {
            return Err(Error::arg("cochain has the wrong length"));
        }
        if k > self.red.valid_hi {
            return Err(Error::contract(format!("degree {k} is beyond the stored skeleton")));
        }
        if !self.is_cocycle(k, z) {
            return Err(Error::contract(format!("{k}-cochain is not a cocycle")));
        }
        let (x, zres) = self.red.red.split_cocycle(&self.red.res, k, &z.to_i64())?;
        match zres.iter().position(|&v| v != 0) {
            None => Ok(Solve::Coboundary(BitVec::from_i64(&x))),
            Some(j) => {
                let mut e = vec![0i64; zres.len()];
                e[j] = 1;
                let y = self.red.red.pull_chain(&self.red.res, k, &e)?;
                Ok(Solve::Obstruction(BitVec::from_i64(&y)))
            }
        }
    }

    /// Re-checks a certificate returned by [`CoboundarySolver::solve`].
    pub fn verify(&self, k: i32, z: &BitVec, s: &Solve) -> bool {
        match s {
            Solve::Coboundary(x) => x.len() == self.chain.rank(k - 1) && self.coboundary(k, x) == *z,
            Solve::Obstruction(y) => y.len() == z.len() && self.boundary(k, y).is_zero() && y.dot(z),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(b: &[u8]) -> BitVec {
        BitVec::from_bools(&b.iter().map(|&x| x == 1).collect::<Vec<_>>())
    }

    #[test]
    fn bit_ops() {
        let mut a = BitVec::zeros(130);
        a.set(0, true);
        a.set(129, true);
        assert_eq!(a.ones().collect::<Vec<_>>(), vec![0, 129]);
        assert_eq!(a.first_one(), Some(0));
        let b = BitVec::unit(130, 129);
        assert!(a.dot(&b));
        a.xor_assign(&b);
        assert_eq!(a.count_ones(), 1);
    }

    #[test]
    fn echelon_rank_and_separation() {
        let rows = [v(&[1, 1, 0, 0]), v(&[0, 1, 1, 0]), v(&[1, 0, 1, 0])];
        assert_eq!(rank(&rows, 4), 2);
        let mut e = Echelon::new(4, 3);
        for r in &rows {
            e.insert(r);
        }
        let t = v(&[1, 0, 0, 0]);
        let y = e.separating(&t).unwrap();
        assert!(t.dot(&y));
        assert!(rows.iter().all(|r| !r.dot(&y)));
        assert!(e.separating(&v(&[1, 0, 1, 0])).is_none());
    }

    #[test]
    fn solver_on_projective_plane() {
        let c = crate::algebra::homology::tests::rp2().chain_complex(false);
        let s = CoboundarySolver::new(c.clone()).unwrap();
        // the sum of all edges of a vertex star is δ of that vertex
        let mut x = BitVec::zeros(c.rank(0));
        x.set(2, true);
        let z = s.coboundary(1, &x);
        let r = s.solve(1, &z).unwrap();
        assert!(matches!(r, Solve::Coboundary(_)) && s.verify(1, &z, &r));
        // one triangle is the generator of H²
        let z = BitVec::unit(c.rank(2), 0);
        let r = s.solve(2, &z).unwrap();
        assert!(matches!(r, Solve::Obstruction(_)) && s.verify(2, &z, &r));
        let zero = BitVec::zeros(c.rank(1));
        assert_eq!(s.solve(1, &zero).unwrap(), Solve::Coboundary(BitVec::zeros(c.rank(0))));
        assert!(s.solve(1, &BitVec::unit(c.rank(1), 0)).is_err());
    }

    #[test]
    fn solve_on_circle() {
        // δ⁰ of a triangle boundary; columns are vertices, rows are edges
        let d = Csc::from_columns(3, vec![vec![(0, 1), (1, 1)], vec![(0, 1), (2, 1)], vec![(1, 1), (2, 1)]]);
        match coboundary_solve(&d, &v(&[1, 1, 0])) {
            Solve::Coboundary(x) => assert_eq!(mul_vec(&d, &x), v(&[1, 1, 0])),
            _ => panic!(),
        }
        match coboundary_solve(&d, &v(&[1, 0, 0])) {
            Solve::Obstruction(y) => {
                assert!(y.dot(&v(&[1, 0, 0])));
                assert!(mul_vec(&d.transpose(), &y).is_zero());
            }
            _ => panic!(),
        }
    }
}
