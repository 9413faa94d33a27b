//! Algebraic reduction of free chain complexes.
//!
//! A pair (a, b) with ⟨∂b, a⟩ = e a unit is removed and every other coface
//! c of a is rewritten as ∂c − ⟨∂c,a⟩e⁻¹∂b. The result is chain homotopy
//! equivalent to the input. Pairs are taken cheapest-first, where the cost is
//! the fill bound (|∂b|−1)(|δa|−1); free faces and coreductions cost
//! nothing. What survives has no unit incidences left and is handled
//! densely.
//!
//! With recording switched on every elimination keeps ∂b and the cofaces of
//! a, which is enough to move chains and cochains between the complex and
//! the residual in both directions.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::algebra::chain::{ChainComplex, Csc};
use crate::algebra::snf::Dense;
use crate::algebra::Coeff;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Arith {
    coeff: Coeff,
}

impl Arith {
    pub(crate) fn new(coeff: Coeff) -> Arith {
        Arith { coeff }
    }

    #[inline]
    pub(crate) fn norm(&self, v: i64) -> i64 {
        match self.coeff {
            Coeff::Z => v,
            Coeff::Zp(p) => v.rem_euclid(p as i64),
        }
    }

    #[inline]
    pub(crate) fn is_unit(&self, v: i64) -> bool {
        match self.coeff {
            Coeff::Z => v == 1 || v == -1,
            Coeff::Zp(_) => v != 0,
        }
    }

    pub(crate) fn inv(&self, v: i64) -> i64 {
        match self.coeff {
            Coeff::Z => v,
            Coeff::Zp(p) => {
                let p = p as i64;
                let (mut base, mut e, mut acc) = (v.rem_euclid(p), p - 2, 1i64);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % p;
                    }
                    base = base * base % p;
                    e >>= 1;
                }
                acc
            }
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: i64, b: i64) -> Result<i64> {
        match self.coeff {
            Coeff::Z => a.checked_mul(b).ok_or_else(overflow),
            Coeff::Zp(p) => Ok((a as i128 * b as i128).rem_euclid(p as i128) as i64),
        }
    }

    #[inline]
    pub(crate) fn add(&self, a: i64, b: i64) -> Result<i64> {
        match self.coeff {
            Coeff::Z => a.checked_add(b).ok_or_else(overflow),
            Coeff::Zp(p) => Ok((a + b).rem_euclid(p as i64)),
        }
    }
}

fn overflow() -> Error {
    Error::resource("integer overflow during elimination")
}

#[derive(Clone, Debug)]
struct Record {
    a: u32,
    b: u32,
    einv: i64,
    /// ∂b without the a term, at elimination time.
    rest_b: Vec<(u32, i64)>,
    /// (c, ⟨∂c,a⟩) for the other cofaces of a.
    cof_a: Vec<(u32, i64)>,
}

/// Chain complex under reduction. Cells are numbered globally, degree by
/// degree starting at `lo`.
pub struct Reduction {
    ar: Arith,
    pub lo: i32,
    offsets: Vec<usize>,
    deg: Vec<u16>,
    bd: Vec<Vec<(u32, i64)>>,
    cbd: Vec<Vec<u32>>,
    ncbd: Vec<u32>,
    alive: Vec<bool>,
    records: Option<Vec<Record>>,
    budget: usize,
    nnz: usize,
}

/// What is left after reduction: critical cells per degree and their
/// boundary matrices (rows: critical cells one degree down).
#[derive(Clone, Debug)]
pub struct Residual {
    pub lo: i32,
    pub cells: Vec<Vec<u32>>,
    pub bd: Vec<Dense>,
}

impl Residual {
    pub fn count(&self, deg: i32) -> usize {
        if deg < self.lo || deg >= self.lo + self.cells.len() as i32 {
            0
        } else {
            self.cells[(deg - self.lo) as usize].len()
        }
    }

    /// ∂: residual C_deg → C_{deg−1} (dense, zero-size outside range).
    pub fn boundary(&self, deg: i32) -> Dense {
        if deg <= self.lo || deg >= self.lo + self.cells.len() as i32 {
            return crate::algebra::snf::zeros(self.count(deg - 1), self.count(deg));
        }
        self.bd[(deg - self.lo) as usize].clone()
    }
}

impl Reduction {
    pub fn new(c: &ChainComplex, coeff: Coeff, record: bool, budget: usize) -> Result<Reduction> {
        let ar = Arith::new(coeff);
        let ranks = c.ranks();
        let mut offsets = vec![0usize];
        for r in &ranks {
            offsets.push(offsets.last().unwrap() + r);
        }
        let total = *offsets.last().unwrap();
        if total > u32::MAX as usize {
            return Err(Error::resource("too many cells"));
        }
        let mut deg = Vec::with_capacity(total);
        let mut bd: Vec<Vec<(u32, i64)>> = Vec::with_capacity(total);
        let mut ncbd = vec![0u32; total];
        let mut nnz = 0usize;
        for (k, m) in c.boundaries.iter().enumerate() {
            for j in 0..m.ncols {
                deg.push(k as u16);
                let mut col = Vec::with_capacity(m.col_len(j));
                if k > 0 {
                    for (i, v) in m.col(j) {
                        let v = ar.norm(v as i64);
                        if v != 0 {
                            let g = (offsets[k - 1] + i as usize) as u32;
                            col.push((g, v));
                            ncbd[g as usize] += 1;
                        }
                    }
                }
                nnz += col.len();
                bd.push(col);
            }
        }
        let mut cbd: Vec<Vec<u32>> = ncbd.iter().map(|&n| Vec::with_capacity(n as usize)).collect();
        for (cell, col) in bd.iter().enumerate() {
            for &(f, _) in col {
                cbd[f as usize].push(cell as u32);
            }
        }
        Ok(Reduction {
            ar,
            lo: c.lo,
            offsets,
            deg,
            bd,
            cbd,
            ncbd,
            alive: vec![true; total],
            records: if record { Some(Vec::new()) } else { None },
            budget,
            nnz,
        })
    }

    fn cost(&self, b: u32) -> Option<(u64, u32, i64)> {
        let col = &self.bd[b as usize];
        if col.is_empty() {
            return None;
        }
        let lb = col.len() as u64 - 1;
        let mut best: Option<(u64, u32, i64)> = None;
        for &(a, v) in col {
            if self.ar.is_unit(v) {
                let c = lb * (self.ncbd[a as usize] as u64 - 1);
                if best.is_none_or(|x| c < x.0) {
                    best = Some((c, a, v));
                    if c == 0 {
                        break;
                    }
                }
            }
        }
        best
    }

    fn coef(col: &[(u32, i64)], a: u32) -> Option<i64> {
        col.binary_search_by_key(&a, |e| e.0).ok().map(|i| col[i].1)
    }

    /// Runs elimination until no unit incidence remains.
    pub fn run(&mut self) -> Result<()> {
        let mut heap: BinaryHeap<Reverse<(u64, u32)>> = BinaryHeap::new();
        for b in 0..self.bd.len() as u32 {
            if let Some((c, _, _)) = self.cost(b) {
                heap.push(Reverse((c, b)));
            }
        }
        let mut touched: Vec<u32> = Vec::new();
        while let Some(Reverse((c_old, b))) = heap.pop() {
            if !self.alive[b as usize] {
                continue;
            }
            let Some((c, a, e)) = self.cost(b) else { continue };
            if c > c_old {
                heap.push(Reverse((c, b)));
                continue;
            }
            touched.clear();
            self.eliminate(a, b, e, &mut touched)?;
            for &t in &touched {
                if self.alive[t as usize] {
                    if let Some((c, _, _)) = self.cost(t) {
                        heap.push(Reverse((c, t)));
                    }
                }
            }
        }
        Ok(())
    }

    fn eliminate(&mut self, a: u32, b: u32, e: i64, touched: &mut Vec<u32>) -> Result<()> {
        let einv = self.ar.inv(e);
        let bdb = std::mem::take(&mut self.bd[b as usize]);
        self.nnz -= bdb.len();
        // cofaces of a other than b
        let mut cl = std::mem::take(&mut self.cbd[a as usize]);
        cl.sort_unstable();
        cl.dedup();
        let mut cof = Vec::new();
        for &c in &cl {
            if c != b && self.alive[c as usize] {
                if let Some(l) = Self::coef(&self.bd[c as usize], a) {
                    cof.push((c, l));
                }
            }
        }
        // b's cofaces lose b
        let mut bl = std::mem::take(&mut self.cbd[b as usize]);
        bl.sort_unstable();
        bl.dedup();
        for &d in &bl {
            if self.alive[d as usize] {
                let col = &mut self.bd[d as usize];
                if let Ok(i) = col.binary_search_by_key(&b, |x| x.0) {
                    col.remove(i);
                    self.nnz -= 1;
                    touched.push(d);
                }
            }
        }
        self.alive[a as usize] = false;
        self.alive[b as usize] = false;
        for &(x, _) in &bdb {
            if x != a {
                self.ncbd[x as usize] -= 1;
            }
        }
        let mut merged = Vec::new();
        for &(c, l) in &cof {
            let factor = self.ar.norm(-self.ar.mul(l, einv)?);
            let old = std::mem::take(&mut self.bd[c as usize]);
            merged.clear();
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < bdb.len() {
                let take_old = j == bdb.len() || (i < old.len() && old[i].0 < bdb[j].0);
                let take_new = i == old.len() || (j < bdb.len() && bdb[j].0 < old[i].0);
                if take_old {
                    merged.push(old[i]);
                    i += 1;
                } else if take_new {
                    let (x, v) = bdb[j];
                    let w = self.ar.mul(factor, v)?;
                    if w != 0 {
                        merged.push((x, w));
                        self.ncbd[x as usize] += 1;
                        self.cbd[x as usize].push(c);
                    }
                    j += 1;
                } else {
                    let (x, v) = old[i];
                    let w = self.ar.add(v, self.ar.mul(factor, bdb[j].1)?)?;
                    if w != 0 {
                        merged.push((x, w));
                    } else if x != a {
                        self.ncbd[x as usize] -= 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
            self.nnz = self.nnz + merged.len() - old.len();
            self.bd[c as usize] = std::mem::take(&mut merged);
            touched.push(c);
        }
        if self.nnz > self.budget {
            return Err(Error::resource(format!(
                "reduction fill exceeded budget of {} incidence entries",
                self.budget
            )));
        }
        for &(x, _) in &bdb {
            if x != a && self.ncbd[x as usize] == 1 {
                if let Some(&c) = self.cbd[x as usize].iter().find(|&&c| {
                    self.alive[c as usize] && Self::coef(&self.bd[c as usize], x).is_some()
                }) {
                    touched.push(c);
                }
            }
        }
        if let Some(r) = self.records.as_mut() {
            r.push(Record {
                a,
                b,
                einv,
                rest_b: bdb.into_iter().filter(|e| e.0 != a).collect(),
                cof_a: cof,
            });
        }
        Ok(())
    }

    pub fn eliminated_pairs(&self) -> usize {
        (self.alive.len() - self.alive.iter().filter(|&&x| x).count()) / 2
    }

    pub fn residual(&self) -> Residual {
        let ndeg = self.offsets.len() - 1;
        let mut cells = vec![Vec::new(); ndeg];
        let mut local = vec![u32::MAX; self.alive.len()];
        for g in 0..self.alive.len() {
            if self.alive[g] {
                let k = self.deg[g] as usize;
                local[g] = cells[k].len() as u32;
                cells[k].push(g as u32);
            }
        }
        let mut bd = Vec::with_capacity(ndeg);
        for k in 0..ndeg {
            let rows = if k == 0 { 0 } else { cells[k - 1].len() };
            let mut m = vec![vec![BigInt::zero(); cells[k].len()]; rows];
            for (j, &g) in cells[k].iter().enumerate() {
                for &(f, v) in &self.bd[g as usize] {
                    m[local[f as usize] as usize][j] = BigInt::from(v);
                }
            }
            bd.push(m);
        }
        Residual { lo: self.lo, cells, bd }
    }

    fn records(&self) -> Result<&[Record]> {
        self.records.as_deref().ok_or_else(|| Error::contract("reduction was run without recording"))
    }

    pub fn global(&self, deg: i32, i: usize) -> u32 {
        (self.offsets[(deg - self.lo) as usize] + i) as u32
    }

    fn span(&self, deg: i32) -> std::ops::Range<usize> {
        let k = (deg - self.lo) as usize;
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn rank(&self, deg: i32) -> usize {
        if deg < self.lo || deg >= self.lo + self.offsets.len() as i32 - 1 {
            0
        } else {
            self.span(deg).len()
        }
    }

    /// Extends a residual cochain (values on critical cells of `deg`) to a
    /// cocycle-compatible cochain on the whole complex: z ∘ f.
    pub fn pull_cochain(&self, res: &Residual, deg: i32, z: &[i64]) -> Result<Vec<i64>> {
        let span = self.span(deg);
        let mut full = vec![0i64; self.bd.len()];
        for (j, &g) in res.cells[(deg - self.lo) as usize].iter().enumerate() {
            full[g as usize] = z[j];
        }
        for r in self.records()?.iter().rev() {
            if span.contains(&(r.a as usize)) {
                let mut s = 0i64;
                for &(y, k) in &r.rest_b {
                    s = self.ar.add(s, self.ar.mul(k, full[y as usize])?)?;
                }
                full[r.a as usize] = self.ar.norm(-self.ar.mul(r.einv, s)?);
            }
        }
        Ok(full[span].to_vec())
    }

    /// Restricts a cochain on the whole complex to the residual: z ∘ g.
    pub fn push_cochain(&self, res: &Residual, deg: i32, z: &[i64]) -> Result<Vec<i64>> {
        let span = self.span(deg);
        let mut full = vec![0i64; self.bd.len()];
        for (i, &v) in z.iter().enumerate() {
            full[span.start + i] = self.ar.norm(v);
        }
        for r in self.records()? {
            if span.contains(&(r.b as usize)) {
                let zb = full[r.b as usize];
                if zb != 0 {
                    for &(c, l) in &r.cof_a {
                        let t = self.ar.mul(self.ar.mul(l, r.einv)?, zb)?;
                        full[c as usize] = self.ar.add(full[c as usize], -t)?;
                    }
                }
            }
        }
        Ok(res.cells[(deg - self.lo) as usize].iter().map(|&g| full[g as usize]).collect())
    }

    /// Projects a chain on the whole complex to the residual: f(x).
    pub fn push_chain(&self, res: &Residual, deg: i32, x: &[i64]) -> Result<Vec<i64>> {
        let span = self.span(deg);
        let mut full = vec![0i64; self.bd.len()];
        for (i, &v) in x.iter().enumerate() {
            full[span.start + i] = self.ar.norm(v);
        }
        for r in self.records()? {
            if span.contains(&(r.a as usize)) {
                let xa = full[r.a as usize];
                if xa != 0 {
                    full[r.a as usize] = 0;
                    let f = self.ar.mul(xa, r.einv)?;
                    for &(y, k) in &r.rest_b {
                        full[y as usize] = self.ar.add(full[y as usize], -self.ar.mul(f, k)?)?;
                    }
                }
            }
        }
        Ok(res.cells[(deg - self.lo) as usize].iter().map(|&g| full[g as usize]).collect())
    }

    /// Lifts a residual chain to the whole complex: g(x).
    pub fn pull_chain(&self, res: &Residual, deg: i32, x: &[i64]) -> Result<Vec<i64>> {
        let span = self.span(deg);
        let mut full = vec![0i64; self.bd.len()];
        for (j, &g) in res.cells[(deg - self.lo) as usize].iter().enumerate() {
            full[g as usize] = x[j];
        }
        for r in self.records()?.iter().rev() {
            if span.contains(&(r.b as usize)) {
                let mut s = 0i64;
                for &(c, l) in &r.cof_a {
                    s = self.ar.add(s, self.ar.mul(l, full[c as usize])?)?;
                }
                full[r.b as usize] = self.ar.norm(-self.ar.mul(r.einv, s)?);
            }
        }
        Ok(full[span].to_vec())
    }
}

impl Reduction {
    /// Splits a cocycle as z = δx + z∘f∘…, returning x and the residual
    /// restriction of z. Uses the elementary homotopies h(a) = e⁻¹b.
    pub fn split_cocycle(&self, res: &Residual, deg: i32, z: &[i64]) -> Result<(Vec<i64>, Vec<i64>)> {
        let recs = self.records()?;
        let span = self.span(deg);
        let mut full = vec![0i64; self.bd.len()];
        for (i, &v) in z.iter().enumerate() {
            full[span.start + i] = self.ar.norm(v);
        }
        let mut zb = vec![0i64; recs.len()];
        for (t, r) in recs.iter().enumerate() {
            if span.contains(&(r.b as usize)) {
                let v = full[r.b as usize];
                zb[t] = v;
                if v != 0 {
                    for &(c, l) in &r.cof_a {
                        let w = self.ar.mul(self.ar.mul(l, r.einv)?, v)?;
                        full[c as usize] = self.ar.add(full[c as usize], -w)?;
                    }
                }
            }
        }
        let zres = res.cells[(deg - self.lo) as usize].iter().map(|&g| full[g as usize]).collect();
        if deg <= self.lo {
            return Ok((Vec::new(), zres));
        }
        let lower = self.span(deg - 1);
        let mut acc = vec![0i64; self.bd.len()];
        for (t, r) in recs.iter().enumerate().rev() {
            if lower.contains(&(r.a as usize)) {
                let mut s = 0i64;
                for &(y, k) in &r.rest_b {
                    s = self.ar.add(s, self.ar.mul(k, acc[y as usize])?)?;
                }
                let w = self.ar.mul(r.einv, zb[t])?;
                acc[r.a as usize] = self.ar.add(self.ar.norm(-self.ar.mul(r.einv, s)?), w)?;
            }
        }
        Ok((acc[lower].to_vec(), zres))
    }
}

/// Unit-pivot elimination on a single matrix. Returns the number of pivots
/// taken and the remaining block (rows, then columns, of surviving indices).
pub fn eliminate_matrix(m: &Csc) -> Result<(usize, Dense)> {
    let c = ChainComplex {
        lo: 0,
        boundaries: vec![Csc::zero(0, m.nrows), m.clone()],
        truncated: false,
    };
    let mut r = Reduction::new(&c, Coeff::Z, false, usize::MAX)?;
    r.run()?;
    let p = r.eliminated_pairs();
    let res = r.residual();
    Ok((p, res.bd[1].clone()))
}
