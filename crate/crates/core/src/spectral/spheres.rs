use serde::{Deserialize, Serialize};

use crate::algebra::chain::{ChainComplex, Csc};
use crate::algebra::homology::homology;
use crate::algebra::Z2;
use crate::equivariant::action::CellInvolution;
use crate::equivariant::quotient::{cellular_quotient, quotient, Cover};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// 2t+1 spheres, antipodal on the first, swapping the others in pairs.
    Odd,
    /// 2t spheres swapped in pairs.
    Even,
}

/// The product of d-spheres being quotiented: a t-tuple of d-symbols is
/// a bitmask with bit j set when entry j is * (dimension d) rather than ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SphereSymbolArray {
    pub t: usize,
    pub d: usize,
    pub parity: Parity,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    /// (i,x,y) of the odd case.
    Triple(usize, u32, u32),
    /// {x,y} with x < y.
    Pair(u32, u32),
    /// (x,x,k).
    Diagonal(u32, usize),
}

/// A ℤ₂-cochain complex on symbol cells; `chain` stores δ transposed so
/// that its ℤ₂-homology is the cohomology of the quotient.
#[derive(Clone, Debug)]
pub struct SymbolicComplex {
    pub spec: SphereSymbolArray,
    pub cells: Vec<Vec<Cell>>,
    pub chain: ChainComplex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereCensus {
    pub t: usize,
    pub d: usize,
    pub parity: Parity,
    pub cells: Vec<usize>,
    /// ℤ₂-Betti numbers computed from the coboundary.
    pub betti: Vec<usize>,
    /// Generators listed by the symbol description, per degree.
    pub census: Vec<usize>,
    pub euler: i64,
    pub euler_closed_form: i64,
}

impl SphereCensus {
    pub fn matches(&self) -> bool {
        self.betti == self.census && self.euler == self.euler_closed_form
    }
}

impl SphereSymbolArray {
    pub fn new(t: usize, d: usize, parity: Parity) -> Result<SphereSymbolArray> {
        if d < 2 {
            return Err(Error::arg("sphere dimension must be at least 2"));
        }
        if t > 8 {
            return Err(Error::resource("at most 8 sphere pairs"));
        }
        Ok(SphereSymbolArray { t, d, parity })
    }

    fn dim_of(&self, x: u32) -> usize {
        self.d * x.count_ones() as usize
    }

    pub fn top_dim(&self) -> usize {
        match self.parity {
            Parity::Odd => self.d * (2 * self.t + 1),
            Parity::Even => self.d * 2 * self.t,
        }
    }

    fn cell_dim(&self, c: &Cell) -> usize {
        match *c {
            Cell::Triple(i, x, y) => i + self.dim_of(x) + self.dim_of(y),
            Cell::Pair(x, y) => self.dim_of(x) + self.dim_of(y),
            Cell::Diagonal(x, k) => self.dim_of(x) + k,
        }
    }

    fn all_cells(&self) -> Vec<Cell> {
        let n = 1u32 << self.t;
        let mut out = Vec::new();
        match self.parity {
            Parity::Odd => {
                for i in 0..=self.d {
                    for x in 0..n {
                        for y in 0..n {
                            out.push(Cell::Triple(i, x, y));
                        }
                    }
                }
            }
            Parity::Even => {
                for x in 0..n {
                    for y in x + 1..n {
                        out.push(Cell::Pair(x, y));
                    }
                    for k in 0..=self.dim_of(x) {
                        out.push(Cell::Diagonal(x, k));
                    }
                }
            }
        }
        out
    }

    /// δ(c) over ℤ₂.
    fn coboundary(&self, c: &Cell) -> Vec<Cell> {
        match *c {
            Cell::Triple(i, x, y) if i < self.d => {
                if x == y {
                    Vec::new()
                } else {
                    vec![Cell::Triple(i + 1, x, y), Cell::Triple(i + 1, y, x)]
                }
            }
            Cell::Diagonal(x, 0) if self.dim_of(x) >= 1 => vec![Cell::Diagonal(x, 1)],
            _ => Vec::new(),
        }
    }

    pub fn build(&self) -> Result<SymbolicComplex> {
        let top = self.top_dim();
        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); top + 1];
        for c in self.all_cells() {
            cells[self.cell_dim(&c)].push(c);
        }
        for v in cells.iter_mut() {
            v.sort_by_key(cell_key);
        }
        let index = |d: usize, c: &Cell| cells[d].binary_search_by_key(&cell_key(c), cell_key).ok();
        let mut bds = vec![Csc::zero(0, cells[0].len())];
        for d in 1..=top {
            // column of a d-cell lists the (d−1)-cells whose coboundary hits it
            let mut cols: Vec<Vec<(u32, i32)>> = vec![Vec::new(); cells[d].len()];
            for (i, c) in cells[d - 1].iter().enumerate() {
                for e in self.coboundary(c) {
                    let j = index(d, &e).ok_or_else(|| Error::contract("coboundary leaves the cell set"))?;
                    cols[j].push((i as u32, 1));
                }
            }
            for col in cols.iter_mut() {
                col.sort_unstable();
            }
            bds.push(Csc::from_columns(cells[d - 1].len(), cols));
        }
        let chain = ChainComplex { lo: 0, boundaries: bds, truncated: false };
        chain.check_d_squared_mod2()?;
        Ok(SymbolicComplex { spec: *self, cells, chain })
    }

    /// Degrees of the cohomology generators named by the symbol grammar.
    pub fn census(&self) -> Vec<usize> {
        let top = self.top_dim();
        let mut out = vec![0usize; top + 1];
        let n = 1u32 << self.t;
        match self.parity {
            Parity::Odd => {
                for x in 0..n {
                    for i in 0..=self.d {
                        out[i + 2 * self.dim_of(x)] += 1;
                    }
                    for y in x + 1..n {
                        let b = self.dim_of(x) + self.dim_of(y);
                        out[b] += 1;
                        out[b + self.d] += 1;
                    }
                }
            }
            Parity::Even => {
                for c in self.all_cells() {
                    if let Cell::Diagonal(x, k) = c {
                        if self.dim_of(x) >= 1 && k <= 1 {
                            continue;
                        }
                    }
                    out[self.cell_dim(&c)] += 1;
                }
            }
        }
        out
    }

    /// χ(X/ℤ₂) = (χ(X) + χ(Fix))/2.
    pub fn euler_closed_form(&self) -> i64 {
        let chi_s: i64 = if self.d % 2 == 0 { 2 } else { 0 };
        match self.parity {
            Parity::Odd => chi_s.pow(2 * self.t as u32 + 1) / 2,
            Parity::Even => (chi_s.pow(2 * self.t as u32) + chi_s.pow(self.t as u32)) / 2,
        }
    }
}

fn cell_key(c: &Cell) -> (u8, u64, u64, u64) {
    match *c {
        Cell::Triple(i, x, y) => (0, i as u64, x as u64, y as u64),
        Cell::Pair(x, y) => (1, x as u64, y as u64, 0),
        Cell::Diagonal(x, k) => (2, x as u64, k as u64, 0),
    }
}

fn betti(c: &ChainComplex) -> Result<Vec<usize>> {
    Ok(homology(c, Z2, Some((0, c.hi())))?.iter().map(|g| g.free_rank + g.torsion.len()).collect())
}

/// Cohomology of the symbolic quotient with the generator census.
pub fn symbolic_sphere_quotient(spec: &SphereSymbolArray) -> Result<(SymbolicComplex, SphereCensus)> {
    let sc = spec.build()?;
    let b = betti(&sc.chain)?;
    let census = SphereCensus {
        t: spec.t,
        d: spec.d,
        parity: spec.parity,
        cells: sc.chain.ranks(),
        betti: b,
        census: spec.census(),
        euler: sc.chain.euler_characteristic(),
        euler_closed_form: spec.euler_closed_form(),
    };
    Ok((sc, census))
}

/// S^d as the join of d+1 copies of S⁰: cells e_i^± (ids 2i, 2i+1), with
/// ∂e_i^± = e_{i−1}^± + (−1)^i e_{i−1}^∓.
fn join_sphere(d: usize) -> Vec<Vec<(usize, i32)>> {
    (0..2 * (d + 1))
        .map(|c| {
            let (i, s) = (c / 2, c % 2);
            if i == 0 {
                Vec::new()
            } else {
                let sg = if i % 2 == 0 { 1 } else { -1 };
                vec![(2 * (i - 1) + s, 1), (2 * (i - 1) + 1 - s, sg)]
            }
        })
        .collect()
}

/// The product of spheres as a regular cell complex together with the
/// involution of the given parity.
pub fn sphere_product(spec: &SphereSymbolArray) -> Result<(ChainComplex, CellInvolution)> {
    let k = match spec.parity {
        Parity::Odd => 2 * spec.t + 1,
        Parity::Even => 2 * spec.t,
    };
    let base = 2 * (spec.d + 1);
    let total = base.checked_pow(k as u32).filter(|&n| n <= 2_000_000).ok_or_else(|| Error::resource("sphere product too large"))?;
    let sphere = join_sphere(spec.d);
    let cdim = |c: usize| c / 2;
    let digits = |mut n: usize| -> Vec<usize> {
        let mut v = vec![0; k];
        for x in v.iter_mut() {
            *x = n % base;
            n /= base;
        }
        v
    };
    let encode = |v: &[usize]| v.iter().rev().fold(0usize, |a, &x| a * base + x);
    let top = k * spec.d;
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for n in 0..total {
        let dsum: usize = digits(n).iter().map(|&c| cdim(c)).sum();
        by_dim[dsum].push(n);
    }
    let mut local = vec![0u32; total];
    for cells in &by_dim {
        for (i, &n) in cells.iter().enumerate() {
            local[n] = i as u32;
        }
    }
    let mut bds = vec![Csc::zero(0, by_dim[0].len())];
    for d in 1..=top {
        let cols = by_dim[d]
            .iter()
            .map(|&n| {
                let v = digits(n);
                let mut col = Vec::new();
                let mut before = 0usize;
                for f in 0..k {
                    let sg = if before % 2 == 0 { 1 } else { -1 };
                    for &(c, s) in &sphere[v[f]] {
                        let mut w = v.clone();
                        w[f] = c;
                        col.push((local[encode(&w)], sg * s));
                    }
                    before += cdim(v[f]);
                }
                col.sort_unstable();
                col
            })
            .collect();
        bds.push(Csc::from_columns(by_dim[d - 1].len(), cols));
    }
    let chain = ChainComplex { lo: 0, boundaries: bds, truncated: false };
    let swap_from = match spec.parity {
        Parity::Odd => 1,
        Parity::Even => 0,
    };
    let mut image = Vec::new();
    let mut sign = Vec::new();
    for cells in &by_dim {
        let mut im = Vec::with_capacity(cells.len());
        let mut sg = Vec::with_capacity(cells.len());
        for &n in cells {
            let mut v = digits(n);
            let mut s = 1i8;
            if spec.parity == Parity::Odd {
                v[0] ^= 1;
            }
            for p in (swap_from..k).step_by(2) {
                if (cdim(v[p]) * cdim(v[p + 1])) % 2 == 1 {
                    s = -s;
                }
                v.swap(p, p + 1);
            }
            im.push(local[encode(&v)]);
            sg.push(s);
        }
        image.push(im);
        sign.push(sg);
    }
    let a = CellInvolution { image, sign };
    a.check(&chain)?;
    Ok((chain, a))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crosscheck {
    pub t: usize,
    pub d: usize,
    pub parity: Parity,
    pub symbolic: Vec<usize>,
    pub geometric: Vec<usize>,
    pub equal: bool,
}

/// Cells of the order complex allowed when the action has fixed points.
pub const CROSSCHECK_LIMIT: u64 = 2_000_000;

/// ℤ₂-Betti numbers of the symbolic quotient against those of the
/// geometric quotient of the product cell complex.
pub fn geometric_sphere_quotient_crosscheck(spec: &SphereSymbolArray) -> Result<Crosscheck> {
    let (_, census) = symbolic_sphere_quotient(spec)?;
    let (c, a) = sphere_product(spec)?;
    let mut geometric = if a.is_free() {
        betti(&cellular_quotient(&c, &a)?.chain)?
    } else {
        let q = quotient(&Cover::subdivide(&c, &a, CROSSCHECK_LIMIT)?)?;
        betti(&q.delta.chain_complex())?
    };
    while geometric.len() < census.betti.len() {
        geometric.push(0);
    }
    let equal = geometric == census.betti;
    Ok(Crosscheck { t: spec.t, d: spec.d, parity: spec.parity, symbolic: census.betti, geometric, equal })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_spaces() {
        for d in 2..=4 {
            let s = SphereSymbolArray::new(0, d, Parity::Odd).unwrap();
            let (_, c) = symbolic_sphere_quotient(&s).unwrap();
            assert_eq!(c.betti, vec![1; d + 1]);
            assert!(c.matches());
        }
    }

    #[test]
    fn symmetric_square_of_s2_is_cp2() {
        let s = SphereSymbolArray::new(1, 2, Parity::Even).unwrap();
        let (_, c) = symbolic_sphere_quotient(&s).unwrap();
        assert_eq!(c.betti, vec![1, 0, 1, 0, 1]);
        assert!(c.matches());
        let s = SphereSymbolArray::new(1, 3, Parity::Even).unwrap();
        let (_, c) = symbolic_sphere_quotient(&s).unwrap();
        assert_eq!(c.betti, vec![1, 0, 0, 1, 0, 1, 1]);
        assert!(c.matches());
    }

    #[test]
    fn small_crosschecks() {
        for (t, d, p) in [(0, 2, Parity::Odd), (0, 3, Parity::Odd), (1, 2, Parity::Even), (1, 2, Parity::Odd)] {
            let r = geometric_sphere_quotient_crosscheck(&SphereSymbolArray::new(t, d, p).unwrap()).unwrap();
            assert!(r.equal, "{r:?}");
        }
    }
}
