//! Complex JSON and sparse coordinate text.

use serde::{Deserialize, Serialize};

use crate::algebra::chain::{ChainComplex, Csc};
use crate::complex::Kind;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellJson {
    pub id: usize,
    pub dim: i32,
    pub boundary: Vec<(usize, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub kind: Kind,
    pub cells: Vec<CellJson>,
}

/// Global ids run through the cells dimension by dimension.
pub fn to_complex_json(kind: Kind, c: &ChainComplex) -> ComplexJson {
    let mut offsets = Vec::new();
    let mut acc = 0usize;
    for d in c.lo..=c.hi() {
        offsets.push(acc);
        acc += c.rank(d);
    }
    let mut cells = Vec::with_capacity(acc);
    for (k, d) in (c.lo..=c.hi()).enumerate() {
        let b = c.boundary_ref(d).unwrap();
        for j in 0..b.ncols {
            let boundary = if k == 0 {
                Vec::new()
            } else {
                b.col(j).map(|(i, v)| (offsets[k - 1] + i as usize, v as i64)).collect()
            };
            cells.push(CellJson { id: offsets[k] + j, dim: d, boundary });
        }
    }
    ComplexJson { kind, cells }
}

pub fn from_complex_json(j: &ComplexJson) -> Result<ChainComplex> {
    if j.cells.is_empty() {
        return Ok(ChainComplex::empty_at(0));
    }
    let lo = j.cells.iter().map(|c| c.dim).min().unwrap();
    let hi = j.cells.iter().map(|c| c.dim).max().unwrap();
    let mut local = std::collections::HashMap::new();
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for c in &j.cells {
        let k = (c.dim - lo) as usize;
        if local.insert(c.id, (c.dim, counts[k])).is_some() {
            return Err(Error::Parse(format!("duplicate cell id {}", c.id)));
        }
        counts[k] += 1;
    }
    let mut cols: Vec<Vec<Vec<(u32, i32)>>> = counts.iter().map(|&n| vec![Vec::new(); n]).collect();
    for c in &j.cells {
        let (d, i) = local[&c.id];
        for &(f, s) in &c.boundary {
            let &(fd, fi) = local.get(&f).ok_or_else(|| Error::Parse(format!("unknown face id {f}")))?;
            if fd != d - 1 {
                return Err(Error::Parse(format!("face {f} of cell {} has wrong dimension", c.id)));
            }
            let s = i32::try_from(s).map_err(|_| Error::Parse("incidence out of range".into()))?;
            cols[(d - lo) as usize][i].push((fi as u32, s));
        }
    }
    let mut bds = Vec::new();
    for (k, cs) in cols.into_iter().enumerate() {
        let rows = if k == 0 { 0 } else { counts[k - 1] };
        if k == 0 && cs.iter().any(|c| !c.is_empty()) {
            return Err(Error::Parse("lowest-dimensional cells cannot have faces".into()));
        }
        bds.push(Csc::from_columns(rows, cs));
    }
    Ok(ChainComplex { lo, boundaries: bds, truncated: false })
}

/// One block per boundary map: a `dim nrows ncols nnz` header, then
/// `row col value` lines (0-based).
pub fn to_coordinate_text(c: &ChainComplex) -> String {
    let mut s = String::new();
    for d in c.lo + 1..=c.hi() {
        let b = c.boundary_ref(d).unwrap();
        s.push_str(&format!("{d} {} {} {}\n", b.nrows, b.ncols, b.nnz()));
        for j in 0..b.ncols {
            for (i, v) in b.col(j) {
                s.push_str(&format!("{i} {j} {v}\n"));
            }
        }
    }
    s
}

/// Reads blocks written by [`to_coordinate_text`]; returns (dim, matrix) pairs.
pub fn from_coordinate_text(text: &str) -> Result<Vec<(i32, Csc)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    let perr = |m: &str| Error::Parse(m.to_string());
    while let Some(h) = lines.next() {
        let f: Vec<&str> = h.split_whitespace().collect();
        if f.len() != 4 {
            return Err(perr("bad block header"));
        }
        let d: i32 = f[0].parse().map_err(|_| perr("bad dim"))?;
        let nr: usize = f[1].parse().map_err(|_| perr("bad nrows"))?;
        let nc: usize = f[2].parse().map_err(|_| perr("bad ncols"))?;
        let nnz: usize = f[3].parse().map_err(|_| perr("bad nnz"))?;
        let mut cols = vec![Vec::new(); nc];
        for _ in 0..nnz {
            let l = lines.next().ok_or_else(|| perr("truncated block"))?;
            let e: Vec<&str> = l.split_whitespace().collect();
            if e.len() != 3 {
                return Err(perr("bad entry line"));
            }
            let i: usize = e[0].parse().map_err(|_| perr("bad row"))?;
            let j: usize = e[1].parse().map_err(|_| perr("bad col"))?;
            let v: i32 = e[2].parse().map_err(|_| perr("bad value"))?;
            if i >= nr || j >= nc {
                return Err(perr("entry out of range"));
            }
            cols[j].push((i as u32, v));
        }
        out.push((d, Csc::from_columns(nr, cols)));
    }
    Ok(out)
}
