use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::homology::{cohomology, HomologyGroup};
use crate::algebra::z2::{BitVec, Echelon};
use crate::algebra::{Coeff, Z2};
use crate::spectral::filtration::FilteredCochainComplex;
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageEntry {
    /// ℤ₂-dimension.
    pub dim: usize,
    /// The integral group, for E₁ over ℤ.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group: Option<HomologyGroup>,
}

/// E_r with the ranks of d_r: E_r^{p,q} → E_r^{p+r,q−r+1}, both keyed by
/// the source (p,q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralPage {
    pub r: u32,
    pub entries: BTreeMap<(i32, i32), PageEntry>,
    pub differential_ranks: BTreeMap<(i32, i32), usize>,
}

fn key(p: i32, q: i32) -> String {
    format!("{p},{q}")
}

impl SpectralPage {
    pub fn dim(&self, p: i32, q: i32) -> usize {
        self.entries.get(&(p, q)).map_or(0, |e| e.dim)
    }

    pub fn rank(&self, p: i32, q: i32) -> usize {
        self.differential_ranks.get(&(p, q)).copied().unwrap_or(0)
    }

    /// Σ_{p+q=n} dim E^{p,q}.
    pub fn total(&self, n: i32) -> usize {
        self.entries.iter().filter(|(&(p, q), _)| p + q == n).map(|(_, e)| e.dim).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: serde_json::Map<String, serde_json::Value> = self
            .entries
            .iter()
            .filter(|(_, e)| e.dim > 0 || e.group.as_ref().is_some_and(|g| !g.is_zero()))
            .map(|(&(p, q), e)| (key(p, q), serde_json::to_value(e).unwrap()))
            .collect();
        let ranks: serde_json::Map<String, serde_json::Value> = self
            .differential_ranks
            .iter()
            .filter(|(_, &r)| r > 0)
            .map(|(&(p, q), &r)| (key(p, q), r.into()))
            .collect();
        serde_json::json!({ "r": self.r, "entries": entries, "differential_ranks": ranks })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<SpectralPage> {
        let bad = || Error::Parse("malformed page dump".into());
        let r = v.get("r").and_then(|r| r.as_u64()).ok_or_else(bad)? as u32;
        let parse_key = |s: &str| -> Result<(i32, i32)> {
            let (a, b) = s.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        };
        let mut entries = BTreeMap::new();
        for (k, e) in v.get("entries").and_then(|e| e.as_object()).ok_or_else(bad)? {
            let e: PageEntry = serde_json::from_value(e.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            entries.insert(parse_key(k)?, e);
        }
        let mut differential_ranks = BTreeMap::new();
        for (k, n) in v.get("differential_ranks").and_then(|e| e.as_object()).ok_or_else(bad)? {
            differential_ranks.insert(parse_key(k)?, n.as_u64().ok_or_else(bad)? as usize);
        }
        Ok(SpectralPage { r, entries, differential_ranks })
    }
}

/// Filtration-compatible reduction over ℤ₂: every cochain basis element is
/// either essential or paired with one of degree one higher, and a pair
/// (σ,τ) with gap r = level τ − level σ survives to E_r and is killed by
/// d_r.
#[derive(Clone, Debug)]
pub struct Pairing {
    /// (degree of σ, σ, τ), cells as indices within their degree.
    pub pairs: Vec<(usize, u32, u32)>,
    pub essential: Vec<(usize, u32)>,
}

pub fn pairing(f: &FilteredCochainComplex) -> Pairing {
    let dims = f.level.len();
    // position of a cell in the filtration order: higher level first
    let order: Vec<Vec<u32>> = f
        .level
        .iter()
        .map(|ls| {
            let mut idx: Vec<u32> = (0..ls.len() as u32).collect();
            idx.sort_by_key(|&i| (std::cmp::Reverse(ls[i as usize]), i));
            idx
        })
        .collect();
    let pos: Vec<Vec<u32>> = order
        .iter()
        .map(|o| {
            let mut p = vec![0u32; o.len()];
            for (k, &i) in o.iter().enumerate() {
                p[i as usize] = k as u32;
            }
            p
        })
        .collect();
    let mut pairs = Vec::new();
    let mut is_target: Vec<Vec<bool>> = f.level.iter().map(|l| vec![false; l.len()]).collect();
    let mut is_source: Vec<Vec<bool>> = is_target.clone();
    for d in 0..dims.saturating_sub(1) {
        // coboundary columns, rows in filtration positions of (d+1)-cells
        let b = f.chain.boundary_ref(d as i32 + 1).unwrap();
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); f.level[d].len()];
        for j in 0..b.ncols {
            for (i, v) in b.col(j) {
                if v % 2 != 0 {
                    cols[i as usize].push(pos[d + 1][j]);
                }
            }
        }
        let mut pivot_of: Vec<u32> = vec![u32::MAX; f.level[d + 1].len()];
        let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); f.level[d].len()];
        for &s in &order[d] {
            if is_target[d][s as usize] {
                continue;
            }
            let mut c = std::mem::take(&mut cols[s as usize]);
            c.sort_unstable();
            loop {
                let Some(&low) = c.last() else { break };
                let o = pivot_of[low as usize];
                if o == u32::MAX {
                    pivot_of[low as usize] = s;
                    let t = order[d + 1][low as usize];
                    is_target[d + 1][t as usize] = true;
                    is_source[d][s as usize] = true;
                    pairs.push((d, s, t));
                    break;
                }
                c = symmetric_difference(&c, &reduced[o as usize]);
            }
            reduced[s as usize] = c;
        }
    }
    let mut essential = Vec::new();
    for d in 0..dims {
        for i in 0..f.level[d].len() {
            if !is_target[d][i] && !is_source[d][i] {
                essential.push((d, i as u32));
            }
        }
    }
    Pairing { pairs, essential }
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Page r from a pairing; `None` for E_∞.
pub fn page_from_pairing(f: &FilteredCochainComplex, pr: &Pairing, r: Option<u32>) -> SpectralPage {
    let mut entries: BTreeMap<(i32, i32), PageEntry> = BTreeMap::new();
    let mut differential_ranks = BTreeMap::new();
    let pq = |d: usize, i: u32| {
        let p = f.level[d][i as usize] as i32;
        (p, d as i32 - p)
    };
    for &(d, i) in &pr.essential {
        entries.entry(pq(d, i)).or_default().dim += 1;
    }
    for &(d, s, t) in &pr.pairs {
        let gap = f.level[d + 1][t as usize] - f.level[d][s as usize];
        if r.is_some_and(|r| gap >= r) {
            entries.entry(pq(d, s)).or_default().dim += 1;
            entries.entry(pq(d + 1, t)).or_default().dim += 1;
            if r == Some(gap) {
                *differential_ranks.entry(pq(d, s)).or_insert(0) += 1;
            }
        }
    }
    SpectralPage { r: r.unwrap_or(u32::MAX), entries, differential_ranks }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergence {
    pub degree: i32,
    pub e_infinity: usize,
    pub cohomology: usize,
}

#[derive(Clone, Debug)]
pub struct Pages {
    pub pages: Vec<SpectralPage>,
    pub e_infinity: SpectralPage,
    pub convergence: Vec<Convergence>,
}

impl Pages {
    pub fn converges(&self) -> bool {
        self.convergence.iter().all(|c| c.e_infinity == c.cohomology)
    }
}

/// E_0 … E_{up_to_r} and E_∞ over ℤ₂ (E_1 also carries ℤ-groups when the
/// complex has integral coefficients and `up_to_r ≤ 1`).
pub fn spectral_pages(f: &FilteredCochainComplex, up_to_r: u32) -> Result<Pages> {
    if f.coeff == Coeff::Z && up_to_r > 1 {
        return Err(Error::Unsupported("pages beyond E_1 are computed over Z2 only".into()));
    }
    if !matches!(f.coeff, Coeff::Z) && f.coeff != Z2 {
        return Err(Error::Unsupported("spectral pages support Z and Z2".into()));
    }
    let pr = pairing(f);
    let mut pages: Vec<SpectralPage> = (0..=up_to_r).map(|r| page_from_pairing(f, &pr, Some(r))).collect();
    let e_inf = page_from_pairing(f, &pr, None);
    if f.coeff == Coeff::Z && up_to_r >= 1 {
        let levels: Vec<u32> = (0..f.num_levels()).collect();
        let groups: Vec<(u32, Vec<HomologyGroup>)> = levels
            .par_iter()
            .map(|&p| cohomology(&f.graded_piece(p), Coeff::Z, Some((0, f.dim()))).map(|g| (p, g)))
            .collect::<Result<_>>()?;
        for (p, gs) in groups {
            for g in gs {
                let q = g.degree - p as i32;
                if !g.is_zero() || pages[1].entries.contains_key(&(p as i32, q)) {
                    pages[1].entries.entry((p as i32, q)).or_default().group = Some(g);
                }
            }
        }
    }
    let h = cohomology(&f.chain, Z2, Some((0, f.dim())))?;
    let convergence = h
        .iter()
        .map(|g| Convergence { degree: g.degree, e_infinity: e_inf.total(g.degree), cohomology: g.free_rank + g.torsion.len() })
        .collect();
    Ok(Pages { pages, e_infinity: e_inf, convergence })
}

/// Independent page dimensions from explicit subquotients
/// E_r^p = Z_r^p / (Z_{r−1}^{p+1} + δZ_{r−1}^{p−r+1}), with
/// Z_r^p = {x ∈ F^p : δx ∈ F^{p+r}}. Dense; for small complexes.
pub fn subquotient_dims(f: &FilteredCochainComplex, r: u32) -> BTreeMap<(i32, i32), usize> {
    let ranks = f.chain.ranks();
    let delta: Vec<Vec<BitVec>> = (0..ranks.len())
        .map(|d| {
            (0..ranks[d])
                .map(|i| {
                    let mut v = BitVec::zeros(if d + 1 < ranks.len() { ranks[d + 1] } else { 0 });
                    if d + 1 < ranks.len() {
                        let b = f.chain.boundary_ref(d as i32 + 1).unwrap();
                        for j in 0..b.ncols {
                            if b.col(j).any(|(row, val)| row as usize == i && val % 2 != 0) {
                                v.set(j, true);
                            }
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let apply = |d: usize, x: &BitVec| -> BitVec {
        let n = if d + 1 < ranks.len() { ranks[d + 1] } else { 0 };
        let mut y = BitVec::zeros(n);
        for i in x.ones() {
            y.xor_assign(&delta[d][i]);
        }
        y
    };
    // basis of Z_r^p in degree d
    let z = |d: usize, p: i64, r: i64| -> Vec<BitVec> {
        let n = ranks[d];
        let cells: Vec<usize> = (0..n).filter(|&i| f.level[d][i] as i64 >= p).collect();
        // kernel of x ↦ (δx restricted to levels < p+r) on span(cells)
        let outside: Vec<usize> = if d + 1 < ranks.len() {
            (0..ranks[d + 1]).filter(|&j| (f.level[d + 1][j] as i64) < p + r).collect()
        } else {
            Vec::new()
        };
        let mut rows: Vec<(BitVec, BitVec)> = Vec::new();
        for &i in &cells {
            let img = apply(d, &BitVec::unit(n, i));
            let proj = BitVec::from_bools(&outside.iter().map(|&j| img.get(j)).collect::<Vec<_>>());
            rows.push((proj, BitVec::unit(n, i)));
        }
        kernel(rows)
    };
    let mut out = BTreeMap::new();
    let top = f.num_levels() as i64;
    for d in 0..ranks.len() {
        for p in 0..top {
            let zr = z(d, p, r as i64);
            let mut b: Vec<BitVec> = z(d, p + 1, (r as i64 - 1).max(0));
            if d > 0 && r > 0 {
                for x in z(d - 1, p - r as i64 + 1, r as i64 - 1) {
                    b.push(apply(d - 1, &x));
                }
            }
            let mut e = Echelon::new(ranks[d], b.len() + zr.len());
            for v in &b {
                e.insert(v);
            }
            let rb = e.rank();
            for v in &zr {
                e.insert(v);
            }
            let dim = e.rank() - rb;
            if dim > 0 {
                out.insert((p as i32, d as i32 - p as i32), dim);
            }
        }
    }
    out
}

fn kernel(rows: Vec<(BitVec, BitVec)>) -> Vec<BitVec> {
    let mut pivots: Vec<(usize, BitVec, BitVec)> = Vec::new();
    let mut ker = Vec::new();
    for (mut a, mut t) in rows {
        for (c, pa, pt) in &pivots {
            if a.get(*c) {
                a.xor_assign(pa);
                t.xor_assign(pt);
            }
        }
        match a.first_one() {
            Some(c) => {
                for (_, pa, pt) in pivots.iter_mut() {
                    if pa.get(c) {
                        pa.xor_assign(&a);
                        pt.xor_assign(&t);
                    }
                }
                pivots.push((c, a, t));
            }
            None => ker.push(t),
        }
    }
    ker
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::filtration::support_filtration;
    use crate::graph::{complete, cycle, path};

    #[test]
    fn pairing_agrees_with_subquotients() {
        for (g, h) in [(path(3), complete(3)), (cycle(4), complete(3)), (path(2), complete(4))] {
            let (_, f) = support_filtration(&g, &h, Z2).unwrap();
            let pr = pairing(&f);
            for r in 0..=4 {
                let a = page_from_pairing(&f, &pr, Some(r));
                let dims: BTreeMap<(i32, i32), usize> =
                    a.entries.iter().filter(|(_, e)| e.dim > 0).map(|(&k, e)| (k, e.dim)).collect();
                assert_eq!(dims, subquotient_dims(&f, r), "r = {r}");
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let (_, f) = support_filtration(&path(3), &complete(3), Z2).unwrap();
        let p = spectral_pages(&f, 2).unwrap();
        assert!(p.converges());
        let j = p.pages[2].to_json();
        let back = SpectralPage::from_json(&j).unwrap();
        assert_eq!(back.to_json(), j);
    }

    #[test]
    fn integral_limits() {
        let (_, f) = support_filtration(&path(2), &complete(3), Coeff::Z).unwrap();
        assert!(matches!(spectral_pages(&f, 2), Err(Error::Unsupported(_))));
        let p = spectral_pages(&f, 1).unwrap();
        assert!(p.pages[1].entries.values().any(|e| e.group.is_some()));
    }
}
