use serde::{Deserialize, Serialize};

use crate::algebra::homology::homology;
use crate::algebra::{ChainComplex, Coeff};
use crate::complex::hom_complex;
use crate::equivariant::sw::{sw_model, Certificate, Route};
use crate::graph::{complete, cycle, Graph, Involution};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundStep {
    pub m: usize,
    /// Deciding ϖ₁ᵏ on Hom(T,K_m); `None` when the target complex is empty.
    pub target: Option<Certificate>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    /// SW height of Hom(T,G), or −1 when it is empty.
    pub height: i64,
    pub source: Option<Certificate>,
    pub steps: Vec<BoundStep>,
    /// Largest certified m+1; `None` means no obstruction.
    pub bound: Option<usize>,
}

/// χ(G) ≥ m+1 whenever ϖ₁ᵏ(Hom(T,G)) ≠ 0 and ϖ₁ᵏ(Hom(T,K_m)) = 0.
/// Vanishing at m+1 implies vanishing at m, so the scan over `ms` stops at
/// the first m that is not certified.
pub fn chromatic_lower_bound(
    g: &Graph,
    t: &Graph,
    gamma: &Involution,
    ms: std::ops::RangeInclusive<usize>,
    route: Option<Route>,
) -> Result<BoundReport> {
    if g.has_loops() {
        return Err(Error::domain("graph has loops"));
    }
    if !gamma.flips_edge(t) {
        return Err(Error::domain("involution does not flip an edge of the test graph"));
    }
    let x = hom_complex(t, g, None)?;
    if x.is_empty() {
        return Ok(BoundReport { height: -1, source: None, steps: Vec::new(), bound: None });
    }
    let pick = |x: &crate::complex::HomComplex| route.unwrap_or_else(|| crate::equivariant::sw::auto_route(x));
    let rep = sw_model(&x, gamma, pick(&x))?.height()?;
    let k = rep.height as usize;
    let mut steps = Vec::new();
    let mut bound = None;
    for m in ms {
        let y = hom_complex(t, &complete(m), None)?;
        let (target, certified) = if y.is_empty() {
            (None, true)
        } else {
            let c = sw_model(&y, gamma, pick(&y))?.decide(k)?;
            let ok = !c.is_nonzero();
            (Some(c), ok)
        };
        if certified {
            bound = Some(bound.map_or(m + 1, |b: usize| b.max(m + 1)));
        }
        steps.push(BoundStep { m, target, certified });
        if !certified {
            break;
        }
    }
    Ok(BoundReport { height: rep.height, source: rep.nonzero, steps, bound })
}

/// Largest k with H̃ᵢ(X;ℤ) = 0 for every i ≤ k; −2 for the empty complex.
pub fn homological_connectivity(c: &ChainComplex) -> Result<i64> {
    if c.lo != 0 {
        return Err(Error::arg("expected an unaugmented complex starting in degree 0"));
    }
    if c.rank(0) == 0 {
        return Ok(-2);
    }
    let top = if c.truncated { c.hi() - 1 } else { c.hi() };
    let mut h = homology(c, Coeff::Z, Some((0, top)))?;
    h[0].free_rank -= 1;
    if !h[0].is_zero() {
        return Ok(-1);
    }
    let mut k = 0i64;
    for g in &h[1..] {
        if !g.is_zero() {
            return Ok(k);
        }
        k = g.degree as i64;
    }
    if c.truncated {
        return Err(Error::resource("connectivity exceeds the stored skeleton"));
    }
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingComponent {
    pub size: usize,
    pub winding: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingReport {
    pub r: usize,
    pub components: Vec<WindingComponent>,
    /// 2(s+1) with s = ⌊(r−1)/3⌋, the number of attainable winding numbers.
    pub expected: usize,
}

impl WindingReport {
    /// Distinct winding numbers among the components.
    pub fn classes(&self) -> usize {
        let mut w: Vec<i64> = self.components.iter().map(|c| c.winding).collect();
        w.dedup();
        w.len()
    }
}

/// Signed turns of a proper 3-colouring of the cycle, divided by 3.
pub fn winding_number(colours: &[usize]) -> i64 {
    let m = colours.len();
    let turns: i64 = (0..m).map(|i| if (colours[(i + 1) % m] + 3 - colours[i]) % 3 == 1 { 1 } else { -1 }).sum();
    turns / 3
}

/// Components of Hom(C_{2r+1},K₃) read off its 1-skeleton.
pub fn winding_components(r: usize) -> Result<WindingReport> {
    if r == 0 {
        return Err(Error::arg("r must be at least 1"));
    }
    let x = hom_complex(&cycle(2 * r + 1), &complete(3), None)?;
    let n0 = x.num_cells(0);
    let mut uf = UnionFind::new(n0);
    if x.dim() >= 1 {
        for i in 0..x.num_cells(1) {
            let b = x.boundary(1, i);
            for w in b.windows(2) {
                uf.union(w[0].0 as usize, w[1].0 as usize);
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, (usize, Option<i64>)> = Default::default();
    for i in 0..n0 {
        let cell = x.cell(0, i);
        let colours: Vec<usize> = cell.lists.iter().map(|l| l[0]).collect();
        let w = winding_number(&colours);
        let e = comps.entry(uf.find(i)).or_insert((0, None));
        e.0 += 1;
        match e.1 {
            None => e.1 = Some(w),
            Some(w0) if w0 != w => return Err(Error::contract("winding number is not constant on a component")),
            _ => {}
        }
    }
    let mut components: Vec<WindingComponent> =
        comps.into_values().map(|(size, w)| WindingComponent { size, winding: w.unwrap_or(0) }).collect();
    components.sort_by_key(|c| (c.winding, c.size));
    Ok(WindingReport { r, components, expected: 2 * ((r - 1) / 3 + 1) })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a.max(b)] = a.min(b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::independence_complex;
    use crate::graph::{complete_swap, exact_chromatic_number};

    #[test]
    fn cliques_and_pentagon() {
        let sw = complete_swap(2).unwrap();
        let r = chromatic_lower_bound(&complete(4), &complete(2), &sw, 2..=4, None).unwrap();
        assert_eq!(r.height, 2);
        assert_eq!(r.bound, Some(4));
        let r = chromatic_lower_bound(&cycle(5), &complete(2), &sw, 2..=4, None).unwrap();
        assert_eq!(r.bound, Some(3));
        assert!(r.bound.unwrap() <= exact_chromatic_number(&cycle(5), 12).unwrap());
    }

    #[test]
    fn connectivity() {
        let x = hom_complex(&complete(2), &complete(4), None).unwrap();
        assert_eq!(homological_connectivity(&x.chain_complex(false)).unwrap(), 1);
        assert_eq!(homological_connectivity(&ChainComplex::empty_at(0)).unwrap(), -2);
        let y = independence_complex(&complete(2)).unwrap();
        assert_eq!(homological_connectivity(&y.chain_complex(false)).unwrap(), -1);
    }

    #[test]
    fn windings() {
        assert_eq!(winding_number(&[0, 1, 2]), 1);
        assert_eq!(winding_number(&[0, 2, 1]), -1);
        let w = winding_components(2).unwrap();
        assert_eq!(w.components.len(), 2);
        assert_eq!(w.components.iter().map(|c| c.winding).collect::<Vec<_>>(), vec![-1, 1]);
        // the three maximal-winding colourings of C₉ are rigid
        let w = winding_components(4).unwrap();
        assert_eq!((w.components.len(), w.classes(), w.expected), (8, 4, 4));
        assert_eq!(w.components.iter().filter(|c| c.winding.abs() == 3).map(|c| c.size).collect::<Vec<_>>(), vec![1; 6]);
        let x = hom_complex(&crate::graph::cycle(9), &complete(3), None).unwrap();
        assert_eq!(homology(&x.chain_complex(false), Coeff::Z, Some((0, 0))).unwrap()[0].free_rank, 8);
    }
}
