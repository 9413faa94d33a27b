use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::homology::{cohomology, HomologyGroup};
use crate::algebra::Coeff;
use crate::complex::hom_complex;
use crate::graph::{induced_subgraph, Graph};
use crate::spectral::filtration::support_filtration;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Entry {
    pub p: i32,
    pub q: i32,
    /// H^{p+q}(F^p/F^{p+1}).
    pub filtered: HomologyGroup,
    /// ⊕_{|S|=p+1} H^q(Hom(G[S],H)).
    pub direct: HomologyGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Check {
    pub entries: Vec<E1Entry>,
}

impl E1Check {
    pub fn equal(&self) -> bool {
        self.entries.iter().all(|e| e.filtered == e.direct)
    }

    pub fn get(&self, p: i32, q: i32) -> Option<&E1Entry> {
        self.entries.iter().find(|e| e.p == p && e.q == q)
    }
}

fn add(into: &mut HomologyGroup, g: &HomologyGroup) {
    into.free_rank += g.free_rank;
    into.torsion.extend_from_slice(&g.torsion);
    into.torsion.sort_unstable();
}

/// E₁ of the support filtration of Hom₊(G,H) against the direct sum over
/// supports, each summand computed from scratch.
pub fn e1_crosscheck(g: &Graph, h: &Graph, coeff: Coeff) -> Result<E1Check> {
    let (_, f) = support_filtration(g, h, coeff)?;
    let mut table: BTreeMap<(i32, i32), (HomologyGroup, HomologyGroup)> = BTreeMap::new();
    fn slot(t: &mut BTreeMap<(i32, i32), (HomologyGroup, HomologyGroup)>, p: i32, q: i32) -> &mut (HomologyGroup, HomologyGroup) {
        t.entry((p, q)).or_insert_with(|| (HomologyGroup::zero(q), HomologyGroup::zero(q)))
    }
    for p in 0..f.num_levels() {
        for gr in cohomology(&f.graded_piece(p), coeff, Some((0, f.dim())))? {
            let q = gr.degree - p as i32;
            if gr.is_zero() {
                continue;
            }
            add(&mut slot(&mut table, p as i32, q).0, &gr);
        }
    }
    let n = g.n();
    for mask in 1u64..(1u64 << n) {
        let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let p = s.len() as i32 - 1;
        let x = hom_complex(&induced_subgraph(g, &s)?, h, None)?;
        if x.is_empty() {
            continue;
        }
        for gr in cohomology(&x.chain_complex(false), coeff, None)? {
            if gr.is_zero() {
                continue;
            }
            add(&mut slot(&mut table, p, gr.degree).1, &gr);
        }
    }
    let entries = table
        .into_iter()
        .map(|((p, q), (mut a, mut b))| {
            a.degree = q;
            b.degree = q;
            E1Entry { p, q, filtered: a, direct: b }
        })
        .collect();
    Ok(E1Check { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Z2;
    use crate::graph::{complete, cycle, path};

    #[test]
    fn small_e1() {
        for (g, h) in [(path(3), complete(3)), (cycle(4), complete(3))] {
            for c in [Coeff::Z, Z2] {
                let e = e1_crosscheck(&g, &h, c).unwrap();
                assert!(e.equal(), "{e:?}");
            }
        }
        // on a path into K₃ each summand is a product of circles and points
        let e = e1_crosscheck(&path(2), &complete(3), Coeff::Z).unwrap();
        assert_eq!(e.get(0, 0).unwrap().direct.free_rank, 2);
        assert_eq!(e.get(1, 1).unwrap().direct.free_rank, 1);
    }
}
