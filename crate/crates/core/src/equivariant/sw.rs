use serde::{Deserialize, Serialize};

use crate::algebra::chain::{ChainComplex, Csc};
use crate::algebra::z2::{mul_vec, BitVec, CoboundarySolver, Solve};
use crate::complex::HomComplex;
use crate::equivariant::action::induced_involution;
use crate::equivariant::quotient::{cellular_quotient, quotient, Cover, Quotient};
use crate::graph::Involution;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Sheet cocycle on the subdivided quotient, powers by front/back faces.
    Simplicial,
    /// Connecting map of the transfer sequence on the cellular quotient.
    Gysin,
}

/// A class ϖ₁ᵏ together with what decides it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    /// A ℤ₂-cycle (cell ids of its support) pairing to 1 with ϖ₁ᵏ.
    Nonzero { degree: usize, cycle: Vec<u32> },
    /// A (k−1)-cochain x with δx = ϖ₁ᵏ (cell ids of its support).
    Vanishing { degree: usize, witness: Vec<u32> },
    /// ϖ₁ᵏ vanishes because the quotient has no k-cells.
    Dimension { degree: usize },
}

impl Certificate {
    pub fn degree(&self) -> usize {
        match self {
            Certificate::Nonzero { degree, .. } | Certificate::Vanishing { degree, .. } | Certificate::Dimension { degree } => *degree,
        }
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, Certificate::Nonzero { .. })
    }
}

/// The ℤ₂-cochain model of X/ℤ₂ with cochains representing ϖ₁ᵏ.
pub struct SwModel {
    pub route: Route,
    pub solver: CoboundarySolver,
    powers: Vec<BitVec>,
}

fn support(b: &BitVec) -> Vec<u32> {
    b.ones().map(|i| i as u32).collect()
}

fn from_support(len: usize, s: &[u32]) -> Result<BitVec> {
    let mut b = BitVec::zeros(len);
    for &i in s {
        if i as usize >= len {
            return Err(Error::arg("certificate cell id out of range"));
        }
        b.flip(i as usize);
    }
    Ok(b)
}

impl SwModel {
    /// From the quotient of a free action on an ordered Δ-complex; the
    /// section picks the representative lift of every vertex.
    pub fn simplicial(q: &Quotient) -> Result<SwModel> {
        if !q.is_free() {
            return Err(Error::domain("action is not free"));
        }
        let w1 = sheet_cocycle(q, &|_| false);
        let dl = &q.delta;
        let top = dl.dim().max(-1);
        let mut powers = Vec::new();
        if top >= 0 {
            powers.push(BitVec::from_bools(&vec![true; dl.count(0)]));
        }
        for k in 1..=top.max(0) as usize {
            if top < k as isize {
                break;
            }
            let mut p = BitVec::zeros(dl.count(k));
            for s in 0..dl.count(k) as u32 {
                if (1..=k).all(|e| w1.get(dl.spine_edge(k, s, e) as usize)) {
                    p.set(s as usize, true);
                }
            }
            powers.push(p);
        }
        Ok(SwModel { route: Route::Simplicial, solver: CoboundarySolver::new(dl.chain_complex())?, powers })
    }

    /// From a free cellular involution, without subdividing.
    pub fn gysin(c: &ChainComplex, a: &crate::equivariant::CellInvolution) -> Result<SwModel> {
        let cq = cellular_quotient(c, a)?;
        let top = if cq.chain.truncated { cq.chain.hi() - 1 } else { cq.chain.hi() };
        let mut powers = Vec::new();
        if top >= 0 {
            powers.push(BitVec::from_bools(&vec![true; cq.chain.rank(0)]));
        }
        for d in 0..top.max(0) as usize {
            let g: &Csc = &cq.gysin[d];
            let next = mul_vec(g, &powers[d]);
            powers.push(next);
        }
        Ok(SwModel { route: Route::Gysin, solver: CoboundarySolver::new(cq.chain)?, powers })
    }

    /// Highest degree carried by the model.
    pub fn top(&self) -> isize {
        self.powers.len() as isize - 1
    }

    pub fn power(&self, k: usize) -> Option<&BitVec> {
        self.powers.get(k)
    }

    pub fn decide(&self, k: usize) -> Result<Certificate> {
        if self.top() < 0 {
            return Err(Error::domain("empty complex"));
        }
        let Some(z) = self.powers.get(k) else {
            if self.solver.chain.truncated {
                return Err(Error::contract(format!("degree {k} is beyond the stored skeleton")));
            }
            return Ok(Certificate::Dimension { degree: k });
        };
        Ok(match self.solver.solve(k as i32, z)? {
            Solve::Coboundary(x) => Certificate::Vanishing { degree: k, witness: support(&x) },
            Solve::Obstruction(y) => Certificate::Nonzero { degree: k, cycle: support(&y) },
        })
    }

    /// Cheap re-check of a certificate against this model.
    pub fn verify(&self, cert: &Certificate) -> Result<bool> {
        let k = cert.degree();
        let c = &self.solver.chain;
        match cert {
            Certificate::Dimension { .. } => Ok(self.powers.get(k).is_none() && !c.truncated),
            Certificate::Nonzero { cycle, .. } => {
                let Some(z) = self.powers.get(k) else { return Ok(false) };
                let y = from_support(c.rank(k as i32), cycle)?;
                Ok(self.solver.verify(k as i32, z, &Solve::Obstruction(y)))
            }
            Certificate::Vanishing { witness, .. } => {
                let Some(z) = self.powers.get(k) else { return Ok(false) };
                let x = from_support(c.rank(k as i32 - 1), witness)?;
                Ok(self.solver.verify(k as i32, z, &Solve::Coboundary(x)))
            }
        }
    }

    pub fn height(&self) -> Result<SwReport> {
        if self.top() < 0 {
            return Ok(SwReport { height: -1, route: self.route, nonzero: None, vanishing: None });
        }
        let mut last_nonzero = None;
        let mut k = 0usize;
        loop {
            let c = self.decide(k)?;
            if c.is_nonzero() {
                last_nonzero = Some(c);
                k += 1;
            } else {
                return Ok(SwReport { height: k as i64 - 1, route: self.route, nonzero: last_nonzero, vanishing: Some(c) });
            }
        }
    }
}

/// ϖ₁ as the sheet cocycle: an edge has value 1 when its lift starting at
/// the chosen lift of one endpoint ends off the chosen lift of the other.
/// `flip(v)` swaps the chosen lift of quotient vertex v.
pub fn sheet_cocycle(q: &Quotient, flip: &dyn Fn(u32) -> bool) -> BitVec {
    let n1 = q.delta.count(1);
    let mut w = BitVec::zeros(n1);
    if n1 == 0 {
        return w;
    }
    for e in 0..n1 {
        let (a, b) = q.edge_ends[e];
        let sa = q.sheet(0, a) ^ flip(q.orbit[0][a as usize]);
        let sb = q.sheet(0, b) ^ flip(q.orbit[0][b as usize]);
        w.set(e, sa ^ sb);
    }
    w
}

/// ϖ₁ of a free quotient as a 1-cocycle, with the decisions that it is
/// trivial and that its class does not depend on the section.
#[derive(Clone, Debug)]
pub struct SwClass {
    pub cocycle: BitVec,
    pub trivial: bool,
    pub section_independent: bool,
}

pub fn sw_class(q: &Quotient) -> Result<SwClass> {
    let model = SwModel::simplicial(q)?;
    let cocycle = sheet_cocycle(q, &|_| false);
    let trivial = q.delta.count(1) == 0 || matches!(model.solver.solve(1, &cocycle)?, Solve::Coboundary(_));
    Ok(SwClass { cocycle, trivial, section_independent: section_independence(q, &model)? })
}

/// Changing the section changes the sheet cocycle by a coboundary; the
/// difference for the section flipped at every other vertex is solved
/// explicitly.
pub fn section_independence(q: &Quotient, model: &SwModel) -> Result<bool> {
    if q.delta.count(1) == 0 {
        return Ok(true);
    }
    let mut w = sheet_cocycle(q, &|_| false);
    let w2 = sheet_cocycle(q, &|v| v % 2 == 0);
    w.xor_assign(&w2);
    let s = model.solver.solve(1, &w)?;
    Ok(matches!(s, Solve::Coboundary(_)) && model.solver.verify(1, &w, &s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwReport {
    /// Largest k with ϖ₁ᵏ ≠ 0; −1 for the empty complex.
    pub height: i64,
    pub route: Route,
    pub nonzero: Option<Certificate>,
    pub vanishing: Option<Certificate>,
}

/// Default chain budget for the subdivided route.
pub const SUBDIVISION_LIMIT: u64 = 4_000_000;

/// Builds the model of Hom(G,H)/γ by the requested route.
pub fn sw_model(x: &HomComplex, gamma: &Involution, route: Route) -> Result<SwModel> {
    let a = induced_involution(x, gamma)?;
    if let Some((d, i)) = a.first_fixed() {
        return Err(Error::domain(format!("action is not free: the {d}-cell {i} is fixed")));
    }
    let c = x.chain_complex(false);
    match route {
        Route::Gysin => SwModel::gysin(&c, &a),
        Route::Simplicial => {
            let q = quotient(&Cover::subdivide(&c, &a, SUBDIVISION_LIMIT)?)?;
            SwModel::simplicial(&q)
        }
    }
}

/// SW height of a free action, with certificates.
pub fn sw_height(x: &HomComplex, gamma: &Involution, route: Route) -> Result<SwReport> {
    if x.is_empty() {
        return Ok(SwReport { height: -1, route, nonzero: None, vanishing: None });
    }
    sw_model(x, gamma, route)?.height()
}

/// Route used when none is requested: subdivide when the order complex is
/// small, otherwise stay cellular.
pub fn auto_route(x: &HomComplex) -> Route {
    match crate::complex::poset::FacePoset::from_chain_complex(&x.chain_complex(false)) {
        Ok(p) if p.chain_count() <= SUBDIVISION_LIMIT / 4 => Route::Simplicial,
        _ => Route::Gysin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{hom_complex, SimplicialComplex};
    use crate::graph::{complete, complete_swap, cycle, cycle_reflection};

    fn octa_model(d: usize) -> (Quotient, SwModel) {
        let s = SimplicialComplex::octahedral_sphere(d);
        let vmap: Vec<u32> = (0..s.nverts as u32).map(|v| v ^ 1).collect();
        let q = quotient(&Cover::from_simplicial(&s, &vmap).unwrap()).unwrap();
        let m = SwModel::simplicial(&q).unwrap();
        (q, m)
    }

    #[test]
    fn antipodal_spheres() {
        for d in 1..=3 {
            let (q, m) = octa_model(d);
            let r = m.height().unwrap();
            assert_eq!(r.height, d as i64);
            assert!(m.verify(r.nonzero.as_ref().unwrap()).unwrap());
            assert!(m.verify(r.vanishing.as_ref().unwrap()).unwrap());
            assert!(section_independence(&q, &m).unwrap());
        }
    }

    #[test]
    fn hom_k2_kn_both_routes() {
        for n in 3..=5 {
            let x = hom_complex(&complete(2), &complete(n), None).unwrap();
            let g = complete_swap(2).unwrap();
            let a = sw_height(&x, &g, Route::Simplicial).unwrap();
            let b = sw_height(&x, &g, Route::Gysin).unwrap();
            assert_eq!(a.height, n as i64 - 2);
            assert_eq!(b.height, n as i64 - 2);
        }
    }

    #[test]
    fn trivial_and_disconnected_covers() {
        // ϖ₁ of Hom(C5,K3) is trivial
        let x = hom_complex(&cycle(5), &complete(3), None).unwrap();
        let g = cycle_reflection(5).unwrap();
        assert_eq!(sw_height(&x, &g, Route::Simplicial).unwrap().height, 0);
        assert_eq!(sw_height(&x, &g, Route::Gysin).unwrap().height, 0);
        // two points swapped
        let s = SimplicialComplex::from_simplices(2, vec![vec![0], vec![1]]).unwrap();
        let q = quotient(&Cover::from_simplicial(&s, &[1, 0]).unwrap()).unwrap();
        assert_eq!(SwModel::simplicial(&q).unwrap().height().unwrap().height, 0);
        assert!(sw_class(&q).unwrap().trivial);
    }

    #[test]
    fn antipodal_hexagon() {
        let s = SimplicialComplex::from_facets(6, &(0..6).map(|i| vec![i, (i + 1) % 6]).collect::<Vec<_>>()).unwrap();
        let vmap: Vec<u32> = (0..6).map(|v| (v + 3) % 6).collect();
        let q = quotient(&Cover::from_simplicial_action(&s, &vmap, 1000).unwrap()).unwrap();
        let c = sw_class(&q).unwrap();
        assert!(!c.trivial);
        assert!(c.section_independent);
    }

    #[test]
    fn non_free_is_rejected() {
        let x = crate::complex::hom_plus_complex(&cycle(5), &complete(3), None).unwrap();
        let g = cycle_reflection(5).unwrap();
        assert!(matches!(sw_height(&x, &g, Route::Gysin), Err(Error::Domain(_))));
    }
}
