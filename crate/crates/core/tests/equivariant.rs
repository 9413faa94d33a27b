use homcx::algebra::{homology, Z2};
use homcx::complex::hom_complex;
use homcx::equivariant::sw::Certificate;
use homcx::equivariant::{cellular_quotient, induced_involution, quotient, sw_model, Cover, Route};
use homcx::graph::{complete, complete_swap, cycle, cycle_reflection, Graph, Involution};
use proptest::prelude::*;

/// A graph invariant under the involution `perm`, with the edge {0, perm(0)}
/// present so that γ flips it.
fn symmetric_graph(n: usize, swaps: usize, mask: u64) -> (Graph, Involution) {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..swaps.min(n / 2) {
        perm.swap(2 * i, 2 * i + 1);
    }
    let mut e = vec![(0, perm[0])];
    let mut bit = 0;
    for a in 0..n {
        for b in a + 1..n {
            if mask >> bit & 1 == 1 {
                e.push((a, b));
                e.push((perm[a], perm[b]));
            }
            bit += 1;
        }
    }
    let g = Graph::new(n, &e).unwrap();
    let inv = Involution::new(&g, perm).unwrap();
    (g, inv)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn edge_flips_give_free_cellular_involutions(n in 2usize..=4, swaps in 1usize..=2, mask in any::<u64>(), m in 2usize..=4) {
        let (t, gamma) = symmetric_graph(n, swaps, mask);
        prop_assert!(gamma.flips_edge(&t));
        let x = hom_complex(&t, &complete(m), None).unwrap();
        prop_assume!(!x.is_empty());
        let a = induced_involution(&x, &gamma).unwrap();
        prop_assert!(a.is_free());
        prop_assert!(a.check(&x.chain_complex(false)).is_ok());
        for d in 0..a.image.len() {
            for (i, &j) in a.image[d].iter().enumerate() {
                prop_assert_eq!(a.image[d][j as usize] as usize, i);
                prop_assert_eq!(a.sign[d][i] * a.sign[d][j as usize], 1);
            }
        }
    }

    #[test]
    fn quotient_routes_agree(n in 2usize..=3, mask in any::<u64>(), m in 2usize..=4) {
        let (t, gamma) = symmetric_graph(n, 1, mask);
        let x = hom_complex(&t, &complete(m), None).unwrap();
        prop_assume!(!x.is_empty());
        let a = induced_involution(&x, &gamma).unwrap();
        let c = x.chain_complex(false);
        let cq = cellular_quotient(&c, &a).unwrap();
        let q = quotient(&Cover::subdivide(&c, &a, 1 << 22).unwrap()).unwrap();
        let b = |c: &homcx::algebra::ChainComplex| homology(c, Z2, None).unwrap().iter().map(|g| g.free_rank).collect::<Vec<_>>();
        prop_assert_eq!(b(&cq.chain), b(&q.delta.chain_complex()));
        // χ(X) = 2χ(X/ℤ₂) for a free action
        prop_assert_eq!(c.euler_characteristic(), 2 * q.delta.euler_characteristic());
        let h1 = sw_model(&x, &gamma, Route::Simplicial).unwrap().height().unwrap();
        let h2 = sw_model(&x, &gamma, Route::Gysin).unwrap().height().unwrap();
        prop_assert_eq!(h1.height, h2.height);
    }
}

#[test]
fn routes_agree_on_the_pentagon() {
    let x = hom_complex(&cycle(5), &complete(4), None).unwrap();
    let g = cycle_reflection(5).unwrap();
    let mut heights = Vec::new();
    for route in [Route::Simplicial, Route::Gysin] {
        let m = sw_model(&x, &g, route).unwrap();
        let r = m.height().unwrap();
        for c in [&r.nonzero, &r.vanishing].into_iter().flatten() {
            assert!(m.verify(c).unwrap());
        }
        heights.push(r.height);
    }
    assert_eq!(heights[0], heights[1]);
    // ϖ₁^{n−2} vanishes for odd cycles into K₄, and ϖ₁ is nonzero
    assert_eq!(heights[0], 1);
}

#[test]
fn forged_certificates_are_rejected() {
    let x = hom_complex(&complete(2), &complete(4), None).unwrap();
    let m = sw_model(&x, &complete_swap(2).unwrap(), Route::Gysin).unwrap();
    let r = m.height().unwrap();
    assert_eq!(r.height, 2);
    // ϖ₁² ≠ 0 on ℝP², so no cochain bounds it
    let fake = Certificate::Vanishing { degree: 2, witness: vec![0] };
    assert!(!m.verify(&fake).unwrap_or(false));
    let wrong = Certificate::Dimension { degree: 2 };
    assert!(!m.verify(&wrong).unwrap_or(false));
}
