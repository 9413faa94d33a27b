use std::collections::BTreeMap;

use homcx::algebra::{Coeff, Z2};
use homcx::graph::{complete, cycle, path, Graph};
use homcx::spectral::consistency::e1_crosscheck;
use homcx::spectral::pages::{pairing, page_from_pairing, subquotient_dims};
use homcx::spectral::spheres::{symbolic_sphere_quotient, Parity, SphereSymbolArray};
use homcx::spectral::{spectral_pages, support_filtration};
use proptest::prelude::*;

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut e = Vec::new();
    let mut bit = 0;
    for a in 0..n {
        for b in a + 1..n {
            if mask >> bit & 1 == 1 {
                e.push((a, b));
            }
            bit += 1;
        }
    }
    Graph::new(n, &e).unwrap()
}

fn nonzero(p: &homcx::spectral::SpectralPage) -> BTreeMap<(i32, i32), usize> {
    p.entries.iter().filter(|(_, e)| e.dim > 0).map(|(&k, e)| (k, e.dim)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pages_match_explicit_subquotients(n in 1usize..=4, mask in any::<u64>(), m in 2usize..=3) {
        let g = graph_from_mask(n, mask);
        let (_, f) = support_filtration(&g, &complete(m), Z2).unwrap();
        let pr = pairing(&f);
        for r in 0..=4 {
            prop_assert_eq!(nonzero(&page_from_pairing(&f, &pr, Some(r))), subquotient_dims(&f, r));
        }
        let pages = spectral_pages(&f, 3).unwrap();
        prop_assert!(pages.converges());
        // each page is the homology of the previous one under d_r
        for r in 0..3 {
            let (a, b) = (&pages.pages[r], &pages.pages[r + 1]);
            let total_a: usize = a.entries.values().map(|e| e.dim).sum();
            let total_b: usize = b.entries.values().map(|e| e.dim).sum();
            let ranks: usize = a.differential_ranks.values().sum();
            prop_assert_eq!(total_b, total_a - 2 * ranks);
        }
    }

    #[test]
    fn e1_is_a_sum_over_supports(n in 1usize..=4, mask in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        prop_assert!(e1_crosscheck(&g, &complete(3), Coeff::Z).unwrap().equal());
    }
}

#[test]
fn bottom_row_of_e2_for_cycles() {
    for m in [4, 5, 6] {
        let (_, f) = support_filtration(&cycle(m), &complete(4), Z2).unwrap();
        let p = spectral_pages(&f, 2).unwrap();
        let row: Vec<(i32, i32)> = nonzero(&p.pages[2]).into_keys().filter(|k| k.1 == 0).collect();
        assert_eq!(row, vec![(0, 0)], "C{m}");
    }
}

#[test]
fn symbolic_quotients_satisfy_their_census() {
    for t in 0..=2 {
        for d in 2..=4 {
            for parity in [Parity::Odd, Parity::Even] {
                let spec = SphereSymbolArray::new(t, d, parity).unwrap();
                let (sc, census) = symbolic_sphere_quotient(&spec).unwrap();
                sc.chain.check_d_squared_mod2().unwrap();
                assert!(census.matches(), "{census:?}");
                assert_eq!(census.euler, spec.euler_closed_form());
            }
        }
    }
}

#[test]
fn json_pages_roundtrip() {
    let (_, f) = support_filtration(&path(3), &complete(3), Z2).unwrap();
    let p = spectral_pages(&f, 2).unwrap();
    for page in &p.pages {
        let j = page.to_json();
        let back = homcx::spectral::SpectralPage::from_json(&j).unwrap();
        assert_eq!(nonzero(&back), nonzero(page));
    }
}
