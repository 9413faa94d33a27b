use homcx::algebra::{homology, Coeff, Z2};
use homcx::complex::{hom_complex, hom_plus_complex, independence_complex, MultihomCell};
use homcx::graph::{
    complement, complete, cycle, enumerate_homomorphisms, is_homomorphism, plus_construction, tensor_product, Graph,
};
use proptest::prelude::*;

fn graph_from_mask(n: usize, mask: u64, loops: bool) -> Graph {
    let mut e = Vec::new();
    let mut bit = 0;
    for a in 0..n {
        for b in a..n {
            if a == b && !loops {
                continue;
            }
            if mask >> bit & 1 == 1 {
                e.push((a, b));
            }
            bit += 1;
        }
    }
    Graph::new(n, &e).unwrap()
}

fn small_graph(max_n: usize, loops: bool) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<u64>()).prop_map(move |(n, m)| graph_from_mask(n, m, loops))
}

fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let mut e = a.edges();
    e.extend(b.edges().into_iter().map(|(x, y)| (x + a.n(), y + a.n())));
    Graph::new(a.n() + b.n(), &e).unwrap()
}

/// Every assignment of subsets, kept when it is a multihomomorphism.
fn brute_force_f_vector(g: &Graph, h: &Graph, allow_empty: bool) -> Vec<usize> {
    let (ng, nh) = (g.n(), h.n());
    let mut f = Vec::new();
    let total = 1u64 << (ng * nh);
    for code in 1..total {
        let lists: Vec<Vec<usize>> =
            (0..ng).map(|v| (0..nh).filter(|&y| code >> (v * nh + y) & 1 == 1).collect()).collect();
        if !allow_empty && lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        let cell = MultihomCell { lists };
        if !cell.is_valid(g, h) {
            continue;
        }
        let d = if allow_empty { cell.simplex_dim() } else { cell.hom_dim() } as usize;
        if f.len() <= d {
            f.resize(d + 1, 0);
        }
        f[d] += 1;
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_matches_exhaustive_filter(g in small_graph(3, true), h in small_graph(4, true)) {
        prop_assume!(g.n() * h.n() <= 12);
        prop_assert_eq!(hom_complex(&g, &h, None).unwrap().f_vector(), brute_force_f_vector(&g, &h, false));
        prop_assert_eq!(hom_plus_complex(&g, &h, None).unwrap().f_vector(), brute_force_f_vector(&g, &h, true));
    }

    #[test]
    fn vertices_are_homomorphisms(g in small_graph(4, false), h in small_graph(4, true)) {
        let x = hom_complex(&g, &h, None).unwrap();
        let homs = enumerate_homomorphisms(&g, &h);
        prop_assert_eq!(x.num_cells(0), homs.len());
        for f in &homs {
            prop_assert!(is_homomorphism(&g, &h, f));
            let cell = MultihomCell { lists: f.image.iter().map(|&y| vec![y]).collect() };
            let key = x.layout.to_key(&cell).unwrap();
            prop_assert!(x.index_of(key).is_some());
        }
    }

    #[test]
    fn hom_plus_is_an_independence_complex(g in small_graph(3, false), h in small_graph(3, true)) {
        let a = hom_plus_complex(&g, &h, None).unwrap();
        let b = independence_complex(&tensor_product(&g, &complement(&h)).unwrap()).unwrap();
        prop_assert_eq!(a.f_vector(), b.f_vector());
    }

    #[test]
    fn edge_counts(g in small_graph(6, true), h in small_graph(5, true)) {
        let n = g.n();
        prop_assert_eq!(complement(&g).num_edges(), n * (n + 1) / 2 - g.num_edges());
        prop_assert_eq!(complement(&complement(&g)), g.clone());
        prop_assert_eq!(plus_construction(&g).unwrap().num_edges(), g.num_edges() + n + 1);
        let t = tensor_product(&g, &h).unwrap();
        prop_assert_eq!(t.n(), g.n() * h.n());
        let loopless = |x: &Graph| (0..x.n()).all(|v| !x.has_loop(v));
        if loopless(&g) && loopless(&h) {
            prop_assert_eq!(t.num_edges(), 2 * g.num_edges() * h.num_edges());
        }
    }

    #[test]
    fn tensor_distributes_over_disjoint_union(a in small_graph(3, true), b in small_graph(3, true), h in small_graph(3, true)) {
        let left = tensor_product(&disjoint_union(&a, &b), &h).unwrap();
        let right = disjoint_union(&tensor_product(&a, &h).unwrap(), &tensor_product(&b, &h).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn boundary_squares_to_zero_and_euler_matches_betti(g in small_graph(3, false), h in small_graph(4, true)) {
        for x in [hom_complex(&g, &h, None).unwrap(), hom_plus_complex(&g, &h, None).unwrap()] {
            let c = x.chain_complex(false);
            prop_assert!(c.check_d_squared().is_ok());
            let euler: i64 = c.euler_characteristic();
            for coeff in [Coeff::Z, Z2, Coeff::Zp(3)] {
                let b: i64 = homology(&c, coeff, None)
                    .unwrap()
                    .iter()
                    .map(|g| if g.degree % 2 == 0 { g.free_rank as i64 } else { -(g.free_rank as i64) })
                    .sum();
                prop_assert_eq!(b, euler);
            }
        }
    }
}

/// Independence polynomial of C_m by brute force, constant term included.
fn independence_polynomial(m: usize) -> Vec<usize> {
    let mut p = vec![0; m + 1];
    for s in 0u32..1 << m {
        if (0..m).all(|i| !(s >> i & 1 == 1 && s >> ((i + 1) % m) & 1 == 1)) {
            p[s.count_ones() as usize] += 1;
        }
    }
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut c = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    c
}

#[test]
fn hom_plus_of_cycles_is_a_join_of_independence_complexes() {
    for m in 3..=7 {
        let ind = independence_polynomial(m);
        for n in 1..=3 {
            let mut p = vec![1];
            for _ in 0..n {
                p = poly_mul(&p, &ind);
            }
            let x = hom_plus_complex(&cycle(m), &complete(n), None).unwrap();
            assert_eq!(x.f_vector(), p[1..].to_vec(), "C{m} K{n}");
        }
    }
}

#[test]
fn hom_of_edge_into_clique_is_a_sphere() {
    for n in 2..=6 {
        let x = hom_complex(&complete(2), &complete(n), None).unwrap();
        // pairs of disjoint nonempty subsets
        assert_eq!(x.len(), 3usize.pow(n as u32) - 2 * 2usize.pow(n as u32) + 1);
        let b: Vec<usize> = homology(&x.chain_complex(true), Coeff::Z, None).unwrap().iter().map(|g| g.free_rank).collect();
        let mut want = vec![0; n];
        want[n - 1] = 1;
        assert_eq!(b, want);
    }
}
