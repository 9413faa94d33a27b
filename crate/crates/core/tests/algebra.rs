use homcx::algebra::homology::{rank_mod_p, rank_z};
use homcx::algebra::snf::{identity, matmul, smith_normal_form, SparseIntMatrix};
use homcx::algebra::{smith_invariants, Csc};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn dense(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

fn matrix() -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>)> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), m).prop_map(move |a| (m, n, a))
    })
}

/// Permutation expansion, fine for n ≤ 5.
fn det(a: &[Vec<i64>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut total = 0i128;
    for j in 0..n {
        if a[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> =
            a[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
        let s = if j % 2 == 0 { 1 } else { -1 };
        total += s * a[0][j] as i128 * det(&minor);
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn smith_form_is_a_unimodular_diagonalisation((m, n, a) in matrix()) {
        let ad = dense(&a);
        let s = smith_normal_form(&SparseIntMatrix::from_dense(&ad, n));
        let d = matmul(&matmul(&s.u, &ad, m, n), &s.v, n, n);
        for i in 0..m {
            for j in 0..n {
                let want = if i == j && i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(&d[i][j], &want);
            }
        }
        prop_assert_eq!(matmul(&s.u, &s.u_inv, m, m), identity(m));
        prop_assert_eq!(matmul(&s.v, &s.v_inv, n, n), identity(n));
        for w in s.diag.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert!(s.diag.iter().all(|x| x.is_positive()));
        let sparse = smith_invariants(&SparseIntMatrix::from_dense(&ad, n)).unwrap();
        prop_assert_eq!(&sparse, &s.diag);
        if m == n {
            let prod: BigInt = if s.diag.len() == n { s.diag.iter().product() } else { BigInt::zero() };
            prop_assert_eq!(prod, BigInt::from(det(&a).abs()));
        }
    }

    #[test]
    fn ranks_over_fields_follow_the_invariant_factors((m, n, a) in matrix()) {
        let cols: Vec<Vec<(u32, i32)>> =
            (0..n).map(|j| (0..m).filter(|&i| a[i][j] != 0).map(|i| (i as u32, a[i][j] as i32)).collect()).collect();
        let c = Csc::from_columns(m, cols);
        let s = smith_normal_form(&SparseIntMatrix::from_dense(&dense(&a), n));
        prop_assert_eq!(rank_z(&c).unwrap(), s.rank());
        for p in [2u32, 3, 5] {
            let want = s.diag.iter().filter(|d| !(*d % p).is_zero()).count();
            prop_assert_eq!(rank_mod_p(&c, p).unwrap(), want);
        }
    }
}
