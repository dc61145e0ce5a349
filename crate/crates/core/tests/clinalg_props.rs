mod common;

use common::{rel_err, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use quatpaint_core::clinalg::{hpd_solve, random_complex, Cholesky, ComplexMatrix};

fn gram_plus_ridge(v: &ComplexMatrix, lambda: f64) -> ComplexMatrix {
    v.matmul(&v.hermitian()).unwrap().add_identity(lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hermitian_is_an_involution(seed in any::<u64>(), m in 1usize..9, n in 1usize..9) {
        let a = random_complex(&mut rng(seed), m, n, -5.0, 5.0).unwrap();
        prop_assert_eq!(a.hermitian().hermitian(), a);
    }

    #[test]
    fn hermitian_reverses_products(seed in any::<u64>(), m in 1usize..7, k in 1usize..7, n in 1usize..7) {
        let mut r = rng(seed);
        let a = random_complex(&mut r, m, k, -5.0, 5.0).unwrap();
        let b = random_complex(&mut r, k, n, -5.0, 5.0).unwrap();
        let lhs = a.matmul(&b).unwrap().hermitian();
        let rhs = b.hermitian().matmul(&a.hermitian()).unwrap();
        prop_assert!(rel_err(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn solve_recovers_known_solution(seed in any::<u64>(), n in 1usize..16, m in 1usize..6) {
        let mut r = rng(seed);
        let v = random_complex(&mut r, n, n + 2, -1.0, 1.0).unwrap();
        let a = gram_plus_ridge(&v, 1.0);
        let x0 = random_complex(&mut r, n, m, -10.0, 10.0).unwrap();
        let b = a.matmul(&x0).unwrap();
        let x = hpd_solve(&a, &b).unwrap();
        prop_assert!(rel_err(&x, &x0) <= 1e-8);
        prop_assert!(rel_err(&a.matmul(&x).unwrap(), &b) <= 1e-8);
    }

    #[test]
    fn cholesky_reconstructs(seed in any::<u64>(), n in 1usize..16, lambda in 1e-3f64..10.0) {
        let v = random_complex(&mut rng(seed), n, n, -3.0, 3.0).unwrap();
        let a = gram_plus_ridge(&v, lambda);
        let l = Cholesky::factor(&a).unwrap();
        let llh = l.factor_matrix().matmul(&l.factor_matrix().hermitian()).unwrap();
        prop_assert!(llh.try_sub(&a).unwrap().frobenius() <= 1e-10 * a.frobenius());
    }

    #[test]
    fn frobenius_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..8, theta in 0.0f64..6.3) {
        let a = random_complex(&mut rng(seed), n, n, -5.0, 5.0).unwrap();
        // Diagonal phases composed with a real plane rotation give a unitary matrix.
        let mut u = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j { Complex64::from_polar(1.0, theta * (i + 1) as f64) } else { Complex64::new(0.0, 0.0) }
        });
        if n >= 2 {
            let (c, s) = (theta.cos(), theta.sin());
            let g = ComplexMatrix::from_fn(n, n, |i, j| match (i, j) {
                (0, 0) | (1, 1) => Complex64::new(c, 0.0),
                (0, 1) => Complex64::new(-s, 0.0),
                (1, 0) => Complex64::new(s, 0.0),
                _ if i == j => Complex64::new(1.0, 0.0),
                _ => Complex64::new(0.0, 0.0),
            });
            u = g.matmul(&u).unwrap();
        }
        let rotated = u.matmul(&a).unwrap().matmul(&u.hermitian()).unwrap();
        prop_assert!((rotated.frobenius() - a.frobenius()).abs() <= 1e-10 * a.frobenius().max(1.0));
    }
}

#[test]
fn not_positive_definite_is_reported() {
    let a = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(if i == j { 1.0 } else { 2.0 }, 0.0));
    assert!(matches!(
        hpd_solve(&a, &ComplexMatrix::identity(2)),
        Err(quatpaint_core::Error::NotPositiveDefinite { .. })
    ));
}
