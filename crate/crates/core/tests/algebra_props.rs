mod common;

use common::{hamilton_matmul, rand_qmat, rand_quat, rel_err, rng};
use proptest::prelude::*;
use quatpaint_core::quat::{quat_frobenius, quat_mul, INV_F_TOL};
use quatpaint_core::{embed_f, inv_f, Quaternion};

/// 4×4 real left-multiplication matrix of `p`, an independent model of the product.
fn left_matrix(p: Quaternion) -> [[f64; 4]; 4] {
    let Quaternion { w, x, y, z } = p;
    [[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]]
}

fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
    let d = a - b;
    d.norm_sqr().sqrt() <= tol * (1.0 + b.norm_sqr().sqrt())
}

#[test]
fn unit_rules() {
    let (one, i, j, k) = (Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K);
    let minus_one = -one;
    assert_eq!(i * i, minus_one);
    assert_eq!(j * j, minus_one);
    assert_eq!(k * k, minus_one);
    assert_eq!(i * j * k, minus_one);
    assert_eq!(i * j, k);
    assert_eq!(j * k, i);
    assert_eq!(k * i, j);
    assert_eq!(j * i, -k);
    assert_eq!(k * j, -i);
    assert_eq!(i * k, -j);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn product_matches_matrix_model(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (p, q) = (rand_quat(&mut r, 100.0), rand_quat(&mut r, 100.0));
        let l = left_matrix(p);
        let v = [q.w, q.x, q.y, q.z];
        let o: Vec<f64> = l.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        prop_assert!(close(quat_mul(p, q), Quaternion::new(o[0], o[1], o[2], o[3]), 1e-12));
    }

    #[test]
    fn conjugate_gives_squared_norm(seed in any::<u64>()) {
        let q = rand_quat(&mut rng(seed), 50.0);
        let n = q * q.conj();
        prop_assert!(n.w >= 0.0);
        prop_assert!((n.w - q.norm_sqr()).abs() <= 1e-12 * q.norm_sqr().max(1.0));
        prop_assert!(n.x.abs() + n.y.abs() + n.z.abs() <= 1e-12 * q.norm_sqr().max(1.0));
    }

    #[test]
    fn multiplication_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (rand_quat(&mut r, 10.0), rand_quat(&mut r, 10.0), rand_quat(&mut r, 10.0));
        prop_assert!(close((a * b) * c, a * (b * c), 1e-12));
    }

    #[test]
    fn embedding_preserves_products(seed in any::<u64>(), m in 1usize..6, k in 1usize..6, n in 1usize..6) {
        let mut r = rng(seed);
        let p = rand_qmat(&mut r, m, k, 255.0);
        let q = rand_qmat(&mut r, k, n, 255.0);
        let lhs = embed_f(&hamilton_matmul(&p, &q));
        let rhs = embed_f(&p).matmul(&embed_f(&q)).unwrap();
        prop_assert!(rel_err(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn embedding_preserves_sums(seed in any::<u64>(), m in 1usize..8, n in 1usize..8) {
        let mut r = rng(seed);
        let p = rand_qmat(&mut r, m, n, 255.0);
        let q = rand_qmat(&mut r, m, n, 255.0);
        let lhs = embed_f(&p.try_add(&q).unwrap());
        let rhs = embed_f(&p).try_add(&embed_f(&q)).unwrap();
        prop_assert!(rel_err(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn embedding_commutes_with_adjoint(seed in any::<u64>(), m in 1usize..8, n in 1usize..8) {
        let q = rand_qmat(&mut rng(seed), m, n, 255.0);
        let lhs = embed_f(&q.conj_transpose());
        let rhs = embed_f(&q).hermitian();
        prop_assert!(rel_err(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn round_trip_is_exact(seed in any::<u64>(), m in 1usize..10, n in 1usize..10) {
        let q = rand_qmat(&mut rng(seed), m, n, 1e6);
        prop_assert_eq!(inv_f(&embed_f(&q), INV_F_TOL).unwrap(), q.clone());
        prop_assert_eq!(inv_f(&embed_f(&q), 0.0).unwrap(), q);
    }

    #[test]
    fn norm_scales_by_sqrt_two(seed in any::<u64>(), m in 1usize..10, n in 1usize..10) {
        let q = rand_qmat(&mut rng(seed), m, n, 255.0);
        let ratio = embed_f(&q).frobenius() / quat_frobenius(&q);
        prop_assert!((ratio / 2f64.sqrt() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn frobenius_closed_form() {
    let q = quatpaint_core::QuatMatrix::from_fn(1, 1, |_, _| Quaternion::new(1.0, 2.0, 3.0, 4.0));
    assert!((quat_frobenius(&q) - 30f64.sqrt()).abs() < 1e-15);
    assert_eq!(quat_frobenius(&quatpaint_core::QuatMatrix::zeros(3, 2)), 0.0);
}
