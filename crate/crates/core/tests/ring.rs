use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sckyber::params::{N, Q};
use sckyber::ring::{exact, inner_product, matvec, matvec_t, Poly, PolyMat, PolyVec};

fn schoolbook(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; N];
    for i in 0..N {
        for j in 0..N {
            let prod = a[i] * b[j];
            if i + j < N {
                out[i + j] += prod;
            } else {
                out[i + j - N] -= prod;
            }
        }
    }
    out
}

fn random_poly(rng: &mut impl Rng) -> Poly {
    let c: Vec<u16> = (0..N).map(|_| rng.gen_range(0..Q as u16)).collect();
    Poly::from_coeffs(&c).unwrap()
}

fn as_i64(p: &Poly) -> Vec<i64> {
    p.coeffs().iter().map(|&c| i64::from(c)).collect()
}

fn reduce(v: &[i64]) -> Vec<u16> {
    v.iter().map(|&x| x.rem_euclid(i64::from(Q)) as u16).collect()
}

#[test]
fn ntt_product_matches_schoolbook() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (a, b) = (random_poly(&mut rng), random_poly(&mut rng));
        let expect = reduce(&schoolbook(&as_i64(&a), &as_i64(&b)));
        assert_eq!(&(&a * &b).coeffs()[..], &expect[..]);
    }
}

#[test]
fn exact_product_matches_schoolbook() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for _ in 0..200 {
        let a: Vec<i64> = (0..N).map(|_| rng.gen_range(-4..=4)).collect();
        let b: Vec<i64> = (0..N).map(|_| rng.gen_range(0..2 * i64::from(Q))).collect();
        assert_eq!(exact::mul(&a, &b).unwrap(), schoolbook(&a, &b));
    }
}

#[test]
fn matrix_products_match_definitions() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let k = 3;
    let rows: Vec<Vec<Poly>> = (0..k).map(|_| (0..k).map(|_| random_poly(&mut rng)).collect()).collect();
    let a = PolyMat::from_rows(rows.clone()).unwrap();
    let r = PolyVec((0..k).map(|_| random_poly(&mut rng)).collect());
    let at_r = matvec_t(&a, &r).unwrap();
    let a_r = matvec(&a, &r).unwrap();
    for i in 0..k {
        let mut col = Poly::zero();
        let mut row = Poly::zero();
        for j in 0..k {
            col = &col + &(&rows[j][i] * &r.0[j]);
            row = &row + &(&rows[i][j] * &r.0[j]);
        }
        assert_eq!(at_r.0[i], col);
        assert_eq!(a_r.0[i], row);
    }
    assert!(inner_product(&r, &PolyVec::zero(k)).unwrap().is_zero());
    assert!(matvec_t(&a, &PolyVec::zero(k + 1)).is_err());
}

fn arb_poly() -> impl Strategy<Value = Poly> {
    proptest::collection::vec(0..Q as u16, N).prop_map(|c| Poly::from_coeffs(&c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn addition_matches_coefficientwise(a in arb_poly(), b in arb_poly()) {
        let sum = &a + &b;
        for i in 0..N {
            prop_assert_eq!(u32::from(sum.coeffs()[i]), (u32::from(a.coeffs()[i]) + u32::from(b.coeffs()[i])) % Q);
        }
    }
}
