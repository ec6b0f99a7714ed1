use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sl1d_core::algebra::{Algebra, Jump, Window};
use sl1d_core::cyclo::{Cyclo, CycloField};
use sl1d_core::duality;
use sl1d_core::gf::FieldTower;
use sl1d_core::groups::ActingGroup;
use sl1d_core::orbits;
use sl1d_core::params::Params;
use sl1d_core::verify::{random_elem, random_traceless};
use sl1d_core::zeta::CensusFormulas;

const PARAMS: [(u64, u32); 5] = [(3, 2), (5, 2), (9, 2), (5, 3), (7, 3)];

fn alg(i: usize) -> Algebra {
    let (q, ell) = PARAMS[i % PARAMS.len()];
    Algebra::new(Arc::new(FieldTower::new(Params::new(q, ell).unwrap()).unwrap()))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(i in 0usize..5, seed: u64, lo in -3i32..2, len in 1i32..6) {
        let a = alg(i);
        let mut r = rng(seed);
        let prec = lo.max(0) + len;
        let x = random_elem(&a, &mut r, lo, prec);
        let y = random_elem(&a, &mut r, 0, prec);
        let z = random_elem(&a, &mut r, 0, prec);
        prop_assert_eq!(a.minus(&a.plus(&x, &y), &y), x.clone());
        prop_assert_eq!(a.plus(&x, &y), a.plus(&y, &x));
        let p = prec + 3;
        let (y, z) = (a.with_prec(&y, p), a.with_prec(&z, p));
        let x = a.with_prec(&x, p);
        let v = p + x.lo().min(0);
        let (l, r) = (a.times(&a.times(&x, &y), &z), a.times(&x, &a.times(&y, &z)));
        prop_assert_eq!(a.with_prec(&l, v), a.with_prec(&r, v));
        prop_assert_eq!(a.times(&x, &a.plus(&y, &z)), a.plus(&a.times(&x, &y), &a.times(&x, &z)));
    }

    #[test]
    fn reduced_norm_multiplicative(i in 0usize..5, seed: u64) {
        let a = alg(i);
        let mut r = rng(seed);
        let x = random_elem(&a, &mut r, 0, 4);
        let y = random_elem(&a, &mut r, 0, 4);
        let (nx, ny, nxy) = (a.nrd(&x), a.nrd(&y), a.nrd(&a.times(&x, &y)));
        prop_assert!(a.is_central(&nx));
        let prod = a.times(&nx, &ny);
        let p = prod.prec().min(nxy.prec());
        prop_assert_eq!(a.with_prec(&prod, p), a.with_prec(&nxy, p));
    }

    #[test]
    fn reduced_trace_symmetric_and_linear(i in 0usize..5, seed: u64) {
        let a = alg(i);
        let mut r = rng(seed);
        let x = random_elem(&a, &mut r, -1, 4);
        let y = random_elem(&a, &mut r, 0, 5);
        let (xp, yp) = (a.with_prec(&x, 5), a.with_prec(&y, 6));
        prop_assert_eq!(a.trd(&a.times(&xp, &yp)), a.trd(&a.times(&yp, &xp)));
        let y4 = a.with_prec(&y, 4);
        prop_assert_eq!(a.trd(&a.plus(&x, &y4)), a.plus(&a.trd(&x), &a.trd(&y4)));
    }

    #[test]
    fn units_invert(i in 0usize..5, seed: u64) {
        let a = alg(i);
        let mut r = rng(seed);
        let x = random_elem(&a, &mut r, 0, 5);
        prop_assume!(!x.coeff(0).is_zero());
        let xi = a.inv(&x).unwrap();
        prop_assert_eq!(a.times(&x, &xi), a.one(5));
    }

    #[test]
    fn jump_is_conjugation_invariant(i in 0usize..5, seed: u64) {
        let a = alg(i);
        let mut r = rng(seed);
        let y = random_elem(&a, &mut r, -2, 3);
        let g = random_elem(&a, &mut r, 0, 6);
        prop_assume!(!g.coeff(0).is_zero());
        let gi = a.inv(&g).unwrap();
        let z = a.with_prec(&a.conj(&g, &gi, &a.with_prec(&y, 6)), 3);
        prop_assert_eq!(a.jump(&z), a.jump(&y));
    }

    #[test]
    fn exp_log_inverse(i in 0usize..5, seed: u64, r0 in 1i32..4) {
        let a = alg(i);
        let mut r = rng(seed);
        let w = Window { r: r0, m: 3 * r0 };
        let x = random_traceless(&a, &mut r, r0, 3 * r0);
        let g = a.texp(&x, w).unwrap();
        prop_assert!(a.is_norm_one(&g));
        prop_assert_eq!(a.tlog(&g, w).unwrap(), x);
    }

    #[test]
    fn pairing_bilinear(i in 0usize..5, seed: u64) {
        let a = alg(i);
        let mut r = rng(seed);
        let (r0, m) = (2, 4);
        let x1 = random_traceless(&a, &mut r, r0, m);
        let x2 = random_traceless(&a, &mut r, r0, m);
        let y = random_traceless(&a, &mut r, -m + 1, -r0 + 1);
        let lhs = duality::pairing(&a, r0, m, &a.plus(&x1, &x2), &y).unwrap();
        let rhs = duality::pairing(&a, r0, m, &x1, &y).unwrap() + duality::pairing(&a, r0, m, &x2, &y).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn orbit_formulas_consistent(i in 0usize..5, seed: u64, m in 1i32..6) {
        let a = alg(i);
        let mut r = rng(seed);
        let y = random_elem(&a, &mut r, -m, 0);
        let Jump::Finite(j) = a.jump(&y) else { return Ok(()) };
        prop_assume!(j < 0);
        let o = orbits::formula_size(&a, &y, 0, ActingGroup::Ounits).unwrap();
        let g = orbits::formula_size(&a, &y, 0, ActingGroup::G).unwrap();
        let g1 = orbits::formula_size(&a, &y, 0, ActingGroup::G1).unwrap();
        let p = a.tower().params();
        if j.rem_euclid(a.ell()) == 0 {
            prop_assert!(o == g && g == g1);
        } else {
            prop_assert_eq!(&g * p.iota(), o.clone());
            prop_assert_eq!(&g1 * p.norm_index(), o.clone());
        }
        let n = BigUint::from(orbits::acting_group_size(&a, &y, 0, ActingGroup::Ounits));
        prop_assert!((&n % &o).is_zero());
    }

    #[test]
    fn census_identities(q_idx in 0usize..6, ell_idx in 0usize..3, m in 0u64..30) {
        let q = [3u64, 5, 7, 9, 11, 25][q_idx];
        let ell = [2u32, 3, 5][ell_idx];
        prop_assume!(q % ell as u64 != 0);
        let f = CensusFormulas::new(q, ell);
        prop_assert!(f.telescoping_check(m));
        prop_assert!(!f.a(m).is_zero());
        if m >= 1 {
            prop_assert!((f.group_order(m + 1) % f.d(m)).is_zero());
        }
    }

    #[test]
    fn exact_zeta_matches_float(q_idx in 0usize..4, ell_idx in 0usize..2, s in 2i64..6) {
        let q = [3u64, 5, 7, 9][q_idx];
        let ell = [2u32, 3][ell_idx];
        let f = CensusFormulas::new(q, ell);
        let e = f.closed_form_exact(s).unwrap().to_f64().unwrap();
        let c = f.closed_form(num_complex::Complex64::new(s as f64, 0.0)).unwrap();
        prop_assert!((e - c.re).abs() <= 1e-10 * e.abs());
        prop_assert!(c.im.abs() <= 1e-10 * e.abs());
    }

    #[test]
    fn cyclotomic_field_ops(n in prop::sample::select(vec![4u32, 6, 12, 15, 20]), ks in prop::collection::vec(0i64..60, 1..5)) {
        let f = CycloField::new(n);
        let x = ks.iter().fold(Cyclo::zero(&f), |acc, &k| acc.add(&Cyclo::root(&f, k)));
        prop_assert_eq!(x.conj().conj(), x.clone());
        if !x.is_zero() {
            prop_assert_eq!(x.mul(&x.inv().unwrap()), Cyclo::one(&f));
        }
        let nx = x.mul(&x.conj());
        prop_assert_eq!(nx.conj(), nx);
    }
}
