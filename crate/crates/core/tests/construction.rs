use std::sync::Arc;

use num_bigint::BigUint;
use sl1d_core::algebra::Algebra;
use sl1d_core::construction::*;
use sl1d_core::gf::FieldTower;
use sl1d_core::params::Params;
use sl1d_core::zeta::CensusFormulas;

fn alg(q: u64, ell: u32) -> Algebra {
    Algebra::new(Arc::new(FieldTower::new(Params::new(q, ell).unwrap()).unwrap()))
}

fn level(q: u64, ell: u32, m: i32) -> LevelReport {
    let a = alg(q, ell);
    let g = build_quotient_group(&a, m + 1, DEFAULT_GROUP_LIMIT).unwrap();
    induce_and_verify(&CaseRegistry::default(), &g).unwrap()
}

#[test]
fn quadratic_level_one() {
    let r = level(3, 2, 1);
    assert!(r.passed(), "{r:?}");
    assert_eq!((r.orbit_count, r.distinct_characters), (4, 8));
}

#[test]
fn quadratic_level_two_quaternion() {
    let r = level(3, 2, 2);
    assert_eq!(r.case, CaseKind::EvenQuaternion);
    assert!(!r.monomial);
    assert!(r.passed(), "{r:?}");
    assert_eq!((r.orbit_count, r.distinct_characters), (2, 8));
}

#[test]
fn quadratic_level_three() {
    let r = level(3, 2, 3);
    assert!(r.passed(), "{r:?}");
    assert_eq!((r.orbit_count, r.distinct_characters), (4, 24));
}

#[test]
fn quadratic_level_four() {
    let r = level(3, 2, 4);
    assert_eq!(r.case, CaseKind::DivisibleBy2ell);
    assert!(r.passed(), "{r:?}");
    assert_eq!((r.orbit_count, r.distinct_characters), (6, 24));
}

#[test]
fn cubic_level_one() {
    let r = level(5, 3, 1);
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.distinct_characters, 4);
}

#[test]
fn class_counts_match_census() {
    let a = alg(3, 2);
    let rows = census_rows(3, 2, 4, Some(&a), DEFAULT_GROUP_LIMIT);
    for row in &rows {
        assert!(row.telescoping_ok);
        assert_eq!(row.class_count_ok, Some(true), "{row:?}");
    }
    let a = alg(5, 3);
    let rows = census_rows(5, 3, 1, Some(&a), DEFAULT_GROUP_LIMIT);
    assert!(rows.iter().all(|r| r.class_count_ok == Some(true)));
}

#[test]
fn abelianization_is_norm_one_residues() {
    let a = alg(3, 2);
    for m in 2..=4 {
        let g = build_quotient_group(&a, m, DEFAULT_GROUP_LIMIT).unwrap();
        assert_eq!(g.abelianization_order(), 4);
    }
}

#[test]
fn datum_rejects_bad_representatives() {
    let a = alg(3, 2);
    let reg = CaseRegistry::default();
    let y = a.nu_pow(-2, 1);
    assert!(matches!(construct_inducing_datum(&reg, &a, 3, &y), Err(ConstructionError::BadRepresentative(_))));
    let scalar = a.scalar(1, 1);
    assert!(matches!(construct_inducing_datum(&reg, &a, 3, &scalar), Err(ConstructionError::BadRepresentative(_))));
}

#[test]
fn datum_predictions() {
    let reg = CaseRegistry::default();
    for (q, ell) in [(3, 2), (5, 2), (5, 3), (7, 3)] {
        let a = alg(q, ell);
        let f = CensusFormulas::new(q, ell);
        for m in 1..=8 {
            let y = default_representative(&a, m, 1);
            let d = construct_inducing_datum(&reg, &a, m, &y).unwrap();
            assert_eq!(d.predicted_degree, f.d(m as u64));
            let inner = match d.case {
                CaseKind::Odd | CaseKind::DivisibleBy2ell => BigUint::from(1u32),
                CaseKind::EvenOddEll => BigUint::from(q).pow((ell - 1) / 2),
                CaseKind::EvenQuaternion => BigUint::from(q),
            };
            assert_eq!(&d.predicted_inertia_index * inner, f.d(m as u64));
            assert_eq!(d.monomial, d.case != CaseKind::EvenQuaternion);
        }
    }
}
