use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigUint;
use sl1d_core::algebra::{Algebra, DElem};
use sl1d_core::gf::FieldTower;
use sl1d_core::groups::{self, ActingGroup};
use sl1d_core::orbits::{self, OrbitError, DEFAULT_ORBIT_LIMIT};
use sl1d_core::params::Params;

fn alg(q: u64, ell: u32) -> Algebra {
    Algebra::new(Arc::new(FieldTower::new(Params::new(q, ell).unwrap()).unwrap()))
}

/// The orbit by conjugating with every element of the acting quotient.
fn enumerated_orbit(a: &Algebra, y: &DElem, m: i32, acting: ActingGroup) -> HashSet<DElem> {
    let y = a.with_prec(y, m);
    let prec = m - y.lo().min(0);
    let yp = a.with_prec(&y, prec.max(m));
    groups::enumerate(a, acting, prec.max(1), 1 << 22)
        .unwrap()
        .iter()
        .map(|g| a.with_prec(&a.conj(g, &a.inv(g).unwrap(), &yp), m))
        .collect()
}

#[test]
fn closure_matches_full_enumeration() {
    for (q, ell) in [(3, 2), (5, 2)] {
        let a = alg(q, ell);
        let t = a.tower();
        let gen = t.generator();
        let samples = [
            a.from_terms(&[(-1, gen)], 1),
            a.from_terms(&[(-2, gen), (-1, t.gen_pow(3))], 0),
            a.from_terms(&[(0, gen)], 2),
            a.from_terms(&[(-2, t.gen_pow(q as i64 + 1)), (-1, gen)], 1),
        ];
        for y in &samples {
            for m in [y.lo() + 2, y.prec()] {
                for acting in [ActingGroup::Ounits, ActingGroup::G, ActingGroup::G1] {
                    let Ok(want) = orbits::formula_size(&a, y, m, acting) else { continue };
                    let brute = orbits::brute_force_orbit(&a, y, m, acting, DEFAULT_ORBIT_LIMIT).unwrap();
                    let full = enumerated_orbit(&a, y, m, acting);
                    assert_eq!(brute, full, "{} m={m} {acting:?}", a.display(y));
                    assert_eq!(BigUint::from(full.len()), want, "{} m={m} {acting:?}", a.display(y));
                }
            }
        }
    }
}

#[test]
fn frozen_sizes() {
    let a = alg(3, 2);
    let t = a.tower();
    let nu = a.from_terms(&[(-1, t.generator())], 0);
    assert_eq!(orbits::formula_size(&a, &nu, 0, ActingGroup::Ounits).unwrap(), BigUint::from(4u32));
    assert_eq!(orbits::formula_size(&a, &nu, 0, ActingGroup::G).unwrap(), BigUint::from(2u32));
    assert_eq!(orbits::formula_size(&a, &nu, 0, ActingGroup::G1).unwrap(), BigUint::from(1u32));
    let deep = a.from_terms(&[(-3, t.generator())], 0);
    assert_eq!(orbits::formula_size(&a, &deep, 0, ActingGroup::Ounits).unwrap(), BigUint::from(36u32));
    let a = alg(5, 3);
    let nu = a.from_terms(&[(-1, a.tower().generator())], 0);
    assert_eq!(orbits::formula_size(&a, &nu, 0, ActingGroup::G).unwrap(), BigUint::from(31u32));
}

#[test]
fn orbit_stabilizer_at_small_levels() {
    let a = alg(3, 2);
    for y in [a.from_terms(&[(-1, a.tower().generator())], 1), a.from_terms(&[(0, a.tower().generator())], 2)] {
        for m in [y.lo() + 1, y.lo() + 2] {
            let stab = orbits::brute_force_stabilizer(&a, &y, m, ActingGroup::G, 1 << 20).unwrap();
            let orbit = orbits::brute_force_orbit(&a, &y, m, ActingGroup::G, DEFAULT_ORBIT_LIMIT).unwrap();
            assert_eq!((stab.len() * orbit.len()) as u128, orbits::acting_group_size(&a, &y, m, ActingGroup::G));
        }
    }
}

#[test]
fn central_and_guarded_inputs() {
    let a = alg(3, 2);
    let c = a.scalar(2, 3);
    assert!(matches!(orbits::formula_size(&a, &c, 3, ActingGroup::G), Err(OrbitError::JumpNotBelowM { .. })));
    let y = a.from_terms(&[(-6, a.tower().generator())], 6);
    assert!(matches!(orbits::brute_force_orbit(&a, &y, 6, ActingGroup::G, 1000), Err(OrbitError::TooLarge(_))));
}
