use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sl1d_core::algebra::Algebra;
use sl1d_core::duality::*;
use sl1d_core::gf::{FieldTower, Fql};
use sl1d_core::groups::{self, ActingGroup};
use sl1d_core::params::Params;

fn alg(q: u64, ell: u32) -> Algebra {
    Algebra::new(Arc::new(FieldTower::new(Params::new(q, ell).unwrap()).unwrap()))
}

#[test]
fn pairing_with_zero_is_trivial() {
    let a = alg(3, 2);
    let zero = a.zero(-1);
    for x in lie_window(&a, 2, 4) {
        assert!(pairing(&a, 2, 4, &x, &zero).unwrap().is_trivial());
    }
}

#[test]
fn pairing_rejects_wrong_windows() {
    let a = alg(3, 2);
    let x = a.nu_pow(1, 4);
    let y = a.zero(-1);
    assert!(matches!(pairing(&a, 2, 4, &x, &y), Err(DualityError::WindowMismatch { .. })));
}

#[test]
fn pairing_nondegenerate_with_witness() {
    let a = alg(3, 2);
    for (r, m) in [(1, 2), (2, 3), (2, 4)] {
        let duals = dual_window(&a, r, m);
        for x in lie_window(&a, r, m).into_iter().filter(|x| !x.is_zero()) {
            let w = nondegeneracy_witness(&a, r, m, &x).unwrap();
            assert!(!pairing(&a, r, m, &x, &w).unwrap().is_trivial());
            assert!(duals.iter().any(|y| !pairing(&a, r, m, &x, y).unwrap().is_trivial()));
        }
    }
}

#[test]
fn pairing_ignores_coset_perturbations() {
    let a = alg(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let t = a.tower();
    let all: Vec<Fql> = t.elements().collect();
    let (r, m) = (2, 4);
    let xs = lie_window(&a, r, m);
    let ys = dual_window(&a, r, m);
    for _ in 0..200 {
        let x = &xs[rng.gen_range(0..xs.len())];
        let y = &ys[rng.gen_range(0..ys.len())];
        let base = pairing(&a, r, m, x, y).unwrap();
        let bump = a.from_terms(&[(m, all[rng.gen_range(0..all.len())]), (m + 1, all[rng.gen_range(0..all.len())])], m + 2);
        let x2 = a.with_prec(&a.plus(&a.with_prec(x, m + 2), &bump), m + 2);
        let y2 = a.with_prec(y, 2);
        let lifted = a.mul_to(&x2, &y2, 1);
        let direct = psi_residue(&a, t.trace(lifted.coeff(0)));
        assert_eq!(base, direct);
    }
}

#[test]
fn pairing_is_conjugation_invariant() {
    let a = alg(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (r, m) = (1, 2);
    let g = groups::enumerate(&a, ActingGroup::G, m + m, 1 << 20).unwrap();
    let xs = lie_window(&a, r, m);
    let ys = dual_window(&a, r, m);
    for _ in 0..200 {
        let h = &g[rng.gen_range(0..g.len())];
        let hi = a.inv(h).unwrap();
        let x = &xs[rng.gen_range(0..xs.len())];
        let y = &ys[rng.gen_range(0..ys.len())];
        let cx = a.conj(h, &hi, x);
        let cy = a.conj(h, &hi, y);
        assert_eq!(pairing(&a, r, m, &cx, &cy).unwrap(), pairing(&a, r, m, x, y).unwrap());
    }
}

#[test]
fn abelian_layer_characters_are_distinct_homomorphisms() {
    let a = alg(3, 2);
    let (r, m) = (2, 4);
    let (duals, layer, table) = character_table(&a, r, m).unwrap();
    assert_eq!(duals.len(), 27);
    let distinct: HashSet<&Vec<u32>> = table.iter().collect();
    assert_eq!(distinct.len(), 27);
    for g in &layer {
        assert!(a.is_norm_one(g));
    }
    let index = |x: &sl1d_core::algebra::DElem| layer.iter().position(|g| g == x).unwrap();
    for (row, y) in table.iter().zip(&duals) {
        for (i, g) in layer.iter().enumerate() {
            for (j, h) in layer.iter().enumerate() {
                let k = index(&a.times(g, h));
                assert_eq!(row[k], (row[i] + row[j]) % 3);
            }
            assert_eq!(phi_y(&a, r, m, y, g).unwrap().exponent, row[i]);
        }
    }
    assert!(table[duals.iter().position(|y| y.is_zero()).unwrap()].iter().all(|&e| e == 0));
}

#[test]
fn phi_rejects_non_abelian_windows() {
    let a = alg(3, 2);
    let g = a.one(5);
    let y = a.zero(-1);
    assert!(matches!(phi_y(&a, 2, 5, &y, &g), Err(DualityError::WindowViolation { .. })));
}

#[test]
fn commutator_form_matches_beta() {
    let a = alg(3, 2);
    let t = a.tower();
    let traceless: Vec<Fql> = t.elements().filter(|&x| !x.is_zero() && t.trace(x).is_zero()).collect();
    for &c in &traceless {
        let layer = HeisenbergLayer::from_dual(&a, 1, c).unwrap();
        for x1 in t.elements() {
            for x2 in t.elements() {
                assert_eq!(layer.commutator_pairing(&a, x1, x2).unwrap(), layer.beta_char(&a, x1, x2));
            }
        }
    }
}

#[test]
fn commutator_form_matches_beta_cubic() {
    let a = alg(5, 3);
    let t = a.tower();
    for k in [1, 17, 40] {
        let layer = HeisenbergLayer::from_dual(&a, 1, t.gen_pow(k)).unwrap();
        for x1 in t.elements().step_by(7) {
            for x2 in t.elements().step_by(11) {
                assert_eq!(layer.commutator_pairing(&a, x1, x2).unwrap(), layer.beta_char(&a, x1, x2));
            }
        }
    }
}

#[test]
fn radicals_quadratic() {
    for q in [3, 5] {
        let a = alg(q, 2);
        let t = a.tower();
        for y in t.elements().filter(|&x| !x.is_zero() && t.trace(x).is_zero()) {
            let layer = HeisenbergLayer::new(&a, 1, y).unwrap();
            assert_eq!(layer.radical(&a).unwrap(), vec![Fql::ZERO]);
            assert_eq!(layer.gram_rank_fp(&a), 2 * t.params().f as usize);
            let j = layer.isotropic_complete(&a).unwrap();
            assert_eq!(j.len() as u64, q);
            let d = layer.lift_data(&a).unwrap();
            assert_eq!((d.extension_count, d.lift_degree), (1, q as u128));
        }
    }
}

#[test]
fn radicals_cubic() {
    let a = alg(5, 3);
    let t = a.tower();
    for y in t.elements().filter(|x| !x.is_zero()) {
        let layer = HeisenbergLayer::new(&a, 1, y).unwrap();
        let rad = layer.radical(&a).unwrap();
        assert_eq!(rad.len(), 5);
        assert_eq!(rad, layer.radical_by_hilbert90(&a).unwrap());
        let j = layer.isotropic_complete(&a).unwrap();
        assert_eq!(j.len(), 25);
        for &u in &j {
            for &v in &j {
                assert!(layer.beta(&a, u, v).is_zero());
            }
        }
        let rev = layer.isotropic_complete_in_order(&a, t.elements().collect::<Vec<_>>().into_iter().rev()).unwrap();
        assert_eq!(rev.len(), 25);
        let d = layer.lift_data(&a).unwrap();
        assert_eq!((d.extension_count, d.lift_degree), (5, 5));
    }
}

#[test]
fn degenerate_layer_rejected() {
    let a = alg(3, 2);
    let layer = HeisenbergLayer::new(&a, 1, Fql::ZERO).unwrap();
    assert!(matches!(layer.radical(&a), Err(DualityError::DegenerateLayer)));
    assert!(matches!(layer.lift_data(&a), Err(DualityError::DegenerateLayer)));
}
