use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use sl1d_core::zeta::{evaluate, CensusFormulas, ZetaError};

/// Sums the series in closed form by its period: after level 0, each block of
/// `ell` consecutive terms is the previous block times `q^{(ell-1) - binom(ell,2) s}`.
fn block_oracle(f: &CensusFormulas, s: i64) -> BigRational {
    let ell = f.ell as i64;
    let q = BigRational::from_integer(BigInt::from(f.q));
    let e = (ell - 1) - ell * (ell - 1) / 2 * s;
    let ratio = if e >= 0 { num_traits::pow(q.clone(), e as usize) } else { num_traits::pow(q.recip(), (-e) as usize) };
    let term = |m: u64| {
        let a = BigRational::from_integer(BigInt::from(f.a(m)));
        let d = BigRational::from_integer(BigInt::from(f.d(m)));
        a * num_traits::pow(d.recip(), s as usize)
    };
    let head: BigRational = (1..=f.ell as u64).map(term).sum();
    for m in 1..=f.ell as u64 {
        assert_eq!(term(m + f.ell as u64), term(m) * &ratio);
    }
    term(0) + head / (BigRational::one() - ratio)
}

#[test]
fn frozen_census_values() {
    let f = CensusFormulas::new(3, 2);
    let a: Vec<u64> = (0..7).map(|m| f.a(m).to_u64().unwrap()).collect();
    let d: Vec<u64> = (0..7).map(|m| f.d(m).to_u64().unwrap()).collect();
    assert_eq!(a, [4, 8, 8, 24, 24, 72, 72]);
    assert_eq!(d, [1, 2, 3, 6, 9, 18, 27]);
    let f = CensusFormulas::new(5, 3);
    let a: Vec<u64> = (0..4).map(|m| f.a(m).to_u64().unwrap()).collect();
    let d: Vec<u64> = (0..4).map(|m| f.d(m).to_u64().unwrap()).collect();
    assert_eq!(a, [31, 4, 20, 744]);
    assert_eq!(d, [1, 31, 155, 125]);
    let f = CensusFormulas::new(7, 3);
    assert_eq!((f.a(1), f.d(1)), (BigUint::from(54u32), BigUint::from(19u32)));
}

#[test]
fn closed_form_matches_block_oracle() {
    for (q, ell) in [(3, 2), (5, 2), (5, 3), (7, 3), (3, 5), (11, 5)] {
        let f = CensusFormulas::new(q, ell);
        for s in 2..6 {
            assert_eq!(f.closed_form_exact(s).unwrap(), block_oracle(&f, s), "({q},{ell}) s={s}");
        }
    }
    assert_eq!(CensusFormulas::new(3, 2).closed_form_exact(2).unwrap(), BigRational::new(25.into(), 3.into()));
}

#[test]
fn series_converges_to_closed_form() {
    let f = CensusFormulas::new(3, 2);
    let ev = evaluate(&f, Complex64::new(2.0, 0.0), 200);
    assert!(ev.abs_error.unwrap() <= 1e-12);
    let ev = evaluate(&f, Complex64::new(2.5, 3.0), 300);
    assert!(ev.abs_error.unwrap() <= 1e-10);
    let f = CensusFormulas::new(5, 3);
    let ev = evaluate(&f, Complex64::new(1.0, 0.0), 200);
    assert!(ev.abs_error.unwrap() <= 1e-12);
}

#[test]
fn pole_is_reported() {
    let f = CensusFormulas::new(7, 3);
    let ev = evaluate(&f, Complex64::new(2.0 / 3.0, 0.0), 10);
    assert!(ev.pole_hit && ev.closed_form.is_none());
    assert_eq!(ev.pole, "2/3");
    assert!(matches!(CensusFormulas::new(3, 2).closed_form_exact(1), Err(ZetaError::PoleAt { .. })));
}

#[test]
fn negative_two_is_group_order() {
    for (q, ell) in [(3, 2), (5, 3)] {
        let f = CensusFormulas::new(q, ell);
        for m in 0..10 {
            assert_eq!(f.partial_sum_exact(-2, m), BigRational::from_integer(BigInt::from(f.group_order(m + 1))));
        }
    }
    assert!(CensusFormulas::new(3, 2).partial_sum_exact(0, 0) > BigRational::zero());
}
