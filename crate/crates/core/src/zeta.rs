//! Level census `a_m`, degrees `d_m`, finite group orders and the closed-form
//! representation zeta function, in exact big-integer arithmetic where the
//! values are rational.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

/// Errors raised by zeta evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    /// The denominator of the closed form vanishes.
    #[error("the closed form has a pole at s = {re} + {im}i")]
    PoleAt { re: f64, im: f64 },
}

/// The census formulas for fixed `(q, ell)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CensusFormulas {
    pub q: u64,
    pub ell: u32,
    pub iota: u64,
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

impl CensusFormulas {
    pub fn new(q: u64, ell: u32) -> Self {
        CensusFormulas { q, ell, iota: q.saturating_sub(1).gcd(&(ell as u64)) }
    }

    fn qb(&self) -> BigUint {
        BigUint::from(self.q)
    }

    /// `(q^ell - 1) / (q - 1)`.
    pub fn norm_index(&self) -> BigUint {
        (self.qb().pow(self.ell) - 1u32) / (self.q - 1)
    }

    /// Number of irreducible characters of level `m`.
    pub fn a(&self, m: u64) -> BigUint {
        let ell = self.ell as u64;
        let q = self.qb();
        if m == 0 {
            self.norm_index()
        } else if m % ell != 0 {
            BigUint::from(self.iota * self.iota * (self.q - 1)) * q.pow((m - ceil_div(m, ell)) as u32)
        } else {
            self.norm_index() * (q.pow(self.ell - 1) - 1u32) * q.pow(((ell - 1) * (m / ell - 1)) as u32)
        }
    }

    /// Common degree of the irreducible characters of level `m`.
    pub fn d(&self, m: u64) -> BigUint {
        let ell = self.ell as u64;
        let q = self.qb();
        if m == 0 {
            BigUint::one()
        } else if m % ell != 0 {
            self.norm_index() / self.iota * q.pow(((ell - 1) * (m - 1) / 2) as u32)
        } else {
            q.pow(((ell - 1) * m / 2) as u32)
        }
    }

    /// `|G_r|`, the order of `SL_1(D)` modulo its `r`-th congruence subgroup.
    pub fn group_order(&self, r: u64) -> BigUint {
        assert!(r >= 1, "group_order needs r >= 1");
        let ell = self.ell as u64;
        self.norm_index() * self.qb().pow(((r - 1) * ell + 1 - ceil_div(r, ell)) as u32)
    }

    /// `sum_{k <= m} a_k d_k^2 = |G_{m+1}|` for every `m <= max_m`.
    pub fn telescoping_check(&self, max_m: u64) -> bool {
        self.telescoping_first_failure(max_m).is_none()
    }

    /// The first level at which the sum of squares disagrees with the group order.
    pub fn telescoping_first_failure(&self, max_m: u64) -> Option<u64> {
        let mut acc = BigUint::zero();
        for m in 0..=max_m {
            let d = self.d(m);
            acc += self.a(m) * &d * &d;
            if acc != self.group_order(m + 1) {
                return Some(m);
            }
        }
        None
    }

    /// `(ell - 1) - binom(ell, 2) s`, the exponent of `q` in the denominator.
    pub fn growth_exponent(&self, s: Rational64) -> Rational64 {
        let ell = self.ell as i64;
        Rational64::from_integer(ell - 1) - Rational64::from_integer(ell * (ell - 1) / 2) * s
    }

    /// The real pole `2 / ell`.
    pub fn pole(&self) -> Rational64 {
        let ell = self.ell as i64;
        let e = Rational64::from_integer(ell - 1) / Rational64::from_integer(ell * (ell - 1) / 2);
        debug_assert!(self.growth_exponent(e).is_zero());
        e
    }

    /// Modulus of the per-level term ratio averaged over `ell` consecutive
    /// levels, `q^{((ell-1) - binom(ell,2) Re s) / ell}`.
    pub fn convergence_rate(&self, re_s: f64) -> f64 {
        let ell = self.ell as f64;
        (self.q as f64).powf(((ell - 1.0) - ell * (ell - 1.0) / 2.0 * re_s) / ell)
    }

    fn binom2(&self) -> i64 {
        let ell = self.ell as i64;
        ell * (ell - 1) / 2
    }

    /// The closed form at complex `s`.
    pub fn closed_form(&self, s: Complex64) -> Result<Complex64, ZetaError> {
        let q = self.q as f64;
        let ell = self.ell as i64;
        let lnq = q.ln();
        let qpow = |z: Complex64| (z * lnq).exp();
        let b2 = self.binom2() as f64;
        let denom = Complex64::new(1.0, 0.0) - qpow(Complex64::new((ell - 1) as f64, 0.0) - s * b2);
        if denom.norm() < 1e-12 {
            return Err(ZetaError::PoleAt { re: s.re, im: s.im });
        }
        let n = self.norm_index().to_f64().unwrap();
        let iota = self.iota as f64;
        let first = (Complex64::new(1.0, 0.0) - qpow(-s * b2)) * n;
        let base = n / iota;
        let second_scale = (-s * base.ln()).exp() * (iota * iota * (q - 1.0));
        let half = (ell - 1) as f64 / 2.0;
        let sum: Complex64 = (0..=ell - 2).map(|lam| qpow((Complex64::new(1.0, 0.0) - s * half) * lam as f64)).sum();
        Ok((first + second_scale * sum) / denom)
    }

    /// The closed form at an integer `s`, exactly.
    pub fn closed_form_exact(&self, s: i64) -> Result<BigRational, ZetaError> {
        let q = BigRational::from_integer(BigInt::from(self.q));
        let ell = self.ell as i64;
        let pw = |b: &BigRational, e: i64| -> BigRational {
            if e >= 0 {
                num_traits::pow(b.clone(), e as usize)
            } else {
                num_traits::pow(b.recip(), (-e) as usize)
            }
        };
        let b2 = self.binom2();
        let one = BigRational::one();
        let denom = &one - pw(&q, (ell - 1) - b2 * s);
        if denom.is_zero() {
            return Err(ZetaError::PoleAt { re: s as f64, im: 0.0 });
        }
        let n = BigRational::from_integer(BigInt::from(self.norm_index()));
        let iota = BigRational::from_integer(BigInt::from(self.iota));
        let first = &n * (&one - pw(&q, -b2 * s));
        let base = &n / &iota;
        let qm1 = &q - &one;
        let mut sum = BigRational::zero();
        for lam in 0..=ell - 2 {
            let twice = 2 * lam - lam * (ell - 1) * s;
            debug_assert!(twice % 2 == 0, "(ell - 1) s lambda is even for odd ell and vanishes for ell = 2");
            sum += pw(&q, twice / 2);
        }
        let second = pw(&base, -s) * &iota * &iota * qm1 * sum;
        Ok((first + second) / denom)
    }

    /// `sum_{m <= terms} a_m d_m^{-s}` at complex `s`.
    pub fn partial_sum(&self, s: Complex64, terms: u64) -> Complex64 {
        (0..=terms)
            .map(|m| {
                let a = self.a(m).to_f64().unwrap();
                let ld = log_big(&self.d(m));
                Complex64::new(a, 0.0) * (-s * ld).exp()
            })
            .sum()
    }

    /// `sum_{m <= terms} a_m d_m^{-s}` at an integer `s`, exactly.
    pub fn partial_sum_exact(&self, s: i64, terms: u64) -> BigRational {
        (0..=terms)
            .map(|m| {
                let a = BigRational::from_integer(BigInt::from(self.a(m)));
                let d = BigRational::from_integer(BigInt::from(self.d(m)));
                let dp = if s <= 0 { num_traits::pow(d, (-s) as usize) } else { num_traits::pow(d.recip(), s as usize) };
                a * dp
            })
            .sum()
    }
}

fn log_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        n.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Closed form and partial sum at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaEvaluation {
    pub s: [f64; 2],
    pub terms: u64,
    pub closed_form: Option<[f64; 2]>,
    pub partial_sum: [f64; 2],
    pub abs_error: Option<f64>,
    pub convergence_rate: f64,
    pub pole: String,
    pub pole_hit: bool,
}

/// Evaluates both forms at `s`; a pole is reported rather than raised.
pub fn evaluate(f: &CensusFormulas, s: Complex64, terms: u64) -> ZetaEvaluation {
    let ps = f.partial_sum(s, terms);
    let cf = f.closed_form(s);
    let pole = f.pole();
    ZetaEvaluation {
        s: [s.re, s.im],
        terms,
        closed_form: cf.as_ref().ok().map(|c| [c.re, c.im]),
        partial_sum: [ps.re, ps.im],
        abs_error: cf.as_ref().ok().map(|c| (c - ps).norm()),
        convergence_rate: f.convergence_rate(s.re),
        pole: format!("{}/{}", pole.numer(), pole.denom()),
        pole_hit: cf.is_err(),
    }
}

/// Exact values at an integer `s`; the closed form is omitted at a pole.
pub fn evaluate_exact(f: &CensusFormulas, s: i64, terms: u64) -> (Option<BigRational>, BigRational) {
    (f.closed_form_exact(s).ok(), f.partial_sum_exact(s, terms))
}
