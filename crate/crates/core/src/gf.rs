//! The finite field tower `F_p ⊆ F_q ⊆ F_{q^ell}`.
//!
//! Elements of `F_{q^ell}` are stored by their coordinate vector over `F_p`
//! in the power basis of the chosen modulus, packed into a single integer
//! code `sum c_i p^i`.  Multiplication, inversion, powers and Frobenius go
//! through discrete logarithm tables with respect to a primitive element;
//! addition goes through Zech logarithms.  `F_q` is the subfield fixed by
//! `x -> x^q`, and the explicit embedding of `F_p[y]/(modulus_q)` is kept so
//! that user supplied moduli remain meaningful.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{is_prime, Params};

/// Largest `q^ell` for which a tower is materialised.
pub const MAX_FIELD_SIZE: u64 = 1 << 21;

/// Errors raised by the field tower.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    /// A modulus failed the irreducibility test.
    #[error("modulus {0:?} is not irreducible of the required degree")]
    IrreducibilityFailure(Vec<u64>),
    /// No element satisfies the requested Hilbert 90 equation.
    #[error("u is not of the form x / sigma^k(x)")]
    EmptyFiber,
    /// Malformed input such as a coordinate vector of the wrong length.
    #[error("bad input: {0}")]
    BadInput(String),
    /// The field is too large to tabulate.
    #[error("field of size {0} exceeds the tabulation limit")]
    TooLarge(u64),
    /// No default modulus is stored for this degree.
    #[error("no stored Conway polynomial for p = {p}, degree {n}")]
    NoDefaultModulus { p: u64, n: u32 },
}

/// Conway polynomials, coefficients from the constant term upwards.
const CONWAY: &[(u64, u32, &[u64])] = &[
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (3, 5, &[1, 2, 0, 0, 0, 1]),
    (3, 6, &[2, 2, 1, 0, 2, 0, 1]),
    (3, 10, &[2, 1, 0, 0, 2, 2, 2, 0, 0, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (5, 4, &[2, 4, 4, 0, 1]),
    (5, 5, &[3, 4, 0, 0, 0, 1]),
    (5, 6, &[2, 0, 1, 4, 1, 0, 1]),
    (5, 10, &[2, 1, 4, 2, 3, 3, 0, 0, 0, 0, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (7, 3, &[4, 0, 6, 1]),
    (7, 4, &[3, 4, 5, 0, 1]),
    (7, 5, &[4, 1, 0, 0, 0, 1]),
    (7, 6, &[3, 6, 4, 5, 1, 0, 1]),
    (7, 10, &[3, 3, 2, 1, 4, 1, 1, 0, 0, 0, 1]),
    (11, 1, &[9, 1]),
    (11, 2, &[2, 7, 1]),
    (11, 3, &[9, 2, 0, 1]),
    (11, 4, &[2, 10, 8, 0, 1]),
    (11, 5, &[9, 0, 10, 0, 0, 1]),
    (11, 6, &[2, 7, 6, 4, 3, 0, 1]),
    (11, 10, &[2, 6, 6, 10, 8, 7, 0, 0, 0, 0, 1]),
    (13, 1, &[11, 1]),
    (13, 2, &[2, 12, 1]),
    (13, 3, &[11, 2, 0, 1]),
    (13, 4, &[2, 12, 3, 0, 1]),
    (13, 5, &[11, 4, 0, 0, 0, 1]),
    (13, 6, &[2, 11, 11, 10, 0, 0, 1]),
    (13, 10, &[2, 1, 1, 8, 5, 7, 0, 0, 0, 0, 1]),
];

/// Returns the stored Conway polynomial of degree `n` over `F_p`.
pub fn conway_polynomial(p: u64, n: u32) -> Option<Vec<u64>> {
    CONWAY
        .iter()
        .find(|(pp, nn, _)| *pp == p && *nn == n)
        .map(|(_, _, c)| c.to_vec())
}

/// Dense polynomial arithmetic over `F_p`, coefficients from degree 0 up.
pub mod poly {
    /// Removes trailing zero coefficients.
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1;
        let (mut b, mut e) = (a % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    /// Remainder of `a` modulo the nonzero polynomial `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        trim(&mut a);
        let mut m = m.to_vec();
        trim(&mut m);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while a.len() > dm {
            let top = a.len() - 1;
            let c = a[top] * lead_inv % p;
            if c != 0 {
                for i in 0..=dm {
                    let idx = top - dm + i;
                    a[idx] = (a[idx] + p * p - c * m[i] % p) % p;
                }
            }
            a.pop();
            trim(&mut a);
        }
        a
    }

    /// Product of `a` and `b` reduced modulo `m`.
    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        rem(&r, m, p)
    }

    /// `a^e mod m`.
    pub fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = rem(&[1], m, p);
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        result
    }

    /// `a - b`.
    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut r: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut r);
        r
    }

    /// Greatest common divisor, made monic.
    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(&lead) = a.last() {
            let li = inv_mod(lead, p);
            for c in a.iter_mut() {
                *c = *c * li % p;
            }
        }
        a
    }

    /// Rabin's irreducibility test for a monic polynomial of degree `n >= 1`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let mut f = f.to_vec();
        trim(&mut f);
        if f.len() < 2 || f[f.len() - 1] != 1 {
            return false;
        }
        let n = f.len() - 1;
        let x = vec![0, 1];
        let frob_iter = |k: usize| {
            let mut y = x.clone();
            for _ in 0..k {
                y = powmod(&y, p as u128, &f, p);
            }
            y
        };
        if sub(&frob_iter(n), &rem(&x, &f, p), p) != Vec::<u64>::new() {
            return false;
        }
        for r in 2..=n {
            if n % r == 0 && super::is_prime(r as u64) {
                let g = gcd(&f, &sub(&frob_iter(n / r), &x, p), p);
                if g.len() != 1 {
                    return false;
                }
            }
        }
        true
    }
}

/// An element of `F_{q^ell}`, stored as its packed coordinate code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fql(pub(crate) u32);

impl Fql {
    /// The additive identity.
    pub const ZERO: Fql = Fql(0);
    /// The multiplicative identity.
    pub const ONE: Fql = Fql(1);

    /// Packed coordinate code `sum c_i p^i`.
    pub fn code(self) -> u32 {
        self.0
    }

    /// True for the zero element.
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

const NO_LOG: u32 = u32::MAX;

/// The tower `F_p ⊆ F_q ⊆ F_{q^ell}` with its tables.
#[derive(Debug, Clone)]
pub struct FieldTower {
    params: Params,
    p: u32,
    /// Degree of `F_{q^ell}` over `F_p`.
    deg: u32,
    /// Number of elements of `F_{q^ell}`.
    size: u32,
    modulus_q: Vec<u64>,
    modulus_ql: Vec<u64>,
    /// Image of the class of `y` in `F_p[y]/(modulus_q)`.
    fq_root: Fql,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    /// `q^k mod (size - 1)` for `k < ell`.
    q_pows: Vec<u64>,
    neg_one_log: u32,
    /// Precomputed table of inverses in `F_p`.
    fp_inv: Vec<u32>,
    trace_const: Fql,
}

impl FieldTower {
    /// Builds the tower with the stored Conway polynomials.
    pub fn new(params: Params) -> Result<Self, GfError> {
        Self::with_moduli(params, None, None)
    }

    /// Builds the tower, optionally overriding the moduli of `F_q / F_p` and
    /// of `F_{q^ell} / F_p`.  Both are checked for irreducibility.
    pub fn with_moduli(
        params: Params,
        modulus_q: Option<Vec<u64>>,
        modulus_ql: Option<Vec<u64>>,
    ) -> Result<Self, GfError> {
        let p = params.p;
        let deg = params.f * params.ell;
        let size = params.q.pow(params.ell);
        if size > MAX_FIELD_SIZE {
            return Err(GfError::TooLarge(size));
        }
        let fetch = |given: Option<Vec<u64>>, n: u32| -> Result<Vec<u64>, GfError> {
            let m = match given {
                Some(m) => m.into_iter().map(|c| c % p).collect(),
                None => conway_polynomial(p, n).ok_or(GfError::NoDefaultModulus { p, n })?,
            };
            if m.len() != n as usize + 1 || !poly::is_irreducible(&m, p) {
                return Err(GfError::IrreducibilityFailure(m));
            }
            Ok(m)
        };
        let modulus_q = fetch(modulus_q, params.f)?;
        let modulus_ql = fetch(modulus_ql, deg)?;

        let order = size - 1;
        let prime_factors: Vec<u64> = (2..=order).filter(|d| order % d == 0 && is_prime(*d)).collect();
        let to_code = |v: &[u64]| -> u32 {
            v.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
        };
        let from_code = |mut c: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(deg as usize);
            for _ in 0..deg {
                v.push(c % p);
                c /= p;
            }
            poly::trim(&mut v);
            v
        };
        let x_code = if deg == 1 { (modulus_ql[0] * (p - 1)) % p } else { p };
        let gen = std::iter::once(x_code)
            .chain(1..size)
            .map(from_code)
            .find(|g| {
                prime_factors
                    .iter()
                    .all(|r| poly::powmod(g, (order / r) as u128, &modulus_ql, p) != vec![1])
            })
            .expect("the multiplicative group of a finite field is cyclic");

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![NO_LOG; size as usize];
        let mut cur = vec![1u64];
        for k in 0..order {
            let c = to_code(&cur);
            exp.push(c);
            log[c as usize] = k as u32;
            cur = poly::mulmod(&cur, &gen, &modulus_ql, p);
        }

        let add_codes = |a: u32, b: u32| -> u32 {
            let (mut a, mut b) = (a as u64, b as u64);
            let (mut r, mut w) = (0u64, 1u64);
            for _ in 0..deg {
                r += ((a % p + b % p) % p) * w;
                a /= p;
                b /= p;
                w *= p;
            }
            r as u32
        };
        let zech = (0..order)
            .map(|k| {
                let s = add_codes(1, exp[k as usize]);
                if s == 0 {
                    NO_LOG
                } else {
                    log[s as usize]
                }
            })
            .collect();
        let q_pows = (0..params.ell)
            .map(|k| {
                let mut r = 1u64;
                for _ in 0..k {
                    r = r * (params.q % order) % order;
                }
                r
            })
            .collect();

        let mut fp_inv = vec![0u32; p as usize];
        for a in 1..p {
            fp_inv[a as usize] = (1..p).find(|b| a * b % p == 1).unwrap() as u32;
        }

        let mut tower = FieldTower {
            params,
            p: p as u32,
            deg,
            size: size as u32,
            modulus_q,
            modulus_ql,
            fq_root: Fql::ZERO,
            exp,
            log,
            zech,
            q_pows,
            neg_one_log: (order / 2) as u32,
            fp_inv,
            trace_const: Fql::ONE,
        };
        tower.fq_root = tower.find_fq_root();
        tower.trace_const = tower.find_trace_const();
        Ok(tower)
    }

    fn find_fq_root(&self) -> Fql {
        let m = self.modulus_q.clone();
        let is_conway_pair = conway_polynomial(self.params.p, self.params.f).as_deref() == Some(&m[..])
            && conway_polynomial(self.params.p, self.deg).as_deref() == Some(&self.modulus_ql[..]);
        let eval = |x: Fql| {
            m.iter()
                .rev()
                .fold(Fql::ZERO, |acc, &c| self.add(self.mul(acc, x), self.from_int(c as i64)))
        };
        if is_conway_pair && self.is_primitive_root_x() {
            let k = (self.size as u64 - 1) / (self.params.q - 1);
            let r = self.pow(self.x_elem(), k as i64);
            debug_assert!(eval(r).is_zero());
            return r;
        }
        self.elements().find(|&x| eval(x).is_zero()).expect("F_q embeds in F_{q^ell}")
    }

    fn find_trace_const(&self) -> Fql {
        self.fq_elements()
            .find(|&c| self.trace_to_fp(c) != 0)
            .expect("the trace to F_p is surjective")
    }

    fn x_elem(&self) -> Fql {
        if self.deg == 1 {
            Fql((self.modulus_ql[0] as u32 * (self.p - 1)) % self.p)
        } else {
            Fql(self.p)
        }
    }

    fn is_primitive_root_x(&self) -> bool {
        self.exp.get(1).copied() == Some(self.x_elem().0)
    }

    /// The validated parameters.
    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Residue characteristic.
    pub fn p(&self) -> u32 {
        self.p
    }

    /// `|F_q|`.
    pub fn q(&self) -> u64 {
        self.params.q
    }

    /// Degree `ell`.
    pub fn ell(&self) -> u32 {
        self.params.ell
    }

    /// `|F_{q^ell}|`.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// Dimension of `F_{q^ell}` over `F_p`.
    pub fn degree(&self) -> u32 {
        self.deg
    }

    /// Modulus of `F_q` over `F_p`.
    pub fn modulus_q(&self) -> &[u64] {
        &self.modulus_q
    }

    /// Modulus of `F_{q^ell}` over `F_p`.
    pub fn modulus_ql(&self) -> &[u64] {
        &self.modulus_ql
    }

    /// The primitive element used for the logarithm tables.
    pub fn generator(&self) -> Fql {
        Fql(self.exp[1 % self.exp.len()])
    }

    /// `generator^k` for any integer `k`.
    pub fn gen_pow(&self, k: i64) -> Fql {
        let n = self.exp.len() as i64;
        Fql(self.exp[k.rem_euclid(n) as usize])
    }

    /// Discrete logarithm of a nonzero element.
    pub fn log(&self, x: Fql) -> Option<u32> {
        let l = self.log[x.0 as usize];
        (l != NO_LOG).then_some(l)
    }

    /// All elements in increasing code order.
    pub fn elements(&self) -> impl Iterator<Item = Fql> + '_ {
        (0..self.size).map(Fql)
    }

    /// Elements of the subfield `F_q`, zero first then by logarithm.
    pub fn fq_elements(&self) -> impl Iterator<Item = Fql> + '_ {
        let step = ((self.size as u64 - 1) / (self.params.q - 1)) as i64;
        std::iter::once(Fql::ZERO).chain((0..self.params.q as i64 - 1).map(move |k| self.gen_pow(k * step)))
    }

    /// Image of an integer in `F_p ⊆ F_{q^ell}`.
    pub fn from_int(&self, c: i64) -> Fql {
        Fql(c.rem_euclid(self.p as i64) as u32)
    }

    /// Coordinates over `F_p` in the power basis of the modulus.
    pub fn coeffs(&self, x: Fql) -> Vec<u32> {
        let mut c = x.0;
        (0..self.deg)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }

    /// Element with the given coordinates; each must be reduced mod `p`.
    pub fn from_coeffs(&self, c: &[u32]) -> Result<Fql, GfError> {
        if c.len() != self.deg as usize {
            return Err(GfError::BadInput(format!(
                "expected {} coordinates, got {}",
                self.deg,
                c.len()
            )));
        }
        if let Some(bad) = c.iter().find(|&&d| d >= self.p) {
            return Err(GfError::BadInput(format!("coordinate {bad} is not reduced mod {}", self.p)));
        }
        Ok(Fql(c.iter().rev().fold(0u32, |acc, &d| acc * self.p + d)))
    }

    /// Embeds an element of `F_p[y]/(modulus_q)` given by its coordinates.
    pub fn embed_fq(&self, c: &[u32]) -> Result<Fql, GfError> {
        if c.len() != self.params.f as usize || c.iter().any(|&d| d >= self.p) {
            return Err(GfError::BadInput("bad F_q coordinates".into()));
        }
        Ok(c.iter()
            .rev()
            .fold(Fql::ZERO, |acc, &d| self.add(self.mul(acc, self.fq_root), self.from_int(d as i64))))
    }

    /// Basis `1, x, ..., x^{deg-1}` of `F_{q^ell}` over `F_p`.
    pub fn fp_basis(&self) -> Vec<Fql> {
        (0..self.deg).map(|i| Fql(self.p.pow(i))).collect()
    }

    /// Basis `1, g, ..., g^{ell-1}` of `F_{q^ell}` over `F_q`.
    pub fn fq_basis(&self) -> Vec<Fql> {
        (0..self.params.ell as i64).map(|i| self.gen_pow(i)).collect()
    }

    /// Sum.
    #[inline]
    pub fn add(&self, a: Fql, b: Fql) -> Fql {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let n = self.exp.len() as u32;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let d = if lb >= la { lb - la } else { lb + n - la };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            return Fql::ZERO;
        }
        let s = la + z;
        Fql(self.exp[(if s >= n { s - n } else { s }) as usize])
    }

    /// Additive inverse.
    #[inline]
    pub fn neg(&self, a: Fql) -> Fql {
        if a.0 == 0 {
            return a;
        }
        let n = self.exp.len() as u32;
        let s = self.log[a.0 as usize] + self.neg_one_log;
        Fql(self.exp[(if s >= n { s - n } else { s }) as usize])
    }

    /// Difference.
    #[inline]
    pub fn sub(&self, a: Fql, b: Fql) -> Fql {
        self.add(a, self.neg(b))
    }

    /// Product.
    #[inline]
    pub fn mul(&self, a: Fql, b: Fql) -> Fql {
        if a.0 == 0 || b.0 == 0 {
            return Fql::ZERO;
        }
        let n = self.exp.len() as u32;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fql(self.exp[(if s >= n { s - n } else { s }) as usize])
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: Fql) -> Option<Fql> {
        let l = self.log(a)?;
        let n = self.exp.len() as u32;
        Some(Fql(self.exp[((n - l) % n) as usize]))
    }

    /// Quotient `a / b` for nonzero `b`.
    pub fn div(&self, a: Fql, b: Fql) -> Option<Fql> {
        Some(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for any integer `e` (negative only for nonzero `a`).
    pub fn pow(&self, a: Fql, e: i64) -> Fql {
        if a.0 == 0 {
            return if e == 0 { Fql::ONE } else { Fql::ZERO };
        }
        let n = self.exp.len() as i128;
        let l = self.log[a.0 as usize] as i128;
        Fql(self.exp[((l * e as i128).rem_euclid(n)) as usize])
    }

    /// Inverse in `F_p` of a nonzero residue.
    pub fn fp_inverse(&self, a: u32) -> u32 {
        self.fp_inv[(a % self.p) as usize]
    }

    /// `sigma^k(x) = x^{q^k}` with `sigma` the `q`-Frobenius; `k` may be negative.
    #[inline]
    pub fn frob(&self, x: Fql, k: i64) -> Fql {
        if x.0 == 0 {
            return x;
        }
        let kk = k.rem_euclid(self.params.ell as i64) as usize;
        if kk == 0 {
            return x;
        }
        let n = self.exp.len() as u64;
        let l = self.log[x.0 as usize] as u64;
        Fql(self.exp[(l * self.q_pows[kk] % n) as usize])
    }

    /// `Tr_{F_{q^ell}/F_q}(x) = sum_k sigma^k(x)`.
    pub fn trace(&self, x: Fql) -> Fql {
        (0..self.params.ell as i64).fold(Fql::ZERO, |acc, k| self.add(acc, self.frob(x, k)))
    }

    /// `N_{F_{q^ell}/F_q}(x) = x^{(q^ell-1)/(q-1)}`.
    pub fn norm(&self, x: Fql) -> Fql {
        self.pow(x, ((self.size as u64 - 1) / (self.params.q - 1)) as i64)
    }

    /// True when `x` lies in `F_q`.
    pub fn is_in_fq(&self, x: Fql) -> bool {
        self.frob(x, 1) == x
    }

    /// `Tr_{F_q/F_p}(x)` for `x` in `F_q`, as a residue mod `p`.
    pub fn trace_to_fp(&self, x: Fql) -> u32 {
        let mut acc = Fql::ZERO;
        let mut y = x;
        for _ in 0..self.params.f {
            acc = self.add(acc, y);
            y = self.pow(y, self.p as i64);
        }
        debug_assert!(acc.0 < self.p);
        acc.0
    }

    /// The constant `c ∈ F_q` used by the additive character; `1` unless `p | f`.
    pub fn trace_const(&self) -> Fql {
        self.trace_const
    }

    /// All `x` with `x / sigma^k(x) = u`.  There are `q - 1` of them when
    /// `ell ∤ k` and `N(u) = 1`.
    pub fn hilbert90_fiber(&self, u: Fql, k: i64) -> Result<Vec<Fql>, GfError> {
        let lu = self.log(u).ok_or(GfError::EmptyFiber)? as i128;
        let n = self.exp.len() as i128;
        let kk = k.rem_euclid(self.params.ell as i64) as usize;
        let e = (1 - self.q_pows[kk] as i128).rem_euclid(n);
        let out: Vec<Fql> = (0..n)
            .filter(|l| (l * e - lu).rem_euclid(n) == 0)
            .map(|l| Fql(self.exp[l as usize]))
            .collect();
        if out.is_empty() {
            Err(GfError::EmptyFiber)
        } else {
            Ok(out)
        }
    }

    /// Rank over `F_p` of the bilinear form `(a, b) -> Tr_{F_q/F_p}(Tr(a b))`
    /// on the `F_p` basis; full rank means the trace pairing is non-degenerate.
    pub fn trace_pairing_rank(&self) -> usize {
        let basis = self.fp_basis();
        let mut rows: Vec<Vec<u32>> = basis
            .iter()
            .map(|&a| basis.iter().map(|&b| self.trace_to_fp(self.trace(self.mul(a, b)))).collect())
            .collect();
        fp_rank(&mut rows, self.p)
    }
}

/// Rank of a matrix over `F_p` by Gaussian elimination.
pub fn fp_rank(rows: &mut [Vec<u32>], p: u32) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let pp = p as u64;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = (1..pp).find(|b| rows[rank][col] as u64 * b % pp == 1).unwrap();
        for c in 0..ncols {
            rows[rank][c] = (rows[rank][c] as u64 * inv % pp) as u32;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col] as u64;
                for c in 0..ncols {
                    rows[r][c] = ((rows[r][c] as u64 + pp * pp - f * rows[rank][c] as u64) % pp) as u32;
                }
            }
        }
        rank += 1;
    }
    rank
}
