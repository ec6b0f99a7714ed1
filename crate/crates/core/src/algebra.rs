//! Truncated arithmetic in the cyclic division algebra `D = (L, sigma, pi)`.
//!
//! `L = F_{q^ell}((pi))`, `K = F_q((pi))` and `D` is generated over `L` by a
//! uniformiser `nu` with `nu^ell = pi` and `nu^{-1} d nu = sigma(d)`.  Every
//! element is written as `sum_j nu^j t_j` with Teichmüller digits `t_j` in
//! `F_{q^ell}`; in equal characteristic the Teichmüller set is the constant
//! field, so finite sums are exact elements and multiplication follows
//! `(nu^i a)(nu^j b) = nu^{i+j} sigma^j(a) b` without carries.
//!
//! A [`DElem`] is such a finite sum together with a precision `m`: it stands
//! for the class modulo `P^m = nu^m O`.  Digits are stored for exponents
//! `lo..m`, with the leading digit nonzero, so equal classes have equal
//! representations.

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use serde_json::{json, Value};
use smallvec::SmallVec;
use thiserror::Error;

use crate::gf::{FieldTower, Fql};

/// Errors raised by algebra operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// Operands carry different precisions.
    #[error("precision mismatch: {0} vs {1}")]
    PrecisionMismatch(i32, i32),
    /// The element is not a unit of `O`.
    #[error("element is not a unit of the maximal order")]
    NotAUnit,
    /// The requested output precision exceeds what the input supports.
    #[error("requested precision {requested} exceeds the available {available}")]
    InsufficientPrecision { requested: i32, available: i32 },
    /// The quantity is not determined by the stored digits.
    #[error("quantity is undetermined at the stored precision")]
    UndeterminedAtPrecision,
    /// Malformed input.
    #[error("bad input: {0}")]
    BadInput(String),
    /// The element is not unramified of finite jump.
    #[error("element is not unramified")]
    NotUnramified,
    /// The window `(r, m)` violates `1 <= r` and `m <= 3 r`.
    #[error("window ({r}, {m}) is outside the range where the truncated exponential is valid")]
    WindowViolation { r: i32, m: i32 },
}

type Digits = SmallVec<[Fql; 8]>;

/// A class `x + P^prec` represented by its Teichmüller digits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DElem {
    lo: i32,
    prec: i32,
    c: Digits,
}

impl DElem {
    /// Lowest stored exponent; equals `prec` for the zero class.
    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// The precision `m`: the element is known modulo `P^m`.
    pub fn prec(&self) -> i32 {
        self.prec
    }

    /// True for the zero class.
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Digit at exponent `j`, zero outside the stored range.
    #[inline]
    pub fn coeff(&self, j: i32) -> Fql {
        if j < self.lo || j >= self.prec {
            Fql::ZERO
        } else {
            self.c[(j - self.lo) as usize]
        }
    }

    /// Stored digits, starting at exponent `lo`.
    pub fn digits(&self) -> &[Fql] {
        &self.c
    }

    /// Nonzero terms `(exponent, digit)`.
    pub fn terms(&self) -> impl Iterator<Item = (i32, Fql)> + '_ {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_zero())
            .map(move |(k, &t)| (self.lo + k as i32, t))
    }

    /// Byte string identifying the class; used as a deduplication key.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 4 * self.c.len());
        out.extend_from_slice(&self.lo.to_le_bytes());
        out.extend_from_slice(&self.prec.to_le_bytes());
        for t in &self.c {
            out.extend_from_slice(&t.code().to_le_bytes());
        }
        out
    }

    fn from_digits(start: i32, prec: i32, digits: impl IntoIterator<Item = Fql>) -> DElem {
        let mut c: Digits = SmallVec::new();
        let mut lo = start;
        let mut started = false;
        for (k, t) in digits.into_iter().enumerate() {
            let e = start + k as i32;
            if e >= prec {
                break;
            }
            if !started {
                if t.is_zero() {
                    continue;
                }
                started = true;
                lo = e;
            }
            c.push(t);
        }
        if !started {
            return DElem { lo: prec, prec, c };
        }
        c.resize((prec - lo) as usize, Fql::ZERO);
        DElem { lo, prec, c }
    }
}

impl fmt::Debug for DElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DElem(lo={}, prec={}, codes={:?})", self.lo, self.prec, self.c.iter().map(|t| t.code()).collect::<Vec<_>>())
    }
}

/// The jump of an element: the first exponent at which it stops looking central.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Jump {
    /// Least noncentral exponent.
    Finite(i32),
    /// Every stored digit is central.
    Central,
}

/// Coarse type of an element according to its jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ElementType {
    Central,
    Ramified,
    Unramified,
}

/// A window `(r, m)`: classes of elements of `P^r` modulo `P^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub r: i32,
    pub m: i32,
}

/// Context for arithmetic in `D`.
#[derive(Debug, Clone)]
pub struct Algebra {
    tower: Arc<FieldTower>,
    ell: i32,
}

fn ceil_div(a: i32, b: i32) -> i32 {
    a.div_euclid(b) + i32::from(a.rem_euclid(b) != 0)
}

impl Algebra {
    /// Wraps a field tower.
    pub fn new(tower: Arc<FieldTower>) -> Self {
        let ell = tower.ell() as i32;
        Algebra { tower, ell }
    }

    /// The underlying field tower.
    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    /// Shared handle on the tower.
    pub fn tower_arc(&self) -> Arc<FieldTower> {
        Arc::clone(&self.tower)
    }

    /// Degree `ell`.
    pub fn ell(&self) -> i32 {
        self.ell
    }

    /// Residue field size `q`.
    pub fn q(&self) -> u64 {
        self.tower.q()
    }

    // ----- constructors ---------------------------------------------------

    /// The zero class modulo `P^prec`.
    pub fn zero(&self, prec: i32) -> DElem {
        DElem { lo: prec, prec, c: SmallVec::new() }
    }

    /// `nu^j t` modulo `P^prec`.
    pub fn monomial(&self, j: i32, t: Fql, prec: i32) -> DElem {
        DElem::from_digits(j, prec, [t])
    }

    /// The Teichmüller constant `t`.
    pub fn constant(&self, t: Fql, prec: i32) -> DElem {
        self.monomial(0, t, prec)
    }

    /// The integer `c`.
    pub fn scalar(&self, c: i64, prec: i32) -> DElem {
        self.constant(self.tower.from_int(c), prec)
    }

    /// The identity.
    pub fn one(&self, prec: i32) -> DElem {
        self.constant(Fql::ONE, prec)
    }

    /// `nu^j`.
    pub fn nu_pow(&self, j: i32, prec: i32) -> DElem {
        self.monomial(j, Fql::ONE, prec)
    }

    /// Element with digits `digits` starting at exponent `start`, truncated at `prec`.
    pub fn from_digits(&self, start: i32, digits: &[Fql], prec: i32) -> DElem {
        DElem::from_digits(start, prec, digits.iter().copied())
    }

    /// Element from `(exponent, digit)` pairs; repeated exponents are added.
    pub fn from_terms(&self, terms: &[(i32, Fql)], prec: i32) -> DElem {
        let Some(start) = terms.iter().map(|t| t.0).min() else {
            return self.zero(prec);
        };
        if start >= prec {
            return self.zero(prec);
        }
        let mut d = vec![Fql::ZERO; (prec - start) as usize];
        for &(e, t) in terms {
            if e < prec {
                let k = (e - start) as usize;
                d[k] = self.tower.add(d[k], t);
            }
        }
        DElem::from_digits(start, prec, d)
    }

    /// Reinterprets the stored representative at a new precision, truncating
    /// or padding with zero digits.
    pub fn with_prec(&self, x: &DElem, prec: i32) -> DElem {
        DElem::from_digits(x.lo, prec, x.c.iter().copied().chain(std::iter::repeat(Fql::ZERO)).take((prec - x.lo).max(0) as usize))
    }

    /// `nu^k x`, with precision shifted by `k`.
    pub fn shift(&self, x: &DElem, k: i32) -> DElem {
        if x.is_zero() {
            return self.zero(x.prec + k);
        }
        DElem { lo: x.lo + k, prec: x.prec + k, c: x.c.clone() }
    }

    // ----- ring operations ------------------------------------------------

    fn check(&self, a: &DElem, b: &DElem) -> Result<(), AlgebraError> {
        if a.prec != b.prec {
            Err(AlgebraError::PrecisionMismatch(a.prec, b.prec))
        } else {
            Ok(())
        }
    }

    /// Sum of the stored representatives modulo `P^min(prec)`.
    pub fn plus(&self, a: &DElem, b: &DElem) -> DElem {
        let prec = a.prec.min(b.prec);
        let start = a.lo.min(b.lo);
        if start >= prec {
            return self.zero(prec);
        }
        let t = &self.tower;
        DElem::from_digits(start, prec, (start..prec).map(|e| t.add(a.coeff(e), b.coeff(e))))
    }

    /// Difference of the stored representatives modulo `P^min(prec)`.
    pub fn minus(&self, a: &DElem, b: &DElem) -> DElem {
        self.plus(a, &self.neg(b))
    }

    /// Negation.
    pub fn neg(&self, a: &DElem) -> DElem {
        DElem { lo: a.lo, prec: a.prec, c: a.c.iter().map(|&t| self.tower.neg(t)).collect() }
    }

    /// Product of the stored representatives, truncated at `prec`.
    pub fn mul_to(&self, a: &DElem, b: &DElem, prec: i32) -> DElem {
        if a.is_zero() || b.is_zero() {
            return self.zero(prec);
        }
        let start = a.lo + b.lo;
        if start >= prec {
            return self.zero(prec);
        }
        let t = &self.tower;
        let mut r: SmallVec<[Fql; 16]> = SmallVec::from_elem(Fql::ZERO, (prec - start) as usize);
        for (j, &bj) in b.c.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            let ej = b.lo + j as i32;
            for (i, &ai) in a.c.iter().enumerate() {
                let e = a.lo + i as i32 + ej;
                if e >= prec {
                    break;
                }
                if ai.is_zero() {
                    continue;
                }
                let k = (e - start) as usize;
                r[k] = t.add(r[k], t.mul(t.frob(ai, ej as i64), bj));
            }
        }
        DElem::from_digits(start, prec, r)
    }

    /// Product of the stored representatives modulo `P^min(prec)`.
    pub fn times(&self, a: &DElem, b: &DElem) -> DElem {
        self.mul_to(a, b, a.prec.min(b.prec))
    }

    /// Sum; both operands must carry the same precision.
    pub fn add(&self, a: &DElem, b: &DElem) -> Result<DElem, AlgebraError> {
        self.check(a, b)?;
        Ok(self.plus(a, b))
    }

    /// Difference; both operands must carry the same precision.
    pub fn sub(&self, a: &DElem, b: &DElem) -> Result<DElem, AlgebraError> {
        self.check(a, b)?;
        Ok(self.minus(a, b))
    }

    /// Product; both operands must carry the same precision.
    pub fn mul(&self, a: &DElem, b: &DElem) -> Result<DElem, AlgebraError> {
        self.check(a, b)?;
        Ok(self.times(a, b))
    }

    /// Multiplies every digit on the right by the `F_p` scalar `c`.
    pub fn scale(&self, a: &DElem, c: i64) -> DElem {
        let s = self.tower.from_int(c);
        DElem::from_digits(a.lo, a.prec, a.c.iter().map(|&t| self.tower.mul(t, s)))
    }

    /// `x^n` for `n >= 0`, truncated at the precision of `x`.
    pub fn pow(&self, x: &DElem, n: u64) -> DElem {
        let mut r = self.one(x.prec);
        for _ in 0..n {
            r = self.times(&r, x);
        }
        r
    }

    /// Inverse of a unit of `O` modulo `P^prec`.
    pub fn inv(&self, x: &DElem) -> Result<DElem, AlgebraError> {
        if x.lo != 0 || x.is_zero() {
            return Err(AlgebraError::NotAUnit);
        }
        let prec = x.prec;
        let t0 = self.tower.inv(x.c[0]).expect("leading digit is nonzero");
        let mut y = self.constant(t0, prec);
        let one = self.one(prec);
        for _ in 0..64 {
            let e = self.minus(&one, &self.times(x, &y));
            if e.is_zero() {
                return Ok(y);
            }
            y = self.plus(&y, &self.times(&y, &e));
        }
        unreachable!("Newton iteration for the inverse converges quadratically")
    }

    /// Inverse of a nonzero class `x + P^m`, which is determined modulo
    /// `P^{m - 2 lo}`.
    pub fn inv_nonzero(&self, x: &DElem) -> Result<DElem, AlgebraError> {
        if x.is_zero() {
            return Err(AlgebraError::NotAUnit);
        }
        let lo = x.lo;
        let u = self.shift(x, -lo);
        let ui = self.inv(&u)?;
        let out_prec = ui.prec - lo;
        Ok(DElem::from_digits(
            -lo,
            out_prec,
            ui.c.iter().map(|&s| self.tower.frob(s, -(lo as i64))),
        ))
    }

    /// Inverse of the stored representative of `x`, treated as exact, modulo `P^prec`.
    pub fn inv_exact(&self, x: &DElem, prec: i32) -> Result<DElem, AlgebraError> {
        if x.is_zero() {
            return Err(AlgebraError::NotAUnit);
        }
        let padded = self.with_prec(x, (prec + 2 * x.lo).max(x.lo + 1));
        let inv = self.inv_nonzero(&padded)?;
        Ok(self.with_prec(&inv, prec))
    }

    /// `g y g^{-1}` for a unit `g`, modulo `P^{prec(y)}`.
    pub fn conj(&self, g: &DElem, g_inv: &DElem, y: &DElem) -> DElem {
        let prec = y.prec;
        let gy = self.mul_to(g, y, prec + g_inv.prec);
        self.mul_to(&gy, g_inv, prec)
    }

    /// Commutator `[x, y] = x y - y x`.
    pub fn bracket(&self, x: &DElem, y: &DElem) -> DElem {
        self.minus(&self.times(x, y), &self.times(y, x))
    }

    // ----- invariants -----------------------------------------------------

    /// Valuation `lo / ell`, or `None` for the zero class.
    pub fn val(&self, x: &DElem) -> Option<Rational64> {
        (!x.is_zero()).then(|| Rational64::new(x.lo as i64, self.ell as i64))
    }

    /// Reduced trace, a central element with the same precision.
    pub fn trd(&self, x: &DElem) -> DElem {
        if x.is_zero() {
            return x.clone();
        }
        let t = &self.tower;
        DElem::from_digits(
            x.lo,
            x.prec,
            (x.lo..x.prec).map(|e| if e.rem_euclid(self.ell) == 0 { t.trace(x.coeff(e)) } else { Fql::ZERO }),
        )
    }

    /// Central element with `pi`-adic digits `s[k]` at `pi^{k0 + k}`.
    pub fn from_central_series(&self, k0: i32, s: &[Fql], prec: i32) -> DElem {
        let terms: Vec<(i32, Fql)> = s.iter().enumerate().map(|(k, &v)| ((k0 + k as i32) * self.ell, v)).collect();
        self.from_terms(&terms, prec)
    }

    /// `pi`-adic digits at `pi^0, ..., pi^{len-1}` of a central element.
    pub fn central_series(&self, x: &DElem, len: usize) -> Vec<Fql> {
        (0..len as i32).map(|k| x.coeff(k * self.ell)).collect()
    }

    fn series_mul(&self, a: &[Fql], b: &[Fql], len: usize) -> Vec<Fql> {
        let t = &self.tower;
        let mut r = vec![Fql::ZERO; len];
        for (i, &x) in a.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate().take(len - i) {
                r[i + j] = t.add(r[i + j], t.mul(x, y));
            }
        }
        r
    }

    fn series_inv(&self, a: &[Fql], len: usize) -> Vec<Fql> {
        let t = &self.tower;
        let a0i = t.inv(a[0]).expect("unit series");
        let mut r = vec![Fql::ZERO; len];
        for k in 0..len {
            let mut s = if k == 0 { Fql::ONE } else { Fql::ZERO };
            for i in 1..=k {
                s = t.sub(s, t.mul(a.get(i).copied().unwrap_or(Fql::ZERO), r[k - i]));
            }
            r[k] = t.mul(s, a0i);
        }
        r
    }

    /// Reduced norm of a unit as `pi`-adic digits, determined to `ceil(m / ell)` digits.
    fn nrd_unit_series(&self, u: &DElem) -> Vec<Fql> {
        let ell = self.ell as usize;
        let t = &self.tower;
        let c = ceil_div(u.prec, self.ell) as usize;
        let comp: Vec<Vec<Fql>> = (0..ell)
            .map(|i| (0..c).map(|k| u.coeff((k * ell + i) as i32)).collect())
            .collect();
        let entry = |r: usize, j: usize| -> Vec<Fql> {
            if r >= j {
                comp[r - j].iter().map(|&v| t.frob(v, j as i64)).collect()
            } else {
                let src = &comp[r + ell - j];
                let mut s = vec![Fql::ZERO; c];
                for k in 1..c {
                    s[k] = t.frob(src[k - 1], j as i64);
                }
                s
            }
        };
        let mats: Vec<Vec<Vec<Fql>>> = (0..ell).map(|r| (0..ell).map(|j| entry(r, j)).collect()).collect();
        let mut det = vec![Fql::ZERO; c];
        for (perm, sign) in permutations(ell) {
            let mut prod = vec![Fql::ZERO; c];
            prod[0] = Fql::ONE;
            for (j, &r) in perm.iter().enumerate() {
                prod = self.series_mul(&prod, &mats[r][j], c);
            }
            for k in 0..c {
                det[k] = if sign > 0 { t.add(det[k], prod[k]) } else { t.sub(det[k], prod[k]) };
            }
        }
        debug_assert!(det.iter().all(|&v| t.is_in_fq(v)));
        det
    }

    /// Reduced norm, a central element.  For `x` with leading exponent `lo`
    /// the result is determined modulo `pi^{lo + ceil((m - lo)/ell)}`.
    pub fn nrd(&self, x: &DElem) -> DElem {
        if x.is_zero() {
            return self.zero(self.ell * x.prec);
        }
        let lo = x.lo;
        let u = self.shift(x, -lo);
        let mut s = self.nrd_unit_series(&u);
        if (self.ell - 1) * lo % 2 != 0 {
            s = s.into_iter().map(|v| self.tower.neg(v)).collect();
        }
        let c = s.len() as i32;
        self.from_central_series(lo, &s, (lo + c) * self.ell)
    }

    /// Reduced norm modulo `pi^central_prec`.
    pub fn nrd_to(&self, x: &DElem, central_prec: i32) -> Result<DElem, AlgebraError> {
        let n = self.nrd(x);
        let available = n.prec / self.ell;
        if central_prec > available {
            return Err(AlgebraError::InsufficientPrecision { requested: central_prec, available });
        }
        Ok(self.with_prec(&n, central_prec * self.ell))
    }

    /// True for units whose reduced norm is `1` modulo `p^{ceil(m/ell)}`,
    /// that is, for classes of `SL_1(D)` modulo `1 + P^m`.
    pub fn is_norm_one(&self, x: &DElem) -> bool {
        if x.lo != 0 || x.is_zero() {
            return false;
        }
        let s = self.nrd_unit_series(x);
        s[0] == Fql::ONE && s[1..].iter().all(|v| v.is_zero())
    }

    /// True when every stored digit is central.
    pub fn is_central(&self, x: &DElem) -> bool {
        matches!(self.jump(x), Jump::Central)
    }

    /// Least `j` with `t_j` noncentral, treating the stored digits as exact.
    pub fn jump(&self, x: &DElem) -> Jump {
        for (e, t) in x.terms() {
            if e.rem_euclid(self.ell) != 0 || !self.tower.is_in_fq(t) {
                return Jump::Finite(e);
            }
        }
        Jump::Central
    }

    /// The jump, failing when every stored digit is central so that the
    /// value depends on digits beyond the precision.
    pub fn jump_checked(&self, x: &DElem) -> Result<i32, AlgebraError> {
        match self.jump(x) {
            Jump::Finite(j) => Ok(j),
            Jump::Central => Err(AlgebraError::UndeterminedAtPrecision),
        }
    }

    /// Central, ramified (`ell ∤ jump`) or unramified (`ell | jump`).
    pub fn classify(&self, x: &DElem) -> ElementType {
        match self.jump(x) {
            Jump::Central => ElementType::Central,
            Jump::Finite(j) if j.rem_euclid(self.ell) != 0 => ElementType::Ramified,
            Jump::Finite(_) => ElementType::Unramified,
        }
    }

    /// The `ell`-th root in `1 + p` of a central element of `1 + p`.
    pub fn ell_th_root_unit(&self, u: &DElem) -> Result<DElem, AlgebraError> {
        if u.lo != 0 || u.c[0] != Fql::ONE || !self.is_central(u) {
            return Err(AlgebraError::BadInput("expected a central element of 1 + p".into()));
        }
        let len = ceil_div(u.prec, self.ell) as usize;
        let target = self.central_series(u, len);
        let root = self.series_root(&target);
        Ok(self.from_central_series(0, &root, u.prec))
    }

    fn series_root(&self, target: &[Fql]) -> Vec<Fql> {
        let t = &self.tower;
        let len = target.len();
        let inv_ell = t.from_int(t.fp_inverse(self.ell as u32 % t.p()) as i64);
        let mut xi = vec![Fql::ZERO; len];
        xi[0] = Fql::ONE;
        for _ in 0..=len {
            let mut pw = vec![Fql::ZERO; len];
            pw[0] = Fql::ONE;
            for _ in 0..self.ell {
                pw = self.series_mul(&pw, &xi, len);
            }
            for k in 0..len {
                xi[k] = t.sub(xi[k], t.mul(inv_ell, t.sub(pw[k], target[k])));
            }
        }
        xi
    }

    /// Factors a unit as `x = t0 * xi * h` with `t0` Teichmüller, `xi` central
    /// in `1 + p` and `h` of reduced norm one in `1 + P`; returns `(h, t0, xi)`.
    pub fn normalize_to_g1(&self, x: &DElem) -> Result<(DElem, Fql, DElem), AlgebraError> {
        if x.lo != 0 || x.is_zero() {
            return Err(AlgebraError::NotAUnit);
        }
        let prec = x.prec;
        let t0 = x.c[0];
        let g = self.mul_to(&self.constant(self.tower.inv(t0).unwrap(), prec), x, prec);
        let len = ceil_div(prec, self.ell) as usize;
        let n = self.nrd_unit_series(&g);
        let root = self.series_root(&n[..len]);
        let root_inv = self.series_inv(&root, len);
        let xi = self.from_central_series(0, &root, prec);
        let h = self.times(&self.from_central_series(0, &root_inv, prec), &g);
        Ok((h, t0, xi))
    }

    /// Finds `h` of reduced norm one in `1 + P` and `y_L` with digits only at
    /// multiples of `ell` (so `y_L ∈ L`) such that `h y_L h^{-1} = y`.
    pub fn conjugate_unramified_into_l(&self, y: &DElem) -> Result<(DElem, DElem), AlgebraError> {
        let j = match self.jump(y) {
            Jump::Finite(j) if j.rem_euclid(self.ell) == 0 => j,
            _ => return Err(AlgebraError::NotUnramified),
        };
        let t = &self.tower;
        let prec_y = y.prec;
        let central: Vec<(i32, Fql)> = y.terms().filter(|&(e, _)| e < j).collect();
        let cpart = self.from_terms(&central, prec_y);
        let z = self.minus(y, &cpart);
        let u = self.shift(&z, -j);
        let pu = u.prec;
        let work = pu.max(prec_y).max(1);
        let ubar = u.c[0];
        let mut g = self.one(work);
        let mut g_inv = self.one(work);
        for k in 1..pu {
            if k.rem_euclid(self.ell) == 0 {
                continue;
            }
            let cur = self.conj(&g_inv, &g, &u);
            let s = cur.coeff(k);
            if s.is_zero() {
                continue;
            }
            let d = t.sub(t.frob(ubar, k as i64), ubar);
            let a = t.neg(t.div(s, d).expect("sigma^k moves a noncentral residue"));
            let step = self.from_terms(&[(0, Fql::ONE), (k, a)], work);
            g = self.times(&g, &step);
            g_inv = self.inv(&g)?;
        }
        let (h, _, _) = self.normalize_to_g1(&g)?;
        let ul = self.conj(&g_inv, &g, &u);
        debug_assert!(ul.terms().all(|(e, _)| e.rem_euclid(self.ell) == 0));
        let yl = self.plus(&cpart, &self.shift(&ul, j));
        Ok((h, self.with_prec(&yl, prec_y)))
    }

    // ----- truncated exponential and logarithm ----------------------------

    fn check_window(&self, w: Window) -> Result<(), AlgebraError> {
        if w.r < 1 || w.m > 3 * w.r {
            Err(AlgebraError::WindowViolation { r: w.r, m: w.m })
        } else {
            Ok(())
        }
    }

    fn half(&self) -> i64 {
        self.tower.fp_inverse(2) as i64
    }

    /// `1 + X + X^2/2` for `X ∈ P^r` modulo `P^m`, valid when `r <= m <= 3r`.
    pub fn texp(&self, x: &DElem, w: Window) -> Result<DElem, AlgebraError> {
        self.check_window(w)?;
        if x.prec != w.m || x.lo < w.r {
            return Err(AlgebraError::BadInput("element outside the window".into()));
        }
        let sq = self.scale(&self.times(x, x), self.half());
        Ok(self.plus(&self.plus(&self.one(w.m), x), &sq))
    }

    /// `X - X^2/2` where `g = 1 + X` with `X ∈ P^r`, modulo `P^m`.
    pub fn tlog(&self, g: &DElem, w: Window) -> Result<DElem, AlgebraError> {
        self.check_window(w)?;
        let x = self.minus(g, &self.one(g.prec));
        if g.prec != w.m || x.lo < w.r {
            return Err(AlgebraError::BadInput("element outside the window".into()));
        }
        let sq = self.scale(&self.times(&x, &x), self.half());
        Ok(self.minus(&x, &sq))
    }

    /// Checks `log(exp x exp y) = x + y + [x, y]/2` in the window.
    pub fn bch_check(&self, x: &DElem, y: &DElem, w: Window) -> Result<bool, AlgebraError> {
        let prod = self.times(&self.texp(x, w)?, &self.texp(y, w)?);
        let lhs = self.tlog(&prod, w)?;
        let rhs = self.plus(&self.plus(x, y), &self.scale(&self.bracket(x, y), self.half()));
        Ok(lhs == rhs)
    }

    /// Checks `log((exp x, exp y)) = [x, y]` in the window.
    pub fn commutator_check(&self, x: &DElem, y: &DElem, w: Window) -> Result<bool, AlgebraError> {
        let a = self.texp(x, w)?;
        let b = self.texp(y, w)?;
        let c = self.times(&self.times(&a, &b), &self.times(&self.inv(&a)?, &self.inv(&b)?));
        Ok(self.tlog(&c, w)? == self.bracket(x, y))
    }

    // ----- serialisation --------------------------------------------------

    /// JSON form `{"lo": int, "coeffs": [[digits over F_p], ...]}`; the
    /// precision is `lo + len(coeffs)`.
    pub fn to_json(&self, x: &DElem) -> Value {
        let coeffs: Vec<Vec<u32>> = x.c.iter().map(|&t| self.tower.coeffs(t)).collect();
        json!({ "lo": x.lo, "coeffs": coeffs })
    }

    /// Inverse of [`Algebra::to_json`].
    pub fn from_json(&self, v: &Value) -> Result<DElem, AlgebraError> {
        let bad = |s: &str| AlgebraError::BadInput(s.to_string());
        let lo = v.get("lo").and_then(Value::as_i64).ok_or_else(|| bad("missing integer field lo"))? as i32;
        let coeffs = v.get("coeffs").and_then(Value::as_array).ok_or_else(|| bad("missing array field coeffs"))?;
        let mut digits = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let arr = c.as_array().ok_or_else(|| bad("coefficient is not an array"))?;
            let v: Option<Vec<u32>> = arr.iter().map(|d| d.as_u64().map(|d| d as u32)).collect();
            let v = v.ok_or_else(|| bad("coefficient entries must be non-negative integers"))?;
            digits.push(self.tower.from_coeffs(&v).map_err(|e| AlgebraError::BadInput(e.to_string()))?);
        }
        Ok(self.from_digits(lo, &digits, lo + digits.len() as i32))
    }

    /// Human readable form `sum n^j*tK`, where `tK` is the `K`-th power of the
    /// primitive element.
    pub fn display(&self, x: &DElem) -> String {
        if x.is_zero() {
            return format!("0 + O(n^{})", x.prec);
        }
        let mut parts = Vec::new();
        for (e, t) in x.terms() {
            let k = self.tower.log(t).unwrap();
            let coef = format!("t{k}");
            parts.push(match e {
                0 => coef,
                1 => format!("n*{coef}"),
                _ => format!("n^{e}*{coef}"),
            });
        }
        format!("{} + O(n^{})", parts.join(" + "), x.prec)
    }
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i32)>) {
        let n = used.len();
        if prefix.len() == n {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if prefix[i] > prefix[j] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;

    fn alg(q: u64, ell: u32) -> Algebra {
        Algebra::new(Arc::new(FieldTower::new(Params::new(q, ell).unwrap()).unwrap()))
    }

    #[test]
    fn nu_conjugation_is_frobenius() {
        let a = alg(5, 3);
        let t = a.tower().generator();
        let nu = a.nu_pow(1, 6);
        let lhs = a.times(&a.constant(t, 6), &nu);
        let rhs = a.times(&nu, &a.constant(a.tower().frob(t, 1), 6));
        assert_eq!(lhs, rhs);
        assert_eq!(a.pow(&nu, 3), a.nu_pow(3, 6));
    }

    #[test]
    fn nrd_of_nu_for_ell_two() {
        let a = alg(3, 2);
        let n = a.nrd(&a.nu_pow(1, 4));
        assert_eq!(n, a.with_prec(&a.scale(&a.nu_pow(2, 8), -1), n.prec()));
    }

    #[test]
    fn nrd_of_constant_is_field_norm() {
        let a = alg(5, 3);
        for t in a.tower().elements().skip(1).take(30) {
            let n = a.nrd(&a.constant(t, 3));
            assert_eq!(n.coeff(0), a.tower().norm(t));
        }
    }

    #[test]
    fn jump_and_classify() {
        let a = alg(3, 2);
        let t = a.tower();
        let g = t.generator();
        assert_eq!(a.classify(&a.nu_pow(1, 4)), ElementType::Ramified);
        assert_eq!(a.classify(&a.constant(g, 4)), ElementType::Unramified);
        assert_eq!(a.classify(&a.nu_pow(2, 4)), ElementType::Central);
        assert_eq!(a.jump(&a.nu_pow(2, 4)), Jump::Central);
        assert_eq!(a.jump_checked(&a.nu_pow(2, 4)), Err(AlgebraError::UndeterminedAtPrecision));
    }

    #[test]
    fn inverse_and_mismatch() {
        let a = alg(3, 2);
        let g = a.tower().generator();
        let x = a.from_terms(&[(0, g), (1, Fql::ONE), (3, g)], 5);
        let xi = a.inv(&x).unwrap();
        assert_eq!(a.times(&x, &xi), a.one(5));
        assert_eq!(a.times(&xi, &x), a.one(5));
        assert_eq!(a.inv(&a.nu_pow(1, 5)), Err(AlgebraError::NotAUnit));
        assert!(matches!(a.mul(&x, &a.one(4)), Err(AlgebraError::PrecisionMismatch(5, 4))));
    }

    #[test]
    fn inverse_of_nonunit() {
        let a = alg(5, 3);
        let g = a.tower().generator();
        let x = a.from_terms(&[(-2, g), (0, Fql::ONE), (1, g)], 6);
        let xi = a.inv_nonzero(&x).unwrap();
        assert_eq!(xi.lo(), 2);
        let prod = a.mul_to(&x, &xi, 6);
        assert_eq!(prod, a.one(6));
    }

    #[test]
    fn json_round_trip() {
        let a = alg(3, 2);
        let g = a.tower().generator();
        let x = a.from_terms(&[(-1, g), (2, Fql::ONE)], 4);
        let back = a.from_json(&a.to_json(&x)).unwrap();
        assert_eq!(back, x);
        assert!(a.from_json(&json!({"lo": 0, "coeffs": [[1]]})).is_err());
        assert!(a.from_json(&json!({"lo": 0, "coeffs": [[1, 3]]})).is_err());
    }

    #[test]
    fn window_violation() {
        let a = alg(3, 2);
        let x = a.nu_pow(1, 4);
        assert_eq!(a.texp(&x, Window { r: 1, m: 4 }), Err(AlgebraError::WindowViolation { r: 1, m: 4 }));
    }

    #[test]
    fn ell_root() {
        let a = alg(5, 3);
        let u = a.from_terms(&[(0, Fql::ONE), (3, a.tower().from_int(2)), (6, Fql::ONE)], 9);
        let r = a.ell_th_root_unit(&u).unwrap();
        assert_eq!(a.pow(&r, 3), u);
    }
}
