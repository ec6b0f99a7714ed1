//! Exact arithmetic in the cyclotomic field `Q(zeta_n)`, stored as rational
//! coordinates in the power basis `1, zeta, ..., zeta^{phi(n)-1}`.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The field `Q(zeta_n)` with precomputed reductions of `zeta^k`.
#[derive(Debug)]
pub struct CycloField {
    n: u32,
    deg: usize,
    /// `powers[k]` holds the coordinates of `zeta^k` for `0 <= k < n`.
    powers: Vec<Vec<i64>>,
}

/// An element of `Q(zeta_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    field: Arc<CycloField>,
    c: Vec<BigRational>,
}

impl PartialEq for CycloField {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n
    }
}
impl Eq for CycloField {}
impl std::hash::Hash for CycloField {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.n.hash(h)
    }
}

fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = *b.last().unwrap();
    let mut q = vec![0i64; a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db] / lead;
        q[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] -= c * bj;
        }
    }
    debug_assert!(r.iter().all(|&v| v == 0));
    q
}

/// Coefficients of the `n`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

impl CycloField {
    pub fn new(n: u32) -> Arc<Self> {
        assert!(n >= 1);
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; deg];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            let top = cur[deg - 1];
            let mut next = vec![0i64; deg];
            for i in (1..deg).rev() {
                next[i] = cur[i - 1];
            }
            for i in 0..deg {
                next[i] -= top * phi[i];
            }
            cur = next;
        }
        Arc::new(CycloField { n, deg, powers })
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.deg
    }
}

impl Cyclo {
    pub fn zero(f: &Arc<CycloField>) -> Self {
        Cyclo { field: f.clone(), c: vec![BigRational::zero(); f.deg] }
    }

    pub fn from_int(f: &Arc<CycloField>, v: i64) -> Self {
        let mut z = Cyclo::zero(f);
        z.c[0] = BigRational::from_integer(v.into());
        z
    }

    pub fn one(f: &Arc<CycloField>) -> Self {
        Cyclo::from_int(f, 1)
    }

    /// `zeta^k`.
    pub fn root(f: &Arc<CycloField>, k: i64) -> Self {
        let row = &f.powers[k.rem_euclid(f.n as i64) as usize];
        Cyclo { field: f.clone(), c: row.iter().map(|&v| BigRational::from_integer(v.into())).collect() }
    }

    /// `sum_k counts[k] zeta^k` for an exponent histogram of length `n`.
    pub fn from_histogram(f: &Arc<CycloField>, counts: &[i64]) -> Self {
        let mut acc = vec![0i64; f.deg];
        for (k, &m) in counts.iter().enumerate() {
            if m != 0 {
                for (a, &p) in acc.iter_mut().zip(&f.powers[k % f.n as usize]) {
                    *a += m * p;
                }
            }
        }
        Cyclo { field: f.clone(), c: acc.into_iter().map(|v| BigRational::from_integer(v.into())).collect() }
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// The value as a rational number when it lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.c[1..].iter().all(Zero::is_zero).then(|| self.c[0].clone())
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        Cyclo { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        Cyclo { field: self.field.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        Cyclo { field: self.field.clone(), c: self.c.iter().map(|a| a * r).collect() }
    }

    fn reduce(&self, wide: Vec<BigRational>) -> Cyclo {
        let f = &self.field;
        let mut out = vec![BigRational::zero(); f.deg];
        for (k, v) in wide.into_iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if k < f.deg {
                out[k] += v;
            } else {
                for (o, &p) in out.iter_mut().zip(&f.powers[k % f.n as usize]) {
                    if p != 0 {
                        *o += &v * BigRational::from_integer(p.into());
                    }
                }
            }
        }
        Cyclo { field: f.clone(), c: out }
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        let d = self.field.deg;
        let mut wide = vec![BigRational::zero(); 2 * d];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    wide[i + j] += a * b;
                }
            }
        }
        self.reduce(wide)
    }

    /// The Galois image under `zeta -> zeta^a` for `a` prime to `n`.
    pub fn galois(&self, a: i64) -> Cyclo {
        let n = self.field.n as i64;
        let mut wide = vec![BigRational::zero(); n as usize];
        for (k, v) in self.c.iter().enumerate() {
            if !v.is_zero() {
                wide[(k as i64 * a).rem_euclid(n) as usize] += v;
            }
        }
        self.reduce(wide)
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Cyclo {
        self.galois(-1)
    }

    /// The multiplicative inverse, via the product of the other Galois conjugates.
    pub fn inv(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        let n = self.field.n as i64;
        let mut others = Cyclo::one(&self.field);
        for a in 2..=n.max(2) {
            if a < n && a.gcd(&n) == 1 {
                others = others.mul(&self.galois(a));
            }
        }
        let norm = self.mul(&others).as_rational().expect("the field norm is rational");
        Some(others.scale(&norm.recip()))
    }

    pub fn pow(&self, e: i64) -> Cyclo {
        let base = if e < 0 { self.inv().expect("nonzero base") } else { self.clone() };
        let mut r = Cyclo::one(&self.field);
        for _ in 0..e.unsigned_abs() {
            r = r.mul(&base);
        }
        r
    }

    /// Human-readable form `c0 + c1*z + ...`.
    pub fn display(&self) -> String {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| match k {
                0 => v.to_string(),
                1 => format!("{v}*z"),
                _ => format!("{v}*z^{k}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Square matrices over `Q(zeta_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CMat {
    pub n: usize,
    pub a: Vec<Cyclo>,
}

impl CMat {
    pub fn zero(f: &Arc<CycloField>, n: usize) -> Self {
        CMat { n, a: vec![Cyclo::zero(f); n * n] }
    }

    pub fn identity(f: &Arc<CycloField>, n: usize) -> Self {
        let mut m = CMat::zero(f, n);
        for i in 0..n {
            m.a[i * n + i] = Cyclo::one(f);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Cyclo {
        &self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cyclo) {
        self.a[i * self.n + j] = v;
    }

    pub fn add(&self, o: &CMat) -> CMat {
        CMat { n: self.n, a: self.a.iter().zip(&o.a).map(|(x, y)| x.add(y)).collect() }
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        let n = self.n;
        let f = self.a[0].field().clone();
        let mut r = CMat::zero(&f, n);
        for i in 0..n {
            for k in 0..n {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let y = o.get(k, j);
                    if !y.is_zero() {
                        let v = r.get(i, j).add(&x.mul(y));
                        r.set(i, j, v);
                    }
                }
            }
        }
        r
    }

    pub fn scale(&self, c: &Cyclo) -> CMat {
        CMat { n: self.n, a: self.a.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn pow(&self, e: u64) -> CMat {
        let f = self.a[0].field().clone();
        let mut r = CMat::identity(&f, self.n);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn trace(&self) -> Cyclo {
        let f = self.a[0].field().clone();
        (0..self.n).fold(Cyclo::zero(&f), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Cyclo::is_zero)
    }

    /// The scalar `s` when the matrix is `s I`.
    pub fn as_scalar(&self) -> Option<Cyclo> {
        let s = self.get(0, 0).clone();
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if (i == j && *v != s) || (i != j && !v.is_zero()) {
                    return None;
                }
            }
        }
        Some(s)
    }

    /// Determinant by fraction-free elimination over the field.
    pub fn det(&self) -> Cyclo {
        let n = self.n;
        let f = self.a[0].field().clone();
        let mut m = self.clone();
        let mut det = Cyclo::one(&f);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Cyclo::zero(&f);
            };
            if piv != col {
                for j in 0..n {
                    m.a.swap(piv * n + j, col * n + j);
                }
                det = det.scale(&-BigRational::one());
            }
            let p = m.get(col, col).clone();
            det = det.mul(&p);
            let pinv = p.inv().unwrap();
            for r in col + 1..n {
                let factor = m.get(r, col).mul(&pinv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m.get(r, j).sub(&factor.mul(m.get(col, j)));
                    m.set(r, j, v);
                }
            }
        }
        det
    }
}

/// Bezout coefficients `(u, v)` with `u a + v b = gcd(a, b)`.
pub fn bezout(a: i64, b: i64) -> (i64, i64) {
    let e = a.extended_gcd(&b);
    (e.x, e.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(9), vec![1, 0, 0, 1, 0, 0, 1]);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        let f = CycloField::new(12);
        let s = (0..12).fold(Cyclo::zero(&f), |a, k| a.add(&Cyclo::root(&f, k)));
        assert!(s.is_zero());
        let z = Cyclo::root(&f, 1);
        assert_eq!(z.pow(12), Cyclo::one(&f));
        assert_eq!(z.mul(&z.conj()), Cyclo::one(&f));
    }

    #[test]
    fn inverse() {
        let f = CycloField::new(36);
        let x = Cyclo::root(&f, 1).add(&Cyclo::from_int(&f, 2)).add(&Cyclo::root(&f, 7));
        assert_eq!(x.mul(&x.inv().unwrap()), Cyclo::one(&f));
    }

    #[test]
    fn determinant() {
        let f = CycloField::new(3);
        let mut m = CMat::identity(&f, 2);
        m.set(0, 1, Cyclo::root(&f, 1));
        m.set(1, 0, Cyclo::root(&f, 2));
        assert!(m.det().is_zero());
        assert_eq!(CMat::identity(&f, 3).scale(&Cyclo::from_int(&f, 2)).det(), Cyclo::from_int(&f, 8));
    }
}
