//! Validated parameters `(q, ell)` shared by every layer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while validating the numeric parameters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    /// `q` is not a power of an odd prime.
    #[error("q = {0} is not a power of an odd prime")]
    BadQ(u64),
    /// `ell` is not a prime.
    #[error("ell = {0} is not prime")]
    BadEll(u64),
    /// `ell` equals the characteristic.
    #[error("ell = {ell} equals the residue characteristic p = {p}")]
    EllIsP { ell: u64, p: u64 },
}

/// Residue field size `q = p^f` and algebra degree `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    pub ell: u32,
}

/// Returns true when `n` is prime.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^f` when `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let (mut r, mut f) = (q, 0);
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}

impl Params {
    /// Validates `q` (odd prime power) and `ell` (prime different from `p`).
    pub fn new(q: u64, ell: u32) -> Result<Self, ParamError> {
        let (p, f) = prime_power(q).ok_or(ParamError::BadQ(q))?;
        if p == 2 {
            return Err(ParamError::BadQ(q));
        }
        if !is_prime(ell as u64) {
            return Err(ParamError::BadEll(ell as u64));
        }
        if ell as u64 == p {
            return Err(ParamError::EllIsP { ell: ell as u64, p });
        }
        Ok(Params { p, f, q, ell })
    }

    /// `gcd(q - 1, ell)`, which is 1 or `ell`.
    pub fn iota(&self) -> u64 {
        num_integer::gcd(self.q - 1, self.ell as u64)
    }

    /// `(q^ell - 1) / (q - 1)`.
    pub fn norm_index(&self) -> u64 {
        (self.q.pow(self.ell) - 1) / (self.q - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Params::new(3, 2).is_ok());
        assert_eq!(Params::new(9, 2).unwrap().f, 2);
        assert!(matches!(Params::new(4, 3), Err(ParamError::BadQ(4))));
        assert!(matches!(Params::new(5, 5), Err(ParamError::EllIsP { .. })));
        assert!(matches!(Params::new(3, 4), Err(ParamError::BadEll(4))));
        assert!(matches!(Params::new(6, 2), Err(ParamError::BadQ(6))));
    }

    #[test]
    fn iota_values() {
        assert_eq!(Params::new(5, 3).unwrap().iota(), 1);
        assert_eq!(Params::new(3, 2).unwrap().iota(), 2);
        assert_eq!(Params::new(7, 3).unwrap().iota(), 3);
        assert_eq!(Params::new(3, 5).unwrap().iota(), 1);
    }
}
