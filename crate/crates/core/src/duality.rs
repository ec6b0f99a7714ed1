//! Additive characters, the trace pairing between congruence Lie windows,
//! characters of abelian layers, and the alternating form on the Heisenberg
//! layers `G^r_{2r+1}` with its radical and isotropic completions.

use std::collections::HashSet;
use std::ops::{Add, Neg};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, DElem, Window};
use crate::gf::{fp_rank, Fql};

/// Errors raised by the duality layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualityError {
    #[error("the additive character is only defined on central elements")]
    NotCentral,
    #[error("element does not lie in the window [{lo}, {prec})")]
    WindowMismatch { lo: i32, prec: i32 },
    #[error("window (r = {r}, m = {m}) violates the abelian condition m <= 2r")]
    WindowViolation { r: i32, m: i32 },
    #[error("the alternating form is identically zero on this layer")]
    DegenerateLayer,
    #[error("layer index r = {0} is divisible by ell")]
    BadLayer(i32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A value `exp(2 pi i e / p)` of an additive character, stored as `e mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AddChar {
    pub exponent: u32,
    pub p: u32,
}

impl AddChar {
    pub fn zero(p: u32) -> Self {
        AddChar { exponent: 0, p }
    }

    pub fn is_trivial(self) -> bool {
        self.exponent == 0
    }
}

impl Add for AddChar {
    type Output = AddChar;
    fn add(self, o: AddChar) -> AddChar {
        debug_assert_eq!(self.p, o.p);
        AddChar { exponent: (self.exponent + o.exponent) % self.p, p: self.p }
    }
}

impl Neg for AddChar {
    type Output = AddChar;
    fn neg(self) -> AddChar {
        AddChar { exponent: (self.p - self.exponent) % self.p, p: self.p }
    }
}

/// `Tr_{F_q/F_p}(c * lambda)` as a character value, for `lambda ∈ F_q`.
pub fn psi_residue(alg: &Algebra, lambda: Fql) -> AddChar {
    let t = alg.tower();
    AddChar { exponent: t.trace_to_fp(t.mul(t.trace_const(), lambda)), p: t.p() }
}

/// The base character on the centre: reads the `pi^{-1}` digit.
pub fn psi(alg: &Algebra, x: &DElem) -> Result<AddChar, DualityError> {
    if !alg.is_central(x) {
        return Err(DualityError::NotCentral);
    }
    Ok(psi_residue(alg, x.coeff(-alg.ell())))
}

/// Number of traceless classes in `P^lo / P^prec`.
pub fn window_size(alg: &Algebra, lo: i32, prec: i32) -> u128 {
    let q = alg.q() as u128;
    let ell = alg.ell();
    (lo..prec).map(|e| if e.rem_euclid(ell) == 0 { q.pow(ell as u32 - 1) } else { q.pow(ell as u32) }).product()
}

/// Every traceless class in `P^lo / P^prec`, in a fixed order.
pub fn traceless_window(alg: &Algebra, lo: i32, prec: i32) -> Vec<DElem> {
    let t = alg.tower();
    let all: Vec<Fql> = t.elements().collect();
    let traceless: Vec<Fql> = all.iter().copied().filter(|&x| t.trace(x).is_zero()).collect();
    let mut out = vec![alg.zero(prec)];
    for e in lo..prec {
        let digits = if e.rem_euclid(alg.ell()) == 0 { &traceless } else { &all };
        out = out
            .iter()
            .flat_map(|x| digits.iter().map(move |&d| (x, d)))
            .map(|(x, d)| alg.plus(x, &alg.monomial(e, d, prec)))
            .collect();
    }
    out
}

/// The Lie window of traceless elements of `P^r` modulo `P^m`.
pub fn lie_window(alg: &Algebra, r: i32, m: i32) -> Vec<DElem> {
    traceless_window(alg, r, m)
}

/// The dual window of traceless elements of `P^{-m+1}` modulo `P^{-r+1}`.
pub fn dual_window(alg: &Algebra, r: i32, m: i32) -> Vec<DElem> {
    traceless_window(alg, -m + 1, -r + 1)
}

fn in_window(x: &DElem, lo: i32, prec: i32) -> Result<(), DualityError> {
    if x.prec() != prec || (!x.is_zero() && x.lo() < lo) {
        Err(DualityError::WindowMismatch { lo, prec })
    } else {
        Ok(())
    }
}

/// `Psi(pi^{-1} trd(x y))` for `x` in the window `(r, m)` and `y` in its dual.
pub fn pairing(alg: &Algebra, r: i32, m: i32, x: &DElem, y: &DElem) -> Result<AddChar, DualityError> {
    in_window(x, r, m)?;
    in_window(y, -m + 1, -r + 1)?;
    Ok(pairing_unchecked(alg, x, y))
}

fn pairing_unchecked(alg: &Algebra, x: &DElem, y: &DElem) -> AddChar {
    let xy = alg.mul_to(x, y, 1);
    psi_residue(alg, alg.tower().trace(xy.coeff(0)))
}

/// For nonzero `x` in the window `(r, m)`, the dual element
/// `x^{-1} - trd(x^{-1}) / ell`, which pairs nontrivially with `x`.
pub fn nondegeneracy_witness(alg: &Algebra, r: i32, m: i32, x: &DElem) -> Result<DElem, DualityError> {
    in_window(x, r, m)?;
    let prec = -r + 1;
    let xi = alg.inv_exact(x, prec)?;
    let t = alg.tower();
    let inv_ell = t.fp_inverse(alg.ell() as u32 % t.p()) as i64;
    let y = alg.minus(&xi, &alg.scale(&alg.trd(&xi), inv_ell));
    Ok(alg.with_prec(&y, prec))
}

/// `g ↦ pairing(tlog g, y)` on the abelian layer `G^r_m` (`m <= 2r`).
pub fn phi_y(alg: &Algebra, r: i32, m: i32, y: &DElem, g: &DElem) -> Result<AddChar, DualityError> {
    if m > 2 * r || r < 1 {
        return Err(DualityError::WindowViolation { r, m });
    }
    let x = alg.tlog(g, Window { r, m })?;
    pairing(alg, r, m, &x, y)
}

/// The abelian group layer `G^r_m = texp(lie_window(r, m))`.
pub fn group_layer(alg: &Algebra, r: i32, m: i32) -> Result<Vec<DElem>, DualityError> {
    let w = Window { r, m };
    lie_window(alg, r, m).iter().map(|x| alg.texp(x, w).map_err(Into::into)).collect()
}

/// The character table of `G^r_m` against every dual element, rows indexed
/// by the dual window and columns by the group layer.
pub fn character_table(alg: &Algebra, r: i32, m: i32) -> Result<(Vec<DElem>, Vec<DElem>, Vec<Vec<u32>>), DualityError> {
    if m > 2 * r || r < 1 {
        return Err(DualityError::WindowViolation { r, m });
    }
    let layer = group_layer(alg, r, m)?;
    let logs: Vec<DElem> = layer.iter().map(|g| alg.tlog(g, Window { r, m })).collect::<Result<_, _>>()?;
    let duals = dual_window(alg, r, m);
    let rows = duals
        .par_iter()
        .map(|y| logs.iter().map(|x| pairing_unchecked(alg, x, y).exponent).collect())
        .collect();
    Ok((duals, layer, rows))
}

/// The layer `G^r_{2r+1}` above a character whose top-layer parameter is
/// `y' ∈ F_{q^ell}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeisenbergLayer {
    pub r: i32,
    pub y_residue: Fql,
}

/// Sizes attached to the Heisenberg lift of one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LiftDatum {
    pub r_size: u128,
    pub j_size: u128,
    pub extension_count: u128,
    pub lift_degree: u128,
}

impl HeisenbergLayer {
    pub fn new(alg: &Algebra, r: i32, y_residue: Fql) -> Result<Self, DualityError> {
        if r < 1 || r.rem_euclid(alg.ell()) == 0 {
            return Err(DualityError::BadLayer(r));
        }
        Ok(HeisenbergLayer { r, y_residue })
    }

    /// The layer attached to a dual element with digit `c` at `nu^{-2r}`.
    pub fn from_dual(alg: &Algebra, r: i32, c: Fql) -> Result<Self, DualityError> {
        HeisenbergLayer::new(alg, r, alg.tower().frob(c, 2 * r as i64))
    }

    fn tau(&self, alg: &Algebra, x: Fql, k: i64) -> Fql {
        alg.tower().frob(x, k * self.r as i64)
    }

    /// `Tr((tau^2 x1 tau x2 - tau x1 tau^2 x2) y')`, a value in `F_q`.
    pub fn beta(&self, alg: &Algebra, x1: Fql, x2: Fql) -> Fql {
        let t = alg.tower();
        let a = t.mul(self.tau(alg, x1, 2), self.tau(alg, x2, 1));
        let b = t.mul(self.tau(alg, x1, 1), self.tau(alg, x2, 2));
        t.trace(t.mul(t.sub(a, b), self.y_residue))
    }

    /// `psi(beta(x1, x2))` as a character value.
    pub fn beta_char(&self, alg: &Algebra, x1: Fql, x2: Fql) -> AddChar {
        psi_residue(alg, self.beta(alg, x1, x2))
    }

    /// Rank over `F_p` of the Gram matrix of `Tr_{F_q/F_p} ∘ beta`.
    pub fn gram_rank_fp(&self, alg: &Algebra) -> usize {
        let t = alg.tower();
        let basis = t.fp_basis();
        let mut rows: Vec<Vec<u32>> = basis
            .iter()
            .map(|&a| basis.iter().map(|&b| t.trace_to_fp(self.beta(alg, a, b))).collect())
            .collect();
        fp_rank(&mut rows, t.p())
    }

    /// The radical of `beta`, as the set of its elements.
    pub fn radical(&self, alg: &Algebra) -> Result<Vec<Fql>, DualityError> {
        let t = alg.tower();
        let basis = t.fp_basis();
        let rad: Vec<Fql> =
            t.elements().filter(|&x| basis.iter().all(|&b| self.beta(alg, x, b).is_zero())).collect();
        if rad.len() as u32 == t.size() {
            return Err(DualityError::DegenerateLayer);
        }
        Ok(rad)
    }

    /// The odd-degree description `{x : x / tau^2(x) = y' / tau^{-1}(y')} ∪ {0}`.
    pub fn radical_by_hilbert90(&self, alg: &Algebra) -> Result<Vec<Fql>, DualityError> {
        let t = alg.tower();
        let u = t.div(self.y_residue, self.tau(alg, self.y_residue, -1)).ok_or(DualityError::DegenerateLayer)?;
        let mut out = t.hilbert90_fiber(u, 2 * self.r as i64).map_err(|_| DualityError::DegenerateLayer)?;
        out.push(Fql::ZERO);
        out.sort();
        Ok(out)
    }

    /// A subspace containing the radical whose image modulo the radical is
    /// maximal isotropic, grown greedily over candidates in the given order.
    pub fn isotropic_complete_in_order(
        &self,
        alg: &Algebra,
        candidates: impl IntoIterator<Item = Fql>,
    ) -> Result<Vec<Fql>, DualityError> {
        let t = alg.tower();
        let rad = self.radical(alg)?;
        let q = alg.q() as usize;
        let target = rad.len() * ((t.size() as usize / rad.len()) as f64).sqrt().round() as usize;
        let mut span: HashSet<Fql> = rad.into_iter().collect();
        let mut basis: Vec<Fql> = Vec::new();
        let fq: Vec<Fql> = t.fq_elements().collect();
        for x in candidates {
            if span.len() >= target {
                break;
            }
            if span.contains(&x) || !basis.iter().all(|&b| self.beta(alg, x, b).is_zero()) {
                continue;
            }
            let mut next = HashSet::with_capacity(span.len() * q);
            for &s in &span {
                for &c in &fq {
                    next.insert(t.add(s, t.mul(c, x)));
                }
            }
            span = next;
            basis.push(x);
        }
        debug_assert_eq!(span.len(), target);
        let mut out: Vec<Fql> = span.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// Greedy completion over the field elements in code order.
    pub fn isotropic_complete(&self, alg: &Algebra) -> Result<Vec<Fql>, DualityError> {
        self.isotropic_complete_in_order(alg, alg.tower().elements())
    }

    /// Orders of `R_theta`, `J_theta`, the number of extensions to `R_theta`
    /// and the degree of the lift.
    pub fn lift_data(&self, alg: &Algebra) -> Result<LiftDatum, DualityError> {
        let rad = self.radical(alg)?.len() as u128;
        let j = self.isotropic_complete(alg)?.len() as u128;
        let gamma2 = window_size(alg, self.r + 1, 2 * self.r + 1);
        Ok(LiftDatum {
            r_size: rad * gamma2,
            j_size: j * gamma2,
            extension_count: rad,
            lift_degree: alg.tower().size() as u128 / j,
        })
    }

    /// `log` of the group commutator of `exp(nu^r tau x1)` and `exp(nu^r tau x2)`,
    /// paired with the dual element `nu^{-2r} c`, where `y' = sigma^{2r}(c)`.
    pub fn commutator_pairing(&self, alg: &Algebra, x1: Fql, x2: Fql) -> Result<AddChar, DualityError> {
        let r = self.r;
        let m = 2 * r + 1;
        let w = Window { r, m };
        let lift = |x: Fql| alg.texp(&alg.monomial(r, self.tau(alg, x, 1), m), w);
        let a = lift(x1)?;
        let b = lift(x2)?;
        let c = alg.times(&alg.times(&a, &b), &alg.times(&alg.inv(&a)?, &alg.inv(&b)?));
        let l = alg.tlog(&c, Window { r: 2 * r, m })?;
        let y = alg.monomial(-2 * r, alg.tower().frob(self.y_residue, -2 * r as i64), -r + 1);
        pairing(alg, r, m, &l, &y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;
    use crate::params::Params;
    use std::sync::Arc;

    fn alg(q: u64, ell: u32) -> Algebra {
        Algebra::new(Arc::new(FieldTower::new(Params::new(q, ell).unwrap()).unwrap()))
    }

    #[test]
    fn psi_basics() {
        let a = alg(3, 2);
        assert!(psi(&a, &a.one(4)).unwrap().is_trivial());
        let pinv = a.monomial(-2, Fql::ONE, 2);
        let v = psi(&a, &pinv).unwrap();
        assert!(!v.is_trivial());
        assert!((v + v + v).is_trivial());
        assert!(matches!(psi(&a, &a.nu_pow(1, 3)), Err(DualityError::NotCentral)));
    }

    #[test]
    fn window_sizes() {
        let a = alg(3, 2);
        assert_eq!(lie_window(&a, 2, 4).len(), 27);
        assert_eq!(window_size(&a, 2, 4), 27);
        assert_eq!(dual_window(&a, 2, 4).len(), 27);
    }

    #[test]
    fn beta_alternates() {
        let a = alg(5, 3);
        let t = a.tower();
        let layer = HeisenbergLayer::new(&a, 1, t.gen_pow(7)).unwrap();
        for x in t.elements().take(40) {
            assert!(layer.beta(&a, x, x).is_zero());
        }
    }

    #[test]
    fn layer_rejects_multiples_of_ell() {
        let a = alg(3, 2);
        assert!(matches!(HeisenbergLayer::new(&a, 2, Fql::ONE), Err(DualityError::BadLayer(2))));
    }
}
