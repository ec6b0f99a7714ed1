//! Similarity classes modulo `P^m` and their congruence stabilizers under
//! `O^×`, `G` and `G^1`: closed-form sizes and a brute-force closure oracle.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, DElem, ElementType, Jump};
pub use crate::groups::ActingGroup;
use crate::groups::{self, TooLarge};

/// Default bound on enumerated cosets.
pub const DEFAULT_ORBIT_LIMIT: u128 = 1_000_000;

/// Errors raised by the orbit layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    /// The jump is not below `m`, so the class is a single coset.
    #[error("jump {jump:?} is not below m = {m}; the class is a single coset")]
    JumpNotBelowM { jump: Option<i32>, m: i32 },
    /// The enumeration guard was exceeded.
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Shape of the congruence stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum StabilizerCase {
    WholeGroup,
    CentralizerTimesCongruence,
}

/// Which maximal subfield contains the centralizer of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CentralizerKind {
    UnramifiedField,
    RamifiedField,
}

/// Description of the stabilizer of `y + P^m` under `O^×`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct StabilizerStructure {
    pub case: StabilizerCase,
    /// `None` when `y` is central below `m`.
    pub jump: Option<i32>,
    /// `m - jump` in the product case.
    pub congruence_level: Option<i32>,
    pub centralizer_kind: Option<CentralizerKind>,
}

/// Closed-form and brute-force sizes of one similarity class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport {
    pub acting_group: ActingGroup,
    pub m: i32,
    pub jump: i32,
    pub element_type: ElementType,
    pub formula_size: BigUint,
    pub bruteforce_size: Option<u64>,
    /// Number of `G`-classes inside the `O^×`-class.
    pub splitting_count: Option<u64>,
    /// `|O_G| / |O_{G^1}|` from the formulas.
    pub ratio_g_over_g1: BigUint,
    /// `|O_{O^×}| / |O_{G^1}|` from the formulas.
    pub ratio_ounits_over_g1: BigUint,
}

impl OrbitReport {
    /// JSON form with integers written as decimal strings when they exceed `u64`.
    pub fn to_json(&self) -> Value {
        json!({
            "acting_group": self.acting_group.name(),
            "m": self.m,
            "jump": self.jump,
            "element_type": format!("{:?}", self.element_type),
            "formula_size": big_json(&self.formula_size),
            "bruteforce_size": self.bruteforce_size,
            "splitting_count": self.splitting_count,
            "ratio_g_over_g1": big_json(&self.ratio_g_over_g1),
            "ratio_ounits_over_g1": big_json(&self.ratio_ounits_over_g1),
        })
    }
}

/// A big integer as a JSON number when it fits in `u64`, else as a string.
pub fn big_json(n: &BigUint) -> Value {
    match u64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn jump_below(alg: &Algebra, y: &DElem, m: i32) -> Result<Option<i32>, AlgebraError> {
    let y = alg.with_prec(y, m.min(y.prec()));
    match alg.jump(&y) {
        Jump::Finite(j) => Ok(Some(j)),
        Jump::Central if y.prec() >= m => Ok(None),
        Jump::Central => Err(AlgebraError::UndeterminedAtPrecision),
    }
}

/// Stabilizer of `y + P^m` under `O^×`.
pub fn stabilizer_structure(alg: &Algebra, y: &DElem, m: i32) -> Result<StabilizerStructure, AlgebraError> {
    let jump = jump_below(alg, y, m)?;
    Ok(match jump {
        Some(j) if j < m => StabilizerStructure {
            case: StabilizerCase::CentralizerTimesCongruence,
            jump: Some(j),
            congruence_level: Some(m - j),
            centralizer_kind: Some(if j.rem_euclid(alg.ell()) == 0 {
                CentralizerKind::UnramifiedField
            } else {
                CentralizerKind::RamifiedField
            }),
        },
        _ => StabilizerStructure { case: StabilizerCase::WholeGroup, jump, congruence_level: None, centralizer_kind: None },
    })
}

fn ceil_div(a: i32, b: i32) -> i32 {
    (a + b - 1).div_euclid(b)
}

fn noncentral_jump(alg: &Algebra, y: &DElem, m: i32) -> Result<i32, OrbitError> {
    match jump_below(alg, y, m)? {
        Some(j) if j < m => Ok(j),
        jump => Err(OrbitError::JumpNotBelowM { jump, m }),
    }
}

/// Closed-form size of the class of `y + P^m` under `O^×` for a given jump.
pub fn ounits_size_for_jump(q: u64, ell: u32, j: i32, m: i32) -> BigUint {
    let qb = BigUint::from(q);
    let ell_i = ell as i32;
    let d = m - j;
    if j.rem_euclid(ell_i) == 0 {
        qb.pow((ell_i * (d - ceil_div(d, ell_i))) as u32)
    } else {
        let n = (qb.pow(ell) - 1u32) / (q - 1);
        n * qb.pow(((ell_i - 1) * (d - 1)) as u32)
    }
}

/// Closed-form size of the class of `y + P^m` under `O^×`.
pub fn orbit_size_ounits(alg: &Algebra, y: &DElem, m: i32) -> Result<BigUint, OrbitError> {
    let j = noncentral_jump(alg, y, m)?;
    Ok(ounits_size_for_jump(alg.q(), alg.ell() as u32, j, m))
}

/// Closed-form size of the class under the given group.
pub fn formula_size(alg: &Algebra, y: &DElem, m: i32, acting: ActingGroup) -> Result<BigUint, OrbitError> {
    let j = noncentral_jump(alg, y, m)?;
    let o = ounits_size_for_jump(alg.q(), alg.ell() as u32, j, m);
    if j.rem_euclid(alg.ell()) == 0 {
        return Ok(o);
    }
    let p = alg.tower().params();
    Ok(match acting {
        ActingGroup::Ounits => o,
        ActingGroup::G => o / p.iota(),
        ActingGroup::G1 => o / p.norm_index(),
    })
}

/// Closed-form report for `acting`, optionally cross-checked by brute force.
pub fn orbit_report(
    alg: &Algebra,
    y: &DElem,
    m: i32,
    acting: ActingGroup,
    brute_force: bool,
    limit: u128,
) -> Result<OrbitReport, OrbitError> {
    let j = noncentral_jump(alg, y, m)?;
    let p = alg.tower().params();
    let ramified = j.rem_euclid(alg.ell()) != 0;
    let (r_g, r_o) = if ramified {
        (BigUint::from(p.norm_index() / p.iota()), BigUint::from(p.norm_index()))
    } else {
        (BigUint::one(), BigUint::one())
    };
    let mut report = OrbitReport {
        acting_group: acting,
        m,
        jump: j,
        element_type: if ramified { ElementType::Ramified } else { ElementType::Unramified },
        formula_size: formula_size(alg, y, m, acting)?,
        bruteforce_size: None,
        splitting_count: None,
        ratio_g_over_g1: r_g,
        ratio_ounits_over_g1: r_o,
    };
    if brute_force {
        report.bruteforce_size = Some(brute_force_orbit(alg, y, m, acting, limit)?.len() as u64);
        report.splitting_count = Some(splitting_count(alg, y, m, limit)?);
    }
    Ok(report)
}

/// Closed-form report for the action of `G`.
pub fn orbit_size_g(alg: &Algebra, y: &DElem, m: i32) -> Result<OrbitReport, OrbitError> {
    orbit_report(alg, y, m, ActingGroup::G, false, DEFAULT_ORBIT_LIMIT)
}

fn working_prec(y: &DElem, m: i32) -> i32 {
    (m - y.lo().min(0)).max(1)
}

fn ambient_guard(alg: &Algebra, y: &DElem, m: i32, limit: u128) -> Result<(), TooLarge> {
    let cosets = (alg.tower().size() as u128).checked_pow((m - y.lo().min(m)).max(0) as u32).unwrap_or(u128::MAX);
    if cosets > limit {
        Err(TooLarge { size: cosets, limit })
    } else {
        Ok(())
    }
}

/// The class of `y + P^m` under conjugation, computed by closure under a
/// generating set.
pub fn brute_force_orbit(
    alg: &Algebra,
    y: &DElem,
    m: i32,
    acting: ActingGroup,
    limit: u128,
) -> Result<HashSet<DElem>, OrbitError> {
    let y = alg.with_prec(y, m);
    ambient_guard(alg, &y, m, limit)?;
    let gens = groups::generators(alg, acting, working_prec(&y, m));
    Ok(closure(alg, &y, &gens))
}

fn closure(alg: &Algebra, y: &DElem, gens: &[groups::Generator]) -> HashSet<DElem> {
    let mut seen: HashSet<DElem> = HashSet::new();
    seen.insert(y.clone());
    let mut frontier = vec![y.clone()];
    while !frontier.is_empty() {
        let next: Vec<DElem> = frontier
            .par_iter()
            .flat_map_iter(|z| gens.iter().map(move |g| alg.conj(&g.g, &g.g_inv, z)))
            .collect();
        frontier = next.into_iter().filter(|z| seen.insert(z.clone())).collect();
    }
    seen
}

/// Number of `G`-classes inside the `O^×`-class of `y + P^m`.
pub fn splitting_count(alg: &Algebra, y: &DElem, m: i32, limit: u128) -> Result<u64, OrbitError> {
    let mut rest = brute_force_orbit(alg, y, m, ActingGroup::Ounits, limit)?;
    let y = alg.with_prec(y, m);
    let gens = groups::generators(alg, ActingGroup::G, working_prec(&y, m));
    let mut count = 0;
    while let Some(z) = rest.iter().min().cloned() {
        for w in closure(alg, &z, &gens) {
            rest.remove(&w);
        }
        count += 1;
    }
    Ok(count)
}

/// Every element of the acting group modulo `1 + P^{m - min(lo y, 0)}` that
/// fixes `y + P^m`, by full enumeration.
pub fn brute_force_stabilizer(
    alg: &Algebra,
    y: &DElem,
    m: i32,
    acting: ActingGroup,
    limit: u128,
) -> Result<Vec<DElem>, OrbitError> {
    let y = alg.with_prec(y, m);
    let prec = working_prec(&y, m);
    let all = groups::enumerate(alg, acting, prec, limit)?;
    Ok(all
        .into_par_iter()
        .filter(|g| {
            let gi = alg.inv(g).expect("unit");
            alg.conj(g, &gi, &y) == y
        })
        .collect())
}

/// Size of the acting group modulo the working precision used for `y + P^m`.
pub fn acting_group_size(alg: &Algebra, y: &DElem, m: i32, acting: ActingGroup) -> u128 {
    groups::group_size(alg, acting, working_prec(&alg.with_prec(y, m), m))
}

/// True when the closed form is exactly `bruteforce`.
pub fn agrees(report: &OrbitReport) -> bool {
    match report.bruteforce_size {
        Some(b) => report.formula_size == BigUint::from(b),
        None => !report.formula_size.is_zero(),
    }
}
