//! Finite quotients of `O^×`, `G = SL_1(D)` and `G^1 = G ∩ (1 + P)` modulo
//! congruence subgroups: generating sets and full enumerations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Algebra, DElem};
use crate::gf::Fql;

/// Which group acts by conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActingGroup {
    /// All units of `O`.
    Ounits,
    /// Units of reduced norm one.
    G,
    /// Units of reduced norm one congruent to 1 modulo `P`.
    G1,
}

impl ActingGroup {
    /// Parses `ounits`, `g` or `g1`.
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ounits" | "o" => Some(ActingGroup::Ounits),
            "g" => Some(ActingGroup::G),
            "g1" => Some(ActingGroup::G1),
            _ => None,
        }
    }

    /// Lower-case name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            ActingGroup::Ounits => "ounits",
            ActingGroup::G => "g",
            ActingGroup::G1 => "g1",
        }
    }
}

/// Enumeration refused because the requested set is larger than the limit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("enumeration of {size} elements exceeds the limit {limit}")]
pub struct TooLarge {
    pub size: u128,
    pub limit: u128,
}

/// Residues `t ∈ F_{q^ell}^×` of norm one, listed as powers of `zeta^{q-1}`.
pub fn norm_one_residues(alg: &Algebra) -> Vec<Fql> {
    let t = alg.tower();
    let n = t.params().norm_index() as i64;
    let q = t.q() as i64;
    (0..n).map(|k| t.gen_pow(k * (q - 1))).collect()
}

/// A generator `g` together with its inverse, both modulo `P^prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub g: DElem,
    pub g_inv: DElem,
}

fn pair(alg: &Algebra, g: DElem) -> Generator {
    let g_inv = alg.inv(&g).expect("generators are units");
    Generator { g, g_inv }
}

/// A generating set of the acting group modulo `1 + P^prec`.
///
/// `O^×` is generated by a primitive residue and the elements `1 + nu^k b`
/// with `b` running over an `F_p`-basis; `G` by `zeta^{q-1}` and the norm-one
/// normalizations of those layer elements; `G^1` by the latter alone.
pub fn generators(alg: &Algebra, acting: ActingGroup, prec: i32) -> Vec<Generator> {
    let t = alg.tower();
    let mut out = Vec::new();
    match acting {
        ActingGroup::Ounits => out.push(pair(alg, alg.constant(t.generator(), prec))),
        ActingGroup::G => {
            let c = t.gen_pow(t.q() as i64 - 1);
            if c != Fql::ONE {
                out.push(pair(alg, alg.constant(c, prec)));
            }
        }
        ActingGroup::G1 => {}
    }
    for k in 1..prec {
        for b in t.fp_basis() {
            let x = alg.from_terms(&[(0, Fql::ONE), (k, b)], prec);
            let g = match acting {
                ActingGroup::Ounits => x,
                _ => alg.normalize_to_g1(&x).expect("unit").0,
            };
            if g != alg.one(prec) {
                out.push(pair(alg, g));
            }
        }
    }
    out
}

/// Number of classes of the acting group modulo `1 + P^prec`.
pub fn group_size(alg: &Algebra, acting: ActingGroup, prec: i32) -> u128 {
    let p = alg.tower().params();
    let ql = (p.q as u128).pow(p.ell);
    let ell = p.ell as i32;
    let layers = |from: i32| -> u128 {
        (from..prec).map(|k| if k % ell == 0 { (p.q as u128).pow(p.ell - 1) } else { ql }).product()
    };
    match acting {
        ActingGroup::Ounits => (ql - 1) * ql.pow((prec - 1).max(0) as u32),
        ActingGroup::G => p.norm_index() as u128 * layers(1),
        ActingGroup::G1 => layers(1),
    }
}

fn candidate_count(alg: &Algebra, residues: usize, prec: i32) -> u128 {
    let size = alg.tower().size() as u128;
    residues as u128 * size.pow((prec - 1).max(0) as u32)
}

/// Every element of the acting group modulo `1 + P^prec`, in a fixed order.
///
/// The limit applies to the number of candidate digit strings inspected.
pub fn enumerate(alg: &Algebra, acting: ActingGroup, prec: i32, limit: u128) -> Result<Vec<DElem>, TooLarge> {
    let t = alg.tower();
    let residues: Vec<Fql> = match acting {
        ActingGroup::Ounits => t.elements().filter(|x| !x.is_zero()).collect(),
        ActingGroup::G => norm_one_residues(alg),
        ActingGroup::G1 => vec![Fql::ONE],
    };
    let size = candidate_count(alg, residues.len(), prec);
    if size > limit {
        return Err(TooLarge { size, limit });
    }
    let all: Vec<Fql> = t.elements().collect();
    let base = all.len() as u128;
    let tail = size / residues.len() as u128;
    let filter_norm = acting != ActingGroup::Ounits;
    let out: Vec<DElem> = (0..size)
        .into_par_iter()
        .filter_map(|idx| {
            let mut rest = idx % tail;
            let mut digits = Vec::with_capacity(prec as usize);
            digits.push(residues[(idx / tail) as usize]);
            for _ in 1..prec {
                digits.push(all[(rest % base) as usize]);
                rest /= base;
            }
            let x = alg.from_digits(0, &digits, prec);
            (!filter_norm || alg.is_norm_one(&x)).then_some(x)
        })
        .collect();
    Ok(out)
}
