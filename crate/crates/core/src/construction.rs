//! Explicit finite quotients `G_M = SL_1(D) / G^M`, their conjugacy classes,
//! and the inducing data for the irreducible characters of each level,
//! verified by exact induction.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, DElem, Window};
use crate::cyclo::{bezout, CMat, Cyclo, CycloField};
use crate::duality::{self, DualityError, HeisenbergLayer};
use crate::gf::Fql;
use crate::groups::{self, ActingGroup};
use crate::orbits::{self, OrbitError};
use crate::zeta::CensusFormulas;

/// Default bound on the order of an explicitly built quotient.
pub const DEFAULT_GROUP_LIMIT: u128 = 100_000;

/// Errors raised by the construction pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("group of order {size} exceeds the limit {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("bad representative: {0}")]
    BadRepresentative(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("no registered case handles level {0}")]
    NoCase(i32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Duality(#[from] DualityError),
}

impl From<groups::TooLarge> for ConstructionError {
    fn from(e: groups::TooLarge) -> Self {
        ConstructionError::TooLarge { size: e.size, limit: e.limit }
    }
}

fn fail(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::VerificationFailed(msg.into())
}

// ----- the finite group ---------------------------------------------------

/// Conjugacy classes as index lists, with the class of every element.
#[derive(Debug, Clone)]
pub struct ClassPartition {
    pub classes: Vec<Vec<u32>>,
    pub class_of: Vec<u32>,
}

/// The finite group `G_M` of norm-one units modulo `1 + P^M`.
#[derive(Debug)]
pub struct QuotientGroup {
    alg: Algebra,
    level: i32,
    elements: Vec<DElem>,
    index: HashMap<DElem, u32>,
    inverses: Vec<u32>,
    generators: Vec<u32>,
    classes: OnceLock<ClassPartition>,
}

/// Builds `G_M`, refusing when its order exceeds `limit`.
pub fn build_quotient_group(alg: &Algebra, m: i32, limit: u128) -> Result<QuotientGroup, ConstructionError> {
    if m < 1 {
        return Err(ConstructionError::BadRepresentative(format!("quotient level {m} must be positive")));
    }
    let order = groups::group_size(alg, ActingGroup::G, m);
    if order > limit {
        return Err(ConstructionError::TooLarge { size: order, limit });
    }
    let elements = groups::enumerate(alg, ActingGroup::G, m, limit.saturating_mul(64))?;
    let index: HashMap<DElem, u32> = elements.iter().enumerate().map(|(i, x)| (x.clone(), i as u32)).collect();
    let inverses = elements
        .par_iter()
        .map(|x| index[&alg.inv(x).expect("unit")])
        .collect();
    let generators = groups::generators(alg, ActingGroup::G, m).iter().map(|g| index[&g.g]).collect();
    Ok(QuotientGroup { alg: alg.clone(), level: m, elements, index, inverses, generators, classes: OnceLock::new() })
}

impl QuotientGroup {
    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    /// The `M` in `G_M`.
    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[DElem] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &DElem {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, x: &DElem) -> Option<u32> {
        self.index.get(x).copied()
    }

    pub fn identity(&self) -> u32 {
        self.index[&self.alg.one(self.level)]
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.alg.times(&self.elements[a as usize], &self.elements[b as usize]);
        *self.index.get(&p).expect("the quotient is closed under multiplication")
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    /// `g x g^{-1}`.
    pub fn conj(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Elements of `G^r_M`, those congruent to 1 modulo `P^r`.
    pub fn congruence_subgroup(&self, r: i32) -> Vec<u32> {
        let one = self.alg.one(self.level);
        (0..self.order() as u32)
            .filter(|&i| {
                let d = self.alg.minus(&self.elements[i as usize], &one);
                d.is_zero() || d.lo() >= r
            })
            .collect()
    }

    /// Closure, identity and inverse checks on the generating set.
    pub fn check_axioms(&self) -> bool {
        let e = self.identity();
        (0..self.order() as u32).all(|i| {
            self.mul(i, e) == i && self.mul(i, self.inv(i)) == e && self.generators.iter().all(|&g| self.index.contains_key(&self.alg.times(&self.elements[i as usize], &self.elements[g as usize])))
        })
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|&a| self.generators.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The conjugacy class partition, computed on first use.
    pub fn classes(&self) -> &ClassPartition {
        self.classes.get_or_init(|| {
            let n = self.order();
            let mut class_of = vec![u32::MAX; n];
            let mut classes = Vec::new();
            for start in 0..n as u32 {
                if class_of[start as usize] != u32::MAX {
                    continue;
                }
                let id = classes.len() as u32;
                let mut members = vec![start];
                class_of[start as usize] = id;
                let mut queue = VecDeque::from([start]);
                while let Some(x) = queue.pop_front() {
                    for &g in &self.generators {
                        let y = self.conj(g, x);
                        if class_of[y as usize] == u32::MAX {
                            class_of[y as usize] = id;
                            members.push(y);
                            queue.push_back(y);
                        }
                    }
                }
                members.sort_unstable();
                classes.push(members);
            }
            ClassPartition { classes, class_of }
        })
    }

    pub fn conjugacy_class_count(&self) -> usize {
        self.classes().classes.len()
    }

    /// The subgroup generated by `gens`.
    pub fn subgroup_closure(&self, gens: &[u32]) -> Vec<u32> {
        let e = self.identity();
        let mut seen: HashSet<u32> = HashSet::from([e]);
        let mut queue = VecDeque::from([e]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<u32> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Order of the commutator subgroup, generated by `[g, h]` for `g` a
    /// generator and `h` arbitrary.
    pub fn commutator_subgroup_order(&self) -> usize {
        let mut span: HashSet<u32> = HashSet::from([self.identity()]);
        let mut gens: Vec<u32> = Vec::new();
        for &g in &self.generators {
            for h in 0..self.order() as u32 {
                let c = self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)));
                if !span.contains(&c) {
                    gens.push(c);
                    span = self.subgroup_closure(&gens).into_iter().collect();
                }
            }
        }
        span.len()
    }

    /// `|G_M / [G_M, G_M]|`.
    pub fn abelianization_order(&self) -> usize {
        self.order() / self.commutator_subgroup_order()
    }
}

// ----- characters of abelian subgroups --------------------------------------

/// Every homomorphism from the abelian subgroup `sub` into `Z/n`, each given as
/// a map from element index to exponent.
pub fn abelian_characters(g: &QuotientGroup, sub: &[u32], n: u32) -> Vec<HashMap<u32, u32>> {
    let mut gens: Vec<u32> = Vec::new();
    let mut span: HashSet<u32> = HashSet::from([g.identity()]);
    for &x in sub {
        if !span.contains(&x) {
            gens.push(x);
            span = g.subgroup_closure(&gens).into_iter().collect();
        }
    }
    let orders: Vec<u32> = gens
        .iter()
        .map(|&x| {
            let mut k = 1;
            let mut y = x;
            while y != g.identity() {
                y = g.mul(y, x);
                k += 1;
            }
            k
        })
        .collect();
    let mut out = Vec::new();
    let total: u64 = orders.iter().map(|&o| o as u64).product();
    for code in 0..total {
        let mut rest = code;
        let mut vals = Vec::with_capacity(gens.len());
        let mut ok = true;
        for &o in &orders {
            let k = (rest % o as u64) as u32;
            rest /= o as u64;
            if n % o != 0 {
                ok = ok && k == 0;
            }
            vals.push(k * (n / o.gcd(&n)));
        }
        if !ok {
            continue;
        }
        if let Some(map) = propagate(g, &gens, &vals, n) {
            out.push(map);
        }
    }
    out
}

fn propagate(g: &QuotientGroup, gens: &[u32], vals: &[u32], n: u32) -> Option<HashMap<u32, u32>> {
    let mut map = HashMap::from([(g.identity(), 0u32)]);
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        let vx = map[&x];
        for (&s, &v) in gens.iter().zip(vals) {
            let y = g.mul(x, s);
            let vy = (vx + v) % n;
            match map.get(&y) {
                Some(&w) if w != vy => return None,
                Some(_) => {}
                None => {
                    map.insert(y, vy);
                    queue.push_back(y);
                }
            }
        }
    }
    Some(map)
}

// ----- inducing data --------------------------------------------------------

/// The four shapes of inducing data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseKind {
    Odd,
    DivisibleBy2ell,
    EvenOddEll,
    EvenQuaternion,
}

/// Formula-level description of the characters of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducingDatum {
    pub level: i32,
    pub case: CaseKind,
    pub y: DElem,
    /// The congruence index `r` of the layer on which the character is read off `Y`.
    pub r: i32,
    pub subgroup: String,
    pub linear_character: String,
    pub predicted_degree: BigUint,
    pub predicted_inertia_index: BigUint,
    /// True when the characters are induced from a linear character of an explicit subgroup.
    pub monomial: bool,
    /// Number of extensions through the cyclic step, when there is one.
    pub extension_count: Option<u64>,
}

impl InducingDatum {
    pub fn to_json(&self, alg: &Algebra) -> Value {
        json!({
            "level": self.level,
            "case": format!("{:?}", self.case),
            "y": alg.display(&self.y),
            "r": self.r,
            "subgroup": self.subgroup,
            "linear_character": self.linear_character,
            "predicted_degree": orbits::big_json(&self.predicted_degree),
            "predicted_inertia_index": orbits::big_json(&self.predicted_inertia_index),
            "monomial": self.monomial,
            "extension_count": self.extension_count,
        })
    }
}

/// A class function on `G_M`, one value per conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassFunction {
    pub values: Vec<Cyclo>,
}

/// Everything shared by the characters of one level.
pub struct LevelContext<'a> {
    pub alg: &'a Algebra,
    pub group: &'a QuotientGroup,
    pub m: i32,
    pub field: Arc<CycloField>,
}

impl<'a> LevelContext<'a> {
    /// The context for level `m` inside `G_{m+1}`.
    pub fn new(group: &'a QuotientGroup) -> Self {
        let alg = group.algebra();
        let m = group.level() - 1;
        let p = alg.tower().params();
        let mut pa = p.p;
        while pa < group.level() as u64 {
            pa *= p.p;
        }
        let n = (p.norm_index()).lcm(&(p.q + 1)).lcm(&pa);
        LevelContext { alg, group, m, field: CycloField::new(n as u32) }
    }

    pub fn n(&self) -> u32 {
        self.field.order()
    }

    fn scale_p(&self, e: u32) -> u32 {
        e * (self.n() / self.alg.tower().p())
    }
}

/// A strategy producing the characters of the levels it handles.
pub trait LevelCase: Send + Sync {
    fn kind(&self) -> CaseKind;

    fn name(&self) -> &'static str;

    fn applies(&self, ell: u32, m: i32) -> bool;

    /// The index `r` of the layer carrying the character.
    fn layer_index(&self, m: i32) -> i32;

    /// Precision of `Y` that determines the characters of the level.
    fn orbit_precision(&self, m: i32) -> i32;

    /// Whether the final characters are induced from linear ones.
    fn monomial(&self) -> bool {
        true
    }

    fn describe(&self, alg: &Algebra, m: i32, y: &DElem) -> InducingDatum;

    /// The characters attached to the orbit of `y`, one per admissible choice.
    fn characters(&self, ctx: &LevelContext, y: &DElem) -> Result<Vec<ClassFunction>, ConstructionError>;
}

fn predicted(alg: &Algebra, m: i32, inner: BigUint) -> (BigUint, BigUint) {
    let f = CensusFormulas::new(alg.q(), alg.ell() as u32);
    let d = f.d(m as u64);
    let idx = &d / inner;
    (d, idx)
}

struct OddCase;
struct DivisibleBy2ellCase;
struct EvenOddEllCase;
struct EvenQuaternionCase;

impl LevelCase for OddCase {
    fn kind(&self) -> CaseKind {
        CaseKind::Odd
    }
    fn name(&self) -> &'static str {
        "odd"
    }
    fn applies(&self, _ell: u32, m: i32) -> bool {
        m >= 1 && m % 2 == 1
    }
    fn layer_index(&self, m: i32) -> i32 {
        (m + 1) / 2
    }
    fn orbit_precision(&self, m: i32) -> i32 {
        -self.layer_index(m) + 1
    }
    fn describe(&self, alg: &Algebra, m: i32, y: &DElem) -> InducingDatum {
        abelian_datum(self, alg, m, y)
    }
    fn characters(&self, ctx: &LevelContext, y: &DElem) -> Result<Vec<ClassFunction>, ConstructionError> {
        abelian_characters_for(ctx, y, self.layer_index(ctx.m), None)
    }
}

impl LevelCase for DivisibleBy2ellCase {
    fn kind(&self) -> CaseKind {
        CaseKind::DivisibleBy2ell
    }
    fn name(&self) -> &'static str {
        "divisible-by-2ell"
    }
    fn applies(&self, ell: u32, m: i32) -> bool {
        m >= 1 && m % (2 * ell as i32) == 0
    }
    fn layer_index(&self, m: i32) -> i32 {
        m / 2
    }
    fn orbit_precision(&self, m: i32) -> i32 {
        -self.layer_index(m) + 1
    }
    fn describe(&self, alg: &Algebra, m: i32, y: &DElem) -> InducingDatum {
        abelian_datum(self, alg, m, y)
    }
    fn characters(&self, ctx: &LevelContext, y: &DElem) -> Result<Vec<ClassFunction>, ConstructionError> {
        abelian_characters_for(ctx, y, self.layer_index(ctx.m), None)
    }
}

impl LevelCase for EvenOddEllCase {
    fn kind(&self) -> CaseKind {
        CaseKind::EvenOddEll
    }
    fn name(&self) -> &'static str {
        "even-odd-ell"
    }
    fn applies(&self, ell: u32, m: i32) -> bool {
        ell % 2 == 1 && m >= 2 && m % 2 == 0 && (m / 2) % ell as i32 != 0
    }
    fn layer_index(&self, m: i32) -> i32 {
        m / 2
    }
    fn orbit_precision(&self, m: i32) -> i32 {
        -self.layer_index(m) + 1
    }
    fn describe(&self, alg: &Algebra, m: i32, y: &DElem) -> InducingDatum {
        let r = self.layer_index(m);
        let inner = BigUint::from(alg.q()).pow((alg.ell() as u32 - 1) / 2);
        let (d, idx) = predicted(alg, m, BigUint::from(1u32));
        InducingDatum {
            level: m,
            case: self.kind(),
            y: y.clone(),
            r,
            subgroup: format!("C_G(Y) J, J the preimage in G^{r} of a maximal isotropic subspace"),
            linear_character: format!("abelian character of C_G(Y) glued with Y-pairing of tlog on J (layer {r})"),
            predicted_degree: d,
            predicted_inertia_index: idx / inner,
            monomial: true,
            extension_count: None,
        }
    }
    fn characters(&self, ctx: &LevelContext, y: &DElem) -> Result<Vec<ClassFunction>, ConstructionError> {
        let r = self.layer_index(ctx.m);
        let y = ctx.alg.with_prec(y, -r + 1);
        let layer = HeisenbergLayer::from_dual(ctx.alg, r, y.coeff(-2 * r))?;
        let j = layer.isotropic_complete(ctx.alg)?;
        abelian_characters_for(ctx, &y, r, Some(&j))
    }
}

impl LevelCase for EvenQuaternionCase {
    fn kind(&self) -> CaseKind {
        CaseKind::EvenQuaternion
    }
    fn name(&self) -> &'static str {
        "even-quaternion"
    }
    fn applies(&self, ell: u32, m: i32) -> bool {
        ell == 2 && m % 4 == 2
    }
    fn layer_index(&self, m: i32) -> i32 {
        m / 2
    }
    fn orbit_precision(&self, m: i32) -> i32 {
        -self.layer_index(m)
    }
    fn monomial(&self) -> bool {
        false
    }
    fn describe(&self, alg: &Algebra, m: i32, y: &DElem) -> InducingDatum {
        let r = self.layer_index(m);
        let (d, idx) = predicted(alg, m, BigUint::from(alg.q()));
        InducingDatum {
            level: m,
            case: self.kind(),
            y: y.clone(),
            r,
            subgroup: format!("P(Y) J inside P(Y) G^{r}, extended over the cyclic norm-one residues"),
            linear_character: format!("Y-pairing of tlog on J (layer {r}); Heisenberg lift; extension; induction"),
            predicted_degree: d,
            predicted_inertia_index: idx,
            monomial: false,
            extension_count: Some(alg.q() + 1),
        }
    }
    fn characters(&self, ctx: &LevelContext, y: &DElem) -> Result<Vec<ClassFunction>, ConstructionError> {
        quaternion_characters(ctx, y, self.layer_index(ctx.m))
    }
}

fn abelian_datum(case: &dyn LevelCase, alg: &Algebra, m: i32, y: &DElem) -> InducingDatum {
    let r = case.layer_index(m);
    let (d, idx) = predicted(alg, m, BigUint::from(1u32));
    InducingDatum {
        level: m,
        case: case.kind(),
        y: y.clone(),
        r,
        subgroup: format!("C_G(Y) G^{r}"),
        linear_character: format!("abelian character of C_G(Y) glued with Y-pairing of tlog on G^{r}"),
        predicted_degree: d,
        predicted_inertia_index: idx,
        monomial: true,
        extension_count: None,
    }
}

/// The registry of level cases, selected by level or by name.
pub struct CaseRegistry {
    cases: Vec<Box<dyn LevelCase>>,
}

impl Default for CaseRegistry {
    fn default() -> Self {
        let mut r = CaseRegistry { cases: Vec::new() };
        r.register(Box::new(OddCase));
        r.register(Box::new(DivisibleBy2ellCase));
        r.register(Box::new(EvenOddEllCase));
        r.register(Box::new(EvenQuaternionCase));
        r
    }
}

impl CaseRegistry {
    pub fn register(&mut self, case: Box<dyn LevelCase>) {
        self.cases.push(case);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.cases.iter().map(|c| c.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn LevelCase> {
        self.cases.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn select(&self, ell: u32, m: i32) -> Result<&dyn LevelCase, ConstructionError> {
        self.cases.iter().find(|c| c.applies(ell, m)).map(|c| c.as_ref()).ok_or(ConstructionError::NoCase(m))
    }
}

/// The fixed representative of level `m`: `nu^{-m} zeta` when `ell ∤ m`, and
/// `pi^{-m/ell} omega` with `omega` the first nonzero trace-zero residue otherwise.
pub fn default_representative(alg: &Algebra, m: i32, prec: i32) -> DElem {
    let t = alg.tower();
    if m.rem_euclid(alg.ell()) != 0 {
        alg.monomial(-m, t.generator(), prec)
    } else {
        let omega = t.elements().find(|&x| !x.is_zero() && t.trace(x).is_zero()).expect("trace is not injective");
        alg.monomial(-m, omega, prec)
    }
}

/// Checks the representative and describes the inducing data for level `m`.
pub fn construct_inducing_datum(
    registry: &CaseRegistry,
    alg: &Algebra,
    m: i32,
    y: &DElem,
) -> Result<InducingDatum, ConstructionError> {
    if !alg.trd(y).is_zero() {
        return Err(ConstructionError::BadRepresentative("Y is not traceless".into()));
    }
    match alg.jump_checked(y) {
        Ok(j) if j == -m => {}
        other => return Err(ConstructionError::BadRepresentative(format!("jump of Y is {other:?}, expected {}", -m))),
    }
    Ok(registry.select(alg.ell() as u32, m)?.describe(alg, m, y))
}

// ----- centralizers and subgroups ------------------------------------------

fn in_l(alg: &Algebra, y: &DElem) -> bool {
    y.terms().all(|(e, _)| e.rem_euclid(alg.ell()) == 0)
}

/// Elements of `G_M` centralizing the exact element `y`, which is either in
/// `L` or has leading exponent prime to `ell`.
pub fn centralizer(ctx: &LevelContext, y: &DElem) -> Result<Vec<u32>, ConstructionError> {
    let alg = ctx.alg;
    let g = ctx.group;
    let big_m = g.level();
    let t = alg.tower();
    let ell = alg.ell();
    let mut cands: Vec<DElem> = Vec::new();
    if in_l(alg, y) {
        let slots: Vec<i32> = (1..big_m).filter(|e| e % ell == 0).collect();
        let all: Vec<Fql> = t.elements().collect();
        for t0 in groups::norm_one_residues(alg) {
            let mut partial = vec![alg.constant(t0, big_m)];
            for &e in &slots {
                partial = partial.iter().flat_map(|x| all.iter().map(move |&a| alg.plus(x, &alg.monomial(e, a, big_m)))).collect();
            }
            cands.extend(partial);
        }
    } else {
        let mneg = -y.lo();
        if y.is_zero() || mneg.rem_euclid(ell) == 0 {
            return Err(ConstructionError::BadRepresentative("centralizer needs Y in L or of valuation prime to ell".into()));
        }
        let beta = (1..ell).find(|b| (mneg * b + 1) % ell == 0).expect("ell is prime");
        let alpha = (1 + mneg * beta) / ell;
        let target = big_m - ell * alpha;
        let yp = alg.with_prec(y, target + mneg * beta);
        let mut pow = alg.one(target + mneg * beta);
        for k in 1..=beta {
            pow = alg.mul_to(&pow, &yp, target + mneg * (beta - k));
        }
        let unif = alg.with_prec(&alg.shift(&pow, ell * alpha), big_m);
        if unif.lo() != 1 {
            return Err(ConstructionError::BadRepresentative("failed to build a uniformizer of the centralizer".into()));
        }
        let mut powers = vec![alg.one(big_m)];
        for k in 1..big_m as usize {
            powers.push(alg.times(&powers[k - 1], &unif));
        }
        let fq: Vec<Fql> = t.fq_elements().collect();
        let mut partial: Vec<DElem> = fq.iter().filter(|c| !c.is_zero()).map(|&c| alg.constant(c, big_m)).collect();
        for p in &powers[1..] {
            partial = partial
                .iter()
                .flat_map(|x| fq.iter().map(move |&c| alg.plus(x, &alg.times(&alg.constant(c, big_m), p))))
                .collect();
        }
        cands = partial;
    }
    let mut out: Vec<u32> = cands.into_iter().filter(|x| alg.is_norm_one(x)).map(|x| g.index_of(&x).expect("norm-one unit")).collect();
    out.sort_unstable();
    out.dedup();
    let yy = alg.with_prec(y, y.prec());
    for &c in &out {
        let ce = g.element(c);
        let prec = y.prec();
        let lhs = alg.mul_to(ce, &yy, prec);
        let rhs = alg.mul_to(&yy, ce, prec);
        if lhs != rhs {
            return Err(fail("centralizer element does not commute with Y"));
        }
    }
    Ok(out)
}

/// A linear character on an explicit subgroup, as a map from element index to
/// an exponent modulo `n`.
#[derive(Debug, Clone)]
pub struct LinearCharacter {
    pub values: HashMap<u32, u32>,
}

fn glue(
    ctx: &LevelContext,
    a: &[u32],
    chi_a: &HashMap<u32, u32>,
    b: &[u32],
    chi_b: &HashMap<u32, u32>,
) -> Result<LinearCharacter, ConstructionError> {
    let g = ctx.group;
    let n = ctx.n();
    let mut values: HashMap<u32, u32> = HashMap::new();
    for &x in a {
        for &y in b {
            let h = g.mul(x, y);
            let v = (chi_a[&x] + chi_b[&y]) % n;
            if let Some(&w) = values.get(&h) {
                if w != v {
                    return Err(fail("glued character is not well defined"));
                }
            } else {
                values.insert(h, v);
            }
        }
    }
    let gens: Vec<u32> = a.iter().chain(b).copied().collect();
    for (&h, &v) in &values {
        for &s in &gens {
            let hs = g.mul(h, s);
            match values.get(&hs) {
                Some(&w) if w == (v + values[&s]) % n => {}
                _ => return Err(fail("glued character is not multiplicative")),
            }
        }
    }
    Ok(LinearCharacter { values })
}

fn left_coset_reps(g: &QuotientGroup, sub: &HashMap<u32, u32>) -> Vec<u32> {
    let mut reps: Vec<u32> = Vec::new();
    let mut covered = vec![false; g.order()];
    let members: Vec<u32> = sub.keys().copied().collect();
    for x in 0..g.order() as u32 {
        if covered[x as usize] {
            continue;
        }
        reps.push(x);
        for &h in &members {
            covered[g.mul(x, h) as usize] = true;
        }
    }
    reps
}

/// `Ind_H^G lambda` evaluated on class representatives.
pub fn induce_linear(ctx: &LevelContext, lambda: &LinearCharacter) -> ClassFunction {
    let g = ctx.group;
    let n = ctx.n() as usize;
    let reps = left_coset_reps(g, &lambda.values);
    let values = g
        .classes()
        .classes
        .par_iter()
        .map(|cls| {
            let x = cls[0];
            let mut hist = vec![0i64; n];
            for &t in &reps {
                let y = g.mul(g.mul(g.inv(t), x), t);
                if let Some(&e) = lambda.values.get(&y) {
                    hist[e as usize] += 1;
                }
            }
            Cyclo::from_histogram(&ctx.field, &hist)
        })
        .collect();
    ClassFunction { values }
}

fn layer_character(ctx: &LevelContext, y: &DElem, r: i32, members: &[u32]) -> Result<HashMap<u32, u32>, ConstructionError> {
    let big_m = ctx.group.level();
    let w = Window { r, m: big_m };
    members
        .iter()
        .map(|&k| {
            let x = ctx.alg.tlog(ctx.group.element(k), w)?;
            let e = duality::pairing(ctx.alg, r, big_m, &x, y)?;
            Ok((k, ctx.scale_p(e.exponent)))
        })
        .collect()
}

fn isotropic_preimage(ctx: &LevelContext, r: i32, gamma1: &[u32], j: &[Fql]) -> Result<Vec<u32>, ConstructionError> {
    let big_m = ctx.group.level();
    let w = Window { r, m: big_m };
    let jset: HashSet<Fql> = j.iter().copied().collect();
    let mut out = Vec::new();
    for &k in gamma1 {
        let x = ctx.alg.tlog(ctx.group.element(k), w)?;
        let xbar = ctx.alg.tower().frob(x.coeff(r), -(r as i64));
        if jset.contains(&xbar) {
            out.push(k);
        }
    }
    Ok(out)
}

fn prepare_y(ctx: &LevelContext, y: &DElem, prec: i32) -> Result<DElem, ConstructionError> {
    let alg = ctx.alg;
    let y = alg.with_prec(y, prec);
    let yl = if y.lo().rem_euclid(alg.ell()) == 0 && !in_l(alg, &y) {
        alg.conjugate_unramified_into_l(&y)?.1
    } else {
        y
    };
    Ok(alg.with_prec(&yl, prec))
}

/// Characters induced from `C_G(Y) K`, where `K` is `G^r_M` or, when an
/// isotropic subspace is given, its preimage in `G^r_M`.
fn abelian_characters_for(
    ctx: &LevelContext,
    y: &DElem,
    r: i32,
    isotropic: Option<&[Fql]>,
) -> Result<Vec<ClassFunction>, ConstructionError> {
    let g = ctx.group;
    let y = prepare_y(ctx, y, -r + 1)?;
    let c = centralizer(ctx, &y)?;
    let gamma1 = g.congruence_subgroup(r);
    let k = match isotropic {
        Some(j) => isotropic_preimage(ctx, r, &gamma1, j)?,
        None => gamma1,
    };
    let lam_k = layer_character(ctx, &y, r, &k)?;
    let kset: HashSet<u32> = k.iter().copied().collect();
    let chis = abelian_characters(g, &c, ctx.n());
    let mut out = Vec::new();
    for chi in chis {
        if c.iter().any(|x| kset.contains(x) && chi[x] != lam_k[x]) {
            continue;
        }
        let lambda = glue(ctx, &c, &chi, &k, &lam_k)?;
        out.push(induce_linear(ctx, &lambda));
    }
    Ok(out)
}

/// Characters of the quaternion levels: Heisenberg lift on `P(Y) G^r`,
/// extension over the cyclic norm-one residues, then induction.
fn quaternion_characters(ctx: &LevelContext, y: &DElem, r: i32) -> Result<Vec<ClassFunction>, ConstructionError> {
    let alg = ctx.alg;
    let g = ctx.group;
    let t = alg.tower();
    let q = alg.q();
    let y = prepare_y(ctx, y, -r + 1)?;
    if !in_l(alg, &y) {
        return Err(ConstructionError::BadRepresentative("quaternion levels need an unramified Y".into()));
    }
    let c_all = centralizer(ctx, &y)?;
    let g1 = g.congruence_subgroup(1);
    let g1set: HashSet<u32> = g1.iter().copied().collect();
    let p: Vec<u32> = c_all.iter().copied().filter(|x| g1set.contains(x)).collect();
    let gamma1 = g.congruence_subgroup(r);
    let layer = HeisenbergLayer::from_dual(alg, r, y.coeff(-2 * r))?;
    let jsub = layer.isotropic_complete(alg)?;
    let j = isotropic_preimage(ctx, r, &gamma1, &jsub)?;
    let lam_j = layer_character(ctx, &y, r, &j)?;
    let jset: HashSet<u32> = j.iter().copied().collect();

    let pg: HashSet<u32> = p.iter().flat_map(|&a| gamma1.iter().map(move |&b| g.mul(a, b))).collect();
    let mut pg: Vec<u32> = pg.into_iter().collect();
    pg.sort_unstable();
    let pgset: HashSet<u32> = pg.iter().copied().collect();

    let c_elem = alg.constant(t.gen_pow(q as i64 - 1), g.level());
    let c = g.index_of(&c_elem).expect("norm-one residue");
    let order_c = (q + 1) as usize;

    let mut out = Vec::new();
    for chi_p in abelian_characters(g, &p, ctx.n()) {
        if p.iter().any(|x| jset.contains(x) && chi_p[x] != lam_j[x]) {
            continue;
        }
        let lambda = glue(ctx, &p, &chi_p, &j, &lam_j)?;
        let reps = left_coset_reps_within(g, &pg, &lambda.values);
        let theta = |x: u32| -> CMat { monomial_matrix(ctx, &lambda, &reps, x) };
        let d = reps.len();
        let mut a = CMat::zero(&ctx.field, d);
        let mut found = false;
        'search: for ei in 0..d {
            for ej in 0..d {
                let mut e = CMat::zero(&ctx.field, d);
                e.set(ei, ej, Cyclo::one(&ctx.field));
                let sum = pg
                    .par_iter()
                    .map(|&x| theta(g.conj(c, x)).mul(&e).mul(&theta(g.inv(x))))
                    .reduce(|| CMat::zero(&ctx.field, d), |u, v| u.add(&v));
                if !sum.is_zero() {
                    a = sum;
                    found = true;
                    break 'search;
                }
            }
        }
        if !found {
            return Err(fail("no nonzero intertwiner between the lift and its conjugate"));
        }
        let s = a.pow(order_c as u64).as_scalar().ok_or_else(|| fail("the intertwiner power is not scalar"))?;
        let (u, v) = bezout(d as i64, order_c as i64);
        let root = a.det().pow(u).mul(&s.pow(v));
        let kappa0 = root.inv().expect("nonzero");
        let step = (ctx.n() as usize / order_c) as i64;
        for w in 0..order_c as i64 {
            let kappa = kappa0.mul(&Cyclo::root(&ctx.field, w * step));
            let b = a.scale(&kappa);
            if b.pow(order_c as u64) != CMat::identity(&ctx.field, d) {
                return Err(fail("the normalized intertwiner does not have the required order"));
            }
            let powers: Vec<CMat> = (0..order_c).map(|k| b.pow(k as u64)).collect();
            let hat = |h: u32| -> Option<Cyclo> {
                let t0 = g.element(h).coeff(0);
                let k = (0..order_c).find(|&k| t.pow(t.gen_pow(q as i64 - 1), k as i64) == t0)?;
                let ck_inv = g.inv(pow_elem(g, c, k));
                let x = g.mul(ck_inv, h);
                pgset.contains(&x).then(|| powers[k].mul(&theta(x)).trace())
            };
            out.push(induce_general(ctx, &hat, &pgset, c)?);
        }
    }
    Ok(out)
}

fn pow_elem(g: &QuotientGroup, x: u32, k: usize) -> u32 {
    (0..k).fold(g.identity(), |acc, _| g.mul(acc, x))
}

fn left_coset_reps_within(g: &QuotientGroup, ambient: &[u32], sub: &HashMap<u32, u32>) -> Vec<u32> {
    let mut reps: Vec<u32> = Vec::new();
    let mut covered: HashSet<u32> = HashSet::new();
    for &x in ambient {
        if covered.contains(&x) {
            continue;
        }
        reps.push(x);
        for &h in sub.keys() {
            covered.insert(g.mul(x, h));
        }
    }
    reps
}

fn monomial_matrix(ctx: &LevelContext, lambda: &LinearCharacter, reps: &[u32], x: u32) -> CMat {
    let g = ctx.group;
    let d = reps.len();
    let mut m = CMat::zero(&ctx.field, d);
    for (i, &ti) in reps.iter().enumerate() {
        let left = g.mul(g.inv(ti), x);
        for (j, &tj) in reps.iter().enumerate() {
            if let Some(&e) = lambda.values.get(&g.mul(left, tj)) {
                m.set(i, j, Cyclo::root(&ctx.field, e as i64));
            }
        }
    }
    m
}

/// Induces a class function given on `<c> base` to all of `G_M`.
fn induce_general(
    ctx: &LevelContext,
    hat: &(dyn Fn(u32) -> Option<Cyclo> + Sync),
    base: &HashSet<u32>,
    c: u32,
) -> Result<ClassFunction, ConstructionError> {
    let g = ctx.group;
    let mut inertia: HashSet<u32> = HashSet::new();
    let mut ck = g.identity();
    loop {
        for &b in base {
            inertia.insert(g.mul(ck, b));
        }
        ck = g.mul(ck, c);
        if ck == g.identity() {
            break;
        }
    }
    let marker: HashMap<u32, u32> = inertia.iter().map(|&x| (x, 0)).collect();
    let reps = left_coset_reps(g, &marker);
    let values = g
        .classes()
        .classes
        .iter()
        .map(|cls| {
            let x = cls[0];
            reps.iter().fold(Cyclo::zero(&ctx.field), |acc, &t| {
                let y = g.mul(g.mul(g.inv(t), x), t);
                match inertia.contains(&y).then(|| hat(y)).flatten() {
                    Some(v) => acc.add(&v),
                    None => acc,
                }
            })
        })
        .collect();
    Ok(ClassFunction { values })
}

// ----- verification ---------------------------------------------------------

/// Exact checks on one class function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterCheck {
    pub norm: String,
    pub degree: String,
    pub norm_is_one: bool,
    pub degree_ok: bool,
    pub level_ok: bool,
}

/// `[chi, chi]`, `chi(1)` and the level test for a class function of `G_{m+1}`.
pub fn check_character(ctx: &LevelContext, chi: &ClassFunction, expected_degree: &BigUint) -> CharacterCheck {
    let g = ctx.group;
    let part = g.classes();
    let total = part
        .classes
        .iter()
        .zip(&chi.values)
        .fold(Cyclo::zero(&ctx.field), |acc, (cls, v)| {
            acc.add(&v.mul(&v.conj()).scale(&BigRational::from_integer((cls.len() as i64).into())))
        });
    let norm = total.scale(&BigRational::from_integer((g.order() as i64).into()).recip());
    let e = g.identity();
    let deg = &chi.values[part.class_of[e as usize] as usize];
    let deg_rat = deg.as_rational();
    let degree_ok = deg_rat.as_ref().map(|d| d.is_integer() && d.to_integer().to_biguint() == Some(expected_degree.clone())).unwrap_or(false);
    let upper: HashSet<u32> = g.congruence_subgroup(ctx.m).into_iter().collect();
    let level_ok = part.classes.iter().zip(&chi.values).any(|(cls, v)| upper.contains(&cls[0]) && v != deg);
    let norm_rat = norm.as_rational();
    CharacterCheck {
        norm: norm_rat.as_ref().map(|r| r.to_string()).unwrap_or_else(|| norm.display()),
        degree: deg_rat.as_ref().map(|r| r.to_string()).unwrap_or_else(|| deg.display()),
        norm_is_one: norm_rat.map(|r| r == BigRational::from_integer(1.into())).unwrap_or(false),
        degree_ok,
        level_ok,
    }
}

/// Summary of the explicit construction at one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub q: u64,
    pub ell: u32,
    pub level: i32,
    pub case: CaseKind,
    pub group_order: usize,
    pub orbit_count: usize,
    pub characters_per_orbit: Vec<usize>,
    pub distinct_characters: usize,
    pub expected_count: String,
    pub expected_degree: String,
    pub all_norm_one: bool,
    pub all_degree_ok: bool,
    pub all_level_ok: bool,
    pub count_ok: bool,
    pub monomial: bool,
    pub orbit_representatives: Vec<String>,
}

impl LevelReport {
    pub fn passed(&self) -> bool {
        self.all_norm_one && self.all_degree_ok && self.all_level_ok && self.count_ok
    }

    /// The first failing check, if any.
    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.all_norm_one {
            Some("inner product [chi, chi] = 1")
        } else if !self.all_degree_ok {
            Some("degree chi(1) = d_m")
        } else if !self.all_level_ok {
            Some("level exactly m")
        } else if !self.count_ok {
            Some("number of distinct characters = a_m")
        } else {
            None
        }
    }
}

/// Orbit representatives of the dual elements that determine level-`m`
/// characters, taken modulo `P^prec`.
pub fn dual_orbit_representatives(alg: &Algebra, m: i32, prec: i32, limit: u128) -> Result<Vec<DElem>, ConstructionError> {
    let mut rest: Vec<DElem> = duality::traceless_window(alg, -m, prec).into_iter().filter(|y| !y.coeff(-m).is_zero()).collect();
    rest.sort();
    let mut remaining: HashSet<DElem> = rest.iter().cloned().collect();
    let mut reps = Vec::new();
    for y in rest {
        if !remaining.contains(&y) {
            continue;
        }
        let orbit = orbits::brute_force_orbit(alg, &y, prec, ActingGroup::G, limit)?;
        for z in &orbit {
            remaining.remove(z);
        }
        reps.push(orbit.into_iter().min().expect("nonempty orbit"));
    }
    Ok(reps)
}

/// Builds every character of level `m` in `G_{m+1}` from the dual orbit
/// representatives and verifies each one exactly.
pub fn induce_and_verify(registry: &CaseRegistry, group: &QuotientGroup) -> Result<LevelReport, ConstructionError> {
    let ctx = LevelContext::new(group);
    let alg = ctx.alg;
    let m = ctx.m;
    if m < 1 {
        return Err(ConstructionError::BadRepresentative("levels start at 1".into()));
    }
    let case = registry.select(alg.ell() as u32, m)?;
    let formulas = CensusFormulas::new(alg.q(), alg.ell() as u32);
    let expected_degree = formulas.d(m as u64);
    let expected_count = formulas.a(m as u64);
    let reps = dual_orbit_representatives(alg, m, case.orbit_precision(m), orbits::DEFAULT_ORBIT_LIMIT)?;
    let mut per_orbit = Vec::new();
    let mut distinct: HashSet<ClassFunction> = HashSet::new();
    let (mut norm_ok, mut deg_ok, mut level_ok) = (true, true, true);
    for y in &reps {
        let chars = case.characters(&ctx, y)?;
        per_orbit.push(chars.len());
        for chi in chars {
            let chk = check_character(&ctx, &chi, &expected_degree);
            norm_ok &= chk.norm_is_one;
            deg_ok &= chk.degree_ok;
            level_ok &= chk.level_ok;
            distinct.insert(chi);
        }
    }
    Ok(LevelReport {
        q: alg.q(),
        ell: alg.ell() as u32,
        level: m,
        case: case.kind(),
        group_order: group.order(),
        orbit_count: reps.len(),
        characters_per_orbit: per_orbit,
        distinct_characters: distinct.len(),
        expected_count: expected_count.to_string(),
        expected_degree: expected_degree.to_string(),
        all_norm_one: norm_ok,
        all_degree_ok: deg_ok,
        all_level_ok: level_ok,
        count_ok: BigUint::from(distinct.len()) == expected_count,
        monomial: case.monomial(),
        orbit_representatives: reps.iter().map(|y| alg.display(y)).collect(),
    })
}

// ----- census ---------------------------------------------------------------

/// One census row, with class-count cross-checks when the quotient was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub m: u64,
    pub a: String,
    pub d: String,
    pub sum_a: String,
    pub sum_a_d2: String,
    pub group_order: String,
    pub telescoping_ok: bool,
    pub class_count: Option<usize>,
    pub class_count_ok: Option<bool>,
}

/// `(a_m, d_m)`.
pub fn census(q: u64, ell: u32, m: u64) -> (BigUint, BigUint) {
    let f = CensusFormulas::new(q, ell);
    (f.a(m), f.d(m))
}

/// Census rows for levels `0..=max_level`; when `alg` is given, every
/// quotient `G_{m+1}` within `limit` is built and its classes counted.
pub fn census_rows(q: u64, ell: u32, max_level: u64, alg: Option<&Algebra>, limit: u128) -> Vec<CensusRow> {
    let f = CensusFormulas::new(q, ell);
    let mut sum_a = BigUint::zero();
    let mut sum_ad2 = BigUint::zero();
    (0..=max_level)
        .map(|m| {
            let (a, d) = (f.a(m), f.d(m));
            sum_a += &a;
            sum_ad2 += &a * &d * &d;
            let order = f.group_order(m + 1);
            let classes = alg.and_then(|alg| {
                let g = build_quotient_group(alg, m as i32 + 1, limit).ok()?;
                Some(g.conjugacy_class_count())
            });
            CensusRow {
                m,
                a: a.to_string(),
                d: d.to_string(),
                sum_a: sum_a.to_string(),
                sum_a_d2: sum_ad2.to_string(),
                telescoping_ok: sum_ad2 == order,
                group_order: order.to_string(),
                class_count_ok: classes.map(|c| BigUint::from(c) == sum_a),
                class_count: classes,
            }
        })
        .collect()
}

/// Largest level whose quotient `G_{m+1}` fits in `limit`.
pub fn buildable_levels(q: u64, ell: u32, limit: u128) -> u64 {
    let f = CensusFormulas::new(q, ell);
    let mut m = 0;
    while f.group_order(m + 2).to_u128().is_some_and(|o| o <= limit) {
        m += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;
    use crate::params::Params;

    fn alg(q: u64, ell: u32) -> Algebra {
        Algebra::new(Arc::new(FieldTower::new(Params::new(q, ell).unwrap()).unwrap()))
    }

    #[test]
    fn small_groups() {
        let a = alg(3, 2);
        let g1 = build_quotient_group(&a, 1, DEFAULT_GROUP_LIMIT).unwrap();
        assert_eq!(g1.order(), 4);
        assert!(g1.is_abelian());
        let g2 = build_quotient_group(&a, 2, DEFAULT_GROUP_LIMIT).unwrap();
        assert_eq!(g2.order(), 36);
        assert_eq!(g2.conjugacy_class_count(), 12);
        assert!(g2.check_axioms());
    }

    #[test]
    fn registry_dispatch() {
        let r = CaseRegistry::default();
        assert_eq!(r.select(2, 1).unwrap().kind(), CaseKind::Odd);
        assert_eq!(r.select(2, 2).unwrap().kind(), CaseKind::EvenQuaternion);
        assert_eq!(r.select(2, 4).unwrap().kind(), CaseKind::DivisibleBy2ell);
        assert_eq!(r.select(3, 2).unwrap().kind(), CaseKind::EvenOddEll);
        assert_eq!(r.select(3, 6).unwrap().kind(), CaseKind::DivisibleBy2ell);
        assert_eq!(r.select(3, 3).unwrap().kind(), CaseKind::Odd);
        assert!(r.get("even-quaternion").is_some());
    }

    #[test]
    fn level_one_quadratic() {
        let a = alg(3, 2);
        let g = build_quotient_group(&a, 2, DEFAULT_GROUP_LIMIT).unwrap();
        let rep = induce_and_verify(&CaseRegistry::default(), &g).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.distinct_characters, 8);
    }

    #[test]
    fn guard() {
        let a = alg(5, 3);
        assert!(matches!(build_quotient_group(&a, 3, DEFAULT_GROUP_LIMIT), Err(ConstructionError::TooLarge { .. })));
    }
}
