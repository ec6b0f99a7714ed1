//! Verification suites, registered by name and selected at run time.
//!
//! Each suite runs the invariants of one module at fixed parameters and
//! reports one [`Check`] per invariant.  Runs are deterministic given the seed.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, DElem, ElementType, Jump, Window};
use crate::construction::{self, CaseKind, CaseRegistry};
use crate::duality::{self, HeisenbergLayer};
use crate::gf::{FieldTower, Fql};
use crate::groups::ActingGroup;
use crate::orbits;
use crate::params::Params;
use crate::zeta::CensusFormulas;

/// Errors that stop a suite before it produces a report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("invalid parameters: {0}")]
    Config(String),
}

/// Parameters shared by every suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub q: u64,
    pub ell: u32,
    /// Depth or level bound for suites that take one.
    pub m: Option<i32>,
    pub max_group_order: u128,
    pub max_orbit_set: u128,
    pub seed: u64,
    /// Number of random cases when exhaustive checking exceeds the guards.
    pub samples: usize,
    /// Explicit moduli of `F_q` and `F_{q^ell}` over `F_p`, little-endian.
    pub modulus_q: Option<Vec<u64>>,
    pub modulus_qell: Option<Vec<u64>>,
}

impl SuiteConfig {
    pub fn new(q: u64, ell: u32) -> Self {
        SuiteConfig {
            q,
            ell,
            m: None,
            max_group_order: construction::DEFAULT_GROUP_LIMIT,
            max_orbit_set: orbits::DEFAULT_ORBIT_LIMIT,
            seed: 0,
            samples: 64,
            modulus_q: None,
            modulus_qell: None,
        }
    }

    pub fn algebra(&self) -> Result<Algebra, VerifyError> {
        let p = Params::new(self.q, self.ell).map_err(|e| VerifyError::Config(e.to_string()))?;
        let t = FieldTower::with_moduli(p, self.modulus_q.clone(), self.modulus_qell.clone()).map_err(|e| VerifyError::Config(e.to_string()))?;
        Ok(Algebra::new(Arc::new(t)))
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    /// The mathematical statement under test.
    pub claim: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

/// All checks of one suite at one parameter set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub q: u64,
    pub ell: u32,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Drops the timings so that reports compare byte for byte.
    pub fn strip_timings(&mut self) {
        for c in &mut self.checks {
            c.millis = None;
        }
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checks: Vec::new() }
    }

    fn run(&mut self, name: impl Into<String>, claim: &'static str, f: impl FnOnce() -> Result<(bool, String), String>) {
        let t = Instant::now();
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check { name: name.into(), claim, passed, detail, millis: Some(t.elapsed().as_millis() as u64) });
    }

    fn finish(self, suite: &str, cfg: &SuiteConfig) -> SuiteReport {
        SuiteReport { suite: suite.to_string(), q: cfg.q, ell: cfg.ell, checks: self.checks }
    }
}

/// A named verification suite.
pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport, VerifyError>;
}

/// Suites by name, in a fixed order.
pub struct SuiteRegistry {
    suites: Vec<Box<dyn Suite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        let mut r = SuiteRegistry { suites: Vec::new() };
        r.register(Box::new(ArithSuite));
        r.register(Box::new(OrbitsSuite));
        r.register(Box::new(DualitySuite));
        r.register(Box::new(ConstructionSuite));
        r.register(Box::new(ZetaSuite));
        r
    }
}

impl SuiteRegistry {
    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.suites.push(suite);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn Suite> {
        self.suites.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    /// Runs one suite, or every suite in order for `"all"`.
    pub fn run(&self, name: &str, cfg: &SuiteConfig) -> Result<Vec<SuiteReport>, VerifyError> {
        if name == "all" {
            return self.suites.iter().map(|s| s.run(cfg)).collect();
        }
        let s = self.get(name).ok_or_else(|| VerifyError::UnknownSuite(name.to_string()))?;
        Ok(vec![s.run(cfg)?])
    }
}

/// The parameter sets run by `verify --suite all` when none is given.
pub const DEFAULT_PARAMETER_SETS: [(u64, u32); 3] = [(3, 2), (5, 3), (7, 3)];

// ----- helpers --------------------------------------------------------------

/// A uniformly random element of `P^lo / P^prec`.
pub fn random_elem(alg: &Algebra, rng: &mut impl Rng, lo: i32, prec: i32) -> DElem {
    let digits: Vec<Fql> = (lo..prec).map(|_| random_digit(alg.tower(), rng)).collect();
    alg.from_digits(lo, &digits, prec)
}

fn random_digit(t: &FieldTower, rng: &mut impl Rng) -> Fql {
    let n = t.size();
    let k = rng.gen_range(0..n);
    if k == 0 {
        Fql::ZERO
    } else {
        t.gen_pow(k as i64)
    }
}

/// A random traceless element of `P^lo / P^prec`.
pub fn random_traceless(alg: &Algebra, rng: &mut impl Rng, lo: i32, prec: i32) -> DElem {
    let x = random_elem(alg, rng, lo, prec);
    let ell = alg.ell() as i64;
    let t = alg.trd(&x);
    let inv = alg.tower().fp_inverse((ell % alg.tower().p() as i64) as u32) as i64;
    let corr = alg.scale(&alg.with_prec(&t, prec), inv);
    alg.minus(&x, &corr)
}

fn random_unit(alg: &Algebra, rng: &mut impl Rng, prec: i32) -> DElem {
    loop {
        let x = random_elem(alg, rng, 0, prec);
        if !x.coeff(0).is_zero() {
            return x;
        }
    }
}

fn ok(passed: bool, detail: impl Into<String>) -> Result<(bool, String), String> {
    Ok((passed, detail.into()))
}

// ----- arith ----------------------------------------------------------------

struct ArithSuite;

impl Suite for ArithSuite {
    fn name(&self) -> &'static str {
        "arith"
    }

    fn description(&self) -> &'static str {
        "field tower, ring structure of D, reduced norm and trace, jump, truncated exp/log"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
        let alg = cfg.algebra()?;
        let t = alg.tower();
        let ell = alg.ell();
        let mut rec = Recorder::new();
        rec.run("frobenius_order", "sigma generates Gal(F_{q^ell}/F_q), of order ell", || {
            let fixed = t.elements().filter(|&x| t.frob(x, 1) == x).count() as u64;
            let cyc = t.elements().all(|x| t.frob(x, ell as i64) == x);
            ok(fixed == alg.q() && cyc, format!("fixed field size {fixed}"))
        });
        rec.run("trace_norm_descend", "Tr and N map F_{q^ell} onto F_q", || {
            let tr: std::collections::HashSet<Fql> = t.elements().map(|x| t.trace(x)).collect();
            let nm: std::collections::HashSet<Fql> = t.elements().filter(|x| !x.is_zero()).map(|x| t.norm(x)).collect();
            let inside = tr.iter().chain(&nm).all(|&x| t.is_in_fq(x));
            ok(inside && tr.len() as u64 == alg.q() && nm.len() as u64 == alg.q() - 1, format!("|Tr| = {}, |N| = {}", tr.len(), nm.len()))
        });
        let prec = 2 * ell + 2;
        rec.run("defining_relations", "nu^ell = pi and nu^{-1} a nu = sigma(a)", || {
            let nu = alg.nu_pow(1, prec);
            let pi_ok = alg.pow(&nu, ell as u64) == alg.nu_pow(ell, prec);
            let twist = t.elements().all(|a| {
                let lhs = alg.times(&alg.constant(a, prec), &nu);
                let rhs = alg.times(&nu, &alg.constant(t.frob(a, 1), prec));
                lhs == rhs
            });
            ok(pi_ok && twist, format!("nu^ell = pi: {pi_ok}, twist: {twist}"))
        });
        let mut rng = cfg.rng(1);
        let samples: Vec<(DElem, DElem, DElem)> = (0..cfg.samples)
            .map(|_| (random_elem(&alg, &mut rng, 0, prec), random_elem(&alg, &mut rng, 0, prec), random_elem(&alg, &mut rng, 0, prec)))
            .collect();
        rec.run("ring_axioms", "D is an associative ring", || {
            let bad = samples
                .iter()
                .filter(|(x, y, z)| {
                    alg.times(&alg.times(x, y), z) != alg.times(x, &alg.times(y, z))
                        || alg.times(x, &alg.plus(y, z)) != alg.plus(&alg.times(x, y), &alg.times(x, z))
                })
                .count();
            ok(bad == 0, format!("{} samples, {bad} failures", samples.len()))
        });
        rec.run("nrd_multiplicative", "Nrd(xy) = Nrd(x) Nrd(y) and Nrd is central", || {
            let bad = samples
                .iter()
                .filter(|(x, y, _)| {
                    let (nx, ny, nxy) = (alg.nrd(x), alg.nrd(y), alg.nrd(&alg.times(x, y)));
                    let prod = alg.times(&nx, &ny);
                    let p = prod.prec().min(nxy.prec());
                    !(alg.is_central(&nx) && alg.with_prec(&prod, p) == alg.with_prec(&nxy, p))
                })
                .count();
            ok(bad == 0, format!("{bad} failures"))
        });
        rec.run("trd_symmetric", "Trd(xy) = Trd(yx) and Trd is central", || {
            let bad = samples
                .iter()
                .filter(|(x, y, _)| {
                    let a = alg.trd(&alg.times(x, y));
                    !(alg.is_central(&a) && a == alg.trd(&alg.times(y, x)))
                })
                .count();
            ok(bad == 0, format!("{bad} failures"))
        });
        rec.run("unit_inverse", "units of O are invertible", || {
            let mut bad = 0;
            for _ in 0..cfg.samples {
                let u = random_unit(&alg, &mut rng, prec);
                let ui = alg.inv(&u).map_err(|e| e.to_string())?;
                if alg.times(&u, &ui) != alg.one(prec) || alg.times(&ui, &u) != alg.one(prec) {
                    bad += 1;
                }
            }
            ok(bad == 0, format!("{bad} failures"))
        });
        rec.run("jump_invariance", "the jump is invariant under conjugation by O^x", || {
            let mut bad = 0;
            for _ in 0..cfg.samples {
                let y = random_elem(&alg, &mut rng, -2, prec);
                let g = random_unit(&alg, &mut rng, prec + 2);
                let gi = alg.inv(&g).map_err(|e| e.to_string())?;
                let z = alg.conj(&g, &gi, &alg.with_prec(&y, prec + 2));
                if alg.jump(&alg.with_prec(&z, prec)) != alg.jump(&y) {
                    bad += 1;
                }
            }
            ok(bad == 0, format!("{bad} failures"))
        });
        rec.run("jump_classification", "central, ramified and unramified elements are told apart by the jump", || {
            let nu = alg.nu_pow(1, prec);
            let c = matches!(alg.jump(&alg.scalar(1, prec)), Jump::Central);
            let r = alg.classify(&nu) == ElementType::Ramified;
            let u = t.elements().find(|&x| !t.is_in_fq(x)).map(|x| alg.classify(&alg.constant(x, prec)) == ElementType::Unramified).unwrap_or(false);
            ok(c && r && u, format!("central {c}, ramified {r}, unramified {u}"))
        });
        for (r, m) in [(1, 3), (2, 4)] {
            let w = Window { r, m };
            let size = duality::window_size(&alg, r, m);
            let xs: Vec<DElem> = if size <= cfg.max_orbit_set {
                duality::lie_window(&alg, r, m)
            } else {
                (0..cfg.samples).map(|_| random_traceless(&alg, &mut rng, r, m)).collect()
            };
            rec.run(format!("exp_log_inverse_{r}_{m}"), "texp and tlog are mutually inverse bijections between the layers", || {
                let mut bad = 0;
                for x in &xs {
                    let g = alg.texp(x, w).map_err(|e| e.to_string())?;
                    if alg.tlog(&g, w).map_err(|e| e.to_string())? != *x || !alg.is_norm_one(&g) {
                        bad += 1;
                    }
                }
                ok(bad == 0, format!("{} elements, {bad} failures", xs.len()))
            });
        }
        let w = Window { r: 1, m: 3 };
        let xs = duality::lie_window(&alg, 1, 3);
        let pairs: Vec<(DElem, DElem)> = if (xs.len() as u128).pow(2) <= cfg.max_orbit_set {
            xs.iter().flat_map(|x| xs.iter().map(move |y| (x.clone(), y.clone()))).collect()
        } else {
            (0..cfg.samples * 4).map(|_| (xs[rng.gen_range(0..xs.len())].clone(), xs[rng.gen_range(0..xs.len())].clone())).collect()
        };
        rec.run("bch_identity", "log(exp x exp y) = x + y + [x, y]/2 on the layer (1, 3)", || {
            let bad = pairs.iter().filter(|(x, y)| !alg.bch_check(x, y, w).unwrap_or(false)).count();
            ok(bad == 0, format!("{} pairs, {bad} failures", pairs.len()))
        });
        rec.run("commutator_identity", "log of a group commutator is the Lie bracket on the layer (1, 3)", || {
            let bad = pairs.iter().filter(|(x, y)| !alg.commutator_check(x, y, w).unwrap_or(false)).count();
            ok(bad == 0, format!("{} pairs, {bad} failures", pairs.len()))
        });
        Ok(rec.finish(self.name(), cfg))
    }
}

// ----- orbits ---------------------------------------------------------------

struct OrbitsSuite;

impl Suite for OrbitsSuite {
    fn name(&self) -> &'static str {
        "orbits"
    }

    fn description(&self) -> &'static str {
        "closed-form similarity class sizes against brute force, and the splitting of ramified classes"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
        let alg = cfg.algebra()?;
        let depth = cfg.m.unwrap_or(2).max(1);
        let mut rec = Recorder::new();
        let total = duality::window_size(&alg, 0, depth) * alg.tower().size() as u128;
        let mut cosets: Vec<DElem> = if total <= 4096 {
            enumerate_window(&alg, 0, depth)
        } else {
            let mut rng = cfg.rng(2);
            (0..cfg.samples).map(|_| random_elem(&alg, &mut rng, 0, depth)).collect()
        };
        cosets.retain(|y| matches!(alg.jump(y), Jump::Finite(_)));
        cosets.sort();
        cosets.dedup();
        let iota = alg.tower().params().iota();
        let mut cases = Vec::new();
        for y in &cosets {
            let Jump::Finite(j) = alg.jump(y) else { continue };
            for m in [j + 1, j + 2] {
                cases.push((alg.with_prec(y, m.max(y.prec())), m));
            }
        }
        for acting in [ActingGroup::Ounits, ActingGroup::G, ActingGroup::G1] {
            rec.run(format!("orbit_size_{}", acting.name()), "the class of y + P^m has the closed-form size for its jump", || {
                let mut bad = Vec::new();
                let mut skipped = 0;
                for (y, m) in &cases {
                    match orbits::orbit_report(&alg, y, *m, acting, false, cfg.max_orbit_set) {
                        Ok(rep) => match orbits::brute_force_orbit(&alg, y, *m, acting, cfg.max_orbit_set) {
                            Ok(orbit) if BigUint::from(orbit.len()) == rep.formula_size => {}
                            Ok(orbit) => bad.push(format!("{} m={m}: {} vs {}", alg.display(y), orbit.len(), rep.formula_size)),
                            Err(_) => skipped += 1,
                        },
                        Err(e) => bad.push(e.to_string()),
                    }
                }
                ok(bad.is_empty(), format!("{} cases, {skipped} over guard, failures: {bad:?}", cases.len()))
            });
        }
        rec.run("ramified_splitting", "a ramified O^x-class splits into iota equal G-classes, an unramified one stays whole", || {
            let mut bad = Vec::new();
            for (y, m) in &cases {
                let Jump::Finite(j) = alg.jump(y) else { continue };
                let want = if j.rem_euclid(alg.ell()) == 0 { 1 } else { iota };
                match orbits::splitting_count(&alg, y, *m, cfg.max_orbit_set) {
                    Ok(c) if c == want => {}
                    Ok(c) => bad.push(format!("{} m={m}: {c}", alg.display(y))),
                    Err(_) => {}
                }
            }
            ok(bad.is_empty(), format!("iota = {iota}, failures: {bad:?}"))
        });
        rec.run("orbit_stabilizer", "orbit size times stabilizer order is the order of the acting quotient", || {
            let mut bad = Vec::new();
            let mut done = 0;
            for (y, m) in cases.iter().take(cfg.samples) {
                let n = orbits::acting_group_size(&alg, y, *m, ActingGroup::G);
                if n > cfg.max_group_order {
                    continue;
                }
                let stab = orbits::brute_force_stabilizer(&alg, y, *m, ActingGroup::G, cfg.max_group_order).map_err(|e| e.to_string())?;
                let orbit = orbits::brute_force_orbit(&alg, y, *m, ActingGroup::G, cfg.max_orbit_set).map_err(|e| e.to_string())?;
                done += 1;
                if (stab.len() * orbit.len()) as u128 != n {
                    bad.push(format!("{} m={m}", alg.display(y)));
                }
            }
            ok(bad.is_empty(), format!("{done} cases, failures: {bad:?}"))
        });
        rec.run("central_rejected", "central cosets have no finite jump below m", || {
            let r = orbits::formula_size(&alg, &alg.scalar(1, 3), 3, ActingGroup::G);
            ok(matches!(r, Err(orbits::OrbitError::JumpNotBelowM { .. })), format!("{r:?}"))
        });
        Ok(rec.finish(self.name(), cfg))
    }
}

fn enumerate_window(alg: &Algebra, lo: i32, prec: i32) -> Vec<DElem> {
    let digits: Vec<Fql> = alg.tower().elements().collect();
    let mut out = vec![alg.zero(prec)];
    for e in lo..prec {
        out = out.iter().flat_map(|x| digits.iter().map(move |&d| alg.plus(x, &alg.monomial(e, d, prec)))).collect();
    }
    out
}

// ----- duality --------------------------------------------------------------

struct DualitySuite;

impl Suite for DualitySuite {
    fn name(&self) -> &'static str {
        "duality"
    }

    fn description(&self) -> &'static str {
        "trace pairing non-degeneracy, abelian layer characters, radicals of the commutator form"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
        let alg = cfg.algebra()?;
        let t = alg.tower();
        let mut rec = Recorder::new();
        let mut rng = cfg.rng(3);
        for (r, m) in [(1, 2), (2, 3), (2, 4)] {
            rec.run(format!("nondegenerate_{r}_{m}"), "the trace pairing between a layer and its dual window is non-degenerate", || {
                let size = duality::window_size(&alg, r, m);
                let xs: Vec<DElem> = if size <= cfg.max_orbit_set {
                    duality::lie_window(&alg, r, m)
                } else {
                    (0..cfg.samples).map(|_| random_traceless(&alg, &mut rng, r, m)).collect()
                };
                let mut bad = 0;
                for x in xs.iter().filter(|x| !x.is_zero()) {
                    let w = duality::nondegeneracy_witness(&alg, r, m, x).map_err(|e| e.to_string())?;
                    if duality::pairing(&alg, r, m, x, &w).map_err(|e| e.to_string())?.is_trivial() {
                        bad += 1;
                    }
                }
                ok(bad == 0, format!("{} elements, {bad} without witness", xs.len()))
            });
        }
        let (r, m) = (2, 4);
        rec.run("layer_characters", "y -> phi_y is a bijection from the dual window onto the characters of the abelian layer", || {
            let size = duality::window_size(&alg, r, m);
            if size * size > cfg.max_orbit_set * 16 {
                return ok(true, format!("skipped: window of size {size} over guard"));
            }
            let (duals, layer, rows) = duality::character_table(&alg, r, m).map_err(|e| e.to_string())?;
            let distinct: std::collections::HashSet<&Vec<u32>> = rows.iter().collect();
            ok(distinct.len() == duals.len() && duals.len() == layer.len(), format!("{} characters, {} distinct, layer {}", duals.len(), distinct.len(), layer.len()))
        });
        let residues: Vec<Fql> = if alg.ell() == 2 {
            t.elements().filter(|&x| !x.is_zero() && t.trace(x).is_zero()).collect()
        } else {
            t.elements().filter(|x| !x.is_zero()).collect()
        };
        rec.run("radical_dimension", "the radical of beta is 0 for ell = 2 and a line over F_q for odd ell", || {
            let want = if alg.ell() == 2 { 1 } else { alg.q() as usize };
            let mut bad = 0;
            for &c in &residues {
                let layer = HeisenbergLayer::new(&alg, 1, c).map_err(|e| e.to_string())?;
                let rad = layer.radical(&alg).map_err(|e| e.to_string())?;
                if rad.len() != want || (alg.ell() > 2 && rad != layer.radical_by_hilbert90(&alg).map_err(|e| e.to_string())?) {
                    bad += 1;
                }
            }
            ok(bad == 0, format!("{} residues, {bad} failures", residues.len()))
        });
        rec.run("isotropic_subspace", "the completed subspace is isotropic of the maximal size", || {
            let mut bad = 0;
            for &c in residues.iter().take(cfg.samples) {
                let layer = HeisenbergLayer::new(&alg, 1, c).map_err(|e| e.to_string())?;
                let j = layer.isotropic_complete(&alg).map_err(|e| e.to_string())?;
                let rad = layer.radical(&alg).map_err(|e| e.to_string())?.len() as u64;
                let size = t.size() as u64;
                let isotropic = j.iter().all(|&u| j.iter().all(|&v| layer.beta(&alg, u, v).is_zero()));
                if !isotropic || (j.len() as u64).pow(2) != size * rad {
                    bad += 1;
                }
            }
            ok(bad == 0, format!("{bad} failures"))
        });
        rec.run("commutator_form", "the commutator of lifted layer elements pairs with y as beta", || {
            let mut bad = 0;
            for _ in 0..cfg.samples {
                let c = residues[rng.gen_range(0..residues.len())];
                let layer = HeisenbergLayer::from_dual(&alg, 1, c).map_err(|e| e.to_string())?;
                let (x1, x2) = (random_digit(t, &mut rng), random_digit(t, &mut rng));
                if layer.commutator_pairing(&alg, x1, x2).map_err(|e| e.to_string())? != layer.beta_char(&alg, x1, x2) {
                    bad += 1;
                }
            }
            ok(bad == 0, format!("{} samples, {bad} failures", cfg.samples))
        });
        Ok(rec.finish(self.name(), cfg))
    }
}

// ----- construction ---------------------------------------------------------

struct ConstructionSuite;

impl Suite for ConstructionSuite {
    fn name(&self) -> &'static str {
        "construction"
    }

    fn description(&self) -> &'static str {
        "explicit quotients, class counts, and exact verification of the induced characters"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
        let alg = cfg.algebra()?;
        let f = CensusFormulas::new(cfg.q, cfg.ell);
        let registry = CaseRegistry::default();
        let mut rec = Recorder::new();
        let buildable = construction::buildable_levels(cfg.q, cfg.ell, cfg.max_group_order) as i32;
        let top = cfg.m.unwrap_or(buildable.min(4)).min(buildable);
        for big_m in 1..=top + 1 {
            rec.run(format!("group_order_{big_m}"), "|G_M| equals the closed-form order", || {
                let g = construction::build_quotient_group(&alg, big_m, cfg.max_group_order).map_err(|e| e.to_string())?;
                let want = f.group_order(big_m as u64);
                ok(BigUint::from(g.order()) == want && g.check_axioms(), format!("{} vs {want}", g.order()))
            });
        }
        let rows = construction::census_rows(cfg.q, cfg.ell, top as u64, Some(&alg), cfg.max_group_order);
        rec.run("class_counts", "the number of conjugacy classes of G_{m+1} is the sum of a_k for k <= m", || {
            let bad: Vec<u64> = rows.iter().filter(|r| r.class_count_ok != Some(true)).map(|r| r.m).collect();
            let counts: Vec<Option<usize>> = rows.iter().map(|r| r.class_count).collect();
            ok(bad.is_empty(), format!("classes {counts:?}, failing levels {bad:?}"))
        });
        for m in 1..=top {
            rec.run(format!("level_{m}"), "the constructed characters of level m are irreducible of degree d_m and number a_m", || {
                let g = construction::build_quotient_group(&alg, m + 1, cfg.max_group_order).map_err(|e| e.to_string())?;
                let rep = construction::induce_and_verify(&registry, &g).map_err(|e| e.to_string())?;
                ok(
                    rep.passed(),
                    format!(
                        "{:?}: {} orbits, {} characters (expected {}), degree {}, first failure {:?}",
                        rep.case,
                        rep.orbit_count,
                        rep.distinct_characters,
                        rep.expected_count,
                        rep.expected_degree,
                        rep.first_failure()
                    ),
                )
            });
        }
        rec.run("datum_formulas", "each inducing datum predicts degree d_m and the inertia index of its case", || {
            let mut bad = Vec::new();
            for m in 1..=12 {
                let y = construction::default_representative(&alg, m, 1);
                let d = construction::construct_inducing_datum(&registry, &alg, m, &y).map_err(|e| e.to_string())?;
                let inner = match d.case {
                    CaseKind::Odd | CaseKind::DivisibleBy2ell => BigUint::from(1u32),
                    CaseKind::EvenOddEll => BigUint::from(cfg.q).pow((cfg.ell - 1) / 2),
                    CaseKind::EvenQuaternion => BigUint::from(cfg.q),
                };
                let monomial_ok = d.monomial == (d.case != CaseKind::EvenQuaternion);
                if d.predicted_degree != f.d(m as u64) || d.predicted_inertia_index * inner != f.d(m as u64) || !monomial_ok {
                    bad.push(m);
                }
            }
            ok(bad.is_empty(), format!("failing levels {bad:?}"))
        });
        if buildable >= 1 {
            rec.run("abelianization", "G_M / [G_M, G_M] has order (q^ell - 1)/(q - 1) for M >= 2", || {
                let big_m = (top + 1).clamp(2, 3);
                let g = construction::build_quotient_group(&alg, big_m, cfg.max_group_order).map_err(|e| e.to_string())?;
                if g.order() > 5000 {
                    return ok(true, format!("skipped: order {}", g.order()));
                }
                let ab = g.abelianization_order();
                ok(BigUint::from(ab) == f.norm_index(), format!("M = {big_m}: {ab}"))
            });
        }
        Ok(rec.finish(self.name(), cfg))
    }
}

// ----- zeta -----------------------------------------------------------------

struct ZetaSuite;

/// Largest level used for the exact telescoping identity.
pub const TELESCOPING_LEVELS: u64 = 40;

/// Absolute tolerance for the float comparison of closed form and series.
pub const ZETA_TOLERANCE: f64 = 1e-12;

impl Suite for ZetaSuite {
    fn name(&self) -> &'static str {
        "zeta"
    }

    fn description(&self) -> &'static str {
        "census identities, closed form against the truncated series, pole location"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport, VerifyError> {
        let f = CensusFormulas::new(cfg.q, cfg.ell);
        let mut rec = Recorder::new();
        rec.run("telescoping", "sum over k <= m of a_k d_k^2 is |G_{m+1}|", || {
            let fail = f.telescoping_first_failure(TELESCOPING_LEVELS);
            ok(fail.is_none(), format!("levels 0..={TELESCOPING_LEVELS}, first failure {fail:?}"))
        });
        rec.run("negative_two", "the exact series at s = -2 truncated at m is |G_{m+1}|", || {
            let bad: Vec<u64> = (0..=12u64).filter(|&m| f.partial_sum_exact(-2, m) != num_rational::BigRational::from_integer(f.group_order(m + 1).into())).collect();
            ok(bad.is_empty(), format!("failing truncations {bad:?}"))
        });
        let pole = f.pole();
        let mut points = vec![2i64];
        if Rational64::from_integer(1) > pole {
            points.push(1);
        }
        for s in points {
            rec.run(format!("closed_form_s{s}"), "the closed form equals the series in its half-plane of convergence", || {
                let ev = crate::zeta::evaluate(&f, Complex64::new(s as f64, 0.0), 200);
                let exact = f.closed_form_exact(s).map_err(|e| e.to_string())?.to_f64().unwrap_or(f64::NAN);
                let err = ev.abs_error.unwrap_or(f64::INFINITY);
                let cf = ev.closed_form.map(|c| c[0]).unwrap_or(f64::NAN);
                ok(err <= ZETA_TOLERANCE && (exact - cf).abs() <= ZETA_TOLERANCE * exact.abs().max(1.0), format!("|error| = {err:e}, closed form {cf}"))
            });
        }
        rec.run("pole", "the closed form has its real pole at s = 2/ell", || {
            let exact = pole == Rational64::new(2, cfg.ell as i64) && f.growth_exponent(pole).is_zero();
            let hit = f.closed_form(Complex64::new(2.0 / cfg.ell as f64, 0.0)).is_err();
            ok(exact && hit, format!("pole {pole}"))
        });
        Ok(rec.finish(self.name(), cfg))
    }
}
