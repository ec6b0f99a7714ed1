//! Acceptance criteria, one line per criterion.  Every check is exact except
//! the two floating-point comparisons of criterion 9.

use std::collections::HashSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use sl1d_core::algebra::{Algebra, DElem, Jump, Window};
use sl1d_core::construction::{self, CaseKind, CaseRegistry, DEFAULT_GROUP_LIMIT};
use sl1d_core::duality::{self, HeisenbergLayer};
use sl1d_core::gf::{FieldTower, Fql};
use sl1d_core::groups::ActingGroup;
use sl1d_core::orbits::{self, DEFAULT_ORBIT_LIMIT};
use sl1d_core::params::Params;
use sl1d_core::zeta::{self, CensusFormulas};

fn alg(q: u64, ell: u32) -> Algebra {
    Algebra::new(Arc::new(FieldTower::new(Params::new(q, ell).unwrap()).unwrap()))
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn c1_group_orders() -> Outcome {
    let a = alg(3, 2);
    let f = CensusFormulas::new(3, 2);
    let mut orders = Vec::new();
    let mut ok = true;
    for m in 1..=4 {
        let g = construction::build_quotient_group(&a, m, DEFAULT_GROUP_LIMIT).unwrap();
        ok &= BigUint::from(g.order()) == f.group_order(m as u64) && g.check_axioms();
        orders.push(g.order());
    }
    ok &= orders == [4, 36, 108, 972];
    outcome(ok, format!("orders {orders:?}"))
}

fn c2_class_counts() -> Outcome {
    let a = alg(3, 2);
    let f = CensusFormulas::new(3, 2);
    let mut counts = Vec::new();
    let mut ok = true;
    for m in 2..=4u64 {
        let g = construction::build_quotient_group(&a, m as i32, DEFAULT_GROUP_LIMIT).unwrap();
        let c = g.conjugacy_class_count();
        let want: BigUint = (0..m).map(|k| f.a(k)).sum();
        ok &= BigUint::from(c) == want;
        counts.push(c);
    }
    ok &= counts == [12, 20, 44];
    outcome(ok, format!("class counts {counts:?}"))
}

fn c3_telescoping() -> Outcome {
    let sets = [(3, 2), (5, 3), (7, 3), (3, 5)];
    let fails: Vec<_> = sets
        .iter()
        .filter_map(|&(q, ell)| CensusFormulas::new(q, ell).telescoping_first_failure(40).map(|m| (q, ell, m)))
        .collect();
    outcome(fails.is_empty(), format!("m <= 40 at {sets:?}, failures {fails:?}"))
}

fn cosets_mod_p2(a: &Algebra) -> Vec<DElem> {
    let t = a.tower();
    let all: Vec<Fql> = t.elements().collect();
    let mut out = Vec::new();
    for &c0 in &all {
        for &c1 in &all {
            let y = a.from_digits(0, &[c0, c1], 2);
            if matches!(a.jump(&y), Jump::Finite(_)) {
                out.push(y);
            }
        }
    }
    out
}

fn c4_orbits() -> Outcome {
    let a = alg(3, 2);
    let iota = a.tower().params().iota();
    let (mut cases, mut bad, mut split_bad) = (0, 0, 0);
    for y in cosets_mod_p2(&a) {
        let Jump::Finite(j) = a.jump(&y) else { continue };
        for m in [j + 1, j + 2] {
            let ym = a.with_prec(&y, m.max(2));
            for acting in [ActingGroup::Ounits, ActingGroup::G, ActingGroup::G1] {
                let want = orbits::formula_size(&a, &ym, m, acting).unwrap();
                let got = orbits::brute_force_orbit(&a, &ym, m, acting, DEFAULT_ORBIT_LIMIT).unwrap().len();
                cases += 1;
                if BigUint::from(got) != want {
                    bad += 1;
                }
            }
            if j.rem_euclid(a.ell()) != 0 {
                if orbits::splitting_count(&a, &ym, m, DEFAULT_ORBIT_LIMIT).unwrap() != iota {
                    split_bad += 1;
                }
                let g = orbits::brute_force_orbit(&a, &ym, m, ActingGroup::G, DEFAULT_ORBIT_LIMIT).unwrap().len();
                let o = orbits::brute_force_orbit(&a, &ym, m, ActingGroup::Ounits, DEFAULT_ORBIT_LIMIT).unwrap().len();
                if o != g * iota as usize {
                    split_bad += 1;
                }
            }
        }
    }
    outcome(bad == 0 && split_bad == 0, format!("{cases} orbit sizes, {bad} mismatches, {split_bad} splitting failures"))
}

fn c5_exp_log() -> Outcome {
    let a = alg(3, 2);
    let mut inverse_fail = 0;
    let mut sizes = Vec::new();
    for (r, m) in [(1, 3), (2, 4)] {
        let w = Window { r, m };
        let xs = duality::lie_window(&a, r, m);
        sizes.push(xs.len());
        let images: HashSet<DElem> = xs.iter().map(|x| a.texp(x, w).unwrap()).collect();
        if images.len() != xs.len() {
            inverse_fail += 1;
        }
        for x in &xs {
            let g = a.texp(x, w).unwrap();
            if a.tlog(&g, w).unwrap() != *x || !a.is_norm_one(&g) {
                inverse_fail += 1;
            }
        }
    }
    let w = Window { r: 1, m: 3 };
    let xs = duality::lie_window(&a, 1, 3);
    let mut identity_fail = 0;
    for x in &xs {
        for y in &xs {
            if !a.bch_check(x, y, w).unwrap() || !a.commutator_check(x, y, w).unwrap() {
                identity_fail += 1;
            }
        }
    }
    outcome(
        inverse_fail == 0 && identity_fail == 0,
        format!("layers of sizes {sizes:?}, {inverse_fail} inverse failures, {identity_fail} identity failures on {} pairs", xs.len().pow(2)),
    )
}

fn c6_duality() -> Outcome {
    let a = alg(3, 2);
    let mut bad = 0;
    for (r, m) in [(1, 2), (2, 3), (2, 4)] {
        let duals = duality::dual_window(&a, r, m);
        for x in duality::lie_window(&a, r, m).iter().filter(|x| !x.is_zero()) {
            if duals.iter().all(|y| duality::pairing(&a, r, m, x, y).unwrap().is_trivial()) {
                bad += 1;
            }
        }
    }
    let (r, m) = (2, 4);
    let (duals, layer, rows) = duality::character_table(&a, r, m).unwrap();
    let distinct: HashSet<&Vec<u32>> = rows.iter().collect();
    let expected = duality::window_size(&a, -m + 1, -r + 1) as usize;
    let ok = bad == 0 && distinct.len() == expected && duals.len() == expected && layer.len() == expected;
    outcome(ok, format!("{bad} degenerate elements; {} distinct characters of a layer of size {}", distinct.len(), layer.len()))
}

fn c7_radicals() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for q in [3, 5] {
        let a = alg(q, 2);
        let t = a.tower();
        let ys: Vec<Fql> = t.elements().filter(|&x| !x.is_zero() && t.trace(x).is_zero()).collect();
        let dim0 = ys.iter().all(|&y| HeisenbergLayer::new(&a, 1, y).unwrap().radical(&a).unwrap() == vec![Fql::ZERO]);
        ok &= dim0;
        notes.push(format!("q={q}: {} residues dim 0: {dim0}", ys.len()));
    }
    let a = alg(5, 3);
    let t = a.tower();
    let ys: Vec<Fql> = t.elements().filter(|x| !x.is_zero()).collect();
    let mut lines = 0;
    for &y in &ys {
        let layer = HeisenbergLayer::new(&a, 1, y).unwrap();
        let rad = layer.radical(&a).unwrap();
        if rad.len() == 5 && rad == layer.radical_by_hilbert90(&a).unwrap() {
            lines += 1;
        }
    }
    ok &= ys.len() == 124 && lines == 124;
    notes.push(format!("(5,3): {lines}/{} radicals are Hilbert 90 lines", ys.len()));
    outcome(ok, notes.join("; "))
}

fn c8_construction() -> Outcome {
    let a = alg(3, 2);
    let reg = CaseRegistry::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for m in 1..=3 {
        let g = construction::build_quotient_group(&a, m + 1, DEFAULT_GROUP_LIMIT).unwrap();
        let rep = construction::induce_and_verify(&reg, &g).unwrap();
        let deg_ok = rep.expected_degree == ["2", "3", "6"][m as usize - 1];
        ok &= rep.passed() && deg_ok && (m != 2 || rep.case == CaseKind::EvenQuaternion);
        notes.push(format!("m={m} {:?}: {} orbits, {} characters of degree {}", rep.case, rep.orbit_count, rep.distinct_characters, rep.expected_degree));
    }
    outcome(ok, notes.join("; "))
}

fn c9_zeta() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (q, ell, s) in [(3, 2, 2.0), (5, 3, 1.0)] {
        let f = CensusFormulas::new(q, ell);
        let ev = zeta::evaluate(&f, Complex64::new(s, 0.0), 200);
        let err = ev.abs_error.unwrap_or(f64::INFINITY);
        ok &= err <= 1e-12;
        notes.push(format!("({q},{ell}) s={s}: |error| {err:.1e}"));
        let pole = f.pole();
        let pole_ok = pole == Rational64::new(2, ell as i64) && f.growth_exponent(pole).is_zero() && f.closed_form(Complex64::new(2.0 / ell as f64, 0.0)).is_err();
        ok &= pole_ok;
        notes.push(format!("pole {pole}"));
    }
    outcome(ok, notes.join("; "))
}

fn c10_monomiality() -> Outcome {
    let reg = CaseRegistry::default();
    let mut ok = true;
    let mut count = 0;
    for (q, ell) in [(5, 3), (7, 3), (13, 3)] {
        let a = alg(q, ell);
        for m in 1..=12 {
            let y = construction::default_representative(&a, m, 1);
            let d = construction::construct_inducing_datum(&reg, &a, m, &y).unwrap();
            ok &= d.monomial && d.extension_count.is_none();
            count += 1;
        }
    }
    let a = alg(3, 2);
    let mut path = Vec::new();
    for m in 1..=4 {
        let y = construction::default_representative(&a, m, 1);
        let d = construction::construct_inducing_datum(&reg, &a, m, &y).unwrap();
        let want = m != 2;
        ok &= d.monomial == want && (want || d.extension_count == Some(4));
        path.push(format!("m={m}:{}", if d.monomial { "linear" } else { "extend+induce" }));
    }
    for m in [1, 3, 4] {
        let g = construction::build_quotient_group(&a, m + 1, DEFAULT_GROUP_LIMIT).unwrap();
        ok &= construction::induce_and_verify(&reg, &g).map(|r| r.passed() && r.monomial).unwrap_or(false);
    }
    outcome(ok, format!("{count} odd-degree data linear; (3,2) {}", path.join(" ")))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, title: "quotient group orders at (3,2)", budget: Duration::from_secs(10), run: c1_group_orders },
        Criterion { id: 2, title: "conjugacy class counts at (3,2)", budget: Duration::from_secs(60), run: c2_class_counts },
        Criterion { id: 3, title: "sum-of-squares telescoping", budget: Duration::from_secs(1), run: c3_telescoping },
        Criterion { id: 4, title: "orbit formulas and ramified splitting", budget: Duration::from_secs(120), run: c4_orbits },
        Criterion { id: 5, title: "truncated exp/log layer", budget: Duration::from_secs(30), run: c5_exp_log },
        Criterion { id: 6, title: "duality and layer characters", budget: Duration::from_secs(60), run: c6_duality },
        Criterion { id: 7, title: "radicals of the commutator form", budget: Duration::from_secs(5), run: c7_radicals },
        Criterion { id: 8, title: "end-to-end construction at (3,2)", budget: Duration::from_secs(600), run: c8_construction },
        Criterion { id: 9, title: "zeta closed form against series", budget: Duration::from_secs(10), run: c9_zeta },
        Criterion { id: 10, title: "monomiality witnesses", budget: Duration::from_secs(60), run: c10_monomiality },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let out = (c.run)();
        let took = start.elapsed();
        let pass = out.passed && took <= c.budget;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {}: {} [{:.2?} of {:?}]",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            out.detail,
            took,
            c.budget
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
