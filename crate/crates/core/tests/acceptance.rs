//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{e, lp, model, random_partially_convenient, random_support};
use lojasiewicz::exponents::{check_kn, transversals};
use lojasiewicz::fan::{fan_exponents, resolve};
use lojasiewicz::lattice::rank;
use lojasiewicz::newton::{build_polyhedron, NewtonPolyhedron};
use lojasiewicz::parse::parse_germ;
use lojasiewicz::report::{analyze, Analysis, Options};
use lojasiewicz::verify::{
    audit_euler_comparison, audit_f_vs_g, audit_l0, audit_l1, audit_l2, standard_probes, AuditResult, SamplePlan,
    Verdict,
};
use lojasiewicz::{Exponent, Remainder, TaylorModel, Term};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const C1_LIMIT: Duration = Duration::from_secs(1);
const C2_LIMIT: Duration = Duration::from_secs(5);
const C3_LIMIT: Duration = Duration::from_secs(120);
const C4_LIMIT: Duration = Duration::from_secs(60);
const C7_LIMIT_PER_GERM: Duration = Duration::from_secs(30);
const TAU_MAX: f64 = -0.8;
const SLOPE_MIN: f64 = 0.05;
const L0_L2_SHIFT: f64 = 0.25;
const L1_SHIFT: f64 = 0.1;

/// Criteria expected to print FAIL; see the README for the analysis.
const KNOWN_RED: &[&str] = &["7b"];

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: impl Into<String>) -> Line {
    let l = Line {
        id,
        pass,
        detail: detail.into(),
    };
    println!("{} {:<3} {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail);
    l
}

fn example_25(k: u32) -> TaylorModel {
    TaylorModel::new(2, [Term::int(1, vec![2, 2])], [Remainder::flat(vec![k, 0], [1])]).unwrap()
}

fn xy_quartic() -> TaylorModel {
    model(3, &[(1, &[4, 0, 0]), (1, &[1, 1, 0]), (1, &[0, 4, 0]), (1, &[4, 0, 6])])
}

fn criterion_1() -> Line {
    let t = Instant::now();
    let got: Vec<bool> = (1..=3)
        .map(|k| {
            let m = example_25(k);
            let p = build_polyhedron(&m.support()).unwrap();
            check_kn(&m, &p).unwrap().satisfied
        })
        .collect();
    let el = t.elapsed();
    line(
        "1",
        got == [false, true, true] && el < C1_LIMIT,
        format!("KN for k = 1, 2, 3: {got:?} in {el:.2?}"),
    )
}

fn criterion_2() -> Line {
    let t = Instant::now();
    let a = analyze(&xy_quartic(), &Options::default()).unwrap();
    let el = t.elapsed();
    let c = &a.convenience;
    let ok = c.partially_convenient
        && !c.convenient
        && c.j == BTreeSet::from([0, 1])
        && c.nu_max == Some(4)
        && a.theta.value == Some(Rational64::new(3, 4))
        && el < C2_LIMIT;
    line(
        "2",
        ok,
        format!(
            "partially convenient {}, convenient {}, J = {:?}, nu = {:?}, theta = {:?} in {el:.2?}",
            c.partially_convenient,
            c.convenient,
            c.j.iter().map(|i| i + 1).collect::<Vec<_>>(),
            c.nu_max,
            a.theta.value
        ),
    )
}

fn facet_ok(p: &NewtonPolyhedron, pts: &[Exponent], n: usize) -> bool {
    p.facets().iter().all(|f| {
        if f.normal.iter().any(|&a| a < 0) {
            return false;
        }
        let vals: Vec<i128> = pts.iter().map(|x| x.dot(&f.normal).unwrap()).collect();
        if vals.iter().any(|&v| v < f.offset) || !vals.contains(&f.offset) {
            return false;
        }
        let tight: Vec<Vec<i128>> = pts
            .iter()
            .zip(&vals)
            .filter(|(_, &v)| v == f.offset)
            .map(|(x, _)| x.to_i128())
            .collect();
        let mut dirs: Vec<Vec<i128>> = tight.iter().map(|x| x.iter().zip(&tight[0]).map(|(a, b)| a - b).collect()).collect();
        for i in 0..n {
            if f.normal[i] == 0 {
                let mut r = vec![0i128; n];
                r[i] = 1;
                dirs.push(r);
            }
        }
        rank(&dirs).unwrap() == n - 1
    })
}

fn criterion_3() -> Line {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    for case in 0..200 {
        let n = 2 + case % 4;
        let pts = random_support(&mut rng, n, 20, 10);
        let p = build_polyhedron(&pts).unwrap();
        let raw: Vec<Vec<i64>> = pts.iter().map(|x| x.entries().iter().map(|&v| i64::from(v)).collect()).collect();
        let mut oracle = lp::vertices(&raw);
        oracle.sort();
        let mut ours: Vec<Vec<i64>> = p
            .vertices()
            .iter()
            .map(|x| x.entries().iter().map(|&v| i64::from(v)).collect())
            .collect();
        ours.sort();
        let mut ok = ours == oracle && facet_ok(&p, &pts, n);
        // membership of random rational points agrees with the LP
        for _ in 0..5 {
            let x: Vec<BigRational> = (0..n)
                .map(|_| BigRational::new(BigInt::from(rng.gen_range(0..=40)), BigInt::from(rng.gen_range(1..=4))))
                .collect();
            ok &= p.contains(&x) == lp::in_polyhedron(&raw, &x);
        }
        if !ok {
            bad.push(case);
        }
    }
    let el = t.elapsed();
    line(
        "3",
        bad.is_empty() && el < C3_LIMIT,
        format!("200 random supports vs exact LP oracle, mismatches {bad:?}, in {el:.2?}"),
    )
}

fn catalog() -> Vec<(&'static str, TaylorModel)> {
    [
        "x^2 + y^2",
        "x^4 + y^4 + x^2*y^2",
        "x1^4 + x2^4 + x1^2*x2^2",
        "x^2*y^2",
        "x^4 + x^2*y^2",
        "x^3 + y^2",
        "x^2 - 2*x*y + y^2",
        "x1^4 + x1*x2 + x2^4 + x1^4*x3^6",
        "x^2 + y^2 + z^2",
        "x^2*y^2 + y^2*z^2 + x^2*z^2",
        "x^6 + y^4 + z^2 + x^2*y^2*z^2",
    ]
    .into_iter()
    .map(|s| (s, parse_germ(s).unwrap()))
    .collect()
}

fn fan_invariants(p: &NewtonPolyhedron, rng: &mut ChaCha8Rng) -> bool {
    let (_, s) = resolve(p).unwrap();
    let n = s.n;
    let unimodular = s.cones.iter().all(|c| s.abs_det(c).unwrap() == 1);
    let refines = s.refines_normal_fan(p).unwrap();
    let covers = (0..30).all(|_| {
        let a: Vec<i128> = (0..n).map(|_| rng.gen_range(0..=30)).collect();
        a.iter().all(|&x| x == 0) || !s.locate(&a).unwrap().is_empty()
    });
    unimodular && refines && covers
}

fn criterion_4() -> Line {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    for (name, m) in catalog() {
        let p = build_polyhedron(&m.support()).unwrap();
        if !fan_invariants(&p, &mut rng) {
            bad.push(name.to_string());
        }
    }
    for case in 0..50 {
        let n = 2 + case % 2;
        let pts = random_support(&mut rng, n, 8, 6);
        let p = build_polyhedron(&pts).unwrap();
        if !fan_invariants(&p, &mut rng) {
            bad.push(format!("random #{case}"));
        }
    }
    let cusp = build_polyhedron(&[e(&[3, 0]), e(&[0, 2])]).unwrap();
    let (_, s) = resolve(&cusp).unwrap();
    let rays: BTreeSet<Vec<i128>> = s.rays.iter().cloned().collect();
    let want: BTreeSet<Vec<i128>> = [[1, 0], [1, 1], [2, 3], [1, 2], [0, 1]].iter().map(|r| r.to_vec()).collect();
    let fe = fan_exponents(&s, &cusp).unwrap();
    let el = t.elapsed();
    line(
        "4",
        bad.is_empty() && rays == want && (fe.l, fe.n) == (6, 9) && el < C4_LIMIT,
        format!(
            "fan invariant failures {bad:?}; cusp rays match {}, (L, N) = ({}, {}) in {el:.2?}",
            rays == want,
            fe.l,
            fe.n
        ),
    )
}

fn gated_catalog() -> Vec<(String, TaylorModel)> {
    let mut out: Vec<(String, TaylorModel)> = ["x^2 + y^2", "x^4 + y^4 + x^2*y^2", "x1^4 + x2^4 + x1^2*x2^2"]
        .into_iter()
        .map(|s| (s.to_string(), parse_germ(s).unwrap()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..20 {
        out.push((format!("random #{k}"), random_partially_convenient(&mut rng)));
    }
    out
}

fn criterion_5(analyses: &[(String, Analysis)]) -> Line {
    let mut bad = Vec::new();
    for (name, a) in analyses {
        let nu = a.convenience.nu_max.map(|v| Rational64::from_integer(i64::from(v)));
        let ok = a.gate_passed()
            && a.hypotheses.nonnegative
            && a.convenience.partially_convenient
            && nu.is_some_and(|nu| {
                a.theta.value == Some(Rational64::from_integer(1) - nu.recip())
                    && a.alpha.value == Some(nu)
                    && a.dist.value.value == Some(nu)
            })
            && a.combined.as_ref().is_some_and(|c| c.consistent);
        if !ok {
            bad.push(name.clone());
        }
    }
    line(
        "5",
        bad.is_empty(),
        format!("(theta, alpha, L) = (1-1/nu, nu, nu) on {} gated germs; failures {bad:?}", analyses.len()),
    )
}

fn criterion_6(analyses: &[(String, Analysis)]) -> Line {
    let mut bad = Vec::new();
    for (name, a) in analyses {
        let Some(fe) = &a.fan_exponents else {
            bad.push(format!("{name}: no fan"));
            continue;
        };
        let l = Rational64::from_integer(fe.l as i64);
        let n = Rational64::from_integer(fe.n as i64);
        let ok = a.d <= l
            && a.dist.value.value.is_some_and(|v| v <= n)
            && a.theta.value.is_some_and(|t| t <= Rational64::from_integer(1) - n.recip());
        if !ok {
            bad.push(name.clone());
        }
    }
    line("6", bad.is_empty(), format!("d <= L, L_dist <= N, theta <= 1 - 1/N; failures {bad:?}"))
}

fn plan_for(a: &Analysis) -> SamplePlan {
    let n = a.model.dim();
    let line = a.convenience.nu.iter().max_by_key(|(_, v)| **v).map(|(i, _)| *i);
    SamplePlan::default_for(n, 0)
        .unwrap()
        .with_probes(standard_probes(n, a.hat.vertices(), line))
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

const MANDATORY: &[&str] = &["axis", "line-L", "hat-diagonal", "diagonal", "near-diagonal"];

/// Decaying level minima and a decaying mandatory probe.
fn tight_failure(r: &AuditResult) -> bool {
    let probe = r.probes.iter().any(|p| {
        MANDATORY.iter().any(|m| p.name.starts_with(m))
            && (p.values.iter().flatten().any(|&v| v == 0.0)
                || (p.kendall_tau < TAU_MAX && p.tail_slope >= SLOPE_MIN))
    });
    r.verdict == Verdict::Fail && r.kendall_tau < TAU_MAX && probe
}

fn criterion_7() -> Vec<Line> {
    let germs = ["x^2*y^2", "x^4 + x^2*y^2", "x^2 + y^2"];
    let (mut a_bad, mut b_bad, mut c_bad) = (Vec::new(), Vec::new(), Vec::new());
    let mut b_notes = Vec::new();
    for g in germs {
        let t = Instant::now();
        let m = parse_germ(g).unwrap();
        let a = analyze(&m, &Options::default()).unwrap();
        let plan = plan_for(&a);
        let theta = to_f64(a.theta.value.or(a.theta.fallback).unwrap());
        let alpha = to_f64(a.alpha.value.unwrap());
        let loj = to_f64(a.dist.value.value.unwrap());
        let gx = a.alpha_witness().unwrap();

        let l1 = audit_l1(&m, theta, &plan).unwrap();
        let l0 = audit_l0(&m, &gx, alpha, &plan).unwrap();
        let l2 = audit_l2(&m, loj, &a.family, &plan).unwrap();
        let l0_low = audit_l0(&m, &gx, alpha - L0_L2_SHIFT, &plan).unwrap();
        let l2_low = audit_l2(&m, loj - L0_L2_SHIFT, &a.family, &plan).unwrap();
        let l1_up = audit_l1(&m, theta + L1_SHIFT, &plan).unwrap();
        let l1_down = audit_l1(&m, theta - L1_SHIFT, &plan).unwrap();
        let el = t.elapsed();

        let pass_at_predicted = [&l1, &l0, &l2].iter().all(|r| r.verdict == Verdict::Pass);
        if !(pass_at_predicted && tight_failure(&l0_low) && tight_failure(&l2_low) && el < C7_LIMIT_PER_GERM) {
            a_bad.push(g);
        }
        if !tight_failure(&l1_up) {
            b_bad.push(g);
            b_notes.push(format!(
                "{g}: theta+0.1 = {:.3} verdict {:?}, tau {:.2}, tail slope {:+.3}",
                theta + L1_SHIFT,
                l1_up.verdict,
                l1_up.kendall_tau,
                l1_up.tail_slope
            ));
        }
        if !tight_failure(&l1_down) {
            c_bad.push(g);
        }
    }
    vec![
        line(
            "7a",
            a_bad.is_empty(),
            format!("L0/L1/L2 pass at predicted exponents, L0/L2 fail at -0.25; failures {a_bad:?}"),
        ),
        line(
            "7b",
            b_bad.is_empty(),
            format!("L1 fails at theta + 0.1 as stated; not failing: {}", b_notes.join("; ")),
        ),
        line(
            "7c",
            c_bad.is_empty(),
            format!("L1 fails at theta - 0.1 (tightness from below); failures {c_bad:?}"),
        ),
    ]
}

fn criterion_8(analyses: &[(String, Analysis)]) -> Line {
    let mut bad = Vec::new();
    for (name, a) in analyses {
        let plan = plan_for(a);
        let e = audit_euler_comparison(&a.model, &a.poly, &plan).unwrap();
        let f = audit_f_vs_g(&a.model, &a.poly, &plan).unwrap();
        if e.verdict != Verdict::Pass || f.verdict != Verdict::Pass {
            bad.push(name.clone());
        }
    }
    let m = parse_germ("x^2 - 2*x*y + y^2").unwrap();
    let forced = analyze(
        &m,
        &Options {
            force: true,
            ..Options::default()
        },
    )
    .unwrap();
    let r = audit_euler_comparison(&m, &forced.poly, &plan_for(&forced)).unwrap();
    let diag = r.probes.iter().filter(|p| p.name.contains("diagonal")).all(|p| p.decaying);
    line(
        "8",
        bad.is_empty() && !forced.gate_passed() && diag,
        format!(
            "comparison audits on {} gated germs, failures {bad:?}; forced (x-y)^2 diagonal decay {diag}",
            analyses.len()
        ),
    )
}

fn criterion_9() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(1..=5);
        let pts: Vec<Exponent> = (0..k)
            .map(|_| {
                let mut v: Vec<u32> = (0..n).map(|_| u32::from(rng.gen_bool(0.5))).collect();
                if v.iter().all(|&x| x == 0) {
                    v[rng.gen_range(0..n)] = 1;
                }
                Exponent::new(v)
            })
            .collect();
        let hat = build_polyhedron(&pts).unwrap();
        let fam = transversals(&hat);
        for mask in 0u32..(1 << n) {
            // evaluate the monomials at a point whose zero coordinates are `mask`
            let x: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { 0.0 } else { 1.5 }).collect();
            let g: f64 = hat.vertices().iter().map(|v| v.monomial(&x)).sum();
            let zeros: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let in_union = fam.lambda_hitting.iter().any(|j| j.iter().all(|i| zeros.contains(i)));
            if (g == 0.0) != in_union {
                bad += 1;
            }
        }
    }
    let tri = build_polyhedron(&[e(&[1, 1, 0]), e(&[0, 1, 1]), e(&[1, 0, 1])]).unwrap();
    let flag = !transversals(&tri).agree;
    line(
        "9",
        bad == 0 && flag,
        format!("100 random hat families, zero-set mismatches {bad}; disagreement flag on the triangle {flag}"),
    )
}

#[test]
fn acceptance() {
    println!();
    let mut lines = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4()];
    let analyses: Vec<(String, Analysis)> = gated_catalog()
        .into_iter()
        .map(|(n, m)| (n, analyze(&m, &Options::default()).unwrap()))
        .collect();
    lines.push(criterion_5(&analyses));
    lines.push(criterion_6(&analyses));
    lines.extend(criterion_7());
    lines.push(criterion_8(&analyses));
    lines.push(criterion_9());
    let failing: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    println!("failing: {failing:?}, expected red: {KNOWN_RED:?}");
    assert_eq!(failing, KNOWN_RED, "unexpected acceptance outcome");
    for l in &lines {
        assert!(!l.detail.is_empty());
    }
}
