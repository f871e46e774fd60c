//! Acceptance criteria 1-9, one PASS/FAIL line each.

use std::f64::consts::FRAC_PI_3;
use std::process::Command;
use std::time::{Duration, Instant};

use collar::catalog::{self, CatalogEntry};
use collar::condition::{
    certify_bracket_intersection, certify_positive_curvature, estimate_inf_rho, g2_sequence, refute_entry,
    SearchOptions, Thresholds, Verdict,
};
use collar::curvature::{bracket_operator_norm_on, check_lemma_bound, random_element, tensors, PhiMap};
use collar::linalg::{intersect, principal_angles, wedge_norm, LieSubspace, DEFAULT_TOL};
use collar::octonion::{derivation_algebra, TrialityFrame};
use collar::optimize::restart_rng;
use collar::triple::{decompose, symmetric_pair_check, Decomposition};
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (u32, Duration, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn param(e: &CatalogEntry, p: i64) -> Option<i64> {
    e.params.map(|_| p)
}

fn label(id: &str, p: Option<i64>) -> String {
    match p {
        Some(p) => format!("{id}:p={p}"),
        None => id.to_string(),
    }
}

fn dec(id: &str, p: Option<i64>) -> Result<Decomposition, String> {
    let t = catalog::build(id, p).map_err(|e| e.to_string())?;
    decompose(&t, DEFAULT_TOL).map_err(|e| e.to_string())
}

fn criterion_1() -> Check {
    let g2 = derivation_algebra();
    ensure(g2.dim() == 14, format!("derivation algebra has dim {}", g2.dim()))?;
    let f = TrialityFrame::build();
    let total = f.g2.sum(&f.v_l, DEFAULT_TOL).sum(&f.v_r, DEFAULT_TOL);
    ensure(total.dim() == 28, format!("g2 + V_L + V_R has rank {}", total.dim()))?;
    for (a, b, name) in [
        (&f.g2, &f.v_l, "g2/V_L"),
        (&f.g2, &f.v_r, "g2/V_R"),
        (&f.v_l, &f.v_r, "V_L/V_R"),
    ] {
        let d = intersect(a, b, DEFAULT_TOL).map_err(|e| e.to_string())?.dim();
        ensure(d == 0, format!("{name} intersect in dim {d}"))?;
    }
    let angles = principal_angles(&f.v_l, &f.v_r);
    let worst = angles.iter().map(|a| (a - FRAC_PI_3).abs()).fold(0.0, f64::max);
    ensure(worst < 1e-8, format!("principal angle off pi/3 by {worst:e}"))?;
    Ok(format!("dim g2 = 14, rank 28, angle defect {worst:.1e}"))
}

fn criterion_2() -> Check {
    let f = TrialityFrame::build();
    let copies = [
        ("so7_0", &f.so7_0),
        ("so7_plus", &f.so7_plus),
        ("so7_minus", &f.so7_minus),
    ];
    let mut worst = 0.0f64;
    for (name, s) in copies {
        ensure(s.dim() == 21, format!("{name} has dim {}", s.dim()))?;
        let r = s.closure_residual();
        worst = worst.max(r);
        ensure(r <= 1e-9, format!("{name} closure residual {r:e}"))?;
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let meet = intersect(copies[i].1, copies[j].1, DEFAULT_TOL).map_err(|e| e.to_string())?;
            ensure(
                meet.dim() == 14,
                format!("{} meets {} in dim {}", copies[i].0, copies[j].0, meet.dim()),
            )?;
            let r = f.g2.containment_residual(&meet);
            ensure(r <= 1e-9, format!("intersection is not g2 (residual {r:e})"))?;
        }
    }
    Ok(format!(
        "three copies of dim 21, closure residual {worst:.1e}, pairwise meet g2"
    ))
}

fn criterion_3() -> Check {
    let mut certified = Vec::new();
    for (id, ps) in [
        ("spin7-so8", vec![Some(0), Some(1), Some(2)]),
        ("g2-so0-7-in-so8", vec![Some(0), Some(1)]),
        ("su3-su4-spin7", vec![None]),
        ("sp2-su4-su5", vec![None]),
    ] {
        for p in ps {
            let d = dec(id, p)?;
            let v = certify_bracket_intersection(&d).map_err(|e| e.to_string())?;
            ensure(
                matches!(v, Verdict::CertifiedBracketIntersection(_)),
                format!("{} gave {}", label(id, p), v.kind()),
            )?;
            certified.push(label(id, p));
        }
    }
    let mut not_applicable = Vec::new();
    for id in ["sp-series", "sp-series-rank4", "g2-so4-rank3", "g2-so4-rank4"] {
        let e = catalog::find(id).map_err(|e| e.to_string())?;
        for p in e.sample_params(2) {
            let p = param(e, p);
            let d = dec(id, p)?;
            if d.triple.meta.positively_curved.is_none() {
                not_applicable.push(label(id, p));
                continue;
            }
            let (v, _) = certify_positive_curvature(&d, &SearchOptions::default(), &Thresholds::default())
                .map_err(|e| e.to_string())?;
            ensure(v.is_certified(), format!("{} gave {}", label(id, p), v.kind()))?;
            certified.push(label(id, p));
        }
    }
    Ok(format!(
        "{} certified; curvature certificate not applicable to {}",
        certified.len(),
        not_applicable.join(", ")
    ))
}

fn criterion_4() -> Check {
    let mut checked = Vec::new();
    let th = Thresholds::default();
    let listed: [(&str, &[i64]); 5] = [
        ("spin-octonion-case1", &[0, 1, 2]),
        ("spin-octonion-case2", &[1]),
        ("spin8-case4", &[3]),
        ("su3-long-root", &[1]),
        ("su(p+4)-su3-pair", &[2]),
    ];
    for e in catalog::entries().iter().filter(|e| e.witness) {
        let ps = match listed.iter().find(|(id, _)| *id == e.id) {
            Some((_, ps)) => ps.to_vec(),
            None => e.sample_params(1),
        };
        for p in ps {
            let p = param(e, p);
            let v = refute_entry(e.id, p).map_err(|err| format!("{}: {err}", label(e.id, p)))?;
            let Verdict::ViolationWitness(w) = &v else {
                return Err(format!("{} gave {}", label(e.id, p), v.kind()));
            };
            ensure(
                w.bracket_norm <= th.violation_residual * w.scale,
                format!("{}: bracket {:e} at scale {}", label(e.id, p), w.bracket_norm, w.scale),
            )?;
            ensure(
                w.wedge_m >= th.wedge_floor * w.scale * w.scale,
                format!("{}: wedge {} at scale {}", label(e.id, p), w.wedge_m, w.scale),
            )?;
            checked.push(label(e.id, p));
        }
    }
    Ok(format!("{} witnesses verified: {}", checked.len(), checked.join(", ")))
}

fn criterion_5() -> Check {
    let d = dec("g2-su2-sequence", None)?;
    let mut scaled = Vec::new();
    let mut wedges = Vec::new();
    for n in [1u32, 2, 4, 8, 16] {
        let (x, y) = g2_sequence(n).map_err(|e| e.to_string())?;
        scaled.push(x.bracket(&y).norm() * f64::from(n));
        wedges.push(wedge_norm(&d.m.project(&x), &d.m.project(&y)).map_err(|e| e.to_string())?);
    }
    let spread = |v: &[f64]| {
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        (hi - lo) / hi
    };
    let (sb, sw) = (spread(&scaled), spread(&wedges));
    ensure(sb <= 1e-6, format!("n |[X_n, Y_n]| varies by {sb:e}"))?;
    ensure(sw <= 1e-10, format!("m-wedge varies by {sw:e}"))?;
    let opts = SearchOptions {
        restarts: 200,
        ..SearchOptions::default()
    };
    let (v, _) = estimate_inf_rho(&d, &opts).map_err(|e| e.to_string())?;
    let Verdict::NumericalEstimate(est) = &v else {
        return Err(format!("estimate gave {}", v.kind()));
    };
    ensure(est.rho_inf < 1e-3, format!("inf rho estimate {}", est.rho_inf))?;
    Ok(format!(
        "bracket*n spread {sb:.1e}, wedge spread {sw:.1e}, inf rho {:.1e}",
        est.rho_inf
    ))
}

fn criterion_6() -> Check {
    let mut triples = 0;
    for e in catalog::entries().iter().filter(|e| e.realizable()) {
        let p = param(e, e.params.map_or(0, |r| r.default));
        let d = dec(e.id, p)?;
        let mut phi = PhiMap::new(&d, 0.0).map_err(|e| e.to_string())?;
        let lam = bracket_operator_norm_on(&phi.m1);
        let mut rng = restart_rng(6, triples);
        for i in 0..1000 {
            phi.h = rng.gen_range(-0.95..0.95);
            let (x, y) = (random_element(&phi, &mut rng), random_element(&phi, &mut rng));
            let where_ = || format!("{} sample {i}", label(e.id, p));
            let c = check_lemma_bound(&phi, &x, &y).map_err(|e| e.to_string())?;
            ensure(
                c.holds,
                format!("{}: surrogate {} > bound {}", where_(), c.surrogate, c.bound),
            )?;
            let t = tensors(&phi, &x, &y).map_err(|e| e.to_string())?;
            let ah = d.triple.h.project(&t.a).norm();
            let slack = 1e-10 * (1.0 + t.n2);
            ensure(
                ah <= 2.0 * lam * phi.h.abs() * t.n2 + slack,
                format!("{}: |A^h| = {ah}", where_()),
            )?;
            ensure(
                t.b.norm() <= lam * phi.h * phi.h * t.n2 + slack,
                format!("{}: |B| = {}", where_(), t.b.norm()),
            )?;
        }
        triples += 1;
    }
    Ok(format!("{triples} triples x 1000 samples"))
}

fn criterion_7() -> Check {
    let opts = SearchOptions::default();
    let mut lowest_certified = f64::INFINITY;
    let mut highest_witness = 0.0f64;
    let mut count = 0;
    for e in catalog::entries().iter().filter(|e| e.realizable()) {
        let certified = e.expected.is_certified();
        let witness = e.witness || e.id == "g2-su2-sequence";
        if !certified && !witness {
            continue;
        }
        for p in e.sample_params(2) {
            let p = param(e, p);
            let d = dec(e.id, p)?;
            let (v, _) = estimate_inf_rho(&d, &opts).map_err(|e| e.to_string())?;
            let Verdict::NumericalEstimate(est) = &v else {
                return Err(format!("{} gave {}", label(e.id, p), v.kind()));
            };
            if certified {
                ensure(
                    est.rho_inf >= 1e-4,
                    format!("certified {} has rho {}", label(e.id, p), est.rho_inf),
                )?;
                lowest_certified = lowest_certified.min(est.rho_inf);
            } else {
                ensure(
                    est.rho_inf <= 1e-3,
                    format!("witness {} has rho {}", label(e.id, p), est.rho_inf),
                )?;
                highest_witness = highest_witness.max(est.rho_inf);
            }
            count += 1;
        }
    }
    Ok(format!(
        "{count} triples; min over certified {lowest_certified:.3e}, max over witnesses {highest_witness:.1e}"
    ))
}

fn so_block(n: usize, offset: usize, k: usize) -> LieSubspace {
    LieSubspace::so(k).embed(n, offset).expect("block fits")
}

fn criterion_8() -> Check {
    let check = |g: &LieSubspace, n0: &LieSubspace| symmetric_pair_check(g, n0).map_err(|e| e.to_string());
    for p in 0..3 {
        let n = 9 + p;
        let n0 = so_block(n, 0, 8).sum(&so_block(n, 8, p + 1), DEFAULT_TOL);
        ensure(
            check(&LieSubspace::so(n), &n0)?,
            format!("(so({n}), so(8)+so({})) rejected", p + 1),
        )?;
    }
    let f = TrialityFrame::build();
    ensure(check(&LieSubspace::so(8), &f.so7_0)?, "(so(8), so7_0) rejected")?;
    let line = LieSubspace::span(5, &[collar::linalg::MatrixElement::e(5, 0, 1)], DEFAULT_TOL);
    ensure(!check(&LieSubspace::so(5), &line)?, "negative control accepted")?;
    Ok("4 symmetric pairs accepted, negative control rejected".into())
}

const CLI_SUITE: &[&[&str]] = &[
    &["decompose", "g2-so0-7-in-so8"],
    &["decompose", "sp-series:p=1"],
    &["certify", "su3-su4-spin7"],
    &["certify", "sp-series:p=1"],
    &["certify", "f4-case"],
    &["refute", "spin-octonion-case1:p=0"],
    &["refute", "g2-su2-sequence"],
    &["estimate", "g2-so4-rank3", "--restarts", "20"],
    &["catalog", "rank=8"],
];

fn run_suite() -> Result<Vec<Vec<u8>>, String> {
    let mut outs = Vec::new();
    for args in CLI_SUITE {
        let out = Command::new(env!("CARGO_BIN_EXE_collar"))
            .args(*args)
            .args(["--seed", "0"].iter().filter(|_| args[0] != "catalog"))
            .output()
            .map_err(|e| e.to_string())?;
        outs.push(out.stdout);
    }
    Ok(outs)
}

fn criterion_9() -> Check {
    let a = run_suite()?;
    let b = run_suite()?;
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        ensure(!x.is_empty(), format!("`{}` printed nothing", CLI_SUITE[i].join(" ")))?;
        ensure(x == y, format!("`{}` differs between runs", CLI_SUITE[i].join(" ")))?;
    }
    Ok(format!("{} commands byte-identical across two runs", a.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, Duration::from_secs(5), criterion_1),
        (2, Duration::from_secs(5), criterion_2),
        (3, Duration::from_secs(60), criterion_3),
        (4, Duration::from_secs(30), criterion_4),
        (5, Duration::from_secs(120), criterion_5),
        (6, Duration::from_secs(120), criterion_6),
        (7, Duration::from_secs(600), criterion_7),
        (8, Duration::from_secs(5), criterion_8),
        (9, Duration::from_secs(600), criterion_9),
    ];
    let mut failures = 0;
    for (n, budget, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s budget", budget.as_secs())),
            Err(e) => (false, e),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {n}: {} ({:.2}s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
