//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;

use nbhd_core::builder::{roundtrip, RoundtripOptions, RoundtripVerdict};
use nbhd_core::conjugacy::decide_conjugate_tuple;
use nbhd_core::exec::Execution;
use nbhd_core::invariant::{check_realizability, decide_equivalence, BifoliatedInvariant, CheckKind, EquivalenceMode};
use nbhd_core::jet::{exp_flow, log_flow};
use nbhd_core::normal_form::{
    normalize_tangential, normalize_transverse, push_forward, tangential_pair, transverse_pair, wedge_tangency,
};
use nbhd_core::series::Series;
use nbhd_core::surface::{coboundary, cocycle_with_periods, period, period_map_p, Nerve};
use nbhd_core::surface::{a_normalize_class, ueda_form_from_pair, SurfaceModel};
use nbhd_core::synth::{self, bifoliated, ueda_form, TupleShape};
use nbhd_core::{DiffeoTuple, JetDiffeo, Scalar};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn with_coeff(f: &JetDiffeo, d: usize, c: Scalar) -> JetDiffeo {
    let mut s = f.series().clone();
    s.set_coeff(d, c);
    JetDiffeo::new(s).unwrap()
}

fn bump(f: &JetDiffeo, d: usize) -> JetDiffeo {
    with_coeff(f, d, &f.coeff(d) + &Scalar::one())
}

/// Inverse of `t + t²` by iterating `g ← t − g²` on plain integer polynomials.
fn catalan_fixed_point(n: usize) -> Vec<i64> {
    let mut g = vec![0i64; n + 1];
    g[1] = 1;
    for _ in 0..n {
        let mut next = vec![0i64; n + 1];
        next[1] = 1;
        for i in 1..=n {
            for j in 1..=n - i {
                next[i + j] -= g[i] * g[j];
            }
        }
        g = next;
    }
    g
}

fn signed_catalan(d: usize) -> i64 {
    // C_{d-1} = binom(2d-2, d-1)/d
    let m = (d - 1) as i64;
    let mut c: i64 = 1;
    for i in 0..m {
        c = c * (2 * m - i) / (i + 1);
    }
    let c = c / (m + 1);
    if d % 2 == 1 {
        c
    } else {
        -c
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = synth::rng(101);
    for i in 0..200 {
        let f = synth::jet(&mut rng, 32);
        let g = f.series().comp_inverse().map_err(|e| e.to_string())?;
        let fg = f.series().compose(&g).map_err(|e| e.to_string())?;
        let gf = g.compose(f.series()).map_err(|e| e.to_string())?;
        ensure(fg == Series::identity(32) && gf == Series::identity(32), || {
            format!("jet {i}: f∘f⁻¹ ≠ t")
        })?;
    }
    let inv = Series::from_ints(12, &[0, 1, 1]).comp_inverse().map_err(|e| e.to_string())?;
    let brute = catalan_fixed_point(12);
    for (d, &b) in brute.iter().enumerate().skip(1) {
        let c = Scalar::from_int(b);
        ensure(inv.coeff(d) == c && b == signed_catalan(d), || {
            format!("degree {d}: got {}, brute force {b}", inv.coeff(d))
        })?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("200 inverses at N=32, Catalan through 12, {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let mut rng = synth::rng(202);
    for i in 0..100 {
        let k = rng.gen_range(1..=4);
        let f = synth::ti_jet(&mut rng, 24, k);
        let v = log_flow(&f).map_err(|e| e.to_string())?;
        ensure(exp_flow(&v, &Scalar::one()) == f, || format!("jet {i}: exp(log f) ≠ f"))?;
    }
    for i in 0..20 {
        let v = synth::vector_field(&mut rng, 24);
        let a = exp_flow(&v, &synth::nonzero_scalar(&mut rng));
        let b = exp_flow(&v, &synth::nonzero_scalar(&mut rng));
        ensure(JetDiffeo::commutator(&a, &b).is_identity(), || format!("field {i}: commutator ≠ id"))?;
    }
    Ok("100 round trips at N=24, 20 commuting time maps".into())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let n = 16;
    let results = Execution::Parallel.map_range(100, |i| -> Result<(), String> {
        let mut rng = synth::rng(300 + i as u64);
        let k1 = rng.gen_range(2..=3);
        let mut entries = vec![synth::ti_jet(&mut rng, n, 1), synth::ti_jet(&mut rng, n, k1)];
        entries.extend((2..9).map(|_| {
            let k = rng.gen_range(1..=3);
            synth::ti_jet(&mut rng, n, k)
        }));
        let a = DiffeoTuple::new(entries).unwrap();
        let psi = synth::conjugator(&mut rng, n);
        let b = a.conjugate_by(&psi);
        let d = decide_conjugate_tuple(&a, &b).map_err(|e| e.to_string())?;
        let cert = d.certificate().ok_or_else(|| format!("tuple {i}: no certificate ({d:?})"))?;
        ensure(a.conjugate_by(cert) == b, || format!("tuple {i}: certificate does not verify"))?;

        let candidates: Vec<usize> = (1..9)
            .filter(|&e| a.entries()[e].tangency_order().unwrap().finite().is_some_and(|t| t > 1))
            .collect();
        let e = candidates[rng.gen_range(0..candidates.len())];
        let df = rng.gen_range(k1 + 3..=n);
        let mut faulty = b.entries().to_vec();
        faulty[e] = bump(&faulty[e], df);
        let faulty = DiffeoTuple::new(faulty).unwrap();
        let d = decide_conjugate_tuple(&a, &faulty).map_err(|e| e.to_string())?;
        let o = d
            .obstruction()
            .ok_or_else(|| format!("tuple {i}: fault at entry {e} degree {df} gave {d:?}"))?;
        ensure(o.order == df, || {
            format!("tuple {i}: fault at entry {e} degree {df}, obstruction order {}", o.order)
        })
    });
    results.into_iter().collect::<Result<Vec<_>, _>>()?;
    within(Duration::from_secs(30), start)?;
    Ok(format!("100 tuples of 9 at N=16 with faults, {:.2?}", start.elapsed()))
}

/// Random walk of `len` steps from `start`, closed by a shortest path back.
fn closed_walk<R: Rng>(rng: &mut R, nerve: &Nerve, start: usize, len: usize) -> Vec<usize> {
    let mut walk = vec![start];
    for _ in 0..len {
        let nb = nerve.neighbors(*walk.last().unwrap());
        walk.push(nb[rng.gen_range(0..nb.len())]);
    }
    let from = *walk.last().unwrap();
    let mut prev = vec![usize::MAX; nerve.vertex_count()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for w in nerve.neighbors(v) {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut back = vec![start];
    let mut v = start;
    while v != from {
        v = prev[v];
        back.push(v);
    }
    back.pop();
    walk.extend(back.into_iter().rev());
    walk
}

fn criterion_4() -> Outcome {
    let mut rng = synth::rng(404);
    for g in [2, 3] {
        let nerve = Arc::new(Nerve::polygon(g));
        for c in 0..50 {
            let b: Vec<Scalar> = (0..nerve.vertex_count()).map(|_| synth::scalar(&mut rng)).collect();
            let cob = coboundary(nerve.clone(), &b);
            for _ in 0..20 {
                let start = rng.gen_range(0..nerve.vertex_count());
                let len = rng.gen_range(1..=12);
                let walk = closed_walk(&mut rng, &nerve, start, len);
                let p = period(&cob, &walk).map_err(|e| e.to_string())?;
                ensure(p.is_zero(), || format!("genus {g} coboundary {c}: period {p} along {walk:?}"))?;
            }
        }
        let surface = SurfaceModel::standard(g).unwrap();
        for i in 0..50 {
            let periods: Vec<Scalar> = (0..2 * g).map(|_| synth::scalar(&mut rng)).collect();
            let (_, normalized) = a_normalize_class(&periods, &surface);
            let cocycle = cocycle_with_periods(nerve.clone(), &normalized).map_err(|e| e.to_string())?;
            let measured = period_map_p(&cocycle, nerve.basis_walks()).map_err(|e| e.to_string())?;
            ensure(measured[..g].iter().all(Scalar::is_zero) && measured == normalized, || {
                format!("genus {g} class {i}: measured periods {measured:?}")
            })?;
            let (w, again) = a_normalize_class(&normalized, &surface);
            ensure(w.iter().all(Scalar::is_zero) && again == normalized, || {
                format!("genus {g} class {i}: normalization not idempotent")
            })?;
        }
    }
    Ok("genus 2 and 3: 50 coboundaries x 20 walks, 50 normalizations".into())
}

fn only_fails(report: &nbhd_core::invariant::RealizabilityReport, kind: CheckKind) -> bool {
    report.failing() == vec![kind]
}

fn criterion_5() -> Outcome {
    let surface = SurfaceModel::standard(2).unwrap();
    for seed in 0..50u64 {
        let mut rng = synth::rng(500 + seed);
        let k = 1 + (seed % 3) as usize;
        let n = 2 * k + 4;
        let omega = ueda_form(&mut rng, &surface, k);
        let shape = if seed % 2 == 0 { TupleShape::Canonical } else { TupleShape::Abelian };
        let inv = bifoliated(&mut rng, 2, k, n, &omega, shape);
        let check = |i: &BifoliatedInvariant| check_realizability(i, k, &omega, &surface).map_err(|e| e.to_string());
        let r = check(&inv)?;
        ensure(r.passed(), || format!("seed {seed}: synthesized tuple fails {:?}", r.failing()))?;

        let t = &inv.transports().entries()[0];
        let flipped = with_coeff(t, k + 1, -&t.coeff(k + 1));
        let bad = inv.with_transports(DiffeoTuple::new(vec![flipped]).unwrap()).unwrap();
        let r = check(&bad)?;
        ensure(only_fails(&r, CheckKind::Transports), || {
            format!("seed {seed}: sign flip fails {:?}", r.failing())
        })?;

        let inv = bifoliated(&mut rng, 2, k, n, &omega, TupleShape::Canonical);
        let mut f = inv.rho_f().entries().to_vec();
        let slot = 2 + rng.gen_range(0..2);
        f[slot] = bump(&f[slot], k + 1);
        let bad = BifoliatedInvariant::new(2, DiffeoTuple::new(f).unwrap(), inv.rho_g().clone(), inv.transports().clone())
            .unwrap();
        let r = check(&bad)?;
        ensure(only_fails(&r, CheckKind::Periods), || {
            format!("seed {seed}: holonomy perturbation fails {:?}", r.failing())
        })?;
    }
    Ok("50 seeds pass; sign flips fail only (iii), holonomy shifts only (ii)".into())
}

fn criterion_6() -> Outcome {
    for i in 0..50u64 {
        let mut rng = synth::rng(600 + i);
        let k = 1 + (i / 2 % 2) as usize;
        let n = 2 * k + 3;
        let m = 4usize.max(n - k - 1);
        let phi0 = synth::local_diffeo2(&mut rng, n, m);
        if i % 2 == 0 {
            let a = vec![
                synth::scalar(&mut rng),
                synth::nonzero_scalar(&mut rng),
                synth::scalar(&mut rng),
                synth::scalar(&mut rng),
            ];
            let (f0, g0) = transverse_pair(n, m, k, &a);
            let (f, g) = push_forward(&phi0, &f0, &g0);
            let out = normalize_transverse(&f, &g).map_err(|e| format!("case {i}: {e}"))?;
            ensure(out.phi.agrees_with(&phi0) && out.a[..a.len()] == a[..], || {
                format!("case {i}: transverse data not recovered")
            })?;
            ensure(out.trace.max_free_parameters() == 0, || format!("case {i}: free parameters"))?;
            ensure(out.k == k && wedge_tangency(&f, &g).map(|w| w.k) == Ok(k), || {
                format!("case {i}: tangency {} vs {k}", out.k)
            })?;
        } else {
            let b = synth::ti_jet(&mut rng, n, k);
            let a = vec![
                Scalar::zero(),
                Scalar::zero(),
                synth::nonzero_scalar(&mut rng),
                synth::scalar(&mut rng),
            ];
            let (f0, g0) = tangential_pair(n, m, k, &b, &a);
            let (f, g) = push_forward(&phi0, &f0, &g0);
            let out = normalize_tangential(&f, &g).map_err(|e| format!("case {i}: {e}"))?;
            ensure(out.b == b && out.phi.agrees_with(&phi0) && out.a[..a.len()] == a[..], || {
                format!("case {i}: tangential data not recovered")
            })?;
            ensure(out.trace.max_free_parameters() == 0, || format!("case {i}: free parameters"))?;
            ensure(out.k == k && wedge_tangency(&f, &g).map(|w| w.k) == Ok(k), || {
                format!("case {i}: tangency {} vs {k}", out.k)
            })?;
        }
    }
    Ok("50 pushforwards recovered, zero free parameters".into())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let g3 = {
        let tau = [["2*i", "1", "0"], ["1", "2*i", "0"], ["0", "0", "i"]];
        SurfaceModel::new(
            3,
            tau.iter().map(|r| r.iter().map(|s| s.parse().unwrap()).collect()).collect(),
            nbhd_core::surface::default_zero_labels(3),
        )
        .unwrap()
    };
    let cases: Vec<(usize, u64)> = (0..25).map(|i| (2, i)).chain((0..10).map(|i| (3, i))).collect();
    let results = Execution::Parallel.map(&cases, |&(genus, i)| -> Result<(), String> {
        let surface = if genus == 2 { SurfaceModel::standard(2).unwrap() } else { g3.clone() };
        let mut rng = synth::rng(700 + 100 * genus as u64 + i);
        let k = 1 + (i % if genus == 2 { 3 } else { 2 }) as usize;
        let n = 2 * k + 4;
        let omega = ueda_form(&mut rng, &surface, k);
        let shape = if i % 2 == 0 { TupleShape::Canonical } else { TupleShape::Abelian };
        let inv = bifoliated(&mut rng, genus, k, n, &omega, shape);
        let opts = RoundtripOptions {
            seed: i,
            exec: Execution::Sequential,
            fault: None,
        };
        let v = roundtrip(&inv, k, &omega, &surface, &opts).map_err(|e| e.to_string())?;
        let psi = v.certificate().ok_or_else(|| format!("g={genus} case {i}: {v:?}"))?;
        ensure(inv.conjugate_by(psi) == inv, || format!("g={genus} case {i}: certificate does not verify"))?;

        let j = rng.gen_range(0..inv.transports().len());
        let d = rng.gen_range(k + 2..=n);
        let fault = bump(&inv.transports().entries()[j], d);
        let opts = RoundtripOptions {
            fault: Some((j, fault)),
            ..opts
        };
        match roundtrip(&inv, k, &omega, &surface, &opts).map_err(|e| e.to_string())? {
            RoundtripVerdict::Mismatch { entry, degree, .. } => ensure(entry == 4 * genus + j && degree == Some(d), || {
                format!("g={genus} case {i}: fault ({j}, {d}) located at ({entry}, {degree:?})")
            }),
            v => Err(format!("g={genus} case {i}: fault ({j}, {d}) not detected: {v:?}")),
        }
    });
    results.into_iter().collect::<Result<Vec<_>, _>>()?;
    within(Duration::from_secs(60), start)?;
    Ok(format!("25 at g=2, 10 at g=3, faults located, {:.2?}", start.elapsed()))
}

fn criterion_8() -> Outcome {
    let surface = SurfaceModel::standard(2).unwrap();
    for i in 0..20u64 {
        let mut rng = synth::rng(800 + i);
        let k = 1 + (i % 2) as usize;
        let n = 2 * k + 4;
        let omega = ueda_form(&mut rng, &surface, k);
        let shape = if i % 2 == 0 { TupleShape::Canonical } else { TupleShape::Abelian };
        let a = bifoliated(&mut rng, 2, k, n, &omega, shape);
        let psi = loop {
            let psi = synth::conjugator(&mut rng, n);
            if !psi.linear_part().pow(k as i64).unwrap().is_one() {
                break psi;
            }
        };
        let b = a.conjugate_by(&psi);
        let d = decide_equivalence(&a, &b, EquivalenceMode::UpToScale, Execution::Sequential)
            .map_err(|e| e.to_string())?;
        let cert = d.certificate().ok_or_else(|| format!("case {i}: {d:?}"))?;
        ensure(a.conjugate_by(cert) == b, || format!("case {i}: certificate does not verify"))?;
        let s_k = cert.linear_part().pow(-(k as i64)).unwrap();
        ensure(!s_k.is_one(), || format!("case {i}: certificate has s^k = 1"))?;
        let wa = ueda_form_from_pair(a.rho_f().entries(), a.rho_g().entries(), &surface).map_err(|e| e.to_string())?;
        let wb = ueda_form_from_pair(b.rho_f().entries(), b.rho_g().entries(), &surface).map_err(|e| e.to_string())?;
        ensure(wa.k == k && wb.k == k, || format!("case {i}: index changed"))?;
        ensure(wb.periods() == wa.scaled(&s_k).periods(), || {
            format!("case {i}: periods {:?} vs {:?} scaled by {s_k}", wb.periods(), wa.periods())
        })?;
    }
    Ok("20 certificates, periods scale by s^-k".into())
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run_cli(args: &[String]) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_nbhd")).args(args).output().expect("runs");
    (out.status.code().unwrap_or(-1), out.stdout, out.stderr)
}

fn fixture_commands() -> Vec<Vec<String>> {
    let mut cmds: Vec<Vec<&str>> = Vec::new();
    for f in [
        "valid_g2_k1.toml",
        "wrong_sign_g2_k1.toml",
        "valid_g3_k2.toml",
        "broken_relation_g2_k2.toml",
        "equiv_a.toml",
        "malformed_scalar.toml",
    ] {
        cmds.push(vec!["check", f]);
    }
    for f in ["valid_g2_k1.toml", "neighborhood_g2_k1.toml", "broken_relation_g2_k2.toml"] {
        cmds.push(vec!["relation", f]);
    }
    for f in ["valid_g2_k1.toml", "neighborhood_g2_k1.toml", "valid_g3_k2.toml", "equiv_a.toml"] {
        cmds.push(vec!["canon", f]);
        cmds.push(vec!["ueda", f]);
    }
    for f in ["valid_g2_k1.toml", "valid_g3_k2.toml", "wrong_sign_g2_k1.toml"] {
        cmds.push(vec!["roundtrip", f]);
        cmds.push(vec!["--seed", "7", "roundtrip", f]);
    }
    for b in [
        "equiv_a.toml",
        "equiv_b_conjugate.toml",
        "equiv_b_scaled.toml",
        "equiv_b_fault.toml",
        "equiv_b_doubled.toml",
    ] {
        cmds.push(vec!["equiv", "equiv_a.toml", b]);
        cmds.push(vec!["--scale-quotient", "equiv", "equiv_a.toml", b]);
    }
    cmds.into_iter()
        .map(|c| {
            c.into_iter()
                .map(|a| if a.ends_with(".toml") { fixture(a) } else { a.to_string() })
                .collect()
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cmds = fixture_commands();
    let mut verified = 0;
    for (i, args) in cmds.iter().enumerate() {
        let first = run_cli(args);
        let second = run_cli(args);
        ensure(first == second, || format!("{args:?}: outputs differ between runs"))?;
        let stdout = String::from_utf8_lossy(&first.1);
        let has_certificate = stdout.lines().any(|l| l.starts_with("certificate = ") || l.starts_with("conjugator = "));
        if !has_certificate {
            continue;
        }
        let report: PathBuf = dir.path().join(format!("report{i}.toml"));
        std::fs::write(&report, &first.1).map_err(|e| e.to_string())?;
        let mut vargs = vec!["--verify-certificate".to_string(), report.display().to_string()];
        vargs.extend(args.iter().cloned());
        let (code, out, _) = run_cli(&vargs);
        let out = String::from_utf8_lossy(&out);
        ensure(code == 0 && !out.contains("verified = false"), || {
            format!("{args:?}: certificate did not re-verify (exit {code})\n{out}")
        })?;
        verified += 1;
    }
    ensure(verified > 0, || "no certificates were printed".into())?;
    Ok(format!("{} commands byte-identical, {verified} reports re-verified", cmds.len()))
}

type Check = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("series algebra", criterion_1),
        ("flow calculus", criterion_2),
        ("conjugacy decision", criterion_3),
        ("period layer", criterion_4),
        ("compatibility equations", criterion_5),
        ("normal forms", criterion_6),
        ("round trip", criterion_7),
        ("scaling law", criterion_8),
        ("cli determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS [{detail}] ({:.2?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL [{why}] ({:.2?})", i + 1, start.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
