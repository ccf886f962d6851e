//! One line per acceptance criterion. All comparisons are exact.

mod common;

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trirank::category::{ObjectExpr, TrianglePresentation};
use trirank::functor::sigma_orbits;
use trirank::qrank::{morphisms_from_objects, q_plus_one_regular, Element, Instance, QRankError, QRankFunction};
use trirank::rank::{FromValues, RankFunction};
use trirank::{CategoryPresentation, Scalar};
use trirank_cli::format::{parse_presentation, serialize_presentation};

use common::*;

type Cat = Arc<CategoryPresentation>;
type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

const SAMPLES: usize = 100;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int(v: i64) -> Scalar {
    Scalar::from_integer(v.into())
}

fn load(file: &str) -> Cat {
    let text = std::fs::read_to_string(fixture_path(file)).unwrap();
    Arc::new(parse_presentation(&text).unwrap())
}

fn built(n: usize) -> Result<Cat, String> {
    let r = run(&["build-an", "--n", &n.to_string()]);
    ensure(r.code == 0, || format!("build-an --n {n} exited {}", r.code))?;
    parse_presentation(&r.stdout).map(Arc::new).map_err(|e| e.to_string())
}

fn shipped() -> Vec<(&'static str, Cat)> {
    vec![("A1", load("a1.trc")), ("A2", load("a2.trc")), ("A3", load("a3.trc"))]
}

fn orbit_function(p: &Cat, name: &str) -> RankFunction {
    RankFunction::orbit_indicator(p.clone(), p.object(name).unwrap())
}

/// ρ₁, ρ₂, ℓ on A₃.
fn a3_functions(p: &Cat) -> [RankFunction; 3] {
    [
        orbit_function(p, "T1"),
        orbit_function(p, "T2"),
        RankFunction::canonical_length(p.clone()),
    ]
}

fn random_function(p: &Cat, rng: &mut ChaCha8Rng, max: i64) -> RankFunction {
    let mut c = vec![Scalar::zero(); p.num_objects()];
    for o in sigma_orbits(p) {
        let v = int(rng.gen_range(0..=max));
        for &x in o.members() {
            c[x] = v.clone();
        }
    }
    RankFunction::new(p.clone(), c).unwrap()
}

fn value_on(rho: &RankFunction, x: usize) -> Scalar {
    rho.evaluate_on_object(&ObjectExpr::single(x)).unwrap()
}

fn criterion_1() -> Outcome {
    let p = built(3)?;
    ensure(p.num_objects() == 9, || format!("{} objects", p.num_objects()))?;
    ensure(p.sigma_order() == 6, || format!("Σ of order {}", p.sigma_order()))?;
    let mut sizes: Vec<usize> = sigma_orbits(&p).iter().map(|o| o.len()).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    ensure(sizes == [6, 3], || format!("orbit sizes {sizes:?}"))?;
    ensure(p.triangles().len() == 9, || format!("{} triangles", p.triangles().len()))?;
    for t in p.triangles() {
        let v = p.check_triangle(t);
        ensure(v.is_empty(), || format!("{}: {v:?}", t.name))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let p = load("a3.trc");
    let [rho1, rho2, ell] = a3_functions(&p);
    let middle = |x: usize| sigma_orbits(&p).iter().any(|o| o.len() == 3 && o.contains(x));
    for x in 0..p.num_objects() {
        ensure(value_on(&rho1, x) == int(2), || format!("ρ1({})", p.name(x)))?;
        let want = if middle(x) { 2 } else { 1 };
        ensure(value_on(&rho2, x) == int(want), || format!("ρ2({})", p.name(x)))?;
    }
    for rho in [&rho1, &rho2, &ell] {
        let values = rho.object_values();
        match RankFunction::from_object_values(p.clone(), &values, true).unwrap() {
            FromValues::Unique(back) => ensure(back == *rho, || "object table recovers another function".into())?,
            other => return Err(format!("object table not uniquely solvable: {other:?}")),
        }
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let p = load("a3.trc");
    let rho2 = orbit_function(&p, "T2");
    let f = p.morphism("f_T1_T3").ok_or("no f_T1_T3")?;
    let alpha = p.morphism("alpha_T1_T2").ok_or("no alpha_T1_T2")?;
    ensure(f.source() == &ObjectExpr::single(p.object("T1").unwrap()), || "f source".into())?;
    ensure(f.target() == &ObjectExpr::single(p.object("T3").unwrap()), || "f target".into())?;
    let (vf, va) = (rho2.evaluate(f).unwrap(), rho2.evaluate(alpha).unwrap());
    ensure(vf.is_zero(), || format!("ρ2(f) = {vf}"))?;
    ensure(va.is_one(), || format!("ρ2(α) = {va}"))
}

fn criterion_4() -> Outcome {
    let p = load("a3.trc");
    let ell = RankFunction::canonical_length(p.clone());
    let d = ell.decompose().unwrap();
    let parts: Vec<(String, usize, String)> = d
        .parts
        .iter()
        .map(|(o, m)| (p.name(o.smallest()).to_string(), o.len(), m.to_string()))
        .collect();
    let want = [("T1".to_string(), 6, "1".to_string()), ("T2".to_string(), 3, "1".to_string())];
    ensure(parts == want, || format!("parts {parts:?}"))?;
    ensure(d.recompose(p.num_objects()) == ell.coefficients(), || "ℓ does not recompose".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (name, cat) in shipped() {
        for i in 0..SAMPLES {
            let rho = random_function(&cat, &mut rng, 6);
            let d = rho.decompose().unwrap();
            ensure(d.recompose(cat.num_objects()) == rho.coefficients(), || format!("{name} sample {i}"))?;
        }
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let p = load("a3.trc");
    let [rho1, rho2, ell] = a3_functions(&p);
    let c2 = rho2.classify(true).unwrap();
    ensure(c2.prime == Some(true), || format!("ρ2 prime {:?}", c2.prime))?;
    let cl = ell.classify(true).unwrap();
    ensure(cl.morphism_faithful && cl.basic, || format!("ℓ {cl:?}"))?;
    let idem = rho2.is_idempotent().unwrap();
    ensure(!idem.holds, || "ρ2 idempotent".into())?;
    let w = idem.witness.ok_or("no witness")?;
    ensure(
        (p.name(w.source), p.name(w.target)) == ("T1", "T3"),
        || format!("witness in Hom({}, {})", p.name(w.source), p.name(w.target)),
    )?;
    ensure(!rho1.is_localising().unwrap().holds, || "ρ1 localising".into())?;
    ensure(!rho2.is_localising().unwrap().holds, || "ρ2 localising".into())?;
    ensure(ell.is_localising().unwrap().holds, || "ℓ not localising".into())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, p) in shipped() {
        let basis = p.basis_morphisms();
        for i in 0..SAMPLES {
            let rho = random_function(&p, &mut rng, 5);
            for t in p.triangles() {
                let lhs = rho.evaluate(&t.f).unwrap() + rho.evaluate(&t.g).unwrap();
                let rhs = rho.evaluate_on_object(t.f.target()).unwrap();
                ensure(lhs == rhs, || format!("{name} sample {i}: rank-nullity on {}", t.name))?;
            }
            let values: Vec<Scalar> = basis.iter().map(|f| rho.evaluate(f).unwrap()).collect();
            for (f, v) in basis.iter().zip(&values) {
                let s = rho.evaluate(&p.apply_sigma(f)).unwrap();
                ensure(&s == v, || format!("{name} sample {i}: ρ(Σf) ≠ ρ(f)"))?;
            }
            for (f, vf) in basis.iter().zip(&values) {
                for (g, vg) in basis.iter().zip(&values) {
                    if let Ok(gf) = p.compose(g, f) {
                        let v = rho.evaluate(&gf).unwrap();
                        ensure(v <= *vf && v <= *vg, || format!("{name} sample {i}: ρ(g∘f) > min"))?;
                    }
                    if let Some(sum) = f.add(g) {
                        let v = rho.evaluate(&sum).unwrap();
                        ensure(v <= vf + vg, || format!("{name} sample {i}: ρ(f+g) > ρ(f)+ρ(g)"))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let p = load("a3.trc");
    for (label, rho) in ["ρ1", "ρ2", "ℓ"].into_iter().zip(a3_functions(&p)) {
        let k = rho.kernel_ideal();
        ensure(k.ideal_violation(&p).is_none(), || format!("{label}: kernel not an ideal"))?;
        ensure(k.is_sigma_closed(&p), || format!("{label}: kernel not Σ-closed"))?;
        for x in 0..p.num_objects() {
            for y in 0..p.num_objects() {
                for v in k.get(x, y).basis_vectors() {
                    let val = rho.evaluate(&p.morphism_from_vector(x, y, v)).unwrap();
                    ensure(val.is_zero(), || format!("{label}: kernel vector with value {val}"))?;
                }
                for b in 0..p.hom_dim(x, y) {
                    let zero = rho.evaluate(&p.basis_morphism(x, y, b)).unwrap().is_zero();
                    let inside = k.get(x, y).contains_vector(&p.unit_vector(x, y, b)).unwrap();
                    ensure(zero == inside, || format!("{label}: basis {b} of Hom({x},{y})"))?;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut seen_true, mut seen_false) = (false, false);
    for (name, cat) in shipped() {
        for _ in 0..SAMPLES {
            let rho = random_function(&cat, &mut rng, 2);
            let positive = rho.coefficients().iter().all(|c| c > &Scalar::zero());
            let faithful = rho.classify(false).unwrap().morphism_faithful;
            let kernel_zero = rho.kernel_ideal().is_zero();
            ensure(faithful == positive && kernel_zero == positive, || {
                format!("{name}: faithful {faithful}, kernel zero {kernel_zero}, positive {positive}")
            })?;
            seen_true |= positive;
            seen_false |= !positive;
        }
    }
    ensure(seen_true && seen_false, || "both directions not exercised".into())
}

fn criterion_8() -> Outcome {
    let mut checked = 0;
    for (name, p) in shipped() {
        let orbits = sigma_orbits(&p);
        let combos = 3usize.pow(orbits.len() as u32);
        for code in 0..combos {
            let mut c = vec![Scalar::zero(); p.num_objects()];
            let mut rest = code;
            for o in &orbits {
                for &x in o.members() {
                    c[x] = int((rest % 3) as i64);
                }
                rest /= 3;
            }
            let rho = RankFunction::new(p.clone(), c).unwrap();
            let loc = rho.is_localising().unwrap().holds;
            let idem = rho.is_idempotent().unwrap().holds;
            ensure(!loc || idem, || format!("{name}: {rho:?} localising but not idempotent"))?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "nothing checked".into())
}

fn twisted(p: &Cat, inst: Instance, seeds: &[(&str, i64)]) -> Vec<Element> {
    let mut c = vec![Element::zero(); p.num_objects()];
    for &(name, k) in seeds {
        let start = p.object(name).unwrap();
        let mut x = start;
        let mut e = inst.constant(k);
        loop {
            c[x] = e.clone();
            x = p.sigma(x);
            e = inst.mul_q_pow(&e, 1);
            if x == start {
                break;
            }
        }
    }
    c
}

fn criterion_9() -> Outcome {
    for d in 1..=8 {
        let got = q_plus_one_regular(Instance::Periodic(d));
        ensure(got == (d % 2 == 1), || format!("periodic:{d} regular = {got}"))?;
    }
    let p = load("a3.trc");
    let rho2 = orbit_function(&p, "T2");
    let ob: Vec<Element> = rho2
        .object_values()
        .iter()
        .map(|v| Instance::Integers.constant(v.to_integer()))
        .collect();
    let cone: &TrianglePresentation = p.triangles().iter().find(|t| t.name == "cone_f_T1_T3").ok_or("no cone")?;
    let v = morphisms_from_objects(&p, Instance::Integers, &ob, cone).map_err(|e| e.to_string())?;
    ensure(v.is_zero(), || format!("ρ2(f) = {v}"))?;
    for inst in [Instance::Integers, Instance::Periodic(3)] {
        for seeds in [vec![("T1", 1)], vec![("T2", 1)], vec![("T1", 2), ("T2", 1)]] {
            let q = QRankFunction::new(p.clone(), inst, twisted(&p, inst, &seeds)).map_err(|e| e.to_string())?;
            let ob = q.object_values();
            for t in p.triangles() {
                let direct = q.q_evaluate(&t.f).map_err(|e| e.to_string())?;
                let via = morphisms_from_objects(&p, inst, &ob, t).map_err(|e| e.to_string())?;
                ensure(direct == via, || format!("{inst} {seeds:?} {}: {direct} vs {via}", t.name))?;
            }
        }
    }
    let refused = morphisms_from_objects(&p, Instance::Periodic(2), &vec![Element::zero(); 9], cone);
    ensure(
        matches!(refused, Err(QRankError::NotRegular(Instance::Periodic(2)))),
        || format!("periodic:2 gave {refused:?}"),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (name, p) in shipped() {
        for i in 0..SAMPLES {
            let rho = random_function(&p, &mut rng, 7);
            for t in p.triangles() {
                let ob = |x: &ObjectExpr| rho.evaluate_on_object(x).unwrap();
                let oracle = (ob(t.f.source()) + ob(t.f.target()) - ob(t.g.target())) / int(2);
                let direct = rho.evaluate(&t.f).unwrap();
                ensure(direct == oracle, || format!("{name} sample {i} {}: {direct} vs {oracle}", t.name))?;
            }
        }
    }
    Ok(())
}

fn criterion_11() -> Outcome {
    let objects: Vec<String> = ["T1", "S1T3", "T2", "S-1T1", "T3", "S-1T2", "S-2T1", "S1T1", "S1T2"]
        .iter()
        .flat_map(|o| ["--object".to_string(), o.to_string()])
        .collect();
    let rf = |f: &str| fixture(f);
    let mut runs: Vec<Vec<String>> = vec![
        vec!["validate".into(), rf("a3.trc")],
        vec!["orbits".into(), "--cat".into(), rf("a3.trc")],
        vec!["decompose".into(), "--rank".into(), rf("length.rf")],
        vec![
            "eval".into(),
            "--rank".into(),
            rf("rho2.rf"),
            "--morphism".into(),
            "f_T1_T3".into(),
            "--morphism".into(),
            "alpha_T1_T2".into(),
        ],
    ];
    for f in ["rho1.rf", "rho2.rf"] {
        let mut v = vec!["eval".into(), "--rank".into(), rf(f)];
        v.extend(objects.iter().cloned());
        runs.push(v);
    }
    for f in ["rho1.rf", "rho2.rf", "length.rf"] {
        runs.push(vec!["classify".into(), "--rank".into(), rf(f)]);
    }
    for args in &runs {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let (c1, first, _) = run_json(&a);
        let (c2, second, _) = run_json(&a);
        ensure(c1 == 0 && c2 == 0, || format!("{a:?} exited {c1}/{c2}"))?;
        ensure(first == second, || format!("{a:?} not byte-stable"))?;
    }
    let b1 = run(&["build-an", "--n", "3"]).stdout;
    ensure(b1 == run(&["build-an", "--n", "3"]).stdout, || "build-an not byte-stable".into())?;
    let fixtures = std::fs::read_dir(fixture_path("")).map_err(|e| e.to_string())?;
    let mut count = 0;
    for entry in fixtures {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_none_or(|e| e != "trc") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let Ok(p) = parse_presentation(&text) else { continue };
        ensure(serialize_presentation(&p) == text, || format!("{} not canonical", path.display()))?;
        let again = parse_presentation(&serialize_presentation(&p)).map_err(|e| e.to_string())?;
        ensure(again == p, || format!("{} does not reparse equal", path.display()))?;
        count += 1;
    }
    ensure(count >= 4, || format!("only {count} fixtures checked"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("A3 construction", criterion_1),
        ("golden object tables", criterion_2),
        ("morphism values", criterion_3),
        ("decomposition", criterion_4),
        ("classification", criterion_5),
        ("axiom property suite", criterion_6),
        ("kernel ideal properties", criterion_7),
        ("localising implies idempotent", criterion_8),
        ("q-rank conversion", criterion_9),
        ("oracle equivalence", criterion_10),
        ("CLI determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {:>2} PASS  {name}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
