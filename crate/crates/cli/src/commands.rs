use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};
use trirank::category::{MorphismMatrix, ObjectExpr, TrianglePresentation};
use trirank::functor::{image_dim_vector, representable, sigma_orbits, SigmaOrbit};
use trirank::mesh::{build_mesh_category, TranslationQuiverSpec};
use trirank::qrank::{morphisms_from_objects, Element, Instance, QRankFunction};
use trirank::rank::{check_axioms, AxiomStatus, FromValues, KernelWitness};
use trirank::{CategoryPresentation, RankFunction, Scalar};

use crate::dot::ar_quiver_dot;
use crate::format::{parse_presentation, serialize_presentation};
use crate::rankfile::{parse_qvalue_file, parse_rank_file, RankFile, TableKind, ValueFile};
use crate::report::{self, element, expr_text, names, per_object, scalar, Outcome, Output};
use crate::{CatArg, CliError, Command, RankArgs};

type Cat = Arc<CategoryPresentation>;

pub fn dispatch(cmd: &Command, stdin: &mut dyn Read) -> Result<Output, CliError> {
    match cmd {
        Command::Validate { path } => validate(path.as_deref().unwrap_or(Path::new("-")), stdin),
        Command::BuildAn { n, window, out } => build_an(*n, *window, out.as_deref()),
        Command::Simples(c) => simples(&load_presentation(&c.cat, stdin)?),
        Command::Orbits(c) => orbits(&load_presentation(&c.cat, stdin)?),
        Command::Decompose(r) => decompose(r, stdin),
        Command::Eval { rank, morphism, object } => eval(rank, morphism, object, stdin),
        Command::Check { rank, triangle } => check(rank, triangle, stdin),
        Command::Classify(r) => classify(r, stdin),
        Command::Qconvert {
            instance,
            values,
            cat,
            triangle,
        } => qconvert(*instance, values, cat.as_deref(), triangle, stdin),
        Command::ExportDot { cat: CatArg { cat }, out } => {
            let p = load_presentation(cat, stdin)?;
            emit(ar_quiver_dot(&p), out.as_deref(), json!({ "objects": p.num_objects() }))
        }
    }
}

fn read_input(path: &Path, stdin: &mut dyn Read) -> Result<String, CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if path == Path::new("-") {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io)
    }
}

pub fn load_presentation(path: &Path, stdin: &mut dyn Read) -> Result<Cat, CliError> {
    let text = read_input(path, stdin)?;
    parse_presentation(&text).map(Arc::new).map_err(|error| CliError::Parse {
        path: path.display().to_string(),
        error,
    })
}

fn load_value_file<T>(
    path: &Path,
    cat: Option<&Path>,
    stdin: &mut dyn Read,
    parse: impl Fn(&str) -> Result<ValueFile<T>, crate::format::ParseError>,
) -> Result<(Cat, ValueFile<T>), CliError> {
    let text = read_input(path, stdin)?;
    let file = parse(&text).map_err(|error| CliError::Parse {
        path: path.display().to_string(),
        error,
    })?;
    let cat_path: PathBuf = match (cat, &file.presentation) {
        (Some(c), _) => c.to_path_buf(),
        (None, Some(rel)) => path.parent().unwrap_or(Path::new("")).join(rel),
        (None, None) => {
            return Err(CliError::Usage(format!(
                "{}: no presentation named; pass --cat",
                path.display()
            )))
        }
    };
    if cat_path != Path::new("-") && !cat_path.exists() {
        return Err(CliError::Io {
            path: cat_path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        });
    }
    Ok((load_presentation(&cat_path, stdin)?, file))
}

fn resolve<T: Clone>(file: &ValueFile<T>, p: &CategoryPresentation, path: &Path) -> Result<Vec<Option<T>>, CliError> {
    file.resolve(p).map_err(|error| CliError::Parse {
        path: path.display().to_string(),
        error,
    })
}

fn domain(e: impl ToString) -> CliError {
    CliError::Domain(e.to_string())
}

/// The rank function described by a `.rf` file. Missing coefficients are
/// zero; object values must be complete and determine the function.
fn rank_function(cat: &Cat, file: &RankFile, path: &Path) -> Result<RankFunction, CliError> {
    let slots = resolve(file, cat, path)?;
    match file.kind {
        TableKind::Coefficients => {
            let c = slots.into_iter().map(Option::unwrap_or_default).collect();
            RankFunction::new(cat.clone(), c).map_err(domain)
        }
        TableKind::ObjectValues => {
            let values = complete(cat, slots)?;
            match RankFunction::from_object_values(cat.clone(), &values, false).map_err(domain)? {
                FromValues::Unique(rho) => Ok(rho),
                FromValues::NoSolution => Err(domain("no rank function has these object values")),
                FromValues::NonUnique { .. } => Err(domain("the object values do not determine a unique rank function")),
            }
        }
    }
}

fn complete<T>(p: &CategoryPresentation, slots: Vec<Option<T>>) -> Result<Vec<T>, CliError> {
    slots
        .into_iter()
        .enumerate()
        .map(|(x, v)| v.ok_or_else(|| domain(format!("no value given for object {}", p.name(x)))))
        .collect()
}

fn load_rank(r: &RankArgs, stdin: &mut dyn Read) -> Result<(Cat, RankFunction), CliError> {
    let (cat, file) = load_value_file(&r.rank, r.cat.as_deref(), stdin, parse_rank_file)?;
    let rho = rank_function(&cat, &file, &r.rank)?;
    Ok((cat, rho))
}

fn emit(text: String, out: Option<&Path>, summary: Value) -> Result<Output, CliError> {
    let Some(path) = out else {
        return Ok(Output::Raw(text));
    };
    fs::write(path, &text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let human = format!("wrote {}\n", path.display());
    let mut result = summary;
    result["written"] = Value::String(path.display().to_string());
    Ok(Output::Report(Outcome::ok(result, human)))
}

fn orbit_label(p: &CategoryPresentation, o: &SigmaOrbit) -> String {
    p.name(o.smallest()).to_string()
}

fn validate(path: &Path, stdin: &mut dyn Read) -> Result<Output, CliError> {
    let p = load_presentation(path, stdin)?;
    let violations: Vec<String> = p.validate().violations.iter().map(ToString::to_string).collect();
    let sizes: Vec<usize> = sigma_orbits(&p).iter().map(SigmaOrbit::len).collect();
    let n = p.num_objects();
    let mut human = match p.period() {
        Some(d) => format!("{n} indecomposables, period {d}\n"),
        None => format!("{n} indecomposables, Σ of order {}\n", p.sigma_order()),
    };
    if !violations.is_empty() {
        human.push_str(&format!("{} violations\n", violations.len()));
    }
    let result = json!({
        "objects": n,
        "period": p.period(),
        "sigma_order": p.sigma_order(),
        "orbit_sizes": sizes,
        "triangles": p.triangles().len(),
        "morphisms": p.morphisms().len(),
        "valid": violations.is_empty(),
    });
    Ok(Output::Report(Outcome {
        result,
        human,
        failed: !violations.is_empty(),
        diagnostics: violations,
    }))
}

fn build_an(n: usize, window: Option<usize>, out: Option<&Path>) -> Result<Output, CliError> {
    let mut spec = TranslationQuiverSpec::cluster(n);
    spec.window = window.or(spec.window);
    let p = build_mesh_category(&spec).map_err(domain)?;
    emit(
        serialize_presentation(&p),
        out,
        json!({ "objects": p.num_objects(), "period": p.period() }),
    )
}

/// A listed triangle `Y → E → Z → ΣY` whose middle map has image
/// `rad(-, Z)` presents the simple functor at `Z`.
fn presenting_triangle(p: &CategoryPresentation, z: usize) -> Option<&TrianglePresentation> {
    let rep = representable(p, &ObjectExpr::single(z));
    p.triangles().iter().find(|t| {
        t.g.target() == &ObjectExpr::single(z)
            && image_dim_vector(p, &t.g).is_ok_and(|im| {
                (0..p.num_objects()).all(|w| im.get(w) + usize::from(w == z) == rep.get(w))
            })
    })
}

fn simples(p: &Cat) -> Result<Output, CliError> {
    let mut rows = Vec::new();
    let mut human = String::new();
    for z in 0..p.num_objects() {
        let name = p.name(z);
        match presenting_triangle(p, z) {
            Some(t) => {
                let middle = expr_text(p, t.g.source());
                human.push_str(&format!(
                    "S_{name} = coker(Hom(-, {middle}) -> Hom(-, {name}))  [{}]\n",
                    t.name
                ));
                rows.push(json!({ "anchor": name, "triangle": t.name, "middle": middle }));
            }
            None => {
                human.push_str(&format!("S_{name}: no presenting triangle listed\n"));
                rows.push(json!({ "anchor": name, "triangle": null, "middle": null }));
            }
        }
    }
    Ok(Output::Report(Outcome::ok(json!({ "simples": rows }), human)))
}

fn orbits(p: &Cat) -> Result<Output, CliError> {
    let mut rows = Vec::new();
    let mut human = String::new();
    for o in sigma_orbits(p) {
        let label = orbit_label(p, &o);
        let members: Vec<&str> = o.members().iter().map(|&x| p.name(x)).collect();
        human.push_str(&format!("{label} ({}): {}\n", o.len(), members.join(" ")));
        rows.push(json!({ "label": label, "size": o.len(), "members": members }));
    }
    Ok(Output::Report(Outcome::ok(json!({ "orbits": rows }), human)))
}

fn decompose(r: &RankArgs, stdin: &mut dyn Read) -> Result<Output, CliError> {
    let (p, rho) = load_rank(r, stdin)?;
    let d = rho.decompose().map_err(domain)?;
    let recomposes = d.recompose(p.num_objects()) == rho.coefficients();
    let mut human = String::new();
    let mut parts = Vec::new();
    for (o, m) in &d.parts {
        let label = orbit_label(&p, o);
        human.push_str(&format!("{label} ({} objects): {m}\n", o.len()));
        parts.push(json!({ "orbit": label, "members": names(&p, o.members()), "multiplicity": m.to_string() }));
    }
    if d.parts.is_empty() {
        human.push_str("zero\n");
    }
    Ok(Output::Report(Outcome::ok(
        json!({ "parts": parts, "recomposes": recomposes }),
        human,
    )))
}

fn find_morphism(p: &CategoryPresentation, name: &str) -> Result<MorphismMatrix, CliError> {
    if let Some(m) = p.morphism(name) {
        return Ok(m.clone());
    }
    let part = name.rsplit_once('.').and_then(|(t, side)| {
        let t = p.triangles().iter().find(|x| x.name == t)?;
        match side {
            "f" => Some(t.f.clone()),
            "g" => Some(t.g.clone()),
            "h" => Some(t.h.clone()),
            _ => None,
        }
    });
    part.ok_or_else(|| CliError::Usage(format!("no morphism named {name:?}")))
}

fn parse_object(p: &CategoryPresentation, text: &str) -> Result<ObjectExpr, CliError> {
    text.split('+')
        .map(|s| p.object(s.trim()).map_err(|_| CliError::Usage(format!("unknown object {:?}", s.trim()))))
        .collect::<Result<_, _>>()
        .map(ObjectExpr::new)
}

fn eval(r: &RankArgs, morphisms: &[String], objects: &[String], stdin: &mut dyn Read) -> Result<Output, CliError> {
    if morphisms.is_empty() && objects.is_empty() {
        return Err(CliError::Usage("give at least one --morphism or --object".into()));
    }
    let (p, rho) = load_rank(r, stdin)?;
    let mut rows = Vec::new();
    for name in morphisms {
        let v = rho.evaluate(&find_morphism(&p, name)?).map_err(domain)?;
        rows.push((name.clone(), "morphism", v));
    }
    for text in objects {
        let x = parse_object(&p, text)?;
        let v = rho.evaluate_on_object(&x).map_err(domain)?;
        rows.push((expr_text(&p, &x), "object", v));
    }
    let human = match rows.as_slice() {
        [(_, _, v)] => format!("{v}\n"),
        _ => rows.iter().map(|(n, _, v)| format!("{n}: {v}\n")).collect(),
    };
    let values: Vec<Value> = rows
        .iter()
        .map(|(n, kind, v)| json!({ "name": n, "kind": kind, "value": scalar(v) }))
        .collect();
    Ok(Output::Report(Outcome::ok(json!({ "values": values }), human)))
}

fn select_triangles(p: &CategoryPresentation, wanted: &[String]) -> Result<Vec<TrianglePresentation>, CliError> {
    if wanted.is_empty() {
        return Ok(p.triangles().to_vec());
    }
    wanted
        .iter()
        .map(|w| {
            p.triangles()
                .iter()
                .find(|t| &t.name == w)
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("no triangle named {w:?}")))
        })
        .collect()
}

fn check(r: &RankArgs, triangles: &[String], stdin: &mut dyn Read) -> Result<Output, CliError> {
    let (p, file) = load_value_file(&r.rank, r.cat.as_deref(), stdin, parse_rank_file)?;
    let values: Vec<Option<Scalar>> = match file.kind {
        TableKind::Coefficients => rank_function(&p, &file, &r.rank)?
            .object_values()
            .into_iter()
            .map(Some)
            .collect(),
        TableKind::ObjectValues => resolve(&file, &p, &r.rank)?,
    };
    let selected = select_triangles(&p, triangles)?;
    let report = check_axioms(p.clone(), &values, &selected).map_err(domain)?;
    let mut human = String::new();
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for (axiom, status) in &report.results {
        let (word, detail) = match status {
            AxiomStatus::Pass => ("pass", None),
            AxiomStatus::Fail(d) => ("fail", Some(d)),
            AxiomStatus::Skipped(d) => ("skipped", Some(d)),
        };
        match detail {
            Some(d) => human.push_str(&format!("{axiom}: {word} ({d})\n")),
            None => human.push_str(&format!("{axiom}: {word}\n")),
        }
        if let AxiomStatus::Fail(d) = status {
            diagnostics.push(format!("{axiom}: {d}"));
        }
        rows.push(json!({ "axiom": axiom.to_string(), "status": word, "detail": detail }));
    }
    let values: Vec<Scalar> = values.into_iter().flatten().collect();
    let coefficients = if values.len() == p.num_objects() {
        match RankFunction::from_object_values(p.clone(), &values, false).map_err(domain)? {
            FromValues::Unique(rho) => {
                let parts: Vec<String> = (0..p.num_objects())
                    .map(|x| format!("{}={}", p.name(x), rho.coefficient(x)))
                    .collect();
                human.push_str(&format!("coefficients: {}\n", parts.join(" ")));
                per_object(&p, rho.coefficients())
            }
            _ => Value::Null,
        }
    } else {
        Value::Null
    };
    Ok(Output::Report(Outcome {
        result: json!({ "axioms": rows, "coefficients": coefficients }),
        human,
        diagnostics,
        failed: report.any_fail(),
    }))
}

fn witness(p: &CategoryPresentation, w: &Option<KernelWitness>) -> Value {
    match w {
        Some(w) => json!({
            "source": p.name(w.source),
            "target": p.name(w.target),
            "vector": report::scalars(&w.vector),
        }),
        None => Value::Null,
    }
}

fn classify(r: &RankArgs, stdin: &mut dyn Read) -> Result<Output, CliError> {
    let (p, rho) = load_rank(r, stdin)?;
    let c = rho.classify(p.generators().is_known()).map_err(domain)?;
    let mut result = json!({
        "integral": c.integral,
        "irreducible": c.irreducible,
        "basic": c.basic,
        "prime": c.prime,
        "morphism_faithful": c.morphism_faithful,
        "kernel_dim": rho.kernel_ideal().total_dim(),
        "idempotent": null,
        "localising": null,
    });
    let flag = |b: Option<bool>| b.map_or("unknown".to_string(), |b| b.to_string());
    let mut human = format!(
        "integral: {}\nirreducible: {}\nbasic: {}\nprime: {}\nmorphism_faithful: {}\n",
        c.integral,
        c.irreducible,
        c.basic,
        flag(c.prime),
        c.morphism_faithful
    );
    if rho.is_integral() {
        for (key, check) in [
            ("idempotent", rho.is_idempotent().map_err(domain)?),
            ("localising", rho.is_localising().map_err(domain)?),
        ] {
            result[key] = json!({ "holds": check.holds, "witness": witness(&p, &check.witness) });
            human.push_str(&format!("{key}: {}", check.holds));
            if let Some(w) = &check.witness {
                human.push_str(&format!(" (witness in Hom({}, {}))", p.name(w.source), p.name(w.target)));
            }
            human.push('\n');
        }
    }
    Ok(Output::Report(Outcome::ok(result, human)))
}

fn qconvert(
    inst: Instance,
    values: &Path,
    cat: Option<&Path>,
    triangles: &[String],
    stdin: &mut dyn Read,
) -> Result<Output, CliError> {
    let (p, file) = load_value_file(values, cat, stdin, parse_qvalue_file)?;
    let slots = file.resolve_elements(&p, inst).map_err(|error| CliError::Parse {
        path: values.display().to_string(),
        error,
    })?;
    let object_values: Vec<Element> = match file.kind {
        TableKind::Coefficients => {
            let c = slots.into_iter().map(Option::unwrap_or_default).collect();
            QRankFunction::new(p.clone(), inst, c).map_err(domain)?.object_values()
        }
        TableKind::ObjectValues => complete(&p, slots)?,
    };
    let selected = select_triangles(&p, triangles)?;
    let mut rows = Vec::new();
    let mut human = String::new();
    for t in &selected {
        let v = morphisms_from_objects(&p, inst, &object_values, t).map_err(domain)?;
        human.push_str(&format!("{}: {v}\n", t.name));
        rows.push(json!({ "triangle": t.name, "value": element(&v) }));
    }
    let objects: serde_json::Map<String, Value> = object_values
        .iter()
        .enumerate()
        .map(|(x, e)| (p.name(x).to_string(), element(e)))
        .collect();
    Ok(Output::Report(Outcome::ok(
        json!({ "instance": inst.to_string(), "object_values": objects, "morphisms": rows }),
        human,
    )))
}
