use std::path::Path;

use serde_json::{json, Value};

use scalehom::entropy::{entropy_estimate_circle, entropy_estimate_finite};
use scalehom::field::format_rational;
use scalehom::model::ModelDocument;
use scalehom::onecycles::{elementary_decomposition, refine, simplify, ElementaryChain};
use scalehom::pairing::pairing_matrix;
use scalehom::pipeline::{manning, select_endomorphism, Options};
use scalehom::poly::DEFAULT_DEGREE_CAP;
use scalehom::scale_algebra::{bonding, build_complex, endomorphism, induced_map, ScaleComplex, Variance};
use scalehom::spectral::entropy_bounds;
use scalehom::suites::{model_suite, run_all, seed_from_env, SuiteOutcome};
use scalehom::{Error, Result};

use crate::{Args, Command, Format};

/// Rounds per randomized suite in `verify`.
const VERIFY_ROUNDS: usize = 100;

pub struct Output {
    pub text: String,
    pub code: u8,
}

fn load(path: &Path) -> Result<ModelDocument> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    ModelDocument::parse(&text)
}

fn input(args: &Args) -> Result<ModelDocument> {
    let path = args.input.as_ref().ok_or_else(|| Error::Input("--input is required".into()))?;
    load(path)
}

fn options(args: &Args) -> Options {
    Options {
        fine: args.fine_cover.clone(),
        coarse: args.cover.clone(),
        q: args.q,
        n_max: args.n_max,
        simplex_cap: args.cap_simplices,
        arc_cap: args.cap_arcs,
        degree_cap: DEFAULT_DEGREE_CAP,
    }
}

fn cover_name(name: &Option<String>) -> &str {
    name.as_deref().unwrap_or("cover")
}

fn complex(doc: &ModelDocument, name: &str, max_q: usize, args: &Args) -> Result<ScaleComplex> {
    build_complex(doc.cover(Some(name))?, max_q, args.cap_simplices)
}

fn envelope(command: Command, digest: Option<String>, result: Value) -> String {
    let doc = json!({
        "tool": { "name": "scalehom", "version": env!("CARGO_PKG_VERSION") },
        "command": command.name(),
        "model_digest": digest,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

pub fn run(command: Command, args: &Args) -> Result<Output> {
    if args.format == Format::Csv && command != Command::Entropy {
        return Err(Error::Input("csv output is only available for the entropy command".into()));
    }
    if command == Command::Verify {
        return verify(args);
    }
    let doc = input(args)?;
    let digest = doc.digest();
    let result = match command {
        Command::Homology => homology(&doc, args)?,
        Command::Cohomology => cohomology(&doc, args)?,
        Command::Pairing => pairing(&doc, args)?,
        Command::Cycles => cycles(&doc, args)?,
        Command::Induced => induced(&doc, args)?,
        Command::Spectral => spectral(&doc, args)?,
        Command::Entropy => {
            let est = match &doc.circle {
                Some(c) => entropy_estimate_circle(&c.system, args.n_max, args.cap_arcs)?,
                None => entropy_estimate_finite(&*doc.cover(args.cover.as_deref())?, doc.map()?, args.n_max)?,
            };
            if args.format == Format::Csv {
                let header = format!("# scalehom {} model {digest}\n", env!("CARGO_PKG_VERSION"));
                return Ok(Output { text: header + &est.to_csv(), code: 0 });
            }
            json!({ "backend": doc.kind(), "estimate": est.to_json() })
        }
        Command::Manning => manning(&doc, &options(args))?.to_json(),
        Command::Verify => unreachable!(),
    };
    Ok(Output { text: envelope(command, Some(digest), result), code: 0 })
}

fn homology(doc: &ModelDocument, args: &Args) -> Result<Value> {
    let name = cover_name(&args.cover);
    let cx = complex(doc, name, args.q, args)?;
    let h = cx.homology(args.q)?;
    Ok(json!({
        "cover": name,
        "q": args.q,
        "dimension": h.dim(),
        "generators": h.reps.iter().map(|c| c.to_json(doc.labels())).collect::<Vec<_>>(),
    }))
}

fn cohomology(doc: &ModelDocument, args: &Args) -> Result<Value> {
    let name = cover_name(&args.cover);
    let cx = complex(doc, name, args.q, args)?;
    let h = cx.cohomology(args.q)?;
    Ok(json!({
        "cover": name,
        "q": args.q,
        "dimension": h.dim(),
        "generators": h.reps.iter().map(|z| z.to_json(doc.labels(), name)).collect::<Vec<_>>(),
    }))
}

fn pairing(doc: &ModelDocument, args: &Args) -> Result<Value> {
    let name = cover_name(&args.cover);
    let cx = complex(doc, name, args.q, args)?;
    let p = pairing_matrix(&cx, args.q)?;
    Ok(json!({ "cover": name, "pairing": p.to_json() }))
}

fn walk_json(e: &ElementaryChain, labels: &[String]) -> Value {
    json!({
        "walk": e.walk.iter().map(|&v| labels[v].clone()).collect::<Vec<_>>(),
        "simple": e.is_simple(),
        "matching": e.matching,
    })
}

fn cycles(doc: &ModelDocument, args: &Args) -> Result<Value> {
    let name = cover_name(&args.cover);
    let cover = doc.cover(Some(name))?;
    let fine = args.fine_cover.as_deref().map(|n| doc.cover(Some(n))).transpose()?;
    let cx = build_complex(cover.clone(), 1, args.cap_simplices)?;
    let labels = doc.labels();
    let mut generators = Vec::new();
    for c in &cx.homology(1)?.reps {
        let mut pieces = Vec::new();
        for (coeff, e) in elementary_decomposition(c, &cover)? {
            let s = simplify(&e, &cover)?;
            pieces.push(json!({
                "coefficient": format_rational(&coeff),
                "elementary": walk_json(&e, labels),
                "simplified": {
                    "e0": walk_json(&s.e0, labels),
                    "cycles": s.cycles.iter().map(|x| walk_json(x, labels)).collect::<Vec<_>>(),
                    "surgeries": s.log.iter().map(|x| json!({"i": x.i, "j": x.j, "element": x.element})).collect::<Vec<_>>(),
                },
            }));
        }
        let refined = match &fine {
            Some(f) => {
                let r = refine(c, &cover, f)?;
                json!({
                    "fine_cover": args.fine_cover,
                    "chain": r.chain.to_json(labels),
                    "norm_before": format_rational(&r.norm_before),
                    "norm_after": format_rational(&r.norm_after),
                    "norm_bound": format_rational(&r.norm_bound),
                })
            }
            None => Value::Null,
        };
        generators.push(json!({
            "chain": c.to_json(labels),
            "decomposition": pieces,
            "refinement": refined,
        }));
    }
    Ok(json!({ "cover": name, "generators": generators }))
}

fn attempt<T>(r: Result<T>, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(v) => f(v),
        Err(e) => json!({ "unavailable": e.to_string() }),
    }
}

fn induced(doc: &ModelDocument, args: &Args) -> Result<Value> {
    let f = doc.map()?;
    let target_name = cover_name(&args.cover);
    let source_name = cover_name(&args.fine_cover);
    let target = complex(doc, target_name, args.q, args)?;
    let source = complex(doc, source_name, args.q, args)?;
    let mut out = json!({ "source": source_name, "target": target_name, "q": args.q });
    for (key, v) in [("homology", Variance::Homology), ("cohomology", Variance::Cohomology)] {
        out[key] = json!({
            "induced": induced_map(f, &source, &target, args.q, v)?.to_json(),
            "bonding": attempt(bonding(&source, &target, args.q, v), |m| m.to_json()),
            "endomorphism": attempt(endomorphism(f, &source, &target, args.q, v), |m| m.to_json()),
        });
    }
    Ok(out)
}

fn spectral(doc: &ModelDocument, args: &Args) -> Result<Value> {
    let e = select_endomorphism(doc, &options(args))?;
    let report = entropy_bounds(&e.map.matrix, DEFAULT_DEGREE_CAP)?;
    Ok(json!({
        "scales": { "fine": e.fine, "coarse": e.coarse, "automatic": e.automatic },
        "report": report.to_json(),
    }))
}

fn documents(path: &Path) -> Result<Vec<std::path::PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let read = std::fs::read_dir(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut files: Vec<_> =
        read.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect();
    files.sort();
    Ok(files)
}

fn verify(args: &Args) -> Result<Output> {
    let seed = seed_from_env()?;
    let mut outcomes: Vec<(Option<String>, SuiteOutcome)> =
        run_all(seed, VERIFY_ROUNDS).into_iter().map(|o| (None, o)).collect();
    let mut digests = Vec::new();
    if let Some(path) = &args.input {
        for file in documents(path)? {
            let doc = load(&file)?;
            digests.push(json!({ "file": file.display().to_string(), "digest": doc.digest() }));
            outcomes.push((Some(file.display().to_string()), model_suite(&doc, &options(args))));
        }
    }
    let passed = outcomes.iter().all(|(_, o)| o.passed());
    for (file, o) in outcomes.iter().filter(|(_, o)| !o.passed()) {
        eprintln!(
            "suite {} failed{}: {}",
            o.name,
            file.as_ref().map_or(String::new(), |f| format!(" on {f}")),
            o.failures.join("; ")
        );
    }
    let result = json!({
        "seed": seed,
        "rounds": VERIFY_ROUNDS,
        "models": digests,
        "suites": outcomes.iter().map(|(file, o)| {
            let mut v = o.to_json();
            v["model"] = json!(file);
            v
        }).collect::<Vec<_>>(),
        "passed": passed,
    });
    Ok(Output { text: envelope(Command::Verify, None, result), code: if passed { 0 } else { 3 } })
}
