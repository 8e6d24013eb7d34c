//! Acceptance criteria, one PASS/FAIL line each.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use steinberg::groupoid::is_covered_by;
use steinberg::representation::{reduced_norm, snake_norm_sandwich, symbol_norm};
use steinberg::rewriting::rewrite_within;
use steinberg::syntax::{load_document, AnyDocument, Document};
use steinberg::verify::run_property;
use steinberg::{ExactComplex, Magnitude, Region, Scalar, SnakeGroupoid, SnakePoint};

const SEED: u64 = 7;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn two_headed() -> Document<SnakeGroupoid> {
    match load_document(fixture("two_headed.elt")).expect("fixture loads") {
        AnyDocument::Snake(d) => d,
        AnyDocument::Finite(_) => panic!("expected a snake"),
    }
}

fn properties(list: &[(&str, usize, Option<f64>)]) -> Result<String, String> {
    let mut cases = 0;
    for &(name, trials, tolerance) in list {
        let outcome = run_property(name, trials, SEED, tolerance).ok_or(format!("unknown property {name}"))?;
        if !outcome.passed() {
            return Err(outcome.record());
        }
        cases += outcome.cases;
    }
    Ok(format!("{cases} cases, 0 failures"))
}

fn example_support_and_norms() -> Result<String, String> {
    let doc = two_headed();
    let f = doc.element("f").map_err(|e| e.to_string())?;
    let support = f.open_support();
    let mut points: Vec<SnakePoint> = support.points().cloned().collect();
    points.sort();
    let mut expected = vec![SnakePoint::Base, SnakePoint::Head(1)];
    expected.sort();
    if points != expected || support.open {
        return Err(format!("support {points:?} open={}", support.open));
    }
    let sup = f.sup_norm();
    if sup != Magnitude::of(&ExactComplex::from_i64(1, 0)) {
        return Err(format!("sup {sup}"));
    }
    if f.i_norm() != 2.0 {
        return Err(format!("inorm {}", f.i_norm()));
    }
    let reduced = reduced_norm(&f).map_err(|e| e.to_string())?;
    if (reduced.value - 2.0).abs() > 1e-8 {
        return Err(format!("reduced {}", reduced.value));
    }
    let report = snake_norm_sandwich(&f).map_err(|e| e.to_string())?;
    if !report.pins_full_norm() || (report.full_norm_upper() - 2.0).abs() > 1e-8 {
        return Err(report.record());
    }
    Ok("support {base, head 1} not open, sup 1, inorm 2, reduced 2, full norm 2".into())
}

fn example_rewrite() -> Result<(), String> {
    let doc = two_headed();
    let f = doc.element("f").map_err(|e| e.to_string())?;
    let cover = doc.bisection_list("U, U1").map_err(|e| e.to_string())?;
    let rewritten = rewrite_within(&f, &Region::Union(cover.clone())).map_err(|e| e.to_string())?;
    let expected = doc.evaluate("U - U1").map_err(|e| e.to_string())?;
    let model = f.model();
    let inside = rewritten.terms().iter().all(|t| is_covered_by(&**model, &t.bisection, &cover));
    if rewritten.equals(&expected).map_err(|e| e.to_string())? && rewritten.equals(&f).unwrap() && inside {
        Ok(())
    } else {
        Err(format!("rewrite gave {}", doc.format_element("f", &rewritten).trim()))
    }
}

fn symbol_checks() -> Result<String, String> {
    let doc = match load_document(fixture("integer_snake.elt")).map_err(|e| e.to_string())? {
        AnyDocument::Snake(d) => d,
        AnyDocument::Finite(_) => return Err("expected a snake".into()),
    };
    let g = symbol_norm(&doc.element("g").unwrap()).map_err(|e| e.to_string())?;
    if (g.value - 2.0).abs() > g.tolerance {
        return Err(format!("symbol(1 + B1) = {} tol {}", g.value, g.tolerance));
    }
    let one = symbol_norm(&doc.element("one").unwrap()).map_err(|e| e.to_string())?;
    if one.value != 1.0 {
        return Err(format!("symbol(1) = {}", one.value));
    }
    Ok(format!("symbol(1 + B1) = {} (grid error {:e}), symbol(1) = 1", g.value, g.tolerance))
}

fn determinism() -> Result<String, String> {
    let run = || -> Result<(Vec<u8>, Duration), String> {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_steinberg"))
            .args(["verify", "--suite", "all", "--trials", "200", "--seed", "7", "--format", "records"])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stdout)));
        }
        Ok((out.stdout, start.elapsed()))
    };
    let (a, ta) = run()?;
    let (b, tb) = run()?;
    if a != b {
        return Err("outputs differ".into());
    }
    let slowest = ta.max(tb);
    if slowest >= Duration::from_secs(60) {
        return Err(format!("took {slowest:.1?}"));
    }
    Ok(format!("identical output, {} bytes, slowest run {slowest:.1?}", a.len()))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<String, String>>)> = vec![
        ("two-headed example", Box::new(example_support_and_norms)),
        ("oracle equivalence", Box::new(|| properties(&[("oracle_convolution", 1000, None)]))),
        ("star homomorphism", Box::new(|| properties(&[("star_homomorphism", 500, None)]))),
        ("I-norm domination", Box::new(|| properties(&[("i_norm_domination", 500, Some(1e-8))]))),
        ("C*-identity", Box::new(|| properties(&[("reduced_c_star_identity", 200, Some(1e-6))]))),
        (
            "lemma algorithms",
            Box::new(|| {
                example_rewrite()?;
                properties(&[
                    ("rewrite_within", 200, None),
                    ("bounded_summands", 200, None),
                    ("unit_support_window", 200, None),
                ])
            }),
        ),
        ("spectral identity", Box::new(|| properties(&[("spectral_identity", 200, None)]))),
        ("bisection bound", Box::new(|| properties(&[("bisection_bound", 200, Some(1e-8))]))),
        ("integer snake symbol", Box::new(symbol_checks)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
