use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn steinberg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steinberg")).args(args).output().expect("binary runs")
}

fn run_in_fixtures(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steinberg"))
        .current_dir(fixture(""))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_exit_codes() {
    let ok = run_in_fixtures(&["validate", "pair.grpd"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("4 arrows, 2 units"));
    let snake = run_in_fixtures(&["--format", "records", "validate", "integer_snake.grpd"]);
    assert_eq!(stdout(&snake).trim(), "valid=true kind=snake");
    let bad = run_in_fixtures(&["validate", "corrupted.grpd"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stderr(&bad).contains("inverse_defined"));
    let missing = run_in_fixtures(&["validate", "missing.grpd"]);
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn expression_errors_exit_with_two() {
    for expr in ["nosuch", "swap +", "swap ** (", "2 * G1"] {
        let o = run_in_fixtures(&["compute", "pair.elt", expr]);
        assert_eq!(o.status.code(), Some(2), "{expr}: {}", stderr(&o));
    }
    assert_eq!(steinberg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(steinberg(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
}

#[test]
fn compute_reports_values_on_test_points() {
    let values = |expr: &str| stdout(&run_in_fixtures(&["--format", "records", "compute", "two_headed.elt", expr]));
    assert_eq!(values("f ** f"), values("2 * f"));
    assert_eq!(values("adj(f)"), values("f"));
    assert!(values("0 * f").lines().all(|l| l.ends_with("value=0")));
    let swap = stdout(&run_in_fixtures(&["--format", "records", "compute", "pair.elt", "swap ** swap"]));
    assert_eq!(swap, "point=e_u_u value=1\npoint=e_v_v value=1\n");
}

#[test]
fn eval_at_named_points() {
    let o = run_in_fixtures(&["eval", "pair.elt", "h", "e_u_v"]);
    assert_eq!(stdout(&o).trim(), "h(e_u_v) = 2-i");
    let o = run_in_fixtures(&["--format", "records", "eval", "two_headed.elt", "f", "head:1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).trim().ends_with("value=-1"));
}

#[test]
fn norms_of_the_fixtures() {
    let o = run_in_fixtures(&["--format", "records", "norm", "two_headed.elt", "f"]);
    let line = stdout(&o);
    assert!(line.contains("sup=1 inorm=2 reduced=2") && line.contains("mf=2"), "{line}");
    let sup = run_in_fixtures(&["--format", "records", "norm", "pair.elt", "triple", "--kind", "sup"]);
    assert_eq!(stdout(&sup).trim(), "sup=3");
    let inorm = run_in_fixtures(&["--format", "records", "norm", "pair.elt", "swap", "--kind", "inorm"]);
    assert_eq!(stdout(&inorm).trim(), "inorm=1");
    let symbol = run_in_fixtures(&["--format", "records", "norm", "integer_snake.elt", "one", "--kind", "symbol"]);
    assert!(stdout(&symbol).starts_with("symbol=1 "));
    let human = run_in_fixtures(&["norm", "two_headed.elt", "f"]);
    assert!(stdout(&human).contains("(pinned)"));
}

#[test]
fn reduced_norm_on_integer_heads_points_to_the_symbol() {
    let o = run_in_fixtures(&["norm", "integer_snake.elt", "g", "--kind", "reduced"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("symbol"));
    let wrong = run_in_fixtures(&["norm", "pair.elt", "swap", "--kind", "symbol"]);
    assert_ne!(wrong.status.code(), Some(0));
}

#[test]
fn printed_elements_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    for (grpd, elt, expr) in [
        ("two_headed.grpd", "two_headed.elt", "f ** g + adj(g)"),
        ("pair.grpd", "pair.elt", "h ** r - 1/3 * swap"),
        ("integer_snake.grpd", "integer_snake.elt", "t ** t"),
        ("pair.grpd", "pair.elt", "0 * h"),
    ] {
        std::fs::copy(fixture(grpd), dir.path().join(grpd)).unwrap();
        let printed = run_in_fixtures(&["compute", elt, expr]);
        let text = stdout(&printed);
        let document: String = text.lines().take_while(|l| !l.starts_with("values")).map(|l| format!("{l}\n")).collect();
        let copy = dir.path().join(elt);
        std::fs::write(&copy, document).unwrap();
        let reread = steinberg(&["--format", "records", "compute", copy.to_str().unwrap(), "result"]);
        assert_eq!(reread.status.code(), Some(0), "{}", stderr(&reread));
        let original = run_in_fixtures(&["--format", "records", "compute", elt, expr]);
        assert_eq!(stdout(&reread), stdout(&original), "{expr}");
    }
}

#[test]
fn rewrite_and_restrict() {
    let o = run_in_fixtures(&["rewrite", "two_headed.elt", "f", "--into", "U,U1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("clopen(\"0\") head 1"));
    let escape = run_in_fixtures(&["rewrite", "two_headed.elt", "f", "--into", "U"]);
    assert_eq!(escape.status.code(), Some(1));
    let r = run_in_fixtures(&["restrict", "pair.elt", "h - (2-i)*E - (2+i)*F", "--to", "U", "--within", "G0"]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
}

#[test]
fn decompose_reports_summands() {
    let o = run_in_fixtures(&["--format", "records", "decompose", "pair.elt", "h", "--cover", "G0,E,F", "--epsilon", "1/10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("summand=")).count(), 3);
    assert!(out.lines().last().unwrap().starts_with("epsilon="));
}

#[test]
fn verify_records_are_deterministic() {
    let args = ["verify", "--suite", "convolution", "--trials", "20", "--seed", "3", "--format", "records"];
    let (a, b) = (steinberg(&args), steinberg(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().last().unwrap().starts_with("summary "));
    let zero = steinberg(&["verify", "--trials", "0"]);
    assert_eq!(zero.status.code(), Some(0));
}

#[test]
fn verify_flags_corrupted_fixtures() {
    let path = fixture("corrupted.grpd");
    let o = steinberg(&["--format", "records", "verify", "--suite", "axioms", "--trials", "5", "--groupoid", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().contains("status=fail"), "{out}");
    assert!(out.contains("inverse_defined"));
    let good = fixture("s3.grpd");
    let o = steinberg(&["verify", "--suite", "axioms", "--trials", "5", "--groupoid", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
