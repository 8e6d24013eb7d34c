use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use steinberg::groupoid::file::read_file;
use steinberg::groupoid::{load_groupoid, parse_groupoid, LoadedGroupoid, Region};
use steinberg::representation::{
    norm_sandwich, reduced_norm, snake_norm_sandwich, symbol_norm, ApproxNorm, NormReport,
};
use steinberg::rewriting::{bounded_summands, restrict, rewrite_within};
use steinberg::scalar::{format_complex, format_real, format_rational, parse_rational};
use steinberg::syntax::{load_document, AnyDocument, Document, ModelSyntax};
use steinberg::verify::{self, Suite};
use steinberg::{Element, Error, FiniteGroupoid, Result, SnakeGroupoid};

#[derive(Parser)]
#[command(name = "steinberg", version, about = "Exact computation in Steinberg algebras of ample groupoids")]
struct Cli {
    /// Output style; `records` prints `key=value` lines.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance for numerical comparisons in `verify`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormKind {
    Sup,
    Inorm,
    Reduced,
    Symbol,
    Sandwich,
}

#[derive(Subcommand)]
enum Command {
    /// Check a groupoid file against the groupoid axioms.
    Validate { path: PathBuf },
    /// Evaluate an expression and print it with its values on test points.
    Compute { file: PathBuf, expression: String },
    /// Value of an element at a point (arrow name, `base`, `head:<k>`, `unit:<w>`).
    Eval { file: PathBuf, expression: String, point: String },
    /// Norms of an element.
    Norm {
        file: PathBuf,
        expression: String,
        #[arg(long, value_enum, default_value_t = NormKind::Sandwich)]
        kind: NormKind,
    },
    /// Rewrite an element so every term lies in the given bisections.
    Rewrite {
        file: PathBuf,
        expression: String,
        /// Bisection names, comma separated.
        #[arg(long)]
        into: String,
    },
    /// Restrict an element supported in `--within` to the sub-bisection `--to`.
    Restrict {
        file: PathBuf,
        expression: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        within: String,
    },
    /// Split an element into summands over a cover with sup norms within epsilon.
    Decompose {
        file: PathBuf,
        expression: String,
        /// Bisection names, comma separated.
        #[arg(long)]
        cover: String,
        /// Exact decimal or fraction, e.g. `0.01` or `1/3`.
        #[arg(long, default_value = "1")]
        epsilon: String,
    },
    /// Run the randomized property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Extra groupoid files whose axioms are checked.
        #[arg(long = "groupoid")]
        fixtures: Vec<PathBuf>,
    },
}

/// Norm routines that differ between the backends.
trait Backend: ModelSyntax {
    fn reduced(f: &Element<Self>) -> Result<ApproxNorm> {
        reduced_norm(f)
    }
    fn symbol(_f: &Element<Self>) -> Result<ApproxNorm> {
        Err(Error::WrongModel("the symbol norm needs a snake with integer heads".into()))
    }
    fn sandwich(f: &Element<Self>) -> Result<NormReport>;
}

impl Backend for FiniteGroupoid {
    fn sandwich(f: &Element<Self>) -> Result<NormReport> {
        norm_sandwich(f)
    }
}

impl Backend for SnakeGroupoid {
    fn symbol(f: &Element<Self>) -> Result<ApproxNorm> {
        symbol_norm(f)
    }
    fn sandwich(f: &Element<Self>) -> Result<NormReport> {
        snake_norm_sandwich(f)
    }
}

fn is_name(text: &str) -> bool {
    text.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Bare element names keep their name in printed output.
fn output_name(expression: &str) -> &str {
    if is_name(expression.trim()) {
        expression.trim()
    } else {
        "result"
    }
}

fn values_table<G: Backend>(doc: &Document<G>, e: &Element<G>, format: Format) -> Result<String> {
    let mut out = String::new();
    if format == Format::Human {
        out.push_str("values on test points:\n");
    }
    for p in e.test_points() {
        let point = doc.model.format_point(&p);
        let value = format_complex(&e.evaluate(&p)?);
        match format {
            Format::Human => out.push_str(&format!("  {point:<12} {value}\n")),
            Format::Records => out.push_str(&format!("point={point} value={value}\n")),
        }
    }
    Ok(out)
}

fn norm_output<G: Backend>(e: &Element<G>, kind: NormKind, format: Format) -> Result<String> {
    let approx = |label: &str, key: &str, n: ApproxNorm| match format {
        Format::Human => format!("{label}: {} (± {})", format_real(n.value), format_real(n.tolerance)),
        Format::Records => format!("{key}={} {key}_tol={}", format_real(n.value), format_real(n.tolerance)),
    };
    let exact = |label: &str, key: &str, value: String| match format {
        Format::Human => format!("{label}: {value}"),
        Format::Records => format!("{key}={value}"),
    };
    Ok(match kind {
        NormKind::Sup => exact("sup norm", "sup", e.sup_norm().to_string()),
        NormKind::Inorm => exact("I-norm", "inorm", format_real(e.i_norm())),
        NormKind::Reduced => approx("reduced norm", "reduced", G::reduced(e)?),
        NormKind::Symbol => approx("symbol norm", "symbol", G::symbol(e)?),
        NormKind::Sandwich => {
            let report = G::sandwich(e)?;
            match format {
                Format::Human => report.to_string(),
                Format::Records => report.record(),
            }
        }
    })
}

fn element_command<G: Backend>(doc: &Document<G>, command: &Command, format: Format) -> Result<String> {
    match command {
        Command::Compute { expression, .. } => {
            let e = doc.evaluate(expression)?;
            let mut out = String::new();
            if format == Format::Human {
                out.push_str(&doc.format_element(output_name(expression), &e));
            }
            out.push_str(&values_table(doc, &e, format)?);
            Ok(out)
        }
        Command::Eval { expression, point, .. } => {
            let e = doc.evaluate(expression)?;
            let p = doc.model.parse_point(point)?;
            let value = format_complex(&e.evaluate(&p)?);
            let point = doc.model.format_point(&p);
            Ok(match format {
                Format::Human => format!("{}({point}) = {value}\n", output_name(expression)),
                Format::Records => format!("point={point} value={value}\n"),
            })
        }
        Command::Norm { expression, kind, .. } => {
            let e = doc.evaluate(expression)?;
            Ok(norm_output(&e, *kind, format)? + "\n")
        }
        Command::Rewrite { expression, into, .. } => {
            let e = doc.evaluate(expression)?;
            let region = Region::Union(doc.bisection_list(into)?);
            Ok(doc.format_element(output_name(expression), &rewrite_within(&e, &region)?))
        }
        Command::Restrict { expression, to, within, .. } => {
            let e = doc.evaluate(expression)?;
            let r = restrict(&e, &doc.bisection(to)?, &doc.bisection(within)?)?;
            Ok(doc.format_element(output_name(expression), &r))
        }
        Command::Decompose { expression, cover, epsilon, .. } => {
            let e = doc.evaluate(expression)?;
            let eps = parse_rational(epsilon)
                .ok_or_else(|| Error::Expression(format!("`{epsilon}` is not an exact number")))?;
            let names: Vec<&str> = cover.split(|c: char| c == ',' || c.is_whitespace()).filter(|n| !n.is_empty()).collect();
            let members = doc.bisection_list(cover)?;
            let d = bounded_summands(&e, &members, &eps)?;
            let base = output_name(expression);
            let labels: Vec<String> = (1..=d.parts.len()).map(|i| format!("{base}_{i}")).collect();
            match format {
                Format::Human => {
                    let mut out = format!(
                        "# {} summands, epsilon {}, sup norm of {base} {}\n# {} violating at first, {} repair rounds\n",
                        d.parts.len(),
                        format_rational(&eps),
                        e.sup_norm(),
                        d.initial_violations,
                        d.repair_rounds
                    );
                    for ((label, part), name) in labels.iter().zip(&d.parts).zip(&names) {
                        out.push_str(&format!("# {label} lives in {name}, sup norm {}\n", part.element.sup_norm()));
                    }
                    let pairs: Vec<(&str, &Element<G>)> =
                        labels.iter().map(String::as_str).zip(d.parts.iter().map(|p| &p.element)).collect();
                    Ok(out + &doc.format_elements(&pairs))
                }
                Format::Records => {
                    let mut out = String::new();
                    for ((label, part), name) in labels.iter().zip(&d.parts).zip(&names) {
                        out.push_str(&format!(
                            "summand={label} bisection={name} sup={} terms={}\n",
                            part.element.sup_norm(),
                            part.element.terms().len()
                        ));
                    }
                    out.push_str(&format!(
                        "epsilon={} bound={} initial_violations={} repair_rounds={}\n",
                        format_rational(&eps),
                        e.sup_norm(),
                        d.initial_violations,
                        d.repair_rounds
                    ));
                    Ok(out)
                }
            }
        }
        Command::Validate { .. } | Command::Verify { .. } => unreachable!("not an element command"),
    }
}

fn describe(g: &LoadedGroupoid) -> String {
    match g {
        LoadedGroupoid::Finite(g) => {
            format!("finite groupoid, {} arrows, {} units", g.arrow_count(), g.units().count())
        }
        LoadedGroupoid::Snake(s) => format!("snake groupoid with {} heads", s.heads()),
    }
}

fn element_file(command: &Command) -> &Path {
    match command {
        Command::Compute { file, .. }
        | Command::Eval { file, .. }
        | Command::Norm { file, .. }
        | Command::Rewrite { file, .. }
        | Command::Restrict { file, .. }
        | Command::Decompose { file, .. } => file,
        Command::Validate { .. } | Command::Verify { .. } => unreachable!("not an element command"),
    }
}

/// Output and exit code.
fn run(cli: &Cli) -> Result<(String, u8)> {
    match &cli.command {
        Command::Validate { path } => {
            let g = load_groupoid(path)?;
            Ok((
                match cli.format {
                    Format::Human => format!("{}: valid {}\n", path.display(), describe(&g)),
                    Format::Records => format!("valid=true kind={}\n", match g {
                        LoadedGroupoid::Finite(_) => "finite",
                        LoadedGroupoid::Snake(_) => "snake",
                    }),
                },
                0,
            ))
        }
        Command::Verify { suite, trials, fixtures } => {
            let mut config = verify::Config::new(suite.parse::<Suite>()?, *trials, cli.seed);
            config.tolerance = cli.tolerance;
            for path in fixtures {
                let source = parse_groupoid(&read_file(path)?)?;
                config.fixtures.push((path.display().to_string(), source));
            }
            let report = verify::run(&config);
            let text = match cli.format {
                Format::Human => format!("{report}\n"),
                Format::Records => report.records(),
            };
            Ok((text, if report.passed() { 0 } else { 1 }))
        }
        command => {
            let out = match load_document(element_file(command))? {
                AnyDocument::Finite(doc) => element_command(&doc, command, cli.format)?,
                AnyDocument::Snake(doc) => element_command(&doc, command, cli.format)?,
            };
            Ok((out, 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("steinberg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
