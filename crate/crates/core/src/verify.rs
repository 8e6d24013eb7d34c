//! Randomized property suites.
//!
//! Every property draws its cases from its own ChaCha stream, keyed by the
//! seed and the property's position in [`PROPERTIES`], so a property's
//! cases do not depend on which other suites run.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gen::{self, Sample};
use crate::groupoid::{
    disjointify, is_covered_by, AmpleGroupoid, ClopenSet, FiniteGroupoid, GroupoidSource, HeadGroup, Region,
    SnakeGroupoid, SnakePoint,
};
use crate::oracle::{brute_convolve, brute_support, matrix_norm, DenseMatrix};
use crate::representation::{
    fiber_norm, integer_snake_reduced_norm, reduced_norm, regular_rep, representative_units, symbol_norm, ApproxNorm,
};
use crate::rewriting::{bounded_summands, restrict, rewrite_within, trivial_bound, unit_support_window};
use crate::{Element, Error, ExactComplex, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Axioms,
    Convolution,
    Representation,
    Lemmas,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Convolution => "convolution",
            Suite::Representation => "representation",
            Suite::Lemmas => "lemmas",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axioms" => Ok(Suite::Axioms),
            "convolution" => Ok(Suite::Convolution),
            "representation" => Ok(Suite::Representation),
            "lemmas" => Ok(Suite::Lemmas),
            "all" => Ok(Suite::All),
            _ => Err(Error::UnknownName(format!("suite {s}"))),
        }
    }
}

pub struct Config {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    /// Replaces the default numeric tolerance of every property.
    pub tolerance: Option<f64>,
    /// Groupoid files whose axioms are checked as an extra property.
    pub fixtures: Vec<(String, GroupoidSource)>,
}

impl Config {
    pub fn new(suite: Suite, trials: usize, seed: u64) -> Self {
        Config { suite, trials, seed, tolerance: None, fixtures: Vec::new() }
    }
}

/// Result of one property.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub suite: &'static str,
    pub property: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// One `key=value` line; whitespace in the failure detail becomes `_`.
    pub fn record(&self) -> String {
        let mut line = format!(
            "suite={} property={} cases={} failures={} status={}",
            self.suite,
            self.property,
            self.cases,
            self.failures,
            if self.passed() { "pass" } else { "fail" }
        );
        if let Some(detail) = &self.first_failure {
            let token: String = detail.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
            line.push_str(&format!(" first_failure={token}"));
        }
        line
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<6} {}/{}: {} cases, {} failures",
            if self.passed() { "ok" } else { "FAILED" },
            self.suite,
            self.property,
            self.cases,
            self.failures
        )?;
        if let Some(detail) = &self.first_failure {
            write!(f, "\n       first failure: {detail}")?;
        }
        Ok(())
    }
}

pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(Outcome::passed)
    }

    pub fn cases(&self) -> usize {
        self.outcomes.iter().map(|o| o.cases).sum()
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().map(|o| o.failures).sum()
    }

    pub fn records(&self) -> String {
        let mut out: String = self.outcomes.iter().map(|o| o.record() + "\n").collect();
        out.push_str(&format!(
            "summary properties={} cases={} failures={} status={}\n",
            self.outcomes.len(),
            self.cases(),
            self.failures(),
            if self.passed() { "pass" } else { "fail" }
        ));
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        write!(
            f,
            "{} properties, {} cases, {} failures: {}",
            self.outcomes.len(),
            self.cases(),
            self.failures(),
            if self.passed() { "all passed" } else { "FAILED" }
        )
    }
}

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Check = std::result::Result<(), Failure>;

fn ensure(condition: bool, detail: impl FnOnce() -> String) -> Check {
    if condition {
        Ok(())
    } else {
        Err(Failure(detail()))
    }
}

struct Ctx {
    rng: ChaCha8Rng,
    tolerance: f64,
    case: usize,
}

struct Property {
    suite: Suite,
    name: &'static str,
    tolerance: f64,
    check: fn(&mut Ctx) -> Check,
}

const fn property(suite: Suite, name: &'static str, tolerance: f64, check: fn(&mut Ctx) -> Check) -> Property {
    Property { suite, name, tolerance, check }
}

/// Every randomized property, in output order.
const PROPERTIES: &[Property] = &[
    property(Suite::Axioms, "groupoid_axioms", 0.0, groupoid_axioms),
    property(Suite::Axioms, "inverse_semigroup_laws", 0.0, inverse_semigroup_laws),
    property(Suite::Axioms, "fiber_singletons", 0.0, fiber_singletons),
    property(Suite::Axioms, "disjointify", 0.0, disjointify_cover),
    property(Suite::Axioms, "clopen_canonical_forms", 0.0, clopen_canonical_forms),
    property(Suite::Convolution, "oracle_convolution", 0.0, oracle_convolution),
    property(Suite::Convolution, "oracle_support", 0.0, oracle_support),
    property(Suite::Convolution, "star_algebra_laws", 0.0, star_algebra_laws),
    property(Suite::Convolution, "norm_symmetries", 1e-9, norm_symmetries),
    property(Suite::Convolution, "bisection_square_in_units", 0.0, bisection_square_in_units),
    property(Suite::Convolution, "spectral_identity", 0.0, spectral_identity),
    property(Suite::Representation, "star_homomorphism", 0.0, star_homomorphism),
    property(Suite::Representation, "i_norm_domination", 1e-10, i_norm_domination),
    property(Suite::Representation, "reduced_c_star_identity", 1e-8, reduced_c_star_identity),
    property(Suite::Representation, "unit_reduced_equals_sup", 1e-10, unit_reduced_equals_sup),
    property(Suite::Representation, "bisection_bound", 1e-10, bisection_bound),
    property(Suite::Representation, "faithfulness", 1e-10, faithfulness),
    property(Suite::Representation, "norm_ordering", 1e-10, norm_ordering),
    property(Suite::Representation, "symbol_dominates_sections", 1e-10, symbol_dominates_sections),
    property(Suite::Representation, "matrix_norm_hermitian", 1e-8, matrix_norm_hermitian),
    property(Suite::Lemmas, "rewrite_within", 0.0, rewrite_within_cover),
    property(Suite::Lemmas, "restrict", 0.0, restrict_to_sub_bisection),
    property(Suite::Lemmas, "bounded_summands", 0.0, bounded_summands_cover),
    property(Suite::Lemmas, "unit_support_window", 0.0, unit_support_window_contains),
];

/// `(suite, property)` for every randomized property.
pub fn property_names() -> impl Iterator<Item = (&'static str, &'static str)> {
    PROPERTIES.iter().map(|p| (p.suite.name(), p.name))
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        format!("panic: {s}")
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("panic: {s}")
    } else {
        "panic".into()
    }
}

fn run_one(index: usize, p: &Property, trials: usize, seed: u64, tolerance: Option<f64>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut ctx = Ctx { rng, tolerance: tolerance.unwrap_or(p.tolerance), case: 0 };
    let mut outcome =
        Outcome { suite: p.suite.name(), property: p.name.into(), cases: 0, failures: 0, first_failure: None };
    for case in 0..trials {
        ctx.case = case;
        let result = catch_unwind(AssertUnwindSafe(|| (p.check)(&mut ctx)))
            .unwrap_or_else(|payload| Err(Failure(panic_message(payload))));
        outcome.cases += 1;
        if let Err(Failure(detail)) = result {
            outcome.failures += 1;
            outcome.first_failure.get_or_insert_with(|| format!("case {case}: {detail}"));
        }
    }
    outcome
}

/// Runs one property by name; `None` for an unknown name.
pub fn run_property(name: &str, trials: usize, seed: u64, tolerance: Option<f64>) -> Option<Outcome> {
    let index = PROPERTIES.iter().position(|p| p.name == name)?;
    Some(run_one(index, &PROPERTIES[index], trials, seed, tolerance))
}

fn fixture_axioms(fixtures: &[(String, GroupoidSource)]) -> Outcome {
    let mut outcome = Outcome {
        suite: Suite::Axioms.name(),
        property: "fixture_axioms".into(),
        cases: 0,
        failures: 0,
        first_failure: None,
    };
    for (name, source) in fixtures {
        outcome.cases += 1;
        if let GroupoidSource::Finite(table) = source {
            if let Some(v) = table.violations().first() {
                outcome.failures += 1;
                outcome.first_failure.get_or_insert_with(|| format!("{name}: {}: {}", v.property, v.detail));
            }
        }
    }
    outcome
}

pub fn run(config: &Config) -> Report {
    let mut outcomes = Vec::new();
    if config.suite.includes(Suite::Axioms) && !config.fixtures.is_empty() {
        outcomes.push(fixture_axioms(&config.fixtures));
    }
    for (index, p) in PROPERTIES.iter().enumerate() {
        if config.suite.includes(p.suite) {
            outcomes.push(run_one(index, p, config.trials, config.seed, config.tolerance));
        }
    }
    Report { outcomes }
}

/// Backend-specific reduced norm: the symbol route for integer heads.
trait Backend: Sample + fmt::Debug {
    fn reduced(f: &Element<Self>) -> Result<ApproxNorm>;
}

impl Backend for FiniteGroupoid {
    fn reduced(f: &Element<Self>) -> Result<ApproxNorm> {
        reduced_norm(f)
    }
}

impl Backend for SnakeGroupoid {
    fn reduced(f: &Element<Self>) -> Result<ApproxNorm> {
        match f.model().heads() {
            HeadGroup::Integers => integer_snake_reduced_norm(f),
            HeadGroup::Cyclic(_) => reduced_norm(f),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Models {
    /// Finite groupoids and `Z_n` snakes, the models with finite fibers.
    FiniteFibers,
    /// Integer-headed snakes as well.
    All,
}

fn dispatch(
    ctx: &mut Ctx,
    models: Models,
    finite: fn(&mut Ctx, &Arc<FiniteGroupoid>) -> Check,
    snake: fn(&mut Ctx, &Arc<SnakeGroupoid>) -> Check,
) -> Check {
    let kinds = if models == Models::All { 3 } else { 2 };
    match ctx.case % kinds {
        0 => {
            let g = Arc::new(gen::finite_groupoid(&mut ctx.rng));
            finite(ctx, &g)
        }
        1 => {
            let g = Arc::new(gen::cyclic_snake(&mut ctx.rng));
            snake(ctx, &g)
        }
        _ => snake(ctx, &Arc::new(SnakeGroupoid::integers())),
    }
}

fn same_set<G: AmpleGroupoid>(m: &G, a: &G::Bisection, b: &G::Bisection) -> bool {
    m.test_points(&[a, b]).iter().all(|p| m.contains(a, p) == m.contains(b, p))
}

fn sub_bisection<G: Sample>(ctx: &mut Ctx, m: &G, b: &G::Bisection) -> G::Bisection {
    m.product(b, &m.random_unit_region(&mut ctx.rng))
}

fn maybe_decoys<G: Sample>(ctx: &mut Ctx, f: Element<G>) -> Element<G> {
    if ctx.rng.gen_bool(0.5) {
        gen::with_decoys(&mut ctx.rng, &f)
    } else {
        f
    }
}

fn groupoid_axioms(ctx: &mut Ctx) -> Check {
    let g = gen::finite_groupoid(&mut ctx.rng);
    let violations = g.table().violations();
    ensure(violations.is_empty(), || format!("{}", violations[0]))
}

fn semigroup_laws<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let (b, d, e) =
        (m.random_bisection(&mut ctx.rng), m.random_bisection(&mut ctx.rng), m.random_bisection(&mut ctx.rng));
    let left = m.product(&m.product(&b, &d), &e);
    let right = m.product(&b, &m.product(&d, &e));
    ensure(same_set(&**m, &left, &right), || format!("(BD)E != B(DE) for {b:?}, {d:?}, {e:?}"))?;
    let inv = m.inverse(&m.product(&b, &d));
    let swapped = m.product(&m.inverse(&d), &m.inverse(&b));
    ensure(same_set(&**m, &inv, &swapped), || format!("(BD)^-1 != D^-1 B^-1 for {b:?}, {d:?}"))?;
    let bbb = m.product(&m.product(&b, &m.inverse(&b)), &b);
    ensure(same_set(&**m, &bbb, &b), || format!("B B^-1 B != B for {b:?}"))
}

fn inverse_semigroup_laws(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, semigroup_laws::<FiniteGroupoid>, semigroup_laws::<SnakeGroupoid>)
}

fn singletons<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let b = m.random_bisection(&mut ctx.rng);
    let x = m.random_unit(&mut ctx.rng);
    let fiber = m.fiber(&x)?.into_finite()?;
    let hits = fiber.iter().filter(|g| m.contains(&b, g)).count();
    ensure(hits <= 1, || format!("{b:?} meets the fiber over {x:?} in {hits} arrows"))
}

fn fiber_singletons(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::FiniteFibers, singletons::<FiniteGroupoid>, singletons::<SnakeGroupoid>)
}

fn disjoint_pieces<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let within = m.random_bisection(&mut ctx.rng);
    let n = ctx.rng.gen_range(1..=4);
    let cover: Vec<G::Bisection> = (0..n).map(|_| sub_bisection(ctx, &**m, &within)).collect();
    let pieces = disjointify(&**m, &cover, &within)?;
    ensure(pieces.len() == cover.len(), || "piece count differs from cover size".into())?;
    let family: Vec<&G::Bisection> = cover.iter().chain(&pieces).collect();
    for p in m.test_points(&family) {
        let covered = cover.iter().any(|b| m.contains(b, &p));
        let hits = pieces.iter().filter(|b| m.contains(b, &p)).count();
        ensure(hits <= 1, || format!("{p:?} lies in {hits} pieces"))?;
        ensure((hits == 1) == covered, || format!("union changed at {p:?}"))?;
    }
    for (piece, member) in pieces.iter().zip(&cover) {
        ensure(m.is_subset(piece, member), || format!("piece {piece:?} leaves {member:?}"))?;
    }
    Ok(())
}

fn disjointify_cover(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, disjoint_pieces::<FiniteGroupoid>, disjoint_pieces::<SnakeGroupoid>)
}

fn clopen_canonical_forms(ctx: &mut Ctx) -> Check {
    let a = gen::random_clopen(&mut ctx.rng);
    let b = if ctx.case % 2 == 0 {
        gen::random_clopen(&mut ctx.rng)
    } else {
        // the same set, written with split cylinders
        let words = a.cylinders();
        let split = words.iter().filter(|w| w.len() < gen::MAX_DEPTH).flat_map(|w| [format!("{w}0"), format!("{w}1")]);
        let kept = words.iter().filter(|w| w.len() >= gen::MAX_DEPTH).cloned();
        ClopenSet::from_cylinders(split.chain(kept))
    };
    ensure(ClopenSet::from_cylinders(a.cylinders()) == a, || format!("{a} is not canonical"))?;
    // sets of depth <= 4 are determined by the points w000... with |w| = 5
    let snake = SnakeGroupoid::cyclic(2);
    let (ua, ub) = (snake.unit_region(a.clone()), snake.unit_region(b.clone()));
    let same_points = (0..32u32).all(|i| {
        let word: String = (0..5).rev().map(|bit| if i >> bit & 1 == 1 { '1' } else { '0' }).collect();
        let p = SnakePoint::unit(&word);
        snake.contains(&ua, &p) == snake.contains(&ub, &p)
    });
    ensure(same_points == (a == b), || format!("{a} and {b}: same points {same_points}, equal forms {}", a == b))
}

fn finite_pair(ctx: &mut Ctx) -> (Element<FiniteGroupoid>, Element<FiniteGroupoid>) {
    let g = Arc::new(gen::finite_groupoid(&mut ctx.rng));
    let f = gen::element(&mut ctx.rng, &g);
    let f = maybe_decoys(ctx, f);
    let h = gen::element(&mut ctx.rng, &g);
    (f, h)
}

fn oracle_convolution(ctx: &mut Ctx) -> Check {
    let (f, h) = finite_pair(ctx);
    let product = f.convolve(&h)?;
    for (arrow, expected) in brute_convolve(&f, &h)? {
        let value = product.evaluate(&arrow)?;
        ensure(value == expected, || {
            format!("at {}: convolve gives {value:?}, brute force {expected:?}", f.model().name(arrow))
        })?;
    }
    Ok(())
}

fn oracle_support(ctx: &mut Ctx) -> Check {
    let (f, _) = finite_pair(ctx);
    let support = f.open_support();
    let found: std::collections::BTreeSet<_> = support.points().copied().collect();
    ensure(found == brute_support(&f), || format!("support {found:?} differs from the scan"))?;
    ensure(support.open, || "a finite support is always open".into())
}

fn star_laws<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::element(&mut ctx.rng, m);
    let g = gen::element(&mut ctx.rng, m);
    let h = gen::element(&mut ctx.rng, m);
    let c = gen::coefficient(&mut ctx.rng);
    ensure(f.convolve(&g.convolve(&h)?)?.equals(&f.convolve(&g)?.convolve(&h)?)?, || "associativity".into())?;
    ensure(
        f.convolve(&g.add(&h)?)?.equals(&f.convolve(&g)?.add(&f.convolve(&h)?)?)?,
        || "left distributivity".into(),
    )?;
    ensure(
        f.add(&g)?.convolve(&h)?.equals(&f.convolve(&h)?.add(&g.convolve(&h)?)?)?,
        || "right distributivity".into(),
    )?;
    ensure(
        f.convolve(&g)?.involute().equals(&g.involute().convolve(&f.involute())?)?,
        || "(fg)* != g* f*".into(),
    )?;
    ensure(f.scale(&c).involute().equals(&f.involute().scale(&c.conj()))?, || "involution is not conjugate-linear".into())?;
    ensure(f.involute().involute().equals(&f)?, || "f** != f".into())
}

fn star_algebra_laws(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, star_laws::<FiniteGroupoid>, star_laws::<SnakeGroupoid>)
}

fn symmetries<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::element(&mut ctx.rng, m);
    let f = maybe_decoys(ctx, f);
    let g = gen::element(&mut ctx.rng, m);
    let tol = ctx.tolerance;
    let fs = f.involute();
    ensure(fs.sup_norm() == f.sup_norm(), || format!("sup norms {} and {}", fs.sup_norm(), f.sup_norm()))?;
    let (a, b) = (fs.i_norm(), f.i_norm());
    ensure((a - b).abs() <= tol * b.max(1.0), || format!("I-norms {a} and {b}"))?;
    let (fg, bound) = (f.convolve(&g)?.i_norm(), f.i_norm() * g.i_norm());
    ensure(fg <= bound + tol * bound.max(1.0), || format!("I-norm of a product {fg} exceeds {bound}"))
}

fn norm_symmetries(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, symmetries::<FiniteGroupoid>, symmetries::<SnakeGroupoid>)
}

fn square_in_units<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let b = m.random_bisection(&mut ctx.rng);
    let f = gen::element_in(&mut ctx.rng, m, &b);
    let f = maybe_decoys(ctx, f);
    let ff = f.involute().convolve(&f)?;
    ensure(ff.is_supported_in(&Region::UnitSpace), || format!("f*f leaves the unit space for f in {b:?}"))
}

fn bisection_square_in_units(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, square_in_units::<FiniteGroupoid>, square_in_units::<SnakeGroupoid>)
}

fn spectral<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::unit_element(&mut ctx.rng, m);
    let f = maybe_decoys(ctx, f);
    let window = unit_support_window(&f)?;
    let radius = f.involute().convolve(&f)?.spectral_radius(&Region::bisection(&window))?;
    let sup = f.sup_norm();
    ensure(radius == sup.square(), || format!("spectral radius {radius}, squared sup norm {}", sup.square()))
}

fn spectral_identity(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, spectral::<FiniteGroupoid>, spectral::<SnakeGroupoid>)
}

fn homomorphism<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::element(&mut ctx.rng, m);
    let g = gen::element(&mut ctx.rng, m);
    let units = representative_units(&f);
    let x = match units.choose(&mut ctx.rng) {
        Some(x) if ctx.rng.gen_bool(0.5) => x.clone(),
        _ => m.random_unit(&mut ctx.rng),
    };
    let (pf, pg) = (regular_rep(&f, &x)?, regular_rep(&g, &x)?);
    ensure(regular_rep(&f.convolve(&g)?, &x)? == pf.mul(&pg), || format!("pi(fg) != pi(f)pi(g) at {x:?}"))?;
    ensure(regular_rep(&f.involute(), &x)? == pf.adjoint(), || format!("pi(f*) != pi(f)* at {x:?}"))
}

fn star_homomorphism(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::FiniteFibers, homomorphism::<FiniteGroupoid>, homomorphism::<SnakeGroupoid>)
}

fn domination<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::element(&mut ctx.rng, m);
    let bound = f.i_norm();
    for x in representative_units(&f) {
        let norm = fiber_norm(&f, &x)?;
        ensure(norm <= bound + ctx.tolerance, || format!("fiber norm {norm} at {x:?} exceeds the I-norm {bound}"))?;
    }
    Ok(())
}

fn i_norm_domination(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::FiniteFibers, domination::<FiniteGroupoid>, domination::<SnakeGroupoid>)
}

fn reduced_c_star_identity(ctx: &mut Ctx) -> Check {
    let (f, _) = finite_pair(ctx);
    let norm = reduced_norm(&f)?.value;
    let square = reduced_norm(&f.involute().convolve(&f)?)?.value;
    ensure((square - norm * norm).abs() <= ctx.tolerance, || {
        format!("||f*f|| = {square}, ||f||^2 = {}", norm * norm)
    })
}

fn unit_reduced<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::unit_element(&mut ctx.rng, m);
    let f = maybe_decoys(ctx, f);
    let (r, sup) = (G::reduced(&f)?, f.sup_norm().value());
    ensure((r.value - sup).abs() <= ctx.tolerance.max(r.tolerance), || format!("reduced {} against sup {sup}", r.value))
}

fn unit_reduced_equals_sup(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, unit_reduced::<FiniteGroupoid>, unit_reduced::<SnakeGroupoid>)
}

fn bisection_bounded<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let b = m.random_bisection(&mut ctx.rng);
    let f = gen::element_in(&mut ctx.rng, m, &b);
    let f = maybe_decoys(ctx, f);
    let ff = f.involute().convolve(&f)?;
    ensure(ff.is_supported_in(&Region::UnitSpace), || "f*f leaves the unit space".into())?;
    let (r, sup) = (G::reduced(&f)?, f.sup_norm().value());
    ensure(r.value <= sup + ctx.tolerance + r.tolerance, || format!("reduced {} exceeds sup {sup}", r.value))
}

fn bisection_bound(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, bisection_bounded::<FiniteGroupoid>, bisection_bounded::<SnakeGroupoid>)
}

fn faithful<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let mut f = gen::element(&mut ctx.rng, m);
    if ctx.rng.gen_bool(0.4) {
        // a zero element with a non-trivial term list
        let mut copy = f.terms().iter().map(|t| (-t.coefficient.clone(), t.bisection.clone())).collect::<Vec<_>>();
        copy.shuffle(&mut ctx.rng);
        f = f.add(&Element::from_terms(m, copy))?;
    }
    let f = maybe_decoys(ctx, f);
    let r = G::reduced(&f)?;
    let vanishes = r.value <= ctx.tolerance.max(r.tolerance);
    ensure(vanishes == f.is_zero(), || format!("reduced norm {} but is_zero {}", r.value, f.is_zero()))
}

fn faithfulness(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, faithful::<FiniteGroupoid>, faithful::<SnakeGroupoid>)
}

fn ordering<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::element(&mut ctx.rng, m);
    let f = maybe_decoys(ctx, f);
    let (sup, mf, r) = (f.sup_norm().value(), trivial_bound(&f), G::reduced(&f)?);
    let slack = ctx.tolerance + r.tolerance;
    ensure(sup <= mf + 1e-12 * mf.max(1.0), || format!("sup {sup} exceeds M_f {mf}"))?;
    ensure(sup <= r.value + slack, || format!("sup {sup} exceeds reduced {}", r.value))?;
    ensure(r.value <= mf + slack, || format!("reduced {} exceeds M_f {mf}", r.value))
}

fn norm_ordering(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, ordering::<FiniteGroupoid>, ordering::<SnakeGroupoid>)
}

/// Finite sections of the base-fiber convolution operator never exceed the
/// symbol bound.
fn symbol_dominates_sections(ctx: &mut Ctx) -> Check {
    const SECTION: usize = 8;
    let m = Arc::new(SnakeGroupoid::integers());
    let f = gen::element(&mut ctx.rng, &m);
    let symbol = symbol_norm(&f)?;
    let coefficient = |k: i64| -> Result<Complex64> {
        let p = if k == 0 { SnakePoint::Base } else { SnakePoint::Head(k) };
        Ok(f.evaluate(&p)?.to_complex64())
    };
    let mut section = DenseMatrix::zeros(SECTION);
    for i in 0..SECTION {
        for j in 0..SECTION {
            section.set(i, j, coefficient(i as i64 - j as i64)?);
        }
    }
    let norm = matrix_norm(&section)?;
    ensure(norm <= symbol.value + symbol.tolerance + ctx.tolerance, || {
        format!("section norm {norm} exceeds symbol norm {} +- {}", symbol.value, symbol.tolerance)
    })
}

/// `[[a, b], [conj b, d]]` has eigenvalues `(a+d)/2 ± sqrt(((a-d)/2)^2 + |b|^2)`.
fn matrix_norm_hermitian(ctx: &mut Ctx) -> Check {
    let mut draw = || ctx.rng.gen_range(-5.0..5.0);
    let (a, d, b) = (draw(), draw(), Complex64::new(draw(), draw()));
    let m = DenseMatrix::from_rows(vec![
        vec![Complex64::new(a, 0.0), b],
        vec![b.conj(), Complex64::new(d, 0.0)],
    ]);
    let (mean, radius) = ((a + d) / 2.0, (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt());
    let exact = (mean + radius).abs().max((mean - radius).abs());
    let computed = matrix_norm(&m)?;
    ensure((computed - exact).abs() <= ctx.tolerance, || format!("{m:?}: computed {computed}, exact {exact}"))
}

/// The two-headed snake, `1_{G0} - 1_B`, rewritten into `U ∪ U_1`.
fn rewrite_two_headed_example() -> Check {
    let m = Arc::new(SnakeGroupoid::cyclic(2));
    let b = m.bisection(ClopenSet::full(), Some(1))?;
    let f = Element::from_terms(&m, vec![(ExactComplex::from_i64(1, 0), m.unit_space()), (ExactComplex::from_i64(-1, 0), b)]);
    let u = m.unit_region(ClopenSet::cylinder("0"));
    let u1 = m.bisection(ClopenSet::cylinder("0"), Some(1))?;
    let cover = vec![u.clone(), u1.clone()];
    let r = rewrite_within(&f, &Region::Union(cover.clone()))?;
    let expected = Element::from_terms(&m, vec![(ExactComplex::from_i64(1, 0), u), (ExactComplex::from_i64(-1, 0), u1)]);
    ensure(r.equals(&expected)?, || "the two-headed example does not rewrite to 1_U - 1_U1".into())?;
    ensure(r.terms().iter().all(|t| is_covered_by(&*m, &t.bisection, &cover)), || "a term leaves U ∪ U1".into())
}

fn rewrite<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::element(&mut ctx.rng, m);
    let f = gen::with_decoys(&mut ctx.rng, &f);
    let cover = gen::cover_of(&mut ctx.rng, &f);
    let r = rewrite_within(&f, &Region::Union(cover.clone()))?;
    ensure(r.equals(&f)?, || "rewriting changed a value".into())?;
    for t in r.terms() {
        ensure(is_covered_by(&**m, &t.bisection, &cover), || format!("term {:?} leaves the cover", t.bisection))?;
    }
    Ok(())
}

fn rewrite_within_cover(ctx: &mut Ctx) -> Check {
    if ctx.case == 0 {
        return rewrite_two_headed_example();
    }
    dispatch(ctx, Models::All, rewrite::<FiniteGroupoid>, rewrite::<SnakeGroupoid>)
}

fn restriction<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let within = m.random_bisection(&mut ctx.rng);
    let f = gen::element_in(&mut ctx.rng, m, &within);
    let f = maybe_decoys(ctx, f);
    let b = sub_bisection(ctx, &**m, &within);
    let r = restrict(&f, &b, &within)?;
    let mut family = f.family();
    family.extend(r.family());
    family.push(&b);
    for p in m.test_points(&family) {
        let expected = if m.contains(&b, &p) { f.evaluate(&p)? } else { ExactComplex::from_i64(0, 0) };
        ensure(r.evaluate(&p)? == expected, || format!("restriction wrong at {p:?}"))?;
    }
    Ok(())
}

fn restrict_to_sub_bisection(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, restriction::<FiniteGroupoid>, restriction::<SnakeGroupoid>)
}

fn summands<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = gen::element(&mut ctx.rng, m);
    let f = gen::with_decoys(&mut ctx.rng, &f);
    let cover = gen::cover_of(&mut ctx.rng, &f);
    let denominator = [1, 10, 100][(ctx.case / 3) % 3];
    let epsilon = BigRational::new(BigInt::from(1), BigInt::from(denominator));
    let d = bounded_summands(&f, &cover, &epsilon)?;
    ensure(d.parts.len() == cover.len(), || "one summand per cover member".into())?;
    ensure(d.sum(m).equals(&f)?, || "the summands do not add up to f".into())?;
    let bound = f.sup_norm();
    for (i, (part, member)) in d.parts.iter().zip(&cover).enumerate() {
        ensure(part.element.is_supported_in(&Region::bisection(member)), || format!("summand {i} leaves its bisection"))?;
        ensure(part.element.sup_norm().le_plus(&bound, &epsilon), || {
            format!("summand {i} has sup norm {} above {bound} + 1/{denominator}", part.element.sup_norm())
        })?;
    }
    Ok(())
}

fn bounded_summands_cover(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, summands::<FiniteGroupoid>, summands::<SnakeGroupoid>)
}

fn window<G: Backend>(ctx: &mut Ctx, m: &Arc<G>) -> Check {
    let f = if ctx.rng.gen_bool(0.7) { gen::unit_element(&mut ctx.rng, m) } else { gen::element(&mut ctx.rng, m) };
    let f = maybe_decoys(ctx, f);
    match (f.is_supported_in(&Region::UnitSpace), unit_support_window(&f)) {
        (true, Ok(w)) => {
            ensure(m.is_subset(&w, &m.unit_space()), || format!("window {w:?} is not a unit region"))?;
            ensure(f.is_supported_in(&Region::bisection(&w)), || format!("support leaves the window {w:?}"))
        }
        (false, Err(Error::SupportEscapes(_))) => Ok(()),
        (_, Err(e)) => Err(e.into()),
        (false, Ok(_)) => Err(Failure("a window was returned for an element off the unit space".into())),
    }
}

fn unit_support_window_contains(ctx: &mut Ctx) -> Check {
    dispatch(ctx, Models::All, window::<FiniteGroupoid>, window::<SnakeGroupoid>)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::parse_groupoid;

    #[test]
    fn every_property_passes_a_short_run() {
        let report = run(&Config::new(Suite::All, 12, 1));
        assert!(report.passed(), "{report}");
        assert_eq!(report.outcomes.len(), PROPERTIES.len());
    }

    #[test]
    fn records_are_reproducible() {
        let a = run(&Config::new(Suite::Lemmas, 5, 9)).records();
        let b = run(&Config::new(Suite::Lemmas, 5, 9)).records();
        assert_eq!(a, b);
        assert!(a.lines().all(|l| l.split(' ').skip(1).all(|kv| kv.contains('='))));
    }

    #[test]
    fn zero_trials() {
        let report = run(&Config::new(Suite::All, 0, 0));
        assert!(report.passed());
        assert_eq!(report.cases(), 0);
    }

    #[test]
    fn corrupted_fixture_fails() {
        let text = "kind: finite\nunit u\narrow a src=u rng=u\ncompose a a = u\n";
        let source = parse_groupoid(text).unwrap();
        let mut config = Config::new(Suite::Axioms, 1, 0);
        config.fixtures.push(("broken.grpd".into(), source));
        let report = run(&config);
        assert!(!report.passed());
        let detail = report.outcomes[0].first_failure.as_deref().unwrap();
        assert!(detail.starts_with("broken.grpd: inverse_defined"), "{detail}");
    }

    #[test]
    fn property_streams_are_independent_of_suite_selection() {
        let alone = run_property("restrict", 7, 3, None).unwrap();
        let report = run(&Config::new(Suite::All, 7, 3));
        assert!(report.outcomes.contains(&alone));
    }
}
