//! Ample groupoid backends.
//!
//! A backend exposes its compact open bisections as an inverse semigroup
//! together with a finite, decidable view of pointwise questions: for any
//! finite family of bisections it produces a set of test points on which
//! every linear combination of the family's indicators is determined.

pub mod clopen;
pub mod file;
pub mod finite;
pub mod snake;

use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

pub use clopen::{is_binary_word, ClopenSet};
pub use file::{load_groupoid, parse_groupoid, GroupoidSource, LoadedGroupoid};
pub use finite::{Arrow, ArrowSet, AxiomViolation, FiniteGroupoid, GroupoidTable};
pub use snake::{HeadGroup, SnakeBisection, SnakeGroupoid, SnakePoint};

/// A concrete ample groupoid with Hausdorff unit space.
pub trait AmpleGroupoid: fmt::Debug + PartialEq + Send + Sync + Sized + 'static {
    /// A compact open bisection.
    type Bisection: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync;
    /// A point of the groupoid.
    type Point: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn empty_bisection(&self) -> Self::Bisection;
    /// The unit space as a bisection. Both backends have compact unit space.
    fn unit_space(&self) -> Self::Bisection;
    fn is_empty(&self, b: &Self::Bisection) -> bool;

    /// `BD = {bd : b in B, d in D, s(b) = r(d)}`.
    fn product(&self, b: &Self::Bisection, d: &Self::Bisection) -> Self::Bisection;
    fn inverse(&self, b: &Self::Bisection) -> Self::Bisection;
    /// `s(B)` as a bisection contained in the unit space.
    fn source(&self, b: &Self::Bisection) -> Self::Bisection;
    /// `r(B)` as a bisection contained in the unit space.
    fn range(&self, b: &Self::Bisection) -> Self::Bisection;

    fn contains(&self, b: &Self::Bisection, p: &Self::Point) -> bool;
    fn is_subset(&self, b: &Self::Bisection, d: &Self::Bisection) -> bool;
    /// `B ∩ D` when it is again a compact open bisection.
    fn intersection(&self, b: &Self::Bisection, d: &Self::Bisection) -> Option<Self::Bisection>;
    /// `B \ D` when it is again a compact open bisection.
    fn difference(&self, b: &Self::Bisection, d: &Self::Bisection) -> Option<Self::Bisection>;
    /// `B ∪ D` when it is again a compact open bisection.
    fn union(&self, b: &Self::Bisection, d: &Self::Bisection) -> Option<Self::Bisection>;

    fn owns_point(&self, p: &Self::Point) -> bool;
    fn is_unit(&self, p: &Self::Point) -> bool;
    fn point_source(&self, p: &Self::Point) -> Self::Point;
    fn point_range(&self, p: &Self::Point) -> Self::Point;
    fn point_inverse(&self, p: &Self::Point) -> Self::Point;
    /// `pq` when `s(p) = r(q)`.
    fn point_compose(&self, p: &Self::Point, q: &Self::Point) -> Option<Self::Point>;
    /// `G_x = s^{-1}(x)`.
    fn fiber(&self, x: &Self::Point) -> Result<Fiber<Self::Point>>;

    /// Resolution at which every member of `family` is a union of classes.
    fn working_depth(&self, family: &[&Self::Bisection]) -> usize;
    /// One representative per class at the given resolution, restricted to
    /// classes that can meet the family.
    fn test_points_at(&self, family: &[&Self::Bisection], depth: usize) -> Vec<Self::Point>;
    /// The canonical compact open bisection around the class of `p`.
    ///
    /// It lies inside every family member containing `p`, and for a class
    /// that is not open it also absorbs the neighbouring open class.
    fn neighborhood(&self, p: &Self::Point, depth: usize) -> Self::Bisection;
    /// Whether the class of `p` is an open subset of `G`.
    fn class_is_open(&self, p: &Self::Point, depth: usize) -> bool;
    /// Whether the union of the classes of `points` is open in `G`.
    fn is_open_union(&self, points: &[Self::Point], depth: usize) -> bool;
    fn describe_class(&self, p: &Self::Point, depth: usize) -> String;
    /// Some compact open bisection containing every point, if one exists.
    fn bisection_through(&self, points: &[Self::Point]) -> Option<Self::Bisection>;

    fn test_points(&self, family: &[&Self::Bisection]) -> Vec<Self::Point> {
        let depth = self.working_depth(family);
        self.test_points_at(family, depth)
    }
}

/// `G_x`, either listed or enumerated lazily.
pub enum Fiber<P> {
    Finite(Vec<P>),
    Unbounded(Box<dyn Iterator<Item = P> + Send>),
}

impl<P> Fiber<P> {
    pub fn into_finite(self) -> Result<Vec<P>> {
        match self {
            Fiber::Finite(points) => Ok(points),
            Fiber::Unbounded(_) => Err(Error::InfiniteFiber),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Fiber::Finite(_))
    }
}

impl<P: fmt::Debug> fmt::Debug for Fiber<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fiber::Finite(points) => f.debug_tuple("Finite").field(points).finish(),
            Fiber::Unbounded(_) => f.write_str("Unbounded(..)"),
        }
    }
}

/// A target for support questions.
#[derive(Clone, Debug, PartialEq)]
pub enum Region<B> {
    UnitSpace,
    /// The union of the listed bisections.
    Union(Vec<B>),
}

impl<B: Clone> Region<B> {
    pub fn bisection(b: &B) -> Self {
        Region::Union(vec![b.clone()])
    }

    pub fn members<G: AmpleGroupoid<Bisection = B>>(&self, model: &G) -> Vec<B> {
        match self {
            Region::UnitSpace => vec![model.unit_space()],
            Region::Union(members) => members.clone(),
        }
    }

    pub fn contains<G: AmpleGroupoid<Bisection = B>>(&self, model: &G, p: &G::Point) -> bool {
        match self {
            Region::UnitSpace => model.is_unit(p),
            Region::Union(members) => members.iter().any(|b| model.contains(b, p)),
        }
    }
}

/// Test points of a family in the order rewriting wants them: classes that
/// are not open first, so that their neighbourhoods absorb adjacent classes.
pub fn points_for_covering<G: AmpleGroupoid>(
    model: &G,
    points: Vec<G::Point>,
    depth: usize,
) -> Vec<G::Point> {
    let mut points = points;
    points.sort_by_key(|p| model.class_is_open(p, depth));
    points
}

/// Decides `B ⊆ ∪ region` by checking test points of the joint family.
pub fn is_covered_by<G: AmpleGroupoid>(model: &G, b: &G::Bisection, region: &[G::Bisection]) -> bool {
    let mut family: Vec<&G::Bisection> = vec![b];
    family.extend(region.iter());
    model
        .test_points(&family)
        .iter()
        .filter(|p| model.contains(b, p))
        .all(|p| region.iter().any(|r| model.contains(r, p)))
}

/// Replaces `D_1, D_2, …` by `D_1, D_2 \ D_1, D_3 \ (D_1 ∪ D_2), …`.
///
/// Every member must lie inside `within`; differences are then compact open
/// because `within` is Hausdorff. Order is preserved.
pub fn disjointify<G: AmpleGroupoid>(
    model: &G,
    cover: &[G::Bisection],
    within: &G::Bisection,
) -> Result<Vec<G::Bisection>> {
    for (i, member) in cover.iter().enumerate() {
        if !model.is_subset(member, within) {
            return Err(Error::NotContained(format!("cover member {i} is not inside the ambient bisection")));
        }
    }
    let mut out = Vec::with_capacity(cover.len());
    for (i, member) in cover.iter().enumerate() {
        let mut piece = member.clone();
        for earlier in &cover[..i] {
            piece = model
                .difference(&piece, earlier)
                .expect("differences inside a bisection are compact open");
        }
        out.push(piece);
    }
    Ok(out)
}
