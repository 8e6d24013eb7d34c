//! Snake groupoids: group bundles over the Cantor set whose isotropy is
//! trivial except at the all-zeros sequence (the base point), where it is
//! `Z_n` or `Z`. The groupoid is ample with Hausdorff unit space but is not
//! itself Hausdorff once there is at least one head.
//!
//! # Bisection encoding
//!
//! A compact open bisection is a pair `(C, h)` with `C` clopen in the Cantor
//! set and `h` a head-group element. It denotes `C` when `h = 0` and
//! `(C \ {base}) ∪ {γ_h}` otherwise; `h ≠ 0` requires `base ∈ C`. The
//! encoding is complete: every arrow is a loop, so a bisection holds at most
//! one arrow over the base point, and a compact open set holding `γ_h` must
//! contain a punctured cylinder around the base point together with `γ_h`,
//! which is `(C, h)` for a clopen `C`.
//!
//! # Test points
//!
//! For a family of maximal cylinder depth `d` (at least 1) the classes are
//! the depth-`d` cylinders `[w]` with `w ≠ 0^d`, the punctured cylinder
//! `[0^d] \ {base}` (represented by `0^d 1 000…`), the base point, and each
//! head that occurs in the family. Every indicator in the family is
//! constant on each class.

use std::collections::BTreeSet;
use std::fmt;

use super::clopen::{is_binary_word, ClopenSet};
use super::{AmpleGroupoid, Fiber};
use crate::error::{Error, Result};

/// Isotropy group at the base point.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum HeadGroup {
    /// `Z_n`, `n >= 2`.
    Cyclic(u32),
    Integers,
}

impl HeadGroup {
    pub fn normalize(&self, k: i64) -> i64 {
        match *self {
            HeadGroup::Cyclic(n) => k.rem_euclid(i64::from(n)),
            HeadGroup::Integers => k,
        }
    }

    pub fn add(&self, j: i64, k: i64) -> i64 {
        self.normalize(j + k)
    }

    pub fn neg(&self, k: i64) -> i64 {
        self.normalize(-k)
    }

    /// Non-identity elements, if finitely many.
    pub fn nonzero_elements(&self) -> Option<Vec<i64>> {
        match *self {
            HeadGroup::Cyclic(n) => Some((1..i64::from(n)).collect()),
            HeadGroup::Integers => None,
        }
    }
}

impl fmt::Display for HeadGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeadGroup::Cyclic(n) => write!(f, "Z_{n}"),
            HeadGroup::Integers => write!(f, "Z"),
        }
    }
}

/// The pair `(C, h)`; `head == 0` is the unit choice.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SnakeBisection {
    cylinders: ClopenSet,
    head: i64,
}

impl SnakeBisection {
    pub fn cylinders(&self) -> &ClopenSet {
        &self.cylinders
    }

    /// The head adjoined in place of the base point, `None` for the unit.
    pub fn head(&self) -> Option<i64> {
        (self.head != 0).then_some(self.head)
    }

    fn over_base(&self) -> Option<i64> {
        self.cylinders.contains_zero_sequence().then_some(self.head)
    }
}

/// A point of a snake groupoid.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SnakePoint {
    /// The unit `w·000…`; `w` is non-empty and ends in `1`.
    Unit(String),
    /// The all-zeros sequence.
    Base,
    /// `γ_k`, `k ≠ 0`, an arrow from the base point to itself.
    Head(i64),
}

impl SnakePoint {
    /// The unit `word·000…`, normalized.
    pub fn unit(word: &str) -> Self {
        assert!(is_binary_word(word), "not a binary word: {word:?}");
        let trimmed = word.trim_end_matches('0');
        if trimmed.is_empty() {
            SnakePoint::Base
        } else {
            SnakePoint::Unit(trimmed.to_string())
        }
    }

    /// Head-group element of a point over the base point.
    fn over_base(&self) -> Option<i64> {
        match self {
            SnakePoint::Base => Some(0),
            SnakePoint::Head(k) => Some(*k),
            SnakePoint::Unit(_) => None,
        }
    }
}

impl fmt::Display for SnakePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnakePoint::Unit(w) => write!(f, "unit:{w}"),
            SnakePoint::Base => write!(f, "base"),
            SnakePoint::Head(k) => write!(f, "head:{k}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SnakeGroupoid {
    heads: HeadGroup,
}

impl SnakeGroupoid {
    /// `Z_n` heads. Panics unless `n >= 2`.
    pub fn cyclic(n: u32) -> Self {
        assert!(n >= 2, "a snake needs at least two heads");
        SnakeGroupoid { heads: HeadGroup::Cyclic(n) }
    }

    pub fn integers() -> Self {
        SnakeGroupoid { heads: HeadGroup::Integers }
    }

    pub fn heads(&self) -> HeadGroup {
        self.heads
    }

    fn canonical(&self, cylinders: ClopenSet, head: i64) -> SnakeBisection {
        let head = if cylinders.contains_zero_sequence() {
            self.heads.normalize(head)
        } else {
            0
        };
        SnakeBisection { cylinders, head }
    }

    /// `(C, h)`; `head = None` is the unit choice.
    pub fn bisection(&self, cylinders: ClopenSet, head: Option<i64>) -> Result<SnakeBisection> {
        let head = self.heads.normalize(head.unwrap_or(0));
        if head != 0 && !cylinders.contains_zero_sequence() {
            return Err(Error::InvalidBisection(format!(
                "head {head} requires the base point in {cylinders}"
            )));
        }
        Ok(self.canonical(cylinders, head))
    }

    /// `(C, unit)`, a compact open subset of the unit space.
    pub fn unit_region(&self, cylinders: ClopenSet) -> SnakeBisection {
        self.canonical(cylinders, 0)
    }

    /// `(C, h)` for the given words and head; convenience for tests.
    pub fn cylinders<W: AsRef<str>>(&self, words: &[W], head: Option<i64>) -> Result<SnakeBisection> {
        self.bisection(ClopenSet::from_cylinders(words), head)
    }

    fn punctured(depth: usize) -> SnakePoint {
        SnakePoint::Unit(format!("{}1", "0".repeat(depth)))
    }
}

impl AmpleGroupoid for SnakeGroupoid {
    type Bisection = SnakeBisection;
    type Point = SnakePoint;

    fn empty_bisection(&self) -> SnakeBisection {
        self.canonical(ClopenSet::empty(), 0)
    }

    fn unit_space(&self) -> SnakeBisection {
        self.canonical(ClopenSet::full(), 0)
    }

    fn is_empty(&self, b: &SnakeBisection) -> bool {
        b.cylinders.is_empty()
    }

    fn product(&self, b: &SnakeBisection, d: &SnakeBisection) -> SnakeBisection {
        self.canonical(b.cylinders.intersection(&d.cylinders), self.heads.add(b.head, d.head))
    }

    fn inverse(&self, b: &SnakeBisection) -> SnakeBisection {
        self.canonical(b.cylinders.clone(), self.heads.neg(b.head))
    }

    fn source(&self, b: &SnakeBisection) -> SnakeBisection {
        self.canonical(b.cylinders.clone(), 0)
    }

    fn range(&self, b: &SnakeBisection) -> SnakeBisection {
        self.canonical(b.cylinders.clone(), 0)
    }

    fn contains(&self, b: &SnakeBisection, p: &SnakePoint) -> bool {
        match p {
            SnakePoint::Unit(w) => b.cylinders.contains_word(w),
            SnakePoint::Base | SnakePoint::Head(_) => b.over_base() == p.over_base(),
        }
    }

    fn is_subset(&self, b: &SnakeBisection, d: &SnakeBisection) -> bool {
        b.cylinders.is_subset(&d.cylinders) && b.over_base().is_none_or(|h| d.over_base() == Some(h))
    }

    fn intersection(&self, b: &SnakeBisection, d: &SnakeBisection) -> Option<SnakeBisection> {
        let common = b.cylinders.intersection(&d.cylinders);
        if common.contains_zero_sequence() && b.head != d.head {
            // (C ∩ C') minus the base point is not compact
            return None;
        }
        Some(self.canonical(common, b.head))
    }

    fn difference(&self, b: &SnakeBisection, d: &SnakeBisection) -> Option<SnakeBisection> {
        if b.over_base().is_some() && d.over_base().is_some() && b.head != d.head {
            return None;
        }
        Some(self.canonical(b.cylinders.difference(&d.cylinders), b.head))
    }

    fn union(&self, b: &SnakeBisection, d: &SnakeBisection) -> Option<SnakeBisection> {
        let head = match (b.over_base(), d.over_base()) {
            (Some(h), Some(k)) if h != k => return None,
            (Some(h), _) | (None, Some(h)) => h,
            (None, None) => 0,
        };
        Some(self.canonical(b.cylinders.union(&d.cylinders), head))
    }

    fn owns_point(&self, p: &SnakePoint) -> bool {
        match p {
            SnakePoint::Unit(w) => !w.is_empty() && is_binary_word(w) && w.ends_with('1'),
            SnakePoint::Base => true,
            SnakePoint::Head(k) => *k != 0 && self.heads.normalize(*k) == *k,
        }
    }

    fn is_unit(&self, p: &SnakePoint) -> bool {
        !matches!(p, SnakePoint::Head(_))
    }

    fn point_source(&self, p: &SnakePoint) -> SnakePoint {
        match p {
            SnakePoint::Head(_) => SnakePoint::Base,
            other => other.clone(),
        }
    }

    fn point_range(&self, p: &SnakePoint) -> SnakePoint {
        self.point_source(p)
    }

    fn point_inverse(&self, p: &SnakePoint) -> SnakePoint {
        match p {
            SnakePoint::Head(k) => SnakePoint::Head(self.heads.neg(*k)),
            other => other.clone(),
        }
    }

    fn point_compose(&self, p: &SnakePoint, q: &SnakePoint) -> Option<SnakePoint> {
        match (p.over_base(), q.over_base()) {
            (Some(j), Some(k)) => match self.heads.add(j, k) {
                0 => Some(SnakePoint::Base),
                m => Some(SnakePoint::Head(m)),
            },
            (None, None) if p == q => Some(p.clone()),
            _ => None,
        }
    }

    fn fiber(&self, x: &SnakePoint) -> Result<Fiber<SnakePoint>> {
        match x {
            SnakePoint::Head(k) => Err(Error::NotAUnit(format!("head:{k}"))),
            SnakePoint::Unit(_) => Ok(Fiber::Finite(vec![x.clone()])),
            SnakePoint::Base => match self.heads.nonzero_elements() {
                Some(ks) => Ok(Fiber::Finite(
                    std::iter::once(SnakePoint::Base).chain(ks.into_iter().map(SnakePoint::Head)).collect(),
                )),
                None => Ok(Fiber::Unbounded(Box::new(
                    std::iter::once(SnakePoint::Base)
                        .chain((1i64..).flat_map(|k| [SnakePoint::Head(k), SnakePoint::Head(-k)])),
                ))),
            },
        }
    }

    fn working_depth(&self, family: &[&SnakeBisection]) -> usize {
        family.iter().map(|b| b.cylinders.depth()).max().map_or(0, |d| d.max(1))
    }

    fn test_points_at(&self, family: &[&SnakeBisection], depth: usize) -> Vec<SnakePoint> {
        if family.is_empty() {
            return vec![SnakePoint::Base];
        }
        let depth = depth.max(1);
        assert!(depth < 31, "cylinder depth {depth} is too deep to enumerate");
        let mut points: Vec<SnakePoint> = (1u32..1 << depth)
            .map(|i| {
                let word: String =
                    (0..depth).rev().map(|bit| if i >> bit & 1 == 1 { '1' } else { '0' }).collect();
                SnakePoint::unit(&word)
            })
            .collect();
        points.push(Self::punctured(depth));
        points.push(SnakePoint::Base);
        let heads: BTreeSet<i64> = family.iter().filter_map(|b| b.head()).collect();
        points.extend(heads.into_iter().map(SnakePoint::Head));
        points
    }

    fn neighborhood(&self, p: &SnakePoint, depth: usize) -> SnakeBisection {
        let depth = depth.max(1);
        match p {
            SnakePoint::Unit(w) if w.len() <= depth => {
                self.canonical(ClopenSet::cylinder(&format!("{w:0<depth$}")), 0)
            }
            SnakePoint::Unit(w) => self.canonical(ClopenSet::cylinder(w), 0),
            SnakePoint::Base => self.canonical(ClopenSet::cylinder(&"0".repeat(depth)), 0),
            SnakePoint::Head(k) => self.canonical(ClopenSet::cylinder(&"0".repeat(depth)), *k),
        }
    }

    fn class_is_open(&self, p: &SnakePoint, _depth: usize) -> bool {
        matches!(p, SnakePoint::Unit(_))
    }

    fn is_open_union(&self, points: &[SnakePoint], depth: usize) -> bool {
        let punctured = Self::punctured(depth.max(1));
        points.iter().all(|p| matches!(p, SnakePoint::Unit(_))) || points.contains(&punctured)
    }

    fn describe_class(&self, p: &SnakePoint, depth: usize) -> String {
        let depth = depth.max(1);
        match p {
            SnakePoint::Unit(w) if w.len() <= depth => format!("cylinder {w:0<depth$}"),
            SnakePoint::Unit(_) => format!("cylinder {} without base", "0".repeat(depth)),
            SnakePoint::Base => "base".into(),
            SnakePoint::Head(k) => format!("head {k}"),
        }
    }

    fn bisection_through(&self, points: &[SnakePoint]) -> Option<SnakeBisection> {
        let over: BTreeSet<i64> = points.iter().filter_map(SnakePoint::over_base).collect();
        match over.len() {
            0 => Some(self.unit_space()),
            1 => Some(self.canonical(ClopenSet::full(), *over.iter().next().unwrap())),
            _ => None,
        }
    }
}
