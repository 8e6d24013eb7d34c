//! Finite discrete groupoids.
//!
//! Every subset on which `s` and `r` are injective is a compact open
//! bisection, and every point is its own class, so pointwise questions are
//! settled by scanning arrows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{AmpleGroupoid, Fiber};
use crate::error::{Error, Result};

/// Index of an arrow in a [`FiniteGroupoid`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Arrow(pub usize);

/// A set of arrows; a bisection when `s` and `r` are injective on it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct ArrowSet(BTreeSet<usize>);

impl ArrowSet {
    pub fn new<I: IntoIterator<Item = usize>>(arrows: I) -> Self {
        ArrowSet(arrows.into_iter().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, arrow: usize) -> bool {
        self.0.contains(&arrow)
    }
}

/// A failed groupoid axiom, naming the offending arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub property: &'static str,
    pub detail: String,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.property, self.detail)
    }
}

impl From<AxiomViolation> for Error {
    fn from(v: AxiomViolation) -> Self {
        Error::Axiom { property: v.property, detail: v.detail }
    }
}

/// Unvalidated structure tables of a finite groupoid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupoidTable {
    pub names: Vec<String>,
    pub is_unit: Vec<bool>,
    pub src: Vec<usize>,
    pub rng: Vec<usize>,
    pub compose: BTreeMap<(usize, usize), usize>,
    pub inverse: BTreeMap<usize, usize>,
    /// Extra names resolving to arrows (e.g. a unit's own name).
    pub aliases: Vec<(String, usize)>,
}

/// Axiom names in the order they are checked and reported.
pub const PROPERTIES: [&str; 8] = [
    "endpoints",
    "composability",
    "composite_endpoints",
    "total_composition",
    "unit_laws",
    "associativity",
    "inverse_defined",
    "inverse_laws",
];

impl GroupoidTable {
    pub fn add_unit(&mut self, name: impl Into<String>) -> usize {
        let id = self.names.len();
        self.names.push(name.into());
        self.is_unit.push(true);
        self.src.push(id);
        self.rng.push(id);
        id
    }

    pub fn add_arrow(&mut self, name: impl Into<String>, src: usize, rng: usize) -> usize {
        let id = self.names.len();
        self.names.push(name.into());
        self.is_unit.push(false);
        self.src.push(src);
        self.rng.push(rng);
        id
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .or_else(|| self.aliases.iter().find(|(a, _)| a == name).map(|(_, id)| *id))
    }

    /// Adds the compositions with units and the unit inverses that every
    /// groupoid has, leaving explicitly given entries untouched.
    pub fn fill_unit_laws(&mut self) {
        for a in 0..self.names.len() {
            let (s, r) = (self.src[a], self.rng[a]);
            if self.is_unit.get(s).copied().unwrap_or(false) {
                self.compose.entry((a, s)).or_insert(a);
            }
            if self.is_unit.get(r).copied().unwrap_or(false) {
                self.compose.entry((r, a)).or_insert(a);
            }
            if self.is_unit[a] {
                self.inverse.entry(a).or_insert(a);
            }
        }
    }

    fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    /// Every failed axiom, at most one report per property, in a fixed order.
    pub fn violations(&self) -> Vec<AxiomViolation> {
        let n = self.names.len();
        let mut out: Vec<AxiomViolation> = Vec::new();
        fn report(out: &mut Vec<AxiomViolation>, property: &'static str, detail: String) {
            if !out.iter().any(|v| v.property == property) {
                out.push(AxiomViolation { property, detail });
            }
        }
        let unit = |a: usize| self.is_unit.get(a).copied().unwrap_or(false);

        for a in 0..n {
            let (s, r) = (self.src[a], self.rng[a]);
            if s >= n || r >= n || !unit(s) || !unit(r) {
                report(&mut out, "endpoints", format!("arrow {} has a non-unit source or range", self.name(a)));
            } else if unit(a) && (s != a || r != a) {
                report(&mut out, "endpoints", format!("unit {} is not its own source and range", self.name(a)));
            }
        }
        if !out.is_empty() {
            return out;
        }

        for (&(a, b), &c) in &self.compose {
            if self.src[a] != self.rng[b] {
                report(
                    &mut out,
                    "composability",
                    format!(
                        "compose({}, {}) = {} is defined but src({}) = {} differs from rng({}) = {}",
                        self.name(a),
                        self.name(b),
                        self.name(c),
                        self.name(a),
                        self.name(self.src[a]),
                        self.name(b),
                        self.name(self.rng[b])
                    ),
                );
            } else if self.src[c] != self.src[b] || self.rng[c] != self.rng[a] {
                report(
                    &mut out,
                    "composite_endpoints",
                    format!("compose({}, {}) = {} has the wrong endpoints", self.name(a), self.name(b), self.name(c)),
                );
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.src[a] == self.rng[b] && !self.compose.contains_key(&(a, b)) {
                    report(
                        &mut out,
                        "total_composition",
                        format!("compose({}, {}) is missing although src = rng", self.name(a), self.name(b)),
                    );
                }
            }
        }
        let comp = |a: usize, b: usize| self.compose.get(&(a, b)).copied();

        for a in 0..n {
            let (s, r) = (self.src[a], self.rng[a]);
            if comp(a, s) != Some(a) || comp(r, a) != Some(a) {
                report(&mut out, "unit_laws", format!("{} is not fixed by its source and range units", self.name(a)));
            }
        }

        'assoc: for a in 0..n {
            for b in 0..n {
                let Some(ab) = comp(a, b) else { continue };
                for c in 0..n {
                    let Some(bc) = comp(b, c) else { continue };
                    let left = comp(ab, c);
                    let right = comp(a, bc);
                    if left.is_none() || left != right {
                        report(
                            &mut out,
                            "associativity",
                            format!(
                                "(({} {}) {}) differs from ({} ({} {}))",
                                self.name(a),
                                self.name(b),
                                self.name(c),
                                self.name(a),
                                self.name(b),
                                self.name(c)
                            ),
                        );
                        break 'assoc;
                    }
                }
            }
        }

        for a in 0..n {
            match self.inverse.get(&a) {
                None => report(&mut out, "inverse_defined", format!("arrow {} has no inverse", self.name(a))),
                // a missing inverse of `i` is reported on its own
                Some(&i) if i < n && !self.inverse.contains_key(&i) => {}
                Some(&i) => {
                    let ok = i < n
                        && self.inverse.get(&i) == Some(&a)
                        && comp(i, a) == Some(self.src[a])
                        && comp(a, i) == Some(self.rng[a]);
                    if !ok {
                        report(
                            &mut out,
                            "inverse_laws",
                            format!("{} is not a two-sided inverse of {}", self.name(i.min(n - 1)), self.name(a)),
                        );
                    }
                }
            }
        }
        out.sort_by_key(|v| PROPERTIES.iter().position(|p| *p == v.property));
        out
    }

    /// Builds the table of a group from its multiplication table; the
    /// identity becomes the single unit.
    pub fn from_group(elements: Vec<String>, products: BTreeMap<(usize, usize), usize>) -> Result<Self> {
        let n = elements.len();
        let identity = (0..n).find(|&e| (0..n).all(|h| products.get(&(e, h)) == Some(&h) && products.get(&(h, e)) == Some(&h)));
        let Some(e) = identity else {
            return Err(AxiomViolation {
                property: "identity",
                detail: "the table has no two-sided identity element".into(),
            }
            .into());
        };
        let mut table = GroupoidTable {
            names: elements,
            is_unit: (0..n).map(|a| a == e).collect(),
            src: vec![e; n],
            rng: vec![e; n],
            compose: products,
            ..GroupoidTable::default()
        };
        for g in 0..n {
            if let Some(h) = (0..n).find(|&h| table.compose.get(&(g, h)) == Some(&e) && table.compose.get(&(h, g)) == Some(&e)) {
                table.inverse.insert(g, h);
            }
        }
        Ok(table)
    }
}

/// A validated finite groupoid.
#[derive(Clone, PartialEq)]
pub struct FiniteGroupoid {
    names: Vec<String>,
    lookup: BTreeMap<String, usize>,
    src: Vec<usize>,
    rng: Vec<usize>,
    inv: Vec<usize>,
    compose: Vec<Option<usize>>,
    units: Vec<usize>,
    is_unit: Vec<bool>,
}

impl fmt::Debug for FiniteGroupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroupoid")
            .field("units", &self.units.len())
            .field("arrows", &self.names.len())
            .finish()
    }
}

impl FiniteGroupoid {
    /// Validates every axiom exhaustively.
    pub fn from_table(table: GroupoidTable) -> Result<Self> {
        if let Some(v) = table.violations().into_iter().next() {
            return Err(v.into());
        }
        let n = table.names.len();
        let mut compose = vec![None; n * n];
        for (&(a, b), &c) in &table.compose {
            compose[a * n + b] = Some(c);
        }
        let mut lookup: BTreeMap<String, usize> = BTreeMap::new();
        for (alias, id) in &table.aliases {
            lookup.insert(alias.clone(), *id);
        }
        for (id, name) in table.names.iter().enumerate() {
            lookup.insert(name.clone(), id);
        }
        Ok(FiniteGroupoid {
            lookup,
            src: table.src,
            rng: table.rng,
            inv: (0..n).map(|a| table.inverse[&a]).collect(),
            compose,
            units: (0..n).filter(|&a| table.is_unit[a]).collect(),
            is_unit: table.is_unit,
            names: table.names,
        })
    }

    /// The pair groupoid `X × X`; the arrow `e_a_b` has range `a` and source
    /// `b`, and each unit name is an alias of `e_a_a`.
    pub fn pair<S: AsRef<str>>(units: &[S]) -> Self {
        Self::from_table(pair_table(units)).expect("pair groupoids satisfy the axioms")
    }

    /// The cyclic group `Z_n` with elements `g0 … g(n-1)`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let names = (0..n).map(|k| format!("g{k}")).collect();
        let products = (0..n).flat_map(|a| (0..n).map(move |b| ((a, b), (a + b) % n))).collect();
        Self::from_table(GroupoidTable::from_group(names, products).expect("cyclic table"))
            .expect("cyclic groups satisfy the axioms")
    }

    /// The transitive groupoid `X × H × X` for `units` points and isotropy
    /// group `group` (a one-unit groupoid).
    pub fn transitive(units: usize, group: &FiniteGroupoid) -> Self {
        assert_eq!(group.units.len(), 1, "isotropy must be a group");
        let m = group.names.len();
        let id = |i: usize, j: usize, g: usize| (i * units + j) * m + g;
        let e = group.units[0];
        let mut table = GroupoidTable::default();
        for i in 0..units {
            for j in 0..units {
                for g in 0..m {
                    table.names.push(format!("e{i}{j}.{}", group.names[g]));
                    table.is_unit.push(i == j && g == e);
                    table.src.push(id(j, j, e));
                    table.rng.push(id(i, i, e));
                }
            }
        }
        for i in 0..units {
            for j in 0..units {
                for g in 0..m {
                    let a = id(i, j, g);
                    table.inverse.insert(a, id(j, i, group.inv[g]));
                    for k in 0..units {
                        for h in 0..m {
                            let gh = group.compose[g * m + h].expect("group is total");
                            table.compose.insert((a, id(j, k, h)), id(i, k, gh));
                        }
                    }
                }
            }
        }
        Self::from_table(table).expect("transitive groupoids satisfy the axioms")
    }

    /// Disjoint union; arrow names get a `c<k>:` component prefix.
    pub fn disjoint_union(parts: &[FiniteGroupoid]) -> Self {
        let mut table = GroupoidTable::default();
        let mut offset = 0;
        for (k, part) in parts.iter().enumerate() {
            let n = part.names.len();
            for a in 0..n {
                table.names.push(format!("c{k}:{}", part.names[a]));
                table.is_unit.push(part.is_unit[a]);
                table.src.push(part.src[a] + offset);
                table.rng.push(part.rng[a] + offset);
                table.inverse.insert(a + offset, part.inv[a] + offset);
                for b in 0..n {
                    if let Some(c) = part.compose[a * n + b] {
                        table.compose.insert((a + offset, b + offset), c + offset);
                    }
                }
            }
            offset += n;
        }
        Self::from_table(table).expect("disjoint unions satisfy the axioms")
    }

    /// The structure tables, for re-running the axiom checks.
    pub fn table(&self) -> GroupoidTable {
        let n = self.names.len();
        let mut compose = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(c) = self.compose[a * n + b] {
                    compose.insert((a, b), c);
                }
            }
        }
        GroupoidTable {
            names: self.names.clone(),
            is_unit: self.is_unit.clone(),
            src: self.src.clone(),
            rng: self.rng.clone(),
            compose,
            inverse: (0..n).map(|a| (a, self.inv[a])).collect(),
            aliases: Vec::new(),
        }
    }

    pub fn arrow_count(&self) -> usize {
        self.names.len()
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arrow> {
        (0..self.names.len()).map(Arrow)
    }

    pub fn units(&self) -> impl Iterator<Item = Arrow> + '_ {
        self.units.iter().map(|&u| Arrow(u))
    }

    pub fn arrow(&self, name: &str) -> Option<Arrow> {
        self.lookup.get(name).map(|&a| Arrow(a))
    }

    pub fn name(&self, a: Arrow) -> &str {
        &self.names[a.0]
    }

    pub fn src(&self, a: Arrow) -> Arrow {
        Arrow(self.src[a.0])
    }

    pub fn rng(&self, a: Arrow) -> Arrow {
        Arrow(self.rng[a.0])
    }

    pub fn inv(&self, a: Arrow) -> Arrow {
        Arrow(self.inv[a.0])
    }

    pub fn compose(&self, a: Arrow, b: Arrow) -> Option<Arrow> {
        self.compose[a.0 * self.names.len() + b.0].map(Arrow)
    }

    fn injective_endpoints(&self, arrows: impl Iterator<Item = usize>) -> bool {
        let mut sources = BTreeSet::new();
        let mut ranges = BTreeSet::new();
        arrows.into_iter().all(|a| sources.insert(self.src[a]) & ranges.insert(self.rng[a]))
    }

    /// Validates that `s` and `r` are injective on the arrow set.
    pub fn bisection<I: IntoIterator<Item = Arrow>>(&self, arrows: I) -> Result<ArrowSet> {
        let set = ArrowSet::new(arrows.into_iter().map(|a| a.0));
        if set.iter().any(|a| a >= self.names.len()) {
            return Err(Error::InvalidBisection("arrow out of range".into()));
        }
        if !self.injective_endpoints(set.iter()) {
            let names: Vec<&str> = set.iter().map(|a| self.names[a].as_str()).collect();
            return Err(Error::InvalidBisection(format!(
                "source or range is not injective on {{{}}}",
                names.join(",")
            )));
        }
        Ok(set)
    }
}

pub(crate) fn pair_table<S: AsRef<str>>(units: &[S]) -> GroupoidTable {
    let k = units.len();
    let mut table = GroupoidTable::default();
    let id = |a: usize, b: usize| a * k + b;
    for a in 0..k {
        for b in 0..k {
            let name = format!("e_{}_{}", units[a].as_ref(), units[b].as_ref());
            table.names.push(name);
            table.is_unit.push(a == b);
            table.src.push(id(b, b));
            table.rng.push(id(a, a));
            table.inverse.insert(id(a, b), id(b, a));
            for c in 0..k {
                table.compose.insert((id(a, b), id(b, c)), id(a, c));
            }
        }
    }
    for (a, u) in units.iter().enumerate() {
        table.aliases.push((u.as_ref().to_string(), id(a, a)));
    }
    table
}

impl AmpleGroupoid for FiniteGroupoid {
    type Bisection = ArrowSet;
    type Point = Arrow;

    fn empty_bisection(&self) -> ArrowSet {
        ArrowSet::default()
    }

    fn unit_space(&self) -> ArrowSet {
        ArrowSet::new(self.units.iter().copied())
    }

    fn is_empty(&self, b: &ArrowSet) -> bool {
        b.is_empty()
    }

    fn product(&self, b: &ArrowSet, d: &ArrowSet) -> ArrowSet {
        let n = self.names.len();
        let mut out = BTreeSet::new();
        for x in b.iter() {
            for y in d.iter() {
                if let Some(c) = self.compose[x * n + y] {
                    out.insert(c);
                }
            }
        }
        ArrowSet(out)
    }

    fn inverse(&self, b: &ArrowSet) -> ArrowSet {
        ArrowSet::new(b.iter().map(|a| self.inv[a]))
    }

    fn source(&self, b: &ArrowSet) -> ArrowSet {
        ArrowSet::new(b.iter().map(|a| self.src[a]))
    }

    fn range(&self, b: &ArrowSet) -> ArrowSet {
        ArrowSet::new(b.iter().map(|a| self.rng[a]))
    }

    fn contains(&self, b: &ArrowSet, p: &Arrow) -> bool {
        b.contains(p.0)
    }

    fn is_subset(&self, b: &ArrowSet, d: &ArrowSet) -> bool {
        b.0.is_subset(&d.0)
    }

    fn intersection(&self, b: &ArrowSet, d: &ArrowSet) -> Option<ArrowSet> {
        Some(ArrowSet(b.0.intersection(&d.0).copied().collect()))
    }

    fn difference(&self, b: &ArrowSet, d: &ArrowSet) -> Option<ArrowSet> {
        Some(ArrowSet(b.0.difference(&d.0).copied().collect()))
    }

    fn union(&self, b: &ArrowSet, d: &ArrowSet) -> Option<ArrowSet> {
        let u = ArrowSet(b.0.union(&d.0).copied().collect());
        self.injective_endpoints(u.iter()).then_some(u)
    }

    fn owns_point(&self, p: &Arrow) -> bool {
        p.0 < self.names.len()
    }

    fn is_unit(&self, p: &Arrow) -> bool {
        self.is_unit[p.0]
    }

    fn point_source(&self, p: &Arrow) -> Arrow {
        self.src(*p)
    }

    fn point_range(&self, p: &Arrow) -> Arrow {
        self.rng(*p)
    }

    fn point_inverse(&self, p: &Arrow) -> Arrow {
        self.inv(*p)
    }

    fn point_compose(&self, p: &Arrow, q: &Arrow) -> Option<Arrow> {
        self.compose(*p, *q)
    }

    fn fiber(&self, x: &Arrow) -> Result<Fiber<Arrow>> {
        if !self.owns_point(x) || !self.is_unit[x.0] {
            return Err(Error::NotAUnit(format!("{x:?}")));
        }
        Ok(Fiber::Finite((0..self.names.len()).filter(|&a| self.src[a] == x.0).map(Arrow).collect()))
    }

    fn working_depth(&self, _family: &[&ArrowSet]) -> usize {
        0
    }

    fn test_points_at(&self, family: &[&ArrowSet], _depth: usize) -> Vec<Arrow> {
        let all: BTreeSet<usize> = family.iter().flat_map(|b| b.iter()).collect();
        all.into_iter().map(Arrow).collect()
    }

    fn neighborhood(&self, p: &Arrow, _depth: usize) -> ArrowSet {
        ArrowSet::new([p.0])
    }

    fn class_is_open(&self, _p: &Arrow, _depth: usize) -> bool {
        true
    }

    fn is_open_union(&self, _points: &[Arrow], _depth: usize) -> bool {
        true
    }

    fn describe_class(&self, p: &Arrow, _depth: usize) -> String {
        self.names[p.0].clone()
    }

    fn bisection_through(&self, points: &[Arrow]) -> Option<ArrowSet> {
        let set = ArrowSet::new(points.iter().map(|a| a.0));
        self.injective_endpoints(set.iter()).then_some(set)
    }
}
