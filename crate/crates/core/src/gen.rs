//! Seeded random models, bisections and elements for the property suites.
//!
//! Coefficients are drawn from `{-2,-1,1,2} + {-1,0,1}i`, elements have at
//! most six terms, finite bisections at most four arrows and snake cylinders
//! depth at most four.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::element::AlgebraElement;
use crate::groupoid::{
    points_for_covering, AmpleGroupoid, Arrow, ArrowSet, ClopenSet, FiniteGroupoid, GroupoidTable, HeadGroup, SnakeBisection,
    SnakeGroupoid, SnakePoint,
};
use crate::ExactComplex;
use crate::Scalar;
use num_traits::Zero;

pub const MAX_TERMS: usize = 6;
pub const MAX_BISECTION: usize = 4;
pub const MAX_DEPTH: usize = 4;

/// Models that can produce random bisections and units.
pub trait Sample: AmpleGroupoid {
    fn random_bisection(&self, rng: &mut ChaCha8Rng) -> Self::Bisection;
    /// A compact open subset of the unit space.
    fn random_unit_region(&self, rng: &mut ChaCha8Rng) -> Self::Bisection;
    fn random_unit(&self, rng: &mut ChaCha8Rng) -> Self::Point;
}

impl Sample for FiniteGroupoid {
    fn random_bisection(&self, rng: &mut ChaCha8Rng) -> ArrowSet {
        let mut arrows: Vec<Arrow> = self.arrows().collect();
        arrows.shuffle(rng);
        let want = rng.gen_range(0..=MAX_BISECTION);
        let mut chosen: Vec<Arrow> = Vec::new();
        for a in arrows {
            if chosen.len() == want {
                break;
            }
            if chosen.iter().all(|&b| self.src(a) != self.src(b) && self.rng(a) != self.rng(b)) {
                chosen.push(a);
            }
        }
        self.bisection(chosen).expect("injective source and range")
    }

    fn random_unit_region(&self, rng: &mut ChaCha8Rng) -> ArrowSet {
        let units: Vec<Arrow> = self.units().filter(|_| rng.gen_bool(0.6)).collect();
        self.bisection(units).expect("units form a bisection")
    }

    fn random_unit(&self, rng: &mut ChaCha8Rng) -> Arrow {
        let units: Vec<Arrow> = self.units().collect();
        *units.choose(rng).expect("a groupoid has units")
    }
}

fn random_word(rng: &mut ChaCha8Rng, max: usize) -> String {
    let len = rng.gen_range(0..=max);
    (0..len).map(|_| if rng.gen_bool(0.5) { '0' } else { '1' }).collect()
}

/// A union of up to three cylinders of depth at most four; the whole space
/// shows up occasionally.
pub fn random_clopen(rng: &mut ChaCha8Rng) -> ClopenSet {
    let k = rng.gen_range(0..=3);
    let words: Vec<String> = (0..k)
        .map(|_| {
            let len = if rng.gen_ratio(1, 12) { 0 } else { rng.gen_range(1..=MAX_DEPTH) };
            (0..len).map(|_| if rng.gen_bool(0.5) { '0' } else { '1' }).collect()
        })
        .collect();
    ClopenSet::from_cylinders(words)
}

fn random_head(heads: HeadGroup, rng: &mut ChaCha8Rng) -> i64 {
    match heads {
        HeadGroup::Cyclic(n) => rng.gen_range(1..i64::from(n)),
        HeadGroup::Integers => *[-3, -2, -1, 1, 2, 3].choose(rng).expect("non-empty"),
    }
}

impl Sample for SnakeGroupoid {
    fn random_bisection(&self, rng: &mut ChaCha8Rng) -> SnakeBisection {
        let mut c = random_clopen(rng);
        // bias towards the base point, where the interesting arrows live
        if rng.gen_bool(0.5) {
            c = c.union(&ClopenSet::cylinder(&"0".repeat(rng.gen_range(0..=MAX_DEPTH))));
        }
        let head = (c.contains_zero_sequence() && rng.gen_bool(0.6)).then(|| random_head(self.heads(), rng));
        self.bisection(c, head).expect("head only over the base point")
    }

    fn random_unit_region(&self, rng: &mut ChaCha8Rng) -> SnakeBisection {
        self.unit_region(random_clopen(rng))
    }

    fn random_unit(&self, rng: &mut ChaCha8Rng) -> SnakePoint {
        if rng.gen_bool(0.3) {
            SnakePoint::Base
        } else {
            let mut w = random_word(rng, MAX_DEPTH + 1);
            w.push('1');
            SnakePoint::unit(&w)
        }
    }
}

pub fn coefficient(rng: &mut ChaCha8Rng) -> ExactComplex {
    let re = *[-2, -1, 1, 2].choose(rng).expect("non-empty");
    let im = rng.gen_range(-1..=1);
    ExactComplex::from_i64(re, im)
}

/// The symmetric group on three letters, as a one-unit groupoid.
pub fn symmetric_group() -> FiniteGroupoid {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("a permutation");
    let mut products = std::collections::BTreeMap::new();
    for (a, p) in perms.iter().enumerate() {
        for (b, q) in perms.iter().enumerate() {
            products.insert((a, b), index([p[q[0]], p[q[1]], p[q[2]]]));
        }
    }
    let names = (0..6).map(|k| format!("s{k}")).collect();
    FiniteGroupoid::from_table(GroupoidTable::from_group(names, products).expect("group table"))
        .expect("S3 satisfies the axioms")
}

/// A finite groupoid with at most twelve arrows.
pub fn finite_groupoid(rng: &mut ChaCha8Rng) -> FiniteGroupoid {
    let pair = |n: usize| FiniteGroupoid::pair(&(0..n).map(|k| format!("x{k}")).collect::<Vec<_>>());
    match rng.gen_range(0..7) {
        0 => pair(rng.gen_range(1..=3)),
        1 => FiniteGroupoid::cyclic(rng.gen_range(2..=6)),
        2 => symmetric_group(),
        3 => FiniteGroupoid::transitive(2, &FiniteGroupoid::cyclic(rng.gen_range(2..=3))),
        4 => FiniteGroupoid::disjoint_union(&[pair(2), FiniteGroupoid::cyclic(rng.gen_range(2..=4))]),
        5 => FiniteGroupoid::disjoint_union(&[FiniteGroupoid::cyclic(2), pair(1), pair(3)]),
        _ => FiniteGroupoid::disjoint_union(&[pair(2), pair(2)]),
    }
}

/// A snake with `Z_n` heads, `2 <= n <= 5`.
pub fn cyclic_snake(rng: &mut ChaCha8Rng) -> SnakeGroupoid {
    SnakeGroupoid::cyclic(rng.gen_range(2..=5))
}

/// Up to six random terms.
pub fn element<G: Sample>(rng: &mut ChaCha8Rng, model: &Arc<G>) -> AlgebraElement<G, ExactComplex> {
    let n = rng.gen_range(0..=MAX_TERMS);
    let terms = (0..n).map(|_| (coefficient(rng), model.random_bisection(rng))).collect();
    AlgebraElement::from_terms(model, terms)
}

/// Terms over random sub-bisections of `b`, so the support lies in `b`.
pub fn element_in<G: Sample>(
    rng: &mut ChaCha8Rng,
    model: &Arc<G>,
    b: &G::Bisection,
) -> AlgebraElement<G, ExactComplex> {
    let n = rng.gen_range(1..=MAX_TERMS);
    let terms = (0..n)
        .map(|_| (coefficient(rng), model.product(b, &model.random_unit_region(rng))))
        .collect();
    AlgebraElement::from_terms(model, terms)
}

/// An element supported in the unit space.
pub fn unit_element<G: Sample>(rng: &mut ChaCha8Rng, model: &Arc<G>) -> AlgebraElement<G, ExactComplex> {
    element_in(rng, model, &model.unit_space())
}

/// Adds up to two cancelling pairs `a·1_D - a·1_D` with `D` arbitrary, so the
/// term list may leave every region that contains the support.
pub fn with_decoys<G: Sample>(
    rng: &mut ChaCha8Rng,
    f: &AlgebraElement<G, ExactComplex>,
) -> AlgebraElement<G, ExactComplex> {
    let model = f.model();
    let mut terms: Vec<(ExactComplex, G::Bisection)> =
        f.terms().iter().map(|t| (t.coefficient.clone(), t.bisection.clone())).collect();
    for _ in 0..rng.gen_range(0..=2) {
        let (a, d) = (coefficient(rng), model.random_bisection(rng));
        let at = rng.gen_range(0..=terms.len());
        terms.insert(at, (a.clone(), d.clone()));
        let at = rng.gen_range(0..=terms.len());
        terms.insert(at, (-a, d));
    }
    AlgebraElement::from_terms(model, terms)
}

/// Random bisections plus a neighbourhood of every support class not yet
/// covered; the union contains the support of `f`.
pub fn cover_of<G: Sample>(rng: &mut ChaCha8Rng, f: &AlgebraElement<G, ExactComplex>) -> Vec<G::Bisection> {
    let model = f.model();
    let mut cover: Vec<G::Bisection> = (0..rng.gen_range(0..=2)).map(|_| model.random_bisection(rng)).collect();
    let mut family = f.family();
    family.extend(cover.iter());
    let depth = model.working_depth(&family);
    let points = model
        .test_points_at(&family, depth)
        .into_iter()
        .filter(|p| !f.value_at(p).is_zero())
        .collect();
    for p in points_for_covering(&**model, points, depth) {
        if !cover.iter().any(|b| model.contains(b, &p)) {
            cover.push(model.neighborhood(&p, depth));
        }
    }
    cover.shuffle(rng);
    cover
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generation_is_reproducible() {
        let g = Arc::new(FiniteGroupoid::transitive(2, &FiniteGroupoid::cyclic(3)));
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = element(&mut rng, &g);
            e.terms().iter().map(|t| (t.coefficient.clone(), t.bisection.clone())).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
    }

    #[test]
    fn generated_objects_are_within_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let g = finite_groupoid(&mut rng);
            assert!(g.arrow_count() <= 12);
            assert!(g.table().violations().is_empty());
            let b = g.random_bisection(&mut rng);
            assert!(b.len() <= MAX_BISECTION);
            assert!(random_clopen(&mut rng).depth() <= MAX_DEPTH);
            let g = Arc::new(g);
            let f = element(&mut rng, &g);
            assert!(f.terms().len() <= MAX_TERMS);
            for t in f.terms() {
                let re = t.coefficient.re.to_integer();
                assert!(re != 0.into() && re >= (-2).into() && re <= 2.into());
            }
        }
    }

    #[test]
    fn covers_contain_supports() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let s = Arc::new(cyclic_snake(&mut rng));
            let f = element(&mut rng, &s);
            let f = with_decoys(&mut rng, &f);
            let cover = cover_of(&mut rng, &f);
            let region = crate::groupoid::Region::Union(cover);
            assert!(f.is_supported_in(&region));
        }
    }

    #[test]
    fn symmetric_group_is_not_abelian() {
        let g = symmetric_group();
        let (a, b) = (g.arrow("s1").unwrap(), g.arrow("s2").unwrap());
        assert_ne!(g.compose(a, b), g.compose(b, a));
        assert!(g.table().violations().is_empty());
    }
}
