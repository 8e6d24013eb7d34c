//! Constructive rewriting of term lists.
//!
//! Every routine here works at one fixed resolution, the working depth of
//! the input family, and builds new bisections from canonical class
//! neighbourhoods at that depth. All comparisons are exact.

use std::sync::Arc;

use num_traits::Zero;

use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::groupoid::{disjointify, is_covered_by, points_for_covering, AmpleGroupoid, Region};
use crate::scalar::{Magnitude, Scalar};

/// Rewrites `f` so that every term bisection lies inside `region`.
///
/// Terms that escape are handled one at a time. For each escaping point γ
/// the family of terms through γ has coefficients summing to `f(γ) = 0`; a
/// neighbourhood of γ inside all of them is cut out of each, which changes
/// no value.
pub fn rewrite_within<G: AmpleGroupoid, S: Scalar>(
    f: &AlgebraElement<G, S>,
    region: &Region<G::Bisection>,
) -> Result<AlgebraElement<G, S>> {
    if !f.is_supported_in(region) {
        return Err(Error::SupportEscapes("the support is not inside the target region".into()));
    }
    let model = f.model();
    let members = region.members(&**model);
    let mut terms: Vec<(S, G::Bisection)> =
        f.terms().iter().map(|t| (t.coefficient.clone(), t.bisection.clone())).collect();
    let depth = {
        let mut family: Vec<&G::Bisection> = terms.iter().map(|t| &t.1).collect();
        family.extend(members.iter());
        model.working_depth(&family)
    };

    while let Some(first) = terms.iter().position(|t| !is_covered_by(&**model, &t.1, &members)) {
        let escaping = terms[first].1.clone();
        let points = {
            let mut family: Vec<&G::Bisection> = terms.iter().map(|t| &t.1).collect();
            family.extend(members.iter());
            model.test_points_at(&family, depth)
        };
        let points: Vec<G::Point> = points_for_covering(&**model, points, depth)
            .into_iter()
            .filter(|p| model.contains(&escaping, p) && !region.contains(&**model, p))
            .collect();

        let mut neighbourhoods: Vec<G::Bisection> = Vec::new();
        let mut families: Vec<Vec<usize>> = Vec::new();
        for p in &points {
            if neighbourhoods.iter().any(|n| model.contains(n, p)) {
                continue;
            }
            let through: Vec<usize> = (0..terms.len()).filter(|&i| model.contains(&terms[i].1, p)).collect();
            let total = through.iter().fold(S::zero(), |acc, &i| acc + terms[i].0.clone());
            if !total.is_zero() {
                return Err(Error::Invariant(format!("terms through {p:?} do not cancel")));
            }
            let n = model.neighborhood(p, depth);
            if through.iter().any(|&i| !model.is_subset(&n, &terms[i].1)) {
                return Err(Error::Invariant(format!("no neighbourhood of {p:?} inside the cancelling family")));
            }
            neighbourhoods.push(n);
            families.push(through);
        }

        let pieces = disjointify(&**model, &neighbourhoods, &escaping)?;
        for (piece, through) in pieces.iter().zip(&families) {
            for &i in through {
                terms[i].1 = model
                    .difference(&terms[i].1, piece)
                    .ok_or_else(|| Error::Invariant("a cut is not a compact open bisection".into()))?;
            }
        }
        if !is_covered_by(&**model, &terms[first].1, &members) {
            return Err(Error::Invariant("an escaping term was not confined".into()));
        }
    }

    terms.retain(|t| !model.is_empty(&t.1));
    Ok(AlgebraElement::from_terms(model, terms))
}

/// `f|_B` for `B ⊆ D` and `f` supported in `D`.
pub fn restrict<G: AmpleGroupoid, S: Scalar>(
    f: &AlgebraElement<G, S>,
    b: &G::Bisection,
    within: &G::Bisection,
) -> Result<AlgebraElement<G, S>> {
    let model = f.model();
    if !model.is_subset(b, within) {
        return Err(Error::NotContained("the restriction target is not inside the ambient bisection".into()));
    }
    let confined = rewrite_within(f, &Region::bisection(within))?;
    let terms = confined
        .terms()
        .iter()
        .map(|t| {
            model
                .intersection(&t.bisection, b)
                .map(|piece| (t.coefficient.clone(), piece))
                .ok_or_else(|| Error::Invariant("an intersection inside D is not a bisection".into()))
        })
        .filter(|t| t.as_ref().map_or(true, |(_, piece)| !model.is_empty(piece)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgebraElement::from_terms(model, terms))
}

/// `s(K)` for `K` the union of the term bisections of a unit-supported `f`.
///
/// The window depends on the term list and may be larger than the support.
pub fn unit_support_window<G: AmpleGroupoid, S: Scalar>(f: &AlgebraElement<G, S>) -> Result<G::Bisection> {
    if !f.is_supported_in(&Region::UnitSpace) {
        return Err(Error::SupportEscapes("the support is not inside the unit space".into()));
    }
    let model = f.model();
    f.terms().iter().try_fold(model.empty_bisection(), |window, t| {
        model
            .union(&window, &model.source(&t.bisection))
            .ok_or_else(|| Error::Invariant("a union of unit regions is not a bisection".into()))
    })
}

/// `M_f = Σ |a_D|`, for the term list as given.
pub fn trivial_bound<G: AmpleGroupoid, S: Scalar>(f: &AlgebraElement<G, S>) -> f64 {
    f.coefficient_mass()
}

/// One summand of a [`Decomposition`] with the cover member it lives in.
pub struct Part<G: AmpleGroupoid, S> {
    pub element: AlgebraElement<G, S>,
    pub bisection: G::Bisection,
}

impl<G: AmpleGroupoid, S: Clone> Clone for Part<G, S> {
    fn clone(&self) -> Self {
        Part { element: self.element.clone(), bisection: self.bisection.clone() }
    }
}

pub struct Decomposition<G: AmpleGroupoid, S: Scalar> {
    pub parts: Vec<Part<G, S>>,
    pub epsilon: S::Real,
    /// Violating indices before the repair loop started.
    pub initial_violations: usize,
    pub repair_rounds: usize,
}

impl<G: AmpleGroupoid, S: Scalar> Decomposition<G, S> {
    pub fn sum(&self, model: &Arc<G>) -> AlgebraElement<G, S> {
        self.parts
            .iter()
            .try_fold(AlgebraElement::zero(model), |acc, p| acc.add(&p.element))
            .expect("parts share the model")
    }
}

/// Splits `f` as `f_1 + … + f_k` with `supp f_i ⊆ B_i` and
/// `‖f_i‖_∞ ≤ ‖f‖_∞ + ε`.
///
/// Each term is first cut into class neighbourhoods, each handed to a cover
/// member containing it; term `t` tries the members starting from `t mod k`.
/// Indices that break the bound are then repaired one at a time, smallest
/// first: on each class where `|f_i|` is too large, the values of the other
/// summands through that class are moved into `f_i`.
pub fn bounded_summands<G: AmpleGroupoid, S: Scalar>(
    f: &AlgebraElement<G, S>,
    cover: &[G::Bisection],
    epsilon: &S::Real,
) -> Result<Decomposition<G, S>> {
    if *epsilon <= S::Real::zero() {
        return Err(Error::InvalidEpsilon);
    }
    let model = f.model();
    let region = Region::Union(cover.to_vec());
    let confined = rewrite_within(f, &region)?;
    let bound = f.sup_norm();
    let k = cover.len();

    let depth = {
        let mut family = confined.family();
        family.extend(cover.iter());
        model.working_depth(&family)
    };
    let points_of = |parts: &[AlgebraElement<G, S>]| {
        let mut family: Vec<&G::Bisection> = parts.iter().flat_map(|p| p.family()).collect();
        family.extend(cover.iter());
        points_for_covering(&**model, model.test_points_at(&family, depth), depth)
    };

    let mut assigned: Vec<Vec<(S, G::Bisection)>> = vec![Vec::new(); k];
    let points = points_of(std::slice::from_ref(&confined));
    for (t, term) in confined.terms().iter().enumerate() {
        let mut pieces: Vec<G::Bisection> = Vec::new();
        let mut owners: Vec<usize> = Vec::new();
        for p in points.iter().filter(|p| model.contains(&term.bisection, p)) {
            if pieces.iter().any(|n| model.contains(n, p)) {
                continue;
            }
            let owner = (0..k)
                .map(|j| (t + j) % k)
                .find(|&i| model.contains(&cover[i], p))
                .ok_or_else(|| Error::Invariant(format!("{p:?} is in no cover member")))?;
            pieces.push(model.neighborhood(p, depth));
            owners.push(owner);
        }
        for (piece, owner) in disjointify(&**model, &pieces, &term.bisection)?.into_iter().zip(owners) {
            if !model.is_empty(&piece) {
                assigned[owner].push((term.coefficient.clone(), piece));
            }
        }
    }
    let mut parts: Vec<AlgebraElement<G, S>> =
        assigned.into_iter().map(|terms| AlgebraElement::from_terms(model, terms).compacted()).collect();

    let violators = |parts: &[AlgebraElement<G, S>]| -> Vec<usize> {
        (0..k).filter(|&i| !parts[i].sup_norm().le_plus(&bound, epsilon)).collect()
    };
    let mut bad = violators(&parts);
    let initial_violations = bad.len();
    let mut repair_rounds = 0;

    while let Some(&i) = bad.first() {
        let points = points_of(&parts);
        let mut patches: Vec<G::Bisection> = Vec::new();
        let mut moves: Vec<Vec<(usize, S)>> = Vec::new();
        for p in &points {
            if !model.contains(&cover[i], p)
                || Magnitude::of(&parts[i].value_at(p)).lt_plus(&bound, epsilon)
                || patches.iter().any(|c| model.contains(c, p))
            {
                continue;
            }
            let others: Vec<usize> = (0..k).filter(|&j| j != i && model.contains(&cover[j], p)).collect();
            let patch = model.neighborhood(p, depth);
            let mut moved = Vec::new();
            for &j in &others {
                let value = parts[j].value_at(p);
                let constant = points.iter().filter(|q| model.contains(&patch, q)).all(|q| parts[j].value_at(q) == value);
                if !constant {
                    return Err(Error::Invariant(format!("summand {j} is not constant near {p:?}")));
                }
                if !value.is_zero() {
                    moved.push((j, value));
                }
            }
            patches.push(patch);
            moves.push(moved);
        }

        for (patch, moved) in disjointify(&**model, &patches, &cover[i])?.into_iter().zip(moves) {
            for (j, value) in moved {
                let piece = AlgebraElement::from_terms(model, vec![(value, patch.clone())]);
                parts[i] = parts[i].add(&piece)?;
                parts[j] = parts[j].sub(&piece)?;
            }
        }
        for part in &mut parts {
            *part = part.compacted();
        }

        let next = violators(&parts);
        if next.len() >= bad.len() {
            return Err(Error::Invariant(format!(
                "repair did not reduce the violating summands ({} -> {})",
                bad.len(),
                next.len()
            )));
        }
        bad = next;
        repair_rounds += 1;
    }

    let parts = parts
        .into_iter()
        .zip(cover.iter().cloned())
        .map(|(element, bisection)| Part { element, bisection })
        .collect();
    Ok(Decomposition { parts, epsilon: epsilon.clone(), initial_violations, repair_rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{ClopenSet, FiniteGroupoid, SnakeGroupoid, SnakePoint};
    use num_complex::Complex;
    use num_rational::BigRational;

    type C = Complex<BigRational>;

    fn c(re: i64) -> C {
        C::from_i64(re, 0)
    }

    fn snake() -> (Arc<SnakeGroupoid>, AlgebraElement<SnakeGroupoid, C>) {
        let g = Arc::new(SnakeGroupoid::cyclic(2));
        let b = g.bisection(ClopenSet::full(), Some(1)).unwrap();
        let f = AlgebraElement::from_terms(&g, vec![(c(1), g.unit_space()), (c(-1), b)]);
        (g, f)
    }

    #[test]
    fn snake_rewrite_into_two_halves() {
        let (g, f) = snake();
        let u = g.unit_region(ClopenSet::cylinder("0"));
        let u1 = g.bisection(ClopenSet::cylinder("0"), Some(1)).unwrap();
        let region = Region::Union(vec![u.clone(), u1.clone()]);
        let out = rewrite_within(&f, &region).unwrap();
        let expected = AlgebraElement::from_terms(&g, vec![(c(1), u), (c(-1), u1)]);
        assert!(out.equals(&f).unwrap());
        assert!(out.equals(&expected).unwrap());
        let members = region.members(&*g);
        assert!(out.terms().iter().all(|t| is_covered_by(&*g, &t.bisection, &members)));
        assert_eq!(trivial_bound(&out), 2.0);
    }

    #[test]
    fn rewrite_rejects_escaping_support() {
        let (_, f) = snake();
        assert!(matches!(rewrite_within(&f, &Region::UnitSpace), Err(Error::SupportEscapes(_))));
    }

    #[test]
    fn rewrite_of_confined_and_zero_elements() {
        let (g, f) = snake();
        let out = rewrite_within(&f, &Region::Union(vec![g.unit_space(), g.bisection(ClopenSet::full(), Some(1)).unwrap()]))
            .unwrap();
        assert_eq!(out.terms().len(), 2);
        let zero: AlgebraElement<SnakeGroupoid, C> = AlgebraElement::zero(&g);
        assert!(rewrite_within(&zero, &Region::Union(vec![])).unwrap().terms().is_empty());
        let cancel = f.sub(&f).unwrap();
        assert!(rewrite_within(&cancel, &Region::Union(vec![])).unwrap().terms().is_empty());
    }

    #[test]
    fn restriction_on_a_finite_groupoid() {
        let g = Arc::new(FiniteGroupoid::pair(&["a", "b", "c"]));
        let [a, b, cc] = ["a", "b", "c"].map(|n| g.arrow(n).unwrap());
        let ab = g.bisection([a, b]).unwrap();
        let bc = g.bisection([b, cc]).unwrap();
        let abc = g.bisection([a, b, cc]).unwrap();
        let only_b = g.bisection([b]).unwrap();
        let f = AlgebraElement::from_terms(&g, vec![(c(1), ab), (c(2), bc)]);
        let r = restrict(&f, &only_b, &abc).unwrap();
        assert_eq!(r.evaluate(&b).unwrap(), c(3));
        assert_eq!(r.evaluate(&a).unwrap(), c(0));
        assert_eq!(r.evaluate(&cc).unwrap(), c(0));
        assert!(restrict(&f, &abc, &abc).unwrap().equals(&f).unwrap());
        let one_d: AlgebraElement<_, C> = AlgebraElement::indicator(&g, abc.clone());
        assert!(restrict(&one_d, &only_b, &abc).unwrap().equals(&AlgebraElement::indicator(&g, only_b)).unwrap());
    }

    #[test]
    fn windows() {
        let g = Arc::new(SnakeGroupoid::cyclic(3));
        let v = g.unit_region(ClopenSet::cylinder("10"));
        let w = g.unit_region(ClopenSet::cylinder("0"));
        let f = AlgebraElement::from_terms(&g, vec![(c(2), v.clone())]);
        assert_eq!(unit_support_window(&f).unwrap(), v);
        let h = AlgebraElement::from_terms(&g, vec![(c(1), v.clone()), (c(-1), v.clone()), (c(1), w.clone())]);
        let window = unit_support_window(&h).unwrap();
        assert!(g.is_subset(&v, &window) && g.is_subset(&w, &window));
        let (_, f) = snake();
        assert!(unit_support_window(&f).is_err());
    }

    #[test]
    fn cancelling_pair_needs_repair() {
        let g = Arc::new(FiniteGroupoid::cyclic(2));
        let e = g.bisection([g.arrow("g0").unwrap()]).unwrap();
        let f = AlgebraElement::from_terms(&g, vec![(c(5), e.clone()), (c(-5), e.clone())]);
        let eps = BigRational::new(1.into(), 10.into());
        let d = bounded_summands(&f, &[e.clone(), e.clone()], &eps).unwrap();
        assert_eq!(d.initial_violations, 2);
        assert!(d.repair_rounds >= 1);
        for part in &d.parts {
            assert!(part.element.sup_norm().le_plus(&Magnitude::zero(), &eps));
        }
        assert!(d.sum(&g).equals(&f).unwrap());
    }

    #[test]
    fn single_member_and_disjoint_members() {
        let g = Arc::new(FiniteGroupoid::pair(&["u", "v"]));
        let uv = g.bisection([g.arrow("e_u_v").unwrap()]).unwrap();
        let vu = g.bisection([g.arrow("e_v_u").unwrap()]).unwrap();
        let eps = BigRational::new(1.into(), 100.into());
        let f = AlgebraElement::from_terms(&g, vec![(c(1), uv.clone())]);
        let d = bounded_summands(&f, &[uv.clone(), vu.clone()], &eps).unwrap();
        assert!(d.parts[0].element.equals(&f).unwrap());
        assert!(d.parts[1].element.is_zero());
        let h = AlgebraElement::from_terms(&g, vec![(c(1), uv.clone()), (c(1), vu.clone())]);
        let d = bounded_summands(&h, &[uv.clone(), vu.clone()], &eps).unwrap();
        assert_eq!(d.repair_rounds, 0);
        assert!(d.parts[0].element.equals(&AlgebraElement::indicator(&g, uv)).unwrap());
        assert!(d.parts[1].element.equals(&AlgebraElement::indicator(&g, vu)).unwrap());
        assert!(matches!(bounded_summands(&h, &[], &eps), Err(Error::SupportEscapes(_))));
        assert!(matches!(bounded_summands(&h, &[g.unit_space()], &BigRational::zero()), Err(Error::InvalidEpsilon)));
    }

    #[test]
    fn snake_decomposition_over_overlapping_members() {
        let (g, f) = snake();
        let b = g.bisection(ClopenSet::full(), Some(1)).unwrap();
        let eps = BigRational::new(1.into(), 100.into());
        let doubled = f.add(&f).unwrap();
        let d = bounded_summands(&doubled, &[g.unit_space(), b.clone(), g.unit_space()], &eps).unwrap();
        assert!(d.sum(&g).equals(&doubled).unwrap());
        let bound = doubled.sup_norm();
        for part in &d.parts {
            assert!(part.element.sup_norm().le_plus(&bound, &eps));
            assert!(part.element.is_supported_in(&Region::bisection(&part.bisection)));
        }
        // terms 0 and 2 both land in the unit space members
        assert_eq!(d.parts[0].element.evaluate(&SnakePoint::Base).unwrap(), c(1));
        assert_eq!(d.parts[2].element.evaluate(&SnakePoint::Base).unwrap(), c(1));
    }
}
