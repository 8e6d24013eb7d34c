//! Elements `f = Σ a_B 1_B` of the Steinberg algebra.
//!
//! Term lists are not normalized: in a non-Hausdorff model an element need
//! not be a combination over disjoint bisections, so every pointwise
//! question is answered by evaluating on the test points of the term family.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupoid::{AmpleGroupoid, Region};
use crate::scalar::{Magnitude, RealScalar, Scalar};

/// One summand `a_B 1_B`.
pub struct Term<G: AmpleGroupoid, S> {
    pub coefficient: S,
    pub bisection: G::Bisection,
}

impl<G: AmpleGroupoid, S: Clone> Clone for Term<G, S> {
    fn clone(&self) -> Self {
        Term { coefficient: self.coefficient.clone(), bisection: self.bisection.clone() }
    }
}

impl<G: AmpleGroupoid, S: fmt::Debug> fmt::Debug for Term<G, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}·1[{:?}]", self.coefficient, self.bisection)
    }
}

pub struct AlgebraElement<G: AmpleGroupoid, S> {
    model: Arc<G>,
    terms: Vec<Term<G, S>>,
}

impl<G: AmpleGroupoid, S: Clone> Clone for AlgebraElement<G, S> {
    fn clone(&self) -> Self {
        AlgebraElement { model: Arc::clone(&self.model), terms: self.terms.clone() }
    }
}

impl<G: AmpleGroupoid, S: fmt::Debug> fmt::Debug for AlgebraElement<G, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.terms).finish()
    }
}

/// One test-point class where an element does not vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportClass<P> {
    pub point: P,
    pub description: String,
    pub open: bool,
}

/// `supp°(f)` as a union of test-point classes.
#[derive(Clone, Debug, PartialEq)]
pub struct Support<P> {
    pub classes: Vec<SupportClass<P>>,
    /// Whether the union of the classes is open in `G`.
    pub open: bool,
}

impl<P> Support<P> {
    pub fn points(&self) -> impl Iterator<Item = &P> {
        self.classes.iter().map(|c| &c.point)
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Values attained by a unit-supported element on a window, in order of
/// first appearance over the test points.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<S> {
    pub values: Vec<S>,
}

impl<S: Scalar> Spectrum<S> {
    pub fn radius(&self) -> Magnitude<S::Real> {
        self.values.iter().map(Magnitude::of).fold(Magnitude::zero(), Magnitude::max)
    }

    pub fn contains(&self, z: &S) -> bool {
        self.values.contains(z)
    }
}

impl<G: AmpleGroupoid, S: Scalar> AlgebraElement<G, S> {
    pub fn zero(model: &Arc<G>) -> Self {
        AlgebraElement { model: Arc::clone(model), terms: Vec::new() }
    }

    pub fn indicator(model: &Arc<G>, b: G::Bisection) -> Self {
        Self::from_terms(model, vec![(S::one(), b)])
    }

    pub fn from_terms(model: &Arc<G>, terms: Vec<(S, G::Bisection)>) -> Self {
        let terms = terms.into_iter().map(|(coefficient, bisection)| Term { coefficient, bisection }).collect();
        AlgebraElement { model: Arc::clone(model), terms }
    }

    pub fn model(&self) -> &Arc<G> {
        &self.model
    }

    pub fn terms(&self) -> &[Term<G, S>] {
        &self.terms
    }

    /// The bisections of the term list, in order.
    pub fn family(&self) -> Vec<&G::Bisection> {
        self.terms.iter().map(|t| &t.bisection).collect()
    }

    pub fn map_coefficients<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AlgebraElement<G, T> {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coefficient: f(&t.coefficient), bisection: t.bisection.clone() })
            .collect();
        AlgebraElement { model: Arc::clone(&self.model), terms }
    }

    pub fn same_model(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.model, &other.model) || *self.model == *other.model {
            Ok(())
        } else {
            Err(Error::ModelMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_model(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(AlgebraElement { model: Arc::clone(&self.model), terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_coefficients(|a| c.clone() * a.clone())
    }

    /// `Σ_B Σ_D a_B b_D 1_{BD}`, with identical bisections merged.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.same_model(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for t in &self.terms {
            for u in &other.terms {
                let bisection = self.model.product(&t.bisection, &u.bisection);
                terms.push(Term { coefficient: t.coefficient.clone() * u.coefficient.clone(), bisection });
            }
        }
        Ok(AlgebraElement { model: Arc::clone(&self.model), terms }.compacted())
    }

    /// `Σ conj(a_B) 1_{B⁻¹}`.
    pub fn involute(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coefficient: t.coefficient.conj(), bisection: self.model.inverse(&t.bisection) })
            .collect();
        AlgebraElement { model: Arc::clone(&self.model), terms }
    }

    /// Merges terms over the same bisection and drops zero or empty terms.
    /// The first occurrence fixes the position of a merged term.
    pub fn compacted(&self) -> Self {
        let mut index: HashMap<&G::Bisection, usize> = HashMap::new();
        let mut merged: Vec<Term<G, S>> = Vec::new();
        for t in &self.terms {
            if self.model.is_empty(&t.bisection) {
                continue;
            }
            match index.get(&t.bisection) {
                Some(&i) => merged[i].coefficient = merged[i].coefficient.clone() + t.coefficient.clone(),
                None => {
                    index.insert(&t.bisection, merged.len());
                    merged.push(t.clone());
                }
            }
        }
        merged.retain(|t| !t.coefficient.is_zero());
        AlgebraElement { model: Arc::clone(&self.model), terms: merged }
    }

    pub fn evaluate(&self, p: &G::Point) -> Result<S> {
        if !self.model.owns_point(p) {
            return Err(Error::ForeignPoint(format!("{p:?}")));
        }
        Ok(self.value_at(p))
    }

    pub(crate) fn value_at(&self, p: &G::Point) -> S {
        self.terms
            .iter()
            .filter(|t| self.model.contains(&t.bisection, p))
            .fold(S::zero(), |acc, t| acc + t.coefficient.clone())
    }

    pub fn test_points(&self) -> Vec<G::Point> {
        self.model.test_points(&self.family())
    }

    /// Pointwise equality, decided on the test points of both term families.
    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.same_model(other)?;
        let mut family = self.family();
        family.extend(other.family());
        Ok(self.model.test_points(&family).iter().all(|p| self.value_at(p) == other.value_at(p)))
    }

    pub fn is_zero(&self) -> bool {
        self.test_points().iter().all(|p| self.value_at(p).is_zero())
    }

    pub fn open_support(&self) -> Support<G::Point> {
        let family = self.family();
        let depth = self.model.working_depth(&family);
        let points: Vec<G::Point> = self
            .model
            .test_points_at(&family, depth)
            .into_iter()
            .filter(|p| !self.value_at(p).is_zero())
            .collect();
        let open = self.model.is_open_union(&points, depth);
        let classes = points
            .into_iter()
            .map(|point| SupportClass {
                description: self.model.describe_class(&point, depth),
                open: self.model.class_is_open(&point, depth),
                point,
            })
            .collect();
        Support { classes, open }
    }

    /// Whether every class where `f` does not vanish lies in `region`.
    pub fn is_supported_in(&self, region: &Region<G::Bisection>) -> bool {
        let members = region.members(&*self.model);
        let mut family = self.family();
        family.extend(members.iter());
        self.model
            .test_points(&family)
            .iter()
            .filter(|p| !self.value_at(p).is_zero())
            .all(|p| region.contains(&*self.model, p))
    }

    /// A compact open bisection containing the support, if there is one.
    pub fn support_bisection(&self) -> Option<G::Bisection> {
        let points: Vec<G::Point> = self.open_support().classes.into_iter().map(|c| c.point).collect();
        self.model.bisection_through(&points)
    }

    /// `‖f‖_∞`, exact.
    pub fn sup_norm(&self) -> Magnitude<S::Real> {
        self.test_points()
            .iter()
            .map(|p| Magnitude::of(&self.value_at(p)))
            .fold(Magnitude::zero(), Magnitude::max)
    }

    /// `sup_x max(Σ_{s(γ)=x} |f(γ)|, Σ_{r(γ)=x} |f(γ)|)`.
    ///
    /// Arrows outside the test points carry value zero, so grouping the
    /// test points by source and by range covers every fiber that matters.
    pub fn i_norm(&self) -> f64 {
        let mut by_source: HashMap<G::Point, f64> = HashMap::new();
        let mut by_range: HashMap<G::Point, f64> = HashMap::new();
        for p in self.test_points() {
            let modulus = self.value_at(&p).norm_sqr().to_f64().sqrt();
            if modulus == 0.0 {
                continue;
            }
            *by_source.entry(self.model.point_source(&p)).or_default() += modulus;
            *by_range.entry(self.model.point_range(&p)).or_default() += modulus;
        }
        by_source.values().chain(by_range.values()).fold(0.0, |a, &b| a.max(b))
    }

    /// The values of `f` on the unit window `U`, including 0 when `f`
    /// vanishes somewhere on `U`.
    pub fn unit_spectrum(&self, window: &Region<G::Bisection>) -> Result<Spectrum<S>> {
        let members = window.members(&*self.model);
        let units = self.model.unit_space();
        if let Some(i) = members.iter().position(|m| !self.model.is_subset(m, &units)) {
            return Err(Error::NotContained(format!("window member {i} is not inside the unit space")));
        }
        if !self.is_supported_in(window) {
            return Err(Error::SupportEscapes("the support is not inside the window".into()));
        }
        let mut family = self.family();
        family.extend(members.iter());
        let mut values: Vec<S> = Vec::new();
        for p in self.model.test_points(&family) {
            if self.model.is_unit(&p) && window.contains(&*self.model, &p) {
                let v = self.value_at(&p);
                if !values.contains(&v) {
                    values.push(v);
                }
            }
        }
        Ok(Spectrum { values })
    }

    pub fn spectral_radius(&self, window: &Region<G::Bisection>) -> Result<Magnitude<S::Real>> {
        Ok(self.unit_spectrum(window)?.radius())
    }

    /// `Σ |a_D|` over the current term list.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm_sqr().to_f64().sqrt()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{ClopenSet, FiniteGroupoid, SnakeGroupoid, SnakePoint};
    use num_complex::Complex;
    use num_rational::BigRational;

    type C = Complex<BigRational>;

    fn c(re: i64, im: i64) -> C {
        C::from_i64(re, im)
    }

    /// `1_{G⁰} − 1_B` on the two-headed snake, `B = (full, head 1)`.
    fn snake_f() -> (Arc<SnakeGroupoid>, AlgebraElement<SnakeGroupoid, C>) {
        let g = Arc::new(SnakeGroupoid::cyclic(2));
        let b = g.bisection(ClopenSet::full(), Some(1)).unwrap();
        let f = AlgebraElement::from_terms(&g, vec![(c(1, 0), g.unit_space()), (c(-1, 0), b)]);
        (g, f)
    }

    #[test]
    fn snake_values() {
        let (_, f) = snake_f();
        assert_eq!(f.evaluate(&SnakePoint::Base).unwrap(), c(1, 0));
        assert_eq!(f.evaluate(&SnakePoint::Head(1)).unwrap(), c(-1, 0));
        assert_eq!(f.evaluate(&SnakePoint::unit("1")).unwrap(), c(0, 0));
        assert!(f.evaluate(&SnakePoint::Head(3)).is_err());
    }

    #[test]
    fn snake_square_is_twice_f() {
        let (_, f) = snake_f();
        let ff = f.convolve(&f).unwrap();
        assert!(ff.equals(&f.scale(&c(2, 0))).unwrap());
        assert!(f.involute().equals(&f).unwrap());
    }

    #[test]
    fn snake_support_is_not_open() {
        let (_, f) = snake_f();
        let s = f.open_support();
        let points: Vec<_> = s.points().cloned().collect();
        assert_eq!(points, vec![SnakePoint::Base, SnakePoint::Head(1)]);
        assert!(!s.open);
        assert!(s.classes.iter().all(|c| !c.open));
        assert!(!f.is_supported_in(&Region::UnitSpace));
    }

    #[test]
    fn snake_norms() {
        let (_, f) = snake_f();
        assert_eq!(f.sup_norm(), Magnitude::from_squared(BigRational::from_integer(1.into())));
        assert_eq!(f.i_norm(), 2.0);
        assert_eq!(f.coefficient_mass(), 2.0);
    }

    #[test]
    fn pair_swap() {
        let g = Arc::new(FiniteGroupoid::pair(&["u", "v"]));
        let uv = g.bisection([g.arrow("e_u_v").unwrap()]).unwrap();
        let vu = g.bisection([g.arrow("e_v_u").unwrap()]).unwrap();
        let uu = g.bisection([g.arrow("u").unwrap()]).unwrap();
        let a: AlgebraElement<_, C> = AlgebraElement::indicator(&g, uv.clone());
        let b = AlgebraElement::indicator(&g, vu.clone());
        assert!(a.convolve(&b).unwrap().equals(&AlgebraElement::indicator(&g, uu)).unwrap());
        let swap = a.add(&b).unwrap();
        assert_eq!(swap.i_norm(), 1.0);
        assert!(swap.support_bisection().is_some());
    }

    #[test]
    fn cancellation_and_identity() {
        let (g, f) = snake_f();
        let b = g.cylinders(&["01"], None).unwrap();
        let one_b: AlgebraElement<_, C> = AlgebraElement::indicator(&g, b);
        assert!(one_b.sub(&one_b).unwrap().is_zero());
        let padded = f.add(&one_b).unwrap().sub(&one_b).unwrap();
        assert!(padded.equals(&f).unwrap());
        let unit = AlgebraElement::indicator(&g, g.unit_space());
        assert!(f.convolve(&unit).unwrap().equals(&f).unwrap());
        let i_b = one_b.scale(&c(0, 1)).involute();
        assert_eq!(i_b.terms()[0].coefficient, c(0, -1));
    }

    #[test]
    fn spectra_on_windows() {
        let g = Arc::new(SnakeGroupoid::cyclic(3));
        let u = g.unit_region(ClopenSet::cylinder("1"));
        let v = g.unit_region(ClopenSet::cylinder("10"));
        let window = Region::bisection(&u);
        let f: AlgebraElement<_, C> = AlgebraElement::indicator(&g, u.clone()).scale(&c(2, 0));
        let s = f.unit_spectrum(&window).unwrap();
        assert_eq!(s.values, vec![c(2, 0)]);
        let h: AlgebraElement<_, C> = AlgebraElement::indicator(&g, v).scale(&c(2, 0));
        let mut values = h.unit_spectrum(&window).unwrap().values;
        values.sort_by_key(|z| z.re.clone());
        assert_eq!(values, vec![c(0, 0), c(2, 0)]);
        let z: AlgebraElement<SnakeGroupoid, C> = AlgebraElement::zero(&g);
        assert_eq!(z.unit_spectrum(&Region::UnitSpace).unwrap().values, vec![c(0, 0)]);
        let (_, f) = snake_f();
        assert!(matches!(f.unit_spectrum(&Region::UnitSpace), Err(Error::SupportEscapes(_))));
    }

    #[test]
    fn foreign_models_do_not_mix() {
        let (_, f) = snake_f();
        let other = Arc::new(SnakeGroupoid::cyclic(3));
        let h: AlgebraElement<_, C> = AlgebraElement::indicator(&other, other.unit_space());
        assert!(matches!(f.add(&h), Err(Error::ModelMismatch)));
    }
}
