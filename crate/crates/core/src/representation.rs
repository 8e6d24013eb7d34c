//! Regular representations `π_x` on `ℓ²(G_x)` and the norms built from them.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::groupoid::{AmpleGroupoid, HeadGroup, SnakeGroupoid, SnakePoint};
use crate::oracle::{matrix_norm, DenseMatrix, NORM_TOLERANCE};
use crate::scalar::{format_real, Scalar};

/// Grid size for [`symbol_norm`].
pub const SYMBOL_GRID: usize = 1 << 16;

/// The matrix of `π_x(f)` in the basis `{δ_γ : γ ∈ G_x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberOperator<P, S> {
    basis: Vec<P>,
    entries: Vec<S>,
}

impl<P: Clone + PartialEq, S: Scalar> FiberOperator<P, S> {
    pub fn basis(&self) -> &[P] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &S {
        &self.entries[row * self.dim() + col]
    }

    /// The product of two operators on the same fiber.
    pub fn mul(&self, other: &Self) -> Self {
        assert!(self.basis == other.basis, "operators act on different fibers");
        let n = self.dim();
        let mut entries = vec![S::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] = entries[i * n + j].clone() + a.clone() * other.entry(k, j).clone();
                }
            }
        }
        FiberOperator { basis: self.basis.clone(), entries }
    }

    /// The conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let entries = (0..n * n).map(|idx| self.entry(idx % n, idx / n).conj()).collect();
        FiberOperator { basis: self.basis.clone(), entries }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_rows(
            (0..n).map(|i| (0..n).map(|j| self.entry(i, j).to_complex64()).collect()).collect(),
        )
    }
}

/// `π_x(f) δ_γ = Σ_{α ∈ G_{r(γ)}} f(α) δ_{αγ}`.
pub fn regular_rep<G: AmpleGroupoid, S: Scalar>(
    f: &AlgebraElement<G, S>,
    x: &G::Point,
) -> Result<FiberOperator<G::Point, S>> {
    let model = f.model();
    if !model.owns_point(x) {
        return Err(Error::ForeignPoint(format!("{x:?}")));
    }
    if !model.is_unit(x) {
        return Err(Error::NotAUnit(format!("{x:?}")));
    }
    let basis = model.fiber(x)?.into_finite()?;
    let n = basis.len();
    let mut entries = vec![S::zero(); n * n];
    for (col, gamma) in basis.iter().enumerate() {
        for alpha in model.fiber(&model.point_range(gamma))?.into_finite()? {
            let value = f.value_at(&alpha);
            if value.is_zero() {
                continue;
            }
            let product = model.point_compose(&alpha, gamma).expect("s(α) = r(γ)");
            let row = basis.iter().position(|b| *b == product).expect("αγ lies in G_x");
            entries[row * n + col] = entries[row * n + col].clone() + value;
        }
    }
    Ok(FiberOperator { basis, entries })
}

/// `‖π_x(f)‖`, accurate to [`NORM_TOLERANCE`].
pub fn fiber_norm<G: AmpleGroupoid, S: Scalar>(f: &AlgebraElement<G, S>, x: &G::Point) -> Result<f64> {
    matrix_norm(&regular_rep(f, x)?.to_dense())
}

/// A numerically computed norm with its absolute error allowance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxNorm {
    pub value: f64,
    pub tolerance: f64,
}

/// One unit per test-point class: the sources of the test points.
///
/// `π_x(f)` vanishes unless the orbit of `x` meets the support, and it is
/// the same operator, up to unitary equivalence, along an orbit and across a
/// class.
pub fn representative_units<G: AmpleGroupoid, S: Scalar>(f: &AlgebraElement<G, S>) -> Vec<G::Point> {
    let model = f.model();
    let mut units: Vec<G::Point> = Vec::new();
    for p in f.test_points() {
        let x = model.point_source(&p);
        if !units.contains(&x) {
            units.push(x);
        }
    }
    units
}

/// `‖f‖_r = sup_x ‖π_x(f)‖`, evaluated on representative units.
pub fn reduced_norm<G: AmpleGroupoid, S: Scalar>(f: &AlgebraElement<G, S>) -> Result<ApproxNorm> {
    let mut value: f64 = 0.0;
    for x in representative_units(f) {
        value = value.max(fiber_norm(f, &x)?);
    }
    Ok(ApproxNorm { value, tolerance: NORM_TOLERANCE })
}

/// `max_θ |Σ_k f(γ_k) e^{ikθ}|` over an evenly spaced grid, for a snake with
/// integer heads.
///
/// The base fiber is `ℓ²(Z)` and `π_base(f)` is convolution by the finitely
/// supported sequence `k ↦ f(γ_k)`, whose norm is the sup of its symbol.
/// The error bound is grid step times the Lipschitz constant `Σ |k f(γ_k)|`.
pub fn symbol_norm<S: Scalar>(f: &AlgebraElement<SnakeGroupoid, S>) -> Result<ApproxNorm> {
    if f.model().heads() != HeadGroup::Integers {
        return Err(Error::WrongModel("the symbol norm needs integer heads".into()));
    }
    let mut coefficients: Vec<(i64, Complex64)> = vec![(0, f.value_at(&SnakePoint::Base).to_complex64())];
    for p in f.test_points() {
        if let SnakePoint::Head(k) = p {
            coefficients.push((k, f.value_at(&p).to_complex64()));
        }
    }
    coefficients.retain(|(_, c)| *c != Complex64::new(0.0, 0.0));
    let lipschitz: f64 = coefficients.iter().map(|(k, c)| k.unsigned_abs() as f64 * c.norm()).sum();
    if lipschitz == 0.0 {
        // a constant symbol
        let value = coefficients.first().map_or(0.0, |(_, c)| c.norm());
        return Ok(ApproxNorm { value, tolerance: 0.0 });
    }
    let step = 2.0 * PI / SYMBOL_GRID as f64;
    let value = (0..SYMBOL_GRID)
        .map(|j| {
            let theta = step * j as f64;
            coefficients.iter().map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * theta)).sum::<Complex64>().norm()
        })
        .fold(0.0, f64::max);
    Ok(ApproxNorm { value, tolerance: step * lipschitz })
}

/// `‖f‖_r` on a snake with integer heads: the symbol norm on the base fiber
/// against the scalars `|f(x)|` on the trivial fibers away from it.
pub fn integer_snake_reduced_norm<S: Scalar>(f: &AlgebraElement<SnakeGroupoid, S>) -> Result<ApproxNorm> {
    let symbol = symbol_norm(f)?;
    let off_base = f
        .test_points()
        .iter()
        .filter(|p| matches!(p, SnakePoint::Unit(_)))
        .map(|p| f.value_at(p).to_complex64().norm())
        .fold(0.0, f64::max);
    if off_base > symbol.value + symbol.tolerance {
        Ok(ApproxNorm { value: off_base, tolerance: NORM_TOLERANCE })
    } else {
        Ok(ApproxNorm { value: symbol.value.max(off_base), tolerance: symbol.tolerance.max(NORM_TOLERANCE) })
    }
}

/// Every computable bound on the full norm of `f`.
///
/// The full norm is a supremum over all representations and is not computed:
/// it lies between `reduced` and `mf`, and below `sup` as well when the
/// support fits in one bisection.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub sup: f64,
    pub inorm: f64,
    pub reduced: ApproxNorm,
    pub mf: f64,
    pub bisection_bound: bool,
}

impl NormReport {
    pub fn full_norm_lower(&self) -> f64 {
        self.reduced.value
    }

    pub fn full_norm_upper(&self) -> f64 {
        if self.bisection_bound {
            self.mf.min(self.sup)
        } else {
            self.mf
        }
    }

    /// Whether the bounds meet, up to the reduced-norm tolerance.
    pub fn pins_full_norm(&self) -> bool {
        self.full_norm_upper() - self.full_norm_lower() <= self.reduced.tolerance
    }

    pub fn record(&self) -> String {
        format!(
            "sup={} inorm={} reduced={} reduced_tol={:e} mf={} bisection_bound={}",
            format_real(self.sup),
            format_real(self.inorm),
            format_real(self.reduced.value),
            self.reduced.tolerance,
            format_real(self.mf),
            self.bisection_bound
        )
    }
}

impl fmt::Display for NormReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sup norm:        {}", format_real(self.sup))?;
        writeln!(f, "I-norm:          {}", format_real(self.inorm))?;
        writeln!(f, "reduced norm:    {} (± {:e})", format_real(self.reduced.value), self.reduced.tolerance)?;
        writeln!(f, "M_f:             {}", format_real(self.mf))?;
        writeln!(f, "bisection bound: {}", self.bisection_bound)?;
        write!(
            f,
            "full norm:       bounded, not computed: {} <= ||f|| <= {}",
            format_real(self.full_norm_lower()),
            format_real(self.full_norm_upper())
        )?;
        if self.pins_full_norm() {
            write!(f, " (pinned)")?;
        }
        Ok(())
    }
}

fn assemble<G: AmpleGroupoid, S: Scalar>(f: &AlgebraElement<G, S>, reduced: ApproxNorm) -> NormReport {
    NormReport {
        sup: f.sup_norm().value(),
        inorm: f.i_norm(),
        reduced,
        mf: f.coefficient_mass(),
        bisection_bound: f.support_bisection().is_some(),
    }
}

pub fn norm_sandwich<G: AmpleGroupoid, S: Scalar>(f: &AlgebraElement<G, S>) -> Result<NormReport> {
    Ok(assemble(f, reduced_norm(f)?))
}

/// [`norm_sandwich`] for snakes, using the symbol norm when heads are integers.
pub fn snake_norm_sandwich<S: Scalar>(f: &AlgebraElement<SnakeGroupoid, S>) -> Result<NormReport> {
    let reduced = match f.model().heads() {
        HeadGroup::Integers => integer_snake_reduced_norm(f)?,
        HeadGroup::Cyclic(_) => reduced_norm(f)?,
    };
    Ok(assemble(f, reduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{ClopenSet, FiniteGroupoid};
    use num_complex::Complex;
    use num_rational::BigRational;
    use std::sync::Arc;

    type C = Complex<BigRational>;

    fn c(re: i64) -> C {
        C::from_i64(re, 0)
    }

    fn snake_f(n: u32) -> AlgebraElement<SnakeGroupoid, C> {
        let g = Arc::new(SnakeGroupoid::cyclic(n));
        let b = g.bisection(ClopenSet::full(), Some(1)).unwrap();
        AlgebraElement::from_terms(&g, vec![(c(1), g.unit_space()), (c(-1), b)])
    }

    #[test]
    fn base_fiber_matrix_of_the_snake_element() {
        let f = snake_f(2);
        let m = regular_rep(&f, &SnakePoint::Base).unwrap();
        assert_eq!(m.basis(), &[SnakePoint::Base, SnakePoint::Head(1)]);
        assert_eq!([m.entry(0, 0), m.entry(0, 1), m.entry(1, 0), m.entry(1, 1)], [&c(1), &c(-1), &c(-1), &c(1)]);
        assert!((fiber_norm(&f, &SnakePoint::Base).unwrap() - 2.0).abs() <= 1e-10);
        assert!(regular_rep(&f, &SnakePoint::Head(1)).is_err());
    }

    #[test]
    fn snake_report() {
        let f = snake_f(2);
        let r = snake_norm_sandwich(&f).unwrap();
        assert_eq!((r.sup, r.inorm, r.mf, r.bisection_bound), (1.0, 2.0, 2.0, false));
        assert!((r.reduced.value - 2.0).abs() <= 1e-8);
        assert!(r.pins_full_norm());
        assert_eq!(r.record(), "sup=1 inorm=2 reduced=2 reduced_tol=1e-10 mf=2 bisection_bound=false");
    }

    #[test]
    fn swap_on_the_pair_groupoid() {
        let g = Arc::new(FiniteGroupoid::pair(&["u", "v"]));
        let uv = g.bisection([g.arrow("e_u_v").unwrap()]).unwrap();
        let vu = g.bisection([g.arrow("e_v_u").unwrap()]).unwrap();
        let f: AlgebraElement<_, C> = AlgebraElement::from_terms(&g, vec![(c(1), uv), (c(1), vu)]);
        let u = g.arrow("u").unwrap();
        let m = regular_rep(&f, &u).unwrap();
        let names: Vec<&str> = m.basis().iter().map(|&a| g.name(a)).collect();
        assert_eq!(names, ["e_u_u", "e_v_u"]);
        assert_eq!([m.entry(0, 0), m.entry(0, 1), m.entry(1, 0), m.entry(1, 1)], [&c(0), &c(1), &c(1), &c(0)]);
        assert!((reduced_norm(&f).unwrap().value - 1.0).abs() <= 1e-10);
        let ff = f.convolve(&f).unwrap();
        assert_eq!(regular_rep(&ff, &u).unwrap(), m.mul(&m));
        assert_eq!(regular_rep(&f.involute(), &u).unwrap(), m.adjoint());
    }

    #[test]
    fn units_and_zero() {
        let g = Arc::new(SnakeGroupoid::cyclic(3));
        let one: AlgebraElement<_, C> = AlgebraElement::indicator(&g, g.unit_space());
        let m = regular_rep(&one, &SnakePoint::Base).unwrap();
        assert_eq!(m, m.mul(&m));
        assert!((reduced_norm(&one).unwrap().value - 1.0).abs() <= 1e-12);
        let zero: AlgebraElement<SnakeGroupoid, C> = AlgebraElement::zero(&g);
        assert_eq!(reduced_norm(&zero).unwrap().value, 0.0);
        let r = snake_norm_sandwich(&zero).unwrap();
        assert_eq!((r.sup, r.inorm, r.reduced.value, r.mf), (0.0, 0.0, 0.0, 0.0));
        let b = g.bisection(ClopenSet::cylinder("0"), Some(2)).unwrap();
        let r = snake_norm_sandwich(&AlgebraElement::<_, C>::indicator(&g, b)).unwrap();
        assert_eq!((r.sup, r.inorm, r.mf, r.bisection_bound), (1.0, 1.0, 1.0, true));
        assert!((r.reduced.value - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn integer_heads() {
        let g = Arc::new(SnakeGroupoid::integers());
        let one: AlgebraElement<_, C> = AlgebraElement::indicator(&g, g.unit_space());
        assert!(matches!(reduced_norm(&one), Err(Error::InfiniteFiber)));
        let s = symbol_norm(&one).unwrap();
        assert_eq!(s, ApproxNorm { value: 1.0, tolerance: 0.0 });
        let shift = g.bisection(ClopenSet::full(), Some(1)).unwrap();
        let back = g.bisection(ClopenSet::full(), Some(-1)).unwrap();
        let f = one.add(&AlgebraElement::indicator(&g, shift.clone())).unwrap();
        let s = symbol_norm(&f).unwrap();
        assert!((s.value - 2.0).abs() <= s.tolerance);
        let h: AlgebraElement<_, C> = AlgebraElement::from_terms(&g, vec![(c(1), shift), (c(-1), back)]);
        let s = symbol_norm(&h).unwrap();
        assert!((s.value - 2.0).abs() <= s.tolerance);
        assert!(symbol_norm(&snake_f(2)).is_err());
    }
}
