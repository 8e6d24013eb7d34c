//! Brute-force reference computations.
//!
//! Nothing here calls into the bisection calculus or the evaluation code of
//! [`crate::element`]: values are tabulated arrow by arrow straight from the
//! term list and the composition table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;

use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::groupoid::{Arrow, FiniteGroupoid};
use crate::scalar::Scalar;

pub const DEFAULT_CAP: usize = 512;
pub const NORM_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100_000;

/// A square complex matrix, row major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Panics unless every row has `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        DenseMatrix { dim, entries: rows.into_iter().flatten().collect() }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim..(i + 1) * self.dim].iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j).conj() * v[i];
            }
        }
        out
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Complex64]> = self.entries.chunks(self.dim.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `λ_max(M*M)` by power iteration from one start vector.
fn power_iteration(m: &DenseMatrix, start: Vec<Complex64>) -> f64 {
    let mut v = start;
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);
    let mut lambda = 0.0;
    for _ in 0..MAX_ITERATIONS {
        let w = m.apply_adjoint(&m.apply(&v));
        // Rayleigh quotient v·Av for the unit vector v
        lambda = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        let residual = norm(&w.iter().zip(&v).map(|(a, b)| a - b * lambda).collect::<Vec<_>>());
        let size = norm(&w);
        if size == 0.0 || residual <= NORM_TOLERANCE * lambda.max(1.0) {
            break;
        }
        v = w.into_iter().map(|x| x / size).collect();
    }
    lambda.max(0.0)
}

/// The largest singular value of `m`.
///
/// Power iteration on `M*M` runs from the normalized all-ones vector and
/// from the ramp `(1, 2, …, n)`; the larger estimate wins. The second start
/// covers matrices whose top eigenvector is orthogonal to all-ones.
pub fn matrix_norm(m: &DenseMatrix) -> Result<f64> {
    matrix_norm_capped(m, DEFAULT_CAP)
}

pub fn matrix_norm_capped(m: &DenseMatrix, cap: usize) -> Result<f64> {
    if m.dim > cap {
        return Err(Error::DimensionCap { dim: m.dim, cap });
    }
    if m.dim == 0 {
        return Ok(0.0);
    }
    let ones = vec![Complex64::new(1.0, 0.0); m.dim];
    let ramp = (0..m.dim).map(|i| Complex64::new((i + 1) as f64, 0.0)).collect();
    let lambda = power_iteration(m, ones).max(power_iteration(m, ramp));
    Ok(lambda.sqrt())
}

/// `f` as a table over every arrow, summed term by term.
pub fn tabulate<S: Scalar>(f: &AlgebraElement<FiniteGroupoid, S>) -> BTreeMap<Arrow, S> {
    let g = f.model();
    let mut table: BTreeMap<Arrow, S> = g.arrows().map(|a| (a, S::zero())).collect();
    for term in f.terms() {
        for a in term.bisection.iter() {
            let slot = table.get_mut(&Arrow(a)).expect("bisection arrow outside the model");
            *slot = slot.clone() + term.coefficient.clone();
        }
    }
    table
}

/// `(f*g)(γ) = Σ_{αβ=γ} f(α) g(β)` for every arrow `γ`.
pub fn brute_convolve<S: Scalar>(
    f: &AlgebraElement<FiniteGroupoid, S>,
    g: &AlgebraElement<FiniteGroupoid, S>,
) -> Result<BTreeMap<Arrow, S>> {
    f.same_model(g)?;
    let model = f.model();
    let (tf, tg) = (tabulate(f), tabulate(g));
    let mut out: BTreeMap<Arrow, S> = model.arrows().map(|a| (a, S::zero())).collect();
    for alpha in model.arrows() {
        for beta in model.arrows() {
            if model.src(alpha) != model.rng(beta) {
                continue;
            }
            let gamma = model.compose(alpha, beta).expect("composable arrows compose");
            let slot = out.get_mut(&gamma).expect("composite is an arrow");
            *slot = slot.clone() + tf[&alpha].clone() * tg[&beta].clone();
        }
    }
    Ok(out)
}

/// Every arrow where `f` does not vanish.
pub fn brute_support<S: Scalar>(f: &AlgebraElement<FiniteGroupoid, S>) -> BTreeSet<Arrow> {
    tabulate(f).into_iter().filter(|(_, v)| !v.is_zero()).map(|(a, _)| a).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use num_rational::BigRational;
    use std::sync::Arc;

    type C = Complex<BigRational>;

    #[test]
    fn norms_of_small_matrices() {
        let m = DenseMatrix::from_real_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert!((matrix_norm(&m).unwrap() - 2.0).abs() <= 1e-10);
        assert!((matrix_norm(&DenseMatrix::identity(5)).unwrap() - 1.0).abs() <= 1e-12);
        assert_eq!(matrix_norm(&DenseMatrix::zeros(3)).unwrap(), 0.0);
        let swap = DenseMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!((matrix_norm(&swap).unwrap() - 1.0).abs() <= 1e-12);
        // nilpotent: singular values 2 and 0
        let n = DenseMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((matrix_norm(&n).unwrap() - 2.0).abs() <= 1e-10);
        let rot = DenseMatrix::from_rows(vec![
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(-3.0, 0.0)],
        ]);
        assert!((matrix_norm(&rot).unwrap() - 3.0).abs() <= 1e-10);
    }

    #[test]
    fn cap_is_enforced() {
        let m = DenseMatrix::zeros(4);
        assert!(matches!(matrix_norm_capped(&m, 3), Err(Error::DimensionCap { dim: 4, cap: 3 })));
    }

    #[test]
    fn pair_convolution_by_enumeration() {
        let g = Arc::new(FiniteGroupoid::pair(&["u", "v"]));
        let uv = g.bisection([g.arrow("e_u_v").unwrap()]).unwrap();
        let vu = g.bisection([g.arrow("e_v_u").unwrap()]).unwrap();
        let a: AlgebraElement<_, C> = AlgebraElement::indicator(&g, uv);
        let b = AlgebraElement::indicator(&g, vu);
        let table = brute_convolve(&a, &b).unwrap();
        for (arrow, value) in table {
            let expected = if g.name(arrow) == "e_u_u" { 1 } else { 0 };
            assert_eq!(value, C::from_i64(expected, 0), "at {}", g.name(arrow));
        }
    }

    #[test]
    fn unit_is_neutral_and_zero_is_zero() {
        let g = Arc::new(FiniteGroupoid::transitive(2, &FiniteGroupoid::cyclic(2)));
        let arrows: Vec<Arrow> = g.arrows().take(1).collect();
        let f: AlgebraElement<_, C> = AlgebraElement::indicator(&g, g.bisection(arrows).unwrap())
            .scale(&C::from_i64(2, -1));
        let units = g.bisection(g.units().collect::<Vec<_>>()).unwrap();
        let one = AlgebraElement::indicator(&g, units);
        assert_eq!(brute_convolve(&f, &one).unwrap(), tabulate(&f));
        let zero = AlgebraElement::zero(&g);
        assert!(brute_convolve(&zero, &f).unwrap().values().all(|v: &C| v == &C::from_i64(0, 0)));
    }

    #[test]
    fn supports_by_scan() {
        let g = Arc::new(FiniteGroupoid::pair(&["a", "b", "c"]));
        let (a, b) = (g.arrow("a").unwrap(), g.arrow("b").unwrap());
        let ab = g.bisection([a, b]).unwrap();
        let only_b = g.bisection([b]).unwrap();
        let f: AlgebraElement<_, C> =
            AlgebraElement::indicator(&g, ab.clone()).sub(&AlgebraElement::indicator(&g, only_b)).unwrap();
        assert_eq!(brute_support(&f), BTreeSet::from([a]));
        let one: AlgebraElement<_, C> = AlgebraElement::indicator(&g, ab.clone());
        assert_eq!(brute_support(&one), BTreeSet::from([a, b]));
        assert!(brute_support(&one.sub(&one).unwrap()).is_empty());
    }
}
