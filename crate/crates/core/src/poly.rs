//! Taylor models of smooth germs: an exact polynomial part with rational
//! coefficients plus declared remainder factors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice point of the nonnegative orthant, used as a monomial exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Exponent(entries)
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    /// The unit vector `scale * e_i`.
    pub fn axis(n: usize, i: usize, scale: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = scale;
        Exponent(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// `|α| = α₁ + … + αₙ`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&a| u64::from(a)).sum()
    }

    /// Zero-based indices with nonzero entries.
    pub fn support(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// The 0/1 truncation: 1 where the entry is nonzero.
    pub fn hat(&self) -> Exponent {
        Exponent(self.0.iter().map(|&a| u32::from(a != 0)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn is_zero_one(&self) -> bool {
        self.0.iter().all(|&a| a <= 1)
    }

    /// Index `i` if this is `ν·eᵢ` with `ν > 0`.
    pub fn axis_index(&self) -> Option<usize> {
        let supp = self.support();
        if supp.len() == 1 {
            supp.into_iter().next()
        } else {
            None
        }
    }

    pub fn to_i128(&self) -> Vec<i128> {
        self.0.iter().map(|&a| i128::from(a)).collect()
    }

    /// `⟨a, α⟩` with overflow checks.
    pub fn dot(&self, a: &[i128]) -> Result<i128> {
        crate::lattice::dot(a, &self.to_i128())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `x^α` in floating point.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(&a, _)| a != 0)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

/// `coeff · x^exp` with a nonzero exact coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigRational,
    pub exp: Exponent,
}

impl Term {
    pub fn new(coeff: BigRational, exp: impl Into<Exponent>) -> Self {
        Term {
            coeff,
            exp: exp.into(),
        }
    }

    pub fn int(coeff: i64, exp: impl Into<Exponent>) -> Self {
        Term::new(BigRational::from_integer(BigInt::from(coeff)), exp)
    }
}

/// A factor `x^β · φ(x)` of the germ beyond the polynomial part.
///
/// `φ` is either a unit (`φ(0) ≠ 0`) or flat in the listed variables. A unit
/// remainder adds `β` to the Taylor support; a flat one adds nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Remainder {
    pub exp: Exponent,
    /// Zero-based variable indices.
    pub flat_vars: BTreeSet<usize>,
    pub is_unit: bool,
}

impl Remainder {
    pub fn unit(exp: impl Into<Exponent>) -> Self {
        Remainder {
            exp: exp.into(),
            flat_vars: BTreeSet::new(),
            is_unit: true,
        }
    }

    pub fn flat(exp: impl Into<Exponent>, vars: impl IntoIterator<Item = usize>) -> Self {
        Remainder {
            exp: exp.into(),
            flat_vars: vars.into_iter().collect(),
            is_unit: false,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.exp.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.exp.dim(),
            });
        }
        if let Some(&v) = self.flat_vars.iter().find(|&&v| v >= n) {
            return Err(Error::InvalidRemainder(format!(
                "flat variable x{} outside 1..{n}",
                v + 1
            )));
        }
        match (self.is_unit, self.flat_vars.is_empty()) {
            (true, false) => Err(Error::InvalidRemainder(
                "a unit remainder cannot be flat in any variable".into(),
            )),
            (false, true) => Err(Error::InvalidRemainder(
                "remainder factor must be a unit or flat in at least one variable; \
                 vanishing non-flat factors leave the Newton polyhedron undetermined"
                    .into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Floating-point image of a polynomial, for fast repeated evaluation.
#[derive(Clone, Debug, Default)]
pub struct FloatPoly {
    terms: Vec<(f64, Exponent)>,
}

impl FloatPoly {
    pub fn from_terms<'a>(terms: impl IntoIterator<Item = &'a Term>) -> Self {
        FloatPoly {
            terms: terms
                .into_iter()
                .map(|t| (t.coeff.to_f64().unwrap_or(f64::NAN), t.exp.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let parts: Vec<f64> = self.terms.iter().map(|(c, e)| c * e.monomial(x)).collect();
        pairwise_sum(&parts)
    }

    /// `Σ |c_α x^α|`, the absolute-value majorant.
    pub fn abs_eval(&self, x: &[f64]) -> f64 {
        let parts: Vec<f64> = self
            .terms
            .iter()
            .map(|(c, e)| (c * e.monomial(x)).abs())
            .collect();
        pairwise_sum(&parts)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// The germ under analysis.
#[derive(Clone, Debug)]
pub struct TaylorModel {
    n: usize,
    terms: Vec<Term>,
    remainders: Vec<Remainder>,
    float: FloatPoly,
    grad: Vec<FloatPoly>,
}

impl PartialEq for TaylorModel {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms && self.remainders == other.remainders
    }
}

impl Eq for TaylorModel {}

impl TaylorModel {
    /// Collects like terms, drops zero coefficients and validates remainders.
    pub fn new(
        n: usize,
        terms: impl IntoIterator<Item = Term>,
        remainders: impl IntoIterator<Item = Remainder>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("dimension must be at least 1".into()));
        }
        let mut collected: BTreeMap<Exponent, BigRational> = BTreeMap::new();
        for t in terms {
            if t.exp.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.exp.dim(),
                });
            }
            *collected.entry(t.exp).or_insert_with(BigRational::zero) += t.coeff;
        }
        let terms: Vec<Term> = collected
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(exp, coeff)| Term { coeff, exp })
            .collect();
        let remainders: Vec<Remainder> = remainders.into_iter().collect();
        for r in &remainders {
            r.validate(n)?;
        }
        let float = FloatPoly::from_terms(&terms);
        let grad = (0..n)
            .map(|i| FloatPoly::from_terms(&derivative_terms(&terms, i)))
            .collect();
        Ok(TaylorModel {
            n,
            terms,
            remainders,
            float,
            grad,
        })
    }

    /// Pure polynomial germ.
    pub fn polynomial(n: usize, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        Self::new(n, terms, std::iter::empty())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Terms sorted by exponent, pairwise-distinct exponents, nonzero coefficients.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn remainders(&self) -> &[Remainder] {
        &self.remainders
    }

    pub fn float_poly(&self) -> &FloatPoly {
        &self.float
    }

    /// `f(0) = 0` and `∇f(0) = 0`: no support point of degree ≤ 1.
    pub fn is_origin_critical(&self) -> bool {
        self.support().iter().all(|e| e.degree() >= 2)
    }

    /// Generating set of the Newton polyhedron: polynomial exponents plus
    /// exponents of unit remainders. Flat remainders have zero Taylor series.
    pub fn support(&self) -> Vec<Exponent> {
        let set: BTreeSet<Exponent> = self
            .terms
            .iter()
            .map(|t| t.exp.clone())
            .chain(
                self.remainders
                    .iter()
                    .filter(|r| r.is_unit)
                    .map(|r| r.exp.clone()),
            )
            .collect();
        set.into_iter().collect()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    /// Floating evaluation of the polynomial part.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.float.eval(x))
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> Result<BigRational> {
        self.check_dim(x.len())?;
        Ok(eval_terms_exact(&self.terms, x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        Ok(self.grad.iter().map(|g| g.eval(x)).collect())
    }

    pub fn gradient_exact(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        self.check_dim(x.len())?;
        Ok((0..self.n)
            .map(|i| eval_terms_exact(&derivative_terms(&self.terms, i), x))
            .collect())
    }

    /// Exact `∂f/∂x_i` of the polynomial part.
    pub fn derivative(&self, i: usize) -> Vec<Term> {
        derivative_terms(&self.terms, i)
    }

    /// `Σ |xᵢ ∂f/∂xᵢ(x)|`.
    pub fn euler_field_value(&self, x: &[f64]) -> Result<f64> {
        let g = self.gradient(x)?;
        let parts: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| (xi * gi).abs()).collect();
        Ok(pairwise_sum(&parts))
    }

    /// Sufficient certificate of non-negativity: every term is a positive
    /// multiple of an even monomial and no remainder is present.
    pub fn is_certified_nonnegative(&self) -> bool {
        self.remainders.is_empty()
            && self
                .terms
                .iter()
                .all(|t| t.coeff.is_positive() && t.exp.entries().iter().all(|a| a % 2 == 0))
    }
}

pub(crate) fn derivative_terms(terms: &[Term], i: usize) -> Vec<Term> {
    terms
        .iter()
        .filter(|t| t.exp.entries()[i] > 0)
        .map(|t| {
            let a = t.exp.entries()[i];
            let mut e = t.exp.entries().to_vec();
            e[i] -= 1;
            Term {
                coeff: &t.coeff * BigRational::from_integer(BigInt::from(a)),
                exp: Exponent(e),
            }
        })
        .collect()
}

pub(crate) fn eval_terms_exact(terms: &[Term], x: &[BigRational]) -> BigRational {
    terms.iter().fold(BigRational::zero(), |acc, t| {
        let m = t
            .exp
            .entries()
            .iter()
            .zip(x)
            .fold(BigRational::one(), |m, (&a, xi)| m * num_traits::pow(xi.clone(), a as usize));
        acc + &t.coeff * m
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sq() -> TaylorModel {
        TaylorModel::polynomial(2, [Term::int(1, vec![2, 0]), Term::int(1, vec![0, 2])]).unwrap()
    }

    fn xy2() -> TaylorModel {
        TaylorModel::polynomial(2, [Term::int(1, vec![2, 2])]).unwrap()
    }

    fn xy_quartic() -> TaylorModel {
        TaylorModel::polynomial(
            3,
            [
                Term::int(1, vec![4, 0, 0]),
                Term::int(1, vec![1, 1, 0]),
                Term::int(1, vec![0, 4, 0]),
                Term::int(1, vec![4, 0, 6]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(sq().eval(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(sq().eval(&[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(xy_quartic().eval(&[1.0, 1.0, 1.0]).unwrap(), 4.0);
        assert!(matches!(
            sq().eval(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(sq().gradient(&[1.0, 0.0]).unwrap(), vec![2.0, 0.0]);
        assert_eq!(sq().gradient(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        // finite-difference oracle for x²y² at (1,1)
        let f = xy2();
        let h = 1e-6;
        let fd: Vec<f64> = (0..2)
            .map(|i| {
                let mut p = [1.0, 1.0];
                let mut m = [1.0, 1.0];
                p[i] += h;
                m[i] -= h;
                (f.eval(&p).unwrap() - f.eval(&m).unwrap()) / (2.0 * h)
            })
            .collect();
        let g = f.gradient(&[1.0, 1.0]).unwrap();
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * a.abs());
        }
        assert_eq!(g, vec![2.0, 2.0]);
    }

    #[test]
    fn euler_field_examples() {
        assert_eq!(xy2().euler_field_value(&[1.0, 1.0]).unwrap(), 4.0);
        assert_eq!(sq().euler_field_value(&[1.0, 2.0]).unwrap(), 10.0);
        assert_eq!(xy_quartic().euler_field_value(&[0.0; 3]).unwrap(), 0.0);
    }

    #[test]
    fn support_examples() {
        let ex25 = TaylorModel::new(
            2,
            [Term::int(1, vec![2, 2])],
            [Remainder::flat(vec![2, 0], [1])],
        )
        .unwrap();
        assert_eq!(ex25.support(), vec![Exponent::new(vec![2, 2])]);
        assert_eq!(
            sq().support(),
            vec![Exponent::new(vec![0, 2]), Exponent::new(vec![2, 0])]
        );
        let unit = TaylorModel::new(2, [Term::int(1, vec![2, 2])], [Remainder::unit(vec![3, 1])])
            .unwrap();
        assert_eq!(
            unit.support(),
            vec![Exponent::new(vec![2, 2]), Exponent::new(vec![3, 1])]
        );
    }

    #[test]
    fn like_terms_collect_and_cancel() {
        let m = TaylorModel::polynomial(
            2,
            [
                Term::int(2, vec![1, 1]),
                Term::int(-2, vec![1, 1]),
                Term::int(3, vec![2, 0]),
                Term::int(1, vec![2, 0]),
            ],
        )
        .unwrap();
        assert_eq!(m.terms().len(), 1);
        assert_eq!(m.terms()[0].coeff, BigRational::from_integer(4.into()));
    }

    #[test]
    fn remainder_validation() {
        let bad = Remainder {
            exp: Exponent::new(vec![1, 0]),
            flat_vars: BTreeSet::new(),
            is_unit: false,
        };
        assert!(matches!(
            TaylorModel::new(2, [Term::int(1, vec![2, 2])], [bad]),
            Err(Error::InvalidRemainder(_))
        ));
        let mixed = Remainder {
            exp: Exponent::new(vec![1, 0]),
            flat_vars: [1].into_iter().collect(),
            is_unit: true,
        };
        assert!(TaylorModel::new(2, [], [mixed]).is_err());
    }

    #[test]
    fn origin_critical_flag() {
        assert!(sq().is_origin_critical());
        let lin = TaylorModel::polynomial(2, [Term::int(1, vec![1, 0]), Term::int(1, vec![0, 2])])
            .unwrap();
        assert!(!lin.is_origin_critical());
    }

    #[test]
    fn exact_gradient_matches_symbolic_derivative() {
        let f = xy_quartic();
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let x = vec![q(1, 2), q(-3, 4), q(2, 5)];
        let g = f.gradient_exact(&x).unwrap();
        // ∂₁ = 4x₁³ + x₂ + 4x₁³x₃⁶
        let x1 = &x[0];
        let x3_6 = num_traits::pow(x[2].clone(), 6);
        let four = q(4, 1);
        let d1 = &four * num_traits::pow(x1.clone(), 3) + &x[1]
            + &four * num_traits::pow(x1.clone(), 3) * x3_6;
        assert_eq!(g[0], d1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn gradient_matches_central_differences(
            x in proptest::collection::vec(-1.0f64..1.0, 3)
        ) {
            let f = xy_quartic();
            let g = f.gradient(&x).unwrap();
            let scale = g.iter().map(|v| v.abs()).fold(1.0, f64::max);
            let h = 1e-6;
            for i in 0..3 {
                let mut p = x.clone();
                let mut m = x.clone();
                p[i] += h;
                m[i] -= h;
                let fd = (f.eval(&p).unwrap() - f.eval(&m).unwrap()) / (2.0 * h);
                prop_assert!((fd - g[i]).abs() <= 1e-5 * scale);
            }
        }
    }
}
