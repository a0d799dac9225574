//! Dense univariate polynomials over ℚ with Sturm-sequence root counting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients from the constant term upwards, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(Vec<BigRational>);

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    fn scale(&self, s: &BigRational) -> UPoly {
        UPoly::new(self.0.iter().map(|c| c * s).collect())
    }

    fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().clone();
        self.scale(&(BigRational::one() / l))
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quo = vec![BigRational::zero(); r.len() - dd];
        let ld = d.lead().clone();
        for k in (0..quo.len()).rev() {
            let coef = &r[k + dd] / &ld;
            if !coef.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] -= &coef * dc;
                }
            }
            quo[k] = coef;
        }
        r.truncate(dd);
        (UPoly::new(quo), UPoly::new(r))
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Divides out the largest power of `x`.
    pub fn strip_x(&self) -> UPoly {
        let k = self.0.iter().take_while(|c| c.is_zero()).count();
        UPoly::new(self.0[k..].to_vec())
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree(&self) -> UPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn sturm_sequence(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let len = seq.len();
            let (_, r) = seq[len - 2].div_rem(&seq[len - 1]);
            seq.push(r.scale(&q(-1)));
        }
        seq.pop();
        seq
    }
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let nz: Vec<i8> = signs.filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

fn sgn(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn changes_at(seq: &[UPoly], x: &BigRational) -> usize {
    sign_changes(seq.iter().map(|p| sgn(&p.eval(x))))
}

fn changes_at_infinity(seq: &[UPoly], positive: bool) -> usize {
    sign_changes(seq.iter().map(|p| {
        let s = sgn(p.lead());
        let odd = p.degree().unwrap_or(0) % 2 == 1;
        if !positive && odd {
            -s
        } else {
            s
        }
    }))
}

/// Number of distinct real roots of a nonzero polynomial.
pub fn count_real_roots(p: &UPoly) -> usize {
    let seq = p.squarefree().sturm_sequence();
    changes_at_infinity(&seq, false) - changes_at_infinity(&seq, true)
}

/// Number of distinct roots in the half-open interval `(a, b]`.
pub fn count_roots_in(p: &UPoly, a: &BigRational, b: &BigRational) -> usize {
    let seq = p.squarefree().sturm_sequence();
    changes_at(&seq, a) - changes_at(&seq, b)
}

/// Cauchy bound: every real root lies in `(-B, B)`.
pub fn root_bound(p: &UPoly) -> BigRational {
    let l = p.lead().abs();
    let m = p.0[..p.0.len() - 1]
        .iter()
        .map(|c| c.abs() / &l)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    m + BigRational::one()
}

/// Some real root, bracketed to width below `2^-bits` by exact bisection.
pub fn some_real_root(p: &UPoly, bits: u32) -> Option<BigRational> {
    let sf = p.squarefree();
    let seq = sf.sturm_sequence();
    let b = root_bound(&sf);
    let mut lo = -b.clone();
    let mut hi = b;
    if changes_at(&seq, &lo) == changes_at(&seq, &hi) {
        return None;
    }
    let two = q(2);
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / &two;
        if sf.eval(&mid).is_zero() {
            return Some(mid);
        }
        if changes_at(&seq, &lo) > changes_at(&seq, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((lo + hi) / two)
}
