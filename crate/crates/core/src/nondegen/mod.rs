//! Kouchnirenko non-degeneracy: no compact face polynomial has a critical
//! point on the real torus `(ℝ∖0)ⁿ`.
//!
//! Write `f_γ = x^m · h` with `m` the common monomial of the face. Because
//! `h` is quasi-homogeneous of positive weighted degree, `∇f_γ` vanishes at a
//! torus point exactly when `∇h` does, and only the variables in which `h`
//! actually varies matter. Faces with one such variable are monomials; two
//! variables are decided exactly after scaling the second one to `±1`; more
//! are searched numerically.

pub mod univariate;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::newton::{FaceData, NewtonPolyhedron};
use crate::poly::{Exponent, TaylorModel, Term};
use univariate::{count_real_roots, some_real_root, UPoly};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_STARTS: usize = 64;

/// Restriction of the polynomial part to the exponents on a compact face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacePolynomial {
    pub face: FaceData,
    pub terms: Vec<Term>,
    /// Unit-remainder exponents on the face; their coefficients are unknown.
    pub unknown: Vec<Exponent>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    NondegenerateExact,
    NondegenerateNumeric,
    Degenerate,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyVerdict {
    pub status: Status,
    pub witness: Option<Vec<f64>>,
    /// Smallest scale-free residual `Σ(xᵢ∂ᵢh)² / (Σ|c x^α|)²` found.
    pub residual: Option<f64>,
    pub method: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceVerdict {
    pub face: FaceData,
    pub verdict: DegeneracyVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelVerdict {
    pub faces: Vec<FaceVerdict>,
    pub nondegenerate: bool,
    /// True when every face was decided exactly.
    pub certified: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub tol: f64,
    pub starts: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol: DEFAULT_TOL,
            starts: DEFAULT_STARTS,
            seed: 0,
        }
    }
}

pub fn face_polynomial(model: &TaylorModel, face: &FaceData) -> Result<FacePolynomial> {
    if !face.compact {
        return Err(Error::NotCompact(
            face.normal.iter().map(|&x| x as i64).collect(),
        ));
    }
    let on_face = |e: &Exponent| -> Result<bool> { Ok(e.dot(&face.normal)? == face.offset) };
    let mut terms = Vec::new();
    for t in model.terms() {
        if on_face(&t.exp)? {
            terms.push(t.clone());
        }
    }
    let mut unknown = Vec::new();
    for r in model.remainders().iter().filter(|r| r.is_unit) {
        if on_face(&r.exp)? {
            unknown.push(r.exp.clone());
        }
    }
    Ok(FacePolynomial {
        face: face.clone(),
        terms,
        unknown,
    })
}

/// `h = f_γ / x^m` restricted to its varying variables, with coefficients
/// scaled to `max |c| = 1`.
struct Reduced {
    n: usize,
    vars: Vec<usize>,
    terms: Vec<(f64, Vec<i32>)>,
    exact: Vec<(BigRational, Vec<u32>)>,
}

fn reduce(fp: &FacePolynomial) -> Reduced {
    let n = fp.face.normal.len();
    let m: Vec<u32> = (0..n)
        .map(|i| {
            fp.terms
                .iter()
                .map(|t| t.exp.entries()[i])
                .min()
                .unwrap_or(0)
        })
        .collect();
    let vars: Vec<usize> = (0..n)
        .filter(|&i| {
            fp.terms
                .iter()
                .any(|t| t.exp.entries()[i] != m[i])
        })
        .collect();
    let cmax = fp
        .terms
        .iter()
        .map(|t| t.coeff.abs())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    let exact: Vec<(BigRational, Vec<u32>)> = fp
        .terms
        .iter()
        .map(|t| {
            (
                &t.coeff / &cmax,
                vars.iter().map(|&i| t.exp.entries()[i] - m[i]).collect(),
            )
        })
        .collect();
    let terms = exact
        .iter()
        .map(|(c, e)| {
            (
                c.to_f64().unwrap_or(f64::NAN),
                e.iter().map(|&x| x as i32).collect(),
            )
        })
        .collect();
    Reduced {
        n,
        vars,
        terms,
        exact,
    }
}

impl Reduced {
    /// Residual vector `xᵢ∂ᵢh / Σ|c x^α|` at `x = s·exp(u)`, with Jacobian in `u`.
    fn residual(&self, u: &[f64], s: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let k = self.vars.len();
        let logs: Vec<f64> = self
            .terms
            .iter()
            .map(|(_, e)| e.iter().zip(u).map(|(&a, &ui)| a as f64 * ui).sum())
            .collect();
        let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut num = DVector::<f64>::zeros(k);
        let mut dnum = DMatrix::<f64>::zeros(k, k);
        let mut den = 0.0;
        let mut dden = DVector::<f64>::zeros(k);
        for ((c, e), lg) in self.terms.iter().zip(&logs) {
            let w = (lg - shift).exp();
            let sign: f64 = e
                .iter()
                .zip(s)
                .map(|(&a, &si)| if a % 2 == 1 { si } else { 1.0 })
                .product();
            let t = c * sign * w;
            for i in 0..k {
                num[i] += t * e[i] as f64;
                for j in 0..k {
                    dnum[(i, j)] += t * (e[i] * e[j]) as f64;
                }
                dden[i] += c.abs() * w * e[i] as f64;
            }
            den += c.abs() * w;
        }
        let r = &num / den;
        let mut jac = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                jac[(i, j)] = dnum[(i, j)] / den - num[i] * dden[j] / (den * den);
            }
        }
        (r, jac)
    }

    fn full_point(&self, x: &[f64]) -> Vec<f64> {
        let mut p = vec![1.0; self.n];
        for (&i, &xi) in self.vars.iter().zip(x) {
            p[i] = xi;
        }
        p
    }

    fn residual_at(&self, x: &[f64]) -> f64 {
        let u: Vec<f64> = x.iter().map(|v| v.abs().ln()).collect();
        let s: Vec<f64> = x.iter().map(|v| v.signum()).collect();
        self.residual(&u, &s).0.norm_squared()
    }
}

const U_MIN: f64 = -15.0;

fn project(u: &mut [f64], weights: &[f64]) {
    let t = u
        .iter()
        .zip(weights)
        .map(|(ui, w)| ui / w)
        .fold(f64::NEG_INFINITY, f64::max);
    for (ui, w) in u.iter_mut().zip(weights) {
        *ui = (*ui - t * w).max(U_MIN);
    }
}

/// Levenberg–Marquardt on the residual vector, on the slice `max|xᵢ| = 1`.
fn minimize(red: &Reduced, mut u: Vec<f64>, s: &[f64], weights: &[f64], tol: f64) -> (f64, Vec<f64>) {
    let k = u.len();
    project(&mut u, weights);
    let (mut r, mut jac) = red.residual(&u, s);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..200 {
        if cost <= tol * 1e-3 {
            break;
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &r;
        let mut a = jtj.clone();
        for i in 0..k {
            a[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
        }
        let Some(step) = a.lu().solve(&(-g)) else {
            lambda *= 10.0;
            continue;
        };
        let mut trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        project(&mut trial, weights);
        let (tr, tj) = red.residual(&trial, s);
        let tc = tr.norm_squared();
        if tc < cost {
            let moved = step.norm();
            u = trial;
            r = tr;
            jac = tj;
            cost = tc;
            lambda = (lambda / 3.0).max(1e-12);
            if moved < 1e-14 {
                break;
            }
        } else {
            lambda *= 4.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let x: Vec<f64> = u.iter().zip(s).map(|(ui, si)| si * ui.exp()).collect();
    (cost, x)
}

fn numeric_check(red: &Reduced, fp: &FacePolynomial, opts: &CheckOptions) -> DegeneracyVerdict {
    let k = red.vars.len();
    let weights: Vec<f64> = red
        .vars
        .iter()
        .map(|&i| fp.face.normal[i] as f64)
        .collect();
    let orthants = 1usize << k;
    let (best, x) = (0..orthants * opts.starts)
        .into_par_iter()
        .map(|idx| {
            let orthant = idx / opts.starts;
            let s: Vec<f64> = (0..k)
                .map(|i| if orthant >> i & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(idx as u64);
            let u0: Vec<f64> = if idx % opts.starts == 0 {
                vec![0.0; k]
            } else {
                (0..k).map(|_| rng.gen_range(-4.0..0.0)).collect()
            };
            minimize(red, u0, &s, &weights, opts.tol)
        })
        .reduce(
            || (f64::INFINITY, Vec::new()),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    if best <= opts.tol {
        DegeneracyVerdict {
            status: Status::Degenerate,
            witness: Some(red.full_point(&x)),
            residual: Some(best),
            method: "multistart-lm",
        }
    } else {
        DegeneracyVerdict {
            status: Status::NondegenerateNumeric,
            witness: None,
            residual: Some(best),
            method: "multistart-lm",
        }
    }
}

/// Two varying variables `(x, y)`: set `y = ±1` and look for a common nonzero
/// real root of `h_x(·, ±1)` and `h_y(·, ±1)`.
fn exact_two_vars(red: &Reduced) -> DegeneracyVerdict {
    let deg = |f: &dyn Fn(&[u32]) -> u32| red.exact.iter().map(|(_, e)| f(e)).max().unwrap_or(0);
    let dx = deg(&|e| e[0]) as usize;
    for s in [1i64, -1] {
        let mut hx = vec![BigRational::zero(); dx + 1];
        let mut hy = vec![BigRational::zero(); dx + 1];
        for (c, e) in &red.exact {
            let sy = if e[1] % 2 == 1 { s } else { 1 };
            let c = c * BigRational::from_integer(BigInt::from(sy));
            if e[0] > 0 {
                hx[e[0] as usize - 1] += &c * BigRational::from_integer(BigInt::from(e[0]));
            }
            if e[1] > 0 {
                // ∂_y evaluated at y = s carries s^(e₁-1) = s^e₁ · s
                hy[e[0] as usize] +=
                    &c * BigRational::from_integer(BigInt::from(i64::from(e[1]) * s));
            }
        }
        let (hx, hy) = (UPoly::new(hx), UPoly::new(hy));
        let g = if hx.is_zero() {
            hy
        } else if hy.is_zero() {
            hx
        } else {
            hx.gcd(&hy)
        };
        if g.is_zero() {
            let w = red.full_point(&[1.0, s as f64]);
            return DegeneracyVerdict {
                status: Status::Degenerate,
                witness: Some(w),
                residual: Some(red.residual_at(&[1.0, s as f64])),
                method: "exact-sturm",
            };
        }
        let g = g.strip_x();
        if g.degree().unwrap_or(0) > 0 && count_real_roots(&g) > 0 {
            let root = some_real_root(&g, 60).expect("Sturm count is positive");
            let x0 = root.to_f64().unwrap_or(f64::NAN);
            let local = [x0, s as f64];
            return DegeneracyVerdict {
                status: Status::Degenerate,
                witness: Some(red.full_point(&local)),
                residual: Some(red.residual_at(&local)),
                method: "exact-sturm",
            };
        }
    }
    DegeneracyVerdict {
        status: Status::NondegenerateExact,
        witness: None,
        residual: None,
        method: "exact-sturm",
    }
}

pub fn check_face(fp: &FacePolynomial, opts: &CheckOptions) -> Result<DegeneracyVerdict> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidTolerance(opts.tol));
    }
    if opts.starts == 0 {
        return Err(Error::InvalidModel("starts must be at least 1".into()));
    }
    let points = fp.terms.len() + fp.unknown.iter().filter(|e| !fp.terms.iter().any(|t| &t.exp == *e)).count();
    if points <= 1 {
        return Ok(DegeneracyVerdict {
            status: Status::NondegenerateExact,
            witness: None,
            residual: None,
            method: "monomial",
        });
    }
    if !fp.unknown.is_empty() {
        return Ok(DegeneracyVerdict {
            status: Status::Inconclusive,
            witness: None,
            residual: None,
            method: "unknown-coefficient",
        });
    }
    let red = reduce(fp);
    Ok(match red.vars.len() {
        0 | 1 => DegeneracyVerdict {
            status: Status::NondegenerateExact,
            witness: None,
            residual: None,
            method: "monomial",
        },
        2 => exact_two_vars(&red),
        _ if independent_exponents(fp)? => DegeneracyVerdict {
            status: Status::NondegenerateExact,
            witness: None,
            residual: None,
            method: "independent-exponents",
        },
        _ => numeric_check(&red, fp, opts),
    })
}

/// `xᵢ∂ᵢf_γ = Σ αᵢ c_α x^α`, so linearly independent exponents force every
/// `c_α x^α` to vanish at a critical point, which cannot happen on the torus.
fn independent_exponents(fp: &FacePolynomial) -> Result<bool> {
    let v: Vec<Vec<i128>> = fp.terms.iter().map(|t| t.exp.to_i128()).collect();
    Ok(crate::lattice::rank(&v)? == v.len())
}

pub fn check_model(
    model: &TaylorModel,
    poly: &NewtonPolyhedron,
    opts: &CheckOptions,
) -> Result<ModelVerdict> {
    let support = model.support();
    let faces = poly.compact_faces(&support)?;
    let verdicts: Vec<FaceVerdict> = faces
        .into_par_iter()
        .map(|face| {
            let fp = face_polynomial(model, &face)?;
            let verdict = check_face(&fp, opts)?;
            Ok(FaceVerdict { face, verdict })
        })
        .collect::<Result<_>>()?;
    let nondegenerate = verdicts.iter().all(|v| {
        matches!(
            v.verdict.status,
            Status::NondegenerateExact | Status::NondegenerateNumeric
        )
    });
    let certified = verdicts
        .iter()
        .all(|v| v.verdict.status == Status::NondegenerateExact);
    Ok(ModelVerdict {
        faces: verdicts,
        nondegenerate,
        certified,
    })
}
