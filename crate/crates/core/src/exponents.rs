//! Hypotheses of the exponent theorems and the exponents θ(f), α(f), ℒ(f).

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_rational::Rational64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::newton::{Facet, NewtonPolyhedron};
use crate::poly::{Exponent, TaylorModel};

pub const MAX_RANKING_SIZE: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnDetail {
    pub remainder: usize,
    pub satisfied: bool,
    /// A facet the remainder exponent violates, if any.
    pub violated: Option<Facet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnReport {
    pub satisfied: bool,
    pub details: Vec<KnDetail>,
}

/// Kamimoto–Nose condition: the germ lies in the ideal generated by monomials
/// with exponents in `Γ₊`.
///
/// A flat factor in the variables `F` can absorb any power of those
/// variables, so only facets whose normals vanish on `F` constrain `β`.
pub fn check_kn(model: &TaylorModel, poly: &NewtonPolyhedron) -> Result<KnReport> {
    let mut details = Vec::new();
    for (i, r) in model.remainders().iter().enumerate() {
        let mut violated = None;
        for f in poly.facets() {
            let relevant = r.is_unit || r.flat_vars.iter().all(|&v| f.normal[v] == 0);
            if relevant && r.exp.dot(&f.normal)? < f.offset {
                violated = Some(f.clone());
                break;
            }
        }
        details.push(KnDetail {
            remainder: i,
            satisfied: violated.is_none(),
            violated,
        });
    }
    Ok(KnReport {
        satisfied: details.iter().all(|d| d.satisfied),
        details,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvenienceReport {
    pub convenient: bool,
    pub partially_convenient: bool,
    /// Zero-based axes met by a vertex.
    pub j: BTreeSet<usize>,
    pub nu: BTreeMap<usize, u32>,
    pub nu_max: Option<u32>,
}

pub fn convenience(poly: &NewtonPolyhedron) -> ConvenienceReport {
    let mut nu = BTreeMap::new();
    for v in poly.vertices() {
        if let Some(i) = v.axis_index() {
            nu.insert(i, v.entries()[i]);
        }
    }
    let j: BTreeSet<usize> = nu.keys().copied().collect();
    let partially_convenient =
        !j.is_empty() && poly.vertices().iter().all(|v| v.support().is_subset(&j));
    ConvenienceReport {
        convenient: j.len() == poly.dim(),
        partially_convenient,
        nu_max: nu.values().copied().max(),
        j,
        nu,
    }
}

/// Hypotheses shared by the exponent theorems.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Hypotheses {
    pub kn: bool,
    pub nondegenerate: bool,
    pub nonnegative: bool,
}

/// An exponent that is either given by a theorem or unavailable, in which
/// case the toric fallback bound is attached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gated {
    pub value: Option<Rational64>,
    pub reason: Option<String>,
    pub fallback: Option<Rational64>,
}

impl Gated {
    fn ok(v: Rational64) -> Self {
        Gated {
            value: Some(v),
            reason: None,
            fallback: None,
        }
    }

    fn na(reasons: Vec<&str>, fallback: Option<Rational64>) -> Self {
        Gated {
            value: None,
            reason: Some(reasons.join("; ")),
            fallback,
        }
    }
}

fn missing(hyp: &Hypotheses, need_nonneg: bool) -> Vec<&'static str> {
    let mut out = Vec::new();
    if !hyp.kn {
        out.push("KN-condition fails");
    }
    if !hyp.nondegenerate {
        out.push("not non-degenerate");
    }
    if need_nonneg && !hyp.nonnegative {
        out.push("non-negativity not declared");
    }
    out
}

/// `θ(f) = 1 − 1/ν(f)`; fallback `1 − 1/N`.
pub fn theta(conv: &ConvenienceReport, hyp: &Hypotheses, fan_n: Option<i128>) -> Gated {
    let mut why = missing(hyp, false);
    if !conv.partially_convenient {
        why.push("not partially convenient");
    }
    let fallback = fan_n
        .filter(|&n| n > 0)
        .map(|n| Rational64::from_integer(1) - Rational64::new(1, n as i64));
    match conv.nu_max {
        Some(nu) if why.is_empty() => {
            Gated::ok(Rational64::from_integer(1) - Rational64::new(1, i64::from(nu)))
        }
        _ => Gated::na(why, fallback),
    }
}

/// `d(f) = max d(α*)` over the hat vertices.
pub fn d_of_f(poly: &NewtonPolyhedron, hat: &NewtonPolyhedron) -> Result<Rational64> {
    let mut best = Rational64::from_integer(0);
    for a in hat.vertices() {
        let d = poly.diagonal_exponent(a)?.ok_or_else(|| {
            Error::Invariant(format!("diagonal of hat vertex {a} never enters the polyhedron"))
        })?;
        best = best.max(d);
    }
    Ok(best)
}

/// `α(f) = d(f)`; fallback `L`.
pub fn alpha_exponent(
    poly: &NewtonPolyhedron,
    hat: &NewtonPolyhedron,
    hyp: &Hypotheses,
    fan_l: Option<i128>,
) -> Result<Gated> {
    let why = missing(hyp, true);
    let fallback = fan_l.map(|l| Rational64::from_integer(l as i64));
    if !why.is_empty() {
        return Ok(Gated::na(why, fallback));
    }
    Ok(Gated::ok(d_of_f(poly, hat)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransversalFamily {
    /// `I(f)`, zero-based and sorted.
    pub i_f: Vec<usize>,
    /// Sets meeting each hat-vertex support exactly once.
    pub lambda_exact: Vec<Vec<usize>>,
    /// Minimal sets meeting each hat-vertex support.
    pub lambda_hitting: Vec<Vec<usize>>,
    pub agree: bool,
}

/// Whether `⋃_{J ∈ a} T_J ⊆ ⋃_{J ∈ b} T_J`, using `T_J ⊆ T_J' ⟺ J' ⊆ J`.
fn union_included(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    a.iter()
        .all(|j| b.iter().any(|jp| jp.iter().all(|x| j.contains(x))))
}

pub fn transversals(hat: &NewtonPolyhedron) -> TransversalFamily {
    let supports: Vec<BTreeSet<usize>> = hat.vertices().iter().map(Exponent::support).collect();
    let i_f: Vec<usize> = supports
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut lambda_exact = Vec::new();
    let mut hitting: Vec<Vec<usize>> = Vec::new();
    for size in 1..=i_f.len() {
        for j in i_f.iter().copied().combinations(size) {
            let counts: Vec<usize> = supports
                .iter()
                .map(|s| j.iter().filter(|x| s.contains(x)).count())
                .collect();
            if counts.iter().all(|&c| c == 1) {
                lambda_exact.push(j.clone());
            }
            if counts.iter().all(|&c| c >= 1)
                && !hitting.iter().any(|h| h.iter().all(|x| j.contains(x)))
            {
                hitting.push(j);
            }
        }
    }
    let agree = union_included(&lambda_exact, &hitting) && union_included(&hitting, &lambda_exact);
    TransversalFamily {
        i_f,
        lambda_exact,
        lambda_hitting: hitting,
        agree,
    }
}

/// Whether a generic point with `xᵢ = 0` exactly for `i ∈ zeros` kills every
/// hat-vertex monomial.
pub fn monomial_zero_pattern(hat_vertices: &[Exponent], zeros: &BTreeSet<usize>) -> bool {
    hat_vertices
        .iter()
        .all(|a| a.support().iter().any(|i| zeros.contains(i)))
}

/// Whether such a point lies in `⋃_{J ∈ family} T_J`.
pub fn union_contains(family: &[Vec<usize>], zeros: &BTreeSet<usize>) -> bool {
    family.iter().any(|j| j.iter().all(|i| zeros.contains(i)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingData {
    /// Elements of `I(f)` listed from rank 1 to rank s.
    pub order: Vec<usize>,
    pub i_rho: usize,
    pub v_rho: Vec<Exponent>,
    pub l_rho: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistReport {
    pub value: Gated,
    pub per_ranking: Vec<RankingData>,
    /// The hitting-set family replaced an empty exact family.
    pub extended: bool,
}

/// Per-ranking data `(i_ρ, V(ρ), ℒ_ρ)` for a family `Λ`.
pub fn ranking_data(
    poly: &NewtonPolyhedron,
    i_f: &[usize],
    lambda: &[Vec<usize>],
) -> Result<Vec<RankingData>> {
    if i_f.len() > MAX_RANKING_SIZE {
        return Err(Error::RankingCap {
            size: i_f.len(),
            cap: MAX_RANKING_SIZE,
        });
    }
    if lambda.is_empty() {
        return Err(Error::Invariant("empty transversal family".into()));
    }
    let in_if: BTreeSet<usize> = i_f.iter().copied().collect();
    let perms: Vec<Vec<usize>> = i_f.iter().copied().permutations(i_f.len()).collect();
    perms
        .into_par_iter()
        .map(|order| {
            let rank = |i: usize| order.iter().position(|&x| x == i).expect("i in I(f)");
            let i_rho = lambda
                .iter()
                .map(|j| *j.iter().max_by_key(|&&i| rank(i)).expect("nonempty J"))
                .min_by_key(|&i| rank(i))
                .expect("nonempty family");
            let v_rho: Vec<Exponent> = poly
                .vertices()
                .iter()
                .filter(|a| {
                    let s = a.support();
                    s.is_subset(&in_if) && s.iter().all(|&i| rank(i) >= rank(i_rho))
                })
                .cloned()
                .collect();
            let l_rho = v_rho
                .iter()
                .map(Exponent::degree)
                .min()
                .ok_or_else(|| Error::EmptyRankingSet(order.iter().map(|i| i + 1).collect()))?;
            Ok(RankingData {
                order,
                i_rho,
                v_rho,
                l_rho,
            })
        })
        .collect()
}

/// `ℒ(f) = max_ρ ℒ_ρ(f)`; fallback `N`.
pub fn dist_exponent(
    poly: &NewtonPolyhedron,
    family: &TransversalFamily,
    hyp: &Hypotheses,
    fan_n: Option<i128>,
) -> Result<DistReport> {
    let why = missing(hyp, true);
    let fallback = fan_n.map(|n| Rational64::from_integer(n as i64));
    if !why.is_empty() {
        return Ok(DistReport {
            value: Gated::na(why, fallback),
            per_ranking: Vec::new(),
            extended: false,
        });
    }
    let extended = family.lambda_exact.is_empty();
    let lambda = if extended {
        &family.lambda_hitting
    } else {
        &family.lambda_exact
    };
    let per_ranking = ranking_data(poly, &family.i_f, lambda)?;
    let best = per_ranking.iter().map(|r| r.l_rho).max().unwrap_or(0);
    Ok(DistReport {
        value: Gated::ok(Rational64::from_integer(best as i64)),
        per_ranking,
        extended,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combined {
    pub theta: Rational64,
    pub alpha: Rational64,
    pub loj_dist: Rational64,
    /// The general-path values coincide with these.
    pub consistent: bool,
}

/// `(1 − 1/ν, ν, ν)` when all gates pass and `I(f) = J`.
pub fn combined_case(
    conv: &ConvenienceReport,
    family: &TransversalFamily,
    hyp: &Hypotheses,
    general: (&Gated, &Gated, &Gated),
) -> Option<Combined> {
    if !(hyp.kn && hyp.nondegenerate && hyp.nonnegative && conv.partially_convenient) {
        return None;
    }
    let j: Vec<usize> = conv.j.iter().copied().collect();
    if family.i_f != j {
        return None;
    }
    let nu = Rational64::from_integer(i64::from(conv.nu_max?));
    let theta = Rational64::from_integer(1) - nu.recip();
    let consistent = general.0.value == Some(theta)
        && general.1.value == Some(nu)
        && general.2.value == Some(nu);
    Some(Combined {
        theta,
        alpha: nu,
        loj_dist: nu,
        consistent,
    })
}

/// Every vertex is `νᵢeᵢ` with `νᵢ` even: the vertex shape forced by convexity.
pub fn convex_shape(poly: &NewtonPolyhedron) -> bool {
    poly.vertices()
        .iter()
        .all(|v| v.axis_index().is_some() && v.entries().iter().all(|a| a % 2 == 0))
}
