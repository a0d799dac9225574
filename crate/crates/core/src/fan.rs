//! Normal fan of `Γ₊` and its unimodular simplicial refinement.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    adjugate, checked_add, checked_mul, checked_sub, columns, det, dot, mat_vec,
    orthogonal_complement, primitive, rank,
};
use crate::newton::NewtonPolyhedron;
use crate::poly::Exponent;

pub const MAX_UNIMODULAR_DIM: usize = 4;

/// A maximal cone: indices into the fan's ray table plus the vertex of `Γ₊`
/// whose normal cone contains it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cone {
    pub rays: Vec<usize>,
    pub vertex: Exponent,
}

/// A fan stored by its maximal cones over a deduplicated ray table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fan {
    pub n: usize,
    pub rays: Vec<Vec<i128>>,
    pub cones: Vec<Cone>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeExponents {
    pub l_values: Vec<i128>,
    pub l_sigma: i128,
    pub n_sigma: i128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FanExponents {
    pub per_cone: Vec<ConeExponents>,
    #[serde(rename = "L")]
    pub l: i128,
    #[serde(rename = "N")]
    pub n: i128,
}

impl Fan {
    pub fn generators(&self, cone: &Cone) -> Vec<Vec<i128>> {
        cone.rays.iter().map(|&i| self.rays[i].clone()).collect()
    }

    pub fn is_simplicial(&self) -> Result<bool> {
        for c in &self.cones {
            if rank(&self.generators(c))? != c.rays.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `|det|` of a full-dimensional simplicial cone.
    pub fn abs_det(&self, cone: &Cone) -> Result<i128> {
        if cone.rays.len() != self.n {
            return Err(Error::NotFullDimensional);
        }
        Ok(det(&columns(&self.generators(cone)))?.abs())
    }

    /// Indices of the maximal cones containing `x`.
    pub fn locate(&self, x: &[i128]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, c) in self.cones.iter().enumerate() {
            if cone_contains(&self.generators(c), x, self.n)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    fn ray_index(&mut self, r: Vec<i128>) -> usize {
        if let Some(i) = self.rays.iter().position(|x| *x == r) {
            i
        } else {
            self.rays.push(r);
            self.rays.len() - 1
        }
    }

    /// Every generator of every cone lies in the normal cone of the attached
    /// vertex, i.e. that vertex minimizes the generator over `Γ₊`.
    pub fn refines_normal_fan(&self, poly: &NewtonPolyhedron) -> Result<bool> {
        for c in &self.cones {
            for &ri in &c.rays {
                let r = &self.rays[ri];
                if c.vertex.dot(r)? != poly.support_value(r)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Whether `x` lies in the cone generated by `gens` (any dimension).
pub fn cone_contains(gens: &[Vec<i128>], x: &[i128], n: usize) -> Result<bool> {
    let d = rank(gens)?;
    let mut with_x = gens.to_vec();
    with_x.push(x.to_vec());
    if rank(&with_x)? > d {
        return Ok(false);
    }
    for h in facet_functionals(gens, n)? {
        if dot(&h, x)? < 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Standard basis vectors completing `span(gens)` to `ℝⁿ`.
fn complement_basis(gens: &[Vec<i128>], n: usize) -> Result<Vec<Vec<i128>>> {
    let mut acc: Vec<Vec<i128>> = gens.to_vec();
    let mut r = rank(&acc)?;
    let mut out = Vec::new();
    for j in 0..n {
        if r == n {
            break;
        }
        let mut e = vec![0i128; n];
        e[j] = 1;
        acc.push(e.clone());
        let r2 = rank(&acc)?;
        if r2 > r {
            r = r2;
            out.push(e);
        } else {
            acc.pop();
        }
    }
    Ok(out)
}

/// Inward facet functionals of `cone(gens)` within its span.
fn facet_functionals(gens: &[Vec<i128>], n: usize) -> Result<Vec<Vec<i128>>> {
    Ok(cone_facets_impl(gens, n)?.into_iter().map(|(h, _)| h).collect())
}

fn cone_facets_impl(gens: &[Vec<i128>], n: usize) -> Result<Vec<(Vec<i128>, BTreeSet<usize>)>> {
    let d = rank(gens)?;
    if d == 0 {
        return Ok(Vec::new());
    }
    let comp = complement_basis(gens, n)?;
    let mut seen: BTreeMap<BTreeSet<usize>, Vec<i128>> = BTreeMap::new();
    for subset in (0..gens.len()).combinations(d - 1) {
        let mut vs: Vec<Vec<i128>> = subset.iter().map(|&i| gens[i].clone()).collect();
        vs.extend(comp.iter().cloned());
        let h = if n == 1 {
            vec![1]
        } else {
            orthogonal_complement(&vs, n)?
        };
        if h.iter().all(|&x| x == 0) {
            continue;
        }
        let vals: Vec<i128> = gens.iter().map(|g| dot(&h, g)).collect::<Result<_>>()?;
        let h = if vals.iter().all(|&v| v >= 0) {
            h
        } else if vals.iter().all(|&v| v <= 0) {
            h.into_iter().map(|x| -x).collect()
        } else {
            continue;
        };
        let zero: BTreeSet<usize> = (0..gens.len()).filter(|&i| vals[i] == 0).collect();
        seen.entry(zero).or_insert_with(|| primitive(h));
    }
    Ok(seen.into_iter().map(|(z, h)| (h, z)).collect())
}

/// Ray subsets spanning the facets of `cone(gens)`.
pub fn cone_facets(gens: &[Vec<i128>], n: usize) -> Result<Vec<BTreeSet<usize>>> {
    Ok(cone_facets_impl(gens, n)?.into_iter().map(|(_, z)| z).collect())
}

/// Normal fan `Σ₀`: one maximal cone per vertex, generated by the normals of
/// the facets through it.
pub fn normal_fan(poly: &NewtonPolyhedron) -> Result<Fan> {
    let mut rays: Vec<Vec<i128>> = poly.facets().iter().map(|f| f.normal.clone()).collect();
    rays.sort();
    rays.dedup();
    let mut cones = Vec::new();
    for v in poly.vertices() {
        let mut idx: Vec<usize> = poly
            .tight_facets(v)?
            .into_iter()
            .map(|fi| {
                let nrm = &poly.facets()[fi].normal;
                rays.iter().position(|r| r == nrm).expect("ray table holds every normal")
            })
            .collect();
        idx.sort();
        idx.dedup();
        cones.push(Cone {
            rays: idx,
            vertex: v.clone(),
        });
    }
    Ok(Fan {
        n: poly.dim(),
        rays,
        cones,
    })
}

fn pulling(fan: &Fan, rays: &[usize]) -> Result<Vec<Vec<usize>>> {
    let gens: Vec<Vec<i128>> = rays.iter().map(|&i| fan.rays[i].clone()).collect();
    let d = rank(&gens)?;
    if rays.len() == d {
        return Ok(vec![rays.to_vec()]);
    }
    let apex_pos = (0..rays.len())
        .min_by(|&a, &b| fan.rays[rays[a]].cmp(&fan.rays[rays[b]]))
        .expect("nonempty cone");
    let apex = rays[apex_pos];
    let mut out = Vec::new();
    for facet in cone_facets(&gens, fan.n)? {
        if facet.contains(&apex_pos) {
            continue;
        }
        let sub: Vec<usize> = facet.iter().map(|&i| rays[i]).collect();
        for mut simplex in pulling(fan, &sub)? {
            simplex.push(apex);
            simplex.sort();
            out.push(simplex);
        }
    }
    Ok(out)
}

/// Pulling triangulation of every maximal cone under one global
/// lexicographic ray order, so shared faces are cut the same way.
pub fn simplicialize(fan: &Fan) -> Result<Fan> {
    let mut cones = Vec::new();
    for c in &fan.cones {
        for rays in pulling(fan, &c.rays)? {
            cones.push(Cone {
                rays,
                vertex: c.vertex.clone(),
            });
        }
    }
    Ok(Fan {
        n: fan.n,
        rays: fan.rays.clone(),
        cones,
    })
}

fn det2(u: &[i128], w: &[i128]) -> Result<i128> {
    checked_sub(checked_mul(u[0], w[1])?, checked_mul(u[1], w[0])?)
}

/// Hirzebruch–Jung subdivision of a 2D cone; returns the rays from `u` to `w`.
pub fn hirzebruch_jung(u: &[i128], w: &[i128]) -> Result<Vec<Vec<i128>>> {
    let (u, w, flipped) = if det2(u, w)? < 0 { (w, u, true) } else { (u, w, false) };
    let d = det2(u, w)?;
    if d == 0 {
        return Err(Error::NotFullDimensional);
    }
    let mut chain = vec![u.to_vec()];
    if d > 1 {
        // v with det(u, v) = 1
        let g = u[0].extended_gcd(&u[1]);
        if g.gcd != 1 {
            return Err(Error::Invariant(format!("ray {u:?} is not primitive")));
        }
        let mut v = vec![-g.y, g.x];
        // w = x u + d v, shift v by t u so that w = d v - k u with 0 ≤ k < d
        let x = checked_sub(checked_mul(w[0], v[1])?, checked_mul(w[1], v[0])?)?;
        let k = (-x).rem_euclid(d);
        let t = (x + k) / d;
        v = vec![checked_add(v[0], t * u[0])?, checked_add(v[1], t * u[1])?];
        let mut fractions = Vec::new();
        let (mut a, mut b) = (d, k);
        loop {
            let q = Integer::div_ceil(&a, &b);
            fractions.push(q);
            let next = q * b - a;
            if next == 0 {
                break;
            }
            a = b;
            b = next;
        }
        chain.push(v);
        for q in fractions {
            let len = chain.len();
            let (prev, cur) = (&chain[len - 2], &chain[len - 1]);
            let nxt = vec![
                checked_sub(checked_mul(q, cur[0])?, prev[0])?,
                checked_sub(checked_mul(q, cur[1])?, prev[1])?,
            ];
            chain.push(nxt);
        }
        if chain.last().map(Vec::as_slice) != Some(w) {
            return Err(Error::Invariant(format!(
                "continued fraction chain of cone {u:?},{w:?} missed its end ray"
            )));
        }
    } else {
        chain.push(w.to_vec());
    }
    if flipped {
        chain.reverse();
    }
    Ok(chain)
}

/// Nonzero lattice point `Σ λᵢ aᵢ`, `0 ≤ λᵢ < 1`, of minimal coefficient sum.
fn parallelepiped_point(gens: &[Vec<i128>]) -> Result<Vec<i128>> {
    let m = columns(gens);
    let dt = det(&m)?;
    let big_d = dt.abs();
    let sign = dt.signum();
    let adj = adjugate(&m)?;
    let n = gens.len();
    let generators: Vec<Vec<i128>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| (sign * adj[i][j]).rem_euclid(big_d))
                .collect()
        })
        .collect();
    let mut seen: BTreeSet<Vec<i128>> = BTreeSet::new();
    let zero = vec![0i128; n];
    seen.insert(zero.clone());
    let mut frontier = vec![zero];
    while let Some(k) = frontier.pop() {
        for g in &generators {
            let nk: Vec<i128> = k.iter().zip(g).map(|(a, b)| (a + b) % big_d).collect();
            if seen.insert(nk.clone()) {
                frontier.push(nk);
            }
        }
    }
    let mut best: Option<(i128, Vec<i128>)> = None;
    for k in seen {
        if k.iter().all(|&x| x == 0) {
            continue;
        }
        let s: i128 = k.iter().sum();
        let p: Vec<i128> = mat_vec(&m, &k)?.into_iter().map(|x| x / big_d).collect();
        let better = match &best {
            None => true,
            Some((bs, bp)) => s < *bs || (s == *bs && p < *bp),
        };
        if better {
            best = Some((s, p));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::Invariant("unimodular cone has no parallelepiped point".into()))
}

/// Coordinates of `p` in the simplicial cone `gens`, scaled by `det`.
fn scaled_coords(gens: &[Vec<i128>], p: &[i128]) -> Result<(Vec<i128>, i128)> {
    let m = columns(gens);
    let dt = det(&m)?;
    let lam = mat_vec(&adjugate(&m)?, p)?;
    Ok(if dt < 0 {
        (lam.into_iter().map(|x| -x).collect(), -dt)
    } else {
        (lam, dt)
    })
}

/// Refines a simplicial fan until every maximal cone has `|det| = 1`.
pub fn unimodularize(fan: &Fan) -> Result<Fan> {
    if fan.n > MAX_UNIMODULAR_DIM {
        return Err(Error::DimensionCap {
            n: fan.n,
            cap: MAX_UNIMODULAR_DIM,
        });
    }
    if !fan.is_simplicial()? {
        return Err(Error::Invariant("unimodularize needs a simplicial fan".into()));
    }
    let mut out = fan.clone();
    if fan.n == 1 {
        return Ok(out);
    }
    if fan.n == 2 {
        let mut cones = Vec::new();
        for c in &fan.cones {
            let (u, w) = (&fan.rays[c.rays[0]], &fan.rays[c.rays[1]]);
            let chain = hirzebruch_jung(u, w)?;
            let idx: Vec<usize> = chain.into_iter().map(|r| out.ray_index(r)).collect();
            for pair in idx.windows(2) {
                let mut rays = pair.to_vec();
                rays.sort();
                cones.push(Cone {
                    rays,
                    vertex: c.vertex.clone(),
                });
            }
        }
        out.cones = cones;
        return Ok(out);
    }
    loop {
        let mut worst: Option<(i128, usize)> = None;
        for (i, c) in out.cones.iter().enumerate() {
            let d = out.abs_det(c)?;
            if d > 1 && worst.is_none_or(|(wd, _)| d > wd) {
                worst = Some((d, i));
            }
        }
        let Some((_, ci)) = worst else {
            return Ok(out);
        };
        let p = parallelepiped_point(&out.generators(&out.cones[ci]))?;
        out = stellar(&out, p)?;
    }
}

/// Stellar subdivision of every cone containing `p`.
pub fn stellar(fan: &Fan, p: Vec<i128>) -> Result<Fan> {
    let mut out = Fan {
        n: fan.n,
        rays: fan.rays.clone(),
        cones: Vec::new(),
    };
    let pi = out.ray_index(p.clone());
    for c in &fan.cones {
        let gens = fan.generators(c);
        let (lam, _) = scaled_coords(&gens, &p)?;
        if lam.iter().any(|&x| x < 0) {
            out.cones.push(c.clone());
            continue;
        }
        for (i, &l) in lam.iter().enumerate() {
            if l == 0 {
                continue;
            }
            let mut rays = c.rays.clone();
            rays[i] = pi;
            rays.sort();
            out.cones.push(Cone {
                rays,
                vertex: c.vertex.clone(),
            });
        }
    }
    Ok(out)
}

/// `l(aⁱ(σ))`, `l(σ)`, `N(σ)` per cone and the maxima `L`, `N`.
pub fn fan_exponents(fan: &Fan, poly: &NewtonPolyhedron) -> Result<FanExponents> {
    let mut per_cone = Vec::with_capacity(fan.cones.len());
    for (index, c) in fan.cones.iter().enumerate() {
        let d = fan.abs_det(c)?;
        if d != 1 {
            return Err(Error::NotUnimodular { index, det: d });
        }
        let l_values: Vec<i128> = c
            .rays
            .iter()
            .map(|&r| poly.support_value(&fan.rays[r]))
            .collect::<Result<_>>()?;
        let l_sigma = *l_values.iter().max().expect("full-dimensional cone");
        let n_sigma = l_values
            .iter()
            .try_fold(0i128, |acc, &x| checked_add(acc, x))?;
        per_cone.push(ConeExponents {
            l_values,
            l_sigma,
            n_sigma,
        });
    }
    if per_cone.is_empty() {
        return Err(Error::NotFullDimensional);
    }
    let l = per_cone.iter().map(|c| c.l_sigma).max().unwrap_or(0);
    let n = per_cone.iter().map(|c| c.n_sigma).max().unwrap_or(0);
    Ok(FanExponents { per_cone, l, n })
}

/// Monomial exponents `(⟨a¹, α⟩, …, ⟨aⁿ, α⟩)` of `x^α` in the chart of `σ`.
pub fn chart_pullback_exponents(generators: &[Vec<i128>], alpha: &Exponent) -> Result<Vec<i128>> {
    let n = alpha.dim();
    if generators.len() != n || rank(generators)? != n {
        return Err(Error::NotFullDimensional);
    }
    generators.iter().map(|a| alpha.dot(a)).collect()
}

/// `Σ₀ → Σ`: simplicialize then unimodularize.
pub fn resolve(poly: &NewtonPolyhedron) -> Result<(Fan, Fan)> {
    let sigma0 = normal_fan(poly)?;
    let sigma = unimodularize(&simplicialize(&sigma0)?)?;
    Ok((sigma0, sigma))
}
