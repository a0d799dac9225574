//! Facets of `conv(points) + ℝ₊ⁿ` by the double-description method.
//!
//! The facets are the extreme rays `(a, l)` of the cone
//! `{(a, l) : a ≥ 0, ⟨a, v⟩ ≥ l for every point v}` other than `(0, -1)`.

use bitvec::prelude::*;

use crate::error::Result;
use crate::lattice::{checked_mul, checked_sub, primitive};

struct Ray {
    coords: Vec<i128>,
    zeros: BitVec,
}

fn eval_constraint(c: &[i128], r: &[i128]) -> Result<i128> {
    crate::lattice::dot(c, r)
}

/// Removes duplicates and points dominated componentwise by another point.
pub(crate) fn minimal_points(points: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let mut pts: Vec<Vec<i128>> = points.to_vec();
    pts.sort();
    pts.dedup();
    let dominated = |p: &Vec<i128>| {
        pts.iter()
            .any(|q| q != p && q.iter().zip(p).all(|(a, b)| a <= b))
    };
    pts.iter().filter(|p| !dominated(p)).cloned().collect()
}

/// Facet pairs `(a, l)` with `a` primitive and nonnegative, `l = min ⟨a, v⟩`.
pub(crate) fn facets(points: &[Vec<i128>], n: usize) -> Result<Vec<(Vec<i128>, i128)>> {
    let pts = minimal_points(points);
    let d = n + 1;
    // constraint rows over (a, l): a_j ≥ 0, then ⟨v, a⟩ - l ≥ 0
    let mut constraints: Vec<Vec<i128>> = (0..n)
        .map(|j| {
            let mut c = vec![0i128; d];
            c[j] = 1;
            c
        })
        .collect();
    for p in &pts {
        let mut c = p.clone();
        c.push(-1);
        constraints.push(c);
    }
    let total = constraints.len();

    // initial simplicial cone from the orthant constraints and the first point
    let v0 = &pts[0];
    let mut rays: Vec<Ray> = Vec::with_capacity(d);
    for k in 0..n {
        let mut coords = vec![0i128; d];
        coords[k] = 1;
        coords[n] = v0[k];
        rays.push(Ray {
            coords,
            zeros: BitVec::repeat(false, total),
        });
    }
    let mut apex = vec![0i128; d];
    apex[n] = -1;
    rays.push(Ray {
        coords: apex,
        zeros: BitVec::repeat(false, total),
    });
    for r in rays.iter_mut() {
        for i in 0..=n {
            if eval_constraint(&constraints[i], &r.coords)? == 0 {
                r.zeros.set(i, true);
            }
        }
    }

    for ci in n + 1..total {
        let c = &constraints[ci];
        let vals: Vec<i128> = rays
            .iter()
            .map(|r| eval_constraint(c, &r.coords))
            .collect::<Result<_>>()?;
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        if neg.is_empty() {
            for (r, &v) in rays.iter_mut().zip(&vals) {
                if v == 0 {
                    r.zeros.set(ci, true);
                }
            }
            continue;
        }
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let mut common = rays[p].zeros.clone();
                common &= &rays[q].zeros;
                if common.count_ones() + 2 < d {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(k, r)| {
                    k != p && k != q && {
                        let mut t = common.clone();
                        t &= &r.zeros;
                        t == common
                    }
                });
                if blocked {
                    continue;
                }
                let (hp, hq) = (vals[p], vals[q]);
                let coords = rays[p]
                    .coords
                    .iter()
                    .zip(&rays[q].coords)
                    .map(|(&x, &y)| checked_sub(checked_mul(hp, y)?, checked_mul(hq, x)?))
                    .collect::<Result<Vec<_>>>()?;
                let mut zeros = common;
                zeros.set(ci, true);
                fresh.push(Ray {
                    coords: primitive(coords),
                    zeros,
                });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (mut r, v) in rays.into_iter().zip(vals) {
            if v >= 0 {
                if v == 0 {
                    r.zeros.set(ci, true);
                }
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
    }

    let mut out: Vec<(Vec<i128>, i128)> = rays
        .into_iter()
        .filter(|r| r.coords[..n].iter().any(|&x| x != 0))
        .map(|r| {
            let l = r.coords[n];
            let mut a = r.coords;
            a.truncate(n);
            (a, l)
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}
