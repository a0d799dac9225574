//! The Newton polyhedron `Γ₊ = conv(support) + ℝ₊ⁿ` in both representations.

mod hull;

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{dot, primitive, rank};
use crate::poly::{pairwise_sum, Exponent};

pub const MAX_DIM: usize = 8;
pub const MAX_SUPPORT: usize = 10_000;

/// Supporting half-space `⟨normal, x⟩ ≥ offset` of `Γ₊`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Facet {
    pub normal: Vec<i128>,
    pub offset: i128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolyhedron {
    n: usize,
    vertices: Vec<Exponent>,
    facets: Vec<Facet>,
}

/// A face `γ(a)` together with the support points it contains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceData {
    pub normal: Vec<i128>,
    pub offset: i128,
    pub lattice_points: Vec<Exponent>,
    pub dim: usize,
    pub compact: bool,
}

fn validate_covector(a: &[i128], n: usize) -> Result<()> {
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    if a.iter().any(|&x| x < 0) || a.iter().all(|&x| x == 0) {
        return Err(Error::InvalidCovector(
            a.iter().map(|&x| x.clamp(i64::MIN as i128, i64::MAX as i128) as i64).collect(),
        ));
    }
    Ok(())
}

/// Affine dimension of a point set.
pub fn affine_dim(points: &[Vec<i128>]) -> Result<usize> {
    let Some(base) = points.first() else {
        return Ok(0);
    };
    let diffs: Vec<Vec<i128>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

pub fn build_polyhedron(points: &[Exponent]) -> Result<NewtonPolyhedron> {
    let first = points.first().ok_or(Error::EmptySupport)?;
    let n = first.dim();
    if n == 0 {
        return Err(Error::InvalidModel("dimension must be at least 1".into()));
    }
    if n > MAX_DIM {
        return Err(Error::DimensionCap { n, cap: MAX_DIM });
    }
    if points.len() > MAX_SUPPORT {
        return Err(Error::SupportCap {
            size: points.len(),
            cap: MAX_SUPPORT,
        });
    }
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.dim(),
        });
    }
    let pts: Vec<Vec<i128>> = points.iter().map(Exponent::to_i128).collect();
    let raw = hull::facets(&pts, n)?;
    let facets: Vec<Facet> = raw
        .into_iter()
        .map(|(normal, offset)| Facet { normal, offset })
        .collect();

    let candidates = hull::minimal_points(&pts);
    let mut vertices = Vec::new();
    for p in candidates {
        let mut tight = Vec::new();
        for f in &facets {
            if dot(&f.normal, &p)? == f.offset {
                tight.push(f.normal.clone());
            }
        }
        if rank(&tight)? == n {
            vertices.push(Exponent::new(p.iter().map(|&x| x as u32).collect()));
        }
    }
    vertices.sort();
    Ok(NewtonPolyhedron {
        n,
        vertices,
        facets,
    })
}

impl NewtonPolyhedron {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Vertices sorted lexicographically.
    pub fn vertices(&self) -> &[Exponent] {
        &self.vertices
    }

    /// Facets sorted by normal, coordinate facets included.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Indices of the facets through a point of `Γ₊`.
    pub fn tight_facets(&self, p: &Exponent) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, f) in self.facets.iter().enumerate() {
            if p.dot(&f.normal)? == f.offset {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// `l(a) = min ⟨a, Γ₊⟩`.
    pub fn support_value(&self, a: &[i128]) -> Result<i128> {
        validate_covector(a, self.n)?;
        let mut best: Option<i128> = None;
        for v in &self.vertices {
            let s = v.dot(a)?;
            best = Some(best.map_or(s, |b| b.min(s)));
        }
        best.ok_or(Error::EmptySupport)
    }

    pub fn face_of_normal(&self, support: &[Exponent], a: &[i128]) -> Result<FaceData> {
        let l = self.support_value(a)?;
        let mut pts = Vec::new();
        for p in support {
            if p.dot(a)? == l {
                pts.push(p.clone());
            }
        }
        pts.sort();
        pts.dedup();
        let coords: Vec<Vec<i128>> = pts.iter().map(Exponent::to_i128).collect();
        Ok(FaceData {
            normal: a.to_vec(),
            offset: l,
            dim: affine_dim(&coords)?,
            lattice_points: pts,
            compact: a.iter().all(|&x| x > 0),
        })
    }

    /// All compact faces, each once, ordered by dimension then points.
    ///
    /// Faces are found as vertex sets of intersections of facets; such a set
    /// spans a compact face exactly when the facets through it have a strictly
    /// positive normal sum, which is then the defining normal.
    pub fn compact_faces(&self, support: &[Exponent]) -> Result<Vec<FaceData>> {
        let n_v = self.vertices.len();
        let incidence: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .map(|v| self.tight_facets(v))
            .collect::<Result<_>>()?;
        let facet_sets: Vec<BTreeSet<usize>> = (0..self.facets.len())
            .map(|fi| (0..n_v).filter(|&vi| incidence[vi].contains(&fi)).collect())
            .collect();

        let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();
        let mut queue: Vec<BTreeSet<usize>> = Vec::new();
        for s in &facet_sets {
            if !s.is_empty() && seen.insert(s.clone()) {
                queue.push(s.clone());
            }
        }
        for vi in 0..n_v {
            let s: BTreeSet<usize> = [vi].into_iter().collect();
            if seen.insert(s.clone()) {
                queue.push(s);
            }
        }
        while let Some(w) = queue.pop() {
            for s in &facet_sets {
                let meet: BTreeSet<usize> = w.intersection(s).copied().collect();
                if !meet.is_empty() && seen.insert(meet.clone()) {
                    queue.push(meet);
                }
            }
        }

        let mut faces = Vec::new();
        for w in seen {
            let tight: Vec<usize> = (0..self.facets.len())
                .filter(|fi| w.iter().all(|&vi| incidence[vi].contains(fi)))
                .collect();
            let mut sum = vec![0i128; self.n];
            for &fi in &tight {
                for (s, x) in sum.iter_mut().zip(&self.facets[fi].normal) {
                    *s = crate::lattice::checked_add(*s, *x)?;
                }
            }
            if sum.iter().any(|&x| x <= 0) {
                continue;
            }
            // the sum may define a larger face than w if w is not a face; skip those
            let face = self.face_of_normal(support, &primitive(sum))?;
            let verts: BTreeSet<usize> = (0..n_v)
                .filter(|&vi| face.lattice_points.contains(&self.vertices[vi]))
                .collect();
            if verts == w {
                faces.push(face);
            }
        }
        faces.sort_by(|a, b| (a.dim, &a.lattice_points).cmp(&(b.dim, &b.lattice_points)));
        faces.dedup_by(|a, b| a.lattice_points == b.lattice_points);
        Ok(faces)
    }

    /// `g_{Γ₊}(x) = Σ_{α ∈ V} |x^α|`.
    pub fn g_gamma_eval(&self, x: &[f64]) -> f64 {
        let parts: Vec<f64> = self.vertices.iter().map(|v| v.monomial(x).abs()).collect();
        pairwise_sum(&parts)
    }

    /// Newton polyhedron of the 0/1 truncations of the vertices.
    pub fn hat_polyhedron(&self) -> Result<NewtonPolyhedron> {
        let hats: Vec<Exponent> = self.vertices.iter().map(Exponent::hat).collect();
        build_polyhedron(&hats)
    }

    /// Entry parameter `d(α*)` of the diagonal ray `t·α*`; `None` if the ray
    /// never enters `Γ₊`.
    pub fn diagonal_exponent(&self, alpha_star: &Exponent) -> Result<Option<Rational64>> {
        if alpha_star.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: alpha_star.dim(),
            });
        }
        if !alpha_star.is_zero_one() || alpha_star.is_zero() {
            return Err(Error::NotZeroOne(alpha_star.entries().to_vec()));
        }
        let mut best = Rational64::from_integer(0);
        for f in &self.facets {
            let s = alpha_star.dot(&f.normal)?;
            if s == 0 {
                if f.offset > 0 {
                    return Ok(None);
                }
                continue;
            }
            let num = i64::try_from(f.offset).map_err(|_| Error::Overflow)?;
            let den = i64::try_from(s).map_err(|_| Error::Overflow)?;
            best = best.max(Rational64::new(num, den));
        }
        Ok(Some(best))
    }

    /// Exact membership test against every facet inequality.
    pub fn contains(&self, point: &[BigRational]) -> bool {
        if point.len() != self.n {
            return false;
        }
        self.facets.iter().all(|f| {
            let lhs = f
                .normal
                .iter()
                .zip(point)
                .fold(BigRational::from_integer(BigInt::from(0)), |acc, (a, x)| {
                    acc + x * BigRational::from_integer(BigInt::from(*a))
                });
            lhs >= BigRational::from_integer(BigInt::from(f.offset))
        })
    }

    /// Integer membership test.
    pub fn contains_lattice(&self, point: &Exponent) -> Result<bool> {
        for f in &self.facets {
            if point.dot(&f.normal)? < f.offset {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
