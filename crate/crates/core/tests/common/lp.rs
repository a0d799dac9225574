//! Exact rational feasibility LP, used as an independent vertex oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Is `{y ≥ 0 : A y = b}` nonempty? Phase I simplex with Bland's rule.
pub fn feasible(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    let m = a.len();
    let cols = a.first().map_or(0, Vec::len);
    // tableau over [y | artificials | rhs], rows normalized to b ≥ 0
    let width = cols + m + 1;
    let mut t: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let mut row = vec![BigRational::zero(); width];
            for j in 0..cols {
                row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
            }
            row[cols + i] = BigRational::one();
            row[width - 1] = b[i].abs();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (cols..cols + m).collect();
    // objective: minimize the sum of artificials; reduced costs
    loop {
        let cost = |j: usize, t: &Vec<Vec<BigRational>>| -> BigRational {
            let cj = if j >= cols && j < cols + m { q(1) } else { q(0) };
            let mut z = BigRational::zero();
            for (i, &bi) in basis.iter().enumerate() {
                if bi >= cols {
                    z += &t[i][j];
                }
            }
            cj - z
        };
        let entering = (0..cols + m).find(|&j| cost(j, &t).is_negative());
        let Some(j) = entering else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][j].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let p = t[r][j].clone();
        for x in t[r].iter_mut() {
            *x /= &p;
        }
        let pivot = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[j].is_zero() {
                let f = row[j].clone();
                for (x, pv) in row.iter_mut().zip(&pivot) {
                    *x -= &f * pv;
                }
            }
        }
        basis[r] = j;
    }
    basis
        .iter()
        .enumerate()
        .filter(|(_, &bi)| bi >= cols)
        .all(|(i, _)| t[i][width - 1].is_zero())
}

/// Is `v ∈ conv(points) + ℝ₊ⁿ`?
pub fn in_polyhedron(points: &[Vec<i64>], v: &[BigRational]) -> bool {
    if points.is_empty() {
        return false;
    }
    let n = v.len();
    let k = points.len();
    // Σ λⱼ pⱼ + s = v, Σ λⱼ = 1, λ, s ≥ 0
    let mut a = vec![vec![BigRational::zero(); k + n]; n + 1];
    for (j, p) in points.iter().enumerate() {
        for i in 0..n {
            a[i][j] = q(p[i]);
        }
        a[n][j] = q(1);
    }
    for i in 0..n {
        a[i][k + i] = q(1);
    }
    let mut b: Vec<BigRational> = v.to_vec();
    b.push(q(1));
    feasible(&a, &b)
}

/// Vertices of `conv(points) + ℝ₊ⁿ`: points not in the polyhedron of the others.
pub fn vertices(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut uniq = points.to_vec();
    uniq.sort();
    uniq.dedup();
    let mut out = Vec::new();
    for (i, v) in uniq.iter().enumerate() {
        let others: Vec<Vec<i64>> = uniq
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        let vq: Vec<BigRational> = v.iter().map(|&x| q(x)).collect();
        if !in_polyhedron(&others, &vq) {
            out.push(v.clone());
        }
    }
    out
}

#[test]
fn oracle_sanity() {
    // x²+y²: both points are vertices, (1,1) is in the polyhedron
    let pts = vec![vec![0, 2], vec![2, 0]];
    assert_eq!(vertices(&pts), pts);
    assert!(in_polyhedron(&pts, &[q(1), q(1)]));
    assert!(!in_polyhedron(&pts, &[q(1), BigRational::new(9.into(), 10.into())]));
    let pts = vec![vec![4, 0], vec![2, 2], vec![0, 4], vec![3, 3]];
    assert_eq!(vertices(&pts), vec![vec![0, 4], vec![4, 0]]);
}
