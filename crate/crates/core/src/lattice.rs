//! Exact integer linear algebra on small lattice vectors.
//!
//! Everything works over `i128` with checked arithmetic; overflow surfaces as
//! [`Error::Overflow`] instead of wrapping.

use num_integer::Integer;

use crate::error::{Error, Result};

pub(crate) fn checked_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub(crate) fn checked_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn checked_sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

/// Nonnegative gcd of all entries; 0 for the zero vector.
pub fn gcd_all(v: &[i128]) -> i128 {
    v.iter().fold(0i128, |g, &x| g.gcd(&x))
}

/// Divides a vector by the gcd of its entries.
pub fn primitive(mut v: Vec<i128>) -> Vec<i128> {
    let g = gcd_all(&v);
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
    v
}

pub fn dot(a: &[i128], b: &[i128]) -> Result<i128> {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0i128;
    for (x, y) in a.iter().zip(b) {
        acc = checked_add(acc, checked_mul(*x, *y)?)?;
    }
    Ok(acc)
}

/// Determinant of a square matrix by Bareiss fraction-free elimination.
pub fn det(m: &[Vec<i128>]) -> Result<i128> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = checked_sub(checked_mul(a[i][j], a[k][k])?, checked_mul(a[i][k], a[k][j])?)?;
                a[i][j] = t / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Rank of a set of row vectors.
pub fn rank(rows: &[Vec<i128>]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let cols = first.len();
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| primitive(r.clone())).collect();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c] == 0 {
                continue;
            }
            let (pv, iv) = (a[r][c], a[i][c]);
            let mut row = Vec::with_capacity(cols);
            for j in 0..cols {
                row.push(checked_sub(checked_mul(a[i][j], pv)?, checked_mul(a[r][j], iv)?)?);
            }
            a[i] = primitive(row);
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    Ok(r)
}

/// Vector orthogonal to the `n - 1` given vectors of length `n`
/// (generalized cross product). Zero iff the vectors are dependent.
pub fn orthogonal_complement(vectors: &[Vec<i128>], n: usize) -> Result<Vec<i128>> {
    debug_assert_eq!(vectors.len() + 1, n);
    let mut h = Vec::with_capacity(n);
    for j in 0..n {
        let mut m: Vec<Vec<i128>> = vectors.to_vec();
        let mut e = vec![0i128; n];
        e[j] = 1;
        m.push(e);
        h.push(det(&m)?);
    }
    Ok(h)
}

/// Adjugate of a square matrix, so that `adj * m = det(m) * I`.
pub fn adjugate(m: &[Vec<i128>]) -> Result<Vec<Vec<i128>>> {
    let n = m.len();
    if n == 1 {
        return Ok(vec![vec![1]]);
    }
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let cof = det(&minor)?;
            adj[j][i] = if (i + j) % 2 == 0 { cof } else { -cof };
        }
    }
    Ok(adj)
}

/// Matrix whose columns are the given vectors.
pub fn columns(vectors: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = vectors.first().map_or(0, Vec::len);
    (0..n)
        .map(|r| vectors.iter().map(|v| v[r]).collect())
        .collect()
}

pub fn mat_vec(m: &[Vec<i128>], v: &[i128]) -> Result<Vec<i128>> {
    m.iter().map(|row| dot(row, v)).collect()
}
