#![allow(dead_code)]

pub mod lp;

use lojasiewicz::{Exponent, TaylorModel, Term};
use rand::Rng;

pub fn e(v: &[u32]) -> Exponent {
    Exponent::new(v.to_vec())
}

pub fn model(n: usize, terms: &[(i64, &[u32])]) -> TaylorModel {
    TaylorModel::polynomial(n, terms.iter().map(|(c, x)| Term::int(*c, x.to_vec()))).unwrap()
}

pub fn random_support<R: Rng>(rng: &mut R, n: usize, max_points: usize, max_entry: u32) -> Vec<Exponent> {
    let k = rng.gen_range(1..=max_points);
    (0..k)
        .map(|_| Exponent::new((0..n).map(|_| rng.gen_range(0..=max_entry)).collect()))
        .collect()
}

/// `Σ xᵢ^{νᵢ}` over a random nonempty `J` with even `νᵢ`, plus a few positive
/// even monomials that are either supported in `J` or dominated by an axis
/// vertex. Non-negative and partially convenient by construction.
pub fn random_partially_convenient<R: Rng>(rng: &mut R) -> TaylorModel {
    let n = rng.gen_range(2..=3);
    let mut j: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
    if j.is_empty() {
        j.push(rng.gen_range(0..n));
    }
    let mut terms = Vec::new();
    let mut nu = vec![0u32; n];
    for &i in &j {
        nu[i] = 2 * rng.gen_range(1..=3);
        let mut x = vec![0u32; n];
        x[i] = nu[i];
        terms.push(Term::int(rng.gen_range(1..=3), x));
    }
    for _ in 0..rng.gen_range(0..=3) {
        let mut x: Vec<u32> = (0..n).map(|_| 2 * rng.gen_range(0..=2)).collect();
        if rng.gen_bool(0.5) {
            // supported in J: may become a vertex
            for (k, v) in x.iter_mut().enumerate() {
                if !j.contains(&k) {
                    *v = 0;
                }
            }
        } else {
            // above an axis vertex, so never a vertex
            let i = j[rng.gen_range(0..j.len())];
            x[i] = x[i].max(nu[i]);
        }
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        terms.push(Term::int(rng.gen_range(1..=3), x));
    }
    TaylorModel::polynomial(n, terms).unwrap()
}
