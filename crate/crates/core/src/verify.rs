//! Sampling audits of the Łojasiewicz inequalities near the origin.
//!
//! Each audit evaluates a ratio such as `‖∇f‖ / |f|^θ` on a fixed set of
//! directions scaled to a decreasing grid of radii, plus deterministic probe
//! curves. The inequality holds near 0 iff the ratio stays bounded below, so
//! the verdict looks for a systematic decay of the per-radius minima.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::TransversalFamily;
use crate::newton::NewtonPolyhedron;
use crate::poly::{Exponent, TaylorModel};

pub const DEFAULT_LEVELS: usize = 16;
pub const DEFAULT_DIRECTIONS: usize = 256;
pub const DEFAULT_RADIUS: f64 = 0.1;
/// Radius span of the grid: from `r` down to `r · 10⁻³`.
pub const DEFAULT_DECADES: f64 = 3.0;

/// Decay is declared when the level minima fall monotonically (Kendall τ
/// below this) and the log–log tail slope is at least [`DECAY_SLOPE`].
pub const DECAY_TAU: f64 = -0.8;
pub const DECAY_SLOPE: f64 = 0.05;
/// A monotone τ alone marks a result indeterminate only when the tail levels
/// spread by at least this much in log scale.
pub const TREND_SPREAD: f64 = 0.05;
/// Levels with radius at most this enter the tail fit.
pub const TAIL_RADIUS: f64 = 1e-2;
pub const ENVELOPE_BINS: usize = 32;
/// Probe curves are resampled on this many tail radii for the envelope.
pub const ENVELOPE_LEVELS: usize = 64;

/// A deterministic curve `x(r) = r·dir + r²·bend`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub name: String,
    pub dir: Vec<f64>,
    pub bend: Vec<f64>,
}

impl Probe {
    pub fn ray(name: impl Into<String>, dir: Vec<f64>) -> Self {
        let n = dir.len();
        Probe {
            name: name.into(),
            dir,
            bend: vec![0.0; n],
        }
    }

    pub fn at(&self, r: f64) -> Vec<f64> {
        self.dir
            .iter()
            .zip(&self.bend)
            .map(|(d, b)| r * d + r * r * b)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePlan {
    pub radii: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
    pub probes: Vec<Probe>,
    pub seed: u64,
}

impl SamplePlan {
    /// Geometric radius grid and `count` seeded directions on the unit
    /// max-norm sphere.
    pub fn new(n: usize, radius: f64, levels: usize, count: usize, seed: u64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || levels < 2 || count == 0 || n == 0 {
            return Err(Error::DegeneratePlan(format!(
                "radius {radius}, {levels} levels, {count} directions"
            )));
        }
        let ratio = 10f64.powf(-DEFAULT_DECADES / (levels - 1) as f64);
        let radii = (0..levels).map(|k| radius * ratio.powi(k as i32)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let directions = (0..count)
            .map(|_| {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
                v.into_iter().map(|x| x / m).collect()
            })
            .collect();
        Ok(SamplePlan {
            radii,
            directions,
            probes: Vec::new(),
            seed,
        })
    }

    pub fn default_for(n: usize, seed: u64) -> Result<Self> {
        Self::new(n, DEFAULT_RADIUS, DEFAULT_LEVELS, DEFAULT_DIRECTIONS, seed)
    }

    pub fn with_probes(mut self, probes: Vec<Probe>) -> Self {
        self.probes = probes;
        self
    }
}

/// Coordinate axes, hat-vertex diagonals, the main diagonal and a curve
/// bending off it, and the line `L` through the axis vertex of largest `ν`.
pub fn standard_probes(n: usize, hat_vertices: &[Exponent], line_axis: Option<usize>) -> Vec<Probe> {
    let mut probes = Vec::new();
    for i in 0..n {
        let mut d = vec![0.0; n];
        d[i] = 1.0;
        let name = if Some(i) == line_axis {
            format!("line-L x{}", i + 1)
        } else {
            format!("axis x{}", i + 1)
        };
        probes.push(Probe::ray(name, d));
    }
    for h in hat_vertices {
        if h.support().len() > 1 {
            let d: Vec<f64> = h.entries().iter().map(|&a| f64::from(a)).collect();
            probes.push(Probe::ray(format!("hat-diagonal {h}"), d));
        }
    }
    if n > 1 {
        let ones = vec![1.0; n];
        if !probes.iter().any(|p| p.dir == ones) {
            probes.push(Probe::ray("diagonal", ones.clone()));
        }
        let bend: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        probes.push(Probe {
            name: "near-diagonal".into(),
            dir: ones,
            bend,
        });
    }
    probes
}

/// One ray inside each region `U(ρ)`: `|x| ` increasing along the ranking.
pub fn ranking_probes(n: usize, orders: &[Vec<usize>]) -> Vec<Probe> {
    orders
        .iter()
        .map(|order| {
            let mut d = vec![1.0; n];
            let s = order.len();
            for (k, &i) in order.iter().enumerate() {
                d[i] = 2f64.powi(k as i32 - s as i32 + 1);
            }
            let names: Vec<String> = order.iter().map(|i| format!("x{}", i + 1)).collect();
            Probe::ray(format!("U({})", names.join("<")), d)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeTrend {
    pub name: String,
    /// Ratio per radius level; `None` where it is undefined.
    pub values: Vec<Option<f64>>,
    pub kendall_tau: f64,
    pub tail_slope: f64,
    pub decaying: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditResult {
    pub inequality: String,
    pub exponent: Option<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Slope of log(level minimum) against log(radius).
    pub empirical_slope: f64,
    /// Slope of the binned lower envelope of log‖∇f‖ against log|f| (Ł₁ only).
    pub envelope_slope: Option<f64>,
    pub kendall_tau: f64,
    pub tail_slope: f64,
    pub radii: Vec<f64>,
    pub level_minima: Vec<f64>,
    pub level_maxima: Vec<f64>,
    pub probes: Vec<ProbeTrend>,
    pub samples: usize,
    pub verdict: Verdict,
    pub forced: bool,
}

/// Kendall τ-b between two equally long sequences.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    let (mut conc, mut disc, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i].partial_cmp(&x[j]).map_or(0, |o| o as i64);
            let dy = y[i].partial_cmp(&y[j]).map_or(0, |o| o as i64);
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => tx += 1,
                (_, 0) => ty += 1,
                _ if dx == dy => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let denom = (((conc + disc + tx) * (conc + disc + ty)) as f64).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (conc - disc) as f64 / denom
    }
}

/// Least-squares slope of `y` on `x`; 0 for fewer than two usable points.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (*a, *b))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn tail_indices(radii: &[f64]) -> Vec<usize> {
    let tail: Vec<usize> = (0..radii.len())
        .filter(|&k| radii[k] <= TAIL_RADIUS * (1.0 + 1e-9))
        .collect();
    if tail.len() >= 3 {
        tail
    } else {
        (0..radii.len()).collect()
    }
}

fn trend(radii: &[f64], values: &[f64]) -> (f64, f64) {
    let idx: Vec<f64> = (0..values.len()).map(|i| i as f64).collect();
    let tau = kendall_tau_b(&idx, values);
    let use_idx = tail_indices(radii);
    let lr: Vec<f64> = use_idx.iter().map(|&k| radii[k].ln()).collect();
    let lv: Vec<f64> = use_idx.iter().map(|&k| values[k].ln()).collect();
    (tau, ls_slope(&lr, &lv))
}

fn is_decay(tau: f64, slope: f64) -> bool {
    tau < DECAY_TAU && slope >= DECAY_SLOPE
}

/// Monotone and visibly moving over the tail.
fn drifts(tau: f64, radii: &[f64], values: &[f64]) -> bool {
    if tau >= DECAY_TAU {
        return false;
    }
    let (lo, hi) = tail_indices(radii)
        .iter()
        .map(|&k| values[k])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    lo.is_nan() || lo <= 0.0 || (hi / lo).ln() >= TREND_SPREAD
}

/// Runs a ratio over the plan. `ratio` returns `None` where it is undefined.
fn run_audit<F>(name: &str, exponent: Option<f64>, plan: &SamplePlan, ratio: F) -> Result<AuditResult>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    let n_dirs = plan.directions.len();
    let per_level = n_dirs + plan.probes.len();
    let values: Vec<Option<f64>> = (0..plan.radii.len() * per_level)
        .into_par_iter()
        .map(|idx| {
            let r = plan.radii[idx / per_level];
            let j = idx % per_level;
            let x: Vec<f64> = if j < n_dirs {
                plan.directions[j].iter().map(|d| d * r).collect()
            } else {
                plan.probes[j - n_dirs].at(r)
            };
            ratio(&x).filter(|v| !v.is_nan())
        })
        .collect();
    let samples = values.iter().filter(|v| v.is_some()).count();
    if samples == 0 {
        return Err(Error::DegeneratePlan(format!("{name}: the ratio is undefined at every sample")));
    }
    let levels = plan.radii.len();
    let mut minima = Vec::with_capacity(levels);
    let mut maxima = Vec::with_capacity(levels);
    for k in 0..levels {
        let lv = values[k * per_level..(k + 1) * per_level].iter().flatten();
        let (mn, mx) = lv.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        minima.push(mn);
        maxima.push(mx);
    }
    let (tau, tail_slope) = trend(&plan.radii, &minima);
    let log_r: Vec<f64> = plan.radii.iter().map(|r| r.ln()).collect();
    let log_m: Vec<f64> = minima.iter().map(|m| m.ln()).collect();
    let empirical_slope = ls_slope(&log_r, &log_m);

    let probes = plan
        .probes
        .iter()
        .enumerate()
        .map(|(pi, p)| {
            let vals: Vec<Option<f64>> = (0..levels).map(|k| values[k * per_level + n_dirs + pi]).collect();
            let (r, v): (Vec<f64>, Vec<f64>) = plan
                .radii
                .iter()
                .zip(&vals)
                .filter_map(|(r, v)| v.map(|v| (*r, v)))
                .unzip();
            let (t, s) = if v.len() >= 2 { trend(&r, &v) } else { (0.0, 0.0) };
            let zero = v.contains(&0.0);
            ProbeTrend {
                name: p.name.clone(),
                decaying: zero || is_decay(t, s),
                values: vals,
                kendall_tau: t,
                tail_slope: s,
            }
        })
        .collect();

    let any_zero = minima.iter().any(|&m| m <= 0.0);
    let undefined_level = minima.iter().any(|m| !m.is_finite());
    let verdict = if any_zero || is_decay(tau, tail_slope) {
        Verdict::Fail
    } else if undefined_level || drifts(tau, &plan.radii, &minima) || tail_slope >= DECAY_SLOPE {
        Verdict::Indeterminate
    } else {
        Verdict::Pass
    };
    Ok(AuditResult {
        inequality: name.into(),
        exponent,
        min_ratio: minima.iter().cloned().fold(f64::INFINITY, f64::min),
        max_ratio: maxima.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        empirical_slope,
        envelope_slope: None,
        kendall_tau: tau,
        tail_slope,
        radii: plan.radii.clone(),
        level_minima: minima,
        level_maxima: maxima,
        probes,
        samples,
        verdict,
        forced: false,
    })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Slope of the lower envelope of `log y` against `log x`: bin by `log x`,
/// keep the smallest `log y` per bin, fit a line through those points.
pub fn envelope_slope(pairs: &[(f64, f64)], bins: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 || bins == 0 {
        return None;
    }
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return None;
    }
    let width = (hi - lo) / bins as f64;
    let mut best: Vec<Option<(f64, f64)>> = vec![None; bins];
    for &(x, y) in &pts {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        if best[b].is_none_or(|(_, by)| y < by) {
            best[b] = Some((x, y));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = best.into_iter().flatten().unzip();
    (xs.len() >= 2).then(|| ls_slope(&xs, &ys))
}

/// `‖∇f‖ / |f|^θ` over samples with `f ≠ 0`.
pub fn audit_l1(model: &TaylorModel, theta: f64, plan: &SamplePlan) -> Result<AuditResult> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidModel(format!("θ = {theta} must lie in (0, 1)")));
    }
    let mut res = run_audit("L1", Some(theta), plan, |x| {
        let f = model.eval(x).ok()?;
        if f == 0.0 {
            return None;
        }
        let g = norm2(&model.gradient(x).ok()?);
        Some(g / f.abs().powf(theta))
    })?;
    res.envelope_slope = l1_envelope(model, plan);
    Ok(res)
}

/// Lower envelope of `log ‖∇f‖` against `log |f|` inside the tail ball. Only
/// values of `|f|` below its smallest nonzero value on the outer tail sphere
/// enter the fit: below that level a convenient germ's level sets stay inside
/// the ball, so the envelope is the asymptotic one.
fn l1_envelope(model: &TaylorModel, plan: &SamplePlan) -> Option<f64> {
    let tail: Vec<f64> = plan
        .radii
        .iter()
        .copied()
        .filter(|&r| r <= TAIL_RADIUS * (1.0 + 1e-9))
        .collect();
    let (&outer, &inner) = (tail.first()?, tail.last()?);
    let fine: Vec<f64> = if inner < outer {
        let ratio = (inner / outer).powf(1.0 / (ENVELOPE_LEVELS - 1) as f64);
        (0..ENVELOPE_LEVELS).map(|k| outer * ratio.powi(k as i32)).collect()
    } else {
        vec![outer]
    };
    let mut points: Vec<(f64, Vec<f64>)> = Vec::new();
    for &r in &tail {
        for d in &plan.directions {
            points.push((r, d.iter().map(|v| v * r).collect()));
        }
    }
    for &r in &fine {
        for p in &plan.probes {
            points.push((r, p.at(r)));
        }
    }
    let pairs: Vec<(f64, f64, f64)> = points
        .par_iter()
        .filter_map(|(r, x)| {
            let f = model.eval(x).ok()?.abs();
            let g = norm2(&model.gradient(x).ok()?);
            Some((*r, f, g))
        })
        .collect();
    let cutoff = pairs
        .iter()
        .filter(|(r, f, _)| *r == outer && *f > 0.0)
        .map(|p| p.1)
        .fold(f64::INFINITY, f64::min);
    let below: Vec<(f64, f64)> = pairs.iter().filter(|p| p.1 <= cutoff).map(|p| (p.1, p.2)).collect();
    if below.len() >= 2 {
        envelope_slope(&below, ENVELOPE_BINS)
    } else {
        envelope_slope(&pairs.iter().map(|p| (p.1, p.2)).collect::<Vec<_>>(), ENVELOPE_BINS)
    }
}

/// `|f| / |x^g|^α`; the `g` diagonal should be among the plan's probes.
pub fn audit_l0(model: &TaylorModel, g_exp: &Exponent, alpha: f64, plan: &SamplePlan) -> Result<AuditResult> {
    run_audit("L0", Some(alpha), plan, |x| {
        let g = g_exp.monomial(x).abs();
        if g == 0.0 {
            return None;
        }
        Some(model.eval(x).ok()?.abs() / g.powf(alpha))
    })
}

/// Max-norm distance to `⋃_{J} T_J`; the max-norm of the point when the
/// family is empty (zero set is the origin).
pub fn dist_to_zero_set(point: &[f64], family: &[Vec<usize>]) -> f64 {
    if family.is_empty() {
        return point.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    }
    family
        .iter()
        .map(|j| j.iter().fold(0.0f64, |a, &i| a.max(point[i].abs())))
        .fold(f64::INFINITY, f64::min)
}

/// `|f| / dist(x, f⁻¹(0))^ℒ` off the zero set.
pub fn audit_l2(model: &TaylorModel, loj: f64, family: &TransversalFamily, plan: &SamplePlan) -> Result<AuditResult> {
    run_audit("L2", Some(loj), plan, |x| {
        let d = dist_to_zero_set(x, &family.lambda_hitting);
        if d == 0.0 {
            return None;
        }
        Some(model.eval(x).ok()?.abs() / d.powf(loj))
    })
}

/// Two-sided verdict for ≍ audits: also fail when the level maxima blow up.
fn two_sided(mut res: AuditResult, radii: &[f64]) -> AuditResult {
    let inv: Vec<f64> = res.level_maxima.iter().map(|m| 1.0 / m).collect();
    let (tau, slope) = trend(radii, &inv);
    if is_decay(tau, slope) || res.level_maxima.iter().any(|m| !m.is_finite()) {
        res.verdict = Verdict::Fail;
    } else if res.verdict == Verdict::Pass && (drifts(tau, radii, &inv) || slope >= DECAY_SLOPE) {
        res.verdict = Verdict::Indeterminate;
    }
    res
}

/// `Σ|xᵢ∂ᵢf| / g_{Γ₊}`.
pub fn audit_euler_comparison(model: &TaylorModel, poly: &NewtonPolyhedron, plan: &SamplePlan) -> Result<AuditResult> {
    let res = run_audit("euler-comparison", None, plan, |x| {
        let g = poly.g_gamma_eval(x);
        if g == 0.0 {
            return None;
        }
        Some(model.euler_field_value(x).ok()? / g)
    })?;
    Ok(two_sided(res, &plan.radii))
}

/// `f / g_{Γ₊}`.
pub fn audit_f_vs_g(model: &TaylorModel, poly: &NewtonPolyhedron, plan: &SamplePlan) -> Result<AuditResult> {
    let res = run_audit("f-vs-g", None, plan, |x| {
        let g = poly.g_gamma_eval(x);
        if g == 0.0 {
            return None;
        }
        Some(model.eval(x).ok()?.abs() / g)
    })?;
    Ok(two_sided(res, &plan.radii))
}

/// A point where the sampled `f` is clearly negative, if any.
///
/// Negative means below `-1e-9 · Σ|c x^α|`, so rounding noise is ignored.
pub fn find_negative_value(model: &TaylorModel, radius: f64, count: usize, seed: u64) -> Option<Vec<f64>> {
    let n = model.dim();
    (0..count).into_par_iter().find_map_first(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
        let f = model.eval(&x).ok()?;
        let scale = model.float_poly().abs_eval(&x);
        (f < -1e-9 * scale).then_some(x)
    })
}

/// Writes `(radius, min_ratio)` rows.
pub fn write_envelope_csv(path: &Path, audit: &AuditResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["radius", "min_ratio"])?;
    for (r, m) in audit.radii.iter().zip(&audit.level_minima) {
        w.write_record([r.to_string(), m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::transversals;
    use crate::newton::build_polyhedron;
    use crate::poly::Term;

    fn model(n: usize, terms: &[(i64, &[u32])]) -> TaylorModel {
        TaylorModel::polynomial(n, terms.iter().map(|(c, e)| Term::int(*c, e.to_vec()))).unwrap()
    }

    fn plan_for(m: &TaylorModel) -> SamplePlan {
        let p = build_polyhedron(&m.support()).unwrap();
        let h = p.hat_polyhedron().unwrap();
        SamplePlan::default_for(m.dim(), 0)
            .unwrap()
            .with_probes(standard_probes(m.dim(), h.vertices(), None))
    }

    fn sq() -> TaylorModel {
        model(2, &[(1, &[2, 0]), (1, &[0, 2])])
    }

    fn xy2() -> TaylorModel {
        model(2, &[(1, &[2, 2])])
    }

    fn x4xy() -> TaylorModel {
        model(2, &[(1, &[4, 0]), (1, &[2, 2])])
    }

    #[test]
    fn plan_is_geometric_and_deterministic() {
        let p = SamplePlan::default_for(3, 5).unwrap();
        assert_eq!(p.radii.len(), 16);
        assert!((p.radii[0] - 0.1).abs() < 1e-15);
        assert!((p.radii[15] - 1e-4).abs() < 1e-15);
        assert!(p.radii.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(p, SamplePlan::default_for(3, 5).unwrap());
        assert!(SamplePlan::new(2, -1.0, 16, 10, 0).is_err());
    }

    #[test]
    fn kendall_and_slope() {
        let x = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(kendall_tau_b(&x, &[4.0, 3.0, 2.0, 1.0]), -1.0);
        assert_eq!(kendall_tau_b(&x, &[1.0, 1.0, 1.0, 1.0]), 0.0);
        assert!((ls_slope(&x, &[1.0, 3.0, 5.0, 7.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn convergence_is_not_a_trend() {
        let radii: Vec<f64> = (0..16).map(|k| 0.1 * 10f64.powf(-0.2 * k as f64)).collect();
        let idx: Vec<f64> = (0..16).map(|k| k as f64).collect();
        let converging: Vec<f64> = radii.iter().map(|r| 6.0 + r * r).collect();
        let tau = kendall_tau_b(&idx, &converging);
        assert_eq!(tau, -1.0);
        assert!(!drifts(tau, &radii, &converging));
        let decaying: Vec<f64> = radii.iter().map(|r| 1.0 / (1.0 - r.ln())).collect();
        assert!(drifts(kendall_tau_b(&idx, &decaying), &radii, &decaying));
    }

    #[test]
    fn dist_examples() {
        let fam = |m: &TaylorModel| {
            let p = build_polyhedron(&m.support()).unwrap();
            transversals(&p.hat_polyhedron().unwrap()).lambda_hitting
        };
        assert_eq!(dist_to_zero_set(&[0.5, 0.01], &fam(&xy2())), 0.01);
        assert_eq!(dist_to_zero_set(&[0.3, 0.9], &fam(&x4xy())), 0.3);
        // x²+y²: the hitting family {{1,2}} gives the max-norm
        assert_eq!(dist_to_zero_set(&[0.3, 0.4], &fam(&sq())), 0.4);
        assert_eq!(dist_to_zero_set(&[0.3, -0.4], &[]), 0.4);
    }

    #[test]
    fn l1_examples() {
        let m = sq();
        let plan = plan_for(&m);
        let a = audit_l1(&m, 0.5, &plan).unwrap();
        assert_eq!(a.verdict, Verdict::Pass);
        assert!((a.min_ratio - 2.0).abs() < 1e-9 && (a.max_ratio - 2.0).abs() < 1e-9);
        assert!((a.envelope_slope.unwrap() - 0.5).abs() < 0.05);
        // a larger exponent is a weaker inequality near 0
        assert_eq!(audit_l1(&m, 0.6, &plan).unwrap().verdict, Verdict::Pass);
        assert_eq!(audit_l1(&m, 0.4, &plan).unwrap().verdict, Verdict::Fail);
        let quartic = model(2, &[(1, &[4, 0]), (1, &[0, 4])]);
        let a = audit_l1(&quartic, 0.6, &plan_for(&quartic)).unwrap();
        assert_eq!(a.verdict, Verdict::Fail);
        assert!(a.probes.iter().any(|p| p.name.starts_with("axis") && p.decaying));
    }

    #[test]
    fn l0_examples() {
        let m = xy2();
        let a = audit_l0(&m, &Exponent::new(vec![1, 1]), 2.0, &plan_for(&m)).unwrap();
        assert_eq!(a.verdict, Verdict::Pass);
        assert!((a.min_ratio - 1.0).abs() < 1e-9 && (a.max_ratio - 1.0).abs() < 1e-9);
        let m = x4xy();
        let x = Exponent::new(vec![1, 0]);
        assert_eq!(audit_l0(&m, &x, 4.0, &plan_for(&m)).unwrap().verdict, Verdict::Pass);
        let a = audit_l0(&m, &x, 3.5, &plan_for(&m)).unwrap();
        assert_eq!(a.verdict, Verdict::Fail);
        assert!(a.probes.iter().any(|p| p.name == "axis x1" && p.decaying));
        let m = sq();
        assert_eq!(audit_l0(&m, &x, 2.0, &plan_for(&m)).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn l2_examples() {
        let fam = |m: &TaylorModel| {
            let p = build_polyhedron(&m.support()).unwrap();
            transversals(&p.hat_polyhedron().unwrap())
        };
        let m = xy2();
        let f = fam(&m);
        assert_eq!(audit_l2(&m, 4.0, &f, &plan_for(&m)).unwrap().verdict, Verdict::Pass);
        let a = audit_l2(&m, 3.5, &f, &plan_for(&m)).unwrap();
        assert_eq!(a.verdict, Verdict::Fail);
        assert!(a.probes.iter().any(|p| p.name.contains("diagonal") && p.decaying));
        let m = sq();
        let a = audit_l2(&m, 2.0, &fam(&m), &plan_for(&m)).unwrap();
        assert_eq!(a.verdict, Verdict::Pass);
        assert!(a.min_ratio >= 1.0 - 1e-12 && a.max_ratio <= 2.0 + 1e-12);
        let m = x4xy();
        let f = fam(&m);
        assert_eq!(audit_l2(&m, 4.0, &f, &plan_for(&m)).unwrap().verdict, Verdict::Pass);
        assert_eq!(audit_l2(&m, 3.5, &f, &plan_for(&m)).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn comparison_audits() {
        let m = sq();
        let p = build_polyhedron(&m.support()).unwrap();
        let a = audit_euler_comparison(&m, &p, &plan_for(&m)).unwrap();
        assert_eq!(a.verdict, Verdict::Pass);
        assert!((a.min_ratio - 2.0).abs() < 1e-9 && (a.max_ratio - 2.0).abs() < 1e-9);
        let a = audit_f_vs_g(&m, &p, &plan_for(&m)).unwrap();
        assert!((a.min_ratio - 1.0).abs() < 1e-12 && (a.max_ratio - 1.0).abs() < 1e-12);

        let m = xy2();
        let p = build_polyhedron(&m.support()).unwrap();
        let a = audit_euler_comparison(&m, &p, &plan_for(&m)).unwrap();
        assert!((a.min_ratio - 4.0).abs() < 1e-9 && (a.max_ratio - 4.0).abs() < 1e-9);

        let m = model(2, &[(1, &[4, 0]), (1, &[0, 4]), (1, &[2, 2])]);
        let p = build_polyhedron(&m.support()).unwrap();
        let a = audit_f_vs_g(&m, &p, &plan_for(&m)).unwrap();
        assert_eq!(a.verdict, Verdict::Pass);
        assert!(a.min_ratio >= 1.0 - 1e-12 && a.max_ratio <= 1.5 + 1e-12);

        let m = x4xy();
        let p = build_polyhedron(&m.support()).unwrap();
        let a = audit_f_vs_g(&m, &p, &plan_for(&m)).unwrap();
        assert!((a.min_ratio - 1.0).abs() < 1e-12 && (a.max_ratio - 1.0).abs() < 1e-12);

        let m = model(2, &[(1, &[2, 0]), (-2, &[1, 1]), (1, &[0, 2])]);
        let p = build_polyhedron(&m.support()).unwrap();
        let a = audit_euler_comparison(&m, &p, &plan_for(&m)).unwrap();
        assert_eq!(a.verdict, Verdict::Fail);
        let bent = a.probes.iter().find(|p| p.name == "near-diagonal").unwrap();
        assert!(bent.decaying);
    }

    #[test]
    fn audits_are_deterministic() {
        let m = x4xy();
        let plan = plan_for(&m);
        assert_eq!(audit_l1(&m, 0.8, &plan).unwrap(), audit_l1(&m, 0.8, &plan).unwrap());
    }

    #[test]
    fn negative_values_are_found() {
        assert!(find_negative_value(&sq(), 0.1, 10_000, 0).is_none());
        let m = model(2, &[(1, &[2, 0]), (-1, &[0, 2])]);
        assert!(find_negative_value(&m, 0.1, 10_000, 0).is_some());
    }

    #[test]
    fn envelope_csv_round_trip() {
        let m = sq();
        let a = audit_l1(&m, 0.5, &plan_for(&m)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("env.csv");
        write_envelope_csv(&path, &a).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 17);
        assert!(text.starts_with("radius,min_ratio"));
    }

    #[test]
    fn zero_set_distance_against_sampled_subspaces() {
        let fams: [(usize, Vec<Vec<usize>>); 3] = [
            (2, vec![vec![0], vec![1]]),
            (3, vec![vec![0, 1], vec![0, 2], vec![1, 2]]),
            (3, vec![vec![2]]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, fam) in &fams {
            for _ in 0..50 {
                let x: Vec<f64> = (0..*n).map(|_| rng.gen_range(-0.15..0.15)).collect();
                let d = dist_to_zero_set(&x, fam);
                let mut attained = f64::INFINITY;
                for j in fam {
                    let mut y = x.clone();
                    for &i in j {
                        y[i] = 0.0;
                    }
                    let dy = x.iter().zip(&y).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
                    attained = attained.min(dy);
                    for _ in 0..200 {
                        let mut z: Vec<f64> = (0..*n).map(|_| rng.gen_range(-0.3..0.3)).collect();
                        for &i in j {
                            z[i] = 0.0;
                        }
                        let dz = x.iter().zip(&z).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
                        assert!(dz >= d - 1e-15);
                    }
                }
                assert_eq!(attained, d);
            }
        }
    }
}
