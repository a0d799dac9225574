//! Pipeline orchestration and the JSON report.
//!
//! Exact quantities are emitted as `{"num": .., "den": ..}`; floats appear
//! only inside audit sections and non-degeneracy witnesses. Variable indices
//! are one-based throughout the report.

use std::collections::BTreeSet;

use num_rational::Rational64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exponents::{
    alpha_exponent, check_kn, combined_case, convenience, convex_shape, d_of_f, dist_exponent, theta,
    transversals, Combined, ConvenienceReport, DistReport, Gated, Hypotheses, KnReport, TransversalFamily,
};
use crate::fan::{fan_exponents, resolve, Fan, FanExponents};
use crate::newton::{build_polyhedron, NewtonPolyhedron, MAX_DIM};
use crate::nondegen::{check_model, CheckOptions, ModelVerdict, DEFAULT_STARTS, DEFAULT_TOL};
use crate::parse::to_text;
use crate::poly::{Exponent, TaylorModel};
use crate::verify::{
    audit_euler_comparison, audit_f_vs_g, audit_l0, audit_l1, audit_l2, find_negative_value, ranking_probes,
    standard_probes, AuditResult, SamplePlan, DEFAULT_DIRECTIONS, DEFAULT_LEVELS, DEFAULT_RADIUS,
};

pub const NONNEG_SAMPLES: usize = 10_000;
const MAX_RANKING_PROBES: usize = 64;

/// Exit codes of the command-line front end.
pub mod exit {
    pub const OK: i32 = 0;
    pub const GATE: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const RESOURCE: i32 = 4;
}

pub fn exit_code_for(err: &Error) -> i32 {
    if err.is_resource_cap() {
        exit::RESOURCE
    } else {
        match err {
            Error::Invariant(_) | Error::Io(_) | Error::Csv(_) => 1,
            _ => exit::INPUT,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
    pub radius: f64,
    pub tol: f64,
    pub starts: usize,
    pub max_dim: usize,
    pub force: bool,
    pub declare_nonnegative: bool,
    pub declare_convex: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            samples: DEFAULT_DIRECTIONS,
            radius: DEFAULT_RADIUS,
            tol: DEFAULT_TOL,
            starts: DEFAULT_STARTS,
            max_dim: MAX_DIM,
            force: false,
            declare_nonnegative: false,
            declare_convex: false,
        }
    }
}

impl Options {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidTolerance(self.tol));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) || self.samples == 0 {
            return Err(Error::DegeneratePlan(format!(
                "radius {} with {} samples",
                self.radius, self.samples
            )));
        }
        Ok(())
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        let cap = self.max_dim.min(MAX_DIM);
        if n > cap {
            return Err(Error::DimensionCap { n, cap });
        }
        Ok(())
    }

    fn plan(&self, n: usize) -> Result<SamplePlan> {
        SamplePlan::new(n, self.radius, DEFAULT_LEVELS, self.samples, self.seed)
    }
}

/// Everything up to the exponents; audits are attached separately.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub model: TaylorModel,
    pub poly: NewtonPolyhedron,
    pub hat: NewtonPolyhedron,
    pub fans: Option<(Fan, Fan)>,
    pub fan_exponents: Option<FanExponents>,
    pub origin_critical: bool,
    pub kn: KnReport,
    pub convenience: ConvenienceReport,
    pub nondegeneracy: ModelVerdict,
    pub hypotheses: Hypotheses,
    pub nonneg_certified: bool,
    pub negative_sample: Option<Vec<f64>>,
    pub convex_shape: Option<bool>,
    pub family: TransversalFamily,
    pub d: Rational64,
    pub theta: Gated,
    pub alpha: Gated,
    pub dist: DistReport,
    pub combined: Option<Combined>,
    pub gate_failures: Vec<String>,
    pub warnings: Vec<String>,
    pub audits: Vec<AuditResult>,
    pub audits_forced: bool,
}

impl Analysis {
    pub fn gate_passed(&self) -> bool {
        self.gate_failures.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.gate_passed() {
            exit::OK
        } else {
            exit::GATE
        }
    }

    /// Hat vertex realizing `d(f)`, the monomial of the Ł₀ audit.
    pub fn alpha_witness(&self) -> Option<Exponent> {
        self.hat
            .vertices()
            .iter()
            .filter_map(|a| Some((self.poly.diagonal_exponent(a).ok()??, a)))
            .max_by(|x, y| x.0.cmp(&y.0))
            .map(|(_, a)| a.clone())
    }
}

/// Polyhedron, fan, hypotheses and exponents.
pub fn analyze(model: &TaylorModel, opts: &Options) -> Result<Analysis> {
    opts.validate()?;
    opts.check_dim(model.dim())?;
    let support = model.support();
    let poly = build_polyhedron(&support)?;
    let hat = poly.hat_polyhedron()?;
    let mut warnings = Vec::new();
    let mut gate_failures = Vec::new();

    let origin_critical = model.is_origin_critical();
    if !origin_critical {
        gate_failures.push("f(0) = 0 and ∇f(0) = 0 do not both hold".to_string());
    }

    let (fans, fan_exp) = match resolve(&poly) {
        Ok((s0, s)) => {
            let fe = fan_exponents(&s, &poly)?;
            (Some((s0, s)), Some(fe))
        }
        Err(e) if e.is_resource_cap() => {
            warnings.push(format!("toric resolution skipped: {e}; L and N are unavailable"));
            (None, None)
        }
        Err(e) => return Err(e),
    };

    let kn = check_kn(model, &poly)?;
    if !kn.satisfied {
        gate_failures.push("KN-condition fails".into());
    }
    let conv = convenience(&poly);
    let nondeg = check_model(
        model,
        &poly,
        &CheckOptions {
            tol: opts.tol,
            starts: opts.starts,
            seed: opts.seed,
        },
    )?;
    if !nondeg.nondegenerate {
        gate_failures.push("not Kouchnirenko non-degenerate".into());
    } else if !nondeg.certified {
        warnings.push("non-degeneracy established numerically, not certified".into());
    }

    let nonneg_certified = model.is_certified_nonnegative();
    let declared = opts.declare_nonnegative || opts.declare_convex;
    let mut negative_sample = None;
    if declared && !nonneg_certified {
        negative_sample = find_negative_value(model, DEFAULT_RADIUS, NONNEG_SAMPLES, opts.seed);
        if let Some(x) = &negative_sample {
            gate_failures.push(format!("declared non-negative but f < 0 at {x:?}"));
        }
    }
    let convex = opts.declare_convex.then(|| convex_shape(&poly));
    if convex == Some(false) {
        warnings.push("declared convex but the vertices are not all of the form νᵢeᵢ with νᵢ even".into());
    }

    let hyp = Hypotheses {
        kn: kn.satisfied,
        nondegenerate: nondeg.nondegenerate,
        nonnegative: nonneg_certified || (declared && negative_sample.is_none()),
    };
    let family = transversals(&hat);
    if !family.agree {
        warnings.push("exact and hitting-set transversal families describe different zero sets".into());
    }
    let d = d_of_f(&poly, &hat)?;
    let fan_n = fan_exp.as_ref().map(|f| f.n);
    let fan_l = fan_exp.as_ref().map(|f| f.l);
    let th = theta(&conv, &hyp, fan_n);
    let al = alpha_exponent(&poly, &hat, &hyp, fan_l)?;
    let dist = dist_exponent(&poly, &family, &hyp, fan_n)?;
    if dist.extended {
        warnings.push("paper-formula-extended: ℒ computed with the hitting-set family".into());
    }
    let combined = combined_case(&conv, &family, &hyp, (&th, &al, &dist.value));
    if combined.as_ref().is_some_and(|c| !c.consistent) {
        return Err(Error::Invariant("combined-case exponents disagree with the general path".into()));
    }
    if !model.remainders().is_empty() {
        warnings.push("numeric audits see only the polynomial part".into());
    }

    Ok(Analysis {
        model: model.clone(),
        poly,
        hat,
        fans,
        fan_exponents: fan_exp,
        origin_critical,
        kn,
        convenience: conv,
        nondegeneracy: nondeg,
        hypotheses: hyp,
        nonneg_certified,
        negative_sample,
        convex_shape: convex,
        family,
        d,
        theta: th,
        alpha: al,
        dist,
        combined,
        gate_failures,
        warnings,
        audits: Vec::new(),
        audits_forced: false,
    })
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn chosen(g: &Gated) -> Option<f64> {
    g.value.or(g.fallback).map(to_f64)
}

fn probes(a: &Analysis) -> Vec<crate::verify::Probe> {
    let n = a.model.dim();
    let line = a
        .convenience
        .nu
        .iter()
        .max_by_key(|(i, nu)| (**nu, std::cmp::Reverse(**i)))
        .map(|(i, _)| *i);
    let mut p = standard_probes(n, a.hat.vertices(), line);
    let orders: Vec<Vec<usize>> = a
        .dist
        .per_ranking
        .iter()
        .take(MAX_RANKING_PROBES)
        .map(|r| r.order.clone())
        .collect();
    p.extend(ranking_probes(n, &orders));
    p
}

/// Audits at the reported exponents, or at the fallbacks where a theorem
/// does not apply. Skipped when a gate fails unless `force` is set.
pub fn run_audits(a: &mut Analysis, opts: &Options) -> Result<()> {
    if !a.gate_passed() && !opts.force {
        a.warnings.push("audits skipped: a hypothesis gate failed (use --force)".into());
        return Ok(());
    }
    a.audits_forced = !a.gate_passed();
    let plan = opts.plan(a.model.dim())?.with_probes(probes(a));
    let mut out = Vec::new();
    if let Some(t) = chosen(&a.theta).filter(|t| *t > 0.0 && *t < 1.0) {
        out.push(audit_l1(&a.model, t, &plan)?);
    }
    if let (Some(al), Some(g)) = (chosen(&a.alpha), a.alpha_witness()) {
        out.push(audit_l0(&a.model, &g, al, &plan)?);
    }
    if let Some(l) = chosen(&a.dist.value) {
        out.push(audit_l2(&a.model, l, &a.family, &plan)?);
    }
    out.push(audit_euler_comparison(&a.model, &a.poly, &plan)?);
    out.push(audit_f_vs_g(&a.model, &a.poly, &plan)?);
    for r in &mut out {
        r.forced = a.audits_forced;
    }
    a.audits = out;
    Ok(())
}

/// Exponents to audit in the `verify` command.
#[derive(Clone, Debug, Default)]
pub struct UserExponents {
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub loj: Option<f64>,
}

/// Audits only, at user-supplied exponents, ignoring the gates.
pub fn verify_only(model: &TaylorModel, user: &UserExponents, opts: &Options) -> Result<Vec<AuditResult>> {
    opts.validate()?;
    opts.check_dim(model.dim())?;
    let poly = build_polyhedron(&model.support())?;
    let hat = poly.hat_polyhedron()?;
    let family = transversals(&hat);
    let conv = convenience(&poly);
    let n = model.dim();
    let line = conv.nu.iter().max_by_key(|(i, nu)| (**nu, std::cmp::Reverse(**i))).map(|(i, _)| *i);
    let plan = opts.plan(n)?.with_probes(standard_probes(n, hat.vertices(), line));
    let mut out = Vec::new();
    if let Some(t) = user.theta {
        out.push(audit_l1(model, t, &plan)?);
    }
    if let Some(al) = user.alpha {
        let g = hat
            .vertices()
            .iter()
            .filter_map(|a| Some((poly.diagonal_exponent(a).ok()??, a)))
            .max_by(|x, y| x.0.cmp(&y.0))
            .map(|(_, a)| a.clone())
            .ok_or_else(|| Error::Invariant("no hat vertex".into()))?;
        out.push(audit_l0(model, &g, al, &plan)?);
    }
    if let Some(l) = user.loj {
        out.push(audit_l2(model, l, &family, &plan)?);
    }
    out.push(audit_euler_comparison(model, &poly, &plan)?);
    out.push(audit_f_vs_g(model, &poly, &plan)?);
    Ok(out)
}

pub fn rat(r: Rational64) -> Value {
    json!({"num": r.numer(), "den": r.denom()})
}

fn int(v: i128) -> Value {
    rat(Rational64::from_integer(v as i64))
}

fn one_based(v: impl IntoIterator<Item = usize>) -> Vec<usize> {
    v.into_iter().map(|i| i + 1).collect()
}

fn gated(g: &Gated) -> Value {
    json!({
        "value": g.value.map(rat),
        "applicable": g.value.is_some(),
        "reason": g.reason,
        "fallback": g.fallback.map(rat),
    })
}

fn exps(v: &[Exponent]) -> Value {
    json!(v.iter().map(|e| e.entries().to_vec()).collect::<Vec<_>>())
}

fn polyhedron_json(p: &NewtonPolyhedron) -> Value {
    json!({
        "dim": p.dim(),
        "vertices": exps(p.vertices()),
        "facets": p.facets().iter().map(|f| json!({
            "normal": f.normal.iter().map(|&x| x as i64).collect::<Vec<_>>(),
            "offset": f.offset as i64,
        })).collect::<Vec<_>>(),
    })
}

/// Ray table plus cones with determinants and ray support values.
pub fn fan_json(fan: &Fan, poly: &NewtonPolyhedron) -> Result<Value> {
    let mut cones = Vec::with_capacity(fan.cones.len());
    for c in &fan.cones {
        let det = if c.rays.len() == fan.n {
            Some(fan.abs_det(c)? as i64)
        } else {
            None
        };
        let l: Vec<i64> = c
            .rays
            .iter()
            .map(|&r| poly.support_value(&fan.rays[r]).map(|v| v as i64))
            .collect::<Result<_>>()?;
        cones.push(json!({
            "rays": c.rays,
            "vertex": c.vertex.entries(),
            "det": det,
            "lValues": l,
        }));
    }
    Ok(json!({
        "rays": fan.rays.iter().map(|r| r.iter().map(|&x| x as i64).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "cones": cones,
    }))
}

/// `fan` command payload: Σ₀, Σ, and `(L, N)`.
pub fn fan_report(model: &TaylorModel, opts: &Options) -> Result<Value> {
    opts.check_dim(model.dim())?;
    let poly = build_polyhedron(&model.support())?;
    let (s0, s) = resolve(&poly)?;
    let fe = fan_exponents(&s, &poly)?;
    Ok(json!({
        "input": input_json(model),
        "normalFan": fan_json(&s0, &poly)?,
        "resolution": fan_json(&s, &poly)?,
        "L": int(fe.l),
        "N": int(fe.n),
    }))
}

fn input_json(model: &TaylorModel) -> Value {
    json!({"dim": model.dim(), "text": to_text(model)})
}

pub fn nondegeneracy_json(v: &ModelVerdict) -> Value {
    json!({
        "nondegenerate": v.nondegenerate,
        "certified": v.certified,
        "faces": v.faces.iter().map(|f| json!({
            "normal": f.face.normal.iter().map(|&x| x as i64).collect::<Vec<_>>(),
            "offset": f.face.offset as i64,
            "dim": f.face.dim,
            "points": exps(&f.face.lattice_points),
            "status": f.verdict.status,
            "method": f.verdict.method,
            "witness": f.verdict.witness,
            "residual": f.verdict.residual,
        })).collect::<Vec<_>>(),
    })
}

/// `nondegen` command payload.
pub fn nondegen_report(model: &TaylorModel, opts: &Options) -> Result<(Value, bool)> {
    opts.validate()?;
    opts.check_dim(model.dim())?;
    let poly = build_polyhedron(&model.support())?;
    let v = check_model(
        model,
        &poly,
        &CheckOptions {
            tol: opts.tol,
            starts: opts.starts,
            seed: opts.seed,
        },
    )?;
    Ok((
        json!({"input": input_json(model), "nondegeneracy": nondegeneracy_json(&v)}),
        v.nondegenerate,
    ))
}

pub fn audits_json(audits: &[AuditResult]) -> Value {
    serde_json::to_value(audits).unwrap_or(Value::Null)
}

impl Analysis {
    pub fn to_json(&self) -> Value {
        let conv = &self.convenience;
        let nu: serde_json::Map<String, Value> =
            conv.nu.iter().map(|(i, v)| ((i + 1).to_string(), json!(v))).collect();
        let family = &self.family;
        let kn: Vec<Value> = self
            .kn
            .details
            .iter()
            .map(|d| {
                json!({
                    "remainder": d.remainder,
                    "satisfied": d.satisfied,
                    "violatedFacet": d.violated.as_ref().map(|f| json!({
                        "normal": f.normal.iter().map(|&x| x as i64).collect::<Vec<_>>(),
                        "offset": f.offset as i64,
                    })),
                })
            })
            .collect();
        let rankings: Vec<Value> = self
            .dist
            .per_ranking
            .iter()
            .map(|r| {
                json!({
                    "order": one_based(r.order.iter().copied()),
                    "iRho": r.i_rho + 1,
                    "vRho": exps(&r.v_rho),
                    "lRho": rat(Rational64::from_integer(r.l_rho as i64)),
                })
            })
            .collect();
        let mut flags = Vec::new();
        if self.dist.extended {
            flags.push("paper-formula-extended");
        }
        if !self.nondegeneracy.certified && self.nondegeneracy.nondegenerate {
            flags.push("nondegenerate-numeric");
        }
        if self.audits_forced {
            flags.push("forced");
        }
        let fan = match (&self.fans, &self.fan_exponents) {
            (Some((s0, s)), Some(fe)) => json!({
                "normalFanCones": s0.cones.len(),
                "resolutionRays": s.rays.len(),
                "resolutionCones": s.cones.len(),
                "L": int(fe.l),
                "N": int(fe.n),
            }),
            _ => Value::Null,
        };
        json!({
            "input": input_json(&self.model),
            "polyhedron": polyhedron_json(&self.poly),
            "hatPolyhedron": polyhedron_json(&self.hat),
            "fan": fan,
            "hypotheses": {
                "originCritical": self.origin_critical,
                "knSatisfied": self.kn.satisfied,
                "kn": kn,
                "convenient": conv.convenient,
                "partiallyConvenient": conv.partially_convenient,
                "J": one_based(conv.j.iter().copied()),
                "nu": nu,
                "nondegenerate": self.hypotheses.nondegenerate,
                "nondegenerateCertified": self.nondegeneracy.certified,
                "nonnegative": {
                    "holds": self.hypotheses.nonnegative,
                    "certified": self.nonneg_certified,
                    "negativeSample": self.negative_sample,
                },
                "convexShape": self.convex_shape,
            },
            "nondegeneracy": nondegeneracy_json(&self.nondegeneracy),
            "transversals": {
                "I": one_based(family.i_f.iter().copied()),
                "lambdaExact": family.lambda_exact.iter().map(|j| one_based(j.iter().copied())).collect::<Vec<_>>(),
                "lambdaHitting": family.lambda_hitting.iter().map(|j| one_based(j.iter().copied())).collect::<Vec<_>>(),
                "agree": family.agree,
            },
            "exponents": {
                "theta": gated(&self.theta),
                "alpha": gated(&self.alpha),
                "lojDist": gated(&self.dist.value),
                "d": rat(self.d),
                "nu": conv.nu_max,
                "L": self.fan_exponents.as_ref().map(|f| int(f.l)),
                "N": self.fan_exponents.as_ref().map(|f| int(f.n)),
                "rankings": rankings,
                "combined": self.combined.as_ref().map(|c| json!({
                    "theta": rat(c.theta),
                    "alpha": rat(c.alpha),
                    "lojDist": rat(c.loj_dist),
                    "consistent": c.consistent,
                })),
            },
            "flags": flags,
            "audits": audits_json(&self.audits),
            "gate": {"passed": self.gate_passed(), "failures": self.gate_failures},
            "warnings": self.warnings,
        })
    }

    /// A few lines for the terminal.
    pub fn summary(&self) -> String {
        let show = |g: &Gated| match (g.value, g.fallback) {
            (Some(v), _) => v.to_string(),
            (None, Some(f)) => format!("n/a (fallback {f})"),
            (None, None) => "n/a".into(),
        };
        let mut s = String::new();
        s.push_str(&format!(
            "n = {}, {} vertices, {} facets\n",
            self.model.dim(),
            self.poly.vertices().len(),
            self.poly.facets().len()
        ));
        if let Some(fe) = &self.fan_exponents {
            s.push_str(&format!("L = {}, N = {}\n", fe.l, fe.n));
        }
        s.push_str(&format!(
            "KN: {}, nondegenerate: {}{}, partially convenient: {}\n",
            self.kn.satisfied,
            self.hypotheses.nondegenerate,
            if self.nondegeneracy.nondegenerate && !self.nondegeneracy.certified {
                " (numeric)"
            } else {
                ""
            },
            self.convenience.partially_convenient
        ));
        s.push_str(&format!(
            "theta = {}, alpha = {}, L_dist = {}, d(f) = {}\n",
            show(&self.theta),
            show(&self.alpha),
            show(&self.dist.value),
            self.d
        ));
        for a in &self.audits {
            s.push_str(&format!(
                "audit {:<16} exponent {:<8} min {:.4e} slope {:+.3} {:?}\n",
                a.inequality,
                a.exponent.map_or("-".into(), |e| format!("{e:.4}")),
                a.min_ratio,
                a.empirical_slope,
                a.verdict
            ));
        }
        for f in &self.gate_failures {
            s.push_str(&format!("gate failed: {f}\n"));
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s
    }
}

/// Variable sets as one-based lists, for display.
pub fn index_sets(v: &[Vec<usize>]) -> Vec<BTreeSet<usize>> {
    v.iter().map(|j| j.iter().map(|i| i + 1).collect()).collect()
}
