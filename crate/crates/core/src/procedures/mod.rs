//! Statement checkers, certificate searches, hypothesis tests and theorem validators.
//!
//! Polyhedral instances are decided exactly by LP. Quadratic instances go through
//! numerical search and return three-valued verdicts; `Holds` without `certified`
//! means "no violation found".

pub(crate) mod ascent;
mod hypotheses;
pub(crate) mod primal;
mod rhs;
mod validate;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;
use crate::decimal;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::linrat::{
    lp_solve, rat, serde_qvec, to_f64, vec_to_f64, LpOutcome, Polyhedron,
    Rational, Sense,
};
use crate::rockafellian::{ConstraintPerturbation, Family, PolyhedralFn, RobustInstance};
use crate::verdict::Verdict;

pub use ascent::AscentResult;
pub use hypotheses::{check_hypotheses, HypothesisFlag, HypothesisReport, HypothesisStatus};
pub use primal::SearchStats;
pub use rhs::{check_a_h, certify_b_h, CertifyBH, CheckAH, ProbeResult, RhsFunction};
pub use validate::{validate_equivalence, Side, Theorem, ValidationReport, ValidationStatus};

use ascent::{maximize_psi, AscentParams, PencilData};
use primal::{minimize_max, sample_points, QuadF64, SearchPlan};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimalWitness {
    pub x: Vec<f64>,
    /// `sup_u F_u(x, 0)` at the witness.
    pub value: f64,
    /// Exact coordinates on the polyhedral path.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_qvec")]
    pub x_exact: Option<Vec<Rational>>,
    /// Direction along which the value decreases without bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<f64>>,
}

fn opt_qvec<S: serde::Serializer>(
    v: &Option<Vec<Rational>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => serde_qvec::serialize(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactLp,
    NumericalSearch,
    MultiplierCertificate,
    HomogenizedAscent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckA {
    pub verdict: Verdict,
    /// The verdict is backed by a proof (exact LP, convexity, or a multiplier).
    pub certified: bool,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PrimalWitness>,
    /// Smallest value of the search objective (quadratic path) or exact infimum.
    #[serde(with = "decimal::scalar")]
    pub min_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchStats>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// 0-based scenario index.
    pub scenario: usize,
    #[serde(with = "decimal::vec")]
    pub lambda: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_qvec")]
    pub lambda_exact: Option<Vec<Rational>>,
    /// `λ_min` of the homogenized Lagrangian, or the exact LP margin.
    pub quality: ExtReal,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioAttempt {
    pub scenario: usize,
    pub certified: bool,
    pub best: ExtReal,
    #[serde(with = "decimal::vec")]
    pub lambda: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyB {
    pub certificate: Option<Certificate>,
    pub attempts: Vec<ScenarioAttempt>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubstitutionCheck {
    pub passed: bool,
    /// Smallest `F(x,y) + <λ,y>` seen (exact infimum on the polyhedral path).
    pub margin: ExtReal,
    pub samples: usize,
}

fn check_family(instance: &RobustInstance, cfg: &Config) -> Result<Family> {
    let fam = instance.family()?;
    if fam == Family::Quadratic && cfg.exact_only {
        return Err(Error::InvalidInput(
            "exact-only mode: quadratic instances need the numerical path".into(),
        ));
    }
    Ok(fam)
}

/// Decides `sup_u F_u(x, 0) >= 0` for all `x`.
pub fn check_a(instance: &RobustInstance, cfg: &Config) -> Result<CheckA> {
    match check_family(instance, cfg)? {
        Family::Polyhedral => check_a_exact(instance),
        Family::Quadratic => check_a_numeric(instance, cfg),
    }
}

/// Rows of `{ (x, t) : F_u(x, 0) <= t for all u }`.
pub(crate) fn sup_epigraph_at_zero(instance: &RobustInstance) -> Result<Polyhedron> {
    let n = instance.dim_x;
    let mut p = Polyhedron::universe(n + 1)?;
    for f in instance.polyhedral_scenarios() {
        for piece in &f.pieces {
            let mut normal: Vec<Rational> = piece.slope[..n].to_vec();
            normal.push(-Rational::one());
            p.push_le(normal, -&piece.intercept)?;
        }
        for row in domain_rows(f) {
            let mut normal: Vec<Rational> = row.normal[..n].to_vec();
            normal.push(Rational::zero());
            p.push_le(normal, row.offset.clone())?;
        }
    }
    Ok(p)
}

fn domain_rows(f: &PolyhedralFn) -> &[crate::linrat::Halfspace] {
    f.domain.as_ref().map_or(&[], |d| d.rows())
}

fn sup_at_zero_exact(instance: &RobustInstance, x: &[Rational]) -> ExtReal<Rational> {
    let zero = vec![Rational::zero(); instance.dim_y];
    let mut best = ExtReal::NegInf;
    for s in &instance.scenarios {
        let v = crate::rockafellian::evaluate_exact(s, x, &zero);
        if v > best {
            best = v;
        }
    }
    best
}

fn check_a_exact(instance: &RobustInstance) -> Result<CheckA> {
    let n = instance.dim_x;
    let epi = sup_epigraph_at_zero(instance)?;
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    let mut out = CheckA {
        verdict: Verdict::Holds,
        certified: true,
        method: Method::ExactLp,
        witness: None,
        min_value: f64::INFINITY,
        search: None,
        notes: Vec::new(),
    };
    match lp_solve(&objective, &epi, Sense::Min)? {
        LpOutcome::Infeasible { .. } => {
            out.notes.push("no x has a finite value: the supremum is +inf everywhere".into());
        }
        LpOutcome::Optimal { value, point, .. } => {
            out.min_value = to_f64(&value);
            if value.is_negative() {
                let x = point[..n].to_vec();
                out.verdict = Verdict::Violated;
                out.witness = Some(PrimalWitness {
                    x: vec_to_f64(&x),
                    value: to_f64(&value),
                    x_exact: Some(x),
                    ray: None,
                });
            }
        }
        LpOutcome::Unbounded { point, ray } => {
            out.min_value = f64::NEG_INFINITY;
            out.verdict = Verdict::Violated;
            // walk along the ray until the value is negative
            let mut s = Rational::one();
            let x = loop {
                let x: Vec<Rational> =
                    point[..n].iter().zip(&ray[..n]).map(|(p, r)| p + &s * r).collect();
                match sup_at_zero_exact(instance, &x) {
                    ExtReal::Finite(v) if v.is_negative() => break x,
                    _ => s *= rat(2),
                }
            };
            let value = sup_at_zero_exact(instance, &x).map(|v| to_f64(&v)).to_f64();
            out.witness = Some(PrimalWitness {
                x: vec_to_f64(&x),
                value,
                x_exact: Some(x),
                ray: Some(vec_to_f64(&ray[..n])),
            });
            out.notes.push("unbounded below".into());
        }
    }
    Ok(out)
}

/// Max over scenarios of the objective at `x` if every constraint holds.
pub(crate) fn sup_at_zero_numeric(scen: &[&ConstraintPerturbation], x: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for c in scen {
        if c.g.iter().any(|g| g.eval(x) > 0.0) {
            return f64::INFINITY;
        }
        best = best.max(c.f.eval(x));
    }
    best
}

pub(crate) fn quad_f64(q: &crate::rockafellian::QuadraticFn) -> QuadF64 {
    QuadF64 { q: q.hessian(), a: q.linear_f64(), c: q.const_f64() }
}

fn check_a_numeric(instance: &RobustInstance, cfg: &Config) -> Result<CheckA> {
    let scen = instance.quadratic_scenarios();
    let seed = cfg.instance_seed(instance);
    let mut pieces = Vec::new();
    for c in &scen {
        pieces.push(quad_f64(&c.f));
        pieces.extend(c.g.iter().map(quad_f64));
    }
    let plan = SearchPlan {
        dim: instance.dim_x,
        bound: cfg.box_bound,
        grid_budget: cfg.grid_budget,
        starts: cfg.multistarts,
        seed,
        stop_below: -cfg.tol_boundary,
    };
    let res = minimize_max(&pieces, &plan);
    let convex = scen.iter().all(|c| convex_tol(c, cfg.tol_psd));
    let mut out = CheckA {
        verdict: Verdict::Unknown,
        certified: false,
        method: Method::NumericalSearch,
        witness: None,
        min_value: res.value,
        search: Some(res.stats.clone()),
        notes: Vec::new(),
    };

    let witness_ok = |x: &[f64]| {
        let v = sup_at_zero_numeric(&scen, x);
        (v < -cfg.tol_witness).then_some(v)
    };
    let mut witness = witness_ok(&res.argmin).map(|v| (res.argmin.clone(), v));
    if witness.is_none() {
        // feasible grid points where the max of the objectives is strictly negative
        for x in sample_points(instance.dim_x, cfg.box_bound, cfg.grid_budget, seed) {
            if let Some(v) = witness_ok(&x) {
                if witness.as_ref().is_none_or(|(_, b)| v < *b) {
                    witness = Some((x, v));
                }
            }
        }
    }
    if let Some((x, value)) = witness {
        out.verdict = Verdict::Violated;
        out.certified = true;
        out.witness = Some(PrimalWitness { x, value, x_exact: None, ray: None });
        return Ok(out);
    }
    if res.value > cfg.tol_boundary {
        out.verdict = Verdict::Holds;
        out.certified = convex;
        if !convex {
            out.notes.push("nonconvex data: no violation found by the search".into());
        }
        return Ok(out);
    }
    let cb = certify_b_numeric(instance, cfg)?;
    if cb.certificate.is_some() {
        out.verdict = Verdict::Holds;
        out.certified = true;
        out.method = Method::MultiplierCertificate;
        out.notes.push("minimum within the boundary band; settled by a multiplier certificate".into());
    } else {
        out.notes.push(format!(
            "search minimum {} lies within ±{} of zero and no multiplier was found",
            decimal::fmt(res.value),
            cfg.tol_boundary
        ));
    }
    Ok(out)
}

/// `min_x max_{u,i} g_{u,i}(x)` with its argmin; `-inf` when there are no constraints.
/// A value `<= 0` exhibits a point feasible for every scenario.
pub(crate) fn constraint_minimum(instance: &RobustInstance, cfg: &Config) -> (f64, Vec<f64>) {
    let pieces: Vec<QuadF64> = instance
        .quadratic_scenarios()
        .iter()
        .flat_map(|c| c.g.iter().map(quad_f64))
        .collect();
    if pieces.is_empty() {
        return (f64::NEG_INFINITY, vec![0.0; instance.dim_x]);
    }
    let plan = SearchPlan {
        dim: instance.dim_x,
        bound: cfg.box_bound,
        grid_budget: cfg.grid_budget,
        starts: cfg.multistarts,
        seed: cfg.instance_seed(instance),
        stop_below: f64::NEG_INFINITY,
    };
    let r = minimize_max(&pieces, &plan);
    (r.value, r.argmin)
}

pub(crate) fn convex_tol(c: &ConstraintPerturbation, tol: f64) -> bool {
    let psd = |q: &crate::rockafellian::QuadraticFn| {
        q.dim() == 0 || crate::symeig::lambda_min(&q.hessian()).is_ok_and(|l| l >= -tol)
    };
    psd(&c.f) && c.g.iter().all(psd)
}

/// Searches `(ū, λ̄)` with `F_ū(x,y) + <λ̄,y> >= 0` for all `(x, y)`; lowest index wins.
pub fn certify_b(instance: &RobustInstance, cfg: &Config) -> Result<CertifyB> {
    match check_family(instance, cfg)? {
        Family::Polyhedral => certify_b_exact(instance),
        Family::Quadratic => certify_b_numeric(instance, cfg),
    }
}

fn certify_b_exact(instance: &RobustInstance) -> Result<CertifyB> {
    let mut attempts = Vec::new();
    for (u, f) in instance.polyhedral_scenarios().into_iter().enumerate() {
        let (margin, lambda) = polyhedral_multiplier(f, instance.dim_x, instance.dim_y)?;
        let certified = match &margin {
            Some(ExtReal::Finite(m)) => !m.is_negative(),
            Some(ExtReal::PosInf) => true,
            _ => false,
        };
        let lam_f = lambda.as_ref().map(|l| vec_to_f64(l)).unwrap_or_default();
        attempts.push(ScenarioAttempt {
            scenario: u,
            certified,
            best: match &margin {
                Some(ExtReal::Finite(m)) => ExtReal::Finite(to_f64(m)),
                Some(other) => other.clone().map(|m| to_f64(&m)),
                None => ExtReal::NegInf,
            },
            lambda: lam_f.clone(),
            note: margin.is_none().then(|| "no multiplier balances the x-slopes".to_string()),
        });
        if certified {
            let cert = Certificate {
                scenario: u,
                lambda: lam_f,
                lambda_exact: lambda,
                quality: margin.unwrap().map(|m| to_f64(&m)),
                method: Method::ExactLp,
            };
            return Ok(CertifyB { certificate: Some(cert), attempts });
        }
    }
    Ok(CertifyB { certificate: None, attempts })
}

/// Best margin `-F*(0, -λ)` over `λ`, with the maximizing `λ`; `None` if `F*(0, ·)`
/// is `+inf` for every `λ`.
fn polyhedral_multiplier(
    f: &PolyhedralFn,
    dim_x: usize,
    dim_y: usize,
) -> Result<(Option<ExtReal<Rational>>, Option<Vec<Rational>>)> {
    if f.domain_is_empty() {
        return Ok((Some(ExtReal::PosInf), Some(vec![Rational::zero(); dim_y])));
    }
    let k = f.pieces.len();
    let rows = domain_rows(f);
    let n = k + rows.len();
    let mut poly = Polyhedron::universe(n)?;
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = -Rational::one();
        poly.push_le(e, Rational::zero())?;
    }
    let mut simplex = vec![Rational::zero(); n];
    for v in simplex.iter_mut().take(k) {
        *v = Rational::one();
    }
    poly.push_eq(simplex, Rational::one())?;
    let column = |c: usize| -> Vec<Rational> {
        let mut row: Vec<Rational> = f.pieces.iter().map(|p| p.slope[c].clone()).collect();
        row.extend(rows.iter().map(|r| r.normal[c].clone()));
        row
    };
    for c in 0..dim_x {
        poly.push_eq(column(c), Rational::zero())?;
    }
    let mut objective: Vec<Rational> = f.pieces.iter().map(|p| -&p.intercept).collect();
    objective.extend(rows.iter().map(|r| r.offset.clone()));
    let multiplier = |z: &[Rational]| -> Vec<Rational> {
        (dim_x..dim_x + dim_y).map(|c| -crate::linrat::dot(&column(c), z)).collect()
    };
    match lp_solve(&objective, &poly, Sense::Min)? {
        LpOutcome::Infeasible { .. } => Ok((None, None)),
        LpOutcome::Unbounded { point, ray } => {
            // the margin grows without bound along the ray: step until it is >= 1
            let at = crate::linrat::dot(&objective, &point);
            let slope = crate::linrat::dot(&objective, &ray);
            let steps = ((&at + Rational::one()) / -slope).ceil().max(Rational::zero());
            let z: Vec<Rational> = point.iter().zip(&ray).map(|(p, r)| p + &steps * r).collect();
            let value = crate::linrat::dot(&objective, &z);
            Ok((Some(ExtReal::Finite(-value)), Some(multiplier(&z))))
        }
        LpOutcome::Optimal { value, point, .. } => Ok((Some(ExtReal::Finite(-value)), Some(multiplier(&point)))),
    }
}

fn certify_b_numeric(instance: &RobustInstance, cfg: &Config) -> Result<CertifyB> {
    let seed = cfg.instance_seed(instance);
    let slope = vec![0.0; instance.dim_x];
    certify_quadratic(instance, cfg, seed, &slope, 0.0)
}

/// Ascent over each scenario of `f_u - <slope, x> + shift + Σ λ_i g_{u,i}`.
pub(crate) fn certify_quadratic(
    instance: &RobustInstance,
    cfg: &Config,
    seed: u64,
    slope: &[f64],
    shift: f64,
) -> Result<CertifyB> {
    let mut attempts = Vec::new();
    for (u, cp) in instance.quadratic_scenarios().into_iter().enumerate() {
        let data = PencilData::new(cp, slope, shift)?;
        let params = AscentParams {
            iters: cfg.ascent_iters,
            restarts: cfg.restarts,
            lambda_max: cfg.lambda_max,
            seed: seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(u as u64 + 1)),
            target: 0.0,
        };
        let r = maximize_psi(&data, &params);
        let certified = r.psi >= -cfg.tol_cert;
        attempts.push(ScenarioAttempt {
            scenario: u,
            certified,
            best: ExtReal::Finite(r.psi),
            lambda: r.lambda.clone(),
            note: (!certified).then(|| {
                format!(
                    "best homogenized eigenvalue {} after {} evaluations; scenario skipped",
                    decimal::fmt(r.psi),
                    r.evaluations
                )
            }),
        });
        if certified {
            let cert = Certificate {
                scenario: u,
                lambda: r.lambda,
                lambda_exact: None,
                quality: ExtReal::Finite(r.psi),
                method: Method::HomogenizedAscent,
            };
            return Ok(CertifyB { certificate: Some(cert), attempts });
        }
    }
    Ok(CertifyB { certificate: None, attempts })
}

/// Re-checks `F_ū(x,y) + <λ̄,y> >= 0`: exactly by LP on the polyhedral path, by
/// sampling `(x, y)` with `y >= g(x)` on the quadratic path.
pub fn verify_certificate(
    instance: &RobustInstance,
    cert: &Certificate,
    cfg: &Config,
) -> Result<SubstitutionCheck> {
    let scenario = instance
        .scenarios
        .get(cert.scenario)
        .ok_or_else(|| Error::InvalidInput("certificate scenario out of range".into()))?;
    match scenario {
        crate::rockafellian::Rockafellian::ExplicitPolyhedral(f) => {
            let lambda = match &cert.lambda_exact {
                Some(l) => l.clone(),
                None => crate::linrat::vec_from_f64(&cert.lambda)?,
            };
            let margin = exact_substitution_margin(f, &lambda)?;
            let passed = !matches!(&margin, ExtReal::Finite(m) if m.is_negative())
                && margin != ExtReal::NegInf;
            Ok(SubstitutionCheck { passed, margin: margin.map(|m| to_f64(&m)), samples: 0 })
        }
        crate::rockafellian::Rockafellian::ConstraintPerturbation(c) => {
            if cert.lambda.iter().any(|l| *l < 0.0) {
                return Ok(SubstitutionCheck {
                    passed: false,
                    margin: ExtReal::NegInf,
                    samples: 0,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.instance_seed(instance) ^ 0xc0ffee);
            let b = cfg.box_bound;
            let mut worst = f64::INFINITY;
            for k in 0..cfg.substitution_samples {
                let x: Vec<f64> = (0..c.dim_x()).map(|_| rng.gen_range(-b..=b)).collect();
                let mut v = c.f.eval(&x);
                for (l, g) in cert.lambda.iter().zip(&c.g) {
                    let slack = if k % 2 == 0 { 0.0 } else { rng.gen_range(0.0..=2.0) };
                    v += l * (g.eval(&x) + slack);
                }
                worst = worst.min(v);
            }
            Ok(SubstitutionCheck {
                passed: worst >= -cfg.tol_sub,
                margin: ExtReal::Finite(worst),
                samples: cfg.substitution_samples,
            })
        }
    }
}

/// `inf_{x,y} F(x,y) + <λ, y>` by LP over the epigraph.
fn exact_substitution_margin(f: &PolyhedralFn, lambda: &[Rational]) -> Result<ExtReal<Rational>> {
    let d = f.joint_dim();
    let dim_x = d - lambda.len();
    let epi = f.epigraph();
    let mut objective = vec![Rational::zero(); d + 1];
    for (o, l) in objective[dim_x..d].iter_mut().zip(lambda) {
        *o = l.clone();
    }
    objective[d] = Rational::one();
    Ok(match lp_solve(&objective, &epi, Sense::Min)? {
        LpOutcome::Optimal { value, .. } => ExtReal::Finite(value),
        LpOutcome::Infeasible { .. } => ExtReal::PosInf,
        LpOutcome::Unbounded { .. } => ExtReal::NegInf,
    })
}
