//! Epigraph projections `𝒢 ⊂ Y × R`, their cones and hulls, and the dual set `F#`.
//!
//! Polyhedral sources are projected exactly (Fourier–Motzkin) and queried with exact
//! LPs. Quadratic sources are represented by a sampled cloud `(g(x), f(x))` plus the
//! recession rays `e_i` (each `y_i` upward) and `(0, 1)`; sampled answers are
//! three-valued.

mod fsharp;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::config::Config;
use crate::error::Result;
use crate::linrat::{
    cone_member, fm_project, from_f64, lp_solve, ConeModel, ConeSemantics, LpOutcome, Polyhedron,
    Rational, Sense,
};
use crate::procedures::{certify_b, check_a, primal::sample_points, PrimalWitness};
use crate::rockafellian::{ConstraintPerturbation, Family, PolyhedralFn, Rockafellian, RobustInstance};
use crate::verdict::{Truth, Verdict};

pub use fsharp::{build_f_sharp, FSharpMembership, FSharpModel};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleMeta {
    pub box_bound: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpiProjection {
    /// H-representation in `(y, r)`.
    Exact { dim_y: usize, poly: Polyhedron },
    /// The epigraph (hence the projection) is empty: the source is `+inf` everywhere.
    Empty { dim_y: usize },
    /// Inner approximation: `conv` is never taken; membership is "dominates a sample".
    Sampled { dim_y: usize, points: Vec<Vec<f64>>, meta: SampleMeta },
}

impl EpiProjection {
    pub fn dim_y(&self) -> usize {
        match self {
            EpiProjection::Exact { dim_y, .. }
            | EpiProjection::Empty { dim_y }
            | EpiProjection::Sampled { dim_y, .. } => *dim_y,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, EpiProjection::Empty { .. })
    }

    /// Exact membership, or `True`/`Unknown` from samples.
    pub fn contains(&self, p: &[f64]) -> Result<Truth> {
        match self {
            EpiProjection::Empty { .. } => Ok(Truth::False),
            EpiProjection::Exact { poly, .. } => {
                let q = p.iter().map(|&v| from_f64(v)).collect::<Result<Vec<_>>>()?;
                Ok(Truth::from_bool(poly.contains(&q)))
            }
            EpiProjection::Sampled { points, .. } => {
                let hit = points.iter().any(|s| s.iter().zip(p).all(|(a, b)| a <= b));
                Ok(if hit { Truth::True } else { Truth::Unknown })
            }
        }
    }

    /// Generator model `conv(V) + cone(R)`; sampled clouds carry their recession rays.
    pub fn generators(&self) -> Result<ConeModel> {
        let d = self.dim_y() + 1;
        match self {
            EpiProjection::Empty { .. } => Ok(ConeModel::empty(d)),
            EpiProjection::Exact { poly, .. } => poly.generators(),
            EpiProjection::Sampled { points, .. } => {
                let pts = points
                    .iter()
                    .map(|p| p.iter().map(|&v| from_f64(v)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                ConeModel::new(d, pts, upward_rays(d))
            }
        }
    }
}

fn upward_rays(d: usize) -> Vec<Vec<Rational>> {
    (0..d)
        .map(|i| {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::one();
            e
        })
        .collect()
}

/// `(0_Y, -1)`.
pub fn descent_point(dim_y: usize) -> Vec<Rational> {
    let mut p = vec![Rational::zero(); dim_y + 1];
    p[dim_y] = -Rational::one();
    p
}

/// `epi(sup_u F_u)` in `(x, y, r)`: the intersection of the scenario epigraphs.
fn sup_epigraph(fs: &[&PolyhedralFn]) -> Result<Polyhedron> {
    let mut p = fs[0].epigraph();
    for f in &fs[1..] {
        p = p.intersect(&f.epigraph())?;
    }
    Ok(p)
}

fn project_exact(fs: &[&PolyhedralFn], dim_x: usize, dim_y: usize) -> Result<EpiProjection> {
    let epi = sup_epigraph(fs)?;
    if epi.is_empty() {
        return Ok(EpiProjection::Empty { dim_y });
    }
    let keep: Vec<usize> = (dim_x..dim_x + dim_y + 1).collect();
    Ok(EpiProjection::Exact { dim_y, poly: fm_project(&epi, &keep)? })
}

/// Samples `(max_u g_u(x), max_u f_u(x))` over the search box.
fn project_sampled(
    scen: &[&ConstraintPerturbation],
    dim_x: usize,
    dim_y: usize,
    cfg: &Config,
    seed: u64,
) -> EpiProjection {
    let xs = sample_points(dim_x, cfg.box_bound, cfg.cloud_samples, seed);
    let points = xs
        .iter()
        .map(|x| {
            let mut p: Vec<f64> = (0..dim_y)
                .map(|i| scen.iter().map(|c| c.g[i].eval(x)).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            p.push(scen.iter().map(|c| c.f.eval(x)).fold(f64::NEG_INFINITY, f64::max));
            p
        })
        .collect();
    EpiProjection::Sampled {
        dim_y,
        points,
        meta: SampleMeta { box_bound: cfg.box_bound, samples: xs.len(), seed },
    }
}

/// Projection of the epigraph of a single Rockafellian.
pub fn epi_projection(
    f: &Rockafellian,
    dim_x: usize,
    dim_y: usize,
    cfg: &Config,
) -> Result<EpiProjection> {
    let inst = RobustInstance::single(dim_x, dim_y, f.clone())?;
    epi_projection_sup(&inst, cfg)
}

/// Projection `𝒢` of `epi(sup_u F_u)`. The `x` is shared across scenarios, so this can be
/// strictly smaller than the intersection of the per-scenario projections.
pub fn epi_projection_sup(instance: &RobustInstance, cfg: &Config) -> Result<EpiProjection> {
    match instance.family()? {
        Family::Polyhedral => {
            project_exact(&instance.polyhedral_scenarios(), instance.dim_x, instance.dim_y)
        }
        Family::Quadratic => Ok(project_sampled(
            &instance.quadratic_scenarios(),
            instance.dim_x,
            instance.dim_y,
            cfg,
            cfg.instance_seed(instance),
        )),
    }
}

/// Per-scenario projections `F_u`.
pub fn scenario_projections(instance: &RobustInstance, cfg: &Config) -> Result<Vec<EpiProjection>> {
    instance
        .scenarios
        .iter()
        .map(|s| epi_projection(s, instance.dim_x, instance.dim_y, cfg))
        .collect()
}

/// `p ∈ R+* · 𝒢` for an H-represented `𝒢`: `max θ` with `A (θ p) <= b`, `0 <= θ <= 1`.
fn positive_scaling_member(poly: &Polyhedron, p: &[Rational]) -> Result<bool> {
    let mut lp = Polyhedron::universe(1)?;
    for row in poly.rows() {
        lp.push_le(vec![crate::linrat::dot(&row.normal, p)], row.offset.clone())?;
    }
    lp.push_le(vec![Rational::one()], Rational::one())?;
    lp.push_le(vec![-Rational::one()], Rational::zero())?;
    Ok(match lp_solve(&[Rational::one()], &lp, Sense::Max)? {
        LpOutcome::Optimal { value, .. } => value.is_positive(),
        LpOutcome::Unbounded { .. } => true,
        LpOutcome::Infeasible { .. } => false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma21Report {
    /// `G(x, 0) >= 0` for all `x`.
    pub primal: Truth,
    /// `(0, -1) ∉ R+* 𝒢`.
    pub positive_scaling: Truth,
    /// `(0, -1) ∉ R+ 𝒢`.
    pub raw_cone: Truth,
    pub agree: Truth,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PrimalWitness>,
}

/// The three equivalent forms of nonnegativity of `G = sup_u F_u` on `y = 0`:
/// a primal minimization and two cone-membership routes through `𝒢`.
pub fn lemma21_check(instance: &RobustInstance, cfg: &Config) -> Result<Lemma21Report> {
    let a = check_a(instance, cfg)?;
    let primal = a.verdict.truth();
    let target = descent_point(instance.dim_y);
    let proj = epi_projection_sup(instance, cfg)?;
    let (positive_scaling, raw_cone, exact) = match &proj {
        EpiProjection::Empty { .. } => (Truth::True, Truth::True, true),
        EpiProjection::Exact { poly, .. } => {
            let ii = !positive_scaling_member(poly, &target)?;
            let iii = !cone_member(&target, &poly.generators()?, ConeSemantics::RawCone)?;
            (Truth::from_bool(ii), Truth::from_bool(iii), true)
        }
        EpiProjection::Sampled { .. } => {
            let v = sampled_raw_descent(&proj, instance, cfg)?.not();
            (v, v, false)
        }
    };
    let all = [primal, positive_scaling, raw_cone];
    let agree = if all.iter().all(|t| !t.is_unknown()) {
        Truth::from_bool(all.iter().all(|t| *t == primal))
    } else if all.contains(&Truth::True) && all.contains(&Truth::False) {
        Truth::False
    } else {
        Truth::Unknown
    };
    Ok(Lemma21Report { primal, positive_scaling, raw_cone, agree, exact, witness: a.witness })
}

/// `(0, -1) ∈ R+ 𝒢` from a sampled cloud: a sample `s` with `s_y <= 0`, `s_r < 0`
/// proves membership; a multiplier separating `𝒢` from the ray proves the opposite.
fn sampled_raw_descent(
    proj: &EpiProjection,
    instance: &RobustInstance,
    cfg: &Config,
) -> Result<Truth> {
    if let EpiProjection::Sampled { points, dim_y, .. } = proj {
        let hit = points
            .iter()
            .any(|s| s[..*dim_y].iter().all(|v| *v <= 0.0) && s[*dim_y] < -cfg.tol_witness);
        if hit {
            return Ok(Truth::True);
        }
    }
    if certify_b(instance, cfg)?.certificate.is_some() {
        return Ok(Truth::False);
    }
    Ok(Truth::Unknown)
}

/// `true` iff every probe has the same answer under hull and raw-cone semantics.
pub fn closed_convex_regarding(c: &ConeModel, probes: &[Vec<Rational>]) -> Result<bool> {
    for p in probes {
        let hull = cone_member(p, c, ConeSemantics::ClosedHull)?;
        let raw = cone_member(p, c, ConeSemantics::RawCone)?;
        if hull != raw {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The sets behind the robust primal characterization at `(0_Y, -1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    /// `(0, -1) ∈ cl co(R+ F_u)` for each scenario.
    pub hull_per_scenario: Vec<Truth>,
    /// `(0, -1) ∈ ∩_u cl co(R+ F_u)`.
    pub hull_all: Truth,
    /// `(0, -1) ∈ R+ 𝒢` with `𝒢` the projection of `epi(sup_u F_u)`.
    pub raw_sup: Truth,
    /// `(0, -1) ∈ R+ (∩_u F_u)`; only computed exactly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_intersection: Option<bool>,
    /// `(0, -1) ∉ hull_all \ raw_sup`: equivalent to validity of the procedure.
    pub condition: Truth,
    /// The same test with the intersection of projections in place of `𝒢`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition_intersection: Option<bool>,
}

pub fn robust_gap_check(instance: &RobustInstance, cfg: &Config) -> Result<GapReport> {
    if instance.family()? == Family::Polyhedral {
        return exact_gap(instance);
    }
    let projs = scenario_projections(instance, cfg)?;
    let mut hull_per_scenario = Vec::new();
    for (u, proj) in projs.iter().enumerate() {
        hull_per_scenario.push(sampled_hull_member(proj, &instance.scenarios[u], instance, cfg)?);
    }
    let hull_all = Truth::all(hull_per_scenario.iter().copied());
    let sup = epi_projection_sup(instance, cfg)?;
    let from_samples = sampled_raw_descent(&sup, instance, cfg)?;
    let raw_sup = if from_samples.is_unknown() {
        // the ray meets R+ 𝒢 exactly when the primal statement fails
        match check_a(instance, cfg)?.verdict {
            Verdict::Holds => Truth::False,
            Verdict::Violated => Truth::True,
            Verdict::Unknown => Truth::Unknown,
        }
    } else {
        from_samples
    };
    Ok(GapReport {
        hull_per_scenario,
        hull_all,
        raw_sup,
        raw_intersection: None,
        condition: hull_all.not().or(raw_sup),
        condition_intersection: None,
    })
}

/// Polyhedral data: every membership is one LP on the epigraphs in `(x, y, r)`, so
/// nothing is projected.
fn exact_gap(instance: &RobustInstance) -> Result<GapReport> {
    let target = descent_point(instance.dim_y);
    let fs = instance.polyhedral_scenarios();
    let epis: Vec<Polyhedron> = fs.iter().map(|f| f.epigraph()).collect();
    let nonempty: Vec<bool> = epis.iter().map(|e| !e.is_empty()).collect();
    let mut hull_per_scenario = Vec::new();
    for (e, ok) in epis.iter().zip(&nonempty) {
        let member = *ok && lifted_member(std::slice::from_ref(e), instance.dim_x, &target, ConeSemantics::ClosedHull)?;
        hull_per_scenario.push(Truth::from_bool(member));
    }
    let hull_all = Truth::all(hull_per_scenario.iter().copied());
    let sup = sup_epigraph(&fs)?;
    let raw_sup = !sup.is_empty() && lifted_member(&[sup], instance.dim_x, &target, ConeSemantics::RawCone)?;
    let raw_inter =
        nonempty.iter().all(|b| *b) && lifted_member(&epis, instance.dim_x, &target, ConeSemantics::RawCone)?;
    let h = hull_all == Truth::True;
    Ok(GapReport {
        hull_per_scenario,
        hull_all,
        raw_sup: Truth::from_bool(raw_sup),
        raw_intersection: Some(raw_inter),
        condition: Truth::from_bool(!h || raw_sup),
        condition_intersection: Some(!h || raw_inter),
    })
}

/// `p` against the cone over the projection onto `(y, r)` of the blocks, each block a
/// polyhedron in `(x, y, r)` with its own copy of `x`:
/// * raw cone: some `t > 0` and `x_u` with `(x_u, t p)` in every block;
/// * closed hull (one nonempty block): some `t >= 0`, `x` with `M (x, p) <= t c`, the
///   homogenized system, whose projection is already closed.
fn lifted_member(blocks: &[Polyhedron], dim_x: usize, p: &[Rational], semantics: ConeSemantics) -> Result<bool> {
    let k = blocks.len();
    let nvar = k * dim_x + 1;
    let t = nvar - 1;
    let mut lp = Polyhedron::universe(nvar)?;
    for (u, block) in blocks.iter().enumerate() {
        for row in block.rows() {
            let mut n = vec![Rational::zero(); nvar];
            n[u * dim_x..(u + 1) * dim_x].clone_from_slice(&row.normal[..dim_x]);
            let np = crate::linrat::dot(&row.normal[dim_x..], p);
            match semantics {
                ConeSemantics::RawCone => {
                    n[t] = np;
                    lp.push_le(n, row.offset.clone())?;
                }
                ConeSemantics::ClosedHull => {
                    n[t] = -&row.offset;
                    lp.push_le(n, -np)?;
                }
            }
        }
    }
    let mut neg_t = vec![Rational::zero(); nvar];
    neg_t[t] = -Rational::one();
    lp.push_le(neg_t, Rational::zero())?;
    let mut objective = vec![Rational::zero(); nvar];
    objective[t] = Rational::one();
    Ok(match lp_solve(&objective, &lp, Sense::Max)? {
        LpOutcome::Infeasible { .. } => false,
        LpOutcome::Unbounded { .. } => true,
        LpOutcome::Optimal { value, .. } => semantics == ConeSemantics::ClosedHull || value.is_positive(),
    })
}

/// Hull membership of `(0, -1)` for a sampled scenario projection: a conic
/// combination of samples proves it; a multiplier for the scenario refutes it.
fn sampled_hull_member(
    proj: &EpiProjection,
    scenario: &Rockafellian,
    instance: &RobustInstance,
    cfg: &Config,
) -> Result<Truth> {
    if cloud_hull_contains_descent(proj, 600)? {
        return Ok(Truth::True);
    }
    let single = RobustInstance::single(instance.dim_x, instance.dim_y, scenario.clone())?;
    if certify_b(&single, cfg)?.certificate.is_some() {
        return Ok(Truth::False);
    }
    Ok(Truth::Unknown)
}

/// Exact LP on (a pruned subset of) the sample cloud.
pub(crate) fn cloud_hull_contains_descent(proj: &EpiProjection, cap: usize) -> Result<bool> {
    let EpiProjection::Sampled { points, dim_y, .. } = proj else {
        return Ok(false);
    };
    // samples dominating the origin never help to reach (0, -1)
    let mut useful: Vec<&Vec<f64>> = points.iter().filter(|p| p.iter().any(|v| *v < 0.0)).collect();
    useful.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    useful.dedup();
    if useful.is_empty() {
        return Ok(false);
    }
    let stride = useful.len().div_ceil(cap);
    let chosen: Vec<Vec<Rational>> = useful
        .iter()
        .step_by(stride.max(1))
        .map(|p| p.iter().map(|&v| from_f64(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let model = ConeModel::new(dim_y + 1, chosen, upward_rays(dim_y + 1))?;
    cone_member(&descent_point(*dim_y), &model, ConeSemantics::ClosedHull)
}
