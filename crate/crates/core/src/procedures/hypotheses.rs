//! Sufficient and numeric tests of the closure hypotheses behind the duality theorems.

use num_traits::Zero;
use serde::Serialize;

use super::rhs::RhsFunction;
use super::{constraint_minimum, convex_tol, sample_points, sup_at_zero_numeric, sup_epigraph_at_zero};
use crate::config::Config;
use crate::decimal;
use crate::error::{check_dim, Result};
use crate::ext::ExtReal;
use crate::geometry::build_f_sharp;
use crate::linrat::{format_rational, vec_to_f64, Rational};
use crate::rockafellian::{biconjugate_at, DualProbeGrid, Family, RobustInstance};
use crate::verdict::Truth;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    /// A structural sufficient condition is met (or the test is exact).
    HoldsSufficient,
    /// Holds up to tolerance on sampled evidence.
    HoldsNumeric,
    /// Fails; a witness is attached.
    FailsWitness,
    Unknown,
    /// Needs a right-hand side, or a single scenario.
    NotApplicable,
}

impl HypothesisStatus {
    pub fn holds(self) -> bool {
        matches!(self, HypothesisStatus::HoldsSufficient | HypothesisStatus::HoldsNumeric)
    }

    pub fn truth(self) -> Truth {
        match self {
            HypothesisStatus::HoldsSufficient | HypothesisStatus::HoldsNumeric => Truth::True,
            HypothesisStatus::FailsWitness => Truth::False,
            HypothesisStatus::Unknown | HypothesisStatus::NotApplicable => Truth::Unknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisWitness {
    /// A primal point `x`, or a dual pair `(a', h*(a'))`.
    pub point: Vec<String>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisFlag {
    pub id: String,
    pub status: HypothesisStatus,
    pub evidence: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<HypothesisWitness>,
}

impl HypothesisFlag {
    fn new(id: &str, status: HypothesisStatus, evidence: impl Into<String>) -> Self {
        HypothesisFlag { id: id.into(), status, evidence: evidence.into(), witness: None }
    }

    fn renamed(&self, id: &str, prefix: &str) -> Self {
        HypothesisFlag { id: id.into(), evidence: format!("{prefix}{}", self.evidence), ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub flags: Vec<HypothesisFlag>,
}

impl HypothesisReport {
    pub fn get(&self, id: &str) -> Option<&HypothesisFlag> {
        self.flags.iter().find(|f| f.id == id)
    }

    pub fn status(&self, id: &str) -> HypothesisStatus {
        self.get(id).map_or(HypothesisStatus::NotApplicable, |f| f.status)
    }
}

/// H1–H6. Without `h` the right-hand-side hypotheses are not applicable; the
/// single-scenario forms apply only when `|U| = 1`.
pub fn check_hypotheses(
    instance: &RobustInstance,
    h: Option<&RhsFunction>,
    cfg: &Config,
) -> Result<HypothesisReport> {
    if let Some(h) = h {
        h.validate()?;
        check_dim("rhs dimension", instance.dim_x, h.dim())?;
    }
    let single = instance.scenarios.len() == 1;
    let not_single = |id: &str| HypothesisFlag::new(id, HypothesisStatus::NotApplicable, "needs a single scenario");
    let no_rhs = |id: &str| HypothesisFlag::new(id, HypothesisStatus::NotApplicable, "needs a right-hand side h");

    let zero = vec![Rational::zero(); instance.dim_x];
    let h1 = closure_equality(instance, &[zero], cfg, "H1")?;
    let h2 = if single { h1.renamed("H2", "") } else { not_single("H2") };
    let mut flags = vec![h1, h2];
    match h {
        None => flags.extend(["H3", "H4", "H5", "H6"].map(no_rhs)),
        Some(h) => {
            let probes = h.probes(cfg.probes, cfg.instance_seed(instance));
            let h3 = closure_equality(instance, &probes, cfg, "H3")?;
            let h4 = f_sharp_closed(instance, h, &probes, cfg)?;
            let (h5, h6) = if single {
                (h3.renamed("H5", ""), h4.renamed("H6", "F# is convex for one scenario; "))
            } else {
                (not_single("H5"), not_single("H6"))
            };
            flags.extend([h3, h4, h5, h6]);
        }
    }
    Ok(HypothesisReport { flags })
}

/// `inf_x (sup_u F_u(x,0) - <a',x>) = inf_x (sup_u F_u**(x,0) - <a',x>) ≠ +inf` for
/// each slope `a'`.
fn closure_equality(
    instance: &RobustInstance,
    slopes: &[Vec<Rational>],
    cfg: &Config,
    id: &str,
) -> Result<HypothesisFlag> {
    match instance.family()? {
        Family::Polyhedral => {
            // polyhedral scenarios are closed convex: F** = F, so only finiteness matters
            if sup_epigraph_at_zero(instance)?.is_empty() {
                let mut f = HypothesisFlag::new(
                    id,
                    HypothesisStatus::FailsWitness,
                    "no x has sup_u F_u(x,0) < +inf: the infimum is +inf",
                );
                f.witness = Some(HypothesisWitness { point: Vec::new(), value: "+inf".into() });
                return Ok(f);
            }
            Ok(HypothesisFlag::new(
                id,
                HypothesisStatus::HoldsSufficient,
                "polyhedral scenarios equal their biconjugates and some x has a finite value",
            ))
        }
        Family::Quadratic => {
            let (gmin, a) = constraint_minimum(instance, cfg);
            let convex = instance.quadratic_scenarios().iter().all(|c| convex_tol(c, cfg.tol_psd));
            if gmin > cfg.tol_boundary {
                if convex {
                    let mut f = HypothesisFlag::new(
                        id,
                        HypothesisStatus::FailsWitness,
                        "convex constraints have no common feasible point: the infimum is +inf",
                    );
                    f.witness = Some(HypothesisWitness {
                        point: a.iter().map(|v| decimal::fmt(*v)).collect(),
                        value: "+inf".into(),
                    });
                    return Ok(f);
                }
                return Ok(HypothesisFlag::new(id, HypothesisStatus::Unknown, "no feasible point found"));
            }
            if gmin > 0.0 {
                return Ok(HypothesisFlag::new(
                    id,
                    HypothesisStatus::Unknown,
                    "feasibility undecided within the boundary band",
                ));
            }
            let feasible = format!("a = [{}]", a.iter().map(|v| decimal::fmt(*v)).collect::<Vec<_>>().join(", "));
            if convex {
                return Ok(HypothesisFlag::new(
                    id,
                    HypothesisStatus::HoldsSufficient,
                    format!("every scenario is convex and {feasible} is feasible"),
                ));
            }
            numeric_closure_gap(instance, slopes, &a, cfg, id, &feasible)
        }
    }
}

/// Compares sampled infima of `sup F` and of the biconjugate lower bounds.
fn numeric_closure_gap(
    instance: &RobustInstance,
    slopes: &[Vec<Rational>],
    feasible: &[f64],
    cfg: &Config,
    id: &str,
    feasible_note: &str,
) -> Result<HypothesisFlag> {
    let scen = instance.quadratic_scenarios();
    let mut pts = sample_points(instance.dim_x, cfg.box_bound, 150, cfg.instance_seed(instance));
    pts.push(feasible.to_vec());
    let grid = DualProbeGrid { lambda_max: cfg.lambda_max, budget: 200 };
    let zero_y = vec![0.0; instance.dim_y];
    // lower bounds do not depend on the slope: compute once per point
    let mut lower = Vec::with_capacity(pts.len());
    for x in &pts {
        let mut best = f64::NEG_INFINITY;
        for s in &instance.scenarios {
            best = best.max(biconjugate_at(s, x, &zero_y, &grid)?.value.to_f64());
        }
        lower.push(best);
    }
    let mut worst_gap = 0.0f64;
    for a in slopes {
        let a = vec_to_f64(a);
        let tilt = |x: &[f64]| x.iter().zip(&a).map(|(p, q)| p * q).sum::<f64>();
        let v_f = pts.iter().map(|x| sup_at_zero_numeric(&scen, x) - tilt(x)).fold(f64::INFINITY, f64::min);
        let v_b = pts.iter().zip(&lower).map(|(x, l)| l - tilt(x)).fold(f64::INFINITY, f64::min);
        let gap = (v_f - v_b) / (1.0 + v_f.abs());
        worst_gap = worst_gap.max(if gap.is_nan() { f64::INFINITY } else { gap });
    }
    let status = if worst_gap <= cfg.tol_sub {
        HypothesisStatus::HoldsNumeric
    } else {
        HypothesisStatus::Unknown
    };
    Ok(HypothesisFlag::new(
        id,
        status,
        format!(
            "nonconvex data; {feasible_note}; sampled relative gap between the infima of sup F and of the biconjugate lower bounds: {}",
            decimal::fmt(worst_gap)
        ),
    ))
}

/// F# closed convex regarding `gph h*`, probed at `(a', h*(a'))`.
fn f_sharp_closed(
    instance: &RobustInstance,
    h: &RhsFunction,
    probes: &[Vec<Rational>],
    cfg: &Config,
) -> Result<HypothesisFlag> {
    let model = build_f_sharp(instance, cfg)?;
    let exact = instance.family()? == Family::Polyhedral;
    let mut unknown = 0;
    for a in probes {
        let ExtReal::Finite(s) = h.conjugate(a)? else { continue };
        match model.closed_convex_regarding(&[(a.clone(), s.clone())])? {
            Truth::False => {
                let mut f = HypothesisFlag::new(
                    "H4",
                    HypothesisStatus::FailsWitness,
                    "a point of gph h* lies in the closed convex hull of F# but not in F#",
                );
                let mut point: Vec<String> = a.iter().map(format_rational).collect();
                point.push(format_rational(&s));
                f.witness = Some(HypothesisWitness { point, value: format_rational(&s) });
                return Ok(f);
            }
            Truth::Unknown => unknown += 1,
            Truth::True => {}
        }
    }
    let n = probes.len();
    Ok(if unknown > 0 {
        HypothesisFlag::new("H4", HypothesisStatus::Unknown, format!("{unknown} of {n} probes undecided"))
    } else if exact {
        HypothesisFlag::new("H4", HypothesisStatus::HoldsSufficient, format!("decided exactly at {n} probes of gph h*"))
    } else {
        HypothesisFlag::new("H4", HypothesisStatus::HoldsNumeric, format!("checked numerically at {n} probes of gph h*"))
    })
}
