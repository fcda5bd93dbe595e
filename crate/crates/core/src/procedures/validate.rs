//! Evaluates both sides of each duality theorem and checks the asserted direction.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;

use super::hypotheses::{check_hypotheses, HypothesisFlag, HypothesisStatus};
use super::rhs::{certify_b_h, check_a_h, RhsFunction};
use super::{certify_b, check_a, Certificate, PrimalWitness};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::geometry::{build_f_sharp, robust_gap_check, GapReport};
use crate::linrat::Rational;
use crate::rockafellian::{Family, RobustInstance};
use crate::verdict::{Truth, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Robust validity ⟺ the descent ray avoids the hull-minus-cone gap.
    T2_1,
    /// Single Rockafellian: validity ⟺ `R+ F` closed convex regarding `(0,-1)`.
    C2_1,
    /// As above when `cl(R+ F)` is convex: closedness regarding `(0,-1)` suffices.
    C2_2,
    /// Validity, validity of the biconjugate family, closedness of `F#` at `(0,0)`.
    T3_1,
    C3_1,
    /// Closure hypotheses imply validity of the right-hand-side procedure.
    T4_1,
    C4_1,
}

impl Theorem {
    pub const ALL: [Theorem; 7] =
        [Theorem::T2_1, Theorem::C2_1, Theorem::C2_2, Theorem::T3_1, Theorem::C3_1, Theorem::T4_1, Theorem::C4_1];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T2_1 => "t2_1",
            Theorem::C2_1 => "c2_1",
            Theorem::C2_2 => "c2_2",
            Theorem::T3_1 => "t3_1",
            Theorem::C3_1 => "c3_1",
            Theorem::T4_1 => "t4_1",
            Theorem::C4_1 => "c4_1",
        }
    }

    fn single_scenario(self) -> bool {
        matches!(self, Theorem::C2_1 | Theorem::C2_2 | Theorem::C3_1 | Theorem::C4_1)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['.', '-'], "_");
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown theorem '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValidationStatus {
    Agree,
    /// The computed sides contradict the theorem: an implementation defect.
    Disagree,
    /// The hypotheses fail, so the theorem asserts nothing.
    Vacuous,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Side {
    pub statement: String,
    pub truth: Truth,
}

fn side(statement: &str, truth: Truth) -> Side {
    Side { statement: statement.into(), truth }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub theorem: Theorem,
    pub sides: Vec<Side>,
    pub left: Truth,
    pub right: Truth,
    /// The asserted implication or equivalence holds between the computed sides.
    pub agreement: Truth,
    pub status: ValidationStatus,
    pub fatal: bool,
    /// The procedure is valid only because its premise fails.
    pub vacuous: bool,
    pub hypotheses: Vec<HypothesisFlag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PrimalWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    fn new(theorem: Theorem) -> Self {
        ValidationReport {
            theorem,
            sides: Vec::new(),
            left: Truth::Unknown,
            right: Truth::Unknown,
            agreement: Truth::Unknown,
            status: ValidationStatus::Unknown,
            fatal: false,
            vacuous: false,
            hypotheses: Vec::new(),
            gap: None,
            witness: None,
            certificate: None,
            notes: Vec::new(),
        }
    }

    fn settle(&mut self, hypotheses_hold: Truth) {
        self.status = match (hypotheses_hold, self.agreement) {
            (Truth::False, _) => ValidationStatus::Vacuous,
            (_, Truth::True) => ValidationStatus::Agree,
            (Truth::True, Truth::False) => ValidationStatus::Disagree,
            _ => ValidationStatus::Unknown,
        };
        self.fatal = self.status == ValidationStatus::Disagree;
    }
}

pub fn validate_equivalence(
    instance: &RobustInstance,
    theorem: Theorem,
    h: Option<&RhsFunction>,
    cfg: &Config,
) -> Result<ValidationReport> {
    if theorem.single_scenario() && instance.scenarios.len() != 1 {
        return Err(Error::InvalidInput(format!("{theorem} needs exactly one scenario")));
    }
    match theorem {
        Theorem::T2_1 | Theorem::C2_1 | Theorem::C2_2 => primal_geometry(instance, theorem, cfg),
        Theorem::T3_1 | Theorem::C3_1 => dual_geometry(instance, theorem, cfg),
        Theorem::T4_1 | Theorem::C4_1 => {
            let h = h.ok_or_else(|| Error::InvalidInput(format!("{theorem} needs a right-hand side h")))?;
            rhs_procedure(instance, theorem, h, cfg)
        }
    }
}

/// `(A) ⇒ (B)` with both statements evaluated.
fn procedure_validity(instance: &RobustInstance, cfg: &Config, r: &mut ValidationReport) -> Result<(Truth, Truth)> {
    let a = check_a(instance, cfg)?;
    let b = certify_b(instance, cfg)?;
    let at = a.verdict.truth();
    let bt = Truth::from_bool(b.certificate.is_some());
    if a.verdict == Verdict::Holds && !a.certified {
        r.notes.push("(A) holds on search evidence only".into());
    }
    if instance.family()? == Family::Quadratic && b.certificate.is_none() {
        r.notes.push("(B): no multiplier found by ascent; treated as failing".into());
    }
    r.vacuous = at == Truth::False;
    if r.vacuous {
        r.notes.push("(A) fails, so the procedure is valid vacuously".into());
    }
    r.witness = a.witness;
    r.certificate = b.certificate;
    r.sides.push(side("(A) sup_u F_u(x,0) >= 0 for all x", at));
    r.sides.push(side("(B) some scenario admits a multiplier", bt));
    Ok((at, bt))
}

fn primal_geometry(instance: &RobustInstance, theorem: Theorem, cfg: &Config) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(theorem);
    let (a, b) = procedure_validity(instance, cfg, &mut r)?;
    let validity = a.implies(b);
    let gap = robust_gap_check(instance, cfg)?;
    let mut hyp = Truth::True;
    let right = if theorem == Theorem::C2_2 {
        let convex_closure = instance.family()? == Family::Polyhedral || instance.is_closed_convex();
        let status = if convex_closure { HypothesisStatus::HoldsSufficient } else { HypothesisStatus::Unknown };
        r.hypotheses.push(HypothesisFlag {
            id: "closure_convex".into(),
            status,
            evidence: if convex_closure {
                "the generated cone of a polyhedron or convex set has convex closure".into()
            } else {
                "not decided for nonconvex data".into()
            },
            witness: None,
        });
        hyp = status.truth();
        // closure equals the closed convex hull under the hypothesis
        if gap.raw_sup == Truth::True {
            Truth::True
        } else if convex_closure {
            gap.condition
        } else {
            Truth::Unknown
        }
    } else {
        gap.condition
    };
    r.sides.push(side("procedure valid: (A) implies (B)", validity));
    r.sides.push(side("(0,-1) in every closed convex conic hull of F_u", gap.hull_all));
    r.sides.push(side("(0,-1) in the cone generated by the projection of epi(sup_u F_u)", gap.raw_sup));
    r.sides.push(side("descent ray avoids the hull-minus-cone gap", right));
    if let Some(lit) = gap.condition_intersection {
        if Truth::from_bool(lit) != right && !right.is_unknown() {
            r.notes.push(
                "the gap test with the intersection of per-scenario projections gives a different answer here"
                    .into(),
            );
        }
    }
    r.left = validity;
    r.right = right;
    r.agreement = validity.equals(right);
    r.gap = Some(gap);
    r.settle(hyp);
    Ok(r)
}

fn dual_geometry(instance: &RobustInstance, theorem: Theorem, cfg: &Config) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(theorem);
    let (a, b) = procedure_validity(instance, cfg, &mut r)?;
    let valid = a.implies(b);
    let a_bi = match instance.biconjugate_instance() {
        Some(bi) => check_a(&bi, cfg)?.verdict.truth(),
        // F** <= F: a violation of (A) is a violation of (A**)
        None if a == Truth::False => Truth::False,
        None => Truth::Unknown,
    };
    let valid_bi = a_bi.implies(b);
    let model = build_f_sharp(instance, cfg)?;
    let origin = (vec![Rational::zero(); instance.dim_x], Rational::zero());
    let closed = model.closed_convex_regarding(&[origin])?;
    let hyps = check_hypotheses(instance, None, cfg)?;
    let id = if theorem == Theorem::T3_1 { "H1" } else { "H2" };
    let h = hyps.status(id);
    r.hypotheses.push(hyps.get(id).expect("flag present").clone());

    r.sides.push(side("(i) procedure valid", valid));
    r.sides.push(side("(A**) biconjugate statement", a_bi));
    r.sides.push(side("(ii) biconjugate procedure valid", valid_bi));
    r.sides.push(side("(iii) F# closed convex regarding (0,0)", closed));
    let mut agreement = valid.implies(valid_bi).and(valid_bi.implies(closed));
    if h.holds() {
        agreement = agreement.and(closed.implies(valid));
    } else {
        r.notes.push(format!("{id} not established: only the forward chain is asserted"));
    }
    r.left = valid;
    r.right = closed;
    r.agreement = agreement;
    // the forward chain needs no hypothesis
    r.settle(Truth::True);
    Ok(r)
}

fn rhs_procedure(
    instance: &RobustInstance,
    theorem: Theorem,
    h: &RhsFunction,
    cfg: &Config,
) -> Result<ValidationReport> {
    let mut r = ValidationReport::new(theorem);
    let hyps = check_hypotheses(instance, Some(h), cfg)?;
    let ids = if theorem == Theorem::T4_1 { ["H3", "H4"] } else { ["H5", "H6"] };
    let hold = Truth::all(ids.iter().map(|id| hyps.status(id).truth()));
    r.hypotheses = ids.iter().filter_map(|id| hyps.get(id).cloned()).collect();

    let ah = check_a_h(instance, h, cfg)?;
    let bh = certify_b_h(instance, h, cfg)?;
    let at = ah.verdict.truth();
    let bt = Truth::from_bool(bh.valid_on_probes);
    let valid = at.implies(bt);
    r.vacuous = at == Truth::False;
    r.witness = ah.witness;
    r.notes.push(format!("(B_h) evaluated on {} probes of dom h*", bh.probes.len()));
    r.sides.push(side("hypotheses hold", hold));
    r.sides.push(side("(A_h) sup_u F_u(x,0) >= h(x) for all x", at));
    r.sides.push(side("(B_h) on probes", bt));
    r.sides.push(side("procedure valid on probes", valid));
    r.left = hold;
    r.right = valid;
    r.agreement = hold.implies(valid);
    r.settle(hold);
    Ok(r)
}
