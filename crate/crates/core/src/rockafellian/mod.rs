//! Concrete Rockafellian families, their conjugates and biconjugates.
//!
//! Sign convention for multipliers: a certificate `λ̄` for `F(x,y) + <λ̄,y> >= 0`
//! corresponds to the dual argument `μ = -λ̄` of `F*`. For constraint-perturbation
//! Rockafellians this forces `λ̄ >= 0`.

mod conjugate;
mod functions;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::linrat::{to_f64, Rational};
use crate::symeig::SymMatrix;

pub use conjugate::{
    biconjugate_at, conjugate_at, conjugate_exact, polyhedral_biconjugate, Biconjugate,
    BiconjugateKind, DualProbeGrid,
};
pub use functions::{AffinePiece, PolyhedralFn, QuadraticFn};
pub(crate) use functions::exact_point;

/// `F(x, y) = f(x)` if `g_i(x) <= y_i` for all `i`, `+inf` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintPerturbation {
    pub f: QuadraticFn,
    pub g: Vec<QuadraticFn>,
}

impl ConstraintPerturbation {
    pub fn new(f: QuadraticFn, g: Vec<QuadraticFn>) -> Result<Self> {
        for gi in &g {
            check_dim("constraint dimension", f.dim(), gi.dim())?;
        }
        Ok(ConstraintPerturbation { f, g })
    }

    pub fn dim_x(&self) -> usize {
        self.f.dim()
    }

    pub fn dim_y(&self) -> usize {
        self.g.len()
    }

    /// All Hessians PSD: then `F` is closed, convex and proper, so `F** = F`.
    pub fn is_convex(&self) -> bool {
        self.f.is_convex() && self.g.iter().all(QuadraticFn::is_convex)
    }

    /// Largest constraint value `max_i g_i(x)`, `-inf` without constraints.
    pub fn max_constraint(&self, x: &[f64]) -> f64 {
        self.g.iter().map(|g| g.eval(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Float data of `f + Σ λ_i g_i - <slope, x> + shift`.
    pub fn lagrangian_f64(
        &self,
        lambda: &[f64],
        slope: &[f64],
        shift: f64,
    ) -> (SymMatrix, Vec<f64>, f64) {
        let mut q = self.f.hessian();
        let mut a = self.f.linear_f64();
        let mut c = self.f.const_f64() + shift;
        for (l, g) in lambda.iter().zip(&self.g) {
            if *l == 0.0 {
                continue;
            }
            q = q.axpy(*l, &g.hessian());
            for (ai, gi) in a.iter_mut().zip(g.linear_f64()) {
                *ai += l * gi;
            }
            c += l * g.const_f64();
        }
        for (ai, s) in a.iter_mut().zip(slope) {
            *ai -= s;
        }
        (q, a, c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rockafellian {
    ExplicitPolyhedral(PolyhedralFn),
    ConstraintPerturbation(ConstraintPerturbation),
}

/// Which computational path an instance takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Every scenario is explicit-polyhedral: exact rational path.
    Polyhedral,
    /// Every scenario is a quadratic constraint perturbation: numerical path.
    Quadratic,
}

impl Rockafellian {
    pub fn family(&self) -> Family {
        match self {
            Rockafellian::ExplicitPolyhedral(_) => Family::Polyhedral,
            Rockafellian::ConstraintPerturbation(_) => Family::Quadratic,
        }
    }

    pub fn as_polyhedral(&self) -> Option<&PolyhedralFn> {
        match self {
            Rockafellian::ExplicitPolyhedral(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_quadratic(&self) -> Option<&ConstraintPerturbation> {
        match self {
            Rockafellian::ConstraintPerturbation(c) => Some(c),
            _ => None,
        }
    }

    /// `F** = F` is known to hold (polyhedral, or convex quadratic data).
    pub fn is_closed_convex(&self) -> bool {
        match self {
            Rockafellian::ExplicitPolyhedral(_) => true,
            Rockafellian::ConstraintPerturbation(c) => c.is_convex(),
        }
    }

    fn check_dims(&self, dim_x: usize, dim_y: usize) -> Result<()> {
        match self {
            Rockafellian::ExplicitPolyhedral(p) => {
                if p.pieces.is_empty() {
                    return Err(Error::InvalidInput(
                        "polyhedral function needs at least one piece".into(),
                    ));
                }
                for piece in &p.pieces {
                    check_dim("affine piece slope", dim_x + dim_y, piece.slope.len())?;
                }
                if let Some(d) = &p.domain {
                    check_dim("polyhedral domain", dim_x + dim_y, d.dim())?;
                }
                Ok(())
            }
            Rockafellian::ConstraintPerturbation(c) => {
                check_dim("objective dimension", dim_x, c.f.dim())?;
                check_dim("number of constraints", dim_y, c.g.len())?;
                for g in &c.g {
                    check_dim("constraint dimension", dim_x, g.dim())?;
                }
                Ok(())
            }
        }
    }
}

/// Exact value at rational arguments.
pub fn evaluate_exact(f: &Rockafellian, x: &[Rational], y: &[Rational]) -> ExtReal<Rational> {
    match f {
        Rockafellian::ExplicitPolyhedral(p) => {
            let mut w = x.to_vec();
            w.extend_from_slice(y);
            p.eval(&w)
        }
        Rockafellian::ConstraintPerturbation(c) => {
            if c.g.iter().zip(y).any(|(g, yi)| g.eval_exact(x) > *yi) {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(c.f.eval_exact(x))
            }
        }
    }
}

/// Value of `F(x, y)`; `+inf` outside the domain.
pub fn evaluate(f: &Rockafellian, x: &[f64], y: &[f64]) -> Result<ExtReal> {
    match f {
        Rockafellian::ExplicitPolyhedral(p) => {
            check_dim("evaluation point", p.joint_dim(), x.len() + y.len())?;
            let v = evaluate_exact(f, &exact_point(x)?, &exact_point(y)?);
            Ok(v.map(|q| to_f64(&q)))
        }
        Rockafellian::ConstraintPerturbation(c) => {
            check_dim("evaluation x", c.dim_x(), x.len())?;
            check_dim("evaluation y", c.dim_y(), y.len())?;
            if c.g.iter().zip(y).any(|(g, yi)| g.eval(x) > *yi) {
                Ok(ExtReal::PosInf)
            } else {
                Ok(ExtReal::Finite(c.f.eval(x)))
            }
        }
    }
}

/// `f + Σ λ_i g_i`, exactly. Multipliers must be nonnegative.
pub fn lagrangian_combine(f: &ConstraintPerturbation, lambda: &[Rational]) -> Result<QuadraticFn> {
    check_dim("multiplier vector", f.dim_y(), lambda.len())?;
    if lambda.iter().any(Signed::is_negative) {
        return Err(Error::InvalidInput("multipliers must be nonnegative".into()));
    }
    let mut out = f.f.clone();
    for (l, g) in lambda.iter().zip(&f.g) {
        if !l.is_zero() {
            out = out.add_scaled(l, g)?;
        }
    }
    Ok(out)
}

/// A finite uncertainty set `U` with one Rockafellian per scenario.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr")]
pub struct RobustInstance {
    pub dim_x: usize,
    pub dim_y: usize,
    pub scenarios: Vec<Rockafellian>,
}

#[derive(Deserialize)]
struct InstanceRepr {
    dim_x: usize,
    dim_y: usize,
    scenarios: Vec<Rockafellian>,
}

impl TryFrom<InstanceRepr> for RobustInstance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        RobustInstance::new(r.dim_x, r.dim_y, r.scenarios)
    }
}

impl RobustInstance {
    pub fn new(dim_x: usize, dim_y: usize, scenarios: Vec<Rockafellian>) -> Result<Self> {
        if dim_x == 0 {
            return Err(Error::InvalidInput("dim_x must be positive".into()));
        }
        if scenarios.is_empty() {
            return Err(Error::InvalidInput("the uncertainty set must be nonempty".into()));
        }
        for s in &scenarios {
            s.check_dims(dim_x, dim_y)?;
        }
        Ok(RobustInstance { dim_x, dim_y, scenarios })
    }

    pub fn single(dim_x: usize, dim_y: usize, f: Rockafellian) -> Result<Self> {
        RobustInstance::new(dim_x, dim_y, vec![f])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances always serialize")
    }

    /// Mixed families are rejected: only uniform instances have a decision path.
    pub fn family(&self) -> Result<Family> {
        let fam = self.scenarios[0].family();
        if self.scenarios.iter().all(|s| s.family() == fam) {
            Ok(fam)
        } else {
            Err(Error::InvalidInput(
                "scenarios must all be explicit_polyhedral or all constraint_perturbation".into(),
            ))
        }
    }

    pub fn is_closed_convex(&self) -> bool {
        self.scenarios.iter().all(Rockafellian::is_closed_convex)
    }

    pub fn quadratic_scenarios(&self) -> Vec<&ConstraintPerturbation> {
        self.scenarios.iter().filter_map(Rockafellian::as_quadratic).collect()
    }

    pub fn polyhedral_scenarios(&self) -> Vec<&PolyhedralFn> {
        self.scenarios.iter().filter_map(Rockafellian::as_polyhedral).collect()
    }

    /// The instance with every scenario replaced by its biconjugate, when that is
    /// available exactly (it is the instance itself for closed convex data).
    pub fn biconjugate_instance(&self) -> Option<RobustInstance> {
        self.is_closed_convex().then(|| self.clone())
    }

    /// Every scenario replaced by `F_u(x, y) - <slope, x> + shift`.
    pub fn tilted(&self, slope: &[Rational], shift: &Rational) -> Result<RobustInstance> {
        check_dim("tilt slope", self.dim_x, slope.len())?;
        let scenarios = self
            .scenarios
            .iter()
            .map(|s| -> Result<Rockafellian> {
                Ok(match s {
                    Rockafellian::ConstraintPerturbation(c) => {
                        Rockafellian::ConstraintPerturbation(ConstraintPerturbation {
                            f: c.f.tilt(slope, shift)?,
                            g: c.g.clone(),
                        })
                    }
                    Rockafellian::ExplicitPolyhedral(p) => {
                        let pieces = p
                            .pieces
                            .iter()
                            .map(|piece| {
                                let mut s = piece.slope.clone();
                                for (si, a) in s.iter_mut().zip(slope) {
                                    *si -= a;
                                }
                                AffinePiece::new(s, &piece.intercept + shift)
                            })
                            .collect();
                        Rockafellian::ExplicitPolyhedral(PolyhedralFn {
                            pieces,
                            domain: p.domain.clone(),
                        })
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        RobustInstance::new(self.dim_x, self.dim_y, scenarios)
    }

    /// Adds scenarios (enlarging `U`).
    pub fn with_extra_scenarios(&self, extra: &[Rockafellian]) -> Result<RobustInstance> {
        let mut s = self.scenarios.clone();
        s.extend_from_slice(extra);
        RobustInstance::new(self.dim_x, self.dim_y, s)
    }
}

/// `p(x) = sup_u F_u(x, 0)` and the biconjugate side `q*(x) = sup_u F_u**(x, 0)`.
/// `q` itself is never materialized; it is reached through `F#` membership.
pub struct DualObjects<'a> {
    pub instance: &'a RobustInstance,
    pub grid: DualProbeGrid,
}

impl<'a> DualObjects<'a> {
    pub fn new(instance: &'a RobustInstance) -> Self {
        DualObjects { instance, grid: DualProbeGrid::default() }
    }

    pub fn p(&self, x: &[f64]) -> Result<ExtReal> {
        let zero = vec![0.0; self.instance.dim_y];
        let mut best = ExtReal::NegInf;
        for s in &self.instance.scenarios {
            let v = evaluate(s, x, &zero)?;
            if v > best {
                best = v;
            }
        }
        Ok(best)
    }

    /// `q*(x)`; exact for closed convex instances, a certified lower bound otherwise.
    pub fn q_star(&self, x: &[f64]) -> Result<Biconjugate> {
        let zero = vec![0.0; self.instance.dim_y];
        let mut best = Biconjugate { value: ExtReal::NegInf, kind: BiconjugateKind::Exact, probes: 0 };
        for s in &self.instance.scenarios {
            let b = biconjugate_at(s, x, &zero, &self.grid)?;
            if b.kind == BiconjugateKind::LowerBound {
                best.kind = BiconjugateKind::LowerBound;
            }
            best.probes += b.probes;
            if b.value > best.value {
                best.value = b.value;
            }
        }
        Ok(best)
    }
}
