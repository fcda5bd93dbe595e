use num_traits::{One, Zero};
use serde::Serialize;

use super::{evaluate, exact_point, ConstraintPerturbation, PolyhedralFn, Rockafellian};
use crate::error::{check_dim, Result};
use crate::ext::ExtReal;
use crate::linrat::{lp_solve, to_f64, LpOutcome, Polyhedron, Rational, Sense};
use crate::symeig::quad_inf;

/// Whether a biconjugate value is exact or only a certified lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BiconjugateKind {
    Exact,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Biconjugate {
    pub value: ExtReal,
    pub kind: BiconjugateKind,
    /// Dual points evaluated (zero for closed-form or LP answers).
    pub probes: usize,
}

/// Multiplier grid used to bound biconjugates of nonconvex quadratic data from below.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualProbeGrid {
    pub lambda_max: f64,
    /// Total probe budget; split evenly across multiplier coordinates.
    pub budget: usize,
}

impl Default for DualProbeGrid {
    fn default() -> Self {
        DualProbeGrid { lambda_max: 10.0, budget: 2000 }
    }
}

impl DualProbeGrid {
    pub fn points(&self, m: usize) -> Vec<Vec<f64>> {
        if m == 0 {
            return vec![Vec::new()];
        }
        let per = ((self.budget.max(2) as f64).powf(1.0 / m as f64).floor() as usize).max(2);
        let step = self.lambda_max / (per - 1) as f64;
        let mut out = vec![Vec::new()];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|p: Vec<f64>| {
                    (0..per).map(move |k| {
                        let mut q = p.clone();
                        q.push(k as f64 * step);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Exact `F*(w')` for an explicit polyhedral function, as the LP
/// `min { -Σ α_k c_k + Σ β_j d_j : Σ α_k s_k + Σ β_j D_j = w', Σ α = 1, α, β >= 0 }`.
pub fn conjugate_exact(f: &PolyhedralFn, w_dual: &[Rational]) -> Result<ExtReal<Rational>> {
    check_dim("conjugate argument", f.joint_dim(), w_dual.len())?;
    if f.domain_is_empty() {
        return Ok(ExtReal::NegInf);
    }
    let (poly, objective) = multiplier_lp(f, Some(w_dual))?;
    Ok(match lp_solve(&objective, &poly, Sense::Min)? {
        LpOutcome::Optimal { value, .. } => ExtReal::Finite(value),
        LpOutcome::Infeasible { .. } => ExtReal::PosInf,
        // Weak duality against any domain point rules this out.
        LpOutcome::Unbounded { .. } => ExtReal::NegInf,
    })
}

/// `F**(w)` through the multiplier LP
/// `max { Σ α_k (s_k·w + c_k) + Σ β_j (D_j·w - d_j) : α ∈ Δ, β >= 0 }`.
/// This never evaluates `F` directly, so it doubles as an independent check.
pub fn polyhedral_biconjugate(f: &PolyhedralFn, w: &[Rational]) -> Result<ExtReal<Rational>> {
    check_dim("biconjugate argument", f.joint_dim(), w.len())?;
    let (poly, _) = multiplier_lp(f, None)?;
    let mut objective: Vec<Rational> = f.pieces.iter().map(|p| p.eval(w)).collect();
    for row in f.domain_rows() {
        objective.push(crate::linrat::dot(&row.normal, w) - &row.offset);
    }
    Ok(match lp_solve(&objective, &poly, Sense::Max)? {
        LpOutcome::Optimal { value, .. } => ExtReal::Finite(value),
        LpOutcome::Unbounded { .. } => ExtReal::PosInf,
        LpOutcome::Infeasible { .. } => ExtReal::NegInf,
    })
}

/// Feasible set over `(α, β)`: simplex and nonnegativity, plus the slope-matching
/// equalities when `w_dual` is given. Also returns the conjugate objective.
fn multiplier_lp(
    f: &PolyhedralFn,
    w_dual: Option<&[Rational]>,
) -> Result<(Polyhedron, Vec<Rational>)> {
    let k = f.pieces.len();
    let rows = f.domain_rows();
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
    if let Some(w) = w_dual {
        for (c, wc) in w.iter().enumerate() {
            let mut row: Vec<Rational> = f.pieces.iter().map(|p| p.slope[c].clone()).collect();
            row.extend(rows.iter().map(|r| r.normal[c].clone()));
            poly.push_eq(row, wc.clone())?;
        }
    }
    let mut objective: Vec<Rational> = f.pieces.iter().map(|p| -&p.intercept).collect();
    objective.extend(rows.iter().map(|r| r.offset.clone()));
    Ok((poly, objective))
}

/// `F*(x', μ)`. For constraint perturbations this is `-inf_x L(x)` with
/// `L = f + Σ (-μ_i) g_i - <x', ·>` when `μ <= 0`, and `+inf` otherwise.
pub fn conjugate_at(f: &Rockafellian, x_dual: &[f64], mu: &[f64]) -> Result<ExtReal> {
    match f {
        Rockafellian::ExplicitPolyhedral(p) => {
            let mut w = exact_point(x_dual)?;
            w.extend(exact_point(mu)?);
            Ok(conjugate_exact(p, &w)?.map(|v| to_f64(&v)))
        }
        Rockafellian::ConstraintPerturbation(c) => {
            check_dim("conjugate x argument", c.dim_x(), x_dual.len())?;
            check_dim("conjugate y argument", c.dim_y(), mu.len())?;
            cp_conjugate(c, x_dual, mu)
        }
    }
}

fn cp_conjugate(c: &ConstraintPerturbation, x_dual: &[f64], mu: &[f64]) -> Result<ExtReal> {
    if mu.iter().any(|&m| m > 0.0) {
        return Ok(ExtReal::PosInf);
    }
    let lambda: Vec<f64> = mu.iter().map(|m| -m).collect();
    let (q, a, k) = c.lagrangian_f64(&lambda, x_dual, 0.0);
    Ok(quad_inf(&q, &a, k)?.neg())
}

/// `F**(x, y)`: exact for polyhedral data (LP) and convex quadratic data (`F** = F`);
/// a lower bound from multiplier probes for nonconvex quadratic data.
pub fn biconjugate_at(
    f: &Rockafellian,
    x: &[f64],
    y: &[f64],
    grid: &DualProbeGrid,
) -> Result<Biconjugate> {
    match f {
        Rockafellian::ExplicitPolyhedral(p) => {
            let mut w = exact_point(x)?;
            w.extend(exact_point(y)?);
            let v = polyhedral_biconjugate(p, &w)?;
            Ok(Biconjugate { value: v.map(|q| to_f64(&q)), kind: BiconjugateKind::Exact, probes: 0 })
        }
        Rockafellian::ConstraintPerturbation(c) if c.is_convex() => Ok(Biconjugate {
            value: evaluate(f, x, y)?,
            kind: BiconjugateKind::Exact,
            probes: 0,
        }),
        Rockafellian::ConstraintPerturbation(c) => {
            check_dim("biconjugate x", c.dim_x(), x.len())?;
            check_dim("biconjugate y", c.dim_y(), y.len())?;
            let mut best = ExtReal::NegInf;
            let mut probes = 0;
            for lambda in grid.points(c.dim_y()) {
                // Tangent slope of the Lagrangian at x: the best slope if L is convex.
                let mut slope = c.f.gradient(x);
                for (l, g) in lambda.iter().zip(&c.g) {
                    for (s, gi) in slope.iter_mut().zip(g.gradient(x)) {
                        *s += l * gi;
                    }
                }
                let mu: Vec<f64> = lambda.iter().map(|l| -l).collect();
                let conj = cp_conjugate(c, &slope, &mu)?;
                probes += 1;
                let ExtReal::Finite(cv) = conj else { continue };
                let pairing: f64 = slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
                    + mu.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
                let v = ExtReal::Finite(pairing - cv);
                if v > best {
                    best = v;
                }
            }
            Ok(Biconjugate { value: best, kind: BiconjugateKind::LowerBound, probes })
        }
    }
}
