//! `F# = ∪_u proj_{X*×R} epi F_u*`: pairs `(x', s)` with `F_u*(x', μ) <= s` for some
//! scenario `u` and dual vector `μ`.

use num_traits::Zero;
use serde::Serialize;

use crate::config::Config;
use crate::error::{check_dim, Result};
use crate::linrat::{to_f64, vec_to_f64, ConeModel, Rational};
use crate::procedures::{certify_quadratic, check_a, constraint_minimum};
use crate::rockafellian::{Family, PolyhedralFn, RobustInstance};
use crate::verdict::{Truth, Verdict};

#[derive(Clone, Debug)]
pub enum FSharpModel {
    /// One generator model per scenario in `(x', s)`.
    Exact { dim_x: usize, scenarios: Vec<ConeModel> },
    /// Membership by multiplier search, non-membership by a primal witness.
    Quadratic { instance: RobustInstance, cfg: Config },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FSharpMembership {
    pub member: Truth,
    /// First scenario whose conjugate epigraph contains the point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<usize>,
    /// Multiplier `λ = -μ` realizing membership on the quadratic path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
}

/// Projection of `epi F*`: `conv{(s_k^X, -c_k)} + cone{(D_j^X, d_j), (0, 1)}`.
fn conjugate_projection(f: &PolyhedralFn, dim_x: usize) -> Result<ConeModel> {
    let d = dim_x + 1;
    let unit = |i: usize, sign: i64| {
        let mut e = vec![Rational::zero(); d];
        e[i] = Rational::from_integer(sign.into());
        e
    };
    if f.domain_is_empty() {
        // F* ≡ -inf: every (x', s)
        let rays = (0..d).flat_map(|i| [unit(i, 1), unit(i, -1)]).collect();
        return ConeModel::new(d, vec![vec![Rational::zero(); d]], rays);
    }
    let points = f
        .pieces
        .iter()
        .map(|p| {
            let mut v = p.slope[..dim_x].to_vec();
            v.push(-&p.intercept);
            v
        })
        .collect();
    let mut rays: Vec<Vec<Rational>> = f
        .domain_rows()
        .iter()
        .map(|r| {
            let mut v = r.normal[..dim_x].to_vec();
            v.push(r.offset.clone());
            v
        })
        .collect();
    rays.push(unit(dim_x, 1));
    ConeModel::new(d, points, rays)
}

pub fn build_f_sharp(instance: &RobustInstance, cfg: &Config) -> Result<FSharpModel> {
    Ok(match instance.family()? {
        Family::Polyhedral => FSharpModel::Exact {
            dim_x: instance.dim_x,
            scenarios: instance
                .polyhedral_scenarios()
                .into_iter()
                .map(|f| conjugate_projection(f, instance.dim_x))
                .collect::<Result<_>>()?,
        },
        Family::Quadratic => FSharpModel::Quadratic { instance: instance.clone(), cfg: cfg.clone() },
    })
}

impl FSharpModel {
    pub fn dim_x(&self) -> usize {
        match self {
            FSharpModel::Exact { dim_x, .. } => *dim_x,
            FSharpModel::Quadratic { instance, .. } => instance.dim_x,
        }
    }

    /// Union of the scenario generators: the closed convex hull of `F#`.
    pub fn hull_model(&self) -> Option<ConeModel> {
        match self {
            FSharpModel::Exact { dim_x, scenarios } => {
                let mut acc = ConeModel::empty(dim_x + 1);
                for s in scenarios {
                    acc = acc.union(s).expect("same dimension");
                }
                Some(acc)
            }
            FSharpModel::Quadratic { .. } => None,
        }
    }

    pub fn contains(&self, x_dual: &[Rational], s: &Rational) -> Result<FSharpMembership> {
        check_dim("F# point", self.dim_x(), x_dual.len())?;
        match self {
            FSharpModel::Exact { scenarios, .. } => {
                let mut p = x_dual.to_vec();
                p.push(s.clone());
                for (u, m) in scenarios.iter().enumerate() {
                    if m.contains(&p)? {
                        return Ok(FSharpMembership { member: Truth::True, scenario: Some(u), lambda: None });
                    }
                }
                Ok(FSharpMembership { member: Truth::False, scenario: None, lambda: None })
            }
            FSharpModel::Quadratic { instance, cfg } => {
                let slope = vec_to_f64(x_dual);
                let mut all_refuted = true;
                for (u, scen) in instance.scenarios.iter().enumerate() {
                    let single = RobustInstance::single(instance.dim_x, instance.dim_y, scen.clone())?;
                    let seed = cfg.instance_seed(&single);
                    let b = certify_quadratic(&single, cfg, seed, &slope, to_f64(s))?;
                    if let Some(c) = b.certificate {
                        return Ok(FSharpMembership {
                            member: Truth::True,
                            scenario: Some(u),
                            lambda: Some(c.lambda),
                        });
                    }
                    let tilted = single.tilted(x_dual, s)?;
                    if check_a(&tilted, cfg)?.verdict != Verdict::Violated {
                        all_refuted = false;
                    }
                }
                let member = if all_refuted { Truth::False } else { Truth::Unknown };
                Ok(FSharpMembership { member, scenario: None, lambda: None })
            }
        }
    }

    /// Membership in `cl co F#`. For convex quadratic data this is `epi p*`, i.e.
    /// `sup_u F_u(x,0) >= <x',x> - s` for all `x`.
    pub fn hull_contains(&self, x_dual: &[Rational], s: &Rational) -> Result<Truth> {
        check_dim("F# point", self.dim_x(), x_dual.len())?;
        match self {
            FSharpModel::Exact { .. } => {
                let mut p = x_dual.to_vec();
                p.push(s.clone());
                Ok(Truth::from_bool(self.hull_model().expect("exact").contains(&p)?))
            }
            FSharpModel::Quadratic { instance, cfg } => {
                if self.contains(x_dual, s)?.member == Truth::True {
                    return Ok(Truth::True);
                }
                if !instance.is_closed_convex() {
                    return Ok(Truth::Unknown);
                }
                let a = check_a(&instance.tilted(x_dual, s)?, cfg)?;
                // a feasible point keeps p proper, where epi p* is the hull
                let feasible = constraint_minimum(instance, cfg).0 <= 0.0;
                Ok(match a.verdict {
                    Verdict::Violated => Truth::False,
                    Verdict::Holds if feasible && a.certified => Truth::True,
                    _ => Truth::Unknown,
                })
            }
        }
    }

    /// Is `F#` closed and convex as seen from the probes?
    pub fn closed_convex_regarding(&self, probes: &[(Vec<Rational>, Rational)]) -> Result<Truth> {
        let mut unknown = false;
        for (x, s) in probes {
            let plain = self.contains(x, s)?.member;
            let hull = self.hull_contains(x, s)?;
            match plain.equals(hull) {
                Truth::False => return Ok(Truth::False),
                Truth::Unknown => unknown = true,
                Truth::True => {}
            }
        }
        Ok(if unknown { Truth::Unknown } else { Truth::True })
    }
}

