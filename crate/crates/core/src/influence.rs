//! Influence regions of a star under interval-uncertain masses.
//!
//! Star `s` dominates rival `t` at `x` when `u_s/‖x-s‖² >= u_t/‖x-t‖²`, i.e. when
//! `q_t(x,u) = u_t‖x-t‖² - u_s‖x-s‖² <= 0`. The robust region asks this for every mass
//! vector in the box of intervals; `q_t` increases in `u_t` and decreases in `u_s`,
//! so the worst case is `q̄_t = h_t‖x-t‖² - l_s‖x-s‖²`.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linrat::{format_rational, rat, serde_q, serde_qvec, Rational};
use crate::rockafellian::{ConstraintPerturbation, QuadraticFn, Rockafellian, RobustInstance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub id: String,
    #[serde(with = "serde_qvec")]
    pub pos: Vec<Rational>,
    /// `[l, h]`, the range of the gravitational constant times the mass.
    #[serde(with = "serde_qvec")]
    pub interval: Vec<Rational>,
}

impl Star {
    pub fn low(&self) -> &Rational {
        &self.interval[0]
    }

    pub fn high(&self) -> &Rational {
        &self.interval[1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr")]
pub struct StarField {
    pub dim: usize,
    pub stars: Vec<Star>,
}

#[derive(Deserialize)]
struct FieldRepr {
    dim: usize,
    stars: Vec<Star>,
}

impl TryFrom<FieldRepr> for StarField {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Self> {
        StarField::new(r.dim, r.stars)
    }
}

impl StarField {
    pub fn new(dim: usize, stars: Vec<Star>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!("star field dimension must be 2 or 3, got {dim}")));
        }
        let mut ids = HashSet::new();
        let mut positions = HashSet::new();
        for s in &stars {
            if s.pos.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "star '{}': position has {} coordinates, expected {dim}",
                    s.id,
                    s.pos.len()
                )));
            }
            if s.interval.len() != 2 {
                return Err(Error::InvalidInput(format!("star '{}': interval needs two bounds", s.id)));
            }
            if !s.low().is_positive() || s.low() > s.high() {
                return Err(Error::InvalidInput(format!(
                    "star '{}': need 0 < l <= h, got [{}, {}]",
                    s.id,
                    format_rational(s.low()),
                    format_rational(s.high())
                )));
            }
            if !ids.insert(s.id.clone()) {
                return Err(Error::InvalidInput(format!("duplicate star id '{}'", s.id)));
            }
            if !positions.insert(s.pos.clone()) {
                return Err(Error::InvalidInput(format!("star '{}' shares its position", s.id)));
            }
        }
        if stars.is_empty() {
            return Err(Error::InvalidInput("star field is empty".into()));
        }
        Ok(StarField { dim, stars })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn star(&self, id: &str) -> Result<&Star> {
        self.stars
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::InvalidInput(format!("no star with id '{id}'")))
    }
}

/// `a‖x-p‖² - b‖x-c‖²` as a quadratic.
fn weighted_difference(a: &Rational, p: &[Rational], b: &Rational, c: &[Rational]) -> Result<QuadraticFn> {
    let n = p.len();
    let diag = a - b;
    let q = (0..n)
        .map(|i| (0..n).map(|j| if i == j { diag.clone() } else { Rational::zero() }).collect())
        .collect();
    let lin = p.iter().zip(c).map(|(pi, ci)| rat(-2) * (a * pi - b * ci)).collect();
    let norm = |v: &[Rational]| v.iter().map(|t| t * t).sum::<Rational>();
    QuadraticFn::new(q, lin, a * norm(p) - b * norm(c))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfluenceConstraint {
    pub rival: String,
    /// `q̄_t(x) = h_t‖x-t‖² - l_s‖x-s‖²`.
    pub q: QuadraticFn,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfluenceSystem {
    pub center: String,
    pub dim: usize,
    pub constraints: Vec<InfluenceConstraint>,
}

pub fn worst_case_reduce(field: &StarField, s: &str) -> Result<InfluenceSystem> {
    let center = field.star(s)?;
    let constraints = field
        .stars
        .iter()
        .filter(|t| t.id != center.id)
        .map(|t| {
            Ok(InfluenceConstraint {
                rival: t.id.clone(),
                q: weighted_difference(t.high(), &t.pos, center.low(), &center.pos)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(InfluenceSystem { center: center.id.clone(), dim: field.dim, constraints })
}

/// `q_t(x, u) = u_t‖x-t‖² - u_s‖x-s‖²` for explicit masses.
pub fn scenario_value(
    field: &StarField,
    s: &str,
    t: &str,
    u_t: &Rational,
    u_s: &Rational,
    x: &[Rational],
) -> Result<Rational> {
    let (cs, ct) = (field.star(s)?, field.star(t)?);
    check_dim("influence point", field.dim, x.len())?;
    Ok(weighted_difference(u_t, &ct.pos, u_s, &cs.pos)?.eval_exact(x))
}

/// `q̄_t(x) <= 0` for every rival `t`, evaluated exactly.
pub fn robust_member(x: &[Rational], sys: &InfluenceSystem) -> Result<bool> {
    check_dim("influence point", sys.dim, x.len())?;
    Ok(sys.constraints.iter().all(|c| !c.q.eval_exact(x).is_positive()))
}

/// Star sitting exactly at `x`, where the potential itself is undefined.
pub fn star_at<'a>(field: &'a StarField, x: &[Rational]) -> Option<&'a str> {
    field.stars.iter().find(|s| s.pos == x).map(|s| s.id.as_str())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RasterSpec {
    #[serde(with = "serde_qvec")]
    pub lo: Vec<Rational>,
    #[serde(with = "serde_qvec")]
    pub hi: Vec<Rational>,
    pub width: usize,
    pub height: usize,
    /// Third coordinate of the slice for 3-D fields.
    #[serde(default, with = "serde_q")]
    pub z: Rational,
}

impl RasterSpec {
    pub fn square(lo: i64, hi: i64, n: usize) -> Self {
        RasterSpec {
            lo: vec![rat(lo), rat(lo)],
            hi: vec![rat(hi), rat(hi)],
            width: n,
            height: n,
            z: Rational::zero(),
        }
    }

    /// Lattice point of cell `(row, col)`; row 0 is the top edge `y = hi`, both edges
    /// included.
    pub fn point(&self, row: usize, col: usize, dim: usize) -> Vec<Rational> {
        let step = |lo: &Rational, hi: &Rational, k: usize, n: usize| {
            lo + (hi - lo) * Rational::new(k.into(), (n - 1).into())
        };
        let mut p = vec![
            step(&self.lo[0], &self.hi[0], col, self.width),
            step(&self.hi[1], &self.lo[1], row, self.height),
        ];
        if dim == 3 {
            p.push(self.z.clone());
        }
        p
    }

    fn validate(&self) -> Result<()> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::InvalidInput("raster needs at least 2 cells per axis".into()));
        }
        if self.lo.len() != 2 || self.hi.len() != 2 || self.lo[0] >= self.hi[0] || self.lo[1] >= self.hi[1] {
            return Err(Error::InvalidInput("raster box needs lo < hi in both coordinates".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major, row 0 at the top.
    pub cells: Vec<bool>,
    /// Lattice points that coincide with a star position.
    pub star_cells: Vec<(usize, usize, String)>,
}

impl Raster {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.width + col]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() * 2);
        for row in self.cells.chunks(self.width) {
            let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Plain (ASCII) PGM; members are white.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.width, self.height);
        for row in self.cells.chunks(self.width) {
            let line: Vec<&str> = row.iter().map(|&b| if b { "255" } else { "0" }).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

pub fn region_raster(field: &StarField, sys: &InfluenceSystem, spec: &RasterSpec) -> Result<Raster> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.width * spec.height);
    let mut star_cells = Vec::new();
    for row in 0..spec.height {
        for col in 0..spec.width {
            let x = spec.point(row, col, sys.dim);
            if let Some(id) = star_at(field, &x) {
                star_cells.push((row, col, id.to_string()));
            }
            cells.push(robust_member(&x, sys)?);
        }
    }
    Ok(Raster { width: spec.width, height: spec.height, cells, star_cells })
}

/// What the exported instance asks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// The constraint of `rival` is implied by the others: `-q̄_rival >= 0` on their region.
    Redundant { rival: String },
    /// `f >= 0` on the robust region.
    Quadratic { f: QuadraticFn },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioMasses {
    pub scenario: usize,
    /// Mass coefficient per star id used by this scenario.
    pub masses: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfluenceInstance {
    pub instance: RobustInstance,
    pub mapping: Vec<ScenarioMasses>,
    pub notes: Vec<String>,
}

/// Largest field for which every endpoint combination becomes a scenario.
pub const MAX_ENDPOINT_STARS: usize = 6;

/// Exports the claim as a constraint-perturbation instance: `f` from the claim, `g`
/// the (remaining) influence constraints. By default a single worst-case scenario;
/// with `all_endpoints`, one scenario per endpoint assignment of the masses.
pub fn to_robust_instance(
    field: &StarField,
    s: &str,
    claim: &Claim,
    all_endpoints: bool,
) -> Result<InfluenceInstance> {
    let center = field.star(s)?;
    let rivals: Vec<&Star> = field.stars.iter().filter(|t| t.id != center.id).collect();
    let excluded = match claim {
        Claim::Redundant { rival } => {
            let r = field.star(rival)?;
            if r.id == center.id {
                return Err(Error::InvalidInput("the center has no influence constraint".into()));
            }
            Some(r.id.clone())
        }
        Claim::Quadratic { f } => {
            check_dim("claim dimension", field.dim, f.dim())?;
            None
        }
    };
    let mut notes = vec![
        "scenario u: F_u(x, y) = f_u(x) if q_t(x, u) <= y_t for each listed rival t, +inf otherwise".to_string(),
    ];
    let kept: Vec<&Star> = rivals.iter().copied().filter(|t| Some(&t.id) != excluded.as_ref()).collect();
    notes.push(format!("y coordinates follow rivals {:?}", kept.iter().map(|t| &t.id).collect::<Vec<_>>()));

    let assignments: Vec<BTreeMap<String, Rational>> = if all_endpoints {
        if field.stars.len() > MAX_ENDPOINT_STARS {
            return Err(Error::InvalidInput(format!(
                "endpoint enumeration limited to {MAX_ENDPOINT_STARS} stars"
            )));
        }
        (0..1usize << field.stars.len())
            .map(|mask| {
                field
                    .stars
                    .iter()
                    .enumerate()
                    .map(|(i, st)| {
                        let v = if mask >> i & 1 == 1 { st.high() } else { st.low() };
                        (st.id.clone(), v.clone())
                    })
                    .collect()
            })
            .collect()
    } else {
        // the worst case: rivals heavy, center light
        vec![field
            .stars
            .iter()
            .map(|st| (st.id.clone(), if st.id == center.id { st.low() } else { st.high() }.clone()))
            .collect()]
    };

    let dim_y = kept.len();
    let mut scenarios = Vec::new();
    let mut mapping = Vec::new();
    for (k, u) in assignments.iter().enumerate() {
        let q = |t: &Star| weighted_difference(&u[&t.id], &t.pos, &u[&center.id], &center.pos);
        let f = match claim {
            Claim::Redundant { rival } => q(field.star(rival)?)?.negated(),
            Claim::Quadratic { f } => f.clone(),
        };
        let g = kept.iter().map(|t| q(t)).collect::<Result<Vec<_>>>()?;
        let g = if g.is_empty() {
            // no constraints: keep one trivially satisfied row so dim_Y >= 1
            vec![QuadraticFn::constant(field.dim, -Rational::one())]
        } else {
            g
        };
        scenarios.push(Rockafellian::ConstraintPerturbation(ConstraintPerturbation::new(f, g)?));
        mapping.push(ScenarioMasses {
            scenario: k,
            masses: u.iter().map(|(id, v)| (id.clone(), format_rational(v))).collect(),
        });
    }
    if dim_y == 0 {
        notes.push("no rival constraints: y has one placeholder coordinate with g ≡ -1".into());
    }
    notes.push("positions equal to a star are evaluated through the quadratic forms; the potential itself is undefined there".into());
    let instance = RobustInstance::new(field.dim, dim_y.max(1), scenarios)?;
    Ok(InfluenceInstance { instance, mapping, notes })
}
