//! Generator models `conv(V) + cone(R)` and conic membership.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{nullspace, solve_unique};
use super::polyhedron::Polyhedron;
use super::rational::{dot, primitive_scale, serde_qmat, serde_qvec, Rational};
use super::simplex::{solve_standard, StandardForm, StandardOutcome};
use crate::error::{check_dim, Error, Result};

/// `conv(points) + cone(rays)`. An empty `points` list means the empty set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeModel {
    pub dim: usize,
    #[serde(with = "serde_qmat")]
    pub points: Vec<Vec<Rational>>,
    #[serde(with = "serde_qmat")]
    pub rays: Vec<Vec<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeSemantics {
    /// `cone(V ∪ R)`: the closed convex conic hull.
    ClosedHull,
    /// `R+ · (conv(V) + cone(R))`, no closure taken.
    RawCone,
}

/// Membership answer with the LP evidence behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Coefficients on points then rays when a representation was found.
    #[serde(with = "serde_qvec")]
    pub coefficients: Vec<Rational>,
    /// Farkas vector `y` with `<y, v> >= 0` on all generators and `<y, point> < 0`.
    #[serde(with = "serde_qvec")]
    pub separator: Vec<Rational>,
}

impl ConeModel {
    pub fn new(dim: usize, points: Vec<Vec<Rational>>, rays: Vec<Vec<Rational>>) -> Result<Self> {
        for v in points.iter().chain(&rays) {
            check_dim("cone model generator", dim, v.len())?;
        }
        Ok(ConeModel { dim, points, rays })
    }

    pub fn empty(dim: usize) -> Self {
        ConeModel { dim, points: Vec::new(), rays: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Generator union; the hull of a union of polyhedra has exactly these generators.
    pub fn union(&self, other: &ConeModel) -> Result<ConeModel> {
        check_dim("cone model union", self.dim, other.dim)?;
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        let mut m = self.clone();
        m.points.extend(other.points.iter().cloned());
        m.rays.extend(other.rays.iter().cloned());
        Ok(m)
    }

    /// Plain membership in `conv(V) + cone(R)`.
    pub fn contains(&self, p: &[Rational]) -> Result<bool> {
        check_dim("cone model point", self.dim, p.len())?;
        if self.is_empty() {
            return Ok(false);
        }
        // (p, 1) ∈ cone({(v, 1)} ∪ {(r, 0)})
        let lift = |v: &Vec<Rational>, last: Rational| {
            let mut w = v.clone();
            w.push(last);
            w
        };
        let lifted = ConeModel {
            dim: self.dim + 1,
            points: self.points.iter().map(|v| lift(v, Rational::one())).collect(),
            rays: self.rays.iter().map(|r| lift(r, Rational::zero())).collect(),
        };
        let target = lift(&p.to_vec(), Rational::one());
        Ok(conic_combination(&lifted, &target, false).member)
    }
}

/// Is `point` in the cone generated by the model, under the given semantics?
pub fn cone_member(point: &[Rational], c: &ConeModel, semantics: ConeSemantics) -> Result<bool> {
    Ok(cone_member_detailed(point, c, semantics)?.member)
}

pub fn cone_member_detailed(
    point: &[Rational],
    c: &ConeModel,
    semantics: ConeSemantics,
) -> Result<Membership> {
    check_dim("cone membership point", c.dim, point.len())?;
    if c.is_empty() {
        return Ok(Membership { member: false, coefficients: Vec::new(), separator: Vec::new() });
    }
    match semantics {
        ConeSemantics::ClosedHull => Ok(conic_combination(c, point, false)),
        ConeSemantics::RawCone => {
            if point.iter().all(Zero::is_zero) {
                return Ok(Membership {
                    member: true,
                    coefficients: vec![Rational::zero(); c.points.len() + c.rays.len()],
                    separator: Vec::new(),
                });
            }
            Ok(conic_combination(c, point, true))
        }
    }
}

/// Solves `sum a_i v_i + sum b_j r_j = point`, `a, b >= 0`; with `need_point_mass`,
/// also maximizes `sum a_i` and requires it to be positive.
fn conic_combination(c: &ConeModel, point: &[Rational], need_point_mass: bool) -> Membership {
    let np = c.points.len();
    let cols: Vec<&Vec<Rational>> = c.points.iter().chain(&c.rays).collect();
    let a: Vec<Vec<Rational>> = (0..c.dim)
        .map(|i| cols.iter().map(|g| g[i].clone()).collect())
        .collect();
    let mut obj = vec![Rational::zero(); cols.len()];
    if need_point_mass {
        for o in obj.iter_mut().take(np) {
            *o = Rational::one();
        }
    }
    let sf = StandardForm { a, b: point.to_vec(), c: obj };
    match solve_standard(&sf) {
        StandardOutcome::Infeasible { y } => Membership {
            member: false,
            coefficients: Vec::new(),
            separator: y,
        },
        StandardOutcome::Optimal { x, y } => {
            let mass: Rational = x.iter().take(np).sum();
            let member = !need_point_mass || mass.is_positive();
            Membership {
                member,
                coefficients: x,
                separator: if member { Vec::new() } else { y },
            }
        }
        StandardOutcome::Unbounded { x, ray } => {
            // unbounded point mass: shift along the ray to get a positive witness
            let coefficients = x.iter().zip(&ray).map(|(a, r)| a + r).collect();
            Membership { member: true, coefficients, separator: Vec::new() }
        }
    }
}

impl Polyhedron {
    /// Vertices, extreme rays and lineality directions (as `±` ray pairs).
    /// Exhaustive over row subsets, so only meant for small dimensions.
    /// Returns an empty model for an empty polyhedron.
    pub fn generators(&self) -> Result<ConeModel> {
        let d = self.dim();
        if d > 8 {
            return Err(Error::InvalidInput("generator enumeration is limited to dimension 8".into()));
        }
        let p = self.normalized();
        if p.is_empty() {
            return Ok(ConeModel::empty(d));
        }
        let a: Vec<Vec<Rational>> = p.rows().iter().map(|r| r.normal.clone()).collect();
        let b: Vec<Rational> = p.rows().iter().map(|r| r.offset.clone()).collect();
        let lines = nullspace(&a, d);
        let k = lines.len();
        let mut rays: Vec<Vec<Rational>> = Vec::new();
        for l in &lines {
            rays.push(primitive(l));
            rays.push(primitive(&l.iter().map(|v| -v).collect::<Vec<_>>()));
        }

        let mut points = Vec::new();
        for subset in combinations(a.len(), d - k) {
            let mut m: Vec<Vec<Rational>> = subset.iter().map(|&i| a[i].clone()).collect();
            let mut rhs: Vec<Rational> = subset.iter().map(|&i| b[i].clone()).collect();
            m.extend(lines.iter().cloned());
            rhs.extend(std::iter::repeat_n(Rational::zero(), k));
            if let Some(z) = solve_unique(&m, &rhs) {
                if p.contains(&z) {
                    points.push(z);
                }
            }
        }
        if d > k {
            for subset in combinations(a.len(), d - k - 1) {
                let mut m: Vec<Vec<Rational>> = subset.iter().map(|&i| a[i].clone()).collect();
                m.extend(lines.iter().cloned());
                let ns = nullspace(&m, d);
                if ns.len() != 1 {
                    continue;
                }
                let r = &ns[0];
                let neg: Vec<Rational> = r.iter().map(|v| -v).collect();
                for cand in [r.clone(), neg] {
                    if a.iter().all(|row| !dot(row, &cand).is_positive()) {
                        rays.push(primitive(&cand));
                    }
                }
            }
        }
        points.sort();
        points.dedup();
        rays.sort();
        rays.dedup();
        Ok(ConeModel { dim: d, points, rays })
    }
}

fn primitive(v: &[Rational]) -> Vec<Rational> {
    match primitive_scale(v) {
        Some(s) => v.iter().map(|x| x * &s).collect(),
        None => v.to_vec(),
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    'outer: loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                continue 'outer;
            }
        }
        return out;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linrat::rational::{rat, ratio};

    fn model(points: &[&[i64]], rays: &[&[i64]]) -> ConeModel {
        let conv = |v: &&[i64]| v.iter().map(|&x| rat(x)).collect::<Vec<_>>();
        let dim = points.first().or(rays.first()).map_or(2, |v| v.len());
        ConeModel::new(dim, points.iter().map(conv).collect(), rays.iter().map(conv).collect())
            .unwrap()
    }

    #[test]
    fn opposite_ray_is_excluded() {
        let c = model(&[&[0, 1]], &[]);
        assert!(!cone_member(&[rat(0), rat(-1)], &c, ConeSemantics::ClosedHull).unwrap());
        let m = cone_member_detailed(&[rat(0), rat(-1)], &c, ConeSemantics::ClosedHull).unwrap();
        assert!(!m.separator.is_empty());
    }

    #[test]
    fn origin_is_in_every_raw_cone() {
        let c = model(&[&[3, -2]], &[&[1, 1]]);
        assert!(cone_member(&[rat(0), rat(0)], &c, ConeSemantics::RawCone).unwrap());
    }

    #[test]
    fn direct_coefficient_solves() {
        let one_one = [rat(1), rat(1)];
        // 1/2 * (2,2)
        let c = model(&[&[2, 2]], &[]);
        let m = cone_member_detailed(&one_one, &c, ConeSemantics::RawCone).unwrap();
        assert!(m.member);
        assert_eq!(m.coefficients, vec![ratio(1, 2)]);
        // (0,0) + 1 * (1,1); point mass can be anything positive
        let c = model(&[&[0, 0]], &[&[1, 1]]);
        assert!(cone_member(&one_one, &c, ConeSemantics::RawCone).unwrap());
        assert!(cone_member(&one_one, &c, ConeSemantics::ClosedHull).unwrap());
    }

    #[test]
    fn raw_cone_misses_recession_limit() {
        // {y = 1, r free}: (0,-1) lies in the closed conic hull only
        let c = model(&[&[1, 0]], &[&[0, 1], &[0, -1]]);
        let p = [rat(0), rat(-1)];
        assert!(cone_member(&p, &c, ConeSemantics::ClosedHull).unwrap());
        assert!(!cone_member(&p, &c, ConeSemantics::RawCone).unwrap());
    }

    #[test]
    fn empty_model_contains_nothing() {
        let c = ConeModel::empty(2);
        for s in [ConeSemantics::ClosedHull, ConeSemantics::RawCone] {
            assert!(!cone_member(&[rat(0), rat(0)], &c, s).unwrap());
        }
    }

    #[test]
    fn plain_containment() {
        let c = model(&[&[0, 0], &[2, 0]], &[&[0, 1]]);
        assert!(c.contains(&[rat(1), rat(5)]).unwrap());
        assert!(!c.contains(&[rat(3), rat(0)]).unwrap());
        assert!(!c.contains(&[rat(1), rat(-1)]).unwrap());
    }

    #[test]
    fn square_generators() {
        let p = Polyhedron::from_ints(2, &[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 0)])
            .unwrap();
        let g = p.generators().unwrap();
        assert_eq!(g.points.len(), 4);
        assert!(g.rays.is_empty());
    }

    #[test]
    fn halfplane_generators_have_lines() {
        // r >= 0 in (y, r): lineality along y
        let p = Polyhedron::from_ints(2, &[(&[0, -1], 0)]).unwrap();
        let g = p.generators().unwrap();
        assert_eq!(g.points, vec![vec![rat(0), rat(0)]]);
        assert!(g.rays.contains(&vec![rat(1), rat(0)]));
        assert!(g.rays.contains(&vec![rat(-1), rat(0)]));
        assert!(g.rays.contains(&vec![rat(0), rat(1)]));
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }
}
