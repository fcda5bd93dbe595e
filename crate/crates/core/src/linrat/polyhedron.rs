use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{dot, primitive_scale, rat, serde_q, serde_qvec, Rational};
use super::simplex::{lp_solve, LpOutcome, Sense};
use crate::error::{check_dim, Error, Result};

/// One inequality `<normal, z> <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(with = "serde_qvec")]
    pub normal: Vec<Rational>,
    #[serde(with = "serde_q")]
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Self {
        Halfspace { normal, offset }
    }

    pub fn satisfied_by(&self, z: &[Rational]) -> bool {
        dot(&self.normal, z) <= self.offset
    }

    pub fn is_trivial(&self) -> bool {
        self.normal.iter().all(Zero::is_zero)
    }
}

/// H-representation `{ z : A z <= b }`. Emptiness is computed, never assumed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyhedronRepr")]
pub struct Polyhedron {
    dim: usize,
    rows: Vec<Halfspace>,
}

#[derive(Deserialize)]
struct PolyhedronRepr {
    dim: usize,
    rows: Vec<Halfspace>,
}

impl TryFrom<PolyhedronRepr> for Polyhedron {
    type Error = Error;

    fn try_from(r: PolyhedronRepr) -> Result<Self> {
        Polyhedron::with_rows(r.dim, r.rows)
    }
}

impl Polyhedron {
    /// The whole space of dimension `dim`.
    pub fn universe(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("polyhedron dimension must be positive".into()));
        }
        Ok(Polyhedron { dim, rows: Vec::new() })
    }

    pub fn with_rows(dim: usize, rows: Vec<Halfspace>) -> Result<Self> {
        let mut p = Polyhedron::universe(dim)?;
        for r in rows {
            p.push(r)?;
        }
        Ok(p)
    }

    /// Canonical empty set: the single row `0 <= -1`.
    pub fn empty(dim: usize) -> Result<Self> {
        let mut p = Polyhedron::universe(dim)?;
        p.rows.push(Halfspace::new(vec![Rational::zero(); dim], rat(-1)));
        Ok(p)
    }

    /// Convenience constructor from integer rows.
    pub fn from_ints(dim: usize, rows: &[(&[i64], i64)]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|(n, b)| Halfspace::new(n.iter().map(|&v| rat(v)).collect(), rat(*b)))
            .collect();
        Polyhedron::with_rows(dim, rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Halfspace] {
        &self.rows
    }

    pub fn push(&mut self, row: Halfspace) -> Result<()> {
        check_dim("polyhedron row", self.dim, row.normal.len())?;
        self.rows.push(row);
        Ok(())
    }

    pub fn push_le(&mut self, normal: Vec<Rational>, offset: Rational) -> Result<()> {
        self.push(Halfspace::new(normal, offset))
    }

    /// Adds `<normal, z> = offset` as a pair of inequalities.
    pub fn push_eq(&mut self, normal: Vec<Rational>, offset: Rational) -> Result<()> {
        let neg: Vec<Rational> = normal.iter().map(|v| -v).collect();
        self.push(Halfspace::new(normal, offset.clone()))?;
        self.push(Halfspace::new(neg, -offset))
    }

    pub fn contains(&self, z: &[Rational]) -> bool {
        z.len() == self.dim && self.rows.iter().all(|r| r.satisfied_by(z))
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        check_dim("polyhedron intersection", self.dim, other.dim)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Polyhedron { dim: self.dim, rows })
    }

    pub fn is_empty(&self) -> bool {
        let zero = vec![Rational::zero(); self.dim];
        matches!(
            lp_solve(&zero, self, Sense::Max).expect("dimensions agree"),
            LpOutcome::Infeasible { .. }
        )
    }

    /// Some point of the polyhedron, if it is nonempty.
    pub fn interior_witness(&self) -> Option<Vec<Rational>> {
        let zero = vec![Rational::zero(); self.dim];
        match lp_solve(&zero, self, Sense::Max).expect("dimensions agree") {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }

    /// Embeds into a larger space: coordinate `i` of `self` becomes coordinate `map[i]`.
    pub fn embed(&self, dim: usize, map: &[usize]) -> Result<Polyhedron> {
        check_dim("polyhedron embedding", self.dim, map.len())?;
        if map.iter().any(|&j| j >= dim) {
            return Err(Error::InvalidInput("embedding index out of range".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut n = vec![Rational::zero(); dim];
                for (i, &j) in map.iter().enumerate() {
                    n[j] = r.normal[i].clone();
                }
                Halfspace::new(n, r.offset.clone())
            })
            .collect();
        Ok(Polyhedron { dim, rows })
    }

    /// Fixes coordinate `idx` to `value` and drops it.
    pub fn restrict(&self, idx: usize, value: &Rational) -> Result<Polyhedron> {
        if idx >= self.dim || self.dim == 1 {
            return Err(Error::InvalidInput("cannot restrict this coordinate".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut n = r.normal.clone();
                let c = n.remove(idx);
                Halfspace::new(n, &r.offset - c * value)
            })
            .collect();
        Ok(Polyhedron { dim: self.dim - 1, rows })
    }

    /// Scales rows to primitive integer normals, merges parallel duplicates and drops
    /// rows of the form `0 <= b` with `b >= 0`. Returns the canonical empty set when
    /// a row `0 <= b` with `b < 0` appears.
    pub fn normalized(&self) -> Polyhedron {
        let mut out: Vec<Halfspace> = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            match primitive_scale(&r.normal) {
                None => {
                    if r.offset.is_negative() {
                        return Polyhedron::empty(self.dim).expect("dim positive");
                    }
                }
                Some(s) => out.push(Halfspace::new(
                    r.normal.iter().map(|v| v * &s).collect(),
                    &r.offset * &s,
                )),
            }
        }
        out.sort();
        out.dedup_by(|later, earlier| later.normal == earlier.normal);
        Polyhedron { dim: self.dim, rows: out }
    }

    /// Removes every row implied by the remaining ones (one LP per row).
    pub fn prune_redundant(&self) -> Polyhedron {
        let p = self.normalized();
        if p.rows.iter().any(Halfspace::is_trivial) || p.is_empty() {
            return Polyhedron::empty(self.dim).expect("dim positive");
        }
        let mut keep: Vec<bool> = vec![true; p.rows.len()];
        for i in 0..p.rows.len() {
            let others = Polyhedron {
                dim: p.dim,
                rows: p
                    .rows
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i && keep[j])
                    .map(|(_, r)| r.clone())
                    .collect(),
            };
            let implied = match lp_solve(&p.rows[i].normal, &others, Sense::Max)
                .expect("dimensions agree")
            {
                LpOutcome::Optimal { value, .. } => value <= p.rows[i].offset,
                _ => false,
            };
            if implied {
                keep[i] = false;
            }
        }
        Polyhedron {
            dim: p.dim,
            rows: p
                .rows
                .into_iter()
                .zip(keep)
                .filter_map(|(r, k)| k.then_some(r))
                .collect(),
        }
    }

    /// Exact set equality, decided by mutual row implication.
    pub fn same_set(&self, other: &Polyhedron) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let a_empty = self.is_empty();
        let b_empty = other.is_empty();
        if a_empty || b_empty {
            return a_empty == b_empty;
        }
        implies_all(self, other) && implies_all(other, self)
    }
}

fn implies_all(p: &Polyhedron, q: &Polyhedron) -> bool {
    q.rows.iter().all(|r| {
        match lp_solve(&r.normal, p, Sense::Max).expect("dimensions agree") {
            LpOutcome::Optimal { value, .. } => value <= r.offset,
            LpOutcome::Infeasible { .. } => true,
            LpOutcome::Unbounded { .. } => false,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linrat::rational::ratio;

    #[test]
    fn json_round_trip() {
        let p = Polyhedron::with_rows(
            2,
            vec![Halfspace::new(vec![ratio(1, 2), rat(-3)], ratio(7, 3))],
        )
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":2,"rows":[{"normal":["1/2","-3"],"offset":"7/3"}]}"#);
        let back: Polyhedron = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn json_rejects_bad_dimension() {
        let s = r#"{"dim":2,"rows":[{"normal":["1"],"offset":"0"}]}"#;
        assert!(serde_json::from_str::<Polyhedron>(s).is_err());
        assert!(serde_json::from_str::<Polyhedron>(r#"{"dim":0,"rows":[]}"#).is_err());
    }

    #[test]
    fn redundancy_pruning() {
        // x <= 1, x <= 2, 2x <= 2, -x <= 0
        let p = Polyhedron::from_ints(1, &[(&[1], 1), (&[1], 2), (&[2], 2), (&[-1], 0)]).unwrap();
        let q = p.prune_redundant();
        assert_eq!(q.rows().len(), 2);
        assert!(q.same_set(&p));
    }

    #[test]
    fn emptiness_is_computed() {
        let p = Polyhedron::from_ints(1, &[(&[1], -1), (&[-1], -1)]).unwrap();
        assert!(p.is_empty());
        let q = p.prune_redundant();
        assert_eq!(q, Polyhedron::empty(1).unwrap());
        assert!(!Polyhedron::universe(3).unwrap().is_empty());
    }
}
