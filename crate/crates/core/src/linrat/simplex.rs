//! Exact two-phase simplex with Bland's rule.
//!
//! The core works on standard form `max c·x, A x = b, x >= 0`. Polyhedral LPs over
//! free variables are reduced to it by splitting `x = x+ - x-` and adding slacks.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::polyhedron::Polyhedron;
use super::rational::{dot, serde_q, serde_qvec, Rational};
use crate::error::{check_dim, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

/// Result of [`lp_solve`]. Every variant carries a certificate that can be checked by
/// substitution with [`LpOutcome::verify`].
///
/// * `Optimal`: `dual >= 0` with `Aᵀ dual = ±objective` (`+` for `Max`, `-` for `Min`)
///   and `bᵀ dual = ±value`.
/// * `Infeasible`: `farkas >= 0`, `Aᵀ farkas = 0`, `bᵀ farkas < 0`.
/// * `Unbounded`: feasible `point` and `ray` with `A ray <= 0` improving the objective.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum LpOutcome {
    Optimal {
        #[serde(with = "serde_q")]
        value: Rational,
        #[serde(with = "serde_qvec")]
        point: Vec<Rational>,
        #[serde(with = "serde_qvec")]
        dual: Vec<Rational>,
    },
    Infeasible {
        #[serde(with = "serde_qvec")]
        farkas: Vec<Rational>,
    },
    Unbounded {
        #[serde(with = "serde_qvec")]
        point: Vec<Rational>,
        #[serde(with = "serde_qvec")]
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    /// Checks the attached certificate against the problem data, exactly.
    pub fn verify(&self, objective: &[Rational], poly: &Polyhedron, sense: Sense) -> bool {
        let rows = poly.rows();
        let sign = |v: &Rational| match sense {
            Sense::Max => v.clone(),
            Sense::Min => -v,
        };
        match self {
            LpOutcome::Optimal { value, point, dual } => {
                if !poly.contains(point) || dual.len() != rows.len() {
                    return false;
                }
                if dual.iter().any(Signed::is_negative) {
                    return false;
                }
                let aty = transpose_apply(poly, dual);
                let target: Vec<Rational> = objective.iter().map(sign).collect();
                let by: Rational = rows.iter().zip(dual).map(|(r, y)| &r.offset * y).sum();
                let complementary = rows
                    .iter()
                    .zip(dual)
                    .all(|(r, y)| y.is_zero() || dot(&r.normal, point) == r.offset);
                aty == target
                    && dot(objective, point) == *value
                    && by == sign(value)
                    && complementary
            }
            LpOutcome::Infeasible { farkas } => {
                farkas.len() == rows.len()
                    && farkas.iter().all(|y| !y.is_negative())
                    && transpose_apply(poly, farkas).iter().all(Zero::is_zero)
                    && rows
                        .iter()
                        .zip(farkas)
                        .map(|(r, y)| &r.offset * y)
                        .sum::<Rational>()
                        .is_negative()
            }
            LpOutcome::Unbounded { point, ray } => {
                poly.contains(point)
                    && rows.iter().all(|r| !dot(&r.normal, ray).is_positive())
                    && sign(&dot(objective, ray)).is_positive()
            }
        }
    }
}

fn transpose_apply(poly: &Polyhedron, y: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); poly.dim()];
    for (r, yi) in poly.rows().iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(&r.normal) {
            *o += a * yi;
        }
    }
    out
}

/// Optimizes `objective · z` over the polyhedron (free variables).
pub fn lp_solve(objective: &[Rational], poly: &Polyhedron, sense: Sense) -> Result<LpOutcome> {
    check_dim("lp objective", poly.dim(), objective.len())?;
    let n = poly.dim();
    let m = poly.rows().len();
    // columns: x+ (n), x- (n), slack (m)
    let width = 2 * n + m;
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (i, r) in poly.rows().iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for j in 0..n {
            row[j] = r.normal[j].clone();
            row[n + j] = -&r.normal[j];
        }
        row[2 * n + i] = Rational::one();
        a.push(row);
        b.push(r.offset.clone());
    }
    let mut c = vec![Rational::zero(); width];
    for j in 0..n {
        let cj = match sense {
            Sense::Max => objective[j].clone(),
            Sense::Min => -&objective[j],
        };
        c[n + j] = -&cj;
        c[j] = cj;
    }
    let split = |x: &[Rational]| -> Vec<Rational> { (0..n).map(|j| &x[j] - &x[n + j]).collect() };
    Ok(match solve_standard(&StandardForm { a, b, c }) {
        StandardOutcome::Optimal { x, y } => {
            let point = split(&x);
            let value = dot(objective, &point);
            LpOutcome::Optimal { value, point, dual: y }
        }
        StandardOutcome::Infeasible { y } => LpOutcome::Infeasible { farkas: y },
        StandardOutcome::Unbounded { x, ray } => LpOutcome::Unbounded {
            point: split(&x),
            ray: split(&ray),
        },
    })
}

/// `max c·x  s.t.  A x = b, x >= 0`.
#[derive(Clone, Debug)]
pub(crate) struct StandardForm {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

/// Certificates for the standard form:
/// optimal `y` has `Aᵀy >= c`, `bᵀy = c·x`; infeasible `y` has `Aᵀy >= 0`, `bᵀy < 0`;
/// an unbounded `ray >= 0` has `A ray = 0`, `c·ray > 0`.
#[derive(Clone, Debug)]
pub(crate) enum StandardOutcome {
    Optimal { x: Vec<Rational>, y: Vec<Rational> },
    Infeasible { y: Vec<Rational> },
    Unbounded { x: Vec<Rational>, ray: Vec<Rational> },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = col;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let width = cost.len();
        let mut r: Vec<Rational> = cost.iter().map(|c| -c).collect();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !row[j].is_zero() {
                    r[j] += cb * &row[j];
                }
            }
        }
        r
    }

    /// Runs Bland's rule to optimality. `Err(col)` reports an unbounded entering column.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> std::result::Result<Vec<Rational>, usize> {
        loop {
            let red = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| red[j].is_negative()) else {
                return Ok(red);
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Err(enter),
            }
        }
    }

    fn primal(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < n {
                x[bv] = self.rhs[i].clone();
            }
        }
        x
    }
}

pub(crate) fn solve_standard(sf: &StandardForm) -> StandardOutcome {
    let m = sf.a.len();
    let n = sf.c.len();
    // Rows are sign-normalized so that b >= 0; one artificial column per row.
    let signs: Vec<bool> = sf.b.iter().map(|v| v.is_negative()).collect();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = Vec::with_capacity(n + m);
        for v in &sf.a[i] {
            row.push(if signs[i] { -v } else { v.clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rational::one() } else { Rational::zero() });
        }
        rows.push(row);
        rhs.push(sf.b[i].abs());
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
    };
    let unflip = |y: Vec<Rational>| -> Vec<Rational> {
        y.into_iter()
            .zip(&signs)
            .map(|(v, &s)| if s { -v } else { v })
            .collect()
    };

    // Phase I: maximize -sum(artificials).
    let mut cost1 = vec![Rational::zero(); n + m];
    for c in cost1.iter_mut().skip(n) {
        *c = -Rational::one();
    }
    let red = t
        .optimize(&cost1, n + m)
        .expect("phase one is bounded by zero");
    let phase1: Rational = t
        .basis
        .iter()
        .zip(&t.rhs)
        .map(|(&bv, v)| &cost1[bv] * v)
        .sum();
    if phase1.is_negative() {
        let y: Vec<Rational> = (0..m).map(|i| &red[n + i] - Rational::one()).collect();
        return StandardOutcome::Infeasible { y: unflip(y) };
    }
    // Drive remaining (zero-level) artificials out where possible; rows without a
    // nonzero structural entry are linearly dependent and keep their artificial.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            }
        }
    }

    // Phase II over structural columns only.
    let mut cost2 = sf.c.clone();
    cost2.extend(std::iter::repeat_n(Rational::zero(), m));
    match t.optimize(&cost2, n) {
        Ok(red) => {
            let y: Vec<Rational> = (0..m).map(|i| red[n + i].clone()).collect();
            StandardOutcome::Optimal {
                x: t.primal(n),
                y: unflip(y),
            }
        }
        Err(enter) => {
            let mut ray = vec![Rational::zero(); n];
            ray[enter] = Rational::one();
            for (i, &bv) in t.basis.iter().enumerate() {
                if bv < n {
                    ray[bv] = -&t.rows[i][enter];
                }
            }
            StandardOutcome::Unbounded {
                x: t.primal(n),
                ray,
            }
        }
    }
}
