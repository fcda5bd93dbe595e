//! Fourier–Motzkin projection.

use num_traits::{Signed, Zero};

use super::polyhedron::{Halfspace, Polyhedron};
use super::rational::Rational;
use crate::error::{Error, Result};

/// Projects `p` onto the coordinates in `keep` (0-based, any order; the output uses
/// ascending order). Redundant rows are pruned after every eliminated variable.
pub fn fm_project(p: &Polyhedron, keep: &[usize]) -> Result<Polyhedron> {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::InvalidInput("projection must keep at least one coordinate".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= p.dim()) {
        return Err(Error::InvalidInput(format!(
            "coordinate {bad} out of range for dimension {}",
            p.dim()
        )));
    }
    let mut cur = p.prune_redundant();
    for var in (0..p.dim()).filter(|v| !keep.contains(v)) {
        cur = eliminate(&cur, var).prune_redundant();
    }
    let rows = cur
        .rows()
        .iter()
        .map(|r| Halfspace::new(keep.iter().map(|&k| r.normal[k].clone()).collect(), r.offset.clone()))
        .collect();
    Ok(Polyhedron::with_rows(keep.len(), rows)?.normalized())
}

/// One elimination step; the eliminated coordinate stays in place with zero coefficients.
pub(crate) fn eliminate(p: &Polyhedron, var: usize) -> Polyhedron {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for r in p.rows() {
        let c = &r.normal[var];
        if c.is_positive() {
            pos.push(r);
        } else if c.is_negative() {
            neg.push(r);
        } else {
            out.push(r.clone());
        }
    }
    for rp in &pos {
        for rn in &neg {
            // rp/cp - rn/cn cancels var (cp > 0, cn < 0)
            let cp = &rp.normal[var];
            let cn = -&rn.normal[var];
            let normal: Vec<Rational> = rp
                .normal
                .iter()
                .zip(&rn.normal)
                .enumerate()
                .map(|(j, (a, b))| if j == var { Rational::zero() } else { a * &cn + b * cp })
                .collect();
            let offset = &rp.offset * &cn + &rn.offset * cp;
            out.push(Halfspace::new(normal, offset));
        }
    }
    Polyhedron::with_rows(p.dim(), out).expect("same dimension")
}
