//! Maximization of `ψ(λ) = λ_min(M_0 + Σ λ_i M_i)` over `λ >= 0`.
//!
//! `ψ` is concave; at any `λ` the minimal eigenvector `v` gives the supergradient
//! `(vᵀ M_i v)_i`. Plain projected supergradient steps stall near kinks, so the best
//! ascent iterate is polished by bisection on the sign of the supergradient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::rockafellian::ConstraintPerturbation;
use crate::symeig::{eigh_sym, homogenize, SymMatrix};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AscentResult {
    pub lambda: Vec<f64>,
    pub psi: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct AscentParams {
    pub iters: usize,
    pub restarts: usize,
    pub lambda_max: f64,
    pub seed: u64,
    /// Stop early once `ψ` reaches this level.
    pub target: f64,
}

/// Homogenized data of `f - <slope, x> + shift` and each constraint.
pub(crate) struct PencilData {
    base: SymMatrix,
    cons: Vec<SymMatrix>,
}

impl PencilData {
    pub fn new(cp: &ConstraintPerturbation, slope: &[f64], shift: f64) -> Result<Self> {
        let zero = vec![0.0; cp.dim_y()];
        let (q, a, c) = cp.lagrangian_f64(&zero, slope, shift);
        let base = homogenize(&q, &a, c)?;
        let cons = cp
            .g
            .iter()
            .map(|g| homogenize(&g.hessian(), &g.linear_f64(), g.const_f64()))
            .collect::<Result<Vec<_>>>()?;
        Ok(PencilData { base, cons })
    }

    pub fn dim(&self) -> usize {
        self.cons.len()
    }

    pub fn matrix(&self, lambda: &[f64]) -> SymMatrix {
        let mut m = self.base.clone();
        for (l, c) in lambda.iter().zip(&self.cons) {
            if *l != 0.0 {
                m = m.axpy(*l, c);
            }
        }
        m
    }

    /// `ψ(λ)` and a supergradient.
    pub fn psi(&self, lambda: &[f64]) -> (f64, Vec<f64>) {
        let m = self.matrix(lambda);
        let eig = eigh_sym(&m).expect("finite pencil");
        let v = &eig.vectors[0];
        let sg = self.cons.iter().map(|c| c.quad_form(v)).collect();
        (eig.values[0], sg)
    }
}

pub(crate) fn maximize_psi(data: &PencilData, p: &AscentParams) -> AscentResult {
    let m = data.dim();
    let mut evals = 0;
    let mut eval = |l: &[f64]| {
        evals += 1;
        data.psi(l)
    };
    let mut best_l = vec![0.0; m];
    let (mut best, _) = eval(&best_l);
    if m == 0 {
        return AscentResult { lambda: best_l, psi: best, evaluations: evals };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    'runs: for run in 0..p.restarts {
        let mut l: Vec<f64> = if run == 0 {
            vec![0.0; m]
        } else {
            (0..m).map(|_| rng.gen_range(0.0..=p.lambda_max)).collect()
        };
        for k in 1..=p.iters {
            let (v, sg) = eval(&l);
            if v > best {
                best = v;
                best_l = l.clone();
            }
            if best >= p.target {
                break 'runs;
            }
            let step = 1.0 / k as f64;
            for (li, si) in l.iter_mut().zip(&sg) {
                *li = (*li + step * si).max(0.0);
            }
        }
    }
    if best < p.target {
        let (l, v) = polish(&mut eval, best_l.clone(), best, p);
        if v > best {
            best = v;
            best_l = l;
        }
    }
    AscentResult { lambda: best_l, psi: best, evaluations: evals }
}

/// Coordinate-wise bisection on the supergradient sign (a single pass is exact for
/// one multiplier; several sweeps for more).
fn polish(
    eval: &mut impl FnMut(&[f64]) -> (f64, Vec<f64>),
    mut l: Vec<f64>,
    mut best: f64,
    p: &AscentParams,
) -> (Vec<f64>, f64) {
    let m = l.len();
    let sweeps = if m == 1 { 1 } else { 12 };
    let bisections = if m == 1 { 200 } else { 80 };
    let mut best_l = l.clone();
    for _ in 0..sweeps {
        for i in 0..m {
            let mut at = |t: f64, l: &mut Vec<f64>| {
                l[i] = t;
                eval(l)
            };
            let (v0, s0) = at(0.0, &mut l);
            if v0 > best {
                best = v0;
                best_l = l.clone();
            }
            if s0[i] <= 0.0 {
                continue;
            }
            let mut hi = (2.0 * best_l[i]).max(p.lambda_max);
            let mut grow = 0;
            loop {
                let (v, s) = at(hi, &mut l);
                if v > best {
                    best = v;
                    best_l = l.clone();
                }
                if s[i] <= 0.0 || grow > 40 {
                    break;
                }
                hi *= 2.0;
                grow += 1;
            }
            let mut lo = 0.0;
            for _ in 0..bisections {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let (v, s) = at(mid, &mut l);
                if v > best {
                    best = v;
                    best_l = l.clone();
                }
                if s[i] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            l = best_l.clone();
        }
        if best >= p.target {
            break;
        }
    }
    (best_l, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rockafellian::QuadraticFn;

    fn params() -> AscentParams {
        AscentParams { iters: 500, restarts: 5, lambda_max: 10.0, seed: 1, target: 0.0 }
    }

    #[test]
    fn trust_region_multiplier_is_one() {
        let cp = ConstraintPerturbation::new(
            QuadraticFn::from_ints(&[&[-1]], &[0], 1).unwrap(),
            vec![QuadraticFn::from_ints(&[&[1]], &[0], -1).unwrap()],
        )
        .unwrap();
        let data = PencilData::new(&cp, &[0.0], 0.0).unwrap();
        let r = maximize_psi(&data, &params());
        assert!(r.psi >= -1e-8, "{}", r.psi);
        assert!((r.lambda[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn negative_constant_is_uncertifiable() {
        let cp = ConstraintPerturbation::new(
            QuadraticFn::from_ints(&[&[0]], &[0], -1).unwrap(),
            vec![QuadraticFn::from_ints(&[&[1]], &[0], -1).unwrap()],
        )
        .unwrap();
        let data = PencilData::new(&cp, &[0.0], 0.0).unwrap();
        let r = maximize_psi(&data, &params());
        assert!(r.psi <= -1.0 + 1e-9);
    }

    #[test]
    fn two_multipliers_ball_intersection() {
        // f = x1 + 2 on {x1² + x2² <= 1} ∩ {x1² <= 1/4}: x1 >= -1/2, so f >= 3/2.
        let cp = ConstraintPerturbation::new(
            QuadraticFn::from_ints(&[&[0, 0], &[0, 0]], &[1, 0], 2).unwrap(),
            vec![
                QuadraticFn::from_ints(&[&[1, 0], &[0, 1]], &[0, 0], -1).unwrap(),
                QuadraticFn::new(
                    vec![
                        vec![crate::linrat::rat(1), crate::linrat::rat(0)],
                        vec![crate::linrat::rat(0), crate::linrat::rat(0)],
                    ],
                    vec![crate::linrat::rat(0), crate::linrat::rat(0)],
                    crate::linrat::ratio(-1, 4),
                )
                .unwrap(),
            ],
        )
        .unwrap();
        let data = PencilData::new(&cp, &[0.0, 0.0], 0.0).unwrap();
        let r = maximize_psi(&data, &params());
        assert!(r.psi >= -1e-8, "{}", r.psi);
    }
}
