//! Numerical minimization of a pointwise maximum of quadratics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::symeig::{eigh_sym, SymMatrix};

/// `xᵀQx + aᵀx + c` in floating point.
#[derive(Clone, Debug)]
pub(crate) struct QuadF64 {
    pub q: SymMatrix,
    pub a: Vec<f64>,
    pub c: f64,
}

impl QuadF64 {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let qx = self.q.apply(x);
        let mut v = self.c;
        for i in 0..x.len() {
            v += x[i] * (qx[i] + self.a[i]);
        }
        v
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let qx = self.q.apply(x);
        qx.iter().zip(&self.a).map(|(q, a)| 2.0 * q + a).collect()
    }
}

/// Search metadata recorded in reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchStats {
    pub grid_points: usize,
    pub starts: usize,
    pub box_bound: f64,
}

pub(crate) struct MaxMin {
    pub value: f64,
    pub argmin: Vec<f64>,
    pub stats: SearchStats,
}

pub(crate) struct SearchPlan {
    pub dim: usize,
    pub bound: f64,
    pub grid_budget: usize,
    pub starts: usize,
    pub seed: u64,
    /// Stop as soon as the maximum drops below this value.
    pub stop_below: f64,
}

/// Lattice points of `[-b, b]^n` (or seeded uniform samples when the lattice would
/// exceed the budget).
pub(crate) fn sample_points(dim: usize, bound: f64, budget: usize, seed: u64) -> Vec<Vec<f64>> {
    if dim == 0 {
        return vec![Vec::new()];
    }
    let per = ((budget as f64).powf(1.0 / dim as f64).floor() as usize).min(201);
    if per < 3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        return (0..budget)
            .map(|_| (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect())
            .collect();
    }
    let coord = |k: usize| -bound + 2.0 * bound * k as f64 / (per - 1) as f64;
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                (0..per).map(move |k| {
                    let mut q = p.clone();
                    q.push(coord(k));
                    q
                })
            })
            .collect();
    }
    out
}

fn max_of(pieces: &[QuadF64], x: &[f64]) -> f64 {
    pieces.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max)
}

/// Globalized search for `min_x max_j h_j(x)`: grid scan, then damped Newton on a
/// log-sum-exp smoothing with decreasing temperature from the best grid points and
/// seeded random starts. Exact for convex pieces up to solver accuracy.
pub(crate) fn minimize_max(pieces: &[QuadF64], plan: &SearchPlan) -> MaxMin {
    let n = plan.dim;
    let grid = sample_points(n, plan.bound, plan.grid_budget, plan.seed);
    let mut scored: Vec<(f64, usize)> =
        grid.iter().enumerate().map(|(i, x)| (max_of(pieces, x), i)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best_x = grid[scored[0].1].clone();
    let mut best = scored[0].0;
    let stats = SearchStats { grid_points: grid.len(), starts: 0, box_bound: plan.bound };
    if n == 0 || best < plan.stop_below {
        return MaxMin { value: best, argmin: best_x, stats };
    }
    let mut starts: Vec<Vec<f64>> = scored.iter().take(5).map(|&(_, i)| grid[i].clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    for _ in 0..plan.starts {
        starts.push((0..n).map(|_| rng.gen_range(-plan.bound..=plan.bound)).collect());
    }
    let count = starts.len();
    for x0 in starts {
        let (x, v) = smoothed_newton(pieces, x0, plan.stop_below);
        if v < best {
            best = v;
            best_x = x;
        }
        if best < plan.stop_below {
            break;
        }
    }
    MaxMin { value: best, argmin: best_x, stats: SearchStats { starts: count, ..stats } }
}

fn smoothed_newton(pieces: &[QuadF64], mut x: Vec<f64>, stop_below: f64) -> (Vec<f64>, f64) {
    let n = x.len();
    let mut best_x = x.clone();
    let mut best = max_of(pieces, &x);
    for &tau in &[1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
        for _ in 0..60 {
            let (val, g, h) = smooth(pieces, &x, tau);
            let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gnorm <= 1e-13 * (1.0 + val.abs()) {
                break;
            }
            let eig = match eigh_sym(&h) {
                Ok(e) => e,
                Err(_) => break,
            };
            let scale = eig.max_abs().max(1.0);
            let mut d = vec![0.0; n];
            for (lam, v) in eig.values.iter().zip(&eig.vectors) {
                let proj: f64 = v.iter().zip(&g).map(|(a, b)| a * b).sum();
                let denom = lam.abs().max(1e-8 * scale);
                for i in 0..n {
                    d[i] -= proj / denom * v[i];
                }
            }
            let slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..50 {
                let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                if smooth_value(pieces, &trial, tau) <= val + 1e-4 * t * slope {
                    x = trial;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            let v = max_of(pieces, &x);
            if v < best {
                best = v;
                best_x = x.clone();
            }
            if !moved || best < stop_below || x.iter().any(|v| v.abs() > 1e8) {
                break;
            }
        }
        if best < stop_below || x.iter().any(|v| v.abs() > 1e8) {
            break;
        }
    }
    (best_x, best)
}

fn smooth_value(pieces: &[QuadF64], x: &[f64], tau: f64) -> f64 {
    let vals: Vec<f64> = pieces.iter().map(|p| p.eval(x)).collect();
    let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + tau * vals.iter().map(|v| ((v - m) / tau).exp()).sum::<f64>().ln()
}

/// Value, gradient and Hessian of `τ log Σ exp(h_j / τ)`.
fn smooth(pieces: &[QuadF64], x: &[f64], tau: f64) -> (f64, Vec<f64>, SymMatrix) {
    let n = x.len();
    let vals: Vec<f64> = pieces.iter().map(|p| p.eval(x)).collect();
    let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ex: Vec<f64> = vals.iter().map(|v| ((v - m) / tau).exp()).collect();
    let z: f64 = ex.iter().sum();
    let w: Vec<f64> = ex.iter().map(|e| e / z).collect();
    let value = m + tau * z.ln();
    let grads: Vec<Vec<f64>> = pieces.iter().map(|p| p.grad(x)).collect();
    let mut g = vec![0.0; n];
    for (wj, gj) in w.iter().zip(&grads) {
        for i in 0..n {
            g[i] += wj * gj[i];
        }
    }
    let mut h = SymMatrix::zeros(n);
    for ((wj, gj), p) in w.iter().zip(&grads).zip(pieces) {
        if *wj < 1e-300 {
            continue;
        }
        for i in 0..n {
            for j in i..n {
                let v = h.get(i, j) + wj * (2.0 * p.q.get(i, j) + gj[i] * gj[j] / tau);
                h.set(i, j, v);
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let v = h.get(i, j) - g[i] * g[j] / tau;
            h.set(i, j, v);
        }
    }
    (value, g, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(q: &[Vec<f64>], a: &[f64], c: f64) -> QuadF64 {
        QuadF64 { q: SymMatrix::from_rows(q).unwrap(), a: a.to_vec(), c }
    }

    fn plan(dim: usize) -> SearchPlan {
        SearchPlan { dim, bound: 5.0, grid_budget: 2000, starts: 10, seed: 7, stop_below: f64::NEG_INFINITY }
    }

    #[test]
    fn max_of_shifted_parabolas() {
        // max((x-1)², (x+1)²) has minimum 1 at 0.
        let p = [quad(&[vec![1.0]], &[-2.0], 1.0), quad(&[vec![1.0]], &[2.0], 1.0)];
        let r = minimize_max(&p, &plan(1));
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
        assert!(r.argmin[0].abs() < 1e-6);
    }

    #[test]
    fn two_dimensional_kink() {
        // max(x² + y² - 1, x - 3) minimum -1 at origin
        let p = [
            quad(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.0, 0.0], -1.0),
            quad(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[1.0, 0.0], -3.0),
        ];
        let r = minimize_max(&p, &plan(2));
        assert!((r.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn nonconvex_finds_global_branch() {
        // max(-x², x² - 4) = -x² on |x|<=√2 region... minimum -2 at x² = 2
        let p = [quad(&[vec![-1.0]], &[0.0], 0.0), quad(&[vec![1.0]], &[0.0], -4.0)];
        let r = minimize_max(&p, &plan(1));
        assert!((r.value + 2.0).abs() < 1e-8, "{}", r.value);
    }
}
