//! Symmetric eigendecomposition (cyclic Jacobi), pseudoinverse-based quadratic
//! infima and the homogenization used for global nonnegativity tests.
//!
//! Quadratics follow `q(x) = xᵀQx + aᵀx + c` throughout (no ½ factor), so that the
//! homogenized matrix is `[[Q, a/2], [aᵀ/2, c]]` without rescaling.

use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;

/// Eigenvalues within `-PSD_TOL` of zero count as nonnegative.
pub const PSD_TOL: f64 = 1e-9;
/// Relative size of the nullspace component of the linear term tolerated by [`quad_inf`].
pub const NULLSPACE_TOL: f64 = 1e-8;

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense symmetric matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from rows, replacing the input by `(S + Sᵀ)/2`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = SymMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            check_dim("symmetric matrix row", n, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).take(self.n).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `vᵀ S v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        v.iter().zip(self.apply(v)).map(|(a, b)| a * b).sum()
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: f64, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + t * b).collect(),
        }
    }

    pub fn scaled(&self, t: f64) -> SymMatrix {
        SymMatrix { n: self.n, data: self.data.iter().map(|a| t * a).collect() }
    }

    fn off_diagonal_mass(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }
}

/// Eigenvalues ascending; `vectors[k]` is the unit eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct EigResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigResult {
    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `V diag(values) Vᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..n)
                    .map(|k| self.vectors[k][i] * self.values[k] * self.vectors[k][j])
                    .sum();
                m.set(i, j, v);
            }
        }
        m
    }
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius mass drops below
/// `1e-14·‖S‖_F`.
pub fn eigh_sym(s: &SymMatrix) -> Result<EigResult> {
    let n = s.n;
    if n == 0 {
        return Err(Error::InvalidInput("eigendecomposition of an empty matrix".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if !s.get(i, j).is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    let mut a = s.clone();
    // v[i][k]: component i of eigenvector k
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let target = JACOBI_TOL * s.frobenius();
    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_mass() <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.data[k * n + p] = c * akp - sn * akq;
                    a.data[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.data[p * n + k] = c * apk - sn * aqk;
                    a.data[q * n + k] = sn * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - sn * vq;
                    row[q] = sn * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    Ok(EigResult {
        values: order.iter().map(|&k| a.get(k, k)).collect(),
        vectors: order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect(),
    })
}

pub fn lambda_min(s: &SymMatrix) -> Result<f64> {
    Ok(eigh_sym(s)?.min_value())
}

/// Infimum of `xᵀQx + aᵀx + c` over all `x`, with a minimizer when finite.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadMin {
    pub value: ExtReal,
    pub argmin: Option<Vec<f64>>,
    /// A descent direction witnessing `-inf`.
    pub descent: Option<Vec<f64>>,
}

/// `c - ¼ aᵀQ⁺a` when `Q` is PSD (up to [`PSD_TOL`]) and `a` has no component in the
/// numerical nullspace of `Q`; `-inf` otherwise.
pub fn quad_inf(q: &SymMatrix, a: &[f64], c: f64) -> Result<ExtReal> {
    Ok(quad_minimize(q, a, c)?.value)
}

pub fn quad_minimize(q: &SymMatrix, a: &[f64], c: f64) -> Result<QuadMin> {
    check_dim("quadratic linear term", q.n, a.len())?;
    let eig = eigh_sym(q)?;
    if eig.min_value() < -PSD_TOL {
        return Ok(QuadMin {
            value: ExtReal::NegInf,
            argmin: None,
            descent: Some(eig.vectors[0].clone()),
        });
    }
    let lmax = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let thresh = PSD_TOL * lmax;
    let anorm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n = q.n;
    let mut null_part = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut quad = 0.0;
    for (lam, vec) in eig.values.iter().zip(&eig.vectors) {
        let proj: f64 = vec.iter().zip(a).map(|(u, w)| u * w).sum();
        if lam.abs() <= thresh {
            for i in 0..n {
                null_part[i] += proj * vec[i];
            }
        } else {
            quad += proj * proj / lam;
            for i in 0..n {
                x[i] -= 0.5 * proj / lam * vec[i];
            }
        }
    }
    let null_norm = null_part.iter().map(|v| v * v).sum::<f64>().sqrt();
    if null_norm > NULLSPACE_TOL * (1.0 + anorm) {
        let descent: Vec<f64> = null_part.iter().map(|v| -v / null_norm).collect();
        return Ok(QuadMin { value: ExtReal::NegInf, argmin: None, descent: Some(descent) });
    }
    Ok(QuadMin {
        value: ExtReal::Finite(c - 0.25 * quad),
        argmin: Some(x),
        descent: None,
    })
}

/// `[[Q, a/2], [aᵀ/2, c]]`: `q >= 0` everywhere iff this matrix is PSD.
pub fn homogenize(q: &SymMatrix, a: &[f64], c: f64) -> Result<SymMatrix> {
    check_dim("quadratic linear term", q.n, a.len())?;
    let n = q.n;
    let mut m = SymMatrix::zeros(n + 1);
    for i in 0..n {
        for j in i..n {
            m.set(i, j, q.get(i, j));
        }
        m.set(i, n, 0.5 * a[i]);
    }
    m.set(n, n, c);
    Ok(m)
}
