use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::linrat::{dot, from_f64, rat, serde_q, serde_qmat, serde_qvec, to_f64, Polyhedron, Rational};
use crate::symeig::{lambda_min, SymMatrix, PSD_TOL};

/// `q(x) = xᵀQx + aᵀx + c` with exact rational coefficients. Convexity is not assumed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QuadraticRepr")]
pub struct QuadraticFn {
    #[serde(rename = "Q", with = "serde_qmat")]
    q: Vec<Vec<Rational>>,
    #[serde(with = "serde_qvec")]
    a: Vec<Rational>,
    #[serde(with = "serde_q")]
    c: Rational,
}

#[derive(Deserialize)]
struct QuadraticRepr {
    #[serde(rename = "Q", with = "serde_qmat")]
    q: Vec<Vec<Rational>>,
    #[serde(with = "serde_qvec")]
    a: Vec<Rational>,
    #[serde(with = "serde_q")]
    c: Rational,
}

impl TryFrom<QuadraticRepr> for QuadraticFn {
    type Error = Error;

    fn try_from(r: QuadraticRepr) -> Result<Self> {
        QuadraticFn::new(r.q, r.a, r.c)
    }
}

impl QuadraticFn {
    /// Symmetrizes `Q` exactly; `xᵀQx` is unchanged by this.
    pub fn new(q: Vec<Vec<Rational>>, a: Vec<Rational>, c: Rational) -> Result<Self> {
        let n = a.len();
        check_dim("quadratic Q rows", n, q.len())?;
        for row in &q {
            check_dim("quadratic Q columns", n, row.len())?;
        }
        let half = crate::linrat::ratio(1, 2);
        let sym = (0..n)
            .map(|i| (0..n).map(|j| (&q[i][j] + &q[j][i]) * &half).collect())
            .collect();
        Ok(QuadraticFn { q: sym, a, c })
    }

    pub fn zero(n: usize) -> Self {
        QuadraticFn::constant(n, Rational::zero())
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        QuadraticFn {
            q: vec![vec![Rational::zero(); n]; n],
            a: vec![Rational::zero(); n],
            c,
        }
    }

    pub fn affine(a: Vec<Rational>, c: Rational) -> Self {
        let n = a.len();
        QuadraticFn { q: vec![vec![Rational::zero(); n]; n], a, c }
    }

    /// Integer-coefficient shorthand used heavily in tests and bundled instances.
    pub fn from_ints(q: &[&[i64]], a: &[i64], c: i64) -> Result<Self> {
        QuadraticFn::new(
            q.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect(),
            a.iter().map(|&v| rat(v)).collect(),
            rat(c),
        )
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> &[Vec<Rational>] {
        &self.q
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn hessian(&self) -> SymMatrix {
        let rows: Vec<Vec<f64>> = self.q.iter().map(|r| r.iter().map(to_f64).collect()).collect();
        SymMatrix::from_rows(&rows).expect("finite rational entries")
    }

    pub fn linear_f64(&self) -> Vec<f64> {
        self.a.iter().map(to_f64).collect()
    }

    pub fn const_f64(&self) -> f64 {
        to_f64(&self.c)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut v = self.const_f64();
        for i in 0..n {
            v += to_f64(&self.a[i]) * x[i];
            for j in 0..n {
                v += x[i] * to_f64(&self.q[i][j]) * x[j];
            }
        }
        v
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        let n = self.dim();
        let mut v = self.c.clone() + dot(&self.a, x);
        for i in 0..n {
            v += &x[i] * dot(&self.q[i], x);
        }
        v
    }

    /// `2Qx + a`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let h = self.hessian();
        let qx = h.apply(x);
        qx.iter().zip(&self.a).map(|(v, a)| 2.0 * v + to_f64(a)).collect()
    }

    /// Hessian PSD up to the eigenvalue tolerance.
    pub fn is_convex(&self) -> bool {
        self.dim() == 0 || lambda_min(&self.hessian()).is_ok_and(|l| l >= -PSD_TOL)
    }

    /// `self + t·other`, exactly.
    pub fn add_scaled(&self, t: &Rational, other: &QuadraticFn) -> Result<QuadraticFn> {
        check_dim("quadratic sum", self.dim(), other.dim())?;
        let n = self.dim();
        Ok(QuadraticFn {
            q: (0..n)
                .map(|i| (0..n).map(|j| &self.q[i][j] + t * &other.q[i][j]).collect())
                .collect(),
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + t * y).collect(),
            c: &self.c + t * &other.c,
        })
    }

    /// `self(x) - <slope, x> + shift`.
    pub fn tilt(&self, slope: &[Rational], shift: &Rational) -> Result<QuadraticFn> {
        check_dim("quadratic tilt", self.dim(), slope.len())?;
        Ok(QuadraticFn {
            q: self.q.clone(),
            a: self.a.iter().zip(slope).map(|(a, s)| a - s).collect(),
            c: &self.c + shift,
        })
    }

    pub fn negated(&self) -> QuadraticFn {
        QuadraticFn {
            q: self.q.iter().map(|r| r.iter().map(|v| -v).collect()).collect(),
            a: self.a.iter().map(|v| -v).collect(),
            c: -&self.c,
        }
    }
}

/// One affine piece `<slope, (x, y)> + intercept`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffinePiece {
    #[serde(with = "serde_qvec")]
    pub slope: Vec<Rational>,
    #[serde(with = "serde_q")]
    pub intercept: Rational,
}

impl AffinePiece {
    pub fn new(slope: Vec<Rational>, intercept: Rational) -> Self {
        AffinePiece { slope, intercept }
    }

    pub fn eval(&self, w: &[Rational]) -> Rational {
        dot(&self.slope, w) + &self.intercept
    }
}

/// `max_k <s_k, w> + c_k` on a polyhedral domain, `+inf` outside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyhedralFn {
    pub pieces: Vec<AffinePiece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Polyhedron>,
}

impl PolyhedralFn {
    pub fn new(pieces: Vec<AffinePiece>, domain: Option<Polyhedron>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidInput("polyhedral function needs at least one piece".into()));
        };
        let dim = first.slope.len();
        for p in &pieces {
            check_dim("affine piece slope", dim, p.slope.len())?;
        }
        if let Some(d) = &domain {
            check_dim("polyhedral function domain", dim, d.dim())?;
        }
        Ok(PolyhedralFn { pieces, domain })
    }

    pub fn joint_dim(&self) -> usize {
        self.pieces[0].slope.len()
    }

    pub fn in_domain(&self, w: &[Rational]) -> bool {
        self.domain.as_ref().is_none_or(|d| d.contains(w))
    }

    pub fn eval(&self, w: &[Rational]) -> ExtReal<Rational> {
        if !self.in_domain(w) {
            return ExtReal::PosInf;
        }
        let v = self
            .pieces
            .iter()
            .map(|p| p.eval(w))
            .max()
            .expect("at least one piece");
        ExtReal::Finite(v)
    }

    pub fn domain_is_empty(&self) -> bool {
        self.domain.as_ref().is_some_and(Polyhedron::is_empty)
    }

    /// Domain rows (empty when unconstrained).
    pub(crate) fn domain_rows(&self) -> &[crate::linrat::Halfspace] {
        self.domain.as_ref().map_or(&[], |d| d.rows())
    }

    /// `epi F` in `(w, r)`-space.
    pub fn epigraph(&self) -> Polyhedron {
        let d = self.joint_dim();
        let mut p = Polyhedron::universe(d + 1).expect("positive dimension");
        for piece in &self.pieces {
            let mut n = piece.slope.clone();
            n.push(rat(-1));
            p.push_le(n, -&piece.intercept).expect("dimension");
        }
        for row in self.domain_rows() {
            let mut n = row.normal.clone();
            n.push(Rational::zero());
            p.push_le(n, row.offset.clone()).expect("dimension");
        }
        p
    }
}

pub(crate) fn exact_point(v: &[f64]) -> Result<Vec<Rational>> {
    v.iter().map(|&x| from_f64(x)).collect()
}
