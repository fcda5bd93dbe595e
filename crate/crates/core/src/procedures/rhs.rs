//! Statements with a right-hand side `h = max_i <a_i, x> + b_i`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{certify_b, check_a, CertifyB, CheckA, PrimalWitness};
use crate::config::Config;
use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::linrat::{dot, lp_solve, rat, serde_qvec, LpOutcome, Polyhedron, Rational, Sense};
use crate::rockafellian::{AffinePiece, RobustInstance};
use crate::verdict::Verdict;

/// A finite maximum of affine functions on `X`: proper, convex and lsc by construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhsFunction {
    Affine {
        #[serde(with = "serde_qvec")]
        slope: Vec<Rational>,
        #[serde(with = "crate::linrat::serde_q")]
        intercept: Rational,
    },
    PolyhedralMax { pieces: Vec<AffinePiece> },
}

impl RhsFunction {
    pub fn zero(dim: usize) -> Self {
        RhsFunction::Affine { slope: vec![Rational::zero(); dim], intercept: Rational::zero() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: RhsFunction = serde_json::from_str(text)?;
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        let pieces = self.pieces();
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidInput("rhs function needs at least one piece".into()));
        };
        for p in &pieces {
            check_dim("rhs slope", first.slope.len(), p.slope.len())?;
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.pieces()[0].slope.len()
    }

    pub fn pieces(&self) -> Vec<AffinePiece> {
        match self {
            RhsFunction::Affine { slope, intercept } => {
                vec![AffinePiece::new(slope.clone(), intercept.clone())]
            }
            RhsFunction::PolyhedralMax { pieces } => pieces.clone(),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.pieces().iter().map(|p| p.eval(x)).max().expect("nonempty")
    }

    /// `h*(a') = min { -Σ α_i b_i : Σ α_i a_i = a', α ∈ Δ }`; `+inf` off `dom h*`.
    pub fn conjugate(&self, a: &[Rational]) -> Result<ExtReal<Rational>> {
        check_dim("rhs conjugate argument", self.dim(), a.len())?;
        let pieces = self.pieces();
        let k = pieces.len();
        let mut poly = Polyhedron::universe(k)?;
        for i in 0..k {
            let mut e = vec![Rational::zero(); k];
            e[i] = -Rational::one();
            poly.push_le(e, Rational::zero())?;
        }
        poly.push_eq(vec![Rational::one(); k], Rational::one())?;
        for (c, ac) in a.iter().enumerate() {
            poly.push_eq(pieces.iter().map(|p| p.slope[c].clone()).collect(), ac.clone())?;
        }
        let objective: Vec<Rational> = pieces.iter().map(|p| -&p.intercept).collect();
        Ok(match lp_solve(&objective, &poly, Sense::Min)? {
            LpOutcome::Optimal { value, .. } => ExtReal::Finite(value),
            LpOutcome::Infeasible { .. } => ExtReal::PosInf,
            LpOutcome::Unbounded { .. } => ExtReal::NegInf,
        })
    }

    /// Distinct slopes, in order of first appearance.
    pub fn slope_generators(&self) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for p in self.pieces() {
            if !out.contains(&p.slope) {
                out.push(p.slope);
            }
        }
        out
    }

    /// Slope generators plus `count` seeded random convex combinations of them
    /// (none when there is a single slope: `dom h*` is then that point).
    pub fn probes(&self, count: usize, seed: u64) -> Vec<Vec<Rational>> {
        let gens = self.slope_generators();
        let mut out = gens.clone();
        if gens.len() < 2 {
            return out;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count {
            let w: Vec<i64> = gens.iter().map(|_| rng.gen_range(1..=100)).collect();
            let total = rat(w.iter().sum());
            let mut p = vec![Rational::zero(); self.dim()];
            for (wi, g) in w.iter().zip(&gens) {
                let t = rat(*wi) / &total;
                for (pc, gc) in p.iter_mut().zip(g) {
                    *pc += &t * gc;
                }
            }
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    /// `<a', x> - h*(a')` as a function of `x` is an affine minorant of `h`.
    pub fn minorant_at(&self, a: &[Rational], x: &[Rational]) -> Result<ExtReal<Rational>> {
        Ok(self.conjugate(a)?.neg().add_finite(dot(a, x)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckAH {
    pub verdict: Verdict,
    pub witness: Option<PrimalWitness>,
    /// One check per affine piece `i`: `sup_u F_u(x,0) - <a_i,x> - b_i >= 0`.
    pub per_piece: Vec<CheckA>,
}

/// `sup_u F_u(x, 0) >= h(x)` for all `x`, decided piece by piece.
pub fn check_a_h(instance: &RobustInstance, h: &RhsFunction, cfg: &Config) -> Result<CheckAH> {
    h.validate()?;
    check_dim("rhs dimension", instance.dim_x, h.dim())?;
    let mut per_piece = Vec::new();
    for p in h.pieces() {
        let tilted = instance.tilted(&p.slope, &-&p.intercept)?;
        per_piece.push(check_a(&tilted, cfg)?);
    }
    let witness = per_piece
        .iter()
        .find(|c| c.verdict == Verdict::Violated)
        .and_then(|c| c.witness.clone());
    let verdict = if witness.is_some() {
        Verdict::Violated
    } else if per_piece.iter().all(|c| c.verdict == Verdict::Holds) {
        Verdict::Holds
    } else {
        Verdict::Unknown
    };
    Ok(CheckAH { verdict, witness, per_piece })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    #[serde(with = "serde_qvec")]
    pub probe: Vec<Rational>,
    pub h_star: ExtReal<Rational>,
    pub search: CertifyB,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyBH {
    /// Every probe certified. Only ever claimed on the probe set.
    pub valid_on_probes: bool,
    pub probes: Vec<ProbeResult>,
}

/// For each probe `a'` searches `(ū, μ̄)` with `(F_ū)*(a', μ̄) <= h*(a')`, i.e. a
/// multiplier making `F_ū(x,y) - <a',x> + h*(a') + <λ̄,y>` nonnegative.
pub fn certify_b_h(instance: &RobustInstance, h: &RhsFunction, cfg: &Config) -> Result<CertifyBH> {
    h.validate()?;
    check_dim("rhs dimension", instance.dim_x, h.dim())?;
    let seed = cfg.instance_seed(instance);
    let mut probes = Vec::new();
    for a in h.probes(cfg.probes, seed) {
        let hs = h.conjugate(&a)?;
        let ExtReal::Finite(shift) = &hs else {
            return Err(Error::InvalidInput("probe outside the domain of h*".into()));
        };
        let tilted = instance.tilted(&a, shift)?;
        let search = certify_b(&tilted, cfg)?;
        probes.push(ProbeResult { probe: a, h_star: hs, search });
    }
    let valid_on_probes = probes.iter().all(|p| p.search.certificate.is_some());
    Ok(CertifyBH { valid_on_probes, probes })
}
