use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rockafellian::RobustInstance;

/// Tolerances and search parameters shared by every checker. Reports embed a copy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Eigenvalue tolerance for convexity (PSD Hessian) tests.
    pub tol_psd: f64,
    /// Homogenized multiplier certificates succeed when `λ_min >= -tol_cert`.
    pub tol_cert: f64,
    /// Substitution margin accepted when re-checking quadratic certificates.
    pub tol_sub: f64,
    /// Band around zero in which numerical minima are declared undecided.
    pub tol_boundary: f64,
    /// Primal witnesses must push the objective below `-tol_witness`.
    pub tol_witness: f64,
    pub ascent_iters: usize,
    pub restarts: usize,
    pub multistarts: usize,
    /// Seeded random convex combinations of slopes used as RHS probes.
    pub probes: usize,
    pub seed: u64,
    /// Sampling box `[-box_bound, box_bound]^n` for grids and random starts.
    pub box_bound: f64,
    pub grid_budget: usize,
    pub cloud_samples: usize,
    pub substitution_samples: usize,
    /// Upper end of multiplier probe grids and random ascent restarts.
    pub lambda_max: f64,
    /// Refuse heuristic paths (quadratic instances become input errors).
    pub exact_only: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol_psd: 1e-9,
            tol_cert: 1e-8,
            tol_sub: 1e-6,
            tol_boundary: 1e-6,
            tol_witness: 1e-9,
            ascent_iters: 500,
            restarts: 5,
            multistarts: 20,
            probes: 20,
            seed: 0,
            box_bound: 5.0,
            grid_budget: 20_000,
            cloud_samples: 4_000,
            substitution_samples: 10_000,
            lambda_max: 10.0,
            exact_only: false,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("tol_psd", self.tol_psd),
            ("tol_cert", self.tol_cert),
            ("tol_sub", self.tol_sub),
            ("tol_boundary", self.tol_boundary),
            ("tol_witness", self.tol_witness),
            ("box_bound", self.box_bound),
            ("lambda_max", self.lambda_max),
        ];
        for (name, v) in tols {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive and finite")));
            }
        }
        if self.restarts == 0 || self.multistarts == 0 {
            return Err(Error::InvalidInput("restarts and multistarts must be positive".into()));
        }
        Ok(())
    }

    /// Seed actually used for an instance: the configured seed mixed with a hash of
    /// the instance's canonical JSON, so equal inputs always replay identically.
    pub fn instance_seed(&self, instance: &RobustInstance) -> u64 {
        fnv1a(instance.to_json().as_bytes()) ^ self.seed
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
