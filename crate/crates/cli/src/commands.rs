use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sproc::influence::{
    region_raster, to_robust_instance, worst_case_reduce, Claim, RasterSpec, StarField,
};
use sproc::linrat::parse_rational;
use sproc::procedures::{
    certify_b, certify_b_h, check_a, check_a_h, check_hypotheses, validate_equivalence, RhsFunction, Theorem,
    ValidationStatus,
};
use sproc::rockafellian::{QuadraticFn, RobustInstance};
use sproc::{Config, Truth, Verdict};

use crate::report::{to_value, Report};
use crate::{Command, RasterFormat};

/// An input or I/O error, reported on stderr as one JSON object.
#[derive(Debug)]
pub struct Failure {
    message: String,
    file: Option<String>,
    line: Option<usize>,
    column: Option<usize>,
}

impl Failure {
    fn new(message: impl Into<String>) -> Self {
        Failure { message: message.into(), file: None, line: None, column: None }
    }

    pub fn io(path: &Path, e: &std::io::Error) -> Self {
        Failure { file: Some(path.display().to_string()), ..Failure::new(e.to_string()) }
    }

    fn json(path: &Path, e: &serde_json::Error) -> Self {
        Failure {
            message: e.to_string(),
            file: Some(path.display().to_string()),
            line: Some(e.line()),
            column: Some(e.column()),
        }
    }

    pub fn to_json(&self) -> String {
        json!({
            "error": self.message,
            "file": self.file,
            "line": self.line,
            "column": self.column,
        })
        .to_string()
    }
}

impl From<sproc::Error> for Failure {
    fn from(e: sproc::Error) -> Self {
        Failure::new(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, &e))?;
    serde_json::from_str(&text).map_err(|e| Failure::json(path, &e))
}

fn load_rhs(path: &Path) -> Result<RhsFunction, Failure> {
    let h: RhsFunction = load(path)?;
    h.validate()?;
    Ok(h)
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

pub fn run(command: &Command, cfg: &Config) -> Outcome {
    match command {
        Command::CheckA { instance } => {
            let inst: RobustInstance = load(instance)?;
            let r = check_a(&inst, cfg)?;
            Ok(Report::new("check-a", vec![name(instance)], cfg, cfg.instance_seed(&inst), to_value(r)))
        }
        Command::CertifyB { instance } => {
            let inst: RobustInstance = load(instance)?;
            let r = certify_b(&inst, cfg)?;
            let mut v = to_value(&r);
            v["outcome"] = json!(if r.certificate.is_some() { "CERTIFIED" } else { "NONE" });
            Ok(Report::new("certify-b", vec![name(instance)], cfg, cfg.instance_seed(&inst), v))
        }
        Command::CheckAh { instance, rhs } => {
            let inst: RobustInstance = load(instance)?;
            let h = load_rhs(rhs)?;
            let r = check_a_h(&inst, &h, cfg)?;
            Ok(Report::new("check-ah", vec![name(instance), name(rhs)], cfg, cfg.instance_seed(&inst), to_value(r)))
        }
        Command::CertifyBh { instance, rhs } => {
            let inst: RobustInstance = load(instance)?;
            let h = load_rhs(rhs)?;
            let r = certify_b_h(&inst, &h, cfg)?;
            let mut v = to_value(&r);
            v["outcome"] = json!(if r.valid_on_probes { "VALID_ON_PROBES" } else { "NONE" });
            Ok(Report::new("certify-bh", vec![name(instance), name(rhs)], cfg, cfg.instance_seed(&inst), v))
        }
        Command::Hypotheses { instance, rhs } => {
            let inst: RobustInstance = load(instance)?;
            let h = rhs.as_deref().map(load_rhs).transpose()?;
            let r = check_hypotheses(&inst, h.as_ref(), cfg)?;
            let mut inputs = vec![name(instance)];
            inputs.extend(rhs.as_deref().map(name));
            Ok(Report::new("hypotheses", inputs, cfg, cfg.instance_seed(&inst), to_value(r)))
        }
        Command::Validate { instance, theorem, rhs } => {
            let inst: RobustInstance = load(instance)?;
            let theorem: Theorem = theorem.parse()?;
            let h = rhs.as_deref().map(load_rhs).transpose()?;
            let r = validate_equivalence(&inst, theorem, h.as_ref(), cfg)?;
            let mut inputs = vec![name(instance)];
            inputs.extend(rhs.as_deref().map(name));
            Ok(Report::new("validate", inputs, cfg, cfg.instance_seed(&inst), to_value(r)))
        }
        Command::InfluenceReduce { field, star, redundant, claim, all_endpoints, emit_instance } => {
            let sf: StarField = load(field)?;
            let sys = worst_case_reduce(&sf, star)?;
            let mut inputs = vec![name(field)];
            let claim = match (redundant, claim) {
                (Some(r), _) => Some(Claim::Redundant { rival: r.clone() }),
                (None, Some(p)) => {
                    inputs.push(name(p));
                    Some(Claim::Quadratic { f: load::<QuadraticFn>(p)? })
                }
                (None, None) => None,
            };
            let mut result = json!({ "system": to_value(&sys) });
            let mut seed = cfg.seed;
            if let Some(claim) = claim {
                let exported = to_robust_instance(&sf, star, &claim, *all_endpoints)?;
                seed = cfg.instance_seed(&exported.instance);
                if let Some(path) = emit_instance {
                    fs::write(path, exported.instance.to_json() + "\n").map_err(|e| Failure::io(path, &e))?;
                }
                result["claim"] = to_value(&claim);
                result["check_a"] = to_value(check_a(&exported.instance, cfg)?);
                result["export"] = to_value(&exported);
            }
            Ok(Report::new("influence-reduce", inputs, cfg, seed, result))
        }
        Command::InfluenceRaster { field, star, lo, hi, size, z, format, raster } => {
            let sf: StarField = load(field)?;
            let sys = worst_case_reduce(&sf, star)?;
            let (lo, hi, z) = (parse_rational(lo)?, parse_rational(hi)?, parse_rational(z)?);
            let spec = RasterSpec { lo: vec![lo.clone(), lo], hi: vec![hi.clone(), hi], width: *size, height: *size, z };
            let r = region_raster(&sf, &sys, &spec)?;
            let text = match format {
                RasterFormat::Csv => r.to_csv(),
                RasterFormat::Pgm => r.to_pgm(),
            };
            let mut result = json!({
                "spec": to_value(&spec),
                "members": r.cells.iter().filter(|&&b| b).count(),
                "cells": r.cells.len(),
                "star_cells": to_value(&r.star_cells),
                "format": if *format == RasterFormat::Csv { "csv" } else { "pgm" },
            });
            if !r.star_cells.is_empty() {
                result["note"] = json!("cells at a star position are evaluated through the quadratic forms");
            }
            match raster {
                Some(path) => {
                    fs::write(path, &text).map_err(|e| Failure::io(path, &e))?;
                    result["raster_file"] = json!(name(path));
                }
                None => result["raster"] = json!(text),
            }
            Ok(Report::new("influence-raster", vec![name(field)], cfg, cfg.seed, result))
        }
        Command::Selftest => selftest(cfg),
    }
}

const BUNDLED: [(&str, &str); 3] = [
    ("trust_region", include_str!("../../../instances/trust_region.json")),
    ("negative_const", include_str!("../../../instances/negative_const.json")),
    ("regression_nonconvex", include_str!("../../../instances/regression_nonconvex.json")),
];

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Violated => "violated",
        Verdict::Unknown => "unknown",
    }
}

fn selftest(cfg: &Config) -> Outcome {
    let mut cases: Vec<Value> = Vec::new();
    let mut case = |instance: &str, check: &str, expected: &str, observed: &str| {
        cases.push(json!({
            "instance": instance,
            "check": check,
            "expected": expected,
            "observed": observed,
            "pass": expected == observed,
        }));
    };
    for (label, text) in BUNDLED {
        let inst = RobustInstance::from_json(text)?;
        let a = check_a(&inst, cfg)?;
        let b = certify_b(&inst, cfg)?;
        let cert = if b.certificate.is_some() { "CERTIFIED" } else { "NONE" };
        match label {
            "trust_region" => {
                case(label, "check-a", "holds", verdict_name(a.verdict));
                case(label, "certify-b", "CERTIFIED", cert);
            }
            "negative_const" => {
                case(label, "check-a", "violated", verdict_name(a.verdict));
                case(label, "certify-b", "NONE", cert);
            }
            _ => {
                case(label, "check-a", "holds", verdict_name(a.verdict));
                case(label, "certify-b", "NONE", cert);
                let v = validate_equivalence(&inst, Theorem::T2_1, None, cfg)?;
                let status = match v.status {
                    ValidationStatus::Agree => "AGREE",
                    ValidationStatus::Disagree => "DISAGREE",
                    ValidationStatus::Vacuous => "VACUOUS",
                    ValidationStatus::Unknown => "UNKNOWN",
                };
                case(label, "validate t2_1", "AGREE", status);
                let cond = match v.right {
                    Truth::True => "true",
                    Truth::False => "false",
                    Truth::Unknown => "unknown",
                };
                case(label, "geometric condition", "false", cond);
            }
        }
    }
    let passed = cases.iter().filter(|c| c["pass"] == json!(true)).count();
    let total = cases.len();
    let mut report = Report::new(
        "selftest",
        BUNDLED.iter().map(|(l, _)| format!("bundled:{l}")).collect(),
        cfg,
        cfg.seed,
        json!({ "cases": cases, "passed": passed, "total": total }),
    );
    report.failed = passed != total;
    Ok(report)
}
