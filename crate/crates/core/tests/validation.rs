use sproc::linrat::{rat, Polyhedron};
use sproc::procedures::{
    certify_b, check_hypotheses, validate_equivalence, verify_certificate, HypothesisStatus, RhsFunction, Theorem, ValidationStatus,
};
use sproc::rockafellian::{AffinePiece, ConstraintPerturbation, PolyhedralFn, QuadraticFn, Rockafellian, RobustInstance};
use sproc::{Config, Truth};

fn q1(q: i64, a: i64, c: i64) -> QuadraticFn {
    QuadraticFn::from_ints(&[&[q]], &[a], c).unwrap()
}

fn cp(f: QuadraticFn, g: Vec<QuadraticFn>) -> RobustInstance {
    let m = g.len();
    RobustInstance::single(1, m, Rockafellian::ConstraintPerturbation(ConstraintPerturbation::new(f, g).unwrap()))
        .unwrap()
}

fn trust_region() -> RobustInstance {
    cp(q1(-1, 0, 1), vec![q1(1, 0, -1)])
}

fn pf(pieces: &[(&[i64], i64)], domain: Option<Polyhedron>) -> Rockafellian {
    Rockafellian::ExplicitPolyhedral(
        PolyhedralFn::new(
            pieces.iter().map(|(s, c)| AffinePiece::new(s.iter().map(|v| rat(*v)).collect(), rat(*c))).collect(),
            domain,
        )
        .unwrap(),
    )
}

#[test]
fn trust_region_agrees_under_the_primal_characterization() {
    let r = validate_equivalence(&trust_region(), Theorem::T2_1, None, &Config::default()).unwrap();
    assert_eq!(r.left, Truth::True);
    assert_eq!(r.right, Truth::True);
    assert_eq!(r.status, ValidationStatus::Agree);
    assert!(!r.fatal);
    assert!(r.certificate.is_some());
}

#[test]
fn negative_constant_is_vacuously_valid() {
    let inst = cp(q1(0, 0, -1), vec![q1(1, 0, -1)]);
    let r = validate_equivalence(&inst, Theorem::T2_1, None, &Config::default()).unwrap();
    assert!(r.vacuous);
    assert_eq!(r.status, ValidationStatus::Agree);
    let gap = r.gap.unwrap();
    assert_eq!(gap.raw_sup, Truth::True);
    assert!(r.witness.is_some());
}

#[test]
fn hypothesis_examples() {
    let cfg = Config::default();
    // convex, proper, feasible at 0
    let convex = cp(q1(1, 0, 0), vec![q1(1, 0, -1)]);
    let rep = check_hypotheses(&convex, None, &cfg).unwrap();
    assert_eq!(rep.status("H1"), HypothesisStatus::HoldsSufficient);
    assert_eq!(rep.status("H2"), HypothesisStatus::HoldsSufficient);
    assert_eq!(rep.status("H3"), HypothesisStatus::NotApplicable);
    // x² + 1 <= 0 has no solution
    let empty = cp(q1(1, 0, 0), vec![q1(1, 0, 1)]);
    let rep = check_hypotheses(&empty, None, &cfg).unwrap();
    let h1 = rep.get("H1").unwrap();
    assert_eq!(h1.status, HypothesisStatus::FailsWitness);
    assert_eq!(h1.witness.as_ref().unwrap().value, "+inf");
}

#[test]
fn polyhedral_h4_is_exact() {
    let cfg = Config::default();
    // F(x, y) = max(x + y, -x + y) with h = max(x/2, -x/2)
    let inst = RobustInstance::single(1, 1, pf(&[(&[1, 1], 0), (&[-1, 1], 0)], None)).unwrap();
    let h = RhsFunction::PolyhedralMax {
        pieces: vec![
            AffinePiece::new(vec![sproc::linrat::ratio(1, 2)], rat(0)),
            AffinePiece::new(vec![sproc::linrat::ratio(-1, 2)], rat(0)),
        ],
    };
    let rep = check_hypotheses(&inst, Some(&h), &cfg).unwrap();
    assert_eq!(rep.status("H3"), HypothesisStatus::HoldsSufficient);
    assert_eq!(rep.status("H4"), HypothesisStatus::HoldsSufficient);
    assert_eq!(rep.status("H6"), HypothesisStatus::HoldsSufficient);
    let r = validate_equivalence(&inst, Theorem::T4_1, Some(&h), &cfg).unwrap();
    assert_eq!(r.status, ValidationStatus::Agree);
    assert_eq!(r.right, Truth::True);
}

#[test]
fn empty_domain_fails_h1_exactly() {
    let dom = Polyhedron::from_ints(2, &[(&[1, 0], -1), (&[-1, 0], -1)]).unwrap();
    let inst = RobustInstance::single(1, 1, pf(&[(&[0, 1], 0)], Some(dom))).unwrap();
    let rep = check_hypotheses(&inst, None, &Config::default()).unwrap();
    assert_eq!(rep.status("H1"), HypothesisStatus::FailsWitness);
}

#[test]
fn dual_chain_on_convex_data() {
    let cfg = Config::default();
    for t in [Theorem::T3_1, Theorem::C3_1] {
        let r = validate_equivalence(&trust_region(), t, None, &cfg).unwrap();
        assert_ne!(r.status, ValidationStatus::Disagree, "{t}");
        let r = validate_equivalence(&cp(q1(1, 0, 0), vec![q1(1, 0, -1)]), t, None, &cfg).unwrap();
        assert_eq!(r.status, ValidationStatus::Agree, "{t}: {r:?}");
    }
}

#[test]
fn single_scenario_forms_need_one_scenario() {
    let two = RobustInstance::new(1, 1, vec![pf(&[(&[1, 0], 0)], None), pf(&[(&[-1, 0], 0)], None)]).unwrap();
    assert!(validate_equivalence(&two, Theorem::C2_1, None, &Config::default()).is_err());
    let r = validate_equivalence(&two, Theorem::T2_1, None, &Config::default()).unwrap();
    // sup = |x| >= 0 but no single scenario is bounded below: invalid, and the gap shows it
    assert_eq!(r.left, Truth::False);
    assert_eq!(r.status, ValidationStatus::Agree);
    assert!("t2_1".parse::<Theorem>().is_ok() && "C4.1".parse::<Theorem>().is_ok());
}

#[test]
fn multiplier_found_along_an_unbounded_dual_ray() {
    // the domain row y1 + 2y2 <= -2 makes the best margin +inf; the certificate must
    // still carry a multiplier that works
    let inst = RobustInstance::from_json(
        r#"{"dim_x": 1, "dim_y": 2, "scenarios": [{"kind": "explicit_polyhedral",
            "pieces": [{"slope": ["5", "9/2", "3"], "intercept": "-2"},
                       {"slope": ["-1", "-5/2", "-1/2"], "intercept": "-9/2"}],
            "domain": {"dim": 3, "rows": [{"normal": ["0", "1", "2"], "offset": "-2"}]}}]}"#,
    )
    .unwrap();
    let cfg = Config::default();
    let cert = certify_b(&inst, &cfg).unwrap().certificate.expect("certified");
    assert!(cert.lambda.iter().any(|l| *l != 0.0));
    assert!(verify_certificate(&inst, &cert, &cfg).unwrap().passed);
}
