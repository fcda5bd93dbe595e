mod common;

use common::*;
use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sproc::influence::{region_raster, scenario_value, worst_case_reduce, RasterSpec, Star, StarField};
use sproc::linrat::{rat, ratio, Rational};
use sproc::procedures::{certify_b, check_a, verify_certificate};
use sproc::rockafellian::{Rockafellian, RobustInstance};
use sproc::{Config, Verdict};

fn field_strategy() -> impl Strategy<Value = StarField> {
    prop::collection::vec(((-6i64..=6, -6i64..=6), (1i64..=4, 0i64..=4)), 2..=4).prop_filter_map(
        "distinct positions",
        |raw| {
            let stars = raw
                .iter()
                .enumerate()
                .map(|(i, ((x, y), (lo, extra)))| Star {
                    id: format!("s{i}"),
                    pos: vec![rat(*x), rat(*y)],
                    interval: vec![rat(*lo), rat(lo + extra)],
                })
                .collect();
            StarField::new(2, stars).ok()
        },
    )
}

fn polyhedral_strategy(max_scenarios: usize) -> impl Strategy<Value = RobustInstance> {
    (any::<u64>(), 1..=max_scenarios).prop_map(|(seed, u)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (dx, dy) = (1 + (seed % 2) as usize, 1 + (seed / 2 % 2) as usize);
        let s = (0..u).map(|_| Rockafellian::ExplicitPolyhedral(random_polyhedral(&mut rng, dx, dy))).collect();
        RobustInstance::new(dx, dy, s).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn endpoint_bound_is_exact(
        field in field_strategy(),
        x in prop::collection::vec(-40i64..=40, 2),
        w in prop::collection::vec(0i64..=8, 2),
    ) {
        let x: Vec<Rational> = x.iter().map(|v| ratio(*v, 4)).collect();
        let s = &field.stars[0];
        let sys = worst_case_reduce(&field, &s.id).unwrap();
        for c in &sys.constraints {
            let t = field.star(&c.rival).unwrap();
            // interior masses by convex weights of the endpoints
            let mix = |lo: &Rational, hi: &Rational, k: i64| lo + (hi - lo) * ratio(k, 8);
            let u_t = mix(t.low(), t.high(), w[0]);
            let u_s = mix(s.low(), s.high(), w[1]);
            let bound = c.q.eval_exact(&x);
            prop_assert!(scenario_value(&field, &s.id, &t.id, &u_t, &u_s, &x).unwrap() <= bound);
            prop_assert_eq!(scenario_value(&field, &s.id, &t.id, t.high(), s.low(), &x).unwrap(), bound);
        }
    }

    #[test]
    fn raster_is_deterministic(field in field_strategy()) {
        let sys = worst_case_reduce(&field, "s0").unwrap();
        let spec = RasterSpec::square(-4, 4, 17);
        let a = region_raster(&field, &sys, &spec).unwrap();
        let b = region_raster(&field, &sys, &spec).unwrap();
        prop_assert_eq!(a.to_pgm(), b.to_pgm());
    }

    #[test]
    fn instances_round_trip(inst in polyhedral_strategy(3), seed in any::<u64>()) {
        prop_assert_eq!(&RobustInstance::from_json(&inst.to_json()).unwrap(), &inst);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = RobustInstance::single(2, 2, random_cp(&mut rng, 2, 2)).unwrap();
        let text = q.to_json();
        prop_assert_eq!(RobustInstance::from_json(&text).unwrap().to_json(), text);
    }

    #[test]
    fn polyhedral_certificates_are_sound(inst in polyhedral_strategy(3)) {
        let cfg = Config::default();
        if let Some(c) = certify_b(&inst, &cfg).unwrap().certificate {
            prop_assert!(verify_certificate(&inst, &c, &cfg).unwrap().passed);
            prop_assert_eq!(check_a(&inst, &cfg).unwrap().verdict, Verdict::Holds);
        }
    }

    #[test]
    fn adding_scenarios_is_monotone(inst in polyhedral_strategy(2), seed in any::<u64>()) {
        let cfg = Config::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra = Rockafellian::ExplicitPolyhedral(random_polyhedral(&mut rng, inst.dim_x, inst.dim_y));
        let bigger = inst.with_extra_scenarios(&[extra]).unwrap();
        if certify_b(&inst, &cfg).unwrap().certificate.is_some() {
            prop_assert!(certify_b(&bigger, &cfg).unwrap().certificate.is_some());
        }
        if check_a(&inst, &cfg).unwrap().verdict == Verdict::Holds {
            prop_assert_eq!(check_a(&bigger, &cfg).unwrap().verdict, Verdict::Holds);
        }
    }
}

/// Replacing each scenario by its biconjugate leaves the certifiable scenarios
/// unchanged on convex data.
#[test]
fn biconjugate_family_certifies_the_same_scenarios() {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for k in 0..50 {
        let inst = if k % 2 == 0 {
            let dx = 1 + k % 3 / 2;
            let s = (0..2).map(|_| Rockafellian::ExplicitPolyhedral(random_polyhedral(&mut rng, dx, 1))).collect();
            RobustInstance::new(dx, 1, s).unwrap()
        } else {
            RobustInstance::single(1, 1, random_convex_cp(&mut rng, 1, 1)).unwrap()
        };
        let bi = inst.biconjugate_instance().expect("convex data");
        let scenarios = |i: &RobustInstance| -> Vec<usize> {
            certify_b(i, &cfg).unwrap().attempts.iter().filter(|a| a.certified).map(|a| a.scenario).collect()
        };
        let (a, b) = (certify_b(&inst, &cfg).unwrap(), certify_b(&bi, &cfg).unwrap());
        assert_eq!(a.certificate.map(|c| c.scenario), b.certificate.map(|c| c.scenario), "instance {k}");
        assert_eq!(scenarios(&inst), scenarios(&bi), "instance {k}");
    }
}

#[test]
fn certain_two_star_split_is_a_half_plane() {
    let field = StarField::new(
        2,
        vec![
            Star { id: "a".into(), pos: vec![rat(-1), rat(0)], interval: vec![rat(1), rat(1)] },
            Star { id: "b".into(), pos: vec![rat(1), rat(0)], interval: vec![rat(1), rat(1)] },
        ],
    )
    .unwrap();
    let sys = worst_case_reduce(&field, "a").unwrap();
    // ‖x-b‖² - ‖x-a‖² = -4x₁: affine, sign decided by x₁ alone
    let q = &sys.constraints[0].q;
    assert!(q.q().iter().flatten().all(|v| v == &rat(0)));
    assert_eq!(q.a(), &[rat(-4), rat(0)]);
    assert!(q.eval_exact(&[rat(2), rat(7)]).is_negative());
}
