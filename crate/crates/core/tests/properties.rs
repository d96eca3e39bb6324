use isodet::equations::{generic_psi, generators};
use isodet::orbits::{classify, closure_leq, random_orbit_point, solve_congruence, congruence_residual, valid_params};
use isodet::verify::{check_closure_order, SampleOptions};
use isodet::{BilinearForm, Field, FormKind, Matrix, OrbitParams, SpaceConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kind_strategy() -> impl Strategy<Value = FormKind> {
    prop_oneof![Just(FormKind::Symmetric), Just(FormKind::Alternating)]
}

fn prime_strategy() -> impl Strategy<Value = u64> {
    prop_oneof![Just(3u64), Just(5), Just(7), Just(11), Just(13)]
}

fn config_for(kind: FormKind, e: usize, f: usize, p: u64) -> SpaceConfig {
    let f = if kind == FormKind::Alternating && f % 2 == 1 { f + 1 } else { f };
    SpaceConfig::split(kind, e, f, Field::prime(p).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_is_equivariant(kind in kind_strategy(), e in 1usize..4, f in 3usize..7, p in prime_strategy(), seed: u64) {
        let config = config_for(kind, e, f, p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = config.field();
        let phi = Matrix::random(field, e, config.f, &mut rng);
        let a = Matrix::random_invertible(field, e, &mut rng);
        let b = config.form.random_isometry(&mut rng).matrix;
        let moved = &(&a * &phi) * &b.transpose();
        let psi = config.form.psi(&phi).unwrap();
        prop_assert_eq!(config.form.psi(&moved).unwrap(), &(&a * &psi) * &a.transpose());
        prop_assert_eq!(classify(&moved, &config).unwrap(), classify(&phi, &config).unwrap());
    }

    #[test]
    fn classification_is_always_valid(kind in kind_strategy(), e in 1usize..4, f in 3usize..7, p in prime_strategy(), seed: u64) {
        let config = config_for(kind, e, f, p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = Matrix::random(config.field(), e, config.f, &mut rng);
        let class = classify(&phi, &config).unwrap();
        prop_assert!(valid_params(&config).contains(&class));
    }

    #[test]
    fn generic_psi_evaluates_to_psi(kind in kind_strategy(), e in 1usize..4, f in 3usize..6, p in prime_strategy(), seed: u64) {
        let config = config_for(kind, e, f, p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = Matrix::random(config.field(), e, config.f, &mut rng);
        let psi = config.form.psi(&phi).unwrap();
        let generic = generic_psi(&config);
        for i in 0..e {
            for j in 0..e {
                prop_assert_eq!(&generic[i][j].evaluate(&phi).unwrap(), psi.get(i, j));
            }
        }
    }

    #[test]
    fn congruence_has_zero_residual(kind in kind_strategy(), a_rows in 1usize..4, f in 4usize..7, seed: u64) {
        let field = Field::rationals();
        let f = if kind == FormKind::Alternating && f % 2 == 1 { f + 1 } else { f };
        let form = BilinearForm::split(kind, field, f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = loop {
            let a = Matrix::random(field, a_rows, f, &mut rng);
            if a.rank() == a_rows {
                break a;
            }
        };
        let s = Matrix::random(field, a_rows, a_rows, &mut rng);
        let s = match kind {
            FormKind::Symmetric => &s + &s.transpose(),
            FormKind::Alternating => &s - &s.transpose(),
        };
        let b = solve_congruence(&s, &a, &form).unwrap();
        prop_assert!(congruence_residual(&s, &a, &b, &form).is_zero());
    }

    #[test]
    fn generators_vanish_on_closures(kind in kind_strategy(), e in 1usize..4, f in 3usize..6, seed: u64) {
        let config = config_for(kind, e, f, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = valid_params(&config);
        let q = params[seed as usize % params.len()];
        let x = random_orbit_point(&q, &config, &mut rng).unwrap();
        for p in &params {
            let set = generators(p, &config).unwrap();
            prop_assert_eq!(set.all_vanish(&x).unwrap(), closure_leq(&q, p, &config).unwrap());
        }
    }
}

#[test]
fn vanishing_correctness_sweep() {
    for kind in [FormKind::Symmetric, FormKind::Alternating] {
        for e in 1..=3 {
            for f in 3..=5 {
                if kind == FormKind::Alternating && f % 2 == 1 {
                    continue;
                }
                let config = SpaceConfig::split(kind, e, f, Field::prime(7).unwrap()).unwrap();
                let report = check_closure_order(&config, SampleOptions { per_orbit: 100, seed: 11 }).unwrap();
                assert!(report.passed(), "{kind} e={e} f={f}: {:?}", report.status);
            }
        }
    }
}

#[test]
fn closure_sampling_over_rationals() {
    let config = SpaceConfig::split(FormKind::Symmetric, 3, 4, Field::rationals()).unwrap();
    let report = check_closure_order(&config, SampleOptions { per_orbit: 10, seed: 2 }).unwrap();
    assert!(report.passed(), "{:?}", report.status);
}

#[test]
fn exceptional_sample_classes() {
    let config = SpaceConfig::split(FormKind::Symmetric, 2, 4, Field::prime(5).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for p in [OrbitParams::new(0, 0), OrbitParams::signed(2, 0, isodet::Sign::Minus)] {
        for _ in 0..500 {
            let x = random_orbit_point(&p, &config, &mut rng).unwrap();
            assert_eq!(classify(&x, &config).unwrap(), p);
        }
    }
    let alt = SpaceConfig::split(FormKind::Alternating, 2, 4, Field::prime(5).unwrap()).unwrap();
    for _ in 0..500 {
        let x = random_orbit_point(&OrbitParams::new(2, 0), &alt, &mut rng).unwrap();
        assert_eq!(classify(&x, &alt).unwrap(), OrbitParams::new(2, 0));
    }
}
