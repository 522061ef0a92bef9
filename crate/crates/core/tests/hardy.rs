use hardy_chain::hardy::{
    check_hardy, construct_stationary_state_n3, golden_optimum, maximize_violation, premises_force_conclusion,
    stationary_probability_n3, HardyKind, HardyVariant, LocalUnitaryParams, OptimizerConfig, DEFAULT_ZERO_TOL,
};
use hardy_chain::lhv::{all_primed_one, all_unprimed_zero, eval_term, Assignment};
use hardy_chain::quantum::{StateVector, C64};
use hardy_chain::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn variant_one() -> HardyVariant {
    HardyVariant::new(HardyKind::VariantI, 3, &[1, 2]).unwrap()
}

fn all_variants(n_max: usize) -> Vec<HardyVariant> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        out.push(HardyVariant::new(HardyKind::Standard, n, &[]).unwrap());
        for i in 1..n {
            for j in i + 1..n {
                out.push(HardyVariant::new(HardyKind::VariantI, n, &[i, j]).unwrap());
                for k in j + 1..n {
                    out.push(HardyVariant::new(HardyKind::VariantII, n, &[i, j, k]).unwrap());
                    for l in k + 1..n {
                        out.push(HardyVariant::new(HardyKind::VariantIII, n, &[i, j, k, l]).unwrap());
                    }
                }
            }
        }
    }
    out
}

#[test]
fn degenerate_maximizer_family() {
    let s = (3.0 - 5f64.sqrt()) / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..25 {
        // b1² b2² = b3² = s with b2² anywhere in [s, 1].
        let b2 = rng.gen_range(s.sqrt()..1.0f64);
        let b1 = s.sqrt() / b2;
        let b3 = s.sqrt();
        let sign = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let pairs = [b1, b2, b3].map(|b: f64| (sign(&mut rng) * (1.0 - b * b).max(0.0).sqrt(), b));
        let params = LocalUnitaryParams::new(pairs.to_vec()).unwrap();
        let state = construct_stationary_state_n3(&params).unwrap();
        let r = check_hardy(&state, &params.frame(), &variant_one(), DEFAULT_ZERO_TOL).unwrap();
        assert!((r.target - golden_optimum()).abs() < 1e-9, "{pairs:?}: {}", r.target);
        assert!(r.lhv_violated && r.constraint_residual() < 1e-12, "{pairs:?}");
    }
}

#[test]
fn stationary_state_matches_closed_form_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..200 {
        let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..1.5)).collect();
        let params = LocalUnitaryParams::from_angles(&theta);
        let state = construct_stationary_state_n3(&params).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-12);
        let (b1, b2, b3) = (theta[0].sin(), theta[1].sin(), theta[2].sin());
        let want = stationary_probability_n3(b1 * b1 * b2 * b2, b3 * b3).unwrap();
        let r = check_hardy(&state, &params.frame(), &variant_one(), DEFAULT_ZERO_TOL).unwrap();
        assert!((r.target - want).abs() < 1e-12, "{theta:?}");
        assert!(r.constraint_residual() < 1e-12, "{theta:?}");
    }
}

#[test]
fn premises_force_conclusion_on_vertices() {
    for v in all_variants(6) {
        assert!(premises_force_conclusion(&v).unwrap().holds, "{:?}", v.member());
    }
}

#[test]
fn premises_force_conclusion_on_distributions() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for v in all_variants(5) {
        let n = v.n();
        let zero = v.zero_terms();
        let allowed: Vec<Assignment> = (0..1u64 << (2 * n))
            .map(|w| Assignment::from_word(n, w).unwrap())
            .filter(|a| zero.iter().all(|t| eval_term(t, a) == 0))
            .collect();
        for _ in 0..50 {
            let w: Vec<f64> = allowed.iter().map(|_| rng.gen::<f64>().powi(4)).collect();
            let total: f64 = w.iter().sum();
            let p = |t| allowed.iter().zip(&w).map(|(a, x)| eval_term(&t, a) as f64 * x).sum::<f64>() / total;
            let (target, conclusion) = (p(all_primed_one(n)), p(all_unprimed_zero(n)));
            assert!(target > 0.0);
            assert!(conclusion >= target - 1e-12, "{:?}", v.member());
        }
    }
}

#[test]
fn check_hardy_is_reproducible_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for v in all_variants(4) {
        let n = v.n();
        let amps = (0..1 << n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let s = StateVector::new(amps).unwrap();
        let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let frame = LocalUnitaryParams::from_angles(&theta).frame();
        let a = check_hardy(&s, &frame, &v, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(a, check_hardy(&s, &frame, &v, DEFAULT_ZERO_TOL).unwrap());
        let probs = a.zero_terms.iter().map(|z| z.probability).chain([a.target, a.conclusion]);
        assert!(probs.into_iter().all(|p| (0.0..=1.0).contains(&p)));
        assert!(!a.lhv_violated || a.premises_hold);
    }
}

#[test]
fn check_hardy_rejects_mismatched_sizes() {
    let s = StateVector::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    let frame = LocalUnitaryParams::from_angles(&[0.3, 0.3, 0.3]).frame();
    assert!(matches!(check_hardy(&s, &frame, &variant_one(), 1e-9), Err(Error::Dimension { .. })));
}

#[test]
fn optimizer_result_invariants() {
    let cfg = OptimizerConfig { starts: 8, ..Default::default() };
    for v in [
        HardyVariant::new(HardyKind::Standard, 2, &[]).unwrap(),
        variant_one(),
        HardyVariant::new(HardyKind::VariantII, 4, &[1, 2, 3]).unwrap(),
    ] {
        let r = maximize_violation(&v, &cfg).unwrap();
        assert!(r.constraint_residual <= cfg.tolerance);
        assert!(r.best_value > 0.0 && r.best_value <= 1.0);
        let again = check_hardy(&r.state, &r.frame, &v, DEFAULT_ZERO_TOL).unwrap();
        assert!((again.target - r.best_value).abs() < 1e-9);
        assert!((again.constraint_residual() - r.constraint_residual).abs() < 1e-15);
    }
}

#[test]
fn optimizer_is_deterministic() {
    let cfg = OptimizerConfig { starts: 4, seed: 99, ..Default::default() };
    let v = HardyVariant::new(HardyKind::Standard, 2, &[]).unwrap();
    let a = serde_json::to_string(&maximize_violation(&v, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&maximize_violation(&v, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn complex_search_is_available() {
    let cfg = OptimizerConfig { starts: 4, complex: true, ..Default::default() };
    let v = HardyVariant::new(HardyKind::Standard, 2, &[]).unwrap();
    let r = maximize_violation(&v, &cfg).unwrap();
    assert!(r.constraint_residual <= 1e-6);
    assert!(r.best_value <= golden_optimum() + 1e-6, "{}", r.best_value);
}

#[test]
fn report_json_fields() {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = [0.0; 8];
    c[0b001] = g;
    c[0b100] = g;
    c[0b101] = -g * g.sqrt();
    let s = StateVector::from_outcome_coefficients(&c).unwrap();
    let frame = hardy_chain::hardy::explicit_optimal_params().frame();
    let r = check_hardy(&s, &frame, &variant_one(), DEFAULT_ZERO_TOL).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["variant"], "Xij(1,2)@n=3");
    assert_eq!(v["zero_terms"].as_array().unwrap().len(), 3);
    assert_eq!(v["lhv_violated"], true);
    assert!(v["conclusion"].as_f64().unwrap() < 1e-12);
}
