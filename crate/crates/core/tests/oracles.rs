//! Cross-checks against independent computations.

use affinity_lab::algorithms::HintedElimination;
use affinity_lab::scenarios::{random_instance, spearman};
use affinity_lab::*;
use rand::Rng;

fn l(s: &str) -> LearningResource {
    s.parse().unwrap()
}

#[test]
fn monte_carlo_matches_enumeration_within_three_sigma() {
    let space = SearchSpace::new(6).unwrap();
    let base =
        InformationResource::new(space, "1".parse().unwrap(), vec![2, 1, 0, 1, 2, 3]).unwrap();
    let alg = HintedElimination::new(1);
    let w = StepWeighting::<f64>::last_step(3).unwrap();
    let trials = 100_000;
    let exact = success_vector(&alg, space, &base, &w, EvalMode::exact()).unwrap();
    let mc = success_vector(
        &alg,
        space,
        &base,
        &w,
        EvalMode::MonteCarlo { trials, seed: 5 },
    )
    .unwrap();
    for (p, q) in exact.probs().iter().zip(mc.probs()) {
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (p - q).abs() <= 3.0 * se + 1e-12,
            "exact {p} vs sampled {q}"
        );
    }
}

#[test]
fn target_sum_of_affinity_brute_force() {
    let mut rng = seed_rng(7);
    for _ in 0..10 {
        let inst = random_instance(&mut rng, 2..=7, 5).unwrap();
        let r = inst.recipient(EvalMode::exact()).unwrap();
        let masses = sample_uniform_simplex(inst.resources.len(), &mut rng);
        let d = ResourceDistribution::new(inst.resources.clone(), masses).unwrap();
        let n = inst.space.size();
        let mut total = 0.0;
        for mask in 1u64..(1 << n) {
            let t = TargetVector::from_mask(inst.space, mask).unwrap();
            total += affinity(&r, &d, &t).unwrap();
        }
        assert!(
            total.abs() <= (1u64 << n) as f64 * 1e-10,
            "sum {total} on |Ω| = {n}"
        );
    }
}

#[test]
fn two_resource_famine_matches_segment_length() {
    // per-resource affinities a₁, a₂ of opposite sign; along the segment
    // λa₁ + (1 − λ)a₂ with λ ~ U[0, 1] the favourable set is an interval
    let space = SearchSpace::new(8).unwrap();
    let base = InformationResource::blank(space);
    let alg = HintedElimination::new(1);
    let w = StepWeighting::<f64>::last_step(1).unwrap();
    let r = Recipient::new(&alg, space, &base, &w, EvalMode::exact()).unwrap();
    let t = TargetVector::from_elements(space, &[0, 1]).unwrap();
    let resources = [l("0"), l("1")];
    let per = r.per_resource_success(&resources, &t).unwrap();
    let phi0 = phi(&t, &r.baseline().unwrap()).unwrap();
    let (a1, a2) = (per[0] - phi0, per[1] - phi0);
    assert!(a1 > 0.0 && a2 < 0.0);

    let phi_min = 0.1;
    let oracle = ((a1 - phi_min) / (a1 - a2)).clamp(0.0, 1.0);
    let report = famine_affinity_distributions(&r, &resources, &t, &phi_min, 100_000, 3).unwrap();
    assert!(!report.exact);
    assert!(
        report.ci_low <= oracle && oracle <= report.ci_high,
        "oracle {oracle} outside [{}, {}]",
        report.ci_low,
        report.ci_high
    );
    assert!(report.bound.holds);
}

#[test]
fn futility_marginal_equals_baseline() {
    let space = SearchSpace::new(4).unwrap();
    let base = InformationResource::blank(space);
    let alg = HintedElimination::new(1);
    let w = StepWeighting::<Exact>::last_step(1).unwrap();
    let r = Recipient::new(&alg, space, &base, &w, EvalMode::exact()).unwrap();
    let t = TargetVector::from_elements(space, &[0]).unwrap();
    let per = r.per_resource_success(&[l("0"), l("1")], &t).unwrap();
    let phi0 = phi(&t, &r.baseline().unwrap()).unwrap();
    // hinted block {0, 1} gives 1/2, the other block gives 0; baseline 1/4
    let d = zero_affinity_distribution(
        l("0"),
        &(per[0].clone() - phi0.clone()),
        l("1"),
        &(per[1].clone() - phi0),
    )
    .unwrap();
    assert_eq!(fraction_string(&d.masses()[0]), "1/2");
    let report = futility_check(&r, &d, &t).unwrap();
    assert!(report.holds);
    assert_eq!(report.marginalized, 0.25);
}

#[test]
fn uniform_simplex_mean_is_uniform_average() {
    let per = [0.3, -0.1, 0.05, 0.2];
    let draws = sampled_affinities(&per, 20_000, 9);
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    let se = (var / draws.len() as f64).sqrt();
    let oracle = per.iter().sum::<f64>() / per.len() as f64;
    assert!((mean - oracle).abs() <= 4.0 * se);
}

#[test]
fn heuristic_sweep_tracks_overlap() {
    let report = heuristic_correlation(&HeuristicConfig::default()).unwrap();
    assert!(report.monotone);
    assert!(report.spearman.unwrap() > 0.0);
    let first = &report.rows[0];
    let last = report.rows.last().unwrap();
    assert!(last.mean_score > first.mean_score);
    assert!(last.mean_benefit > first.mean_benefit);
}

#[test]
fn heuristic_ignores_recipient_evaluation() {
    let pair = make_transfer_pair(16, 4, 0.5, 2, 11).unwrap();
    let alg = HintedElimination::new(2);
    let score = heuristic_score::<Exact>(&pair, &alg, 3, 1_000_000).unwrap();
    let mut noisy = pair.clone();
    let space = noisy.recipient.space;
    let mut rng = seed_rng(1);
    let eval = (0..16).map(|_| rng.random_range(0..5)).collect();
    noisy.recipient.resource = InformationResource::new(space, BitString::empty(), eval).unwrap();
    assert_eq!(
        heuristic_score::<Exact>(&noisy, &alg, 3, 1_000_000).unwrap(),
        score
    );
}

#[test]
fn constant_rho_grid_has_no_correlation() {
    let cfg = HeuristicConfig {
        rhos: vec![0.5, 0.5, 0.5],
        trials: 5,
        ..HeuristicConfig::default()
    };
    assert_eq!(heuristic_correlation(&cfg).unwrap().spearman, None);
    assert_eq!(spearman(&[1.0, 2.0, 3.0], &[2.0, 4.0, 9.0]), Some(1.0));
}

fn seed_rng(s: u64) -> seed::Rng {
    seed::rng(s, 0)
}
