use std::path::Path;

use affinity_lab::bounds::log2_binomial;
use affinity_lab::scenarios::{
    distance_eval, random_dependence_model, random_instance, random_success_pair, RandomInstance,
};
use affinity_lab::{
    conservation_check, famine_affinity_distributions, famine_learned_resources, futility_check,
    grid_example, heuristic_correlation, mi_chain_check, pinsker_gap, run_search,
    sample_uniform_simplex, seed, simplex_expectation_check, zero_affinity_distribution,
    BoundReport, EvalMode, InformationResource, Provenance, Recipient, ResourceDistribution,
    SearchProblem, SearchSpace, SuccessVector, TargetVector,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Kind, ScenarioConfig};
use crate::report::{number, report_violations, write_csv, write_json, Row};
use crate::CliError;

/// Result of a command: `violated` maps to exit status 1.
pub struct Outcome {
    pub violated: bool,
    pub summary: String,
}

fn label_of(t: &TargetVector) -> String {
    let e: Vec<String> = t.elements().map(|e| e.to_string()).collect();
    format!("{{{}}}", e.join(","))
}

fn echo(cfg: &ScenarioConfig, kind: Kind) -> ScenarioConfig {
    ScenarioConfig {
        kind: Some(kind),
        out: None,
        ..cfg.clone()
    }
}

#[derive(Serialize)]
struct RowsReport<'a> {
    config: ScenarioConfig,
    all_hold: bool,
    rows: &'a [Row],
}

fn finish_rows(
    cfg: &ScenarioConfig,
    kind: Kind,
    name: &str,
    out: &Path,
    rows: &[Row],
) -> Result<Outcome, CliError> {
    let violated = report_violations(rows);
    write_json(
        &out.join(format!("{name}.json")),
        &RowsReport {
            config: echo(cfg, kind),
            all_hold: !violated,
            rows,
        },
    )?;
    write_csv(&out.join(format!("{name}.csv")), rows)?;
    let failed = rows.iter().filter(|r| !r.holds).count();
    Ok(Outcome {
        violated,
        summary: format!("{name}: {} checks, {failed} violated", rows.len()),
    })
}

fn recipient<'a>(inst: &'a RandomInstance, mode: EvalMode) -> Result<Recipient<'a, f64>, CliError> {
    inst.recipient(mode).map_err(CliError::from_core)
}

fn instances(
    rng: &mut seed::Rng,
    count: usize,
    sizes: std::ops::RangeInclusive<usize>,
) -> Result<Vec<RandomInstance>, CliError> {
    (0..count)
        .map(|_| random_instance(rng, sizes.clone(), 8).map_err(CliError::from_core))
        .collect()
}

fn label_instance(inst: &RandomInstance) -> String {
    format!(
        "n={} t={} |B|={}",
        inst.space.size(),
        label_of(&inst.target),
        inst.resources.len()
    )
}

pub fn verify(cfg: &ScenarioConfig, out: &Path, corrupt: bool) -> Result<Outcome, CliError> {
    let mode = cfg.eval_mode();
    let sizes = &cfg.verify;
    let core = CliError::from_core;
    let mut rows = Vec::new();

    for transfer in [false, true] {
        let g = grid_example(transfer).map_err(core)?;
        let name = if transfer {
            "tlud_bound_grid_transfer"
        } else {
            "tlud_bound_grid"
        };
        let mut b = BoundReport::new(name, g.success, g.bound, 0.0, "exact", "exact(bits)")
            .map_err(core)?;
        b.holds = g.holds;
        rows.push(Row::new(
            0,
            format!("slack_factor={}", number(g.slack_factor)),
            b,
        ));
    }

    // conservation over all targets
    let mut rng = seed::rng(cfg.seed, 1);
    let batch = instances(&mut rng, sizes.conservation, 2..=10)?;
    let masses: Vec<Vec<f64>> = batch
        .iter()
        .map(|i| sample_uniform_simplex(i.resources.len(), &mut rng))
        .collect();
    let conservation = batch
        .par_iter()
        .zip(&masses)
        .enumerate()
        .map(|(i, (inst, m))| {
            let r = recipient(inst, mode)?;
            let d = ResourceDistribution::new(inst.resources.clone(), m.clone()).map_err(core)?;
            let c = conservation_check(&r, &d).map_err(core)?;
            let mut b = BoundReport::new(
                "conservation",
                c.naive_sum.abs(),
                c.tolerance,
                0.0,
                "target_sum",
                "2^n*1e-10",
            )
            .map_err(core)?;
            b.holds = c.holds;
            Ok(Row::new(
                i,
                format!("n={} |B|={}", c.space_size, inst.resources.len()),
                b,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    rows.extend(conservation);

    // futility: mix the most helpful and most harmful resource to zero affinity
    let mut rng = seed::rng(cfg.seed, 2);
    let mut found = 0;
    let mut attempts = 0;
    while found < sizes.futility {
        attempts += 1;
        if attempts > 200 * sizes.futility.max(1) {
            return Err(CliError::Usage(
                "could not construct zero-affinity distributions".into(),
            ));
        }
        let inst = random_instance(&mut rng, 2..=8, 8).map_err(core)?;
        let r = recipient(&inst, mode)?;
        let per = r
            .per_resource_success(&inst.resources, &inst.target)
            .map_err(core)?;
        let base = affinity_lab::phi(&inst.target, &r.baseline().map_err(core)?).map_err(core)?;
        let best = (0..per.len())
            .max_by(|&a, &b| per[a].total_cmp(&per[b]))
            .unwrap_or(0);
        let worst = (0..per.len())
            .min_by(|&a, &b| per[a].total_cmp(&per[b]))
            .unwrap_or(0);
        let (a_plus, a_minus) = (per[best] - base, per[worst] - base);
        if a_plus <= 1e-6 || a_minus >= -1e-6 {
            continue;
        }
        let d = zero_affinity_distribution(
            inst.resources[best].clone(),
            &a_plus,
            inst.resources[worst].clone(),
            &a_minus,
        )
        .map_err(core)?;
        let f = futility_check(&r, &d, &inst.target).map_err(core)?;
        let mut b = BoundReport::new(
            "futility",
            (f.marginalized - f.baseline).abs(),
            0.0,
            f.tolerance,
            "marginalized",
            "baseline",
        )
        .map_err(core)?;
        b.holds = f.holds;
        rows.push(Row::new(found, label_instance(&inst), b));
        found += 1;
    }

    // famine over learned resources, plus the φ_min = 1 corner
    let mut rng = seed::rng(cfg.seed, 3);
    let batch = instances(&mut rng, sizes.famine_resources, 2..=10)?;
    let thresholds: Vec<f64> = batch.iter().map(|_| rng.random_range(0.05..=1.0)).collect();
    let famine = batch
        .par_iter()
        .zip(&thresholds)
        .enumerate()
        .map(|(i, (inst, &phi_min))| {
            let r = recipient(inst, mode)?;
            let label = format!("{} phi_min={phi_min}", label_instance(inst));
            let main = famine_learned_resources(&r, &inst.resources, &inst.target, &phi_min)
                .map_err(core)?;
            let one =
                famine_learned_resources(&r, &inst.resources, &inst.target, &1.0).map_err(core)?;
            let per = r
                .per_resource_success(&inst.resources, &inst.target)
                .map_err(core)?;
            let corner_rhs = if per.iter().all(|&s| s < 1.0) {
                0.0
            } else {
                1.0
            };
            let corner = BoundReport::new(
                "famine_phi_min_one",
                one.lhs,
                corner_rhs,
                0.0,
                one.lhs_provenance,
                "zero_unless_certain",
            )
            .map_err(core)?;
            Ok([Row::new(i, label.clone(), main), Row::new(i, label, corner)])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    rows.extend(famine.into_iter().flatten());

    // famine over affinity distributions
    let mut rng = seed::rng(cfg.seed, 4);
    let batch = instances(&mut rng, sizes.famine_distributions, 2..=10)?;
    let thresholds: Vec<f64> = batch.iter().map(|_| rng.random_range(0.01..=0.5)).collect();
    let famine = batch
        .par_iter()
        .zip(&thresholds)
        .enumerate()
        .map(|(i, (inst, &phi_min))| {
            let r = recipient(inst, mode)?;
            let f = famine_affinity_distributions(
                &r,
                &inst.resources,
                &inst.target,
                &phi_min,
                cfg.samples,
                seed::derive(cfg.seed, 4_000 + i as u64),
            )
            .map_err(core)?;
            Ok(Row::new(
                i,
                format!("{} phi_min={phi_min}", label_instance(inst)),
                f.bound,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    rows.extend(famine);

    // uniform simplex expectation
    let mut rng = seed::rng(cfg.seed, 5);
    let batch = instances(&mut rng, sizes.simplex, 2..=10)?;
    let simplex = batch
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let r = recipient(inst, mode)?;
            let s = simplex_expectation_check(
                &r,
                &inst.resources,
                &inst.target,
                cfg.samples,
                seed::derive(cfg.seed, 5_000 + i as u64),
            )
            .map_err(core)?;
            let mut b = BoundReport::new(
                "simplex_expectation",
                (s.mc_mean - s.uniform_affinity).abs(),
                4.0 * s.std_error + 1e-12,
                0.0,
                format!("mc(samples={})", s.samples),
                "4se",
            )
            .map_err(core)?;
            b.holds = s.holds;
            Ok(Row::new(i, label_instance(inst), b))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    rows.extend(simplex);

    // mutual-information chain on random dependence structures
    let mut rng = seed::rng(cfg.seed, 6);
    for i in 0..sizes.chain {
        let model = random_dependence_model(&mut rng);
        let joint = model.to_joint().map_err(core)?;
        let c = mi_chain_check(&joint).map_err(core)?;
        let label = format!("shape={:?}", joint.shape());
        let residual = BoundReport::new(
            "chain_rule_residual",
            c.chain_rule_residual,
            0.0,
            1e-9,
            "exact(bits)",
            "zero",
        )
        .map_err(core)?;
        for b in [c.bound, c.processing, c.source_processing, residual] {
            rows.push(Row::new(i, label.clone(), b));
        }
    }

    // Pinsker gap: random pairs, the grid pair, and identical vectors
    let mut rng = seed::rng(cfg.seed, 7);
    for i in 0..sizes.pinsker {
        let n = rng.random_range(2..=10);
        let (tl, notl, t) = random_success_pair(&mut rng, n).map_err(core)?;
        rows.push(Row::new(
            i,
            format!("n={n} t={}", label_of(&t)),
            pinsker_gap(&tl, &notl, &t).map_err(core)?,
        ));
    }
    let grid = SearchSpace::new(256).map_err(core)?;
    let uniform = SuccessVector::new(vec![1.0 / 256.0; 256], Provenance::Exact).map_err(core)?;
    let half = SuccessVector::new(
        (0..256)
            .map(|e| if e < 128 { 1.0 / 128.0 } else { 0.0 })
            .collect(),
        Provenance::Exact,
    )
    .map_err(core)?;
    let cell = TargetVector::from_elements(grid, &[37]).map_err(core)?;
    rows.push(Row::new(
        0,
        "grid",
        pinsker_gap(&half, &uniform, &cell).map_err(core)?,
    ));
    rows.push(Row::new(
        0,
        "identical",
        pinsker_gap(&uniform, &uniform, &cell).map_err(core)?,
    ));

    if corrupt {
        if let Some(first) = rows.first_mut() {
            first.corrupt();
        }
    }
    finish_rows(cfg, Kind::Verify, "verify", out, &rows)
}

#[derive(Serialize)]
struct GridOut {
    with_transfer: bool,
    success: f64,
    success_fraction: String,
    source_information: f64,
    recipient_information: f64,
    target_entropy: f64,
    divergence: f64,
    i_omega: f64,
    bound: f64,
    bound_fraction: Option<String>,
    slack_factor: serde_json::Value,
    holds: bool,
}

pub fn grid(transfer: bool, out: &Path) -> Result<Outcome, CliError> {
    let g = grid_example(transfer).map_err(CliError::from_core)?;
    let row = GridOut {
        with_transfer: g.with_transfer,
        success: g.success,
        success_fraction: g.success_fraction,
        source_information: g.source_information,
        recipient_information: g.recipient_information,
        target_entropy: g.target_entropy,
        divergence: g.divergence,
        i_omega: g.i_omega,
        bound: g.bound,
        bound_fraction: g.bound_fraction,
        slack_factor: number(g.slack_factor),
        holds: g.holds,
    };
    write_json(&out.join("grid_example.json"), &row)?;
    write_csv(&out.join("grid_example.csv"), std::slice::from_ref(&row))?;
    if !row.holds {
        eprintln!(
            "violation: {}",
            serde_json::to_string(&row).unwrap_or_default()
        );
    }
    Ok(Outcome {
        violated: !row.holds,
        summary: format!(
            "grid example (transfer = {transfer}): success {} ≤ bound {}, slack factor {}",
            row.success_fraction,
            row.bound_fraction.as_deref().unwrap_or("?"),
            row.slack_factor
        ),
    })
}

pub fn famine(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome, CliError> {
    let core = CliError::from_core;
    let n = cfg.omega;
    if n > 20 || log2_binomial(n, cfg.k) > 14.0 {
        return Err(CliError::Usage(format!(
            "too many targets of size {} in a space of {n}",
            cfg.k
        )));
    }
    let space = SearchSpace::new(n).map_err(core)?;
    let targets: Vec<TargetVector> = (1u64..1 << n)
        .filter(|m| m.count_ones() as usize == cfg.k)
        .map(|m| TargetVector::from_mask(space, m))
        .collect::<Result<_, _>>()
        .map_err(core)?;
    let resources = cfg.resources()?;
    let alg = cfg.algorithm()?;
    let w = cfg.weighting()?;
    let initial = cfg.initial()?;
    let mode = cfg.eval_mode();

    let rows = targets
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let base =
                InformationResource::new(space, initial.clone(), distance_eval(t)).map_err(core)?;
            let r = Recipient::new(alg.as_ref(), space, &base, &w, mode).map_err(core)?;
            let learned =
                famine_learned_resources(&r, &resources, t, &cfg.phi_min).map_err(core)?;
            let dist = famine_affinity_distributions(
                &r,
                &resources,
                t,
                &cfg.phi_min,
                cfg.samples,
                seed::derive(cfg.seed, i as u64),
            )
            .map_err(core)?;
            Ok([
                Row::new(i, label_of(t), learned),
                Row::new(i, label_of(t), dist.bound),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows: Vec<Row> = rows.into_iter().flatten().collect();
    finish_rows(cfg, Kind::Famine, "famine", out, &rows)
}

#[derive(Serialize)]
struct HeuristicOut<'a> {
    config: ScenarioConfig,
    spearman: Option<f64>,
    monotone: bool,
    rows: &'a [affinity_lab::scenarios::HeuristicRow],
}

pub fn heuristic(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome, CliError> {
    let report = heuristic_correlation(&cfg.heuristic_config()).map_err(CliError::from_core)?;
    write_json(
        &out.join("heuristic.json"),
        &HeuristicOut {
            config: echo(cfg, Kind::Heuristic),
            spearman: report.spearman,
            monotone: report.monotone,
            rows: &report.rows,
        },
    )?;
    write_csv(&out.join("heuristic.csv"), &report.rows)?;
    let violated = !report.monotone || report.spearman.is_some_and(|s| s <= 0.0);
    if violated {
        eprintln!(
            "violation: mean score monotone = {}, rank correlation = {:?}",
            report.monotone, report.spearman
        );
    }
    Ok(Outcome {
        violated,
        summary: format!(
            "heuristic: {} ρ values, monotone = {}, rank correlation = {}",
            report.rows.len(),
            report.monotone,
            report
                .spearman
                .map_or("undefined".to_string(), |s| format!("{s:.4}"))
        ),
    })
}

#[derive(Serialize)]
struct Step {
    step: usize,
    element: usize,
    value: i64,
}

#[derive(Serialize)]
struct RunOut<'a> {
    config: ScenarioConfig,
    target: Vec<usize>,
    hit: bool,
    history: &'a [Step],
}

pub fn run(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome, CliError> {
    let core = CliError::from_core;
    let space = SearchSpace::new(cfg.omega).map_err(core)?;
    let members: Vec<usize> = cfg.target.clone().unwrap_or_else(|| (0..cfg.k).collect());
    let target = TargetVector::from_elements(space, &members).map_err(core)?;
    let resource =
        InformationResource::new(space, cfg.initial()?, distance_eval(&target)).map_err(core)?;
    let problem = SearchProblem::new(space, target.clone(), resource).map_err(core)?;
    let alg = cfg.algorithm()?;
    let history = run_search(&alg, &problem, cfg.steps, cfg.seed).map_err(core)?;
    let steps: Vec<Step> = history
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &(element, value))| Step {
            step: i + 1,
            element,
            value,
        })
        .collect();
    let hit = steps.iter().any(|s| target.contains(s.element));
    write_json(
        &out.join("run.json"),
        &RunOut {
            config: echo(cfg, Kind::Run),
            target: target.elements().collect(),
            hit,
            history: &steps,
        },
    )?;
    write_csv(&out.join("history.csv"), &steps)?;
    Ok(Outcome {
        violated: false,
        summary: format!("run: {} steps, target hit = {hit}", steps.len()),
    })
}
