//! Concrete constructions: the 16×16 grid transfer example, synthetic
//! source/recipient pairs with tunable target overlap, the source-only
//! transferability heuristic, and random instance generators used by the
//! verification suite.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affinity::{affinity, sample_uniform_simplex, Recipient, ResourceDistribution};
use crate::algorithms::{block_of, HintedElimination, HintedSampler, UniformSampler};
use crate::bounds::{tlud_bound, DependenceModel};
use crate::error::{Error, Result};
use crate::info::JointModel;
use crate::metrics::{phi, success_vector, EvalMode, Provenance, StepWeighting, SuccessVector};
use crate::scalar::{dyadic_fraction, fraction_string, Scalar};
use crate::search::{
    augment_resource, for_each_prefix, BitString, EvalValue, InformationResource, LearningResource,
    SearchAlgorithm, SearchHistory, SearchProblem, SearchSpace, TargetVector,
};
use crate::seed;

pub const GRID_SIDE: usize = 16;

/// Single-cell target on a row-major `16 × 16` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridProblem {
    pub target: usize,
}

impl GridProblem {
    pub fn new(row: usize, col: usize) -> Result<Self> {
        if row >= GRID_SIDE || col >= GRID_SIDE {
            return Err(Error::InvalidParameter(format!(
                "cell ({row}, {col}) is off the grid"
            )));
        }
        Ok(GridProblem {
            target: row * GRID_SIDE + col,
        })
    }

    pub fn space() -> SearchSpace {
        SearchSpace::new(GRID_SIDE * GRID_SIDE).expect("grid is nonempty")
    }

    pub fn row(&self) -> usize {
        self.target / GRID_SIDE
    }

    /// Half-indicator bit: 0 for the top half (rows 0–7).
    pub fn half_bit(&self) -> LearningResource {
        LearningResource::new(BitString::from_uint(
            (self.row() >= GRID_SIDE / 2) as u64,
            1,
        ))
    }

    pub fn target_vector(&self) -> TargetVector {
        TargetVector::from_elements(Self::space(), &[self.target]).expect("cell is on the grid")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub with_transfer: bool,
    /// Expected success over the uniform target distribution.
    pub success: f64,
    pub success_fraction: String,
    pub source_information: f64,
    pub recipient_information: f64,
    pub target_entropy: f64,
    pub divergence: f64,
    pub i_omega: f64,
    pub bound: f64,
    pub bound_fraction: Option<String>,
    /// `bound / success`.
    pub slack_factor: f64,
    pub holds: bool,
}

/// The grid example, with or without the half-indicator transfer.
///
/// Without transfer the recipient guesses uniformly. With transfer the
/// source reveals which half holds the target and the recipient guesses
/// uniformly inside that half. Success is computed in exact rationals.
pub fn grid_example(with_transfer: bool) -> Result<GridReport> {
    let space = GridProblem::space();
    let n = space.size();
    let base = InformationResource::blank(space);
    let w = StepWeighting::<BigRational>::last_step(1)?;
    let cells: Vec<GridProblem> = (0..n).map(|target| GridProblem { target }).collect();
    let targets: Vec<TargetVector> = cells.iter().map(GridProblem::target_vector).collect();

    // success[t][s]: exact φ for target t when the source reports s
    let sources: Vec<LearningResource> = if with_transfer {
        vec!["0".parse()?, "1".parse()?]
    } else {
        vec![LearningResource::empty()]
    };
    let alg: Box<dyn SearchAlgorithm<BigRational>> = if with_transfer {
        Box::new(HintedSampler::new(1))
    } else {
        Box::new(UniformSampler)
    };
    let vectors = sources
        .iter()
        .map(|l| {
            success_vector(
                &alg,
                space,
                &augment_resource(&base, l),
                &w,
                EvalMode::exact(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let source_of = |cell: &GridProblem| {
        if with_transfer {
            cell.half_bit().bits.to_uint().unwrap_or(0) as usize
        } else {
            0
        }
    };

    let mut success = BigRational::from_integer(0.into());
    for (cell, t) in cells.iter().zip(&targets) {
        success += phi(t, &vectors[source_of(cell)])?;
    }
    success /= BigRational::from_integer((n as i64).into());

    let joint = JointModel::from_fn(vec![n, sources.len(), 1], |i| {
        if source_of(&cells[i[0]]) == i[1] {
            1.0 / n as f64
        } else {
            0.0
        }
    })?;
    let table: Vec<Vec<f64>> = targets
        .iter()
        .map(|t| {
            vectors
                .iter()
                .map(|v| phi(t, v).map(|x| Scalar::to_f64(&x)))
                .collect()
        })
        .collect::<Result<_>>()?;
    let report = tlud_bound(&joint, &targets, |t, s, _| table[t][s])?;

    let bound = report.bound.rhs;
    let slack = BigRational::from_float(bound)
        .map(|b| b / success.clone())
        .and_then(|r| ToPrimitive::to_f64(&r))
        .unwrap_or(f64::NAN);
    Ok(GridReport {
        with_transfer,
        success: Scalar::to_f64(&success),
        success_fraction: fraction_string(&success),
        source_information: report.source_information,
        recipient_information: report.recipient_information,
        target_entropy: report.target_entropy,
        divergence: report.divergence,
        i_omega: report.i_omega,
        bound,
        bound_fraction: dyadic_fraction(bound),
        slack_factor: slack,
        holds: report.bound.holds,
    })
}

/// Loss of each element: distance (in id space) to the nearest target
/// element, so members of the target evaluate to 0.
pub fn distance_eval(target: &TargetVector) -> Vec<EvalValue> {
    let members: Vec<usize> = target.elements().collect();
    (0..target.len())
        .map(|i| {
            members
                .iter()
                .map(|&m| i.abs_diff(m) as EvalValue)
                .min()
                .unwrap_or(EvalValue::MAX)
        })
        .collect()
}

/// Turns a finished source run into a learning resource: the lowest-loss
/// query (earliest on ties) is encoded as its block index at `bits` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TransferMap {
    pub bits: usize,
}

impl TransferMap {
    pub fn encode(&self, space: SearchSpace, history: &SearchHistory) -> LearningResource {
        let best = history
            .entries()
            .iter()
            .enumerate()
            .min_by_key(|&(i, &(_, v))| (v, i))
            .map(|(_, &(e, _))| e);
        match best {
            Some(e) => LearningResource::new(BitString::from_uint(
                block_of(space.size(), self.bits, e),
                self.bits,
            )),
            None => LearningResource::empty(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransferPair {
    pub source: SearchProblem,
    pub recipient: SearchProblem,
    pub transfer: TransferMap,
    pub rho: f64,
    /// Realised `|T_S ∩ T_R|`.
    pub overlap: usize,
}

/// Synthetic pair on `|Ω| = n` with `k`-element targets overlapping in
/// `⌈ρk⌉` elements (more only when the complement is too small).
pub fn make_transfer_pair(
    n: usize,
    k: usize,
    rho: f64,
    bits: usize,
    seed: u64,
) -> Result<TransferPair> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ k < |Ω|, got k = {k}, |Ω| = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "ρ must lie in [0, 1], got {rho}"
        )));
    }
    if bits > 32 {
        return Err(Error::InvalidParameter(format!(
            "transfer precision of {bits} bits is too large"
        )));
    }
    let space = SearchSpace::new(n)?;
    let mut rng = seed::rng(seed, 0);

    let recipient_members = index::sample(&mut rng, n, k).into_vec();
    let mut outside: Vec<usize> = (0..n).filter(|i| !recipient_members.contains(i)).collect();
    let wanted = ((rho * k as f64) - 1e-9).ceil().max(0.0) as usize;
    let overlap = wanted.max(k.saturating_sub(outside.len()));

    let kept = index::sample(&mut rng, k, overlap)
        .into_iter()
        .map(|i| recipient_members[i]);
    let fresh = index::sample(&mut rng, outside.len(), k - overlap).into_vec();
    let mut source_members: Vec<usize> = kept.collect();
    source_members.extend(fresh.iter().map(|&i| outside[i]));
    outside.clear();

    let make = |members: &[usize]| -> Result<SearchProblem> {
        let target = TargetVector::from_elements(space, members)?;
        let resource = InformationResource::new(space, BitString::empty(), distance_eval(&target))?;
        SearchProblem::new(space, target, resource)
    };
    Ok(TransferPair {
        source: make(&source_members)?,
        recipient: make(&recipient_members)?,
        transfer: TransferMap { bits },
        rho,
        overlap,
    })
}

/// Distribution of the learning resource produced by training `alg` on the
/// source problem for `train_steps` steps, by exact enumeration of every
/// source run.
pub fn learned_distribution<S: Scalar>(
    pair: &TransferPair,
    alg: &dyn SearchAlgorithm<S>,
    train_steps: usize,
    cap: u64,
) -> Result<ResourceDistribution<S>> {
    let source = &pair.source;
    let space = source.space;
    let mut masses: BTreeMap<LearningResource, S> = BTreeMap::new();
    for_each_prefix(
        alg,
        space,
        &source.resource,
        train_steps,
        cap,
        |prefix, weight, dist| {
            if prefix.len() + 1 != train_steps {
                return;
            }
            let mut history = prefix.clone();
            for (e, p) in dist.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                history.push(e, source.resource.eval(e));
                let l = pair.transfer.encode(space, &history);
                let entry = masses.entry(l).or_insert_with(S::zero);
                *entry = entry.clone() + weight.clone() * p.clone();
                history.pop();
            }
        },
    )?;
    let (support, masses) = masses.into_iter().unzip();
    ResourceDistribution::new(support, masses)
}

/// Recipient success of the source-trained algorithm with no recipient
/// training: the first recipient query given only `L`, averaged over the
/// learned-resource distribution.
pub fn heuristic_score<S: Scalar>(
    pair: &TransferPair,
    alg: &dyn SearchAlgorithm<S>,
    train_steps: usize,
    cap: u64,
) -> Result<S> {
    let learned = learned_distribution(pair, alg, train_steps, cap)?;
    let rec = &pair.recipient;
    let w = StepWeighting::last_step(1)?;
    let r = Recipient::new(alg, rec.space, &rec.resource, &w, EvalMode::Exact { cap })?;
    let expected = r.expected_augmented(&learned)?;
    Ok(S::sum(rec.target.elements().map(|e| &expected[e])))
}

/// Gain in recipient success from transferring and then searching
/// `w.steps()` recipient steps, over searching without transfer. This is the
/// affinity of the learned-resource distribution toward the recipient
/// target.
pub fn transfer_benefit<S: Scalar>(
    pair: &TransferPair,
    alg: &dyn SearchAlgorithm<S>,
    train_steps: usize,
    w: &StepWeighting<S>,
    cap: u64,
) -> Result<S> {
    let learned = learned_distribution(pair, alg, train_steps, cap)?;
    let rec = &pair.recipient;
    let r = Recipient::new(alg, rec.space, &rec.resource, w, EvalMode::Exact { cap })?;
    affinity(&r, &learned, &rec.target)
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeuristicConfig {
    pub omega: usize,
    pub k: usize,
    /// Precision of the transferred location, in bits.
    pub bits: usize,
    pub train_steps: usize,
    pub recipient_steps: usize,
    pub rhos: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            omega: 16,
            k: 4,
            bits: 2,
            train_steps: 3,
            recipient_steps: 2,
            rhos: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            trials: 100,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeuristicRow {
    pub rho: f64,
    pub mean_score: f64,
    pub score_se: f64,
    pub mean_benefit: f64,
    pub benefit_se: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeuristicReport {
    pub rows: Vec<HeuristicRow>,
    /// Spearman correlation of mean score and mean benefit across ρ;
    /// `None` when either column is constant.
    pub spearman: Option<f64>,
    /// Mean score nondecreasing in ρ at 3 standard errors.
    pub monotone: bool,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = <f64 as Scalar>::sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (<f64 as Scalar>::sum(&sq) / (n - 1.0) / n).sqrt())
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson on average ranks); `None` when
/// either input is constant or shorter than two.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(xs), average_ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

/// Sweeps ρ, scoring `trials` random pairs per value with the heuristic and
/// with the realised transfer benefit.
pub fn heuristic_correlation(cfg: &HeuristicConfig) -> Result<HeuristicReport> {
    if cfg.rhos.is_empty() {
        return Err(Error::InvalidParameter("ρ grid is empty".into()));
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter(
            "need at least one trial per ρ".into(),
        ));
    }
    let alg = HintedElimination::new(cfg.bits);
    let w = StepWeighting::<f64>::last_step(cfg.recipient_steps)?;
    let cap = crate::search::DEFAULT_ENUMERATION_CAP;

    let mut rows = Vec::with_capacity(cfg.rhos.len());
    for (ri, &rho) in cfg.rhos.iter().enumerate() {
        let results = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let pair_seed = seed::derive(cfg.seed, ri as u64 * cfg.trials + trial);
                let pair = make_transfer_pair(cfg.omega, cfg.k, rho, cfg.bits, pair_seed)?;
                let score = heuristic_score::<f64>(&pair, &alg, cfg.train_steps, cap)?;
                let benefit = transfer_benefit::<f64>(&pair, &alg, cfg.train_steps, &w, cap)?;
                Ok((score, benefit))
            })
            .collect::<Result<Vec<_>>>()?;
        let scores: Vec<f64> = results.iter().map(|r| r.0).collect();
        let benefits: Vec<f64> = results.iter().map(|r| r.1).collect();
        let (mean_score, score_se) = mean_se(&scores);
        let (mean_benefit, benefit_se) = mean_se(&benefits);
        rows.push(HeuristicRow {
            rho,
            mean_score,
            score_se,
            mean_benefit,
            benefit_se,
        });
    }

    let mut sorted: Vec<&HeuristicRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    let monotone = sorted.windows(2).all(|p| {
        let margin = 3.0 * (p[0].score_se.powi(2) + p[1].score_se.powi(2)).sqrt();
        p[1].mean_score >= p[0].mean_score - margin - 1e-12
    });
    let distinct_rho = sorted.windows(2).any(|p| p[0].rho != p[1].rho);
    let spearman = if distinct_rho {
        let s: Vec<f64> = rows.iter().map(|r| r.mean_score).collect();
        let b: Vec<f64> = rows.iter().map(|r| r.mean_benefit).collect();
        spearman(&s, &b)
    } else {
        None
    };
    Ok(HeuristicReport {
        rows,
        spearman,
        monotone,
    })
}

/// Random recipient instance for property sweeps.
#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub space: SearchSpace,
    pub base: InformationResource,
    pub alg: HintedElimination,
    pub weighting: StepWeighting<f64>,
    pub resources: Vec<LearningResource>,
    pub target: TargetVector,
}

impl RandomInstance {
    pub fn recipient(&self, mode: EvalMode) -> Result<Recipient<'_, f64>> {
        Recipient::new(&self.alg, self.space, &self.base, &self.weighting, mode)
    }
}

fn random_bits<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> BitString {
    let len = rng.random_range(0..=max_len);
    BitString::from_bits((0..len).map(|_| rng.random_bool(0.5)).collect())
}

/// Draws a random instance: `|Ω|` in `sizes`, up to `max_resources`
/// resources, and a step count that keeps exact enumeration within 10^4
/// histories.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    sizes: std::ops::RangeInclusive<usize>,
    max_resources: usize,
) -> Result<RandomInstance> {
    let n = rng.random_range(sizes);
    let space = SearchSpace::new(n)?;
    let max_steps = (1..=3)
        .filter(|&s| n.pow(s as u32) <= 10_000)
        .max()
        .unwrap_or(1);
    let steps = rng.random_range(1..=max_steps);
    let weighting = if rng.random_bool(0.5) {
        StepWeighting::last_step(steps)?
    } else {
        let raw = sample_uniform_simplex(steps, rng);
        StepWeighting::new(raw)?
    };
    let eval = (0..n).map(|_| rng.random_range(0..3)).collect();
    let base = InformationResource::new(space, random_bits(rng, 2), eval)?;
    let count = rng.random_range(1..=max_resources.max(1));
    let resources = (0..count)
        .map(|_| LearningResource::new(random_bits(rng, 4)))
        .collect();
    let mask = rng.random_range(1..(1u64 << n));
    Ok(RandomInstance {
        space,
        base,
        alg: HintedElimination::new(rng.random_range(1..=3)),
        weighting,
        resources,
        target: TargetVector::from_mask(space, mask)?,
    })
}

fn random_table<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    width: usize,
    deterministic: bool,
) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            if deterministic {
                let mut row = vec![0.0; width];
                row[rng.random_range(0..width)] = 1.0;
                row
            } else {
                sample_uniform_simplex(width, rng)
            }
        })
        .collect()
}

/// Random conditional tables with the transfer dependence structure.
/// The learned and augmented resources are deterministic functions half
/// of the time.
pub fn random_dependence_model<R: Rng + ?Sized>(rng: &mut R) -> DependenceModel {
    let nt = rng.random_range(2..=4);
    let ns = rng.random_range(2..=4);
    let nr = rng.random_range(1..=3);
    let nl = rng.random_range(1..=3);
    let na = rng.random_range(2..=6);
    let det_l = rng.random_bool(0.5);
    let det_a = rng.random_bool(0.5);
    DependenceModel {
        target: sample_uniform_simplex(nt, rng),
        source_given_target: random_table(rng, nt, ns, false),
        recipient_given_target: random_table(rng, nt, nr, false),
        learned_given_source: random_table(rng, ns, nl, det_l),
        augmented_given: random_table(rng, nr * nl, na, det_a),
    }
}

/// Random `(P_TL, P_NoTL, t)` triple on `|Ω| = n`; `P_NoTL` has full
/// support so the divergence is finite.
pub fn random_success_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> Result<(SuccessVector<f64>, SuccessVector<f64>, TargetVector)> {
    let space = SearchSpace::new(n)?;
    let mut tl = sample_uniform_simplex(n, rng);
    if rng.random_bool(0.25) {
        // sparse transfer vector
        let keep = rng.random_range(0..n);
        tl.iter_mut()
            .enumerate()
            .filter(|(i, _)| *i != keep && rng.random_bool(0.5))
            .for_each(|(_, x)| *x = 0.0);
        let total: f64 = tl.iter().sum();
        tl.iter_mut().for_each(|x| *x /= total);
    }
    let notl: Vec<f64> = sample_uniform_simplex(n, rng)
        .into_iter()
        .map(|x| x.max(1e-12))
        .collect();
    let total: f64 = notl.iter().sum();
    let notl = notl.into_iter().map(|x| x / total).collect();
    let mask = rng.random_range(1..(1u64 << n));
    Ok((
        SuccessVector::new(tl, Provenance::Exact)?,
        SuccessVector::new(notl, Provenance::Exact)?,
        TargetVector::from_mask(space, mask)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_without_transfer() {
        let r = grid_example(false).unwrap();
        assert_eq!(r.success_fraction, "1/256");
        assert_eq!(r.bound, 0.125);
        assert_eq!(
            (
                r.source_information,
                r.recipient_information,
                r.target_entropy,
                r.divergence,
                r.i_omega
            ),
            (0.0, 0.0, 8.0, 0.0, 8.0)
        );
        assert_eq!(r.slack_factor, 32.0);
    }

    #[test]
    fn grid_with_transfer() {
        let r = grid_example(true).unwrap();
        assert_eq!(r.success_fraction, "1/128");
        assert_eq!(r.source_information, 1.0);
        assert_eq!(r.bound, 0.25);
        assert_eq!(r.bound_fraction.as_deref(), Some("1/4"));
        assert_eq!(r.slack_factor, 32.0);
    }

    #[test]
    fn transfer_pair_overlap() {
        let same = make_transfer_pair(16, 4, 1.0, 2, 3).unwrap();
        assert_eq!(same.source.target, same.recipient.target);

        let apart = make_transfer_pair(16, 4, 0.0, 2, 3).unwrap();
        assert!(apart
            .source
            .target
            .elements()
            .all(|e| !apart.recipient.target.contains(e)));

        let half = make_transfer_pair(16, 4, 0.5, 2, 3).unwrap();
        let shared = half
            .source
            .target
            .elements()
            .filter(|&e| half.recipient.target.contains(e))
            .count();
        assert_eq!(shared, 2);
        assert_eq!(half.overlap, 2);

        // complement too small to stay disjoint
        let forced = make_transfer_pair(6, 4, 0.0, 1, 1).unwrap();
        assert_eq!(forced.overlap, 2);

        assert!(make_transfer_pair(4, 4, 0.5, 1, 0).is_err());
        assert!(make_transfer_pair(4, 2, 1.5, 1, 0).is_err());
    }

    #[test]
    fn distance_eval_marks_targets() {
        let space = SearchSpace::new(6).unwrap();
        let t = TargetVector::from_elements(space, &[1, 4]).unwrap();
        assert_eq!(distance_eval(&t), vec![1, 0, 1, 1, 0, 1]);
    }

    #[test]
    fn transfer_map_takes_best_query() {
        let space = SearchSpace::new(8).unwrap();
        let mut h = SearchHistory::new();
        h.push(7, 3);
        h.push(2, 1);
        h.push(5, 1);
        assert_eq!(
            TransferMap { bits: 3 }.encode(space, &h).bits.to_string(),
            "010"
        );
        assert_eq!(
            TransferMap { bits: 1 }.encode(space, &h).bits.to_string(),
            "0"
        );
        assert!(TransferMap { bits: 2 }
            .encode(space, &SearchHistory::new())
            .bits
            .is_empty());
    }

    #[test]
    fn perfect_transfer_scores_one() {
        let pair = make_transfer_pair(4, 1, 1.0, 2, 8).unwrap();
        let alg = HintedElimination::new(2);
        let score = heuristic_score::<BigRational>(&pair, &alg, 4, 1_000).unwrap();
        assert_eq!(fraction_string(&score), "1");

        let blind = make_transfer_pair(4, 1, 0.0, 2, 8).unwrap();
        assert_eq!(heuristic_score::<f64>(&blind, &alg, 4, 1_000).unwrap(), 0.0);
    }

    #[test]
    fn spearman_cases() {
        assert_eq!(spearman(&[0.1, 0.2], &[1.0, 3.0]), Some(1.0));
        assert_eq!(spearman(&[0.1, 0.2, 0.3], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[0.1, 0.1], &[1.0, 3.0]), None);
        assert_eq!(spearman(&[0.1], &[1.0]), None);
    }
}
