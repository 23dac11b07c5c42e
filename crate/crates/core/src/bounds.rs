//! Verifiers for the inequality results on transfer success: famine bounds
//! over learned resources and over affinity distributions, the
//! dependence bound on transfer success, the mutual-information chain
//! bound, and the Pinsker bound on the success gap.

use serde::Serialize;

use crate::affinity::{affinity, sampled_affinities, Recipient, ResourceDistribution};
use crate::error::{Error, Result};
use crate::info::{
    conditional_mutual_information, entropy, kl_divergence_nats, mutual_information,
    FiniteDistribution, JointModel,
};
use crate::metrics::{phi, SuccessVector};
use crate::scalar::Scalar;
use crate::search::{LearningResource, TargetVector};

/// Tolerance for bounds whose sides are computed exactly.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Slack allowed above the right-hand side for Monte Carlo confidence bounds.
pub const MC_TOLERANCE: f64 = 1e-6;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// One checked inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub holds: bool,
    pub lhs_provenance: String,
    pub rhs_provenance: String,
}

impl BoundReport {
    pub fn new(
        check: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        lhs_provenance: impl Into<String>,
        rhs_provenance: impl Into<String>,
    ) -> Result<Self> {
        let check = check.into();
        if !lhs.is_finite() || !rhs.is_finite() || !tolerance.is_finite() {
            return Err(Error::BoundUndefined(format!(
                "{check}: non-finite side (lhs = {lhs}, rhs = {rhs})"
            )));
        }
        let slack = rhs - lhs;
        Ok(BoundReport {
            check,
            lhs,
            rhs,
            slack,
            tolerance,
            holds: slack >= -tolerance,
            lhs_provenance: lhs_provenance.into(),
            rhs_provenance: rhs_provenance.into(),
        })
    }

    /// Like [`BoundReport::new`] but decides `holds` in the scalar type, so
    /// exact inputs are compared without rounding.
    pub fn from_scalars<S: Scalar>(
        check: impl Into<String>,
        lhs: &S,
        rhs: &S,
        lhs_provenance: impl Into<String>,
        rhs_provenance: impl Into<String>,
    ) -> Result<Self> {
        let tol = S::tolerance();
        let mut report = Self::new(
            check,
            lhs.to_f64(),
            rhs.to_f64(),
            tol.to_f64(),
            lhs_provenance,
            rhs_provenance,
        )?;
        report.holds = rhs.clone() - lhs.clone() >= S::zero() - tol;
        Ok(report)
    }
}

fn provenance_of<S>(r: &Recipient<'_, S>) -> String {
    match r.mode {
        crate::metrics::EvalMode::Exact { .. } => "exact".into(),
        crate::metrics::EvalMode::MonteCarlo { trials, seed } => {
            format!("mc(trials={trials},seed={seed})")
        }
    }
}

fn check_phi_min(phi_min: f64) -> Result<()> {
    if !(phi_min > 0.0 && phi_min <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "φ_min must lie in (0, 1], got {phi_min}"
        )));
    }
    Ok(())
}

/// `(φ(t, f_{R_o}) + Affin(U[ℬ], t, f_{R_o})) / φ_min`.
fn famine_rhs<S: Scalar>(
    r: &Recipient<'_, S>,
    resources: &[LearningResource],
    t: &TargetVector,
    phi_min: &S,
) -> Result<S> {
    let base = phi(t, &r.baseline()?)?;
    let uniform = affinity(r, &ResourceDistribution::uniform(resources.to_vec())?, t)?;
    Ok((base + uniform) / phi_min.clone())
}

/// Fraction of `ℬ` reaching `φ_min`, counted exactly, against the Markov
/// bound.
pub fn famine_learned_resources<S: Scalar>(
    r: &Recipient<'_, S>,
    resources: &[LearningResource],
    t: &TargetVector,
    phi_min: &S,
) -> Result<BoundReport> {
    check_phi_min(phi_min.to_f64())?;
    if resources.is_empty() {
        return Err(Error::InvalidParameter("resource set is empty".into()));
    }
    let successes = r.per_resource_success(resources, t)?;
    let favorable = successes.iter().filter(|s| *s >= phi_min).count() as u64;
    let lhs = S::ratio(favorable, resources.len() as u64);
    let rhs = famine_rhs(r, resources, t, phi_min)?;
    BoundReport::from_scalars(
        "famine_learned_resources",
        &lhs,
        &rhs,
        "enumeration",
        provenance_of(r),
    )
}

/// Monte Carlo side of the distribution famine bound.
#[derive(Clone, Debug, Serialize)]
pub struct FamineDistributionReport {
    pub bound: BoundReport,
    /// Point estimate of `μ(G) / μ(P)`.
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: u64,
    pub samples: u64,
    /// `true` when linearity pins the fraction to exactly 0 or 1.
    pub exact: bool,
    pub per_resource_affinity: Vec<f64>,
}

/// Wilson score interval for `hits / n` at normal quantile `z`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Fraction of the `|ℬ|`-simplex whose affinity reaches `φ_min`, estimated
/// from uniform draws, against the Markov bound.
///
/// Affinity is linear in `D`, so when every vertex falls below `φ_min` the
/// fraction is exactly 0 (and exactly 1 when every vertex reaches it); only
/// the mixed case is sampled.
pub fn famine_affinity_distributions<S: Scalar>(
    r: &Recipient<'_, S>,
    resources: &[LearningResource],
    t: &TargetVector,
    phi_min: &S,
    samples: u64,
    seed: u64,
) -> Result<FamineDistributionReport> {
    check_phi_min(phi_min.to_f64())?;
    if samples < 10_000 {
        return Err(Error::InvalidParameter(
            "distribution famine needs at least 10^4 samples".into(),
        ));
    }
    if resources.is_empty() {
        return Err(Error::InvalidParameter("resource set is empty".into()));
    }
    let base = phi(t, &r.baseline()?)?;
    let per_resource_exact: Vec<S> = r
        .per_resource_success(resources, t)?
        .into_iter()
        .map(|s| s - base.clone())
        .collect();
    let per_resource: Vec<f64> = per_resource_exact.iter().map(Scalar::to_f64).collect();
    let threshold = phi_min.to_f64();

    let (hits, ci_low, ci_high, exact, provenance) =
        if per_resource_exact.iter().all(|a| a < phi_min) {
            (0, 0.0, 0.0, true, "exact(linearity)".to_string())
        } else if per_resource_exact.iter().all(|a| a >= phi_min) {
            (samples, 1.0, 1.0, true, "exact(linearity)".to_string())
        } else {
            let draws = sampled_affinities(&per_resource, samples, seed);
            let hits = draws.iter().filter(|&&a| a >= threshold).count() as u64;
            let (lo, hi) = wilson_interval(hits, samples, Z95);
            (
                hits,
                lo,
                hi,
                false,
                format!("mc-wilson95-upper(samples={samples},seed={seed})"),
            )
        };
    let rhs = famine_rhs(r, resources, t, phi_min)?;
    let bound = BoundReport::new(
        "famine_affinity_distributions",
        ci_high,
        rhs.to_f64(),
        if exact { EXACT_TOLERANCE } else { MC_TOLERANCE },
        provenance,
        provenance_of(r),
    )?;
    Ok(FamineDistributionReport {
        bound,
        estimate: if exact {
            ci_high
        } else {
            hits as f64 / samples as f64
        },
        ci_low,
        ci_high,
        hits,
        samples,
        exact,
        per_resource_affinity: per_resource,
    })
}

/// `log₂ C(n, k)`.
pub fn log2_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        match c.checked_mul((n - i) as u128) {
            Some(v) => c = v / (i as u128 + 1),
            None => {
                return (0..k)
                    .map(|i| ((n - i) as f64).log2() - ((i + 1) as f64).log2())
                    .sum();
            }
        }
    }
    (c as f64).log2()
}

/// The terms and outcome of the dependence bound on transfer success.
#[derive(Clone, Debug, Serialize)]
pub struct DependenceBoundReport {
    pub bound: BoundReport,
    /// `φ_TL`.
    pub success: f64,
    pub source_information: f64,
    pub recipient_information: f64,
    pub target_entropy: f64,
    pub divergence: f64,
    pub i_omega: f64,
}

/// Checks `φ_TL ≤ (I(F_S;T_R) + I(F_R;T_R) + D(P_T ‖ U_T) + 1) / I_Ω`.
///
/// `joint` is the three-way (target, source resource, recipient resource)
/// distribution whose target axis is labelled by `targets`; all targets
/// must have the same size `k`. `success(t, s, r)` gives `φ` for the
/// recipient run with the resource determined by `(s, r)` on target `t`.
/// The divergence is taken against the uniform distribution over all
/// `C(|Ω|, k)` targets of that size.
pub fn tlud_bound(
    joint: &JointModel<f64>,
    targets: &[TargetVector],
    success: impl Fn(usize, usize, usize) -> f64,
) -> Result<DependenceBoundReport> {
    use crate::info::axis::{RECIPIENT, SOURCE, TARGET};

    if joint.shape().len() != 3 {
        return Err(Error::InvalidParameter(
            "dependence bound needs a three-way joint".into(),
        ));
    }
    if joint.shape()[TARGET] != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: joint.shape()[TARGET],
            actual: targets.len(),
        });
    }
    let first = targets
        .first()
        .ok_or_else(|| Error::InvalidParameter("no target labels".into()))?;
    let (n, k) = (first.len(), first.k());
    if targets.iter().any(|t| t.len() != n || t.k() != k) {
        return Err(Error::Precondition(
            "targets must share the space and size k".into(),
        ));
    }
    if k == n {
        return Err(Error::BoundUndefined("|T| = |Ω| gives I_Ω = 0".into()));
    }

    let source_information = mutual_information(joint, &[TARGET], &[SOURCE])?;
    let recipient_information = mutual_information(joint, &[TARGET], &[RECIPIENT])?;
    let target_entropy = entropy(&joint.marginal(&[TARGET])?);
    let divergence = log2_binomial(n, k) - target_entropy;
    let i_omega = (n as f64).log2() - (k as f64).log2();

    let mut lhs = Vec::new();
    let mut bad = None;
    joint.for_each(|idx, m| {
        if m > 0.0 {
            let s = success(idx[TARGET], idx[SOURCE], idx[RECIPIENT]);
            if !(0.0..=1.0).contains(&s) {
                bad = Some(s);
            }
            lhs.push(m * s);
        }
    });
    if let Some(s) = bad {
        return Err(Error::InvalidParameter(format!(
            "success value {s} outside [0, 1]"
        )));
    }
    let success_value = <f64 as Scalar>::sum(&lhs);
    let rhs = (source_information + recipient_information + divergence + 1.0) / i_omega;
    Ok(DependenceBoundReport {
        bound: BoundReport::new(
            "tlud_bound",
            success_value,
            rhs,
            EXACT_TOLERANCE,
            "exact",
            "exact(bits)",
        )?,
        success: success_value,
        source_information,
        recipient_information,
        target_entropy,
        divergence,
        i_omega,
    })
}

/// Axis order of joints produced by [`DependenceModel::to_joint`].
pub mod chain_axis {
    pub const TARGET: usize = 0;
    pub const SOURCE: usize = 1;
    pub const RECIPIENT: usize = 2;
    pub const LEARNED: usize = 3;
    pub const AUGMENTED: usize = 4;
}

/// Conditional tables for the transfer dependence structure: the target
/// drives both the source resource and the recipient's native resource,
/// the learned resource depends only on the source resource, and the
/// augmented resource depends only on (native resource, learned resource).
#[derive(Clone, Debug)]
pub struct DependenceModel {
    /// `P(T)`.
    pub target: Vec<f64>,
    /// `P(F_S | T)`, indexed `[t][s]`.
    pub source_given_target: Vec<Vec<f64>>,
    /// `P(F_{R_o} | T)`, indexed `[t][r]`.
    pub recipient_given_target: Vec<Vec<f64>>,
    /// `P(L | F_S)`, indexed `[s][l]`.
    pub learned_given_source: Vec<Vec<f64>>,
    /// `P(F_{R_o+L} | F_{R_o}, L)`, indexed `[r * |L| + l][a]`.
    pub augmented_given: Vec<Vec<f64>>,
}

fn table_width(rows: &[Vec<f64>], name: &str, expected_rows: usize) -> Result<usize> {
    if rows.len() != expected_rows {
        return Err(Error::DimensionMismatch {
            expected: expected_rows,
            actual: rows.len(),
        });
    }
    let width = rows.first().map_or(0, Vec::len);
    for row in rows {
        if row.len() != width {
            return Err(Error::InvalidParameter(format!("ragged table {name}")));
        }
        FiniteDistribution::new(row.clone())?;
    }
    Ok(width)
}

impl DependenceModel {
    /// The five-way joint over (T, F_S, F_{R_o}, L, F_{R_o+L}).
    pub fn to_joint(&self) -> Result<JointModel<f64>> {
        let nt = self.target.len();
        let ns = table_width(&self.source_given_target, "source_given_target", nt)?;
        let nr = table_width(&self.recipient_given_target, "recipient_given_target", nt)?;
        let nl = table_width(&self.learned_given_source, "learned_given_source", ns)?;
        let na = table_width(&self.augmented_given, "augmented_given", nr * nl)?;
        FiniteDistribution::new(self.target.clone())?;
        JointModel::from_fn(vec![nt, ns, nr, nl, na], |i| {
            let (t, s, r, l, a) = (i[0], i[1], i[2], i[3], i[4]);
            self.target[t]
                * self.source_given_target[t][s]
                * self.recipient_given_target[t][r]
                * self.learned_given_source[s][l]
                * self.augmented_given[r * nl + l][a]
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MiChainReport {
    /// `I(F_{R_o+L}; T) ≤ I(F_S; T) + I(F_{R_o}; T)`.
    pub bound: BoundReport,
    /// `I(F_{R_o+L}; T) ≤ I(F_{R_o}, L; T)`.
    pub processing: BoundReport,
    /// `I(L; T) ≤ I(F_S; T)`.
    pub source_processing: BoundReport,
    /// `|I(F_{R_o}, L; T) − I(L; T | F_{R_o}) − I(F_{R_o}; T)|`.
    pub chain_rule_residual: f64,
}

/// Verifies the mutual-information chain bound on a five-way joint laid out
/// as in [`chain_axis`].
///
/// Fails with a precondition error when `H(L | F_{R_o}, T) ≠ H(L | T)`.
pub fn mi_chain_check(j: &JointModel<f64>) -> Result<MiChainReport> {
    use chain_axis::*;
    if j.shape().len() != 5 {
        return Err(Error::InvalidParameter(
            "chain check needs a five-way joint".into(),
        ));
    }
    let premise = conditional_mutual_information(j, &[LEARNED], &[RECIPIENT], &[TARGET])?;
    if premise.abs() > EXACT_TOLERANCE {
        return Err(Error::Precondition(format!(
            "L and F_Ro are dependent given T (I = {premise})"
        )));
    }
    let augmented = mutual_information(j, &[AUGMENTED], &[TARGET])?;
    let source = mutual_information(j, &[SOURCE], &[TARGET])?;
    let recipient = mutual_information(j, &[RECIPIENT], &[TARGET])?;
    let learned = mutual_information(j, &[LEARNED], &[TARGET])?;
    let pair = mutual_information(j, &[RECIPIENT, LEARNED], &[TARGET])?;
    let conditional = conditional_mutual_information(j, &[LEARNED], &[TARGET], &[RECIPIENT])?;

    Ok(MiChainReport {
        bound: BoundReport::new(
            "mi_chain",
            augmented,
            source + recipient,
            EXACT_TOLERANCE,
            "exact(bits)",
            "exact(bits)",
        )?,
        processing: BoundReport::new(
            "mi_chain_processing",
            augmented,
            pair,
            EXACT_TOLERANCE,
            "exact(bits)",
            "exact(bits)",
        )?,
        source_processing: BoundReport::new(
            "mi_source_processing",
            learned,
            source,
            EXACT_TOLERANCE,
            "exact(bits)",
            "exact(bits)",
        )?,
        chain_rule_residual: (pair - conditional - recipient).abs(),
    })
}

/// Checks `|φ_TL − φ_NoTL| ≤ |T| · sqrt(D_KL(P_TL ‖ P_NoTL) / 2)` with the
/// divergence in nats.
pub fn pinsker_gap<S: Scalar>(
    p_tl: &SuccessVector<S>,
    p_notl: &SuccessVector<S>,
    t: &TargetVector,
) -> Result<BoundReport> {
    if p_tl.len() != p_notl.len() {
        return Err(Error::DimensionMismatch {
            expected: p_notl.len(),
            actual: p_tl.len(),
        });
    }
    let gap = (phi(t, p_tl)? - phi(t, p_notl)?).abs();
    let tl = FiniteDistribution::new(p_tl.to_f64())?;
    let notl = FiniteDistribution::new(p_notl.to_f64())?;
    let kl = kl_divergence_nats(&tl, &notl)?;
    let rhs = t.k() as f64 * (kl / 2.0).sqrt();
    BoundReport::new(
        "pinsker_gap",
        gap.to_f64(),
        rhs,
        EXACT_TOLERANCE,
        "exact",
        "exact(nats)",
    )
}
