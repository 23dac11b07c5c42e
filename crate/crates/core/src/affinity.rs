//! Affinity of a distribution over learning resources toward a target, and
//! checks of its structural identities.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{phi, success_vector, EvalMode, StepWeighting, SuccessVector};
use crate::scalar::Scalar;
use crate::search::{
    augment_resource, InformationResource, LearningResource, SearchAlgorithm, SearchSpace,
    TargetVector,
};
use crate::seed;

/// Largest space for which all `2^|Ω| − 1` targets are summed.
pub const MAX_CONSERVATION_SPACE: usize = 12;

/// Discrete distribution `D_L` over a finite set of learning resources.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceDistribution<S> {
    support: Vec<LearningResource>,
    masses: Vec<S>,
}

impl<S: Scalar> ResourceDistribution<S> {
    pub fn new(support: Vec<LearningResource>, masses: Vec<S>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidParameter(
                "resource distribution needs a nonempty support".into(),
            ));
        }
        if support.len() != masses.len() {
            return Err(Error::DimensionMismatch {
                expected: support.len(),
                actual: masses.len(),
            });
        }
        if masses.iter().any(|m| *m < S::zero()) {
            return Err(Error::DistributionContract("negative resource mass".into()));
        }
        let total = S::sum(&masses);
        if !total.approx_eq(&S::one(), &S::tolerance()) {
            return Err(Error::DistributionContract(format!(
                "resource masses sum to {}",
                total.to_f64()
            )));
        }
        Ok(ResourceDistribution { support, masses })
    }

    /// `U[ℬ]`.
    pub fn uniform(support: Vec<LearningResource>) -> Result<Self> {
        let n = support.len() as u64;
        let masses = vec![S::ratio(1, n.max(1)); support.len()];
        Self::new(support, masses)
    }

    pub fn point_mass(l: LearningResource) -> Self {
        ResourceDistribution {
            support: vec![l],
            masses: vec![S::one()],
        }
    }

    /// `α·a + (1 − α)·b` over a shared support.
    pub fn mixture(alpha: &S, a: &Self, b: &Self) -> Result<Self> {
        if a.support != b.support {
            return Err(Error::InvalidParameter(
                "mixture components must share a support".into(),
            ));
        }
        if *alpha < S::zero() || *alpha > S::one() {
            return Err(Error::InvalidParameter(
                "mixture weight outside [0, 1]".into(),
            ));
        }
        let beta = S::one() - alpha.clone();
        let masses = a
            .masses
            .iter()
            .zip(&b.masses)
            .map(|(x, y)| alpha.clone() * x.clone() + beta.clone() * y.clone())
            .collect();
        Self::new(a.support.clone(), masses)
    }

    pub fn support(&self) -> &[LearningResource] {
        &self.support
    }

    pub fn masses(&self) -> &[S] {
        &self.masses
    }
}

/// The recipient side of a transfer problem: a fixed algorithm run for
/// `weighting.steps()` steps on `space` with native resource `base`.
pub struct Recipient<'a, S> {
    pub alg: &'a dyn SearchAlgorithm<S>,
    pub space: SearchSpace,
    pub base: &'a InformationResource,
    pub weighting: &'a StepWeighting<S>,
    pub mode: EvalMode,
}

impl<S> Clone for Recipient<'_, S> {
    fn clone(&self) -> Self {
        Recipient { ..*self }
    }
}

impl<'a, S: Scalar> Recipient<'a, S> {
    pub fn new(
        alg: &'a dyn SearchAlgorithm<S>,
        space: SearchSpace,
        base: &'a InformationResource,
        weighting: &'a StepWeighting<S>,
        mode: EvalMode,
    ) -> Result<Self> {
        if base.space_size() != space.size() {
            return Err(Error::DimensionMismatch {
                expected: space.size(),
                actual: base.space_size(),
            });
        }
        Ok(Recipient {
            alg,
            space,
            base,
            weighting,
            mode,
        })
    }

    /// `P_{φ,f_{R_o}}`.
    pub fn baseline(&self) -> Result<SuccessVector<S>> {
        success_vector(self.alg, self.space, self.base, self.weighting, self.mode)
    }

    /// `P_{φ,f_{R_o+l}}`.
    pub fn augmented(&self, l: &LearningResource) -> Result<SuccessVector<S>> {
        let f = augment_resource(self.base, l);
        success_vector(self.alg, self.space, &f, self.weighting, self.mode)
    }

    /// `E_D[P_{φ,f_{R_o+L}}]`.
    pub fn expected_augmented(&self, d: &ResourceDistribution<S>) -> Result<Vec<S>> {
        let mut out = vec![S::zero(); self.space.size()];
        for (l, m) in d.support.iter().zip(&d.masses) {
            if m.is_zero() {
                continue;
            }
            let p = self.augmented(l)?;
            for (acc, x) in out.iter_mut().zip(p.probs()) {
                *acc = acc.clone() + m.clone() * x.clone();
            }
        }
        Ok(out)
    }

    /// `φ(t, f_{R_o+l})` for every `l` in `resources`.
    pub fn per_resource_success(
        &self,
        resources: &[LearningResource],
        t: &TargetVector,
    ) -> Result<Vec<S>> {
        resources
            .iter()
            .map(|l| phi(t, &self.augmented(l)?))
            .collect()
    }
}

fn check_target<S: Scalar>(r: &Recipient<'_, S>, t: &TargetVector) -> Result<()> {
    if t.len() != r.space.size() {
        return Err(Error::DimensionMismatch {
            expected: r.space.size(),
            actual: t.len(),
        });
    }
    Ok(())
}

fn dot<S: Scalar>(t: &TargetVector, v: &[S]) -> S {
    S::sum(t.elements().map(|e| &v[e]))
}

/// `Affin(D, t, f_{R_o}) = E_D[tᵀ P_{φ,f_{R_o+L}}] − tᵀ P_{φ,f_{R_o}}`.
pub fn affinity<S: Scalar>(
    r: &Recipient<'_, S>,
    d: &ResourceDistribution<S>,
    t: &TargetVector,
) -> Result<S> {
    check_target(r, t)?;
    let expected = r.expected_augmented(d)?;
    let baseline = r.baseline()?;
    Ok(dot(t, &expected) - phi(t, &baseline)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservationReport {
    pub space_size: usize,
    pub targets: u64,
    /// Target-by-target sum of affinities.
    pub naive_sum: f64,
    /// `2^{|Ω|−1} · (1ᵀ E_D[P_L] − 1ᵀ P_0)`.
    pub analytic_sum: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Sums affinity over every nonempty target of the space.
pub fn conservation_check<S: Scalar>(
    r: &Recipient<'_, S>,
    d: &ResourceDistribution<S>,
) -> Result<ConservationReport> {
    let n = r.space.size();
    if n > MAX_CONSERVATION_SPACE {
        return Err(Error::InvalidParameter(format!(
            "conservation check limited to |Ω| ≤ {MAX_CONSERVATION_SPACE}, got {n}"
        )));
    }
    let expected = r.expected_augmented(d)?;
    let baseline = r.baseline()?;

    let per_target: Vec<S> = TargetVector::all_nonempty(r.space)?
        .map(|t| dot(&t, &expected) - dot(&t, baseline.probs()))
        .collect();
    let naive = S::sum(&per_target);

    let c = S::from_u64(1u64 << (n - 1));
    let analytic = c * (S::sum(&expected) - S::sum(baseline.probs()));

    let scale = (1u64 << n) as f64;
    let tolerance = if S::EXACT { 0.0 } else { scale * 1e-10 };
    let agree = if S::EXACT {
        naive == analytic
    } else {
        (naive.to_f64() - analytic.to_f64()).abs() <= 1e-10_f64.max(tolerance)
    };
    let holds = naive.to_f64().abs() <= tolerance && analytic.to_f64().abs() <= tolerance && agree;
    Ok(ConservationReport {
        space_size: n,
        targets: (1u64 << n) - 1,
        naive_sum: naive.to_f64(),
        analytic_sum: analytic.to_f64(),
        tolerance,
        holds,
    })
}

/// Zero-affinity mixture of a helpful and a harmful resource.
///
/// With per-resource affinities `a⁺ > 0 > a⁻` the masses
/// `(−a⁻, a⁺) / (a⁺ − a⁻)` cancel exactly.
pub fn zero_affinity_distribution<S: Scalar>(
    helpful: LearningResource,
    a_plus: &S,
    harmful: LearningResource,
    a_minus: &S,
) -> Result<ResourceDistribution<S>> {
    if a_plus.partial_cmp(&S::zero()) != Some(std::cmp::Ordering::Greater)
        || a_minus.partial_cmp(&S::zero()) != Some(std::cmp::Ordering::Less)
    {
        return Err(Error::InvalidParameter(
            "need one resource with positive and one with negative affinity".into(),
        ));
    }
    let span = a_plus.clone() - a_minus.clone();
    let m_plus = (S::zero() - a_minus.clone()) / span.clone();
    let m_minus = a_plus.clone() / span;
    ResourceDistribution::new(vec![helpful, harmful], vec![m_plus, m_minus])
}

#[derive(Clone, Debug, Serialize)]
pub struct FutilityReport {
    pub affinity: f64,
    /// `Pr(ω ∈ t; A_L)`, success marginalised over `L ~ D`.
    pub marginalized: f64,
    /// `φ(t, f_{R_o})`.
    pub baseline: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// For a zero-affinity `d`, compares the `d`-marginalised success with the
/// no-transfer success.
pub fn futility_check<S: Scalar>(
    r: &Recipient<'_, S>,
    d: &ResourceDistribution<S>,
    t: &TargetVector,
) -> Result<FutilityReport> {
    let a = affinity(r, d, t)?;
    let tol = S::tolerance();
    if a.abs() > tol {
        return Err(Error::NotZeroAffinity(a.to_f64()));
    }
    // marginalise directly over the support rather than through `affinity`
    let mut marginalized = S::zero();
    for (l, m) in d.support.iter().zip(&d.masses) {
        marginalized = marginalized + m.clone() * phi(t, &r.augmented(l)?)?;
    }
    let baseline = phi(t, &r.baseline()?)?;
    Ok(FutilityReport {
        affinity: a.to_f64(),
        marginalized: marginalized.to_f64(),
        baseline: baseline.to_f64(),
        tolerance: tol.to_f64(),
        holds: marginalized.approx_eq(&baseline, &tol),
    })
}

/// Draws a point uniformly (Lebesgue) from the `n`-simplex by normalising
/// i.i.d. unit exponentials.
pub fn sample_uniform_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// Affinity of `D` from per-resource affinities, using linearity in `D`.
pub fn mixture_affinity(masses: &[f64], per_resource: &[f64]) -> f64 {
    let terms: Vec<f64> = masses
        .iter()
        .zip(per_resource)
        .map(|(m, a)| m * a)
        .collect();
    <f64 as Scalar>::sum(&terms)
}

/// Affinities of `D₁, …, D_samples ~ U[simplex]`, in draw order.
pub fn sampled_affinities(per_resource: &[f64], samples: u64, seed: u64) -> Vec<f64> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed, i);
            mixture_affinity(
                &sample_uniform_simplex(per_resource.len(), &mut rng),
                per_resource,
            )
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplexExpectationReport {
    pub resources: usize,
    pub samples: u64,
    pub mc_mean: f64,
    pub std_error: f64,
    /// `Affin(U[ℬ], t, f_{R_o})`.
    pub uniform_affinity: f64,
    pub holds: bool,
}

/// Compares the mean affinity of uniformly drawn simplex vectors with the
/// affinity of the uniform distribution over `resources`, at 4 standard
/// errors.
pub fn simplex_expectation_check<S: Scalar>(
    r: &Recipient<'_, S>,
    resources: &[LearningResource],
    t: &TargetVector,
    samples: u64,
    seed: u64,
) -> Result<SimplexExpectationReport> {
    if samples < 1000 {
        return Err(Error::InvalidParameter(
            "simplex expectation needs at least 1000 samples".into(),
        ));
    }
    if resources.is_empty() {
        return Err(Error::InvalidParameter("resource set is empty".into()));
    }
    check_target(r, t)?;
    let base = phi(t, &r.baseline()?)?;
    let per_resource: Vec<f64> = r
        .per_resource_success(resources, t)?
        .into_iter()
        .map(|s| (s - base.clone()).to_f64())
        .collect();

    let draws = sampled_affinities(&per_resource, samples, seed);
    let n = samples as f64;
    let mean = <f64 as Scalar>::sum(&draws) / n;
    let sq: Vec<f64> = draws.iter().map(|x| (x - mean).powi(2)).collect();
    let var = <f64 as Scalar>::sum(&sq) / (n - 1.0);
    let std_error = (var / n).sqrt();

    let uniform = affinity(r, &ResourceDistribution::uniform(resources.to_vec())?, t)?.to_f64();
    Ok(SimplexExpectationReport {
        resources: resources.len(),
        samples,
        mc_mean: mean,
        std_error,
        uniform_affinity: uniform,
        holds: (mean - uniform).abs() <= 4.0 * std_error + 1e-12,
    })
}
