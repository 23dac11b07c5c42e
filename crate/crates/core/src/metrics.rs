//! Decomposable probability-of-success metrics.
//!
//! `P_{φ,f}` is a step-weighted average of the per-step query marginals of an
//! algorithm run against resource `f`; it is computed before any target is
//! consulted. `φ(t, f) = tᵀ P_{φ,f}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::search::{
    sample_history, step_distributions_exact, InformationResource, SearchAlgorithm, SearchSpace,
    TargetVector, DEFAULT_ENUMERATION_CAP,
};
use crate::seed;

/// Distribution over step indices `1..=T`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepWeighting<S> {
    weights: Vec<S>,
}

impl<S: Scalar> StepWeighting<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter(
                "step weighting needs at least one step".into(),
            ));
        }
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::DistributionContract("negative step weight".into()));
        }
        let total = S::sum(&weights);
        if !total.approx_eq(&S::one(), &S::tolerance()) {
            return Err(Error::DistributionContract(format!(
                "step weights sum to {}",
                total.to_f64()
            )));
        }
        Ok(StepWeighting { weights })
    }

    /// All mass on the final step; the default for transfer evaluation.
    pub fn last_step(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        let mut weights = vec![S::zero(); steps];
        weights[steps - 1] = S::one();
        Ok(StepWeighting { weights })
    }

    pub fn uniform(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        Ok(StepWeighting {
            weights: vec![S::ratio(1, steps as u64); steps],
        })
    }

    pub fn steps(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }
}

/// How a success vector was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EvalMode {
    /// Enumerate all histories; fails when `|Ω|^steps > cap`.
    Exact {
        cap: u64,
    },
    MonteCarlo {
        trials: u64,
        seed: u64,
    },
}

impl EvalMode {
    pub fn exact() -> Self {
        EvalMode::Exact {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl Default for EvalMode {
    fn default() -> Self {
        EvalMode::exact()
    }
}

/// `P_{φ,f}` with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessVector<S> {
    probs: Vec<S>,
    provenance: Provenance,
}

impl<S: Scalar> SuccessVector<S> {
    pub fn new(probs: Vec<S>, provenance: Provenance) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::DistributionContract("empty success vector".into()));
        }
        if probs.iter().any(|p| *p < S::zero()) {
            return Err(Error::DistributionContract(
                "negative success probability".into(),
            ));
        }
        let total = S::sum(&probs);
        if !total.approx_eq(&S::one(), &S::tolerance()) {
            return Err(Error::DistributionContract(format!(
                "success vector sums to {}",
                total.to_f64()
            )));
        }
        Ok(SuccessVector { probs, provenance })
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(Scalar::to_f64).collect()
    }
}

/// Builds `P_{φ,f}` for `alg` run against `resource` for `w.steps()` steps.
pub fn success_vector<S, A>(
    alg: &A,
    space: SearchSpace,
    resource: &InformationResource,
    w: &StepWeighting<S>,
    mode: EvalMode,
) -> Result<SuccessVector<S>>
where
    S: Scalar,
    A: SearchAlgorithm<S> + ?Sized,
{
    let n = space.size();
    let steps = w.steps();
    match mode {
        EvalMode::Exact { cap } => {
            let marginals = step_distributions_exact(alg, space, resource, steps, cap)?;
            let mut probs = vec![S::zero(); n];
            for (wi, row) in w.weights().iter().zip(&marginals) {
                if wi.is_zero() {
                    continue;
                }
                for (acc, p) in probs.iter_mut().zip(row) {
                    *acc = acc.clone() + wi.clone() * p.clone();
                }
            }
            SuccessVector::new(probs, Provenance::Exact)
        }
        EvalMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::InvalidParameter(
                    "Monte Carlo needs at least one trial".into(),
                ));
            }
            // integer counts merge identically under any thread split
            let counts = (0..trials)
                .into_par_iter()
                .try_fold(
                    || vec![0u64; steps * n],
                    |mut acc, trial| {
                        let mut rng = seed::rng(seed, trial);
                        let history = sample_history(alg, space, resource, steps, &mut rng)?;
                        for (i, &(e, _)) in history.entries().iter().enumerate() {
                            acc[i * n + e] += 1;
                        }
                        Ok::<_, Error>(acc)
                    },
                )
                .try_reduce(
                    || vec![0u64; steps * n],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        Ok(a)
                    },
                )?;
            let mut probs = vec![S::zero(); n];
            for (i, wi) in w.weights().iter().enumerate() {
                if wi.is_zero() {
                    continue;
                }
                for (e, acc) in probs.iter_mut().enumerate() {
                    let c = counts[i * n + e];
                    if c > 0 {
                        *acc = acc.clone() + wi.clone() * S::ratio(c, trials);
                    }
                }
            }
            SuccessVector::new(probs, Provenance::MonteCarlo { trials, seed })
        }
    }
}

/// `φ(t, f) = tᵀ P_{φ,f}`.
pub fn phi<S: Scalar>(t: &TargetVector, p: &SuccessVector<S>) -> Result<S> {
    if t.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: t.len(),
        });
    }
    Ok(S::sum(t.elements().map(|e| &p.probs[e])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{HintedSampler, PointMass, UniformSampler};
    use crate::search::augment_resource;
    use crate::search::LearningResource;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(a: u64, b: u64) -> BigRational {
        <BigRational as Scalar>::ratio(a, b)
    }

    #[test]
    fn weighting_contract() {
        assert!(StepWeighting::<f64>::new(vec![0.5, 0.6]).is_err());
        assert!(StepWeighting::<f64>::new(vec![]).is_err());
        assert!(StepWeighting::<f64>::last_step(0).is_err());
        assert_eq!(
            StepWeighting::<f64>::last_step(3).unwrap().weights(),
            &[0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn uniform_sampler_gives_uniform_vector() {
        let space = SearchSpace::new(5).unwrap();
        let f = InformationResource::blank(space);
        let w = StepWeighting::new(vec![q(1, 3), q(2, 3)]).unwrap();
        let p = success_vector(&UniformSampler, space, &f, &w, EvalMode::exact()).unwrap();
        assert!(p.probs().iter().all(|x| *x == q(1, 5)));
        assert_eq!(p.provenance(), Provenance::Exact);
    }

    #[test]
    fn last_step_point_mass() {
        let space = SearchSpace::new(4).unwrap();
        let f = InformationResource::blank(space);
        let w = StepWeighting::last_step(3).unwrap();
        let p =
            success_vector::<f64, _>(&PointMass::new(0), space, &f, &w, EvalMode::exact()).unwrap();
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn grid_uniform_and_half_hint() {
        let space = SearchSpace::new(256).unwrap();
        let f = InformationResource::blank(space);
        let w = StepWeighting::<BigRational>::last_step(1).unwrap();
        let p = success_vector(&UniformSampler, space, &f, &w, EvalMode::exact()).unwrap();
        assert!(p.probs().iter().all(|x| *x == q(1, 256)));

        let t = TargetVector::from_elements(space, &[37]).unwrap();
        assert_eq!(phi(&t, &p).unwrap(), q(1, 256));

        let top: LearningResource = "0".parse().unwrap();
        let p_tl = success_vector(
            &HintedSampler::new(1),
            space,
            &augment_resource(&f, &top),
            &w,
            EvalMode::exact(),
        )
        .unwrap();
        assert_eq!(phi(&t, &p_tl).unwrap(), q(1, 128));
    }

    #[test]
    fn full_target_and_dimension_mismatch() {
        let p = SuccessVector::new(vec![0.2, 0.3, 0.5], Provenance::Exact).unwrap();
        let all = TargetVector::new(vec![true; 3]).unwrap();
        assert!((phi(&all, &p).unwrap() - 1.0).abs() < 1e-15);
        let wrong = TargetVector::from_elements(SearchSpace::new(2).unwrap(), &[0]).unwrap();
        assert!(phi(&wrong, &p).is_err());
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let space = SearchSpace::new(4).unwrap();
        let f = InformationResource::blank(space);
        let w = StepWeighting::<f64>::uniform(2).unwrap();
        let mode = EvalMode::MonteCarlo {
            trials: 2000,
            seed: 11,
        };
        let a = success_vector(&UniformSampler, space, &f, &w, mode).unwrap();
        let b = success_vector(&UniformSampler, space, &f, &w, mode).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.provenance(),
            Provenance::MonteCarlo {
                trials: 2000,
                seed: 11
            }
        );
    }

    proptest! {
        #[test]
        fn complement_and_monotonicity(
            raw in proptest::collection::vec(0.0f64..1.0, 2..10),
            mask in 1u64..1024,
            extra in 0u64..1024,
        ) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-3);
            let n = raw.len();
            let space = SearchSpace::new(n).unwrap();
            let p = SuccessVector::new(raw.iter().map(|x| x / total).collect(), Provenance::Exact).unwrap();
            let mask = mask & ((1 << n) - 1);
            prop_assume!(mask != 0);
            let t = TargetVector::from_mask(space, mask).unwrap();
            let phi_t = phi(&t, &p).unwrap();
            let phi_c = t.complement().map(|c| phi(&c, &p).unwrap()).unwrap_or(0.0);
            prop_assert!((phi_t + phi_c - 1.0).abs() < 1e-9);

            let bigger = TargetVector::from_mask(space, mask | (extra & ((1 << n) - 1))).unwrap();
            prop_assert!(t.is_subset_of(&bigger));
            prop_assert!(phi_t <= phi(&bigger, &p).unwrap() + 1e-12);
        }
    }
}
