//! Simulation and verification toolkit for transfer between search
//! problems.
//!
//! A search problem is a finite space, a target subset and an information
//! resource (initial bits plus an evaluation map). Transfer appends a
//! learning resource to the recipient's initial bits; its effect is
//! measured as an affinity, the change in expected probability of success.
//!
//! Probability arithmetic is generic over [`Scalar`], so every check can run
//! in `f64`, `f32`, or exact rationals:
//!
//! ```
//! use affinity_lab::{success_vector, phi, EvalMode, Exact, InformationResource,
//!     SearchSpace, StepWeighting, TargetVector, UniformSampler};
//!
//! let space = SearchSpace::new(256)?;
//! let f = InformationResource::blank(space);
//! let w = StepWeighting::<Exact>::last_step(1)?;
//! let p = success_vector(&UniformSampler, space, &f, &w, EvalMode::exact())?;
//! let t = TargetVector::from_elements(space, &[37])?;
//! assert_eq!(affinity_lab::fraction_string(&phi(&t, &p)?), "1/256");
//! # Ok::<(), affinity_lab::Error>(())
//! ```

pub mod affinity;
pub mod algorithms;
pub mod bounds;
pub mod error;
pub mod info;
pub mod metrics;
pub mod scalar;
pub mod scenarios;
pub mod search;
pub mod seed;

pub use affinity::{
    affinity, conservation_check, futility_check, mixture_affinity, sample_uniform_simplex,
    sampled_affinities, simplex_expectation_check, zero_affinity_distribution, ConservationReport,
    FutilityReport, Recipient, ResourceDistribution, SimplexExpectationReport,
};
pub use algorithms::{HintedElimination, HintedSampler, PointMass, Successor, UniformSampler, HIT};
pub use bounds::{
    famine_affinity_distributions, famine_learned_resources, mi_chain_check, pinsker_gap,
    tlud_bound, BoundReport, DependenceBoundReport, DependenceModel, FamineDistributionReport,
    MiChainReport,
};
pub use error::{Error, Result};
pub use info::{
    conditional_mutual_information, entropy, kl_divergence, kl_divergence_nats, mutual_information,
    FiniteDistribution, JointModel,
};
pub use metrics::{phi, success_vector, EvalMode, Provenance, StepWeighting, SuccessVector};
pub use scalar::{dyadic_fraction, fraction_string, Scalar};
pub use scenarios::{
    grid_example, heuristic_correlation, heuristic_score, make_transfer_pair, transfer_benefit,
    GridReport, HeuristicConfig, HeuristicReport, TransferPair,
};
pub use search::{
    augment_resource, run_search, BitString, InformationResource, LearningResource,
    SearchAlgorithm, SearchHistory, SearchProblem, SearchSpace, TargetVector,
};

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

pub type SuccessVector64 = SuccessVector<f64>;
pub type SuccessVector32 = SuccessVector<f32>;
pub type ExactSuccessVector = SuccessVector<Exact>;

pub type ResourceDistribution64 = ResourceDistribution<f64>;
pub type ExactResourceDistribution = ResourceDistribution<Exact>;
