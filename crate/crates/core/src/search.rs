//! Search problems and the black-box search loop.
//!
//! A problem is the triple of a finite search space, a nonempty target set
//! and an information resource. An algorithm maps the history so far (plus
//! the resource's initial information) to a distribution over the space;
//! one element is sampled, evaluated by the resource, and appended to the
//! history. All randomness lives in the sampling step, so the exact marginal
//! of every query is well defined and can be enumerated.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;

/// Default cap on `|Ω|^steps` for exact enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Evaluation values are opaque symbols; the core never interprets them
/// numerically.
pub type EvalValue = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchSpace {
    size: usize,
}

impl SearchSpace {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter(
                "search space must contain at least one element".into(),
            ));
        }
        Ok(SearchSpace { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> Range<usize> {
        0..self.size
    }
}

/// Indicator vector of a nonempty target set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TargetVector {
    bits: Vec<bool>,
}

impl TargetVector {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if !bits.iter().any(|&b| b) {
            return Err(Error::InvalidParameter(
                "target set must be nonempty".into(),
            ));
        }
        Ok(TargetVector { bits })
    }

    pub fn from_elements(space: SearchSpace, elements: &[usize]) -> Result<Self> {
        let mut bits = vec![false; space.size()];
        for &e in elements {
            if e >= space.size() {
                return Err(Error::InvalidParameter(format!(
                    "target element {e} outside search space of size {}",
                    space.size()
                )));
            }
            bits[e] = true;
        }
        Self::new(bits)
    }

    /// Target whose members are the set bits of `mask`.
    pub fn from_mask(space: SearchSpace, mask: u64) -> Result<Self> {
        let bits = (0..space.size())
            .map(|i| i < 64 && mask >> i & 1 == 1)
            .collect();
        Self::new(bits)
    }

    /// Every nonempty target on `space`, in increasing mask order.
    pub fn all_nonempty(space: SearchSpace) -> Result<impl Iterator<Item = TargetVector>> {
        if space.size() > 20 {
            return Err(Error::InvalidParameter(format!(
                "refusing to enumerate 2^{} targets",
                space.size()
            )));
        }
        let n = space.size();
        Ok((1u64..1u64 << n).map(move |m| {
            TargetVector::from_mask(space, m).expect("nonzero mask is a nonempty target")
        }))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Population count.
    pub fn k(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, element: usize) -> bool {
        self.bits.get(element).copied().unwrap_or(false)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    /// `None` when the target is the whole space.
    pub fn complement(&self) -> Option<TargetVector> {
        TargetVector::new(self.bits.iter().map(|b| !b).collect()).ok()
    }

    pub fn is_subset_of(&self, other: &TargetVector) -> bool {
        self.len() == other.len() && self.elements().all(|e| other.contains(e))
    }
}

/// Finite binary string, most significant bit first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// `width`-bit big-endian encoding of `value`. Higher bits are dropped.
    pub fn from_uint(value: u64, width: usize) -> Self {
        BitString(
            (0..width)
                .rev()
                .map(|i| i < 64 && value >> i & 1 == 1)
                .collect(),
        )
    }

    pub fn to_uint(&self) -> Option<u64> {
        if self.0.len() > 64 {
            return None;
        }
        Some(self.0.iter().fold(0u64, |acc, &b| acc << 1 | u64::from(b)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// The last `n` bits, or `None` when the string is shorter.
    pub fn suffix(&self, n: usize) -> Option<BitString> {
        (n <= self.0.len()).then(|| BitString(self.0[self.0.len() - n..].to_vec()))
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        BitString(bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "invalid bit {other:?} in bit string {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        let text: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Knowledge transferred from a source problem.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LearningResource {
    pub bits: BitString,
}

impl LearningResource {
    pub fn new(bits: BitString) -> Self {
        LearningResource { bits }
    }

    /// The identity resource.
    pub fn empty() -> Self {
        LearningResource::default()
    }
}

impl FromStr for LearningResource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(LearningResource::new)
    }
}

/// Initial information `F(∅)` plus a total evaluation map over the space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InformationResource {
    initial: BitString,
    eval: Vec<EvalValue>,
}

impl InformationResource {
    pub fn new(space: SearchSpace, initial: BitString, eval: Vec<EvalValue>) -> Result<Self> {
        if eval.len() != space.size() {
            return Err(Error::DimensionMismatch {
                expected: space.size(),
                actual: eval.len(),
            });
        }
        Ok(InformationResource { initial, eval })
    }

    /// Resource with no initial information and a constant evaluation.
    pub fn blank(space: SearchSpace) -> Self {
        InformationResource {
            initial: BitString::empty(),
            eval: vec![0; space.size()],
        }
    }

    pub fn initial(&self) -> &BitString {
        &self.initial
    }

    pub fn eval(&self, element: usize) -> EvalValue {
        self.eval[element]
    }

    pub fn eval_map(&self) -> &[EvalValue] {
        &self.eval
    }

    pub fn space_size(&self) -> usize {
        self.eval.len()
    }
}

/// `f_{R_o+L}`: appends `l` to the initial information of `f`.
pub fn augment_resource(f: &InformationResource, l: &LearningResource) -> InformationResource {
    InformationResource {
        initial: f.initial.concat(&l.bits),
        eval: f.eval.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchProblem {
    pub space: SearchSpace,
    pub target: TargetVector,
    pub resource: InformationResource,
}

impl SearchProblem {
    pub fn new(
        space: SearchSpace,
        target: TargetVector,
        resource: InformationResource,
    ) -> Result<Self> {
        if target.len() != space.size() {
            return Err(Error::DimensionMismatch {
                expected: space.size(),
                actual: target.len(),
            });
        }
        if resource.space_size() != space.size() {
            return Err(Error::DimensionMismatch {
                expected: space.size(),
                actual: resource.space_size(),
            });
        }
        Ok(SearchProblem {
            space,
            target,
            resource,
        })
    }
}

/// Queried elements and their evaluations, in query order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SearchHistory {
    entries: Vec<(usize, EvalValue)>,
}

impl SearchHistory {
    pub fn new() -> Self {
        SearchHistory::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, EvalValue)] {
        &self.entries
    }

    pub fn last(&self) -> Option<(usize, EvalValue)> {
        self.entries.last().copied()
    }

    pub fn was_queried(&self, element: usize) -> bool {
        self.entries.iter().any(|&(e, _)| e == element)
    }

    pub(crate) fn push(&mut self, element: usize, value: EvalValue) {
        self.entries.push((element, value));
    }

    pub(crate) fn pop(&mut self) {
        self.entries.pop();
    }
}

/// Black-box search algorithm: a deterministic map from the history and the
/// resource's initial information to a distribution over the space.
pub trait SearchAlgorithm<S: Scalar>: Send + Sync {
    fn next_distribution(
        &self,
        space: SearchSpace,
        history: &SearchHistory,
        initial: &BitString,
    ) -> Vec<S>;
}

impl<S: Scalar, A: SearchAlgorithm<S> + ?Sized> SearchAlgorithm<S> for &A {
    fn next_distribution(
        &self,
        space: SearchSpace,
        history: &SearchHistory,
        initial: &BitString,
    ) -> Vec<S> {
        (**self).next_distribution(space, history, initial)
    }
}

impl<S: Scalar, A: SearchAlgorithm<S> + ?Sized> SearchAlgorithm<S> for Box<A> {
    fn next_distribution(
        &self,
        space: SearchSpace,
        history: &SearchHistory,
        initial: &BitString,
    ) -> Vec<S> {
        (**self).next_distribution(space, history, initial)
    }
}

/// Checks length, nonnegativity and unit mass (within `S::tolerance()`).
pub fn validate_distribution<S: Scalar>(space: SearchSpace, dist: &[S]) -> Result<()> {
    if dist.len() != space.size() {
        return Err(Error::DistributionContract(format!(
            "length {} does not match |Ω| = {}",
            dist.len(),
            space.size()
        )));
    }
    if let Some(i) = dist.iter().position(|p| *p < S::zero()) {
        return Err(Error::DistributionContract(format!(
            "negative mass {} at element {i}",
            dist[i].to_f64()
        )));
    }
    let total = S::sum(dist);
    if !total.approx_eq(&S::one(), &S::tolerance()) {
        return Err(Error::DistributionContract(format!(
            "masses sum to {}",
            total.to_f64()
        )));
    }
    Ok(())
}

fn sample_element<S: Scalar, R: Rng + ?Sized>(dist: &[S], rng: &mut R) -> Result<usize> {
    let weights = dist.iter().map(|p| p.to_f64().max(0.0));
    let index = WeightedIndex::new(weights)
        .map_err(|e| Error::DistributionContract(format!("cannot sample: {e}")))?;
    Ok(index.sample(rng))
}

/// Samples one history of `steps` queries against `resource`.
pub fn sample_history<S, A, R>(
    alg: &A,
    space: SearchSpace,
    resource: &InformationResource,
    steps: usize,
    rng: &mut R,
) -> Result<SearchHistory>
where
    S: Scalar,
    A: SearchAlgorithm<S> + ?Sized,
    R: Rng + ?Sized,
{
    let mut history = SearchHistory::new();
    for _ in 0..steps {
        let dist = alg.next_distribution(space, &history, resource.initial());
        validate_distribution(space, &dist)?;
        let element = sample_element(&dist, rng)?;
        history.push(element, resource.eval(element));
    }
    Ok(history)
}

/// Runs the search loop for `steps` queries. Deterministic given `seed`.
pub fn run_search<S, A>(
    alg: &A,
    problem: &SearchProblem,
    steps: usize,
    seed: u64,
) -> Result<SearchHistory>
where
    S: Scalar,
    A: SearchAlgorithm<S> + ?Sized,
{
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    let mut rng = seed::rng(seed, 0);
    sample_history(alg, problem.space, &problem.resource, steps, &mut rng)
}

fn check_budget(space: SearchSpace, steps: usize, cap: u64) -> Result<()> {
    let required = u32::try_from(steps)
        .ok()
        .and_then(|s| (space.size() as u128).checked_pow(s))
        .unwrap_or(u128::MAX);
    if required > u128::from(cap) {
        return Err(Error::EnumerationCap { required, cap });
    }
    Ok(())
}

/// Visits every reachable history prefix of length `< steps` with its
/// probability and the algorithm's next-query distribution.
///
/// Zero-probability branches are pruned.
pub fn for_each_prefix<S, A, V>(
    alg: &A,
    space: SearchSpace,
    resource: &InformationResource,
    steps: usize,
    cap: u64,
    mut visit: V,
) -> Result<()>
where
    S: Scalar,
    A: SearchAlgorithm<S> + ?Sized,
    V: FnMut(&SearchHistory, &S, &[S]),
{
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    check_budget(space, steps, cap)?;
    let mut history = SearchHistory::new();
    descend(
        alg,
        space,
        resource,
        steps,
        &mut history,
        S::one(),
        &mut visit,
    )
}

fn descend<S, A, V>(
    alg: &A,
    space: SearchSpace,
    resource: &InformationResource,
    steps: usize,
    history: &mut SearchHistory,
    weight: S,
    visit: &mut V,
) -> Result<()>
where
    S: Scalar,
    A: SearchAlgorithm<S> + ?Sized,
    V: FnMut(&SearchHistory, &S, &[S]),
{
    let dist = alg.next_distribution(space, history, resource.initial());
    validate_distribution(space, &dist)?;
    visit(history, &weight, &dist);
    if history.len() + 1 >= steps {
        return Ok(());
    }
    for (element, p) in dist.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        history.push(element, resource.eval(element));
        let result = descend(
            alg,
            space,
            resource,
            steps,
            history,
            weight.clone() * p.clone(),
            visit,
        );
        history.pop();
        result?;
    }
    Ok(())
}

/// Exact marginal distribution of each of the `steps` queries.
pub fn step_distributions_exact<S, A>(
    alg: &A,
    space: SearchSpace,
    resource: &InformationResource,
    steps: usize,
    cap: u64,
) -> Result<Vec<Vec<S>>>
where
    S: Scalar,
    A: SearchAlgorithm<S> + ?Sized,
{
    let mut marginals = vec![vec![S::zero(); space.size()]; steps];
    for_each_prefix(alg, space, resource, steps, cap, |history, weight, dist| {
        let row = &mut marginals[history.len()];
        for (acc, p) in row.iter_mut().zip(dist) {
            if !p.is_zero() {
                *acc = acc.clone() + weight.clone() * p.clone();
            }
        }
    })?;
    Ok(marginals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{PointMass, Successor, UniformSampler};
    use num_rational::BigRational;

    fn space(n: usize) -> SearchSpace {
        SearchSpace::new(n).unwrap()
    }

    fn problem(n: usize) -> SearchProblem {
        let s = space(n);
        let eval = (0..n as i64).map(|i| 10 * i).collect();
        SearchProblem::new(
            s,
            TargetVector::from_elements(s, &[0]).unwrap(),
            InformationResource::new(s, BitString::empty(), eval).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn empty_space_and_target_rejected() {
        assert!(SearchSpace::new(0).is_err());
        assert!(TargetVector::new(vec![false, false]).is_err());
        assert!(TargetVector::from_elements(space(3), &[3]).is_err());
    }

    #[test]
    fn augment_appends_learning_bits() {
        let s = space(3);
        let f = InformationResource::new(s, BitString::empty(), vec![1, 2, 3]).unwrap();
        assert_eq!(augment_resource(&f, &LearningResource::empty()), f);

        let one: LearningResource = "1".parse().unwrap();
        let g = augment_resource(&f, &one);
        assert_eq!(g.initial().to_string(), "1");
        assert_eq!(g.eval_map(), f.eval_map());

        let f01 = InformationResource::new(s, "01".parse().unwrap(), vec![1, 2, 3]).unwrap();
        assert_eq!(augment_resource(&f01, &one).initial().to_string(), "011");
    }

    #[test]
    fn bit_string_encoding() {
        let b = BitString::from_uint(5, 4);
        assert_eq!(b.to_string(), "0101");
        assert_eq!(b.to_uint(), Some(5));
        assert_eq!(b.suffix(2).unwrap().to_string(), "01");
        assert!(b.suffix(5).is_none());
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn point_mass_history_repeats_element() {
        let p = problem(4);
        let h = run_search::<f64, _>(&PointMass::new(0), &p, 3, 7).unwrap();
        assert_eq!(h.entries(), &[(0, 0), (0, 0), (0, 0)]);
    }

    #[test]
    fn single_step_history() {
        let h = run_search::<f64, _>(&UniformSampler, &problem(5), 1, 1).unwrap();
        assert_eq!(h.len(), 1);
        assert!(run_search::<f64, _>(&UniformSampler, &problem(5), 0, 1).is_err());
    }

    #[test]
    fn uniform_history_replays_from_seed() {
        let p = problem(4);
        let a = run_search::<f64, _>(&UniformSampler, &p, 3, 2024).unwrap();
        let b = run_search::<f64, _>(&UniformSampler, &p, 3, 2024).unwrap();
        assert_eq!(a, b);
        // Recorded from a first run; pins the seed derivation and sampler.
        let elements: Vec<usize> = a.entries().iter().map(|e| e.0).collect();
        assert_eq!(elements, RECORDED_UNIFORM_HISTORY);
        for &(e, v) in a.entries() {
            assert_eq!(v, p.resource.eval(e));
        }
    }

    const RECORDED_UNIFORM_HISTORY: [usize; 3] = [0, 3, 2];

    struct Broken;
    impl SearchAlgorithm<f64> for Broken {
        fn next_distribution(
            &self,
            space: SearchSpace,
            _: &SearchHistory,
            _: &BitString,
        ) -> Vec<f64> {
            vec![0.5; space.size()]
        }
    }

    #[test]
    fn malformed_distribution_is_contract_error() {
        let err = run_search(&Broken, &problem(3), 2, 0).unwrap_err();
        assert!(matches!(err, Error::DistributionContract(_)));
    }

    #[test]
    fn exact_marginals_of_uniform_are_uniform() {
        let p = problem(3);
        let m = step_distributions_exact::<BigRational, _>(
            &UniformSampler,
            p.space,
            &p.resource,
            2,
            DEFAULT_ENUMERATION_CAP,
        )
        .unwrap();
        for row in m {
            assert!(row
                .iter()
                .all(|x| *x == <BigRational as Scalar>::ratio(1, 3)));
        }
    }

    #[test]
    fn exact_marginals_of_point_mass() {
        let p = problem(4);
        let m = step_distributions_exact::<f64, _>(
            &PointMass::new(0),
            p.space,
            &p.resource,
            3,
            DEFAULT_ENUMERATION_CAP,
        )
        .unwrap();
        for row in m {
            assert_eq!(row, vec![1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn alternating_search_swaps_marginal() {
        // Histories: (0,1) w.p. 1/4 and (1,0) w.p. 3/4; step 2 is the swap.
        let p = problem(2);
        let alg = Successor::new(vec![1, 3]);
        let m = step_distributions_exact::<BigRational, _>(
            &alg,
            p.space,
            &p.resource,
            2,
            DEFAULT_ENUMERATION_CAP,
        )
        .unwrap();
        let q = |a, b| <BigRational as Scalar>::ratio(a, b);
        assert_eq!(m[0], vec![q(1, 4), q(3, 4)]);
        assert_eq!(m[1], vec![q(3, 4), q(1, 4)]);
    }

    #[test]
    fn enumeration_cap_enforced() {
        let p = problem(10);
        let err =
            step_distributions_exact::<f64, _>(&UniformSampler, p.space, &p.resource, 7, 1_000_000)
                .unwrap_err();
        assert_eq!(
            err,
            Error::EnumerationCap {
                required: 10_000_000,
                cap: 1_000_000
            }
        );
    }
}
