//! Built-in search algorithms.
//!
//! The hinted algorithms read a block index from the trailing bits of the
//! initial information: with `b` hint bits the space is cut into `2^b`
//! contiguous blocks of element ids and the hint selects one. On a
//! row-major grid with `b = 1`, block 0 is the top half.

use std::ops::Range;

use crate::scalar::Scalar;
use crate::search::{BitString, SearchAlgorithm, SearchHistory, SearchSpace};

/// Evaluation value the elimination search treats as a hit.
pub const HIT: i64 = 0;

fn uniform_over<S: Scalar>(n: usize, support: impl Iterator<Item = usize> + Clone) -> Vec<S> {
    let m = support.clone().count() as u64;
    let mut dist = vec![S::zero(); n];
    for i in support {
        dist[i] = S::ratio(1, m);
    }
    dist
}

/// Block `index` out of `2^bits` contiguous blocks of `0..n`.
pub fn hint_block(n: usize, bits: usize, index: u64) -> Range<usize> {
    let blocks = 1u128 << bits.min(64);
    let lo = (index as u128 * n as u128).div_ceil(blocks);
    let hi = ((index as u128 + 1) * n as u128).div_ceil(blocks);
    lo as usize..hi as usize
}

/// Block index containing `element` at `bits` of precision.
pub fn block_of(n: usize, bits: usize, element: usize) -> u64 {
    ((element as u128) << bits.min(64))
        .checked_div(n as u128)
        .unwrap_or(0) as u64
}

/// The hinted block, or `None` when the hint is missing or selects no element.
pub fn read_hint(n: usize, bits: usize, initial: &BitString) -> Option<Range<usize>> {
    if bits == 0 || bits > 63 {
        return None;
    }
    let index = initial.suffix(bits)?.to_uint()?;
    let block = hint_block(n, bits, index);
    (!block.is_empty()).then_some(block)
}

/// Samples uniformly from the whole space on every step.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformSampler;

impl<S: Scalar> SearchAlgorithm<S> for UniformSampler {
    fn next_distribution(&self, space: SearchSpace, _: &SearchHistory, _: &BitString) -> Vec<S> {
        uniform_over(space.size(), space.elements())
    }
}

/// Always queries one fixed element.
#[derive(Clone, Copy, Debug)]
pub struct PointMass {
    pub element: usize,
}

impl PointMass {
    pub fn new(element: usize) -> Self {
        PointMass { element }
    }
}

impl<S: Scalar> SearchAlgorithm<S> for PointMass {
    fn next_distribution(&self, space: SearchSpace, _: &SearchHistory, _: &BitString) -> Vec<S> {
        let mut dist = vec![S::zero(); space.size()];
        if let Some(p) = dist.get_mut(self.element) {
            *p = S::one();
        }
        dist
    }
}

/// First query drawn proportionally to `start_weights`, then always the
/// successor (mod `|Ω|`) of the previous query.
#[derive(Clone, Debug)]
pub struct Successor {
    pub start_weights: Vec<u64>,
}

impl Successor {
    pub fn new(start_weights: Vec<u64>) -> Self {
        Successor { start_weights }
    }
}

impl<S: Scalar> SearchAlgorithm<S> for Successor {
    fn next_distribution(
        &self,
        space: SearchSpace,
        history: &SearchHistory,
        _: &BitString,
    ) -> Vec<S> {
        let n = space.size();
        match history.last() {
            Some((prev, _)) => {
                let mut dist = vec![S::zero(); n];
                dist[(prev + 1) % n] = S::one();
                dist
            }
            None => {
                let total: u64 = self.start_weights.iter().sum();
                (0..n)
                    .map(|i| {
                        let w = self.start_weights.get(i).copied().unwrap_or(0);
                        S::ratio(w, total)
                    })
                    .collect()
            }
        }
    }
}

/// Oblivious sampler restricted to the hinted block.
///
/// Uniform within the block named by the last `hint_bits` bits of the
/// initial information; uniform over the space without a hint.
#[derive(Clone, Copy, Debug)]
pub struct HintedSampler {
    pub hint_bits: usize,
}

impl HintedSampler {
    pub fn new(hint_bits: usize) -> Self {
        HintedSampler { hint_bits }
    }
}

impl<S: Scalar> SearchAlgorithm<S> for HintedSampler {
    fn next_distribution(
        &self,
        space: SearchSpace,
        _: &SearchHistory,
        initial: &BitString,
    ) -> Vec<S> {
        let n = space.size();
        match read_hint(n, self.hint_bits, initial) {
            Some(block) => uniform_over(n, block),
            None => uniform_over(n, space.elements()),
        }
    }
}

/// Adaptive search without replacement.
///
/// Once any query evaluates to [`HIT`] it keeps querying that element.
/// Otherwise it draws uniformly among unqueried elements of the hinted
/// block, then among unqueried elements of the space, and finally (when
/// everything has been queried) uniformly over the space.
#[derive(Clone, Copy, Debug)]
pub struct HintedElimination {
    pub hint_bits: usize,
}

impl HintedElimination {
    pub fn new(hint_bits: usize) -> Self {
        HintedElimination { hint_bits }
    }
}

impl<S: Scalar> SearchAlgorithm<S> for HintedElimination {
    fn next_distribution(
        &self,
        space: SearchSpace,
        history: &SearchHistory,
        initial: &BitString,
    ) -> Vec<S> {
        let n = space.size();
        if let Some(&(hit, _)) = history.entries().iter().find(|&&(_, v)| v == HIT) {
            let mut dist = vec![S::zero(); n];
            dist[hit] = S::one();
            return dist;
        }
        if let Some(block) = read_hint(n, self.hint_bits, initial) {
            let fresh = block.filter(|&i| !history.was_queried(i));
            if fresh.clone().next().is_some() {
                return uniform_over(n, fresh);
            }
        }
        let fresh = space.elements().filter(|&i| !history.was_queried(i));
        if fresh.clone().next().is_some() {
            uniform_over(n, fresh)
        } else {
            uniform_over(n, space.elements())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::validate_distribution;
    use proptest::prelude::*;

    #[test]
    fn grid_half_blocks() {
        assert_eq!(hint_block(256, 1, 0), 0..128);
        assert_eq!(hint_block(256, 1, 1), 128..256);
        assert_eq!(block_of(256, 1, 127), 0);
        assert_eq!(block_of(256, 1, 128), 1);
    }

    #[test]
    fn hinted_sampler_reads_trailing_bits() {
        let space = SearchSpace::new(4).unwrap();
        let h = SearchHistory::new();
        let d: Vec<f64> =
            HintedSampler::new(2).next_distribution(space, &h, &"1110".parse().unwrap());
        assert_eq!(d, vec![0.0, 0.0, 1.0, 0.0]);
        let d: Vec<f64> = HintedSampler::new(2).next_distribution(space, &h, &"1".parse().unwrap());
        assert_eq!(d, vec![0.25; 4]);
    }

    #[test]
    fn elimination_exploits_hits() {
        let space = SearchSpace::new(3).unwrap();
        let mut h = SearchHistory::new();
        h.push(1, 5);
        let d: Vec<f64> =
            HintedElimination::new(0).next_distribution(space, &h, &BitString::empty());
        assert_eq!(d, vec![0.5, 0.0, 0.5]);
        h.push(2, HIT);
        let d: Vec<f64> =
            HintedElimination::new(0).next_distribution(space, &h, &BitString::empty());
        assert_eq!(d, vec![0.0, 0.0, 1.0]);
    }

    proptest! {
        #[test]
        fn blocks_partition_space(n in 1usize..300, bits in 0usize..10) {
            let mut covered = 0;
            for idx in 0..(1u64 << bits) {
                let b = hint_block(n, bits, idx);
                prop_assert_eq!(b.start, covered);
                for e in b.clone() {
                    prop_assert_eq!(block_of(n, bits, e), idx);
                }
                covered = b.end;
            }
            prop_assert_eq!(covered, n);
        }

        #[test]
        fn built_ins_emit_distributions(
            n in 1usize..12,
            bits in 0usize..4,
            hint in 0u64..16,
            queries in proptest::collection::vec((0usize..12, 0i64..3), 0..6),
        ) {
            let space = SearchSpace::new(n).unwrap();
            let mut h = SearchHistory::new();
            for (e, v) in queries {
                h.push(e % n, v);
            }
            let initial = BitString::from_uint(hint, bits);
            let algs: Vec<Box<dyn SearchAlgorithm<f64>>> = vec![
                Box::new(UniformSampler),
                Box::new(HintedSampler::new(bits)),
                Box::new(HintedElimination::new(bits)),
                Box::new(Successor::new(vec![1; n])),
            ];
            for alg in &algs {
                let d = alg.next_distribution(space, &h, &initial);
                prop_assert!(validate_distribution(space, &d).is_ok());
            }
        }
    }
}
