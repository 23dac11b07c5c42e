//! Entropy, KL divergence and (conditional) mutual information over
//! explicit finite distributions. All quantities are in bits unless the
//! function name says otherwise; `0 · log 0 = 0`.

use std::fmt::Debug;

use num_traits::Float;

use crate::error::{Error, Result};

/// Floating-point type usable for information quantities.
pub trait InfoFloat: Float + Debug + Send + Sync + 'static {}
impl InfoFloat for f32 {}
impl InfoFloat for f64 {}

fn cast<F: InfoFloat>(x: f64) -> F {
    F::from(x).expect("finite constant fits every float type")
}

fn mass_tolerance<F: InfoFloat>(len: usize) -> F {
    let floor = cast::<F>(1e-12);
    let rounding = F::epsilon() * cast(8.0 * len.max(1) as f64);
    floor.max(rounding)
}

fn plogp<F: InfoFloat>(p: F) -> F {
    if p > F::zero() {
        p * p.log2()
    } else {
        F::zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution<F> {
    masses: Vec<F>,
}

impl<F: InfoFloat> FiniteDistribution<F> {
    pub fn new(masses: Vec<F>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::DistributionContract("empty alphabet".into()));
        }
        if let Some(i) = masses.iter().position(|p| !p.is_finite() || *p < F::zero()) {
            return Err(Error::DistributionContract(format!(
                "invalid mass {:?} at index {i}",
                masses[i]
            )));
        }
        let total = masses.iter().fold(F::zero(), |a, &b| a + b);
        if (total - F::one()).abs() > mass_tolerance(masses.len()) {
            return Err(Error::DistributionContract(format!(
                "masses sum to {total:?}"
            )));
        }
        Ok(FiniteDistribution { masses })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DistributionContract("empty alphabet".into()));
        }
        Self::new(vec![F::one() / cast(n as f64); n])
    }

    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidParameter(format!(
                "point mass index {index} outside alphabet of size {n}"
            )));
        }
        let mut masses = vec![F::zero(); n];
        masses[index] = F::one();
        Self::new(masses)
    }

    /// Normalises nonnegative weights.
    pub fn from_weights(weights: &[F]) -> Result<Self> {
        let total = weights.iter().fold(F::zero(), |a, &b| a + b);
        if total.is_nan() || total <= F::zero() {
            return Err(Error::DistributionContract("weights have no mass".into()));
        }
        Self::new(weights.iter().map(|&w| w / total).collect())
    }

    pub fn masses(&self) -> &[F] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

pub fn entropy<F: InfoFloat>(p: &FiniteDistribution<F>) -> F {
    -p.masses.iter().fold(F::zero(), |acc, &m| acc + plogp(m))
}

fn kl_with<F: InfoFloat>(
    p: &FiniteDistribution<F>,
    q: &FiniteDistribution<F>,
    log: impl Fn(F) -> F,
) -> Result<F> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    let mut total = F::zero();
    for (i, (&pi, &qi)) in p.masses.iter().zip(&q.masses).enumerate() {
        if pi <= F::zero() {
            continue;
        }
        if qi <= F::zero() {
            return Err(Error::DivergenceUndefined {
                index: i,
                mass: pi.to_f64().unwrap_or(f64::NAN),
            });
        }
        total = total + pi * log(pi / qi);
    }
    Ok(total)
}

/// `D(p ‖ q)` in bits. Support violations are an error, never `+∞`.
pub fn kl_divergence<F: InfoFloat>(
    p: &FiniteDistribution<F>,
    q: &FiniteDistribution<F>,
) -> Result<F> {
    kl_with(p, q, |x| x.log2())
}

/// `D(p ‖ q)` in nats.
pub fn kl_divergence_nats<F: InfoFloat>(
    p: &FiniteDistribution<F>,
    q: &FiniteDistribution<F>,
) -> Result<F> {
    kl_with(p, q, |x| x.ln())
}

/// Axis labels of the three-way (target, source resource, recipient
/// resource) joint.
pub mod axis {
    pub const TARGET: usize = 0;
    pub const SOURCE: usize = 1;
    pub const RECIPIENT: usize = 2;
}

/// Explicit joint distribution stored as a row-major tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct JointModel<F> {
    shape: Vec<usize>,
    masses: Vec<F>,
}

impl<F: InfoFloat> JointModel<F> {
    pub fn new(shape: Vec<usize>, masses: Vec<F>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "invalid joint shape {shape:?}"
            )));
        }
        let cells: usize = shape.iter().product();
        if cells != masses.len() {
            return Err(Error::DimensionMismatch {
                expected: cells,
                actual: masses.len(),
            });
        }
        // validates the flattened masses
        let dist = FiniteDistribution::new(masses)?;
        Ok(JointModel {
            shape,
            masses: dist.masses,
        })
    }

    /// Three-way joint over (target, source resource, recipient resource).
    pub fn three_way(
        targets: usize,
        sources: usize,
        recipients: usize,
        masses: Vec<F>,
    ) -> Result<Self> {
        Self::new(vec![targets, sources, recipients], masses)
    }

    /// Builds the tensor from a mass function over index tuples.
    pub fn from_fn(shape: Vec<usize>, mut mass: impl FnMut(&[usize]) -> F) -> Result<Self> {
        let cells: usize = shape.iter().product();
        let mut masses = Vec::with_capacity(cells);
        let mut index = vec![0usize; shape.len()];
        for _ in 0..cells {
            masses.push(mass(&index));
            for d in (0..shape.len()).rev() {
                index[d] += 1;
                if index[d] < shape[d] {
                    break;
                }
                index[d] = 0;
            }
        }
        Self::new(shape, masses)
    }

    /// Product of independent marginals.
    pub fn independent(marginals: &[FiniteDistribution<F>]) -> Result<Self> {
        let shape = marginals.iter().map(|m| m.len()).collect();
        Self::from_fn(shape, |idx| {
            idx.iter()
                .zip(marginals)
                .fold(F::one(), |acc, (&i, m)| acc * m.masses[i])
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn masses(&self) -> &[F] {
        &self.masses
    }

    /// Visits every cell with its index tuple.
    pub fn for_each(&self, mut f: impl FnMut(&[usize], F)) {
        let mut index = vec![0usize; self.shape.len()];
        for &m in &self.masses {
            f(&index, m);
            for d in (0..self.shape.len()).rev() {
                index[d] += 1;
                if index[d] < self.shape[d] {
                    break;
                }
                index[d] = 0;
            }
        }
    }

    fn check_axes(&self, axes: &[usize]) -> Result<()> {
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.shape.len() {
                return Err(Error::InvalidParameter(format!(
                    "axis {a} out of range for a {}-axis joint",
                    self.shape.len()
                )));
            }
            if axes[..i].contains(&a) {
                return Err(Error::InvalidParameter(format!("axis {a} repeated")));
            }
        }
        Ok(())
    }

    /// Marginal over `axes`, flattened row-major in the given axis order.
    pub fn marginal(&self, axes: &[usize]) -> Result<FiniteDistribution<F>> {
        self.check_axes(axes)?;
        let size: usize = axes.iter().map(|&a| self.shape[a]).product();
        let mut out = vec![F::zero(); size.max(1)];
        self.for_each(|idx, m| {
            let flat = axes
                .iter()
                .fold(0usize, |acc, &a| acc * self.shape[a] + idx[a]);
            out[flat] = out[flat] + m;
        });
        FiniteDistribution::new(out)
    }

    /// Joint entropy of the variables on `axes` (0 for no axes).
    pub fn entropy_of(&self, axes: &[usize]) -> Result<F> {
        if axes.is_empty() {
            return Ok(F::zero());
        }
        Ok(entropy(&self.marginal(axes)?))
    }
}

fn disjoint(groups: &[&[usize]]) -> Result<Vec<usize>> {
    let mut all = Vec::new();
    for g in groups {
        for &a in *g {
            if all.contains(&a) {
                return Err(Error::InvalidParameter(format!(
                    "axis {a} appears in more than one argument"
                )));
            }
            all.push(a);
        }
    }
    Ok(all)
}

/// `I(A; B) = H(A) + H(B) − H(A, B)` in bits, where `a` and `b` are
/// disjoint sets of axes.
pub fn mutual_information<F: InfoFloat>(j: &JointModel<F>, a: &[usize], b: &[usize]) -> Result<F> {
    let ab = disjoint(&[a, b])?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter(
            "mutual information needs two nonempty axis sets".into(),
        ));
    }
    Ok(j.entropy_of(a)? + j.entropy_of(b)? - j.entropy_of(&ab)?)
}

/// `I(A; B | C) = H(A, C) + H(B, C) − H(A, B, C) − H(C)` in bits.
pub fn conditional_mutual_information<F: InfoFloat>(
    j: &JointModel<F>,
    a: &[usize],
    b: &[usize],
    given: &[usize],
) -> Result<F> {
    let abc = disjoint(&[a, b, given])?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter(
            "mutual information needs two nonempty axis sets".into(),
        ));
    }
    let ac: Vec<usize> = a.iter().chain(given).copied().collect();
    let bc: Vec<usize> = b.iter().chain(given).copied().collect();
    Ok(j.entropy_of(&ac)? + j.entropy_of(&bc)? - j.entropy_of(&abc)? - j.entropy_of(given)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(m: &[f64]) -> FiniteDistribution<f64> {
        FiniteDistribution::new(m.to_vec()).unwrap()
    }

    #[test]
    fn rejects_invalid_distributions() {
        assert!(FiniteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(FiniteDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(FiniteDistribution::<f64>::new(vec![]).is_err());
        assert!(FiniteDistribution::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(
            entropy(&FiniteDistribution::<f64>::uniform(256).unwrap()),
            8.0
        );
        assert_eq!(
            entropy(&FiniteDistribution::<f64>::point_mass(5, 2).unwrap()),
            0.0
        );
        assert_eq!(entropy(&dist(&[0.5, 0.25, 0.25])), 1.5);
        assert!((entropy(&FiniteDistribution::<f32>::uniform(4).unwrap()) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn kl_values() {
        let u = FiniteDistribution::<f64>::uniform(256).unwrap();
        assert_eq!(kl_divergence(&u, &u).unwrap(), 0.0);
        let p = dist(&[0.2, 0.3, 0.5]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        assert_eq!(
            kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap(),
            1.0
        );
        assert!(
            (kl_divergence_nats(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap() - 2f64.ln()).abs()
                < 1e-15
        );
    }

    #[test]
    fn kl_support_violation_is_error() {
        let err = kl_divergence(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DivergenceUndefined {
                index: 1,
                mass: 0.5
            }
        );
        assert!(kl_divergence(&dist(&[1.0]), &dist(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let ind = JointModel::independent(&[dist(&[0.3, 0.7]), dist(&[0.1, 0.2, 0.7])]).unwrap();
        assert!(mutual_information(&ind, &[0], &[1]).unwrap().abs() < 1e-12);

        let copy = JointModel::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(mutual_information(&copy, &[0], &[1]).unwrap(), 1.0);

        // uniform target on 256 cells, source = half indicator
        let half = JointModel::from_fn(vec![256, 2], |i| {
            if (i[0] >= 128) as usize == i[1] {
                1.0 / 256.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(mutual_information(&half, &[0], &[1]).unwrap(), 1.0);
    }

    #[test]
    fn conditional_mutual_information_examples() {
        let ind =
            JointModel::independent(&[dist(&[0.3, 0.7]), dist(&[0.5, 0.5]), dist(&[0.9, 0.1])])
                .unwrap();
        assert!(
            conditional_mutual_information(&ind, &[0], &[1], &[2])
                .unwrap()
                .abs()
                < 1e-12
        );

        // X uniform bit, Y = X, Z = Y: I(X; Y | ∅) = H(X) = 1, and
        // I(X; Y, Z) = I(X; Z) + I(X; Y | Z) = 1 + 0.
        let chain = JointModel::from_fn(vec![2, 2, 2], |i| {
            if i[0] == i[1] && i[1] == i[2] {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(
            conditional_mutual_information(&chain, &[0], &[1], &[]).unwrap(),
            1.0
        );
        assert_eq!(
            conditional_mutual_information(&chain, &[0], &[1], &[2]).unwrap(),
            0.0
        );
    }

    #[test]
    fn bad_axes_rejected() {
        let j = JointModel::new(vec![2, 2], vec![0.25; 4]).unwrap();
        assert!(mutual_information(&j, &[0], &[0]).is_err());
        assert!(mutual_information(&j, &[0], &[2]).is_err());
        assert!(mutual_information(&j, &[], &[1]).is_err());
        assert!(JointModel::new(vec![2, 2], vec![0.5; 4]).is_err());
    }
}
