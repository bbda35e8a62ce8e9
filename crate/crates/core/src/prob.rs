//! Finite probability distributions and conditional tables.
//!
//! Everything else in the crate is built on these two types. Distributions are
//! immutable once constructed and always satisfy nonnegativity and unit total
//! mass to within [`NORMALIZATION_TOL`].

use std::fmt::Debug;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

/// Absolute tolerance on the total mass of a distribution.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Anything usable as an outcome or condition label.
pub trait Label: Clone + PartialEq + Debug {}

impl<T: Clone + PartialEq + Debug> Label for T {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbError {
    #[error("all weights are zero")]
    DegenerateDistribution,
    #[error("invalid mass {mass} for outcome {label}")]
    InvalidMass { label: String, mass: f64 },
    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("{labels} labels but {masses} masses")]
    LengthMismatch { labels: usize, masses: usize },
    #[error("duplicate outcome label {0}")]
    DuplicateLabel(String),
    #[error("empty support")]
    EmptySupport,
    #[error("components do not share one support")]
    SupportMismatch,
    #[error("no value supplied for outcome {0}")]
    MissingValue(String),
    #[error("unknown condition {0}")]
    UnknownCondition(String),
    #[error("mixture weight refers to component {index} but only {len} were given")]
    UnknownComponent { index: usize, len: usize },
}

/// A probability distribution over a finite, ordered support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteDistribution<L> {
    support: Vec<L>,
    mass: Vec<f64>,
}

impl<L: Label> FiniteDistribution<L> {
    /// Builds a distribution from explicit masses, validating every invariant.
    pub fn new(support: Vec<L>, mass: Vec<f64>) -> Result<Self, ProbError> {
        if support.len() != mass.len() {
            return Err(ProbError::LengthMismatch {
                labels: support.len(),
                masses: mass.len(),
            });
        }
        if support.is_empty() {
            return Err(ProbError::EmptySupport);
        }
        check_unique(&support)?;
        for (label, &m) in support.iter().zip(&mass) {
            if !m.is_finite() || m < 0.0 {
                return Err(ProbError::InvalidMass {
                    label: format!("{label:?}"),
                    mass: m,
                });
            }
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(ProbError::NotNormalized(total));
        }
        Ok(Self { support, mass })
    }

    /// Rescales nonnegative weights into a distribution.
    pub fn normalize(weights: &[f64], labels: Vec<L>) -> Result<Self, ProbError> {
        if weights.len() != labels.len() {
            return Err(ProbError::LengthMismatch {
                labels: labels.len(),
                masses: weights.len(),
            });
        }
        for (label, &w) in labels.iter().zip(weights) {
            if !w.is_finite() || w < 0.0 {
                return Err(ProbError::InvalidMass {
                    label: format!("{label:?}"),
                    mass: w,
                });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(ProbError::DegenerateDistribution);
        }
        Self::new(labels, weights.iter().map(|w| w / total).collect())
    }

    pub fn point(label: L) -> Self {
        Self {
            support: vec![label],
            mass: vec![1.0],
        }
    }

    pub fn uniform(labels: Vec<L>) -> Result<Self, ProbError> {
        let w = vec![1.0; labels.len()];
        Self::normalize(&w, labels)
    }

    pub fn support(&self) -> &[L] {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, f64)> {
        self.support.iter().zip(self.mass.iter().copied())
    }

    pub fn index_of(&self, label: &L) -> Option<usize> {
        self.support.iter().position(|l| l == label)
    }

    /// Mass of `label`, or `None` when it is not in the support.
    pub fn mass_of(&self, label: &L) -> Option<f64> {
        self.index_of(label).map(|i| self.mass[i])
    }

    /// Mass of `label`, treating labels outside the support as impossible.
    pub fn prob(&self, label: &L) -> f64 {
        self.mass_of(label).unwrap_or(0.0)
    }

    /// True when both distributions have the same label set (order ignored).
    pub fn same_support<M>(&self, other: &FiniteDistribution<M>) -> bool
    where
        M: Label,
        L: PartialEq<M>,
    {
        self.len() == other.len()
            && other
                .support
                .iter()
                .all(|o| self.support.iter().any(|s| s == o))
    }

    /// Σ mass·value. Fails if `value` has no entry for some support label.
    pub fn expectation<F>(&self, value: F) -> Result<f64, ProbError>
    where
        F: Fn(&L) -> Option<f64>,
    {
        self.iter().try_fold(0.0, |acc, (label, m)| {
            let v = value(label).ok_or_else(|| ProbError::MissingValue(format!("{label:?}")))?;
            Ok(acc + m * v)
        })
    }

    /// Pushes the distribution forward through `f`, merging labels that collide.
    pub fn map<M: Label, F: Fn(&L) -> M>(&self, f: F) -> FiniteDistribution<M> {
        let mut support: Vec<M> = Vec::new();
        let mut mass: Vec<f64> = Vec::new();
        for (label, m) in self.iter() {
            let image = f(label);
            match support.iter().position(|s| *s == image) {
                Some(i) => mass[i] += m,
                None => {
                    support.push(image);
                    mass.push(m);
                }
            }
        }
        FiniteDistribution { support, mass }
    }

    /// Largest per-label absolute difference. `None` if the supports differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if !self.same_support(other) {
            return None;
        }
        Some(
            self.iter()
                .map(|(l, m)| (m - other.prob(l)).abs())
                .fold(0.0, f64::max),
        )
    }

    /// Draws one label by inverse-CDF sampling.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &L {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (label, m) in self.iter() {
            acc += m;
            if u < acc {
                return label;
            }
        }
        // Rounding can leave the cumulative sum a hair below 1.
        let last = self.mass.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        &self.support[last]
    }
}

fn check_unique<L: Label>(labels: &[L]) -> Result<(), ProbError> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(ProbError::DuplicateLabel(format!("{l:?}")));
        }
    }
    Ok(())
}

/// Convenience wrapper for [`FiniteDistribution::normalize`].
pub fn normalize<L: Label>(weights: &[f64], labels: Vec<L>) -> Result<FiniteDistribution<L>, ProbError> {
    FiniteDistribution::normalize(weights, labels)
}

/// Mixture Σ_k w_k·d_k of distributions sharing one support.
///
/// `weights` is a distribution over component indices. The result uses the
/// support order of the first component.
pub fn mix<L: Label>(
    components: &[FiniteDistribution<L>],
    weights: &FiniteDistribution<usize>,
) -> Result<FiniteDistribution<L>, ProbError> {
    let first = components.first().ok_or(ProbError::EmptySupport)?;
    if components.iter().any(|c| !first.same_support(c)) {
        return Err(ProbError::SupportMismatch);
    }
    let mut mass = vec![0.0; first.len()];
    for (&k, w) in weights.iter() {
        let component = components.get(k).ok_or(ProbError::UnknownComponent {
            index: k,
            len: components.len(),
        })?;
        for (slot, label) in mass.iter_mut().zip(first.support()) {
            *slot += w * component.prob(label);
        }
    }
    FiniteDistribution::new(first.support().to_vec(), mass)
}

/// Σ mass·value with the value map given as a closure.
pub fn expectation<L: Label, F>(dist: &FiniteDistribution<L>, value: F) -> Result<f64, ProbError>
where
    F: Fn(&L) -> Option<f64>,
{
    dist.expectation(value)
}

/// A family of distributions over one outcome support, indexed by condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalTable<C, O> {
    conditions: Vec<C>,
    rows: Vec<FiniteDistribution<O>>,
}

impl<C: Label, O: Label> ConditionalTable<C, O> {
    pub fn new(rows: Vec<(C, FiniteDistribution<O>)>) -> Result<Self, ProbError> {
        let (conditions, rows): (Vec<C>, Vec<FiniteDistribution<O>>) = rows.into_iter().unzip();
        if rows.is_empty() {
            return Err(ProbError::EmptySupport);
        }
        check_unique(&conditions)?;
        if rows.iter().any(|r| !rows[0].same_support(r)) {
            return Err(ProbError::SupportMismatch);
        }
        Ok(Self { conditions, rows })
    }

    /// The same distribution under every condition.
    pub fn constant(conditions: Vec<C>, row: FiniteDistribution<O>) -> Result<Self, ProbError> {
        Self::new(conditions.into_iter().map(|c| (c, row.clone())).collect())
    }

    pub fn conditions(&self) -> &[C] {
        &self.conditions
    }

    pub fn outcomes(&self) -> &[O] {
        self.rows[0].support()
    }

    pub fn row(&self, condition: &C) -> Option<&FiniteDistribution<O>> {
        self.conditions
            .iter()
            .position(|c| c == condition)
            .map(|i| &self.rows[i])
    }

    pub fn try_row(&self, condition: &C) -> Result<&FiniteDistribution<O>, ProbError> {
        self.row(condition)
            .ok_or_else(|| ProbError::UnknownCondition(format!("{condition:?}")))
    }

    /// P(outcome | condition); `None` if the condition is unknown.
    pub fn prob(&self, condition: &C, outcome: &O) -> Option<f64> {
        self.row(condition).map(|r| r.prob(outcome))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&C, &FiniteDistribution<O>)> {
        self.conditions.iter().zip(&self.rows)
    }
}
