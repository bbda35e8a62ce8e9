//! Hidden-variable models of two-party ±1 correlations and the CHSH functional.
//!
//! Alice and Bob each pick a [`Setting`] (red or green button) and observe a
//! [`Sign`]. Anything that yields a joint outcome distribution per setting
//! pair is a [`JointModel`]; [`chsh_of_model`] evaluates
//! ⟨a_r b_r⟩ + ⟨a_r b_g⟩ + ⟨a_g b_r⟩ − ⟨a_g b_g⟩ on it.
//!
//! An [`LhvModel`] factorises as Σ_λ P(λ)·P(a|A;λ)·P(b|B;λ). Its value of F
//! is a convex combination of the 16 [`DeterministicStrategy`] values, each of
//! which is ±2, so no such model exceeds 2.

use std::f64::consts::SQRT_2;
use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::prob::{mix, ConditionalTable, FiniteDistribution, Label, ProbError};

/// Quantum maximum of the CHSH functional, 2√2.
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

/// Maximum of the CHSH functional over local hidden-variable models.
pub const LOCAL_BOUND: f64 = 2.0;

/// Tolerance for distribution comparisons (no-signalling, independence).
pub const MODEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("credence {0} outside [0, 1]")]
    InvalidCredence(f64),
    #[error("malformed model: {0}")]
    Shape(String),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// A ±1 measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Button colour pressed on one side; the measurement choice A_i or B_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Red,
    Green,
}

impl Setting {
    pub const ALL: [Setting; 2] = [Setting::Red, Setting::Green];

    pub fn name(self) -> &'static str {
        match self {
            Setting::Red => "red",
            Setting::Green => "green",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Setting pairs in the order the CHSH cells are reported: rr, rg, gr, gg.
pub const SETTING_PAIRS: [(Setting, Setting); 4] = [
    (Setting::Red, Setting::Red),
    (Setting::Red, Setting::Green),
    (Setting::Green, Setting::Red),
    (Setting::Green, Setting::Green),
];

pub fn pair_index(alice: Setting, bob: Setting) -> usize {
    match (alice, bob) {
        (Setting::Red, Setting::Red) => 0,
        (Setting::Red, Setting::Green) => 1,
        (Setting::Green, Setting::Red) => 2,
        (Setting::Green, Setting::Green) => 3,
    }
}

/// Coefficient of each cell in F: −1 for green-green, +1 otherwise.
pub fn chsh_coefficient(alice: Setting, bob: Setting) -> f64 {
    if (alice, bob) == (Setting::Green, Setting::Green) {
        -1.0
    } else {
        1.0
    }
}

pub type JointOutcome = (Sign, Sign);
pub type JointDistribution = FiniteDistribution<JointOutcome>;

pub const JOINT_OUTCOMES: [JointOutcome; 4] = [
    (Sign::Plus, Sign::Plus),
    (Sign::Plus, Sign::Minus),
    (Sign::Minus, Sign::Plus),
    (Sign::Minus, Sign::Minus),
];

/// Joint distribution from masses ordered (+,+), (+,−), (−,+), (−,−).
pub fn joint_from_masses(masses: [f64; 4]) -> Result<JointDistribution, ProbError> {
    FiniteDistribution::new(JOINT_OUTCOMES.to_vec(), masses.to_vec())
}

/// E[a·b] under a joint distribution.
pub fn product_expectation(joint: &JointDistribution) -> f64 {
    joint
        .iter()
        .map(|((a, b), p)| p * f64::from(a.value() * b.value()))
        .sum()
}

/// Anything that assigns a joint (a, b) distribution to every setting pair.
pub trait JointModel {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution;

    fn correlator(&self, alice: Setting, bob: Setting) -> f64 {
        product_expectation(&self.joint(alice, bob))
    }
}

impl<T: JointModel + ?Sized> JointModel for &T {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        (**self).joint(alice, bob)
    }
}

impl<T: JointModel + ?Sized> JointModel for Box<T> {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        (**self).joint(alice, bob)
    }
}

/// A joint model given cell by cell, with no structure assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    cells: [JointDistribution; 4],
}

impl JointTable {
    /// `cells` are indexed like [`SETTING_PAIRS`].
    pub fn new(cells: [JointDistribution; 4]) -> Self {
        Self { cells }
    }

    /// Tabulates another model.
    pub fn of(model: &(impl JointModel + ?Sized)) -> Self {
        Self::new(SETTING_PAIRS.map(|(a, b)| model.joint(a, b)))
    }
}

impl JointModel for JointTable {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        self.cells[pair_index(alice, bob)].clone()
    }
}

/// ⟨a_r b_r⟩ + ⟨a_r b_g⟩ + ⟨a_g b_r⟩ − ⟨a_g b_g⟩.
pub fn chsh_of_model(model: &(impl JointModel + ?Sized)) -> f64 {
    SETTING_PAIRS
        .iter()
        .map(|&(a, b)| chsh_coefficient(a, b) * model.correlator(a, b))
        .sum()
}

/// P(outcome | setting) for one side under one hidden state.
pub type LocalResponse = ConditionalTable<Setting, Sign>;

/// Response with P(+1|red) = `p_plus_red` and P(+1|green) = `p_plus_green`.
pub fn local_response(p_plus_red: f64, p_plus_green: f64) -> Result<LocalResponse, ProbError> {
    let row = |p: f64| FiniteDistribution::new(Sign::ALL.to_vec(), vec![p, 1.0 - p]);
    ConditionalTable::new(vec![(Setting::Red, row(p_plus_red)?), (Setting::Green, row(p_plus_green)?)])
}

pub fn deterministic_response(red: Sign, green: Sign) -> LocalResponse {
    let p = |s: Sign| if s == Sign::Plus { 1.0 } else { 0.0 };
    local_response(p(red), p(green)).expect("point masses are valid")
}

fn check_response(r: &LocalResponse) -> Result<(), ModelError> {
    let ok = Setting::ALL.iter().all(|s| r.row(s).is_some())
        && r.conditions().len() == 2
        && r.outcomes().len() == 2
        && Sign::ALL.iter().all(|s| r.outcomes().contains(s));
    if ok {
        Ok(())
    } else {
        Err(ModelError::Shape(
            "responses must cover both settings and both signs".into(),
        ))
    }
}

/// Numbers printed on the red and green marbles of a box pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DeterministicStrategy {
    pub a_r: Sign,
    pub a_g: Sign,
    pub b_r: Sign,
    pub b_g: Sign,
}

impl DeterministicStrategy {
    pub fn alice(&self, setting: Setting) -> Sign {
        match setting {
            Setting::Red => self.a_r,
            Setting::Green => self.a_g,
        }
    }

    pub fn bob(&self, setting: Setting) -> Sign {
        match setting {
            Setting::Red => self.b_r,
            Setting::Green => self.b_g,
        }
    }

    /// a_r(b_r + b_g) + a_g(b_r − b_g), in exact integer arithmetic.
    pub fn f_value(&self) -> i32 {
        let (a_r, a_g, b_r, b_g) = (self.a_r.value(), self.a_g.value(), self.b_r.value(), self.b_g.value());
        a_r * (b_r + b_g) + a_g * (b_r - b_g)
    }

    /// Compact label in a_r a_g b_r b_g order, e.g. `++-+`.
    pub fn label(&self) -> String {
        [self.a_r, self.a_g, self.b_r, self.b_g]
            .iter()
            .map(|s| if *s == Sign::Plus { '+' } else { '-' })
            .collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            a_r: self.a_r.flip(),
            a_g: self.a_g.flip(),
            b_r: self.b_r,
            b_g: self.b_g,
        }
    }
}

impl JointModel for DeterministicStrategy {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        let hit = (self.alice(alice), self.bob(bob));
        joint_from_masses(JOINT_OUTCOMES.map(|o| if o == hit { 1.0 } else { 0.0 })).expect("point mass")
    }
}

/// All 16 sign assignments.
pub fn enumerate_deterministic() -> Vec<DeterministicStrategy> {
    let mut out = Vec::with_capacity(16);
    for a_r in Sign::ALL {
        for a_g in Sign::ALL {
            for b_r in Sign::ALL {
                for b_g in Sign::ALL {
                    out.push(DeterministicStrategy { a_r, a_g, b_r, b_g });
                }
            }
        }
    }
    out
}

/// Largest F attained by any deterministic strategy (= 2).
pub fn lhv_chsh_max() -> f64 {
    enumerate_deterministic()
        .iter()
        .map(chsh_of_model)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Hidden-variable model: prior over λ and per-side local responses.
///
/// Without `setting_dependent_prior` the model is local and statistically
/// independent of the settings. With it, the model can describe a source that
/// correlates λ with the button presses (superdeterminism); [`lhv_joint`]
/// still uses the unconditional prior, while [`LhvModel::hv_joint`] uses the
/// setting-conditioned one.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvModel {
    hidden_prior: FiniteDistribution<String>,
    /// Aligned with `hidden_prior.support()`.
    response_a: Vec<LocalResponse>,
    response_b: Vec<LocalResponse>,
    setting_dependent_prior: Option<[FiniteDistribution<String>; 4]>,
}

impl LhvModel {
    /// `responses[i]` is (Alice, Bob) under the i-th label of `hidden_prior`.
    pub fn new(
        hidden_prior: FiniteDistribution<String>,
        responses: Vec<(LocalResponse, LocalResponse)>,
    ) -> Result<Self, ModelError> {
        if responses.len() != hidden_prior.len() {
            return Err(ModelError::Shape(format!(
                "{} hidden states but {} responses",
                hidden_prior.len(),
                responses.len()
            )));
        }
        for (a, b) in &responses {
            check_response(a)?;
            check_response(b)?;
        }
        let (response_a, response_b) = responses.into_iter().unzip();
        Ok(Self {
            hidden_prior,
            response_a,
            response_b,
            setting_dependent_prior: None,
        })
    }

    /// Mixture of deterministic strategies, one hidden state per strategy.
    pub fn from_strategies(weights: &FiniteDistribution<DeterministicStrategy>) -> Self {
        let prior = weights.map(|s| s.label());
        let responses = prior
            .support()
            .iter()
            .map(|label| {
                let s = weights
                    .support()
                    .iter()
                    .find(|s| s.label() == *label)
                    .expect("label comes from a strategy");
                (deterministic_response(s.a_r, s.a_g), deterministic_response(s.b_r, s.b_g))
            })
            .collect();
        Self::new(prior, responses).expect("deterministic responses are well formed")
    }

    /// P(λ|A,B) per setting pair, indexed like [`SETTING_PAIRS`].
    pub fn with_setting_dependent_prior(mut self, priors: [FiniteDistribution<String>; 4]) -> Result<Self, ModelError> {
        if priors.iter().any(|p| !p.same_support(&self.hidden_prior)) {
            return Err(ModelError::Shape(
                "setting-dependent priors must range over the hidden states".into(),
            ));
        }
        self.setting_dependent_prior = Some(priors);
        Ok(self)
    }

    pub fn hidden_prior(&self) -> &FiniteDistribution<String> {
        &self.hidden_prior
    }

    pub fn setting_dependent_prior(&self) -> Option<&[FiniteDistribution<String>; 4]> {
        self.setting_dependent_prior.as_ref()
    }

    pub fn response_a(&self, index: usize) -> &LocalResponse {
        &self.response_a[index]
    }

    pub fn response_b(&self, index: usize) -> &LocalResponse {
        &self.response_b[index]
    }

    fn factorized_joint(&self, prior: &FiniteDistribution<String>, alice: Setting, bob: Setting) -> JointDistribution {
        let mut masses = [0.0; 4];
        for (label, p_lambda) in prior.iter() {
            let i = self.hidden_prior.index_of(label).expect("priors share the hidden support");
            let ra = self.response_a[i].row(&alice).expect("validated response");
            let rb = self.response_b[i].row(&bob).expect("validated response");
            for (slot, (a, b)) in masses.iter_mut().zip(JOINT_OUTCOMES) {
                *slot += p_lambda * ra.prob(&a) * rb.prob(&b);
            }
        }
        joint_from_masses(masses).expect("factorized joint is normalized")
    }

    /// Σ_λ P(λ)·P(a|A;λ)·P(b|B;λ), always with the unconditional prior.
    pub fn lhv_joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        self.factorized_joint(&self.hidden_prior, alice, bob)
    }

    /// The operational joint Σ_λ P(λ|A,B)·P(a|A;λ)·P(b|B;λ).
    pub fn hv_joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        match &self.setting_dependent_prior {
            Some(priors) => self.factorized_joint(&priors[pair_index(alice, bob)], alice, bob),
            None => self.lhv_joint(alice, bob),
        }
    }

    /// Draws λ (from the setting-conditioned prior when present), then each
    /// side's outcome from its own local response.
    pub fn sample_pair<R: Rng + ?Sized>(&self, alice: Setting, bob: Setting, rng: &mut R) -> JointOutcome {
        let prior = match &self.setting_dependent_prior {
            Some(priors) => &priors[pair_index(alice, bob)],
            None => &self.hidden_prior,
        };
        let label = prior.sample(rng);
        let i = self.hidden_prior.index_of(label).expect("priors share the hidden support");
        let a = *self.response_a[i].row(&alice).expect("validated response").sample(rng);
        let b = *self.response_b[i].row(&bob).expect("validated response").sample(rng);
        (a, b)
    }

    /// View of this model that uses the setting-conditioned prior.
    pub fn operational(&self) -> OperationalHv<'_> {
        OperationalHv(self)
    }
}

impl JointModel for LhvModel {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        self.lhv_joint(alice, bob)
    }
}

/// [`JointModel`] over [`LhvModel::hv_joint`].
#[derive(Debug, Clone, Copy)]
pub struct OperationalHv<'a>(pub &'a LhvModel);

impl JointModel for OperationalHv<'_> {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        self.0.hv_joint(alice, bob)
    }
}

pub fn lhv_joint(model: &LhvModel, alice: Setting, bob: Setting) -> JointDistribution {
    model.lhv_joint(alice, bob)
}

/// A "marble factory" that knows which buttons will be pressed.
///
/// Hidden states are the 16 deterministic strategies with a uniform
/// unconditional prior. For each setting pair the factory prints marbles so
/// that the observed outcome (a, b) has exactly the probability `target`
/// assigns it, using the strategy whose pressed marbles read (a, b) and whose
/// unpressed marbles read +1. Responses stay local; only statistical
/// independence fails.
pub fn superdeterministic_factory(target: &(impl JointModel + ?Sized)) -> LhvModel {
    let strategies = enumerate_deterministic();
    let base = LhvModel::from_strategies(&FiniteDistribution::uniform(strategies.clone()).expect("16 strategies"));
    let labels: Vec<String> = base.hidden_prior().support().to_vec();
    let priors = SETTING_PAIRS.map(|(sa, sb)| {
        let joint = target.joint(sa, sb);
        let mut weights = vec![0.0; labels.len()];
        for ((a, b), p) in joint.iter() {
            let mut s = DeterministicStrategy {
                a_r: Sign::Plus,
                a_g: Sign::Plus,
                b_r: Sign::Plus,
                b_g: Sign::Plus,
            };
            match sa {
                Setting::Red => s.a_r = *a,
                Setting::Green => s.a_g = *a,
            }
            match sb {
                Setting::Red => s.b_r = *b,
                Setting::Green => s.b_g = *b,
            }
            let i = labels.iter().position(|l| *l == s.label()).expect("all strategies present");
            weights[i] += p;
        }
        FiniteDistribution::normalize(&weights, labels.clone()).expect("target joint is normalized")
    });
    base.with_setting_dependent_prior(priors).expect("same hidden support")
}

/// True iff λ is independent of the settings (within [`MODEL_TOL`]).
pub fn check_statistical_independence(model: &LhvModel) -> bool {
    match model.setting_dependent_prior() {
        None => true,
        Some(priors) => priors.iter().all(|p| {
            p.max_abs_diff(model.hidden_prior())
                .is_some_and(|d| d <= MODEL_TOL)
        }),
    }
}

/// Largest change in either side's marginal caused by the other side's setting.
pub fn signalling_gap(model: &(impl JointModel + ?Sized)) -> f64 {
    let mut gap: f64 = 0.0;
    for own in Setting::ALL {
        let a_red = model.joint(own, Setting::Red).map(|(a, _)| *a);
        let a_green = model.joint(own, Setting::Green).map(|(a, _)| *a);
        let b_red = model.joint(Setting::Red, own).map(|(_, b)| *b);
        let b_green = model.joint(Setting::Green, own).map(|(_, b)| *b);
        for s in Sign::ALL {
            gap = gap.max((a_red.prob(&s) - a_green.prob(&s)).abs());
            gap = gap.max((b_red.prob(&s) - b_green.prob(&s)).abs());
        }
    }
    gap
}

/// True iff neither side's outcome marginal depends on the other side's setting.
pub fn check_no_signalling(model: &(impl JointModel + ?Sized)) -> bool {
    signalling_gap(model) <= MODEL_TOL
}

/// Causal hypotheses for two agents whose outcomes lie outside each other's
/// causal influence: Σ_K P(K)·P(a|A;K)·P(b|B;K).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAgentHypotheses<S, V> {
    prior: FiniteDistribution<String>,
    alice: Vec<ConditionalTable<S, V>>,
    bob: Vec<ConditionalTable<S, V>>,
}

impl<S: Label, V: Label> TwoAgentHypotheses<S, V> {
    /// `responses[i]` is (Alice's table, Bob's table) under the i-th hypothesis.
    pub fn new(
        prior: FiniteDistribution<String>,
        responses: Vec<(ConditionalTable<S, V>, ConditionalTable<S, V>)>,
    ) -> Result<Self, ModelError> {
        if responses.len() != prior.len() {
            return Err(ModelError::Shape(format!(
                "{} hypotheses but {} response pairs",
                prior.len(),
                responses.len()
            )));
        }
        let (alice, bob) = responses.into_iter().unzip();
        Ok(Self { prior, alice, bob })
    }

    pub fn two_agent_causal_joint(&self, alice_action: &S, bob_action: &S) -> Result<FiniteDistribution<(V, V)>, ProbError> {
        let a_out = self.alice[0].outcomes().to_vec();
        let b_out = self.bob[0].outcomes().to_vec();
        let mut support = Vec::with_capacity(a_out.len() * b_out.len());
        let mut mass = Vec::with_capacity(a_out.len() * b_out.len());
        for a in &a_out {
            for b in &b_out {
                let mut m = 0.0;
                for ((_, p), (ta, tb)) in self.prior.iter().zip(self.alice.iter().zip(&self.bob)) {
                    m += p * ta.try_row(alice_action)?.prob(a) * tb.try_row(bob_action)?.prob(b);
                }
                support.push((a.clone(), b.clone()));
                mass.push(m);
            }
        }
        FiniteDistribution::new(support, mass)
    }
}

impl From<&LhvModel> for TwoAgentHypotheses<Setting, Sign> {
    fn from(model: &LhvModel) -> Self {
        Self {
            prior: model.hidden_prior.clone(),
            alice: model.response_a.clone(),
            bob: model.response_b.clone(),
        }
    }
}

pub fn two_agent_causal_joint<S: Label, V: Label>(
    hyps: &TwoAgentHypotheses<S, V>,
    alice_action: &S,
    bob_action: &S,
) -> Result<FiniteDistribution<(V, V)>, ProbError> {
    hyps.two_agent_causal_joint(alice_action, bob_action)
}

/// Credence ε on hypotheses whose causal probabilities take local form and
/// 1 − ε on hypotheses whose causal probabilities match the quantum ones.
#[derive(Debug, Clone)]
pub struct HypothesisMixture<Q> {
    epsilon: f64,
    pub lhv_component: LhvModel,
    pub quantum_component: Q,
}

impl<Q: JointModel> HypothesisMixture<Q> {
    pub fn new(epsilon: f64, lhv_component: LhvModel, quantum_component: Q) -> Result<Self, ModelError> {
        check_credence(epsilon)?;
        Ok(Self {
            epsilon,
            lhv_component,
            quantum_component,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// ε·(local term) + (1 − ε)·(quantum-compatible term).
    pub fn causal_joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        let weights = FiniteDistribution::new(vec![0, 1], vec![self.epsilon, 1.0 - self.epsilon])
            .expect("credence validated on construction");
        mix(
            &[self.lhv_component.lhv_joint(alice, bob), self.quantum_component.joint(alice, bob)],
            &weights,
        )
        .expect("both components range over the four joint outcomes")
    }
}

impl<Q: JointModel> JointModel for HypothesisMixture<Q> {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        self.causal_joint(alice, bob)
    }
}

pub fn mixture_causal_joint<Q: JointModel>(mix: &HypothesisMixture<Q>, alice: Setting, bob: Setting) -> JointDistribution {
    mix.causal_joint(alice, bob)
}

fn check_credence(epsilon: f64) -> Result<f64, ModelError> {
    if (0.0..=1.0).contains(&epsilon) {
        Ok(epsilon)
    } else {
        Err(ModelError::InvalidCredence(epsilon))
    }
}

/// Upper bound 2ε + 2√2(1 − ε) on the causal expectation of F.
pub fn mixture_chsh_bound(epsilon: f64) -> Result<f64, ModelError> {
    let e = check_credence(epsilon)?;
    Ok(LOCAL_BOUND * e + TSIRELSON_BOUND * (1.0 - e))
}

/// Credence ε* at which [`mixture_chsh_bound`] equals `threshold`:
/// (2√2 − T)/(2√2 − 2). Below ε* the bound exceeds T.
pub fn break_even_credence(threshold: f64) -> f64 {
    (TSIRELSON_BOUND - threshold) / (TSIRELSON_BOUND - LOCAL_BOUND)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_strategies_all_f_plus_minus_two() {
        let all = enumerate_deterministic();
        assert_eq!(all.len(), 16);
        let mut labels: Vec<_> = all.iter().map(|s| s.label()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 16);
        for s in &all {
            assert_eq!(s.f_value().abs(), 2);
            assert_eq!(chsh_of_model(s), f64::from(s.f_value()));
        }
        assert_eq!(lhv_chsh_max(), 2.0);
    }

    #[test]
    fn named_strategies() {
        let p = Sign::Plus;
        let m = Sign::Minus;
        let all_plus = DeterministicStrategy { a_r: p, a_g: p, b_r: p, b_g: p };
        assert_eq!(chsh_of_model(&all_plus), 2.0);
        let s = DeterministicStrategy { a_r: p, a_g: p, b_r: p, b_g: m };
        assert_eq!(chsh_of_model(&s), 2.0);
        assert_eq!(chsh_of_model(&s.negated()), -2.0);
    }

    #[test]
    fn lhv_joint_examples() {
        let one = LhvModel::new(
            FiniteDistribution::point("λ".to_string()),
            vec![(deterministic_response(Sign::Plus, Sign::Plus), deterministic_response(Sign::Minus, Sign::Minus))],
        )
        .unwrap();
        let j = one.lhv_joint(Setting::Red, Setting::Green);
        assert_eq!(j.prob(&(Sign::Plus, Sign::Minus)), 1.0);

        let correlated = LhvModel::new(
            FiniteDistribution::uniform(vec!["up".to_string(), "down".to_string()]).unwrap(),
            vec![
                (deterministic_response(Sign::Plus, Sign::Plus), deterministic_response(Sign::Plus, Sign::Plus)),
                (deterministic_response(Sign::Minus, Sign::Minus), deterministic_response(Sign::Minus, Sign::Minus)),
            ],
        )
        .unwrap();
        for (a, b) in SETTING_PAIRS {
            let j = correlated.lhv_joint(a, b);
            assert_eq!(j.prob(&(Sign::Plus, Sign::Plus)), 0.5);
            assert_eq!(j.prob(&(Sign::Minus, Sign::Minus)), 0.5);
        }
    }

    #[test]
    fn uniform_strategy_mixture_is_uniform_per_cell() {
        // Oracle: average the 16 point masses by hand.
        let all = enumerate_deterministic();
        for (a, b) in SETTING_PAIRS {
            let mut counts = [0usize; 4];
            for s in &all {
                let o = (s.alice(a), s.bob(b));
                counts[JOINT_OUTCOMES.iter().position(|x| *x == o).unwrap()] += 1;
            }
            assert_eq!(counts, [4, 4, 4, 4]);
        }
        let model = LhvModel::from_strategies(&FiniteDistribution::uniform(all.clone()).unwrap());
        let flat = mix(
            &all.iter().map(|s| s.joint(Setting::Green, Setting::Red)).collect::<Vec<_>>(),
            &FiniteDistribution::uniform((0..16).collect()).unwrap(),
        )
        .unwrap();
        for (a, b) in SETTING_PAIRS {
            for o in JOINT_OUTCOMES {
                assert!((model.lhv_joint(a, b).prob(&o) - 0.25).abs() < 1e-15);
            }
        }
        for o in JOINT_OUTCOMES {
            assert!((flat.prob(&o) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn statistical_independence_checks() {
        let all = enumerate_deterministic();
        let model = LhvModel::from_strategies(&FiniteDistribution::uniform(all).unwrap());
        assert!(check_statistical_independence(&model));

        let same = model.hidden_prior().clone();
        let explicit = model
            .clone()
            .with_setting_dependent_prior([same.clone(), same.clone(), same.clone(), same])
            .unwrap();
        assert!(check_statistical_independence(&explicit));

        let target = JointTable::new(SETTING_PAIRS.map(|(a, b)| {
            let c = chsh_coefficient(a, b);
            joint_from_masses([(1.0 + c) / 4.0, (1.0 - c) / 4.0, (1.0 - c) / 4.0, (1.0 + c) / 4.0]).unwrap()
        }));
        let factory = superdeterministic_factory(&target);
        assert!(!check_statistical_independence(&factory));
        // The factory reproduces the target cell by cell and reaches F = 4,
        // while the same hidden states with an unconditional prior stay at 0.
        assert!((chsh_of_model(&factory.operational()) - 4.0).abs() < 1e-12);
        assert!(chsh_of_model(&factory).abs() <= 2.0);
        assert!(check_no_signalling(&factory));
    }

    #[test]
    fn signalling_counterexample() {
        let cell = |p_plus: f64| joint_from_masses([p_plus / 2.0, p_plus / 2.0, (1.0 - p_plus) / 2.0, (1.0 - p_plus) / 2.0]).unwrap();
        let t = JointTable::new([cell(0.1), cell(0.9), cell(0.1), cell(0.9)]);
        assert!(!check_no_signalling(&t));
        assert!((signalling_gap(&t) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn mixture_bound_values() {
        assert!((mixture_chsh_bound(0.0).unwrap() - 2.828_427_124_746_19).abs() < 1e-12);
        assert_eq!(mixture_chsh_bound(1.0).unwrap(), 2.0);
        assert!((mixture_chsh_bound(0.1).unwrap() - 2.745_584_412_271_571).abs() < 1e-12);
        assert_eq!(mixture_chsh_bound(1.5), Err(ModelError::InvalidCredence(1.5)));
        assert!(mixture_chsh_bound(-0.01).is_err());
        assert!((break_even_credence(2.8) - 0.034_314_575_050_761_98).abs() < 1e-12);
    }

    #[test]
    fn two_agent_matches_lhv_on_shared_input() {
        let model = LhvModel::new(
            FiniteDistribution::new(vec!["x".into(), "y".into()], vec![0.3, 0.7]).unwrap(),
            vec![
                (local_response(0.2, 0.9).unwrap(), local_response(0.6, 0.1).unwrap()),
                (local_response(1.0, 0.5).unwrap(), local_response(0.0, 0.35).unwrap()),
            ],
        )
        .unwrap();
        let hyps = TwoAgentHypotheses::from(&model);
        for (a, b) in SETTING_PAIRS {
            let two = hyps.two_agent_causal_joint(&a, &b).unwrap();
            let lhv = model.lhv_joint(a, b);
            for o in JOINT_OUTCOMES {
                assert!((two.prob(&o) - lhv.prob(&o)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn response_shape_is_checked() {
        let bad = ConditionalTable::new(vec![(Setting::Red, FiniteDistribution::point(Sign::Plus))]).unwrap();
        let err = LhvModel::new(FiniteDistribution::point("λ".into()), vec![(bad.clone(), bad)]);
        assert!(matches!(err, Err(ModelError::Shape(_))));
    }
}
