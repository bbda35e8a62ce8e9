//! Ready-made decision problems: the two-box Newcomb problem, the smoking
//! gene, the million-box variant and the payoff table of the two-party
//! Newcomb game.
//!
//! Utilities are dollar amounts throughout.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::decision::{DecisionError, DecisionProblem, DependencyHypothesisSet};
use crate::prob::{ConditionalTable, FiniteDistribution, ProbError};

pub const MILLION: f64 = 1_000_000.0;
pub const THOUSAND: f64 = 1_000.0;

/// Scenario names accepted by [`by_name`].
pub const SCENARIO_NAMES: [&str; 3] = ["newcomb", "smoking-gene", "million-box"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid probability {name} = {value}: must lie in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("need at least 2 boxes, got {0}")]
    TooFewBoxes(u64),
    #[error("unknown scenario {0:?} (expected one of newcomb, smoking-gene, million-box)")]
    UnknownScenario(String),
    #[error("missing parameter {0}")]
    MissingParameter(&'static str),
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

impl From<ProbError> for ScenarioError {
    fn from(e: ProbError) -> Self {
        ScenarioError::Decision(e.into())
    }
}

/// A named problem plus a note on where each of its numbers comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub problem: DecisionProblem,
    pub notes: Vec<String>,
}

fn check_probability(name: &'static str, value: f64) -> Result<f64, ScenarioError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ScenarioError::InvalidProbability { name, value })
    }
}

fn s(x: &str) -> String {
    x.to_string()
}

fn binary(yes: &str, no: &str, p: f64) -> Result<FiniteDistribution<String>, ProbError> {
    FiniteDistribution::new(vec![s(yes), s(no)], vec![p, 1.0 - p])
}

/// Binary-outcome problem where each hypothesis fixes the outcome outright and
/// the action-conditioned hypothesis prior equals the evidential table.
struct FixedOutcomeProblem<'a> {
    actions: [&'a str; 2],
    outcomes: [&'a str; 2],
    hypotheses: [&'a str; 2],
    utility: [[f64; 2]; 2],
    evidential: [f64; 2],
    prior: f64,
}

impl FixedOutcomeProblem<'_> {
    fn build(&self) -> Result<DecisionProblem, ScenarioError> {
        let [a1, a2] = self.actions;
        let [yes, no] = self.outcomes;
        let [k_yes, k_no] = self.hypotheses;
        let actions = vec![s(a1), s(a2)];
        let evidential = ConditionalTable::new(vec![
            (s(a1), binary(yes, no, self.evidential[0])?),
            (s(a2), binary(yes, no, self.evidential[1])?),
        ])?;
        let joint = ConditionalTable::new(vec![
            (s(a1), binary(k_yes, k_no, self.evidential[0])?),
            (s(a2), binary(k_yes, k_no, self.evidential[1])?),
        ])?;
        let hyps = DependencyHypothesisSet::new(
            binary(k_yes, k_no, self.prior)?,
            vec![
                (s(k_yes), ConditionalTable::constant(actions.clone(), binary(yes, no, 1.0)?)?),
                (s(k_no), ConditionalTable::constant(actions.clone(), binary(yes, no, 0.0)?)?),
            ],
            true,
        )?
        .with_joint_prior(joint)?;
        let problem = DecisionProblem::new(
            actions,
            vec![s(yes), s(no)],
            self.utility.iter().map(|r| r.to_vec()).collect(),
            evidential,
        )?
        .with_hypotheses(hyps)?;
        Ok(problem)
    }
}

/// Two-box Newcomb problem.
///
/// `p_one` = P(million | take only box 1), `p_two` = P(million | take both),
/// `prior_full` = the causal prior that the million is already in the box.
/// Actions are `A1` (box 1 only) and `A2` (both); outcomes `O1` (box 1 holds
/// the million) and `O2` (it is empty).
pub fn newcomb_classic(p_one: f64, p_two: f64, prior_full: f64) -> Result<ScenarioSpec, ScenarioError> {
    let p_one = check_probability("p1", p_one)?;
    let p_two = check_probability("p2", p_two)?;
    let prior_full = check_probability("prior", prior_full)?;
    let problem = FixedOutcomeProblem {
        actions: ["A1", "A2"],
        outcomes: ["O1", "O2"],
        hypotheses: ["full", "empty"],
        utility: [[MILLION, 0.0], [MILLION + THOUSAND, THOUSAND]],
        evidential: [p_one, p_two],
        prior: prior_full,
    }
    .build()?;
    Ok(ScenarioSpec {
        name: s("newcomb"),
        problem,
        notes: vec![
            s("u(A1,O1) = 1,000,000: the closed box holds a million when one-boxing was predicted"),
            s("u(A1,O2) = 0: the closed box is empty"),
            s("u(A2,O1) = 1,001,000 and u(A2,O2) = 1,000: the open box always adds a thousand"),
            format!("P(O1|A1) = {p_one}: predictor accuracy for one-boxers (caller supplied)"),
            format!("P(O1|A2) = {p_two}: predictor error for two-boxers (caller supplied)"),
            format!("P(full) = {prior_full}: causal prior on the box contents (caller supplied)"),
            s("hypotheses fix the box contents, so each outcome row is constant across actions"),
        ],
    })
}

/// The smoking-gene problem. `p_gene` is the causal prior P(G).
///
/// Actions `S` (smoke) and `¬S`; outcomes `C` (cancer) and `¬C`. The gene
/// fixes the outcome: P(C|·;G) = 1, P(C|·;¬G) = 0. The gene occurs in 20% of
/// smokers and 2% of non-smokers, which is exactly the evidential table.
pub fn smoking_gene(p_gene: f64) -> Result<ScenarioSpec, ScenarioError> {
    let p_gene = check_probability("p_gene", p_gene)?;
    let problem = FixedOutcomeProblem {
        actions: ["S", "¬S"],
        outcomes: ["C", "¬C"],
        hypotheses: ["G", "¬G"],
        utility: [[-99.0, 1.0], [-100.0, 0.0]],
        evidential: [0.2, 0.02],
        prior: p_gene,
    }
    .build()?;
    Ok(ScenarioSpec {
        name: s("smoking-gene"),
        problem,
        notes: vec![
            s("P(C|S) = 0.2, P(C|¬S) = 0.02: evidential conditional probabilities of cancer"),
            s("u(S,C) = -99, u(S,¬C) = 1, u(¬S,C) = -100, u(¬S,¬C) = 0: smoking is worth one unit"),
            s("P(G|S) = 0.2, P(G|¬S) = 0.02: gene frequency among smokers and non-smokers"),
            s("P(C|·;G) = 1, P(C|·;¬G) = 0: canonical completion of 'almost all bearers' / 'negligible'"),
            format!("P(G) = {p_gene}: free causal prior; the causal prescription does not depend on it"),
        ],
    })
}

/// Million closed boxes plus an open box holding a thousand.
///
/// Boxes are exchangeable, so the problem is reduced to a representative
/// pick: actions `closed` (one closed box only) and `closed+open`; outcomes
/// `match` (the million is in the picked box) and `miss`. The causal
/// hypotheses place the million uniformly at random, which after the
/// reduction is `picked` with prior 1/n and `elsewhere` otherwise.
/// `accuracy` is P(match | closed only); when the open box is also taken the
/// million was placed at random, so P(match | closed+open) = 1/n.
///
/// Costs O(1) in `n_boxes`. [`million_box_expanded`] builds the unreduced
/// problem for small n.
pub fn million_box(n_boxes: u64, accuracy: f64) -> Result<ScenarioSpec, ScenarioError> {
    if n_boxes < 2 {
        return Err(ScenarioError::TooFewBoxes(n_boxes));
    }
    let accuracy = check_probability("accuracy", accuracy)?;
    let uniform = 1.0 / n_boxes as f64;
    let problem = FixedOutcomeProblem {
        actions: ["closed", "closed+open"],
        outcomes: ["match", "miss"],
        hypotheses: ["picked", "elsewhere"],
        utility: [[MILLION, 0.0], [MILLION + THOUSAND, THOUSAND]],
        evidential: [accuracy, uniform],
        prior: uniform,
    }
    .build()?;
    Ok(ScenarioSpec {
        name: s("million-box"),
        problem,
        notes: vec![
            format!("{n_boxes} closed boxes, one of which holds 1,000,000; the open box holds 1,000"),
            format!("P(match|closed) = {accuracy}: predictor accuracy (caller supplied)"),
            format!("P(match|closed+open) = 1/{n_boxes}: the million was placed at random"),
            format!("causal prior P(picked) = 1/{n_boxes}: uniform over the million's location"),
            s("actions are reduced by box symmetry to a representative pick"),
        ],
    })
}

/// Unreduced million-box problem with one action per (box, open-box) choice
/// and one hypothesis per location of the million. Size is O(n²); meant for
/// small n, chiefly to check [`million_box`].
pub fn million_box_expanded(n_boxes: u64, accuracy: f64) -> Result<ScenarioSpec, ScenarioError> {
    if n_boxes < 2 {
        return Err(ScenarioError::TooFewBoxes(n_boxes));
    }
    let accuracy = check_probability("accuracy", accuracy)?;
    let n = n_boxes as usize;
    let locations: Vec<String> = (1..=n).map(|m| format!("million in {m}")).collect();
    let hyp_labels: Vec<String> = (1..=n).map(|m| format!("K{m}")).collect();
    let mut actions = Vec::with_capacity(2 * n);
    let mut utility = Vec::with_capacity(2 * n);
    let mut evidential_rows = Vec::with_capacity(2 * n);
    let mut joint_rows = Vec::with_capacity(2 * n);
    let miss = if n > 1 { (1.0 - accuracy) / (n - 1) as f64 } else { 0.0 };
    for k in 0..n {
        for with_open in [false, true] {
            let label = if with_open {
                format!("closed {}+open", k + 1)
            } else {
                format!("closed {}", k + 1)
            };
            let bonus = if with_open { THOUSAND } else { 0.0 };
            utility.push(
                (0..n)
                    .map(|m| if m == k { MILLION + bonus } else { bonus })
                    .collect::<Vec<_>>(),
            );
            let row: Vec<f64> = (0..n)
                .map(|m| match (with_open, m == k) {
                    (true, _) => 1.0 / n as f64,
                    (false, true) => accuracy,
                    (false, false) => miss,
                })
                .collect();
            evidential_rows.push((label.clone(), FiniteDistribution::new(locations.clone(), row.clone())?));
            joint_rows.push((label.clone(), FiniteDistribution::new(hyp_labels.clone(), row)?));
            actions.push(label);
        }
    }
    let tables = hyp_labels
        .iter()
        .zip(&locations)
        .map(|(k, loc)| {
            Ok((
                k.clone(),
                ConditionalTable::constant(actions.clone(), FiniteDistribution::normalize(
                    &locations.iter().map(|l| if l == loc { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
                    locations.clone(),
                )?)?,
            ))
        })
        .collect::<Result<Vec<_>, ProbError>>()?;
    let hyps = DependencyHypothesisSet::new(FiniteDistribution::uniform(hyp_labels)?, tables, true)?
        .with_joint_prior(ConditionalTable::new(joint_rows)?)?;
    let problem = DecisionProblem::new(actions, locations, utility, ConditionalTable::new(evidential_rows)?)?
        .with_hypotheses(hyps)?;
    Ok(ScenarioSpec {
        name: s("million-box-expanded"),
        problem,
        notes: vec![format!(
            "{n_boxes} boxes enumerated explicitly; accuracy {accuracy} (caller supplied)"
        )],
    })
}

/// Payoffs of the two-party Newcomb game, keyed by (Alice's act, Bob's prediction).
///
/// `a1` = Alice takes box 1, `a2` = Alice takes both; `b1` = Bob predicted
/// `a1`, `b2` = Bob predicted `a2`.
pub fn marble_game_payoffs() -> BTreeMap<(String, String), f64> {
    BTreeMap::from([
        ((s("a1"), s("b1")), MILLION),
        ((s("a1"), s("b2")), 0.0),
        ((s("a2"), s("b1")), MILLION + THOUSAND),
        ((s("a2"), s("b2")), THOUSAND),
    ])
}

/// Named parameters for [`by_name`]; `None` falls back to the documented default.
#[derive(Debug, Clone, Default)]
pub struct ScenarioParams {
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub prior: Option<f64>,
    pub p_gene: Option<f64>,
    pub boxes: Option<u64>,
    pub accuracy: Option<f64>,
}

/// Default causal prior P(G) for the smoking gene, and P(full) for Newcomb.
pub const DEFAULT_PRIOR: f64 = 0.5;
pub const DEFAULT_BOXES: u64 = 1_000_000;

/// Looks a scenario up by name. Predictor accuracies are never defaulted.
pub fn by_name(name: &str, params: &ScenarioParams) -> Result<ScenarioSpec, ScenarioError> {
    match name {
        "newcomb" => newcomb_classic(
            params.p1.ok_or(ScenarioError::MissingParameter("p1"))?,
            params.p2.ok_or(ScenarioError::MissingParameter("p2"))?,
            params.prior.unwrap_or(DEFAULT_PRIOR),
        ),
        "smoking-gene" => smoking_gene(params.p_gene.unwrap_or(DEFAULT_PRIOR)),
        "million-box" => million_box(
            params.boxes.unwrap_or(DEFAULT_BOXES),
            params.accuracy.ok_or(ScenarioError::MissingParameter("accuracy"))?,
        ),
        other => Err(ScenarioError::UnknownScenario(other.to_string())),
    }
}
