//! Evidential and causal expected utility over finite decision problems.
//!
//! A [`DecisionProblem`] carries the agent's evidential table P(O|A) and,
//! optionally, a [`DependencyHypothesisSet`]: a prior over hypotheses K
//! together with P(O|A;K) for each of them. Evidential expected utility
//! weighs outcomes by P(O|A). Causal expected utility weighs them by the
//! causal probability Σ_K P(K)·P(O|A;K), which deliberately ignores any
//! correlation between the hypotheses and the action being contemplated.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::prob::{ConditionalTable, FiniteDistribution, ProbError};

/// Resolution used for argmax ties and screening checks.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecisionError {
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("unknown outcome {0}")]
    UnknownOutcome(String),
    #[error("unknown hypothesis {0}")]
    UnknownHypothesis(String),
    #[error("problem has no dependency hypotheses")]
    NoHypotheses,
    #[error("hypothesis set has no joint prior P(K|A)")]
    NoJointPrior,
    #[error("malformed problem: {0}")]
    Shape(String),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// Which expected utility an agent maximises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theory {
    /// Bayesian/evidential decision theory.
    #[serde(rename = "BDT")]
    Bdt,
    /// Causal decision theory.
    #[serde(rename = "CDT")]
    Cdt,
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::Bdt => "BDT",
            Theory::Cdt => "CDT",
        })
    }
}

/// Prior over dependency hypotheses and the outcome table under each one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyHypothesisSet {
    prior: FiniteDistribution<String>,
    /// Aligned with `prior.support()`.
    tables: Vec<ConditionalTable<String, String>>,
    outside_influence: bool,
    joint_prior_given_action: Option<ConditionalTable<String, String>>,
}

/// One failure of screening: the outcome row under `hypothesis` moves with the action.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningViolation {
    pub hypothesis: String,
    /// Outcome with the largest discrepancy between the two actions.
    pub outcome: String,
    pub actions: (String, String),
    pub deviation: f64,
}

impl DependencyHypothesisSet {
    /// `tables` maps each hypothesis label in `prior` to P(O|A;K).
    ///
    /// `outside_influence` declares that the outcome variable lies outside the
    /// agent's causal influence. It is a claim, not a construction check: use
    /// [`validate_screening`](Self::validate_screening) to test it.
    pub fn new(
        prior: FiniteDistribution<String>,
        tables: Vec<(String, ConditionalTable<String, String>)>,
        outside_influence: bool,
    ) -> Result<Self, DecisionError> {
        if tables.len() != prior.len() {
            return Err(DecisionError::Shape(format!(
                "{} hypotheses in prior but {} tables",
                prior.len(),
                tables.len()
            )));
        }
        let mut aligned = Vec::with_capacity(prior.len());
        for k in prior.support() {
            let table = tables
                .iter()
                .find(|(label, _)| label == k)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| DecisionError::UnknownHypothesis(k.clone()))?;
            aligned.push(table);
        }
        let first = &aligned[0];
        for t in &aligned[1..] {
            if !same_set(t.conditions(), first.conditions()) || !same_set(t.outcomes(), first.outcomes()) {
                return Err(DecisionError::Shape(
                    "hypothesis tables disagree on actions or outcomes".into(),
                ));
            }
        }
        Ok(Self {
            prior,
            tables: aligned,
            outside_influence,
            joint_prior_given_action: None,
        })
    }

    /// Attaches P(K|A), whose rows are indexed by action and range over hypotheses.
    pub fn with_joint_prior(mut self, joint: ConditionalTable<String, String>) -> Result<Self, DecisionError> {
        if !same_set(joint.conditions(), self.actions()) {
            return Err(DecisionError::Shape(
                "joint prior conditions must be the actions".into(),
            ));
        }
        if !same_set(joint.outcomes(), self.prior.support()) {
            return Err(DecisionError::Shape(
                "joint prior must range over the hypothesis labels".into(),
            ));
        }
        self.joint_prior_given_action = Some(joint);
        Ok(self)
    }

    pub fn prior(&self) -> &FiniteDistribution<String> {
        &self.prior
    }

    pub fn outside_influence(&self) -> bool {
        self.outside_influence
    }

    pub fn joint_prior_given_action(&self) -> Option<&ConditionalTable<String, String>> {
        self.joint_prior_given_action.as_ref()
    }

    pub fn actions(&self) -> &[String] {
        self.tables[0].conditions()
    }

    pub fn outcomes(&self) -> &[String] {
        self.tables[0].outcomes()
    }

    pub fn table(&self, hypothesis: &str) -> Option<&ConditionalTable<String, String>> {
        self.prior
            .support()
            .iter()
            .position(|k| k == hypothesis)
            .map(|i| &self.tables[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, f64, &ConditionalTable<String, String>)> {
        self.prior.iter().zip(&self.tables).map(|((k, p), t)| (k, p, t))
    }

    fn check_labels(&self, action: &str, outcome: &str) -> Result<(), DecisionError> {
        if !self.actions().iter().any(|a| a == action) {
            return Err(DecisionError::UnknownAction(action.to_string()));
        }
        if !self.outcomes().iter().any(|o| o == outcome) {
            return Err(DecisionError::UnknownOutcome(outcome.to_string()));
        }
        Ok(())
    }

    /// P_c(O|A) = Σ_K P(K)·P(O|A;K), with the unconditional prior.
    pub fn causal_probability(&self, action: &str, outcome: &str) -> Result<f64, DecisionError> {
        self.check_labels(action, outcome)?;
        let (a, o) = (action.to_string(), outcome.to_string());
        Ok(self
            .iter()
            .map(|(_, p, t)| p * t.prob(&a, &o).unwrap_or(0.0))
            .sum())
    }

    /// Σ_K P(K|A)·P(O|A;K): the evidential probability the hypotheses imply.
    pub fn evidential_mixture(&self, action: &str, outcome: &str) -> Result<f64, DecisionError> {
        self.check_labels(action, outcome)?;
        let joint = self
            .joint_prior_given_action
            .as_ref()
            .ok_or(DecisionError::NoJointPrior)?;
        let (a, o) = (action.to_string(), outcome.to_string());
        let row = joint.try_row(&a)?;
        Ok(self
            .iter()
            .map(|(k, _, t)| row.prob(k) * t.prob(&a, &o).unwrap_or(0.0))
            .sum())
    }

    /// Every (hypothesis, action pair) whose outcome rows differ by more than
    /// [`TIE_TOL`]. An empty list means the hypotheses screen the outcomes off
    /// from the action.
    pub fn validate_screening(&self) -> Vec<ScreeningViolation> {
        let mut violations = Vec::new();
        for (k, _, table) in self.iter() {
            let conds = table.conditions();
            for i in 0..conds.len() {
                for j in (i + 1)..conds.len() {
                    let (ri, rj) = (table.try_row(&conds[i]), table.try_row(&conds[j]));
                    let (Ok(ri), Ok(rj)) = (ri, rj) else { continue };
                    let worst = table
                        .outcomes()
                        .iter()
                        .map(|o| (o, (ri.prob(o) - rj.prob(o)).abs()))
                        .fold(None::<(&String, f64)>, |best, cur| match best {
                            Some(b) if b.1 >= cur.1 => Some(b),
                            _ => Some(cur),
                        });
                    if let Some((outcome, deviation)) = worst {
                        if deviation > TIE_TOL {
                            violations.push(ScreeningViolation {
                                hypothesis: k.clone(),
                                outcome: outcome.clone(),
                                actions: (conds[i].clone(), conds[j].clone()),
                                deviation,
                            });
                        }
                    }
                }
            }
        }
        violations
    }
}

/// Free-function form of [`DependencyHypothesisSet::causal_probability`].
pub fn causal_probability(
    hyps: &DependencyHypothesisSet,
    action: &str,
    outcome: &str,
) -> Result<f64, DecisionError> {
    hyps.causal_probability(action, outcome)
}

/// Free-function form of [`DependencyHypothesisSet::validate_screening`].
pub fn validate_screening(hyps: &DependencyHypothesisSet) -> Vec<ScreeningViolation> {
    hyps.validate_screening()
}

/// Argmax of an expected-utility map, ties included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prescription {
    pub theory: Theory,
    /// In action order.
    pub best_actions: Vec<String>,
    pub values: Vec<(String, f64)>,
}

impl Prescription {
    fn from_values(theory: Theory, values: Vec<(String, f64)>) -> Self {
        let max = values
            .iter()
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        let best_actions = values
            .iter()
            .filter(|(_, v)| max - v <= TIE_TOL)
            .map(|(a, _)| a.clone())
            .collect();
        Self {
            theory,
            best_actions,
            values,
        }
    }

    /// Lexicographically first best action, for consumers that need exactly one.
    pub fn chosen(&self) -> &str {
        self.best_actions
            .iter()
            .min()
            .map(String::as_str)
            .expect("prescription always has a best action")
    }

    pub fn value_of(&self, action: &str) -> Option<f64> {
        self.values.iter().find(|(a, _)| a == action).map(|(_, v)| *v)
    }

    /// Same best actions, irrespective of order.
    pub fn agrees_with(&self, other: &Prescription) -> bool {
        same_set(&self.best_actions, &other.best_actions)
    }
}

/// Actions, outcomes, utilities u(A,O), evidential P(O|A) and optional hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionProblem {
    actions: Vec<String>,
    outcomes: Vec<String>,
    /// `utility[i][j]` = u(actions[i], outcomes[j]).
    utility: Vec<Vec<f64>>,
    evidential: ConditionalTable<String, String>,
    hypotheses: Option<DependencyHypothesisSet>,
}

impl DecisionProblem {
    pub fn new(
        actions: Vec<String>,
        outcomes: Vec<String>,
        utility: Vec<Vec<f64>>,
        evidential: ConditionalTable<String, String>,
    ) -> Result<Self, DecisionError> {
        if actions.is_empty() || outcomes.is_empty() {
            return Err(DecisionError::Shape("need at least one action and outcome".into()));
        }
        if utility.len() != actions.len() || utility.iter().any(|row| row.len() != outcomes.len()) {
            return Err(DecisionError::Shape(format!(
                "utility must be {}x{}",
                actions.len(),
                outcomes.len()
            )));
        }
        if utility.iter().flatten().any(|u| !u.is_finite()) {
            return Err(DecisionError::Shape("utilities must be finite".into()));
        }
        if !same_set(evidential.conditions(), &actions) {
            return Err(DecisionError::Shape(
                "evidential table conditions must match the actions".into(),
            ));
        }
        if !same_set(evidential.outcomes(), &outcomes) {
            return Err(DecisionError::Shape(
                "evidential table outcomes must match the outcomes".into(),
            ));
        }
        Ok(Self {
            actions,
            outcomes,
            utility,
            evidential,
            hypotheses: None,
        })
    }

    pub fn with_hypotheses(mut self, hyps: DependencyHypothesisSet) -> Result<Self, DecisionError> {
        if !same_set(hyps.actions(), &self.actions) || !same_set(hyps.outcomes(), &self.outcomes) {
            return Err(DecisionError::Shape(
                "hypothesis tables must share the problem's actions and outcomes".into(),
            ));
        }
        self.hypotheses = Some(hyps);
        Ok(self)
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn evidential(&self) -> &ConditionalTable<String, String> {
        &self.evidential
    }

    pub fn hypotheses(&self) -> Option<&DependencyHypothesisSet> {
        self.hypotheses.as_ref()
    }

    pub fn utility(&self, action: &str, outcome: &str) -> Result<f64, DecisionError> {
        let i = self.action_index(action)?;
        let j = self
            .outcomes
            .iter()
            .position(|o| o == outcome)
            .ok_or_else(|| DecisionError::UnknownOutcome(outcome.to_string()))?;
        Ok(self.utility[i][j])
    }

    /// Copy of the problem with every utility passed through `f`.
    pub fn map_utilities(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for u in out.utility.iter_mut().flatten() {
            *u = f(*u);
        }
        out
    }

    fn action_index(&self, action: &str) -> Result<usize, DecisionError> {
        self.actions
            .iter()
            .position(|a| a == action)
            .ok_or_else(|| DecisionError::UnknownAction(action.to_string()))
    }

    /// EU(A) = Σ_j P(O_j|A)·u(A,O_j).
    pub fn evidential_eu(&self, action: &str) -> Result<f64, DecisionError> {
        let i = self.action_index(action)?;
        let row = self.evidential.try_row(&self.actions[i])?;
        Ok(self
            .outcomes
            .iter()
            .zip(&self.utility[i])
            .map(|(o, u)| row.prob(o) * u)
            .sum())
    }

    /// CEU(A) = Σ_j P_c(O_j|A)·u(A,O_j).
    pub fn causal_eu(&self, action: &str) -> Result<f64, DecisionError> {
        let hyps = self.hypotheses.as_ref().ok_or(DecisionError::NoHypotheses)?;
        let i = self.action_index(action)?;
        self.outcomes
            .iter()
            .zip(&self.utility[i])
            .try_fold(0.0, |acc, (o, u)| Ok(acc + hyps.causal_probability(action, o)? * u))
    }

    pub fn expected_utility(&self, theory: Theory, action: &str) -> Result<f64, DecisionError> {
        match theory {
            Theory::Bdt => self.evidential_eu(action),
            Theory::Cdt => self.causal_eu(action),
        }
    }

    /// max over (A,O) of |P(O|A) − Σ_K P(K|A)·P(O|A;K)|.
    ///
    /// Zero when the evidential table is exactly what the hypotheses and the
    /// action-conditioned prior imply.
    pub fn evidential_decomposition_residual(&self) -> Result<f64, DecisionError> {
        let hyps = self.hypotheses.as_ref().ok_or(DecisionError::NoHypotheses)?;
        if hyps.joint_prior_given_action.is_none() {
            return Err(DecisionError::NoJointPrior);
        }
        let mut worst: f64 = 0.0;
        for a in &self.actions {
            let row = self.evidential.try_row(a)?;
            for o in &self.outcomes {
                let implied = hyps.evidential_mixture(a, o)?;
                worst = worst.max((row.prob(o) - implied).abs());
            }
        }
        Ok(worst)
    }

    pub fn prescribe(&self, theory: Theory) -> Result<Prescription, DecisionError> {
        let values = self
            .actions
            .iter()
            .map(|a| Ok((a.clone(), self.expected_utility(theory, a)?)))
            .collect::<Result<Vec<_>, DecisionError>>()?;
        Ok(Prescription::from_values(theory, values))
    }

    /// True when the BDT and CDT argmax sets differ.
    pub fn is_newcomb_type(&self) -> Result<bool, DecisionError> {
        let bdt = self.prescribe(Theory::Bdt)?;
        let cdt = self.prescribe(Theory::Cdt)?;
        Ok(!bdt.agrees_with(&cdt))
    }
}

fn same_set<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn dist(pairs: &[(&str, f64)]) -> FiniteDistribution<String> {
        FiniteDistribution::new(
            pairs.iter().map(|(l, _)| s(l)).collect(),
            pairs.iter().map(|(_, m)| *m).collect(),
        )
        .unwrap()
    }

    fn table(rows: &[(&str, &[(&str, f64)])]) -> ConditionalTable<String, String> {
        ConditionalTable::new(rows.iter().map(|(c, r)| (s(c), dist(r))).collect()).unwrap()
    }

    /// Two actions, one binary outcome; hypotheses fix the outcome.
    fn toy(p_k: f64, evidential: [f64; 2]) -> DecisionProblem {
        let ev = table(&[
            ("a1", &[("o", evidential[0]), ("¬o", 1.0 - evidential[0])]),
            ("a2", &[("o", evidential[1]), ("¬o", 1.0 - evidential[1])]),
        ]);
        let hyps = DependencyHypothesisSet::new(
            dist(&[("k", p_k), ("¬k", 1.0 - p_k)]),
            vec![
                (s("k"), table(&[("a1", &[("o", 1.0), ("¬o", 0.0)]), ("a2", &[("o", 1.0), ("¬o", 0.0)])])),
                (s("¬k"), table(&[("a1", &[("o", 0.0), ("¬o", 1.0)]), ("a2", &[("o", 0.0), ("¬o", 1.0)])])),
            ],
            true,
        )
        .unwrap();
        DecisionProblem::new(
            vec![s("a1"), s("a2")],
            vec![s("o"), s("¬o")],
            vec![vec![10.0, 0.0], vec![11.0, 1.0]],
            ev,
        )
        .unwrap()
        .with_hypotheses(hyps)
        .unwrap()
    }

    #[test]
    fn unknown_labels() {
        let p = toy(0.5, [0.9, 0.1]);
        assert_eq!(p.evidential_eu("a3"), Err(DecisionError::UnknownAction(s("a3"))));
        let h = p.hypotheses().unwrap();
        assert_eq!(h.causal_probability("a1", "x"), Err(DecisionError::UnknownOutcome(s("x"))));
        assert_eq!(h.causal_probability("zz", "o"), Err(DecisionError::UnknownAction(s("zz"))));
    }

    #[test]
    fn causal_eu_requires_hypotheses() {
        let ev = table(&[("a", &[("o", 1.0)])]);
        let p = DecisionProblem::new(vec![s("a")], vec![s("o")], vec![vec![1.0]], ev).unwrap();
        assert_eq!(p.causal_eu("a"), Err(DecisionError::NoHypotheses));
        assert_eq!(p.evidential_decomposition_residual(), Err(DecisionError::NoHypotheses));
        assert!(p.is_newcomb_type().is_err());
    }

    #[test]
    fn residual_requires_joint_prior() {
        let p = toy(0.5, [0.9, 0.1]);
        assert_eq!(p.evidential_decomposition_residual(), Err(DecisionError::NoJointPrior));
    }

    #[test]
    fn single_hypothesis_causal_probability_is_its_row() {
        let hyps = DependencyHypothesisSet::new(
            FiniteDistribution::point(s("only")),
            vec![(s("only"), table(&[("a1", &[("o", 0.3), ("¬o", 0.7)]), ("a2", &[("o", 0.6), ("¬o", 0.4)])]))],
            false,
        )
        .unwrap();
        assert_eq!(hyps.causal_probability("a1", "o").unwrap(), 0.3);
        assert_eq!(hyps.causal_probability("a2", "o").unwrap(), 0.6);
    }

    #[test]
    fn screening_counterexample_reports_one_violation() {
        let hyps = DependencyHypothesisSet::new(
            FiniteDistribution::point(s("K")),
            vec![(s("K"), table(&[("A1", &[("O", 1.0), ("¬O", 0.0)]), ("A2", &[("O", 0.0), ("¬O", 1.0)])]))],
            true,
        )
        .unwrap();
        let v = hyps.validate_screening();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].hypothesis, "K");
        assert_eq!(v[0].outcome, "O");
        assert_eq!(v[0].actions, (s("A1"), s("A2")));
        assert_eq!(v[0].deviation, 1.0);
    }

    #[test]
    fn constant_rows_are_screened() {
        assert!(toy(0.3, [0.9, 0.1]).hypotheses().unwrap().validate_screening().is_empty());
    }

    #[test]
    fn ties_are_reported_as_sets() {
        let ev = table(&[("b", &[("o", 1.0)]), ("a", &[("o", 1.0)])]);
        let p = DecisionProblem::new(vec![s("b"), s("a")], vec![s("o")], vec![vec![5.0], vec![5.0 + 1e-12]], ev)
            .unwrap();
        let rx = p.prescribe(Theory::Bdt).unwrap();
        assert_eq!(rx.best_actions, vec![s("b"), s("a")]);
        assert_eq!(rx.chosen(), "a");
    }

    #[test]
    fn shape_errors() {
        let ev = table(&[("a", &[("o", 1.0)])]);
        assert!(matches!(
            DecisionProblem::new(vec![s("a")], vec![s("o")], vec![vec![1.0, 2.0]], ev.clone()),
            Err(DecisionError::Shape(_))
        ));
        assert!(matches!(
            DecisionProblem::new(vec![s("b")], vec![s("o")], vec![vec![1.0]], ev),
            Err(DecisionError::Shape(_))
        ));
        assert!(matches!(
            DependencyHypothesisSet::new(FiniteDistribution::point(s("k")), vec![], true),
            Err(DecisionError::Shape(_))
        ));
    }

    #[test]
    fn dominance_under_screening() {
        // u(a2,·) exceeds u(a1,·) outcome by outcome, so CEU(a2) > CEU(a1) for every prior.
        for i in 0..=10 {
            let p = toy(i as f64 / 10.0, [0.99, 0.01]);
            assert!(p.causal_eu("a2").unwrap() > p.causal_eu("a1").unwrap());
        }
    }

    #[test]
    fn newcomb_type_toy() {
        let p = toy(0.5, [0.99, 0.01]);
        assert!(p.is_newcomb_type().unwrap());
        assert_eq!(p.prescribe(Theory::Bdt).unwrap().best_actions, vec![s("a1")]);
        assert_eq!(p.prescribe(Theory::Cdt).unwrap().best_actions, vec![s("a2")]);
    }
}
