//! Decision theory under hidden-variable and quantum models of correlated
//! boxes: finite probability, evidential vs causal expected utility, the
//! classic decision puzzles, CHSH bounds, a two-qubit Born-rule engine and a
//! simulated Bell game with betting agents.

pub mod bell_game;
pub mod causal_models;
pub mod cli;
pub mod decision;
pub mod prob;
pub mod quantum;
pub mod scenarios;

pub use bell_game::{Agent, CdtSemantics, Decision, GameConfig, Mechanism};
pub use causal_models::{LhvModel, Setting, Sign, LOCAL_BOUND, TSIRELSON_BOUND};
pub use decision::{DecisionProblem, DependencyHypothesisSet, Prescription, Theory};
pub use prob::{ConditionalTable, FiniteDistribution};
pub use quantum::{tsirelson_config, ChshConfiguration, TwoQubitState};
