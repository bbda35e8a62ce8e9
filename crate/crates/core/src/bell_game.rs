//! The marble-box game.
//!
//! Alice and Charlie press red or green buttons on N paired boxes. Each box
//! releases a ±1 marble; the host multiplies the numbers of each pair, averages
//! the products per colour pair and pays out `win_payout` if
//! F = ⟨a_r b_r⟩ + ⟨a_r b_g⟩ + ⟨a_g b_r⟩ − ⟨a_g b_g⟩ exceeds the threshold.
//! Alice may instead decline and take `decline_payout`.
//!
//! Causal agents judge the game with the credence-weighted bound
//! 2ε + 2√2(1 − ε); evidential agents use the statistics they expect to see.
//! Every session is reproducible from a master seed, the agent index and the
//! session index.

use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::causal_models::{
    chsh_coefficient, chsh_of_model, check_statistical_independence, mixture_chsh_bound, pair_index,
    superdeterministic_factory, DeterministicStrategy, JointDistribution, JointModel, JointOutcome, LhvModel,
    Setting, Sign, LOCAL_BOUND, SETTING_PAIRS, TSIRELSON_BOUND,
};
use crate::prob::FiniteDistribution;
use crate::quantum::{tsirelson_config, ChshConfiguration};

pub const DEFAULT_PAIRS: usize = 10_000;
pub const DEFAULT_THRESHOLD: f64 = 2.8;
pub const WIN_PAYOUT: f64 = 1_000_000.0;
pub const DECLINE_PAYOUT: f64 = 1_000.0;
pub const LOSE_PAYOUT: f64 = 0.0;
pub const DEFAULT_SEED: u64 = 1964;

/// Beyond this many standard errors the evidential win probability is taken
/// to be exactly 0 or 1.
pub const CLAMP_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("threshold {0} must lie strictly between -4 and 4")]
    InvalidThreshold(f64),
    #[error("number of pairs must be at least 1")]
    NoPairs,
    #[error("number of sessions must be at least 1")]
    NoSessions,
    #[error("expected {expected} setting pairs, got {got}")]
    SettingsMismatch { expected: usize, got: usize },
    #[error("{settings} settings but {products} products")]
    LengthMismatch { settings: usize, products: usize },
    #[error("credence {0} outside [0, 1]")]
    InvalidCredence(f64),
    #[error("payouts must be finite")]
    InvalidPayout,
    #[error("the LHV mechanism needs a model whose hidden states are independent of the settings")]
    DependentLhv,
}

/// How the boxes are manufactured.
#[derive(Debug, Clone)]
pub enum Mechanism {
    /// Marbles are fixed by a local hidden-variable model, independent of the buttons.
    Lhv(LhvModel),
    /// Outcomes follow the Born rule for the given state and angles.
    Quantum(ChshConfiguration),
    /// The factory knows which buttons will be pressed and prints the marbles
    /// so that each colour pair follows the Born rule of the configuration.
    Superdeterministic(ChshConfiguration),
}

impl Mechanism {
    /// The best local strategy: every marble reads +1, so F = 2.
    pub fn best_lhv() -> Self {
        let s = DeterministicStrategy {
            a_r: Sign::Plus,
            a_g: Sign::Plus,
            b_r: Sign::Plus,
            b_g: Sign::Plus,
        };
        Mechanism::Lhv(LhvModel::from_strategies(&FiniteDistribution::point(s)))
    }

    pub fn quantum() -> Self {
        Mechanism::Quantum(tsirelson_config())
    }

    pub fn superdeterministic() -> Self {
        Mechanism::Superdeterministic(tsirelson_config())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Lhv(_) => "lhv",
            Mechanism::Quantum(_) => "quantum",
            Mechanism::Superdeterministic(_) => "superdeterministic",
        }
    }

    /// Operational joint distribution of one box pair at the given buttons.
    pub fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        match self {
            Mechanism::Lhv(m) => m.hv_joint(alice, bob),
            Mechanism::Quantum(c) | Mechanism::Superdeterministic(c) => c.joint(alice, bob),
        }
    }

    /// Expected F of the boxes this mechanism produces.
    pub fn expected_f(&self) -> f64 {
        chsh_of_model(&MechanismModel(self))
    }
}

struct MechanismModel<'a>(&'a Mechanism);

impl JointModel for MechanismModel<'_> {
    fn joint(&self, alice: Setting, bob: Setting) -> JointDistribution {
        self.0.joint(alice, bob)
    }
}

/// Parameters of one game.
#[derive(Debug, Clone)]
pub struct GameConfig {
    pub n_pairs: usize,
    pub threshold: f64,
    pub win_payout: f64,
    pub decline_payout: f64,
    pub lose_payout: f64,
    pub mechanism: Mechanism,
    pub seed: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            n_pairs: DEFAULT_PAIRS,
            threshold: DEFAULT_THRESHOLD,
            win_payout: WIN_PAYOUT,
            decline_payout: DECLINE_PAYOUT,
            lose_payout: LOSE_PAYOUT,
            mechanism: Mechanism::quantum(),
            seed: DEFAULT_SEED,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.n_pairs == 0 {
            return Err(GameError::NoPairs);
        }
        if !(self.threshold > -4.0 && self.threshold < 4.0) {
            return Err(GameError::InvalidThreshold(self.threshold));
        }
        if ![self.win_payout, self.decline_payout, self.lose_payout]
            .iter()
            .all(|p| p.is_finite())
        {
            return Err(GameError::InvalidPayout);
        }
        if let Mechanism::Lhv(m) = &self.mechanism {
            if !check_statistical_independence(m) {
                return Err(GameError::DependentLhv);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Play,
    Decline,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Play => "PLAY",
            Decision::Decline => "DECLINE",
        })
    }
}

/// How a causal agent turns its credence into a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CdtSemantics {
    /// Play iff the credence-weighted expectation 2ε + 2√2(1 − ε) exceeds T.
    ExpectationRule,
    /// Assume F concentrates on each hypothesis' value; play iff the
    /// resulting causal win probability makes playing worth more than
    /// declining.
    HypothesisConcentration,
}

impl fmt::Display for CdtSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CdtSemantics::ExpectationRule => "expectation",
            CdtSemantics::HypothesisConcentration => "concentration",
        })
    }
}

/// What an evidential agent expects the boxes to do: one correlator per cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvidentialModel {
    /// Indexed like [`SETTING_PAIRS`].
    pub correlators: [f64; 4],
}

impl EvidentialModel {
    pub fn from_model(model: &(impl JointModel + ?Sized)) -> Self {
        Self {
            correlators: SETTING_PAIRS.map(|(a, b)| model.correlator(a, b)),
        }
    }

    /// Expects the observed statistics of the Tsirelson configuration.
    pub fn quantum() -> Self {
        Self::from_model(&tsirelson_config())
    }

    pub fn mean_f(&self) -> f64 {
        SETTING_PAIRS
            .iter()
            .zip(self.correlators)
            .map(|(&(a, b), e)| chsh_coefficient(a, b) * e)
            .sum()
    }

    /// Standard error of the empirical F over `n_pairs` pairs with uniformly
    /// random buttons on both sides: √(Σ_cells (1 − E²)/(N/4)).
    pub fn standard_error(&self, n_pairs: usize) -> f64 {
        let per_cell = n_pairs as f64 / 4.0;
        self.correlators
            .iter()
            .map(|e| (1.0 - e * e).max(0.0) / per_cell)
            .sum::<f64>()
            .sqrt()
    }

    /// Normal approximation to P(empirical F > threshold), clamped to 0 or 1
    /// beyond [`CLAMP_SIGMAS`] standard errors.
    pub fn win_probability(&self, threshold: f64, n_pairs: usize) -> f64 {
        let mean = self.mean_f();
        let se = self.standard_error(n_pairs);
        if se == 0.0 {
            return if mean > threshold { 1.0 } else { 0.0 };
        }
        let z = (mean - threshold) / se;
        if z > CLAMP_SIGMAS {
            1.0
        } else if z < -CLAMP_SIGMAS {
            0.0
        } else {
            Normal::standard().cdf(z)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Agent {
    Causal { epsilon: f64, semantics: CdtSemantics },
    Bayesian { evidential: EvidentialModel },
}

impl Agent {
    pub fn causal(epsilon: f64, semantics: CdtSemantics) -> Result<Self, GameError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(GameError::InvalidCredence(epsilon));
        }
        Ok(Agent::Causal { epsilon, semantics })
    }

    pub fn bayesian(evidential: EvidentialModel) -> Self {
        Agent::Bayesian { evidential }
    }

    pub fn bayesian_quantum() -> Self {
        Self::bayesian(EvidentialModel::quantum())
    }

    pub fn label(&self) -> String {
        match self {
            Agent::Causal { epsilon, semantics } => format!("CDT(epsilon={epsilon};{semantics})"),
            Agent::Bayesian { .. } => "BDT".to_string(),
        }
    }

    pub fn decide(&self, config: &GameConfig) -> Decision {
        match *self {
            Agent::Causal { epsilon, semantics } => cdt_decision(epsilon, semantics, config),
            Agent::Bayesian { ref evidential } => bdt_decision(evidential, config),
        }
    }
}

fn play_if(value_of_playing: f64, config: &GameConfig) -> Decision {
    if value_of_playing > config.decline_payout {
        Decision::Play
    } else {
        Decision::Decline
    }
}

/// Causal agent with credence `epsilon` on local-form hypotheses.
///
/// # Panics
/// If `epsilon` lies outside [0, 1]; [`Agent::causal`] validates it.
pub fn cdt_decision(epsilon: f64, semantics: CdtSemantics, config: &GameConfig) -> Decision {
    let t = config.threshold;
    match semantics {
        CdtSemantics::ExpectationRule => {
            let bound = mixture_chsh_bound(epsilon).expect("credence in [0, 1]");
            if bound > t {
                Decision::Play
            } else {
                Decision::Decline
            }
        }
        CdtSemantics::HypothesisConcentration => {
            assert!((0.0..=1.0).contains(&epsilon), "credence in [0, 1]");
            let step = |x: f64| if x > t { 1.0 } else { 0.0 };
            let p_win = epsilon * step(LOCAL_BOUND) + (1.0 - epsilon) * step(TSIRELSON_BOUND);
            play_if(p_win * config.win_payout + (1.0 - p_win) * config.lose_payout, config)
        }
    }
}

/// Evidential agent: plays iff P(F > T)·win + P(F ≤ T)·lose beats declining.
pub fn bdt_decision(model: &EvidentialModel, config: &GameConfig) -> Decision {
    let p_win = model.win_probability(config.threshold, config.n_pairs);
    play_if(p_win * config.win_payout + (1.0 - p_win) * config.lose_payout, config)
}

/// Outcomes for each box pair at the given buttons.
pub fn fabricate_boxes<R: Rng + ?Sized>(
    config: &GameConfig,
    settings: &[(Setting, Setting)],
    rng: &mut R,
) -> Result<Vec<JointOutcome>, GameError> {
    if settings.len() != config.n_pairs {
        return Err(GameError::SettingsMismatch {
            expected: config.n_pairs,
            got: settings.len(),
        });
    }
    let outcomes = match &config.mechanism {
        Mechanism::Lhv(model) => settings.iter().map(|&(a, b)| model.sample_pair(a, b, rng)).collect(),
        Mechanism::Quantum(cfg) => {
            let joints = SETTING_PAIRS.map(|(a, b)| cfg.joint(a, b));
            settings
                .iter()
                .map(|&(a, b)| *joints[pair_index(a, b)].sample(rng))
                .collect()
        }
        Mechanism::Superdeterministic(cfg) => {
            let factory = superdeterministic_factory(cfg);
            settings.iter().map(|&(a, b)| factory.sample_pair(a, b, rng)).collect()
        }
    };
    Ok(outcomes)
}

/// Per-cell counts and means of the products, and the resulting F.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshStatistic {
    /// Indexed like [`SETTING_PAIRS`].
    pub cell_counts: [usize; 4],
    /// 0 for cells that never occurred.
    pub cell_means: [f64; 4],
    pub f_statistic: f64,
}

/// Averages the products per colour pair; empty cells contribute 0.
pub fn chsh_statistic(settings: &[(Setting, Setting)], products: &[i8]) -> Result<ChshStatistic, GameError> {
    if settings.len() != products.len() {
        return Err(GameError::LengthMismatch {
            settings: settings.len(),
            products: products.len(),
        });
    }
    let mut counts = [0usize; 4];
    let mut sums = [0i64; 4];
    for (&(a, b), &p) in settings.iter().zip(products) {
        let i = pair_index(a, b);
        counts[i] += 1;
        sums[i] += i64::from(p);
    }
    let means: [f64; 4] = std::array::from_fn(|i| {
        if counts[i] == 0 {
            0.0
        } else {
            sums[i] as f64 / counts[i] as f64
        }
    });
    let f_statistic = means[0] + means[1] + means[2] - means[3];
    Ok(ChshStatistic {
        cell_counts: counts,
        cell_means: means,
        f_statistic,
    })
}

/// Transcript of one session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionRecord {
    /// (Alice's colour, Charlie's colour) per box pair; empty when declined.
    pub settings: Vec<(Setting, Setting)>,
    pub products: Vec<i8>,
    pub cell_counts: [usize; 4],
    pub cell_means: [f64; 4],
    pub f_statistic: f64,
    pub decision: Decision,
    /// Played and F exceeded the threshold.
    pub won: bool,
    pub payout: f64,
}

const CSV_HEADER: &str =
    "row,pair_index,alice_colour,charlie_colour,product,mean_rr,mean_rg,mean_gr,mean_gg,f_statistic,decision,payout";

impl SessionRecord {
    /// One row per box pair followed by a summary row. Columns that do not
    /// apply to a row are left empty.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for (i, ((a, b), p)) in self.settings.iter().zip(&self.products).enumerate() {
            writeln!(out, "pair,{i},{a},{b},{p},,,,,,,")?;
        }
        let m = self.cell_means;
        writeln!(
            out,
            "summary,,,,,{:.9},{:.9},{:.9},{:.9},{:.9},{},{:.9}",
            m[0], m[1], m[2], m[3], self.f_statistic, self.decision, self.payout
        )
    }
}

fn random_setting<R: Rng + ?Sized>(rng: &mut R) -> Setting {
    if rng.random::<bool>() {
        Setting::Red
    } else {
        Setting::Green
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressedBoxes {
    pub settings: Vec<(Setting, Setting)>,
    pub products: Vec<i8>,
    pub statistic: ChshStatistic,
}

/// Presses every pair with uniformly random buttons on both sides and scores
/// the products.
pub fn press_boxes<R: Rng + ?Sized>(config: &GameConfig, rng: &mut R) -> Result<PressedBoxes, GameError> {
    let settings: Vec<(Setting, Setting)> = (0..config.n_pairs)
        .map(|_| {
            let alice = random_setting(rng);
            let charlie = random_setting(rng);
            (alice, charlie)
        })
        .collect();
    let outcomes = fabricate_boxes(config, &settings, rng)?;
    let products: Vec<i8> = outcomes.iter().map(|(a, b)| (a.value() * b.value()) as i8).collect();
    let statistic = chsh_statistic(&settings, &products)?;
    Ok(PressedBoxes {
        settings,
        products,
        statistic,
    })
}

/// Plays one session: the agent decides, then (if playing) Alice and Charlie
/// press uniformly random buttons, the boxes are fabricated and F is scored.
pub fn play_session<R: Rng + ?Sized>(config: &GameConfig, agent: &Agent, rng: &mut R) -> Result<SessionRecord, GameError> {
    config.validate()?;
    let decision = agent.decide(config);
    if decision == Decision::Decline {
        return Ok(SessionRecord {
            settings: Vec::new(),
            products: Vec::new(),
            cell_counts: [0; 4],
            cell_means: [0.0; 4],
            f_statistic: 0.0,
            decision,
            won: false,
            payout: config.decline_payout,
        });
    }
    let PressedBoxes {
        settings,
        products,
        statistic: stat,
    } = press_boxes(config, rng)?;
    let won = stat.f_statistic > config.threshold;
    Ok(SessionRecord {
        settings,
        products,
        cell_counts: stat.cell_counts,
        cell_means: stat.cell_means,
        f_statistic: stat.f_statistic,
        decision,
        won,
        payout: if won { config.win_payout } else { config.lose_payout },
    })
}

/// Independent RNG for one (agent, session) cell of a tournament.
pub fn session_rng(seed: u64, agent: usize, session: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (agent as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(session as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionSummary {
    pub session: usize,
    pub decision: Decision,
    pub f_statistic: f64,
    pub won: bool,
    pub payout: f64,
}

impl From<(usize, &SessionRecord)> for SessionSummary {
    fn from((session, r): (usize, &SessionRecord)) -> Self {
        Self {
            session,
            decision: r.decision,
            f_statistic: r.f_statistic,
            won: r.won,
            payout: r.payout,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentLedger {
    pub agent: String,
    pub sessions: Vec<SessionSummary>,
}

impl AgentLedger {
    pub fn total(&self) -> f64 {
        self.sessions.iter().map(|s| s.payout).sum()
    }

    pub fn mean(&self) -> f64 {
        self.total() / self.sessions.len() as f64
    }

    pub fn wins(&self) -> usize {
        self.sessions.iter().filter(|s| s.won).count()
    }

    pub fn declines(&self) -> usize {
        self.sessions.iter().filter(|s| s.decision == Decision::Decline).count()
    }

    /// Wins over sessions played; 0 if the agent never played.
    pub fn win_rate(&self) -> f64 {
        let played = self.sessions.len() - self.declines();
        if played == 0 {
            0.0
        } else {
            self.wins() as f64 / played as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BankrollLedger {
    pub mechanism: String,
    pub n_pairs: usize,
    pub threshold: f64,
    pub seed: u64,
    pub agents: Vec<AgentLedger>,
}

impl BankrollLedger {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "agent,session,decision,f_statistic,won,payout")?;
        for a in &self.agents {
            for s in &a.sessions {
                writeln!(
                    out,
                    "{},{},{},{:.9},{},{:.9}",
                    a.agent, s.session, s.decision, s.f_statistic, s.won, s.payout
                )?;
            }
        }
        Ok(())
    }
}

/// Plays `n_sessions` sessions for every agent. Sessions run in parallel but
/// each draws from its own [`session_rng`] stream, so the ledger depends only
/// on the config seed.
pub fn run_tournament(config: &GameConfig, agents: &[Agent], n_sessions: usize) -> Result<BankrollLedger, GameError> {
    config.validate()?;
    if n_sessions == 0 {
        return Err(GameError::NoSessions);
    }
    let agents = agents
        .iter()
        .enumerate()
        .map(|(ai, agent)| {
            let sessions = (0..n_sessions)
                .into_par_iter()
                .map(|si| {
                    let mut rng = session_rng(config.seed, ai, si);
                    play_session(config, agent, &mut rng).map(|r| SessionSummary::from((si, &r)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AgentLedger {
                agent: agent.label(),
                sessions,
            })
        })
        .collect::<Result<Vec<_>, GameError>>()?;
    Ok(BankrollLedger {
        mechanism: config.mechanism.name().to_string(),
        n_pairs: config.n_pairs,
        threshold: config.threshold,
        seed: config.seed,
        agents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal_models::{enumerate_deterministic, local_response};

    fn small(mechanism: Mechanism, n: usize) -> GameConfig {
        GameConfig {
            n_pairs: n,
            mechanism,
            ..GameConfig::default()
        }
    }

    fn sign_product(o: &JointOutcome) -> i8 {
        (o.0.value() * o.1.value()) as i8
    }

    #[test]
    fn config_validation() {
        assert!(GameConfig::default().validate().is_ok());
        let mut c = GameConfig {
            threshold: 4.0,
            ..GameConfig::default()
        };
        assert_eq!(c.validate(), Err(GameError::InvalidThreshold(4.0)));
        c.threshold = f64::NAN;
        assert!(c.validate().is_err());
        let c = small(Mechanism::quantum(), 0);
        assert_eq!(c.validate(), Err(GameError::NoPairs));
        let dependent = superdeterministic_factory(&tsirelson_config());
        assert_eq!(small(Mechanism::Lhv(dependent), 10).validate(), Err(GameError::DependentLhv));
    }

    #[test]
    fn causal_agent_credence_checked() {
        assert_eq!(
            Agent::causal(1.5, CdtSemantics::ExpectationRule),
            Err(GameError::InvalidCredence(1.5))
        );
    }

    #[test]
    fn cdt_expectation_rule_break_even() {
        let c = GameConfig::default();
        let e = CdtSemantics::ExpectationRule;
        assert_eq!(cdt_decision(0.0, e, &c), Decision::Play);
        assert_eq!(cdt_decision(0.03, e, &c), Decision::Play);
        assert_eq!(cdt_decision(0.04, e, &c), Decision::Decline);
        assert_eq!(cdt_decision(1.0, e, &c), Decision::Decline);
    }

    #[test]
    fn cdt_concentration_semantics() {
        let c = GameConfig::default();
        let h = CdtSemantics::HypothesisConcentration;
        // p_win = 1 − ε; play iff (1 − ε)·1e6 > 1e3.
        assert_eq!(cdt_decision(0.1, h, &c), Decision::Play);
        assert_eq!(cdt_decision(0.5, h, &c), Decision::Play);
        assert_eq!(cdt_decision(0.998, h, &c), Decision::Play);
        assert_eq!(cdt_decision(0.9995, h, &c), Decision::Decline);
        assert_eq!(cdt_decision(1.0, h, &c), Decision::Decline);
    }

    #[test]
    fn evidential_standard_error() {
        let m = EvidentialModel::quantum();
        assert!((m.mean_f() - TSIRELSON_BOUND).abs() < 1e-12);
        // Each cell contributes (1 − 1/2)/(N/4), so SE² = 8/N.
        for n in [100, 10_000, 123_456] {
            assert!((m.standard_error(n) - (8.0 / n as f64).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn evidential_win_probability() {
        let m = EvidentialModel::quantum();
        let z = (TSIRELSON_BOUND - 2.8) / (8.0f64 / 10_000.0).sqrt();
        let expected = Normal::standard().cdf(z);
        assert!((m.win_probability(2.8, 10_000) - expected).abs() < 1e-12);
        assert!((expected - 0.8413).abs() < 0.01);
        assert_eq!(m.win_probability(2.8, 10_000_000), 1.0);
        assert_eq!(m.win_probability(3.5, 10_000), 0.0);
        let lhv = EvidentialModel { correlators: [1.0, 1.0, 1.0, 1.0] };
        assert_eq!(lhv.standard_error(10), 0.0);
        assert_eq!(lhv.win_probability(1.9, 10), 1.0);
        assert_eq!(lhv.win_probability(2.0, 10), 0.0);
    }

    #[test]
    fn bdt_decision_from_win_probability() {
        let c = GameConfig::default();
        assert_eq!(bdt_decision(&EvidentialModel::quantum(), &c), Decision::Play);
        let lhv = EvidentialModel { correlators: [1.0, 1.0, 1.0, 1.0] };
        assert_eq!(bdt_decision(&lhv, &c), Decision::Decline);
    }

    #[test]
    fn statistic_examples() {
        use Setting::*;
        let settings = [(Red, Red), (Red, Green), (Green, Red), (Green, Green)];
        let s = chsh_statistic(&settings, &[1, 1, 1, -1]).unwrap();
        assert_eq!(s.f_statistic, 4.0);
        assert_eq!(s.cell_counts, [1, 1, 1, 1]);
        let s = chsh_statistic(&[(Red, Red), (Red, Red), (Green, Green)], &[1, -1, 1]).unwrap();
        assert_eq!(s.cell_means, [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(s.f_statistic, -1.0);
        let empty = chsh_statistic(&[], &[]).unwrap();
        assert_eq!(empty.f_statistic, 0.0);
        assert_eq!(
            chsh_statistic(&settings, &[1]),
            Err(GameError::LengthMismatch { settings: 4, products: 1 })
        );
    }

    #[test]
    fn fabricate_length_checked() {
        let c = small(Mechanism::quantum(), 3);
        let mut rng = session_rng(1, 0, 0);
        let err = fabricate_boxes(&c, &[(Setting::Red, Setting::Red)], &mut rng).unwrap_err();
        assert_eq!(err, GameError::SettingsMismatch { expected: 3, got: 1 });
    }

    #[test]
    fn deterministic_lhv_boxes_reproduce_strategy() {
        for s in enumerate_deterministic() {
            let m = LhvModel::from_strategies(&FiniteDistribution::point(s));
            let c = small(Mechanism::Lhv(m), 400);
            let mut rng = session_rng(3, 0, 0);
            let settings: Vec<_> = (0..400).map(|i| SETTING_PAIRS[i % 4]).collect();
            let boxes = fabricate_boxes(&c, &settings, &mut rng).unwrap();
            for (&(a, b), o) in settings.iter().zip(&boxes) {
                assert_eq!(*o, (s.alice(a), s.bob(b)));
            }
            let products: Vec<i8> = boxes.iter().map(sign_product).collect();
            let stat = chsh_statistic(&settings, &products).unwrap();
            assert_eq!(stat.f_statistic, f64::from(s.f_value()));
        }
    }

    #[test]
    fn quantum_boxes_have_expected_cell_frequencies() {
        let n = 40_000;
        let c = small(Mechanism::quantum(), n);
        let settings: Vec<_> = (0..n).map(|i| SETTING_PAIRS[i % 4]).collect();
        let mut rng = session_rng(11, 0, 0);
        let boxes = fabricate_boxes(&c, &settings, &mut rng).unwrap();
        let products: Vec<i8> = boxes.iter().map(sign_product).collect();
        let stat = chsh_statistic(&settings, &products).unwrap();
        // SE of F is √(8/N) ≈ 0.014.
        assert!((stat.f_statistic - TSIRELSON_BOUND).abs() < 0.08, "{}", stat.f_statistic);
    }

    #[test]
    fn superdeterministic_boxes_match_quantum_statistics() {
        let n = 40_000;
        let c = small(Mechanism::superdeterministic(), n);
        let settings: Vec<_> = (0..n).map(|i| SETTING_PAIRS[i % 4]).collect();
        let mut rng = session_rng(12, 0, 0);
        let boxes = fabricate_boxes(&c, &settings, &mut rng).unwrap();
        let products: Vec<i8> = boxes.iter().map(sign_product).collect();
        let stat = chsh_statistic(&settings, &products).unwrap();
        assert!((stat.f_statistic - TSIRELSON_BOUND).abs() < 0.08, "{}", stat.f_statistic);
        assert!((c.mechanism.expected_f() - TSIRELSON_BOUND).abs() < 1e-12);
    }

    #[test]
    fn declined_session_pays_decline_and_presses_nothing() {
        let c = small(Mechanism::quantum(), 100);
        let agent = Agent::causal(1.0, CdtSemantics::ExpectationRule).unwrap();
        let r = play_session(&c, &agent, &mut session_rng(0, 0, 0)).unwrap();
        assert_eq!(r.decision, Decision::Decline);
        assert_eq!(r.payout, DECLINE_PAYOUT);
        assert!(r.settings.is_empty() && r.products.is_empty());
        assert_eq!(r.cell_counts, [0; 4]);
        assert!(!r.won);
    }

    #[test]
    fn played_session_payout_follows_statistic() {
        let c = small(Mechanism::best_lhv(), 200);
        let agent = Agent::causal(0.0, CdtSemantics::ExpectationRule).unwrap();
        let r = play_session(&c, &agent, &mut session_rng(0, 0, 1)).unwrap();
        assert_eq!(r.decision, Decision::Play);
        assert_eq!(r.settings.len(), 200);
        assert_eq!(r.cell_counts.iter().sum::<usize>(), 200);
        assert!(r.f_statistic <= 2.0);
        assert!(!r.won);
        assert_eq!(r.payout, LOSE_PAYOUT);
    }

    #[test]
    fn sessions_are_reproducible() {
        let c = small(Mechanism::quantum(), 500);
        let agent = Agent::bayesian_quantum();
        let a = play_session(&c, &agent, &mut session_rng(42, 1, 7)).unwrap();
        let b = play_session(&c, &agent, &mut session_rng(42, 1, 7)).unwrap();
        assert_eq!(a, b);
        let d = play_session(&c, &agent, &mut session_rng(42, 1, 8)).unwrap();
        assert_ne!(a.settings, d.settings);
    }

    #[test]
    fn tournament_ledger_accounting() {
        let c = small(Mechanism::quantum(), 2_000);
        let agents = [
            Agent::causal(0.5, CdtSemantics::ExpectationRule).unwrap(),
            Agent::bayesian_quantum(),
        ];
        let ledger = run_tournament(&c, &agents, 6).unwrap();
        assert_eq!(ledger.agents.len(), 2);
        let cdt = &ledger.agents[0];
        assert_eq!(cdt.declines(), 6);
        assert_eq!(cdt.total(), 6.0 * DECLINE_PAYOUT);
        assert_eq!(cdt.win_rate(), 0.0);
        for a in &ledger.agents {
            let wins = a.wins() as f64;
            let losses = (a.sessions.len() - a.wins() - a.declines()) as f64;
            let expected = wins * WIN_PAYOUT + a.declines() as f64 * DECLINE_PAYOUT + losses * LOSE_PAYOUT;
            assert_eq!(a.total(), expected);
            assert!((a.mean() - expected / 6.0).abs() < 1e-9);
            assert_eq!(a.sessions.iter().map(|s| s.session).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
        }
        assert_eq!(run_tournament(&c, &agents, 6).unwrap(), ledger);
        assert_eq!(run_tournament(&c, &agents, 0), Err(GameError::NoSessions));
    }

    #[test]
    fn independent_random_lhv_never_wins() {
        let resp = local_response(0.3, 0.8).unwrap();
        let m = LhvModel::new(
            FiniteDistribution::point("only".to_string()),
            vec![(resp.clone(), resp)],
        )
        .unwrap();
        let c = small(Mechanism::Lhv(m), 1_000);
        let agent = Agent::causal(0.0, CdtSemantics::ExpectationRule).unwrap();
        let ledger = run_tournament(&c, &[agent], 5).unwrap();
        assert_eq!(ledger.agents[0].wins(), 0);
    }

    #[test]
    fn csv_rows() {
        let c = small(Mechanism::quantum(), 3);
        let r = play_session(&c, &Agent::causal(0.0, CdtSemantics::ExpectationRule).unwrap(), &mut session_rng(0, 0, 0)).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("pair,0,"));
        assert!(lines[4].starts_with("summary,,,,,"));
        assert!(lines.iter().all(|l| l.split(',').count() == 12));

        let declined = play_session(&c, &Agent::causal(1.0, CdtSemantics::ExpectationRule).unwrap(), &mut session_rng(0, 0, 0)).unwrap();
        let mut buf = Vec::new();
        declined.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "summary,,,,,0.000000000,0.000000000,0.000000000,0.000000000,0.000000000,DECLINE,1000.000000000"
        );
    }

    #[test]
    fn minimal_threshold_always_plays() {
        let c = GameConfig {
            threshold: -4.0,
            ..GameConfig::default()
        };
        for model in [
            EvidentialModel::quantum(),
            EvidentialModel { correlators: [1.0; 4] },
            EvidentialModel { correlators: [-1.0; 4] },
        ] {
            assert_eq!(bdt_decision(&model, &c), Decision::Play);
        }
    }

    #[test]
    fn zero_payouts_give_zero_totals() {
        let c = GameConfig {
            n_pairs: 100,
            win_payout: 0.0,
            decline_payout: 0.0,
            lose_payout: 0.0,
            ..GameConfig::default()
        };
        let agents = [
            Agent::causal(0.1, CdtSemantics::ExpectationRule).unwrap(),
            Agent::causal(0.1, CdtSemantics::HypothesisConcentration).unwrap(),
            Agent::bayesian_quantum(),
        ];
        let ledger = run_tournament(&c, &agents, 4).unwrap();
        assert!(ledger.agents.iter().all(|a| a.total() == 0.0));
    }

    #[test]
    fn endpoint_consistency() {
        for t in [-3.5, 1.9, 2.0, 2.5, 2.8, 2.9, 3.9] {
            let c = GameConfig {
                threshold: t,
                ..GameConfig::default()
            };
            let e = CdtSemantics::ExpectationRule;
            assert_eq!(cdt_decision(0.0, e, &c) == Decision::Play, TSIRELSON_BOUND > t);
            assert_eq!(cdt_decision(1.0, e, &c) == Decision::Play, LOCAL_BOUND > t);
        }
    }

    #[test]
    fn empty_cell_contributes_zero_in_play() {
        // Two pairs cannot cover four cells, so at least two means are zero.
        let c = small(Mechanism::best_lhv(), 2);
        let agent = Agent::causal(0.0, CdtSemantics::ExpectationRule).unwrap();
        let r = play_session(&c, &agent, &mut session_rng(5, 0, 0)).unwrap();
        let empty = r.cell_counts.iter().filter(|&&n| n == 0).count();
        assert!(empty >= 2);
        for i in 0..4 {
            if r.cell_counts[i] == 0 {
                assert_eq!(r.cell_means[i], 0.0);
            }
        }
        let m = r.cell_means;
        assert_eq!(r.f_statistic, m[0] + m[1] + m[2] - m[3]);
    }
}
