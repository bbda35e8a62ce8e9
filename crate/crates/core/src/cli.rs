//! Command-line front end.
//!
//! Every option can also come from a flat TOML file passed with `--config`;
//! keys are the long flag names without dashes in front (`p-gene = 0.3`).
//! Flags win over the file, documented defaults fill the rest. Unknown keys
//! are rejected.
//!
//! Exit codes: 0 on success, 2 for usage or validation errors, 1 otherwise.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bell_game::{
    press_boxes, run_tournament, session_rng, Agent, CdtSemantics, EvidentialModel, GameConfig, GameError,
    Mechanism, DEFAULT_PAIRS, DEFAULT_SEED, DEFAULT_THRESHOLD,
};
use crate::causal_models::{
    break_even_credence, chsh_of_model, enumerate_deterministic, lhv_chsh_max, mixture_chsh_bound, ModelError,
};
use crate::decision::{DecisionError, Theory};
use crate::quantum::tsirelson_config;
use crate::scenarios::{by_name, million_box, newcomb_classic, smoking_gene, ScenarioError, ScenarioParams};

/// Relative `--out` paths are resolved against this directory when set.
pub const OUT_DIR_ENV: &str = "NEWCOMB_BELL_OUT_DIR";

pub const DEFAULT_SESSIONS: usize = 100;
pub const DEFAULT_EPSILON: f64 = 0.1;
/// Seeds used by `repro` for the empirical Tsirelson check.
pub const REPRO_MC_SEEDS: u64 = 20;
pub const REPRO_MC_PAIRS: usize = 100_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config file {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } | CliError::Game(_) | CliError::Model(_) => 2,
            CliError::Scenario(ScenarioError::Decision(_)) => 1,
            CliError::Scenario(_) => 2,
            CliError::Decision(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentChoice {
    Cdt,
    Bdt,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsChoice {
    Expectation,
    Concentration,
}

impl From<SemanticsChoice> for CdtSemantics {
    fn from(s: SemanticsChoice) -> Self {
        match s {
            SemanticsChoice::Expectation => CdtSemantics::ExpectationRule,
            SemanticsChoice::Concentration => CdtSemantics::HypothesisConcentration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MechanismChoice {
    Quantum,
    Lhv,
    Superdeterministic,
}

impl From<MechanismChoice> for Mechanism {
    fn from(m: MechanismChoice) -> Self {
        match m {
            MechanismChoice::Quantum => Mechanism::quantum(),
            MechanismChoice::Lhv => Mechanism::best_lhv(),
            MechanismChoice::Superdeterministic => Mechanism::superdeterministic(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "newcomb-bell", version, about = "Causal vs evidential decisions and Bell games")]
pub struct Cli {
    /// Flat TOML file with default values for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed [default: 1964].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format [default: table].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected utilities and prescriptions for a named decision problem.
    Scenario(ScenarioArgs),
    /// Tournament of betting agents in the marble-box game.
    BellGame(BellGameArgs),
    /// The 16 deterministic local strategies and their F values.
    EnumerateLhv(EnumerateArgs),
    /// Causal bound on F as a function of the credence in local models.
    Bounds(BoundsArgs),
    /// Recompute the headline numbers of every module.
    Repro(ReproArgs),
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct ScenarioArgs {
    /// newcomb, smoking-gene or million-box.
    pub name: Option<String>,
    /// Newcomb: P(O1|A1), predictor accuracy for one-boxers.
    #[arg(long)]
    pub p1: Option<f64>,
    /// Newcomb: P(O1|A2).
    #[arg(long)]
    pub p2: Option<f64>,
    /// Newcomb: causal prior that the box is full [default: 0.5].
    #[arg(long)]
    pub prior: Option<f64>,
    /// Smoking gene: causal prior P(G) [default: 0.5].
    #[arg(long)]
    pub p_gene: Option<f64>,
    /// Million-box: number of closed boxes [default: 1000000].
    #[arg(long)]
    pub boxes: Option<u64>,
    /// Million-box: P(million in the chosen box | closed box only).
    #[arg(long)]
    pub accuracy: Option<f64>,
}

impl ScenarioArgs {
    fn merge(&mut self, file: Self) {
        merge_fields!(self, file; name, p1, p2, prior, p_gene, boxes, accuracy);
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct BellGameArgs {
    /// Box pairs per session [default: 10000].
    #[arg(long)]
    pub pairs: Option<usize>,
    /// CDT credence in local hidden-variable models [default: 0.1].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Winning threshold on F [default: 2.8].
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    /// Which agents play [default: both].
    #[arg(long, value_enum)]
    pub agent: Option<AgentChoice>,
    /// CDT decision rule [default: expectation].
    #[arg(long, value_enum)]
    pub semantics: Option<SemanticsChoice>,
    /// How the boxes are made [default: quantum].
    #[arg(long, value_enum)]
    pub mechanism: Option<MechanismChoice>,
    /// Sessions per agent [default: 100].
    #[arg(long)]
    pub sessions: Option<usize>,
    /// Win, decline and lose payouts [default: 1000000,1000,0].
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub payouts: Option<Vec<f64>>,
}

impl BellGameArgs {
    fn merge(&mut self, file: Self) {
        merge_fields!(self, file; pairs, epsilon, threshold, agent, semantics, mechanism, sessions, payouts);
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerateArgs {}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct BoundsArgs {
    /// Credences to tabulate [default: 0,0.1,...,1].
    #[arg(long, value_delimiter = ',')]
    pub epsilon_grid: Option<Vec<f64>>,
    /// Threshold for the break-even credence [default: 2.8].
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
}

impl BoundsArgs {
    fn merge(&mut self, file: Self) {
        merge_fields!(self, file; epsilon_grid, threshold);
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct ReproArgs {
    /// Sessions in the tournament [default: 100].
    #[arg(long)]
    pub sessions: Option<usize>,
    /// Box pairs per tournament session [default: 10000].
    #[arg(long)]
    pub pairs: Option<usize>,
}

impl ReproArgs {
    fn merge(&mut self, file: Self) {
        merge_fields!(self, file; sessions, pairs);
    }
}

/// Keys that may appear in a config file next to the command's own.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GlobalKeys {
    seed: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

const GLOBAL_KEYS: [&str; 3] = ["seed", "format", "out"];

fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(GlobalKeys, T), CliError> {
    let config_err = |message: String| CliError::Config {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| config_err(e.to_string()))?;
    let mut table: toml::Table = toml::from_str(&text).map_err(|e| config_err(e.to_string()))?;
    let mut globals = toml::Table::new();
    for key in GLOBAL_KEYS {
        if let Some(v) = table.remove(key) {
            globals.insert(key.to_string(), v);
        }
    }
    let globals: GlobalKeys = toml::Value::Table(globals)
        .try_into()
        .map_err(|e: toml::de::Error| config_err(e.to_string()))?;
    let rest: T = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| config_err(e.to_string()))?;
    Ok((globals, rest))
}

/// A report cell. Reals print with 9 fractional digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    Bool(bool),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Text(s) => f.write_str(s),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Num(x) => write!(f, "{x:.9}"),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<i32> for Cell {
    fn from(n: i32) -> Self {
        Cell::Int(n.into())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$(Cell::from($x)),*] };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Section {
    fn new(title: &str, columns: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub sections: Vec<Section>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    /// Sections separated by a blank line; tables are column-aligned and CSV
    /// sections each start with their own header row.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
                s.push('\n');
                s
            }
            Format::Csv => self
                .sections
                .iter()
                .map(|sec| {
                    let mut out = String::new();
                    let header: Vec<_> = sec.columns.iter().map(|c| csv_field(c)).collect();
                    out.push_str(&header.join(","));
                    out.push('\n');
                    for row in &sec.rows {
                        let cells: Vec<_> = row.iter().map(|c| csv_field(&c.to_string())).collect();
                        out.push_str(&cells.join(","));
                        out.push('\n');
                    }
                    out
                })
                .collect::<Vec<_>>()
                .join("\n"),
            Format::Table => self
                .sections
                .iter()
                .map(|sec| {
                    let cells: Vec<Vec<String>> = sec
                        .rows
                        .iter()
                        .map(|r| r.iter().map(|c| c.to_string()).collect())
                        .collect();
                    let widths: Vec<usize> = (0..sec.columns.len())
                        .map(|i| {
                            cells
                                .iter()
                                .map(|r| r[i].chars().count())
                                .chain([sec.columns[i].chars().count()])
                                .max()
                                .unwrap_or(0)
                        })
                        .collect();
                    let line = |r: &[String]| {
                        let padded: Vec<String> = r
                            .iter()
                            .zip(&widths)
                            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                            .collect();
                        format!("{}\n", padded.join("  ").trim_end())
                    };
                    let mut out = format!("{}\n", sec.title);
                    out.push_str(&line(&sec.columns));
                    for r in &cells {
                        out.push_str(&line(r));
                    }
                    out
                })
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }
}

fn scenario_report(args: &ScenarioArgs) -> Result<Report, CliError> {
    let name = args
        .name
        .as_deref()
        .ok_or_else(|| CliError::Usage("scenario name required (newcomb, smoking-gene, million-box)".into()))?;
    let params = ScenarioParams {
        p1: args.p1,
        p2: args.p2,
        prior: args.prior,
        p_gene: args.p_gene,
        boxes: args.boxes,
        accuracy: args.accuracy,
    };
    let spec = by_name(name, &params)?;
    let p = &spec.problem;

    let mut eu = Section::new(&format!("{} expected utilities", spec.name), &["action", "EU", "CEU"]);
    for a in p.actions() {
        eu.push(row![a.as_str(), p.evidential_eu(a)?, p.causal_eu(a)?]);
    }

    let mut presc = Section::new("prescriptions", &["theory", "best", "chosen"]);
    for theory in [Theory::Bdt, Theory::Cdt] {
        let pr = p.prescribe(theory)?;
        presc.push(row![theory.to_string(), pr.best_actions.join(" "), pr.chosen()]);
    }

    let mut summary = Section::new("summary", &["quantity", "value"]);
    summary.push(row!["newcomb_type", p.is_newcomb_type()?]);
    summary.push(row!["decomposition_residual", p.evidential_decomposition_residual()?]);
    let violations = p.hypotheses().map_or(0, |h| h.validate_screening().len());
    summary.push(row!["screening_violations", violations]);

    let mut notes = Section::new("notes", &["note"]);
    for n in &spec.notes {
        notes.push(row![n.as_str()]);
    }
    Ok(Report {
        command: "scenario".into(),
        sections: vec![eu, presc, summary, notes],
    })
}

fn bell_game_report(args: &BellGameArgs, seed: u64) -> Result<Report, CliError> {
    let defaults = GameConfig::default();
    let (win_payout, decline_payout, lose_payout) = match args.payouts.as_deref() {
        None => (defaults.win_payout, defaults.decline_payout, defaults.lose_payout),
        Some(&[w, d, l]) => (w, d, l),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "payouts need exactly three values, got {}",
                other.len()
            )))
        }
    };
    let mechanism = args.mechanism.unwrap_or(MechanismChoice::Quantum);
    let config = GameConfig {
        n_pairs: args.pairs.unwrap_or(DEFAULT_PAIRS),
        threshold: args.threshold.unwrap_or(DEFAULT_THRESHOLD),
        win_payout,
        decline_payout,
        lose_payout,
        mechanism: mechanism.into(),
        seed,
    };
    let epsilon = args.epsilon.unwrap_or(DEFAULT_EPSILON);
    let semantics: CdtSemantics = args.semantics.unwrap_or(SemanticsChoice::Expectation).into();
    let agents = match args.agent.unwrap_or(AgentChoice::Both) {
        AgentChoice::Cdt => vec![Agent::causal(epsilon, semantics)?],
        AgentChoice::Bdt => vec![Agent::bayesian_quantum()],
        AgentChoice::Both => vec![Agent::causal(epsilon, semantics)?, Agent::bayesian_quantum()],
    };
    let ledger = run_tournament(&config, &agents, args.sessions.unwrap_or(DEFAULT_SESSIONS))?;

    let mut setup = Section::new("game", &["quantity", "value"]);
    setup.push(row!["mechanism", config.mechanism.name()]);
    setup.push(row!["pairs", config.n_pairs]);
    setup.push(row!["threshold", config.threshold]);
    setup.push(row!["seed", seed.to_string()]);
    setup.push(row!["mechanism_expected_f", config.mechanism.expected_f()]);

    let mut summary = Section::new(
        "bankroll",
        &["agent", "sessions", "played", "declined", "wins", "win_rate", "total", "mean"],
    );
    for a in &ledger.agents {
        summary.push(row![
            a.agent.as_str(),
            a.sessions.len(),
            a.sessions.len() - a.declines(),
            a.declines(),
            a.wins(),
            a.win_rate(),
            a.total(),
            a.mean(),
        ]);
    }

    let mut sessions = Section::new("sessions", &["agent", "session", "decision", "f_statistic", "won", "payout"]);
    for a in &ledger.agents {
        for s in &a.sessions {
            sessions.push(row![
                a.agent.as_str(),
                s.session,
                s.decision.to_string(),
                s.f_statistic,
                s.won,
                s.payout,
            ]);
        }
    }
    Ok(Report {
        command: "bell-game".into(),
        sections: vec![setup, summary, sessions],
    })
}

fn enumerate_report() -> Report {
    let mut table = Section::new("deterministic strategies", &["strategy", "a_r", "a_g", "b_r", "b_g", "F"]);
    let strategies = enumerate_deterministic();
    for s in &strategies {
        table.push(row![
            s.label(),
            s.a_r.to_string(),
            s.a_g.to_string(),
            s.b_r.to_string(),
            s.b_g.to_string(),
            s.f_value(),
        ]);
    }
    let mut summary = Section::new("summary", &["quantity", "value"]);
    summary.push(row!["count", strategies.len()]);
    summary.push(row!["max_f", lhv_chsh_max()]);
    summary.push(row!["all_abs_f_equal_2", strategies.iter().all(|s| s.f_value().abs() == 2)]);
    Report {
        command: "enumerate-lhv".into(),
        sections: vec![table, summary],
    }
}

fn default_epsilon_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 10.0).collect()
}

fn bounds_report(args: &BoundsArgs) -> Result<Report, CliError> {
    let threshold = args.threshold.unwrap_or(DEFAULT_THRESHOLD);
    if !threshold.is_finite() {
        return Err(CliError::Usage(format!("threshold must be finite, got {threshold}")));
    }
    let grid = args.epsilon_grid.clone().unwrap_or_else(default_epsilon_grid);
    let mut table = Section::new("causal bound on F", &["epsilon", "bound"]);
    for e in grid {
        table.push(row![e, mixture_chsh_bound(e)?]);
    }
    let mut summary = Section::new("break-even", &["threshold", "epsilon_star"]);
    summary.push(row![threshold, break_even_credence(threshold)]);
    Ok(Report {
        command: "bounds".into(),
        sections: vec![table, summary],
    })
}

fn repro_report(args: &ReproArgs, seed: u64) -> Result<Report, CliError> {
    let mut rows = Section::new("reproduction", &["item", "value", "reference"]);

    let sg = smoking_gene(0.5)?.problem;
    rows.push(row!["smoking-gene EU(S)", sg.evidential_eu("S")?, -19.0]);
    rows.push(row!["smoking-gene EU(¬S)", sg.evidential_eu("¬S")?, -2.0]);
    for i in 0..=10 {
        let pg = f64::from(i) / 10.0;
        let p = smoking_gene(pg)?.problem;
        let choices = format!(
            "BDT:{} CDT:{}",
            p.prescribe(Theory::Bdt)?.chosen(),
            p.prescribe(Theory::Cdt)?.chosen()
        );
        rows.push(row![format!("smoking-gene P(G)={pg:.1} choices"), choices, "BDT:¬S CDT:S"]);
    }

    let nc = newcomb_classic(0.99, 0.01, 0.5)?.problem;
    rows.push(row!["newcomb EU(A1)", nc.evidential_eu("A1")?, 990_000.0]);
    rows.push(row!["newcomb EU(A2)", nc.evidential_eu("A2")?, 11_000.0]);
    for prior in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let p = newcomb_classic(0.99, 0.01, prior)?.problem;
        let gap = p.causal_eu("A2")? - p.causal_eu("A1")?;
        rows.push(row![format!("newcomb prior={prior:.2} CEU(A2)-CEU(A1)"), gap, 1_000.0]);
    }

    let mb = million_box(1_000_000, 0.999)?.problem;
    rows.push(row!["million-box CEU(closed)", mb.causal_eu("closed")?, 1.0]);
    rows.push(row!["million-box EU(closed)", mb.evidential_eu("closed")?, 999_000.0]);
    rows.push(row!["million-box EU(closed+open)", mb.evidential_eu("closed+open")?, 1_001.0]);
    rows.push(row!["million-box CDT choice", mb.prescribe(Theory::Cdt)?.chosen(), "closed+open"]);
    rows.push(row!["million-box BDT choice", mb.prescribe(Theory::Bdt)?.chosen(), "closed"]);

    let strategies = enumerate_deterministic();
    rows.push(row!["LHV max F", lhv_chsh_max(), 2.0]);
    let min_abs = strategies.iter().map(|s| s.f_value().abs()).min().unwrap_or(0);
    rows.push(row!["LHV min |F|", min_abs, 2]);

    let cfg = tsirelson_config();
    let tsirelson = chsh_of_model(&cfg);
    rows.push(row!["Tsirelson F", tsirelson, 2.0 * std::f64::consts::SQRT_2]);
    let mc = GameConfig {
        n_pairs: REPRO_MC_PAIRS,
        seed,
        ..GameConfig::default()
    };
    let mut worst: f64 = 0.0;
    for k in 0..REPRO_MC_SEEDS {
        let f = press_boxes(&mc, &mut session_rng(seed.wrapping_add(k), 0, 0))?.statistic.f_statistic;
        worst = worst.max((f - tsirelson).abs());
    }
    rows.push(row![
        format!("empirical F, {REPRO_MC_SEEDS} seeds x {REPRO_MC_PAIRS} pairs, max |F - 2√2|"),
        worst,
        "< 0.03"
    ]);

    rows.push(row!["bound at epsilon=0", mixture_chsh_bound(0.0)?, "2.8284271"]);
    rows.push(row!["bound at epsilon=0.1", mixture_chsh_bound(0.1)?, "2.7455844"]);
    rows.push(row!["break-even epsilon at T=2.8", break_even_credence(2.8), "0.0343146"]);

    let sessions = args.sessions.unwrap_or(DEFAULT_SESSIONS);
    let game = GameConfig {
        n_pairs: args.pairs.unwrap_or(DEFAULT_PAIRS),
        seed,
        ..GameConfig::default()
    };
    let agents = [
        Agent::causal(DEFAULT_EPSILON, CdtSemantics::ExpectationRule)?,
        Agent::bayesian_quantum(),
    ];
    let ledger = run_tournament(&game, &agents, sessions)?;
    let (cdt, bdt) = (&ledger.agents[0], &ledger.agents[1]);
    rows.push(row!["tournament CDT declines", cdt.declines(), sessions]);
    rows.push(row!["tournament CDT total", cdt.total(), sessions as f64 * game.decline_payout]);
    rows.push(row!["tournament BDT played", sessions - bdt.declines(), sessions]);
    let p_win = EvidentialModel::quantum().win_probability(game.threshold, game.n_pairs);
    rows.push(row!["tournament BDT wins", bdt.wins(), format!("expected {:.1}", p_win * sessions as f64)]);
    rows.push(row!["tournament BDT mean payout", bdt.mean(), p_win * game.win_payout]);

    Ok(Report {
        command: "repro".into(),
        sections: vec![rows],
    })
}

fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report to `--out` or `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(cli, stdout)
}

fn with_config<T: for<'de> Deserialize<'de> + Default>(
    path: Option<&Path>,
    globals: &mut GlobalKeys,
) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let (file_globals, rest) = load_config::<T>(path)?;
    globals.seed = globals.seed.or(file_globals.seed);
    globals.format = globals.format.or(file_globals.format);
    if globals.out.is_none() {
        globals.out = file_globals.out;
    }
    Ok(rest)
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut g = GlobalKeys {
        seed: cli.seed,
        format: cli.format,
        out: cli.out,
    };
    let config = cli.config.as_deref();
    let report = match cli.command {
        Command::Scenario(mut a) => {
            a.merge(with_config(config, &mut g)?);
            scenario_report(&a)?
        }
        Command::BellGame(mut a) => {
            a.merge(with_config(config, &mut g)?);
            bell_game_report(&a, g.seed.unwrap_or(DEFAULT_SEED))?
        }
        Command::EnumerateLhv(_) => {
            with_config::<EnumerateArgs>(config, &mut g)?;
            enumerate_report()
        }
        Command::Bounds(mut a) => {
            a.merge(with_config(config, &mut g)?);
            bounds_report(&a)?
        }
        Command::Repro(mut a) => {
            a.merge(with_config(config, &mut g)?);
            repro_report(&a, g.seed.unwrap_or(DEFAULT_SEED))?
        }
    };
    let text = report.render(g.format.unwrap_or(Format::Table));
    match g.out {
        Some(path) => {
            let path = resolve_out(&path);
            fs::write(&path, text).map_err(|source| CliError::Io {
                context: format!("writing {}", path.display()),
                source,
            })
        }
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            context: "writing stdout".into(),
            source,
        }),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    match execute(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
