//! Causal and evidential agents bet on the marble boxes.
//!
//! Usage: bell_game_tournament [sessions] [pairs]
use newcomb_bell::bell_game::{run_tournament, Agent, CdtSemantics, EvidentialModel, GameConfig, Mechanism};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let sessions: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100);
    let pairs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10_000);

    let agents = [
        Agent::causal(0.1, CdtSemantics::ExpectationRule)?,
        Agent::causal(0.1, CdtSemantics::HypothesisConcentration)?,
        Agent::bayesian_quantum(),
    ];
    for mechanism in [Mechanism::quantum(), Mechanism::superdeterministic(), Mechanism::best_lhv()] {
        let config = GameConfig {
            n_pairs: pairs,
            mechanism,
            ..GameConfig::default()
        };
        let ledger = run_tournament(&config, &agents, sessions)?;
        println!("{} boxes, {pairs} pairs, {sessions} sessions", ledger.mechanism);
        for a in &ledger.agents {
            println!(
                "  {:<36} declined {:>3}  won {:>3}  mean {:>12.2}",
                a.agent,
                a.declines(),
                a.wins(),
                a.mean()
            );
        }
    }
    let p = EvidentialModel::quantum().win_probability(2.8, pairs);
    println!("evidential win probability per session at {pairs} pairs: {p:.4}");
    Ok(())
}
