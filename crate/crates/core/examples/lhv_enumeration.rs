//! Every deterministic local strategy scores F = ±2.
use newcomb_bell::causal_models::{chsh_of_model, enumerate_deterministic, LhvModel};
use newcomb_bell::prob::FiniteDistribution;

fn main() {
    let strategies = enumerate_deterministic();
    for s in &strategies {
        println!("{}  F = {:+}", s.label(), s.f_value());
    }
    let mix = FiniteDistribution::uniform(strategies.clone()).expect("16 strategies");
    let model = LhvModel::from_strategies(&mix);
    println!("uniform mixture: F = {}", chsh_of_model(&model));
    let best = strategies.iter().map(|s| s.f_value()).max().unwrap_or_default();
    println!("max F = {best}");
}
