//! A local factory that knows the buttons in advance reproduces the quantum
//! statistics, at the price of statistical independence.
use newcomb_bell::causal_models::{
    check_no_signalling, check_statistical_independence, chsh_of_model, superdeterministic_factory,
};
use newcomb_bell::quantum::tsirelson_config;

fn main() {
    let factory = superdeterministic_factory(&tsirelson_config());
    println!("F seen by the players:          {:.9}", chsh_of_model(&factory.operational()));
    println!("F if buttons were independent:  {:.9}", chsh_of_model(&factory));
    println!("statistical independence holds: {}", check_statistical_independence(&factory));
    println!("no-signalling holds:            {}", check_no_signalling(&factory.operational()));
}
