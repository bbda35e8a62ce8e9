//! How much credence in local models it takes to talk a causalist out of playing.
use newcomb_bell::causal_models::{break_even_credence, chsh_of_model, mixture_chsh_bound, HypothesisMixture, LhvModel};
use newcomb_bell::causal_models::DeterministicStrategy;
use newcomb_bell::prob::FiniteDistribution;
use newcomb_bell::quantum::tsirelson_config;
use newcomb_bell::Sign;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let best = DeterministicStrategy {
        a_r: Sign::Plus,
        a_g: Sign::Plus,
        b_r: Sign::Plus,
        b_g: Sign::Plus,
    };
    let lhv = LhvModel::from_strategies(&FiniteDistribution::point(best));
    println!("eps    bound     mixture F");
    for i in 0..=10 {
        let eps = f64::from(i) / 10.0;
        let mix = HypothesisMixture::new(eps, lhv.clone(), tsirelson_config())?;
        println!("{eps:.1}  {:.6}  {:.6}", mixture_chsh_bound(eps)?, chsh_of_model(&mix));
    }
    for t in [2.5, 2.8, 2.82] {
        println!("threshold {t}: plays only if eps < {:.7}", break_even_credence(t));
    }
    Ok(())
}
