//! The quantum configuration reaching 2√2, analytically and by sampling.
use newcomb_bell::bell_game::{press_boxes, session_rng, GameConfig};
use newcomb_bell::causal_models::{chsh_of_model, check_no_signalling, JointModel, SETTING_PAIRS};
use newcomb_bell::quantum::tsirelson_config;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = tsirelson_config();
    for (a, b) in SETTING_PAIRS {
        println!("E({a}, {b}) = {:+.6}", cfg.correlator(a, b));
    }
    println!("F = {:.9}, no-signalling: {}", chsh_of_model(&cfg), check_no_signalling(&cfg));

    let game = GameConfig {
        n_pairs: 100_000,
        ..GameConfig::default()
    };
    for seed in 0..5 {
        let stat = press_boxes(&game, &mut session_rng(seed, 0, 0))?.statistic;
        println!("seed {seed}: empirical F = {:.4}  cells {:?}", stat.f_statistic, stat.cell_counts);
    }
    Ok(())
}
