//! Newcomb's problem: where one-boxing stops paying for the evidentialist.
use newcomb_bell::decision::Theory;
use newcomb_bell::scenarios::newcomb_classic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = newcomb_classic(0.99, 0.01, 0.5)?.problem;
    println!("EU(A1) = {}, EU(A2) = {}", p.evidential_eu("A1")?, p.evidential_eu("A2")?);

    println!("\nprior  CEU(A1)     CEU(A2)");
    for prior in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let p = newcomb_classic(0.99, 0.01, prior)?.problem;
        println!("{prior:<5}  {:>10.1}  {:>10.1}", p.causal_eu("A1")?, p.causal_eu("A2")?);
    }

    // One-boxing wins evidentially iff p1 - p2 > 0.001.
    println!("\np1 - p2    BDT  CDT  newcomb-type");
    for gap in [0.0005, 0.002, 0.5] {
        let p = newcomb_classic(0.5 + gap, 0.5, 0.5)?.problem;
        println!(
            "{gap:<9}  {:>3}  {:>3}  {}",
            p.prescribe(Theory::Bdt)?.chosen(),
            p.prescribe(Theory::Cdt)?.chosen(),
            p.is_newcomb_type()?
        );
    }
    Ok(())
}
