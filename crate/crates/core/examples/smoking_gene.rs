//! The smoking gene: evidential and causal advice disagree for every prior.
use newcomb_bell::decision::Theory;
use newcomb_bell::scenarios::smoking_gene;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = smoking_gene(0.5)?;
    let p = &spec.problem;
    for a in p.actions() {
        println!("{a:>3}: EU = {:>7.2}  CEU = {:>7.2}", p.evidential_eu(a)?, p.causal_eu(a)?);
    }
    println!("\nP(G)   BDT  CDT");
    for i in 0..=10 {
        let pg = f64::from(i) / 10.0;
        let p = smoking_gene(pg)?.problem;
        println!(
            "{pg:.1}   {:>3}  {:>3}",
            p.prescribe(Theory::Bdt)?.chosen(),
            p.prescribe(Theory::Cdt)?.chosen()
        );
    }
    Ok(())
}
