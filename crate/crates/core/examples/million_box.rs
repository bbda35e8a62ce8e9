//! A million closed boxes and one open box, solved in closed form.
use std::time::Instant;

use newcomb_bell::decision::Theory;
use newcomb_bell::scenarios::{million_box, million_box_expanded};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let p = million_box(1_000_000, 0.999)?.problem;
    for a in p.actions() {
        println!("{a:<12} EU = {:>12.3}  CEU = {:>10.6}", p.evidential_eu(a)?, p.causal_eu(a)?);
    }
    println!(
        "BDT takes {:?}, CDT takes {:?} ({:?})",
        p.prescribe(Theory::Bdt)?.chosen(),
        p.prescribe(Theory::Cdt)?.chosen(),
        start.elapsed()
    );

    // The reduction agrees with the full problem on a small instance.
    let small = million_box(5, 0.9)?.problem;
    let full = million_box_expanded(5, 0.9)?.problem;
    println!(
        "n=5: reduced EU(closed) = {:.6}, expanded EU(closed 1) = {:.6}",
        small.evidential_eu("closed")?,
        full.evidential_eu("closed 1")?
    );
    Ok(())
}
