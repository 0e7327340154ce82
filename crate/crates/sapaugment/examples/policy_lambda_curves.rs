//! Prints rank → λ curves for a few policy hyper-parameter settings,
//! showing how `a` shifts the curve up and `s` sharpens it toward a step.
//!
//! Run: cargo run -p sapaugment --example policy_lambda_curves

use sapaugment::policy::{lambda_of_rank, PolicyParams};

fn main() -> sapaugment::Result<()> {
    let batch = 32;
    let settings = [
        (5.0, 0.3),
        (5.0, 0.5),
        (5.0, 0.7),
        (2.0, 0.5),
        (40.0, 0.5),
        (200.0, 0.5),
    ];

    print!("{:>6} {:>6}", "rank", "x");
    for (s, a) in settings {
        print!("  s={s:<4} a={a:<3}");
    }
    println!();

    for rank in 1..=batch {
        print!("{rank:>6} {:>6.3}", rank as f64 / batch as f64);
        for (s, a) in settings {
            let params = PolicyParams::new(s, a, 1.0)?;
            print!("  {:>12.6}", lambda_of_rank(&params, rank, batch)?);
        }
        println!();
    }

    println!();
    println!("low ranks (easy samples) get large λ, the hardest rank gets λ = 0;");
    println!("larger a raises every λ, larger s approaches a step function.");
    Ok(())
}
