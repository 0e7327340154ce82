//! Prints a small table of the regularized incomplete beta function and
//! demonstrates the reflection identity I_x(a, b) = 1 − I_{1−x}(b, a).
//!
//! Run: cargo run -p sapaugment --example ibeta_table

use sapaugment::betafn::{inc_beta, ln_gamma, BetaArgs};

fn main() -> sapaugment::Result<()> {
    println!("ln Γ(1) = {:.3e}   ln Γ(5) = {:.12}   ln Γ(0.5) = {:.12}",
        ln_gamma(1.0)?, ln_gamma(5.0)?, ln_gamma(0.5)?);
    println!();

    let shapes = [(1.0, 1.0), (2.0, 3.0), (7.0, 3.0), (0.5, 0.5), (80.0, 40.0)];
    print!("{:>8}", "x");
    for (a, b) in shapes {
        print!("  I_x({a},{b})");
    }
    println!();
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        print!("{x:>8.2}");
        for (a, b) in shapes {
            let v = inc_beta(BetaArgs::new(a, b, x)?)?;
            print!("  {v:>10.6}");
        }
        println!();
    }

    println!();
    println!("reflection residuals |I_x(a,b) + I_(1-x)(b,a) - 1|:");
    for (a, b) in shapes {
        let mut worst = 0.0f64;
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let lhs = inc_beta(BetaArgs::new(a, b, x)?)?;
            let rhs = inc_beta(BetaArgs::new(b, a, 1.0 - x)?)?;
            worst = worst.max((lhs + rhs - 1.0).abs());
        }
        println!("  ({a:>5}, {b:>5}): {worst:.2e}");
    }
    Ok(())
}
