//! End-to-end policy search on the synthetic harness with a small budget:
//! suggests policy vectors in parallel batches, trains under each candidate,
//! and compares the best found policy against the no-augmentation baseline.
//!
//! Run: cargo run --release -p sapaugment --example policy_search

use rayon::prelude::*;

use sapaugment::harness::{decode_policy_vector, Objective};
use sapaugment::search::{SearchConfig, SearchState};
use sapaugment::seeding::stream;

fn main() -> sapaugment::Result<()> {
    let seed = 42u64;
    let budget = 16;
    let parallel = 4;

    let objective = Objective::with_default_protocol(seed)?;
    let baseline = objective.baseline()?;
    println!("no-augmentation baseline (median of 3 training seeds): {baseline:.4}");

    let mut state = SearchState::new(
        objective.space().clone(),
        SearchConfig { seed, ..SearchConfig::default() },
    );
    while state.trials().len() < budget {
        let round = state.trials().len() as u64;
        let mut rng = stream(seed, &[0x5e66e57, round]);
        let q = parallel.min(budget - state.trials().len());
        let suggested = state.suggest(q, &mut rng)?;
        let results: Vec<(u64, f64)> = suggested
            .par_iter()
            .map(|t| Ok((t.id, objective.evaluate(&t.point)?)))
            .collect::<sapaugment::Result<_>>()?;
        for (id, value) in results {
            state.observe(id, value)?;
            println!("  trial {id:>2}: accuracy {value:.4}");
        }
    }

    let best = state.best()?;
    let policies = decode_policy_vector(objective.space(), &best.point)?;
    println!();
    println!(
        "best policy (trial {}): accuracy {:.4} vs baseline {baseline:.4}",
        best.id,
        best.objective.unwrap()
    );
    println!("{}", serde_json::to_string_pretty(&policies)?);
    Ok(())
}
