//! Bayesian optimization walkthrough on a 1-d toy objective, including a
//! constant-liar batch round and the trial-log round trip.
//!
//! Run: cargo run -p sapaugment --example bo_quadratic

use sapaugment::search::{
    fit_gp, DimSpec, GpConfig, Scale, SearchConfig, SearchSpace, SearchState, TrialEvent,
};
use sapaugment::seeding::stream;

fn main() -> sapaugment::Result<()> {
    let space = SearchSpace::new(vec![DimSpec {
        name: "x".into(),
        low: 0.0,
        high: 1.0,
        scale: Scale::Linear,
    }])?;
    let objective = |x: f64| -(x - 0.3) * (x - 0.3);

    let config = SearchConfig { n_init: 5, seed: 11, ..SearchConfig::default() };
    let mut state = SearchState::new(space.clone(), config);
    let mut events = Vec::new();

    // sequential phase
    for round in 0..18u64 {
        let mut rng = stream(11, &[round]);
        let trial = state.suggest(1, &mut rng)?.remove(0);
        events.push(TrialEvent::suggest(&trial, &space, TrialEvent::now()));
        let value = objective(trial.point[0]);
        state.observe(trial.id, value)?;
        events.push(TrialEvent::observe(trial.id, value, TrialEvent::now()));
        let phase = if round < 5 { "init" } else { "ei" };
        println!("trial {:>2} [{phase}]  x = {:.4}  f = {:+.5}", trial.id, trial.point[0], value);
    }

    // one constant-liar batch: four suggestions before any of them reports
    let mut rng = stream(11, &[99]);
    let batch = state.suggest(4, &mut rng)?;
    println!(
        "liar batch: {:?}",
        batch.iter().map(|t| (t.point[0] * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
    for trial in &batch {
        state.observe(trial.id, objective(trial.point[0]))?;
    }

    let best = state.best()?;
    println!(
        "best after {} trials: x = {:.4} (true optimum 0.3), f = {:+.6}",
        state.trials().len(),
        best.point[0],
        best.objective.unwrap()
    );

    // the fitted surrogate around the optimum
    let model = fit_gp(state.trials(), &space, &GpConfig::default())?;
    println!("fitted noise std: {:.2e}", model.noise_std());

    // events alone rebuild the history
    let mut rebuilt = SearchState::new(space, SearchConfig { n_init: 5, seed: 11, ..SearchConfig::default() });
    rebuilt.replay(&events)?;
    println!("replayed {} events -> {} trials", events.len(), rebuilt.trials().len());
    Ok(())
}
