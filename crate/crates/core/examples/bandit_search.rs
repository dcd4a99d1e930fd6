//! Epsilon-greedy search for the stigma-following probability that most often
//! yields a fair outcome.
//!
//! ```text
//! cargo run --release --example bandit_search -- [runs] [pulls]
//! ```

use fairsim::bandit::{default_episode, run_bandit, BanditConfig};
use fairsim::experiments::RunOptions;
use fairsim::SimConfig;

fn main() -> fairsim::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().expect("integer argument"));
    let config = BanditConfig {
        runs: args.next().unwrap_or(5),
        pulls: args.next().unwrap_or(60),
        episode: SimConfig { max_ticks: 500, ..default_episode() },
        ..BanditConfig::standard_setting()
    };
    config.validate()?;
    let outcome = run_bandit(&config, RunOptions::default())?;

    println!("{} runs x {} pulls", config.runs, config.pulls);
    for (theta, p) in config.actions.iter().zip(&outcome.proportions) {
        println!("  theta {theta:<4} chosen {:>5.1}%  {}", 100.0 * p, "#".repeat((p * 60.0).round() as usize));
    }
    let window = (config.pulls / 4).max(1);
    println!(
        "mean reward: first {window} pulls {:.3}, last {window} pulls {:.3}",
        outcome.mean_reward_over(0..window),
        outcome.mean_reward_over(config.pulls - window..config.pulls)
    );
    for run in outcome.runs.iter().take(3) {
        let best = run.state.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        println!("  run {}: value estimates {:.2?}, greedy theta {}", run.run, run.state.values, config.actions[best]);
    }
    Ok(())
}
