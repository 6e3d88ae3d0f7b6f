//! Property suites run by `galimech invariants` and the check commands.

pub mod affine;
pub mod dynamics;
pub mod galilean;
pub mod generating;
pub mod sample;

use clap::ValueEnum;

use crate::config::ScenarioConfig;
use crate::report::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Core,
    Dynamics,
    Generating,
    Affine,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Fam1,
    Fam2,
    Fam3,
    Fam4,
    #[value(name = "example31")]
    Example31,
}

fn run_one(suite: Suite, config: &ScenarioConfig, seed: u64) -> Vec<Check> {
    match suite {
        Suite::Core => galilean::run(seed, &config.tolerances),
        Suite::Dynamics => dynamics::run(config, seed),
        Suite::Generating => generating::run(config, seed),
        Suite::Affine => affine::run(seed, &config.tolerances),
        Suite::All => unreachable!("expanded by run"),
    }
}

/// Checks of `suite`, in a fixed order. `All` runs its parts on separate threads.
pub fn run(suite: Suite, config: &ScenarioConfig, seed: u64) -> Vec<Check> {
    if suite != Suite::All {
        return run_one(suite, config, seed);
    }
    let parts = [Suite::Core, Suite::Dynamics, Suite::Generating, Suite::Affine];
    std::thread::scope(|s| {
        let handles: Vec<_> = parts.iter().map(|&p| s.spawn(move || run_one(p, config, seed))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite threads do not panic")).collect()
    })
}
