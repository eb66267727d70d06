//! Self-adaptive (μ,η) evolution strategy with death-penalty constraints.
//!
//! Each individual carries one mutation strength per object variable.
//! Children are built by discrete recombination of the object variables and
//! intermediate recombination of the strengths, then log-normally mutated and
//! clipped to the speed/feed box. Step sizes are held between an absolute
//! floor and a ceiling proportional to each component's box width.
//! Infeasible children score 0. Parents never survive a generation; the best
//! feasible individual is tracked separately and the run stops once it has
//! not improved for `stall_limit` generations.

mod config;
mod engine;
mod operators;

pub use config::EsConfig;
pub use engine::{run, run_with, BestRecord, Engine, EsState, RunResult, Solution};
pub use operators::{
    clip_to_box, init_population, mutate, mutate_with, recombine, select, Individual,
    MutationDraws, StepLimits,
};
