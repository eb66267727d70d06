//! Generation loop, best-record bookkeeping and the stall stop rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::EsConfig;
use super::operators::{init_population, mutate, recombine, select, Individual};
use crate::case_study::plan_warnings;
use crate::error::Result;
use crate::model::{Bounds, DecisionVector, Evaluator, MillingPlan};

/// Best feasible individual seen so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestRecord {
    pub individual: Individual,
    pub fitness: f64,
    pub generation_found: usize,
}

/// Everything the engine carries between generations.
#[derive(Debug, Clone)]
pub struct EsState {
    pub population: Vec<Individual>,
    pub best: Option<BestRecord>,
    pub generation: usize,
    pub evaluations: usize,
    /// Generations since the best record last strictly improved.
    pub stall_counter: usize,
    rng: ChaCha8Rng,
}

/// Best feasible solution returned by a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: DecisionVector,
    pub sigmas: Vec<f64>,
    pub unit_cost: f64,
    pub unit_time: f64,
    pub profit_rate: f64,
    pub generation_found: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// `None` when no feasible individual was ever produced.
    pub best: Option<Solution>,
    pub generations: usize,
    pub evaluations: usize,
    pub seed: u64,
    pub config: EsConfig,
    pub warnings: Vec<String>,
}

impl RunResult {
    pub fn feasible(&self) -> bool {
        self.best.is_some()
    }

    pub fn profit_rate(&self) -> Option<f64> {
        self.best.as_ref().map(|s| s.profit_rate)
    }
}

/// Drives the strategy one generation at a time.
#[derive(Debug, Clone)]
pub struct Engine {
    evaluator: Evaluator,
    bounds: Vec<Bounds>,
    config: EsConfig,
    rates: (f64, f64),
    state: EsState,
}

impl Engine {
    pub fn new(plan: &MillingPlan, config: &EsConfig) -> Result<Self> {
        config.validate()?;
        let evaluator = Evaluator::new(plan)?;
        let bounds = plan.genome_bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let population = init_population(&bounds, config, &mut rng);
        Ok(Self {
            rates: config.learning_rates(bounds.len()),
            evaluator,
            bounds,
            config: config.clone(),
            state: EsState {
                population,
                best: None,
                generation: 0,
                evaluations: 0,
                stall_counter: 0,
                rng,
            },
        })
    }

    pub fn state(&self) -> &EsState {
        &self.state
    }

    pub fn bounds(&self) -> &[Bounds] {
        &self.bounds
    }

    pub fn config(&self) -> &EsConfig {
        &self.config
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    /// Whether the stall limit or the generation cap has been reached.
    pub fn finished(&self) -> bool {
        self.state.stall_counter >= self.config.stall_limit
            || self.state.generation >= self.config.max_generations
    }

    /// One generation: η children from random parent pairs, evaluated, the
    /// best μ kept, the best record updated.
    pub fn step(&mut self) -> Result<()> {
        let st = &mut self.state;
        let mu = st.population.len();
        let mut children = Vec::with_capacity(self.config.eta);
        for _ in 0..self.config.eta {
            let (i, j) = pick_parents(mu, &mut st.rng);
            let child = recombine(
                &st.population[i],
                &st.population[j],
                self.config.alpha,
                &mut st.rng,
            )?;
            children.push(mutate(
                &child,
                self.rates,
                self.config.step_limits(),
                &self.bounds,
                &mut st.rng,
            ));
        }

        // Every random draw of the generation is made above; evaluation is pure.
        for child in &mut children {
            child.evaluation = Some(self.evaluator.evaluate(&child.genome)?);
        }
        st.evaluations += children.len();
        st.generation += 1;

        let improved = children
            .iter()
            .filter(|c| c.is_feasible())
            .fold(None::<&Individual>, |acc, c| match acc {
                Some(a) if a.fitness() >= c.fitness() => Some(a),
                _ => Some(c),
            })
            .filter(|c| {
                st.best
                    .as_ref()
                    .map_or(true, |b| c.fitness().is_some_and(|f| f > b.fitness))
            })
            .cloned();
        match improved {
            Some(ind) => {
                st.best = Some(BestRecord {
                    fitness: ind.fitness().unwrap_or(0.0),
                    individual: ind,
                    generation_found: st.generation,
                });
                st.stall_counter = 0;
            }
            None => st.stall_counter += 1,
        }

        st.population = select(children, self.config.mu)?;
        Ok(())
    }

    pub fn into_result(self) -> Result<RunResult> {
        let best = match self.state.best {
            Some(rec) => {
                let eval = self.evaluator.evaluate(&rec.individual.genome)?;
                Some(Solution {
                    x: DecisionVector::from_genome(&rec.individual.genome)?,
                    sigmas: rec.individual.sigmas,
                    unit_cost: eval.unit_cost,
                    unit_time: eval.unit_time,
                    profit_rate: eval.profit_rate,
                    generation_found: rec.generation_found,
                })
            }
            None => None,
        };
        Ok(RunResult {
            best,
            generations: self.state.generation,
            evaluations: self.state.evaluations,
            seed: self.config.seed,
            warnings: plan_warnings(self.evaluator.plan()),
            config: self.config,
        })
    }
}

/// Two distinct parent indices, or the same one twice when μ = 1.
fn pick_parents<R: Rng + ?Sized>(mu: usize, rng: &mut R) -> (usize, usize) {
    if mu < 2 {
        return (0, 0);
    }
    let i = rng.random_range(0..mu);
    let mut j = rng.random_range(0..mu - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Runs the strategy to completion.
pub fn run(plan: &MillingPlan, config: &EsConfig) -> Result<RunResult> {
    run_with(plan, config, |_| {})
}

/// Runs the strategy, calling `observe` after every generation.
pub fn run_with<F>(plan: &MillingPlan, config: &EsConfig, mut observe: F) -> Result<RunResult>
where
    F: FnMut(&EsState),
{
    let mut engine = Engine::new(plan, config)?;
    while !engine.finished() {
        engine.step()?;
        observe(engine.state());
    }
    engine.into_result()
}
