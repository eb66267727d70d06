use serde::{Deserialize, Serialize};

use super::operators::StepLimits;
use crate::case_study::EsSection;
use crate::error::{Error, Result};

/// Strategy parameters of the (μ,η) evolution strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsConfig {
    /// Parents kept per generation (μ).
    pub mu: usize,
    /// Children produced per generation (η).
    pub eta: usize,
    /// Initial mutation strength for every component.
    pub sigma_init: f64,
    /// Global learning rate τ′. `None` uses 1/√(2l).
    pub tau_global: Option<f64>,
    /// Per-component learning rate τ. `None` uses 1/√(2√l).
    pub tau_local: Option<f64>,
    /// Weight of the first parent in intermediate recombination of σ.
    pub alpha: f64,
    /// Generations without strict improvement of the best record before stopping.
    pub stall_limit: usize,
    /// Hard cap on generations.
    pub max_generations: usize,
    pub seed: u64,
    /// Lower bound applied to every mutated σ.
    pub sigma_floor: f64,
    /// Upper bound on every mutated σ as a multiple of its component's box
    /// width. Infinite disables it. Without a ceiling, clipping makes large
    /// steps free and σ drifts upward without limit.
    pub sigma_ceiling: f64,
}

impl Default for EsConfig {
    fn default() -> Self {
        Self {
            mu: 15,
            eta: 105,
            sigma_init: 3.0,
            tau_global: None,
            tau_local: None,
            alpha: 0.5,
            stall_limit: 1000,
            max_generations: 100_000,
            seed: 0,
            sigma_floor: 1e-8,
            sigma_ceiling: 1.0,
        }
    }
}

impl EsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mu < 1 {
            return Err(Error::Config("mu must be >= 1".into()));
        }
        if self.eta <= self.mu {
            return Err(Error::Config(format!(
                "eta ({}) must exceed mu ({})",
                self.eta, self.mu
            )));
        }
        if !(self.sigma_init > 0.0 && self.sigma_init.is_finite()) {
            return Err(Error::Config("sigma_init must be finite and > 0".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config("alpha must lie in (0, 1)".into()));
        }
        if self.stall_limit < 1 {
            return Err(Error::Config("stall_limit must be >= 1".into()));
        }
        if self.max_generations < 1 {
            return Err(Error::Config("max_generations must be >= 1".into()));
        }
        if self.sigma_floor.is_nan() || self.sigma_floor <= 0.0 {
            return Err(Error::Config("sigma_floor must be > 0".into()));
        }
        if self.sigma_ceiling.is_nan() || self.sigma_ceiling <= 0.0 {
            return Err(Error::Config(
                "sigma_ceiling must be > 0 (inf disables it)".into(),
            ));
        }
        for (name, tau) in [
            ("tau_global", self.tau_global),
            ("tau_local", self.tau_local),
        ] {
            if let Some(t) = tau {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::Config(format!("{name} must be finite and >= 0")));
                }
            }
        }
        Ok(())
    }

    /// `(τ′, τ)` for a genome of length `l`.
    pub fn learning_rates(&self, l: usize) -> (f64, f64) {
        let l = l as f64;
        (
            self.tau_global.unwrap_or_else(|| 1.0 / (2.0 * l).sqrt()),
            self.tau_local
                .unwrap_or_else(|| 1.0 / (2.0 * l.sqrt()).sqrt()),
        )
    }

    /// Applies the set fields of a document `[es]` section.
    pub fn apply(&mut self, section: &EsSection) {
        let EsSection {
            mu,
            eta,
            sigma_init,
            alpha,
            stall_limit,
            max_generations,
            seed,
            sigma_floor,
            sigma_ceiling,
        } = section;
        self.mu = mu.unwrap_or(self.mu);
        self.eta = eta.unwrap_or(self.eta);
        self.sigma_init = sigma_init.unwrap_or(self.sigma_init);
        self.alpha = alpha.unwrap_or(self.alpha);
        self.stall_limit = stall_limit.unwrap_or(self.stall_limit);
        self.max_generations = max_generations.unwrap_or(self.max_generations);
        self.seed = seed.unwrap_or(self.seed);
        self.sigma_floor = sigma_floor.unwrap_or(self.sigma_floor);
        self.sigma_ceiling = sigma_ceiling.unwrap_or(self.sigma_ceiling);
    }

    pub fn step_limits(&self) -> StepLimits {
        StepLimits {
            floor: self.sigma_floor,
            ceiling: self.sigma_ceiling,
        }
    }
}
