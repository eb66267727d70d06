//! Variation and selection operators.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::EsConfig;
use crate::error::{Error, Result};
use crate::model::{Bounds, Evaluation};

/// Object variables, their mutation strengths, and (once evaluated) fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    /// `[V_1..V_m, f_1..f_m]`.
    pub genome: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub evaluation: Option<Evaluation>,
}

impl Individual {
    pub fn new(genome: Vec<f64>, sigmas: Vec<f64>) -> Self {
        Self {
            genome,
            sigmas,
            evaluation: None,
        }
    }

    /// Death-penalty fitness, `None` until evaluated.
    pub fn fitness(&self) -> Option<f64> {
        self.evaluation.map(|e| e.fitness())
    }

    pub fn is_feasible(&self) -> bool {
        self.evaluation.is_some_and(|e| e.feasible)
    }

    pub fn len(&self) -> usize {
        self.genome.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genome.is_empty()
    }
}

/// μ individuals drawn uniformly from the box, every σ at `sigma_init`.
pub fn init_population<R: Rng + ?Sized>(
    bounds: &[Bounds],
    config: &EsConfig,
    rng: &mut R,
) -> Vec<Individual> {
    (0..config.mu)
        .map(|_| {
            let genome = bounds
                .iter()
                .map(|b| b.lower + rng.random::<f64>() * b.width())
                .zip(bounds)
                .map(|(x, b)| b.clamp(x))
                .collect();
            Individual::new(genome, vec![config.sigma_init; bounds.len()])
        })
        .collect()
}

/// Discrete recombination on the object variables, intermediate on σ.
pub fn recombine<R: Rng + ?Sized>(
    first: &Individual,
    second: &Individual,
    alpha: f64,
    rng: &mut R,
) -> Result<Individual> {
    if first.genome.len() != second.genome.len() || first.sigmas.len() != second.sigmas.len() {
        return Err(Error::Contract(format!(
            "cannot recombine parents of length {} and {}",
            first.genome.len(),
            second.genome.len()
        )));
    }
    let genome = first
        .genome
        .iter()
        .zip(&second.genome)
        .map(|(&a, &b)| if rng.random::<bool>() { a } else { b })
        .collect();
    let sigmas = first
        .sigmas
        .iter()
        .zip(&second.sigmas)
        .map(|(&a, &b)| alpha * a + (1.0 - alpha) * b)
        .collect();
    Ok(Individual::new(genome, sigmas))
}

/// Standard normal draws consumed by one mutation.
#[derive(Debug, Clone, PartialEq)]
pub struct MutationDraws {
    /// Shared by every component.
    pub global: f64,
    /// One per component, scales σ.
    pub local: Vec<f64>,
    /// One per component, perturbs x.
    pub object: Vec<f64>,
}

impl MutationDraws {
    pub fn sample<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Self {
        let global = rng.sample(StandardNormal);
        let local = (0..l).map(|_| rng.sample(StandardNormal)).collect();
        let object = (0..l).map(|_| rng.sample(StandardNormal)).collect();
        Self {
            global,
            local,
            object,
        }
    }
}

/// Range a mutated σ is held to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLimits {
    /// Absolute lower bound.
    pub floor: f64,
    /// Upper bound as a multiple of the component's box width.
    pub ceiling: f64,
}

impl StepLimits {
    pub fn floor_only(floor: f64) -> Self {
        Self {
            floor,
            ceiling: f64::INFINITY,
        }
    }

    /// Ceiling first, then floor, so the floor always holds.
    pub fn apply(&self, sigma: f64, bounds: Bounds) -> f64 {
        sigma.min(self.ceiling * bounds.width()).max(self.floor)
    }
}

/// Log-normal self-adaptive mutation with explicit draws:
/// σ′ᵢ = limit(σᵢ·exp(τ′·N + τ·Nᵢ)), x′ᵢ = clip(xᵢ + σ′ᵢ·N′ᵢ).
pub fn mutate_with(
    ind: &Individual,
    draws: &MutationDraws,
    (tau_global, tau_local): (f64, f64),
    limits: StepLimits,
    bounds: &[Bounds],
) -> Individual {
    let sigmas: Vec<f64> = ind
        .sigmas
        .iter()
        .zip(&draws.local)
        .zip(bounds)
        .map(|((&s, &n), &b)| {
            limits.apply(s * (tau_global * draws.global + tau_local * n).exp(), b)
        })
        .collect();
    let genome: Vec<f64> = ind
        .genome
        .iter()
        .zip(&sigmas)
        .zip(&draws.object)
        .map(|((&x, &s), &n)| x + s * n)
        .collect();
    Individual::new(clip_to_box(genome, bounds), sigmas)
}

pub fn mutate<R: Rng + ?Sized>(
    ind: &Individual,
    rates: (f64, f64),
    limits: StepLimits,
    bounds: &[Bounds],
    rng: &mut R,
) -> Individual {
    let draws = MutationDraws::sample(ind.genome.len(), rng);
    mutate_with(ind, &draws, rates, limits, bounds)
}

/// Moves every out-of-box component onto the violated bound.
pub fn clip_to_box(mut genome: Vec<f64>, bounds: &[Bounds]) -> Vec<f64> {
    for (x, b) in genome.iter_mut().zip(bounds) {
        *x = b.clamp(*x);
    }
    genome
}

/// Comma selection: the `mu` fittest children, ties kept in generation order.
pub fn select(mut children: Vec<Individual>, mu: usize) -> Result<Vec<Individual>> {
    if children.len() < mu {
        return Err(Error::Contract(format!(
            "cannot select {mu} survivors from {} children",
            children.len()
        )));
    }
    if let Some(i) = children.iter().position(|c| c.evaluation.is_none()) {
        return Err(Error::Contract(format!("child {i} was never evaluated")));
    }
    children.sort_by(|a, b| {
        let (fa, fb) = (a.fitness().unwrap_or(0.0), b.fitness().unwrap_or(0.0));
        fb.total_cmp(&fa)
    });
    children.truncate(mu);
    Ok(children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn evaluated(fitness: f64) -> Individual {
        Individual {
            genome: vec![fitness],
            sigmas: vec![1.0],
            evaluation: Some(Evaluation {
                feasible: fitness != 0.0,
                unit_cost: 0.0,
                unit_time: 1.0,
                profit_rate: fitness,
            }),
        }
    }

    fn case_bounds() -> Vec<Bounds> {
        let (plan, _) = crate::case_study::builtin_case();
        plan.genome_bounds()
    }

    #[test]
    fn initial_population_shape() {
        let bounds = case_bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = init_population(&bounds, &EsConfig::default(), &mut rng);
        assert_eq!(pop.len(), 15);
        for ind in &pop {
            assert_eq!(ind.sigmas, vec![3.0; 10]);
            assert!(ind.genome.iter().zip(&bounds).all(|(x, b)| b.contains(*x)));
        }
    }

    #[test]
    fn initial_population_is_seeded() {
        let bounds = case_bounds();
        let a = init_population(
            &bounds,
            &EsConfig::default(),
            &mut ChaCha8Rng::seed_from_u64(5),
        );
        let b = init_population(
            &bounds,
            &EsConfig::default(),
            &mut ChaCha8Rng::seed_from_u64(5),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_box_pins_component() {
        let bounds = vec![Bounds::new(2.5, 2.5), Bounds::new(0.0, 1.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for ind in init_population(&bounds, &EsConfig::default(), &mut rng) {
            assert_eq!(ind.genome[0], 2.5);
        }
    }

    #[test]
    fn recombination_of_identical_parents() {
        let p = Individual::new(vec![1.0, 2.0, 3.0], vec![0.5, 0.25, 2.0]);
        let child = recombine(&p, &p, 0.3, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(child.genome, p.genome);
        for (a, b) in child.sigmas.iter().zip(&p.sigmas) {
            assert!((a - b).abs() <= 1e-15 * b);
        }
    }

    #[test]
    fn intermediate_sigma_midpoint() {
        let a = Individual::new(vec![0.0, 0.0], vec![2.0, 4.0]);
        let b = Individual::new(vec![1.0, 1.0], vec![4.0, 8.0]);
        let child = recombine(&a, &b, 0.5, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(child.sigmas, vec![3.0, 6.0]);
    }

    #[test]
    fn recombination_length_mismatch() {
        let a = Individual::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let b = Individual::new(vec![0.0], vec![1.0]);
        let err = recombine(&a, &b, 0.5, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn zero_draws_leave_individual_unchanged() {
        let bounds = case_bounds();
        let ind = Individual::new(
            vec![90.0, 50.0, 50.0, 40.0, 40.0, 0.1, 0.2, 0.2, 0.3, 0.3],
            vec![3.0; 10],
        );
        let draws = MutationDraws {
            global: 0.0,
            local: vec![0.0; 10],
            object: vec![0.0; 10],
        };
        let out = mutate_with(
            &ind,
            &draws,
            (0.223_6, 0.397_6),
            StepLimits::floor_only(1e-8),
            &bounds,
        );
        assert_eq!(out.genome, ind.genome);
        assert_eq!(out.sigmas, ind.sigmas);
    }

    #[test]
    fn log_normal_sigma_update() {
        let ind = Individual::new(vec![0.0], vec![3.0]);
        let draws = MutationDraws {
            global: 1.0,
            local: vec![1.0],
            object: vec![0.0],
        };
        let rates = EsConfig::default().learning_rates(10);
        let out = mutate_with(
            &ind,
            &draws,
            rates,
            StepLimits::floor_only(1e-8),
            &[Bounds::new(-1.0, 1.0)],
        );
        // 3·exp(1/√20 + 1/√(2√10))
        assert!((out.sigmas[0] - 5.583_715_699_784_76).abs() < 1e-12);
    }

    #[test]
    fn sigma_floor_applies_before_object_step() {
        let ind = Individual::new(vec![0.0], vec![1e-3]);
        let draws = MutationDraws {
            global: -50.0,
            local: vec![0.0],
            object: vec![1.0],
        };
        let out = mutate_with(
            &ind,
            &draws,
            (1.0, 1.0),
            StepLimits::floor_only(0.25),
            &[Bounds::new(-1.0, 1.0)],
        );
        assert_eq!(out.sigmas, vec![0.25]);
        assert_eq!(out.genome, vec![0.25]);
    }

    #[test]
    fn clipping_examples() {
        let b = [Bounds::new(60.0, 120.0), Bounds::new(0.05, 0.4)];
        assert_eq!(clip_to_box(vec![130.0, 0.2], &b), vec![120.0, 0.2]);
        assert_eq!(clip_to_box(vec![90.0, 0.2], &b), vec![90.0, 0.2]);
        assert_eq!(clip_to_box(vec![10.0, 0.01], &b), vec![60.0, 0.05]);
    }

    #[test]
    fn selection_keeps_the_fittest() {
        let kids = vec![evaluated(1.0), evaluated(3.0), evaluated(2.0)];
        let kept = select(kids, 2).unwrap();
        let f: Vec<f64> = kept.iter().map(|k| k.fitness().unwrap()).collect();
        assert_eq!(f, vec![3.0, 2.0]);
    }

    #[test]
    fn ceiling_scales_with_box_width() {
        let limits = StepLimits {
            floor: 1e-8,
            ceiling: 0.5,
        };
        assert_eq!(limits.apply(3.0, Bounds::new(0.05, 0.45)), 0.2);
        assert_eq!(limits.apply(3.0, Bounds::new(60.0, 120.0)), 3.0);
        // a degenerate box still respects the floor
        assert_eq!(limits.apply(3.0, Bounds::new(1.0, 1.0)), 1e-8);
        assert_eq!(
            StepLimits::floor_only(1e-8).apply(1e6, Bounds::new(0.0, 1.0)),
            1e6
        );
    }

    #[test]
    fn selection_ties_are_stable() {
        let mut kids: Vec<Individual> = (0..4).map(|_| evaluated(0.0)).collect();
        for (i, k) in kids.iter_mut().enumerate() {
            k.genome[0] = i as f64;
        }
        let kept = select(kids, 2).unwrap();
        assert_eq!(kept[0].genome[0], 0.0);
        assert_eq!(kept[1].genome[0], 1.0);
    }

    #[test]
    fn selection_requires_evaluation() {
        let kids = vec![evaluated(1.0), Individual::new(vec![0.0], vec![1.0])];
        assert!(matches!(select(kids, 1), Err(Error::Contract(_))));
    }

    proptest! {
        #[test]
        fn discrete_genes_come_from_a_parent(
            a in prop::collection::vec(-100.0f64..100.0, 6),
            b in prop::collection::vec(-100.0f64..100.0, 6),
            seed in any::<u64>(),
        ) {
            let p1 = Individual::new(a.clone(), vec![1.0; 6]);
            let p2 = Individual::new(b.clone(), vec![2.0; 6]);
            let child = recombine(&p1, &p2, 0.5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for i in 0..6 {
                prop_assert!(child.genome[i] == a[i] || child.genome[i] == b[i]);
            }
        }

        #[test]
        fn mutation_stays_in_box_and_above_floor(
            seed in any::<u64>(),
            sigma in 1e-6f64..50.0,
        ) {
            let bounds = case_bounds();
            let ind = Individual::new(bounds.iter().map(Bounds::midpoint).collect(), vec![sigma; 10]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rates = EsConfig::default().learning_rates(10);
            let out = mutate(&ind, rates, StepLimits { floor: 1e-4, ceiling: 1.0 }, &bounds, &mut rng);
            prop_assert!(out.genome.iter().zip(&bounds).all(|(x, b)| b.contains(*x)));
            prop_assert!(out.sigmas.iter().all(|s| *s >= 1e-4));
            prop_assert!(out.sigmas.iter().zip(&bounds).all(|(s, b)| *s <= b.width().max(1e-4)));
        }

        #[test]
        fn survivors_dominate_discarded(
            fits in prop::collection::vec(-5.0f64..5.0, 8..40),
            mu in 1usize..8,
        ) {
            let kids: Vec<Individual> = fits.iter().map(|&f| evaluated(f)).collect();
            let mut sorted = fits.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            let kept = select(kids, mu).unwrap();
            let min_kept = kept.iter().map(|k| k.fitness().unwrap()).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(kept.len(), mu);
            if mu < sorted.len() {
                prop_assert!(min_kept >= sorted[mu]);
            }
        }
    }
}
