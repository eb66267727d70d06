//! Grid oracle for the profit-rate optimum, independent of the evolution strategy.
//!
//! Unit cost and unit time are sums of per-operation terms and every
//! constraint involves a single operation, so for a fixed λ the parametric
//! problem `min C(x) + λ T(x)` splits into one 2-D grid search per operation.
//! Dinkelbach's iteration on λ then yields the exact maximum of
//! `(S_p - C) / T` over the full product grid.
//!
//! Only points on the lower convex hull of an operation's feasible
//! `(time, cost)` cloud can minimise `cost + λ·time` for any λ, so each grid
//! is scanned once and the Dinkelbach loop runs over the hulls.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::case_study::OracleSection;
use crate::error::{Error, Result};
use crate::model::{Bounds, DecisionVector, Evaluator, MillingPlan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per axis, endpoints included.
    pub resolution: usize,
    pub dinkelbach_tolerance: f64,
    pub max_dinkelbach_iterations: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            resolution: 500,
            dinkelbach_tolerance: 1e-12,
            max_dinkelbach_iterations: 100,
        }
    }
}

impl GridSpec {
    pub fn with_resolution(resolution: usize) -> Self {
        Self {
            resolution,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::Config(format!(
                "grid resolution must be >= 2 (got {})",
                self.resolution
            )));
        }
        if self.dinkelbach_tolerance.is_nan() || self.dinkelbach_tolerance <= 0.0 {
            return Err(Error::Config("dinkelbach tolerance must be > 0".into()));
        }
        if self.max_dinkelbach_iterations < 1 {
            return Err(Error::Config(
                "max dinkelbach iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn apply(&mut self, section: &OracleSection) {
        self.resolution = section.resolution.unwrap_or(self.resolution);
        self.dinkelbach_tolerance = section
            .dinkelbach_tolerance
            .unwrap_or(self.dinkelbach_tolerance);
        self.max_dinkelbach_iterations = section
            .max_dinkelbach_iterations
            .unwrap_or(self.max_dinkelbach_iterations);
    }
}

/// `k`-th of `resolution` evenly spaced points on `b`, endpoints exact.
///
/// Written as `lower + (k / (r-1))·width` so that refining `r` to `2r-1`
/// reproduces every old coordinate bit for bit.
pub fn grid_coordinate(b: Bounds, k: usize, resolution: usize) -> f64 {
    let last = resolution - 1;
    if k >= last {
        return b.upper;
    }
    b.lower + (k as f64 / last as f64) * b.width()
}

/// A feasible grid point of one operation with its cost and time summands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub speed: f64,
    pub feed: f64,
    pub cost: f64,
    pub time: f64,
}

impl GridPoint {
    pub fn weighted(&self, lambda: f64) -> f64 {
        self.cost + lambda * self.time
    }
}

fn operation_point(ev: &Evaluator, op: usize, v: f64, f: f64) -> Result<Option<GridPoint>> {
    Ok(ev.operation_terms(op, v, f)?.map(|(cost, time)| GridPoint {
        speed: v,
        feed: f,
        cost,
        time,
    }))
}

/// Exhaustive scan: the feasible grid point of operation `op_index`
/// minimising `cost + λ·time`, first in (speed, feed) index order on ties.
/// `None` when no grid point of the operation is feasible.
pub fn per_op_grid_min(
    op_index: usize,
    lambda: f64,
    ev: &Evaluator,
    grid: &GridSpec,
) -> Result<Option<(GridPoint, f64)>> {
    grid.validate()?;
    let op = ev.plan().operation(op_index)?;
    let (vb, fb) = (op.speed_bounds, op.feed_bounds);
    let r = grid.resolution;
    let mut best: Option<(GridPoint, f64)> = None;
    for i in 0..r {
        let v = grid_coordinate(vb, i, r);
        for j in 0..r {
            let f = grid_coordinate(fb, j, r);
            if let Some(p) = operation_point(ev, op_index, v, f)? {
                let value = p.weighted(lambda);
                if best.map_or(true, |(_, b)| value < b) {
                    best = Some((p, value));
                }
            }
        }
    }
    Ok(best)
}

/// Lower convex hull of `(time, cost)`, sorted by increasing time.
fn lower_hull(mut pts: Vec<GridPoint>) -> Vec<GridPoint> {
    pts.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.cost.total_cmp(&b.cost)));
    let mut hull: Vec<GridPoint> = Vec::new();
    for p in pts {
        if hull.last().is_some_and(|h| h.time == p.time) {
            // same time, higher or equal cost
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross =
                (b.time - a.time) * (p.cost - a.cost) - (b.cost - a.cost) * (p.time - a.time);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Candidate minimisers of one operation for every λ.
fn operation_hull(ev: &Evaluator, op_index: usize, r: usize) -> Result<Vec<GridPoint>> {
    let op = ev.plan().operation(op_index)?;
    let (vb, fb) = (op.speed_bounds, op.feed_bounds);
    let mut hull = Vec::new();
    let mut row = Vec::with_capacity(r);
    for i in 0..r {
        let v = grid_coordinate(vb, i, r);
        row.clear();
        for j in 0..r {
            let f = grid_coordinate(fb, j, r);
            if let Some(p) = operation_point(ev, op_index, v, f)? {
                row.push(p);
            }
        }
        if !row.is_empty() {
            hull.extend_from_slice(&row);
            hull = lower_hull(hull);
        }
    }
    Ok(hull)
}

fn hull_min(hull: &[GridPoint], lambda: f64) -> GridPoint {
    *hull
        .iter()
        .min_by(|a, b| a.weighted(lambda).total_cmp(&b.weighted(lambda)))
        .expect("hull is non-empty")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub x: DecisionVector,
    pub unit_cost: f64,
    pub unit_time: f64,
    pub profit_rate: f64,
    /// λ values visited, starting with λ₀.
    pub lambda_trace: Vec<f64>,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OracleOutcome {
    Optimal(OracleSolution),
    /// Numbers of the operations with no feasible grid point.
    Infeasible {
        operations: Vec<u32>,
    },
}

impl OracleOutcome {
    pub fn solution(&self) -> Option<&OracleSolution> {
        match self {
            OracleOutcome::Optimal(s) => Some(s),
            OracleOutcome::Infeasible { .. } => None,
        }
    }
}

/// Maximises profit rate over the product grid with Dinkelbach's method.
pub fn dinkelbach_solve(plan: &MillingPlan, grid: &GridSpec) -> Result<OracleOutcome> {
    grid.validate()?;
    let ev = Evaluator::new(plan)?;
    let hulls: Vec<Vec<GridPoint>> = (0..plan.len())
        .into_par_iter()
        .map(|i| operation_hull(&ev, i, grid.resolution))
        .collect::<Result<_>>()?;

    let empty: Vec<u32> = hulls
        .iter()
        .zip(&plan.operations)
        .filter(|(h, _)| h.is_empty())
        .map(|(_, op)| op.number)
        .collect();
    if !empty.is_empty() {
        return Ok(OracleOutcome::Infeasible { operations: empty });
    }

    let ec = &plan.economics;
    let fixed_cost = ec.material_cost + ec.time_rate() * ec.setup_time;
    let fixed_time = ec.setup_time;
    let totals = |pts: &[GridPoint]| {
        let cost = pts.iter().fold(fixed_cost, |acc, p| acc + p.cost);
        let time = pts.iter().fold(fixed_time, |acc, p| acc + p.time);
        (cost, time, (ec.sale_price - cost) / time)
    };

    let mid = DecisionVector::midpoint(plan);
    let mut lambda = if ev.feasible(&mid.to_genome())? {
        ev.evaluate(&mid.to_genome())?.profit_rate
    } else {
        0.0
    };
    let mut trace = vec![lambda];
    for _ in 0..grid.max_dinkelbach_iterations {
        let pts: Vec<GridPoint> = hulls.iter().map(|h| hull_min(h, lambda)).collect();
        let (_, _, next) = totals(&pts);
        trace.push(next);
        let step = (next - lambda).abs();
        lambda = next;
        if step < grid.dinkelbach_tolerance {
            let x = DecisionVector {
                speeds: pts.iter().map(|p| p.speed).collect(),
                feeds: pts.iter().map(|p| p.feed).collect(),
            };
            let eval = ev.evaluate(&x.to_genome())?;
            return Ok(OracleOutcome::Optimal(OracleSolution {
                x,
                unit_cost: eval.unit_cost,
                unit_time: eval.unit_time,
                profit_rate: eval.profit_rate,
                lambda_trace: trace,
                resolution: grid.resolution,
            }));
        }
    }
    let last_step = match trace.as_slice() {
        [.., a, b] => (b - a).abs(),
        _ => f64::NAN,
    };
    Err(Error::NonConvergence {
        iterations: grid.max_dinkelbach_iterations,
        last_step,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_study::builtin_case;

    fn case_evaluator() -> Evaluator {
        Evaluator::new(&builtin_case().0).unwrap()
    }

    #[test]
    fn grid_endpoints_and_refinement() {
        let b = Bounds::new(0.05, 0.4);
        assert_eq!(grid_coordinate(b, 0, 7), 0.05);
        assert_eq!(grid_coordinate(b, 6, 7), 0.4);
        for k in 0..7 {
            assert_eq!(grid_coordinate(b, k, 7), grid_coordinate(b, 2 * k, 13));
        }
    }

    #[test]
    fn resolution_below_two_is_rejected() {
        let (plan, _) = builtin_case();
        let err = dinkelbach_solve(&plan, &GridSpec::with_resolution(1)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn zero_lambda_minimises_cost_alone() {
        let ev = case_evaluator();
        let grid = GridSpec::with_resolution(40);
        let (p, value) = per_op_grid_min(1, 0.0, &ev, &grid).unwrap().unwrap();
        assert_eq!(value, p.cost);
        let op = &ev.plan().operations[1];
        for i in 0..40 {
            for j in 0..40 {
                let v = grid_coordinate(op.speed_bounds, i, 40);
                let f = grid_coordinate(op.feed_bounds, j, 40);
                if let Some((c, _)) = ev.operation_terms(1, v, f).unwrap() {
                    assert!(p.cost <= c);
                }
            }
        }
    }

    #[test]
    fn single_feasible_point_is_found() {
        let (mut plan, _) = builtin_case();
        // resolution 2 gives V in {40, 70}, f in {0.05, 0.5}; the finish limit
        // rules out f = 0.5 and the power limit rules out V = 70
        plan.operations[1].surface_finish = Some(1.0);
        plan.operations[1].speed_bounds = Bounds::new(40.0, 70.0);
        plan.machine.motor_power = 0.55;
        let ev = Evaluator::new(&plan).unwrap();
        let grid = GridSpec::with_resolution(2);
        let mut feasible = Vec::new();
        for v in [40.0, 70.0] {
            for f in [0.05, 0.5] {
                if ev.operation_terms(1, v, f).unwrap().is_some() {
                    feasible.push((v, f));
                }
            }
        }
        assert_eq!(feasible, vec![(40.0, 0.05)]);
        let (p, _) = per_op_grid_min(1, 1.3, &ev, &grid).unwrap().unwrap();
        assert_eq!((p.speed, p.feed), (40.0, 0.05));
    }

    #[test]
    fn hull_minimum_matches_exhaustive_scan() {
        let ev = case_evaluator();
        let grid = GridSpec::with_resolution(60);
        for op in 0..5 {
            let hull = operation_hull(&ev, op, 60).unwrap();
            for lambda in [-3.0, 0.0, 0.5, 1.0, 1.378, 2.82, 10.0] {
                let (_, exhaustive) = per_op_grid_min(op, lambda, &ev, &grid).unwrap().unwrap();
                let via_hull = hull_min(&hull, lambda).weighted(lambda);
                assert!(
                    (via_hull - exhaustive).abs() <= 1e-12 * exhaustive.abs().max(1.0),
                    "op {op} λ {lambda}: {via_hull} vs {exhaustive}"
                );
            }
        }
    }

    #[test]
    fn lambda_trace_is_non_decreasing() {
        let (plan, _) = builtin_case();
        let out = dinkelbach_solve(&plan, &GridSpec::with_resolution(100)).unwrap();
        let s = out.solution().unwrap();
        assert!(
            s.lambda_trace.windows(2).all(|w| w[1] >= w[0]),
            "{:?}",
            s.lambda_trace
        );
        assert_eq!(*s.lambda_trace.last().unwrap(), s.profit_rate);
    }

    #[test]
    fn infeasible_operation_is_reported() {
        let (mut plan, _) = builtin_case();
        plan.operations[0].feed_bounds = Bounds::new(0.2, 0.4);
        let out = dinkelbach_solve(&plan, &GridSpec::with_resolution(20)).unwrap();
        assert_eq!(
            out,
            OracleOutcome::Infeasible {
                operations: vec![1]
            }
        );
    }

    #[test]
    fn non_convergence_carries_trace() {
        let (plan, _) = builtin_case();
        let grid = GridSpec {
            resolution: 50,
            dinkelbach_tolerance: 1e-12,
            max_dinkelbach_iterations: 1,
        };
        match dinkelbach_solve(&plan, &grid) {
            Err(Error::NonConvergence { trace, .. }) => assert_eq!(trace.len(), 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
