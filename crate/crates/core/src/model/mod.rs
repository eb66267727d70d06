//! Milling economics: objective, derived coefficients and constraints.

mod coefficients;
mod constraints;
mod objective;
mod plan;

pub use coefficients::{derive_coefficients, DerivedCoefficients, FinishCoefficient};
pub use constraints::{
    constraint_margins, fitness, is_feasible, BoxCheck, ConstraintKind, OperationMargins,
};
pub use objective::{
    cutting_force, cutting_power, machining_time, operation_cost, operation_time, profit_rate,
    tool_cost, unit_cost, unit_time,
};
pub use plan::{
    Bounds, DecisionVector, EconomicConstants, MachineSpec, MillingPlan, OperationKind,
    OperationSpec, ToolKind, ToolQuality, ToolSpec,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Objective values at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub feasible: bool,
    pub unit_cost: f64,
    pub unit_time: f64,
    pub profit_rate: f64,
}

impl Evaluation {
    /// Death-penalty fitness.
    pub fn fitness(&self) -> f64 {
        if self.feasible {
            self.profit_rate
        } else {
            0.0
        }
    }
}

/// A validated plan together with its coefficients, evaluated on flattened
/// genomes `[V_1..V_m, f_1..f_m]` without per-call allocation.
#[derive(Debug, Clone)]
pub struct Evaluator {
    plan: MillingPlan,
    coeffs: Vec<DerivedCoefficients>,
}

impl Evaluator {
    pub fn new(plan: &MillingPlan) -> Result<Self> {
        plan.validate()?;
        let coeffs = derive_coefficients(plan)?;
        Ok(Self {
            plan: plan.clone(),
            coeffs,
        })
    }

    pub fn plan(&self) -> &MillingPlan {
        &self.plan
    }

    pub fn coefficients(&self) -> &[DerivedCoefficients] {
        &self.coeffs
    }

    pub fn dimension(&self) -> usize {
        self.plan.dimension()
    }

    fn split<'g>(&self, genome: &'g [f64]) -> Result<(&'g [f64], &'g [f64])> {
        if genome.len() != self.dimension() {
            return Err(Error::Contract(format!(
                "genome length {} does not match plan dimension {}",
                genome.len(),
                self.dimension()
            )));
        }
        Ok(genome.split_at(self.plan.len()))
    }

    /// Whether every constraint of every operation holds.
    pub fn feasible(&self, genome: &[f64]) -> Result<bool> {
        let (speeds, feeds) = self.split(genome)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            let (v, f) = (speeds[i], feeds[i]);
            if !(v > 0.0 && f > 0.0) {
                return Ok(false);
            }
            if !constraints::operation_margins(&self.plan, i, v, f, c)?.satisfied() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Unit cost, unit time and profit rate, accumulated in the same order as
    /// [`unit_cost`] and [`unit_time`].
    pub fn evaluate(&self, genome: &[f64]) -> Result<Evaluation> {
        let feasible = self.feasible(genome)?;
        let (speeds, feeds) = self.split(genome)?;
        let ec = &self.plan.economics;
        let mut cost = ec.material_cost + ec.time_rate() * ec.setup_time;
        let mut time = ec.setup_time;
        for i in 0..self.plan.len() {
            cost += operation_cost(&self.plan, i, speeds[i], feeds[i], &self.coeffs)?;
            time += operation_time(&self.plan, i, speeds[i], feeds[i], &self.coeffs)?;
        }
        Ok(Evaluation {
            feasible,
            unit_cost: cost,
            unit_time: time,
            profit_rate: objective::ratio(ec.sale_price, cost, time),
        })
    }

    /// Death-penalty fitness. Infeasible genomes short-circuit to 0 before any
    /// cost is computed.
    pub fn fitness(&self, genome: &[f64]) -> Result<f64> {
        if !self.feasible(genome)? {
            return Ok(0.0);
        }
        Ok(self.evaluate(genome)?.profit_rate)
    }

    /// Cost and time summands of one operation, `None` when any of its
    /// constraints is violated.
    pub fn operation_terms(&self, op_index: usize, v: f64, f: f64) -> Result<Option<(f64, f64)>> {
        let c = self
            .coeffs
            .get(op_index)
            .ok_or_else(|| Error::Contract(format!("operation index {op_index} out of range")))?;
        if !(v > 0.0 && f > 0.0)
            || !constraints::operation_margins(&self.plan, op_index, v, f, c)?.satisfied()
        {
            return Ok(None);
        }
        Ok(Some((
            operation_cost(&self.plan, op_index, v, f, &self.coeffs)?,
            operation_time(&self.plan, op_index, v, f, &self.coeffs)?,
        )))
    }

    pub fn margins(&self, x: &DecisionVector) -> Result<Vec<OperationMargins>> {
        constraint_margins(&self.plan, x, &self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_study::builtin_case;

    #[test]
    fn evaluator_matches_free_functions_bitwise() {
        let (plan, _) = builtin_case();
        let ev = Evaluator::new(&plan).unwrap();
        let x = DecisionVector::new(
            vec![91.0, 41.0, 45.5, 33.0, 31.25],
            vec![0.077, 0.31, 0.29, 0.5, 0.38],
        )
        .unwrap();
        let c = ev.coefficients();
        let e = ev.evaluate(&x.to_genome()).unwrap();
        assert_eq!(e.unit_cost, unit_cost(&plan, &x, c).unwrap());
        assert_eq!(e.unit_time, unit_time(&plan, &x, c).unwrap());
        assert_eq!(e.profit_rate, profit_rate(&plan, &x, c).unwrap());
        assert_eq!(
            ev.fitness(&x.to_genome()).unwrap(),
            fitness(&plan, &x, c).unwrap()
        );
        assert!(e.feasible);
    }

    #[test]
    fn evaluator_rejects_wrong_length() {
        let (plan, _) = builtin_case();
        let ev = Evaluator::new(&plan).unwrap();
        assert!(matches!(ev.fitness(&[1.0, 2.0]), Err(Error::Contract(_))));
    }
}
