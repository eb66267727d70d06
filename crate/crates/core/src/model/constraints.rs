//! Feasibility checks and the death-penalty fitness.

use serde::{Deserialize, Serialize};

use super::coefficients::DerivedCoefficients;
use super::objective::{check_coeffs, cutting_force, profit_rate};
use super::plan::{Bounds, DecisionVector, MillingPlan};
use crate::error::Result;

/// Position of a value relative to its admissible interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCheck {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BoxCheck {
    fn new(value: f64, bounds: Bounds) -> Self {
        Self {
            value,
            lower: bounds.lower,
            upper: bounds.upper,
        }
    }

    pub fn satisfied(&self) -> bool {
        self.lower <= self.value && self.value <= self.upper
    }
}

/// Constraint margins for one operation. Ratio margins are satisfied when
/// `<= 1`; `None` means the constraint does not apply to this operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperationMargins {
    pub operation: u32,
    /// C_5 V f^0.8.
    pub power: f64,
    /// C_6 f or C_7 f².
    pub finish: Option<f64>,
    /// C_8 F_c.
    pub force: Option<f64>,
    pub speed: BoxCheck,
    pub feed: BoxCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Power,
    Finish,
    Force,
    SpeedBox,
    FeedBox,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::Power => "power",
            ConstraintKind::Finish => "finish",
            ConstraintKind::Force => "force",
            ConstraintKind::SpeedBox => "speed_box",
            ConstraintKind::FeedBox => "feed_box",
        }
    }
}

impl OperationMargins {
    pub fn satisfied(&self) -> bool {
        self.violations().next().is_none()
    }

    /// Constraints this operation breaks.
    pub fn violations(&self) -> impl Iterator<Item = ConstraintKind> + '_ {
        let ratio_ok = |m: Option<f64>| m.map_or(true, |m| m <= 1.0);
        [
            (ConstraintKind::Power, self.power <= 1.0),
            (ConstraintKind::Finish, ratio_ok(self.finish)),
            (ConstraintKind::Force, ratio_ok(self.force)),
            (ConstraintKind::SpeedBox, self.speed.satisfied()),
            (ConstraintKind::FeedBox, self.feed.satisfied()),
        ]
        .into_iter()
        .filter_map(|(kind, ok)| (!ok).then_some(kind))
    }
}

pub(crate) fn operation_margins(
    plan: &MillingPlan,
    op_index: usize,
    v: f64,
    f: f64,
    c: &DerivedCoefficients,
) -> Result<OperationMargins> {
    let op = plan.operation(op_index)?;
    let force = match c.c8 {
        Some(c8) => Some(c8 * cutting_force(op_index, f, plan)?),
        None => None,
    };
    Ok(OperationMargins {
        operation: op.number,
        power: c.c5 * v * f.powf(0.8),
        finish: c.finish.map(|fc| fc.margin(f)),
        force,
        speed: BoxCheck::new(v, op.speed_bounds),
        feed: BoxCheck::new(f, op.feed_bounds),
    })
}

/// All constraint margins, one entry per operation.
pub fn constraint_margins(
    plan: &MillingPlan,
    x: &DecisionVector,
    coeffs: &[DerivedCoefficients],
) -> Result<Vec<OperationMargins>> {
    x.check_against(plan)?;
    check_coeffs(plan, coeffs)?;
    coeffs
        .iter()
        .enumerate()
        .take(plan.len())
        .map(|(i, c)| operation_margins(plan, i, x.speeds[i], x.feeds[i], c))
        .collect()
}

pub fn is_feasible(
    plan: &MillingPlan,
    x: &DecisionVector,
    coeffs: &[DerivedCoefficients],
) -> Result<bool> {
    Ok(constraint_margins(plan, x, coeffs)?
        .iter()
        .all(OperationMargins::satisfied))
}

/// Profit rate when every constraint holds, exactly 0 otherwise.
pub fn fitness(
    plan: &MillingPlan,
    x: &DecisionVector,
    coeffs: &[DerivedCoefficients],
) -> Result<f64> {
    if !is_feasible(plan, x, coeffs)? {
        return Ok(0.0);
    }
    profit_rate(plan, x, coeffs)
}
