//! Per-operation constants folded out of the plan.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::plan::{MillingPlan, ToolKind};
use crate::error::{Error, Result};

/// Surface-finish coefficient: the lead/clearance-angle form for face mills
/// (constraint `c·f <= 1`) or the cutter-diameter form for end mills
/// (constraint `c·f² <= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FinishCoefficient {
    /// C_6, linear in feed.
    Linear(f64),
    /// C_7, quadratic in feed.
    Quadratic(f64),
}

impl FinishCoefficient {
    pub fn margin(self, feed: f64) -> f64 {
        match self {
            FinishCoefficient::Linear(c6) => c6 * feed,
            FinishCoefficient::Quadratic(c7) => c7 * feed * feed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCoefficients {
    /// Machining-time coefficient: t_m = k1 / (V f).
    pub k1: f64,
    /// Tool-cost coefficient multiplying V^(1/n - 1) f^((w+g)/n - 1).
    pub k3: f64,
    /// Power coefficient: C_5 V f^0.8 <= 1.
    pub c5: f64,
    pub finish: Option<FinishCoefficient>,
    /// Reciprocal permitted force: C_8 F_c <= 1.
    pub c8: Option<f64>,
}

impl DerivedCoefficients {
    pub fn c6(&self) -> Option<f64> {
        match self.finish {
            Some(FinishCoefficient::Linear(c)) => Some(c),
            _ => None,
        }
    }

    pub fn c7(&self) -> Option<f64> {
        match self.finish {
            Some(FinishCoefficient::Quadratic(c)) => Some(c),
            _ => None,
        }
    }
}

/// Computes one coefficient set per operation, in operation order.
///
/// `k1 = π d K / (1000 z)` follows from t_m = K/F with F = f z N and
/// N = 1000 V / (π d). `k3 = k1 (W/C)^(1/n)` comes from the tool life law
/// T = (C / (W V f^(w+g)))^(1/n), unless the operation overrides it.
pub fn derive_coefficients(plan: &MillingPlan) -> Result<Vec<DerivedCoefficients>> {
    let machine = &plan.machine;
    (0..plan.len())
        .map(|i| {
            let op = &plan.operations[i];
            let tool = plan.tool_for(i)?;
            if tool.clearance_angle <= 0.0 {
                return Err(Error::Domain(format!(
                    "tool {}: clearance angle {}° leaves cot(ca) undefined",
                    tool.id, tool.clearance_angle
                )));
            }
            let d = tool.diameter;
            let z = f64::from(tool.teeth);

            let k1 = PI * d * op.travel / (1000.0 * z);
            let k3 = op.k3_override.unwrap_or_else(|| {
                k1 * (machine.wear_factor / tool.taylor_constant).powf(1.0 / tool.life_exponent)
            });
            let c5 = 0.78
                * machine.power_constant
                * machine.wear_factor
                * z
                * op.radial_depth
                * op.axial_depth
                / (60.0 * PI * d * machine.efficiency * machine.motor_power);

            let finish = op.surface_finish.map(|ra| match tool.kind {
                ToolKind::FaceMill => {
                    let la = tool.lead_angle.to_radians();
                    let ca = tool.clearance_angle.to_radians();
                    FinishCoefficient::Linear(318.0 / ((la.tan() + 1.0 / ca.tan()) * ra))
                }
                ToolKind::EndMill => FinishCoefficient::Quadratic(318.0 / (4.0 * d * ra)),
            });
            let c8 = tool.permitted_force.map(|f| 1.0 / f);

            Ok(DerivedCoefficients {
                k1,
                k3,
                c5,
                finish,
                c8,
            })
        })
        .collect()
}
