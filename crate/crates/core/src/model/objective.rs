//! Unit time, unit cost and profit rate.
//!
//! Both unit cost and unit time are a fixed part plus one additive summand
//! per operation; [`operation_cost`] and [`operation_time`] expose those
//! summands so solvers can exploit the separability.

use std::f64::consts::PI;

use super::coefficients::DerivedCoefficients;
use super::plan::{DecisionVector, MillingPlan};
use crate::error::{Error, Result};

fn check_positive(v: f64, f: f64) -> Result<()> {
    if v > 0.0 && f > 0.0 && v.is_finite() && f.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "cutting speed and feed must be finite and > 0 (got V={v}, f={f})"
        )))
    }
}

fn coeff(coeffs: &[DerivedCoefficients], op_index: usize) -> Result<&DerivedCoefficients> {
    coeffs.get(op_index).ok_or_else(|| {
        Error::Contract(format!(
            "no coefficients for operation index {op_index} ({} available)",
            coeffs.len()
        ))
    })
}

pub(crate) fn check_coeffs(plan: &MillingPlan, coeffs: &[DerivedCoefficients]) -> Result<()> {
    if coeffs.len() != plan.len() {
        return Err(Error::Contract(format!(
            "{} coefficient sets for {} operations",
            coeffs.len(),
            plan.len()
        )));
    }
    Ok(())
}

/// Machining time `k1 / (V f)` of one operation, in minutes.
pub fn machining_time(
    op_index: usize,
    v: f64,
    f: f64,
    coeffs: &[DerivedCoefficients],
) -> Result<f64> {
    check_positive(v, f)?;
    Ok(coeff(coeffs, op_index)?.k1 / (v * f))
}

/// Tool-wear cost share of one operation, `c_t k3 V^(1/n-1) f^((w+g)/n-1)`.
pub fn tool_cost(
    plan: &MillingPlan,
    op_index: usize,
    v: f64,
    f: f64,
    coeffs: &[DerivedCoefficients],
) -> Result<f64> {
    check_positive(v, f)?;
    let tool = plan.tool_for(op_index)?;
    let c = coeff(coeffs, op_index)?;
    let n = tool.life_exponent;
    let wg = plan.machine.chip_area_exponent + plan.machine.slenderness_exponent;
    Ok(tool.price * c.k3 * v.powf(1.0 / n - 1.0) * f.powf(wg / n - 1.0))
}

/// Time summand of one operation: machining time plus tool change time.
pub fn operation_time(
    plan: &MillingPlan,
    op_index: usize,
    v: f64,
    f: f64,
    coeffs: &[DerivedCoefficients],
) -> Result<f64> {
    Ok(machining_time(op_index, v, f, coeffs)? + plan.tool_for(op_index)?.change_time)
}

/// Cost summand of one operation: machine time and tool change time at
/// labour+overhead rate, plus tool wear.
pub fn operation_cost(
    plan: &MillingPlan,
    op_index: usize,
    v: f64,
    f: f64,
    coeffs: &[DerivedCoefficients],
) -> Result<f64> {
    let rate = plan.economics.time_rate();
    let tm = machining_time(op_index, v, f, coeffs)?;
    let tc = plan.tool_for(op_index)?.change_time;
    Ok(rate * tm + tool_cost(plan, op_index, v, f, coeffs)? + rate * tc)
}

/// Unit time T_u = t_s + Σ t_m,i + Σ t_tc,i.
pub fn unit_time(
    plan: &MillingPlan,
    x: &DecisionVector,
    coeffs: &[DerivedCoefficients],
) -> Result<f64> {
    x.check_against(plan)?;
    check_coeffs(plan, coeffs)?;
    let mut total = plan.economics.setup_time;
    for i in 0..plan.len() {
        total += operation_time(plan, i, x.speeds[i], x.feeds[i], coeffs)?;
    }
    Ok(total)
}

/// Unit cost C_u = c_mat + (c_l+c_o) t_s + Σ per-operation cost.
pub fn unit_cost(
    plan: &MillingPlan,
    x: &DecisionVector,
    coeffs: &[DerivedCoefficients],
) -> Result<f64> {
    x.check_against(plan)?;
    check_coeffs(plan, coeffs)?;
    let ec = &plan.economics;
    let mut total = ec.material_cost + ec.time_rate() * ec.setup_time;
    for i in 0..plan.len() {
        total += operation_cost(plan, i, x.speeds[i], x.feeds[i], coeffs)?;
    }
    Ok(total)
}

/// Profit rate P_r = (S_p - C_u) / T_u in $/min.
pub fn profit_rate(
    plan: &MillingPlan,
    x: &DecisionVector,
    coeffs: &[DerivedCoefficients],
) -> Result<f64> {
    let cu = unit_cost(plan, x, coeffs)?;
    let tu = unit_time(plan, x, coeffs)?;
    if tu <= 0.0 {
        return Err(Error::Domain(format!("unit time {tu} must be > 0")));
    }
    Ok(ratio(plan.economics.sale_price, cu, tu))
}

pub(crate) fn ratio(sale_price: f64, unit_cost: f64, unit_time: f64) -> f64 {
    (sale_price - unit_cost) / unit_time
}

/// Cutting force in newtons at feed `f`.
///
/// Scaled so that the power drawn, `F_c V / 60000` kW, reaches `e P_m`
/// exactly when `C_5 V f^0.8 = 1`.
pub fn cutting_force(op_index: usize, f: f64, plan: &MillingPlan) -> Result<f64> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::Domain(format!(
            "feed must be finite and > 0 (got {f})"
        )));
    }
    let op = plan.operation(op_index)?;
    let tool = plan.tool_for(op_index)?;
    let m = &plan.machine;
    Ok(780.0
        * m.power_constant
        * m.wear_factor
        * f64::from(tool.teeth)
        * op.radial_depth
        * op.axial_depth
        * f.powf(0.8)
        / (PI * tool.diameter))
}

/// Power drawn by the spindle in kW.
pub fn cutting_power(op_index: usize, v: f64, f: f64, plan: &MillingPlan) -> Result<f64> {
    check_positive(v, f)?;
    Ok(cutting_force(op_index, f, plan)? * v / 60_000.0)
}
