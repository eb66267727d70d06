//! Problem-instance types for multi-tool milling.
//!
//! Units are fixed throughout: cutting speed in m/min, feed in mm/tooth,
//! lengths in mm, power in kW, time in min, money in dollars. Angles are
//! stored in degrees.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shop-level economics shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicConstants {
    /// Sale price of one part (S_p).
    pub sale_price: f64,
    /// Raw material cost per part (c_mat).
    pub material_cost: f64,
    /// Labour cost per minute (c_l).
    pub labor_rate: f64,
    /// Overhead cost per minute (c_o).
    pub overhead_rate: f64,
    /// Set-up time per part (t_s).
    pub setup_time: f64,
}

impl EconomicConstants {
    /// Labour plus overhead, the rate at which machine time is charged.
    pub fn time_rate(&self) -> f64 {
        self.labor_rate + self.overhead_rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ToolKind {
    FaceMill,
    EndMill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ToolQuality {
    #[serde(rename = "HSS")]
    Hss,
    Carbide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolSpec {
    pub id: u32,
    pub kind: ToolKind,
    pub quality: ToolQuality,
    /// Cutter diameter d (mm).
    pub diameter: f64,
    /// Number of cutting teeth z.
    pub teeth: u32,
    /// Tool price c_t ($).
    pub price: f64,
    /// Lead (corner) angle la, degrees.
    pub lead_angle: f64,
    /// Clearance angle ca, degrees.
    pub clearance_angle: f64,
    /// Taylor constant C for the tool material.
    pub taylor_constant: f64,
    /// Taylor life exponent n.
    pub life_exponent: f64,
    /// Permitted cutting force F_c(per) in newtons. No force constraint when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permitted_force: Option<f64>,
    /// Tool changing time t_tc (min).
    pub change_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperationKind {
    Face,
    Corner,
    Pocket,
    Slot,
}

impl OperationKind {
    /// Default admissible cutting speed range (m/min).
    pub fn default_speed_bounds(self) -> Bounds {
        match self {
            OperationKind::Face => Bounds::new(60.0, 120.0),
            OperationKind::Corner | OperationKind::Pocket => Bounds::new(40.0, 70.0),
            OperationKind::Slot => Bounds::new(30.0, 50.0),
        }
    }

    /// Default admissible feed range (mm/tooth).
    pub fn default_feed_bounds(self) -> Bounds {
        match self {
            OperationKind::Face => Bounds::new(0.05, 0.4),
            _ => Bounds::new(0.05, 0.5),
        }
    }
}

/// Closed interval `[lower, upper]`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.lower).min(self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

impl From<[f64; 2]> for Bounds {
    fn from([lower, upper]: [f64; 2]) -> Self {
        Self { lower, upper }
    }
}

impl From<Bounds> for [f64; 2] {
    fn from(b: Bounds) -> Self {
        [b.lower, b.upper]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationSpec {
    pub number: u32,
    pub kind: OperationKind,
    /// Id of the tool performing this operation.
    pub tool: u32,
    /// Axial depth of cut a (mm).
    pub axial_depth: f64,
    /// Radial depth of cut a_rad (mm).
    pub radial_depth: f64,
    /// Set when `radial_depth` is an assumption rather than measured data.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub radial_depth_assumed: bool,
    /// Tool travel K (mm).
    pub travel: f64,
    /// Attainable surface finish R_a(at) in µm. No finish constraint when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_finish: Option<f64>,
    pub speed_bounds: Bounds,
    pub feed_bounds: Bounds,
    /// Replaces the derived tool-life coefficient K_3 for calibration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k3_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineSpec {
    /// Motor power P_m (kW).
    pub motor_power: f64,
    /// Efficiency factor e.
    pub efficiency: f64,
    /// Power constant K_p of the workpiece material.
    pub power_constant: f64,
    /// Tool wear factor W.
    pub wear_factor: f64,
    /// Exponent of chip cross-sectional area w.
    pub chip_area_exponent: f64,
    /// Exponent of slenderness ratio g.
    pub slenderness_exponent: f64,
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MillingPlan {
    pub economics: EconomicConstants,
    pub machine: MachineSpec,
    pub tools: Vec<ToolSpec>,
    pub operations: Vec<OperationSpec>,
}

impl MillingPlan {
    /// Number of operations m.
    pub fn len(&self) -> usize {
        self.operations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operations.is_empty()
    }

    /// Length of the flattened decision vector, 2m.
    pub fn dimension(&self) -> usize {
        2 * self.operations.len()
    }

    pub fn tool(&self, id: u32) -> Option<&ToolSpec> {
        self.tools.iter().find(|t| t.id == id)
    }

    pub fn tool_for(&self, op_index: usize) -> Result<&ToolSpec> {
        let op = self.operation(op_index)?;
        self.tool(op.tool).ok_or(Error::DanglingTool {
            operation: op.number,
            tool: op.tool,
        })
    }

    pub fn operation(&self, op_index: usize) -> Result<&OperationSpec> {
        self.operations.get(op_index).ok_or_else(|| {
            Error::Contract(format!(
                "operation index {op_index} out of range for a plan with {} operations",
                self.operations.len()
            ))
        })
    }

    /// Box bounds for the flattened genome `[V_1..V_m, f_1..f_m]`.
    pub fn genome_bounds(&self) -> Vec<Bounds> {
        self.operations
            .iter()
            .map(|op| op.speed_bounds)
            .chain(self.operations.iter().map(|op| op.feed_bounds))
            .collect()
    }

    /// Checks every type invariant. Loaders call this; model functions assume it held.
    pub fn validate(&self) -> Result<()> {
        let ec = &self.economics;
        for (key, v) in [
            ("economics.sale_price", ec.sale_price),
            ("economics.material_cost", ec.material_cost),
            ("economics.labor_rate", ec.labor_rate),
            ("economics.overhead_rate", ec.overhead_rate),
            ("economics.setup_time", ec.setup_time),
        ] {
            require(key, v.is_finite() && v >= 0.0, "must be finite and >= 0")?;
        }
        require(
            "economics.sale_price",
            ec.sale_price > ec.material_cost,
            "must exceed material_cost",
        )?;

        let m = &self.machine;
        require("machine.motor_power", m.motor_power > 0.0, "must be > 0")?;
        require(
            "machine.efficiency",
            m.efficiency > 0.0 && m.efficiency <= 1.0,
            "must lie in (0, 1]",
        )?;
        require(
            "machine.power_constant",
            m.power_constant > 0.0,
            "must be > 0",
        )?;
        require("machine.wear_factor", m.wear_factor >= 1.0, "must be >= 1")?;
        for (key, v) in [
            ("machine.chip_area_exponent", m.chip_area_exponent),
            ("machine.slenderness_exponent", m.slenderness_exponent),
        ] {
            require(key, v.is_finite() && v >= 0.0, "must be finite and >= 0")?;
        }

        let mut ids = HashSet::new();
        for (i, t) in self.tools.iter().enumerate() {
            let key = |field: &str| format!("tools[{i}].{field}");
            require(&key("id"), ids.insert(t.id), "duplicate tool id")?;
            require(&key("diameter"), t.diameter > 0.0, "must be > 0")?;
            require(&key("teeth"), t.teeth >= 1, "must be >= 1")?;
            require(&key("price"), t.price >= 0.0, "must be >= 0")?;
            require(
                &key("life_exponent"),
                t.life_exponent > 0.0 && t.life_exponent < 1.0,
                "must lie in (0, 1)",
            )?;
            require(
                &key("taylor_constant"),
                t.taylor_constant > 0.0,
                "must be > 0",
            )?;
            require(
                &key("clearance_angle"),
                t.clearance_angle > 0.0 && t.clearance_angle < 90.0,
                "must lie in (0, 90) degrees",
            )?;
            require(
                &key("lead_angle"),
                t.lead_angle >= 0.0 && t.lead_angle < 90.0,
                "must lie in [0, 90) degrees",
            )?;
            require(&key("change_time"), t.change_time >= 0.0, "must be >= 0")?;
            if let Some(f) = t.permitted_force {
                require(&key("permitted_force"), f > 0.0, "must be > 0")?;
            }
        }

        require(
            "operations",
            !self.operations.is_empty(),
            "at least one operation is required",
        )?;
        let mut numbers = HashSet::new();
        for (i, op) in self.operations.iter().enumerate() {
            let key = |field: &str| format!("operations[{i}].{field}");
            require(
                &key("number"),
                numbers.insert(op.number),
                "duplicate operation number",
            )?;
            if self.tool(op.tool).is_none() {
                return Err(Error::DanglingTool {
                    operation: op.number,
                    tool: op.tool,
                });
            }
            require(&key("axial_depth"), op.axial_depth > 0.0, "must be > 0")?;
            require(&key("radial_depth"), op.radial_depth > 0.0, "must be > 0")?;
            require(&key("travel"), op.travel > 0.0, "must be > 0")?;
            if let Some(ra) = op.surface_finish {
                require(&key("surface_finish"), ra > 0.0, "must be > 0")?;
            }
            for (field, b) in [
                ("speed_bounds", op.speed_bounds),
                ("feed_bounds", op.feed_bounds),
            ] {
                require(
                    &key(field),
                    b.lower > 0.0 && b.lower < b.upper && b.upper.is_finite(),
                    "must satisfy 0 < min < max",
                )?;
            }
            if let Some(k3) = op.k3_override {
                require(&key("k3_override"), k3 > 0.0, "must be > 0")?;
            }
        }
        Ok(())
    }
}

fn require(key: &str, ok: bool, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::schema(key, message))
    }
}

/// Cutting speed and feed for every operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionVector {
    pub speeds: Vec<f64>,
    pub feeds: Vec<f64>,
}

impl DecisionVector {
    pub fn new(speeds: Vec<f64>, feeds: Vec<f64>) -> Result<Self> {
        if speeds.len() != feeds.len() {
            return Err(Error::Contract(format!(
                "{} speeds but {} feeds",
                speeds.len(),
                feeds.len()
            )));
        }
        Ok(Self { speeds, feeds })
    }

    /// Splits a flattened genome `[V_1..V_m, f_1..f_m]`.
    pub fn from_genome(genome: &[f64]) -> Result<Self> {
        if genome.len() % 2 != 0 {
            return Err(Error::Contract(format!(
                "genome length {} is not even",
                genome.len()
            )));
        }
        let (v, f) = genome.split_at(genome.len() / 2);
        Ok(Self {
            speeds: v.to_vec(),
            feeds: f.to_vec(),
        })
    }

    pub fn to_genome(&self) -> Vec<f64> {
        self.speeds.iter().chain(&self.feeds).copied().collect()
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds.is_empty()
    }

    pub(crate) fn check_against(&self, plan: &MillingPlan) -> Result<()> {
        if self.speeds.len() != plan.len() || self.feeds.len() != plan.len() {
            return Err(Error::Contract(format!(
                "decision vector has {}/{} speeds/feeds, plan has {} operations",
                self.speeds.len(),
                self.feeds.len(),
                plan.len()
            )));
        }
        Ok(())
    }

    /// Every operation at the centre of its speed and feed boxes.
    pub fn midpoint(plan: &MillingPlan) -> Self {
        Self {
            speeds: plan
                .operations
                .iter()
                .map(|o| o.speed_bounds.midpoint())
                .collect(),
            feeds: plan
                .operations
                .iter()
                .map(|o| o.feed_bounds.midpoint())
                .collect(),
        }
    }
}
