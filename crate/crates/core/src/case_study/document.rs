//! TOML plan documents.
//!
//! A document has `[economics]` and `[machine]` tables, `[[tools]]` and
//! `[[operations]]` arrays, and optional `[es]` and `[oracle]` tables that
//! override solver defaults. Unknown keys are rejected. Values carry no unit
//! annotations; see `data/case_study.toml` for the annotated reference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Bounds, EconomicConstants, MachineSpec, MillingPlan, OperationKind, OperationSpec, ToolSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    pub economics: EconomicConstants,
    pub machine: MachineSpec,
    pub tools: Vec<ToolSpec>,
    pub operations: Vec<OperationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub es: Option<EsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

/// An operation as written in a document. Speed and feed bounds default to
/// the ranges for the operation kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationEntry {
    pub number: u32,
    pub kind: OperationKind,
    pub tool: u32,
    pub axial_depth: f64,
    pub radial_depth: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub radial_depth_assumed: bool,
    pub travel: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_finish: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_bounds: Option<Bounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feed_bounds: Option<Bounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k3_override: Option<f64>,
}

/// Optional evolution strategy settings; unset fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsSection {
    pub mu: Option<usize>,
    pub eta: Option<usize>,
    pub sigma_init: Option<f64>,
    pub alpha: Option<f64>,
    pub stall_limit: Option<usize>,
    pub max_generations: Option<usize>,
    pub seed: Option<u64>,
    pub sigma_floor: Option<f64>,
    pub sigma_ceiling: Option<f64>,
}

/// Optional grid oracle settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub resolution: Option<usize>,
    pub dinkelbach_tolerance: Option<f64>,
    pub max_dinkelbach_iterations: Option<usize>,
}

/// A validated plan plus whatever solver overrides and warnings came with it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedPlan {
    pub plan: MillingPlan,
    pub es: EsSection,
    pub oracle: OracleSection,
    pub warnings: Vec<String>,
}

impl From<OperationEntry> for OperationSpec {
    fn from(e: OperationEntry) -> Self {
        OperationSpec {
            number: e.number,
            kind: e.kind,
            tool: e.tool,
            axial_depth: e.axial_depth,
            radial_depth: e.radial_depth,
            radial_depth_assumed: e.radial_depth_assumed,
            travel: e.travel,
            surface_finish: e.surface_finish,
            speed_bounds: e
                .speed_bounds
                .unwrap_or_else(|| e.kind.default_speed_bounds()),
            feed_bounds: e
                .feed_bounds
                .unwrap_or_else(|| e.kind.default_feed_bounds()),
            k3_override: e.k3_override,
        }
    }
}

impl From<&OperationSpec> for OperationEntry {
    fn from(op: &OperationSpec) -> Self {
        OperationEntry {
            number: op.number,
            kind: op.kind,
            tool: op.tool,
            axial_depth: op.axial_depth,
            radial_depth: op.radial_depth,
            radial_depth_assumed: op.radial_depth_assumed,
            travel: op.travel,
            surface_finish: op.surface_finish,
            speed_bounds: Some(op.speed_bounds),
            feed_bounds: Some(op.feed_bounds),
            k3_override: op.k3_override,
        }
    }
}

impl PlanDocument {
    pub fn from_plan(plan: &MillingPlan) -> Self {
        PlanDocument {
            economics: plan.economics,
            machine: plan.machine,
            tools: plan.tools.clone(),
            operations: plan.operations.iter().map(OperationEntry::from).collect(),
            es: None,
            oracle: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    /// Resolves defaults and validates every invariant.
    pub fn into_loaded(self) -> Result<LoadedPlan> {
        let plan = MillingPlan {
            economics: self.economics,
            machine: self.machine,
            tools: self.tools,
            operations: self
                .operations
                .into_iter()
                .map(OperationSpec::from)
                .collect(),
        };
        plan.validate()?;
        let warnings = plan_warnings(&plan);
        Ok(LoadedPlan {
            plan,
            es: self.es.unwrap_or_default(),
            oracle: self.oracle.unwrap_or_default(),
            warnings,
        })
    }
}

/// Parses and validates a plan document.
pub fn load_plan(text: &str) -> Result<LoadedPlan> {
    PlanDocument::parse(text)?.into_loaded()
}

/// Notes about optional data that is missing or assumed, in plan order.
pub fn plan_warnings(plan: &MillingPlan) -> Vec<String> {
    let mut out = Vec::new();
    for tool in &plan.tools {
        if tool.permitted_force.is_none() {
            out.push(format!(
                "tool {}: no permitted cutting force given; force constraint skipped",
                tool.id
            ));
        }
    }
    for op in &plan.operations {
        if op.surface_finish.is_none() {
            out.push(format!(
                "operation {}: no surface finish requirement; finish constraint skipped",
                op.number
            ));
        }
        if op.radial_depth_assumed {
            out.push(format!(
                "operation {}: radial depth of cut {} mm is an assumed value",
                op.number, op.radial_depth
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_study::BUNDLED_CASE;

    #[test]
    fn bounds_default_by_operation_kind() {
        let text: String = BUNDLED_CASE
            .lines()
            .filter(|l| !l.starts_with("speed_bounds") && !l.starts_with("feed_bounds"))
            .map(|l| format!("{l}\n"))
            .collect();
        let loaded = load_plan(&text).unwrap();
        for op in &loaded.plan.operations {
            assert_eq!(op.speed_bounds, op.kind.default_speed_bounds());
            assert_eq!(op.feed_bounds, op.kind.default_feed_bounds());
        }
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let text = BUNDLED_CASE.replacen("[machine]\n", "[machine]\nspindle_torque = 3.0\n", 1);
        match load_plan(&text) {
            Err(Error::Parse(msg)) => assert!(msg.contains("spindle_torque"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_tool_reference() {
        let text = BUNDLED_CASE.replacen("tool = 3\n", "tool = 9\n", 1);
        assert_eq!(
            load_plan(&text).unwrap_err(),
            Error::DanglingTool {
                operation: 4,
                tool: 9
            }
        );
    }

    #[test]
    fn invariant_violation_names_key() {
        let text = BUNDLED_CASE.replacen("efficiency = 0.95", "efficiency = 1.5", 1);
        match load_plan(&text) {
            Err(Error::Schema { key, .. }) => assert_eq!(key, "machine.efficiency"),
            other => panic!("expected schema error, got {other:?}"),
        }
        let text = BUNDLED_CASE.replacen("sale_price = 25.0", "sale_price = 0.4", 1);
        assert!(
            matches!(load_plan(&text), Err(Error::Schema { key, .. }) if key == "economics.sale_price")
        );
    }

    #[test]
    fn solver_sections_are_optional_overrides() {
        let text =
            format!("{BUNDLED_CASE}\n[es]\nmu = 10\nseed = 7\n\n[oracle]\nresolution = 64\n");
        let loaded = load_plan(&text).unwrap();
        assert_eq!(loaded.es.mu, Some(10));
        assert_eq!(loaded.es.seed, Some(7));
        assert_eq!(loaded.es.eta, None);
        assert_eq!(loaded.oracle.resolution, Some(64));
    }

    #[test]
    fn warnings_cover_missing_and_assumed_data() {
        let loaded = load_plan(BUNDLED_CASE).unwrap();
        let w = loaded.warnings.join("\n");
        assert!(w.contains("tool 1: no permitted cutting force"));
        assert!(w.contains("operation 4: no surface finish requirement"));
        assert!(w.contains("operation 1: radial depth of cut 50 mm is an assumed value"));
    }
}
