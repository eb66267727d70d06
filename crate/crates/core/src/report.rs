//! Report structures and their JSON, CSV and text renderings.
//!
//! JSON keys and CSV headers are fixed; absent values are `null` in JSON and
//! empty cells in CSV. Every rendering ends with a newline.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::case_study::{ReferenceRow, REFERENCE_ES_METHOD};
use crate::error::{Error, Result};
use crate::es::RunResult;
use crate::model::{DecisionVector, Evaluator, OperationMargins};
use crate::oracle::OracleOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

pub const METHOD_ES: &str = "evolution_strategy";
pub const METHOD_ORACLE: &str = "oracle";
pub const COMPARE_ES_ROW: &str = "Evolutionary strategy (this implementation)";
pub const COMPARE_ORACLE_ROW: &str = "Oracle (grid)";
/// Relative band within which the computed row counts as reproducing the
/// published evolution strategy row.
pub const REPRODUCTION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationSetting {
    pub operation: u32,
    pub speed: f64,
    pub feed: f64,
}

fn settings(evaluator: &Evaluator, x: &DecisionVector) -> Vec<OperationSetting> {
    evaluator
        .plan()
        .operations
        .iter()
        .zip(x.speeds.iter().zip(&x.feeds))
        .map(|(op, (&speed, &feed))| OperationSetting {
            operation: op.number,
            speed,
            feed,
        })
        .collect()
}

/// Outcome of `optimize` or `oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub method: String,
    pub feasible: bool,
    pub unit_cost: Option<f64>,
    pub unit_time: Option<f64>,
    pub profit_rate: Option<f64>,
    pub operations: Vec<OperationSetting>,
    pub seed: Option<u64>,
    pub generations: Option<usize>,
    pub evaluations: Option<usize>,
    pub sigmas_final: Option<Vec<f64>>,
    pub grid_resolution: Option<usize>,
    pub dinkelbach_iterations: Option<usize>,
    pub warnings: Vec<String>,
}

impl SolutionReport {
    pub fn from_run(evaluator: &Evaluator, run: &RunResult) -> Self {
        let best = run.best.as_ref();
        SolutionReport {
            method: METHOD_ES.into(),
            feasible: run.feasible(),
            unit_cost: best.map(|b| b.unit_cost),
            unit_time: best.map(|b| b.unit_time),
            profit_rate: best.map(|b| b.profit_rate),
            operations: best.map(|b| settings(evaluator, &b.x)).unwrap_or_default(),
            seed: Some(run.seed),
            generations: Some(run.generations),
            evaluations: Some(run.evaluations),
            sigmas_final: best.map(|b| b.sigmas.clone()),
            grid_resolution: None,
            dinkelbach_iterations: None,
            warnings: run.warnings.clone(),
        }
    }

    pub fn from_oracle(
        evaluator: &Evaluator,
        outcome: &OracleOutcome,
        resolution: usize,
        mut warnings: Vec<String>,
    ) -> Self {
        let s = outcome.solution();
        if let OracleOutcome::Infeasible { operations } = outcome {
            warnings.push(format!(
                "no feasible grid point for operation(s) {}",
                operations
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        SolutionReport {
            method: METHOD_ORACLE.into(),
            feasible: s.is_some(),
            unit_cost: s.map(|s| s.unit_cost),
            unit_time: s.map(|s| s.unit_time),
            profit_rate: s.map(|s| s.profit_rate),
            operations: s.map(|s| settings(evaluator, &s.x)).unwrap_or_default(),
            seed: None,
            generations: None,
            evaluations: None,
            sigmas_final: None,
            grid_resolution: Some(resolution),
            dinkelbach_iterations: s.map(|s| s.lambda_trace.len() - 1),
            warnings,
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Csv => {
                let mut w = csv_writer();
                w.write_record([
                    "method",
                    "operation",
                    "speed",
                    "feed",
                    "unit_cost",
                    "unit_time",
                    "profit_rate",
                ])
                .map_err(ser)?;
                for op in &self.operations {
                    w.write_record([
                        self.method.clone(),
                        op.operation.to_string(),
                        op.speed.to_string(),
                        op.feed.to_string(),
                        opt(self.unit_cost),
                        opt(self.unit_time),
                        opt(self.profit_rate),
                    ])
                    .map_err(ser)?;
                }
                finish_csv(w)
            }
            OutputFormat::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "method: {}", self.method);
                if !self.feasible {
                    let _ = writeln!(s, "no feasible solution found");
                }
                if let (Some(c), Some(t), Some(p)) =
                    (self.unit_cost, self.unit_time, self.profit_rate)
                {
                    let _ = writeln!(s, "unit cost C_u:   {c:.4} $");
                    let _ = writeln!(s, "unit time T_u:   {t:.4} min");
                    let _ = writeln!(s, "profit rate P_r: {p:.4} $/min");
                }
                for op in &self.operations {
                    let _ = writeln!(
                        s,
                        "  operation {}: V = {:.4} m/min, f = {:.4} mm/tooth",
                        op.operation, op.speed, op.feed
                    );
                }
                if let (Some(g), Some(e)) = (self.generations, self.evaluations) {
                    let _ = writeln!(
                        s,
                        "generations: {g}, evaluations: {e}, seed: {}",
                        self.seed.unwrap_or(0)
                    );
                }
                if let Some(r) = self.grid_resolution {
                    let _ = writeln!(
                        s,
                        "grid resolution: {r}, dinkelbach iterations: {}",
                        self.dinkelbach_iterations
                            .map_or("-".into(), |i| i.to_string())
                    );
                }
                write_warnings(&mut s, &self.warnings);
                Ok(s)
            }
        }
    }
}

/// One constraint of one operation at an evaluated point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginLine {
    pub operation: u32,
    pub constraint: String,
    /// Ratio margin (limit 1) or the boxed variable itself.
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: f64,
    pub satisfied: bool,
}

fn margin_lines(m: &OperationMargins) -> Vec<MarginLine> {
    let ratio = |name: &str, value: f64| MarginLine {
        operation: m.operation,
        constraint: name.into(),
        value,
        lower: None,
        upper: 1.0,
        satisfied: value <= 1.0,
    };
    let mut out = vec![ratio("power", m.power)];
    if let Some(v) = m.finish {
        out.push(ratio("finish", v));
    }
    if let Some(v) = m.force {
        out.push(ratio("force", v));
    }
    for (name, b) in [("speed_box", m.speed), ("feed_box", m.feed)] {
        out.push(MarginLine {
            operation: m.operation,
            constraint: name.into(),
            value: b.value,
            lower: Some(b.lower),
            upper: b.upper,
            satisfied: b.satisfied(),
        });
    }
    out
}

/// Objective and constraint status at a user-supplied point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub operations: Vec<OperationSetting>,
    pub unit_cost: f64,
    pub unit_time: f64,
    pub profit_rate: f64,
    pub feasible: bool,
    pub fitness: f64,
    pub sale_price: f64,
    /// `P_r·T_u + C_u`, equal to the sale price up to rounding.
    pub identity_check: f64,
    pub margins: Vec<MarginLine>,
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    pub fn build(evaluator: &Evaluator, x: &DecisionVector, warnings: Vec<String>) -> Result<Self> {
        x.check_against(evaluator.plan())?;
        let genome = x.to_genome();
        let eval = evaluator.evaluate(&genome)?;
        let margins = evaluator.margins(x)?;
        Ok(EvaluationReport {
            operations: settings(evaluator, x),
            unit_cost: eval.unit_cost,
            unit_time: eval.unit_time,
            profit_rate: eval.profit_rate,
            feasible: eval.feasible,
            fitness: eval.fitness(),
            sale_price: evaluator.plan().economics.sale_price,
            identity_check: eval.profit_rate * eval.unit_time + eval.unit_cost,
            margins: margins.iter().flat_map(margin_lines).collect(),
            warnings,
        })
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Csv => {
                let mut w = csv_writer();
                w.write_record([
                    "operation",
                    "constraint",
                    "value",
                    "lower",
                    "upper",
                    "satisfied",
                ])
                .map_err(ser)?;
                for m in &self.margins {
                    w.write_record([
                        m.operation.to_string(),
                        m.constraint.clone(),
                        m.value.to_string(),
                        opt(m.lower),
                        m.upper.to_string(),
                        m.satisfied.to_string(),
                    ])
                    .map_err(ser)?;
                }
                finish_csv(w)
            }
            OutputFormat::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "point:");
                for op in &self.operations {
                    let _ = writeln!(
                        s,
                        "  operation {}: V = {} m/min, f = {} mm/tooth",
                        op.operation, op.speed, op.feed
                    );
                }
                let _ = writeln!(s, "unit cost C_u:   {:.4} $", self.unit_cost);
                let _ = writeln!(s, "unit time T_u:   {:.4} min", self.unit_time);
                let _ = writeln!(s, "profit rate P_r: {:.4} $/min", self.profit_rate);
                let _ = writeln!(
                    s,
                    "P_r*T_u + C_u = {:.4} (sale price {:.4})",
                    self.identity_check, self.sale_price
                );
                let _ = writeln!(
                    s,
                    "feasible: {}, fitness: {:.4}",
                    if self.feasible { "yes" } else { "no" },
                    self.fitness
                );
                let _ = writeln!(s, "constraints:");
                for m in &self.margins {
                    let range = match m.lower {
                        Some(lo) => format!("in [{lo}, {}]", m.upper),
                        None => "<= 1".to_string(),
                    };
                    let _ = writeln!(
                        s,
                        "  operation {} {:<9} {:>12.6} {:<16} {}",
                        m.operation,
                        m.constraint,
                        m.value,
                        range,
                        if m.satisfied { "satisfied" } else { "VIOLATED" }
                    );
                }
                write_warnings(&mut s, &self.warnings);
                Ok(s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: String,
    pub unit_cost: Option<f64>,
    pub unit_time: Option<f64>,
    pub profit_rate: Option<f64>,
    /// `published` for the reference table, `computed` for fresh runs.
    pub source: String,
}

/// Distance between the computed evolution strategy row and the published one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionGap {
    pub reference_method: String,
    pub reference_profit_rate: f64,
    pub reference_unit_cost: f64,
    pub computed_profit_rate: Option<f64>,
    pub computed_unit_cost: Option<f64>,
    /// `(computed - reference) / reference`.
    pub profit_rate_relative_gap: Option<f64>,
    pub unit_cost_relative_gap: Option<f64>,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub gap: Option<ReproductionGap>,
    pub seed: u64,
    pub grid_resolution: usize,
    pub warnings: Vec<String>,
}

impl CompareReport {
    pub fn build(
        references: &[ReferenceRow],
        run: &RunResult,
        oracle: &OracleOutcome,
        grid_resolution: usize,
    ) -> Self {
        let mut rows: Vec<CompareRow> = references
            .iter()
            .map(|r| CompareRow {
                method: r.method.clone(),
                unit_cost: Some(r.unit_cost),
                unit_time: Some(r.unit_time),
                profit_rate: Some(r.profit_rate),
                source: "published".into(),
            })
            .collect();
        let es = run.best.as_ref();
        rows.push(CompareRow {
            method: COMPARE_ES_ROW.into(),
            unit_cost: es.map(|b| b.unit_cost),
            unit_time: es.map(|b| b.unit_time),
            profit_rate: es.map(|b| b.profit_rate),
            source: "computed".into(),
        });
        let o = oracle.solution();
        rows.push(CompareRow {
            method: COMPARE_ORACLE_ROW.into(),
            unit_cost: o.map(|s| s.unit_cost),
            unit_time: o.map(|s| s.unit_time),
            profit_rate: o.map(|s| s.profit_rate),
            source: "computed".into(),
        });

        let gap = references
            .iter()
            .find(|r| r.method == REFERENCE_ES_METHOD)
            .map(|r| {
                let rel = |computed: Option<f64>, reference: f64| {
                    computed.map(|c| (c - reference) / reference)
                };
                let pr_gap = rel(es.map(|b| b.profit_rate), r.profit_rate);
                let cu_gap = rel(es.map(|b| b.unit_cost), r.unit_cost);
                let within = matches!((pr_gap, cu_gap), (Some(p), Some(c))
                if p.abs() <= REPRODUCTION_TOLERANCE && c.abs() <= REPRODUCTION_TOLERANCE);
                ReproductionGap {
                    reference_method: r.method.clone(),
                    reference_profit_rate: r.profit_rate,
                    reference_unit_cost: r.unit_cost,
                    computed_profit_rate: es.map(|b| b.profit_rate),
                    computed_unit_cost: es.map(|b| b.unit_cost),
                    profit_rate_relative_gap: pr_gap,
                    unit_cost_relative_gap: cu_gap,
                    tolerance: REPRODUCTION_TOLERANCE,
                    within_tolerance: within,
                }
            });

        CompareReport {
            rows,
            gap,
            seed: run.seed,
            grid_resolution,
            warnings: run.warnings.clone(),
        }
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        let two = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.2}"));
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Csv => {
                let mut w = csv_writer();
                w.write_record(["method", "C_u", "T_u", "P_r"])
                    .map_err(ser)?;
                for r in &self.rows {
                    w.write_record([
                        r.method.clone(),
                        two(r.unit_cost),
                        two(r.unit_time),
                        two(r.profit_rate),
                    ])
                    .map_err(ser)?;
                }
                finish_csv(w)
            }
            OutputFormat::Text => {
                let width = self.rows.iter().map(|r| r.method.len()).max().unwrap_or(6);
                let mut s = String::new();
                let _ = writeln!(
                    s,
                    "{:<width$}  {:>8}  {:>8}  {:>8}",
                    "method", "C_u ($)", "T_u (min)", "P_r ($/min)"
                );
                for r in &self.rows {
                    let _ = writeln!(
                        s,
                        "{:<width$}  {:>8}  {:>8}  {:>8}",
                        r.method,
                        two(r.unit_cost),
                        two(r.unit_time),
                        two(r.profit_rate)
                    );
                }
                if let Some(g) = &self.gap {
                    let pct = |v: Option<f64>| {
                        v.map_or("n/a".to_string(), |v| format!("{:+.1}%", 100.0 * v))
                    };
                    let _ = writeln!(
                        s,
                        "gap to published \"{}\" row: P_r {}, C_u {} ({} the ±{:.0}% band)",
                        g.reference_method,
                        pct(g.profit_rate_relative_gap),
                        pct(g.unit_cost_relative_gap),
                        if g.within_tolerance {
                            "within"
                        } else {
                            "outside"
                        },
                        100.0 * g.tolerance
                    );
                }
                let _ = writeln!(
                    s,
                    "seed: {}, grid resolution: {}",
                    self.seed, self.grid_resolution
                );
                write_warnings(&mut s, &self.warnings);
                Ok(s)
            }
        }
    }
}

fn write_warnings(s: &mut String, warnings: &[String]) {
    if !warnings.is_empty() {
        let _ = writeln!(s, "warnings:");
        for w in warnings {
            let _ = writeln!(s, "  - {w}");
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn ser(e: impl std::fmt::Display) -> Error {
    Error::Serialize(e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(ser)?;
    s.push('\n');
    Ok(s)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(ser)?;
    String::from_utf8(bytes).map_err(ser)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case_study::builtin_case;
    use crate::es::{run, EsConfig};
    use crate::oracle::{dinkelbach_solve, GridSpec};

    fn quick_compare() -> CompareReport {
        let (plan, refs) = builtin_case();
        let config = EsConfig {
            stall_limit: 30,
            max_generations: 200,
            seed: 1,
            ..Default::default()
        };
        let r = run(&plan, &config).unwrap();
        let o = dinkelbach_solve(&plan, &GridSpec::with_resolution(50)).unwrap();
        CompareReport::build(&refs, &r, &o, 50)
    }

    #[test]
    fn compare_contains_published_rows() {
        let csv = quick_compare().render(OutputFormat::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("method,C_u,T_u,P_r"));
        assert!(csv.contains("Handbook,18.36,9.40,0.71\n"));
        assert!(csv.contains("Hybrid differential evolution algorithm,10.90,5.00,2.82\n"));
        assert_eq!(csv.lines().count(), 1 + 9 + 2);
    }

    #[test]
    fn compare_reports_gap() {
        let report = quick_compare();
        let gap = report.gap.as_ref().unwrap();
        assert_eq!(gap.reference_profit_rate, 2.82);
        assert!(gap.profit_rate_relative_gap.is_some());
        let text = report.render(OutputFormat::Text).unwrap();
        assert!(text.contains("gap to published \"Evolutionary strategy\" row"));
    }

    #[test]
    fn evaluation_flags_box_violation() {
        let (plan, _) = builtin_case();
        let ev = Evaluator::new(&plan).unwrap();
        let x = DecisionVector::new(
            vec![91.0, 40.0, 40.0, 29.0, 31.0],
            vec![0.078, 0.3, 0.3, 0.5, 0.38],
        )
        .unwrap();
        let rep = EvaluationReport::build(&ev, &x, vec![]).unwrap();
        assert!(!rep.feasible);
        assert_eq!(rep.fitness, 0.0);
        let bad: Vec<_> = rep.margins.iter().filter(|m| !m.satisfied).collect();
        assert_eq!(bad.len(), 1, "{bad:?}");
        assert_eq!(
            (bad[0].operation, bad[0].constraint.as_str()),
            (4, "speed_box")
        );
        let text = rep.render(OutputFormat::Text).unwrap();
        assert!(text.contains("operation 4: V = 29 m/min"));
        assert!(text.contains("VIOLATED"));
    }

    #[test]
    fn json_keys_are_stable() {
        let (plan, _) = builtin_case();
        let ev = Evaluator::new(&plan).unwrap();
        let config = EsConfig {
            stall_limit: 5,
            ..Default::default()
        };
        let rep = SolutionReport::from_run(&ev, &run(&plan, &config).unwrap());
        let text = rep.render(OutputFormat::Json).unwrap();
        let keys = [
            "method",
            "feasible",
            "unit_cost",
            "unit_time",
            "profit_rate",
            "operations",
            "seed",
            "generations",
            "evaluations",
            "sigmas_final",
            "grid_resolution",
            "dinkelbach_iterations",
            "warnings",
        ];
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| {
                text.find(&format!("\n  \"{k}\":"))
                    .unwrap_or_else(|| panic!("missing {k}"))
            })
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert!(text.ends_with("}\n"));
    }
}
