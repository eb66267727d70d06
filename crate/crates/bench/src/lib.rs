//! Fixtures shared by the benchmarks.

use millopt::case_study::builtin_case;
use millopt::{DecisionVector, Evaluator, MillingPlan};

pub fn case_plan() -> MillingPlan {
    builtin_case().0
}

/// Evaluator for the bundled case and a feasible genome near its optimum.
pub fn case_evaluator() -> (Evaluator, Vec<f64>) {
    let plan = case_plan();
    let x = DecisionVector::new(
        vec![91.0, 40.0, 40.0, 30.0, 31.25],
        vec![0.078, 0.325, 0.325, 0.5, 0.388],
    )
    .expect("matching lengths");
    (Evaluator::new(&plan).expect("valid plan"), x.to_genome())
}
