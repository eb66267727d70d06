//! Cutting speed and feed selection for multi-tool CNC milling.
//!
//! The crate evaluates the profit rate `(S_p - C_u) / T_u` of a milling plan,
//! searches for the best speed/feed per operation with a self-adaptive
//! evolution strategy ([`es`]), and checks that search against an exhaustive
//! grid solver ([`oracle`]).
//!
//! ```
//! use millopt::{case_study::builtin_case, es::{run, EsConfig}};
//!
//! let (plan, _) = builtin_case();
//! let config = EsConfig { stall_limit: 20, max_generations: 50, ..Default::default() };
//! let result = run(&plan, &config).unwrap();
//! assert!(result.feasible());
//! ```

pub mod case_study;
pub mod error;
pub mod es;
pub mod model;
pub mod oracle;
pub mod report;

pub use error::{Error, Result};
pub use model::{DecisionVector, Evaluator, MillingPlan};
