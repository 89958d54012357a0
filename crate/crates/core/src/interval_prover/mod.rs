//! Rigorous verification of the phase-zone inequalities by outward-rounded
//! interval arithmetic and adaptive bisection over `(x, z = 1/d)` boxes.

mod expr;
mod interval;
mod prove;
mod suite;

pub use expr::{interval_eval, interval_eval_with, Box2, EvalStats, Expression, EDGE_COLLAR};
pub use interval::{Interval, ROUNDING_MODE};
pub use prove::{
    prove_inequality, Leaf, ProofResult, ProofTask, Relation, Verdict, Witness, DEFAULT_MAX_BOXES,
    DEFAULT_MAX_DEPTH, MAX_RECORDED_LEAVES,
};
pub use suite::{misplaced_collar_task, inequality_suite, suite_tasks, task_by_name, SuiteEntry};
