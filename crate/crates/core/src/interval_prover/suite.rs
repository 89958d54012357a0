//! The fixed catalog of inequalities verified by the prover.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::expr::{Box2, Expression};
use super::prove::{prove_inequality, ProofResult, ProofTask, Relation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub task: ProofTask,
    pub result: ProofResult,
}

const FULL: (f64, f64) = (0.0, 2.0);
const ALL_Z: (f64, f64) = (0.0, 1.0);
const INNER: (f64, f64) = (0.01, 1.99);
const LEFT_COLLAR: (f64, f64) = (0.0, 0.01);
const RIGHT_COLLAR: (f64, f64) = (1.99, 2.0);

/// All suite tasks with the given box budget.
pub fn suite_tasks(max_boxes: u64) -> Vec<ProofTask> {
    use Expression::*;
    use Relation::*;
    let t = |name, expr, x, z, rel, bound| ProofTask::new(name, expr, Box2::new(x, z), rel, bound);
    let tasks = [
        t("area_prime_positive", AreaPrime, INNER, ALL_Z, Gt, 0.0),
        t("area_over_sqrt_above_1", AreaOverSqrt, FULL, ALL_Z, Gt, 1.0),
        t("area_over_sqrt_below_7_3", AreaOverSqrt, FULL, ALL_Z, Lt, 7.0 / 3.0),
        t("area_over_sqrt_above_3_2_far", AreaOverSqrt, FULL, (0.0, 0.5), Gt, 1.5),
        t("area_ratio_above_7_5", AreaRatio, FULL, ALL_Z, Gt, 1.4),
        t("t1_weighted_above_neg_2", T1Weighted, FULL, ALL_Z, Ge, -2.0),
        t("t1_weighted_below_2", T1Weighted, FULL, ALL_Z, Le, 2.0),
        t("t2_weighted_above_neg_3", T2Weighted, FULL, ALL_Z, Ge, -3.0),
        t("t2_weighted_nonpositive", T2Weighted, FULL, ALL_Z, Le, 0.0),
        t("t3_weighted_above_neg_1", T3Weighted, FULL, ALL_Z, Ge, -1.0),
        t("t3_weighted_below_1", T3Weighted, FULL, ALL_Z, Le, 1.0),
        t("t3_weighted_left_collar", T3Weighted, LEFT_COLLAR, ALL_Z, Le, -0.2),
        t("area_second_inner", AreaSecond, INNER, ALL_Z, Le, -0.125),
        t("area_second_inner_quarter", AreaSecond, INNER, ALL_Z, Lt, -0.25),
        t("area_second_left_collar", AreaSecond, LEFT_COLLAR, ALL_Z, Le, -199.0),
        t("area_second_right_collar", AreaSecond, RIGHT_COLLAR, ALL_Z, Le, -1.4),
        t("segment_ratio_above_1", SegmentOverX32, FULL, (0.0, 0.0), Ge, 1.0),
        t("segment_ratio_below_2", SegmentOverX32, FULL, (0.0, 0.0), Le, 2.0),
    ];
    tasks.into_iter().map(|t| t.with_budget(max_boxes)).collect()
}

/// The steep bound `f″ ≤ −199` placed on the right collar `[1.99, 2]`. It is
/// false there (`f″(1.99, 3) ≈ −8.1`); it holds on the left collar instead.
pub fn misplaced_collar_task(max_boxes: u64) -> ProofTask {
    ProofTask::new(
        "area_second_right_collar_steep",
        Expression::AreaSecond,
        Box2::new(RIGHT_COLLAR, ALL_Z),
        Relation::Le,
        -199.0,
    )
    .with_budget(max_boxes)
}

pub fn task_by_name(name: &str, max_boxes: u64) -> Option<ProofTask> {
    let mut all = suite_tasks(max_boxes);
    all.push(misplaced_collar_task(max_boxes));
    all.into_iter().find(|t| t.name == name)
}

/// Runs every suite task. The suite passes iff every verdict is `Proved`.
pub fn inequality_suite(max_boxes: u64) -> Vec<SuiteEntry> {
    suite_tasks(max_boxes)
        .into_iter()
        .map(|task| {
            let result = prove_inequality(&task);
            SuiteEntry { task, result }
        })
        .collect()
}
