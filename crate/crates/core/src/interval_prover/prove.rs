//! Adaptive bisection prover.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::expr::{interval_eval_with, Box2, EvalStats, Expression};
use super::interval::{Interval, ROUNDING_MODE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Gt => ">",
        }
    }

    /// True when every value in `enc` satisfies `value ∘ bound`.
    pub fn certifies(self, enc: Interval, bound: f64) -> bool {
        match self {
            Relation::Le => enc.hi() <= bound,
            Relation::Lt => enc.hi() < bound,
            Relation::Ge => enc.lo() >= bound,
            Relation::Gt => enc.lo() > bound,
        }
    }

    /// True when every value in `enc` violates `value ∘ bound`.
    pub fn refutes(self, enc: Interval, bound: f64) -> bool {
        match self {
            Relation::Le => enc.lo() > bound,
            Relation::Lt => enc.lo() >= bound,
            Relation::Ge => enc.hi() < bound,
            Relation::Gt => enc.hi() <= bound,
        }
    }

    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Relation::Le => value <= bound,
            Relation::Lt => value < bound,
            Relation::Ge => value >= bound,
            Relation::Gt => value > bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofTask {
    pub name: String,
    pub expression: Expression,
    pub domain: Box2,
    pub bound: f64,
    pub relation: Relation,
    pub max_depth: usize,
    pub max_boxes: u64,
}

pub const DEFAULT_MAX_BOXES: u64 = 1 << 24;
pub const DEFAULT_MAX_DEPTH: usize = 80;

impl ProofTask {
    pub fn new(name: &str, expression: Expression, domain: Box2, relation: Relation, bound: f64) -> Self {
        Self {
            name: name.into(),
            expression,
            domain,
            bound,
            relation,
            max_depth: DEFAULT_MAX_DEPTH,
            max_boxes: DEFAULT_MAX_BOXES,
        }
    }

    pub fn with_budget(mut self, max_boxes: u64) -> Self {
        self.max_boxes = max_boxes;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Proved,
    Exhausted,
    Refuted,
}

/// A box that could not be certified, with a concrete point inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub region: Box2,
    pub x: f64,
    pub z: f64,
    /// Rigorous enclosure of the expression at the point.
    pub enclosure: Interval,
    /// Plain floating-point value at the point, when it has a closed form.
    pub plain_value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub region: Box2,
    pub enclosure: Interval,
    pub depth: usize,
}

pub const MAX_RECORDED_LEAVES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofResult {
    pub verdict: Verdict,
    pub boxes_processed: u64,
    pub deepest_level: usize,
    pub witness: Option<Witness>,
    pub leaf_count: u64,
    /// The first certified leaves, up to [`MAX_RECORDED_LEAVES`].
    pub leaves: Vec<Leaf>,
    pub leaves_elided: bool,
    pub clip_events: u64,
    pub rounding_mode: String,
}

fn witness_at(task: &ProofTask, region: Box2, stats: &mut EvalStats) -> Witness {
    let (x, z) = region.center();
    let z = if task.expression.is_univariate() { region.z.lo() } else { z };
    let enclosure =
        interval_eval_with(task.expression, &Box2::point(x, z), stats).unwrap_or(Interval::ENTIRE);
    let plain_value = if z > 0.0 || task.expression.is_univariate() {
        task.expression.point_value(x, z.max(f64::MIN_POSITIVE))
    } else {
        None
    };
    Witness { region, x, z, enclosure, plain_value }
}

/// Depth-first bisection until every leaf box certifies the relation, a point
/// provably violates it, or the budget runs out.
pub fn prove_inequality(task: &ProofTask) -> ProofResult {
    let mut stats = EvalStats::default();
    let mut result = ProofResult {
        verdict: Verdict::Proved,
        boxes_processed: 0,
        deepest_level: 0,
        witness: None,
        leaf_count: 0,
        leaves: Vec::new(),
        leaves_elided: false,
        clip_events: 0,
        rounding_mode: ROUNDING_MODE.into(),
    };
    let univariate = task.expression.is_univariate();
    let mut stack = vec![(task.domain, 0usize)];
    while let Some((region, depth)) = stack.pop() {
        if result.boxes_processed >= task.max_boxes {
            result.verdict = Verdict::Exhausted;
            result.witness = Some(witness_at(task, region, &mut stats));
            break;
        }
        result.boxes_processed += 1;
        result.deepest_level = result.deepest_level.max(depth);
        let enc = interval_eval_with(task.expression, &region, &mut stats).unwrap_or(Interval::ENTIRE);
        if task.relation.certifies(enc, task.bound) {
            result.leaf_count += 1;
            if result.leaves.len() < MAX_RECORDED_LEAVES {
                result.leaves.push(Leaf { region, enclosure: enc, depth });
            } else {
                result.leaves_elided = true;
            }
            continue;
        }
        let probe = witness_at(task, region, &mut stats);
        if task.relation.refutes(probe.enclosure, task.bound) {
            result.verdict = Verdict::Refuted;
            result.witness = Some(probe);
            break;
        }
        if depth >= task.max_depth {
            result.verdict = Verdict::Exhausted;
            result.witness = Some(probe);
            break;
        }
        let (a, b) = region.split(univariate);
        stack.push((b, depth + 1));
        stack.push((a, depth + 1));
    }
    result.clip_events = stats.clip_events;
    result
}
