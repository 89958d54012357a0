//! Interval enclosures of the phase-zone functions in compactified coordinates.
//!
//! The second coordinate is `z = 1/d ∈ [0, 1]`, so `z = 0` is the far-field
//! limit. Writing `u = (2 − x)z`, `w = 2 − (2 − x)z` and `G(u) = g(u)/u^{3/2}`,
//! every expression becomes a composition that stays finite on the closed box:
//!
//! ```text
//! f / √x  = x (w/2)^{3/2} G(xw/2) + ¼(xz+1)√(xz+2)(2−x)^{3/2} G(u)
//! f′      = G(u)(2−x)^{3/2}(2(xz+1)²−1) / (4√x√(xz+2)) + (w−1)√(x(2−x))√(w(xz+2)) / 2
//! T1√(x(2−x)) = (x·P(x,z) + 4s(2s−1)) / (2√w√(xz+2)),   s = 1 − z
//! T2√x    = −√((2−x)w)(2(xz+1)²−1) / (2√(xz+2))
//! T3x^{3/2} = (xz+1)(2(xz+1)²−3)(2−x)^{3/2} G(u) / (4(xz+2)^{3/2})
//! ```
//!
//! `G` is decreasing, so its range over an interval comes from the endpoints.
//! Near `u = 0`, where `g(u)/u^{3/2}` is 0/0, a Taylor enclosure replaces it.

use serde::{Deserialize, Serialize};

use super::interval::Interval;
use crate::geometry;
use crate::{Error, Result};

/// Width of the endpoint collars handled by series or weighted forms.
pub const EDGE_COLLAR: f64 = 1.0 / 1_048_576.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expression {
    /// `g(x)`.
    Segment,
    /// `g(x)/x^{3/2}`.
    SegmentOverX32,
    /// `f(x, 1/z)`.
    Area,
    /// `f(x, 1/z)/√x`.
    AreaOverSqrt,
    /// `f(x, 1/z)/f(x/2, 1/z)`.
    AreaRatio,
    /// `∂f/∂x`.
    AreaPrime,
    /// `∂²f/∂x²`. On the endpoint collars only an upper bound is produced.
    AreaSecond,
    /// `T1·√(x(2−x))`.
    T1Weighted,
    /// `T2·√x`.
    T2Weighted,
    /// `T3·x^{3/2}`.
    T3Weighted,
}

impl Expression {
    pub const ALL: [Expression; 10] = [
        Expression::Segment,
        Expression::SegmentOverX32,
        Expression::Area,
        Expression::AreaOverSqrt,
        Expression::AreaRatio,
        Expression::AreaPrime,
        Expression::AreaSecond,
        Expression::T1Weighted,
        Expression::T2Weighted,
        Expression::T3Weighted,
    ];

    /// Whether the expression ignores `z`.
    pub fn is_univariate(self) -> bool {
        matches!(self, Expression::Segment | Expression::SegmentOverX32)
    }

    /// Plain floating-point value at `(x, z)` with `z > 0`, computed through
    /// the `(w, d)` closed forms of the geometry module.
    pub fn point_value(self, x: f64, z: f64) -> Option<f64> {
        use geometry::*;
        let d = 1.0 / z;
        let v = match self {
            Expression::Segment => segment_g(x).ok()?,
            Expression::SegmentOverX32 => segment_g(x).ok()? / (x * libm::sqrt(x)),
            Expression::Area => intersection_area_f(x, d).ok()?,
            Expression::AreaOverSqrt => intersection_area_f(x, d).ok()? / libm::sqrt(x),
            Expression::AreaRatio => {
                intersection_area_f(x, d).ok()? / intersection_area_f(0.5 * x, d).ok()?
            }
            Expression::AreaPrime => f_prime(x, d).ok()?,
            Expression::AreaSecond => f_double_prime(x, d).ok()?,
            Expression::T1Weighted => t_terms(x, d).ok()?.0 * libm::sqrt(x * (2.0 - x)),
            Expression::T2Weighted => t_terms(x, d).ok()?.1 * libm::sqrt(x),
            Expression::T3Weighted => t_terms(x, d).ok()?.2 * x * libm::sqrt(x),
        };
        v.is_finite().then_some(v)
    }
}

/// Axis-aligned box in `(x, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub x: Interval,
    pub z: Interval,
}

impl Box2 {
    pub fn new(x: (f64, f64), z: (f64, f64)) -> Self {
        Self { x: Interval::new(x.0, x.1), z: Interval::new(z.0, z.1) }
    }

    pub fn point(x: f64, z: f64) -> Self {
        Self { x: Interval::point(x), z: Interval::point(z) }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x.mid(), self.z.mid())
    }

    /// Bisects the coordinate with the larger width relative to its domain
    /// extent (2 for `x`, 1 for `z`); ties go to `x`.
    pub fn split(&self, univariate: bool) -> (Box2, Box2) {
        if univariate || self.x.width() / 2.0 >= self.z.width() {
            let (a, b) = self.x.bisect();
            (Box2 { x: a, z: self.z }, Box2 { x: b, z: self.z })
        } else {
            let (a, b) = self.z.bisect();
            (Box2 { x: self.x, z: a }, Box2 { x: self.x, z: b })
        }
    }
}

/// Counts arguments that had to be clipped into a function's domain.
#[derive(Debug, Default, Clone, Copy)]
pub struct EvalStats {
    pub clip_events: u64,
}

struct Eval<'a> {
    stats: &'a mut EvalStats,
}

fn domain_err(op: &'static str, v: f64) -> Error {
    Error::Domain { op, value: v }
}

impl Eval<'_> {
    /// Intersects with the range the quantity is known to lie in; rounding
    /// can push enclosures slightly outside.
    fn clip(&mut self, v: Interval, lo: f64, hi: f64) -> Result<Interval> {
        if v.lo() >= lo && v.hi() <= hi {
            return Ok(v);
        }
        self.stats.clip_events += 1;
        v.intersect(Interval::new(lo, hi)).ok_or(domain_err("clip", v.mid()))
    }

    fn sqrt_nonneg(&mut self, v: Interval) -> Result<Interval> {
        let v = self.clip(v, 0.0, f64::INFINITY)?;
        v.sqrt().ok_or(domain_err("sqrt", v.mid()))
    }

    fn pow3_2(&mut self, v: Interval) -> Result<Interval> {
        let v = self.clip(v, 0.0, f64::INFINITY)?;
        v.pow3_2().ok_or(domain_err("pow3_2", v.mid()))
    }

    /// Enclosure of `g(u)` at a single point, as `θ − (1−u)√(u(2−u))` with the
    /// half angle `θ = 2·asin(√(u/2))`, which stays well conditioned as `u → 0`.
    fn g_at(&mut self, u: f64) -> Result<Interval> {
        let u = Interval::point(u);
        let c = self.clip(1.0 - u, -1.0, 1.0)?;
        let chord = self.sqrt_nonneg(u * (2.0 - u))?;
        let half_chord = self.sqrt_nonneg(u / 2.0)?;
        let half_chord = self.clip(half_chord, 0.0, 1.0)?;
        let angle = 2.0 * half_chord.asin().ok_or(domain_err("asin", half_chord.mid()))?;
        self.clip(angle - c * chord, 0.0, core::f64::consts::PI.next_up())
    }

    /// Enclosure of `g` over an interval (`g` is increasing).
    fn g(&mut self, u: Interval) -> Result<Interval> {
        let u = self.clip(u, 0.0, 2.0)?;
        Ok(Interval::new(self.g_at(u.lo())?.lo(), self.g_at(u.hi())?.hi()))
    }

    /// Enclosure of `G(u) = g(u)/u^{3/2}` at a single point.
    fn big_g_at(&mut self, u: f64) -> Result<Interval> {
        if u <= EDGE_COLLAR {
            // G(u) = 2√2 (2/3 − u/10 − θ(u²/112 + u³/96)), θ ∈ [0, 1].
            let ui = Interval::point(u);
            let two_thirds = Interval::point(2.0) / 3.0;
            let upper = two_thirds - ui / 10.0;
            let rem = ui.sqr() / 112.0 + ui.sqr() * ui / 96.0;
            let core_range = Interval::new((upper - rem).lo(), upper.hi());
            let scale = Interval::point(2.0) * Interval::point(2.0).sqrt().expect("positive");
            return Ok(scale * core_range);
        }
        let g = self.g_at(u)?;
        Ok(g / Interval::point(u).pow3_2().expect("positive"))
    }

    /// Enclosure of `G` over an interval (`G` is decreasing).
    fn big_g(&mut self, u: Interval) -> Result<Interval> {
        let u = self.clip(u, 0.0, 2.0)?;
        Ok(Interval::new(self.big_g_at(u.hi())?.lo(), self.big_g_at(u.lo())?.hi()))
    }

    fn parts(&mut self, b: &Box2) -> Result<Parts> {
        let (x, z) = (b.x, b.z);
        let two_minus_x = self.clip(2.0 - x, 0.0, 2.0)?;
        let u = self.clip(two_minus_x * z, 0.0, 2.0)?;
        let w = self.clip(2.0 - u, 0.0, 2.0)?;
        let t = self.clip(x * z, 0.0, 2.0)?;
        Ok(Parts { x, z, two_minus_x, u, w, t })
    }

    /// `f/√x`.
    fn area_over_sqrt(&mut self, b: &Box2) -> Result<Interval> {
        let p = self.parts(b)?;
        let half_w = p.w / 2.0;
        let xb = self.clip(p.x * half_w, 0.0, 2.0)?;
        let first = p.x * self.pow3_2(half_w)? * self.big_g(xb)?;
        let second = (p.t + 1.0) * self.sqrt_nonneg(p.t + 2.0)? * self.pow3_2(p.two_minus_x)?
            * self.big_g(p.u)?
            / 4.0;
        Ok(first + second)
    }

    fn area(&mut self, b: &Box2) -> Result<Interval> {
        let p = self.parts(b)?;
        let half_w = p.w / 2.0;
        let xb = self.clip(p.x * half_w, 0.0, 2.0)?;
        let first = self.g(xb)?;
        let second = (p.t + 1.0) * self.sqrt_nonneg(p.x)? * self.sqrt_nonneg(p.t + 2.0)?
            * self.pow3_2(p.two_minus_x)?
            * self.big_g(p.u)?
            / 4.0;
        self.clip(first + second, 0.0, core::f64::consts::PI.next_up())
    }

    fn area_prime(&mut self, b: &Box2) -> Result<Interval> {
        if !(b.x.lo() > 0.0) {
            return Err(domain_err("AreaPrime (x must be > 0)", b.x.lo()));
        }
        let p = self.parts(b)?;
        let poly = 2.0 * (p.t + 1.0).sqr() - 1.0;
        let first = self.big_g(p.u)? * self.pow3_2(p.two_minus_x)? * poly
            / (4.0 * self.sqrt_nonneg(p.x)? * self.sqrt_nonneg(p.t + 2.0)?);
        let second = (p.w - 1.0)
            * self.sqrt_nonneg(p.x * p.two_minus_x)?
            * self.sqrt_nonneg(p.w * (p.t + 2.0))?
            / 2.0;
        Ok(first + second)
    }

    fn t1_weighted(&mut self, b: &Box2) -> Result<Interval> {
        let p = self.parts(b)?;
        let (x, z) = (p.x, p.z);
        let s = self.clip(1.0 - z, 0.0, 1.0)?;
        let z2 = z.sqr();
        let z3 = z2 * z;
        // P(x, z) with the x-free part 4s(2s − 1) of the numerator removed.
        let c3 = -3.0 * z3;
        let c2 = 14.0 * z3 - 12.0 * z2;
        let c1 = -20.0 * z3 + 42.0 * z2 - 14.0 * z;
        let c0 = 8.0 * z3 - 40.0 * z2 + 32.0 * z - 4.0;
        let poly = ((c3 * x + c2) * x + c1) * x + c0;
        // w ≥ x and w ≥ s(2 − x) bound both quotients where w → 0.
        let sqrt_w = self.sqrt_nonneg(p.w)?;
        let mut x_over = Interval::new(0.0, self.sqrt_nonneg(x)?.hi());
        let mut s_over = if p.two_minus_x.lo() > 0.0 {
            Interval::new(0.0, self.sqrt_nonneg(s / p.two_minus_x)?.hi())
        } else {
            Interval::new(0.0, f64::INFINITY)
        };
        if sqrt_w.lo() > 0.0 {
            x_over = x_over.intersect(x / sqrt_w).unwrap_or(x_over);
            s_over = s_over.intersect(s / sqrt_w).unwrap_or(s_over);
        }
        let numerator = x_over * poly + 4.0 * s_over * (2.0 * s - 1.0);
        Ok(numerator / (2.0 * self.sqrt_nonneg(p.t + 2.0)?))
    }

    fn t2_weighted(&mut self, b: &Box2) -> Result<Interval> {
        let p = self.parts(b)?;
        let poly = 2.0 * (p.t + 1.0).sqr() - 1.0;
        Ok(-(self.sqrt_nonneg(p.two_minus_x * p.w)? * poly) / (2.0 * self.sqrt_nonneg(p.t + 2.0)?))
    }

    fn t3_weighted(&mut self, b: &Box2) -> Result<Interval> {
        let p = self.parts(b)?;
        let t1 = p.t + 1.0;
        let poly = 2.0 * t1.sqr() - 3.0;
        Ok(t1 * poly * self.pow3_2(p.two_minus_x)? * self.big_g(p.u)?
            / (4.0 * self.pow3_2(p.t + 2.0)?))
    }

    fn area_second(&mut self, b: &Box2) -> Result<Interval> {
        let left = b.x.lo() < EDGE_COLLAR;
        let right = b.x.hi() > 2.0 - EDGE_COLLAR;
        let t1 = self.t1_weighted(b)?;
        let t2 = self.t2_weighted(b)?;
        let t3 = self.t3_weighted(b)?;
        let x = b.x;
        let two_minus_x = self.clip(2.0 - x, 0.0, 2.0)?;
        match (left, right) {
            (false, false) => {
                let sx = self.sqrt_nonneg(x)?;
                Ok(t1 / self.sqrt_nonneg(x * two_minus_x)? + t2 / sx + t3 / self.pow3_2(x)?)
            }
            (true, false) => {
                // x^{3/2} f″ = T1w·x/√(2−x) + T2w·x + T3w.
                let weighted = t1 * x / self.sqrt_nonneg(two_minus_x)? + t2 * x + t3;
                if weighted.hi() < 0.0 {
                    let hi_x = Interval::point(x.hi()).pow3_2().expect("nonneg");
                    Ok(Interval::new(f64::NEG_INFINITY, (Interval::point(weighted.hi()) / hi_x).hi()))
                } else {
                    Ok(Interval::ENTIRE)
                }
            }
            (false, true) => {
                // √(2−x) f″ = T1w/√x + T2w√(2−x)/√x + T3w√(2−x)/x^{3/2}.
                let sx = self.sqrt_nonneg(x)?;
                let s2x = self.sqrt_nonneg(two_minus_x)?;
                let weighted = t1 / sx + t2 * s2x / sx + t3 * s2x / self.pow3_2(x)?;
                if weighted.hi() < 0.0 {
                    let gap = self.sqrt_nonneg(2.0 - Interval::point(x.lo()))?;
                    Ok(Interval::new(f64::NEG_INFINITY, (Interval::point(weighted.hi()) / gap).hi()))
                } else {
                    Ok(Interval::ENTIRE)
                }
            }
            (true, true) => Ok(Interval::ENTIRE),
        }
    }
}

struct Parts {
    x: Interval,
    z: Interval,
    two_minus_x: Interval,
    u: Interval,
    w: Interval,
    t: Interval,
}

/// Encloses the range of `expr` over `b`.
pub fn interval_eval(expr: Expression, b: &Box2) -> Result<Interval> {
    let mut stats = EvalStats::default();
    interval_eval_with(expr, b, &mut stats)
}

/// [`interval_eval`] that also counts clip events.
pub fn interval_eval_with(expr: Expression, b: &Box2, stats: &mut EvalStats) -> Result<Interval> {
    if !b.x.is_subset_of(Interval::new(0.0, 2.0)) {
        return Err(domain_err("interval_eval (x outside [0, 2])", b.x.mid()));
    }
    if !expr.is_univariate() && !b.z.is_subset_of(Interval::new(0.0, 1.0)) {
        return Err(domain_err("interval_eval (z outside [0, 1])", b.z.mid()));
    }
    let mut e = Eval { stats };
    match expr {
        Expression::Segment => e.g(b.x),
        Expression::SegmentOverX32 => e.big_g(b.x),
        Expression::Area => e.area(b),
        Expression::AreaOverSqrt => e.area_over_sqrt(b),
        Expression::AreaRatio => {
            let full = e.area_over_sqrt(b)?;
            let half = e.area_over_sqrt(&Box2 { x: b.x / 2.0, z: b.z })?;
            let sqrt2 = Interval::point(2.0).sqrt().expect("positive");
            Ok(sqrt2 * full / half)
        }
        Expression::AreaPrime => e.area_prime(b),
        Expression::AreaSecond => e.area_second(b),
        Expression::T1Weighted => e.t1_weighted(b),
        Expression::T2Weighted => e.t2_weighted(b),
        Expression::T3Weighted => e.t3_weighted(b),
    }
}
