//! Closed intervals with outward rounding.
//!
//! Directed rounding is emulated without touching the FPU rounding mode: each
//! `+ − × ÷ √` computes the round-to-nearest result, recovers the sign of its
//! rounding error with an error-free transformation (TwoSum, Dekker's
//! TwoProduct), and steps one ulp outward only when the result was inexact.
//! Exact results such as `0·x` stay exact, so non-strict bounds like `≤ 0` can
//! be certified. Operands too large or too small for the transformations are
//! widened unconditionally.

use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// How results are rounded, recorded in proof certificates.
pub const ROUNDING_MODE: &str =
    "round-to-nearest with error-free-transform directed rounding (TwoSum/TwoProduct), \
     1-ulp outward steps on inexact results, 2-ulp widening for arcsin/arccos";

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

// Beyond these magnitudes Veltkamp splitting may overflow or the error term
// may underflow.
const EFT_MAX: f64 = 1.0e290;
const EFT_MIN: f64 = 1.0e-280;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

#[inline]
fn eft_safe(v: f64) -> bool {
    let m = v.abs();
    m == 0.0 || (EFT_MIN..=EFT_MAX).contains(&m)
}

/// Rounds `approx` toward −∞ or +∞ given the sign of `true − approx`.
#[inline]
fn directed(approx: f64, residual_sign: f64, up: bool) -> f64 {
    if up {
        if residual_sign > 0.0 { approx.next_up() } else { approx }
    } else if residual_sign < 0.0 {
        approx.next_down()
    } else {
        approx
    }
}

fn add_dir(a: f64, b: f64, up: bool) -> f64 {
    let s = a + b;
    if s.is_nan() {
        return if up { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    if !s.is_finite() {
        if a.is_finite() && b.is_finite() {
            // Overflow of a finite sum.
            return match (up, s > 0.0) {
                (false, true) => f64::MAX,
                (true, false) => f64::MIN,
                _ => s,
            };
        }
        return s;
    }
    let (_, e) = two_sum(a, b);
    directed(s, e, up)
}

fn mul_dir(a: f64, b: f64, up: bool) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        if a.is_finite() && b.is_finite() {
            return match (up, p > 0.0) {
                (false, true) => f64::MAX,
                (true, false) => f64::MIN,
                _ => p,
            };
        }
        return p;
    }
    if !(eft_safe(a) && eft_safe(b) && eft_safe(p) && p.abs() > EFT_MIN) {
        return if up { p.next_up() } else { p.next_down() };
    }
    let (_, e) = two_prod(a, b);
    directed(p, e, up)
}

fn div_dir(a: f64, b: f64, up: bool) -> f64 {
    if a == 0.0 && b != 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() || q == 0.0 {
        if q.is_nan() {
            return if up { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if a.is_finite() && b.is_finite() && b != 0.0 {
            return if up { q.next_up() } else { q.next_down() };
        }
        return q;
    }
    if !(eft_safe(a) && eft_safe(b) && eft_safe(q) && q.abs() > EFT_MIN) {
        return if up { q.next_up() } else { q.next_down() };
    }
    // a − q·b is exact in the first subtraction (Sterbenz) and keeps its sign.
    let (p, e) = two_prod(q, b);
    let residual = (a - p) - e;
    // true quotient = q + residual / b
    let sign = if b > 0.0 { residual } else { -residual };
    directed(q, sign, up)
}

fn sqrt_dir(x: f64, up: bool) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return x;
    }
    let s = libm::sqrt(x);
    if !(eft_safe(x) && eft_safe(s)) {
        return if up { s.next_up() } else { s.next_down().max(0.0) };
    }
    let (p, e) = two_prod(s, s);
    directed(s, (x - p) - e, up)
}

impl Interval {
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    /// Panics if `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            self.lo + 0.5 * (self.hi - self.lo)
        } else {
            0.5 * (self.lo + self.hi)
        }
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(self, other: Interval) -> Option<Interval> {
        Interval::try_new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Splits at the midpoint.
    pub fn bisect(self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    pub fn sqr(self) -> Interval {
        if self.lo >= 0.0 {
            Interval { lo: mul_dir(self.lo, self.lo, false), hi: mul_dir(self.hi, self.hi, true) }
        } else if self.hi <= 0.0 {
            Interval { lo: mul_dir(self.hi, self.hi, false), hi: mul_dir(self.lo, self.lo, true) }
        } else {
            let m = self.lo.abs().max(self.hi);
            Interval { lo: 0.0, hi: mul_dir(m, m, true) }
        }
    }

    /// Square root of the non-negative part. Returns `None` when the interval
    /// lies entirely below zero.
    pub fn sqrt(self) -> Option<Interval> {
        if self.hi < 0.0 {
            return None;
        }
        Some(Interval { lo: sqrt_dir(self.lo.max(0.0), false), hi: sqrt_dir(self.hi, true) })
    }

    /// `x^{3/2}` of the non-negative part.
    pub fn pow3_2(self) -> Option<Interval> {
        let nonneg = Interval { lo: self.lo.max(0.0), hi: self.hi };
        Some(nonneg * nonneg.sqrt()?)
    }

    /// Arccos of the part inside `[-1, 1]`, widened by two ulps per side.
    pub fn acos(self) -> Option<Interval> {
        let c = self.intersect(Interval::new(-1.0, 1.0))?;
        let pi_hi = PI.next_up();
        let lo = libm::acos(c.hi).next_down().next_down().max(0.0);
        let hi = libm::acos(c.lo).next_up().next_up().min(pi_hi);
        Some(Interval { lo, hi })
    }

    /// Arcsine of the part inside `[-1, 1]`, widened by two ulps per side.
    pub fn asin(self) -> Option<Interval> {
        let c = self.intersect(Interval::new(-1.0, 1.0))?;
        let half_pi = core::f64::consts::FRAC_PI_2.next_up();
        let lo = libm::asin(c.lo).next_down().next_down().max(-half_pi);
        let hi = libm::asin(c.hi).next_up().next_up().min(half_pi);
        Some(Interval { lo, hi })
    }

    pub fn scale(self, k: f64) -> Interval {
        self * Interval::point(k)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: add_dir(self.lo, o.lo, false), hi: add_dir(self.hi, o.hi, true) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        self + (-o)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in pairs {
            lo = lo.min(mul_dir(a, b, false));
            hi = hi.max(mul_dir(a, b, true));
        }
        Interval { lo, hi }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            if self.is_point() && self.lo == 0.0 && !(o.lo == 0.0 && o.hi == 0.0) {
                return Interval::point(0.0);
            }
            return Interval::ENTIRE;
        }
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in pairs {
            lo = lo.min(div_dir(a, b, false));
            hi = hi.max(div_dir(a, b, true));
        }
        Interval { lo, hi }
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<f64> for Interval {
            type Output = Interval;
            fn $f(self, o: f64) -> Interval { $tr::$f(self, Interval::point(o)) }
        }
        impl $tr<Interval> for f64 {
            type Output = Interval;
            fn $f(self, o: Interval) -> Interval { $tr::$f(Interval::point(self), o) }
        }
    )*};
}
scalar_ops!(Add add, Sub sub, Mul mul, Div div);
