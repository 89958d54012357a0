//! Closed-form geometry of the phase zones around a receiver.
//!
//! A receiver sits at distance `d` from the disk center on the positive x axis.
//! Relays whose excess path `Δ_d(p)` is at most `w` fill an ellipse with foci
//! at the center and the receiver. [`intersection_area_f`] is the area of that
//! ellipse inside the unit sender disk, and its derivatives in `w` drive the
//! analysis of the coherent phasor sum.

use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use libm::{acos, sqrt};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = libm::sincos(angle);
        Self::new(radius * c, radius * s)
    }

    pub fn norm(self) -> f64 {
        sqrt(self.norm_sq())
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point2) -> f64 {
        (self - other).norm_sq()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// Excess path length through `p` between the center and a receiver at `(d, 0)`.
pub fn delta_d(p: Point2, d: f64) -> f64 {
    let direct = p.norm();
    let to_receiver = libm::hypot(d - p.x, p.y);
    // The triangle inequality guarantees a non-negative value; rounding may not.
    (direct + to_receiver - d).max(0.0)
}

/// Shape of the phase ellipse `{p : Δ_d(p) = w}` and its cut through the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseParams {
    pub d: f64,
    pub w: f64,
    /// Semi-major axis.
    pub r1: f64,
    /// Semi-minor axis.
    pub r2: f64,
    /// Depth of the unit-circle segment cut off by the ellipse.
    pub z0: f64,
    /// Depth of the elliptical segment lying inside the unit circle.
    pub z1: f64,
    /// Intersection point of ellipse and unit circle (upper half).
    pub x0: f64,
    pub y0: f64,
}

impl EllipseParams {
    pub fn new(w: f64, d: f64) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Domain { op: "EllipseParams::new (d)", value: d });
        }
        if !(w > 0.0 && w <= 2.0) {
            return Err(Error::Domain { op: "EllipseParams::new (w)", value: w });
        }
        let r1 = 0.5 * (d + w);
        let r2 = 0.5 * sqrt((2.0 * d + w) * w);
        let z0 = w * (2.0 * d - 2.0 + w) / (2.0 * d);
        let z1 = (2.0 - w) * (d + w) / (2.0 * d);
        let x0 = 1.0 - z0;
        let y0 = sqrt((1.0 - x0 * x0).max(0.0));
        Ok(Self { d, w, r1, r2, z0, z1, x0, y0 })
    }
}

/// `g(x) = (t − sin t)/2` with central angle `t = 4·asin(√(x/2))`. The direct
/// form `arccos(1−x) − (1−x)√(x(2−x))` cancels catastrophically for small `x`.
fn g_unchecked(x: f64) -> f64 {
    let x = x.clamp(0.0, 2.0);
    let t = 4.0 * libm::asin(sqrt(0.5 * x));
    0.5 * t_minus_sin(t)
}

fn t_minus_sin(t: f64) -> f64 {
    if t >= 1.0 {
        return t - libm::sin(t);
    }
    // t³/3! − t⁵/5! + …; eleven terms reach full precision for t < 1.
    let t2 = t * t;
    let mut term = t * t2 / 6.0;
    let mut sum = 0.0;
    for k in 1..=11 {
        sum += term;
        let k = k as f64;
        term *= -t2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    sum
}

/// Area of the unit-circle segment of depth `x`.
pub fn segment_g(x: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&x) {
        return Err(Error::Domain { op: "segment_g", value: x });
    }
    Ok(g_unchecked(x))
}

/// Area of the segment of depth `z` of an ellipse with semi-axes `r1` (along the cut
/// direction) and `r2`.
pub fn segment_area(r1: f64, r2: f64, z: f64) -> Result<f64> {
    if !(r1 > 0.0) {
        return Err(Error::Domain { op: "segment_area (r1)", value: r1 });
    }
    if !(r2 > 0.0) {
        return Err(Error::Domain { op: "segment_area (r2)", value: r2 });
    }
    if !(0.0..=2.0 * r1).contains(&z) {
        return Err(Error::Domain { op: "segment_area (z)", value: z });
    }
    Ok(r1 * r2 * g_unchecked((z / r1).min(2.0)))
}

fn check_wd(op: &'static str, w: f64, d: f64, open: bool) -> Result<()> {
    if !(d >= 1.0) || d.is_nan() {
        return Err(Error::Domain { op, value: d });
    }
    let ok = if open { w > 0.0 && w < 2.0 } else { (0.0..=2.0).contains(&w) };
    if !ok {
        return Err(Error::Domain { op, value: w });
    }
    Ok(())
}

/// Area of `{p ∈ D_1 : Δ_d(p) ≤ w}`.
///
/// Saturates at `π` for `w = 2`, where the ellipse contains the whole disk.
pub fn intersection_area_f(w: f64, d: f64) -> Result<f64> {
    check_wd("intersection_area_f", w, d, false)?;
    if w == 0.0 {
        return Ok(0.0);
    }
    if w == 2.0 {
        return Ok(PI);
    }
    let circle_part = g_unchecked((w * (2.0 * d + w - 2.0) / (2.0 * d)).clamp(0.0, 2.0));
    let ellipse_part =
        0.25 * (d + w) * sqrt(w * (2.0 * d + w)) * g_unchecked(((2.0 - w) / d).clamp(0.0, 2.0));
    Ok(circle_part + ellipse_part)
}

/// `∂f/∂w` on the open interval `w ∈ (0, 2)`.
pub fn f_prime(w: f64, d: f64) -> Result<f64> {
    check_wd("f_prime", w, d, true)?;
    let (x, y) = (w, d);
    let first = g_unchecked((2.0 - x) / y) * (2.0 * x * x + 4.0 * x * y + y * y)
        / (4.0 * sqrt(x * (x + 2.0 * y)));
    let second = (x + y - 2.0) / (2.0 * y * y)
        * sqrt(x * (2.0 - x) * (x + 2.0 * y - 2.0) * (x + 2.0 * y));
    Ok(first + second)
}

/// The three addends of `∂²f/∂w²`.
pub fn t_terms(w: f64, d: f64) -> Result<(f64, f64, f64)> {
    check_wd("t_terms", w, d, true)?;
    let (x, y) = (w, d);
    // Numerator of the first term in Horner form in x.
    let numerator = (((-3.0 * x + (14.0 - 12.0 * y)) * x + (-14.0 * y * y + 42.0 * y - 20.0)) * x
        + (-4.0 * y * y * y + 32.0 * y * y - 40.0 * y + 8.0))
        * x
        + 4.0 * y * (y * y - 3.0 * y + 2.0);
    let t1 = numerator
        / (2.0 * y * y * sqrt((2.0 - x) * x * (x + 2.0 * y - 2.0) * (x + 2.0 * y)));
    let t2 = -sqrt((2.0 - x) * (x + 2.0 * y - 2.0)) * (2.0 * x * x + 4.0 * x * y + y * y)
        / (2.0 * y * y * sqrt(x * (x + 2.0 * y)));
    let t3 = (x + y) * (2.0 * x * x + 4.0 * x * y - y * y) * g_unchecked((2.0 - x) / y)
        / (4.0 * (x * (x + 2.0 * y)) * sqrt(x * (x + 2.0 * y)));
    Ok((t1, t2, t3))
}

/// `∂²f/∂w²` on the open interval `w ∈ (0, 2)`.
pub fn f_double_prime(w: f64, d: f64) -> Result<f64> {
    let (t1, t2, t3) = t_terms(w, d)?;
    Ok(t1 + t2 + t3)
}

/// `lim_{d→∞} f(w, d)`.
pub fn f_limit_inf(w: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&w) {
        return Err(Error::Domain { op: "f_limit_inf", value: w });
    }
    Ok((w + 1.0) * sqrt((2.0 - w) * w) / 3.0 + acos(1.0 - w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use core::f64::consts::{FRAC_PI_2, SQRT_2};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_d(Point2::ORIGIN, 5.0), 0.0);
        for d in [0.5, 1.0, 7.0, 100.0] {
            assert!((delta_d(Point2::new(-1.0, 0.0), d) - 2.0).abs() < 1e-12);
        }
        let v = delta_d(Point2::new(2.0, 1.0), 4.0);
        assert!((v - (2.0 * sqrt(5.0) - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn delta_triangle_bounds() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..10_000 {
            let p = Point2::new(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
            let d = rng.uniform(1e-3, 50.0);
            let v = delta_d(p, d);
            assert!(v >= 0.0);
            assert!(v <= 2.0 * p.norm() + 1e-12);
        }
    }

    #[test]
    fn segment_examples() {
        assert_eq!(segment_g(0.0).unwrap(), 0.0);
        assert!((segment_g(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((segment_g(2.0).unwrap() - PI).abs() < 1e-15);
        assert!(segment_g(-0.1).is_err());
        assert!(segment_g(2.1).is_err());
        assert!((segment_area(1.0, 1.0, 2.0).unwrap() - PI).abs() < 1e-15);
        assert!((segment_area(2.0, 1.0, 2.0).unwrap() - PI).abs() < 1e-15);
        assert!(segment_area(1.0, 1.0, 2.5).is_err());
        assert!(segment_area(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn segment_area_matches_quadrature() {
        // Area of {(u,v) : (u/r1)² + (v/r2)² ≤ 1, u ≥ r1 − z} by midpoint rule in u.
        let (r1, r2, z) = (3.0, 0.5, 0.3);
        let steps = 200_000;
        let h = z / steps as f64;
        let mut area = 0.0;
        for k in 0..steps {
            let u = r1 - z + (k as f64 + 0.5) * h;
            area += 2.0 * r2 * sqrt((1.0 - (u / r1) * (u / r1)).max(0.0)) * h;
        }
        let closed = segment_area(r1, r2, z).unwrap();
        assert!(close(closed, 1.5 * segment_g(0.1).unwrap(), 1e-15));
        assert!(close(closed, area, 1e-6), "{closed} vs {area}");
    }

    #[test]
    fn g_matches_direct_form_and_small_x_limit() {
        for k in 1..200 {
            let x = k as f64 / 100.0;
            let direct = acos(1.0 - x) - (1.0 - x) * sqrt(x * (2.0 - x));
            assert!(close(segment_g(x).unwrap(), direct, 1e-13), "x={x}");
        }
        let x = 1e-12;
        let limit = 4.0 * SQRT_2 / 3.0 * x * sqrt(x) * (1.0 - 0.15 * x);
        assert!(close(segment_g(x).unwrap(), limit, 1e-14));
    }

    #[test]
    fn g_derivative_is_twice_half_chord() {
        for &x in &[0.1, 0.5, 1.0, 1.7] {
            let h = 1e-6;
            let fd = (segment_g(x + h).unwrap() - segment_g(x - h).unwrap()) / (2.0 * h);
            assert!(close(fd, 2.0 * sqrt(x * (2.0 - x)), 1e-8));
        }
    }

    #[test]
    fn f_examples_and_endpoints() {
        assert_eq!(intersection_area_f(0.0, 10.0).unwrap(), 0.0);
        for d in [1.0, 1.5, 10.0, 1e6] {
            assert!((intersection_area_f(2.0, d).unwrap() - PI).abs() < 1e-12);
            // The closed form itself (not the saturation branch) approaches π.
            assert!((intersection_area_f(2.0 - 1e-13, d).unwrap() - PI).abs() < 1e-6);
        }
        assert!(intersection_area_f(2.1, 3.0).is_err());
        assert!(intersection_area_f(1.0, 0.5).is_err());
    }

    #[test]
    fn f_monotone_and_sandwiched() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..20_000 {
            let d = 1.0 + 1.0 / rng.uniform(1e-6, 1.0) - 1.0;
            let w1 = rng.uniform(0.0, 2.0);
            let w2 = rng.uniform(w1, 2.0);
            let f1 = intersection_area_f(w1, d).unwrap();
            let f2 = intersection_area_f(w2, d).unwrap();
            assert!(f1 <= f2 + 1e-14);
            if w1 > 0.0 {
                let s = sqrt(w1);
                assert!(s < f1 && f1 < 7.0 / 3.0 * s, "w={w1} d={d}");
                if d >= 2.0 {
                    assert!(1.5 * s < f1);
                }
                if d > 1.0 {
                    let half = intersection_area_f(w1 / 2.0, d).unwrap();
                    assert!(f1 / half > 1.4, "w={w1} d={d}");
                }
            }
        }
    }

    #[test]
    fn ellipse_cut_point_identities() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..1000 {
            let w = rng.uniform(1e-3, 2.0 - 1e-3);
            let d = rng.uniform(2.0, 100.0);
            let e = EllipseParams::new(w, d).unwrap();
            assert!((e.x0 * e.x0 + e.y0 * e.y0 - 1.0).abs() < 1e-10);
            let lhs = (d - e.x0) * (d - e.x0) + e.y0 * e.y0;
            let rhs = (d - 1.0 + w) * (d - 1.0 + w);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
            assert!(e.r1 >= e.r2 && e.r2 > 0.0);
            // Both segment constructions sum to f.
            let f = intersection_area_f(w, d).unwrap();
            let parts = segment_g(e.z0).unwrap() + segment_area(e.r1, e.r2, e.z1).unwrap();
            assert!(close(f, parts, 1e-12));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &(w, d) in &[(1.0, 10.0), (0.5, 1.0), (1.5, 3.0), (0.2, 50.0)] {
            let h = 1e-6;
            let f = |w| intersection_area_f(w, d).unwrap();
            let fd1 = (f(w + h) - f(w - h)) / (2.0 * h);
            assert!(close(f_prime(w, d).unwrap(), fd1, 1e-4));
            let h2 = 1e-4;
            let fd2 = (f(w + h2) - 2.0 * f(w) + f(w - h2)) / (h2 * h2);
            assert!(close(f_double_prime(w, d).unwrap(), fd2, 1e-3));
        }
        assert!(f_prime(0.0, 2.0).is_err());
        assert!(f_double_prime(2.0, 2.0).is_err());
    }

    #[test]
    fn t_terms_examples() {
        let (a, b, c) = t_terms(1.0, 10.0).unwrap();
        assert!(close(a + b + c, f_double_prime(1.0, 10.0).unwrap(), 1e-12));
        let mut rng = SplitMix64::new(5);
        for _ in 0..5000 {
            let w = rng.uniform(1e-6, 2.0 - 1e-6);
            let d = 1.0 / rng.uniform(1e-6, 1.0);
            let (_, t2, t3) = t_terms(w, d).unwrap();
            let v = t2 * sqrt(w);
            assert!((-3.0..=0.0).contains(&v));
            if w <= 0.01 {
                assert!(t3 * w * sqrt(w) <= -0.2);
            }
        }
        assert!(f_double_prime(0.02, 5.0).unwrap() <= -0.125);
    }

    #[test]
    fn second_derivative_near_right_edge() {
        // The steep-descent regime sits at the left edge; near w = 2 the
        // second derivative stays moderate.
        let v = f_double_prime(1.99, 3.0).unwrap();
        assert!(v <= -1.4 && v > -199.0, "{v}");
        assert!(f_double_prime(0.01, 3.0).unwrap() <= -199.0);
    }

    #[test]
    fn limit_at_infinity() {
        assert_eq!(f_limit_inf(0.0).unwrap(), 0.0);
        assert!((f_limit_inf(2.0).unwrap() - PI).abs() < 1e-15);
        assert!((f_limit_inf(1.0).unwrap() - (2.0 / 3.0 + FRAC_PI_2)).abs() < 1e-15);
        for &w in &[0.3, 1.0, 1.9] {
            let far = intersection_area_f(w, 1e7).unwrap();
            assert!((far - f_limit_inf(w).unwrap()).abs() < 1e-6);
        }
        // The large-d ratio at w = 2 is π/(2/3 + π/2), not √2.
        let r = f_limit_inf(2.0).unwrap() / f_limit_inf(1.0).unwrap();
        assert!(r > 1.404 && r < SQRT_2);
    }
}
