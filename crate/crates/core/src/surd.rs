//! Exact arithmetic for grid-derived coordinates.
//!
//! Grid lines sit at rational multiples of `λ = √L`, where `L` is an integer
//! squared distance on the point lattice. Every such coordinate has the form
//! `a + (m / DENOM)·λ` with integers `a, m`, and every predicate over these
//! coordinates reduces to the sign of `X + Y·λ` for integers `X, Y`.
//! Predicates try a floating-point filter first and fall back to big
//! integers when the filter cannot decide.

use std::cmp::Ordering;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::geom::Point;

/// Common denominator of every `λ` coefficient.
pub const DENOM: i128 = 14_000;

const FILTER_EPS: f64 = 1e-13;

/// `a + (m / DENOM)·λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    pub a: i128,
    pub m: i128,
}

impl Surd {
    pub const ZERO: Surd = Surd { a: 0, m: 0 };

    pub const fn new(a: i128, m: i128) -> Self {
        Self { a, m }
    }

    pub const fn int(a: i64) -> Self {
        Self { a: a as i128, m: 0 }
    }

    /// `(num / den)·λ`; `den` must divide [`DENOM`].
    pub fn lambda_ratio(num: i128, den: i128) -> Self {
        assert!(den > 0 && DENOM % den == 0, "denominator {den} does not divide {DENOM}");
        Self { a: 0, m: num * (DENOM / den) }
    }

    pub fn times(self, k: i128) -> Self {
        Self { a: self.a * k, m: self.m * k }
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        Surd { a: self.a + o.a, m: self.m + o.m }
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        Surd { a: self.a - o.a, m: self.m - o.m }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { a: -self.a, m: -self.m }
    }
}

/// A point whose coordinates are [`Surd`]s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct SPoint {
    pub x: Surd,
    pub y: Surd,
}

impl SPoint {
    pub const fn new(x: Surd, y: Surd) -> Self {
        Self { x, y }
    }

    pub const fn from_point(p: Point) -> Self {
        Self { x: Surd::int(p.x), y: Surd::int(p.y) }
    }

    /// `self + (dx, dy)·λ/den`.
    pub fn offset(self, dx: i128, dy: i128, den: i128) -> Self {
        Self { x: self.x + Surd::lambda_ratio(dx, den), y: self.y + Surd::lambda_ratio(dy, den) }
    }
}

impl From<Point> for SPoint {
    fn from(p: Point) -> Self {
        Self::from_point(p)
    }
}

/// The field context: knows `L`.
#[derive(Clone, Debug)]
pub struct Field {
    l: i128,
    root: f64,
    /// `√L` when `L` is a perfect square.
    exact_root: Option<i128>,
}

fn big(v: i128) -> BigInt {
    BigInt::from(v)
}

fn sign_of(v: &BigInt) -> Ordering {
    if v.is_zero() {
        Ordering::Equal
    } else if v.is_negative() {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Sign of `x + y·√l`.
fn sign_xy(x: &BigInt, y: &BigInt, l: i128, exact_root: Option<i128>) -> Ordering {
    if let Some(r) = exact_root {
        return sign_of(&(x + y * big(r)));
    }
    let sx = sign_of(x);
    let sy = sign_of(y);
    if sx == Ordering::Equal {
        return sy;
    }
    if sy == Ordering::Equal || sx == sy {
        return sx;
    }
    // Opposite signs: the larger magnitude wins.
    match (x * x).cmp(&(y * y * big(l))) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

impl Field {
    pub fn new(l: i128) -> Self {
        assert!(l > 0, "field needs a positive radicand");
        let mut r = (l as f64).sqrt() as i128;
        while r * r > l {
            r -= 1;
        }
        while (r + 1) * (r + 1) <= l {
            r += 1;
        }
        let exact_root = (r * r == l).then_some(r);
        Self { l, root: (l as f64).sqrt(), exact_root }
    }

    pub fn radicand(&self) -> i128 {
        self.l
    }

    pub fn lambda_f64(&self) -> f64 {
        self.root
    }

    pub fn to_f64(&self, s: Surd) -> f64 {
        s.a as f64 + s.m as f64 * self.root / DENOM as f64
    }

    /// Approximation together with an absolute error bound.
    fn approx(&self, s: Surd) -> (f64, f64) {
        let a = s.a as f64;
        let b = s.m as f64 * self.root / DENOM as f64;
        (a + b, (a.abs() + b.abs()) * FILTER_EPS)
    }

    pub fn sign(&self, s: Surd) -> Ordering {
        let (v, err) = self.approx(s);
        if v.abs() > err {
            return v.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        }
        sign_xy(&(big(s.a) * big(DENOM)), &big(s.m), self.l, self.exact_root)
    }

    pub fn cmp(&self, x: Surd, y: Surd) -> Ordering {
        self.sign(x - y)
    }

    /// Largest integer `k` with `k·unit <= s`, for a positive multiple
    /// `unit` of `λ`.
    pub fn floor_div(&self, s: Surd, unit: Surd) -> i64 {
        debug_assert!(unit.a == 0 && unit.m > 0);
        let est = (self.to_f64(s) / self.to_f64(unit)).floor();
        let mut k = est as i64;
        while self.sign(s - unit.times(k as i128)) == Ordering::Less {
            k -= 1;
        }
        while self.sign(s - unit.times(k as i128 + 1)) != Ordering::Less {
            k += 1;
        }
        k
    }

    /// Sign of `x1·y1 - x2·y2` for field elements.
    pub fn sign_det(&self, x1: Surd, y1: Surd, x2: Surd, y2: Surd) -> Ordering {
        let (f1, e1) = self.approx(x1);
        let (g1, h1) = self.approx(y1);
        let (f2, e2) = self.approx(x2);
        let (g2, h2) = self.approx(y2);
        let t1 = f1 * g1;
        let t2 = f2 * g2;
        let det = t1 - t2;
        let err = f1.abs() * h1
            + g1.abs() * e1
            + e1 * h1
            + f2.abs() * h2
            + g2.abs() * e2
            + e2 * h2
            + (t1.abs() + t2.abs()) * FILTER_EPS;
        if det.abs() > 2.0 * err {
            return det.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        }
        // (A1 + M1·λ)(B1 + N1·λ) - (A2 + M2·λ)(B2 + N2·λ), scaled by DENOM².
        let d = big(DENOM);
        let (a1, m1) = (big(x1.a) * &d, big(x1.m));
        let (b1, n1) = (big(y1.a) * &d, big(y1.m));
        let (a2, m2) = (big(x2.a) * &d, big(x2.m));
        let (b2, n2) = (big(y2.a) * &d, big(y2.m));
        let l = big(self.l);
        let x = &a1 * &b1 + &m1 * &n1 * &l - &a2 * &b2 - &m2 * &n2 * &l;
        let y = &a1 * &n1 + &b1 * &m1 - &a2 * &n2 - &b2 * &m2;
        sign_xy(&x, &y, self.l, self.exact_root)
    }

    /// Orientation of `(b - a) × (c - a)`.
    pub fn orient(&self, a: SPoint, b: SPoint, c: SPoint) -> Ordering {
        self.sign_det(b.x - a.x, c.y - a.y, b.y - a.y, c.x - a.x)
    }

    /// Sign of `|p - q|² - k·λ²` for a non-negative integer `k`.
    pub fn cmp_dist2_lambda2(&self, p: SPoint, q: SPoint, k: i128) -> Ordering {
        let dx = p.x - q.x;
        let dy = p.y - q.y;
        let d = big(DENOM);
        let (a1, m1) = (big(dx.a) * &d, big(dx.m));
        let (a2, m2) = (big(dy.a) * &d, big(dy.m));
        let l = big(self.l);
        let x = &a1 * &a1 + &m1 * &m1 * &l + &a2 * &a2 + &m2 * &m2 * &l - big(k) * &l * &d * &d;
        let y = big(2) * (&a1 * &m1 + &a2 * &m2);
        sign_xy(&x, &y, self.l, self.exact_root)
    }

    pub fn to_f64_point(&self, p: SPoint) -> (f64, f64) {
        (self.to_f64(p.x), self.to_f64(p.y))
    }

    /// Does the closed segment `[s0, s1]` meet the open interior of the
    /// triangle?
    pub fn segment_meets_open_triangle(&self, s0: SPoint, s1: SPoint, t: [SPoint; 3]) -> bool {
        let mut tri = t;
        match self.orient(tri[0], tri[1], tri[2]) {
            Ordering::Equal => return false,
            Ordering::Less => tri.swap(1, 2),
            Ordering::Greater => {}
        }
        for i in 0..3 {
            let a = tri[i];
            let b = tri[(i + 1) % 3];
            if self.orient(a, b, s0) != Ordering::Greater && self.orient(a, b, s1) != Ordering::Greater {
                return false;
            }
        }
        if s0 != s1 {
            let sides = tri.map(|v| self.orient(s0, s1, v));
            if sides.iter().all(|&d| d != Ordering::Less) || sides.iter().all(|&d| d != Ordering::Greater) {
                return false;
            }
        }
        true
    }

    /// Closed triangle membership; degenerate triangles contain nothing.
    pub fn in_closed_triangle(&self, p: SPoint, t: [SPoint; 3]) -> bool {
        let o = self.orient(t[0], t[1], t[2]);
        if o == Ordering::Equal {
            return false;
        }
        (0..3).all(|i| self.orient(t[i], t[(i + 1) % 3], p) != o.reverse())
    }

    /// Convex hull, counterclockwise, collinear points dropped.
    pub fn hull(&self, pts: &[SPoint]) -> Vec<SPoint> {
        let mut v: Vec<SPoint> = pts.to_vec();
        v.sort_by(|p, q| self.cmp(p.x, q.x).then_with(|| self.cmp(p.y, q.y)));
        v.dedup();
        if v.len() < 3 {
            return v;
        }
        let chain = |iter: &mut dyn Iterator<Item = &SPoint>| {
            let mut out: Vec<SPoint> = Vec::new();
            for &p in iter {
                while out.len() >= 2 && self.orient(out[out.len() - 2], out[out.len() - 1], p) != Ordering::Greater {
                    out.pop();
                }
                out.push(p);
            }
            out.pop();
            out
        };
        let mut lower = chain(&mut v.iter());
        let upper = chain(&mut v.iter().rev());
        lower.extend(upper);
        lower
    }
}

/// Sign of `c1/√n1 + c2/√n2` for integers with `n1, n2 > 0`.
pub fn sign_sum_over_roots(c1: i128, n1: i128, c2: i128, n2: i128) -> Ordering {
    // Multiply through by √(n1·n2) > 0: sign(c1·√n2 + c2·√n1).
    let s1 = c1.signum();
    let s2 = c2.signum();
    if s1 == 0 {
        return s2.cmp(&0);
    }
    if s2 == 0 || s1 == s2 {
        return s1.cmp(&0);
    }
    let lhs = big(c1) * big(c1) * big(n2);
    let rhs = big(c2) * big(c2) * big(n1);
    match lhs.cmp(&rhs) {
        Ordering::Greater => s1.cmp(&0),
        Ordering::Less => s2.cmp(&0),
        Ordering::Equal => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(k: i128) -> Surd {
        Surd::lambda_ratio(k, 1)
    }

    #[test]
    fn sign_irrational() {
        let f = Field::new(2);
        assert_eq!(f.sign(Surd::int(1) - lam(1)), Ordering::Less);
        assert_eq!(f.sign(Surd::int(3) - lam(2)), Ordering::Greater);
        assert_eq!(f.sign(lam(2) - Surd::int(3)), Ordering::Less);
        assert_eq!(f.sign(Surd::ZERO), Ordering::Equal);
    }

    #[test]
    fn sign_perfect_square() {
        let f = Field::new(9);
        assert_eq!(f.sign(Surd::int(3) - lam(1)), Ordering::Equal);
        assert_eq!(f.sign(Surd::int(4) - lam(1)), Ordering::Greater);
    }

    #[test]
    fn filter_agrees_with_exact_sign_near_cancellation() {
        // 665857 / 470832 is a convergent of √2, so the difference is tiny.
        let f = Field::new(2 * 10_i128.pow(20));
        let s = lam(470_832) - Surd::int(665_857 * 10_000_000_000);
        let exact = sign_xy(&(big(s.a) * big(DENOM)), &big(s.m), f.l, f.exact_root);
        assert_eq!(f.sign(s), exact);
        assert_eq!(exact, Ordering::Less);
    }

    #[test]
    fn floor_div_examples() {
        let f = Field::new(2);
        // 3 / √2 ≈ 2.12
        assert_eq!(f.floor_div(Surd::int(3), lam(1)), 2);
        assert_eq!(f.floor_div(Surd::int(-3), lam(1)), -3);
        let g = Field::new(4);
        assert_eq!(g.floor_div(Surd::int(4), lam(1)), 2);
        assert_eq!(g.floor_div(Surd::int(3), lam(1)), 1);
        assert_eq!(g.floor_div(Surd::int(12), lam(3)), 2);
    }

    #[test]
    fn orient_mixed_points() {
        let f = Field::new(2);
        let a = SPoint::new(Surd::ZERO, Surd::ZERO);
        let b = SPoint::new(lam(1), lam(1));
        assert_eq!(f.orient(a, b, SPoint::from_point(Point::new(1, 1))), Ordering::Equal);
        assert_eq!(f.orient(a, b, SPoint::from_point(Point::new(0, 1))), Ordering::Greater);
        assert_eq!(f.orient(a, b, SPoint::from_point(Point::new(1, 0))), Ordering::Less);
    }

    #[test]
    fn dist_against_lambda() {
        let f = Field::new(2);
        let o = SPoint::default();
        assert_eq!(f.cmp_dist2_lambda2(o, SPoint::from_point(Point::new(1, 1)), 1), Ordering::Equal);
        assert_eq!(f.cmp_dist2_lambda2(o, SPoint::new(lam(1), Surd::ZERO), 1), Ordering::Equal);
        assert_eq!(f.cmp_dist2_lambda2(o, SPoint::from_point(Point::new(1, 0)), 1), Ordering::Less);
    }

    #[test]
    fn root_sum_sign() {
        assert_eq!(sign_sum_over_roots(1, 1, -1, 4), Ordering::Greater);
        assert_eq!(sign_sum_over_roots(1, 4, -1, 1), Ordering::Less);
        assert_eq!(sign_sum_over_roots(2, 4, -1, 1), Ordering::Equal);
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let f = Field::new(3);
        let pts: Vec<SPoint> = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 1), (1, 0)]
            .iter()
            .map(|&(x, y)| SPoint::from_point(Point::new(x, y)))
            .collect();
        assert_eq!(f.hull(&pts).len(), 4);
    }
}
