//! Intervals on the line and on the circle, cross ratios, and Möbius maps.
//!
//! A [`MultiInterval`] is a finite union of open intervals whose closures are
//! pairwise disjoint. On the circle, intervals are arcs given by angular
//! endpoints: the left endpoint lives in `[0, 2π)` and the right endpoint in
//! `(a, a + 2π)`, so an arc that wraps through angle zero simply has
//! `b > 2π`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether endpoints are points of the real line or angles on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    #[default]
    Line,
    Circle,
}

impl Geometry {
    /// Distance entering the entropy formulas: `|x - y|` on the line, the
    /// chord `|e^{ix} - e^{iy}|` on the circle.
    pub fn distance(self, x: f64, y: f64) -> f64 {
        match self {
            Geometry::Line => (x - y).abs(),
            Geometry::Circle => 2.0 * ((x - y) / 2.0).sin().abs(),
        }
    }
}

/// An open interval `(a, b)` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }

    /// Open-set intersection, `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let a = self.a.max(other.a);
        let b = self.b.min(other.b);
        (a < b).then_some(Interval { a, b })
    }
}

/// Ordered finite union of open intervals with disjoint closures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiInterval {
    parts: Vec<Interval>,
    geometry: Geometry,
}

/// Sort and validate a list of `(a, b)` pairs on the line.
pub fn normalize(parts: &[(f64, f64)]) -> Result<MultiInterval> {
    MultiInterval::new(parts, Geometry::Line)
}

impl MultiInterval {
    pub fn new(parts: &[(f64, f64)], geometry: Geometry) -> Result<Self> {
        let parts = parts
            .iter()
            .map(|&(a, b)| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_intervals(parts, geometry)
    }

    pub fn line(parts: &[(f64, f64)]) -> Result<Self> {
        Self::new(parts, Geometry::Line)
    }

    pub fn circle(parts: &[(f64, f64)]) -> Result<Self> {
        Self::new(parts, Geometry::Circle)
    }

    pub fn empty(geometry: Geometry) -> Self {
        Self {
            parts: Vec::new(),
            geometry,
        }
    }

    pub fn single(interval: Interval) -> Self {
        Self {
            parts: vec![interval],
            geometry: Geometry::Line,
        }
    }

    pub fn from_intervals(mut parts: Vec<Interval>, geometry: Geometry) -> Result<Self> {
        if geometry == Geometry::Circle {
            for p in parts.iter_mut() {
                if p.length() >= TAU {
                    return Err(Error::domain(
                        "normalize",
                        format!("arc ({}, {}) covers the whole circle", p.a, p.b),
                    ));
                }
                let shift = (p.a / TAU).floor() * TAU;
                p.a -= shift;
                p.b -= shift;
                if p.a >= TAU {
                    p.a -= TAU;
                    p.b -= TAU;
                }
            }
        }
        parts.sort_by(|x, y| x.a.total_cmp(&y.a));
        for w in parts.windows(2) {
            check_separated(&w[0], &w[1])?;
        }
        if geometry == Geometry::Circle && parts.len() > 1 {
            let first = parts[0];
            let last = parts[parts.len() - 1];
            let wrapped = Interval {
                a: first.a + TAU,
                b: first.b + TAU,
            };
            check_separated(&last, &wrapped)?;
        }
        Ok(Self { parts, geometry })
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn lefts(&self) -> impl Iterator<Item = f64> + '_ {
        self.parts.iter().map(|p| p.a)
    }

    pub fn rights(&self) -> impl Iterator<Item = f64> + '_ {
        self.parts.iter().map(|p| p.b)
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.parts.iter().map(|p| (p.a, p.b)).collect()
    }

    /// Index of the component containing `x` (line geometry).
    pub fn component_of(&self, x: f64) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(x))
    }

    fn same_geometry(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::domain(op, "mixed line and circle regions"));
        }
        Ok(())
    }

    /// Union of open sets. Overlapping parts are merged; parts whose closures
    /// meet in a single point are rejected because the result would leave the
    /// admissible class.
    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_geometry(other, "union")?;
        let mut all: Vec<Interval> = self.parts.iter().chain(&other.parts).copied().collect();
        if self.geometry == Geometry::Circle {
            // Disjoint circle regions only; merging across the seam is not needed.
            return Self::from_intervals(all, Geometry::Circle);
        }
        all.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut merged: Vec<Interval> = Vec::with_capacity(all.len());
        for p in all {
            match merged.last_mut() {
                Some(last) if p.a < last.b => last.b = last.b.max(p.b),
                _ => merged.push(p),
            }
        }
        Self::from_intervals(merged, Geometry::Line)
    }

    /// Intersection of open sets (line geometry).
    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_geometry(other, "intersection")?;
        if self.geometry == Geometry::Circle {
            return Err(Error::domain(
                "intersection",
                "only supported on the line; use complement on the circle",
            ));
        }
        let mut out = Vec::new();
        for p in &self.parts {
            for q in &other.parts {
                if let Some(r) = p.intersect(q) {
                    out.push(r);
                }
            }
        }
        Self::from_intervals(out, Geometry::Line)
    }

    /// True when the closures of the two regions do not meet.
    pub fn is_separated_from(&self, other: &Self) -> bool {
        self.union_disjoint(other).is_ok()
    }

    /// Union of two regions with disjoint closures; errors otherwise.
    pub fn union_disjoint(&self, other: &Self) -> Result<Self> {
        self.same_geometry(other, "union")?;
        let all: Vec<Interval> = self.parts.iter().chain(&other.parts).copied().collect();
        Self::from_intervals(all, self.geometry)
    }

    /// Complement of a nonempty circle region: the arcs between consecutive parts.
    pub fn complement(&self) -> Result<Self> {
        if self.geometry != Geometry::Circle {
            return Err(Error::domain(
                "complement",
                "complements are only bounded regions on the circle",
            ));
        }
        if self.parts.is_empty() {
            return Err(Error::domain(
                "complement",
                "complement of the empty region is the whole circle",
            ));
        }
        let n = self.parts.len();
        let gaps = (0..n)
            .map(|i| {
                let b = self.parts[i].b;
                let next_a = if i + 1 < n {
                    self.parts[i + 1].a
                } else {
                    self.parts[0].a + TAU
                };
                Interval::new(b, next_a)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_intervals(gaps, Geometry::Circle)
    }
}

fn check_separated(left: &Interval, right: &Interval) -> Result<()> {
    if left.b == right.a {
        return Err(Error::TouchingIntervals { point: left.b });
    }
    if left.b > right.a {
        return Err(Error::OverlappingIntervals {
            a1: left.a,
            b1: left.b,
            a2: right.a,
            b2: right.b,
        });
    }
    Ok(())
}

/// Cross ratio `((a2-b1)(b2-a1)) / ((a2-a1)(b2-b1))` of two disjoint
/// intervals on the line. Lies in `(0, 1)`; tends to 1 as the intervals
/// separate and to 0 as the gap closes. The pair is ordered internally.
pub fn cross_ratio(first: &Interval, second: &Interval) -> Result<f64> {
    cross_ratio_in(Geometry::Line, first, second)
}

/// Cross ratio with distances measured in the given geometry (chordal on the circle).
pub fn cross_ratio_in(geometry: Geometry, first: &Interval, second: &Interval) -> Result<f64> {
    let (left, right) = if first.a <= second.a {
        (first, second)
    } else {
        (second, first)
    };
    check_separated(left, right)?;
    if geometry == Geometry::Circle {
        check_separated(
            right,
            &Interval {
                a: left.a + TAU,
                b: left.b + TAU,
            },
        )?;
    }
    let d = |x, y| geometry.distance(x, y);
    let (a1, b1, a2, b2) = (left.a, left.b, right.a, right.b);
    Ok(d(a2, b1) * d(b2, a1) / (d(a2, a1) * d(b2, b1)))
}

/// Orientation-preserving real Möbius map `x -> (ax + b) / (cx + d)`,
/// normalized to unit determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MobiusMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::domain(
                "mobius",
                format!("determinant {det} must be positive"),
            ));
        }
        let s = det.sqrt();
        Ok(Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn translation(shift: f64) -> Self {
        Self {
            a: 1.0,
            b: shift,
            c: 0.0,
            d: 1.0,
        }
    }

    /// `x -> -1/x`.
    pub fn inversion() -> Self {
        Self {
            a: 0.0,
            b: -1.0,
            c: 1.0,
            d: 0.0,
        }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Point sent to infinity, if any.
    pub fn pole(&self) -> Option<f64> {
        (self.c != 0.0).then(|| -self.d / self.c)
    }

    /// Image of a finite point; `None` at the pole.
    pub fn apply_point(&self, x: f64) -> Option<f64> {
        let den = self.c * x + self.d;
        (den != 0.0).then(|| (self.a * x + self.b) / den)
    }

    pub fn compose(&self, inner: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    /// Action on an angle through the Cayley correspondence `x = tan(θ/2)`.
    fn apply_angle(&self, theta: f64) -> f64 {
        let half = 0.5 * theta.rem_euclid(TAU);
        let image = if (half - 0.5 * PI).abs() < f64::EPSILON {
            // θ = π is the point at infinity.
            if self.c == 0.0 {
                return PI;
            }
            self.a / self.c
        } else {
            match self.apply_point(half.tan()) {
                Some(v) => v,
                None => return PI,
            }
        };
        (2.0 * image.atan()).rem_euclid(TAU)
    }
}

/// Endpoint-wise image of a region, re-sorted.
///
/// On the line the pole must stay outside the closure of every part. On the
/// circle the map acts through the Cayley transform and is always defined.
pub fn apply_mobius(m: &MobiusMap, region: &MultiInterval) -> Result<MultiInterval> {
    match region.geometry {
        Geometry::Line => {
            if let Some(pole) = m.pole() {
                if region.parts.iter().any(|p| p.a <= pole && pole <= p.b) {
                    return Err(Error::PoleAtEndpoint { pole });
                }
            }
            let parts = region
                .parts
                .iter()
                .map(|p| {
                    let a = m.apply_point(p.a).ok_or(Error::PoleAtEndpoint { pole: p.a })?;
                    let b = m.apply_point(p.b).ok_or(Error::PoleAtEndpoint { pole: p.b })?;
                    Interval::new(a, b)
                })
                .collect::<Result<Vec<_>>>()?;
            MultiInterval::from_intervals(parts, Geometry::Line)
        }
        Geometry::Circle => {
            let parts = region
                .parts
                .iter()
                .map(|p| {
                    let a = m.apply_angle(p.a);
                    let span = (m.apply_angle(p.b) - a).rem_euclid(TAU);
                    Interval::new(a, a + span)
                })
                .collect::<Result<Vec<_>>>()?;
            MultiInterval::from_intervals(parts, Geometry::Circle)
        }
    }
}
