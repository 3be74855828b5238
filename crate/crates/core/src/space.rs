//! Points, metric spaces, sample grids, and probe generators.
//!
//! Angles live on the unit circle parameterized by [0, 1). Radii of the
//! stacked-circles space are 2 - 2^-n for ring n, with the outer limit
//! circle at radius 2. Bi-infinite binary sequences are stored exactly as
//! a finite core word between two constant tails, so every shift of a
//! representable point is again representable with no truncation error.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance used when comparing angles and replayed distances.
pub const ANGLE_TOL: f64 = 1e-9;

/// Distance between the torus part and the circle part of a two-part space.
pub const PART_GAP: f64 = 1.0;

/// Wraps into [0, 1). Guards against rem_euclid rounding up to 1.0.
pub fn wrap_unit(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Arc distance on the unit circle; never exceeds 1/2. Computed through an
/// absolute difference so the result is bitwise symmetric in its arguments.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = (wrap_unit(a) - wrap_unit(b)).abs();
    d.min(1.0 - d)
}

/// Constant tail value of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fill {
    Zeros,
    Ones,
}

impl Fill {
    pub fn bit(self) -> u8 {
        match self {
            Fill::Zeros => 0,
            Fill::Ones => 1,
        }
    }
}

/// A bi-infinite binary sequence that is eventually constant on both sides:
/// `left` fill below `offset`, the core word on [offset, offset+len), `right`
/// fill at and above offset+len. Normalized so the core never starts with the
/// left fill bit or ends with the right fill bit; a pure fill point has an
/// empty core and offset 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqPoint {
    left: Fill,
    right: Fill,
    core: Vec<u8>,
    offset: i64,
}

impl SeqPoint {
    pub fn new(left: Fill, core: &[u8], offset: i64, right: Fill) -> SeqPoint {
        let mut p = SeqPoint {
            left,
            right,
            core: core.to_vec(),
            offset,
        };
        p.normalize();
        p
    }

    /// The constant sequence with the given fill.
    pub fn constant(fill: Fill) -> SeqPoint {
        SeqPoint {
            left: fill,
            right: fill,
            core: Vec::new(),
            offset: 0,
        }
    }

    /// Word placed at `offset` with equal tails on both sides.
    pub fn block(fill: Fill, word: &[u8], offset: i64) -> SeqPoint {
        SeqPoint::new(fill, word, offset, fill)
    }

    fn normalize(&mut self) {
        let mut start = 0usize;
        while start < self.core.len() && self.core[start] == self.left.bit() {
            start += 1;
        }
        let mut end = self.core.len();
        while end > start && self.core[end - 1] == self.right.bit() {
            end -= 1;
        }
        self.offset += start as i64;
        self.core = self.core[start..end].to_vec();
        // an empty core between equal fills is the constant sequence; with
        // unequal fills the offset still marks the step position
        if self.core.is_empty() && self.left == self.right {
            self.offset = 0;
        }
    }

    pub fn left_fill(&self) -> Fill {
        self.left
    }

    pub fn right_fill(&self) -> Fill {
        self.right
    }

    pub fn is_constant(&self) -> bool {
        self.core.is_empty() && self.left == self.right
    }

    /// First core coordinate (inclusive).
    fn start(&self) -> i64 {
        self.offset
    }

    /// One past the last core coordinate.
    fn end(&self) -> i64 {
        self.offset + self.core.len() as i64
    }

    /// Coordinate i of the sequence.
    pub fn bit(&self, i: i64) -> u8 {
        if i < self.offset {
            self.left.bit()
        } else if i < self.end() {
            self.core[(i - self.offset) as usize]
        } else {
            self.right.bit()
        }
    }

    /// The left shift sigma^t: result coordinate i equals old coordinate i+t.
    pub fn shifted(&self, t: i64) -> SeqPoint {
        let mut p = self.clone();
        if !p.core.is_empty() || p.left != p.right {
            p.offset -= t;
        }
        p
    }

    /// The t with self == other.shifted(t), when one exists. Constant
    /// sequences report 0 since every shift fixes them.
    pub fn shift_from(&self, other: &SeqPoint) -> Option<i64> {
        if self.left != other.left || self.right != other.right || self.core != other.core {
            return None;
        }
        if self.core.is_empty() {
            if self.left == self.right {
                Some(0)
            } else {
                Some(other.offset - self.offset)
            }
        } else {
            Some(other.offset - self.offset)
        }
    }

    /// Copy with coordinate i forced to v.
    pub fn with_bit(&self, i: i64, v: u8) -> SeqPoint {
        let (lo, hi) = if self.core.is_empty() {
            (i, i + 1)
        } else {
            (self.start().min(i), self.end().max(i + 1))
        };
        let mut word: Vec<u8> = (lo..hi).map(|j| self.bit(j)).collect();
        word[(i - lo) as usize] = v;
        SeqPoint::new(self.left, &word, lo, self.right)
    }

    /// Window of coordinates [-w, w] as a string of 0s and 1s.
    pub fn window(&self, w: i64) -> String {
        (-w..=w)
            .map(|i| if self.bit(i) == 0 { '0' } else { '1' })
            .collect()
    }

    /// Position of the stored core word, for plotting.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn describe(&self) -> String {
        if self.core.is_empty() {
            return match (self.left, self.right) {
                (Fill::Zeros, Fill::Zeros) => "0*".to_string(),
                (Fill::Ones, Fill::Ones) => "1*".to_string(),
                (l, r) => format!("{}*|{}*@{}", l.bit(), r.bit(), self.offset),
            };
        }
        let word: String = self
            .core
            .iter()
            .map(|b| if *b == 0 { '0' } else { '1' })
            .collect();
        format!(
            "{}*.{}.{}*@{}",
            self.left.bit(),
            word,
            self.right.bit(),
            self.offset
        )
    }
}

/// Weight of coordinate i in the sequence metric.
fn seq_weight(i: i64) -> f64 {
    0.5f64.powi(i.unsigned_abs().min(u32::MAX as u64) as i32)
}

/// Max of seq_weight over the integer range [a, b), assumed nonempty.
fn max_weight_in(a: i64, b: i64) -> f64 {
    if a <= 0 && b > 0 {
        1.0
    } else if b <= 0 {
        seq_weight(b - 1)
    } else {
        seq_weight(a)
    }
}

/// d(s, u) = max over coordinates i of 2^-|i| [s_i != u_i], computed exactly.
pub fn seq_distance(s: &SeqPoint, u: &SeqPoint) -> f64 {
    let mut best = 0.0f64;
    let lo = s.start().min(u.start());
    let hi = s.end().max(u.end());
    if s.left != u.left {
        // all coordinates below lo differ
        best = best.max(if lo > 0 { 1.0 } else { seq_weight(lo - 1) });
    }
    if s.right != u.right {
        // all coordinates at or above hi differ
        best = best.max(if hi <= 0 { 1.0 } else { seq_weight(hi) });
    }
    if lo == hi {
        return best;
    }
    // split [lo, hi) at core boundaries; inside a segment each sequence is
    // either constant fill or core, so fill-vs-fill segments cost O(1)
    let mut cuts = [lo, s.start(), s.end(), u.start(), u.end(), hi];
    cuts.sort_unstable();
    for k in 0..cuts.len() - 1 {
        let (a, b) = (cuts[k].max(lo), cuts[k + 1].min(hi));
        if a >= b {
            continue;
        }
        let s_core = a >= s.start() && b <= s.end();
        let u_core = a >= u.start() && b <= u.end();
        if !s_core && !u_core {
            if s.bit(a) != u.bit(a) {
                best = best.max(max_weight_in(a, b));
            }
        } else {
            for i in a..b {
                if s.bit(i) != u.bit(i) {
                    best = best.max(seq_weight(i));
                }
            }
        }
    }
    best
}

/// Radial coordinate of an annulus point. Interior radii r in (1, 2) are
/// stored as lambda = log2(-log2(r - 1)), the coordinate in which the
/// squaring map r -> 1 + (r-1)^2 is translation by exactly 1. This keeps
/// the flow invertible at any horizon even though r itself rounds to 1.0
/// after a handful of forward squarings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Radial {
    /// r = 1.
    Center,
    /// r = 1 + 2^(-2^lambda).
    Interior(f64),
    /// r = 2.
    Rim,
}

impl Radial {
    pub fn from_radius(radius: f64) -> Radial {
        let s = (radius - 1.0).clamp(0.0, 1.0);
        if s <= 0.0 {
            Radial::Center
        } else if s >= 1.0 {
            Radial::Rim
        } else {
            Radial::Interior((-s.log2()).log2())
        }
    }

    pub fn radius(self) -> f64 {
        match self {
            Radial::Center => 1.0,
            Radial::Rim => 2.0,
            Radial::Interior(lambda) => 1.0 + 2.0f64.powf(-(2.0f64.powf(lambda))),
        }
    }

    /// Radial part of t applications of the squaring map.
    pub fn squared(self, t: i64) -> Radial {
        match self {
            Radial::Interior(lambda) => Radial::Interior(lambda + t as f64),
            fixed => fixed,
        }
    }
}

/// Ring of the stacked-circles space: Level(n) sits at radius 2 - 2^-n
/// (Level(0) is the inner unit circle), Outer is the limit circle at 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    Level(u32),
    Outer,
}

impl Ring {
    pub fn radius(self) -> f64 {
        match self {
            Ring::Level(n) => 2.0 - 0.5f64.powi(n as i32),
            Ring::Outer => 2.0,
        }
    }

    /// Rotation applied by one step of the stacked flow: angle + radius mod 1.
    pub fn step_rotation(self) -> f64 {
        match self {
            Ring::Level(n) => wrap_unit(-(0.5f64.powi(n as i32))),
            Ring::Outer => 0.0,
        }
    }

    pub fn describe(self) -> String {
        match self {
            Ring::Level(n) => format!("L{n}"),
            Ring::Outer => "outer".to_string(),
        }
    }
}

/// A point of one of the supported spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Circle { angle: f64 },
    Annulus { radial: Radial, angle: f64 },
    Torus { a: f64, b: f64 },
    Stack { ring: Ring, angle: f64 },
    UnionTorus { a: f64, b: f64 },
    UnionCircle { angle: f64 },
    Seq(SeqPoint),
}

impl Point {
    pub fn circle(angle: f64) -> Point {
        Point::Circle {
            angle: wrap_unit(angle),
        }
    }

    pub fn annulus(radius: f64, angle: f64) -> Point {
        Point::Annulus {
            radial: Radial::from_radius(radius),
            angle: wrap_unit(angle),
        }
    }

    pub fn annulus_radial(radial: Radial, angle: f64) -> Point {
        Point::Annulus {
            radial,
            angle: wrap_unit(angle),
        }
    }

    /// Radius of an annulus point; panics on other kinds.
    pub fn radius(&self) -> f64 {
        match self {
            Point::Annulus { radial, .. } => radial.radius(),
            _ => panic!("radius of a non-annulus point"),
        }
    }

    pub fn torus(a: f64, b: f64) -> Point {
        Point::Torus {
            a: wrap_unit(a),
            b: wrap_unit(b),
        }
    }

    pub fn stack(ring: Ring, angle: f64) -> Point {
        Point::Stack {
            ring,
            angle: wrap_unit(angle),
        }
    }

    pub fn torus_part(a: f64, b: f64) -> Point {
        Point::UnionTorus {
            a: wrap_unit(a),
            b: wrap_unit(b),
        }
    }

    pub fn circle_part(angle: f64) -> Point {
        Point::UnionCircle {
            angle: wrap_unit(angle),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Point::Circle { .. } => "circle",
            Point::Annulus { .. } => "annulus",
            Point::Torus { .. } => "torus",
            Point::Stack { .. } => "stack",
            Point::UnionTorus { .. } | Point::UnionCircle { .. } => "torus-circle",
            Point::Seq(_) => "seq",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Point::Circle { angle } => format!("circle({angle:.6})"),
            Point::Annulus { radial, angle } => {
                format!("annulus({:.6}, {angle:.6})", radial.radius())
            }
            Point::Torus { a, b } => format!("torus({a:.6}, {b:.6})"),
            Point::Stack { ring, angle } => format!("stack({}, {angle:.6})", ring.describe()),
            Point::UnionTorus { a, b } => format!("torus-part({a:.6}, {b:.6})"),
            Point::UnionCircle { angle } => format!("circle-part({angle:.6})"),
            Point::Seq(s) => s.describe(),
        }
    }
}

/// Kind tag of a metric space. `Stack::depth` is the largest finite ring
/// level; `Seq::window` is the half-width used for grid words and views.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    Circle,
    Annulus,
    Torus,
    Stack { depth: u32 },
    TorusCircle,
    Seq { window: u32 },
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::Circle => "circle",
            SpaceKind::Annulus => "annulus",
            SpaceKind::Torus => "torus",
            SpaceKind::Stack { .. } => "stack",
            SpaceKind::TorusCircle => "torus-circle",
            SpaceKind::Seq { .. } => "seq",
        }
    }
}

/// A compact metric space the flows act on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpace {
    pub kind: SpaceKind,
}

impl MetricSpace {
    pub fn new(kind: SpaceKind) -> MetricSpace {
        MetricSpace { kind }
    }

    fn accepts(&self, p: &Point) -> bool {
        matches!(
            (self.kind, p),
            (SpaceKind::Circle, Point::Circle { .. })
                | (SpaceKind::Annulus, Point::Annulus { .. })
                | (SpaceKind::Torus, Point::Torus { .. })
                | (SpaceKind::Stack { .. }, Point::Stack { .. })
                | (SpaceKind::TorusCircle, Point::UnionTorus { .. })
                | (SpaceKind::TorusCircle, Point::UnionCircle { .. })
                | (SpaceKind::Seq { .. }, Point::Seq(_))
        )
    }

    /// Checked distance; rejects points of a different kind.
    pub fn try_distance(&self, x: &Point, y: &Point) -> Result<f64> {
        for p in [x, y] {
            if !self.accepts(p) {
                return Err(Error::KindMismatch {
                    expected: self.kind.name().to_string(),
                    found: p.kind_name().to_string(),
                });
            }
        }
        Ok(self.distance(x, y))
    }

    /// Distance between two points of this space.
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        debug_assert!(self.accepts(x) && self.accepts(y));
        match (x, y) {
            (Point::Circle { angle: a }, Point::Circle { angle: b }) => circle_dist(*a, *b),
            (
                Point::Annulus {
                    radial: r1,
                    angle: a1,
                },
                Point::Annulus {
                    radial: r2,
                    angle: a2,
                },
            ) => (r1.radius() - r2.radius()).abs() + circle_dist(*a1, *a2),
            (Point::Torus { a: a1, b: b1 }, Point::Torus { a: a2, b: b2 }) => {
                circle_dist(*a1, *a2) + circle_dist(*b1, *b2)
            }
            (
                Point::Stack {
                    ring: r1,
                    angle: a1,
                },
                Point::Stack {
                    ring: r2,
                    angle: a2,
                },
            ) => (r1.radius() - r2.radius()).abs() + circle_dist(*a1, *a2),
            (Point::UnionTorus { a: a1, b: b1 }, Point::UnionTorus { a: a2, b: b2 }) => {
                circle_dist(*a1, *a2) + circle_dist(*b1, *b2)
            }
            (Point::UnionCircle { angle: a1 }, Point::UnionCircle { angle: a2 }) => {
                circle_dist(*a1, *a2)
            }
            (Point::UnionTorus { .. }, Point::UnionCircle { .. })
            | (Point::UnionCircle { .. }, Point::UnionTorus { .. }) => PART_GAP,
            (Point::Seq(s), Point::Seq(u)) => seq_distance(s, u),
            _ => unreachable!("kind mismatch"),
        }
    }

    /// Finite grid that is delta-dense in the space; returns (points, delta).
    ///
    /// For Seq the grid enumerates all words of half-width min(resolution, 7)
    /// with zero tails, which is dense in the full shift; subshifts supply
    /// their own grids at the flow level.
    pub fn sample_grid(&self, resolution: u32) -> Result<(Vec<Point>, f64)> {
        if resolution == 0 {
            return Err(Error::BadParameter {
                key: "resolution".into(),
                message: "must be positive".into(),
            });
        }
        let n = resolution;
        match self.kind {
            SpaceKind::Circle => {
                let pts = (0..n).map(|j| Point::circle(j as f64 / n as f64)).collect();
                Ok((pts, 0.5 / n as f64 + ANGLE_TOL))
            }
            SpaceKind::Annulus => {
                let radii: Vec<f64> = if n == 1 {
                    vec![1.5]
                } else {
                    (0..n).map(|i| 1.0 + i as f64 / (n - 1) as f64).collect()
                };
                let mut pts = Vec::with_capacity((n * n) as usize);
                for r in &radii {
                    for j in 0..n {
                        pts.push(Point::annulus(*r, j as f64 / n as f64));
                    }
                }
                let radial = if n == 1 { 0.5 } else { 0.5 / (n - 1) as f64 };
                Ok((pts, radial + 0.5 / n as f64 + ANGLE_TOL))
            }
            SpaceKind::Torus => {
                let mut pts = Vec::with_capacity((n * n) as usize);
                for i in 0..n {
                    for j in 0..n {
                        pts.push(Point::torus(i as f64 / n as f64, j as f64 / n as f64));
                    }
                }
                Ok((pts, 1.0 / n as f64 + ANGLE_TOL))
            }
            SpaceKind::Stack { depth } => {
                let mut pts = Vec::new();
                for lvl in 0..=depth {
                    for j in 0..n {
                        pts.push(Point::stack(Ring::Level(lvl), j as f64 / n as f64));
                    }
                }
                for j in 0..n {
                    pts.push(Point::stack(Ring::Outer, j as f64 / n as f64));
                }
                // every point lies on an enumerated ring
                Ok((pts, 0.5 / n as f64 + ANGLE_TOL))
            }
            SpaceKind::TorusCircle => {
                let mut pts = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        pts.push(Point::UnionTorus {
                            a: i as f64 / n as f64,
                            b: j as f64 / n as f64,
                        });
                    }
                }
                for j in 0..n {
                    pts.push(Point::UnionCircle {
                        angle: j as f64 / n as f64,
                    });
                }
                Ok((pts, 1.0 / n as f64 + ANGLE_TOL))
            }
            SpaceKind::Seq { window } => {
                let w = resolution.min(window).min(7);
                let len = 2 * w + 1;
                let count = 1usize << len;
                let mut pts = Vec::with_capacity(count);
                for code in 0..count {
                    let word: Vec<u8> = (0..len).map(|k| ((code >> k) & 1) as u8).collect();
                    pts.push(Point::Seq(SeqPoint::block(Fill::Zeros, &word, -(w as i64))));
                }
                Ok((pts, 0.5f64.powi(w as i32 + 1)))
            }
        }
    }

    /// Deterministic probe points at distance < delta from x, excluding x.
    pub fn probes_near(&self, x: &Point, delta: f64) -> Vec<Point> {
        let d = delta;
        let mut out: Vec<Point> = Vec::new();
        match x {
            Point::Circle { angle } => {
                for s in [0.9, 0.45, -0.45, -0.9] {
                    out.push(Point::circle(angle + s * d));
                }
            }
            Point::Annulus { radial, angle } => {
                let radius = radial.radius();
                for s in [0.9, -0.9] {
                    let r = (radius + s * d).clamp(1.0, 2.0);
                    out.push(Point::annulus(r, *angle));
                    out.push(Point::annulus_radial(*radial, angle + s * d));
                }
                for s in [0.45, -0.45] {
                    let r = (radius + s * d).clamp(1.0, 2.0);
                    out.push(Point::annulus(r, angle + s * d));
                }
            }
            Point::Torus { a, b } => {
                for s in [0.9, -0.9] {
                    out.push(Point::torus(a + s * d, *b));
                    out.push(Point::torus(*a, b + s * d));
                }
                for s in [0.45, -0.45] {
                    out.push(Point::torus(a + s * d, b + s * d));
                }
            }
            Point::Stack { ring, angle } => {
                for s in [0.9, 0.45, -0.45, -0.9] {
                    out.push(Point::stack(*ring, angle + s * d));
                }
                let depth = match self.kind {
                    SpaceKind::Stack { depth } => depth,
                    _ => 0,
                };
                let mut rings: Vec<Ring> = (0..=depth).map(Ring::Level).collect();
                rings.push(Ring::Outer);
                for other in rings {
                    if other != *ring && (other.radius() - ring.radius()).abs() < 0.9 * d {
                        out.push(Point::stack(other, *angle));
                    }
                }
            }
            Point::UnionTorus { a, b } => {
                for s in [0.9, -0.9] {
                    out.push(Point::UnionTorus {
                        a: wrap_unit(a + s * d),
                        b: *b,
                    });
                    out.push(Point::UnionTorus {
                        a: *a,
                        b: wrap_unit(b + s * d),
                    });
                }
            }
            Point::UnionCircle { angle } => {
                for s in [0.9, 0.45, -0.45, -0.9] {
                    out.push(Point::UnionCircle {
                        angle: wrap_unit(angle + s * d),
                    });
                }
            }
            Point::Seq(s) => {
                // flip one coordinate far enough out that the new point is
                // within delta; meaningful for the full shift
                let mut j = 0i64;
                while seq_weight(j) >= d && j < 200 {
                    j += 1;
                }
                if seq_weight(j) < d {
                    for i in [j, -j, j + 1, -(j + 1)] {
                        let flipped = s.with_bit(i, 1 - s.bit(i));
                        out.push(Point::Seq(flipped));
                    }
                }
            }
        }
        out.retain(|p| p != x && self.distance(p, x) < d && self.distance(p, x) > 0.0);
        out.dedup();
        out
    }
}

/// Closeness relation d(x, y) < epsilon on a space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entourage {
    pub epsilon: f64,
}

impl Entourage {
    pub fn new(epsilon: f64) -> Entourage {
        Entourage { epsilon }
    }

    pub fn contains(&self, space: &MetricSpace, x: &Point, y: &Point) -> Result<bool> {
        Ok(space.try_distance(x, y)? < self.epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn circle_distance_wraps() {
        assert!((circle_dist(0.9, 0.1) - 0.2).abs() < 1e-15);
        assert_eq!(circle_dist(0.3, 0.3), 0.0);
        assert!((circle_dist(0.0, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wrap_never_reaches_one() {
        assert_eq!(wrap_unit(-1e-18), 0.0);
        assert!(wrap_unit(1.0) == 0.0);
        assert!(wrap_unit(-0.25) == 0.75);
    }

    #[test]
    fn stack_ring_radii() {
        assert_eq!(Ring::Level(0).radius(), 1.0);
        assert_eq!(Ring::Level(1).radius(), 1.5);
        assert_eq!(Ring::Level(2).radius(), 1.75);
        assert_eq!(Ring::Outer.radius(), 2.0);
        let space = MetricSpace::new(SpaceKind::Stack { depth: 3 });
        let d = space.distance(
            &Point::stack(Ring::Level(1), 0.0),
            &Point::stack(Ring::Outer, 0.0),
        );
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fill_points_are_distance_one() {
        let z = SeqPoint::constant(Fill::Zeros);
        let o = SeqPoint::constant(Fill::Ones);
        assert_eq!(seq_distance(&z, &o), 1.0);
        assert_eq!(seq_distance(&z, &z), 0.0);
    }

    // independent evaluation of the sequence metric over a wide window;
    // sound when all structure sits well inside the window
    fn seq_distance_naive(s: &SeqPoint, u: &SeqPoint, w: i64) -> f64 {
        let mut best = 0.0f64;
        for i in -w..=w {
            if s.bit(i) != u.bit(i) {
                best = best.max(0.5f64.powi(i.unsigned_abs() as i32));
            }
        }
        best
    }

    #[test]
    fn first_difference_at_three_gives_eighth() {
        // identical in [-2, 2], first difference at coordinate 3 and -3
        let s = SeqPoint::block(Fill::Zeros, &[1, 0, 1, 0, 1, 0, 1], -3);
        let u = SeqPoint::block(Fill::Zeros, &[0, 0, 1, 0, 1, 0, 0], -3);
        let expect = seq_distance_naive(&s, &u, 40);
        assert_eq!(expect, 0.125);
        assert_eq!(seq_distance(&s, &u), 0.125);
    }

    #[test]
    fn shift_moves_coordinates_left() {
        let s = SeqPoint::block(Fill::Zeros, &[1], 0);
        let t = s.shifted(3);
        assert_eq!(t.bit(-3), 1);
        assert_eq!(t.bit(0), 0);
        assert_eq!(s.shifted(3).shifted(-3), s);
    }

    #[test]
    fn far_blocks_use_fill_segments() {
        let s = SeqPoint::block(Fill::Zeros, &[1, 1], -5000);
        let u = SeqPoint::constant(Fill::Zeros);
        assert_eq!(seq_distance(&s, &u), 0.5f64.powi(4999));
        let v = SeqPoint::block(Fill::Zeros, &[1, 1], 5000);
        assert_eq!(seq_distance(&s, &v), 0.5f64.powi(4999));
    }

    #[test]
    fn mixed_tails_compare_exactly() {
        let s = SeqPoint::new(Fill::Zeros, &[1], 0, Fill::Ones);
        let u = SeqPoint::constant(Fill::Zeros);
        // coordinates >= 1 are all ones on s, zeros on u
        assert_eq!(seq_distance(&s, &u), 1.0); // differ at 0 too
        let s2 = SeqPoint::new(Fill::Zeros, &[], 0, Fill::Ones);
        // normalized empty core: differs from zeros at every i >= 0
        assert_eq!(seq_distance(&s2, &u), 1.0);
    }

    #[test]
    fn grid_sizes_and_density() {
        let stack = MetricSpace::new(SpaceKind::Stack { depth: 2 });
        let (pts, _) = stack.sample_grid(4).unwrap();
        assert_eq!(pts.len(), 16); // rings 1, 3/2, 7/4, 2 with 4 angles each

        // brute-force density audit for the annulus grid
        let annulus = MetricSpace::new(SpaceKind::Annulus);
        let (grid, delta) = annulus.sample_grid(4).unwrap();
        assert_eq!(grid.len(), 16);
        for i in 0..37 {
            for j in 0..41 {
                let probe = Point::annulus(1.0 + i as f64 / 36.0, j as f64 / 41.0);
                let nearest = grid
                    .iter()
                    .map(|g| annulus.distance(&probe, g))
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    nearest <= delta,
                    "probe {probe:?} at {nearest} exceeds delta {delta}"
                );
            }
        }
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let space = MetricSpace::new(SpaceKind::Circle);
        let err = space
            .try_distance(&Point::circle(0.0), &Point::annulus(1.5, 0.0))
            .unwrap_err();
        assert!(err.to_string().contains("mismatch"));
    }

    #[test]
    fn probes_stay_within_delta() {
        let annulus = MetricSpace::new(SpaceKind::Annulus);
        let x = Point::annulus(2.0, 0.0);
        for delta in [0.1, 0.01, 1e-4] {
            let probes = annulus.probes_near(&x, delta);
            assert!(!probes.is_empty());
            for p in &probes {
                let d = annulus.distance(&x, p);
                assert!(d > 0.0 && d < delta);
            }
        }
        // radial probes must exist on the inward side at the rim
        let probes = annulus.probes_near(&x, 1e-3);
        assert!(probes
            .iter()
            .any(|p| matches!(p, Point::Annulus { radial, .. } if radial.radius() < 2.0)));
    }

    #[test]
    fn stack_probes_cross_rings_when_close() {
        let space = MetricSpace::new(SpaceKind::Stack { depth: 10 });
        let x = Point::stack(Ring::Outer, 0.0);
        let probes = space.probes_near(&x, 2e-3);
        assert!(probes
            .iter()
            .any(|p| matches!(p, Point::Stack { ring: Ring::Level(n), .. } if *n == 10)));
    }

    fn arb_fill() -> impl Strategy<Value = Fill> {
        prop_oneof![Just(Fill::Zeros), Just(Fill::Ones)]
    }

    fn arb_seq() -> impl Strategy<Value = SeqPoint> {
        (
            arb_fill(),
            arb_fill(),
            proptest::collection::vec(0u8..=1, 0..8),
            -30i64..30,
        )
            .prop_map(|(l, r, core, off)| SeqPoint::new(l, &core, off, r))
    }

    proptest! {
        #[test]
        fn seq_metric_matches_naive(s in arb_seq(), u in arb_seq()) {
            let fast = seq_distance(&s, &u);
            let naive = seq_distance_naive(&s, &u, 45);
            prop_assert_eq!(fast, naive);
        }

        #[test]
        fn seq_metric_axioms(s in arb_seq(), u in arb_seq(), v in arb_seq()) {
            prop_assert_eq!(seq_distance(&s, &u), seq_distance(&u, &s));
            prop_assert_eq!(seq_distance(&s, &s), 0.0);
            prop_assert!(seq_distance(&s, &v) <= seq_distance(&s, &u) + seq_distance(&u, &v) + 1e-12);
        }

        #[test]
        fn annulus_metric_axioms(
            r1 in 1.0f64..2.0, a1 in 0.0f64..1.0,
            r2 in 1.0f64..2.0, a2 in 0.0f64..1.0,
            r3 in 1.0f64..2.0, a3 in 0.0f64..1.0,
        ) {
            let sp = MetricSpace::new(SpaceKind::Annulus);
            let x = Point::annulus(r1, a1);
            let y = Point::annulus(r2, a2);
            let z = Point::annulus(r3, a3);
            prop_assert_eq!(sp.distance(&x, &y), sp.distance(&y, &x));
            prop_assert_eq!(sp.distance(&x, &x), 0.0);
            prop_assert!(sp.distance(&x, &z) <= sp.distance(&x, &y) + sp.distance(&y, &z) + 1e-12);
        }

        #[test]
        fn torus_union_triangle(
            a1 in 0.0f64..1.0, b1 in 0.0f64..1.0,
            a2 in 0.0f64..1.0, b2 in 0.0f64..1.0,
            c in 0.0f64..1.0,
        ) {
            let sp = MetricSpace::new(SpaceKind::TorusCircle);
            let x = Point::UnionTorus { a: a1, b: b1 };
            let y = Point::UnionTorus { a: a2, b: b2 };
            let z = Point::UnionCircle { angle: c };
            prop_assert!(sp.distance(&x, &z) <= sp.distance(&x, &y) + sp.distance(&y, &z) + 1e-12);
            prop_assert!(sp.distance(&x, &y) <= sp.distance(&x, &z) + sp.distance(&z, &y) + 1e-12);
        }
    }
}
