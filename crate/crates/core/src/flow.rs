//! Concrete invertible discrete-time flows on the supported spaces.
//!
//! Every flow is the iteration of a single homeomorphism. `advance` and
//! `retreat` apply the generator and its inverse in O(1); `apply` uses a
//! closed form where one is exact and falls back to stepping otherwise
//! (the torus skew map is iterated honestly because a closed form for
//! t*(t-1)/2 * mu mod 1 loses precision at large t).

use crate::error::{Error, Result};
use crate::space::{wrap_unit, Fill, MetricSpace, Point, Ring, SeqPoint, SpaceKind};
use serde::{Deserialize, Serialize};

/// Golden rotation number (sqrt(5) - 1) / 2.
pub const GOLDEN: f64 = 0.6180339887498949;

/// Silver rotation number sqrt(2) - 1.
pub const SILVER: f64 = 0.41421356237309515;

/// Hard cap on |t| for any single application.
pub const DEFAULT_CAP: i64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

/// Kind and parameters of a flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FlowKind {
    /// Rigid circle rotation by alpha.
    Rotation { alpha: f64 },
    /// Identity map on the circle.
    Identity,
    /// Stacked circles: ring n rotates by its own radius 2 - 2^-n, so the
    /// inner (n = 0) and outer circles are fixed pointwise.
    Stack { depth: u32 },
    /// Annulus map (r, theta) -> (1 + (r-1)^2, theta + alpha); radii drift
    /// to 1 forward and to 2 backward while angles rotate rigidly.
    Annulus { alpha: f64 },
    /// Disjoint union of a torus skew product (a, b) -> (a + mu, a + b)
    /// and a circle rotation by alpha.
    TorusCircle { mu: f64, alpha: f64 },
    /// Left shift on the orbit closures of block-in-zeros and
    /// block-in-ones sequences.
    ShiftPair { block: Vec<u8>, window: u32 },
    /// Left shift on all binary sequences (observed through eventually
    /// constant points).
    FullShift { window: u32 },
}

/// An invertible flow together with the space it acts on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSystem {
    pub kind: FlowKind,
    pub space: MetricSpace,
    pub cap: i64,
}

fn check_angle(key: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::BadParameter {
            key: key.into(),
            message: format!("{v} is not in (0, 1)"),
        });
    }
    Ok(())
}

impl FlowSystem {
    pub fn new(kind: FlowKind) -> Result<FlowSystem> {
        let space = match &kind {
            FlowKind::Rotation { alpha } => {
                check_angle("alpha", *alpha)?;
                MetricSpace::new(SpaceKind::Circle)
            }
            FlowKind::Identity => MetricSpace::new(SpaceKind::Circle),
            FlowKind::Stack { depth } => {
                if *depth < 1 || *depth > 40 {
                    return Err(Error::BadParameter {
                        key: "depth".into(),
                        message: "must be between 1 and 40".into(),
                    });
                }
                MetricSpace::new(SpaceKind::Stack { depth: *depth })
            }
            FlowKind::Annulus { alpha } => {
                check_angle("alpha", *alpha)?;
                MetricSpace::new(SpaceKind::Annulus)
            }
            FlowKind::TorusCircle { mu, alpha } => {
                check_angle("mu", *mu)?;
                check_angle("alpha", *alpha)?;
                MetricSpace::new(SpaceKind::TorusCircle)
            }
            FlowKind::ShiftPair { block, window } => {
                if block.is_empty() || block.iter().any(|b| *b > 1) {
                    return Err(Error::BadParameter {
                        key: "block".into(),
                        message: "must be a nonempty 0/1 word".into(),
                    });
                }
                if (*window as usize) < block.len() || *window > 60 {
                    return Err(Error::BadParameter {
                        key: "window".into(),
                        message: "must be at least the block length and at most 60".into(),
                    });
                }
                MetricSpace::new(SpaceKind::Seq { window: *window })
            }
            FlowKind::FullShift { window } => {
                if *window < 1 || *window > 60 {
                    return Err(Error::BadParameter {
                        key: "window".into(),
                        message: "must be between 1 and 60".into(),
                    });
                }
                MetricSpace::new(SpaceKind::Seq { window: *window })
            }
        };
        Ok(FlowSystem {
            kind,
            space,
            cap: DEFAULT_CAP,
        })
    }

    pub fn rotation(alpha: f64) -> Result<FlowSystem> {
        FlowSystem::new(FlowKind::Rotation { alpha })
    }

    pub fn identity() -> FlowSystem {
        FlowSystem::new(FlowKind::Identity).expect("identity flow")
    }

    pub fn stack(depth: u32) -> Result<FlowSystem> {
        FlowSystem::new(FlowKind::Stack { depth })
    }

    pub fn annulus(alpha: f64) -> Result<FlowSystem> {
        FlowSystem::new(FlowKind::Annulus { alpha })
    }

    pub fn torus_circle(mu: f64, alpha: f64) -> Result<FlowSystem> {
        FlowSystem::new(FlowKind::TorusCircle { mu, alpha })
    }

    pub fn shift_pair(block: &[u8], window: u32) -> Result<FlowSystem> {
        FlowSystem::new(FlowKind::ShiftPair {
            block: block.to_vec(),
            window,
        })
    }

    pub fn full_shift(window: u32) -> Result<FlowSystem> {
        FlowSystem::new(FlowKind::FullShift { window })
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            FlowKind::Rotation { alpha } => format!("rotation(alpha={alpha:.6})"),
            FlowKind::Identity => "identity".to_string(),
            FlowKind::Stack { depth } => format!("stack(depth={depth})"),
            FlowKind::Annulus { alpha } => format!("annulus(alpha={alpha:.6})"),
            FlowKind::TorusCircle { mu, alpha } => {
                format!("torus-circle(mu={mu:.6}, alpha={alpha:.6})")
            }
            FlowKind::ShiftPair { block, window } => {
                let word: String = block.iter().map(|b| char::from(b'0' + b)).collect();
                format!("shift-pair(block={word}, window={window})")
            }
            FlowKind::FullShift { window } => format!("full-shift(window={window})"),
        }
    }

    /// One forward step of the generator.
    pub fn advance(&self, x: &Point) -> Point {
        match (&self.kind, x) {
            (FlowKind::Rotation { alpha }, Point::Circle { angle }) => Point::circle(angle + alpha),
            (FlowKind::Identity, p) => p.clone(),
            (FlowKind::Stack { .. }, Point::Stack { ring, angle }) => {
                Point::stack(*ring, angle + ring.step_rotation())
            }
            (FlowKind::Annulus { alpha }, Point::Annulus { radial, angle }) => Point::Annulus {
                radial: radial.squared(1),
                angle: wrap_unit(angle + alpha),
            },
            (FlowKind::TorusCircle { mu, .. }, Point::UnionTorus { a, b }) => Point::UnionTorus {
                a: wrap_unit(a + mu),
                b: wrap_unit(a + b),
            },
            (FlowKind::TorusCircle { alpha, .. }, Point::UnionCircle { angle }) => {
                Point::UnionCircle {
                    angle: wrap_unit(angle + alpha),
                }
            }
            (FlowKind::ShiftPair { .. } | FlowKind::FullShift { .. }, Point::Seq(s)) => {
                Point::Seq(s.shifted(1))
            }
            _ => panic!("flow {} cannot act on {}", self.describe(), x.kind_name()),
        }
    }

    /// One backward step (inverse of the generator).
    pub fn retreat(&self, x: &Point) -> Point {
        match (&self.kind, x) {
            (FlowKind::Rotation { alpha }, Point::Circle { angle }) => Point::circle(angle - alpha),
            (FlowKind::Identity, p) => p.clone(),
            (FlowKind::Stack { .. }, Point::Stack { ring, angle }) => {
                Point::stack(*ring, angle - ring.step_rotation())
            }
            (FlowKind::Annulus { alpha }, Point::Annulus { radial, angle }) => Point::Annulus {
                radial: radial.squared(-1),
                angle: wrap_unit(angle - alpha),
            },
            (FlowKind::TorusCircle { mu, .. }, Point::UnionTorus { a, b }) => {
                let a1 = wrap_unit(a - mu);
                Point::UnionTorus {
                    a: a1,
                    b: wrap_unit(b - a1),
                }
            }
            (FlowKind::TorusCircle { alpha, .. }, Point::UnionCircle { angle }) => {
                Point::UnionCircle {
                    angle: wrap_unit(angle - alpha),
                }
            }
            (FlowKind::ShiftPair { .. } | FlowKind::FullShift { .. }, Point::Seq(s)) => {
                Point::Seq(s.shifted(-1))
            }
            _ => panic!("flow {} cannot act on {}", self.describe(), x.kind_name()),
        }
    }

    /// t-fold application. Closed form for the isometric and annulus
    /// coordinates; honest stepping on the torus.
    pub fn apply(&self, t: i64, x: &Point) -> Point {
        match (&self.kind, x) {
            (FlowKind::Rotation { alpha }, Point::Circle { angle }) => {
                Point::circle(angle + t as f64 * alpha)
            }
            (FlowKind::Identity, p) => p.clone(),
            (FlowKind::Stack { .. }, Point::Stack { ring, angle }) => {
                // reduce t mod the ring period first so the dyadic rotation
                // is exact at any t; matches the odometer elements bitwise
                let turned = match ring {
                    Ring::Outer => *angle,
                    Ring::Level(n) => {
                        let residue = t.rem_euclid(1i64 << n) as f64;
                        angle - residue * 0.5f64.powi(*n as i32)
                    }
                };
                Point::stack(*ring, turned)
            }
            (FlowKind::Annulus { alpha }, Point::Annulus { radial, angle }) => Point::Annulus {
                radial: radial.squared(t),
                angle: wrap_unit(angle + t as f64 * alpha),
            },
            (FlowKind::TorusCircle { alpha, .. }, Point::UnionCircle { angle }) => {
                Point::UnionCircle {
                    angle: wrap_unit(angle + t as f64 * alpha),
                }
            }
            (FlowKind::TorusCircle { .. }, Point::UnionTorus { .. }) => {
                let mut p = x.clone();
                if t >= 0 {
                    for _ in 0..t {
                        p = self.advance(&p);
                    }
                } else {
                    for _ in 0..-t {
                        p = self.retreat(&p);
                    }
                }
                p
            }
            (FlowKind::ShiftPair { .. } | FlowKind::FullShift { .. }, Point::Seq(s)) => {
                Point::Seq(s.shifted(t))
            }
            _ => panic!("flow {} cannot act on {}", self.describe(), x.kind_name()),
        }
    }

    /// Kind- and cap-checked application.
    pub fn try_apply(&self, t: i64, x: &Point) -> Result<Point> {
        if t.abs() > self.cap {
            return Err(Error::BeyondCap { t, cap: self.cap });
        }
        self.space.try_distance(x, x)?;
        Ok(self.apply(t, x))
    }

    /// Orbit segment as (t, point) pairs in ascending t.
    pub fn orbit(&self, x: &Point, horizon: i64, dir: Direction) -> Result<Vec<(i64, Point)>> {
        if horizon < 0 || horizon > self.cap {
            return Err(Error::BeyondCap {
                t: horizon,
                cap: self.cap,
            });
        }
        self.space.try_distance(x, x)?;
        let mut out = Vec::new();
        if matches!(dir, Direction::Backward | Direction::Both) {
            let mut p = x.clone();
            let mut back = Vec::new();
            for t in 1..=horizon {
                p = self.retreat(&p);
                back.push((-t, p.clone()));
            }
            back.reverse();
            out.extend(back);
        }
        out.push((0, x.clone()));
        if matches!(dir, Direction::Forward | Direction::Both) {
            let mut p = x.clone();
            for t in 1..=horizon {
                p = self.advance(&p);
                out.push((t, p.clone()));
            }
        }
        Ok(out)
    }

    /// The block-in-zeros base sequence of a shift flow.
    pub fn seq_zero_block(&self) -> Option<Point> {
        match &self.kind {
            FlowKind::ShiftPair { block, .. } => {
                Some(Point::Seq(SeqPoint::block(Fill::Zeros, block, 0)))
            }
            FlowKind::FullShift { .. } => Some(Point::Seq(SeqPoint::block(Fill::Zeros, &[1], 0))),
            _ => None,
        }
    }

    /// The block-in-ones base sequence of the shift pair.
    pub fn seq_one_block(&self) -> Option<Point> {
        match &self.kind {
            FlowKind::ShiftPair { block, .. } => {
                Some(Point::Seq(SeqPoint::block(Fill::Ones, block, 0)))
            }
            _ => None,
        }
    }

    /// Natural starting point for orbit exports.
    pub fn basepoint(&self) -> Point {
        match &self.kind {
            FlowKind::Rotation { .. } | FlowKind::Identity => Point::circle(0.0),
            FlowKind::Stack { .. } => Point::stack(Ring::Level(1), 0.0),
            FlowKind::Annulus { .. } => Point::annulus(1.5, 0.0),
            FlowKind::TorusCircle { .. } => Point::UnionTorus { a: 0.0, b: 0.0 },
            FlowKind::ShiftPair { .. } | FlowKind::FullShift { .. } => {
                self.seq_zero_block().expect("seq basepoint")
            }
        }
    }

    /// Grid that is delta-dense in this flow's phase space. The shift pair
    /// enumerates its own orbit closures (shifts up to `resolution` plus the
    /// two constant limits) instead of generic words.
    pub fn sample_grid(&self, resolution: u32) -> Result<(Vec<Point>, f64)> {
        match &self.kind {
            FlowKind::ShiftPair { .. } => {
                let reach = resolution.max(1) as i64;
                let x = self.seq_zero_block().expect("zero block");
                let y = self.seq_one_block().expect("one block");
                let mut pts: Vec<Point> = Vec::new();
                let mut delta = 0.0f64;
                for base in [&x, &y] {
                    let s = match base {
                        Point::Seq(s) => s,
                        _ => unreachable!(),
                    };
                    for t in -reach..=reach {
                        let p = Point::Seq(s.shifted(t));
                        if !pts.contains(&p) {
                            pts.push(p);
                        }
                    }
                    let fill = SeqPoint::constant(s.left_fill());
                    let fp = Point::Seq(fill.clone());
                    if !pts.contains(&fp) {
                        pts.push(fp);
                    }
                    for t in [reach + 1, -(reach + 1)] {
                        let stray = s.shifted(t);
                        delta = delta.max(crate::space::seq_distance(&stray, &fill));
                    }
                }
                Ok((pts, delta + 1e-12))
            }
            _ => self.space.sample_grid(resolution),
        }
    }

    /// Torus-part grid of the two-part space, for subsystem detectors.
    pub fn torus_part_grid(&self, resolution: u32) -> Result<Vec<Point>> {
        match &self.kind {
            FlowKind::TorusCircle { .. } => {
                let n = resolution.max(1);
                let mut pts = Vec::with_capacity((n * n) as usize);
                for i in 0..n {
                    for j in 0..n {
                        pts.push(Point::UnionTorus {
                            a: i as f64 / n as f64,
                            b: j as f64 / n as f64,
                        });
                    }
                }
                Ok(pts)
            }
            _ => Err(Error::BadParameter {
                key: "flow".into(),
                message: "torus part requires the torus-circle flow".into(),
            }),
        }
    }
}
