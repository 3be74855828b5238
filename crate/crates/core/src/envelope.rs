//! Numeric construction of the closure of the iterates of a flow inside the
//! space of maps, sampled on a finite grid. A greedy epsilon-net over the
//! scanned iterates stands in for the closure: every scanned iterate lies
//! within epsilon of some representative, and representatives stay pairwise
//! farther than epsilon apart. The same machinery applied once more, with
//! the first net as the underlying universe, yields the second level.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{Direction, FlowSystem};
use crate::fnspace::{FunctionMetric, Grid};
use crate::space::{circle_dist, wrap_unit, Point, Radial, Ring};
use crate::symbolic::{AnnulusElement, ShiftElement};

/// One representative of the net, with the times that landed in its cluster.
#[derive(Debug, Clone)]
pub struct NetRep<T> {
    pub value: T,
    /// Iterate time that opened the cluster.
    pub first_time: i64,
    /// Later scanned times absorbed by the cluster (capped).
    pub witnesses: Vec<i64>,
    /// Total scanned times absorbed, including the first.
    pub hits: usize,
}

/// Greedy net over an orbit of values under a two-sided generator.
#[derive(Debug, Clone)]
pub struct NetBuild<T> {
    pub reps: Vec<NetRep<T>>,
    pub epsilon: f64,
    pub horizon: i64,
    pub direction: Direction,
    pub scanned: usize,
}

/// Scan times 0, then outward per direction, clustering values into an
/// epsilon-net. `within(a, b, eps)` reports the distance when it is at most
/// eps and may abort early otherwise.
#[allow(clippy::too_many_arguments)]
pub fn greedy_orbit_net<T, F, B, D>(
    identity: T,
    mut fwd: F,
    mut back: B,
    mut within: D,
    epsilon: f64,
    horizon: i64,
    direction: Direction,
    witness_cap: usize,
) -> NetBuild<T>
where
    T: Clone,
    F: FnMut(&T) -> T,
    B: FnMut(&T) -> T,
    D: FnMut(&T, &T, f64) -> Option<f64>,
{
    let mut build = NetBuild {
        reps: Vec::new(),
        epsilon,
        horizon,
        direction,
        scanned: 0,
    };
    let mut absorb = |build: &mut NetBuild<T>, t: i64, value: &T| {
        build.scanned += 1;
        for rep in build.reps.iter_mut() {
            if within(&rep.value, value, epsilon).is_some() {
                rep.hits += 1;
                if rep.witnesses.len() < witness_cap {
                    rep.witnesses.push(t);
                }
                return;
            }
        }
        build.reps.push(NetRep {
            value: value.clone(),
            first_time: t,
            witnesses: Vec::new(),
            hits: 1,
        });
    };
    absorb(&mut build, 0, &identity);
    let mut pos = identity.clone();
    let mut neg = identity;
    for t in 1..=horizon {
        if matches!(direction, Direction::Forward | Direction::Both) {
            pos = fwd(&pos);
            absorb(&mut build, t, &pos);
        }
        if matches!(direction, Direction::Backward | Direction::Both) {
            neg = back(&neg);
            absorb(&mut build, -t, &neg);
        }
    }
    build
}

/// The images of the grid under one sampled map.
pub type MapImages = Vec<Point>;

/// Finite stand-in for the closure of the iterates of a flow: an
/// epsilon-net of sampled maps, with the grid metric that compares them.
#[derive(Debug, Clone)]
pub struct ApproxSemigroup {
    pub flow: FlowSystem,
    pub metric: FunctionMetric,
    pub net: NetBuild<MapImages>,
}

/// Knobs for the net construction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NetParams {
    pub epsilon: f64,
    pub horizon: i64,
    pub direction: Direction,
    pub witness_cap: usize,
}

impl NetParams {
    pub fn new(epsilon: f64, horizon: i64, direction: Direction) -> NetParams {
        NetParams {
            epsilon,
            horizon,
            direction,
            witness_cap: 8,
        }
    }
}

/// Build the net of iterates of `flow` sampled on the metric's grid.
pub fn approximate_semigroup(
    flow: &FlowSystem,
    metric: FunctionMetric,
    params: NetParams,
) -> Result<ApproxSemigroup> {
    if params.epsilon <= 0.0 || !params.epsilon.is_finite() {
        return Err(Error::BadParameter {
            key: "epsilon".into(),
            message: "cluster radius must be positive".into(),
        });
    }
    if params.horizon < 1 {
        return Err(Error::BadParameter {
            key: "horizon".into(),
            message: "horizon must be at least 1".into(),
        });
    }
    let grid = metric.grid().clone();
    for p in &grid.points {
        // fail early instead of panicking inside the scan
        flow.try_apply(0, p)?;
    }
    let identity: MapImages = grid.points.clone();
    let net = greedy_orbit_net(
        identity,
        |imgs: &MapImages| imgs.iter().map(|p| flow.advance(p)).collect(),
        |imgs: &MapImages| imgs.iter().map(|p| flow.retreat(p)).collect(),
        |a: &MapImages, b: &MapImages, eps| metric.distance_within(a, b, eps),
        params.epsilon,
        params.horizon,
        params.direction,
        params.witness_cap,
    );
    Ok(ApproxSemigroup {
        flow: flow.clone(),
        metric,
        net,
    })
}

/// Smallest distance from a nonzero iterate to the identity map over
/// `|t| <= horizon`, together with the time attaining it. Zero means the
/// identity is a limit of other iterates at this resolution; a strictly
/// positive value is an isolation gap certificate for the scanned range.
pub fn identity_gap(
    flow: &FlowSystem,
    metric: &FunctionMetric,
    horizon: i64,
) -> Result<(f64, i64)> {
    if horizon < 1 {
        return Err(Error::BadParameter {
            key: "horizon".into(),
            message: "horizon must be at least 1".into(),
        });
    }
    let identity: MapImages = metric.grid().points.clone();
    for p in &identity {
        flow.try_apply(0, p)?;
    }
    let mut fwd = identity.clone();
    let mut bwd = identity.clone();
    let mut best = f64::INFINITY;
    let mut best_t = 0;
    for t in 1..=horizon {
        fwd = fwd.iter().map(|p| flow.advance(p)).collect();
        bwd = bwd.iter().map(|p| flow.retreat(p)).collect();
        let df = metric.distance(&fwd, &identity);
        if df < best {
            best = df;
            best_t = t;
        }
        let db = metric.distance(&bwd, &identity);
        if db < best {
            best = db;
            best_t = -t;
        }
        if best == 0.0 {
            break;
        }
    }
    Ok((best, best_t))
}

impl ApproxSemigroup {
    pub fn len(&self) -> usize {
        self.net.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net.reps.is_empty()
    }

    pub fn reps(&self) -> &[NetRep<MapImages>] {
        &self.net.reps
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.metric.grid()
    }

    pub fn rep_distance(&self, i: usize, j: usize) -> f64 {
        self.metric
            .distance(&self.net.reps[i].value, &self.net.reps[j].value)
    }

    /// Distance from the identity cluster to the nearest other
    /// representative; None when the net is a single cluster.
    pub fn identity_isolation(&self) -> Option<f64> {
        (1..self.len())
            .map(|j| self.rep_distance(0, j))
            .fold(None, |acc, d| Some(acc.map_or(d, |m: f64| m.min(d))))
    }

    /// Net invariant: every iterate in the scanned range stays within
    /// epsilon of some representative. Returns the worst gap found.
    pub fn audit_cover(&self, stride: i64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut t = match self.net.direction {
            Direction::Forward | Direction::Both => 0,
            Direction::Backward => -self.net.horizon,
        };
        let hi = match self.net.direction {
            Direction::Backward => 0,
            _ => self.net.horizon,
        };
        while t <= hi {
            let images: Result<MapImages> = self
                .grid()
                .points
                .iter()
                .map(|p| self.flow.try_apply(t, p))
                .collect();
            let images = images?;
            let best = self
                .net
                .reps
                .iter()
                .map(|r| self.metric.distance(&r.value, &images))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
            t += stride.max(1);
        }
        Ok(worst)
    }

    /// Images of every representative at one grid point: the trace of the
    /// net through the single-coordinate evaluation map.
    pub fn base_images(&self, base_index: usize) -> Vec<Point> {
        self.net
            .reps
            .iter()
            .map(|r| r.value[base_index].clone())
            .collect()
    }
}

/// Second level: the net of the flow induced on the first net by
/// post-composition with the generator. States are tuples indexed by the
/// first-level representatives; coordinates are compared with the
/// first-level map metric, averaged uniformly.
#[derive(Debug, Clone)]
pub struct SecondLevel {
    pub first: Arc<ApproxSemigroup>,
    pub net: NetBuild<Vec<MapImages>>,
}

pub fn second_level_semigroup(first: Arc<ApproxSemigroup>, params: NetParams) -> SecondLevel {
    let metric = first.metric.clone();
    let flow = first.flow.clone();
    let start: Vec<MapImages> = first.net.reps.iter().map(|r| r.value.clone()).collect();
    let weight = 1.0 / start.len().max(1) as f64;
    let within = move |a: &Vec<MapImages>, b: &Vec<MapImages>, eps: f64| {
        let mut sum = 0.0;
        for (x, y) in a.iter().zip(b) {
            sum += weight * metric.distance(x, y);
            if sum > eps {
                return None;
            }
        }
        Some(sum)
    };
    let step = |dir: i64| {
        let flow = flow.clone();
        move |maps: &Vec<MapImages>| {
            maps.iter()
                .map(|imgs| {
                    imgs.iter()
                        .map(|p| {
                            if dir > 0 {
                                flow.advance(p)
                            } else {
                                flow.retreat(p)
                            }
                        })
                        .collect()
                })
                .collect()
        }
    };
    let net = greedy_orbit_net(
        start,
        step(1),
        step(-1),
        within,
        params.epsilon,
        params.horizon,
        params.direction,
        params.witness_cap,
    );
    SecondLevel { first, net }
}

impl SecondLevel {
    pub fn len(&self) -> usize {
        self.net.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net.reps.is_empty()
    }

    pub fn rep_distance(&self, i: usize, j: usize) -> f64 {
        let w = 1.0 / self.first.len().max(1) as f64;
        self.net.reps[i]
            .value
            .iter()
            .zip(&self.net.reps[j].value)
            .map(|(a, b)| w * self.first.metric.distance(a, b))
            .sum()
    }
}

/// What a sampled annulus map looks like: still an honest iterate, or
/// already indistinguishable from one of the two collapse families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AnnulusRepClass {
    NearIterate(i64),
    NearCenterCollapse(f64),
    NearRimCollapse(f64),
}

impl AnnulusRepClass {
    pub fn element(&self) -> AnnulusElement {
        match self {
            AnnulusRepClass::NearIterate(t) => AnnulusElement::Step(*t),
            AnnulusRepClass::NearCenterCollapse(b) => AnnulusElement::CenterCollapse(*b),
            AnnulusRepClass::NearRimCollapse(b) => AnnulusElement::RimCollapse(*b),
        }
    }
}

/// Classify one sampled annulus map against the exact families. Returns the
/// class and the worst pointwise deviation from the classified element.
pub fn classify_annulus_rep(
    sg: &crate::symbolic::AnnulusSemigroup,
    grid: &Grid,
    rep: &NetRep<MapImages>,
    tol: f64,
) -> (AnnulusRepClass, f64) {
    let mut all_center = true;
    let mut all_rim = true;
    let mut shift_fwd: Option<f64> = None;
    let mut shift_bwd: Option<f64> = None;
    let mut coherent_fwd = true;
    let mut coherent_bwd = true;
    for (x, img) in grid.points.iter().zip(&rep.value) {
        let (xr, xa) = match x {
            Point::Annulus { radial, angle } => (*radial, *angle),
            _ => unreachable!("annulus grid"),
        };
        let (ir, ia) = match img {
            Point::Annulus { radial, angle } => (*radial, *angle),
            _ => unreachable!("annulus image"),
        };
        match xr {
            // fixed circles say nothing about which collapse this is
            Radial::Rim | Radial::Center => {}
            Radial::Interior(_) => {
                if ir.radius() > 1.0 + tol {
                    all_center = false;
                }
                if ir.radius() < 2.0 - tol {
                    all_rim = false;
                }
            }
        }
        let fwd = wrap_unit(ia - xa);
        let bwd = wrap_unit(xa - ia);
        match shift_fwd {
            None => shift_fwd = Some(fwd),
            Some(b) => coherent_fwd &= circle_dist(b, fwd) <= tol,
        }
        match shift_bwd {
            None => shift_bwd = Some(bwd),
            Some(b) => coherent_bwd &= circle_dist(b, bwd) <= tol,
        }
    }
    let class = if all_center && coherent_fwd && rep.first_time != 0 {
        AnnulusRepClass::NearCenterCollapse(shift_fwd.unwrap_or(0.0))
    } else if all_rim && coherent_bwd && rep.first_time != 0 {
        AnnulusRepClass::NearRimCollapse(shift_bwd.unwrap_or(0.0))
    } else {
        AnnulusRepClass::NearIterate(rep.first_time)
    };
    let elem = class.element();
    let dev = grid
        .points
        .iter()
        .zip(&rep.value)
        .map(|(x, img)| grid.space.distance(&sg.eval(&elem, x), img))
        .fold(0.0f64, f64::max);
    (class, dev)
}

/// Read the odometer value off a sampled stacked-circles map: the deepest
/// ring shows the full residue. Returns the value and worst deviation.
pub fn classify_stack_rep(
    sg: &crate::symbolic::OdometerSemigroup,
    grid: &Grid,
    rep: &NetRep<MapImages>,
) -> Result<(u64, f64)> {
    let depth = sg.depth;
    let mut value: Option<u64> = None;
    for (x, img) in grid.points.iter().zip(&rep.value) {
        let (ring, xa) = match x {
            Point::Stack { ring, angle } => (*ring, *angle),
            _ => unreachable!("stack grid"),
        };
        let ia = match img {
            Point::Stack { angle, .. } => *angle,
            _ => unreachable!("stack image"),
        };
        if ring == Ring::Level(depth) {
            let turn = wrap_unit(xa - ia);
            let v = (turn * sg.modulus() as f64).round() as u64 % sg.modulus();
            match value {
                None => value = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::BadParameter {
                        key: "rep".into(),
                        message: format!("deepest ring shows both {prev} and {v}"),
                    })
                }
                _ => {}
            }
        }
    }
    let v = value.ok_or_else(|| Error::BadParameter {
        key: "grid".into(),
        message: format!("no grid point on ring {depth}"),
    })?;
    let dev = grid
        .points
        .iter()
        .zip(&rep.value)
        .map(|(x, img)| grid.space.distance(&sg.eval(v, x), img))
        .fold(0.0f64, f64::max);
    Ok((v, dev))
}

/// Match a sampled shift map against the exact family: a plain shift when
/// every image is exactly the same shift of its source, the flood when
/// every image sits within tol of its source's own tail constant.
pub fn classify_shift_rep(
    grid: &Grid,
    rep: &NetRep<MapImages>,
    tol: f64,
) -> Option<(ShiftElement, f64)> {
    let seqs: Vec<(&crate::space::SeqPoint, &crate::space::SeqPoint)> = grid
        .points
        .iter()
        .zip(&rep.value)
        .map(|(x, img)| match (x, img) {
            (Point::Seq(a), Point::Seq(b)) => (a, b),
            _ => unreachable!("seq grid"),
        })
        .collect();
    // a far iterate is still structurally an exact shift, so test for the
    // flood first: within tol of sending every point to its tail constant
    let mut flood_dev: f64 = 0.0;
    let mut flooded = true;
    for (x, img) in &seqs {
        let target = crate::space::SeqPoint::constant(x.right_fill());
        let gap = crate::space::seq_distance(img, &target);
        if gap > tol {
            flooded = false;
            break;
        }
        flood_dev = flood_dev.max(gap);
    }
    if flooded {
        return Some((ShiftElement::Flood, flood_dev));
    }
    let mut shift: Option<i64> = None;
    for (x, img) in &seqs {
        match img.shift_from(x) {
            Some(t) if !x.is_constant() => match shift {
                None => shift = Some(t),
                Some(s) if s != t => return None,
                _ => {}
            },
            Some(_) => {}
            None => return None,
        }
    }
    // identity on an all-constant grid counts as shift 0
    Some((ShiftElement::Shift(shift.unwrap_or(0)), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::GOLDEN;
    use crate::fnspace::FunctionMetric;
    use crate::space::{Fill, SeqPoint};
    use crate::symbolic::{AnnulusSemigroup, OdometerSemigroup};
    use proptest::prelude::*;

    fn metric_for(flow: &FlowSystem, resolution: u32) -> FunctionMetric {
        let (points, _) = flow.sample_grid(resolution).unwrap();
        FunctionMetric::standard(Grid::new(flow.space, points))
    }

    #[test]
    fn rotation_net_freezes_to_three_clusters() {
        // greedy scan by hand: angles 0, .618, .236, .854, .472, .090,
        // .708, .326 -> new clusters open at t = 0, 1, 7 and the three
        // representatives cover the whole circle within 0.26
        let flow = FlowSystem::rotation(GOLDEN).unwrap();
        let sg = approximate_semigroup(
            &flow,
            metric_for(&flow, 16),
            NetParams::new(0.26, 300, Direction::Forward),
        )
        .unwrap();
        assert_eq!(sg.len(), 3);
        let times: Vec<i64> = sg.reps().iter().map(|r| r.first_time).collect();
        assert_eq!(times, vec![0, 1, 7]);
        assert!(sg.audit_cover(1).unwrap() <= 0.26);
        // every pair of representatives is separated by more than epsilon
        for i in 0..sg.len() {
            for j in 0..i {
                assert!(sg.rep_distance(i, j) > 0.26);
            }
        }
    }

    #[test]
    fn stack_net_recovers_the_whole_group() {
        let flow = FlowSystem::stack(4).unwrap();
        let sg = approximate_semigroup(
            &flow,
            metric_for(&flow, 16),
            NetParams::new(0.003, 40, Direction::Forward),
        )
        .unwrap();
        assert_eq!(sg.len(), 16);
        let odo = OdometerSemigroup::new(4);
        for (i, rep) in sg.reps().iter().enumerate() {
            let (v, dev) = classify_stack_rep(&odo, sg.grid(), rep).unwrap();
            assert_eq!(v as usize, i, "clusters open in iterate order");
            assert_eq!(dev, 0.0, "iterates equal odometer elements exactly");
            // the cluster recurs exactly one period later
            assert!(rep.witnesses.contains(&(rep.first_time + 16)));
        }
    }

    #[test]
    fn annulus_net_contains_both_collapse_families() {
        let flow = FlowSystem::annulus(GOLDEN).unwrap();
        let eps = 0.15;
        let sg = approximate_semigroup(
            &flow,
            metric_for(&flow, 8),
            NetParams::new(eps, 2000, Direction::Both),
        )
        .unwrap();
        let alg = AnnulusSemigroup::new(GOLDEN);
        let mut center = 0;
        let mut rim = 0;
        let tol = 0.01;
        for rep in sg.reps() {
            let (class, dev) = classify_annulus_rep(&alg, sg.grid(), rep, tol);
            match class {
                AnnulusRepClass::NearCenterCollapse(_) => {
                    center += 1;
                    assert!(dev <= 2.0 * tol, "center dev {dev}");
                    assert!(rep.first_time > 0);
                }
                AnnulusRepClass::NearRimCollapse(_) => {
                    rim += 1;
                    assert!(dev <= 2.0 * tol, "rim dev {dev}");
                    assert!(rep.first_time < 0);
                }
                AnnulusRepClass::NearIterate(t) => {
                    assert!(dev <= 1e-9, "iterate rep should be exact, dev {dev}");
                    assert!(t.abs() <= 16, "far iterates collapse, got {t}");
                }
            }
        }
        assert!(center >= 1, "center-collapse reps: {center}");
        assert!(rim >= 1, "rim-collapse reps: {rim}");
        // both full collapse circles lie within the net's covering radius
        for k in 0..16 {
            let beta = k as f64 / 16.0;
            for elem in [
                AnnulusElement::CenterCollapse(beta),
                AnnulusElement::RimCollapse(beta),
            ] {
                let images: MapImages = sg
                    .grid()
                    .points
                    .iter()
                    .map(|x| alg.eval(&elem, x))
                    .collect();
                let best = sg
                    .reps()
                    .iter()
                    .map(|r| sg.metric.distance(&r.value, &images))
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= eps + 0.05, "collapse at {beta} sits {best} away");
            }
        }
        assert!(sg.identity_isolation().unwrap() > eps);
    }

    #[test]
    fn full_shift_identity_sits_at_distance_one() {
        let flow = FlowSystem::full_shift(8).unwrap();
        let grid = Grid::new(flow.space, vec![flow.basepoint()]);
        let metric = FunctionMetric::uniform(grid);
        let sg =
            approximate_semigroup(&flow, metric, NetParams::new(0.3, 50, Direction::Both)).unwrap();
        assert!(sg.len() > 1);
        assert_eq!(sg.identity_isolation().unwrap(), 1.0);
    }

    #[test]
    fn identity_gap_closes_for_the_stack_and_stays_open_for_the_shift() {
        let stack = FlowSystem::stack(4).unwrap();
        let (gap, t) = identity_gap(&stack, &metric_for(&stack, 8), 100).unwrap();
        assert_eq!(gap, 0.0);
        assert_eq!(t, 16);

        let shift = FlowSystem::full_shift(8).unwrap();
        let single = Point::Seq(SeqPoint::block(Fill::Zeros, &[1], 0));
        let grid = Grid::new(shift.space, vec![single]);
        let metric = FunctionMetric::uniform(grid);
        let (gap, _) = identity_gap(&shift, &metric, 200).unwrap();
        assert_eq!(gap, 1.0);
    }

    #[test]
    fn second_level_of_rotation_mirrors_the_first() {
        let flow = FlowSystem::rotation(GOLDEN).unwrap();
        let first = Arc::new(
            approximate_semigroup(
                &flow,
                metric_for(&flow, 16),
                NetParams::new(0.26, 300, Direction::Forward),
            )
            .unwrap(),
        );
        let second = second_level_semigroup(first, NetParams::new(0.26, 300, Direction::Forward));
        assert_eq!(second.len(), 3);
        let times: Vec<i64> = second.net.reps.iter().map(|r| r.first_time).collect();
        assert_eq!(times, vec![0, 1, 7]);
    }

    #[test]
    fn second_level_of_stack_is_the_same_group() {
        let flow = FlowSystem::stack(3).unwrap();
        let first = Arc::new(
            approximate_semigroup(
                &flow,
                metric_for(&flow, 8),
                NetParams::new(0.005, 10, Direction::Forward),
            )
            .unwrap(),
        );
        assert_eq!(first.len(), 8);
        let second = second_level_semigroup(first, NetParams::new(0.005, 10, Direction::Forward));
        assert_eq!(second.len(), 8);
        for i in 0..second.len() {
            for j in 0..i {
                assert!(second.rep_distance(i, j) > 0.005);
            }
        }
    }

    #[test]
    fn shift_pair_reps_classify_to_shifts_and_flood() {
        let flow = FlowSystem::shift_pair(&[1], 16).unwrap();
        let (points, _) = flow.sample_grid(6).unwrap();
        let metric = FunctionMetric::uniform(Grid::new(flow.space, points));
        let sg = approximate_semigroup(&flow, metric, NetParams::new(0.001, 80, Direction::Both))
            .unwrap();
        let mut flood_seen = false;
        for rep in sg.reps() {
            let (elem, dev) = classify_shift_rep(sg.grid(), rep, 0.02).unwrap();
            match elem {
                ShiftElement::Shift(t) => {
                    assert_eq!(t, rep.first_time);
                    assert_eq!(dev, 0.0);
                }
                ShiftElement::Flood => {
                    flood_seen = true;
                    assert!(dev <= 0.02);
                }
            }
        }
        assert!(flood_seen, "far shifts flood each family to its constant");
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let flow = FlowSystem::rotation(GOLDEN).unwrap();
        let m = metric_for(&flow, 4);
        assert!(approximate_semigroup(
            &flow,
            m.clone(),
            NetParams::new(0.0, 10, Direction::Forward)
        )
        .is_err());
        assert!(
            approximate_semigroup(&flow, m, NetParams::new(0.1, 0, Direction::Forward)).is_err()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn net_always_covers_the_scan(alpha in 0.05f64..0.95, eps in 0.05f64..0.4) {
            prop_assume!((alpha - 0.5).abs() > 1e-3);
            let flow = FlowSystem::rotation(alpha).unwrap();
            let sg = approximate_semigroup(
                &flow,
                metric_for(&flow, 8),
                NetParams::new(eps, 60, Direction::Both),
            ).unwrap();
            let worst = sg.audit_cover(1).unwrap();
            prop_assert!(worst <= eps + 1e-12, "worst {worst} vs {eps}");
            for i in 0..sg.len() {
                for j in 0..i {
                    prop_assert!(sg.rep_distance(i, j) > eps);
                }
            }
        }
    }
}
