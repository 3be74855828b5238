//! Acceptance gate: eleven end-to-end criteria, each printing one pass/fail
//! line (run with --nocapture to see them) and enforcing an explicit wall
//! clock budget. Everything here drives the public API only.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use envelab::config::ExperimentConfig;
use envelab::detect::{
    proximality, sensitivity, thick_syndeticity, uniform_rigidity, unique_minimal_fixed_point,
    weak_rigidity, Outcome,
};
use envelab::envelope::{
    approximate_semigroup, classify_annulus_rep, identity_gap, AnnulusRepClass, NetParams,
};
use envelab::flow::{Direction, FlowSystem, GOLDEN, SILVER};
use envelab::fnspace::{FunctionMetric, Grid};
use envelab::report::canonical_json;
use envelab::space::{circle_dist, Fill, Point, Ring, SeqPoint};
use envelab::symbolic::{
    level_iso, AnnulusElement, AnnulusSemigroup, InducedAnnulusSemigroup, OdometerSemigroup,
    ShiftElement, ShiftSemigroup,
};
use envelab::system::{MetricMode, PointFlow, SymbolicElementFlow, System};
use envelab::theorems::run_suite;

fn seeded() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce97)
}

fn report(n: u32, ok: bool, elapsed: Duration, budget: Duration, summary: &str) {
    let in_time = elapsed <= budget;
    let line = format!(
        "criterion {n:2}: {} - {summary} ({elapsed:.2?} of {budget:?} budget)",
        if ok && in_time { "pass" } else { "FAIL" },
    );
    println!("{line}");
    assert!(ok && in_time, "{line}");
}

#[test]
fn criterion_01_composition_table_coheres() {
    let start = Instant::now();
    let sg = AnnulusSemigroup::new(GOLDEN);
    let space = FlowSystem::annulus(GOLDEN).unwrap().space;
    let mut rng = seeded();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = Point::annulus(rng.gen_range(1.0..=2.0), rng.gen());
        let s = AnnulusElement::Step(rng.gen_range(-6..=6));
        let t = AnnulusElement::Step(rng.gen_range(-6..=6));
        let c = AnnulusElement::CenterCollapse(rng.gen());
        let r = AnnulusElement::RimCollapse(rng.gen());
        for (a, b) in [
            (s, t),
            (s, c),
            (c, s),
            (s, r),
            (r, s),
            (c, c),
            (c, r),
            (r, c),
            (r, r),
        ] {
            let composed = sg.eval(&sg.compose(&a, &b), &x);
            let chained = sg.eval(&a, &sg.eval(&b, &x));
            worst = worst.max(space.distance(&composed, &chained));
        }
    }
    report(
        1,
        worst <= 1e-9,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("composition table coherent over 1000 random points, max error {worst:.2e}"),
    );
}

#[test]
fn criterion_02_sampled_net_recovers_the_exact_families() {
    let start = Instant::now();
    let flow = FlowSystem::annulus(GOLDEN).unwrap();
    let (pts, _) = flow.sample_grid(16).unwrap();
    let metric = FunctionMetric::standard(Grid::new(flow.space, pts));
    let params = NetParams::new(0.05, 10_000, Direction::Both);
    let sg = approximate_semigroup(&flow, metric, params).unwrap();
    let model = AnnulusSemigroup::new(GOLDEN);
    let mut center = 0usize;
    let mut rim = 0usize;
    let mut worst = 0.0f64;
    for rep in &sg.net.reps {
        let (class, dev) = classify_annulus_rep(&model, sg.metric.grid(), rep, 0.05);
        worst = worst.max(dev);
        match class {
            AnnulusRepClass::NearCenterCollapse(_) => center += 1,
            AnnulusRepClass::NearRimCollapse(_) => rim += 1,
            AnnulusRepClass::NearIterate(_) => {}
        }
    }
    report(
        2,
        worst <= 0.05 && center >= 10 && rim >= 10,
        start.elapsed(),
        Duration::from_secs(30),
        &format!(
            "{} representatives all within {worst:.4} of exact elements; {center} center and {rim} rim collapse clusters",
            sg.net.reps.len()
        ),
    );
}

#[test]
fn criterion_03_level_isomorphism_is_equivariant() {
    let start = Instant::now();
    let first = AnnulusSemigroup::new(GOLDEN);
    let ind = InducedAnnulusSemigroup::new(GOLDEN);
    let mut rng = seeded();
    let mut elems: Vec<AnnulusElement> = (-5..=5).map(AnnulusElement::Step).collect();
    for _ in 0..50 {
        elems.push(AnnulusElement::CenterCollapse(rng.gen()));
        elems.push(AnnulusElement::RimCollapse(rng.gen()));
    }
    let mut violations = 0usize;
    for t in -100..=100 {
        let g = ind.generator_power(t);
        let step = AnnulusElement::Step(t);
        for e in &elems {
            let lhs = level_iso(&first.compose(&step, e));
            let rhs = ind.compose(&g, &level_iso(e));
            if !lhs.close_to(&rhs) {
                violations += 1;
            }
        }
    }
    report(
        3,
        violations == 0,
        start.elapsed(),
        Duration::from_secs(1),
        &format!(
            "{} elements carried across all |t| <= 100 with {violations} violations at 1e-9",
            elems.len()
        ),
    );
}

fn random_stack_point(rng: &mut ChaCha8Rng, depth: u32) -> Point {
    let ring = match rng.gen_range(0..=depth + 1) {
        n if n == depth + 1 => Ring::Outer,
        n => Ring::Level(n),
    };
    Point::stack(ring, rng.gen())
}

fn separation_bound(x: &Point, y: &Point) -> f64 {
    match (x, y) {
        (
            Point::Stack {
                ring: r1,
                angle: a1,
            },
            Point::Stack {
                ring: r2,
                angle: a2,
            },
        ) => {
            if r1 == r2 {
                circle_dist(*a1, *a2)
            } else {
                (r1.radius() - r2.radius()).abs()
            }
        }
        _ => unreachable!("stack points"),
    }
}

#[test]
fn criterion_04_stacked_circles_and_odometer_stay_separated() {
    let start = Instant::now();
    let horizon = 10_000i64;
    let flow = FlowSystem::stack(6).unwrap();
    let sys = PointFlow::new(flow.clone());
    let mut rng = seeded();
    let mut point_ratio = f64::INFINITY;
    let mut pairs = 0;
    while pairs < 50 {
        let x = random_stack_point(&mut rng, 6);
        let y = random_stack_point(&mut rng, 6);
        let bound = separation_bound(&x, &y);
        if bound < 1e-3 {
            continue;
        }
        let rs = proximality(&sys, &x, &y, 0.5 * bound, horizon);
        if !rs.is_empty() {
            point_ratio = 0.0;
        }
        point_ratio = point_ratio.min(rs.min_value / bound);
        pairs += 1;
    }

    let od = OdometerSemigroup::new(6);
    let modulus = od.modulus();
    let (pts, _) = flow.sample_grid(4).unwrap();
    let metric = FunctionMetric::standard(Grid::new(flow.space, pts));
    let esys = SymbolicElementFlow::new(od, metric, Vec::new(), MetricMode::Weighted);
    let mut od_ratio = f64::INFINITY;
    let mut od_pairs = 0;
    while od_pairs < 50 {
        let u = rng.gen_range(0..modulus);
        let v = rng.gen_range(0..modulus);
        if u == v {
            continue;
        }
        let d0 = esys.dist(&u, &v);
        let rs = proximality(&esys, &u, &v, 0.5 * d0, horizon);
        if !rs.is_empty() {
            od_ratio = 0.0;
        }
        od_ratio = od_ratio.min(rs.min_value / d0);
        od_pairs += 1;
    }

    report(
        4,
        point_ratio >= 0.99 && od_ratio >= 0.99,
        start.elapsed(),
        Duration::from_secs(30),
        &format!(
            "50 point pairs keep {point_ratio:.4}x and 50 odometer pairs keep {od_ratio:.4}x of their lower bound through |t| <= {horizon}"
        ),
    );
}

#[test]
fn criterion_05_return_times_double_with_depth() {
    let start = Instant::now();
    let mut ok = true;
    let mut seen = Vec::new();
    for k in 3..=8u32 {
        let flow = FlowSystem::stack(k).unwrap();
        let sys = PointFlow::new(flow.clone());
        let period = 1i64 << k;
        let horizon = period + 8;
        let points: Vec<Point> = (0..=k)
            .map(|n| Point::stack(Ring::Level(n), 0.3))
            .chain([Point::stack(Ring::Outer, 0.3)])
            .collect();
        let weak = weak_rigidity(&sys, &points, 1e-6, horizon);
        let (grid, _) = flow.sample_grid(4).unwrap();
        let uniform = uniform_rigidity(&sys, &grid, 0.25, horizon);
        ok &= weak.t == Some(period) && uniform.t == Some(period);
        seen.push(format!("k={k}: {:?}/{:?}", weak.t, uniform.t));
    }
    report(
        5,
        ok,
        start.elapsed(),
        Duration::from_secs(60),
        &format!(
            "pointwise and uniform first returns are 2^k exactly ({})",
            seen.join(", ")
        ),
    );
}

#[test]
fn criterion_06_full_shift_never_returns_and_identity_is_isolated() {
    let start = Instant::now();
    let flow = FlowSystem::full_shift(16).unwrap();
    let marked = Point::Seq(SeqPoint::block(Fill::Zeros, &[1], 0));
    let sys = PointFlow::new(flow.clone());
    let weak = weak_rigidity(&sys, std::slice::from_ref(&marked), 0.5, 10_000);
    let metric = FunctionMetric::uniform(Grid::new(flow.space, vec![marked]));
    let (gap, _) = identity_gap(&flow, &metric, 10_000).unwrap();
    report(
        6,
        weak.t.is_none() && weak.best_distance == 1.0 && gap == 1.0,
        start.elapsed(),
        Duration::from_secs(10),
        &format!(
            "marked state never re-enters radius 0.5 (closest {}), identity isolated with gap {gap}",
            weak.best_distance
        ),
    );
}

#[test]
fn criterion_07_skew_torus_is_sensitive_where_rotations_are_not() {
    let start = Instant::now();
    let ladder = [0.25, 0.2, 0.1];
    let radii = [0.1, 0.01, 1e-3];

    let skew = FlowSystem::torus_circle(SILVER, GOLDEN).unwrap();
    let sys = PointFlow::new(skew.clone());
    let grid = skew.torus_part_grid(32).unwrap();
    let sens = sensitivity(&sys, &grid, 1000, &ladder, &radii);
    let skew_ok = matches!(sens.epsilon, Some(e) if e >= 0.2) && sens.witnesses.len() == grid.len();

    let rotation = FlowSystem::rotation(GOLDEN).unwrap();
    let (rot_grid, _) = rotation.sample_grid(16).unwrap();
    let rot = sensitivity(&PointFlow::new(rotation), &rot_grid, 1000, &ladder, &radii);

    let identity = FlowSystem::identity();
    let (id_grid, _) = identity.sample_grid(16).unwrap();
    let idn = sensitivity(&PointFlow::new(identity), &id_grid, 1000, &ladder, &radii);

    report(
        7,
        skew_ok && rot.epsilon.is_none() && idn.epsilon.is_none(),
        start.elapsed(),
        Duration::from_secs(60),
        &format!(
            "skew torus part separates beyond {:?} at every one of {} grid states; rotation and identity never separate",
            sens.epsilon,
            grid.len()
        ),
    );
}

fn shift_universe() -> Vec<ShiftElement> {
    (-20..=20)
        .map(ShiftElement::Shift)
        .chain([ShiftElement::Flood])
        .collect()
}

fn shift_element_flow(flow: &FlowSystem) -> SymbolicElementFlow<ShiftSemigroup> {
    let (pts, _) = flow.sample_grid(2).unwrap();
    let metric = FunctionMetric::uniform(Grid::new(flow.space, pts));
    SymbolicElementFlow::new(
        ShiftSemigroup,
        metric,
        shift_universe(),
        MetricMode::Weighted,
    )
}

#[test]
fn criterion_08_shift_pair_is_proximal_in_the_envelope_only() {
    let start = Instant::now();
    let flow = FlowSystem::shift_pair(&[1], 16).unwrap();
    let sys = PointFlow::new(flow.clone());
    let zeros = Point::Seq(SeqPoint::constant(Fill::Zeros));
    let ones = Point::Seq(SeqPoint::constant(Fill::Ones));
    let base = proximality(&sys, &zeros, &ones, 0.5, 10_000);
    let base_ok = base.is_empty() && base.min_value == 1.0;

    let esys = shift_element_flow(&flow);
    let universe = shift_universe();
    let horizon = 600i64;
    let mut all_proximal = true;
    let mut all_thick = true;
    for (i, u) in universe.iter().enumerate() {
        for v in universe.iter().skip(i + 1) {
            let rs = proximality(&esys, u, v, 0.25, horizon);
            all_proximal &= !rs.is_empty();
            all_thick &= thick_syndeticity(&rs, 5, 128).outcome == Outcome::Holds;
        }
    }

    let fixed = unique_minimal_fixed_point(&esys, &universe, 0.25, horizon);
    let fixed_ok = fixed.verdict.outcome == Outcome::Holds
        && matches!(fixed.index.map(|i| universe[i]), Some(ShiftElement::Flood));

    let pairs = universe.len() * (universe.len() - 1) / 2;
    report(
        8,
        base_ok && all_proximal && all_thick && fixed_ok,
        start.elapsed(),
        Duration::from_secs(30),
        &format!(
            "base pair stays at distance {}; all {pairs} induced pairs proximal at 0.25 with run length 5 returns; unique fixed element is the flood map",
            base.min_value
        ),
    );
}

#[test]
fn criterion_09_thick_syndetic_returns_in_both_directions() {
    let start = Instant::now();
    let flow = FlowSystem::shift_pair(&[1], 16).unwrap();
    let esys = shift_element_flow(&flow);
    let universe = shift_universe();
    let horizon = 600i64;
    let mut ok = true;
    let mut pairs = 0usize;
    for (i, u) in universe.iter().enumerate() {
        for v in universe.iter().skip(i + 1) {
            let rs = proximality(&esys, u, v, 0.25, horizon);
            if rs.is_empty() {
                ok = false;
                continue;
            }
            pairs += 1;
            for k in 1..=5 {
                ok &= thick_syndeticity(&rs, k, 128).outcome == Outcome::Holds;
                let starts = rs.run_starts(k);
                ok &= starts.iter().any(|&t| t < 0) && starts.iter().any(|&t| t > 0);
            }
        }
    }
    report(
        9,
        ok,
        start.elapsed(),
        Duration::from_secs(60),
        &format!(
            "all {pairs} proximal pairs have run length 1..=5 returns with bounded gaps on both sides of zero"
        ),
    );
}

#[test]
fn criterion_10_default_suite_holds() {
    let start = Instant::now();
    let suite = run_suite(&ExperimentConfig::default()).unwrap();
    let elapsed = start.elapsed();
    report(
        10,
        suite.failed == 0 && suite.open <= 2,
        elapsed,
        Duration::from_secs(300),
        &format!(
            "{} checks: {} hold, {} fail, {} open",
            suite.checks.len(),
            suite.passed,
            suite.failed,
            suite.open
        ),
    );
}

#[test]
fn criterion_11_reports_identical_across_worker_counts() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig {
        workers: 1,
        ..ExperimentConfig::default()
    };
    let one = canonical_json(&run_suite(&cfg).unwrap()).unwrap();
    cfg.workers = 8;
    let eight = canonical_json(&run_suite(&cfg).unwrap()).unwrap();
    report(
        11,
        one == eight,
        start.elapsed(),
        Duration::from_secs(300),
        &format!(
            "suite reports agree byte for byte across worker counts ({} bytes)",
            one.len()
        ),
    );
}
