//! The check bodies. Each builds its own systems from the context, so a
//! check is a pure function of the configuration and can run on any worker.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CheckContext, TheoremReport};
use crate::detect::{
    equicontinuity_at, proximality, sensitivity, syndeticity, thick_syndeticity, transitivity,
    uniform_rigidity, unique_minimal_fixed_point, weak_rigidity, Outcome, Verdict, FIXED_TOL,
};
use crate::envelope::{
    approximate_semigroup, classify_annulus_rep, identity_gap, second_level_semigroup,
    AnnulusRepClass, NetParams,
};
use crate::flow::{Direction, FlowSystem, GOLDEN, SILVER};
use crate::fnspace::{FunctionMetric, Grid};
use crate::space::{circle_dist, wrap_unit, Fill, Point, Ring, SeqPoint};
use crate::symbolic::{
    level_iso, level_iso_back, AnnulusElement, AnnulusSemigroup, GroupVerdict,
    InducedAnnulusSemigroup, OdometerSemigroup, ShiftElement, ShiftSemigroup,
};
use crate::system::{MetricMode, PointFlow, SampledElementFlow, SymbolicElementFlow, System};

fn seeded() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x0ddba11)
}

fn metric_for(flow: &FlowSystem, resolution: u32) -> FunctionMetric {
    let (pts, _) = flow
        .space
        .sample_grid(resolution)
        .expect("sampleable space");
    FunctionMetric::standard(Grid::new(flow.space, pts))
}

/// A leg the scan had to find; a miss leaves it open, never failed.
fn found(property: &str, ok: bool, note: String) -> Verdict {
    let outcome = if ok {
        Outcome::Holds
    } else {
        Outcome::Inconclusive
    };
    Verdict::new(property, outcome, note)
}

/// A leg the scan settles either way: a miss is a concrete counter-witness.
fn settled(property: &str, ok: bool, note: String) -> Verdict {
    let outcome = if ok { Outcome::Holds } else { Outcome::Fails };
    Verdict::new(property, outcome, note)
}

fn group_note(v: &GroupVerdict) -> String {
    match v {
        GroupVerdict::Group => "every element has an inverse".into(),
        GroupVerdict::NotGroup { witness, reason } => format!("{witness}: {reason}"),
    }
}

/// Sampled stack pairs keep at least `factor` of their separation lower
/// bound: same ring bounds by the angle gap, distinct rings by the radial
/// gap. Rigid ring rotations cannot beat either bound.
fn stack_separation_leg(
    property: &str,
    flow: &FlowSystem,
    depth: u32,
    pair_count: usize,
    factor: f64,
    horizon: i64,
) -> Verdict {
    let sys = PointFlow::new(flow.clone());
    let rings: Vec<Ring> = (0..=depth).map(Ring::Level).chain([Ring::Outer]).collect();
    let mut rng = seeded();
    let mut worst = f64::INFINITY;
    let mut checked = 0;
    let mut all_empty = true;
    while checked < pair_count {
        let r1 = rings[rng.gen_range(0..rings.len())];
        let r2 = rings[rng.gen_range(0..rings.len())];
        let (a1, a2) = (rng.gen::<f64>(), rng.gen::<f64>());
        let bound = if r1 == r2 {
            circle_dist(a1, a2)
        } else {
            (r1.radius() - r2.radius()).abs()
        };
        if bound < 1e-3 {
            continue;
        }
        let x = Point::stack(r1, a1);
        let y = Point::stack(r2, a2);
        let rs = proximality(&sys, &x, &y, factor * bound, horizon);
        all_empty &= rs.is_empty();
        worst = worst.min(rs.min_value / bound);
        checked += 1;
    }
    settled(
        property,
        all_empty,
        format!(
            "{checked} sampled pairs keep {worst:.3}x their separation bound through |t| <= {horizon}"
        ),
    )
}

/// Element pairs of the ring-turning group never approach: the induced
/// metric is translation invariant.
fn odometer_separation_leg(property: &str, depth: u32, horizon: i64) -> Verdict {
    let flow = FlowSystem::stack(depth).expect("valid depth");
    let od = OdometerSemigroup::new(depth);
    let modulus = od.modulus();
    let esys = SymbolicElementFlow::new(od, metric_for(&flow, 4), Vec::new(), MetricMode::Weighted);
    let mut rng = seeded();
    let mut worst = f64::INFINITY;
    let mut all_empty = true;
    let mut checked = 0;
    while checked < 8 {
        let u = rng.gen_range(0..modulus);
        let v = rng.gen_range(0..modulus);
        if u == v {
            continue;
        }
        let d0 = esys.dist(&u, &v);
        let rs = proximality(&esys, &u, &v, 0.5 * d0, horizon);
        all_empty &= rs.is_empty();
        worst = worst.min(rs.min_value / d0);
        checked += 1;
    }
    settled(
        property,
        all_empty && worst > 0.999,
        format!("8 element pairs keep {worst:.4}x their initial distance through |t| <= {horizon}"),
    )
}

/// Envelope of the two-part skew flow, watched through evaluation at the
/// square-part state (0, 0). States are sampled iterate images; the metric
/// compares images at the base state only, so probing is cheap.
fn skew_envelope_at_base(flow: &FlowSystem, reach: i64) -> SampledElementFlow {
    let mut pts = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            pts.push(Point::UnionTorus {
                a: i as f64 / 6.0,
                b: j as f64 / 6.0,
            });
        }
    }
    let grid = Grid::new(flow.space, pts);
    SampledElementFlow::iterates(
        flow.clone(),
        FunctionMetric::uniform(grid),
        reach,
        MetricMode::AtBase(0),
    )
}

fn envelope_sensitivity_leg(
    property: &str,
    ctx: &CheckContext,
    esys: &SampledElementFlow,
    sample_stride: usize,
) -> Verdict {
    let sample: Vec<_> = esys
        .universe
        .iter()
        .step_by(sample_stride)
        .cloned()
        .collect();
    let horizon = ctx.horizon().min(1000);
    let report = sensitivity(esys, &sample, horizon, ctx.ladder(), &[0.2, 0.1]);
    match report.epsilon {
        Some(eps) => found(
            property,
            true,
            format!(
                "all {} sampled elements separate beyond {eps} at the base state within |t| <= {horizon}",
                sample.len()
            ),
        ),
        None => found(property, false, report.verdict.note),
    }
}

fn torus_part_grid(flow: &FlowSystem, resolution: u32) -> Vec<Point> {
    let (pts, _) = flow.space.sample_grid(resolution).expect("grid");
    pts.into_iter()
        .filter(|p| matches!(p, Point::UnionTorus { .. }))
        .collect()
}

fn shift_metric(flow: &FlowSystem) -> FunctionMetric {
    let (pts, _) = flow.space.sample_grid(2).expect("grid");
    FunctionMetric::uniform(Grid::new(flow.space, pts))
}

pub fn almost_equi_uniformly_rigid(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::rotation(GOLDEN).expect("valid angle");
    let sys = PointFlow::new(flow.clone());
    let (grid, _) = flow
        .space
        .sample_grid(ctx.cfg.detect.resolution)
        .expect("grid");
    let horizon = ctx.horizon();

    let trans = transitivity(&sys, &grid[0], 0.1, horizon, &grid);
    let hyp_trans = found(
        "point-transitive",
        trans.transitive,
        trans.verdict.note.clone(),
    );

    let mut comm_ok = true;
    for (s, t) in [(3i64, 5i64), (-7, 11), (2, -9)] {
        let a = flow.apply(s, &flow.apply(t, &grid[1]));
        let b = flow.apply(t, &flow.apply(s, &grid[1]));
        comm_ok &= flow.space.distance(&a, &b) <= 1e-12;
    }
    let hyp_abelian = settled(
        "commuting-iterates",
        comm_ok,
        "iterate powers commute on sampled states".into(),
    );

    let mut stable = 0;
    let mut worst_delta = f64::INFINITY;
    for x in &grid {
        if let (Some(d), _) = equicontinuity_at(&sys, x, 0.1, horizon.min(2000), ctx.delta_grid()) {
            stable += 1;
            worst_delta = worst_delta.min(d);
        }
    }
    let hyp_stable = settled(
        "almost-equicontinuous",
        stable == grid.len(),
        format!(
            "{stable} of {} sampled states are stability points (tightest radius {worst_delta})",
            grid.len()
        ),
    );

    let rig = uniform_rigidity(&sys, &grid, ctx.eps_small(), horizon);
    let conc = match rig.t {
        Some(t) => found(
            "uniformly-rigid",
            true,
            format!(
                "the whole sample returns within {} at t = {t}",
                ctx.eps_small()
            ),
        ),
        None => found("uniformly-rigid", false, rig.verdict.note.clone()),
    };

    TheoremReport::settle(
        "almost-equi-uniformly-rigid",
        "a point-transitive, almost equicontinuous flow with commuting iterates is uniformly rigid",
        vec![flow.describe()],
        vec![hyp_trans, hyp_abelian, hyp_stable],
        vec![conc],
    )
}

pub fn annulus_exact_model(ctx: &CheckContext) -> TheoremReport {
    let sg = AnnulusSemigroup::new(GOLDEN);
    let flow = FlowSystem::annulus(GOLDEN).expect("valid angle");
    let mut rng = seeded();

    let mut elems: Vec<AnnulusElement> = (-3..=3).map(AnnulusElement::Step).collect();
    for _ in 0..4 {
        elems.push(AnnulusElement::CenterCollapse(rng.gen()));
        elems.push(AnnulusElement::RimCollapse(rng.gen()));
    }
    let points: Vec<Point> = (0..6)
        .map(|_| Point::annulus(1.0 + rng.gen::<f64>(), rng.gen()))
        .collect();
    let mut worst = 0.0f64;
    for a in &elems {
        for b in &elems {
            for x in &points {
                let lhs = sg.eval(&sg.compose(a, b), x);
                let rhs = sg.eval(a, &sg.eval(b, x));
                worst = worst.max(flow.space.distance(&lhs, &rhs));
            }
        }
    }
    let comp_leg = settled(
        "composition-evaluates-coherently",
        worst <= 1e-9,
        format!(
            "worst defect {worst:.2e} over {} composition triples",
            elems.len() * elems.len() * points.len()
        ),
    );

    let net_horizon = ctx.horizon().min(2000);
    let sgn = approximate_semigroup(
        &flow,
        metric_for(&flow, 8),
        NetParams::new(0.15, net_horizon, Direction::Both),
    )
    .expect("valid net parameters");
    let mut worst_dev = 0.0f64;
    let (mut centers, mut rims) = (0, 0);
    for rep in sgn.reps() {
        let (class, dev) = classify_annulus_rep(&sg, sgn.grid(), rep, 0.02);
        worst_dev = worst_dev.max(dev);
        match class {
            AnnulusRepClass::NearCenterCollapse(_) => centers += 1,
            AnnulusRepClass::NearRimCollapse(_) => rims += 1,
            AnnulusRepClass::NearIterate(_) => {}
        }
    }
    let net_leg = settled(
        "net-matches-model",
        worst_dev <= 0.15,
        format!(
            "all {} sampled maps lie within {worst_dev:.3} of an exact element",
            sgn.len()
        ),
    );
    let family_leg = found(
        "both-collapse-families-sampled",
        centers >= 1 && rims >= 1,
        format!("{centers} center-collapse and {rims} rim-collapse maps in the net"),
    );

    let beta = wrap_unit(7.0 * GOLDEN);
    let fwd_leg = match sg.forward_limit_times(beta, 1e-3, 1, ctx.horizon().max(2000), 3) {
        Ok(ts) => settled(
            "iterates-approach-center-collapse",
            ts[0] == 7,
            format!("rotation angle of step 7 approached at t = {ts:?}"),
        ),
        Err(e) => found("iterates-approach-center-collapse", false, e.to_string()),
    };
    let bwd_leg = match sg.backward_limit_times(beta, 1e-3, 1, ctx.horizon().max(2000), 3) {
        Ok(ts) => settled(
            "iterates-approach-rim-collapse",
            ts[0] == -7,
            format!("rotation angle of step 7 approached at t = {ts:?}"),
        ),
        Err(e) => found("iterates-approach-rim-collapse", false, e.to_string()),
    };

    let gv = sg.group_verdict();
    let group_leg = settled("collapses-not-invertible", !gv.is_group(), group_note(&gv));

    TheoremReport::settle(
        "annulus-exact-model",
        "the exact three-family model of the annulus envelope matches the sampled net, its limit times, and its non-group structure",
        vec![flow.describe()],
        vec![comp_leg],
        vec![net_leg, family_leg, fwd_leg, bwd_leg, group_leg],
    )
}

pub fn distal_iff_envelope_distal(ctx: &CheckContext) -> TheoremReport {
    let depth = ctx.stack_depth();
    let flow = FlowSystem::stack(depth).expect("valid depth");
    let base_leg = stack_separation_leg(
        "base-pairs-stay-apart",
        &flow,
        depth,
        12,
        0.99,
        ctx.horizon().min(4096),
    );
    let env_leg =
        odometer_separation_leg("envelope-pairs-stay-apart", depth, ctx.horizon().min(256));
    TheoremReport::settle(
        "distal-iff-envelope-distal",
        "a flow is distal exactly when its envelope flow is distal; the stacked circles witness both directions",
        vec![flow.describe()],
        vec![base_leg],
        vec![env_leg],
    )
}

pub fn distal_stable_envelope(ctx: &CheckContext) -> TheoremReport {
    let depth = ctx.stack_depth();
    let flow = FlowSystem::stack(depth).expect("valid depth");
    let sys = PointFlow::new(flow.clone());
    let distal_leg = stack_separation_leg("distal", &flow, depth, 6, 0.99, ctx.horizon().min(2048));

    let probe_rings = [
        Ring::Level(0),
        Ring::Level(depth / 2),
        Ring::Level(depth),
        Ring::Outer,
    ];
    let horizon = (1i64 << (depth + 1)).min(ctx.horizon().max(256));
    let mut stable = 0;
    let mut tightest = f64::INFINITY;
    for ring in probe_rings {
        let x = Point::stack(ring, 0.37);
        if let (Some(d), _) = equicontinuity_at(&sys, &x, 0.25, horizon, ctx.delta_grid()) {
            stable += 1;
            tightest = tightest.min(d);
        }
    }
    let stable_leg = settled(
        "every-state-a-stability-point",
        stable == probe_rings.len(),
        format!(
            "{stable} of {} ring states have a stability radius (tightest {tightest})",
            probe_rings.len()
        ),
    );

    let od = OdometerSemigroup::new(depth);
    let modulus = od.modulus();
    // keep the probe pool bounded at large depths
    let stride = (modulus / 512).max(1);
    let universe: Vec<u64> = (0..modulus).step_by(stride as usize).collect();
    let esys = SymbolicElementFlow::new(od, metric_for(&flow, 4), universe, MetricMode::Weighted);
    let elems = [0u64, 1, modulus / 2, modulus - 1];
    let mut env_stable = 0;
    for e in elems {
        if let (Some(_), _) =
            equicontinuity_at(&esys, &e, 0.1, ctx.horizon().min(512), ctx.delta_grid())
        {
            env_stable += 1;
        }
    }
    let env_leg = settled(
        "envelope-equicontinuous",
        env_stable == elems.len(),
        format!(
            "{env_stable} of {} elements are stability points of the element flow",
            elems.len()
        ),
    );

    TheoremReport::settle(
        "distal-stable-envelope",
        "a metrizable distal flow whose states are all stability points has an equicontinuous envelope",
        vec![flow.describe()],
        vec![distal_leg, stable_leg],
        vec![env_leg],
    )
}

pub fn envelope_group_both_levels(_ctx: &CheckContext) -> TheoremReport {
    // small fixed depth: both levels enumerable exactly
    let od = OdometerSemigroup::new(3);
    let gv = od.group_verdict();
    let first_group = settled("first-level-group", gv.is_group(), group_note(&gv));

    let flow = FlowSystem::stack(3).expect("valid depth");
    let params = NetParams::new(0.03, 200, Direction::Both);
    let first = Arc::new(
        approximate_semigroup(&flow, metric_for(&flow, 4), params).expect("valid net parameters"),
    );
    let size_leg = settled(
        "net-size-matches-group-order",
        first.len() as u64 == od.modulus(),
        format!(
            "{} sampled maps vs group order {}",
            first.len(),
            od.modulus()
        ),
    );
    let second = second_level_semigroup(first, NetParams::new(0.03, 200, Direction::Both));
    let second_leg = settled(
        "second-level-same-order",
        second.len() as u64 == od.modulus(),
        format!(
            "{} second-level maps vs group order {}",
            second.len(),
            od.modulus()
        ),
    );

    let asg = AnnulusSemigroup::new(GOLDEN);
    let av = asg.group_verdict();
    let contrast_first = settled(
        "annulus-first-level-not-group",
        !av.is_group(),
        group_note(&av),
    );
    let ind = InducedAnnulusSemigroup::new(GOLDEN);
    let iv = ind.group_verdict();
    let contrast_second = settled(
        "annulus-second-level-not-group",
        !iv.is_group(),
        group_note(&iv),
    );

    TheoremReport::settle(
        "envelope-group-both-levels",
        "when the envelope is a group the second-level envelope is a group of the same order; the annulus shows the contrapositive",
        vec![flow.describe(), "annulus(alpha=golden)".into()],
        vec![first_group, contrast_first],
        vec![size_leg, second_leg, contrast_second],
    )
}

pub fn equicontinuity_lifts(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::rotation(GOLDEN).expect("valid angle");
    let sys = PointFlow::new(flow.clone());
    let (grid, _) = flow.space.sample_grid(16).expect("grid");
    let horizon = ctx.horizon().min(2000);

    let mut stable = 0;
    for x in &grid {
        if let (Some(_), _) = equicontinuity_at(&sys, x, 0.1, horizon, ctx.delta_grid()) {
            stable += 1;
        }
    }
    let base_leg = settled(
        "base-equicontinuous",
        stable == grid.len(),
        format!("all {} sampled states are stability points", grid.len()),
    );

    let trans = transitivity(&sys, &grid[0], 0.1, ctx.horizon(), &grid);
    let trans_leg = found(
        "point-transitive",
        trans.transitive,
        trans.verdict.note.clone(),
    );

    let esys = SampledElementFlow::iterates(
        flow.clone(),
        metric_for(&flow, 16),
        60,
        MetricMode::Weighted,
    );
    let sample: Vec<_> = esys.universe.iter().step_by(30).cloned().collect();
    let mut env_stable = 0;
    for e in &sample {
        if let (Some(_), _) = equicontinuity_at(&esys, e, 0.1, horizon, ctx.delta_grid()) {
            env_stable += 1;
        }
    }
    let env_leg = settled(
        "envelope-equicontinuous",
        env_stable == sample.len(),
        format!(
            "all {} sampled envelope elements are stability points",
            sample.len()
        ),
    );

    TheoremReport::settle(
        "equicontinuity-lifts",
        "an equicontinuous flow has an equicontinuous envelope, and back again when some orbit is dense",
        vec![flow.describe()],
        vec![base_leg, trans_leg],
        vec![env_leg],
    )
}

pub fn full_shift_not_weakly_rigid(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::full_shift(16).expect("valid window");
    let sys = PointFlow::new(flow.clone());
    let x = Point::Seq(SeqPoint::block(Fill::Zeros, &[1], 0));
    let rig = weak_rigidity(&sys, std::slice::from_ref(&x), 0.5, ctx.horizon());
    let apart_leg = settled(
        "marked-state-never-returns",
        rig.t.is_none() && rig.best_distance == 1.0,
        format!(
            "the single marked cell sits at distance one from itself at every nonzero |t| <= {}",
            ctx.horizon()
        ),
    );
    let conc = settled(
        "not-weakly-rigid",
        rig.t.is_none(),
        "a state that never recurs blocks every simultaneous return".into(),
    );
    TheoremReport::settle(
        "full-shift-not-weakly-rigid",
        "the full shift has non-recurrent states, so it is not weakly rigid",
        vec![flow.describe()],
        vec![apart_leg],
        vec![conc],
    )
}

pub fn levels_isomorphic(_ctx: &CheckContext) -> TheoremReport {
    let first = AnnulusSemigroup::new(GOLDEN);
    let ind = InducedAnnulusSemigroup::new(GOLDEN);
    let mut rng = seeded();
    let mut elems: Vec<AnnulusElement> = (-5..=5).map(AnnulusElement::Step).collect();
    for _ in 0..20 {
        elems.push(AnnulusElement::CenterCollapse(rng.gen()));
        elems.push(AnnulusElement::RimCollapse(rng.gen()));
    }

    let mut equivariant = true;
    let mut bad_t = 0i64;
    for t in -100..=100 {
        for e in &elems {
            let lhs = level_iso(&first.compose(&AnnulusElement::Step(t), e));
            let rhs = ind.compose(&ind.generator_power(t), &level_iso(e));
            if !lhs.close_to(&rhs) {
                equivariant = false;
                bad_t = t;
            }
        }
    }
    let equi_leg = settled(
        "generator-equivariance",
        equivariant,
        if equivariant {
            format!("{} elements agree at all |t| <= 100", elems.len())
        } else {
            format!("mismatch at t = {bad_t}")
        },
    );

    let mut multiplicative = true;
    for a in &elems {
        for b in &elems {
            let lhs = level_iso(&first.compose(a, b));
            let rhs = ind.compose(&level_iso(a), &level_iso(b));
            multiplicative &= lhs.close_to(&rhs);
        }
    }
    let mult_leg = settled(
        "composition-preserved",
        multiplicative,
        format!(
            "{} products carried across exactly",
            elems.len() * elems.len()
        ),
    );

    let mut bijective = true;
    for (i, a) in elems.iter().enumerate() {
        bijective &= level_iso_back(&level_iso(a)) == *a;
        for b in elems.iter().skip(i + 1) {
            if !a.close_to(b) {
                bijective &= !level_iso(a).close_to(&level_iso(b));
            }
        }
    }
    let bij_leg = settled(
        "bijective-on-elements",
        bijective,
        "round trip is the identity and distinct elements stay distinct".into(),
    );

    TheoremReport::settle(
        "levels-isomorphic",
        "the envelope flow and the second-level envelope flow are isomorphic; the annulus model realizes the isomorphism exactly",
        vec!["annulus(alpha=golden)".into()],
        vec![equi_leg, mult_leg],
        vec![bij_leg],
    )
}

pub fn proximal_envelope_lift(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::shift_pair(&[1], 16).expect("valid block");
    let sys = PointFlow::new(flow.clone());
    let zeros = Point::Seq(SeqPoint::constant(Fill::Zeros));
    let ones = Point::Seq(SeqPoint::constant(Fill::Ones));
    let rs = proximality(&sys, &zeros, &ones, 0.5, ctx.horizon());
    let base_leg = settled(
        "base-pair-never-close",
        rs.is_empty() && rs.min_value == 1.0,
        format!(
            "the two constant states stay at distance one through |t| <= {}",
            ctx.horizon()
        ),
    );

    let metric = shift_metric(&flow);
    let universe: Vec<ShiftElement> = [-20i64, -13, -7, -2, 0, 3, 8, 15, 20]
        .into_iter()
        .map(ShiftElement::Shift)
        .chain([ShiftElement::Flood])
        .collect();
    let esys = SymbolicElementFlow::new(
        ShiftSemigroup,
        metric,
        universe.clone(),
        MetricMode::Weighted,
    );
    let horizon = ctx.horizon().min(500);
    let mut all_hit = true;
    let mut slowest = 0i64;
    'outer: for (i, u) in universe.iter().enumerate() {
        for v in universe.iter().skip(i + 1) {
            for &eps in ctx.ladder() {
                let rs = proximality(&esys, u, v, eps, horizon);
                match rs.hits.iter().map(|t| t.abs()).min() {
                    Some(first) => slowest = slowest.max(first),
                    None => {
                        all_hit = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    let pairs = universe.len() * (universe.len() - 1) / 2;
    let env_leg = found(
        "envelope-pairs-proximal",
        all_hit,
        format!(
            "all {pairs} element pairs meet inside every ladder entourage; slowest first meeting at |t| = {slowest}"
        ),
    );

    TheoremReport::settle(
        "proximal-envelope-lift",
        "with commuting iterates a proximal flow has a proximal envelope; the converse needs a dense orbit, and this flow is the counterexample",
        vec![flow.describe()],
        vec![base_leg],
        vec![env_leg],
    )
}

pub fn proximal_three_ways(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::shift_pair(&[1], 16).expect("valid block");
    let metric = shift_metric(&flow);
    let universe: Vec<ShiftElement> = [-20i64, -9, -3, 0, 2, 7, 14, 20]
        .into_iter()
        .map(ShiftElement::Shift)
        .chain([ShiftElement::Flood])
        .collect();
    let esys = SymbolicElementFlow::new(
        ShiftSemigroup,
        metric,
        universe.clone(),
        MetricMode::Weighted,
    );
    let horizon = ctx.horizon().min(600);

    let mut all_hit = true;
    let mut gaps_ok = true;
    let mut worst_gap = 0i64;
    let mut empty_note = String::new();
    for (i, u) in universe.iter().enumerate() {
        for v in universe.iter().skip(i + 1) {
            for &eps in ctx.ladder() {
                let rs = proximality(&esys, u, v, eps, horizon);
                if rs.is_empty() {
                    all_hit = false;
                    empty_note = format!(
                        "pair ({}, {}) has no hit at epsilon {eps} within |t| <= {horizon}",
                        esys.label(u),
                        esys.label(v)
                    );
                } else {
                    let gaps = syndeticity(&rs, ctx.cfg.detect.gap_bound);
                    gaps_ok &= gaps.outcome == Outcome::Holds;
                    worst_gap = worst_gap.max(gaps.max_gap.unwrap_or(0));
                }
            }
        }
    }
    let pairs = universe.len() * (universe.len() - 1) / 2;
    let proximal_leg = found(
        "all-pairs-proximal",
        all_hit,
        if all_hit {
            format!("all {pairs} pairs meet inside every ladder entourage")
        } else {
            empty_note.clone()
        },
    );
    let syndetic_leg = if !all_hit {
        found("all-pairs-syndetically-proximal", false, empty_note)
    } else {
        settled(
            "all-pairs-syndetically-proximal",
            gaps_ok,
            format!(
                "return-time gaps stay within {} (worst {worst_gap})",
                ctx.cfg.detect.gap_bound
            ),
        )
    };

    let fixed = unique_minimal_fixed_point(&esys, &universe, 0.25, ctx.horizon().min(300));
    let mut fixed_leg = fixed.verdict.clone();
    if let Some(i) = fixed.index {
        fixed_leg.note = format!(
            "{}; fixed element is {}",
            fixed_leg.note,
            esys.label(&universe[i])
        );
    }

    TheoremReport::settle(
        "proximal-three-ways",
        "for commuting iterates these agree: every pair proximal, a unique minimal set that is one fixed state, every pair syndetically proximal",
        vec![format!("envelope elements of {}", flow.describe())],
        vec![proximal_leg],
        vec![fixed_leg, syndetic_leg],
    )
}

pub fn sensitive_envelope_weak_rigidity(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::torus_circle(SILVER, GOLDEN).expect("valid angles");
    let esys = skew_envelope_at_base(&flow, 300);
    let hyp = envelope_sensitivity_leg("envelope-sensitive", ctx, &esys, 15);

    let pts = [
        Point::torus_part(0.2, 0.0),
        Point::torus_part(0.2, 0.37),
        Point::torus_part(0.2, 0.81),
        Point::circle_part(0.5),
    ];
    let sys = PointFlow::new(flow.clone());
    let rig = weak_rigidity(&sys, &pts, 0.05, ctx.deep_horizon());
    let conc = match rig.t {
        Some(t) => found(
            "weakly-rigid",
            true,
            format!("all four states return within 0.05 at t = {t}"),
        ),
        None => found("weakly-rigid", false, rig.verdict.note.clone()),
    };

    TheoremReport::settle(
        "sensitive-envelope-weak-rigidity",
        "a flow whose envelope is sensitive is weakly rigid: the identity cannot be isolated",
        vec![flow.describe()],
        vec![hyp],
        vec![conc],
    )
}

pub fn sensitive_subsystem_envelope(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::torus_circle(SILVER, GOLDEN).expect("valid angles");
    let sys = PointFlow::new(flow.clone());
    let mut rng = seeded();
    let horizon = ctx.horizon().min(1000);

    let mut worst_ratio = f64::INFINITY;
    let mut all_empty = true;
    for i in 0..6 {
        let (x, y, bound) = match i {
            0..=2 => {
                let (a1, a2) = (rng.gen::<f64>(), rng.gen::<f64>());
                let (b1, b2) = (rng.gen::<f64>(), rng.gen::<f64>());
                let x = Point::torus_part(a1, b1);
                let y = Point::torus_part(a2, b2);
                let bound = if circle_dist(a1, a2) > 1e-3 {
                    circle_dist(a1, a2)
                } else {
                    flow.space.distance(&x, &y)
                };
                (x, y, bound)
            }
            3 => {
                let (a1, a2) = (rng.gen::<f64>(), rng.gen::<f64>());
                let x = Point::circle_part(a1);
                let y = Point::circle_part(a2);
                let bound = circle_dist(a1, a2);
                (x, y, bound)
            }
            _ => {
                let x = Point::torus_part(rng.gen(), rng.gen());
                let y = Point::circle_part(rng.gen());
                let bound = crate::space::PART_GAP;
                (x, y, bound)
            }
        };
        if bound < 1e-3 {
            continue;
        }
        let rs = proximality(&sys, &x, &y, 0.99 * bound, horizon);
        all_empty &= rs.is_empty();
        worst_ratio = worst_ratio.min(rs.min_value / bound);
    }
    let distal_leg = settled(
        "distal",
        all_empty,
        format!(
            "sampled pairs keep {worst_ratio:.3}x their separation bound through |t| <= {horizon}"
        ),
    );

    let part = torus_part_grid(&flow, 8);
    let trans = transitivity(&sys, &part[0], 0.15, ctx.horizon(), &part);
    let minimal_leg = found(
        "subsystem-minimal",
        trans.transitive,
        trans.verdict.note.clone(),
    );

    let sens = sensitivity(
        &sys,
        &part,
        horizon,
        ctx.ladder(),
        &ctx.cfg.detect.probe_radii,
    );
    let sens_leg = match sens.epsilon {
        Some(eps) => found(
            "subsystem-sensitive",
            eps >= 0.2,
            format!("every square-part state separates beyond {eps}"),
        ),
        None => found("subsystem-sensitive", false, sens.verdict.note.clone()),
    };

    let esys = skew_envelope_at_base(&flow, 300);
    let conc = envelope_sensitivity_leg("envelope-sensitive", ctx, &esys, 20);

    TheoremReport::settle(
        "sensitive-subsystem-envelope",
        "a distal flow with a minimal sensitive subsystem has a sensitive envelope; evaluation at a subsystem state carries the entourages over",
        vec![flow.describe()],
        vec![distal_leg, minimal_leg, sens_leg],
        vec![conc],
    )
}

pub fn sensitivity_lifts_from_factor(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::torus_circle(SILVER, GOLDEN).expect("valid angles");
    let sys = PointFlow::new(flow.clone());
    let esys = skew_envelope_at_base(&flow, 300);
    let part = torus_part_grid(&flow, 6);

    // evaluation at the base state maps sampled elements onto orbit points
    let mut covered = 0;
    for g in &part {
        let hit = esys
            .universe
            .iter()
            .any(|u| flow.space.distance(&u[0], g) < 0.15);
        if hit {
            covered += 1;
        }
    }
    let onto_leg = found(
        "factor-map-onto",
        covered == part.len(),
        format!(
            "base-state images cover {covered} of {} part states within 0.15",
            part.len()
        ),
    );

    let sens = sensitivity(
        &sys,
        &part,
        ctx.horizon().min(1000),
        ctx.ladder(),
        &ctx.cfg.detect.probe_radii,
    );
    let factor_leg = match sens.epsilon {
        Some(eps) => found(
            "factor-sensitive",
            true,
            format!("every part state separates beyond {eps}"),
        ),
        None => found("factor-sensitive", false, sens.verdict.note.clone()),
    };

    let lifted = envelope_sensitivity_leg("extension-sensitive", ctx, &esys, 15);

    TheoremReport::settle(
        "sensitivity-lifts-from-factor",
        "a flow that maps onto a sensitive factor without squashing opens is itself sensitive; the envelope over its base evaluation is the instance",
        vec![flow.describe()],
        vec![onto_leg, factor_leg],
        vec![lifted],
    )
}

pub fn shift_envelope_not_sensitive(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::full_shift(16).expect("valid window");
    let x = Point::Seq(SeqPoint::block(Fill::Zeros, &[1], 0));
    let grid = Grid::new(flow.space, vec![x]);
    let metric = FunctionMetric::uniform(grid);
    let (gap, _) = identity_gap(&flow, &metric, ctx.horizon()).expect("valid horizon");
    let hyp = settled(
        "identity-isolated",
        gap == 1.0,
        format!(
            "every nonzero iterate sits at distance {gap} from the identity on the marked state (|t| <= {})",
            ctx.horizon()
        ),
    );

    let esys = SampledElementFlow::iterates(flow.clone(), metric, 40, MetricMode::Weighted);
    let probes = esys.probes_near(&esys.identity_state(), 0.5);
    let conc = settled(
        "no-neighbors-to-separate",
        probes.is_empty(),
        "no sampled element lies within 0.5 of the identity, so no entourage separation can start there".into(),
    );

    TheoremReport::settle(
        "shift-envelope-not-sensitive",
        "the envelope of the full shift is not sensitive: the identity is an isolated state of it",
        vec![flow.describe()],
        vec![hyp],
        vec![conc],
    )
}

fn needed_depth(delta: f64) -> u32 {
    let k = (-(0.9 * delta).log2()).ceil() as i64;
    k.clamp(2, 20) as u32
}

pub fn stacked_circles_contrast(ctx: &CheckContext) -> TheoremReport {
    let eps = 0.25;
    let mut escapes = Vec::new();
    let mut all_escaped = true;
    let mut open_note = String::new();
    let mut deepest = 2;
    for &delta in ctx.delta_grid() {
        let depth = needed_depth(delta);
        deepest = deepest.max(depth);
        let flow = FlowSystem::stack(depth).expect("valid depth");
        let sys = PointFlow::new(flow.clone());
        let x = Point::stack(Ring::Outer, 0.0);
        let probes = sys.probes_near(&x, delta);
        let horizon = (1i64 << (depth + 2)).min(ctx.horizon().max(256));
        let mut escape: Option<i64> = None;
        let mut moved = probes.clone();
        'scan: for t in 1..=horizon {
            for p in moved.iter_mut() {
                *p = sys.advance(p);
                if sys.dist(&x, p) > eps {
                    escape = Some(t);
                    break 'scan;
                }
            }
        }
        match escape {
            Some(t) => escapes.push((delta, depth, t)),
            None => {
                all_escaped = false;
                open_note = format!(
                    "no probe within {delta} of the outer state escaped beyond {eps} within t <= {horizon} at depth {depth}"
                );
            }
        }
    }
    let slowest = escapes.iter().map(|(_, _, t)| *t).max().unwrap_or(0);
    let base_leg = found(
        "no-stability-radius",
        all_escaped,
        if all_escaped {
            format!(
                "at every probe radius down to {:.0e} a deeper ring escapes beyond {eps} (slowest at t = {slowest})",
                ctx.delta_grid().iter().copied().fold(f64::INFINITY, f64::min)
            )
        } else {
            open_note
        },
    );

    let flow = FlowSystem::stack(deepest).expect("valid depth");
    let od = OdometerSemigroup::new(deepest);
    let modulus = od.modulus();
    let esys = SymbolicElementFlow::new(od, metric_for(&flow, 2), Vec::new(), MetricMode::Weighted);
    let mut rng = seeded();
    let mut iso = true;
    for _ in 0..10 {
        let u = rng.gen_range(0..modulus);
        let v = rng.gen_range(0..modulus);
        let d0 = esys.dist(&u, &v);
        for t in [1i64, 5, -3, (modulus / 2) as i64] {
            let dt = esys.dist(&esys.apply(t, &u), &esys.apply(t, &v));
            iso &= (dt - d0).abs() <= 1e-9;
        }
    }
    let env_leg = settled(
        "envelope-isometric",
        iso,
        format!(
            "the element flow at depth {deepest} moves pairs isometrically, hence equicontinuously"
        ),
    );

    TheoremReport::settle(
        "stacked-circles-contrast",
        "the stacked circles lose every stability radius as probes reach deeper rings, yet the envelope flow stays equicontinuous",
        vec![format!("stack(depth=2..{deepest})")],
        vec![base_leg],
        vec![env_leg],
    )
}

pub fn syndetic_distality_lifts(ctx: &CheckContext) -> TheoremReport {
    let depth = ctx.stack_depth();
    let flow = FlowSystem::stack(depth).expect("valid depth");
    let base_leg = stack_separation_leg(
        "base-return-sets-empty",
        &flow,
        depth,
        8,
        0.5,
        ctx.horizon().min(2048),
    );
    let env_leg =
        odometer_separation_leg("envelope-return-sets-empty", depth, ctx.horizon().min(256));
    TheoremReport::settle(
        "syndetic-distality-lifts",
        "a syndetically distal flow has a syndetically distal envelope; empty approach sets on both levels witness it",
        vec![flow.describe()],
        vec![base_leg],
        vec![env_leg],
    )
}

pub fn syndetically_distal_not_proximal(ctx: &CheckContext) -> TheoremReport {
    let depth = ctx.stack_depth();
    let flow = FlowSystem::stack(depth).expect("valid depth");
    let hyp = odometer_separation_leg(
        "envelope-syndetically-distal",
        depth,
        ctx.horizon().min(256),
    );

    let sys = PointFlow::new(flow.clone());
    let x = Point::stack(Ring::Outer, 0.0);
    let y = Point::stack(Ring::Outer, 0.5);
    let horizon = ctx.horizon().min(512);
    let rs = proximality(&sys, &x, &y, 0.25, horizon);
    let conc = settled(
        "some-pair-never-close",
        rs.is_empty() && rs.min_value >= 0.5,
        format!(
            "two opposite outer states hold distance {} through |t| <= {horizon}",
            rs.min_value
        ),
    );

    TheoremReport::settle(
        "syndetically-distal-not-proximal",
        "a flow whose envelope is syndetically distal cannot be proximal",
        vec![flow.describe()],
        vec![hyp],
        vec![conc],
    )
}

pub fn thick_syndetic_returns(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::shift_pair(&[1], 16).expect("valid block");
    let metric = shift_metric(&flow);
    let esys = SymbolicElementFlow::new(ShiftSemigroup, metric, Vec::new(), MetricMode::Weighted);
    let pairs = [
        (ShiftElement::Shift(0), ShiftElement::Shift(3)),
        (ShiftElement::Shift(-7), ShiftElement::Shift(2)),
        (ShiftElement::Shift(5), ShiftElement::Flood),
        (ShiftElement::Shift(-2), ShiftElement::Flood),
    ];
    let horizon = ctx.horizon().min(600);
    let gap_bound = ctx.cfg.detect.gap_bound;
    let max_run = ctx.cfg.detect.max_run_length;

    let mut thick_ok = true;
    let mut agree = true;
    let mut short = None;
    for (u, v) in &pairs {
        for eps in [ctx.eps_big(), ctx.eps_small()] {
            let rs = proximality(&esys, u, v, eps, horizon);
            if rs.is_empty() || rs.run_starts(max_run).is_empty() {
                short = Some(format!(
                    "pair ({}, {}) shows no run of length {max_run} at epsilon {eps} within |t| <= {horizon}",
                    esys.label(u),
                    esys.label(v)
                ));
                continue;
            }
            for k in 1..=max_run {
                let gaps = thick_syndeticity(&rs, k, gap_bound);
                match gaps.outcome {
                    Outcome::Holds => {}
                    Outcome::Inconclusive => {
                        short = Some(gaps.note.clone());
                    }
                    Outcome::Fails => {
                        thick_ok = false;
                        short = Some(gaps.note.clone());
                    }
                }
            }
            let plain = syndeticity(&rs, gap_bound);
            let once = thick_syndeticity(&rs, 1, gap_bound);
            agree &= plain.outcome == once.outcome && plain.max_gap == once.max_gap;
        }
    }

    let thick_leg = match (&short, thick_ok) {
        (None, true) => settled(
            "returns-thickly-syndetic",
            true,
            format!(
                "runs of every length up to {max_run} recur with gaps within {gap_bound} for all sampled pairs"
            ),
        ),
        (Some(note), true) => found("returns-thickly-syndetic", false, note.clone()),
        (Some(note), false) => settled("returns-thickly-syndetic", false, note.clone()),
        (None, false) => unreachable!("failure always records a note"),
    };
    let agree_leg = settled(
        "run-length-one-is-syndeticity",
        agree,
        "thick syndeticity at run length one reproduces plain syndeticity".into(),
    );

    TheoremReport::settle(
        "thick-syndetic-returns",
        "a pair is syndetically proximal exactly when its entourage return times are thickly syndetic",
        vec![format!("envelope elements of {}", flow.describe())],
        vec![thick_leg],
        vec![agree_leg],
    )
}

pub fn transitive_dichotomy(ctx: &CheckContext) -> TheoremReport {
    // isometric horn
    let rot = FlowSystem::rotation(GOLDEN).expect("valid angle");
    let rsys = PointFlow::new(rot.clone());
    let (rgrid, _) = rot.space.sample_grid(16).expect("grid");
    let rtrans = transitivity(&rsys, &rgrid[0], 0.1, ctx.horizon(), &rgrid);
    let rot_trans = found(
        "rotation-transitive",
        rtrans.transitive,
        rtrans.verdict.note.clone(),
    );
    let mut stable = 0;
    for x in &rgrid {
        if let (Some(_), _) =
            equicontinuity_at(&rsys, x, 0.1, ctx.horizon().min(2000), ctx.delta_grid())
        {
            stable += 1;
        }
    }
    let rot_stable = settled(
        "rotation-almost-equicontinuous",
        stable == rgrid.len(),
        format!("all {} sampled states are stability points", rgrid.len()),
    );
    let rsens = sensitivity(
        &rsys,
        &rgrid,
        ctx.horizon().min(500),
        ctx.ladder(),
        &ctx.cfg.detect.probe_radii,
    );
    let rot_not_sens = settled(
        "rotation-never-separates",
        rsens.epsilon.is_none(),
        "an isometry keeps every probe at its initial distance".into(),
    );
    let second = transitivity(&rsys, &rgrid[5], 0.1, ctx.horizon(), &rgrid);
    let rot_eq_trans = found(
        "stability-points-are-transitive-points",
        rtrans.transitive && second.transitive,
        "orbit density holds from each sampled stability point".into(),
    );

    // sensitive horn
    let skew = FlowSystem::torus_circle(SILVER, GOLDEN).expect("valid angles");
    let ssys = PointFlow::new(skew.clone());
    let part = torus_part_grid(&skew, 8);
    let strans = transitivity(&ssys, &part[0], 0.15, ctx.horizon(), &part);
    let skew_trans = found(
        "skew-part-transitive",
        strans.transitive,
        strans.verdict.note.clone(),
    );
    let ssens = sensitivity(
        &ssys,
        &part,
        ctx.horizon().min(1000),
        ctx.ladder(),
        &ctx.cfg.detect.probe_radii,
    );
    let skew_sens = match ssens.epsilon {
        Some(eps) => found(
            "skew-part-sensitive",
            true,
            format!("every part state separates beyond {eps}"),
        ),
        None => found("skew-part-sensitive", false, ssens.verdict.note.clone()),
    };
    let mut escapes = 0;
    let mut stuck = String::new();
    for i in [0usize, 9, 27, 45] {
        let x = &part[i.min(part.len() - 1)];
        let (radius, v) =
            equicontinuity_at(&ssys, x, 0.25, ctx.horizon().min(8000), ctx.delta_grid());
        match radius {
            None => escapes += 1,
            Some(d) => stuck = format!("{} stayed stable at radius {d}: {}", ssys.label(x), v.note),
        }
    }
    let skew_unstable = found(
        "skew-part-no-stability-points",
        escapes == 4,
        if escapes == 4 {
            "every sampled state escapes at every probe radius".into()
        } else {
            stuck
        },
    );

    TheoremReport::settle(
        "transitive-dichotomy",
        "a point-transitive flow on a perfect space is almost equicontinuous with its transitive and stability points aligned, or sensitive; one instance realizes each horn",
        vec![rot.describe(), skew.describe()],
        vec![rot_trans, skew_trans],
        vec![rot_stable, rot_not_sens, rot_eq_trans, skew_sens, skew_unstable],
    )
}

pub fn uniform_rigidity_lifts(ctx: &CheckContext) -> TheoremReport {
    let flow = FlowSystem::rotation(GOLDEN).expect("valid angle");
    let sys = PointFlow::new(flow.clone());
    let (grid, _) = flow.space.sample_grid(16).expect("grid");
    let eps = 0.05;
    let xr = uniform_rigidity(&sys, &grid, eps, ctx.horizon());
    let base_leg = match xr.t {
        Some(t) => found(
            "base-uniformly-rigid",
            true,
            format!("uniform return within {eps} at t = {t}"),
        ),
        None => found("base-uniformly-rigid", false, xr.verdict.note.clone()),
    };

    let esys = SampledElementFlow::iterates(
        flow.clone(),
        metric_for(&flow, 16),
        60,
        MetricMode::Weighted,
    );
    let er = uniform_rigidity(&esys, &esys.universe, eps, ctx.horizon());
    let env_leg = match er.t {
        Some(t) => found(
            "envelope-uniformly-rigid",
            true,
            format!("all sampled elements return within {eps} at t = {t}"),
        ),
        None => found("envelope-uniformly-rigid", false, er.verdict.note.clone()),
    };
    let match_leg = match (xr.t, er.t) {
        (Some(a), Some(b)) => settled(
            "same-return-time",
            a == b,
            format!("base returns at t = {a}, envelope at t = {b}"),
        ),
        _ => found(
            "same-return-time",
            false,
            "needs a return time on both levels".into(),
        ),
    };

    TheoremReport::settle(
        "uniform-rigidity-lifts",
        "a uniformly rigid flow has a uniformly rigid envelope, and back again when some orbit is dense; the return times coincide",
        vec![flow.describe()],
        vec![base_leg],
        vec![env_leg, match_leg],
    )
}

pub fn weak_rigidity_both_levels(ctx: &CheckContext) -> TheoremReport {
    let depth = ctx.stack_depth();
    let flow = FlowSystem::stack(depth).expect("valid depth");
    let sys = PointFlow::new(flow.clone());
    let period = 1i64 << depth;
    let horizon = (period + 8).min(ctx.horizon().max(256));

    let points: Vec<Point> = (0..=depth)
        .map(|n| Point::stack(Ring::Level(n), 0.3))
        .chain([Point::stack(Ring::Outer, 0.3)])
        .collect();
    let xr = weak_rigidity(&sys, &points, 1e-6, horizon);
    let base_leg = match xr.t {
        Some(t) => settled(
            "base-simultaneous-return",
            t == period,
            format!("all rings return exactly at t = {t}; the full ring period is {period}"),
        ),
        None => found("base-simultaneous-return", false, xr.verdict.note.clone()),
    };

    let od = OdometerSemigroup::new(depth);
    let modulus = od.modulus();
    let esys = SymbolicElementFlow::new(od, metric_for(&flow, 4), Vec::new(), MetricMode::Weighted);
    let elems: Vec<u64> = [0, 1, 3, modulus / 2, modulus - 1]
        .into_iter()
        .map(|v: u64| v % modulus)
        .collect();
    let er = weak_rigidity(&esys, &elems, 1e-6, horizon);
    let env_leg = match er.t {
        Some(t) => settled(
            "envelope-simultaneous-return",
            t == period,
            format!("all sampled elements return exactly at t = {t}"),
        ),
        None => found(
            "envelope-simultaneous-return",
            false,
            er.verdict.note.clone(),
        ),
    };

    TheoremReport::settle(
        "weak-rigidity-both-levels",
        "a flow is weakly rigid exactly when its envelope flow is; on the stacked circles both recur at the full ring period",
        vec![flow.describe()],
        vec![base_leg],
        vec![env_leg],
    )
}

pub fn weak_rigidity_iff_dense_identity(ctx: &CheckContext) -> TheoremReport {
    let depth = ctx.stack_depth();
    let stack = FlowSystem::stack(depth).expect("valid depth");
    let period = 1i64 << depth;
    let horizon = (period + 8).min(ctx.horizon().max(256));

    let sys = PointFlow::new(stack.clone());
    let points = [
        Point::stack(Ring::Level(depth), 0.1),
        Point::stack(Ring::Level(depth.saturating_sub(1)), 0.6),
        Point::stack(Ring::Outer, 0.9),
    ];
    let xr = weak_rigidity(&sys, &points, 1e-6, horizon);
    let stack_rigid = match xr.t {
        Some(t) => settled(
            "stack-weakly-rigid",
            t == period,
            format!("simultaneous exact return at t = {t}"),
        ),
        None => found("stack-weakly-rigid", false, xr.verdict.note.clone()),
    };
    let (gap, at) = identity_gap(&stack, &metric_for(&stack, 4), horizon).expect("valid horizon");
    let stack_identity = if gap < FIXED_TOL {
        settled(
            "stack-identity-is-a-limit",
            true,
            format!("the identity recurs exactly at t = {at}"),
        )
    } else {
        found(
            "stack-identity-is-a-limit",
            false,
            format!("smallest identity gap {gap:.3e} at t = {at} within |t| <= {horizon}"),
        )
    };

    let shift = FlowSystem::full_shift(16).expect("valid window");
    let marked = Point::Seq(SeqPoint::block(Fill::Zeros, &[1], 0));
    let ssys = PointFlow::new(shift.clone());
    let sr = weak_rigidity(&ssys, std::slice::from_ref(&marked), 0.5, ctx.horizon());
    let shift_rigid = settled(
        "shift-not-weakly-rigid",
        sr.t.is_none() && sr.best_distance == 1.0,
        format!(
            "the marked state never returns within 0.5 through |t| <= {}",
            ctx.horizon()
        ),
    );
    let sgrid = Grid::new(shift.space, vec![marked]);
    let smetric = FunctionMetric::uniform(sgrid);
    let (sgap, _) = identity_gap(&shift, &smetric, ctx.horizon()).expect("valid horizon");
    let shift_identity = settled(
        "shift-identity-isolated",
        sgap == 1.0,
        format!(
            "no nonzero iterate comes within {sgap} of the identity (|t| <= {})",
            ctx.horizon()
        ),
    );

    TheoremReport::settle(
        "weak-rigidity-iff-dense-identity",
        "a flow is weakly rigid exactly when the identity is not isolated in its envelope; the stack witnesses the positive reading, the full shift the negative",
        vec![stack.describe(), shift.describe()],
        vec![stack_rigid, shift_rigid],
        vec![stack_identity, shift_identity],
    )
}
