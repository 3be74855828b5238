//! Property detectors with explicit resource budgets. Every verdict is a
//! bounded claim: tolerances, horizons, and grid sizes ride along in the
//! result, positive findings carry witnesses that replay through
//! `System::apply`, and an exhausted scan is reported as such instead of
//! being rounded to a yes or a no.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::system::System;

/// A point is treated as fixed when one step moves it less than this.
pub const FIXED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

/// A replayable measurement: apply(t) to both endpoints and re-measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub left: String,
    pub right: String,
    pub t: i64,
    pub distance: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    pub outcome: Outcome,
    pub note: String,
    pub witnesses: Vec<Witness>,
    pub params: BTreeMap<String, f64>,
}

impl Verdict {
    pub fn new(property: &str, outcome: Outcome, note: String) -> Verdict {
        Verdict {
            property: property.to_string(),
            outcome,
            note,
            witnesses: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Verdict {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn witness(mut self, w: Witness) -> Verdict {
        self.witnesses.push(w);
        self
    }

    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

/// Measure a moving pair at time t from the original states.
pub fn witness_pair<S: System>(
    sys: &S,
    t: i64,
    a: &S::State,
    b: &S::State,
    epsilon: f64,
) -> Witness {
    let ia = sys.apply(t, a);
    let ib = sys.apply(t, b);
    Witness {
        left: sys.label(a),
        right: sys.label(b),
        t,
        distance: sys.dist(&ia, &ib),
        epsilon,
    }
}

/// Measure a moving state against a stationary target at time t.
pub fn witness_approach<S: System>(
    sys: &S,
    t: i64,
    moving: &S::State,
    target: &S::State,
    epsilon: f64,
) -> Witness {
    let im = sys.apply(t, moving);
    Witness {
        left: sys.label(moving),
        right: sys.label(target),
        t,
        distance: sys.dist(&im, target),
        epsilon,
    }
}

/// The times within a symmetric window at which a pair fell inside an
/// entourage, together with the best margin seen over the whole scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReturnSet {
    pub description: String,
    pub epsilon: f64,
    pub horizon: i64,
    pub hits: Vec<i64>,
    pub min_value: f64,
}

impl ReturnSet {
    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    /// Largest gap between consecutive hits; None with fewer than two hits.
    pub fn max_gap(&self) -> Option<i64> {
        self.hits.windows(2).map(|w| w[1] - w[0]).max()
    }

    /// Distance from the window edges to the outermost hits.
    pub fn edge_gaps(&self) -> Option<(i64, i64)> {
        let first = *self.hits.first()?;
        let last = *self.hits.last()?;
        Some((first + self.horizon, self.horizon - last))
    }

    /// Times t with the whole block [t, t+k-1] inside the hit set.
    pub fn run_starts(&self, k: i64) -> Vec<i64> {
        if k <= 1 {
            return self.hits.clone();
        }
        let mut out = Vec::new();
        let mut run_from = 0usize;
        for i in 0..self.hits.len() {
            if i > 0 && self.hits[i] != self.hits[i - 1] + 1 {
                run_from = i;
            }
            if self.hits[i] - self.hits[run_from] >= k - 1 {
                out.push(self.hits[i] - (k - 1));
            }
        }
        out
    }
}

/// All times |t| <= horizon at which the pair orbit enters the epsilon
/// entourage. The scan walks both directions step by step.
pub fn proximality<S: System>(
    sys: &S,
    x: &S::State,
    y: &S::State,
    epsilon: f64,
    horizon: i64,
) -> ReturnSet {
    let mut min_value = sys.dist(x, y);
    let mut pos: Vec<i64> = Vec::new();
    let mut neg: Vec<i64> = Vec::new();
    if min_value < epsilon {
        pos.push(0);
    }
    let (mut fx, mut fy) = (x.clone(), y.clone());
    let (mut bx, mut by) = (x.clone(), y.clone());
    for m in 1..=horizon {
        fx = sys.advance(&fx);
        fy = sys.advance(&fy);
        let df = sys.dist(&fx, &fy);
        min_value = min_value.min(df);
        if df < epsilon {
            pos.push(m);
        }
        bx = sys.retreat(&bx);
        by = sys.retreat(&by);
        let db = sys.dist(&bx, &by);
        min_value = min_value.min(db);
        if db < epsilon {
            neg.push(-m);
        }
    }
    neg.reverse();
    neg.extend(pos);
    ReturnSet {
        description: format!(
            "d({}, {}) < {epsilon} under {}",
            sys.label(x),
            sys.label(y),
            sys.describe()
        ),
        epsilon,
        horizon,
        hits: neg,
        min_value,
    }
}

/// Gap analysis of a return set: bounded gaps, run structure, edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReport {
    pub outcome: Outcome,
    pub gap_bound: i64,
    pub run_length: i64,
    pub max_gap: Option<i64>,
    pub edge_gaps: Option<(i64, i64)>,
    pub runs: usize,
    pub note: String,
}

/// Bounded gaps between hits. Edge gaps are reported, not counted.
pub fn syndeticity(rs: &ReturnSet, gap_bound: i64) -> GapReport {
    thick_syndeticity(rs, 1, gap_bound)
}

/// Bounded gaps between the start times of length-k runs of hits.
pub fn thick_syndeticity(rs: &ReturnSet, run_length: i64, gap_bound: i64) -> GapReport {
    let window = 2 * rs.horizon + 1;
    if window < run_length {
        return GapReport {
            outcome: Outcome::Inconclusive,
            gap_bound,
            run_length,
            max_gap: None,
            edge_gaps: rs.edge_gaps(),
            runs: 0,
            note: format!("window of {window} times cannot hold a run of {run_length}"),
        };
    }
    if rs.is_empty() {
        return GapReport {
            outcome: Outcome::Fails,
            gap_bound,
            run_length,
            max_gap: None,
            edge_gaps: None,
            runs: 0,
            note: "empty return set".into(),
        };
    }
    let starts = rs.run_starts(run_length);
    if starts.is_empty() {
        return GapReport {
            outcome: Outcome::Fails,
            gap_bound,
            run_length,
            max_gap: None,
            edge_gaps: rs.edge_gaps(),
            runs: 0,
            note: format!("no run of length {run_length} in the scanned window"),
        };
    }
    let max_gap = starts.windows(2).map(|w| w[1] - w[0]).max();
    let ok = max_gap.is_none_or(|g| g <= gap_bound);
    GapReport {
        outcome: if ok { Outcome::Holds } else { Outcome::Fails },
        gap_bound,
        run_length,
        max_gap,
        edge_gaps: rs.edge_gaps(),
        runs: starts.len(),
        note: if ok {
            format!("{} run starts, gaps within {gap_bound}", starts.len())
        } else {
            format!("gap {} exceeds bound {gap_bound}", max_gap.unwrap())
        },
    }
}

/// Largest delta from the grid whose whole probe ball tracks x within
/// epsilon for every |t| <= horizon.
pub fn equicontinuity_at<S: System>(
    sys: &S,
    x: &S::State,
    epsilon: f64,
    horizon: i64,
    delta_grid: &[f64],
) -> (Option<f64>, Verdict) {
    let mut deltas: Vec<f64> = delta_grid.to_vec();
    deltas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut failures: Vec<Witness> = Vec::new();
    for &delta in &deltas {
        let probes = sys.probes_near(x, delta);
        match stable_through(sys, x, &probes, epsilon, horizon) {
            None => {
                let empty = probes.is_empty();
                let note = if empty {
                    format!(
                        "no probe exists within {delta} of {}; stability is vacuous at this resolution",
                        sys.label(x)
                    )
                } else {
                    format!(
                        "{} probes within {delta} of {} stayed {epsilon}-close through |t| <= {horizon}",
                        probes.len(),
                        sys.label(x)
                    )
                };
                let mut v = Verdict::new("equicontinuity-point", Outcome::Holds, note)
                    .with("epsilon", epsilon)
                    .with("delta", delta)
                    .with("horizon", horizon as f64)
                    .with("probes", probes.len() as f64);
                for w in failures {
                    v = v.witness(w);
                }
                return (Some(delta), v);
            }
            Some((i, t)) => {
                failures.push(witness_pair(sys, t, x, &probes[i], epsilon));
            }
        }
    }
    let mut v = Verdict::new(
        "equicontinuity-point",
        Outcome::Fails,
        format!(
            "every delta down to {} lets a probe escape epsilon = {epsilon}",
            deltas.last().copied().unwrap_or(f64::NAN)
        ),
    )
    .with("epsilon", epsilon)
    .with("horizon", horizon as f64);
    for w in failures {
        v = v.witness(w);
    }
    (None, v)
}

/// Scan the probe bundle along the orbit of x; Some((probe, t)) names the
/// first escape in scan order, None means everything stayed close.
fn stable_through<S: System>(
    sys: &S,
    x: &S::State,
    probes: &[S::State],
    epsilon: f64,
    horizon: i64,
) -> Option<(usize, i64)> {
    for (i, p) in probes.iter().enumerate() {
        if sys.dist(x, p) > epsilon {
            return Some((i, 0));
        }
    }
    let mut fwd: Vec<S::State> = probes.to_vec();
    let mut back: Vec<S::State> = probes.to_vec();
    let mut fx = x.clone();
    let mut bx = x.clone();
    for m in 1..=horizon {
        fx = sys.advance(&fx);
        for (i, p) in fwd.iter_mut().enumerate() {
            *p = sys.advance(p);
            if sys.dist(&fx, p) > epsilon {
                return Some((i, m));
            }
        }
        bx = sys.retreat(&bx);
        for (i, p) in back.iter_mut().enumerate() {
            *p = sys.retreat(p);
            if sys.dist(&bx, p) > epsilon {
                return Some((i, -m));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub epsilon: Option<f64>,
    pub witnesses: Vec<Witness>,
    pub verdict: Verdict,
}

/// Largest candidate epsilon such that every grid state, probed at every
/// listed radius, has some neighbor that separates beyond epsilon within
/// the horizon. One witness per grid state is kept (from the smallest
/// radius, the binding one).
pub fn sensitivity<S: System>(
    sys: &S,
    grid: &[S::State],
    horizon: i64,
    epsilon_candidates: &[f64],
    probe_radii: &[f64],
) -> SensitivityReport {
    let mut candidates: Vec<f64> = epsilon_candidates.to_vec();
    candidates.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut radii: Vec<f64> = probe_radii.to_vec();
    radii.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut blocker = String::new();
    for &eps in &candidates {
        let mut witnesses: Vec<Witness> = Vec::with_capacity(grid.len());
        let mut all_ok = true;
        'grid: for x in grid {
            let mut found: Option<Witness> = None;
            for &delta in &radii {
                let probes = sys.probes_near(x, delta);
                match separation_time(sys, x, &probes, eps, horizon) {
                    Some((i, t)) => {
                        found = Some(witness_pair(sys, t, x, &probes[i], eps));
                    }
                    None => {
                        blocker = format!(
                            "at epsilon {eps}: no separation from {} within radius {delta} (probes: {})",
                            sys.label(x),
                            probes.len()
                        );
                        all_ok = false;
                        break 'grid;
                    }
                }
            }
            witnesses.push(found.expect("nonempty radius list"));
        }
        if all_ok {
            let verdict = Verdict::new(
                "sensitivity",
                Outcome::Holds,
                format!(
                    "every one of {} grid states separates beyond {eps} at every probe radius",
                    grid.len()
                ),
            )
            .with("epsilon", eps)
            .with("horizon", horizon as f64)
            .with("grid", grid.len() as f64);
            return SensitivityReport {
                epsilon: Some(eps),
                witnesses,
                verdict,
            };
        }
    }
    SensitivityReport {
        epsilon: None,
        witnesses: Vec::new(),
        verdict: Verdict::new("sensitivity", Outcome::Fails, blocker)
            .with("horizon", horizon as f64)
            .with("grid", grid.len() as f64),
    }
}

/// First (probe, time) in scan order at which some probe leaves the
/// epsilon entourage of x's orbit; None when none ever does.
fn separation_time<S: System>(
    sys: &S,
    x: &S::State,
    probes: &[S::State],
    epsilon: f64,
    horizon: i64,
) -> Option<(usize, i64)> {
    if probes.is_empty() {
        return None;
    }
    for (i, p) in probes.iter().enumerate() {
        if sys.dist(x, p) > epsilon {
            return Some((i, 0));
        }
    }
    let mut fwd: Vec<S::State> = probes.to_vec();
    let mut back: Vec<S::State> = probes.to_vec();
    let mut fx = x.clone();
    let mut bx = x.clone();
    for m in 1..=horizon {
        fx = sys.advance(&fx);
        for (i, p) in fwd.iter_mut().enumerate() {
            *p = sys.advance(p);
            if sys.dist(&fx, p) > epsilon {
                return Some((i, m));
            }
        }
        bx = sys.retreat(&bx);
        for (i, p) in back.iter_mut().enumerate() {
            *p = sys.retreat(p);
            if sys.dist(&bx, p) > epsilon {
                return Some((i, -m));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityReport {
    pub t: Option<i64>,
    pub best_distance: f64,
    pub best_t: i64,
    pub verdict: Verdict,
}

/// Smallest |t| >= 1 (positive first at equal magnitude) at which every
/// listed state returns within epsilon of itself simultaneously.
pub fn weak_rigidity<S: System>(
    sys: &S,
    points: &[S::State],
    epsilon: f64,
    horizon: i64,
) -> RigidityReport {
    simultaneous_return(sys, points, epsilon, horizon, "weak-rigidity")
}

/// Same scan as weak rigidity, but the state list is expected to cover the
/// space at its sampling density, so a hit is a uniform return.
pub fn uniform_rigidity<S: System>(
    sys: &S,
    grid: &[S::State],
    epsilon: f64,
    horizon: i64,
) -> RigidityReport {
    simultaneous_return(sys, grid, epsilon, horizon, "uniform-rigidity")
}

fn simultaneous_return<S: System>(
    sys: &S,
    points: &[S::State],
    epsilon: f64,
    horizon: i64,
    property: &str,
) -> RigidityReport {
    assert!(!points.is_empty(), "rigidity needs at least one state");
    let mut fwd: Vec<S::State> = points.to_vec();
    let mut back: Vec<S::State> = points.to_vec();
    let mut best = f64::INFINITY;
    let mut best_t = 0i64;
    let check = |moved: &[S::State], t: i64, best: &mut f64, best_t: &mut i64| -> bool {
        let mut worst = 0.0f64;
        for (p, q) in moved.iter().zip(points) {
            worst = worst.max(sys.dist(p, q));
            if worst >= *best && worst >= epsilon {
                break;
            }
        }
        if worst < *best {
            *best = worst;
            *best_t = t;
        }
        worst < epsilon
    };
    for m in 1..=horizon {
        for p in fwd.iter_mut() {
            *p = sys.advance(p);
        }
        if check(&fwd, m, &mut best, &mut best_t) {
            return rigidity_found(sys, points, m, best, property, epsilon, horizon);
        }
        for p in back.iter_mut() {
            *p = sys.retreat(p);
        }
        if check(&back, -m, &mut best, &mut best_t) {
            return rigidity_found(sys, points, -m, best, property, epsilon, horizon);
        }
    }
    let verdict = Verdict::new(
        property,
        Outcome::Fails,
        format!(
            "no simultaneous return within |t| <= {horizon}; best max-displacement {best} at t = {best_t}"
        ),
    )
    .with("epsilon", epsilon)
    .with("horizon", horizon as f64)
    .with("points", points.len() as f64);
    RigidityReport {
        t: None,
        best_distance: best,
        best_t,
        verdict,
    }
}

fn rigidity_found<S: System>(
    sys: &S,
    points: &[S::State],
    t: i64,
    best: f64,
    property: &str,
    epsilon: f64,
    horizon: i64,
) -> RigidityReport {
    // replay the worst mover as the certificate
    let mut worst_w: Option<Witness> = None;
    for p in points {
        let w = witness_approach(sys, t, p, p, epsilon);
        if worst_w.as_ref().is_none_or(|b| w.distance > b.distance) {
            worst_w = Some(w);
        }
    }
    let w = worst_w.expect("nonempty state list");
    let verdict = Verdict::new(
        property,
        Outcome::Holds,
        format!(
            "all {} states return within {epsilon} at t = {t}; worst displacement {}",
            points.len(),
            w.distance
        ),
    )
    .with("epsilon", epsilon)
    .with("horizon", horizon as f64)
    .with("points", points.len() as f64)
    .witness(w);
    RigidityReport {
        t: Some(t),
        best_distance: best,
        best_t: t,
        verdict,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub transitive: bool,
    pub coverage: f64,
    pub verdict: Verdict,
}

/// Does the scanned orbit of x pass within epsilon of every grid state?
pub fn transitivity<S: System>(
    sys: &S,
    x: &S::State,
    epsilon: f64,
    horizon: i64,
    grid: &[S::State],
) -> TransitivityReport {
    assert!(!grid.is_empty());
    let mut best: Vec<(f64, i64)> = grid.iter().map(|g| (sys.dist(x, g), 0)).collect();
    let mut missing = best.iter().filter(|(d, _)| *d >= epsilon).count();
    let mut fwd = x.clone();
    let mut back = x.clone();
    let update = |state: &S::State, t: i64, best: &mut Vec<(f64, i64)>, missing: &mut usize| {
        for (g, slot) in grid.iter().zip(best.iter_mut()) {
            let d = sys.dist(state, g);
            if d < slot.0 {
                if slot.0 >= epsilon && d < epsilon {
                    *missing -= 1;
                }
                *slot = (d, t);
            }
        }
    };
    for m in 1..=horizon {
        if missing == 0 {
            break;
        }
        fwd = sys.advance(&fwd);
        update(&fwd, m, &mut best, &mut missing);
        back = sys.retreat(&back);
        update(&back, -m, &mut best, &mut missing);
    }
    let covered = grid.len() - missing;
    let coverage = covered as f64 / grid.len() as f64;
    let verdict = if missing == 0 {
        Verdict::new(
            "transitivity",
            Outcome::Holds,
            format!("orbit meets all {} grid states within {epsilon}", grid.len()),
        )
    } else {
        let (i, (d, t)) = best
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
            .map(|(i, s)| (i, *s))
            .unwrap();
        Verdict::new(
            "transitivity",
            Outcome::Fails,
            format!(
                "{missing} of {} grid states never approached; farthest is {} at distance {d} (closest at t = {t})",
                grid.len(),
                sys.label(&grid[i])
            ),
        )
    }
    .with("epsilon", epsilon)
    .with("horizon", horizon as f64)
    .with("grid", grid.len() as f64)
    .with("coverage", coverage);
    TransitivityReport {
        transitive: missing == 0,
        coverage,
        verdict,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub index: Option<usize>,
    pub verdict: Verdict,
}

/// Searches the grid for a state fixed by one step, then checks that every
/// grid orbit visits its epsilon ball. Two fixed states refute uniqueness
/// outright; an orbit that never arrives within the horizon leaves the
/// question open.
pub fn unique_minimal_fixed_point<S: System>(
    sys: &S,
    grid: &[S::State],
    epsilon: f64,
    horizon: i64,
) -> FixedPointReport {
    let fixed: Vec<usize> = (0..grid.len())
        .filter(|&i| sys.dist(&sys.advance(&grid[i]), &grid[i]) < FIXED_TOL)
        .collect();
    let base = Verdict::new("unique-minimal-fixed-point", Outcome::Fails, String::new())
        .with("epsilon", epsilon)
        .with("horizon", horizon as f64)
        .with("grid", grid.len() as f64);
    if fixed.is_empty() {
        let mut v = base;
        v.note = "no fixed state in the grid".into();
        return FixedPointReport {
            index: None,
            verdict: v,
        };
    }
    if fixed.len() > 1 {
        let mut v = base;
        v.note = format!("{} fixed states found; uniqueness fails", fixed.len());
        for &i in fixed.iter().take(4) {
            v = v.witness(witness_approach(sys, 1, &grid[i], &grid[i], FIXED_TOL));
        }
        return FixedPointReport {
            index: None,
            verdict: v,
        };
    }
    let p = &grid[fixed[0]];
    let mut worst_entry: (i64, f64, usize) = (0, 0.0, fixed[0]);
    for (i, g) in grid.iter().enumerate() {
        match approach_time(sys, g, p, epsilon, horizon) {
            Some(t) => {
                if t.abs() > worst_entry.0.abs() {
                    let d = sys.dist(&sys.apply(t, g), p);
                    worst_entry = (t, d, i);
                }
            }
            None => {
                let mut v = base;
                v.outcome = Outcome::Inconclusive;
                v.note = format!(
                    "orbit of {} did not enter the {epsilon}-ball of {} within |t| <= {horizon}",
                    sys.label(g),
                    sys.label(p)
                );
                return FixedPointReport {
                    index: None,
                    verdict: v,
                };
            }
        }
    }
    let mut v = base;
    v.outcome = Outcome::Holds;
    v.note = format!(
        "unique fixed state {}; every grid orbit enters its {epsilon}-ball, slowest by |t| = {}",
        sys.label(p),
        worst_entry.0.abs()
    );
    v = v.witness(witness_approach(
        sys,
        worst_entry.0,
        &grid[worst_entry.2],
        p,
        epsilon,
    ));
    FixedPointReport {
        index: Some(fixed[0]),
        verdict: v,
    }
}

/// First time (smallest |t|, positive first) the orbit of x enters the
/// epsilon ball of the target.
fn approach_time<S: System>(
    sys: &S,
    x: &S::State,
    target: &S::State,
    epsilon: f64,
    horizon: i64,
) -> Option<i64> {
    if sys.dist(x, target) < epsilon {
        return Some(0);
    }
    let mut fwd = x.clone();
    let mut back = x.clone();
    for m in 1..=horizon {
        fwd = sys.advance(&fwd);
        if sys.dist(&fwd, target) < epsilon {
            return Some(m);
        }
        back = sys.retreat(&back);
        if sys.dist(&back, target) < epsilon {
            return Some(-m);
        }
    }
    None
}
