//! One interface over the states the detectors probe: points of a flow,
//! sampled self-maps moved by post-composition, and exact semigroup
//! elements. Detectors walk orbits one step at a time, so scan cost per
//! time unit stays flat even for flows without a closed-form iterate.

use crate::envelope::{ApproxSemigroup, MapImages};
use crate::flow::FlowSystem;
use crate::fnspace::FunctionMetric;
use crate::space::Point;
use crate::symbolic::{
    AnnulusElement, AnnulusSemigroup, OdometerSemigroup, ShiftElement, ShiftSemigroup,
};

/// How a function-space system measures the gap between two maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricMode {
    /// Weighted average over the whole sample grid.
    Weighted,
    /// Pseudo-metric reading a single grid coordinate.
    AtBase(usize),
}

/// A state space with an invertible time step, a metric, and a supply of
/// nearby states to probe with.
pub trait System {
    type State: Clone;

    fn advance(&self, s: &Self::State) -> Self::State;

    fn retreat(&self, s: &Self::State) -> Self::State;

    /// Iterate from scratch; witnesses are replayed through this.
    fn apply(&self, t: i64, s: &Self::State) -> Self::State;

    fn dist(&self, a: &Self::State, b: &Self::State) -> f64;

    /// Candidate neighbors at distance in (0, delta) of `s`. May be empty
    /// when the sampled state space simply has no neighbor that close.
    fn probes_near(&self, s: &Self::State, delta: f64) -> Vec<Self::State>;

    fn label(&self, s: &Self::State) -> String;

    fn describe(&self) -> String;
}

/// The flow itself, acting on points.
#[derive(Debug, Clone)]
pub struct PointFlow {
    pub flow: FlowSystem,
}

impl PointFlow {
    pub fn new(flow: FlowSystem) -> PointFlow {
        PointFlow { flow }
    }
}

impl System for PointFlow {
    type State = Point;

    fn advance(&self, s: &Point) -> Point {
        self.flow.advance(s)
    }

    fn retreat(&self, s: &Point) -> Point {
        self.flow.retreat(s)
    }

    fn apply(&self, t: i64, s: &Point) -> Point {
        self.flow.apply(t, s)
    }

    fn dist(&self, a: &Point, b: &Point) -> f64 {
        self.flow.space.distance(a, b)
    }

    fn probes_near(&self, s: &Point, delta: f64) -> Vec<Point> {
        self.flow
            .space
            .probes_near(s, delta)
            .into_iter()
            .filter(|p| {
                let d = self.flow.space.distance(p, s);
                d > 0.0 && d < delta
            })
            .collect()
    }

    fn label(&self, s: &Point) -> String {
        s.describe()
    }

    fn describe(&self) -> String {
        self.flow.describe()
    }
}

/// The flow induced on sampled self-maps: t sends p to the map obtained by
/// pushing every image of p forward t steps. States are image tuples over
/// the metric's grid; the probe pool is a fixed universe of such maps.
#[derive(Debug, Clone)]
pub struct SampledElementFlow {
    pub flow: FlowSystem,
    pub metric: FunctionMetric,
    pub universe: Vec<MapImages>,
    pub names: Vec<String>,
    pub mode: MetricMode,
}

impl SampledElementFlow {
    pub fn new(
        flow: FlowSystem,
        metric: FunctionMetric,
        universe: Vec<MapImages>,
        names: Vec<String>,
        mode: MetricMode,
    ) -> SampledElementFlow {
        assert_eq!(universe.len(), names.len());
        SampledElementFlow {
            flow,
            metric,
            universe,
            names,
            mode,
        }
    }

    /// Universe of iterate maps for |t| <= reach, labeled by time.
    pub fn iterates(
        flow: FlowSystem,
        metric: FunctionMetric,
        reach: i64,
        mode: MetricMode,
    ) -> SampledElementFlow {
        let identity: MapImages = metric.grid().points.clone();
        let mut back = Vec::new();
        let mut bwd = identity.clone();
        for _ in 0..reach {
            bwd = bwd.iter().map(|p| flow.retreat(p)).collect();
            back.push(bwd.clone());
        }
        back.reverse();
        let mut universe = back;
        universe.push(identity.clone());
        let mut fwd = identity;
        for _ in 0..reach {
            fwd = fwd.iter().map(|p| flow.advance(p)).collect();
            universe.push(fwd.clone());
        }
        let names = (-reach..=reach).map(|t| format!("iterate({t})")).collect();
        SampledElementFlow::new(flow, metric, universe, names, mode)
    }

    /// Universe of net representatives, labeled by first hit time.
    pub fn from_net(sg: &ApproxSemigroup, mode: MetricMode) -> SampledElementFlow {
        let universe: Vec<MapImages> = sg.reps().iter().map(|r| r.value.clone()).collect();
        let names = sg
            .reps()
            .iter()
            .map(|r| format!("cluster(t={})", r.first_time))
            .collect();
        SampledElementFlow::new(sg.flow.clone(), sg.metric.clone(), universe, names, mode)
    }

    pub fn identity_state(&self) -> MapImages {
        self.metric.grid().points.clone()
    }
}

impl System for SampledElementFlow {
    type State = MapImages;

    fn advance(&self, s: &MapImages) -> MapImages {
        s.iter().map(|p| self.flow.advance(p)).collect()
    }

    fn retreat(&self, s: &MapImages) -> MapImages {
        s.iter().map(|p| self.flow.retreat(p)).collect()
    }

    fn apply(&self, t: i64, s: &MapImages) -> MapImages {
        s.iter().map(|p| self.flow.apply(t, p)).collect()
    }

    fn dist(&self, a: &MapImages, b: &MapImages) -> f64 {
        match self.mode {
            MetricMode::Weighted => self.metric.distance(a, b),
            MetricMode::AtBase(i) => self.metric.grid().space.distance(&a[i], &b[i]),
        }
    }

    fn probes_near(&self, s: &MapImages, delta: f64) -> Vec<MapImages> {
        self.universe
            .iter()
            .filter(|u| {
                let d = self.dist(u, s);
                d > 0.0 && d < delta
            })
            .cloned()
            .collect()
    }

    fn label(&self, s: &MapImages) -> String {
        for (u, name) in self.universe.iter().zip(&self.names) {
            if self.metric.distance(u, s) <= 1e-12 {
                return name.clone();
            }
        }
        format!(
            "map({} -> {})",
            self.metric.grid().points[0].describe(),
            s[0].describe()
        )
    }

    fn describe(&self) -> String {
        format!("sampled envelope of {}", self.flow.describe())
    }
}

/// An exact semigroup whose elements the generator moves by left
/// composition. Supplies evaluation and a printable name per element.
pub trait ElementAlgebra {
    type Elem: Clone + PartialEq;

    /// The generator power t composed onto e.
    fn act(&self, t: i64, e: &Self::Elem) -> Self::Elem;

    fn eval(&self, e: &Self::Elem, x: &Point) -> Point;

    fn label(&self, e: &Self::Elem) -> String;

    fn name(&self) -> String;
}

impl ElementAlgebra for AnnulusSemigroup {
    type Elem = AnnulusElement;

    fn act(&self, t: i64, e: &AnnulusElement) -> AnnulusElement {
        self.compose(&AnnulusElement::Step(t), e)
    }

    fn eval(&self, e: &AnnulusElement, x: &Point) -> Point {
        AnnulusSemigroup::eval(self, e, x)
    }

    fn label(&self, e: &AnnulusElement) -> String {
        e.describe()
    }

    fn name(&self) -> String {
        "annulus limit algebra".into()
    }
}

impl ElementAlgebra for OdometerSemigroup {
    type Elem = u64;

    fn act(&self, t: i64, e: &u64) -> u64 {
        self.compose(self.element_of_power(t), *e)
    }

    fn eval(&self, e: &u64, x: &Point) -> Point {
        OdometerSemigroup::eval(self, *e, x)
    }

    fn label(&self, e: &u64) -> String {
        format!("add({e})")
    }

    fn name(&self) -> String {
        "odometer".into()
    }
}

impl ElementAlgebra for ShiftSemigroup {
    type Elem = ShiftElement;

    fn act(&self, t: i64, e: &ShiftElement) -> ShiftElement {
        self.compose(&ShiftElement::Shift(t), e)
    }

    fn eval(&self, e: &ShiftElement, x: &Point) -> Point {
        ShiftSemigroup::eval(self, e, x)
    }

    fn label(&self, e: &ShiftElement) -> String {
        e.describe()
    }

    fn name(&self) -> String {
        "shift limit algebra".into()
    }
}

/// The flow induced on an exact semigroup. Distances are measured by
/// evaluating elements over the metric's grid, so the topology matches the
/// sampled function space on the same grid.
#[derive(Debug, Clone)]
pub struct SymbolicElementFlow<A: ElementAlgebra> {
    pub algebra: A,
    pub metric: FunctionMetric,
    pub universe: Vec<A::Elem>,
    pub mode: MetricMode,
}

impl<A: ElementAlgebra> SymbolicElementFlow<A> {
    pub fn new(
        algebra: A,
        metric: FunctionMetric,
        universe: Vec<A::Elem>,
        mode: MetricMode,
    ) -> SymbolicElementFlow<A> {
        SymbolicElementFlow {
            algebra,
            metric,
            universe,
            mode,
        }
    }

    pub fn images(&self, e: &A::Elem) -> MapImages {
        self.metric
            .grid()
            .points
            .iter()
            .map(|p| self.algebra.eval(e, p))
            .collect()
    }
}

impl<A: ElementAlgebra> System for SymbolicElementFlow<A> {
    type State = A::Elem;

    fn advance(&self, s: &A::Elem) -> A::Elem {
        self.algebra.act(1, s)
    }

    fn retreat(&self, s: &A::Elem) -> A::Elem {
        self.algebra.act(-1, s)
    }

    fn apply(&self, t: i64, s: &A::Elem) -> A::Elem {
        self.algebra.act(t, s)
    }

    fn dist(&self, a: &A::Elem, b: &A::Elem) -> f64 {
        let ia = self.images(a);
        let ib = self.images(b);
        match self.mode {
            MetricMode::Weighted => self.metric.distance(&ia, &ib),
            MetricMode::AtBase(i) => self.metric.grid().space.distance(&ia[i], &ib[i]),
        }
    }

    fn probes_near(&self, s: &A::Elem, delta: f64) -> Vec<A::Elem> {
        self.universe
            .iter()
            .filter(|u| {
                let d = self.dist(u, s);
                d > 0.0 && d < delta
            })
            .cloned()
            .collect()
    }

    fn label(&self, s: &A::Elem) -> String {
        self.algebra.label(s)
    }

    fn describe(&self) -> String {
        format!("induced flow on {}", self.algebra.name())
    }
}
