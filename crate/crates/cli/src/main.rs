//! Config-driven front end. Loads an experiment config (or the defaults),
//! applies flag overrides, runs one of the five entry points, and writes
//! plot-ready CSV plus deterministic JSON next to a one-line summary on
//! stdout. Only `theorems` can exit nonzero without an error: a failed
//! check is a failed run.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use envelab::config::{parse_config, AngleValue, ExperimentConfig, FlowName};
use envelab::detect::{
    equicontinuity_at, proximality, sensitivity, thick_syndeticity, transitivity, uniform_rigidity,
    unique_minimal_fixed_point, weak_rigidity, Outcome, ReturnSet, Verdict,
};
use envelab::envelope::{
    approximate_semigroup, classify_annulus_rep, classify_shift_rep, classify_stack_rep,
    ApproxSemigroup, NetParams,
};
use envelab::flow::{Direction, FlowKind};
use envelab::fnspace::{FunctionMetric, Grid};
use envelab::report::{canonical_json, matrix_csv, orbit_csv, return_set_csv};
use envelab::symbolic::{AnnulusSemigroup, OdometerSemigroup};
use envelab::system::PointFlow;
use envelab::theorems::{check_ids, render_suite_text, run_suite, SuiteReport};

#[derive(Debug, Parser)]
#[command(name = "envelab", version)]
#[command(about = "laboratory for enveloping semigroups: orbits, iterate nets, detectors, checks")]
struct Cli {
    /// Experiment config (TOML). Command flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory. Defaults to $ENVELAB_OUT, then the current one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterate a flow from a grid point and write the orbit as CSV
    Simulate {
        #[command(flatten)]
        flow: FlowArgs,

        /// Iterations per scan direction.
        #[arg(long)]
        horizon: Option<i64>,

        /// Scan direction; forward alone by default.
        #[arg(long, value_enum)]
        direction: Option<DirChoice>,

        /// Index into the sample grid to start from.
        #[arg(long, default_value_t = 0)]
        point_index: usize,

        /// Sample grid resolution the start point is drawn from.
        #[arg(long)]
        resolution: Option<u32>,
    },

    /// Cluster the iterates into an epsilon-net and tag each limit map
    Semigroup {
        #[command(flatten)]
        flow: FlowArgs,

        /// Cluster radius in the grid metric.
        #[arg(long)]
        epsilon: Option<f64>,

        /// Iterations per scan direction.
        #[arg(long)]
        horizon: Option<i64>,

        /// Scan direction; both by default.
        #[arg(long, value_enum)]
        direction: Option<DirChoice>,

        /// Observation grid resolution.
        #[arg(long)]
        resolution: Option<u32>,
    },

    /// Run one detector against the configured flow
    Detect {
        #[command(flatten)]
        flow: FlowArgs,

        /// Question to ask.
        #[arg(long, value_enum, default_value = "proximality")]
        detector: DetectorChoice,

        /// Entourage radius; the largest ladder entry by default.
        #[arg(long)]
        epsilon: Option<f64>,

        /// Iterations per scan direction.
        #[arg(long)]
        horizon: Option<i64>,

        /// Observation grid resolution.
        #[arg(long)]
        resolution: Option<u32>,

        /// Grid indices of the probe pair for the pair detectors.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        pair: Option<Vec<usize>>,
    },

    /// Run the structural checks and write the consolidated report
    Theorems {
        /// Run every registered check, ignoring any selection in the config.
        #[arg(long, conflicts_with = "ids")]
        all: bool,

        /// Run only this check; repeatable.
        #[arg(long = "id")]
        ids: Vec<String>,

        /// Worker threads; the report is identical for any count.
        #[arg(long)]
        workers: Option<usize>,

        /// Print the registered check ids and exit.
        #[arg(long)]
        list: bool,
    },

    /// Re-render a stored check report as the text table
    Report {
        /// Path to a JSON report produced by `theorems`.
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
struct FlowArgs {
    /// Flow to build.
    #[arg(long, value_enum)]
    flow: Option<FlowChoice>,

    /// Circle rotation angle, a decimal in (0,1).
    #[arg(long, conflicts_with = "alpha_preset")]
    alpha: Option<f64>,

    /// Named rotation angle.
    #[arg(long, value_enum)]
    alpha_preset: Option<Preset>,

    /// Torus drift angle, a decimal in (0,1).
    #[arg(long, conflicts_with = "mu_preset")]
    mu: Option<f64>,

    /// Named torus drift angle.
    #[arg(long, value_enum)]
    mu_preset: Option<Preset>,

    /// Stacked-circles truncation depth.
    #[arg(long)]
    depth: Option<u32>,

    /// Marked block for the shift pair, written as 0/1 digits.
    #[arg(long)]
    block: Option<String>,

    /// Observation window radius for shift spaces.
    #[arg(long)]
    window: Option<u32>,
}

impl FlowArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(f) = self.flow {
            cfg.flow.kind = f.into();
        }
        if let Some(a) = self.alpha {
            cfg.flow.alpha = AngleValue::Number(a);
        }
        if let Some(p) = self.alpha_preset {
            cfg.flow.alpha = AngleValue::Named(p.name().into());
        }
        if let Some(m) = self.mu {
            cfg.flow.mu = AngleValue::Number(m);
        }
        if let Some(p) = self.mu_preset {
            cfg.flow.mu = AngleValue::Named(p.name().into());
        }
        if let Some(d) = self.depth {
            cfg.flow.depth = d;
        }
        if let Some(b) = &self.block {
            cfg.flow.block = parse_block(b)?;
        }
        if let Some(w) = self.window {
            cfg.flow.window = w;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FlowChoice {
    Rotation,
    Identity,
    Stack,
    Annulus,
    TorusCircle,
    ShiftPair,
    FullShift,
}

impl From<FlowChoice> for FlowName {
    fn from(c: FlowChoice) -> FlowName {
        match c {
            FlowChoice::Rotation => FlowName::Rotation,
            FlowChoice::Identity => FlowName::Identity,
            FlowChoice::Stack => FlowName::Stack,
            FlowChoice::Annulus => FlowName::Annulus,
            FlowChoice::TorusCircle => FlowName::TorusCircle,
            FlowChoice::ShiftPair => FlowName::ShiftPair,
            FlowChoice::FullShift => FlowName::FullShift,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    Golden,
    Silver,
}

impl Preset {
    fn name(self) -> &'static str {
        match self {
            Preset::Golden => "golden",
            Preset::Silver => "silver",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirChoice {
    Forward,
    Backward,
    Both,
}

impl From<DirChoice> for Direction {
    fn from(c: DirChoice) -> Direction {
        match c {
            DirChoice::Forward => Direction::Forward,
            DirChoice::Backward => Direction::Backward,
            DirChoice::Both => Direction::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectorChoice {
    Proximality,
    Syndeticity,
    ThickSyndeticity,
    Equicontinuity,
    Sensitivity,
    WeakRigidity,
    UniformRigidity,
    Transitivity,
    FixedPoint,
}

impl DetectorChoice {
    fn property(self) -> &'static str {
        match self {
            DetectorChoice::Proximality => "proximality",
            DetectorChoice::Syndeticity => "syndeticity",
            DetectorChoice::ThickSyndeticity => "thick-syndeticity",
            DetectorChoice::Equicontinuity => "equicontinuity",
            DetectorChoice::Sensitivity => "sensitivity",
            DetectorChoice::WeakRigidity => "weak-rigidity",
            DetectorChoice::UniformRigidity => "uniform-rigidity",
            DetectorChoice::Transitivity => "transitivity",
            DetectorChoice::FixedPoint => "unique-minimal-fixed-point",
        }
    }
}

fn parse_block(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(anyhow!("block must be 0/1 digits, found '{other}'")),
        })
        .collect()
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            parse_config(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    let out = out_dir(cli.out)?;
    match cli.command {
        Command::Simulate {
            flow,
            horizon,
            direction,
            point_index,
            resolution,
        } => cmd_simulate(
            cfg,
            &out,
            &flow,
            horizon,
            direction,
            point_index,
            resolution,
        ),
        Command::Semigroup {
            flow,
            epsilon,
            horizon,
            direction,
            resolution,
        } => cmd_semigroup(cfg, &out, &flow, epsilon, horizon, direction, resolution),
        Command::Detect {
            flow,
            detector,
            epsilon,
            horizon,
            resolution,
            pair,
        } => cmd_detect(
            cfg, &out, &flow, detector, epsilon, horizon, resolution, pair,
        ),
        Command::Theorems {
            all,
            ids,
            workers,
            list,
        } => cmd_theorems(cfg, &out, all, ids, workers, list),
        Command::Report { input } => cmd_report(&input),
    }
}

fn out_dir(flag: Option<PathBuf>) -> Result<PathBuf> {
    let dir = flag
        .or_else(|| std::env::var_os("ENVELAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir)
}

fn write_out(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::Holds => "holds",
        Outcome::Fails => "FAILS",
        Outcome::Inconclusive => "open",
    }
}

fn cmd_simulate(
    mut cfg: ExperimentConfig,
    out: &Path,
    flow_args: &FlowArgs,
    horizon: Option<i64>,
    direction: Option<DirChoice>,
    point_index: usize,
    resolution: Option<u32>,
) -> Result<ExitCode> {
    flow_args.apply(&mut cfg)?;
    if let Some(h) = horizon {
        cfg.detect.horizon = h;
    }
    if let Some(r) = resolution {
        cfg.detect.resolution = r;
    }
    cfg.validate()?;
    let flow = cfg.flow.build()?;
    let dir = direction.map(Direction::from).unwrap_or(Direction::Forward);
    let (grid, _) = flow.sample_grid(cfg.detect.resolution)?;
    let Some(start) = grid.get(point_index) else {
        bail!(
            "point index {point_index} is outside the {} point grid",
            grid.len()
        );
    };
    let rows = flow.orbit(start, cfg.detect.horizon, dir)?;
    let path = write_out(out, "orbit.csv", &orbit_csv(&rows))?;
    println!(
        "{}: {} rows of {}",
        path.display(),
        rows.len(),
        flow.describe()
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct RepSummary {
    index: usize,
    first_time: i64,
    hits: usize,
    witnesses: Vec<i64>,
    tag: String,
    deviation: Option<f64>,
}

#[derive(Serialize)]
struct SemigroupReport {
    schema: u32,
    flow: String,
    epsilon: f64,
    horizon: i64,
    direction: Direction,
    grid_points: usize,
    scanned: usize,
    reps: Vec<RepSummary>,
    config: ExperimentConfig,
}

fn cmd_semigroup(
    mut cfg: ExperimentConfig,
    out: &Path,
    flow_args: &FlowArgs,
    epsilon: Option<f64>,
    horizon: Option<i64>,
    direction: Option<DirChoice>,
    resolution: Option<u32>,
) -> Result<ExitCode> {
    flow_args.apply(&mut cfg)?;
    if let Some(e) = epsilon {
        cfg.net.epsilon = e;
    }
    if let Some(h) = horizon {
        cfg.net.horizon = h;
    }
    if let Some(d) = direction {
        cfg.net.direction = d.into();
    }
    if let Some(r) = resolution {
        cfg.net.resolution = r;
    }
    cfg.validate()?;
    let flow = cfg.flow.build()?;
    let (pts, _) = flow.sample_grid(cfg.net.resolution)?;
    let metric = FunctionMetric::standard(Grid::new(flow.space, pts));
    let params = NetParams::new(cfg.net.epsilon, cfg.net.horizon, cfg.net.direction);
    let sg = approximate_semigroup(&flow, metric, params)?;

    let tags = tag_reps(&sg);
    let reps: Vec<RepSummary> = sg
        .net
        .reps
        .iter()
        .zip(tags)
        .enumerate()
        .map(|(index, (rep, (tag, deviation)))| RepSummary {
            index,
            first_time: rep.first_time,
            hits: rep.hits,
            witnesses: rep.witnesses.clone(),
            tag,
            deviation,
        })
        .collect();
    let n = sg.net.reps.len();
    let mut matrix = vec![vec![0.0f64; n]; n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sg
                .metric
                .distance(&sg.net.reps[i].value, &sg.net.reps[j].value);
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }

    let report = SemigroupReport {
        schema: cfg.schema,
        flow: flow.describe(),
        epsilon: cfg.net.epsilon,
        horizon: cfg.net.horizon,
        direction: cfg.net.direction,
        grid_points: sg.metric.grid().len(),
        scanned: sg.net.scanned,
        reps,
        config: cfg.clone(),
    };
    let json_path = write_out(out, "semigroup.json", &canonical_json(&report)?)?;
    let csv_path = write_out(out, "semigroup_distances.csv", &matrix_csv(&matrix))?;
    println!(
        "{}: {} representatives from {} scanned iterates of {} ({})",
        json_path.display(),
        n,
        sg.net.scanned,
        flow.describe(),
        csv_path.display(),
    );
    Ok(ExitCode::SUCCESS)
}

/// Label each representative with the exact element it sits near, where the
/// flow has an exact model; otherwise with the iterate that opened it.
fn tag_reps(sg: &ApproxSemigroup) -> Vec<(String, Option<f64>)> {
    let grid = sg.metric.grid();
    match &sg.flow.kind {
        FlowKind::Annulus { alpha } => {
            let model = AnnulusSemigroup::new(*alpha);
            sg.net
                .reps
                .iter()
                .map(|rep| {
                    let (class, dev) = classify_annulus_rep(&model, grid, rep, 0.05);
                    (class.element().describe(), Some(dev))
                })
                .collect()
        }
        FlowKind::Stack { depth } => {
            let model = OdometerSemigroup::new(*depth);
            sg.net
                .reps
                .iter()
                .map(|rep| match classify_stack_rep(&model, grid, rep) {
                    Ok((value, dev)) => (format!("odometer({value})"), Some(dev)),
                    Err(_) => ("unresolved".to_string(), None),
                })
                .collect()
        }
        FlowKind::ShiftPair { .. } | FlowKind::FullShift { .. } => sg
            .net
            .reps
            .iter()
            .map(|rep| match classify_shift_rep(grid, rep, 1e-9) {
                Some((elem, dev)) => (elem.describe(), Some(dev)),
                None => ("unresolved".to_string(), None),
            })
            .collect(),
        _ => sg
            .net
            .reps
            .iter()
            .map(|rep| (format!("iterate({})", rep.first_time), None))
            .collect(),
    }
}

#[derive(Serialize)]
struct DetectReport {
    schema: u32,
    flow: String,
    detector: String,
    epsilon: f64,
    horizon: i64,
    pair: Option<(usize, usize)>,
    verdict: Verdict,
    detail: serde_json::Value,
    config: ExperimentConfig,
}

#[allow(clippy::too_many_arguments)]
fn cmd_detect(
    mut cfg: ExperimentConfig,
    out: &Path,
    flow_args: &FlowArgs,
    detector: DetectorChoice,
    epsilon: Option<f64>,
    horizon: Option<i64>,
    resolution: Option<u32>,
    pair: Option<Vec<usize>>,
) -> Result<ExitCode> {
    flow_args.apply(&mut cfg)?;
    if let Some(h) = horizon {
        cfg.detect.horizon = h;
    }
    if let Some(r) = resolution {
        cfg.detect.resolution = r;
    }
    cfg.validate()?;
    let eps = epsilon.unwrap_or_else(|| {
        cfg.detect
            .epsilon_ladder
            .iter()
            .copied()
            .fold(0.0, f64::max)
    });
    if !(eps > 0.0 && eps.is_finite()) {
        bail!("epsilon must be a positive finite number");
    }
    let flow = cfg.flow.build()?;
    let sys = PointFlow::new(flow.clone());
    let horizon = cfg.detect.horizon;
    let (grid, _) = flow.sample_grid(cfg.detect.resolution)?;

    let pair_detector = matches!(
        detector,
        DetectorChoice::Proximality
            | DetectorChoice::Syndeticity
            | DetectorChoice::ThickSyndeticity
    );
    let indices = if pair_detector {
        Some(pair_indices(pair, grid.len())?)
    } else {
        None
    };

    let mut returns: Option<ReturnSet> = None;
    let (verdict, detail) = match detector {
        DetectorChoice::Proximality => {
            let (i, j) = indices.unwrap();
            let rs = proximality(&sys, &grid[i], &grid[j], eps, horizon);
            let outcome = if rs.is_empty() {
                Outcome::Fails
            } else {
                Outcome::Holds
            };
            let note = format!(
                "{} hits over |t| <= {horizon}, closest approach {:.6}",
                rs.hits.len(),
                rs.min_value,
            );
            let detail = serde_json::to_value(&rs)?;
            returns = Some(rs);
            (Verdict::new(detector.property(), outcome, note), detail)
        }
        DetectorChoice::Syndeticity | DetectorChoice::ThickSyndeticity => {
            let (i, j) = indices.unwrap();
            let rs = proximality(&sys, &grid[i], &grid[j], eps, horizon);
            let run = if detector == DetectorChoice::ThickSyndeticity {
                cfg.detect.max_run_length
            } else {
                1
            };
            let gaps = thick_syndeticity(&rs, run, cfg.detect.gap_bound);
            let verdict = Verdict::new(detector.property(), gaps.outcome, gaps.note.clone());
            let detail = serde_json::to_value(&gaps)?;
            returns = Some(rs);
            (verdict, detail)
        }
        DetectorChoice::Equicontinuity => {
            let (delta, verdict) =
                equicontinuity_at(&sys, &grid[0], eps, horizon, &cfg.detect.delta_grid);
            let detail = serde_json::json!({ "delta": delta, "verdict": verdict });
            (verdict, detail)
        }
        DetectorChoice::Sensitivity => {
            let ladder = match epsilon {
                Some(e) => vec![e],
                None => cfg.detect.epsilon_ladder.clone(),
            };
            let rep = sensitivity(&sys, &grid, horizon, &ladder, &cfg.detect.probe_radii);
            (rep.verdict.clone(), serde_json::to_value(&rep)?)
        }
        DetectorChoice::WeakRigidity => {
            let pts: Vec<_> = grid.iter().take(3).cloned().collect();
            let rep = weak_rigidity(&sys, &pts, eps, horizon);
            (rep.verdict.clone(), serde_json::to_value(&rep)?)
        }
        DetectorChoice::UniformRigidity => {
            let rep = uniform_rigidity(&sys, &grid, eps, horizon);
            (rep.verdict.clone(), serde_json::to_value(&rep)?)
        }
        DetectorChoice::Transitivity => {
            let rep = transitivity(&sys, &grid[0], eps, horizon, &grid);
            (rep.verdict.clone(), serde_json::to_value(&rep)?)
        }
        DetectorChoice::FixedPoint => {
            let rep = unique_minimal_fixed_point(&sys, &grid, eps, horizon);
            (rep.verdict.clone(), serde_json::to_value(&rep)?)
        }
    };

    let report = DetectReport {
        schema: cfg.schema,
        flow: flow.describe(),
        detector: detector.property().to_string(),
        epsilon: eps,
        horizon,
        pair: indices,
        verdict: verdict.clone(),
        detail,
        config: cfg.clone(),
    };
    let json_path = write_out(out, "detect.json", &canonical_json(&report)?)?;
    let mut extra = String::new();
    if let Some(rs) = &returns {
        let csv_path = write_out(out, "returns.csv", &return_set_csv(rs))?;
        extra = format!(" ({})", csv_path.display());
    }
    println!(
        "{}: {} {} on {}: {}{extra}",
        json_path.display(),
        verdict.property,
        outcome_label(verdict.outcome),
        flow.describe(),
        verdict.note,
    );
    Ok(ExitCode::SUCCESS)
}

fn pair_indices(pair: Option<Vec<usize>>, len: usize) -> Result<(usize, usize)> {
    let (i, j) = match pair {
        Some(v) => (v[0], v[1]),
        None => (0, len / 2),
    };
    if i >= len || j >= len {
        bail!("pair indices ({i}, {j}) outside the {len} point grid");
    }
    Ok((i, j))
}

fn cmd_theorems(
    mut cfg: ExperimentConfig,
    out: &Path,
    all: bool,
    ids: Vec<String>,
    workers: Option<usize>,
    list: bool,
) -> Result<ExitCode> {
    if list {
        for id in check_ids() {
            println!("{id}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    if let Some(w) = workers {
        cfg.workers = w;
    }
    if !ids.is_empty() {
        cfg.checks.select = ids;
    } else if all {
        cfg.checks.select = Vec::new();
    }
    cfg.validate()?;
    let suite = run_suite(&cfg)?;
    let text = render_suite_text(&suite);
    write_out(out, "theorems.json", &canonical_json(&suite)?)?;
    write_out(out, "theorems.txt", &text)?;
    print!("{text}");
    if suite.failed > 0 {
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(input: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let suite: SuiteReport =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
    print!("{}", render_suite_text(&suite));
    Ok(ExitCode::SUCCESS)
}
