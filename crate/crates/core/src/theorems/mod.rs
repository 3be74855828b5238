//! Structural statements about envelope flows, rendered executable. Each
//! check instantiates concrete systems, gathers detector verdicts for the
//! statement's hypotheses and conclusions, and settles a single outcome.
//!
//! Outcome discipline: a leg that needed to find something and ran out of
//! horizon stays open (inconclusive); a leg only fails on a concrete
//! counter-witness. A check therefore never fails just because the scan
//! budget was small.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::detect::{Outcome, Verdict};
use crate::error::{Error, Result};

mod checks;

/// Shared inputs for every check: the experiment configuration, read-only.
pub struct CheckContext {
    pub cfg: ExperimentConfig,
}

impl CheckContext {
    pub fn new(cfg: ExperimentConfig) -> CheckContext {
        CheckContext { cfg }
    }

    fn horizon(&self) -> i64 {
        self.cfg.detect.horizon
    }

    fn deep_horizon(&self) -> i64 {
        self.cfg.checks.deep_horizon
    }

    fn stack_depth(&self) -> u32 {
        self.cfg.checks.stack_depth
    }

    fn ladder(&self) -> &[f64] {
        &self.cfg.detect.epsilon_ladder
    }

    fn delta_grid(&self) -> &[f64] {
        &self.cfg.detect.delta_grid
    }

    fn eps_small(&self) -> f64 {
        self.ladder().iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn eps_big(&self) -> f64 {
        self.ladder().iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremReport {
    pub id: String,
    pub claim: String,
    pub instances: Vec<String>,
    pub hypotheses: Vec<Verdict>,
    pub conclusions: Vec<Verdict>,
    pub outcome: Outcome,
    pub note: String,
}

impl TheoremReport {
    /// Fold leg outcomes: any failing leg refutes the rendering, any open
    /// leg leaves it open, otherwise it holds.
    pub fn settle(
        id: &str,
        claim: &str,
        instances: Vec<String>,
        hypotheses: Vec<Verdict>,
        conclusions: Vec<Verdict>,
    ) -> TheoremReport {
        let legs = hypotheses.iter().chain(conclusions.iter());
        let mut outcome = Outcome::Holds;
        let mut note = format!("all {} legs hold", hypotheses.len() + conclusions.len());
        let mut open: Option<&Verdict> = None;
        for leg in legs {
            match leg.outcome {
                Outcome::Fails => {
                    outcome = Outcome::Fails;
                    note = format!("leg {} failed: {}", leg.property, leg.note);
                    break;
                }
                Outcome::Inconclusive => open = open.or(Some(leg)),
                Outcome::Holds => {}
            }
        }
        if outcome == Outcome::Holds {
            if let Some(leg) = open {
                outcome = Outcome::Inconclusive;
                note = format!("leg {} is open: {}", leg.property, leg.note);
            }
        }
        TheoremReport {
            id: id.to_string(),
            claim: claim.to_string(),
            instances,
            hypotheses,
            conclusions,
            outcome,
            note,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub config: ExperimentConfig,
    pub checks: Vec<TheoremReport>,
    pub passed: usize,
    pub failed: usize,
    pub open: usize,
}

type CheckFn = fn(&CheckContext) -> TheoremReport;

/// Registry of all checks, kept in id order.
const REGISTRY: &[(&str, CheckFn)] = &[
    (
        "almost-equi-uniformly-rigid",
        checks::almost_equi_uniformly_rigid,
    ),
    ("annulus-exact-model", checks::annulus_exact_model),
    (
        "distal-iff-envelope-distal",
        checks::distal_iff_envelope_distal,
    ),
    ("distal-stable-envelope", checks::distal_stable_envelope),
    (
        "envelope-group-both-levels",
        checks::envelope_group_both_levels,
    ),
    ("equicontinuity-lifts", checks::equicontinuity_lifts),
    (
        "full-shift-not-weakly-rigid",
        checks::full_shift_not_weakly_rigid,
    ),
    ("levels-isomorphic", checks::levels_isomorphic),
    ("proximal-envelope-lift", checks::proximal_envelope_lift),
    ("proximal-three-ways", checks::proximal_three_ways),
    (
        "sensitive-envelope-weak-rigidity",
        checks::sensitive_envelope_weak_rigidity,
    ),
    (
        "sensitive-subsystem-envelope",
        checks::sensitive_subsystem_envelope,
    ),
    (
        "sensitivity-lifts-from-factor",
        checks::sensitivity_lifts_from_factor,
    ),
    (
        "shift-envelope-not-sensitive",
        checks::shift_envelope_not_sensitive,
    ),
    ("stacked-circles-contrast", checks::stacked_circles_contrast),
    ("syndetic-distality-lifts", checks::syndetic_distality_lifts),
    (
        "syndetically-distal-not-proximal",
        checks::syndetically_distal_not_proximal,
    ),
    ("thick-syndetic-returns", checks::thick_syndetic_returns),
    ("transitive-dichotomy", checks::transitive_dichotomy),
    ("uniform-rigidity-lifts", checks::uniform_rigidity_lifts),
    (
        "weak-rigidity-both-levels",
        checks::weak_rigidity_both_levels,
    ),
    (
        "weak-rigidity-iff-dense-identity",
        checks::weak_rigidity_iff_dense_identity,
    ),
];

pub fn check_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|(id, _)| *id).collect()
}

pub fn run_check(id: &str, ctx: &CheckContext) -> Result<TheoremReport> {
    match REGISTRY.iter().find(|(name, _)| *name == id) {
        Some((_, f)) => Ok(f(ctx)),
        None => Err(Error::UnknownTheorem(id.to_string())),
    }
}

/// Run the selected checks (all when the selection is empty) on a worker
/// pool of the configured size. Checks are pure functions of the config, so
/// the assembled report is identical for any worker count.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let selected: Vec<(&str, CheckFn)> = if cfg.checks.select.is_empty() {
        REGISTRY.to_vec()
    } else {
        let mut picked = Vec::new();
        for id in &cfg.checks.select {
            match REGISTRY.iter().find(|(name, _)| name == id) {
                Some(entry) => picked.push(*entry),
                None => return Err(Error::UnknownTheorem(id.clone())),
            }
        }
        picked
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let ctx = CheckContext::new(cfg.clone());
    let mut checks: Vec<TheoremReport> =
        pool.install(|| selected.par_iter().map(|(_, f)| f(&ctx)).collect());
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = checks
        .iter()
        .filter(|c| c.outcome == Outcome::Holds)
        .count();
    let failed = checks
        .iter()
        .filter(|c| c.outcome == Outcome::Fails)
        .count();
    let open = checks.len() - passed - failed;
    // the thread count never changes the result; normalize the echo so
    // reports from different pools stay byte-identical
    let mut echoed = cfg.clone();
    echoed.workers = 1;
    Ok(SuiteReport {
        schema: cfg.schema,
        config: echoed,
        checks,
        passed,
        failed,
        open,
    })
}

/// Fixed-width text table for terminals; one row per check.
pub fn render_suite_text(suite: &SuiteReport) -> String {
    let mut out = String::new();
    let id_width = suite
        .checks
        .iter()
        .map(|c| c.id.len())
        .max()
        .unwrap_or(8)
        .max(8);
    for check in &suite.checks {
        let outcome = match check.outcome {
            Outcome::Holds => "holds",
            Outcome::Fails => "FAILS",
            Outcome::Inconclusive => "open",
        };
        out.push_str(&format!(
            "{:<id_width$}  {:<6}  {}\n",
            check.id, outcome, check.note
        ));
    }
    out.push_str(&format!(
        "{} checks: {} hold, {} fail, {} open\n",
        suite.checks.len(),
        suite.passed,
        suite.failed,
        suite.open
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_and_ids_are_unique() {
        let ids = check_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(ids, sorted);
        assert_eq!(ids.len(), 22);
    }

    #[test]
    fn unknown_id_is_rejected() {
        let ctx = CheckContext::new(ExperimentConfig::default());
        let err = run_check("no-such-check", &ctx).unwrap_err();
        assert!(matches!(err, Error::UnknownTheorem(_)));

        let mut cfg = ExperimentConfig::default();
        cfg.checks.select = vec!["also-missing".into()];
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn every_check_reports_under_its_registry_id() {
        let mut cfg = ExperimentConfig::default();
        // shrink the scans: this test only exercises wiring
        cfg.detect.horizon = 10;
        cfg.checks.deep_horizon = 10;
        cfg.checks.stack_depth = 3;
        let ctx = CheckContext::new(cfg);
        for id in check_ids() {
            let report = run_check(id, &ctx).unwrap();
            assert_eq!(report.id, id);
            assert!(!report.claim.is_empty());
            assert!(
                report.outcome != Outcome::Fails,
                "{id} fails at a tiny horizon: {}",
                report.note
            );
        }
    }

    #[test]
    fn worker_count_does_not_change_the_suite() {
        let mut cfg = ExperimentConfig::default();
        cfg.detect.horizon = 50;
        cfg.checks.deep_horizon = 50;
        cfg.checks.stack_depth = 3;
        cfg.checks.select = vec![
            "full-shift-not-weakly-rigid".into(),
            "levels-isomorphic".into(),
            "weak-rigidity-both-levels".into(),
            "shift-envelope-not-sensitive".into(),
        ];
        cfg.workers = 1;
        let one = run_suite(&cfg).unwrap();
        cfg.workers = 4;
        let four = run_suite(&cfg).unwrap();
        let left = crate::report::canonical_json(&one).unwrap();
        let right = crate::report::canonical_json(&four).unwrap();
        assert_eq!(left, right);
        assert_eq!(one.failed, 0);
    }

    #[test]
    fn selection_runs_only_the_named_checks() {
        let mut cfg = ExperimentConfig::default();
        cfg.checks.select = vec!["levels-isomorphic".into()];
        let suite = run_suite(&cfg).unwrap();
        assert_eq!(suite.checks.len(), 1);
        assert_eq!(suite.checks[0].id, "levels-isomorphic");
        assert_eq!(suite.checks[0].outcome, Outcome::Holds);
        let text = render_suite_text(&suite);
        assert!(text.contains("levels-isomorphic"));
        assert!(text.contains("1 checks: 1 hold, 0 fail, 0 open"));
    }
}
