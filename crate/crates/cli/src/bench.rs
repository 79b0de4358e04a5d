//! Corpus benchmark: extraction precision/recall against bundled ground
//! truth, and reproduction success per scenario bundle and seed.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use reproforge_core::app_model::load_model;
use reproforge_core::matcher::{Hyperparams, Matcher};
use reproforge_core::s2r_extract::parse_s2rs;

use crate::config::{InputMode, Policy, RunConfig};
use crate::metrics::{score, PrecisionRecall};
use crate::pipeline::{extract_report, Resources};

#[derive(Debug, Clone)]
pub struct ExtractionRow {
    pub bundle: String,
    pub metrics: PrecisionRecall,
}

#[derive(Debug, Clone)]
pub struct ScenarioRow {
    pub bundle: String,
    pub policy: String,
    pub seed: u64,
    pub success: bool,
    pub episodes_used: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BenchSummary {
    pub extraction: Vec<ExtractionRow>,
    pub scenarios: Vec<ScenarioRow>,
    pub failures: Vec<String>,
}

impl BenchSummary {
    /// Fixed-order text table.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        out.push_str("schema_version: 1\n");
        out.push_str(&format!("extraction_bundles: {}\n", self.extraction.len()));
        out.push_str(&format!(
            "scenario_runs: {}\n",
            self.scenarios.len()
        ));
        out.push_str(&format!("bundle_failures: {}\n", self.failures.len()));
        if !self.extraction.is_empty() {
            out.push('\n');
            out.push_str("[extraction]\n");
            for row in &self.extraction {
                out.push_str(&format!(
                    "{}: extracted={} truth={} correct={} precision={:.4} recall={:.4}\n",
                    row.bundle,
                    row.metrics.extracted,
                    row.metrics.truth,
                    row.metrics.correct,
                    row.metrics.precision(),
                    row.metrics.recall()
                ));
            }
        }
        if !self.scenarios.is_empty() {
            out.push('\n');
            out.push_str("[scenarios]\n");
            for row in &self.scenarios {
                out.push_str(&format!(
                    "{} policy={} seed={}: {} episodes={}\n",
                    row.bundle,
                    row.policy,
                    row.seed,
                    if row.success { "reproduced" } else { "failed" },
                    row.episodes_used
                ));
            }
        }
        for failure in &self.failures {
            out.push('\n');
            out.push_str(&format!("[bundle-failure]\n{failure}\n"));
        }
        out
    }
}

fn sorted_subdirs(dir: &Path) -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Err(_) => return Vec::new(),
        Ok(entries) => entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect(),
    };
    dirs.sort();
    dirs
}

/// Per-scenario settings from `scenario.cfg`.
#[derive(Debug, Clone)]
struct ScenarioConfig {
    crash_message: String,
    seeds: Vec<u64>,
    noop_budget: Option<u32>,
    episodes: Option<usize>,
}

fn parse_scenario_cfg(text: &str, path: &Path) -> Result<ScenarioConfig> {
    let mut crash_message = None;
    let mut seeds = vec![1, 2, 3];
    let mut noop_budget = None;
    let mut episodes = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .with_context(|| format!("{} line {}", path.display(), idx + 1))?;
        let value = value.trim();
        match key.trim() {
            "schema_version" => {}
            "crash_message" => crash_message = Some(value.to_string()),
            "seeds" => {
                seeds = value
                    .split_whitespace()
                    .map(|s| s.parse().context("seed must be an integer"))
                    .collect::<Result<Vec<u64>>>()?
            }
            "noop_budget" => noop_budget = Some(value.parse()?),
            "episodes" => episodes = Some(value.parse()?),
            other => anyhow::bail!("{}: unknown key {other:?}", path.display()),
        }
    }
    Ok(ScenarioConfig {
        crash_message: crash_message
            .with_context(|| format!("{}: missing crash_message", path.display()))?,
        seeds,
        noop_budget,
        episodes,
    })
}

/// Run the whole corpus. Bundle failures are recorded and the batch
/// continues.
pub fn run_bench(corpus_dir: &Path, base: &RunConfig, resources: &Resources) -> BenchSummary {
    let mut summary = BenchSummary::default();

    for bundle in sorted_subdirs(&corpus_dir.join("extraction")) {
        let name = bundle
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match bench_extraction(&bundle, base, resources) {
            Ok(metrics) => summary.extraction.push(ExtractionRow {
                bundle: name,
                metrics,
            }),
            Err(e) => summary.failures.push(format!("extraction/{name}: {e:#}")),
        }
    }

    for bundle in sorted_subdirs(&corpus_dir.join("scenarios")) {
        let name = bundle
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match bench_scenario(&bundle, &name, base, resources) {
            Ok(rows) => summary.scenarios.extend(rows),
            Err(e) => summary.failures.push(format!("scenarios/{name}: {e:#}")),
        }
    }

    summary
}

fn bench_extraction(
    bundle: &Path,
    base: &RunConfig,
    resources: &Resources,
) -> Result<PrecisionRecall> {
    let report_text = std::fs::read_to_string(bundle.join("report.txt"))
        .with_context(|| format!("{}: missing report.txt", bundle.display()))?;
    let truth_text = std::fs::read_to_string(bundle.join("expected_s2rs.txt"))
        .with_context(|| format!("{}: missing expected_s2rs.txt", bundle.display()))?;
    let truth = parse_s2rs(&truth_text)?;
    let report = extract_report(&report_text, InputMode::Text, resources, base.hyper.delta)?;
    Ok(score(&report.steps, &truth))
}

fn bench_scenario(
    bundle: &Path,
    name: &str,
    base: &RunConfig,
    resources: &Resources,
) -> Result<Vec<ScenarioRow>> {
    let report_text = std::fs::read_to_string(bundle.join("report.txt"))
        .with_context(|| format!("{}: missing report.txt", bundle.display()))?;
    let model = load_model(&bundle.join("app.model"))?;
    let cfg_text = std::fs::read_to_string(bundle.join("scenario.cfg"))
        .with_context(|| format!("{}: missing scenario.cfg", bundle.display()))?;
    let cfg = parse_scenario_cfg(&cfg_text, &bundle.join("scenario.cfg"))?;

    let report = extract_report(&report_text, InputMode::Text, resources, base.hyper.delta)?;
    anyhow::ensure!(
        !report.steps.is_empty(),
        "scenario report produced no steps"
    );

    let mut rows = Vec::new();
    for &seed in &cfg.seeds {
        let mut hyper = Hyperparams {
            seed,
            ..base.hyper.clone()
        };
        if let Some(n0) = cfg.noop_budget {
            hyper.n0 = n0;
        }
        if let Some(budget) = cfg.episodes {
            hyper.episode_budget = budget;
        }
        let matcher = Matcher::new(
            &model,
            &report.steps,
            &resources.store,
            hyper,
            &cfg.crash_message,
        );
        let trace = match base.policy {
            Policy::Rl => matcher.run()?,
            Policy::Greedy => matcher.run_greedy_baseline()?,
        };
        rows.push(ScenarioRow {
            bundle: name.to_string(),
            policy: base.policy.name().to_string(),
            seed,
            success: trace.success,
            episodes_used: trace.episodes_used,
        });
    }
    Ok(rows)
}
