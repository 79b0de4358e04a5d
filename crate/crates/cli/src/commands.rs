//! The four commands behind the binary: extract, reproduce, replay, bench.
//! Each returns a process exit code; errors bubble up as `anyhow` errors
//! and exit with code 3.

use std::path::Path;

use anyhow::{Context, Result};
use reproforge_core::app_model::load_model;
use reproforge_core::matcher::{parse_trace, write_trace, Matcher, Trace};

use crate::bench::run_bench;
use crate::config::{Policy, RunConfig};
use crate::pipeline::{extract_report, ExtractionReport, Resources};
use crate::replay::{replay, ReplayVerdict};

/// Exit code for warnings from the extract command.
pub const EXIT_WARNINGS: i32 = 2;

fn write_artifact(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, content)
                .with_context(|| format!("cannot write {}", path.display()))
        }
    }
}

/// Extract steps from a report and emit the extraction document.
pub fn cmd_extract(config: &RunConfig) -> Result<(ExtractionReport, i32)> {
    let report_path = config.require_report()?;
    let text = std::fs::read_to_string(report_path)
        .with_context(|| format!("cannot read {}", report_path.display()))?;
    let resources = Resources::load(config)?;
    let report = extract_report(&text, config.input_mode, &resources, config.hyper.delta)?;
    write_artifact(config.out_path.as_deref(), &report.to_document())?;
    let code = if report.has_warnings() { EXIT_WARNINGS } else { 0 };
    Ok((report, code))
}

/// Extract, then search for a reproducing event sequence; write both the
/// extraction document and the trace document.
pub fn cmd_reproduce(config: &RunConfig) -> Result<(ExtractionReport, Trace, i32)> {
    let report_path = config.require_report()?;
    let model_path = config.require_app_model()?;
    let crash_message = config.require_crash_message()?.to_string();

    let text = std::fs::read_to_string(report_path)
        .with_context(|| format!("cannot read {}", report_path.display()))?;
    let resources = Resources::load(config)?;
    let report = extract_report(&text, config.input_mode, &resources, config.hyper.delta)?;
    anyhow::ensure!(
        !report.steps.is_empty(),
        "no steps could be extracted from {}",
        report_path.display()
    );

    let model = load_model(model_path)?;
    anyhow::ensure!(
        model
            .crashes
            .values()
            .any(|m| m.trim() == crash_message.trim()),
        "crash message {:?} is not declared by the model",
        crash_message
    );

    let matcher = Matcher::new(
        &model,
        &report.steps,
        &resources.store,
        config.hyper.clone(),
        &crash_message,
    );
    let trace = match config.policy {
        Policy::Rl => matcher.run()?,
        Policy::Greedy => matcher.run_greedy_baseline()?,
    };

    let trace_doc = write_trace(&trace, &config.hyper, config.policy.name(), &crash_message);
    match config.out_path.as_deref() {
        None => print!("{trace_doc}"),
        Some(out) => {
            write_artifact(Some(out), &trace_doc)?;
            let report_out = out.with_extension("report.txt");
            write_artifact(Some(&report_out), &report.to_document())?;
        }
    }

    let code = if trace.success { 0 } else { 1 };
    Ok((report, trace, code))
}

/// Re-execute a trace through the app model alone and report the verdict.
pub fn cmd_replay(config: &RunConfig, trace_path: &Path) -> Result<(ReplayVerdict, i32)> {
    let model_path = config.require_app_model()?;
    let model = load_model(model_path)?;
    let trace_text = std::fs::read_to_string(trace_path)
        .with_context(|| format!("cannot read {}", trace_path.display()))?;
    let trace = parse_trace(&trace_text)?;
    // The crash message to check comes from the flag, falling back to the
    // message echoed in the trace itself.
    let crash_message = config
        .crash_message
        .clone()
        .unwrap_or_else(|| trace.crash_message.clone());
    anyhow::ensure!(!crash_message.is_empty(), "no crash message to check");

    let verdict = replay(&model, &trace, &crash_message);
    let (line, code) = match &verdict {
        ReplayVerdict::Reproduced => ("verdict: reproduced".to_string(), 0),
        ReplayVerdict::NotReproduced { detail } => {
            (format!("verdict: not-reproduced\ndetail: {detail}"), 1)
        }
        ReplayVerdict::Diverged { index, detail } => (
            format!(
                "verdict: diverged\nstep: {}\ndetail: {detail}",
                index + 1
            ),
            1,
        ),
    };
    println!("{line}");
    Ok((verdict, code))
}

/// Run the corpus benchmark and emit the summary table.
pub fn cmd_bench(config: &RunConfig, corpus_dir: &Path) -> Result<(crate::bench::BenchSummary, i32)> {
    let resources = Resources::load(config)?;
    let summary = run_bench(corpus_dir, config, &resources);
    write_artifact(config.out_path.as_deref(), &summary.to_document())?;
    Ok((summary, 0))
}
