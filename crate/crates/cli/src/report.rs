//! Learning-curve summaries across seeds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use tscl_coop::format::{fmt_sig, runlog_from_jsonl};
use tscl_coop::teacher::RunLog;

use crate::error::CliError;
use crate::output::{inherit, stamp_csv, Artifacts, CONFIG_HASH, EXPERIMENT, MASTER_SEED};

/// Run logs named on the command line; directories contribute their
/// `runlog-*.jsonl` files.
fn collect(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let entries = std::fs::read_dir(p)
                .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
            for entry in entries {
                let path = entry
                    .map_err(|e| CliError::Validation(e.to_string()))?
                    .path();
                let name = path
                    .file_name()
                    .and_then(|n| n.to_str())
                    .unwrap_or_default();
                if name.starts_with("runlog-") && name.ends_with(".jsonl") {
                    files.push(path);
                }
            }
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(CliError::Validation("no run logs given".into()));
    }
    Ok(files)
}

fn label(log: &RunLog) -> String {
    log.meta
        .extra
        .get("teacher_label")
        .cloned()
        .unwrap_or_else(|| log.meta.teacher.clone())
}

fn seed_index(log: &RunLog) -> u64 {
    log.meta
        .extra
        .get("seed_index")
        .and_then(|s| s.parse().ok())
        .unwrap_or(log.meta.seed)
}

/// Mean, sample standard deviation, min and max.
fn stats(xs: &[f64]) -> [f64; 4] {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    [mean, std, min, max]
}

fn row(cells: &[String]) -> String {
    let mut s = cells.join(",");
    s.push('\n');
    s
}

pub fn report(out_root: &Path, inputs: &[PathBuf], force: bool) -> Result<Vec<PathBuf>, CliError> {
    let mut logs = Vec::new();
    for path in collect(inputs)? {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let log = runlog_from_jsonl(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        logs.push((path, log));
    }
    let key = |log: &RunLog| {
        (
            log.meta.extra.get(CONFIG_HASH).cloned(),
            log.meta.extra.get(MASTER_SEED).cloned(),
        )
    };
    let first = key(&logs[0].1);
    if first.0.is_none() || first.1.is_none() {
        return Err(CliError::Validation(format!(
            "{} carries no provenance (config hash and master seed)",
            logs[0].0.display()
        )));
    }
    for (path, log) in &logs[1..] {
        if key(log) != first {
            return Err(CliError::Validation(format!(
                "{} comes from a different config or master seed than {}",
                path.display(),
                logs[0].0.display()
            )));
        }
    }
    let prov = inherit(&logs[0].1.meta.extra).expect("provenance checked above");
    let experiment = prov[EXPERIMENT].clone();

    let mut groups: BTreeMap<(String, String), Vec<RunLog>> = BTreeMap::new();
    for (_, log) in logs {
        groups
            .entry((label(&log), log.meta.eval_target.clone()))
            .or_default()
            .push(log);
    }
    let mut curves = String::from("teacher,target,k,mean,std,min,max,seeds\n");
    let mut summary =
        String::from("teacher,target,seeds,final_mean,final_std,final_min,final_max\n");
    for ((teacher, target), runs) in &mut groups {
        runs.sort_by_key(seed_index);
        let len = runs[0].records.len();
        if runs.iter().any(|r| r.records.len() != len) {
            return Err(CliError::Validation(format!(
                "runs of teacher `{teacher}` on `{target}` have different lengths"
            )));
        }
        for k in 0..len {
            let metrics: Vec<f64> = runs.iter().map(|r| r.records[k].metric).collect();
            let s = stats(&metrics);
            let mut cells = vec![teacher.clone(), target.clone(), (k + 1).to_string()];
            cells.extend(s.iter().map(|v| fmt_sig(*v)));
            cells.push(runs.len().to_string());
            curves.push_str(&row(&cells));
        }
        let finals: Vec<f64> = runs.iter().map(RunLog::final_metric).collect();
        let s = stats(&finals);
        let mut cells = vec![teacher.clone(), target.clone(), runs.len().to_string()];
        cells.extend(s.iter().map(|v| fmt_sig(*v)));
        summary.push_str(&row(&cells));
    }
    let mut out = Artifacts::new(out_root, &experiment);
    out.add("curves.csv", stamp_csv(&prov, &curves));
    out.add("summary.csv", stamp_csv(&prov, &summary));
    out.commit(force)
}
