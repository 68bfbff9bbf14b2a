use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::benchmark::BenchmarkReport;
use crate::error::{io_err, Result};
use crate::sweep::SweepReport;

pub fn write_json(path: impl AsRef<Path>, value: &impl Serialize) -> Result<()> {
    let path = path.as_ref();
    let json = serde_json::to_string_pretty(value)?;
    fs::write(path, json + "\n").map_err(io_err(path))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |m| format!("{m:.6}"))
}

/// Per-instance table.
pub fn report_csv(report: &BenchmarkReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "id",
        "noc",
        "reached",
        "zero_click_miou",
        "final_miou",
        "clicks",
        "error",
    ])?;
    for r in &report.instances {
        w.write_record([
            r.id.clone(),
            r.noc.to_string(),
            r.reached.to_string(),
            fmt_opt(r.zero_click_miou),
            format!("{:.6}", r.final_miou),
            r.clicks.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    finish(w)
}

/// One row per swept value.
pub fn sweep_csv(sweep: &SweepReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let budget = sweep.reports.first().map_or(0, |r| r.curve.len());
    let mut header: Vec<String> = [
        "param",
        "value",
        "mean_noc",
        "reached",
        "instances",
        "zero_click_successes",
    ]
    .map(String::from)
    .to_vec();
    header.extend((1..=budget).map(|i| format!("miou@{i}")));
    w.write_record(&header)?;
    let param = serde_json::to_value(sweep.param)?
        .as_str()
        .unwrap_or_default()
        .to_owned();
    for (value, r) in sweep.values.iter().zip(&sweep.reports) {
        let mut row = vec![
            param.clone(),
            value.clone(),
            format!("{:.4}", r.mean_noc),
            r.reached.to_string(),
            r.instances.len().to_string(),
            r.zero_click_successes.to_string(),
        ];
        row.extend(r.curve.iter().map(|m| format!("{m:.6}")));
        w.write_record(&row)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
