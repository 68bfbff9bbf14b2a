use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use guidemap_bench::report::{report_csv, sweep_csv, write_json};
use guidemap_bench::sweep::parse_f2;
use guidemap_bench::{
    load_dataset, make_synthetic_dataset, run_benchmark, sweep, BenchConfig, DatasetInstance,
    SegmenterChoice, SweepParam, DEFAULT_K,
};
use guidemap_core::interaction::{ClickPolicy, ScaleSource};
use guidemap_core::TruncationMode;

#[derive(Parser)]
#[command(
    name = "bench",
    about = "Clicks-to-IoU benchmark for click guidance maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "full")]
        layout: String,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value = "1.5")]
        f2: String,
        /// Report path; a CSV table is written next to it.
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
    /// Evaluate one configuration per value of a parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Values to try; defaults to the standard ablation values.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        values: Vec<String>,
        #[arg(long, default_value = "full")]
        layout: String,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value = "1.5")]
        f2: String,
        #[arg(long, default_value = "sweep.json")]
        out: PathBuf,
    },
    /// Write a synthetic dataset.
    Synth {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Dataset root with images/ and masks/.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Use an in-memory synthetic dataset of this size instead of --dataset.
    #[arg(long, conflicts_with = "dataset")]
    synthetic: Option<usize>,
    #[arg(long, default_value_t = 0.9)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "reference")]
    segmenter: SegmenterArg,
    #[arg(long, default_value_t = 2.0)]
    f: f64,
    #[arg(long, default_value_t = 0.0)]
    f1: f64,
    /// Use max(d, f*s) instead of saturating at f*s.
    #[arg(long)]
    literal_max: bool,
    /// Take the object scale from the ground-truth area.
    #[arg(long)]
    gt_scale: bool,
    /// Random error clicks with replacement instead of centered corrections.
    #[arg(long)]
    randomized: bool,
    #[arg(long)]
    max_proposals: Option<usize>,
    #[command(flatten)]
    weights: Weights,
}

/// Reference segmenter weights.
#[derive(Args)]
struct Weights {
    #[arg(long)]
    w_dist: Option<f64>,
    #[arg(long)]
    w_obj: Option<f64>,
    #[arg(long)]
    w_color: Option<f64>,
    #[arg(long)]
    color_sigma: Option<f64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SegmenterArg {
    Reference,
    Oracle,
    Empty,
}

impl Common {
    fn config(&self, layout: &str, k: usize, f2: &str) -> anyhow::Result<BenchConfig> {
        let mut cfg = BenchConfig {
            layout: layout.to_owned(),
            k,
            threshold: self.threshold,
            seed: self.seed,
            max_proposals: self.max_proposals,
            segmenter: match self.segmenter {
                SegmenterArg::Reference => SegmenterChoice::Reference,
                SegmenterArg::Oracle => SegmenterChoice::Oracle,
                SegmenterArg::Empty => SegmenterChoice::Empty,
            },
            truncation: if self.literal_max {
                TruncationMode::LiteralMax
            } else {
                TruncationMode::Saturate
            },
            scale_source: if self.gt_scale {
                ScaleSource::GroundTruth
            } else {
                ScaleSource::Clicks
            },
            policy: if self.randomized {
                ClickPolicy::Randomized
            } else {
                ClickPolicy::Deterministic
            },
            ..BenchConfig::default()
        };
        let w = &self.weights;
        let r = &mut cfg.reference;
        r.w_dist = w.w_dist.unwrap_or(r.w_dist);
        r.w_obj = w.w_obj.unwrap_or(r.w_obj);
        r.w_color = w.w_color.unwrap_or(r.w_color);
        r.color_sigma = w.color_sigma.unwrap_or(r.color_sigma);
        r.validate()?;
        cfg.scale_params.f = self.f;
        cfg.scale_params.f1 = self.f1;
        cfg.scale_params.f2 = parse_f2(f2)?;
        cfg.scale_params.validate()?;
        Ok(cfg)
    }

    /// Instances plus whether any failed to load.
    fn instances(&self) -> anyhow::Result<(Vec<DatasetInstance>, bool)> {
        if let Some(n) = self.synthetic {
            return Ok((guidemap_bench::synthetic_instances(n, self.seed), false));
        }
        let Some(root) = &self.dataset else {
            bail!("pass --dataset DIR or --synthetic N");
        };
        let ds = load_dataset(root).with_context(|| format!("loading {}", root.display()))?;
        for e in &ds.errors {
            eprintln!("load error: {}: {}", e.id, e.reason);
        }
        Ok((ds.instances, !ds.errors.is_empty()))
    }
}

fn csv_path(out: &std::path::Path) -> PathBuf {
    out.with_extension("csv")
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns false when some instance failed to load.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run {
            common,
            layout,
            k,
            f2,
            out,
        } => {
            let cfg = common.config(&layout, k, &f2)?;
            let (instances, load_failed) = common.instances()?;
            let report = run_benchmark(&instances, &cfg)?;
            write_json(&out, &report)?;
            std::fs::write(csv_path(&out), report_csv(&report)?)?;
            println!(
                "{} instances, mean NoC@{} = {:.3}, reached {}, zero-click {}",
                report.instances.len(),
                cfg.threshold,
                report.mean_noc,
                report.reached,
                report.zero_click_successes
            );
            Ok(!load_failed)
        }
        Command::Sweep {
            common,
            param,
            values,
            layout,
            k,
            f2,
            out,
        } => {
            let base = common.config(&layout, k, &f2)?;
            let values = if values.is_empty() {
                param
                    .default_values()
                    .iter()
                    .map(|s| s.to_string())
                    .collect()
            } else {
                values
            };
            let (instances, load_failed) = common.instances()?;
            let result = sweep(&instances, param, &values, &base)?;
            write_json(&out, &result)?;
            let table = sweep_csv(&result)?;
            std::fs::write(csv_path(&out), &table)?;
            for (v, r) in result.values.iter().zip(&result.reports) {
                println!(
                    "{v:>12}  mean NoC {:.3}  reached {}/{}",
                    r.mean_noc,
                    r.reached,
                    r.instances.len()
                );
            }
            Ok(!load_failed)
        }
        Command::Synth { n, seed, out } => {
            let insts = make_synthetic_dataset(n, seed, &out)?;
            println!("wrote {} instances to {}", insts.len(), out.display());
            Ok(true)
        }
    }
}
