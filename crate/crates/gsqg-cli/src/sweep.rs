//! Parameter sweep: one run per (alpha, beta) grid point, each in its own
//! output subdirectory, summarized in summary.csv.

use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use gsqg_core::{GsqgParams, Regime, Structure};

use crate::config::RunConfig;
use crate::runner::{self, fmt_f64};
use crate::CliError;

pub const SUMMARY_HEADER: &str =
    "alpha,beta,regime,structure,decay_ratio,energy_inequality,regularity_integral,status";

fn regime_label(r: Regime) -> &'static str {
    match r {
        Regime::Subcritical => "subcritical",
        Regime::Critical => "critical",
        Regime::Supercritical => "supercritical",
    }
}

fn structure_label(s: Structure) -> &'static str {
    match s {
        Structure::Quasilinear => "quasilinear",
        Structure::FullyNonlinear => "fully_nonlinear",
    }
}

/// The (alpha, beta) grid: absolute betas, beta offsets relative to
/// `2 alpha + 1`, or both.
pub fn build_grid(alphas: &[f64], betas: &[f64], beta_offsets: &[f64]) -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    for &a in alphas {
        for &b in betas {
            grid.push((a, b));
        }
        for &off in beta_offsets {
            grid.push((a, 2.0 * a + 1.0 + off));
        }
    }
    grid
}

fn run_one(template: &RunConfig, alpha: f64, beta: f64, out_dir: &Path) -> String {
    let row_head = format!("{},{}", fmt_f64(alpha), fmt_f64(beta));
    let p = match GsqgParams::new(alpha, beta) {
        Ok(p) => p,
        Err(e) => return format!("{row_head},,,,,,\"invalid: {e}\""),
    };
    let mut cfg = template.clone();
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.output_dir = out_dir.to_path_buf();
    if let Err(e) = cfg.validate() {
        return format!("{row_head},,,,,,\"invalid: {e}\"");
    }
    let labels = format!("{},{}", regime_label(p.regime()), structure_label(p.structure()));
    match runner::run(&cfg, out_dir) {
        Ok(out) => {
            let decay = out
                .report
                .decay
                .map(|d| fmt_f64(d.ratio))
                .unwrap_or_default();
            let status = if out.blew_up { "blow_up" } else { "ok" };
            format!(
                "{row_head},{labels},{decay},{},{},{status}",
                out.report.energy_inequality.holds,
                fmt_f64(out.report.regularity_integral.value),
            )
        }
        Err(e) => format!("{row_head},{labels},,,,\"error: {e}\""),
    }
}

/// Runs the sweep with up to `threads` runs in parallel and writes
/// summary.csv under `out_root`. Individual failures become rows; the sweep
/// itself only fails on I/O errors.
pub fn sweep(
    template: &RunConfig,
    grid: &[(f64, f64)],
    out_root: &Path,
    threads: usize,
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out_root)?;
    let threads = threads.max(1);
    let mut rows: Vec<(usize, String)> = Vec::with_capacity(grid.len());

    thread::scope(|scope| {
        // At most `threads` runs in flight: spawn a batch, join it, repeat.
        for (chunk_idx, chunk) in grid.chunks(threads).enumerate() {
            let mut batch = Vec::new();
            for (offset, &(a, b)) in chunk.iter().enumerate() {
                let idx = chunk_idx * threads + offset;
                let sub = out_root.join(format!("run_{idx:03}_a{a:.4}_b{b:.4}"));
                let template = &*template;
                batch.push(scope.spawn(move || (idx, run_one(template, a, b, &sub))));
            }
            for h in batch {
                rows.push(h.join().expect("sweep worker panicked"));
            }
        }
    });

    rows.sort_by_key(|(idx, _)| *idx);
    let mut text = String::from(SUMMARY_HEADER);
    text.push('\n');
    for (_, row) in &rows {
        text.push_str(row);
        text.push('\n');
    }
    let path = out_root.join("summary.csv");
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InitialCondition;

    fn template(dir: &Path) -> RunConfig {
        RunConfig {
            alpha: 0.25,
            beta: 1.6,
            n: 32,
            period: std::f64::consts::TAU,
            t_end: 0.2,
            dt_max: 1e-2,
            cfl: 0.4,
            initial_condition: InitialCondition::RandomBand {
                seed: 5,
                k_lo: 1.0,
                k_hi: 4.0,
                amplitude: 0.01,
            },
            observe_every: 0.1,
            snapshot_every: None,
            output_dir: dir.to_path_buf(),
            seed: 5,
        }
    }

    #[test]
    fn three_by_three_offset_grid() {
        let grid = build_grid(&[0.1, 0.25, 0.4], &[], &[0.0, 0.1, 0.3]);
        assert_eq!(grid.len(), 9);
        // alpha = 0.4, offset 0.3 leaves the model's beta range: recorded as
        // a failed row, the sweep continues.
        let dir = tempfile::tempdir().unwrap();
        let t = template(dir.path());
        let path = sweep(&t, &grid, dir.path(), 3).unwrap();
        let text = fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[0], SUMMARY_HEADER);
        let valid: Vec<&&str> = lines[1..].iter().filter(|l| l.ends_with(",ok")).collect();
        assert_eq!(valid.len(), 8);
        for l in &valid {
            assert!(l.contains(",fully_nonlinear,"), "{l}");
        }
        assert!(lines[1..].iter().any(|l| l.contains("invalid: ")));
    }

    #[test]
    fn empty_grid_gives_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let t = template(dir.path());
        let path = sweep(&t, &[], dir.path(), 1).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text, format!("{SUMMARY_HEADER}\n"));
    }

    #[test]
    fn rerun_is_identical() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let grid = build_grid(&[0.2, 0.3], &[1.5], &[]);
        let t = template(d1.path());
        let p1 = sweep(&t, &grid, d1.path(), 2).unwrap();
        let p2 = sweep(&t, &grid, d2.path(), 1).unwrap();
        assert_eq!(fs::read(p1).unwrap(), fs::read(p2).unwrap());
    }
}
