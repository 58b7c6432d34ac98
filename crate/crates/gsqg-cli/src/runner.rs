//! Single-run orchestration: time integration with incremental series.csv
//! output, snapshot capture and the final report.json.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use gsqg_core::{harness, integrate, Error as CoreError, RunRecord};

use crate::config::RunConfig;
use crate::snapshot::write_snapshot;
use crate::CliError;

pub const SERIES_HEADER: &str =
    "t,l2_norm,crit_hom_norm,crit_inhom_norm,diss_integral,energy_budget,dt,max_velocity";

/// Formats a float with 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlowUpInfo {
    pub t: f64,
    pub last_l2: f64,
}

#[derive(Debug, Serialize)]
pub struct EnergyReport {
    pub holds: bool,
    pub max_violation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct RegularityReport {
    pub value: f64,
    pub initial_budget: f64,
    pub bounded: bool,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub seed: u64,
    pub energy_inequality: EnergyReport,
    pub decay: Option<gsqg_core::DecayReport>,
    pub decay_skipped: Option<String>,
    pub regularity_integral: RegularityReport,
    pub blow_up: Option<BlowUpInfo>,
    pub snapshots: Vec<PathBuf>,
}

pub struct RunOutcome {
    pub record: RunRecord,
    pub report: RunReport,
    pub blew_up: bool,
}

fn write_series_row(w: &mut BufWriter<File>, rec: &RunRecord) -> std::io::Result<()> {
    let i = rec.len() - 1;
    writeln!(
        w,
        "{},{},{},{},{},{},{},{}",
        fmt_f64(rec.times[i]),
        fmt_f64(rec.l2_norm[i]),
        fmt_f64(rec.crit_hom_norm[i]),
        fmt_f64(rec.crit_inhom_norm[i]),
        fmt_f64(rec.diss_integral[i]),
        fmt_f64(rec.energy_budget[i]),
        fmt_f64(rec.dt[i]),
        fmt_f64(rec.max_velocity[i]),
    )?;
    // Flush per row: a killed run leaves a parsable prefix.
    w.flush()
}

/// Executes one configured run, writing config.json, series.csv, report.json
/// and optional snapshots under `out_dir`. Returns the outcome; a detected
/// blow-up is reported, not an error, and partial artifacts are preserved.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("config.json"), cfg.to_canonical_json())?;

    let p = cfg.params();
    let grid = cfg.grid();
    let theta0 = cfg.initial_field()?;

    let mut record = RunRecord::new(&p, &grid);
    let mut series = BufWriter::new(File::create(out_dir.join("series.csv"))?);
    writeln!(series, "{SERIES_HEADER}")?;
    series.flush()?;

    let mut snapshots = Vec::new();
    let mut next_snap = cfg.snapshot_every;

    let result = integrate(
        &theta0,
        &p,
        &cfg.step_control(),
        0.0,
        cfg.t_end,
        cfg.observe_every,
        &mut |theta, info| {
            record.observe(theta, info.t, info.dt, info.max_speed)?;
            write_series_row(&mut series, &record)?;
            if let Some(every) = next_snap {
                // Snapshots land on observation times at the configured cadence.
                if info.t + 1e-12 >= every {
                    let name = format!("snapshot_{:04}.gsqg", snapshots.len());
                    match write_snapshot(&out_dir.join(&name), theta) {
                        Ok(()) => {}
                        Err(CliError::Io(e)) => return Err(CoreError::Io(e)),
                        Err(e) => return Err(CoreError::Domain(e.to_string())),
                    }
                    snapshots.push(PathBuf::from(name));
                    next_snap = Some(every + cfg.snapshot_every.unwrap());
                }
            }
            Ok(())
        },
    );

    let blow_up = match result {
        Ok(_) => None,
        Err(CoreError::BlowUp { t, last_l2 }) => Some(BlowUpInfo { t, last_l2 }),
        Err(e) => return Err(e.into()),
    };

    let (holds, max_violation) = record.check_energy_inequality();
    let (decay, decay_skipped) = match record.check_decay() {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let value = record.regularity_criterion_integral();
    let initial_budget = record.energy_budget.first().copied().unwrap_or(0.0);

    let report = RunReport {
        seed: cfg.seed,
        energy_inequality: EnergyReport {
            holds,
            max_violation,
            tolerance: harness::ENERGY_TOL,
        },
        decay,
        decay_skipped,
        regularity_integral: RegularityReport {
            value,
            initial_budget,
            bounded: value <= initial_budget * (1.0 + harness::ENERGY_TOL),
        },
        blow_up,
        snapshots,
    };

    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(out_dir.join("report.json"), json)?;

    let blew_up = report.blow_up.is_some();
    Ok(RunOutcome {
        record,
        report,
        blew_up,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InitialCondition;

    fn base_config(dir: &Path) -> RunConfig {
        RunConfig {
            alpha: 0.25,
            beta: 1.6,
            n: 32,
            period: std::f64::consts::TAU,
            t_end: 1.0,
            dt_max: 1e-2,
            cfl: 0.4,
            initial_condition: InitialCondition::SingleMode { k: [1, 0] },
            observe_every: 0.1,
            snapshot_every: None,
            output_dir: dir.to_path_buf(),
            seed: 1,
        }
    }

    #[test]
    fn single_mode_run_decays_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = base_config(dir.path());
        let out = run(&cfg, dir.path()).unwrap();
        assert!(!out.blew_up);
        let l2_0 = out.record.l2_norm[0];
        let l2_t = *out.record.l2_norm.last().unwrap();
        // alpha = 0.25, |k| = 1: exact rate e^{-t}.
        assert!((l2_t - l2_0 * (-1.0f64).exp()).abs() <= 1e-8 * l2_0);
        assert!(dir.path().join("series.csv").exists());
        assert!(dir.path().join("report.json").exists());
        assert!(dir.path().join("config.json").exists());
    }

    #[test]
    fn t_end_zero_gives_one_row() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = base_config(dir.path());
        cfg.t_end = 0.0;
        let out = run(&cfg, dir.path()).unwrap();
        assert_eq!(out.record.len(), 1);
        assert!(out.report.energy_inequality.holds);
        let text = fs::read_to_string(dir.path().join("series.csv")).unwrap();
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let mut cfg = base_config(d1.path());
        cfg.initial_condition = InitialCondition::RandomBand {
            seed: 5,
            k_lo: 1.0,
            k_hi: 4.0,
            amplitude: 0.01,
        };
        cfg.t_end = 0.5;
        run(&cfg, d1.path()).unwrap();
        cfg.output_dir = d2.path().to_path_buf();
        run(&cfg, d2.path()).unwrap();
        let a = fs::read(d1.path().join("series.csv")).unwrap();
        let b = fs::read(d2.path().join("series.csv")).unwrap();
        assert_eq!(a, b);
        let a = fs::read(d1.path().join("report.json")).unwrap();
        let b = fs::read(d2.path().join("report.json")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn snapshots_are_written_at_cadence() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = base_config(dir.path());
        cfg.snapshot_every = Some(0.5);
        let out = run(&cfg, dir.path()).unwrap();
        assert_eq!(out.report.snapshots.len(), 2);
        for s in &out.report.snapshots {
            assert!(dir.path().join(s).exists());
        }
    }

    #[test]
    fn series_floats_round_trip() {
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
        let x = std::f64::consts::PI * 1e-7;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
