//! Property-suite driver: checks the harmonic-analysis toolkit against its
//! contracts on the configured grid and parameters, writing verification.json.

use std::fs;
use std::path::Path;

use serde::Serialize;

use gsqg_core::{
    check_interpolation, check_scaling_covariance, init, sample_commutator_estimate,
    sample_trilinear_bound, CommutatorParams, GridSpec, LpProjector, RatioStats,
};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub n: usize,
    pub period: f64,
    pub alpha: f64,
    pub beta: f64,
    pub all_pass: bool,
    pub properties: Vec<PropertyResult>,
}

fn json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("detail serializes")
}

fn norm_equivalence(grid: &GridSpec, seed: u64, trials: usize) -> Result<PropertyResult, CliError> {
    let p = LpProjector::build(grid)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..trials {
        let f = init::random_band(grid, grid.k_min(), grid.k_max_masked(), seed + i as u64)?;
        let r = p.norm_equivalence_ratio(&f)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let pass = lo >= 0.5 - 1e-12 && hi <= 1.0 + 1e-12;
    Ok(PropertyResult {
        name: "norm_equivalence",
        pass,
        detail: json(&serde_json::json!({ "trials": trials, "min_ratio": lo, "max_ratio": hi })),
    })
}

fn bernstein(grid: &GridSpec, seed: u64, trials: usize) -> Result<PropertyResult, CliError> {
    let p = LpProjector::build(grid)?;
    let sigmas = [-1.0, -0.5, 0.5, 1.0, 1.6];
    let mut checked = 0usize;
    let mut failures = 0usize;
    for i in 0..trials {
        let f = init::random_band(grid, grid.k_min(), grid.k_max_masked(), seed ^ (i as u64) << 8)?;
        for j in p.j_range() {
            let block = p.block(&f, j)?;
            if block.is_zero() {
                continue;
            }
            for &s in &sigmas {
                let c = p.bernstein_check(&block, j, s)?;
                checked += 1;
                if !c.both_ok() {
                    failures += 1;
                }
            }
        }
    }
    Ok(PropertyResult {
        name: "bernstein",
        pass: failures == 0 && checked > 0,
        detail: json(&serde_json::json!({ "checked": checked, "failures": failures })),
    })
}

fn commutators(grid: &GridSpec, seed: u64, trials: usize) -> Result<Vec<PropertyResult>, CliError> {
    let double = GridSpec::new(grid.n() * 2, grid.period(), grid.dealias_fraction())?;
    let cases = [
        (
            "commutator_lemma_2_2",
            CommutatorParams::Lemma22 {
                s: 0.5,
                rho1: 0.75,
                rho2: 0.25,
            },
        ),
        (
            "commutator_lemma_2_3",
            CommutatorParams::Lemma23 {
                s: 0.5,
                rho: 0.3,
                nu: 0.8,
            },
        ),
    ];
    let mut out = Vec::new();
    for (name, params) in cases {
        let base = sample_commutator_estimate(grid, &params, trials, seed)?;
        let refined = sample_commutator_estimate(&double, &params, trials, seed)?;
        let (m0, m1) = (base.max.unwrap_or(0.0), refined.max.unwrap_or(0.0));
        // Stability under refinement: the max ratio must not blow up when
        // the resolution doubles.
        let pass = m0.is_finite() && m1.is_finite() && m1 <= 2.0 * m0.max(1e-300);
        out.push(PropertyResult {
            name,
            pass,
            detail: json(&serde_json::json!({ "base": base, "refined": refined })),
        });
    }
    Ok(out)
}

fn trilinear(cfg: &RunConfig, grid: &GridSpec, trials: usize) -> Result<PropertyResult, CliError> {
    let p = cfg.params();
    let sigma = 2.5 - p.alpha();
    let double = GridSpec::new(grid.n() * 2, grid.period(), grid.dealias_fraction())?;
    let base: RatioStats = sample_trilinear_bound(grid, &p, sigma, trials, cfg.seed)?;
    let refined = sample_trilinear_bound(&double, &p, sigma, trials, cfg.seed)?;
    let (m0, m1) = (base.max.unwrap_or(0.0), refined.max.unwrap_or(0.0));
    let pass = m0.is_finite() && m1.is_finite() && m1 <= 2.0 * m0.max(1e-300);
    Ok(PropertyResult {
        name: "trilinear_bound",
        pass,
        detail: json(&serde_json::json!({ "sigma": sigma, "base": base, "refined": refined })),
    })
}

fn scaling(cfg: &RunConfig, grid: &GridSpec, seed: u64) -> Result<PropertyResult, CliError> {
    let p = cfg.params();
    // Support radius capped at cutoff / (2 lambda) so the lambda = 2
    // rescaling stays dealias-retained.
    let k_hi = (grid.dealias_mode_cutoff() as f64 * grid.k0() / 4.0).max(1.5 * grid.k_min());
    let theta = init::random_band(grid, grid.k_min(), k_hi, seed)?;
    let disc = check_scaling_covariance(&theta, &p, 2)?;
    Ok(PropertyResult {
        name: "scaling_covariance",
        pass: disc <= 1e-11,
        detail: json(&serde_json::json!({ "lambda": 2, "max_discrepancy": disc })),
    })
}

fn interpolation(cfg: &RunConfig, grid: &GridSpec, trials: usize) -> Result<PropertyResult, CliError> {
    let mut min_margin = f64::INFINITY;
    for i in 0..trials {
        let f = init::random_band(grid, grid.k_min(), grid.k_max_masked(), cfg.seed + 31 * i as u64)?;
        let m = check_interpolation(&f, cfg.alpha, cfg.beta)?;
        min_margin = min_margin.min(m / f.l2_norm().max(1e-300));
    }
    let single = init::single_mode(grid, 2, 1, 1.0)?;
    let eq = check_interpolation(&single, cfg.alpha, cfg.beta)?;
    let pass = min_margin >= -1e-10 && eq.abs() <= 1e-12 * single.l2_norm();
    Ok(PropertyResult {
        name: "interpolation",
        pass,
        detail: json(&serde_json::json!({
            "trials": trials,
            "min_relative_margin": min_margin,
            "single_mode_margin": eq,
        })),
    })
}

/// Runs the full property suite. Writes verification.json under `out_dir`.
pub fn verify(cfg: &RunConfig, out_dir: &Path, trials: usize) -> Result<VerificationReport, CliError> {
    let grid = cfg.grid();
    let mut properties = vec![
        norm_equivalence(&grid, cfg.seed, trials)?,
        bernstein(&grid, cfg.seed, trials.min(50))?,
    ];
    properties.extend(commutators(&grid, cfg.seed, trials.min(25))?);
    properties.push(trilinear(cfg, &grid, trials.min(25))?);
    properties.push(scaling(cfg, &grid, cfg.seed)?);
    properties.push(interpolation(cfg, &grid, trials)?);

    let report = VerificationReport {
        seed: cfg.seed,
        n: grid.n(),
        period: grid.period(),
        alpha: cfg.alpha,
        beta: cfg.beta,
        all_pass: properties.iter().all(|p| p.pass),
        properties,
    };
    fs::create_dir_all(out_dir)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(out_dir.join("verification.json"), json)?;
    Ok(report)
}
