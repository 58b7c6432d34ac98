//! Online monitors for the energy inequality, critical-norm decay and the
//! regularity-criterion integral, plus offline samplers that probe the
//! commutator and trilinear estimates empirically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::frac::{fractional_laplacian, sobolev_norm, SobolevIndex};
use crate::grid::GridSpec;
use crate::init;
use crate::lp::LpProjector;
use crate::model::{nonlinear_term, pointwise_product, GsqgParams};

/// Relative tolerance for the discrete energy inequality.
pub const ENERGY_TOL: f64 = 1e-5;

/// Time series of the monitored quantities for one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub period: f64,
    pub integrator: &'static str,
    pub quadrature: &'static str,
    pub times: Vec<f64>,
    pub l2_norm: Vec<f64>,
    pub crit_hom_norm: Vec<f64>,
    pub crit_inhom_norm: Vec<f64>,
    /// Running trapezoid of `||Lambda^alpha theta||_{H^crit}^2`.
    pub diss_integral: Vec<f64>,
    /// `crit_inhom_norm^2 + diss_integral`.
    pub energy_budget: Vec<f64>,
    pub dt: Vec<f64>,
    pub max_velocity: Vec<f64>,
    #[serde(skip)]
    last_integrand: Option<f64>,
}

impl RunRecord {
    pub fn new(p: &GsqgParams, grid: &GridSpec) -> Self {
        Self {
            alpha: p.alpha(),
            beta: p.beta(),
            n: grid.n(),
            period: grid.period(),
            integrator: "etdrk2",
            quadrature: "trapezoid",
            times: Vec::new(),
            l2_norm: Vec::new(),
            crit_hom_norm: Vec::new(),
            crit_inhom_norm: Vec::new(),
            diss_integral: Vec::new(),
            energy_budget: Vec::new(),
            dt: Vec::new(),
            max_velocity: Vec::new(),
            last_integrand: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn params(&self) -> GsqgParams {
        GsqgParams::new(self.alpha, self.beta).expect("record params validated at construction")
    }

    /// Appends one observation. Time must increase strictly between calls.
    pub fn observe(&mut self, theta: &SpectralField, t: f64, dt: f64, max_vel: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::NonMonotoneTime { last, new: t });
            }
        }
        let p = self.params();
        let crit = p.critical_exponent();
        let l2 = theta.l2_norm();
        let hom = sobolev_norm(theta, SobolevIndex::homogeneous(crit))?;
        let inhom = (l2 * l2 + hom * hom).sqrt();
        // ||Lambda^a theta||_{H^crit}^2 = ||theta||_{Hdot^a}^2 + ||theta||_{Hdot^{crit+a}}^2.
        let da = sobolev_norm(theta, SobolevIndex::homogeneous(p.alpha()))?;
        let dc = sobolev_norm(theta, SobolevIndex::homogeneous(crit + p.alpha()))?;
        let integrand = da * da + dc * dc;

        let integral = match (self.times.last(), self.last_integrand) {
            (Some(&t_prev), Some(prev)) => {
                self.diss_integral.last().unwrap() + 0.5 * (t - t_prev) * (prev + integrand)
            }
            _ => 0.0,
        };

        self.times.push(t);
        self.l2_norm.push(l2);
        self.crit_hom_norm.push(hom);
        self.crit_inhom_norm.push(inhom);
        self.diss_integral.push(integral);
        self.energy_budget.push(inhom * inhom + integral);
        self.dt.push(dt);
        self.max_velocity.push(max_vel);
        self.last_integrand = Some(integrand);
        Ok(())
    }

    /// Energy inequality: the budget must never exceed its initial value by
    /// more than `ENERGY_TOL` relative. Returns the flag and the maximum
    /// relative excess.
    pub fn check_energy_inequality(&self) -> (bool, f64) {
        if self.is_empty() {
            return (true, 0.0);
        }
        let b0 = self.energy_budget[0];
        if b0 == 0.0 {
            let grew = self.energy_budget.iter().any(|&b| b > 0.0);
            return (!grew, if grew { f64::INFINITY } else { 0.0 });
        }
        let excess = self
            .energy_budget
            .iter()
            .map(|b| (b - b0) / b0)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        (excess <= ENERGY_TOL, excess)
    }

    /// Final value of the dissipation integral (the regularity-criterion
    /// quantity).
    pub fn regularity_criterion_integral(&self) -> f64 {
        self.diss_integral.last().copied().unwrap_or(0.0)
    }

    /// Critical-norm decay report over the recorded horizon. Requires the
    /// record to span at least 20 dissipation times of the lowest mode.
    pub fn check_decay(&self) -> Result<DecayReport> {
        if self.is_empty() {
            return Err(Error::InsufficientData("empty record".into()));
        }
        let k_min = 2.0 * std::f64::consts::PI / self.period;
        let reference_rate = k_min.powf(2.0 * self.alpha);
        let span = self.times.last().unwrap() - self.times[0];
        if span < 20.0 / reference_rate {
            return Err(Error::InsufficientData(format!(
                "horizon {span:.3} shorter than 20 dissipation times ({:.3})",
                20.0 / reference_rate
            )));
        }
        let initial = self.crit_inhom_norm[0];
        if initial == 0.0 {
            return Ok(DecayReport {
                ratio: 0.0,
                fitted_rate: reference_rate,
                reference_rate,
            });
        }
        let ratio = self.crit_inhom_norm.last().unwrap() / initial;

        // Least-squares fit of log(norm) over the final half of the run.
        let t_mid = self.times[0] + 0.5 * span;
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.crit_inhom_norm)
            .filter(|(&t, &v)| t >= t_mid && v > 0.0)
            .map(|(&t, &v)| (t, v.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::InsufficientData(
                "too few positive samples in the fit window".into(),
            ));
        }
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

        Ok(DecayReport {
            ratio,
            fitted_rate: -slope,
            reference_rate,
        })
    }
}

/// Decay diagnostics: final/initial critical-norm ratio and the fitted
/// exponential rate over the tail, against the lowest-mode linear rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayReport {
    pub ratio: f64,
    pub fitted_rate: f64,
    pub reference_rate: f64,
}

impl DecayReport {
    /// Relative deviation of the fitted tail rate from the linear rate.
    pub fn rate_deviation(&self) -> f64 {
        (self.fitted_rate - self.reference_rate).abs() / self.reference_rate
    }
}

/// Summary statistics over sampled ratios.
#[derive(Debug, Clone, Serialize)]
pub struct RatioStats {
    pub trials: usize,
    pub max: Option<f64>,
    pub median: Option<f64>,
    pub mean: Option<f64>,
}

impl RatioStats {
    fn from_ratios(mut ratios: Vec<f64>) -> Self {
        if ratios.is_empty() {
            return Self {
                trials: 0,
                max: None,
                median: None,
                mean: None,
            };
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let trials = ratios.len();
        let median = if trials % 2 == 1 {
            ratios[trials / 2]
        } else {
            0.5 * (ratios[trials / 2 - 1] + ratios[trials / 2])
        };
        Self {
            trials,
            max: Some(ratios[trials - 1]),
            median: Some(median),
            mean: Some(ratios.iter().sum::<f64>() / trials as f64),
        }
    }
}

/// Exponent sets for the two sampled commutator estimates.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum CommutatorParams {
    /// `||[L^{-s} d_l, g] f||_{Hdot^{r2 - r1}} <= C ||g||_{Hdot^{2-s-r1}} ||f||_{Hdot^{r2}}`
    /// with `s in (0,1)`, `r1 in (0,2)`, `r2 in (-1,1)`, `r2 > r1 - 1`.
    Lemma22 { s: f64, rho1: f64, rho2: f64 },
    /// `|<[L^{s+r} d_l D_i, g] f, h>| <= C c_j min(...) ||h||_{Hdot^{r+nu}}`
    /// with `s in [0,1)`, `nu in (0,2)`, `s > nu - 1`.
    Lemma23 { s: f64, rho: f64, nu: f64 },
}

impl CommutatorParams {
    fn validate(&self) -> Result<()> {
        match *self {
            CommutatorParams::Lemma22 { s, rho1, rho2 } => {
                if !(s > 0.0 && s < 1.0) {
                    return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
                }
                if !(rho1 > 0.0 && rho1 < 2.0) {
                    return Err(Error::Domain(format!("rho1 must lie in (0, 2), got {rho1}")));
                }
                if !(rho2 > -1.0 && rho2 < 1.0) {
                    return Err(Error::Domain(format!(
                        "rho2 must lie in (-1, 1), got {rho2}"
                    )));
                }
                if !(rho2 > rho1 - 1.0) {
                    return Err(Error::Domain(format!(
                        "constraint rho2 > rho1 - 1 violated ({rho2} <= {rho1} - 1)"
                    )));
                }
            }
            CommutatorParams::Lemma23 { s, nu, .. } => {
                if !(0.0..1.0).contains(&s) {
                    return Err(Error::Domain(format!("s must lie in [0, 1), got {s}")));
                }
                if !(nu > 0.0 && nu < 2.0) {
                    return Err(Error::Domain(format!("nu must lie in (0, 2), got {nu}")));
                }
                if !(s > nu - 1.0) {
                    return Err(Error::Domain(format!(
                        "constraint s > nu - 1 violated ({s} <= {nu} - 1)"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn hdot(f: &SpectralField, sigma: f64) -> Result<f64> {
    sobolev_norm(f, SobolevIndex::homogeneous(sigma))
}

/// Random mean-zero field confined to the inner third of the spectrum, so
/// pseudo-spectral products incur no dealiasing truncation.
fn inner_third_field(grid: &GridSpec, seed: u64) -> Result<SpectralField> {
    let k_hi = grid.k0() * (grid.dealias_mode_cutoff() as f64) / 2.0;
    init::random_band(grid, grid.k_min(), k_hi.max(grid.k_min() * 3.0), seed)
}

/// `[A, g] f = A(g f) - g (A f)` for the multiplier operator
/// `A = Lambda^{weight} d_l` (optionally pre-localized by `phi_table`).
fn multiplier_commutator(
    f: &SpectralField,
    g: &SpectralField,
    lambda_power: f64,
    ell: usize,
    phi_table: Option<&[f64]>,
) -> Result<SpectralField> {
    let grid = f.grid().clone();
    let n = grid.n();
    let apply_a = |x: &SpectralField| -> Result<SpectralField> {
        let mut out = x.coeffs().to_vec();
        for ix in 0..n {
            for iy in 0..n {
                let i = grid.idx(ix, iy);
                if i == 0 {
                    out[i] = num_complex::Complex64::new(0.0, 0.0);
                    continue;
                }
                let (kx, ky) = grid.wavevector(ix, iy);
                let k_ell = match ell {
                    1 => {
                        if grid.is_nyquist(ix) {
                            0.0
                        } else {
                            kx
                        }
                    }
                    _ => {
                        if grid.is_nyquist(iy) {
                            0.0
                        } else {
                            ky
                        }
                    }
                };
                let mut m = kx.hypot(ky).powf(lambda_power) * k_ell;
                if let Some(table) = phi_table {
                    m *= table[i];
                }
                out[i] *= num_complex::Complex64::new(0.0, m);
            }
        }
        Ok(SpectralField::from_raw_parts(grid.clone(), out))
    };
    let a_of_gf = apply_a(&pointwise_product(g, f)?)?;
    let g_af = pointwise_product(g, &apply_a(f)?)?;
    a_of_gf.axpy(-1.0, &g_af)
}

/// Samples the chosen commutator estimate over random band-limited fields
/// and returns the left/right ratio statistics. Deterministic in the seed.
pub fn sample_commutator_estimate(
    grid: &GridSpec,
    params: &CommutatorParams,
    trials: usize,
    seed: u64,
) -> Result<RatioStats> {
    params.validate()?;
    let mut ratios = Vec::with_capacity(trials);
    let projector = match params {
        CommutatorParams::Lemma23 { .. } => Some(LpProjector::build(grid)?),
        _ => None,
    };
    for trial in 0..trials {
        let base = seed
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(trial as u64);
        let f = inner_third_field(grid, base)?;
        let g = inner_third_field(grid, base.wrapping_add(0x5851_f42d_4c95_7f2d))?;
        let ell = 1 + trial % 2;
        match *params {
            CommutatorParams::Lemma22 { s, rho1, rho2 } => {
                let left_field = multiplier_commutator(&f, &g, -s, ell, None)?;
                let left = hdot(&left_field, rho2 - rho1)?;
                let right = hdot(&g, 2.0 - s - rho1)? * hdot(&f, rho2)?;
                if right > 0.0 {
                    ratios.push(left / right);
                }
            }
            CommutatorParams::Lemma23 { s, rho, nu } => {
                let p = projector.as_ref().unwrap();
                // Localize at a mid-range shell; pair against h = Delta_j of a
                // random field with j = i.
                let i = (p.j_min() + p.j_max()) / 2;
                let h_raw = inner_third_field(grid, base.wrapping_add(0x1234_5678_9abc_def0))?;
                let h = p.block(&h_raw, i)?;
                if h.is_zero() {
                    continue;
                }
                let left_field =
                    multiplier_commutator(&f, &g, s + rho, ell, Some(p.phi_table(i)?))?;
                let left = left_field.inner(&h)?.abs();
                let min_fg = (hdot(&f, 1.0 - nu)? * hdot(&g, s + 1.0)?)
                    .min(hdot(&f, s)? * hdot(&g, 2.0 - nu)?);
                let right = min_fg * hdot(&h, rho + nu)?;
                if right > 0.0 {
                    ratios.push(left / right);
                }
            }
        }
    }
    Ok(RatioStats::from_ratios(ratios))
}

/// Samples the trilinear bound
/// `sum_j |<D_j(u . grad theta), D_j Lambda^{2 sigma} theta>|
///   <= C ||theta||_{Hdot^{1+b-2a}} ||theta||_{Hdot^{sigma+a}}^2`
/// over random band-limited fields. `sigma` must lie in `(2-a, 3-a)`.
pub fn sample_trilinear_bound(
    grid: &GridSpec,
    p: &GsqgParams,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Result<RatioStats> {
    if !(sigma > 2.0 - p.alpha() && sigma < 3.0 - p.alpha()) {
        return Err(Error::Domain(format!(
            "sigma must lie in (2 - alpha, 3 - alpha) = ({}, {}), got {sigma}",
            2.0 - p.alpha(),
            3.0 - p.alpha()
        )));
    }
    let projector = LpProjector::build(grid)?;
    let mut ratios = Vec::with_capacity(trials);
    for trial in 0..trials {
        let theta = inner_third_field(
            grid,
            seed.wrapping_mul(0xd1b5_4a32_d192_ed03)
                .wrapping_add(trial as u64),
        )?;
        let ratio = trilinear_ratio(&projector, &theta, p, sigma)?;
        if let Some(r) = ratio {
            ratios.push(r);
        }
    }
    Ok(RatioStats::from_ratios(ratios))
}

/// One evaluation of the trilinear left/right ratio; `None` when the right
/// side vanishes (zero field).
pub fn trilinear_ratio(
    projector: &LpProjector,
    theta: &SpectralField,
    p: &GsqgParams,
    sigma: f64,
) -> Result<Option<f64>> {
    let nl = nonlinear_term(theta, p.beta())?;
    let weighted = fractional_laplacian(theta, 2.0 * sigma)?;
    let mut left = 0.0;
    for j in projector.j_range() {
        left += crate::lp::block_inner(projector, &nl, &weighted, j)?.abs();
    }
    let right = hdot(theta, p.critical_exponent())? * hdot(theta, sigma + p.alpha())?.powi(2);
    if right == 0.0 {
        return Ok(None);
    }
    Ok(Some(left / right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::heat_semigroup;
    use crate::init;

    fn record_linear_run(alpha: f64, t_end: f64, steps: usize) -> RunRecord {
        // Single-mode linear evolution recorded analytically.
        let g = GridSpec::standard(16).unwrap();
        let p = GsqgParams::new(alpha, 1.6).unwrap();
        let th = init::single_mode(&g, 1, 0, 1.0).unwrap();
        let mut rec = RunRecord::new(&p, &g);
        for i in 0..=steps {
            let t = t_end * i as f64 / steps as f64;
            let state = heat_semigroup(&th, t, alpha).unwrap();
            rec.observe(&state, t, if i == 0 { 0.0 } else { t_end / steps as f64 }, 0.0)
                .unwrap();
        }
        rec
    }

    #[test]
    fn observe_rejects_non_monotone_time() {
        let g = GridSpec::standard(16).unwrap();
        let p = GsqgParams::new(0.25, 1.6).unwrap();
        let th = init::single_mode(&g, 1, 0, 1.0).unwrap();
        let mut rec = RunRecord::new(&p, &g);
        rec.observe(&th, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            rec.observe(&th, 0.0, 0.0, 0.0),
            Err(Error::NonMonotoneTime { .. })
        ));
    }

    #[test]
    fn linear_run_budget_and_identity() {
        let rec = record_linear_run(0.25, 2.0, 400);
        assert_eq!(rec.diss_integral[0], 0.0);
        let (holds, excess) = rec.check_energy_inequality();
        assert!(holds, "excess = {excess}");

        // The exact per-mode balance: norm^2 + 2 * integral is conserved.
        let b0 = rec.crit_inhom_norm[0].powi(2);
        for i in 0..rec.len() {
            let b = rec.crit_inhom_norm[i].powi(2) + 2.0 * rec.diss_integral[i];
            assert!(
                (b - b0).abs() <= 1e-5 * b0,
                "identity drift {} at t={}",
                (b - b0).abs() / b0,
                rec.times[i]
            );
        }
    }

    #[test]
    fn adversarial_growth_is_flagged() {
        let mut rec = record_linear_run(0.25, 1.0, 50);
        let last = rec.energy_budget.len() - 1;
        rec.energy_budget[last] = rec.energy_budget[0] * 1.5;
        let (holds, excess) = rec.check_energy_inequality();
        assert!(!holds);
        assert!((excess - 0.5).abs() < 1e-12);
    }

    #[test]
    fn linear_decay_rate_is_recovered() {
        let rec = record_linear_run(0.25, 25.0, 500);
        let report = rec.check_decay().unwrap();
        // |k| = 1: H-norm decays exactly at e^{-t}.
        assert!((report.fitted_rate - 1.0).abs() <= 1e-3, "{report:?}");
        assert!(report.ratio < 0.2);
    }

    #[test]
    fn decay_requires_horizon() {
        let rec = record_linear_run(0.25, 5.0, 50);
        assert!(matches!(rec.check_decay(), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn linear_regularity_integral_matches_closed_form() {
        // d/dt ||th||^2 = -2 ||L^a th||^2 on |k| = 1 gives
        // integral(t) = (||th_0||_{H}^2 / 2) (1 - e^{-2t}).
        let rec = record_linear_run(0.25, 5.0, 2000);
        let target = 0.5 * rec.crit_inhom_norm[0].powi(2) * (1.0 - (-10.0f64).exp());
        let got = rec.regularity_criterion_integral();
        assert!((got - target).abs() <= 1e-5 * target, "got {got}, want {target}");
    }

    #[test]
    fn commutator_sampler_is_deterministic_and_validates() {
        let g = GridSpec::standard(32).unwrap();
        let params = CommutatorParams::Lemma22 {
            s: 0.5,
            rho1: 0.75,
            rho2: 0.25,
        };
        let a = sample_commutator_estimate(&g, &params, 8, 42).unwrap();
        let b = sample_commutator_estimate(&g, &params, 8, 42).unwrap();
        assert_eq!(a.max, b.max);
        assert!(a.max.unwrap().is_finite());

        assert!(sample_commutator_estimate(
            &g,
            &CommutatorParams::Lemma22 {
                s: 1.5,
                rho1: 0.75,
                rho2: 0.25
            },
            1,
            0
        )
        .is_err());
        assert!(sample_commutator_estimate(
            &g,
            &CommutatorParams::Lemma23 {
                s: 0.1,
                rho: 0.0,
                nu: 1.5
            },
            1,
            0
        )
        .is_err());

        let stats = sample_commutator_estimate(&g, &params, 0, 1).unwrap();
        assert_eq!(stats.trials, 0);
        assert!(stats.max.is_none());
    }

    #[test]
    fn lemma23_sampler_runs() {
        let g = GridSpec::standard(32).unwrap();
        let params = CommutatorParams::Lemma23 {
            s: 0.5,
            rho: 0.3,
            nu: 0.8,
        };
        let stats = sample_commutator_estimate(&g, &params, 6, 9).unwrap();
        assert!(stats.trials > 0);
        assert!(stats.max.unwrap().is_finite());
    }

    #[test]
    fn trilinear_single_mode_vanishes_and_scales() {
        let g = GridSpec::standard(32).unwrap();
        let p = GsqgParams::new(0.25, 1.5).unwrap();
        let projector = LpProjector::build(&g).unwrap();

        let single = init::single_mode(&g, 2, 1, 1.0).unwrap();
        let r = trilinear_ratio(&projector, &single, &p, 2.0).unwrap().unwrap();
        assert!(r <= 1e-13);

        // Cubic homogeneity: ratio invariant under theta -> 2 theta.
        let theta = init::random_band(&g, 1.0, 3.0, 5).unwrap();
        let r1 = trilinear_ratio(&projector, &theta, &p, 2.0).unwrap().unwrap();
        let r2 = trilinear_ratio(&projector, &theta.scaled(2.0), &p, 2.0)
            .unwrap()
            .unwrap();
        assert!((r1 - r2).abs() <= 1e-12 * r1.max(1.0));

        assert!(sample_trilinear_bound(&g, &p, 1.0, 1, 0).is_err());
    }
}
