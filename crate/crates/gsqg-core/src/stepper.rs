//! Exponential time differencing (ETD-RK2) for the gSQG evolution.
//!
//! The fractional dissipation is diagonal in Fourier space and integrated
//! exactly; only the transport term is approximated, so the scheme is exact
//! on linear subproblems and second order overall.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::model::{nonlinear_term, velocity, GsqgParams};
use crate::transform::to_physical;

/// Step-size policy. With `adaptive` set, `dt = min(dt_max, cfl h / max|u|)`;
/// otherwise `dt_max` is used as a fixed step.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub cfl: f64,
    pub dt_max: f64,
    pub adaptive: bool,
}

impl StepControl {
    pub fn new(cfl: f64, dt_max: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::Domain(format!("cfl must lie in (0, 1], got {cfl}")));
        }
        if !(dt_max > 0.0) || !dt_max.is_finite() {
            return Err(Error::Domain(format!("dt_max must be positive, got {dt_max}")));
        }
        Ok(Self {
            cfl,
            dt_max,
            adaptive: true,
        })
    }

    /// Fixed-step control (for convergence studies).
    pub fn fixed(dt: f64) -> Result<Self> {
        let mut sc = Self::new(1.0, dt)?;
        sc.adaptive = false;
        Ok(sc)
    }
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            dt_max: 1e-2,
            adaptive: true,
        }
    }
}

/// `phi_1(z) = (e^z - 1) / z`, series-evaluated near zero to avoid
/// catastrophic cancellation.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        // 6-term Taylor expansion.
        let mut acc = 0.0;
        let mut term = 1.0;
        for k in 1..=6 {
            acc += term;
            term *= z / (k + 1) as f64;
        }
        acc
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `phi_2(z) = (e^z - 1 - z) / z^2`.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let mut acc = 0.0;
        let mut term = 0.5;
        for k in 2..=7 {
            acc += term;
            term *= z / (k + 1) as f64;
        }
        acc
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// Maximum advecting speed `max_x |u_theta(x)|` on the grid.
pub fn max_speed(theta: &SpectralField, beta: f64) -> Result<f64> {
    let (u1, u2) = velocity(theta, beta)?;
    let p1 = to_physical(&u1)?;
    let p2 = to_physical(&u2)?;
    Ok(p1
        .iter()
        .zip(&p2)
        .map(|(a, b)| a.hypot(*b))
        .fold(0.0f64, f64::max))
}

/// One ETD-RK2 step of size `dt`. Exact on the dissipative part; preserves
/// mean zero and Hermitian symmetry exactly.
pub fn step_etdrk2(theta: &SpectralField, p: &GsqgParams, dt: f64) -> Result<SpectralField> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("step size must be positive, got {dt}")));
    }
    let grid = theta.grid().clone();
    let n = grid.n();
    let two_alpha = 2.0 * p.alpha();

    let n0 = nonlinear_term(theta, p.beta())?.scaled(-1.0);

    let mut stage = vec![Complex64::new(0.0, 0.0); grid.len()];
    for ix in 0..n {
        for iy in 0..n {
            let i = grid.idx(ix, iy);
            let z = -dt * grid.k_norm(ix, iy).powf(two_alpha);
            stage[i] = z.exp() * theta.coeffs()[i] + dt * phi1(z) * n0.coeffs()[i];
        }
    }
    let a = SpectralField::from_raw_parts(grid.clone(), stage);

    let n1 = nonlinear_term(&a, p.beta())?.scaled(-1.0);
    let mut out = a.coeffs().to_vec();
    for ix in 0..n {
        for iy in 0..n {
            let i = grid.idx(ix, iy);
            let z = -dt * grid.k_norm(ix, iy).powf(two_alpha);
            out[i] += dt * phi2(z) * (n1.coeffs()[i] - n0.coeffs()[i]);
        }
    }
    out[0] = Complex64::new(0.0, 0.0);
    Ok(SpectralField::from_raw_parts(grid, out))
}

/// Per-step observer data handed to `integrate` callbacks.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub t: f64,
    /// Size of the step that produced this state (0 for the initial state).
    pub dt: f64,
    /// Advecting speed bound used for the CFL decision.
    pub max_speed: f64,
}

/// Advances `theta0` from `t0` to `t_end`, invoking the observer at `t0`,
/// at every crossing of the `observe_every` cadence (steps are clamped to
/// land on those times exactly) and at `t_end`. With `observe_every <= 0`
/// only the endpoints are observed.
pub fn integrate<F>(
    theta0: &SpectralField,
    p: &GsqgParams,
    sc: &StepControl,
    t0: f64,
    t_end: f64,
    observe_every: f64,
    observer: &mut F,
) -> Result<SpectralField>
where
    F: FnMut(&SpectralField, StepInfo) -> Result<()>,
{
    if t_end < t0 {
        return Err(Error::Domain(format!(
            "t_end = {t_end} precedes t0 = {t0}"
        )));
    }
    let mut theta = theta0.clone();
    let mut t = t0;
    let mut last_l2 = theta.l2_norm();

    let speed0 = max_speed(&theta, p.beta())?;
    observer(
        &theta,
        StepInfo {
            t,
            dt: 0.0,
            max_speed: speed0,
        },
    )?;
    if t_end == t0 {
        return Ok(theta);
    }

    let cadence = if observe_every > 0.0 {
        observe_every
    } else {
        f64::INFINITY
    };
    let mut next_obs = t0 + cadence;
    let eps = 1e-12 * (1.0 + t_end.abs());

    while t < t_end - eps {
        let speed = max_speed(&theta, p.beta())?;
        if !speed.is_finite() {
            return Err(Error::BlowUp { t, last_l2 });
        }
        let mut dt = if sc.adaptive && speed > 0.0 {
            sc.dt_max.min(sc.cfl * theta.grid().h() / speed)
        } else {
            sc.dt_max
        };
        if next_obs < t_end {
            dt = dt.min(next_obs - t);
        }
        dt = dt.min(t_end - t);
        theta = step_etdrk2(&theta, p, dt)?;
        t += dt;

        let l2 = theta.l2_norm();
        if !l2.is_finite() {
            return Err(Error::BlowUp { t, last_l2 });
        }
        last_l2 = l2;

        let at_obs = (t - next_obs).abs() <= eps || t > next_obs;
        let at_end = t >= t_end - eps;
        if at_obs || at_end {
            observer(
                &theta,
                StepInfo {
                    t,
                    dt,
                    max_speed: speed,
                },
            )?;
            while next_obs <= t + eps {
                next_obs += cadence;
            }
        }
    }
    Ok(theta)
}

/// Relative residual of the mild-solution (Duhamel) representation
/// evaluated with composite trapezoid quadrature over stored snapshots:
/// `theta(T) = e^{-T L} theta(0) - int_0^T e^{-(T-s) L} (u . grad theta)(s) ds`.
pub fn duhamel_residual(samples: &[(f64, SpectralField)], p: &GsqgParams) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no snapshots".into()));
    }
    let t0 = samples[0].0;
    let t_end = samples[samples.len() - 1].0;
    if t_end == t0 {
        return Ok(0.0);
    }
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 snapshots, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::NonMonotoneTime {
                last: w[0].0,
                new: w[1].0,
            });
        }
    }

    let alpha = p.alpha();
    let final_theta = &samples[samples.len() - 1].1;
    let mut rhs = crate::frac::heat_semigroup(&samples[0].1, t_end - t0, alpha)?;

    // Composite trapezoid over possibly nonuniform nodes.
    for (i, (s, theta_s)) in samples.iter().enumerate() {
        let w_left = if i > 0 { samples[i].0 - samples[i - 1].0 } else { 0.0 };
        let w_right = if i + 1 < samples.len() {
            samples[i + 1].0 - samples[i].0
        } else {
            0.0
        };
        let weight = 0.5 * (w_left + w_right);
        let nl = nonlinear_term(theta_s, p.beta())?;
        let propagated = crate::frac::heat_semigroup(&nl, t_end - s, alpha)?;
        rhs = rhs.axpy(-weight, &propagated)?;
    }

    let denom = final_theta.l2_norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(final_theta.axpy(-1.0, &rhs)?.l2_norm() / denom)
}

/// Richardson self-convergence order from fixed-step runs at `dt`, `dt/2`
/// and `dt/4`: `log2(||x_dt - x_{dt/2}|| / ||x_{dt/2} - x_{dt/4}||)`.
pub fn self_convergence_order(
    theta0: &SpectralField,
    p: &GsqgParams,
    dt: f64,
    t_end: f64,
) -> Result<f64> {
    let run = |h: f64| -> Result<SpectralField> {
        let sc = StepControl::fixed(h)?;
        integrate(theta0, p, &sc, 0.0, t_end, -1.0, &mut |_, _| Ok(()))
    };
    let coarse = run(dt)?;
    let mid = run(dt / 2.0)?;
    let fine = run(dt / 4.0)?;
    let e1 = coarse.axpy(-1.0, &mid)?.l2_norm();
    let e2 = mid.axpy(-1.0, &fine)?.l2_norm();
    if e2 == 0.0 {
        return Err(Error::Domain(
            "self-convergence differences vanished; increase dt or t_end".into(),
        ));
    }
    Ok((e1 / e2).log2())
}
