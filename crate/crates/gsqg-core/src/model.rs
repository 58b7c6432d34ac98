//! The gSQG right-hand side: constitutive velocity law, dealiased
//! pseudo-spectral transport term, its commutator (divergence) form, regime
//! classification and the static scaling-covariance check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::transform::{dealias, to_physical, to_spectral};

/// Dissipation strength relative to the constitutive law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

/// Structure of the evolution: quasilinear below `beta = 2 alpha + 1`,
/// fully nonlinear at and above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Quasilinear,
    FullyNonlinear,
}

/// Model parameters `(alpha, beta)` with their derived classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsqgParams {
    alpha: f64,
    beta: f64,
}

impl GsqgParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta < 2.0) {
            return Err(Error::Domain(format!("beta must lie in (0, 2), got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Exponent of the critical space `Hdot^{1 + beta - 2 alpha}`.
    pub fn critical_exponent(&self) -> f64 {
        1.0 + self.beta - 2.0 * self.alpha
    }

    pub fn regime(&self) -> Regime {
        if self.beta > 2.0 * self.alpha {
            Regime::Supercritical
        } else if self.beta == 2.0 * self.alpha {
            Regime::Critical
        } else {
            Regime::Subcritical
        }
    }

    pub fn structure(&self) -> Structure {
        if self.beta >= 2.0 * self.alpha + 1.0 {
            Structure::FullyNonlinear
        } else {
            Structure::Quasilinear
        }
    }

    /// True when `(alpha, beta)` sits inside the small-data global-existence
    /// window: `alpha in (0, 1/2)` and `beta in [2 alpha + 1, 2)`.
    pub fn in_theorem_scope(&self) -> bool {
        self.alpha < 0.5 && self.beta >= 2.0 * self.alpha + 1.0
    }
}

/// Wavevector with Nyquist components zeroed, for differentiation
/// multipliers (keeps derivatives of real fields real).
#[inline]
fn deriv_wavevector(grid: &GridSpec, ix: usize, iy: usize) -> (f64, f64) {
    let (kx, ky) = grid.wavevector(ix, iy);
    (
        if grid.is_nyquist(ix) { 0.0 } else { kx },
        if grid.is_nyquist(iy) { 0.0 } else { ky },
    )
}

/// Constitutive velocity `u = (d_{x2} L^{b-2} th, -d_{x1} L^{b-2} th)`;
/// divergence-free by construction.
pub fn velocity(theta: &SpectralField, beta: f64) -> Result<(SpectralField, SpectralField)> {
    theta.check_finite()?;
    if theta.coeffs()[0].norm() != 0.0 {
        return Err(Error::SingularMode);
    }
    let grid = theta.grid().clone();
    let n = grid.n();
    let mut u1 = theta.coeffs().to_vec();
    let mut u2 = theta.coeffs().to_vec();
    for ix in 0..n {
        for iy in 0..n {
            let i = grid.idx(ix, iy);
            if i == 0 {
                continue;
            }
            let r = grid.k_norm(ix, iy);
            let (kx, ky) = deriv_wavevector(&grid, ix, iy);
            let m = r.powf(beta - 2.0);
            u1[i] *= Complex64::new(0.0, ky * m);
            u2[i] *= Complex64::new(0.0, -kx * m);
        }
    }
    Ok((
        SpectralField::from_raw_parts(grid.clone(), u1),
        SpectralField::from_raw_parts(grid, u2),
    ))
}

/// Gradient `(d_{x1} f, d_{x2} f)` as spectral fields.
pub fn gradient(f: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = f.grid().clone();
    let n = grid.n();
    let mut gx = f.coeffs().to_vec();
    let mut gy = f.coeffs().to_vec();
    for ix in 0..n {
        for iy in 0..n {
            let i = grid.idx(ix, iy);
            let (kx, ky) = deriv_wavevector(&grid, ix, iy);
            gx[i] *= Complex64::new(0.0, kx);
            gy[i] *= Complex64::new(0.0, ky);
        }
    }
    (
        SpectralField::from_raw_parts(grid.clone(), gx),
        SpectralField::from_raw_parts(grid, gy),
    )
}

/// Pseudo-spectral product of two spectral fields, dealiased.
pub fn pointwise_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let pa = to_physical(a)?;
    let pb = to_physical(b)?;
    let samples: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    Ok(dealias(&to_spectral(a.grid(), &samples)?.field))
}

/// The transport term `u_theta . grad theta`, computed pseudo-spectrally
/// with 2/3 dealiasing. Mean-zero exactly.
pub fn nonlinear_term(theta: &SpectralField, beta: f64) -> Result<SpectralField> {
    let (u1, u2) = velocity(theta, beta)?;
    let (tx, ty) = gradient(theta);
    let p1 = to_physical(&u1)?;
    let p2 = to_physical(&u2)?;
    let q1 = to_physical(&tx)?;
    let q2 = to_physical(&ty)?;
    let samples: Vec<f64> = (0..p1.len())
        .map(|i| p1[i] * q1[i] + p2[i] * q2[i])
        .collect();
    let mut out = dealias(&to_spectral(theta.grid(), &samples)?.field);
    out.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    out.check_finite()?;
    Ok(out)
}

/// Full right-hand side `-Lambda^{2 alpha} theta - u_theta . grad theta`.
pub fn rhs(theta: &SpectralField, p: &GsqgParams) -> Result<SpectralField> {
    let diss = crate::frac::fractional_laplacian(theta, 2.0 * p.alpha())?;
    let nl = nonlinear_term(theta, p.beta())?;
    diss.scaled(-1.0).axpy(-1.0, &nl)
}

/// Commutator (divergence) form of the transport term:
/// `grad^perp Lambda^{b-2} theta . grad theta + Lambda^{b-2} div(theta grad^perp theta)`.
/// The second term is a discretization of zero; the sum agrees with
/// `nonlinear_term` up to dealiasing error on band-limited fields.
pub fn commutator_form(theta: &SpectralField, beta: f64) -> Result<SpectralField> {
    // First term is u . grad theta with u = grad^perp Lambda^{b-2} theta.
    let first = nonlinear_term(theta, beta)?;

    // Second term: theta grad^perp theta = (theta d2 theta, -theta d1 theta),
    // divergence, then Lambda^{b-2}.
    let (tx, ty) = gradient(theta);
    let a = pointwise_product(theta, &ty)?; // theta d2 theta
    let b = pointwise_product(theta, &tx)?.scaled(-1.0); // -theta d1 theta
    let (ax, _) = gradient(&a);
    let (_, by) = gradient(&b);
    let div = ax.axpy(1.0, &by)?;
    let second = crate::frac::fractional_laplacian(&div, beta - 2.0)?;

    let mut out = first.axpy(1.0, &second)?;
    out.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    Ok(out)
}

/// Largest `max(|m1|, |m2|)` over the support, for resolution checks.
pub fn max_mode_inf(f: &SpectralField) -> i64 {
    let grid = f.grid();
    let n = grid.n();
    let mut m = 0i64;
    for ix in 0..n {
        for iy in 0..n {
            if f.coeff(ix, iy).norm_sqr() > 0.0 {
                m = m
                    .max(grid.mode(ix).abs())
                    .max(grid.mode(iy).abs());
            }
        }
    }
    m
}

/// `f(lambda x)` by mapping mode `m` to `lambda m`; errors when a
/// significantly populated mode leaves the lattice. Coefficients below
/// 1e-13 of the peak (FFT roundoff floor) are dropped silently.
pub fn scale_lattice(f: &SpectralField, lambda: i64) -> Result<SpectralField> {
    if lambda < 1 {
        return Err(Error::Domain(format!(
            "lattice scaling factor must be >= 1, got {lambda}"
        )));
    }
    let grid = f.grid();
    let n = grid.n();
    let floor = 1e-13 * f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out = SpectralField::zero(grid);
    for ix in 0..n {
        for iy in 0..n {
            let c = f.coeff(ix, iy);
            if c.norm() <= floor {
                continue;
            }
            let m1 = grid.mode(ix) * lambda;
            let m2 = grid.mode(iy) * lambda;
            let (jx, jy) = grid
                .index_of_mode(m1)
                .zip(grid.index_of_mode(m2))
                .ok_or_else(|| {
                    Error::ResolutionExceeded(format!(
                        "mode ({}, {}) scaled by {lambda} leaves the lattice",
                        grid.mode(ix),
                        grid.mode(iy)
                    ))
                })?;
            let j = grid.idx(jx, jy);
            out.coeffs_mut()[j] = c;
        }
    }
    Ok(out)
}

/// Verifies the static scaling covariance of the generator on the grid:
/// with `theta_l(x) = l^{2a-b} theta(l x)`,
/// (a) `u_{theta_l}(x) = l^{2a-1} u_theta(l x)` and
/// (b) `rhs(theta_l)(x) = l^{4a-b} rhs(theta)(l x)`.
/// Returns the maximum pointwise discrepancy over both identities.
pub fn check_scaling_covariance(
    theta: &SpectralField,
    p: &GsqgParams,
    lambda: i64,
) -> Result<f64> {
    let (a, b) = (p.alpha(), p.beta());
    let m_inf = max_mode_inf(theta);
    // Quadratic products of the rescaled field must stay inside the dealias
    // mask so both sides see the same (absent) truncation.
    if 2 * lambda * m_inf > theta.grid().dealias_mode_cutoff() {
        return Err(Error::ResolutionExceeded(format!(
            "support radius {m_inf} too large for lambda = {lambda} on this grid"
        )));
    }
    let lf = lambda as f64;
    let theta_l = scale_lattice(theta, lambda)?.scaled(lf.powf(2.0 * a - b));

    let mut worst = 0.0f64;
    let mut compare = |lhs: &SpectralField, rhs_field: &SpectralField| -> Result<()> {
        let x = to_physical(lhs)?;
        let y = to_physical(rhs_field)?;
        for (u, v) in x.iter().zip(&y) {
            worst = worst.max((u - v).abs());
        }
        Ok(())
    };

    let (l1, l2) = velocity(&theta_l, b)?;
    let (u1, u2) = velocity(theta, b)?;
    compare(&l1, &scale_lattice(&u1, lambda)?.scaled(lf.powf(2.0 * a - 1.0)))?;
    compare(&l2, &scale_lattice(&u2, lambda)?.scaled(lf.powf(2.0 * a - 1.0)))?;

    let lhs_rhs = rhs(&theta_l, p)?;
    let rhs_rhs = scale_lattice(&rhs(theta, p)?, lambda)?.scaled(lf.powf(4.0 * a - b));
    compare(&lhs_rhs, &rhs_rhs)?;

    Ok(worst)
}
