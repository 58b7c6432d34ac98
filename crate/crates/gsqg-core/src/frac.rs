//! Fractional Laplacian powers, Sobolev norms, the fractional heat
//! semigroup, sharp frequency splitting and the critical-space
//! interpolation inequality.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::transform::apply_real_multiplier;

/// Order and flavor of a Sobolev norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevIndex {
    pub sigma: f64,
    pub homogeneous: bool,
}

impl SobolevIndex {
    pub fn homogeneous(sigma: f64) -> Self {
        Self {
            sigma,
            homogeneous: true,
        }
    }

    /// Inhomogeneous split form; requires `sigma >= 0`.
    pub fn inhomogeneous(sigma: f64) -> Result<Self> {
        if sigma < 0.0 {
            return Err(Error::Domain(format!(
                "inhomogeneous split form requires sigma >= 0, got {sigma}"
            )));
        }
        Ok(Self {
            sigma,
            homogeneous: false,
        })
    }
}

/// `Lambda^sigma f`: multiplier `|k|^sigma`. Mean-zero input keeps negative
/// orders well defined; a nonzero mean with `sigma < 0` is rejected.
pub fn fractional_laplacian(f: &SpectralField, sigma: f64) -> Result<SpectralField> {
    if sigma < 0.0 && f.coeffs()[0].norm() != 0.0 {
        return Err(Error::SingularMode);
    }
    apply_real_multiplier(f, |kx, ky| kx.hypot(ky).powf(sigma))
}

/// Sobolev norm under the crate's fixed normalization:
/// homogeneous `(period^2 sum |k|^{2 sigma} |c_k|^2)^{1/2}`, inhomogeneous
/// via the split form `(||f||_{L2}^2 + ||f||_{Hdot^sigma}^2)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, idx: SobolevIndex) -> Result<f64> {
    f.check_finite()?;
    let grid = f.grid();
    let n = grid.n();
    let mut hom_sq = 0.0;
    for i in 1..grid.len() {
        let r = grid.k_norm(i / n, i % n);
        hom_sq += r.powf(2.0 * idx.sigma) * f.coeffs()[i].norm_sqr();
    }
    hom_sq *= grid.period() * grid.period();
    if idx.homogeneous {
        Ok(hom_sq.sqrt())
    } else {
        Ok((f.l2_norm().powi(2) + hom_sq).sqrt())
    }
}

/// `e^{-t Lambda^{2 alpha}} f`.
pub fn heat_semigroup(f: &SpectralField, t: f64, alpha: f64) -> Result<SpectralField> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("semigroup time must be >= 0, got {t}")));
    }
    apply_real_multiplier(f, |kx, ky| (-t * kx.hypot(ky).powf(2.0 * alpha)).exp())
}

/// Sharp frequency split at radius `delta`: `w` carries modes with
/// `|k| <= delta`, `v = f - w` the rest. The split is coefficient-exact.
pub fn split_frequencies(f: &SpectralField, delta: f64) -> Result<(SpectralField, SpectralField)> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let grid = f.grid().clone();
    let n = grid.n();
    let mut low = f.coeffs().to_vec();
    let mut high = f.coeffs().to_vec();
    for i in 0..grid.len() {
        if grid.k_norm(i / n, i % n) <= delta {
            high[i] = Complex64::new(0.0, 0.0);
        } else {
            low[i] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((
        SpectralField::from_raw_parts(grid.clone(), low),
        SpectralField::from_raw_parts(grid, high),
    ))
}

/// Margin of the critical-space interpolation inequality with constant 1:
/// `||f||_{L2}^zeta ||f||_{Hdot^{1+b-a}}^{1-zeta} - ||f||_{Hdot^{1+b-2a}}`
/// with `zeta = a / (1 + b - a)`. Nonnegative for every mean-zero field.
pub fn check_interpolation(f: &SpectralField, alpha: f64, beta: f64) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroField);
    }
    let zeta = alpha / (1.0 + beta - alpha);
    let l2 = f.l2_norm();
    let high = sobolev_norm(f, SobolevIndex::homogeneous(1.0 + beta - alpha))?;
    let crit = sobolev_norm(f, SobolevIndex::homogeneous(1.0 + beta - 2.0 * alpha))?;
    Ok(l2.powf(zeta) * high.powf(1.0 - zeta) - crit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn single_mode(grid: &GridSpec, m1: i64, m2: i64) -> SpectralField {
        let mut f = SpectralField::zero(grid);
        f.set_mode_pair(m1, m2, Complex64::new(0.5, 0.0)).unwrap();
        f
    }

    #[test]
    fn laplacian_on_unit_shell_is_identity() {
        let g = GridSpec::standard(16).unwrap();
        let f = single_mode(&g, 1, 0);
        for &s in &[-1.5, -0.5, 0.0, 0.7, 2.0] {
            let out = fractional_laplacian(&f, s).unwrap();
            assert!(out.axpy(-1.0, &f).unwrap().l2_norm() <= 1e-14);
        }
    }

    #[test]
    fn half_power_on_shell_two() {
        let g = GridSpec::standard(16).unwrap();
        let f = single_mode(&g, 0, 2);
        let out = fractional_laplacian(&f, 0.5).unwrap();
        let expect = f.scaled(2.0f64.sqrt());
        assert!(out.axpy(-1.0, &expect).unwrap().l2_norm() <= 1e-14);
    }

    #[test]
    fn semigroup_of_powers_composes() {
        let g = GridSpec::standard(16).unwrap();
        let mut f = SpectralField::zero(&g);
        f.set_mode_pair(1, 0, Complex64::new(0.5, 0.0)).unwrap();
        f.set_mode_pair(3, -2, Complex64::new(0.1, 0.2)).unwrap();
        let round = fractional_laplacian(&fractional_laplacian(&f, 1.0).unwrap(), -1.0).unwrap();
        assert!(round.axpy(-1.0, &f).unwrap().l2_norm() <= 1e-13 * f.l2_norm());
    }

    #[test]
    fn negative_order_rejects_nonzero_mean() {
        let g = GridSpec::standard(16).unwrap();
        let mut f = SpectralField::zero(&g);
        f.coeffs_mut()[0] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            fractional_laplacian(&f, -0.5),
            Err(Error::SingularMode)
        ));
    }

    #[test]
    fn sobolev_norms_of_cosines() {
        let g = GridSpec::standard(32).unwrap();
        let f = single_mode(&g, 1, 0);
        let expect = PI * 2.0f64.sqrt();
        assert!((sobolev_norm(&f, SobolevIndex::homogeneous(0.0)).unwrap() - expect).abs() < 1e-12);
        for &s in &[-1.0, 0.5, 2.1] {
            let v = sobolev_norm(&f, SobolevIndex::homogeneous(s)).unwrap();
            assert!((v - expect).abs() < 1e-12);
        }
        let f2 = single_mode(&g, 0, 2);
        let v = sobolev_norm(&f2, SobolevIndex::homogeneous(1.0)).unwrap();
        assert!((v - 2.0 * expect).abs() < 1e-12);

        // Inhomogeneous split form on a single mode: sqrt(1 + |k|^{2s}) scaling.
        let vi = sobolev_norm(&f2, SobolevIndex::inhomogeneous(1.0).unwrap()).unwrap();
        assert!((vi - expect * 5.0f64.sqrt()).abs() < 1e-12);
        assert!(SobolevIndex::inhomogeneous(-0.1).is_err());
    }

    #[test]
    fn heat_semigroup_basics() {
        let g = GridSpec::standard(16).unwrap();
        let f = single_mode(&g, 1, 0);
        let id = heat_semigroup(&f, 0.0, 0.25).unwrap();
        assert!(id.axpy(-1.0, &f).unwrap().l2_norm() == 0.0);

        // |k| = 1 decays at e^{-t} for any alpha.
        let out = heat_semigroup(&f, 0.7, 0.4).unwrap();
        let expect = f.scaled((-0.7f64).exp());
        assert!(out.axpy(-1.0, &expect).unwrap().l2_norm() <= 1e-15);

        // cos 2 x2 at alpha = 0.25: rate |k|^{1/2} = sqrt(2).
        let f2 = single_mode(&g, 0, 2);
        let out = heat_semigroup(&f2, 1.0, 0.25).unwrap();
        let expect = f2.scaled((-(2.0f64.sqrt())).exp());
        assert!(out.axpy(-1.0, &expect).unwrap().l2_norm() <= 1e-15);

        assert!(heat_semigroup(&f, -0.1, 0.25).is_err());
    }

    #[test]
    fn semigroup_law_and_monotonicity() {
        let g = GridSpec::standard(16).unwrap();
        let mut f = SpectralField::zero(&g);
        f.set_mode_pair(1, 0, Complex64::new(0.5, 0.0)).unwrap();
        f.set_mode_pair(4, -3, Complex64::new(0.3, -0.2)).unwrap();
        let ab = heat_semigroup(&heat_semigroup(&f, 0.3, 0.25).unwrap(), 0.45, 0.25).unwrap();
        let once = heat_semigroup(&f, 0.75, 0.25).unwrap();
        assert!(ab.axpy(-1.0, &once).unwrap().l2_norm() <= 1e-13 * f.l2_norm());

        for &s in &[-0.5, 0.0, 1.3] {
            let idx = SobolevIndex::homogeneous(s);
            let mut last = f64::INFINITY;
            for &t in &[0.0, 0.1, 0.5, 1.0, 3.0] {
                let v = sobolev_norm(&heat_semigroup(&f, t, 0.3).unwrap(), idx).unwrap();
                assert!(v <= last * (1.0 + 1e-14));
                last = v;
            }
        }
    }

    #[test]
    fn frequency_split_cases() {
        let g = GridSpec::standard(16).unwrap();
        let mut f = SpectralField::zero(&g);
        f.set_mode_pair(1, 0, Complex64::new(0.5, 0.0)).unwrap();
        f.set_mode_pair(0, 2, Complex64::new(0.5, 0.0)).unwrap();

        let (w, v) = split_frequencies(&f, 0.5).unwrap();
        assert!(w.is_zero());
        assert_eq!(v, f);

        let (w, v) = split_frequencies(&f, 100.0).unwrap();
        assert_eq!(w, f);
        assert!(v.is_zero());

        let (w, v) = split_frequencies(&f, 1.5).unwrap();
        assert_eq!(w.coeff_at_mode(1, 0), Complex64::new(0.5, 0.0));
        assert_eq!(w.coeff_at_mode(0, 2), Complex64::new(0.0, 0.0));
        assert_eq!(v.coeff_at_mode(0, 2), Complex64::new(0.5, 0.0));

        // Exact reconstruction and Parseval split.
        let sum = w.axpy(1.0, &v).unwrap();
        assert_eq!(sum, f);
        let total = f.l2_norm().powi(2);
        assert!((w.l2_norm().powi(2) + v.l2_norm().powi(2) - total).abs() <= 1e-15 * total);

        assert!(split_frequencies(&f, 0.0).is_err());
    }

    #[test]
    fn interpolation_margin_cases() {
        let g = GridSpec::standard(16).unwrap();
        let (alpha, beta) = (0.25, 1.6);

        // Single modes: exact equality.
        for m in [(1i64, 0i64), (0, 2)] {
            let f = single_mode(&g, m.0, m.1);
            let margin = check_interpolation(&f, alpha, beta).unwrap();
            assert!(margin.abs() <= 1e-12);
        }

        // Two modes: strictly positive margin.
        let mut f = SpectralField::zero(&g);
        f.set_mode_pair(1, 0, Complex64::new(0.5, 0.0)).unwrap();
        f.set_mode_pair(0, 2, Complex64::new(0.5, 0.0)).unwrap();
        let margin = check_interpolation(&f, alpha, beta).unwrap();
        assert!(margin > 0.0);

        assert!(matches!(
            check_interpolation(&SpectralField::zero(&g), alpha, beta),
            Err(Error::ZeroField)
        ));
    }
}
