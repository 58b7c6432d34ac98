//! Spectral representation of a real, mean-zero scalar on the torus.
//!
//! Coefficients are stored row-major over the full `n x n` mode lattice in
//! standard FFT order. The normalization is fixed once for the whole crate:
//! `coeff(k)` is the coefficient of `e^{i k . x}`, so
//! `||f||_{L2}^2 = period^2 * sum_k |coeff(k)|^2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// The zero field.
    pub fn zero(grid: &GridSpec) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Wraps raw coefficients, enforcing Hermitian symmetry and mean zero.
    pub fn from_coeffs(grid: &GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let mut f = Self {
            grid: grid.clone(),
            coeffs,
        };
        f.check_finite()?;
        f.symmetrize();
        f.coeffs[0] = Complex64::new(0.0, 0.0);
        Ok(f)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    #[inline]
    pub fn coeff(&self, ix: usize, iy: usize) -> Complex64 {
        self.coeffs[self.grid.idx(ix, iy)]
    }

    /// Coefficient at a signed mode pair, zero off the lattice.
    pub fn coeff_at_mode(&self, m1: i64, m2: i64) -> Complex64 {
        match (self.grid.index_of_mode(m1), self.grid.index_of_mode(m2)) {
            (Some(ix), Some(iy)) => self.coeff(ix, iy),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Sets `coeff(m) = v` and `coeff(-m) = conj(v)`. Errors when the mode
    /// (or its mirror) falls off the lattice, or when `m = 0`.
    pub fn set_mode_pair(&mut self, m1: i64, m2: i64, v: Complex64) -> Result<()> {
        if m1 == 0 && m2 == 0 {
            return Err(Error::InvalidField("mean mode must stay zero".into()));
        }
        let (ix, iy) = self
            .grid
            .index_of_mode(m1)
            .zip(self.grid.index_of_mode(m2))
            .ok_or_else(|| {
                Error::ResolutionExceeded(format!("mode ({m1}, {m2}) off the lattice"))
            })?;
        let (jx, jy) = self
            .grid
            .index_of_mode(-m1)
            .zip(self.grid.index_of_mode(-m2))
            .ok_or_else(|| {
                Error::ResolutionExceeded(format!("mirror mode ({}, {}) off the lattice", -m1, -m2))
            })?;
        let i = self.grid.idx(ix, iy);
        let j = self.grid.idx(jx, jy);
        self.coeffs[i] = v;
        if j != i {
            self.coeffs[j] = v.conj();
        } else {
            // Self-conjugate (Nyquist) mode must be real.
            self.coeffs[i] = Complex64::new(v.re, 0.0);
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidField("non-finite coefficient".into()))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// Projects onto the Hermitian-symmetric part:
    /// `c(k) <- (c(k) + conj(c(-k))) / 2`.
    pub fn symmetrize(&mut self) {
        let n = self.grid.n();
        for ix in 0..n {
            let jx = (n - ix) % n;
            for iy in 0..n {
                let jy = (n - iy) % n;
                let i = self.grid.idx(ix, iy);
                let j = self.grid.idx(jx, jy);
                if i < j {
                    let a = self.coeffs[i];
                    let b = self.coeffs[j];
                    let half = 0.5 * (a + b.conj());
                    self.coeffs[i] = half;
                    self.coeffs[j] = half.conj();
                } else if i == j {
                    self.coeffs[i] = Complex64::new(self.coeffs[i].re, 0.0);
                }
            }
        }
    }

    /// Maximum asymmetry `|c(k) - conj(c(-k))|` over the lattice.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut worst = 0.0f64;
        for ix in 0..n {
            let jx = (n - ix) % n;
            for iy in 0..n {
                let jy = (n - iy) % n;
                let d = (self.coeff(ix, iy) - self.coeff(jx, jy).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `||f||_{L2} = period * sqrt(sum |c|^2)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        self.grid.period() * s.sqrt()
    }

    /// `<f, g>_{L2} = period^2 * Re sum conj(f_k) g_k`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        Ok(self.grid.period() * self.grid.period() * s)
    }

    /// Coefficient-wise `self + scale * other`.
    pub fn axpy(&self, scale: f64, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            coeffs,
        })
    }

    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| scale * c).collect(),
        }
    }

    /// Largest integer-mode radius carrying a nonzero coefficient, zero for
    /// the zero field.
    pub fn max_mode_radius(&self) -> f64 {
        let n = self.grid.n();
        let mut r = 0.0f64;
        for ix in 0..n {
            for iy in 0..n {
                if self.coeff(ix, iy).norm_sqr() > 0.0 {
                    let m1 = self.grid.mode(ix) as f64;
                    let m2 = self.grid.mode(iy) as f64;
                    r = r.max(m1.hypot(m2));
                }
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn set_mode_pair_keeps_symmetry() {
        let g = GridSpec::standard(16).unwrap();
        let mut f = SpectralField::zero(&g);
        f.set_mode_pair(3, -2, Complex64::new(0.5, 0.25)).unwrap();
        assert_eq!(f.coeff_at_mode(-3, 2), Complex64::new(0.5, -0.25));
        assert_eq!(f.hermitian_defect(), 0.0);
    }

    #[test]
    fn mean_mode_is_protected() {
        let g = GridSpec::standard(16).unwrap();
        let mut f = SpectralField::zero(&g);
        assert!(f.set_mode_pair(0, 0, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn l2_norm_of_cosine() {
        // cos(x1) has coefficients 1/2 at (+-1, 0); ||cos x1||_{L2} = pi sqrt(2).
        let g = GridSpec::standard(32).unwrap();
        let mut f = SpectralField::zero(&g);
        f.set_mode_pair(1, 0, Complex64::new(0.5, 0.0)).unwrap();
        let expect = PI * 2.0f64.sqrt();
        assert!((f.l2_norm() - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn from_coeffs_rejects_non_finite() {
        let g = GridSpec::standard(8).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); g.len()];
        c[3] = Complex64::new(f64::NAN, 0.0);
        assert!(SpectralField::from_coeffs(&g, c).is_err());
    }
}
