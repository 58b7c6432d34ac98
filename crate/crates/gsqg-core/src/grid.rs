//! Periodic square grid and its wavevector lattice.
//!
//! The domain is `[0, period)^2` sampled on `n x n` nodes. Spectral
//! coefficients live on the integer mode lattice `m = (m1, m2)` with
//! `m_i in {-n/2, ..., n/2 - 1}` and physical wavevector
//! `k = (2 pi / period) * m`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Resolution, domain period and dealiasing rule for a square periodic grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    n: usize,
    period: f64,
    dealias_fraction: f64,
}

impl GridSpec {
    /// Builds a grid. `n` must be even and at least 8, `period` positive and
    /// `dealias_fraction` in `(0, 1]`.
    pub fn new(n: usize, period: f64, dealias_fraction: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n must be even and >= 8, got {n}"
            )));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias_fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Self {
            n,
            period,
            dealias_fraction,
        })
    }

    /// Grid on `[0, 2 pi)^2` with the standard 2/3 dealiasing rule.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI, 2.0 / 3.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of lattice points (and physical samples).
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical mesh width `period / n`.
    pub fn h(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Fundamental wavenumber `2 pi / period`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Signed integer mode for a storage index along one axis.
    #[inline]
    pub fn mode(&self, idx: usize) -> i64 {
        debug_assert!(idx < self.n);
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Storage index for a signed mode, if it fits on the lattice.
    #[inline]
    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m < -half || m >= half {
            return None;
        }
        Some(m.rem_euclid(self.n as i64) as usize)
    }

    /// Wavevector at storage indices `(ix, iy)` (row = x index, col = y index).
    #[inline]
    pub fn wavevector(&self, ix: usize, iy: usize) -> (f64, f64) {
        let k0 = self.k0();
        (k0 * self.mode(ix) as f64, k0 * self.mode(iy) as f64)
    }

    #[inline]
    pub fn k_norm(&self, ix: usize, iy: usize) -> f64 {
        let (kx, ky) = self.wavevector(ix, iy);
        kx.hypot(ky)
    }

    /// True on the Nyquist row/column `m = -n/2`, which differentiation
    /// multipliers must treat as zero to keep derivatives real-valued.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.mode(idx) == -((self.n / 2) as i64)
    }

    /// Dealias mask: retained iff `max(|m1|, |m2|) <= dealias_fraction * n/2`.
    #[inline]
    pub fn dealias_keeps(&self, ix: usize, iy: usize) -> bool {
        let m1 = self.mode(ix).unsigned_abs() as f64;
        let m2 = self.mode(iy).unsigned_abs() as f64;
        m1.max(m2) <= self.dealias_fraction * (self.n as f64 / 2.0)
    }

    /// Largest retained integer mode magnitude under the dealias mask.
    pub fn dealias_mode_cutoff(&self) -> i64 {
        (self.dealias_fraction * (self.n as f64 / 2.0)).floor() as i64
    }

    /// Largest `|k|` among dealias-retained modes.
    pub fn k_max_masked(&self) -> f64 {
        let m = self.dealias_mode_cutoff() as f64;
        self.k0() * (m * m + m * m).sqrt()
    }

    /// Largest `|k|` on the full lattice (the `(-n/2, -n/2)` corner).
    pub fn k_max_full(&self) -> f64 {
        let m = self.n as f64 / 2.0;
        self.k0() * (m * m + m * m).sqrt()
    }

    /// Smallest nonzero `|k|` on the lattice.
    pub fn k_min(&self) -> f64 {
        self.k0()
    }

    /// Physical node coordinates at sample indices `(ix, iy)`.
    #[inline]
    pub fn node(&self, ix: usize, iy: usize) -> (f64, f64) {
        (self.h() * ix as f64, self.h() * iy as f64)
    }

    /// Row-major storage index.
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        ix * self.n + iy
    }
}
