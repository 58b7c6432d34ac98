//! Littlewood-Paley dyadic decomposition realized as multiplier tables.
//!
//! The bump is built from the smooth partition function
//! `q(t) = exp(-1/t)` (t > 0), `g(t) = q(t) / (q(t) + q(1 - t))`,
//! `eta(r) = 1` for `r <= 1`, `g(2 - r)` for `1 < r < 2`, `0` for `r >= 2`,
//! and `phi(r) = eta(r) - eta(2 r)`, `chi(r) = eta(2 r)`. Sums over `j`
//! telescope exactly in floating point because the dyadic rescalings are
//! exact power-of-two multiplies.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

fn smooth_step(t: f64) -> f64 {
    // q(t) = exp(-1/t) for t > 0, else 0.
    let q = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = q(t);
    let b = q(1.0 - t);
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        1.0
    } else {
        a / (a + b)
    }
}

/// `eta(r)`: 1 on the unit ball, smooth cutoff on (1, 2), 0 beyond.
pub fn eta(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        smooth_step(2.0 - r)
    }
}

/// `phi(r) = eta(r) - eta(2r)`, supported in the open annulus (1/2, 2).
pub fn phi(r: f64) -> f64 {
    eta(r) - eta(2.0 * r)
}

/// `chi(r) = eta(2r)`, supported in the open unit ball.
pub fn chi(r: f64) -> f64 {
    eta(2.0 * r)
}

/// The dyadic partition `{chi, phi_j}` tabulated on a grid's lattice.
#[derive(Debug, Clone)]
pub struct LpProjector {
    grid: GridSpec,
    j_min: i32,
    j_max: i32,
    phi_tables: Vec<Vec<f64>>,
    chi_table: Vec<f64>,
}

impl LpProjector {
    /// Tabulates `phi_j(k) = phi(2^{-j} |k|)` for the lattice-determined
    /// range of `j`. `j_min` is the smallest `j` whose annulus meets a
    /// nonzero lattice point; `j_max = ceil(log2 k_max) + 1` with `k_max`
    /// the largest dealias-retained radius (widened if necessary so the
    /// partition saturates on the full lattice).
    pub fn build(grid: &GridSpec) -> Result<Self> {
        if grid.n() < 8 {
            return Err(Error::InvalidGrid(
                "grid too small to host two dyadic shells".into(),
            ));
        }
        let k_min = grid.k_min();
        let k_max = grid.k_max_masked();
        // Smallest j with 2^{j+1} > k_min.
        let mut j_min = (k_min.log2() - 1.0).floor() as i32;
        while exp2i(j_min + 1) <= k_min {
            j_min += 1;
        }
        let mut j_max = (k_max.log2().ceil() as i32) + 1;
        // Saturation on the unmasked corner modes as well.
        while exp2i(j_max) < grid.k_max_full() {
            j_max += 1;
        }
        if j_max <= j_min {
            return Err(Error::InvalidGrid(
                "lattice does not span two dyadic shells".into(),
            ));
        }

        let n = grid.n();
        let mut phi_tables = Vec::with_capacity((j_max - j_min + 1) as usize);
        for j in j_min..=j_max {
            let scale = exp2i(-j);
            let table: Vec<f64> = (0..grid.len())
                .map(|idx| phi(scale * grid.k_norm(idx / n, idx % n)))
                .collect();
            phi_tables.push(table);
        }
        let chi_table: Vec<f64> = (0..grid.len())
            .map(|idx| chi(grid.k_norm(idx / n, idx % n)))
            .collect();
        Ok(Self {
            grid: grid.clone(),
            j_min,
            j_max,
            phi_tables,
            chi_table,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn j_range(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    /// `phi_j` multiplier table over the lattice.
    pub fn phi_table(&self, j: i32) -> Result<&[f64]> {
        if j < self.j_min || j > self.j_max {
            return Err(Error::BlockOutOfRange {
                j,
                j_min: self.j_min,
                j_max: self.j_max,
            });
        }
        Ok(&self.phi_tables[(j - self.j_min) as usize])
    }

    pub fn chi_table(&self) -> &[f64] {
        &self.chi_table
    }

    /// Dyadic block `Delta_j f`.
    pub fn block(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let table = self.phi_table(j)?;
        let coeffs = f
            .coeffs()
            .iter()
            .zip(table)
            .map(|(c, &m)| c * m)
            .collect();
        Ok(SpectralField::from_raw_parts(self.grid.clone(), coeffs))
    }

    /// Low-pass `S_j f` with multiplier `chi(2^{-j} k)`; any `j` is allowed.
    pub fn low_pass(&self, f: &SpectralField, j: i32) -> Result<SpectralField> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.n();
        let scale = exp2i(-j);
        let coeffs = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                if idx == 0 {
                    *c
                } else {
                    c * chi(scale * self.grid.k_norm(idx / n, idx % n))
                }
            })
            .collect();
        Ok(SpectralField::from_raw_parts(self.grid.clone(), coeffs))
    }

    /// Worst partition-of-unity residual `|sum_j phi_j(k) - 1|` over nonzero
    /// lattice points.
    pub fn partition_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 1..self.grid.len() {
            let s: f64 = self.phi_tables.iter().map(|t| t[idx]).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// `r = sum_j ||Delta_j f||^2 / ||f||^2`; lies in [1/2, 1] by
    /// construction of the partition.
    pub fn norm_equivalence_ratio(&self, f: &SpectralField) -> Result<f64> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let denom: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        if denom == 0.0 {
            return Err(Error::ZeroField);
        }
        let mut numer = 0.0;
        for table in &self.phi_tables {
            numer += f
                .coeffs()
                .iter()
                .zip(table)
                .map(|(c, &m)| (m * m) * c.norm_sqr())
                .sum::<f64>();
        }
        Ok(numer / denom)
    }

    /// Checks both sides of the L2 Bernstein inequality on `Delta_j f` with
    /// the explicit constant `C = 2^{|sigma|}` forced by the annulus radii.
    pub fn bernstein_check(
        &self,
        f: &SpectralField,
        j: i32,
        sigma: f64,
    ) -> Result<BernsteinCheck> {
        let block = self.block(f, j)?;
        let base_sq: f64 = block.coeffs().iter().map(|c| c.norm_sqr()).sum();
        if base_sq == 0.0 {
            return Err(Error::EmptySupport);
        }
        let n = self.grid.n();
        let frac_sq: f64 = block
            .coeffs()
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                if idx == 0 {
                    0.0
                } else {
                    self.grid.k_norm(idx / n, idx % n).powf(2.0 * sigma) * c.norm_sqr()
                }
            })
            .sum();
        let lhs = frac_sq.sqrt();
        let scale = exp2i(j).powf(sigma) * base_sq.sqrt();
        let c = 2.0f64.powf(sigma.abs());
        Ok(BernsteinCheck {
            lower_ok: scale / c <= lhs * (1.0 + 1e-12),
            upper_ok: lhs <= c * scale * (1.0 + 1e-12),
            frac_norm: lhs,
            dyadic_scale: scale,
            constant: c,
        })
    }
}

/// Outcome of a Bernstein inequality check for one block and order.
#[derive(Debug, Clone, Copy)]
pub struct BernsteinCheck {
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `||Lambda^sigma Delta_j f||_{L2}`.
    pub frac_norm: f64,
    /// `2^{sigma j} ||Delta_j f||_{L2}`.
    pub dyadic_scale: f64,
    pub constant: f64,
}

impl BernsteinCheck {
    pub fn both_ok(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Exact power of two as f64.
#[inline]
pub(crate) fn exp2i(j: i32) -> f64 {
    (2.0f64).powi(j)
}

/// `sum_j Delta_j f` over the projector's range; equals `f` for mean-zero
/// fields.
pub fn reconstruct(p: &LpProjector, f: &SpectralField) -> Result<SpectralField> {
    let mut acc = SpectralField::zero(p.grid());
    for j in p.j_range() {
        acc = acc.axpy(1.0, &p.block(f, j)?)?;
    }
    Ok(acc)
}

/// `<Delta_j f, Delta_j g>_{L2}`.
pub fn block_inner(p: &LpProjector, f: &SpectralField, g: &SpectralField, j: i32) -> Result<f64> {
    let bf = p.block(f, j)?;
    let bg = p.block(g, j)?;
    bf.inner(&bg)
}
