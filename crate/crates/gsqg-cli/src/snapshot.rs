//! GSQG1 snapshot format: magic `GSQG1`, little-endian `u32` grid size,
//! little-endian `f64` period, then `n * n` little-endian `f64` physical
//! samples in row-major order. Byte-exact round trip.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use gsqg_core::{to_physical, to_spectral, GridSpec, SpectralField};

use crate::CliError;

const MAGIC: &[u8; 5] = b"GSQG1";

pub fn write_snapshot(path: &Path, field: &SpectralField) -> Result<(), CliError> {
    let grid = field.grid();
    let samples = to_physical(field)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.period().to_le_bytes())?;
    for s in &samples {
        w.write_all(&s.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(SpectralField, Vec<f64>), CliError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CliError::Snapshot(format!(
            "bad magic {:?} in {}",
            magic,
            path.display()
        )));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let period = f64::from_le_bytes(b8);
    let grid = GridSpec::new(n, period, 2.0 / 3.0)
        .map_err(|e| CliError::Snapshot(format!("{}: {e}", path.display())))?;
    let mut samples = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        r.read_exact(&mut b8)?;
        samples.push(f64::from_le_bytes(b8));
    }
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(CliError::Snapshot(format!(
            "trailing bytes in {}",
            path.display()
        )));
    }
    let field = to_spectral(&grid, &samples)?.field;
    Ok((field, samples))
}
