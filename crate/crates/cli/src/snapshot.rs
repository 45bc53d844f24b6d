//! `S1WF` binary snapshots.
//!
//! Layout, little-endian: magic `S1WF`, `u32` version, `u32` nx ny nz,
//! `f64` lx ly lz mass time, then `6·N` complex values as `(re, im)` pairs in
//! component order `u_x u_y u_z v_x v_y v_z`, x-index fastest.

use std::fs;
use std::path::Path;

use spin1::fields::{Grid, WaveField, C64};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"S1WF";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 3 * 4 + 5 * 8;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot format error: {0}")]
    Format(String),
    #[error("snapshot i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub psi: WaveField,
    pub time: f64,
}

pub fn encode(psi: &WaveField, time: f64) -> Vec<u8> {
    let g = psi.grid;
    let flat = psi.to_flat();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * flat.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for n in g.shape() {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for x in [g.lx, g.ly, g.lz, psi.mass, time] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for z in &flat {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], SnapshotError> {
        let have = self.bytes.len() - self.pos;
        if have < n {
            return Err(SnapshotError::Format(format!(
                "truncated while reading {what}: missing {} bytes",
                n - have
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, SnapshotError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64, SnapshotError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(SnapshotError::Format("bad magic, expected \"S1WF\"".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(SnapshotError::Format(format!("unsupported version {version}")));
    }
    let n = [r.u32("nx")?, r.u32("ny")?, r.u32("nz")?].map(|x| x as usize);
    let l = [r.f64("lx")?, r.f64("ly")?, r.f64("lz")?];
    let mass = r.f64("mass")?;
    let time = r.f64("time")?;
    let grid = Grid::new(n, l).map_err(|e| SnapshotError::Format(e.to_string()))?;
    let count = 6 * grid.len();
    let payload = r.take(16 * count, "field data")?;
    if r.pos != bytes.len() {
        return Err(SnapshotError::Format(format!(
            "{} trailing bytes after field data",
            bytes.len() - r.pos
        )));
    }
    let flat: Vec<C64> = payload
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    if !(mass >= 0.0) {
        return Err(SnapshotError::Format(format!("invalid mass {mass}")));
    }
    Ok(Snapshot {
        psi: WaveField::from_flat(grid, mass, flat),
        time,
    })
}

pub fn write_snapshot(path: &Path, psi: &WaveField, time: f64) -> Result<(), SnapshotError> {
    fs::write(path, encode(psi, time))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, SnapshotError> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spin1::fields::{random_wave_field, BandLimit};

    fn sample() -> WaveField {
        let g = Grid::new([4, 6, 8], [1.0, 2.0, 3.5]).unwrap();
        random_wave_field(g, 0.7, BandLimit::new(2.0, 3), false)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let psi = sample();
        let s = decode(&encode(&psi, 1.25)).unwrap();
        assert_eq!(s.time.to_bits(), 1.25f64.to_bits());
        for (a, b) in psi.to_flat().iter().zip(s.psi.to_flat()) {
            assert_eq!((a.re.to_bits(), a.im.to_bits()), (b.re.to_bits(), b.im.to_bits()));
        }
        assert_eq!(s.psi.grid, psi.grid);
    }

    #[test]
    fn truncation_names_missing_bytes() {
        let bytes = encode(&sample(), 0.0);
        let err = decode(&bytes[..bytes.len() - 10]).unwrap_err().to_string();
        assert!(err.contains("missing 10 bytes"), "{err}");
        let err = decode(&bytes[..6]).unwrap_err().to_string();
        assert!(err.contains("missing 2 bytes"), "{err}");
    }

    #[test]
    fn rejects_other_versions_and_magic() {
        let mut bytes = encode(&sample(), 0.0);
        bytes[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(decode(&bytes).unwrap_err().to_string().contains("unsupported version"));
        bytes[0] = b'X';
        assert!(decode(&bytes).unwrap_err().to_string().contains("magic"));
    }
}
