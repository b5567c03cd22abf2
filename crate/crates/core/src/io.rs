//! Checkpoints and plot-ready CSV output.
//!
//! Checkpoint layout, all little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `LANS` |
//! | 4 | `u32` format version |
//! | 4 | `u32` dimension `n` |
//! | 4 | `u32` points per axis `N` |
//! | 24 | `f64` time, α, ν |
//! | 16·n·Nⁿ | coefficients `(re, im)` as `f64`, component-major, modes row-major |

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use crate::error::{LansError, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::mild::csv_err;
use crate::semigroup::Trajectory;
use crate::spectral::{sobolev_norm, AlphaParam, SobolevIndex};

pub const MAGIC: &[u8; 4] = b"LANS";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub time: f64,
    pub params: AlphaParam,
    pub field: SpectralField,
}

impl Checkpoint {
    pub fn write(&self, mut out: impl Write) -> Result<()> {
        let grid = self.field.grid();
        out.write_all(MAGIC)?;
        out.write_u32::<LittleEndian>(FORMAT_VERSION)?;
        out.write_u32::<LittleEndian>(grid.dim() as u32)?;
        out.write_u32::<LittleEndian>(grid.points() as u32)?;
        out.write_f64::<LittleEndian>(self.time)?;
        out.write_f64::<LittleEndian>(self.params.alpha)?;
        out.write_f64::<LittleEndian>(self.params.nu)?;
        for comp in self.field.components() {
            for z in comp {
                out.write_f64::<LittleEndian>(z.re)?;
                out.write_f64::<LittleEndian>(z.im)?;
            }
        }
        Ok(())
    }

    pub fn read(mut input: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(LansError::Format("not a checkpoint file".into()));
        }
        let version = input.read_u32::<LittleEndian>()?;
        if version != FORMAT_VERSION {
            return Err(LansError::Format(format!("unsupported checkpoint version {version}")));
        }
        let dim = input.read_u32::<LittleEndian>()? as usize;
        let points = input.read_u32::<LittleEndian>()? as usize;
        let grid = Grid::new(dim, points)?;
        let time = input.read_f64::<LittleEndian>()?;
        let alpha = input.read_f64::<LittleEndian>()?;
        let nu = input.read_f64::<LittleEndian>()?;
        let params = AlphaParam::new(alpha, nu)?;
        let mut comps = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut comp = Vec::with_capacity(grid.len());
            for _ in 0..grid.len() {
                let re = input.read_f64::<LittleEndian>()?;
                let im = input.read_f64::<LittleEndian>()?;
                comp.push(Complex64::new(re, im));
            }
            comps.push(comp);
        }
        Ok(Self { time, params, field: SpectralField::from_components(grid, comps)? })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::read(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Column label for a norm, e.g. `norm_1_2`.
pub fn norm_label(idx: SobolevIndex) -> String {
    format!("norm_{}_{}", idx.s, idx.p)
}

/// Timeseries CSV: `t`, `‖u‖_{m,2}` for `m = 0..3`, then the extra norms.
pub fn write_timeseries(traj: &Trajectory, extras: &[SobolevIndex], out: impl Write) -> Result<()> {
    let mut columns: Vec<SobolevIndex> = (0..4).map(|m| SobolevIndex::of(m as f64, 2.0)).collect();
    for &e in extras {
        if !columns.contains(&e) {
            columns.push(e);
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(columns.iter().map(|&c| norm_label(c)));
    w.write_record(&header).map_err(csv_err)?;
    for (t, state) in traj.times().iter().zip(traj.states()) {
        let mut row = vec![t.to_string()];
        row.extend(columns.iter().map(|&c| sobolev_norm(state, c).to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::gen_random_sobolev;
    use crate::semigroup::{gamma, TimeGrid};

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let g = Grid::new(3, 8).unwrap();
        let cp = Checkpoint {
            time: 0.25,
            params: AlphaParam::new(0.5, 0.01).unwrap(),
            field: gen_random_sobolev(g, 1.0, 5, 1.0),
        };
        let mut buf = Vec::new();
        cp.write(&mut buf).unwrap();
        assert_eq!(buf.len(), 40 + 16 * 3 * 512);
        assert_eq!(&buf[..4], b"LANS");
        assert_eq!(Checkpoint::read(buf.as_slice()).unwrap(), cp);
        buf[0] = b'X';
        assert!(matches!(Checkpoint::read(buf.as_slice()), Err(LansError::Format(_))));
    }

    #[test]
    fn timeseries_has_standard_and_extra_columns() {
        let g = Grid::new(2, 8).unwrap();
        let phi = gen_random_sobolev(g, 1.0, 1, 1.0);
        let traj = gamma(&phi, &TimeGrid::uniform(1.0, 4).unwrap(), 1.0);
        let mut buf = Vec::new();
        write_timeseries(&traj, &[SobolevIndex::of(0.5, 4.0), SobolevIndex::of(1.0, 2.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,norm_0_2,norm_1_2,norm_2_2,norm_3_2,norm_0.5_4");
        assert_eq!(lines.count(), 5);
    }
}
