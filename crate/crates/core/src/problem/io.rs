//! Flat binary dump of a [`ProblemInstance`] for replay.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      4 bytes  "RRDI"
//! version    u32      1
//! n, m1, m2  u64 ×3
//! flags      u32      bit 0: ball constraint present
//! radius     f64
//! objective  u32      0 = purely linear, 1 = general linear, 2 = split
//!            u64 k                 (split only)
//!            f64 × n  c            (general linear only)
//! A          f64 × m1·n, row-major
//! B          f64 × m2·n, row-major
//! a          f64 × m1
//! b          f64 × m2
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{ObjectiveSpec, ProblemInstance};
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

const MAGIC: &[u8; 4] = b"RRDI";
const VERSION: u32 = 1;

pub fn write_instance<W: Write>(inst: &ProblemInstance, w: &mut W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for v in [inst.n, inst.m1(), inst.m2()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    w.write_all(&u32::from(inst.ball_bound).to_le_bytes())?;
    w.write_all(&inst.ball_radius.to_le_bytes())?;
    match &inst.objective {
        ObjectiveSpec::PurelyLinear => w.write_all(&0u32.to_le_bytes())?,
        ObjectiveSpec::GeneralLinear { c } => {
            w.write_all(&1u32.to_le_bytes())?;
            write_f64s(w, c)?;
        }
        ObjectiveSpec::BpSplit { k } => {
            w.write_all(&2u32.to_le_bytes())?;
            w.write_all(&(*k as u64).to_le_bytes())?;
        }
    }
    write_f64s(w, inst.a_mat.as_slice())?;
    write_f64s(w, inst.b_mat.as_slice())?;
    write_f64s(w, &inst.a_vec)?;
    write_f64s(w, &inst.b_vec)
}

fn write_f64s<W: Write>(w: &mut W, xs: &[f64]) -> std::io::Result<()> {
    for x in xs {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<R: Read, const N: usize>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Parse(format!("truncated instance dump: {e}")))?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<usize> {
    usize::try_from(u64::from_le_bytes(read_array(r)?))
        .map_err(|_| Error::Parse("dimension does not fit in usize".into()))
}

fn read_f64s<R: Read>(r: &mut R, len: usize) -> Result<Vec<f64>> {
    (0..len)
        .map(|_| Ok(f64::from_le_bytes(read_array(r)?)))
        .collect()
}

pub fn read_instance<R: Read>(r: &mut R) -> Result<ProblemInstance> {
    let magic: [u8; 4] = read_array(r)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not an instance dump (bad magic)".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported dump version {version}")));
    }
    let n = read_u64(r)?;
    let m1 = read_u64(r)?;
    let m2 = read_u64(r)?;
    let flags = read_u32(r)?;
    let radius = f64::from_le_bytes(read_array(r)?);
    let objective = match read_u32(r)? {
        0 => ObjectiveSpec::PurelyLinear,
        1 => ObjectiveSpec::GeneralLinear {
            c: read_f64s(r, n)?,
        },
        2 => ObjectiveSpec::BpSplit { k: read_u64(r)? },
        tag => return Err(Error::Parse(format!("unknown objective tag {tag}"))),
    };
    let a_mat = DenseMatrix::from_row_major(m1, n, read_f64s(r, m1 * n)?)?;
    let b_mat = DenseMatrix::from_row_major(m2, n, read_f64s(r, m2 * n)?)?;
    let inst = ProblemInstance {
        n,
        a_mat,
        b_mat,
        a_vec: read_f64s(r, m1)?,
        b_vec: read_f64s(r, m2)?,
        objective,
        ball_bound: flags & 1 == 1,
        ball_radius: radius,
    };
    inst.check()?;
    Ok(inst)
}

pub fn save_instance(inst: &ProblemInstance, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_instance(inst, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn load_instance(path: &Path) -> Result<ProblemInstance> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_instance(&mut BufReader::new(file))
}
