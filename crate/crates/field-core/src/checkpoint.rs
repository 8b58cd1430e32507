//! Binary field checkpoints.
//!
//! Layout (little endian):
//!
//! ```text
//! b"FPHI43\0"        7 bytes magic
//! version            u16
//! alpha              f64
//! N                  u32
//! (re, im) pairs     f64, f64 per mode, storage order of `Lattice`
//! ```
//!
//! Version 1 holds a single field. Version 2 holds a phase state: the pairs of
//! the position, then the pairs of the velocity, then the step count (u64) and
//! the time (f64).

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{FieldError, Result};
use crate::field::{LatticeField, PhaseState};
use crate::lattice::Lattice;

pub const MAGIC: &[u8; 7] = b"FPHI43\0";
pub const VERSION_FIELD: u16 = 1;
pub const VERSION_STATE: u16 = 2;

/// Step counter and time stored with a phase-state checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clock {
    pub step: u64,
    pub time: f64,
}

fn write_header(w: &mut impl Write, version: u16, lat: &Lattice) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&version.to_le_bytes())?;
    w.write_all(&lat.alpha().to_le_bytes())?;
    w.write_all(&(lat.trunc_n() as u32).to_le_bytes())?;
    Ok(())
}

fn write_coeffs(w: &mut impl Write, f: &LatticeField) -> Result<()> {
    for z in f.coeffs() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_field(w: &mut impl Write, f: &LatticeField) -> Result<()> {
    write_header(w, VERSION_FIELD, f.lattice())?;
    write_coeffs(w, f)
}

pub fn write_state(w: &mut impl Write, s: &PhaseState, clock: Clock) -> Result<()> {
    write_header(w, VERSION_STATE, s.lattice())?;
    write_coeffs(w, &s.pos)?;
    write_coeffs(w, &s.vel)?;
    w.write_all(&clock.step.to_le_bytes())?;
    w.write_all(&clock.time.to_le_bytes())?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.buf.len() {
            return Err(FieldError::CorruptCheckpoint(format!(
                "truncated: wanted {} bytes at offset {}, file has {}",
                n,
                self.at,
                self.buf.len()
            )));
        }
        let s = &self.buf[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

fn read_header<'a>(buf: &'a [u8], lat: &Lattice, version: u16) -> Result<Cursor<'a>> {
    let mut c = Cursor { buf, at: 0 };
    if c.take(7)? != MAGIC {
        return Err(FieldError::CorruptCheckpoint("bad magic".into()));
    }
    let v = u16::from_le_bytes(c.take(2)?.try_into().expect("2 bytes"));
    if v != version {
        return Err(FieldError::CheckpointMismatch(format!("version {v}, expected {version}")));
    }
    let alpha = c.f64()?;
    let n = u32::from_le_bytes(c.take(4)?.try_into().expect("4 bytes")) as usize;
    if alpha.to_bits() != lat.alpha().to_bits() {
        return Err(FieldError::CheckpointMismatch(format!("alpha {alpha}, expected {}", lat.alpha())));
    }
    if n != lat.trunc_n() {
        return Err(FieldError::CheckpointMismatch(format!("N {n}, expected {}", lat.trunc_n())));
    }
    Ok(c)
}

fn read_coeffs(c: &mut Cursor<'_>, lat: &Arc<Lattice>) -> Result<LatticeField> {
    let mut v = Vec::with_capacity(lat.len());
    for _ in 0..lat.len() {
        let re = c.f64()?;
        let im = c.f64()?;
        v.push(Complex64::new(re, im));
    }
    LatticeField::from_coeffs(lat, v)
}

fn finish(c: &Cursor<'_>) -> Result<()> {
    if c.at != c.buf.len() {
        return Err(FieldError::CorruptCheckpoint(format!("{} trailing bytes", c.buf.len() - c.at)));
    }
    Ok(())
}

/// Reads a single-field checkpoint written for the given lattice.
pub fn read_field(r: &mut impl Read, lat: &Arc<Lattice>) -> Result<LatticeField> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    let mut c = read_header(&buf, lat, VERSION_FIELD)?;
    let f = read_coeffs(&mut c, lat)?;
    finish(&c)?;
    Ok(f)
}

pub fn read_state(r: &mut impl Read, lat: &Arc<Lattice>) -> Result<(PhaseState, Clock)> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    let mut c = read_header(&buf, lat, VERSION_STATE)?;
    let pos = read_coeffs(&mut c, lat)?;
    let vel = read_coeffs(&mut c, lat)?;
    let step = c.u64()?;
    let time = c.f64()?;
    finish(&c)?;
    Ok((PhaseState { pos, vel }, Clock { step, time }))
}

/// (alpha, N) recorded in a checkpoint header.
pub fn peek_header(buf: &[u8]) -> Result<(u16, f64, usize)> {
    let mut c = Cursor { buf, at: 0 };
    if c.take(7)? != MAGIC {
        return Err(FieldError::CorruptCheckpoint("bad magic".into()));
    }
    let v = u16::from_le_bytes(c.take(2)?.try_into().expect("2 bytes"));
    let alpha = c.f64()?;
    let n = u32::from_le_bytes(c.take(4)?.try_into().expect("4 bytes")) as usize;
    Ok((v, alpha, n))
}
