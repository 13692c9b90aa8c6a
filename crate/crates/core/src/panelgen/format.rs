//! Flat binary panel files.
//!
//! Layout (all integers and floats little-endian):
//!
//! | offset | size  | field                                         |
//! |--------|-------|-----------------------------------------------|
//! | 0      | 4     | magic `TLPN`                                  |
//! | 4      | 4     | version, `u32` = 1                            |
//! | 8      | 4     | flags, `u32`; bit 0 set = per-row sizes follow |
//! | 12     | 4     | reserved, zero                                |
//! | 16     | 8     | `p`, `u64`                                    |
//! | 24     | 8     | `n`, `u64`                                    |
//! | 32     | 8     | seed, `u64`                                   |
//! | 40     | 8     | replicate id, `u64`                           |
//! | 48     | 8·p   | row sizes `u64`, only when flag bit 0 is set  |
//! | …      | 8·p·n | cells `f64`, row-major; unused cells are NaN  |

use std::io::{Read, Write};

use super::generate::Panel;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"TLPN";
pub const VERSION: u32 = 1;
const FLAG_SIZES: u32 = 1;

pub fn write_panel<W: Write>(panel: &Panel, mut w: W) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let flags = if panel.sizes.is_some() { FLAG_SIZES } else { 0 };
    w.write_all(&flags.to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    for v in [panel.p as u64, panel.n as u64, panel.seed, panel.replicate] {
        w.write_all(&v.to_le_bytes())?;
    }
    if let Some(sizes) = &panel.sizes {
        for &s in sizes {
            w.write_all(&(s as u64).to_le_bytes())?;
        }
    }
    let mut buf = Vec::with_capacity(panel.data.len() * 8);
    for x in &panel.data {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_panel<R: Read>(mut r: R) -> Result<Panel> {
    let mut header = [0u8; 48];
    r.read_exact(&mut header).map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    if header[0..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let flags = u32_at(8);
    let (p, n) = (u64_at(16) as usize, u64_at(24) as usize);
    let (seed, replicate) = (u64_at(32), u64_at(40));
    let cells = p.checked_mul(n).ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let sizes = if flags & FLAG_SIZES != 0 {
        let mut raw = vec![0u8; p * 8];
        r.read_exact(&mut raw).map_err(|e| Error::Format(format!("truncated sizes: {e}")))?;
        let sizes: Vec<usize> =
            raw.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize).collect();
        if sizes.iter().any(|&s| s > n) {
            return Err(Error::Format("row size exceeds n".into()));
        }
        Some(sizes)
    } else {
        None
    };
    let mut raw = vec![0u8; cells * 8];
    r.read_exact(&mut raw).map_err(|e| Error::Format(format!("truncated data: {e}")))?;
    let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(Panel { p, n, sizes, seed, replicate, data, spec: None })
}
