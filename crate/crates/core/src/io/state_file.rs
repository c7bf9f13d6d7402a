//! Binary state files.
//!
//! Layout: the magic bytes `MVGR1`, then `n_modes`, `g_theta` and `g_k` as
//! little-endian `u32`, then every amplitude as a little-endian `f64` pair
//! `(re, im)` in storage order.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::ModularGrid;
use crate::state::JointState;

pub const MAGIC: &[u8; 5] = b"MVGR1";
pub const HEADER_LEN: usize = 5 + 3 * 4;

pub fn encode_state(state: &JointState) -> Result<Vec<u8>> {
    if state.has_ancilla() {
        return Err(Error::AncillaMismatch);
    }
    let g = state.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * state.amplitudes().len());
    out.extend_from_slice(MAGIC);
    for v in [g.n_modes(), g.g_theta(), g.g_k()] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for a in state.amplitudes() {
        out.extend_from_slice(&a.re.to_le_bytes());
        out.extend_from_slice(&a.im.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_state(bytes: &[u8]) -> Result<JointState> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedFile {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let word = |i: usize| {
        let at = MAGIC.len() + 4 * i;
        u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize
    };
    let grid = ModularGrid::new(word(0), word(1), word(2))?;
    let expected = HEADER_LEN + 16 * grid.len();
    if bytes.len() < expected {
        return Err(Error::TruncatedFile {
            expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::ShapeMismatch {
            expected,
            actual: bytes.len(),
        });
    }
    let amp = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    JointState::from_amplitudes(grid, amp)
}

pub fn save_state(state: &JointState, path: &Path) -> Result<()> {
    let bytes = encode_state(state)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<JointState> {
    decode_state(&std::fs::read(path)?)
}
