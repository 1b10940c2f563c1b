//! Multibeam polarization coupling matrices.
//!
//! The bundled table gives, in dB, how each beam's two transmit
//! polarizations couple into the two received polarizations of the working
//! beam: block 0 is the working beam itself, the remaining blocks are the
//! cochannel interferers. The raw diagonals carry the absolute antenna gain,
//! so all entries are shifted so the working beam's copolar gain reads 0 dB;
//! relative levels between entries and between beams are preserved.
//!
//! Entries convert to amplitude gains 10^(dB/20). The negative off-diagonal
//! entries are treated as attenuations by default; with
//! `signed_amplitudes` the sign is instead applied to the amplitude,
//! +/- 10^(|dB|/20), for studies that read the sign as a polarity flip.

use crate::linalg::{Mat2, C64};
use thiserror::Error;

const BUILTIN: &str = include_str!("../../data/coupling.txt");

#[derive(Debug, Error, PartialEq)]
pub enum CouplingError {
    #[error("line {line}: expected two numeric entries, got '{text}'")]
    BadRow { line: usize, text: String },
    #[error("beam block {index} has {rows} rows, expected 2")]
    BadBlock { index: usize, rows: usize },
    #[error("no beam blocks found")]
    Empty,
    #[error("beam index {index} out of range (have {count})")]
    BadIndex { index: usize, count: usize },
}

#[derive(Clone, Debug)]
pub struct BeamCoupling {
    db: Vec<[[f64; 2]; 2]>,
    /// dB value subtracted from every entry so the working beam's copolar
    /// gain is 0 dB.
    reference_db: f64,
}

impl BeamCoupling {
    pub fn parse(text: &str) -> Result<Self, CouplingError> {
        let mut blocks: Vec<Vec<[f64; 2]>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with("beam") {
                blocks.push(Vec::new());
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<f64>);
            let row = match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => [a, b],
                _ => {
                    return Err(CouplingError::BadRow { line: idx + 1, text: line.to_string() })
                }
            };
            if blocks.is_empty() {
                blocks.push(Vec::new());
            }
            blocks.last_mut().unwrap().push(row);
        }
        if blocks.is_empty() {
            return Err(CouplingError::Empty);
        }
        let mut db = Vec::with_capacity(blocks.len());
        for (index, rows) in blocks.iter().enumerate() {
            if rows.len() != 2 {
                return Err(CouplingError::BadBlock { index, rows: rows.len() });
            }
            db.push([rows[0], rows[1]]);
        }
        let reference_db = 0.5 * (db[0][0][0] + db[0][1][1]);
        Ok(BeamCoupling { db, reference_db })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("bundled coupling table parses")
    }

    /// Number of beams including the working beam.
    pub fn count(&self) -> usize {
        self.db.len()
    }

    pub fn interferer_count(&self) -> usize {
        self.db.len() - 1
    }

    /// Normalized amplitude-domain matrix of beam `index`.
    pub fn amplitude(&self, index: usize, signed: bool) -> Result<Mat2, CouplingError> {
        let block = self
            .db
            .get(index)
            .ok_or(CouplingError::BadIndex { index, count: self.db.len() })?;
        let mut m = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                let d = block[r][c];
                let amp = if d.is_infinite() && d < 0.0 {
                    0.0
                } else if signed {
                    d.signum() * 10f64.powf((d.abs() - self.reference_db) / 20.0)
                } else {
                    10f64.powf((d - self.reference_db) / 20.0)
                };
                m.m[r][c] = C64::new(amp, 0.0);
            }
        }
        Ok(m)
    }

    pub fn apply(&self, index: usize, x: [C64; 2], signed: bool) -> Result<[C64; 2], CouplingError> {
        Ok(self.amplitude(index, signed)?.mul_vec(x))
    }
}
