//! Stand-in coded chain: CRC-tagged blocks, punctured convolutional
//! encoding, soft-input Viterbi decoding, block-error detection.
//!
//! This deliberately simple codec preserves the property the coded
//! experiments depend on: a decoder fed genuine LLRs outperforms one fed
//! sign-clipped decisions. Absolute coded error rates are therefore
//! comparable between schemes but not with heavier production codes.

pub mod conv;
pub mod crc;

use conv::{Puncturer, TAIL_BITS};
use crc::{crc16, crc16_check, CRC_BITS};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FecError {
    #[error("info block length {got} does not match configured {want}")]
    BlockLength { got: usize, want: usize },
    #[error("coded length {got} does not match expected {want}")]
    CodedLength { got: usize, want: usize },
}

/// Coded-chain configuration. `info_bits` is the payload per block,
/// excluding the 16 checksum bits and the 6 tail bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeConfig {
    pub info_bits: usize,
}

impl Default for CodeConfig {
    fn default() -> Self {
        CodeConfig { info_bits: 2048 }
    }
}

impl CodeConfig {
    /// Frame sized to an 80 ms slot at 33.6 ksps with QPSK and rate 5/8.
    pub fn bgan_like() -> Self {
        CodeConfig { info_bits: 3360 }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.info_bits == 0 {
            return Err("info_bits must be positive".into());
        }
        Ok(())
    }
}

/// Punctured convolutional block codec with CRC error detection.
#[derive(Clone, Debug)]
pub struct FecCodec {
    cfg: CodeConfig,
    punct: Puncturer,
}

impl FecCodec {
    pub fn new(cfg: CodeConfig) -> Self {
        cfg.validate().expect("valid code configuration");
        FecCodec { cfg, punct: Puncturer::rate_5_8() }
    }

    pub fn info_bits(&self) -> usize {
        self.cfg.info_bits
    }

    fn encoder_input_bits(&self) -> usize {
        self.cfg.info_bits + CRC_BITS
    }

    fn mother_len(&self) -> usize {
        2 * (self.encoder_input_bits() + TAIL_BITS)
    }

    /// Transmitted bits per block after puncturing.
    pub fn coded_bits(&self) -> usize {
        self.punct.punctured_len(self.mother_len())
    }

    /// Exact information rate of the chain, payload over transmitted bits.
    pub fn rate(&self) -> f64 {
        self.cfg.info_bits as f64 / self.coded_bits() as f64
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>, FecError> {
        if info.len() != self.cfg.info_bits {
            return Err(FecError::BlockLength { got: info.len(), want: self.cfg.info_bits });
        }
        let mut frame = Vec::with_capacity(self.encoder_input_bits());
        frame.extend_from_slice(info);
        frame.extend_from_slice(&crc16(info));
        Ok(self.punct.puncture(&conv::encode_terminated(&frame)))
    }

    /// Decodes one block from per-coded-bit LLRs (positive means bit 0).
    /// Returns the payload and whether the checksum verified.
    pub fn decode(&self, llrs: &[f64]) -> Result<(Vec<u8>, bool), FecError> {
        if llrs.len() != self.coded_bits() {
            return Err(FecError::CodedLength { got: llrs.len(), want: self.coded_bits() });
        }
        let mother = self.punct.depuncture(llrs, self.mother_len());
        let mut frame = conv::decode_soft(&mother, self.encoder_input_bits());
        let ok = crc16_check(&frame);
        frame.truncate(self.cfg.info_bits);
        Ok((frame, ok))
    }
}
