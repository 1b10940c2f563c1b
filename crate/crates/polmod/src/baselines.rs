//! Reference transmission schemes the polarized-modulation results are
//! compared against: single-polarization signalling, two-stream
//! polarization multiplexing with joint maximum-likelihood reception, and
//! Alamouti block coding across polarizations.
//!
//! Power convention: every scheme radiates unit average power per channel
//! use. The single-polarization reference and polarized modulation put the
//! full power on one branch; the two-branch schemes split it evenly.

use crate::constellation::{Constellation, LLR_CLAMP};
use crate::linalg::{Mat2, C64};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Reference,
    Vblast,
    Ostbc,
    Pmod,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Reference => "reference",
            SchemeKind::Vblast => "vblast",
            SchemeKind::Ostbc => "ostbc",
            SchemeKind::Pmod => "pmod",
        }
    }

    /// Information bits per channel use with a 2^b-point constellation.
    pub fn spectral_efficiency(self, b: usize) -> f64 {
        match self {
            SchemeKind::Reference | SchemeKind::Ostbc => b as f64,
            SchemeKind::Vblast => 2.0 * b as f64,
            SchemeKind::Pmod => (b + 1) as f64,
        }
    }

    /// Rate multiplier relative to the single-polarization reference.
    pub fn throughput_gain(self, b: usize) -> f64 {
        self.spectral_efficiency(b) / b as f64
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reference" => Ok(SchemeKind::Reference),
            "vblast" => Ok(SchemeKind::Vblast),
            "ostbc" => Ok(SchemeKind::Ostbc),
            "pmod" => Ok(SchemeKind::Pmod),
            other => Err(format!(
                "unknown scheme '{other}' (expected reference|vblast|ostbc|pmod)"
            )),
        }
    }
}

/// Single-polarization transmit vector: full power on branch 1.
pub fn siso_tx(bits: &[u8], cons: &Constellation) -> [C64; 2] {
    [cons.modulate(bits), C64::new(0.0, 0.0)]
}

/// Single-polarization receiver: equalizes the copolar observation only.
/// Returns the unit-gain stream estimate and its effective noise variance.
pub fn siso_rx(y1: C64, h11: C64, n0: f64) -> (C64, f64) {
    let p = h11.norm_sqr();
    if p > 0.0 {
        (y1 / h11, n0 / p)
    } else {
        (C64::new(0.0, 0.0), f64::INFINITY)
    }
}

/// Two independent streams, one per polarization, each at half power.
/// `bits` carries 2b bits: the first b select stream 1's point.
pub fn vblast_tx(bits: &[u8], cons: &Constellation) -> [C64; 2] {
    let b = cons.bits_per_symbol();
    assert_eq!(bits.len(), 2 * b, "vblast bit group length mismatch");
    let s1 = cons.modulate(&bits[..b]);
    let s2 = cons.modulate(&bits[b..]);
    [s1 * FRAC_1_SQRT_2, s2 * FRAC_1_SQRT_2]
}

#[derive(Clone, Debug)]
pub struct VblastDecision {
    /// Jointly most likely (stream 1, stream 2) labels.
    pub labels: [usize; 2],
    /// Exact per-bit log-likelihood ratios, stream 1's bits first.
    pub llrs: Vec<f64>,
}

/// Exact joint maximum-likelihood reception over all point pairs, with
/// per-bit LLRs marginalized over the full hypothesis set.
pub fn vblast_rx(y: [C64; 2], h: &Mat2, cons: &Constellation, n0: f64) -> VblastDecision {
    assert!(n0 > 0.0, "noise variance must be positive");
    let m = cons.len();
    let b = cons.bits_per_symbol();
    let h1 = h.col(0);
    let h2 = h.col(1);
    let mut metrics = vec![0.0f64; m * m];
    let mut best = (0usize, f64::NEG_INFINITY);
    for l1 in 0..m {
        let s1 = cons.point(l1) * FRAC_1_SQRT_2;
        let p1 = [h1[0] * s1, h1[1] * s1];
        for l2 in 0..m {
            let s2 = cons.point(l2) * FRAC_1_SQRT_2;
            let d0 = y[0] - p1[0] - h2[0] * s2;
            let d1 = y[1] - p1[1] - h2[1] * s2;
            let metric = -(d0.norm_sqr() + d1.norm_sqr()) / n0;
            let idx = l1 * m + l2;
            metrics[idx] = metric;
            if metric > best.1 {
                best = (idx, metric);
            }
        }
    }

    let mut llrs = Vec::with_capacity(2 * b);
    for bit in 0..2 * b {
        // Bit `bit` lives in stream bit/b, position bit%b (MSB first).
        let stream = bit / b;
        let shift = b - 1 - bit % b;
        let mut max0 = f64::NEG_INFINITY;
        let mut max1 = f64::NEG_INFINITY;
        for (idx, &metric) in metrics.iter().enumerate() {
            let label = if stream == 0 { idx / m } else { idx % m };
            if (label >> shift) & 1 == 0 {
                max0 = max0.max(metric);
            } else {
                max1 = max1.max(metric);
            }
        }
        let mut sum0 = 0.0;
        let mut sum1 = 0.0;
        for (idx, &metric) in metrics.iter().enumerate() {
            let label = if stream == 0 { idx / m } else { idx % m };
            if (label >> shift) & 1 == 0 {
                sum0 += (metric - max0).exp();
            } else {
                sum1 += (metric - max1).exp();
            }
        }
        let llr = (max0 + sum0.ln()) - (max1 + sum1.ln());
        llrs.push(llr.clamp(-LLR_CLAMP, LLR_CLAMP));
    }

    VblastDecision { labels: [best.0 / m, best.0 % m], llrs }
}

/// Alamouti encoding across polarizations: slot 1 sends [s1, s2], slot 2
/// sends [-s2*, s1*], each branch at half power.
pub fn ostbc_tx(bits: &[u8], cons: &Constellation) -> ([C64; 2], [C64; 2]) {
    let b = cons.bits_per_symbol();
    assert_eq!(bits.len(), 2 * b, "ostbc bit group length mismatch");
    let s1 = cons.modulate(&bits[..b]) * FRAC_1_SQRT_2;
    let s2 = cons.modulate(&bits[b..]) * FRAC_1_SQRT_2;
    ([s1, s2], [-s2.conj(), s1.conj()])
}

/// Orthogonal combiner over one Alamouti block. `y_a`/`y_b` are the two
/// received slots; the channel must be constant across the pair. Returns
/// the unit-gain estimates of (s1, s2) and their common effective noise
/// variance 2 n0 / (|h11|^2 + |h21|^2 + |h12|^2 + |h22|^2).
pub fn ostbc_combine(
    y_a: [C64; 2],
    y_b: [C64; 2],
    h: &Mat2,
    n0: f64,
) -> ((C64, f64), (C64, f64)) {
    let g = h.frob_sq();
    if g <= 0.0 {
        let zero = (C64::new(0.0, 0.0), f64::INFINITY);
        return (zero, zero);
    }
    let mut z1 = C64::new(0.0, 0.0);
    let mut z2 = C64::new(0.0, 0.0);
    for r in 0..2 {
        let ha = h.m[r][0];
        let hb = h.m[r][1];
        z1 += ha.conj() * y_a[r] + hb * y_b[r].conj();
        z2 += hb.conj() * y_a[r] - ha * y_b[r].conj();
    }
    let scale = std::f64::consts::SQRT_2 / g;
    let demap_n0 = 2.0 * n0 / g;
    ((z1 * scale, demap_n0), (z2 * scale, demap_n0))
}
