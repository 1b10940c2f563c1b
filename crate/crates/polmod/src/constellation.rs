//! Unit-energy constellations with Gray labeling and exact LLR demapping.
//!
//! Labels are bit groups read MSB-first, so a point's index in the table is
//! the integer value of its label. LLRs follow the convention that a
//! positive value favors bit 0.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

/// Soft demapper outputs are clamped to this magnitude.
pub const LLR_CLAMP: f64 = 50.0;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstellationKind {
    Bpsk,
    Qpsk,
    Qam16,
}

impl ConstellationKind {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            ConstellationKind::Bpsk => 1,
            ConstellationKind::Qpsk => 2,
            ConstellationKind::Qam16 => 4,
        }
    }
}

impl FromStr for ConstellationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bpsk" => Ok(ConstellationKind::Bpsk),
            "qpsk" => Ok(ConstellationKind::Qpsk),
            "16qam" => Ok(ConstellationKind::Qam16),
            other => Err(format!("unknown constellation '{other}' (expected bpsk|qpsk|16qam)")),
        }
    }
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstellationKind::Bpsk => "bpsk",
            ConstellationKind::Qpsk => "qpsk",
            ConstellationKind::Qam16 => "16qam",
        };
        f.write_str(s)
    }
}

/// A mapping between bit groups and unit-mean-energy points.
#[derive(Clone, Debug)]
pub struct Constellation {
    kind: ConstellationKind,
    bits: usize,
    points: Vec<Complex64>,
}

/// Gray code for one 4-level axis: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
fn qam16_level(b_hi: usize, b_lo: usize) -> f64 {
    match (b_hi, b_lo) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        (1, 0) => 3.0,
        _ => unreachable!(),
    }
}

impl Constellation {
    pub fn new(kind: ConstellationKind) -> Self {
        let points = match kind {
            ConstellationKind::Bpsk => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            ConstellationKind::Qpsk => {
                // 00 at 45 degrees, Gray counterclockwise: 00, 01, 11, 10.
                let a = FRAC_1_SQRT_2;
                vec![
                    Complex64::new(a, a),   // 00
                    Complex64::new(-a, a),  // 01
                    Complex64::new(a, -a),  // 10
                    Complex64::new(-a, -a), // 11
                ]
            }
            ConstellationKind::Qam16 => {
                let scale = 1.0 / 10.0f64.sqrt();
                (0..16)
                    .map(|label| {
                        let i = qam16_level((label >> 3) & 1, (label >> 2) & 1);
                        let q = qam16_level((label >> 1) & 1, label & 1);
                        Complex64::new(i * scale, q * scale)
                    })
                    .collect()
            }
        };
        Self { kind, bits: kind.bits_per_symbol(), points }
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    /// Integer label of an MSB-first bit group.
    pub fn label_of_bits(&self, bits: &[u8]) -> usize {
        assert_eq!(bits.len(), self.bits, "bit group length mismatch");
        bits.iter().fold(0usize, |acc, &b| {
            debug_assert!(b <= 1);
            (acc << 1) | b as usize
        })
    }

    /// Writes a label's bits MSB-first into `out`.
    pub fn write_label_bits(&self, label: usize, out: &mut [u8]) {
        assert_eq!(out.len(), self.bits, "bit group length mismatch");
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = ((label >> (self.bits - 1 - i)) & 1) as u8;
        }
    }

    /// Maps an MSB-first bit group to its point.
    pub fn modulate(&self, bits: &[u8]) -> Complex64 {
        self.points[self.label_of_bits(bits)]
    }

    /// Nearest-point decision; ties resolve to the lowest label.
    pub fn hard_demap(&self, y: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }

    /// Exact per-bit LLRs for the observation model r = gain*s + CN(0, n0),
    /// clamped to +/-LLR_CLAMP. Positive favors bit 0. `out` must hold
    /// `bits_per_symbol()` entries.
    pub fn soft_demap_into(&self, r: Complex64, gain: f64, n0: f64, out: &mut [f64]) {
        self.demap_into(r, gain, n0, false, out);
    }

    /// Max-log variant of [`soft_demap_into`](Self::soft_demap_into).
    pub fn soft_demap_maxlog_into(&self, r: Complex64, gain: f64, n0: f64, out: &mut [f64]) {
        self.demap_into(r, gain, n0, true, out);
    }

    /// Convenience allocating wrapper.
    pub fn soft_demap(&self, r: Complex64, gain: f64, n0: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.bits];
        self.soft_demap_into(r, gain, n0, &mut out);
        out
    }

    fn demap_into(&self, r: Complex64, gain: f64, n0: f64, max_log: bool, out: &mut [f64]) {
        assert_eq!(out.len(), self.bits, "LLR output length mismatch");
        assert!(n0 > 0.0, "noise variance must be positive");
        let mut metric = [0.0f64; 16];
        for (label, p) in self.points.iter().enumerate() {
            metric[label] = -(r - gain * p).norm_sqr() / n0;
        }
        let n = self.points.len();
        for (i, slot) in out.iter_mut().enumerate() {
            let shift = self.bits - 1 - i;
            let (mut max0, mut max1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for label in 0..n {
                if (label >> shift) & 1 == 0 {
                    max0 = max0.max(metric[label]);
                } else {
                    max1 = max1.max(metric[label]);
                }
            }
            let llr = if max_log {
                max0 - max1
            } else {
                let (mut s0, mut s1) = (0.0f64, 0.0f64);
                for label in 0..n {
                    if (label >> shift) & 1 == 0 {
                        s0 += (metric[label] - max0).exp();
                    } else {
                        s1 += (metric[label] - max1).exp();
                    }
                }
                (max0 + s0.ln()) - (max1 + s1.ln())
            };
            *slot = llr.clamp(-LLR_CLAMP, LLR_CLAMP);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> [ConstellationKind; 3] {
        [ConstellationKind::Bpsk, ConstellationKind::Qpsk, ConstellationKind::Qam16]
    }

    #[test]
    fn mean_energy_is_one() {
        for kind in all_kinds() {
            let c = Constellation::new(kind);
            let e: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.len() as f64;
            assert!((e - 1.0).abs() < 1e-12, "{kind}: mean energy {e}");
        }
    }

    #[test]
    fn bpsk_map() {
        let c = Constellation::new(ConstellationKind::Bpsk);
        assert_eq!(c.modulate(&[0]), Complex64::new(1.0, 0.0));
        assert_eq!(c.modulate(&[1]), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn qpsk_gray_table() {
        let c = Constellation::new(ConstellationKind::Qpsk);
        let a = FRAC_1_SQRT_2;
        assert_eq!(c.modulate(&[0, 0]), Complex64::new(a, a));
        assert_eq!(c.modulate(&[0, 1]), Complex64::new(-a, a));
        assert_eq!(c.modulate(&[1, 1]), Complex64::new(-a, -a));
        assert_eq!(c.modulate(&[1, 0]), Complex64::new(a, -a));
    }

    #[test]
    fn round_trip_all_labels() {
        for kind in all_kinds() {
            let c = Constellation::new(kind);
            let mut bits = vec![0u8; c.bits_per_symbol()];
            for label in 0..c.len() {
                c.write_label_bits(label, &mut bits);
                assert_eq!(c.label_of_bits(&bits), label);
                assert_eq!(c.hard_demap(c.modulate(&bits)), label, "{kind} label {label}");
            }
        }
    }

    /// Nearest neighbors of every point differ in exactly one bit.
    #[test]
    fn gray_adjacency() {
        for kind in all_kinds() {
            let c = Constellation::new(kind);
            if c.len() < 4 {
                continue;
            }
            for a in 0..c.len() {
                let mut min_d = f64::INFINITY;
                for b in 0..c.len() {
                    if a != b {
                        min_d = min_d.min((c.point(a) - c.point(b)).norm_sqr());
                    }
                }
                for b in 0..c.len() {
                    if a == b {
                        continue;
                    }
                    let d = (c.point(a) - c.point(b)).norm_sqr();
                    if d < min_d + 1e-9 {
                        assert_eq!((a ^ b).count_ones(), 1, "{kind}: {a:#x} vs {b:#x}");
                    }
                }
            }
        }
    }

    #[test]
    fn hard_demap_tie_takes_lowest_label() {
        let c = Constellation::new(ConstellationKind::Qpsk);
        // The origin is equidistant from all four points.
        assert_eq!(c.hard_demap(Complex64::new(0.0, 0.0)), 0);
        let b = Constellation::new(ConstellationKind::Bpsk);
        assert_eq!(b.hard_demap(Complex64::new(0.0, 0.0)), 0);
    }

    #[test]
    fn bpsk_llr_closed_form() {
        let c = Constellation::new(ConstellationKind::Bpsk);
        for &(re, im, n0) in &[(0.3, 0.1, 1.0), (-1.2, 0.4, 0.5), (0.05, -0.3, 2.0)] {
            let r = Complex64::new(re, im);
            let llr = c.soft_demap(r, 1.0, n0)[0];
            let want = 4.0 * re / n0;
            assert!((llr - want).abs() < 1e-12, "got {llr}, want {want}");
        }
    }

    #[test]
    fn bpsk_llr_gain_scaling() {
        let c = Constellation::new(ConstellationKind::Bpsk);
        let r = Complex64::new(0.4, -0.2);
        let llr = c.soft_demap(r, 0.7, 0.9)[0];
        assert!((llr - 4.0 * 0.7 * 0.4 / 0.9).abs() < 1e-12);
    }

    #[test]
    fn llr_clamps_at_high_snr() {
        let c = Constellation::new(ConstellationKind::Qpsk);
        let r = c.modulate(&[1, 0]);
        let llrs = c.soft_demap(r, 1.0, 1e-9);
        assert_eq!(llrs[0], -LLR_CLAMP);
        assert_eq!(llrs[1], LLR_CLAMP);
    }

    #[test]
    fn llr_sign_matches_transmitted_bits_without_noise() {
        for kind in all_kinds() {
            let c = Constellation::new(kind);
            let mut bits = vec![0u8; c.bits_per_symbol()];
            let mut llrs = vec![0.0; c.bits_per_symbol()];
            for label in 0..c.len() {
                c.write_label_bits(label, &mut bits);
                c.soft_demap_into(c.point(label), 1.0, 0.05, &mut llrs);
                for (b, l) in bits.iter().zip(&llrs) {
                    if *b == 0 {
                        assert!(*l > 0.0, "{kind} label {label}: llr {l} for bit 0");
                    } else {
                        assert!(*l < 0.0, "{kind} label {label}: llr {l} for bit 1");
                    }
                }
            }
        }
    }

    /// Brute-force probability-domain oracle for the exact demapper.
    #[test]
    fn llr_matches_probability_domain_oracle() {
        let c = Constellation::new(ConstellationKind::Qam16);
        let r = Complex64::new(0.21, -0.44);
        let (gain, n0) = (0.9, 0.8);
        let llrs = c.soft_demap(r, gain, n0);
        for i in 0..4 {
            let (mut p0, mut p1) = (0.0f64, 0.0f64);
            for label in 0..16 {
                let p = (-(r - gain * c.point(label)).norm_sqr() / n0).exp();
                if (label >> (3 - i)) & 1 == 0 {
                    p0 += p;
                } else {
                    p1 += p;
                }
            }
            let want = (p0 / p1).ln();
            assert!((llrs[i] - want).abs() < 1e-9, "bit {i}: {} vs {want}", llrs[i]);
        }
    }

    #[test]
    fn maxlog_tracks_exact_at_high_snr() {
        let c = Constellation::new(ConstellationKind::Qam16);
        let r = c.point(11) + Complex64::new(0.01, -0.02);
        let mut exact = vec![0.0; 4];
        let mut approx = vec![0.0; 4];
        c.soft_demap_into(r, 1.0, 0.01, &mut exact);
        c.soft_demap_maxlog_into(r, 1.0, 0.01, &mut approx);
        for (e, a) in exact.iter().zip(&approx) {
            assert!((e - a).abs() < 0.05, "{e} vs {a}");
        }
    }

    #[test]
    #[should_panic(expected = "bit group length mismatch")]
    fn modulate_rejects_wrong_length() {
        Constellation::new(ConstellationKind::Qpsk).modulate(&[0, 1, 1]);
    }
}
