//! Polarized modulation: transmit mapping, the four demodulators, and the
//! MMSE front-end used under cochannel interference.
//!
//! A symbol carries b+1 bits: the first bit c selects which polarization
//! radiates, the remaining b bits pick the constellation point s, so the
//! transmit vector is x = [(1-c)s, c*s] at full symbol power. The receiver
//! sees y = H x + w with H the 2x2 polarization channel (column j is the
//! response to transmit branch j) and w per-branch complex noise of
//! variance n0.
//!
//! The demodulators trade optimality against how much soft information they
//! retain:
//!
//! * `demod_zf`: pseudo-inverse then a per-branch power detector.
//! * `demod_ml`: exhaustive joint search over both branches and all points.
//! * `demod_hd`: branch decision from the sign of the log ratio
//!   log Lambda = log P(c=1|y) - log P(c=0|y), then the selected branch is
//!   equalized by its copolar coefficient.
//! * `demod_sd`: the branches are blended with posterior weights
//!   P1 = 1-P2, P2 = sigma(log Lambda) and equalized by the blended copolar
//!   gain, so no hard branch decision is ever taken.

use crate::constellation::Constellation;
use crate::linalg::{norm_sq, vec_sub, Mat2, C64};
use thiserror::Error;

/// Gram-matrix condition numbers above this make the zero-forcing
/// pseudo-inverse meaningless.
pub const ZF_COND_LIMIT: f64 = 1e12;

/// The branch log ratio is clamped to this magnitude.
pub const LAMBDA_CLAMP: f64 = 700.0;

#[derive(Debug, Error, PartialEq)]
pub enum PmodError {
    #[error("channel Gram matrix is ill-conditioned (cond = {cond:.3e})")]
    IllConditioned { cond: f64 },
}

/// Maps a (b+1)-bit group to the transmit vector: first bit selects the
/// polarization, the rest the constellation point. Full power on the active
/// branch.
pub fn pmod_map(bits: &[u8], cons: &Constellation) -> [C64; 2] {
    assert_eq!(bits.len(), cons.bits_per_symbol() + 1, "pmod bit group length mismatch");
    let c = bits[0];
    debug_assert!(c <= 1);
    let s = cons.modulate(&bits[1..]);
    let zero = C64::new(0.0, 0.0);
    if c == 0 {
        [s, zero]
    } else {
        [zero, s]
    }
}

/// Spectral-efficiency multiplier of polarized modulation over plain
/// single-polarization signalling with the same constellation: (b+1)/b.
pub fn throughput_gain(b: usize) -> f64 {
    assert!(b >= 1, "constellation must carry at least one bit");
    1.0 + 1.0 / b as f64
}

/// One demodulated polarized-modulation symbol.
///
/// `r` is the scalar stream handed to the constellation demapper, already
/// equalized to unit gain; `demap_n0` is the matching effective noise
/// variance. `lambda_log` is log Lambda when the demodulator computed it.
/// `s_hard` is the decided constellation label for detectors that make a
/// hard joint decision.
#[derive(Clone, Copy, Debug)]
pub struct DemodResult {
    pub c_hat: u8,
    pub lambda_log: Option<f64>,
    pub r: C64,
    pub demap_n0: f64,
    pub s_hard: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DemodKind {
    Zf,
    Ml,
    Hd,
    Sd,
}

impl DemodKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DemodKind::Zf => "zf",
            DemodKind::Ml => "ml",
            DemodKind::Hd => "hd",
            DemodKind::Sd => "sd",
        }
    }
}

impl std::str::FromStr for DemodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zf" => Ok(DemodKind::Zf),
            "ml" => Ok(DemodKind::Ml),
            "hd" => Ok(DemodKind::Hd),
            "sd" => Ok(DemodKind::Sd),
            other => Err(format!("unknown demodulator '{other}' (expected zf|ml|hd|sd)")),
        }
    }
}

/// Zero-forcing demodulation: z = (H^H H)^-1 H^H y, branch decided by the
/// power detector argmax_i |z_i|^2, stream taken from the winning branch.
/// The effective noise variance after the pseudo-inverse is
/// n0 * [(H^H H)^-1]_cc.
pub fn demod_zf(y: [C64; 2], h: &Mat2, n0: f64) -> Result<DemodResult, PmodError> {
    let gram = h.gram();
    let cond = gram.hermitian_cond();
    if !(cond <= ZF_COND_LIMIT) {
        return Err(PmodError::IllConditioned { cond });
    }
    let gram_inv = gram.inverse().ok_or(PmodError::IllConditioned { cond })?;
    let w = gram_inv.mul_mat(&h.herm());
    let z = w.mul_vec(y);
    let c_hat = usize::from(z[1].norm_sqr() > z[0].norm_sqr());
    Ok(DemodResult {
        c_hat: c_hat as u8,
        lambda_log: None,
        r: z[c_hat],
        demap_n0: n0 * gram_inv.m[c_hat][c_hat].re,
        s_hard: None,
    })
}

/// Maximum-likelihood demodulation: exhaustive minimization of
/// ||y - h_c * s||^2 over both branches and every constellation point.
/// Candidates are enumerated branch-major (c = 0 first), label order inside
/// a branch; ties keep the earliest candidate. `r` is the winning point
/// itself, i.e. a noise-free hard decision.
pub fn demod_ml(y: [C64; 2], h: &Mat2, cons: &Constellation) -> DemodResult {
    let mut best_c = 0usize;
    let mut best_label = 0usize;
    let mut best_metric = f64::INFINITY;
    for c in 0..2 {
        let hc = h.col(c);
        for (label, s) in cons.points().iter().enumerate() {
            let d0 = y[0] - hc[0] * s;
            let d1 = y[1] - hc[1] * s;
            let metric = d0.norm_sqr() + d1.norm_sqr();
            if metric < best_metric {
                best_metric = metric;
                best_c = c;
                best_label = label;
            }
        }
    }
    DemodResult {
        c_hat: best_c as u8,
        lambda_log: None,
        r: cons.point(best_label),
        demap_n0: 1.0,
        s_hard: Some(best_label),
    }
}

/// log Lambda = log P(c=1|y) - log P(c=0|y) under equiprobable points,
/// computed per branch with log-sum-exp and clamped to +/-LAMBDA_CLAMP.
pub fn demod_llr(y: [C64; 2], h: &Mat2, cons: &Constellation, n0: f64) -> f64 {
    assert!(n0 > 0.0, "noise variance must be positive");
    let mut branch_ll = [0.0f64; 2];
    for c in 0..2 {
        let hc = h.col(c);
        let mut max = f64::NEG_INFINITY;
        let mut metric = [0.0f64; 16];
        for (label, s) in cons.points().iter().enumerate() {
            let d0 = y[0] - hc[0] * s;
            let d1 = y[1] - hc[1] * s;
            let m = -(d0.norm_sqr() + d1.norm_sqr()) / n0;
            metric[label] = m;
            max = max.max(m);
        }
        let sum: f64 = cons.points().iter().enumerate().map(|(l, _)| (metric[l] - max).exp()).sum();
        branch_ll[c] = max + sum.ln();
    }
    (branch_ll[1] - branch_ll[0]).clamp(-LAMBDA_CLAMP, LAMBDA_CLAMP)
}

/// Hard-decision demodulation: the branch is chosen by the sign of
/// log Lambda, the winning branch observation is equalized by its copolar
/// coefficient h_cc.
pub fn demod_hd(y: [C64; 2], h: &Mat2, cons: &Constellation, n0: f64) -> DemodResult {
    let ll = demod_llr(y, h, cons, n0);
    let c_hat = usize::from(ll > 0.0);
    let hcc = h.m[c_hat][c_hat];
    let p = hcc.norm_sqr();
    let (r, demap_n0) = if p > 0.0 {
        (y[c_hat] / hcc, n0 / p)
    } else {
        (C64::new(0.0, 0.0), f64::INFINITY)
    };
    DemodResult { c_hat: c_hat as u8, lambda_log: Some(ll), r, demap_n0, s_hard: None }
}

/// Soft-decision demodulation: the two branches are blended with the
/// posterior weights P1 = 1-P2 and P2 = sigma(log Lambda), then equalized by
/// the blended copolar gain (1-P2) h_11 + P2 h_22. The effective noise
/// variance accounts for the weighted noise combination,
/// (P1^2 + P2^2) n0 / |g|^2.
pub fn demod_sd(y: [C64; 2], h: &Mat2, cons: &Constellation, n0: f64) -> DemodResult {
    let ll = demod_llr(y, h, cons, n0);
    let p2 = sigmoid(ll);
    let p1 = 1.0 - p2;
    let blended = y[0] * p1 + y[1] * p2;
    let g = h.m[0][0] * p1 + h.m[1][1] * p2;
    let gp = g.norm_sqr();
    let (r, demap_n0) = if gp > 0.0 {
        (blended / g, (p1 * p1 + p2 * p2) * n0 / gp)
    } else {
        (C64::new(0.0, 0.0), f64::INFINITY)
    };
    DemodResult { c_hat: u8::from(ll > 0.0), lambda_log: Some(ll), r, demap_n0, s_hard: None }
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Output of the interference-aware linear front-end.
#[derive(Clone, Copy, Debug)]
pub struct MmseOutput {
    /// Filtered observation W y.
    pub y: [C64; 2],
    /// Effective channel W H seen by the demodulators.
    pub h_eff: Mat2,
    /// Scalar white-noise proxy for the filtered noise-plus-interference,
    /// mean of diag(W (R_int + n0 I) W^H).
    pub n0_eff: f64,
}

/// MMSE front-end W = H^H (H H^H + R_int + n0 I)^-1 for cochannel
/// interference with covariance `r_int`. The filtered observation, the
/// effective channel and a matched scalar noise variance are returned so the
/// regular demodulators can run on the output.
pub fn mmse_frontend(y: [C64; 2], h: &Mat2, r_int: &Mat2, n0: f64) -> MmseOutput {
    assert!(n0 > 0.0, "noise variance must be positive");
    let mut a = h.mul_mat(&h.herm()).add(r_int);
    a.m[0][0] += n0;
    a.m[1][1] += n0;
    // A is Hermitian positive definite (n0 > 0), so the inverse exists.
    let a_inv = a.inverse().expect("positive definite matrix");
    let w = h.herm().mul_mat(&a_inv);
    let mut cov = *r_int;
    cov.m[0][0] += n0;
    cov.m[1][1] += n0;
    let filtered_cov = w.mul_mat(&cov).mul_mat(&w.herm());
    MmseOutput {
        y: w.mul_vec(y),
        h_eff: w.mul_mat(h),
        n0_eff: 0.5 * (filtered_cov.m[0][0].re + filtered_cov.m[1][1].re),
    }
}

/// Dispatch helper for the scenario runner.
pub fn demodulate(
    kind: DemodKind,
    y: [C64; 2],
    h: &Mat2,
    cons: &Constellation,
    n0: f64,
) -> Result<DemodResult, PmodError> {
    match kind {
        DemodKind::Zf => demod_zf(y, h, n0),
        DemodKind::Ml => Ok(demod_ml(y, h, cons)),
        DemodKind::Hd => Ok(demod_hd(y, h, cons, n0)),
        DemodKind::Sd => Ok(demod_sd(y, h, cons, n0)),
    }
}

/// Candidate transmit set, enumeration order matching `demod_ml`. Used by
/// tests and the self test as the naive oracle.
pub fn candidate_set(cons: &Constellation) -> Vec<(u8, usize, [C64; 2])> {
    let mut set = Vec::with_capacity(2 * cons.len());
    let zero = C64::new(0.0, 0.0);
    for c in 0..2u8 {
        for (label, s) in cons.points().iter().enumerate() {
            let x = if c == 0 { [*s, zero] } else { [zero, *s] };
            set.push((c, label, x));
        }
    }
    set
}

/// Naive maximum-likelihood search over the explicit candidate set. Same
/// answer as `demod_ml`, kept separate as a cross-check oracle.
pub fn ml_oracle(y: [C64; 2], h: &Mat2, cons: &Constellation) -> (u8, usize) {
    let mut best = (0u8, 0usize);
    let mut best_metric = f64::INFINITY;
    for (c, label, x) in candidate_set(cons) {
        let m = norm_sq(vec_sub(y, h.mul_vec(x)));
        if m < best_metric {
            best_metric = m;
            best = (c, label);
        }
    }
    best
}
