//! Dual-polarized mobile satellite channel: correlated Rician flat fading
//! with a Jakes Doppler spectrum, cross-polarization control, cochannel
//! beam interference, receiver noise and channel-estimate errors.

pub mod coupling;
pub mod jakes;

use crate::constellation::{Constellation, ConstellationKind};
use crate::linalg::{Mat2, C64};
use crate::pmod::pmod_map;
use coupling::BeamCoupling;
use jakes::JakesTap;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rand::SeedableRng;

/// Rician fading statistics of the 2x2 polarization channel.
#[derive(Clone, Copy, Debug)]
pub struct FadingParams {
    /// Line-of-sight to diffuse power ratio, linear. May be infinite for a
    /// pure line-of-sight channel.
    pub k_factor: f64,
    /// Pairwise correlation applied uniformly across the diffuse parts of
    /// all four coefficients.
    pub rho: f64,
    pub doppler_hz: f64,
    pub symbol_rate_hz: f64,
    /// Diffuse scale before normalization. The coefficients are always
    /// renormalized to unit mean power, so this cancels; it is kept because
    /// scenario files state it.
    pub sigma_h: f64,
}

impl Default for FadingParams {
    fn default() -> Self {
        FadingParams {
            k_factor: 10.0,
            rho: 0.5,
            doppler_hz: 2.0,
            symbol_rate_hz: 33_600.0,
            sigma_h: 1.0,
        }
    }
}

impl FadingParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.k_factor >= 0.0) {
            return Err(format!("k_factor must be >= 0, got {}", self.k_factor));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(format!("rho must be in [0, 1], got {}", self.rho));
        }
        if !(self.doppler_hz >= 0.0) {
            return Err(format!("doppler_hz must be >= 0, got {}", self.doppler_hz));
        }
        if !(self.symbol_rate_hz > 0.0) {
            return Err(format!("symbol_rate_hz must be > 0, got {}", self.symbol_rate_hz));
        }
        if !(self.sigma_h > 0.0) {
            return Err(format!("sigma_h must be > 0, got {}", self.sigma_h));
        }
        Ok(())
    }
}

/// Static link-budget bookkeeping. Sweeps run on an Eb/N0 axis, so these
/// values do not enter the per-sample arithmetic beyond the transmit power;
/// they document how that axis maps to the absolute budget.
#[derive(Clone, Copy, Debug)]
pub struct LinkBudget {
    pub path_loss_db: f64,
    pub tx_power: f64,
    pub g_over_t_db: f64,
    pub bandwidth_hz: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        LinkBudget {
            path_loss_db: 187.05,
            tx_power: 1.0,
            g_over_t_db: -12.5,
            bandwidth_hz: 200_000.0,
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<(), String> {
        let ok = self.path_loss_db.is_finite()
            && self.tx_power.is_finite()
            && self.tx_power > 0.0
            && self.g_over_t_db.is_finite()
            && self.bandwidth_hz.is_finite()
            && self.bandwidth_hz > 0.0;
        if ok {
            Ok(())
        } else {
            Err("link budget entries must be finite, tx_power and bandwidth positive".into())
        }
    }
}

/// Normalized channel-estimate error power |xi|^2 = E|h - h_est|^2 / E|h|^2.
#[derive(Clone, Copy, Debug, Default)]
pub struct CsiError {
    pub xi_power: f64,
}

impl CsiError {
    pub fn validate(&self) -> Result<(), String> {
        if self.xi_power >= 0.0 {
            Ok(())
        } else {
            Err(format!("xi_power must be >= 0, got {}", self.xi_power))
        }
    }
}

/// Lower-triangular Cholesky factor of a symmetric PSD 4x4 matrix.
/// Semi-definite inputs (zero pivots) are handled by zeroing the
/// corresponding column.
fn cholesky4(c: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut l = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let mut s = c[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                l[i][j] = s.max(0.0).sqrt();
            } else if l[j][j] > 1e-12 {
                l[i][j] = s / l[j][j];
            }
        }
    }
    l
}

/// Stateful per-trial generator of the 2x2 fading sequence. One instance per
/// simulation block; construction consumes the randomness, stepping is
/// deterministic.
#[derive(Clone, Debug)]
pub struct FadingChannel {
    taps: [JakesTap; 4],
    chol: [[f64; 4]; 4],
    los_amp: f64,
    diffuse_amp: f64,
}

impl FadingChannel {
    pub fn new<R: Rng + ?Sized>(params: &FadingParams, rng: &mut R) -> Self {
        params.validate().expect("valid fading parameters");
        let k = params.k_factor;
        let (los_amp, diffuse_amp) = if k.is_infinite() {
            (1.0, 0.0)
        } else {
            ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
        };
        let mut corr = [[params.rho; 4]; 4];
        for (i, row) in corr.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let mk_tap = |rng: &mut R| JakesTap::new(params.doppler_hz, params.symbol_rate_hz, rng);
        FadingChannel {
            taps: [mk_tap(rng), mk_tap(rng), mk_tap(rng), mk_tap(rng)],
            chol: cholesky4(corr),
            los_amp,
            diffuse_amp,
        }
    }

    /// Channel matrix for the current symbol; advances time by one symbol.
    pub fn next_matrix(&mut self) -> Mat2 {
        let raw = [
            self.taps[0].next(),
            self.taps[1].next(),
            self.taps[2].next(),
            self.taps[3].next(),
        ];
        let mut mixed = [C64::new(0.0, 0.0); 4];
        for i in 0..4 {
            for j in 0..=i {
                mixed[i] += raw[j] * self.chol[i][j];
            }
        }
        let los = C64::new(self.los_amp, 0.0);
        // Tap order: h11, h21, h12, h22 (column = transmit polarization).
        let tap = |g: C64| los + g * self.diffuse_amp;
        Mat2::new(tap(mixed[0]), tap(mixed[2]), tap(mixed[1]), tap(mixed[3]))
    }
}

/// Convenience sequence generator, deterministic in the seed.
pub fn gen_fading(params: &FadingParams, n_symbols: usize, seed: u64) -> Vec<Mat2> {
    assert!(n_symbols >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chan = FadingChannel::new(params, &mut rng);
    (0..n_symbols).map(|_| chan.next_matrix()).collect()
}

/// Scales the cross-polar coefficients so the copolar/crosspolar amplitude
/// ratio equals `xpd_db` in expectation (the generator itself produces equal
/// mean powers on all four taps).
pub fn set_xpd(h: &Mat2, xpd_db: f64) -> Mat2 {
    let a = C64::new(10f64.powf(-xpd_db / 20.0), 0.0);
    Mat2::new(h.m[0][0], h.m[0][1] * a, h.m[1][0] * a, h.m[1][1])
}

/// Zero-mean circular complex Gaussian with total variance `var`.
pub fn complex_normal<R: Rng + ?Sized>(var: f64, rng: &mut R) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Receiver channel estimate: each coefficient gets an independent complex
/// Gaussian error of power `xi_power` (normalized, since E|h_ij|^2 = 1).
pub fn perturb_csi<R: Rng + ?Sized>(h: &Mat2, xi_power: f64, rng: &mut R) -> Mat2 {
    assert!(xi_power >= 0.0);
    let mut out = *h;
    for r in 0..2 {
        for c in 0..2 {
            out.m[r][c] += complex_normal(xi_power, rng);
        }
    }
    out
}

/// In-place per-branch complex AWGN of variance `n0`.
pub fn add_awgn<R: Rng + ?Sized>(y: &mut [C64; 2], n0: f64, rng: &mut R) {
    assert!(n0 >= 0.0);
    y[0] += complex_normal(n0, rng);
    y[1] += complex_normal(n0, rng);
}

/// The six cochannel beams: independently faded, coupled through their
/// beam matrices, each carrying its own polarized-modulation QPSK stream.
pub struct InterferenceField {
    channels: Vec<FadingChannel>,
    couplings: Vec<Mat2>,
    cons: Constellation,
    xpd_db: f64,
}

impl InterferenceField {
    pub fn new<R: Rng + ?Sized>(
        coupling: &BeamCoupling,
        params: &FadingParams,
        xpd_db: f64,
        signed_amplitudes: bool,
        rng: &mut R,
    ) -> Self {
        let couplings: Vec<Mat2> = (1..coupling.count())
            .map(|i| coupling.amplitude(i, signed_amplitudes).expect("index in range"))
            .collect();
        let channels = (0..couplings.len()).map(|_| FadingChannel::new(params, rng)).collect();
        InterferenceField {
            channels,
            couplings,
            cons: Constellation::new(ConstellationKind::Qpsk),
            xpd_db,
        }
    }

    /// Aggregate interference sample for one symbol period together with its
    /// exact conditional covariance sum_i G_i G_i^H / 2, G_i = H_i B_i.
    pub fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ([C64; 2], Mat2) {
        let mut sample = [C64::new(0.0, 0.0); 2];
        let mut cov = Mat2::zero();
        let bits_per = self.cons.bits_per_symbol() + 1;
        for (chan, b) in self.channels.iter_mut().zip(&self.couplings) {
            let h = set_xpd(&chan.next_matrix(), self.xpd_db);
            let g = h.mul_mat(b);
            let mut bits = [0u8; 8];
            for bit in bits.iter_mut().take(bits_per) {
                *bit = rng.gen_range(0..2u8);
            }
            let x = pmod_map(&bits[..bits_per], &self.cons);
            let y = g.mul_vec(x);
            sample[0] += y[0];
            sample[1] += y[1];
            cov = cov.add(&g.mul_mat(&g.herm()).scale(0.5));
        }
        (sample, cov)
    }

    /// Mean interference power per receive branch, for closed-form checks.
    /// One beam contributes (1/2) sum_l col_l(B)^T R col_l(B), where R is
    /// the tap second-moment matrix of one receive row, [[1, a*c], [a*c,
    /// a^2]], a the crosspolar amplitude and c the tap cross-correlation
    /// (K + rho)/(K + 1). Both branches see the same value by symmetry.
    pub fn analytic_branch_power(&self, params: &FadingParams) -> f64 {
        let a = 10f64.powf(-self.xpd_db / 20.0);
        let k = params.k_factor;
        let cross = if k.is_infinite() {
            1.0
        } else {
            (k + params.rho) / (k + 1.0)
        };
        let r = [[1.0, a * cross], [a * cross, a * a]];
        self.couplings
            .iter()
            .map(|b| {
                let mut t = 0.0;
                for l in 0..2 {
                    let col = [b.m[0][l].re, b.m[1][l].re];
                    for j in 0..2 {
                        for k2 in 0..2 {
                            t += col[j] * r[j][k2] * col[k2];
                        }
                    }
                }
                0.5 * t
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reproduces_correlation_matrix() {
        let rho = 0.5;
        let mut c = [[rho; 4]; 4];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let l = cholesky4(c);
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += l[i][k] * l[j][k];
                }
                assert!((s - c[i][j]).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn cholesky_identity_for_uncorrelated() {
        let mut c = [[0.0; 4]; 4];
        for (i, row) in c.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let l = cholesky4(c);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((l[i][j] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cholesky_handles_fully_correlated_edge() {
        let c = [[1.0; 4]; 4];
        let l = cholesky4(c);
        for i in 0..4 {
            let mut s = 0.0;
            for k in 0..4 {
                s += l[i][k] * l[i][k];
            }
            assert!((s - 1.0).abs() < 1e-12);
            assert!((l[i][0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_los_channel_is_deterministic_unit_modulus() {
        let params = FadingParams { k_factor: f64::INFINITY, ..FadingParams::default() };
        let seq = gen_fading(&params, 50, 9);
        for h in seq {
            for r in 0..2 {
                for c in 0..2 {
                    assert!((h.m[r][c].norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn identical_seeds_give_bit_identical_sequences() {
        let params = FadingParams::default();
        let a = gen_fading(&params, 200, 1234);
        let b = gen_fading(&params, 200, 1234);
        assert_eq!(a, b);
        let c = gen_fading(&params, 200, 1235);
        assert_ne!(a, c);
    }

    #[test]
    fn sigma_h_cancels_under_normalization() {
        let base = FadingParams::default();
        let scaled = FadingParams { sigma_h: 3.7, ..base };
        assert_eq!(gen_fading(&base, 100, 7), gen_fading(&scaled, 100, 7));
    }

    #[test]
    fn xpd_scales_only_crosspolar_taps() {
        let h = Mat2::new(
            C64::new(1.0, 0.0),
            C64::new(0.5, -0.5),
            C64::new(-0.3, 0.2),
            C64::new(0.9, 0.1),
        );
        let out = set_xpd(&h, 30.0);
        let a = 10f64.powf(-1.5);
        assert_eq!(out.m[0][0], h.m[0][0]);
        assert_eq!(out.m[1][1], h.m[1][1]);
        assert!((out.m[0][1] - h.m[0][1] * a).norm() < 1e-15);
        assert!((out.m[1][0] - h.m[1][0] * a).norm() < 1e-15);
        // 0 dB leaves the matrix untouched.
        assert_eq!(set_xpd(&h, 0.0), h);
    }

    #[test]
    fn zero_error_power_returns_exact_estimate() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = Mat2::identity();
        let est = perturb_csi(&h, 0.0, &mut rng);
        assert_eq!(est, h);
    }

    #[test]
    fn zero_noise_is_identity() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut y = [C64::new(0.2, -0.7), C64::new(1.5, 0.0)];
        let orig = y;
        add_awgn(&mut y, 0.0, &mut rng);
        assert_eq!(y, orig);
    }

    #[test]
    fn interference_disabled_when_no_beams() {
        use rand::SeedableRng;
        let coupling = BeamCoupling::parse("beam 0\n0 -inf\n-inf 0\n").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut field =
            InterferenceField::new(&coupling, &FadingParams::default(), 15.0, false, &mut rng);
        let (sample, cov) = field.next(&mut rng);
        assert_eq!(sample[0], C64::new(0.0, 0.0));
        assert_eq!(sample[1], C64::new(0.0, 0.0));
        assert_eq!(cov, Mat2::zero());
    }

    #[test]
    fn link_budget_defaults_validate() {
        assert!(LinkBudget::default().validate().is_ok());
        let bad = LinkBudget { tx_power: 0.0, ..LinkBudget::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fading_params_validation_catches_bad_values() {
        assert!(FadingParams::default().validate().is_ok());
        assert!(FadingParams { k_factor: -1.0, ..Default::default() }.validate().is_err());
        assert!(FadingParams { rho: 1.5, ..Default::default() }.validate().is_err());
        assert!(FadingParams { symbol_rate_hz: 0.0, ..Default::default() }.validate().is_err());
        assert!(FadingParams { sigma_h: 0.0, ..Default::default() }.validate().is_err());
    }
}
