//! Sum-of-sinusoids Doppler fading tap with the classical Jakes spectrum.
//!
//! Each tap is a weighted sum of complex oscillators
//!
//!   g(k) = sum_n w_n exp(j (2 pi f_n k T + phi_n)),   f_n = f_d cos(a_n)
//!
//! with per-realization random arrival angles a_n, phases phi_n and complex
//! weights w_n drawn once at construction. The weights are normalized to
//! sum |w_n|^2 = 1, which pins the ensemble-average tap power to exactly one
//! and leaves the autocorrelation at E[g(k) g*(k+m)] = J0(2 pi f_d m T).
//! Oscillators advance by phasor multiplication; a periodic renormalization
//! keeps the unit-modulus states from drifting over long runs.

use crate::linalg::C64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

pub const OSCILLATORS: usize = 64;

const RENORM_PERIOD: u32 = 4096;

#[derive(Clone, Debug)]
pub struct JakesTap {
    weights: [C64; OSCILLATORS],
    phasors: [C64; OSCILLATORS],
    rotors: [C64; OSCILLATORS],
    steps: u32,
}

impl JakesTap {
    pub fn new<R: Rng + ?Sized>(doppler_hz: f64, sample_rate_hz: f64, rng: &mut R) -> Self {
        assert!(doppler_hz >= 0.0 && sample_rate_hz > 0.0);
        let mut weights = [C64::new(0.0, 0.0); OSCILLATORS];
        let mut phasors = [C64::new(0.0, 0.0); OSCILLATORS];
        let mut rotors = [C64::new(0.0, 0.0); OSCILLATORS];
        let mut power = 0.0;
        for w in &mut weights {
            *w = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            power += w.norm_sqr();
        }
        let scale = power.sqrt().recip();
        for w in &mut weights {
            *w *= scale;
        }
        for n in 0..OSCILLATORS {
            let angle: f64 = rng.gen_range(0.0..TAU);
            let freq = doppler_hz * angle.cos();
            let phase: f64 = rng.gen_range(0.0..TAU);
            phasors[n] = C64::from_polar(1.0, phase);
            rotors[n] = C64::from_polar(1.0, TAU * freq / sample_rate_hz);
        }
        JakesTap { weights, phasors, rotors, steps: 0 }
    }

    /// Current tap value; advances the oscillator bank by one sample period.
    pub fn next(&mut self) -> C64 {
        let mut g = C64::new(0.0, 0.0);
        for n in 0..OSCILLATORS {
            g += self.weights[n] * self.phasors[n];
        }
        for n in 0..OSCILLATORS {
            self.phasors[n] *= self.rotors[n];
        }
        self.steps += 1;
        if self.steps >= RENORM_PERIOD {
            self.steps = 0;
            for p in &mut self.phasors {
                *p = p.unscale(p.norm());
            }
        }
        g
    }
}
