//! Ensemble statistics of the fading generator, noise, interference and
//! CSI-error models. Every check runs against a closed-form or quadrature
//! oracle with a frozen seed, so outcomes are deterministic.

use polmod::channel::coupling::BeamCoupling;
use polmod::channel::jakes::JakesTap;
use polmod::channel::{
    add_awgn, complex_normal, perturb_csi, FadingChannel, FadingParams, InterferenceField,
};
use polmod::linalg::{Mat2, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Bessel J0 by composite Simpson quadrature of
/// (1/pi) \int_0^pi cos(x sin t) dt.
fn bessel_j0(x: f64) -> f64 {
    let n = 2048;
    let h = std::f64::consts::PI / n as f64;
    let f = |t: f64| (x * t.sin()).cos();
    let mut s = f(0.0) + f(std::f64::consts::PI);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(k as f64 * h);
    }
    s * h / 3.0 / std::f64::consts::PI
}

#[test]
fn bessel_oracle_matches_known_values() {
    // Abramowitz & Stegun table values.
    assert!((bessel_j0(0.0) - 1.0).abs() < 1e-12);
    assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-10);
    assert!((bessel_j0(2.0) - 0.223_890_779_141_235_7).abs() < 1e-10);
    assert!((bessel_j0(std::f64::consts::PI) + 0.304_242_177_644_093_86).abs() < 1e-8);
}

#[test]
fn tap_powers_k_factor_and_pairwise_correlation() {
    let params = FadingParams::default();
    let realizations = 40_000;
    let samples_per = 25;
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);

    let mut mean = [C64::new(0.0, 0.0); 4];
    let mut power = [0.0f64; 4];
    let mut cross = [[C64::new(0.0, 0.0); 4]; 4];
    let k = params.k_factor;
    let los = C64::new((k / (k + 1.0)).sqrt(), 0.0);
    let mut count = 0usize;

    for _ in 0..realizations {
        let mut chan = FadingChannel::new(&params, &mut rng);
        for _ in 0..samples_per {
            let h = chan.next_matrix();
            let taps = [h.m[0][0], h.m[1][0], h.m[0][1], h.m[1][1]];
            for i in 0..4 {
                mean[i] += taps[i];
                power[i] += taps[i].norm_sqr();
                let di = taps[i] - los;
                for j in 0..4 {
                    cross[i][j] += di * (taps[j] - los).conj();
                }
            }
            count += 1;
        }
    }

    let n = count as f64;
    for i in 0..4 {
        let p = power[i] / n;
        assert!((p - 1.0).abs() < 0.01, "tap {i} mean power {p}");

        let mu = mean[i] / n;
        let diffuse = p - mu.norm_sqr();
        let k_hat = mu.norm_sqr() / diffuse;
        assert!(
            (k_hat - params.k_factor).abs() < 0.02 * params.k_factor,
            "tap {i} K estimate {k_hat}"
        );
    }
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let denom = (cross[i][i].re * cross[j][j].re).sqrt();
            let rho_hat = cross[i][j] / denom;
            assert!(
                (rho_hat.re - params.rho).abs() < 0.02,
                "pair ({i},{j}) correlation {rho_hat}"
            );
            assert!(rho_hat.im.abs() < 0.02);
        }
    }
}

#[test]
fn doppler_autocorrelation_follows_bessel_j0() {
    let doppler = 2.0;
    let rate = 800.0;
    let len = 256usize;
    let lags = [25usize, 50, 100, 150, 200];
    let realizations = 4000;
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE55E1);

    let mut acc = [C64::new(0.0, 0.0); 5];
    let mut cnt = [0u64; 5];
    let mut p0 = 0.0f64;
    let mut p0n = 0u64;
    for _ in 0..realizations {
        let mut tap = JakesTap::new(doppler, rate, &mut rng);
        let seq: Vec<C64> = (0..len).map(|_| tap.next()).collect();
        for g in &seq {
            p0 += g.norm_sqr();
            p0n += 1;
        }
        for (li, &lag) in lags.iter().enumerate() {
            for t in 0..len - lag {
                acc[li] += seq[t] * seq[t + lag].conj();
                cnt[li] += 1;
            }
        }
    }

    let power = p0 / p0n as f64;
    assert!((power - 1.0).abs() < 0.01, "tap power {power}");
    for (li, &lag) in lags.iter().enumerate() {
        let r = acc[li] / (cnt[li] as f64 * power);
        let tau_fd = lag as f64 * doppler / rate;
        let want = bessel_j0(std::f64::consts::TAU * tau_fd);
        assert!(
            (r.re - want).abs() < 0.05,
            "lag {tau_fd} fd: got {}, want {want}",
            r.re
        );
        assert!(r.im.abs() < 0.05);
    }
}

#[test]
fn awgn_moments() {
    let n0 = 0.8;
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    let n = 500_000usize;
    let mut total = 0.0;
    let mut re2 = 0.0;
    let mut im2 = 0.0;
    let mut mean = C64::new(0.0, 0.0);
    for _ in 0..n {
        let mut y = [C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        add_awgn(&mut y, n0, &mut rng);
        for v in y {
            total += v.norm_sqr();
            re2 += v.re * v.re;
            im2 += v.im * v.im;
            mean += v;
        }
    }
    let m = (2 * n) as f64;
    assert!((total / m - n0).abs() < 0.01 * n0);
    assert!((re2 / m - n0 / 2.0).abs() < 0.015 * n0);
    assert!((im2 / m - n0 / 2.0).abs() < 0.015 * n0);
    assert!((mean / m).norm() < 0.005);
}

#[test]
fn csi_error_power_and_independence() {
    let xi = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(0xE5717);
    let h = Mat2::identity();
    let n = 250_000usize;
    let mut err_power = [0.0f64; 4];
    let mut cross = C64::new(0.0, 0.0);
    for _ in 0..n {
        let est = perturb_csi(&h, xi, &mut rng);
        let e = [
            est.m[0][0] - h.m[0][0],
            est.m[0][1] - h.m[0][1],
            est.m[1][0] - h.m[1][0],
            est.m[1][1] - h.m[1][1],
        ];
        for i in 0..4 {
            err_power[i] += e[i].norm_sqr();
        }
        cross += e[0] * e[3].conj();
    }
    for (i, p) in err_power.iter().enumerate() {
        let p = p / n as f64;
        assert!((p - xi).abs() < 0.02 * xi, "entry {i} error power {p}");
    }
    // Normalized cross-correlation between distinct entries.
    let c = (cross / n as f64).norm() / xi;
    assert!(c < 0.01, "cross correlation {c}");
}

#[test]
fn interference_power_matches_analytic_sum() {
    let params = FadingParams::default();
    let coupling = BeamCoupling::builtin();
    let xpd_db = 15.0;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1F);

    let probe = InterferenceField::new(&coupling, &params, xpd_db, false, &mut rng);
    let want = probe.analytic_branch_power(&params);

    let realizations = 400;
    let symbols_per = 100;
    let mut emp = [0.0f64; 2];
    let mut genie = [0.0f64; 2];
    let mut count = 0usize;
    for _ in 0..realizations {
        let mut field = InterferenceField::new(&coupling, &params, xpd_db, false, &mut rng);
        for _ in 0..symbols_per {
            let (sample, cov) = field.next(&mut rng);
            emp[0] += sample[0].norm_sqr();
            emp[1] += sample[1].norm_sqr();
            genie[0] += cov.m[0][0].re;
            genie[1] += cov.m[1][1].re;
            count += 1;
        }
    }
    for b in 0..2 {
        let e = emp[b] / count as f64;
        let g = genie[b] / count as f64;
        assert!((e - want).abs() < 0.03 * want, "branch {b}: empirical {e} vs analytic {want}");
        assert!((g - want).abs() < 0.03 * want, "branch {b}: genie {g} vs analytic {want}");
        // The genie covariance is the exact conditional power, so it also
        // has to agree with the empirical average tightly.
        assert!((e - g).abs() < 0.03 * want);
    }
}

#[test]
fn complex_normal_is_circular() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let n = 200_000;
    let var = 2.5;
    let mut pseudo = C64::new(0.0, 0.0);
    let mut power = 0.0;
    for _ in 0..n {
        let z = complex_normal(var, &mut rng);
        pseudo += z * z;
        power += z.norm_sqr();
    }
    assert!((power / n as f64 - var).abs() < 0.02 * var);
    // E[z^2] = 0 for circular symmetry.
    assert!((pseudo / n as f64).norm() < 0.02 * var);
}
