//! Analytical symbol-error upper bounds used as oracles against the Monte
//! Carlo results. These are union bounds: they cap the worst case and are
//! compared against simulation one-sidedly, never treated as predictions.
//!
//! Conventions: `gamma_b` is Eb/N0 (linear) in the conditional bound;
//! `gamma_bar` is the mean symbol SNR per polarization Es/N0 (linear) in
//! the averaged bounds. With QPSK the two relate by gamma_bar = 2 gamma_b.

use crate::linalg::Mat2;
use crate::metrics::RateEstimate;
use statrs::function::erf::erfc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge within the evaluation budget")]
    NonConvergence,
}

/// Union bound on QPSK polarized-modulation symbol error conditioned on the
/// channel: (1/2)[erfc(sqrt(g |h1|^2)) + erfc(sqrt(g |h2|^2)) +
/// erfc(sqrt(g |h1-h2|^2 / 2))] with g the linear Eb/N0 and h1, h2 the
/// polarization columns. Degenerate h1 = h2 pins the last term at
/// erfc(0) = 1: the polarization bit becomes undetectable and the bound
/// floors at 1/2.
pub fn pe_union_conditional(h: &Mat2, gamma_b: f64) -> f64 {
    assert!(gamma_b > 0.0, "gamma_b must be positive");
    let h1 = h.col(0);
    let h2 = h.col(1);
    let n1 = h1[0].norm_sqr() + h1[1].norm_sqr();
    let n2 = h2[0].norm_sqr() + h2[1].norm_sqr();
    let d = (h1[0] - h2[0]).norm_sqr() + (h1[1] - h2[1]).norm_sqr();
    0.5 * (erfc((gamma_b * n1).sqrt())
        + erfc((gamma_b * n2).sqrt())
        + erfc((gamma_b * d / 2.0).sqrt()))
}

/// The conditional bound averaged over i.i.d. Rayleigh polarization
/// columns, closed form: (3/2)[1 - sqrt(g/(2+g)) (1 + 1/(2+g))].
pub fn pe_rayleigh_bound(gamma_bar: f64) -> f64 {
    assert!(gamma_bar > 0.0, "gamma_bar must be positive");
    let mu = (gamma_bar / (2.0 + gamma_bar)).sqrt();
    1.5 * (1.0 - mu * (1.0 + 1.0 / (2.0 + gamma_bar)))
}

/// The averaged bound for Rician fading with factor `k`, evaluated by
/// adaptive quadrature of
/// (3/(2 pi)) Int_0^pi [2(1+K)sin^2 t / (2(1+K)sin^2 t + g)]^2
///                     exp[-2 K g / (2(1+K)sin^2 t + g)] dt
/// to a relative tolerance of 1e-9. Reduces to the Rayleigh closed form at
/// k = 0.
pub fn pe_rician_bound(gamma_bar: f64, k: f64) -> Result<f64, QuadratureError> {
    assert!(gamma_bar > 0.0, "gamma_bar must be positive");
    assert!(k >= 0.0, "k must be nonnegative");
    let f = |t: f64| {
        let s = 2.0 * (1.0 + k) * t.sin().powi(2);
        let frac = s / (s + gamma_bar);
        frac * frac * (-2.0 * k * gamma_bar / (s + gamma_bar)).exp()
    };
    let integral = adaptive_simpson(&f, 0.0, std::f64::consts::PI, 1e-9)?;
    Ok(1.5 / std::f64::consts::PI * integral)
}

/// Outcome of comparing one ordered pair/triple of interval estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderVerdict {
    /// Every adjacent pair is separated in the stated direction.
    Pass,
    /// Intervals overlap somewhere; no conclusion either way.
    Inconclusive,
    /// Some adjacent pair is separated in the wrong direction.
    Fail,
}

/// Checks the predicted error-rate ordering lowest -> highest at each grid
/// point. Overlapping intervals are inconclusive rather than failures.
pub fn verify_bound_order(ordered: &[&[RateEstimate]]) -> Vec<OrderVerdict> {
    assert!(ordered.len() >= 2, "need at least two schemes to order");
    let points = ordered[0].len();
    assert!(
        ordered.iter().all(|s| s.len() == points),
        "every scheme needs the same grid"
    );
    (0..points)
        .map(|i| {
            let mut verdict = OrderVerdict::Pass;
            for pair in ordered.windows(2) {
                let (low, high) = (&pair[0][i], &pair[1][i]);
                if high.separated_below(low) {
                    return OrderVerdict::Fail;
                }
                if !low.separated_below(high) {
                    verdict = OrderVerdict::Inconclusive;
                }
            }
            verdict
        })
        .collect()
}

const MAX_EVALS: usize = 1 << 20;

/// Adaptive Simpson integration with Richardson error control.
pub fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64, QuadratureError> {
    struct Ctx<'a, F: Fn(f64) -> f64> {
        f: &'a F,
        evals: usize,
    }
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        ctx: &mut Ctx<F>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    ) -> Result<f64, QuadratureError> {
        if ctx.evals >= MAX_EVALS {
            return Err(QuadratureError::NonConvergence);
        }
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (ctx.f)(lm);
        let frm = (ctx.f)(rm);
        ctx.evals += 2;
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let refined = left + right;
        let err = (refined - whole) / 15.0;
        if err.abs() <= tol * refined.abs().max(1e-300) {
            return Ok(refined + err);
        }
        // A per-subinterval relative tolerance is additive for nonnegative
        // integrands, so it carries over unchanged.
        let l = recurse(ctx, a, m, fa, flm, fm, left, tol)?;
        let r = recurse(ctx, m, b, fm, frm, fb, right, tol)?;
        Ok(l + r)
    }

    assert!(b > a && rel_tol > 0.0);
    let mut ctx = Ctx { f, evals: 3 };
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(&mut ctx, a, b, fa, fm, fb, whole, rel_tol)
}
