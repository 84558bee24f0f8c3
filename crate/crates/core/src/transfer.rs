//! Perfect-state-transfer analysis of tridiagonal chains.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::spectral::{min_gap, SpectralData};

/// Default fidelity threshold for [`measure_transfer_time`].
pub const DEFAULT_THRESHOLD: f64 = 0.999;

/// Upper limit on the number of samples in a fidelity trace.
pub const MAX_TRACE_SAMPLES: usize = 20_000_000;

/// Fidelity trace and derived transfer figures for one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferResult {
    pub times: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub f_max: f64,
    /// First time at which the fidelity reaches the threshold; `None` if it never does before `t_max`.
    pub transfer_time: Option<f64>,
    /// Smallest eigenvalue spacing; zero for a single-site chain.
    pub min_gap: f64,
}

/// Couplings `J_i = (2/(N-1)) √((i+1)(N-2-i))`, `i = 0..N-3`, realising a spin-`(N-2)/2` rotation.
pub fn christandl_couplings(n: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(invalid("N", format!("need N >= 3, got {n}")));
    }
    let scale = 2.0 / (n - 1) as f64;
    Ok((0..n - 2)
        .map(|i| scale * (((i + 1) * (n - 2 - i)) as f64).sqrt())
        .collect())
}

/// `F(t) = |Σ_k e^{-iλ_k t} a_k|`.
pub fn fidelity(s: &SpectralData, t: f64) -> f64 {
    let (re, im) =
        s.eigenvalues
            .iter()
            .zip(&s.amplitudes)
            .fold((0.0, 0.0), |(re, im), (&lam, &a)| {
                let (sin, cos) = (lam * t).sin_cos();
                (re + a * cos, im - a * sin)
            });
    re.hypot(im)
}

/// Upper bound `Σ_k |a_k|` on the fidelity for fixed amplitudes.
pub fn f_max(s: &SpectralData) -> f64 {
    s.amplitudes.iter().map(|a| a.abs()).sum()
}

/// Sampling step `π / (4 · spectral width)` (or `π/4` for a flat spectrum).
pub fn grid_step(s: &SpectralData) -> f64 {
    let w = s.width();
    if w > 0.0 {
        PI / (4.0 * w)
    } else {
        PI / 4.0
    }
}

/// Scans `F(t)` on a spectral-width grid up to `t_max` and records the first crossing of `threshold`,
/// refined by bisection between the bracketing samples.
pub fn measure_transfer_time(
    s: &SpectralData,
    threshold: f64,
    t_max: f64,
) -> Result<TransferResult> {
    if !(threshold >= 0.0 && threshold <= 1.0) {
        return Err(invalid(
            "threshold",
            format!("must lie in [0, 1], got {threshold}"),
        ));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(invalid("t_max", format!("must be positive, got {t_max}")));
    }
    let dt = grid_step(s);
    let steps = (t_max / dt).ceil() as usize;
    if steps > MAX_TRACE_SAMPLES {
        return Err(Error::TooLarge {
            what: "trace samples",
            size: steps,
            cap: MAX_TRACE_SAMPLES,
        });
    }
    let times: Vec<f64> = (0..=steps).map(|k| (k as f64 * dt).min(t_max)).collect();
    let fidelities: Vec<f64> = times.iter().map(|&t| fidelity(s, t)).collect();
    let transfer_time = fidelities.iter().position(|&f| f >= threshold).map(|k| {
        if k == 0 {
            0.0
        } else {
            let (mut lo, mut hi) = (times[k - 1], times[k]);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if fidelity(s, mid) >= threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    });
    Ok(TransferResult {
        times,
        fidelities,
        f_max: f_max(s),
        transfer_time,
        min_gap: if s.len() >= 2 { min_gap(s)? } else { 0.0 },
    })
}

/// Location and height of the first local maximum of `F(t)` on `(0, t_max]` whose
/// height is at least `min_height`, refined by golden-section search.
pub fn first_peak(s: &SpectralData, t_max: f64, min_height: f64) -> Option<(f64, f64)> {
    let dt = grid_step(s);
    let steps = (t_max / dt).ceil() as usize;
    let f = |k: usize| fidelity(s, k as f64 * dt);
    let (mut prev, mut cur) = (f(0), f(1));
    for k in 1..steps {
        let next = f(k + 1);
        if cur >= prev && cur >= next && cur >= min_height {
            return Some(maximize(s, (k - 1) as f64 * dt, (k + 1) as f64 * dt));
        }
        prev = cur;
        cur = next;
    }
    None
}

/// Golden-section maximisation of `F` on `[a, b]`.
pub fn maximize(s: &SpectralData, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (fidelity(s, c), fidelity(s, d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * b.abs().max(1.0) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fidelity(s, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fidelity(s, d);
        }
    }
    let t = 0.5 * (a + b);
    (t, fidelity(s, t))
}
