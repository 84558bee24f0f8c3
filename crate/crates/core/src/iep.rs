//! Spectral retuning for perfect transfer and Jacobi-matrix reconstruction.

use std::f64::consts::PI;

use crate::effham::SymTridiag;
use crate::error::{invalid, Error, Result};
use crate::spectral::{eigh_tridiag, min_gap, SpectralData};
use crate::transfer::fidelity;

/// Knobs for [`retune_eigenvalues`] and [`retune_chain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetuneOptions {
    /// Require `t ≥ min_time_factor · π / Δ'`. Zero disables the check.
    pub min_time_factor: f64,
    /// [`retune_chain`] fails unless `F(t) ≥ 1 - fidelity_tolerance`.
    pub fidelity_tolerance: f64,
}

impl Default for RetuneOptions {
    fn default() -> Self {
        Self {
            min_time_factor: 10.0,
            fidelity_tolerance: 1e-6,
        }
    }
}

/// Eigenvalues moved onto the `π/t` grid with a common transfer phase.
#[derive(Debug, Clone, PartialEq)]
pub struct RetunePlan {
    pub t: f64,
    pub theta: f64,
    pub original: Vec<f64>,
    pub retuned: Vec<f64>,
    pub shifts: Vec<f64>,
    /// `sign(a_k)` of the input amplitudes.
    pub signs: Vec<f64>,
}

impl RetunePlan {
    /// Grid interval `π/t`.
    pub fn interval(&self) -> f64 {
        PI / self.t
    }

    /// `max_k |e^{-iλ̃_k t} - e^{iθ} sign(a_k)|`.
    pub fn phase_residual(&self) -> f64 {
        self.retuned
            .iter()
            .zip(&self.signs)
            .map(|(&lam, &s)| {
                let re = (lam * self.t).cos() - s * self.theta.cos();
                let im = -(lam * self.t).sin() - s * self.theta.sin();
                re.hypot(im)
            })
            .fold(0.0, f64::max)
    }
}

/// Result of [`retune_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct RetuneOutcome {
    pub chain: SymTridiag,
    pub plan: RetunePlan,
    /// `F(t)` of the retuned chain at the designed time.
    pub fidelity: f64,
    /// `max_i |J̃_i - J_i|`.
    pub max_coupling_shift: f64,
}

fn amplitude_signs(s: &SpectralData) -> Result<Vec<f64>> {
    s.amplitudes
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            if a.abs() <= f64::MIN_POSITIVE {
                Err(Error::DegenerateAmplitude { index: k })
            } else {
                Ok(a.signum())
            }
        })
        .collect()
}

/// Moves each eigenvalue to the `π/t` grid anchored at `λ_0` so that
/// `e^{-iλ̃_k t} = e^{iθ} sign(a_k)` holds for one common `θ`.
///
/// Offsets from `λ_0` are rounded to the nearest grid point (ties upward). A
/// point with the wrong parity is moved one step toward the true value, or away
/// from it when that is the only way to keep the spectrum strictly ascending.
pub fn retune_eigenvalues(s: &SpectralData, t: f64, opts: &RetuneOptions) -> Result<RetunePlan> {
    if s.is_empty() {
        return Err(invalid("spectrum", "empty"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    if s.len() >= 2 && opts.min_time_factor > 0.0 {
        let bound = opts.min_time_factor * PI / min_gap(s)?;
        if t < bound {
            return Err(invalid(
                "t",
                format!(
                    "{t} is below the bound {bound} = {} pi / gap",
                    opts.min_time_factor
                ),
            ));
        }
    }
    let signs = amplitude_signs(s)?;
    let g = PI / t;
    let lam0 = s.eigenvalues[0];
    let theta = -lam0 * t - if signs[0] < 0.0 { PI } else { 0.0 };
    let mut steps: Vec<i64> = vec![0];
    for k in 1..s.len() {
        let x = (s.eigenvalues[k] - lam0) / g;
        let mut q = (x + 0.5).floor() as i64;
        let want_odd = signs[k] != signs[0];
        if (q.rem_euclid(2) == 1) != want_odd {
            let toward = if (q as f64) < x { q + 1 } else { q - 1 };
            q = if toward > steps[k - 1] { toward } else { q + 1 };
        }
        if q <= steps[k - 1] {
            q = steps[k - 1] + 2;
        }
        steps.push(q);
    }
    let retuned: Vec<f64> = steps.iter().map(|&q| lam0 + q as f64 * g).collect();
    let shifts: Vec<f64> = retuned
        .iter()
        .zip(&s.eigenvalues)
        .map(|(r, o)| r - o)
        .collect();
    if let Some(k) = shifts
        .iter()
        .position(|d| d.abs() > g * (1.0 + 1e-9) + 1e-12)
    {
        return Err(invalid(
            "t",
            format!(
                "level {k} would move by {} > one grid interval {g}; increase t",
                shifts[k]
            ),
        ));
    }
    Ok(RetunePlan {
        t,
        theta,
        original: s.eigenvalues.clone(),
        retuned,
        shifts,
        signs,
    })
}

/// Spectral weights of the persymmetric Jacobi matrix with spectrum `lambda`:
/// `w_k ∝ 1 / ∏_{j≠k} |λ_k - λ_j|`, normalised to sum 1.
pub fn persymmetric_weights(lambda: &[f64]) -> Result<Vec<f64>> {
    check_ascending(lambda)?;
    let logs: Vec<f64> = (0..lambda.len())
        .map(|k| {
            -lambda
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &l)| (lambda[k] - l).abs().ln())
                .sum::<f64>()
        })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

fn check_ascending(lambda: &[f64]) -> Result<()> {
    if lambda.is_empty() {
        return Err(invalid("eigenvalues", "empty"));
    }
    if let Some(k) = lambda.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(invalid(
            "eigenvalues",
            format!("not strictly ascending at position {}", k + 1),
        ));
    }
    Ok(())
}

/// The unreduced Jacobi matrix with spectrum `retuned` and squared first
/// eigenvector components `weights` (positive off-diagonal).
///
/// Lanczos on `diag(retuned)` from the start vector `√weights`, with two passes
/// of full reorthogonalisation per step.
pub fn reconstruct_jacobi(retuned: &[f64], weights: &[f64]) -> Result<SymTridiag> {
    check_ascending(retuned)?;
    let m = retuned.len();
    if weights.len() != m {
        return Err(Error::SizeMismatch {
            context: "weights",
            expected: m,
            actual: weights.len(),
        });
    }
    if let Some(k) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(invalid("weights", format!("weight {k} is not positive")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(invalid("weights", format!("must sum to 1, sum is {total}")));
    }
    let scale = retuned
        .iter()
        .fold(0.0f64, |a, l| a.max(l.abs()))
        .max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut q: Vec<f64> = weights.iter().map(|w| (w / total).sqrt()).collect();
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    for step in 0..m {
        let mut r: Vec<f64> = q.iter().zip(retuned).map(|(x, l)| x * l).collect();
        let alpha = dot(&q, &r);
        diag.push(alpha);
        basis.push(q);
        if step + 1 == m {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &r);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = dot(&r, &r).sqrt();
        if beta <= 1e-13 * scale {
            return Err(Error::ReconstructionBreakdown { step, norm: beta });
        }
        off.push(beta);
        q = r.into_iter().map(|x| x / beta).collect();
    }
    SymTridiag::new(diag, off)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Retunes a persymmetric chain so that it transfers perfectly at time `t`.
///
/// Eigenvalues are snapped by [`retune_eigenvalues`]; the chain is rebuilt
/// from the persymmetric weights of the new spectrum, which coincide with the
/// original weights when the spectrum does not move. Coupling signs of the
/// input are kept.
pub fn retune_chain(m: &SymTridiag, t: f64, opts: &RetuneOptions) -> Result<RetuneOutcome> {
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let defect = m.persymmetry_defect();
    if defect > 1e-12 * scale {
        return Err(Error::NotSymmetric {
            property: "persymmetric (a weighted inverse eigenvalue solver is required)",
            deviation: defect,
        });
    }
    if let Some(k) = m.offdiag().iter().position(|&j| j == 0.0) {
        return Err(invalid(
            "m",
            format!("coupling {k} vanishes; the chain is reducible"),
        ));
    }
    let s = eigh_tridiag(m)?;
    let plan = retune_eigenvalues(&s, t, opts)?;
    let weights = persymmetric_weights(&plan.retuned)?;
    let rebuilt = reconstruct_jacobi(&plan.retuned, &weights)?;
    let off: Vec<f64> = rebuilt
        .offdiag()
        .iter()
        .zip(m.offdiag())
        .map(|(b, j)| b.copysign(*j))
        .collect();
    let chain = SymTridiag::new(rebuilt.diag().to_vec(), off)?;
    let f = fidelity(&eigh_tridiag(&chain)?, t);
    if f < 1.0 - opts.fidelity_tolerance {
        return Err(Error::TransferShortfall {
            achieved: f,
            required: 1.0 - opts.fidelity_tolerance,
        });
    }
    let max_coupling_shift = chain
        .offdiag()
        .iter()
        .zip(m.offdiag())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(RetuneOutcome {
        chain,
        plan,
        fidelity: f,
        max_coupling_shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effham::toric_effective;
    use crate::transfer::christandl_couplings;

    fn spectral(values: Vec<f64>, amplitudes: Vec<f64>) -> SpectralData {
        let n = values.len();
        SpectralData {
            eigenvalues: values,
            first_components: vec![1.0; n],
            last_components: amplitudes.clone(),
            amplitudes,
        }
    }

    const LOOSE: RetuneOptions = RetuneOptions {
        min_time_factor: 0.0,
        fidelity_tolerance: 1e-6,
    };

    #[test]
    fn two_level_example_is_a_fixed_point() {
        let s = spectral(vec![-1.0, 1.0], vec![0.5, -0.5]);
        let plan = retune_eigenvalues(&s, PI / 2.0, &LOOSE).unwrap();
        assert_eq!(plan.retuned, vec![-1.0, 1.0]);
        assert!(plan.shifts.iter().all(|d| *d == 0.0));
        assert!(plan.phase_residual() < 1e-12);
        // the default bound rejects such a short time
        assert!(retune_eigenvalues(&s, PI / 2.0, &RetuneOptions::default()).is_err());
    }

    #[test]
    fn parity_fix_and_bounds() {
        let s = spectral(vec![0.0, 0.93, 2.1, 2.95], vec![0.2, -0.3, 0.1, 0.4]);
        let plan = retune_eigenvalues(&s, 20.0 * PI, &LOOSE).unwrap();
        assert!(plan.phase_residual() < 1e-10);
        assert!(plan
            .shifts
            .iter()
            .all(|d| d.abs() <= plan.interval() + 1e-12));
        assert!(plan.retuned.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_amplitude_is_rejected() {
        let s = spectral(vec![0.0, 1.0], vec![0.5, 0.0]);
        assert_eq!(
            retune_eigenvalues(&s, 100.0, &LOOSE),
            Err(Error::DegenerateAmplitude { index: 1 })
        );
    }

    #[test]
    fn reconstruct_small_cases() {
        let one = reconstruct_jacobi(&[0.3], &[1.0]).unwrap();
        assert_eq!(one.diag(), &[0.3]);
        let two = reconstruct_jacobi(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert!(two.diag().iter().all(|d| d.abs() < 1e-15));
        assert!((two.offdiag()[0] - 1.0).abs() < 1e-15);
        assert!(reconstruct_jacobi(&[1.0, 0.0], &[0.5, 0.5]).is_err());
        assert!(reconstruct_jacobi(&[0.0, 1.0], &[1.0, 0.0]).is_err());
        assert!(reconstruct_jacobi(&[0.0, 1.0], &[0.7, 0.7]).is_err());
    }

    #[test]
    fn persymmetric_weights_match_persymmetric_chain() {
        let m = SymTridiag::new(vec![0.1, -0.2, 0.3, -0.2, 0.1], vec![0.7, 1.1, 1.1, 0.7]).unwrap();
        let s = eigh_tridiag(&m).unwrap();
        let w = persymmetric_weights(&s.eigenvalues).unwrap();
        for (a, b) in w.iter().zip(s.weights()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn christandl_chain_is_a_fixed_point() {
        let n = 8;
        let delta = 0.1;
        let m = toric_effective(
            n,
            1.0,
            delta,
            &christandl_couplings(n).unwrap(),
            &vec![0.0; n - 1],
        )
        .unwrap();
        let t_star = PI * (n - 1) as f64 / (4.0 * delta);
        let out = retune_chain(&m, 11.0 * t_star, &RetuneOptions::default()).unwrap();
        assert!(out.max_coupling_shift <= 1e-9);
        let d0 = out.plan.shifts[0];
        assert!(out.plan.shifts.iter().all(|d| (d - d0).abs() < 1e-9));
    }

    #[test]
    fn uniform_chain_retunes_to_perfect_transfer() {
        let n = 20;
        let m = toric_effective(n, 1.0, 0.1, &vec![0.5; n - 2], &vec![0.0; n - 1]).unwrap();
        let gap = min_gap(&eigh_tridiag(&m).unwrap()).unwrap();
        let t = 50.0 * PI / gap;
        let out = retune_chain(&m, t, &RetuneOptions::default()).unwrap();
        assert!(out.fidelity >= 1.0 - 1e-6, "F = {}", out.fidelity);
        assert!(out.chain.is_persymmetric(1e-9));
        let back = eigh_tridiag(&out.chain).unwrap();
        for (a, b) in back.eigenvalues.iter().zip(&out.plan.retuned) {
            assert!((a - b).abs() <= 1e-9 * m.max_abs());
        }
    }

    #[test]
    fn non_persymmetric_input_is_rejected() {
        let m = SymTridiag::new(vec![0.0, 0.0, 0.1], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            retune_chain(&m, 1000.0, &RetuneOptions::default()),
            Err(Error::NotSymmetric { .. })
        ));
    }
}
