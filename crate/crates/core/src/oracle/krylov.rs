use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{apply_hamiltonian, DenseState};
use crate::effham::SymTridiag;
use crate::error::{invalid, Error, Result};
use crate::pauli::PauliSum;
use crate::spectral::{eigh_tridiag, eigh_tridiag_full};

/// Default accuracy of [`krylov_propagate`].
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    /// Target error in norm over the whole propagation.
    pub tol: f64,
    /// Krylov dimension per step.
    pub max_dim: usize,
    /// Cap on the number of accepted steps.
    pub max_steps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_dim: 30,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovStats {
    pub steps: usize,
    pub matvecs: usize,
    /// Sum of the per-step error estimates.
    pub error_estimate: f64,
    /// Total norm correction applied by renormalisation.
    pub renormalization_drift: f64,
}

struct Basis {
    vectors: Vec<DenseState>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Residual norm after the last vector; zero on an invariant subspace.
    residual: f64,
}

fn lanczos_basis(
    h: &PauliSum,
    v: &DenseState,
    max_dim: usize,
    h_norm: f64,
    stats: &mut KrylovStats,
) -> Result<Basis> {
    let mut vectors = vec![v.clone()];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    loop {
        let j = vectors.len() - 1;
        let mut r = apply_hamiltonian(h, &vectors[j])?;
        stats.matvecs += 1;
        alpha.push(vectors[j].inner(&r)?.re);
        for _ in 0..2 {
            for q in &vectors {
                let c = q.inner(&r)?;
                r.axpy(-c, q)?;
            }
        }
        let b = r.norm();
        if b <= 1e-13 * h_norm || vectors.len() == max_dim {
            let residual = if b <= 1e-13 * h_norm { 0.0 } else { b };
            return Ok(Basis {
                vectors,
                alpha,
                beta,
                residual,
            });
        }
        r.scale(Complex64::new(1.0 / b, 0.0));
        beta.push(b);
        vectors.push(r);
    }
}

/// `exp(-i T dt) e_1` for the Lanczos tridiagonal `T`.
fn small_exp(t: &SymTridiag, dt: f64) -> Result<Vec<Complex64>> {
    let eig = eigh_tridiag_full(t)?;
    let m = t.dim();
    Ok((0..m)
        .map(|k| {
            (0..m)
                .map(|j| {
                    let s = eig.vectors[(k, j)] * eig.vectors[(0, j)];
                    Complex64::from_polar(s, -eig.values[j] * dt)
                })
                .sum()
        })
        .collect())
}

fn check_inputs(h: &PauliSum, v: &DenseState, opts: &KrylovOptions) -> Result<()> {
    if h.n_qubits() != v.n_qubits() {
        return Err(Error::SizeMismatch {
            context: "Hamiltonian qubits",
            expected: v.n_qubits(),
            actual: h.n_qubits(),
        });
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if opts.max_dim < 2 {
        return Err(invalid("max_dim", "must be at least 2"));
    }
    Ok(())
}

/// Advances `state` (unit norm) by `duration` in place.
fn advance(
    h: &PauliSum,
    state: &mut DenseState,
    duration: f64,
    total: f64,
    h_norm: f64,
    opts: &KrylovOptions,
    dt_hint: &mut f64,
    stats: &mut KrylovStats,
) -> Result<()> {
    let mut done = 0.0;
    while done < duration {
        if stats.steps >= opts.max_steps {
            return Err(Error::NoConvergence {
                method: "krylov_propagate",
                iterations: stats.steps,
                detail: format!("reached t = {done} of {duration}"),
            });
        }
        let remaining = duration - done;
        let basis = lanczos_basis(h, state, opts.max_dim, h_norm, stats)?;
        let t = SymTridiag::new(basis.alpha.clone(), basis.beta.clone())?;
        let (dt, y, err) = if basis.residual == 0.0 {
            (remaining, small_exp(&t, remaining)?, 0.0)
        } else {
            let mut dt = dt_hint.min(remaining);
            loop {
                let y = small_exp(&t, dt)?;
                let err = basis.residual * y[y.len() - 1].norm();
                if err <= opts.tol * dt / total {
                    break (dt, y, err);
                }
                dt *= 0.5;
                if dt < 1e-12 * total {
                    return Err(Error::NoConvergence {
                        method: "krylov_propagate",
                        iterations: stats.steps,
                        detail: format!("step size underflow (error estimate {err:e})"),
                    });
                }
            }
        };
        let mut next = DenseState::zeros(state.n_qubits())?;
        for (c, q) in y.iter().zip(&basis.vectors) {
            next.axpy(*c, q)?;
        }
        let n = next.normalize()?;
        stats.renormalization_drift += (n - 1.0).abs();
        stats.error_estimate += err;
        stats.steps += 1;
        *state = next;
        done += dt;
        *dt_hint = if dt >= remaining { *dt_hint } else { 2.0 * dt };
    }
    Ok(())
}

/// `exp(-iHt)|v⟩` to accuracy `tol`.
pub fn krylov_propagate(h: &PauliSum, v: &DenseState, t: f64, tol: f64) -> Result<DenseState> {
    let opts = KrylovOptions {
        tol,
        ..KrylovOptions::default()
    };
    Ok(krylov_propagate_with(h, v, t, &opts)?.0)
}

pub fn krylov_propagate_with(
    h: &PauliSum,
    v: &DenseState,
    t: f64,
    opts: &KrylovOptions,
) -> Result<(DenseState, KrylovStats)> {
    let mut last = None;
    let stats = krylov_trajectory(h, v, &[t], opts, |_, s| {
        last = Some(s.clone());
        Ok(())
    })?;
    Ok((last.expect("one sample"), stats))
}

/// Propagates `v` through the ascending sample `times` (all `≥ 0`) and calls
/// `observe(t, state)` at each of them.
pub fn krylov_trajectory<F>(
    h: &PauliSum,
    v: &DenseState,
    times: &[f64],
    opts: &KrylovOptions,
    mut observe: F,
) -> Result<KrylovStats>
where
    F: FnMut(f64, &DenseState) -> Result<()>,
{
    check_inputs(h, v, opts)?;
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(invalid("t", "times must be finite and nonnegative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "must be ascending"));
    }
    let total = times.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let h_norm = h.norm_bound().max(f64::MIN_POSITIVE);
    let mut stats = KrylovStats::default();
    let mut state = v.clone();
    let n0 = state.normalize()?;
    let mut now = 0.0;
    let mut dt_hint = (opts.max_dim as f64 / h_norm).max(total / opts.max_steps as f64);
    for &t in times {
        advance(
            h,
            &mut state,
            t - now,
            total,
            h_norm,
            opts,
            &mut dt_hint,
            &mut stats,
        )?;
        now = t;
        let mut scaled = state.clone();
        scaled.scale(Complex64::new(n0, 0.0));
        observe(t, &scaled)?;
    }
    Ok(stats)
}

/// Smallest eigenvalue of `H` by plain Lanczos from a seeded random start.
pub fn lanczos_min(h: &PauliSum, tol: f64, max_iter: usize) -> Result<f64> {
    let n = h.n_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_705);
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut q = DenseState::from_amplitudes(n, amps)?.normalized()?;
    let mut prev_q = DenseState::zeros(n)?;
    let h_norm = h.norm_bound().max(f64::MIN_POSITIVE);
    let (mut alpha, mut beta): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut last = f64::INFINITY;
    for it in 0..max_iter {
        let mut r = apply_hamiltonian(h, &q)?;
        let a = q.inner(&r)?.re;
        r.axpy(Complex64::new(-a, 0.0), &q)?;
        if let Some(&b) = beta.last() {
            r.axpy(Complex64::new(-b, 0.0), &prev_q)?;
        }
        alpha.push(a);
        let ritz = eigh_tridiag(&SymTridiag::new(alpha.clone(), beta.clone())?)?.eigenvalues[0];
        let b = r.norm();
        if (ritz - last).abs() <= tol * ritz.abs().max(1.0) || b <= 1e-13 * h_norm {
            return Ok(ritz);
        }
        last = ritz;
        if it + 1 == max_iter {
            break;
        }
        r.scale(Complex64::new(1.0 / b, 0.0));
        beta.push(b);
        prev_q = std::mem::replace(&mut q, r);
    }
    Err(Error::NoConvergence {
        method: "lanczos_min",
        iterations: max_iter,
        detail: format!("last Ritz value {last}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Pauli, PauliTerm};

    fn one_qubit(p: Pauli, c: f64) -> PauliSum {
        PauliSum::from_terms(1, [PauliTerm::single(1, 0, p).unwrap().scaled(c)]).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = one_qubit(Pauli::X, 0.7);
        let v = DenseState::basis(1, 0).unwrap();
        let out = krylov_propagate(&h, &v, 0.0, 1e-10).unwrap();
        assert!((out.inner(&v).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn rabi_oscillation() {
        let h = one_qubit(Pauli::X, 0.7);
        let v = DenseState::basis(1, 0).unwrap();
        for t in [0.3, 2.0, 13.0] {
            let out = krylov_propagate(&h, &v, t, 1e-10).unwrap();
            let a = out.amplitudes();
            assert!((a[0] - Complex64::new((0.7 * t).cos(), 0.0)).norm() < 1e-10);
            assert!((a[1] - Complex64::new(0.0, -(0.7 * t).sin())).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenstate_only_picks_up_a_phase() {
        let h = one_qubit(Pauli::Z, 1.3);
        let v = DenseState::basis(1, 1).unwrap();
        let out = krylov_propagate(&h, &v, 5.0, 1e-10).unwrap();
        assert!((out.inner(&v).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn many_steps_on_a_chain_conserve_energy() {
        let n = 8;
        let mut h = PauliSum::new(n);
        for q in 0..n - 1 {
            h.add_term(PauliTerm::from_paulis(n, [(q, Pauli::X), (q + 1, Pauli::X)]).unwrap())
                .unwrap();
            h.add_term(PauliTerm::single(n, q, Pauli::Z).unwrap().scaled(0.6))
                .unwrap();
        }
        let amps: Vec<Complex64> = (0..1 << n)
            .map(|k| Complex64::new(((k * 37) % 11) as f64 - 5.0, ((k * 13) % 7) as f64))
            .collect();
        let v = DenseState::from_amplitudes(n, amps)
            .unwrap()
            .normalized()
            .unwrap();
        let opts = KrylovOptions {
            tol: 1e-10,
            max_dim: 12,
            ..KrylovOptions::default()
        };
        let (out, stats) = krylov_propagate_with(&h, &v, 20.0, &opts).unwrap();
        assert!(stats.steps > 1);
        let e0 = v.expectation(&h).unwrap();
        let e1 = out.expectation(&h).unwrap();
        assert!((e0 - e1).abs() <= 10.0 * 1e-10 * h.norm_bound());
        // splitting the interval gives the same state
        let mid = krylov_propagate_with(&h, &v, 7.0, &opts).unwrap().0;
        let split = krylov_propagate_with(&h, &mid, 13.0, &opts).unwrap().0;
        assert!((split.inner(&out).unwrap().norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lanczos_ground_energy_of_a_field() {
        let n = 4;
        let mut h = PauliSum::new(n);
        for q in 0..n {
            h.add_term(
                PauliTerm::single(n, q, Pauli::Z)
                    .unwrap()
                    .scaled(q as f64 + 1.0),
            )
            .unwrap();
        }
        assert!((lanczos_min(&h, 1e-12, 200).unwrap() + 10.0).abs() < 1e-9);
    }
}
