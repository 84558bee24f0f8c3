//! Exact statevector checks on small lattices.

mod krylov;
mod state;

pub use krylov::{
    krylov_propagate, krylov_propagate_with, krylov_trajectory, lanczos_min, KrylovOptions,
    KrylovStats, DEFAULT_TOL,
};
pub use state::{apply_hamiltonian, toric_ground_state, DenseState, MAX_QUBITS};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::lattice::{DualityVariant, IsingLattice, ToricLattice};
use crate::pauli::{Pauli, PauliSum, PauliTerm};

/// Overlaps of a state with an orthonormal family and the norm of the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coefficients: Vec<Complex64>,
    pub leakage: f64,
}

/// Largest deviation of the Gram matrix of `states` from the identity.
pub fn orthonormality_defect(states: &[DenseState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate().skip(i) {
            let g = a.inner(b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

/// Projects `v` on the span of orthonormal `states`.
pub fn subspace_projection(states: &[DenseState], v: &DenseState) -> Result<Projection> {
    let defect = orthonormality_defect(states)?;
    if defect > 1e-10 {
        return Err(invalid(
            "states",
            format!("not orthonormal (Gram defect {defect:e})"),
        ));
    }
    let coefficients: Vec<Complex64> = states.iter().map(|s| s.inner(v)).collect::<Result<_>>()?;
    let inside: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    let total = v.norm().powi(2);
    // subtracting explicitly keeps precision when the leakage is tiny
    let mut rest = v.clone();
    for (c, s) in coefficients.iter().zip(states) {
        rest.axpy(-c, s)?;
    }
    let leakage = rest.norm();
    debug_assert!(leakage.powi(2) <= total - inside + 1e-9);
    Ok(Projection {
        coefficients,
        leakage,
    })
}

/// `M_ij = ⟨b_i|H|b_j⟩` together with the largest imaginary part encountered.
pub fn matrix_elements(h: &PauliSum, basis: &[DenseState]) -> Result<(DMatrix<f64>, f64)> {
    let m = basis.len();
    let images: Vec<DenseState> = basis
        .iter()
        .map(|b| apply_hamiltonian(h, b))
        .collect::<Result<_>>()?;
    let mut out = DMatrix::zeros(m, m);
    let mut imag: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let z = basis[i].inner(&images[j])?;
            out[(i, j)] = z.re;
            imag = imag.max(z.im.abs());
        }
    }
    Ok((out, imag))
}

/// Ground state and Hamiltonian of a small toric lattice.
#[derive(Debug, Clone)]
pub struct ToricOracle {
    lattice: ToricLattice,
    ground: DenseState,
    hamiltonian: PauliSum,
}

impl ToricOracle {
    pub fn new(lattice: ToricLattice) -> Result<Self> {
        Ok(Self {
            ground: toric_ground_state(&lattice)?,
            hamiltonian: lattice.hamiltonian(),
            lattice,
        })
    }

    pub fn lattice(&self) -> &ToricLattice {
        &self.lattice
    }

    pub fn ground(&self) -> &DenseState {
        &self.ground
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    /// `H + δH - E_0`.
    pub fn shifted_total(&self, dh: &PauliSum) -> Result<PauliSum> {
        let mut h = self.hamiltonian.clone();
        h.add_sum(dh)?;
        h.add_term(
            PauliTerm::identity(self.lattice.n_qubits()).scaled(-self.lattice.ground_energy()),
        )?;
        Ok(h)
    }

    /// `U_l|ψ⟩` for `l = 0..N-2`.
    pub fn error_basis(&self) -> Result<Vec<DenseState>> {
        (0..self.lattice.size() - 1)
            .map(|l| self.ground.apply_term(&self.lattice.error_string(l)?))
            .collect()
    }

    /// `⟨ψ|U_i† (H + δH - E_0) U_j|ψ⟩`.
    pub fn effective_matrix(&self, dh: &PauliSum) -> Result<(DMatrix<f64>, f64)> {
        matrix_elements(&self.shifted_total(dh)?, &self.error_basis()?)
    }

    /// Evolves `U_0|ψ⟩` under `H + δH`, samples the leakage out of the error
    /// basis at `samples` equally spaced times, and returns the final
    /// `|⟨ψ|U_{N-2}† e^{-i(H+δH)t} U_0|ψ⟩|²` with the worst leakage seen.
    pub fn logical_flip(
        &self,
        dh: &PauliSum,
        t: f64,
        samples: usize,
        tol: f64,
    ) -> Result<(f64, f64)> {
        let h = self.shifted_total(dh)?;
        let basis = self.error_basis()?;
        let last = basis.len() - 1;
        let samples = samples.max(1);
        let times: Vec<f64> = (1..=samples)
            .map(|k| t * k as f64 / samples as f64)
            .collect();
        let mut leak: f64 = 0.0;
        let mut overlap = 0.0;
        let opts = KrylovOptions {
            tol,
            ..KrylovOptions::default()
        };
        krylov_trajectory(&h, &basis[0], &times, &opts, |_, s| {
            let p = subspace_projection(&basis, s)?;
            leak = leak.max(p.leakage);
            overlap = p.coefficients[last].norm_sqr();
            Ok(())
        })?;
        Ok((overlap, leak))
    }
}

/// `⟨l_i|(H_I + δH - E_0)|l_j⟩` over the retained prefix states of an Ising lattice.
pub fn ising_effective_matrix(lat: &IsingLattice, dh: &PauliSum) -> Result<(DMatrix<f64>, f64)> {
    let nq = lat.n_qubits();
    let mut h = lat.hamiltonian();
    h.add_sum(dh)?;
    h.add_term(PauliTerm::identity(nq).scaled(-lat.ground_energy()))?;
    let basis: Vec<DenseState> = lat
        .retained_prefixes()?
        .into_iter()
        .map(|l| DenseState::basis(nq, (1usize << l) - 1))
        .collect::<Result<_>>()?;
    matrix_elements(&h, &basis)
}

/// One disagreement between the conjugated perturbation and the hopping chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TermMismatch {
    /// Pauli string, e.g. `"Y0 Y1 Z2"`.
    pub string: String,
    pub mapped: Complex64,
    pub expected: Complex64,
}

/// Outcome of [`verify_duality_map`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub variant: DualityVariant,
    pub gates: usize,
    pub mapped_terms: usize,
    pub expected_terms: usize,
    pub mismatches: Vec<TermMismatch>,
    pub max_deviation: f64,
}

impl DualityReport {
    pub fn exact(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn pauli_label(t: &PauliTerm) -> String {
    let parts: Vec<String> = t
        .support()
        .into_iter()
        .map(|q| format!("{:?}{q}", t.pauli_at(q)))
        .collect();
    if parts.is_empty() {
        "I".into()
    } else {
        parts.join(" ")
    }
}

/// Conjugates a field-free toric perturbation by the duality circuit and compares
/// it, string by string, with `Σ_i c_i (X_{2i,0} X_{2i+2,0} + Y_{2i,0} Y_{2i+2,0})`,
/// where `c_i` is the coefficient of `X_{2i+2,0}` in `δH`.
pub fn verify_duality_map(
    lat: &ToricLattice,
    dh: &PauliSum,
    variant: DualityVariant,
) -> Result<DualityReport> {
    let nq = lat.n_qubits();
    if dh.n_qubits() != nq {
        return Err(Error::SizeMismatch {
            context: "perturbation qubits",
            expected: nq,
            actual: dh.n_qubits(),
        });
    }
    if dh.terms().any(|t| t.x_mask().is_zero()) {
        return Err(invalid(
            "deltaH",
            "contains diagonal (field) terms; the duality check covers the hopping part only (B = 0)",
        ));
    }
    let n = lat.size() as i64;
    let mut expected = PauliSum::new(nq);
    for i in 0..(n - 2).max(0) {
        let a = lat.site(2 * i, 0);
        let b = lat.site(2 * i + 2, 0);
        let c = dh.coeff_of(&PauliTerm::x_string(nq, [b]));
        if c.norm() == 0.0 {
            continue;
        }
        expected.add_term(PauliTerm::x_string(nq, [a, b]).scaled(c))?;
        let yy = PauliTerm::from_paulis(nq, [(a, Pauli::Y), (b, Pauli::Y)])?;
        expected.add_term(yy.scaled(c))?;
    }
    let circuit = lat.duality_circuit(variant);
    let mapped = dh.conjugate_by_circuit(&circuit)?;
    let mut mismatches = Vec::new();
    let mut seen = PauliSum::new(nq);
    for t in mapped.terms().chain(expected.terms()) {
        let key = t.clone().with_coeff(1.0);
        if seen.coeff_of(&key).norm() != 0.0 {
            continue;
        }
        seen.add_term(key.clone())?;
        let (m, e) = (mapped.coeff_of(&key), expected.coeff_of(&key));
        if m != e {
            mismatches.push(TermMismatch {
                string: pauli_label(&key),
                mapped: m,
                expected: e,
            });
        }
    }
    Ok(DualityReport {
        variant,
        gates: circuit.len(),
        mapped_terms: mapped.len(),
        expected_terms: expected.len(),
        max_deviation: mapped.max_coeff_difference(&expected)?,
        mismatches,
    })
}

/// Occupations `(1 - ⟨Z_{2i,0}⟩)/2` of the chain modes `i = 0..N-2` in `V|state⟩`.
pub fn chain_occupations(
    lat: &ToricLattice,
    variant: DualityVariant,
    state: &DenseState,
) -> Result<Vec<f64>> {
    let mut v = state.clone();
    v.apply_circuit(&lat.duality_circuit(variant))?;
    let nq = lat.n_qubits();
    (0..lat.size() as i64 - 1)
        .map(|i| {
            let z = PauliTerm::z_string(nq, [lat.site(2 * i, 0)]);
            Ok((1.0 - v.expectation_term(&z)?) / 2.0)
        })
        .collect()
}

/// `|⟨ψ|(U_{N-i-1}U_{N-i-2})† e^{-i(H+δH)t} U_i U_{i-1}|ψ⟩|²` for `0 < i ≤ N-2`.
pub fn two_excitation_transfer(
    oracle: &ToricOracle,
    dh: &PauliSum,
    i: usize,
    t: f64,
    tol: f64,
) -> Result<f64> {
    let lat = oracle.lattice();
    let n = lat.size();
    if i == 0 || i + 2 > n {
        return Err(Error::IndexOutOfRange {
            name: "i",
            index: i,
            bound: n - 1,
        });
    }
    let pair = |k: usize| -> Result<DenseState> {
        let u = lat.error_string(k)?.multiply(&lat.error_string(k - 1)?)?;
        oracle.ground().apply_term(&u)
    };
    let start = pair(i)?;
    let target = pair(n - i - 1)?;
    let h = oracle.shifted_total(dh)?;
    let out = krylov_propagate(&h, &start, t, tol)?;
    Ok(target.inner(&out)?.norm_sqr())
}
