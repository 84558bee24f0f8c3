use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::lattice::ToricLattice;
use crate::pauli::{PauliSum, PauliTerm};

/// Hard limit on the register size of a [`DenseState`].
pub const MAX_QUBITS: usize = 20;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense statevector; qubit 0 is the least significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubits(n_qubits: usize) -> Result<usize> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooLarge {
            what: "dense state qubits",
            size: n_qubits,
            cap: MAX_QUBITS,
        });
    }
    Ok(1 << n_qubits)
}

impl DenseState {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = check_qubits(n_qubits)?;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                name: "basis index",
                index,
                bound: dim,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn zeros(n_qubits: usize) -> Result<Self> {
        let dim = check_qubits(n_qubits)?;
        Ok(Self {
            n_qubits,
            amplitudes: vec![ZERO; dim],
        })
    }

    /// Wraps raw amplitudes without normalising.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = check_qubits(n_qubits)?;
        if amplitudes.len() != dim {
            return Err(Error::SizeMismatch {
                context: "amplitude vector",
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Rescales to unit norm; fails on the zero vector.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(invalid("state", "cannot normalise the zero vector"));
        }
        let inv = 1.0 / n;
        self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(n)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                context: "state qubits",
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: Complex64, other: &Self) -> Result<()> {
        self.check_same(other)?;
        self.amplitudes
            .iter_mut()
            .zip(&other.amplitudes)
            .for_each(|(a, b)| *a += c * b);
        Ok(())
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= c);
    }

    /// `P|self⟩` for a single Pauli term (coefficient included).
    pub fn apply_term(&self, p: &PauliTerm) -> Result<Self> {
        self.check_register(p.n_qubits())?;
        Ok(Self {
            n_qubits: self.n_qubits,
            amplitudes: p.apply_to_state(&self.amplitudes)?,
        })
    }

    /// `⟨self|H|self⟩` (real part; `H` is assumed Hermitian).
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        Ok(self.inner(&apply_hamiltonian(h, self)?)?.re)
    }

    /// Expectation value of one Pauli term.
    pub fn expectation_term(&self, p: &PauliTerm) -> Result<f64> {
        Ok(self.inner(&self.apply_term(p)?)?.re)
    }

    fn check_register(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::SizeMismatch {
                context: "operator qubits",
                expected: self.n_qubits,
                actual: n,
            });
        }
        Ok(())
    }

    /// Applies `CNOT(control → target)` in place.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        for (name, q) in [("control", control), ("target", target)] {
            if q >= self.n_qubits {
                return Err(Error::IndexOutOfRange {
                    name,
                    index: q,
                    bound: self.n_qubits,
                });
            }
        }
        if control == target {
            return Err(invalid("cnot", "control and target coincide"));
        }
        let (c, t) = (1usize << control, 1usize << target);
        for s in 0..self.amplitudes.len() {
            if s & c != 0 && s & t == 0 {
                self.amplitudes.swap(s, s | t);
            }
        }
        Ok(())
    }

    /// Applies a CNOT list in order (first entry first).
    pub fn apply_circuit(&mut self, circuit: &[(usize, usize)]) -> Result<()> {
        circuit.iter().try_for_each(|&(c, t)| self.apply_cnot(c, t))
    }
}

/// `H|v⟩`, unnormalised.
pub fn apply_hamiltonian(h: &PauliSum, v: &DenseState) -> Result<DenseState> {
    v.check_register(h.n_qubits())?;
    let mut out = DenseState::zeros(v.n_qubits)?;
    h.apply_accumulate(&v.amplitudes, &mut out.amplitudes)?;
    Ok(out)
}

/// The toric ground state fixed by `Z_{L,1} = Z_{L,2} = +1`:
/// `∏ (1 + X̄)/2 |0…0⟩`, normalised.
pub fn toric_ground_state(lat: &ToricLattice) -> Result<DenseState> {
    let mut v = DenseState::basis(lat.n_qubits(), 0)?;
    for star in lat.stars() {
        let mut flipped = v.apply_term(&star)?;
        flipped.axpy(ONE, &v)?;
        flipped.scale(Complex64::new(0.5, 0.0));
        v = flipped;
    }
    v.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    #[test]
    fn cap_and_sizes() {
        assert!(DenseState::zeros(21).is_err());
        assert!(DenseState::basis(2, 4).is_err());
        assert!(DenseState::from_amplitudes(2, vec![ONE; 3]).is_err());
        assert!(DenseState::zeros(2).unwrap().normalize().is_err());
    }

    #[test]
    fn cnot_matches_pauli_picture() {
        let mut v = DenseState::basis(3, 0b001).unwrap();
        v.apply_cnot(0, 2).unwrap();
        assert_eq!(v, DenseState::basis(3, 0b101).unwrap());
        v.apply_cnot(1, 2).unwrap();
        assert_eq!(v, DenseState::basis(3, 0b101).unwrap());
        assert!(v.apply_cnot(1, 1).is_err());
        assert!(v.apply_cnot(3, 1).is_err());

        // C P C† |φ⟩ = C P |C φ⟩ on a generic state
        let amps: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(k as f64 + 1.0, 0.5 - k as f64))
            .collect();
        let phi = DenseState::from_amplitudes(3, amps)
            .unwrap()
            .normalized()
            .unwrap();
        let p = PauliTerm::from_paulis(3, [(0, Pauli::Y), (2, Pauli::X)]).unwrap();
        let q = p.conjugate_by_cnot(0, 2).unwrap();
        let mut lhs = phi.clone();
        lhs.apply_cnot(0, 2).unwrap();
        let mut lhs = lhs.apply_term(&p).unwrap();
        lhs.apply_cnot(0, 2).unwrap();
        let rhs = phi.apply_term(&q).unwrap();
        for (a, b) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn ground_state_stabilizers_at_two() {
        let lat = ToricLattice::new(2, 1.0).unwrap();
        let g = toric_ground_state(&lat).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-12);
        for s in lat.plaquettes().iter().chain(lat.stars().iter()) {
            assert!((g.expectation_term(s).unwrap() - 1.0).abs() < 1e-12);
        }
        let hg = apply_hamiltonian(&lat.hamiltonian(), &g).unwrap();
        let mut r = hg.clone();
        r.axpy(Complex64::new(-lat.ground_energy(), 0.0), &g)
            .unwrap();
        assert!(r.norm() < 1e-12);
        let empty = apply_hamiltonian(&PauliSum::new(8), &g).unwrap();
        assert_eq!(empty.norm(), 0.0);
    }

    #[test]
    fn ground_state_logicals_at_three() {
        let lat = ToricLattice::new(3, 1.0).unwrap();
        let g = toric_ground_state(&lat).unwrap();
        let (zl1, zl2, _) = lat.logicals();
        assert!((g.expectation_term(&zl1).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.expectation_term(&zl2).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.expectation(&lat.hamiltonian()).unwrap() - lat.ground_energy()).abs() < 1e-11);
    }
}
