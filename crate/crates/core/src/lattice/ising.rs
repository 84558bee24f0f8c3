use crate::error::{invalid, Error, Result};
use crate::lattice::toric::{check_len, check_unit_bounded};
use crate::pauli::{PauliSum, PauliTerm, QubitMask};

/// The 2D Ising model on a periodic `N × N` vertex lattice.
///
/// Qubits are labelled `1..=N²` along a boustrophedon ("snake") path: row 0
/// left to right, row 1 right to left, and so on, so consecutive labels are
/// always lattice neighbours. Label `ℓ` lives at flat index `ℓ - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsingLattice {
    n: usize,
}

impl IsingLattice {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("N", format!("Ising lattice needs N >= 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn n_qubits(&self) -> usize {
        self.n * self.n
    }

    /// Vertex `(row, col)` of snake label `label ∈ 1..=N²`.
    pub fn vertex(&self, label: usize) -> (usize, usize) {
        assert!(
            label >= 1 && label <= self.n_qubits(),
            "label {label} out of range"
        );
        let k = label - 1;
        let row = k / self.n;
        let pos = k % self.n;
        let col = if row % 2 == 0 { pos } else { self.n - 1 - pos };
        (row, col)
    }

    /// Snake label of vertex `(row, col)`.
    pub fn label(&self, row: usize, col: usize) -> usize {
        let pos = if row % 2 == 0 { col } else { self.n - 1 - col };
        row * self.n + pos + 1
    }

    /// Flat qubit index of a vertex.
    pub fn index(&self, row: usize, col: usize) -> usize {
        self.label(row, col) - 1
    }

    /// All `2N²` nearest-neighbour bonds as flat-index pairs.
    ///
    /// Each vertex contributes its right and down neighbour (periodic). At `N = 2`
    /// the same pair appears twice; both copies are kept.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::with_capacity(2 * n * n);
        for r in 0..n {
            for c in 0..n {
                out.push((self.index(r, c), self.index(r, (c + 1) % n)));
                out.push((self.index(r, c), self.index((r + 1) % n, c)));
            }
        }
        out
    }

    /// `H_I = -½ Σ_{⟨i,j⟩} Z_i Z_j`.
    pub fn hamiltonian(&self) -> PauliSum {
        let nq = self.n_qubits();
        let mut h = PauliSum::new(nq);
        for (a, b) in self.bonds() {
            h.add_term(PauliTerm::z_string(nq, [a, b]).scaled(-0.5))
                .expect("same register");
        }
        h
    }

    pub fn ground_energy(&self) -> f64 {
        -((self.n * self.n) as f64)
    }

    /// Energy above the ground state of a classical configuration: one unit per broken bond.
    pub fn excitation_energy(&self, flipped: &QubitMask) -> f64 {
        self.bonds()
            .into_iter()
            .filter(|&(a, b)| flipped.get(a) != flipped.get(b))
            .count() as f64
    }

    /// `X` on the first `l` qubits of the snake order, `1 ≤ l ≤ N²`.
    pub fn error_prefix(&self, l: usize) -> Result<PauliTerm> {
        if l == 0 || l > self.n_qubits() {
            return Err(Error::IndexOutOfRange {
                name: "l",
                index: l,
                bound: self.n_qubits() + 1,
            });
        }
        Ok(PauliTerm::x_string(self.n_qubits(), 0..l))
    }

    pub fn prefix_mask(&self, l: usize) -> QubitMask {
        QubitMask::from_indices(self.n_qubits(), 0..l)
    }

    /// Number of retained prefix configurations, `M = N(N-1) - 2`.
    pub fn retained_count(&self) -> usize {
        self.n * (self.n - 1) - 2
    }

    /// Prefix lengths of the retained error configurations, ascending.
    ///
    /// Full-row prefixes (`l` a multiple of `N`) are skipped: the step that would
    /// complete a row flips the next qubit as well. The first and last plateau
    /// configurations (`l = N+1` and `l = N² - N - 1`) are also skipped, which
    /// leaves `(N-1)(N-2) - 2` plateau states and `M = N(N-1) - 2` in total. The
    /// set is closed under `l ↦ N² - l`.
    pub fn retained_prefixes(&self) -> Result<Vec<usize>> {
        let n = self.n;
        if n < 3 {
            return Err(invalid(
                "N",
                format!("retained sequence needs N >= 3, got {n}"),
            ));
        }
        let nn = n * n;
        let out: Vec<usize> = (1..nn)
            .filter(|l| l % n != 0 && *l != n + 1 && *l != nn - n - 1)
            .collect();
        debug_assert_eq!(out.len(), self.retained_count());
        Ok(out)
    }

    /// The revised adversarial perturbation on the retained sequence `l_0 < l_1 < … < l_{M-1}`:
    /// `(δ/2) Σ_s J_s X_{(l_s, l_{s+1}]} (1 - Z_{l_s} Z_{l_{s+1}+1}) + (δ/2) Σ_s B_s (1 - Z_{l_s} Z_{l_s+1})`
    /// (1-based labels). For consecutive prefixes the hopping summand is
    /// `X_{i+1}(1 - Z_i Z_{i+2})` with `i = l_s`; at a row completion it becomes
    /// `X_{Ni} X_{Ni+1}(1 - Z_{Ni-1} Z_{Ni+2})`.
    pub fn perturbation(&self, couplings: &[f64], fields: &[f64], delta: f64) -> Result<PauliSum> {
        let seq = self.retained_prefixes()?;
        let m = seq.len();
        check_len("J", couplings, m - 1)?;
        check_len("B", fields, m)?;
        check_unit_bounded("J", couplings)?;
        check_unit_bounded("B", fields)?;
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        let nq = self.n_qubits();
        // label ℓ ↦ flat index ℓ-1
        let mut dh = PauliSum::new(nq);
        for (s, &j) in couplings.iter().enumerate() {
            if j == 0.0 {
                continue;
            }
            let (a, b) = (seq[s], seq[s + 1]);
            let amp = 0.5 * delta * j;
            let hop = PauliTerm::x_string(nq, a..b);
            let zz = PauliTerm::z_string(nq, [a - 1, b]);
            dh.add_term(hop.clone().scaled(amp))?;
            dh.add_term(hop.multiply(&zz)?.scaled(-amp))?;
        }
        for (s, &bf) in fields.iter().enumerate() {
            if bf == 0.0 {
                continue;
            }
            let l = seq[s];
            let amp = 0.5 * delta * bf;
            dh.add_term(PauliTerm::identity(nq).scaled(amp))?;
            dh.add_term(PauliTerm::z_string(nq, [l - 1, l]).scaled(-amp))?;
        }
        Ok(dh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snake_visits_every_vertex_once_with_adjacent_steps() {
        for n in 2..=6 {
            let lat = IsingLattice::new(n).unwrap();
            let mut seen = vec![false; n * n];
            for l in 1..=n * n {
                let (r, c) = lat.vertex(l);
                assert!(!seen[r * n + c]);
                seen[r * n + c] = true;
                assert_eq!(lat.label(r, c), l);
                assert_eq!(r, (l - 1) / n, "rows fill progressively");
                if l > 1 {
                    let (pr, pc) = lat.vertex(l - 1);
                    assert_eq!(pr.abs_diff(r) + pc.abs_diff(c), 1);
                }
            }
        }
    }

    #[test]
    fn bond_count_is_two_n_squared() {
        for n in 2..=5 {
            let lat = IsingLattice::new(n).unwrap();
            assert_eq!(lat.bonds().len(), 2 * n * n);
        }
        // N = 2 doubles every bond; the canonical sum merges the copies.
        let h = IsingLattice::new(2).unwrap().hamiltonian();
        assert_eq!(h.len(), 4);
        assert!(h.terms().all(|t| (t.coeff().re + 1.0).abs() < 1e-15));
    }

    #[test]
    fn prefix_energies() {
        let lat = IsingLattice::new(4).unwrap();
        let e = |l| lat.excitation_energy(&lat.prefix_mask(l));
        assert_eq!(e(1), 4.0);
        for l in 1..4 {
            assert_eq!(e(l), 2.0 * l as f64 + 2.0);
        }
        assert_eq!(e(16), 0.0);
        assert_eq!(lat.error_prefix(1).unwrap().weight(), 1);
        assert!(lat.error_prefix(0).is_err());
        assert!(lat.error_prefix(17).is_err());
    }

    #[test]
    fn retained_sequence_counts_and_symmetry() {
        for n in 3..=7 {
            let lat = IsingLattice::new(n).unwrap();
            let seq = lat.retained_prefixes().unwrap();
            assert_eq!(seq.len(), n * (n - 1) - 2);
            let nn = n * n;
            for (a, b) in seq.iter().zip(seq.iter().rev()) {
                assert_eq!(a + b, nn);
            }
            let energies: Vec<f64> = seq
                .iter()
                .map(|&l| lat.excitation_energy(&lat.prefix_mask(l)))
                .collect();
            let plateau = energies
                .iter()
                .filter(|&&e| e == 2.0 * (n as f64 + 1.0))
                .count();
            assert_eq!(plateau, (n - 1) * (n - 2) - 2);
            let rev: Vec<f64> = energies.iter().rev().copied().collect();
            assert_eq!(energies, rev);
        }
    }

    #[test]
    fn perturbation_weights() {
        let lat = IsingLattice::new(4).unwrap();
        let m = lat.retained_count();
        assert!(lat
            .perturbation(&vec![0.0; m - 1], &vec![0.0; m], 0.1)
            .unwrap()
            .is_empty());
        let seq = lat.retained_prefixes().unwrap();
        for s in 0..m - 1 {
            let mut j = vec![0.0; m - 1];
            j[s] = 1.0;
            let dh = lat.perturbation(&j, &vec![0.0; m], 0.1).unwrap();
            let step = seq[s + 1] - seq[s];
            let max_w = dh.terms().map(|t| t.weight()).max().unwrap();
            assert_eq!(max_w, step + 2);
            if step == 1 {
                assert!(max_w <= 3);
            }
        }
    }
}
