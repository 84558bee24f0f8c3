use crate::error::{invalid, Error, Result};
use crate::pauli::{PauliSum, PauliTerm};

/// The 2D toric code on a periodic `N × N` lattice.
///
/// Qubits sit at `(x, z) = (2i, 2j)` and `(2i + 1, 2j + 1)` for `0 ≤ i, j < N`,
/// with both coordinates taken mod `2N`. Their flat index orders sites
/// lexicographically by `(z, x)`, see [`ToricLattice::site`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToricLattice {
    n: usize,
    gap: f64,
}

impl ToricLattice {
    /// Lattice of linear size `n` with stabilizer gap `gap` (the Hamiltonian coefficient is `-gap/2`).
    pub fn new(n: usize, gap: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid("N", format!("toric lattice needs N >= 2, got {n}")));
        }
        if !(gap.is_finite() && gap > 0.0) {
            return Err(invalid("Delta", format!("gap must be positive, got {gap}")));
        }
        Ok(Self { n, gap })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n * self.n
    }

    /// Flat index of the qubit at `(x, z)`, coordinates taken mod `2N`.
    ///
    /// Row `z` holds the `N` sites with that `z` coordinate, so the index is
    /// `z·N + ⌊x/2⌋`. Panics if `x + z` is odd (no qubit there).
    pub fn site(&self, x: i64, z: i64) -> usize {
        let period = 2 * self.n as i64;
        let (x, z) = (x.rem_euclid(period), z.rem_euclid(period));
        assert!((x + z) % 2 == 0, "no qubit at ({x}, {z})");
        (z as usize) * self.n + (x as usize) / 2
    }

    /// Inverse of [`site`](Self::site).
    pub fn coordinates(&self, index: usize) -> (i64, i64) {
        let z = index / self.n;
        let half = index % self.n;
        let x = 2 * half + (z % 2);
        (x as i64, z as i64)
    }

    fn ij(&self, i: i64, j: i64) -> (i64, i64) {
        (2 * i, 2 * j)
    }

    /// Sites of the plaquette `Z̄_{i,j} = Z_{2i,2j} Z_{2i+1,2j+1} Z_{2i+2,2j} Z_{2i+1,2j-1}`.
    pub fn plaquette_sites(&self, i: i64, j: i64) -> [usize; 4] {
        let (x, z) = self.ij(i, j);
        [
            self.site(x, z),
            self.site(x + 1, z + 1),
            self.site(x + 2, z),
            self.site(x + 1, z - 1),
        ]
    }

    /// Sites of the star `X̄_{i,j} = X_{2i,2j} X_{2i+1,2j+1} X_{2i-1,2j+1} X_{2i,2j+2}`.
    pub fn star_sites(&self, i: i64, j: i64) -> [usize; 4] {
        let (x, z) = self.ij(i, j);
        [
            self.site(x, z),
            self.site(x + 1, z + 1),
            self.site(x - 1, z + 1),
            self.site(x, z + 2),
        ]
    }

    pub fn plaquette(&self, i: i64, j: i64) -> PauliTerm {
        PauliTerm::z_string(self.n_qubits(), self.plaquette_sites(i, j))
    }

    pub fn star(&self, i: i64, j: i64) -> PauliTerm {
        PauliTerm::x_string(self.n_qubits(), self.star_sites(i, j))
    }

    pub fn plaquettes(&self) -> Vec<PauliTerm> {
        self.grid().map(|(i, j)| self.plaquette(i, j)).collect()
    }

    pub fn stars(&self) -> Vec<PauliTerm> {
        self.grid().map(|(i, j)| self.star(i, j)).collect()
    }

    fn grid(&self) -> impl Iterator<Item = (i64, i64)> {
        let n = self.n as i64;
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
    }

    /// `H = -(Δ/2) Σ_{i,j} (Z̄_{i,j} + X̄_{i,j})`.
    pub fn hamiltonian(&self) -> PauliSum {
        let mut h = PauliSum::new(self.n_qubits());
        let c = -0.5 * self.gap;
        for t in self.plaquettes().into_iter().chain(self.stars()) {
            h.add_term(t.scaled(c)).expect("same register");
        }
        h
    }

    /// Ground energy `-Δ N²`: every stabilizer at +1.
    pub fn ground_energy(&self) -> f64 {
        -self.gap * (self.n * self.n) as f64
    }

    /// `(Z_{L,1}, Z_{L,2}, X string)`: `∏_i Z_{2i+1,1}`, `∏_j Z_{0,2j}` and `∏_i X_{2i,0}`.
    pub fn logicals(&self) -> (PauliTerm, PauliTerm, PauliTerm) {
        let n = self.n as i64;
        let nq = self.n_qubits();
        let zl1 = PauliTerm::z_string(nq, (0..n).map(|i| self.site(2 * i + 1, 1)));
        let zl2 = PauliTerm::z_string(nq, (0..n).map(|j| self.site(0, 2 * j)));
        let xs = PauliTerm::x_string(nq, (0..n).map(|i| self.site(2 * i, 0)));
        (zl1, zl2, xs)
    }

    /// Error string `U_l = ∏_{i=0}^{l} X_{2i,0}` for `0 ≤ l ≤ N-1`.
    pub fn error_string(&self, l: usize) -> Result<PauliTerm> {
        if l >= self.n {
            return Err(Error::IndexOutOfRange {
                name: "l",
                index: l,
                bound: self.n,
            });
        }
        Ok(PauliTerm::x_string(
            self.n_qubits(),
            (0..=l as i64).map(|i| self.site(2 * i, 0)),
        ))
    }

    /// The adversarial perturbation
    /// `δH = (δ/2) Σ_{i=0}^{N-3} J_i X_{2i+2,0}(1 - Z̄_{i,0} Z̄_{i+1,0}) + (δ/2) Σ_{i=0}^{N-2} B_i (1 - Z̄_{i,0})`.
    pub fn perturbation(&self, couplings: &[f64], fields: &[f64], delta: f64) -> Result<PauliSum> {
        let n = self.n;
        check_len("J", couplings, n.saturating_sub(2))?;
        check_len("B", fields, n - 1)?;
        check_unit_bounded("J", couplings)?;
        check_unit_bounded("B", fields)?;
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        let nq = self.n_qubits();
        let mut dh = PauliSum::new(nq);
        for (i, &j) in couplings.iter().enumerate() {
            if j == 0.0 {
                continue;
            }
            let amp = 0.5 * delta * j;
            let hop = PauliTerm::x_string(nq, [self.site(2 * i as i64 + 2, 0)]);
            let zz = self
                .plaquette(i as i64, 0)
                .multiply(&self.plaquette(i as i64 + 1, 0))?;
            dh.add_term(hop.clone().scaled(amp))?;
            dh.add_term(hop.multiply(&zz)?.scaled(-amp))?;
        }
        for (i, &b) in fields.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            let amp = 0.5 * delta * b;
            dh.add_term(PauliTerm::identity(nq).scaled(amp))?;
            dh.add_term(self.plaquette(i as i64, 0).scaled(-amp))?;
        }
        Ok(dh)
    }

    /// CNOT list for the duality map `V`, in application order.
    ///
    /// The first block is `C^{(2i,0)}_{(2i-2,0)}` for `i = 1, 2, …, last` (the gate with
    /// `i = 1` acts first), followed by `C^{(2i+1,∓1)}_{(2i,0)}` for `i = 0..N-2`.
    /// [`DualityVariant::Truncated`] stops the first block at `last = N-2`;
    /// [`DualityVariant::Closed`] runs it to `last = N-1`, which also disentangles
    /// the final chain site.
    pub fn duality_circuit(&self, variant: DualityVariant) -> Vec<(usize, usize)> {
        let n = self.n as i64;
        let last = match variant {
            DualityVariant::Truncated => n - 2,
            DualityVariant::Closed => n - 1,
        };
        let mut circuit: Vec<(usize, usize)> = (1..=last)
            .map(|i| (self.site(2 * i, 0), self.site(2 * i - 2, 0)))
            .collect();
        for i in 0..=(n - 2) {
            circuit.push((self.site(2 * i + 1, -1), self.site(2 * i, 0)));
            circuit.push((self.site(2 * i + 1, 1), self.site(2 * i, 0)));
        }
        circuit
    }
}

/// Which version of the duality circuit to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualityVariant {
    /// First CNOT block over `i = 1..N-2`.
    Truncated,
    /// First CNOT block over `i = 1..N-1`.
    Closed,
}

pub(crate) fn check_len(name: &'static str, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::SizeMismatch {
            context: name,
            expected,
            actual: v.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_unit_bounded(name: &'static str, v: &[f64]) -> Result<()> {
    if let Some(x) = v
        .iter()
        .find(|x| !(x.is_finite() && x.abs() <= 1.0 + 1e-12))
    {
        return Err(invalid(
            name,
            format!("entries must satisfy |x| <= 1, found {x}"),
        ));
    }
    Ok(())
}
