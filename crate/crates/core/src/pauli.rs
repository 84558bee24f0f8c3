//! Signed Pauli strings in symplectic (bitmask) form.
//!
//! A [`PauliTerm`] with masks `x`, `z` and coefficient `c` denotes the operator
//! `c · ⊗_q σ_q`, where `σ_q` is `X` when only bit `q` of `x` is set, `Z` when only
//! bit `q` of `z` is set and `Y` when both are. Because `Y = iXZ`, the term equals
//! `c · i^{|x & z|} · X^x Z^z`; all phase bookkeeping happens in `c`.
//!
//! Dense statevectors use qubit 0 as the least-significant bit of the basis index.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Coefficients with modulus below this are dropped when a [`PauliSum`] is canonicalised.
pub const PRUNE_EPS: f64 = 1e-14;

/// Fixed-width bit set over qubit indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QubitMask {
    words: Vec<u64>,
}

impl QubitMask {
    pub fn zeros(n_qubits: usize) -> Self {
        Self {
            words: vec![0; n_qubits.div_ceil(64).max(1)],
        }
    }

    pub fn from_indices(n_qubits: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::zeros(n_qubits);
        for q in qubits {
            m.flip(q);
        }
        m
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        (self.words[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, value: bool) {
        let bit = 1u64 << (q % 64);
        if value {
            self.words[q / 64] |= bit;
        } else {
            self.words[q / 64] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, q: usize) {
        self.words[q / 64] ^= 1u64 << (q % 64);
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// `|self & other|`.
    pub fn and_count(&self, other: &Self) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    pub fn xor(&self, other: &Self) -> Self {
        Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn or(&self, other: &Self) -> Self {
        Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter_map(move |b| ((w >> b) & 1 == 1).then_some(wi * 64 + b))
        })
    }

    /// The low 64 bits; only meaningful for registers of at most 64 qubits.
    pub fn low_word(&self) -> u64 {
        self.words[0]
    }
}

impl fmt::Debug for QubitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// `i^k` for `k` taken mod 4.
#[inline]
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A complex multiple of a tensor product of single-qubit Paulis.
#[derive(Clone, PartialEq)]
pub struct PauliTerm {
    n_qubits: usize,
    x: QubitMask,
    z: QubitMask,
    coeff: Complex64,
}

impl PauliTerm {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "a Pauli term needs at least one qubit");
        Self {
            n_qubits,
            x: QubitMask::zeros(n_qubits),
            z: QubitMask::zeros(n_qubits),
            coeff: Complex64::new(1.0, 0.0),
        }
    }

    /// Builds `coeff · ∏ σ` from `(qubit, label)` pairs. Repeated qubits multiply in order.
    pub fn from_paulis(
        n_qubits: usize,
        factors: impl IntoIterator<Item = (usize, Pauli)>,
    ) -> Result<Self> {
        let mut term = Self::identity(n_qubits);
        for (q, p) in factors {
            term = term.multiply(&Self::single(n_qubits, q, p)?)?;
        }
        Ok(term)
    }

    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::IndexOutOfRange {
                name: "qubit",
                index: qubit,
                bound: n_qubits,
            });
        }
        let mut t = Self::identity(n_qubits);
        let (xb, zb) = pauli.bits();
        t.x.set(qubit, xb);
        t.z.set(qubit, zb);
        Ok(t)
    }

    /// `X` on every qubit in `qubits`.
    pub fn x_string(n_qubits: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        let mut t = Self::identity(n_qubits);
        t.x = QubitMask::from_indices(n_qubits, qubits);
        t
    }

    /// `Z` on every qubit in `qubits`.
    pub fn z_string(n_qubits: usize, qubits: impl IntoIterator<Item = usize>) -> Self {
        let mut t = Self::identity(n_qubits);
        t.z = QubitMask::from_indices(n_qubits, qubits);
        t
    }

    /// Raw constructor from masks; the term denotes `coeff · ∏ σ` with `Y` where both bits are set.
    pub fn from_masks(x: QubitMask, z: QubitMask, coeff: Complex64, n_qubits: usize) -> Self {
        Self {
            n_qubits,
            x,
            z,
            coeff,
        }
    }

    pub fn with_coeff(mut self, coeff: impl Into<Complex64>) -> Self {
        self.coeff = coeff.into();
        self
    }

    pub fn scaled(mut self, factor: impl Into<Complex64>) -> Self {
        self.coeff *= factor.into();
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> &QubitMask {
        &self.x
    }

    pub fn z_mask(&self) -> &QubitMask {
        &self.z
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones() as usize
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).ones().collect()
    }

    pub fn pauli_at(&self, q: usize) -> Pauli {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Same Pauli string (ignoring the coefficient).
    pub fn same_string(&self, other: &Self) -> bool {
        self.x == other.x && self.z == other.z
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                context: "Pauli operands",
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Exact operator product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        // c1 i^{|x1z1|} X^x1 Z^z1 · c2 i^{|x2z2|} X^x2 Z^z2
        //   = c1 c2 i^{|x1z1|+|x2z2|} (-1)^{|z1x2|} X^x3 Z^z3,  and X^x3 Z^z3 = i^{-|x3z3|} σ(x3,z3)
        let x = self.x.xor(&other.x);
        let z = self.z.xor(&other.z);
        let k = self.x.and_count(&self.z)
            + other.x.and_count(&other.z)
            + 2 * self.z.and_count(&other.x)
            + 3 * x.and_count(&z);
        Ok(Self {
            n_qubits: self.n_qubits,
            coeff: self.coeff * other.coeff * i_pow(k),
            x,
            z,
        })
    }

    /// Symplectic commutation test: true iff `self · other == other · self`.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_size(other)?;
        Ok((self.x.and_count(&other.z) + self.z.and_count(&other.x)) % 2 == 0)
    }

    /// Returns `C p C†` for the controlled-NOT `C` with the given control and target.
    pub fn conjugate_by_cnot(&self, control: usize, target: usize) -> Result<Self> {
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
            return Err(invalid("target", "control and target coincide"));
        }
        let (xc, zc) = (self.x.get(control), self.z.get(control));
        let (xt, zt) = (self.x.get(target), self.z.get(target));
        let mut out = self.clone();
        // Hermitian-basis CNOT rule: r ^= x_c z_t (x_t ^ z_c ^ 1).
        if xc && zt && !(xt ^ zc) {
            out.coeff = -out.coeff;
        }
        out.x.set(target, xt ^ xc);
        out.z.set(control, zc ^ zt);
        Ok(out)
    }

    /// Folds [`conjugate_by_cnot`](Self::conjugate_by_cnot) over `circuit` in application order:
    /// the first gate of the slice acts first on the state, so it conjugates first.
    pub fn conjugate_by_circuit(&self, circuit: &[(usize, usize)]) -> Result<Self> {
        circuit
            .iter()
            .try_fold(self.clone(), |p, &(c, t)| p.conjugate_by_cnot(c, t))
    }

    /// Returns `self · v` for a dense statevector of length `2^n_qubits`.
    pub fn apply_to_state(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_accumulate(v, Complex64::new(1.0, 0.0), &mut out)?;
        Ok(out)
    }

    /// `out += scale · self · v`.
    pub fn apply_accumulate(
        &self,
        v: &[Complex64],
        scale: Complex64,
        out: &mut [Complex64],
    ) -> Result<()> {
        if self.n_qubits > 30 {
            return Err(Error::TooLarge {
                what: "statevector qubits",
                size: self.n_qubits,
                cap: 30,
            });
        }
        let dim = 1usize << self.n_qubits;
        if v.len() != dim || out.len() != dim {
            return Err(Error::SizeMismatch {
                context: "statevector length",
                expected: dim,
                actual: if v.len() != dim { v.len() } else { out.len() },
            });
        }
        let xm = self.x.low_word() as usize;
        let zm = self.z.low_word() as usize;
        let phase = scale * self.coeff * i_pow(self.x.and_count(&self.z));
        let neg = -phase;
        // σ|s⟩ = i^{|xz|} (-1)^{|z & s|} |s ^ x⟩
        for (s, &amp) in v.iter().enumerate() {
            let f = if (zm & s).count_ones() % 2 == 0 {
                phase
            } else {
                neg
            };
            out[s ^ xm] += f * amp;
        }
        Ok(())
    }

    /// Dense `2^n × 2^n` matrix, row-major. Test helper for tiny registers.
    pub fn to_dense(&self) -> Result<Vec<Vec<Complex64>>> {
        if self.n_qubits > 12 {
            return Err(Error::TooLarge {
                what: "dense matrix qubits",
                size: self.n_qubits,
                cap: 12,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[col] = Complex64::new(1.0, 0.0);
            let img = self.apply_to_state(&e)?;
            for (row, val) in img.into_iter().enumerate() {
                m[row][col] = val;
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+.6}{:+.6}i)", self.coeff.re, self.coeff.im)?;
        let mut any = false;
        for q in self.support() {
            any = true;
            let l = match self.pauli_at(q) {
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
                Pauli::I => 'I',
            };
            write!(f, " {l}{q}")?;
        }
        if !any {
            write!(f, " I")?;
        }
        Ok(())
    }
}

/// A canonical sum of Pauli terms on a common register.
///
/// No two stored terms share the same Pauli string and terms whose coefficient
/// modulus drops to [`PRUNE_EPS`] or below are removed. Iteration order is the
/// lexicographic order of `(x_mask, z_mask)`, so output is deterministic.
#[derive(Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(QubitMask, QubitMask), Complex64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut s = Self::new(n_qubits);
        for t in terms {
            s.add_term(t)?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, term: PauliTerm) -> Result<()> {
        if term.n_qubits != self.n_qubits {
            return Err(Error::SizeMismatch {
                context: "Pauli sum term",
                expected: self.n_qubits,
                actual: term.n_qubits,
            });
        }
        let key = (term.x, term.z);
        let c = self
            .terms
            .entry(key.clone())
            .or_insert(Complex64::new(0.0, 0.0));
        *c += term.coeff;
        if c.norm() <= PRUNE_EPS {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add_sum(&mut self, other: &PauliSum) -> Result<()> {
        for t in other.terms() {
            self.add_term(t)?;
        }
        Ok(())
    }

    pub fn scaled(&self, factor: impl Into<Complex64>) -> Self {
        let f = factor.into();
        let mut out = Self::new(self.n_qubits);
        for t in self.terms() {
            // cannot fail: same register
            let _ = out.add_term(t.scaled(f));
        }
        out
    }

    /// Operator product of two sums, canonicalised.
    pub fn multiply(&self, other: &PauliSum) -> Result<Self> {
        let mut out = Self::new(self.n_qubits);
        for a in self.terms() {
            for b in other.terms() {
                out.add_term(a.multiply(&b)?)?;
            }
        }
        Ok(out)
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|((x, z), &c)| PauliTerm {
            n_qubits: self.n_qubits,
            x: x.clone(),
            z: z.clone(),
            coeff: c,
        })
    }

    /// Coefficient of the given Pauli string (zero when absent).
    pub fn coeff_of(&self, string: &PauliTerm) -> Complex64 {
        self.terms
            .get(&(string.x.clone(), string.z.clone()))
            .copied()
            .unwrap_or_default()
    }

    pub fn conjugate_by_circuit(&self, circuit: &[(usize, usize)]) -> Result<Self> {
        let mut out = Self::new(self.n_qubits);
        for t in self.terms() {
            out.add_term(t.conjugate_by_circuit(circuit)?)?;
        }
        Ok(out)
    }

    /// Sum of coefficient moduli, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Largest coefficient-wise difference `max |a_P - b_P|` over all strings of either sum.
    pub fn max_coeff_difference(&self, other: &PauliSum) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                context: "Pauli sum comparison",
                expected: self.n_qubits,
                actual: other.n_qubits,
            });
        }
        let mut diff = self.clone();
        diff.add_sum(&other.scaled(-1.0))?;
        Ok(diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max))
    }

    /// `out = H v`.
    pub fn apply_to_state(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_accumulate(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_accumulate(&self, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let dim = 1usize
            .checked_shl(self.n_qubits as u32)
            .ok_or(Error::TooLarge {
                what: "statevector qubits",
                size: self.n_qubits,
                cap: 30,
            })?;
        if v.len() != dim {
            return Err(Error::SizeMismatch {
                context: "statevector length",
                expected: dim,
                actual: v.len(),
            });
        }
        for t in self.terms() {
            t.apply_accumulate(v, Complex64::new(1.0, 0.0), out)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.terms()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = a.len();
        let mut out = vec![vec![c(0.0, 0.0); n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    /// CNOT as a dense matrix with qubit 0 as the least-significant bit.
    fn cnot_dense(n: usize, control: usize, target: usize) -> Vec<Vec<Complex64>> {
        let dim = 1 << n;
        let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
        for s in 0..dim {
            let t = if (s >> control) & 1 == 1 {
                s ^ (1 << target)
            } else {
                s
            };
            m[t][s] = c(1.0, 0.0);
        }
        m
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let x = PauliTerm::single(2, 0, Pauli::X).unwrap();
        let z = PauliTerm::single(2, 0, Pauli::Z).unwrap();
        let p = x.multiply(&z).unwrap();
        assert_eq!(p.pauli_at(0), Pauli::Y);
        assert_eq!(p.pauli_at(1), Pauli::I);
        assert_eq!(p.coeff(), c(0.0, -1.0));
    }

    #[test]
    fn identity_is_neutral() {
        let p = PauliTerm::from_paulis(3, [(0, Pauli::Y), (2, Pauli::Z)])
            .unwrap()
            .with_coeff(c(0.5, -2.0));
        let id = PauliTerm::identity(3);
        assert_eq!(id.multiply(&p).unwrap(), p);
        assert_eq!(p.multiply(&id).unwrap(), p);
    }

    #[test]
    fn weight_four_z_squares_to_identity() {
        let p = PauliTerm::z_string(8, [0, 1, 4, 6]);
        let sq = p.multiply(&p).unwrap();
        assert!(sq.x_mask().is_zero() && sq.z_mask().is_zero());
        assert_eq!(sq.coeff(), c(1.0, 0.0));
    }

    #[test]
    fn commutation_examples() {
        let x0 = PauliTerm::single(2, 0, Pauli::X).unwrap();
        let z1 = PauliTerm::single(2, 1, Pauli::Z).unwrap();
        let z0 = PauliTerm::single(2, 0, Pauli::Z).unwrap();
        assert!(x0.commutes(&z1).unwrap());
        assert!(!x0.commutes(&z0).unwrap());
    }

    #[test]
    fn size_mismatch_is_reported() {
        let a = PauliTerm::identity(2);
        let b = PauliTerm::identity(3);
        assert!(matches!(a.multiply(&b), Err(Error::SizeMismatch { .. })));
        assert!(a.commutes(&b).is_err());
    }

    #[test]
    fn cnot_rules_on_control() {
        let x = PauliTerm::single(2, 0, Pauli::X).unwrap();
        let img = x.conjugate_by_cnot(0, 1).unwrap();
        assert_eq!(img.pauli_at(0), Pauli::X);
        assert_eq!(img.pauli_at(1), Pauli::X);
        assert_eq!(img.coeff(), c(1.0, 0.0));

        let z = PauliTerm::single(2, 0, Pauli::Z).unwrap();
        assert_eq!(z.conjugate_by_cnot(0, 1).unwrap(), z);
    }

    #[test]
    fn cnot_matches_dense_conjugation_for_all_two_qubit_paulis() {
        let labels = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for (control, target) in [(0, 1), (1, 0)] {
            let cx = cnot_dense(2, control, target);
            for &a in &labels {
                for &b in &labels {
                    let p = PauliTerm::from_paulis(2, [(0, a), (1, b)]).unwrap();
                    let expected = matmul(&matmul(&cx, &p.to_dense().unwrap()), &cx);
                    let got = p
                        .conjugate_by_cnot(control, target)
                        .unwrap()
                        .to_dense()
                        .unwrap();
                    for i in 0..4 {
                        for j in 0..4 {
                            assert!((expected[i][j] - got[i][j]).norm() < 1e-15, "{a:?}{b:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cnot_argument_errors() {
        let p = PauliTerm::single(3, 0, Pauli::X).unwrap();
        assert!(matches!(
            p.conjugate_by_cnot(1, 1),
            Err(Error::InvalidArgument { .. })
        ));
        assert!(matches!(
            p.conjugate_by_cnot(0, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_circuit_and_reversed_circuit() {
        let p = PauliTerm::from_paulis(4, [(0, Pauli::Y), (1, Pauli::X), (3, Pauli::Z)]).unwrap();
        assert_eq!(p.conjugate_by_circuit(&[]).unwrap(), p);
        let circuit = [(0, 1), (2, 3), (1, 2), (3, 0)];
        let forward = p.conjugate_by_circuit(&circuit).unwrap();
        let rev: Vec<_> = circuit.iter().rev().copied().collect();
        assert_eq!(forward.conjugate_by_circuit(&rev).unwrap(), p);
    }

    #[test]
    fn apply_to_state_examples() {
        let v: Vec<Complex64> = (0..8).map(|k| c(k as f64, -0.5 * k as f64)).collect();
        assert_eq!(PauliTerm::identity(3).apply_to_state(&v).unwrap(), v);

        let mut zero = vec![c(0.0, 0.0); 8];
        zero[0] = c(1.0, 0.0);
        let flipped = PauliTerm::single(3, 0, Pauli::X)
            .unwrap()
            .apply_to_state(&zero)
            .unwrap();
        assert_eq!(flipped[1], c(1.0, 0.0));

        let x0 = PauliTerm::single(3, 0, Pauli::X).unwrap();
        let twice = x0.apply_to_state(&x0.apply_to_state(&v).unwrap()).unwrap();
        assert_eq!(twice, v);

        assert!(matches!(
            x0.apply_to_state(&v[..4]),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn single_qubit_matrices() {
        let y = PauliTerm::single(1, 0, Pauli::Y)
            .unwrap()
            .to_dense()
            .unwrap();
        assert_eq!(y[0][1], c(0.0, -1.0));
        assert_eq!(y[1][0], c(0.0, 1.0));
        let z = PauliTerm::single(1, 0, Pauli::Z)
            .unwrap()
            .to_dense()
            .unwrap();
        assert_eq!(z[1][1], c(-1.0, 0.0));
    }

    #[test]
    fn sum_canonicalisation() {
        let x = PauliTerm::single(2, 0, Pauli::X).unwrap();
        let mut s = PauliSum::new(2);
        s.add_term(x.clone()).unwrap();
        s.add_term(x.clone().with_coeff(2.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff_of(&x), c(3.0, 0.0));
        s.add_term(x.clone().with_coeff(-3.0)).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn masks_beyond_one_word() {
        let p = PauliTerm::x_string(130, [0, 64, 129]);
        let q = PauliTerm::z_string(130, [129]);
        assert!(!p.commutes(&q).unwrap());
        assert_eq!(p.weight(), 3);
        assert_eq!(p.support(), vec![0, 64, 129]);
    }
}
