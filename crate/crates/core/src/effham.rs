//! Reduced effective Hamiltonians on error-string subspaces.
//!
//! The toric chain lives on `{U_l|ψ⟩ : l = 0..N-2}` (dimension `N-1`) and keeps the
//! `2Δ` excitation offset on its diagonal. The Ising chains live on the `M = N(N-1)-2`
//! retained prefix configurations and store energies above the ground state.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::lattice::IsingLattice;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("diag", "matrix must have dimension >= 1"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::SizeMismatch {
                context: "offdiag length",
                expected: diag.len() - 1,
                actual: offdiag.len(),
            });
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(invalid("entries", "must be finite"));
        }
        Ok(Self { diag, offdiag })
    }

    /// Constant diagonal `d` and constant coupling `b`.
    pub fn uniform(dim: usize, d: f64, b: f64) -> Result<Self> {
        Self::new(vec![d; dim], vec![b; dim.saturating_sub(1)])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.offdiag[i.min(j)],
            _ => 0.0,
        }
    }

    /// Largest absolute entry, a cheap scale for relative tolerances.
    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let o: f64 = self.offdiag.iter().map(|x| x * x).sum();
        (d + 2.0 * o).sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |i, j| self.get(i, j))
    }

    /// Simultaneous row and column reversal.
    pub fn reversed(&self) -> Self {
        Self {
            diag: self.diag.iter().rev().copied().collect(),
            offdiag: self.offdiag.iter().rev().copied().collect(),
        }
    }

    /// Largest deviation from persymmetry (mirror symmetry about the anti-diagonal).
    pub fn persymmetry_defect(&self) -> f64 {
        let r = self.reversed();
        self.diag
            .iter()
            .zip(&r.diag)
            .chain(self.offdiag.iter().zip(&r.offdiag))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_persymmetric(&self, tol: f64) -> bool {
        self.persymmetry_defect() <= tol
    }

    pub fn to_banded(&self) -> BandedSym {
        let bands = if self.offdiag.is_empty() {
            Vec::new()
        } else {
            vec![self.offdiag.clone()]
        };
        BandedSym {
            diag: self.diag.clone(),
            bands,
        }
    }
}

/// Real symmetric banded matrix: `bands[d-1][i]` is the entry `(i, i+d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    diag: Vec<f64>,
    bands: Vec<Vec<f64>>,
}

impl BandedSym {
    pub fn new(diag: Vec<f64>, bands: Vec<Vec<f64>>) -> Result<Self> {
        let m = diag.len();
        if m == 0 {
            return Err(invalid("diag", "matrix must have dimension >= 1"));
        }
        if bands.len() >= m {
            return Err(invalid(
                "k",
                format!(
                    "band width {} must be smaller than dimension {m}",
                    bands.len()
                ),
            ));
        }
        for (d, band) in bands.iter().enumerate() {
            if band.len() != m - d - 1 {
                return Err(Error::SizeMismatch {
                    context: "band length",
                    expected: m - d - 1,
                    actual: band.len(),
                });
            }
        }
        Ok(Self { diag, bands })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of stored sub-diagonals `k`.
    pub fn bandwidth(&self) -> usize {
        self.bands.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn bands(&self) -> &[Vec<f64>] {
        &self.bands
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j);
        match d {
            0 => self.diag[i],
            d if d <= self.bands.len() => self.bands[d - 1][i.min(j)],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |i, j| self.get(i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(self.bands.iter().flatten())
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Toric chain: `diag_l = 2Δ + δ B_l` (`l = 0..N-2`), `offdiag_l = δ J_l` (`l = 0..N-3`).
pub fn toric_effective(
    n: usize,
    gap: f64,
    delta: f64,
    couplings: &[f64],
    fields: &[f64],
) -> Result<SymTridiag> {
    if n < 2 {
        return Err(invalid("N", format!("need N >= 2, got {n}")));
    }
    check_delta(delta)?;
    if fields.len() != n - 1 {
        return Err(Error::SizeMismatch {
            context: "B",
            expected: n - 1,
            actual: fields.len(),
        });
    }
    if couplings.len() != n - 2 {
        return Err(Error::SizeMismatch {
            context: "J",
            expected: n - 2,
            actual: couplings.len(),
        });
    }
    SymTridiag::new(
        fields.iter().map(|b| 2.0 * gap + delta * b).collect(),
        couplings.iter().map(|j| delta * j).collect(),
    )
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(invalid(
            "delta",
            format!("must be finite and >= 0, got {delta}"),
        ));
    }
    Ok(())
}

fn ising_dim(n: usize) -> Result<usize> {
    if n < 3 {
        return Err(invalid("N", format!("Ising chain needs N >= 3, got {n}")));
    }
    Ok(n * (n - 1) - 2)
}

/// Ising chain exactly as written in closed form:
/// `(N+1)·1 + δ Σ (|i⟩⟨i+1| + h.c.) - Σ_{i=1}^{N-1} 2(N-i)(|i⟩⟨i| + |M+1-i⟩⟨M+1-i|)`.
///
/// Its diagonal sits `N+1` below [`ising_effective_surface`].
pub fn ising_effective_closed_form(n: usize, delta: f64) -> Result<SymTridiag> {
    check_delta(delta)?;
    let m = ising_dim(n)?;
    let mut diag = vec![(n + 1) as f64; m];
    for i in 1..n {
        let shift = 2.0 * (n - i) as f64;
        diag[i - 1] -= shift;
        diag[m - i] -= shift;
    }
    SymTridiag::new(diag, vec![delta; m - 1])
}

/// Ising chain with diagonal equal to the bond-counted excitation energy of each
/// retained prefix configuration and uniform coupling `δ`.
pub fn ising_effective_surface(n: usize, delta: f64) -> Result<SymTridiag> {
    check_delta(delta)?;
    let m = ising_dim(n)?;
    let lat = IsingLattice::new(n)?;
    let diag: Vec<f64> = lat
        .retained_prefixes()?
        .into_iter()
        .map(|l| lat.excitation_energy(&lat.prefix_mask(l)))
        .collect();
    SymTridiag::new(diag, vec![delta; m - 1])
}

/// Surface-energy diagonal plus user-chosen bands up to distance `k`.
///
/// `band_coeffs[d-1]` holds the `M-d` entries `(i, i+d)`, each of modulus at most `δ`.
pub fn banded_effective(
    n: usize,
    delta: f64,
    k: usize,
    band_coeffs: &[Vec<f64>],
) -> Result<BandedSym> {
    let base = ising_effective_surface(n, delta)?;
    let m = base.dim();
    if k == 0 {
        return Err(invalid("k", "band width must be >= 1"));
    }
    if k >= m {
        return Err(invalid("k", format!("band width {k} must be < M = {m}")));
    }
    if band_coeffs.len() != k {
        return Err(Error::SizeMismatch {
            context: "band count",
            expected: k,
            actual: band_coeffs.len(),
        });
    }
    let bound = delta * (1.0 + 1e-12);
    if let Some(x) = band_coeffs.iter().flatten().find(|x| !(x.abs() <= bound)) {
        return Err(invalid(
            "band_coeffs",
            format!("entry {x} exceeds delta = {delta}"),
        ));
    }
    BandedSym::new(base.diag().to_vec(), band_coeffs.to_vec())
}
