//! Symmetric eigensolvers.
//!
//! [`eigh_tridiag`] is an implicit-shift QL iteration with Wilkinson shifts that
//! accumulates the full eigenvector matrix. Eigenvalues are returned ascending and
//! every eigenvector is normalised so its first nonzero component is positive.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::effham::SymTridiag;
use crate::error::{invalid, Error, Result};

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 60;

/// Largest dimension accepted by [`eigh_dense_symmetric`].
pub const DENSE_CAP: usize = 4096;

/// Spectrum of a chain together with the endpoint data needed for transfer analysis.
///
/// Index `k` runs over eigenvalues in ascending order starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    /// `⟨λ_k|1⟩`, nonnegative by the sign convention.
    pub first_components: Vec<f64>,
    /// `⟨M|λ_k⟩`.
    pub last_components: Vec<f64>,
    /// `a_k = ⟨M|λ_k⟩⟨λ_k|1⟩`.
    pub amplitudes: Vec<f64>,
}

impl SpectralData {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max λ - min λ`.
    pub fn width(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// First-component weights `|⟨λ_k|1⟩|²`.
    pub fn weights(&self) -> Vec<f64> {
        self.first_components.iter().map(|c| c * c).collect()
    }
}

/// Full eigendecomposition; column `k` of `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    fn sorted_and_signed(values: Vec<f64>, vectors: DMatrix<f64>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut v = DMatrix::zeros(vectors.nrows(), n);
        let mut vals = Vec::with_capacity(n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = vectors.column(src).clone_owned();
            if let Some(first) = col.iter().find(|x| **x != 0.0) {
                if *first < 0.0 {
                    col.neg_mut();
                }
            }
            v.set_column(dst, &col);
            vals.push(values[src]);
        }
        Self {
            values: vals,
            vectors: v,
        }
    }
}

/// Eigenvalues and eigenvectors of a symmetric tridiagonal matrix.
pub fn eigh_tridiag_full(m: &SymTridiag) -> Result<Eigen> {
    let n = m.dim();
    let mut d = m.diag().to_vec();
    let mut e = m.offdiag().to_vec();
    e.push(0.0);
    let mut z = DMatrix::<f64>::identity(n, n);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a negligible off-diagonal element; this splits the matrix into unreduced blocks.
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence {
                    method: "tridiagonal QL",
                    iterations: iter,
                    detail: format!("eigenvalue {l} of {n}, residual coupling {:e}", e[l]),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = mm;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    Ok(Eigen::sorted_and_signed(d, z))
}

/// Spectrum plus endpoint components and transfer amplitudes of a chain.
///
/// An exactly persymmetric chain is split into its even and odd parity blocks,
/// so that `⟨M|λ_k⟩ = ±⟨λ_k|1⟩` holds to rounding even when mirror partners are
/// nearly degenerate.
pub fn eigh_tridiag(m: &SymTridiag) -> Result<SpectralData> {
    if m.dim() >= 2 && m.persymmetry_defect() == 0.0 {
        return eigh_persymmetric(m);
    }
    let eig = eigh_tridiag_full(m)?;
    let n = m.dim();
    let first: Vec<f64> = (0..n).map(|k| eig.vectors[(0, k)]).collect();
    let last: Vec<f64> = (0..n).map(|k| eig.vectors[(n - 1, k)]).collect();
    let amplitudes = first.iter().zip(&last).map(|(f, l)| f * l).collect();
    Ok(SpectralData {
        eigenvalues: eig.values,
        first_components: first,
        last_components: last,
        amplitudes,
    })
}

fn eigh_persymmetric(m: &SymTridiag) -> Result<SpectralData> {
    let n = m.dim();
    let p = n / 2;
    let d = m.diag();
    let b = m.offdiag();
    let mut even_diag = d[..p].to_vec();
    let mut even_off = b[..p.saturating_sub(1)].to_vec();
    let mut odd_diag = d[..p].to_vec();
    if n % 2 == 0 {
        even_diag[p - 1] += b[p - 1];
        odd_diag[p - 1] -= b[p - 1];
    } else {
        even_diag.push(d[p]);
        if p >= 1 {
            even_off.push(std::f64::consts::SQRT_2 * b[p - 1]);
        }
    }
    let odd_off = b[..p.saturating_sub(1)].to_vec();
    let mut levels: Vec<(f64, f64, f64)> = Vec::with_capacity(n);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (diag, off, parity) in [(even_diag, even_off, 1.0), (odd_diag, odd_off, -1.0)] {
        if diag.is_empty() {
            continue;
        }
        let eig = eigh_tridiag_full(&SymTridiag::new(diag, off)?)?;
        for (k, &value) in eig.values.iter().enumerate() {
            let first = h * eig.vectors[(0, k)];
            levels.push((value, first, parity * first));
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(SpectralData {
        eigenvalues: levels.iter().map(|l| l.0).collect(),
        first_components: levels.iter().map(|l| l.1).collect(),
        last_components: levels.iter().map(|l| l.2).collect(),
        amplitudes: levels.iter().map(|l| l.1 * l.2).collect(),
    })
}

/// `Δ' = min_{i≠j} |λ_i - λ_j|`.
pub fn min_gap(s: &SpectralData) -> Result<f64> {
    if s.len() < 2 {
        return Err(invalid(
            "spectrum",
            "minimum gap needs at least two eigenvalues",
        ));
    }
    Ok(s.eigenvalues
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min))
}

/// Full eigendecomposition of a dense symmetric matrix (ascending, signed like [`eigh_tridiag`]).
pub fn eigh_dense_symmetric(a: &DMatrix<f64>) -> Result<Eigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::SizeMismatch {
            context: "square matrix",
            expected: n,
            actual: a.ncols(),
        });
    }
    if n > DENSE_CAP {
        return Err(Error::TooLarge {
            what: "dense dimension",
            size: n,
            cap: DENSE_CAP,
        });
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let asym = (a - a.transpose()).amax();
    if asym > 1e-13 * scale {
        return Err(Error::NotSymmetric {
            property: "symmetric",
            deviation: asym,
        });
    }
    let eig = SymmetricEigen::new(a.clone());
    Ok(Eigen::sorted_and_signed(
        eig.eigenvalues.iter().copied().collect(),
        eig.eigenvectors,
    ))
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form (same spectrum).
pub fn tridiagonalize(a: &DMatrix<f64>) -> Result<SymTridiag> {
    let n = a.nrows();
    if a.ncols() != n || n == 0 {
        return Err(invalid("a", "must be a non-empty square matrix"));
    }
    let mut a = a.clone();
    for k in 0..n.saturating_sub(2) {
        let alpha = (k + 1..n).map(|i| a[(i, k)].powi(2)).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let alpha = if a[(k + 1, k)] > 0.0 { -alpha } else { alpha };
        // unit Householder vector u supported on k+1..n; A <- (I - 2uuᵀ) A (I - 2uuᵀ)
        let mut u = vec![0.0; n];
        for i in k + 1..n {
            u[i] = a[(i, k)];
        }
        u[k + 1] -= alpha;
        let unorm = u.iter().map(|t| t * t).sum::<f64>().sqrt();
        if unorm == 0.0 {
            continue;
        }
        u.iter_mut().for_each(|t| *t /= unorm);
        let p: Vec<f64> = (0..n)
            .map(|i| (k + 1..n).map(|j| a[(i, j)] * u[j]).sum())
            .collect();
        let kappa: f64 = (k + 1..n).map(|j| p[j] * u[j]).sum();
        let q: Vec<f64> = p.iter().zip(&u).map(|(pi, ui)| pi - kappa * ui).collect();
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] -= 2.0 * (u[i] * q[j] + q[i] * u[j]);
            }
        }
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    let off = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();
    SymTridiag::new(diag, off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn two_by_two() {
        let m = SymTridiag::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let s = eigh_tridiag(&m).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_matrix() {
        let m = SymTridiag::new(vec![3.0, -1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let eig = eigh_tridiag_full(&m).unwrap();
        assert_eq!(eig.values, vec![-1.0, 2.0, 3.0]);
        let expected_rows = [1, 2, 0];
        for (k, &row) in expected_rows.iter().enumerate() {
            assert_eq!(eig.vectors[(row, k)], 1.0);
        }
    }

    #[test]
    fn uniform_chain_closed_form() {
        let m = SymTridiag::uniform(5, 0.0, 0.5).unwrap();
        let s = eigh_tridiag(&m).unwrap();
        let mut expected: Vec<f64> = (1..=5).map(|k| (k as f64 * PI / 6.0).cos()).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let gap = min_gap(&s).unwrap();
        assert!((gap - ((PI / 6.0).cos() - (2.0 * PI / 6.0).cos())).abs() < 1e-14);
    }

    #[test]
    fn min_gap_examples() {
        let s = SpectralData {
            eigenvalues: vec![0.0, 1.0, 3.0],
            first_components: vec![],
            last_components: vec![],
            amplitudes: vec![],
        };
        assert_eq!(min_gap(&s).unwrap(), 1.0);
        let one = SymTridiag::new(vec![1.0], vec![]).unwrap();
        assert!(min_gap(&eigh_tridiag(&one).unwrap()).is_err());
    }

    #[test]
    fn dense_examples() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert!(eigh_dense_symmetric(&id)
            .unwrap()
            .values
            .iter()
            .all(|&v| (v - 1.0).abs() < 1e-15));
        let a = DMatrix::from_row_slice(2, 2, &[0.3, 0.7, 0.7, 0.3]);
        let v = eigh_dense_symmetric(&a).unwrap().values;
        assert!((v[0] + 0.4).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(
            eigh_dense_symmetric(&bad),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn parity_split_matches_general_solver() {
        for (d, o) in [
            (vec![0.1, -0.4, -0.4, 0.1], vec![0.5, 0.9, 0.5]),
            (vec![0.2, 0.0, 0.7, 0.0, 0.2], vec![0.3, 1.1, 1.1, 0.3]),
            (vec![0.0, 0.0], vec![0.8]),
            (vec![1.0, 2.0, 1.0], vec![0.4, 0.4]),
        ] {
            let m = SymTridiag::new(d, o).unwrap();
            let split = eigh_tridiag(&m).unwrap();
            let full = eigh_tridiag_full(&m).unwrap();
            let n = m.dim();
            for k in 0..n {
                assert!((split.eigenvalues[k] - full.values[k]).abs() < 1e-14);
                assert!((split.first_components[k] - full.vectors[(0, k)]).abs() < 1e-12);
                assert!((split.last_components[k] - full.vectors[(n - 1, k)]).abs() < 1e-12);
                assert_eq!(
                    split.last_components[k].abs(),
                    split.first_components[k].abs()
                );
            }
        }
    }

    #[test]
    fn sign_convention_first_component_positive() {
        let m = SymTridiag::new(vec![0.1, -0.4, 0.3, 0.9], vec![-0.5, 0.7, -0.2]).unwrap();
        let s = eigh_tridiag(&m).unwrap();
        assert!(s.first_components.iter().all(|&c| c > 0.0));
    }
}
