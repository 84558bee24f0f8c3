//! Splitting of degenerate levels under perturbation.

use std::f64::consts::PI;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

use crate::effham::{ising_effective_surface, BandedSym};
use crate::error::{invalid, Error, Result};
use crate::spectral::{eigh_dense_symmetric, eigh_tridiag};

type Big = FBig<HalfEven, 2>;

/// Significant decimal digits used by [`Precision::Auto`] when it switches to extended arithmetic.
pub const DEFAULT_DIGITS: u32 = 60;

/// Relative size below which a double-precision splitting is not trusted.
pub const DOUBLE_FLOOR: f64 = 1e-12;

/// Minimum number of perturbation strengths in a fit.
pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Double,
    Extended {
        digits: u32,
    },
    /// Double precision, switching to `DEFAULT_DIGITS` when the splitting drops below the double floor.
    Auto,
}

/// Which originally degenerate pair to follow: the `level`-th pair from the bottom,
/// i.e. ascending eigenvalue indices `2(level-1)` and `2(level-1)+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSelector {
    pub level: usize,
}

impl PairSelector {
    pub fn indices(&self) -> (usize, usize) {
        (2 * (self.level - 1), 2 * (self.level - 1) + 1)
    }
}

/// Fitted power law `splitting ∝ δ^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingFit {
    pub deltas: Vec<f64>,
    pub splittings: Vec<f64>,
    /// Whether each point was computed in extended precision.
    pub extended: Vec<bool>,
    pub fitted_order: f64,
    pub std_error: f64,
    pub predicted_order: usize,
}

/// First-order plateau levels `2(N+1) + 2δ cos(iπ/(P+1))`, `i = 1..=P`, with `P = (N-1)(N-2) - 2`.
pub fn plateau_spectrum(n: usize, delta: f64) -> Result<Vec<f64>> {
    if n < 4 {
        return Err(invalid(
            "N",
            format!("plateau is empty below N = 4, got {n}"),
        ));
    }
    let p = (n - 1) * (n - 2) - 2;
    let base = 2.0 * (n + 1) as f64;
    Ok((1..=p)
        .map(|i| base + 2.0 * delta * (i as f64 * PI / (p + 1) as f64).cos())
        .collect())
}

/// Largest deviation between [`plateau_spectrum`] and the eigenvalues of the
/// surface-energy chain closest to `2(N+1)`, both sorted.
pub fn plateau_deviation(n: usize, delta: f64) -> Result<f64> {
    let mut formula = plateau_spectrum(n, delta)?;
    formula.sort_by(f64::total_cmp);
    let s = eigh_tridiag(&ising_effective_surface(n, delta)?)?;
    let base = 2.0 * (n + 1) as f64;
    let mut near: Vec<f64> = s.eigenvalues.clone();
    near.sort_by(|a, b| (a - base).abs().total_cmp(&(b - base).abs()));
    near.truncate(formula.len());
    near.sort_by(f64::total_cmp);
    Ok(formula
        .iter()
        .zip(&near)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `⌈(M + 1 - 2i) / k⌉`: hops of range at most `k` needed to connect the pair `i`.
pub fn predicted_order(m: usize, i: usize, k: usize) -> Result<usize> {
    if i == 0 {
        return Err(invalid("i", "pair index starts at 1"));
    }
    if m < 2 * i {
        return Err(invalid("M", format!("need M >= 2i, got M = {m}, i = {i}")));
    }
    if k == 0 {
        return Err(invalid("k", "band width must be >= 1"));
    }
    Ok((m + 1 - 2 * i).div_ceil(k))
}

fn max_abs_entry(m: &BandedSym) -> f64 {
    m.max_abs().max(f64::MIN_POSITIVE)
}

fn double_eigenvalues(m: &BandedSym) -> Result<Vec<f64>> {
    if m.bandwidth() <= 1 {
        let off = m.bands().first().cloned().unwrap_or_default();
        let t = crate::effham::SymTridiag::new(m.diag().to_vec(), off)?;
        Ok(eigh_tridiag(&t)?.eigenvalues)
    } else {
        Ok(eigh_dense_symmetric(&m.to_dense())?.values)
    }
}

fn bits_for(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 16
}

fn big(x: f64, bits: usize) -> Big {
    Big::try_from(x)
        .expect("finite")
        .with_precision(bits)
        .value()
}

/// Number of eigenvalues of `m` strictly below `x`, from the inertia of a banded `LDLᵀ` of `m - x`.
fn count_below(diag: &[Big], bands: &[Vec<Big>], x: &Big, tiny: &Big, bits: usize) -> usize {
    let n = diag.len();
    let k = bands.len();
    let zero = big(0.0, bits);
    let entry = |i: usize, j: usize| -> &Big {
        // i > j, i - j <= k
        &bands[i - j - 1][j]
    };
    // l[i][i-j-1] = L_{i,j} for j in i-k..i
    let mut l: Vec<Vec<Big>> = vec![vec![zero.clone(); k]; n];
    let mut d: Vec<Big> = Vec::with_capacity(n);
    let mut negatives = 0;
    for j in 0..n {
        let lo = j.saturating_sub(k);
        let mut dj = &diag[j] - x;
        for p in lo..j {
            let ljp = &l[j][j - p - 1];
            dj -= &(ljp * ljp) * &d[p];
        }
        if dj == zero {
            dj = tiny.clone();
        }
        if dj < zero {
            negatives += 1;
        }
        for i in j + 1..(j + k + 1).min(n) {
            let mut s = entry(i, j).clone();
            for p in i.saturating_sub(k)..j {
                s -= &(&l[i][i - p - 1] * &l[j][j - p - 1]) * &d[p];
            }
            l[i][i - j - 1] = &s / &dj;
        }
        d.push(dj);
    }
    negatives
}

/// Ascending eigenvalues `indices` of `m` by bisection in `digits`-digit arithmetic,
/// each bracketed to a width of about `10^{-digits}` relative to the matrix scale.
/// Returns the midpoints and the bracket width.
fn eigenvalues_extended(m: &BandedSym, indices: &[usize], digits: u32) -> Result<(Vec<Big>, f64)> {
    if digits < 20 {
        return Err(invalid(
            "digits",
            format!("extended precision needs at least 20 digits, got {digits}"),
        ));
    }
    let n = m.dim();
    if let Some(&bad) = indices.iter().find(|&&j| j >= n) {
        return Err(Error::IndexOutOfRange {
            name: "eigenvalue index",
            index: bad,
            bound: n,
        });
    }
    let bits = bits_for(digits);
    let diag: Vec<Big> = m.diag().iter().map(|&x| big(x, bits)).collect();
    let bands: Vec<Vec<Big>> = m
        .bands()
        .iter()
        .map(|b| b.iter().map(|&x| big(x, bits)).collect())
        .collect();
    let scale = max_abs_entry(m);
    let radius = (0..n)
        .map(|i| {
            let row: f64 = (0..n).filter(|&j| j != i).map(|j| m.get(i, j).abs()).sum();
            m.diag()[i].abs() + row
        })
        .fold(0.0, f64::max);
    let width = scale * 10f64.powi(-(digits as i32));
    let tiny = big(scale * 2f64.powi(-(bits as i32)), bits);
    let half = big(0.5, bits);
    let mut out = Vec::with_capacity(indices.len());
    for &j in indices {
        let mut lo = big(-radius - 1.0, bits);
        let mut hi = big(radius + 1.0, bits);
        let w = big(width, bits);
        while &hi - &lo > w {
            let mid = &(&lo + &hi) * &half;
            if count_below(&diag, &bands, &mid, &tiny, bits) <= j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(&(&lo + &hi) * &half);
    }
    Ok((out, width))
}

/// `λ_b - λ_a` for one matrix, with the precision actually used.
pub fn pair_splitting(
    m: &BandedSym,
    pair: (usize, usize),
    precision: Precision,
    delta: f64,
) -> Result<(f64, bool)> {
    let scale = max_abs_entry(m);
    let extended = |digits: u32| -> Result<(f64, bool)> {
        let (vals, width) = eigenvalues_extended(m, &[pair.0, pair.1], digits)?;
        let split = (&vals[1] - &vals[0]).to_f64().value();
        let floor = 1e6 * width;
        if split < floor {
            return Err(Error::BelowPrecisionFloor { delta, floor });
        }
        Ok((split, true))
    };
    match precision {
        Precision::Extended { digits } => extended(digits),
        Precision::Double | Precision::Auto => {
            let vals = double_eigenvalues(m)?;
            let split = vals[pair.1] - vals[pair.0];
            if split >= DOUBLE_FLOOR * scale {
                Ok((split, false))
            } else if precision == Precision::Auto {
                extended(DEFAULT_DIGITS)
            } else {
                Err(Error::BelowPrecisionFloor {
                    delta,
                    floor: DOUBLE_FLOOR * scale,
                })
            }
        }
    }
}

/// Least-squares slope of `ln y` against `ln x` and its standard error.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch {
            context: "fit data",
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(invalid("fit", "need at least two points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(invalid("fit", "log-log fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("fit", "abscissae coincide"));
    }
    let slope = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (a - mx) * (b - my))
        .sum::<f64>()
        / sxx;
    let se = if lx.len() > 2 {
        let rss: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, se))
}

/// `n` logarithmically spaced points from `lo` to `hi`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Smallest separation between distinct unperturbed levels (clusters closer than
/// `1e-9` of the scale count as one level); `None` if the spectrum is a single level.
fn unperturbed_gap(values: &[f64], scale: f64) -> Option<f64> {
    let mut levels: Vec<f64> = Vec::new();
    for &v in values {
        match levels.last() {
            Some(&l) if v - l <= 1e-9 * scale => {}
            _ => levels.push(v),
        }
    }
    levels.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
}

/// Measures how the selected pair splits along `family(δ)` and fits the order.
///
/// The pair must be degenerate at `δ = 0` and every `δ` must lie in `(0, gap/10]`,
/// where `gap` separates the distinct unperturbed levels.
pub fn measure_splitting<F>(
    family: F,
    pair: PairSelector,
    deltas: &[f64],
    precision: Precision,
) -> Result<SplittingFit>
where
    F: Fn(f64) -> Result<BandedSym>,
{
    if pair.level == 0 {
        return Err(invalid("pair", "levels are numbered from 1"));
    }
    if deltas.len() < MIN_FIT_POINTS {
        return Err(invalid(
            "deltas",
            format!(
                "need at least {MIN_FIT_POINTS} values, got {}",
                deltas.len()
            ),
        ));
    }
    if deltas.windows(2).any(|w| !(w[1] > w[0])) || !(deltas[0] > 0.0) {
        return Err(invalid("deltas", "must be positive and strictly ascending"));
    }
    let base = family(0.0)?;
    let (a, b) = pair.indices();
    if b >= base.dim() {
        return Err(Error::IndexOutOfRange {
            name: "pair level",
            index: pair.level,
            bound: base.dim() / 2 + 1,
        });
    }
    let scale0 = max_abs_entry(&base);
    let vals0 = double_eigenvalues(&base)?;
    let gap0 = vals0[b] - vals0[a];
    if gap0 > 1e-12 * scale0 {
        return Err(Error::NotDegenerate(a, b, gap0));
    }
    if let Some(g) = unperturbed_gap(&vals0, scale0) {
        let top = *deltas.last().expect("nonempty");
        if top > g / 10.0 * (1.0 + 1e-12) {
            return Err(invalid(
                "deltas",
                format!("largest delta {top} exceeds gap/10 = {}", g / 10.0),
            ));
        }
    }
    let predicted = predicted_order(base.dim(), pair.level, base.bandwidth().max(1))?;
    let mut splittings = Vec::with_capacity(deltas.len());
    let mut extended = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let (s, ext) = pair_splitting(&family(d)?, (a, b), precision, d)?;
        if !(s > 0.0) {
            return Err(Error::BelowPrecisionFloor {
                delta: d,
                floor: 0.0,
            });
        }
        splittings.push(s);
        extended.push(ext);
    }
    let (fitted_order, std_error) = loglog_fit(deltas, &splittings)?;
    Ok(SplittingFit {
        deltas: deltas.to_vec(),
        splittings,
        extended,
        fitted_order,
        std_error,
        predicted_order: predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effham::toric_effective;

    fn surface(n: usize) -> impl Fn(f64) -> Result<BandedSym> {
        move |d| Ok(ising_effective_surface(n, d)?.to_banded())
    }

    #[test]
    fn plateau_formula() {
        let p = plateau_spectrum(4, 0.1).unwrap();
        assert_eq!(p.len(), 4);
        for (i, e) in p.iter().enumerate() {
            let want = 10.0 + 0.2 * ((i + 1) as f64 * PI / 5.0).cos();
            assert!((e - want).abs() < 1e-15);
        }
        assert!(plateau_spectrum(5, 0.0).unwrap().iter().all(|&e| e == 12.0));
        assert!(plateau_spectrum(3, 0.1).is_err());
    }

    #[test]
    fn predicted_orders() {
        assert_eq!(predicted_order(4, 1, 1).unwrap(), 3);
        assert_eq!(predicted_order(10, 1, 3).unwrap(), 3);
        assert_eq!(predicted_order(10, 2, 7).unwrap(), 1);
        assert!(predicted_order(3, 2, 1).is_err());
        assert!(predicted_order(4, 0, 1).is_err());
        assert!(predicted_order(4, 1, 0).is_err());
    }

    #[test]
    fn two_by_two_is_linear() {
        let fam = |d: f64| BandedSym::new(vec![0.0, 0.0], vec![vec![d]]);
        let fit = measure_splitting(
            fam,
            PairSelector { level: 1 },
            &log_spaced(0.01, 0.1, 5),
            Precision::Double,
        )
        .unwrap();
        assert!((fit.fitted_order - 1.0).abs() < 1e-12);
        for (d, s) in fit.deltas.iter().zip(&fit.splittings) {
            assert!((s - 2.0 * d).abs() < 1e-15);
        }
        assert_eq!(fit.predicted_order, 1);
    }

    #[test]
    fn ising_three_is_cubic() {
        let fit = measure_splitting(
            surface(3),
            PairSelector { level: 1 },
            &log_spaced(0.01, 0.1, 6),
            Precision::Auto,
        )
        .unwrap();
        assert_eq!(fit.predicted_order, 3);
        assert!((fit.fitted_order - 3.0).abs() < 0.1, "{}", fit.fitted_order);
    }

    #[test]
    fn extended_agrees_with_double_above_the_floor() {
        let m = ising_effective_surface(3, 0.1).unwrap().to_banded();
        let (d, ext_d) = pair_splitting(&m, (0, 1), Precision::Double, 0.1).unwrap();
        let (e, ext_e) =
            pair_splitting(&m, (0, 1), Precision::Extended { digits: 40 }, 0.1).unwrap();
        assert!(!ext_d && ext_e);
        assert!(((d - e) / e).abs() < 1e-6);
    }

    #[test]
    fn ising_four_needs_extended_precision() {
        let m = ising_effective_surface(4, 0.01).unwrap().to_banded();
        assert!(matches!(
            pair_splitting(&m, (0, 1), Precision::Double, 0.01),
            Err(Error::BelowPrecisionFloor { .. })
        ));
        let (s, ext) = pair_splitting(&m, (0, 1), Precision::Auto, 0.01).unwrap();
        assert!(ext);
        assert!(s > 1e-25 && s < 1e-20, "{s:e}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = log_spaced(0.01, 0.1, 5);
        assert!(measure_splitting(
            surface(3),
            PairSelector { level: 1 },
            &d[..4],
            Precision::Auto
        )
        .is_err());
        assert!(matches!(
            measure_splitting(
                surface(3),
                PairSelector { level: 1 },
                &log_spaced(0.1, 0.5, 5),
                Precision::Auto
            ),
            Err(Error::InvalidArgument { .. })
        ));
        let tilted = |d: f64| BandedSym::new(vec![0.0, 1.0], vec![vec![d]]);
        assert!(matches!(
            measure_splitting(tilted, PairSelector { level: 1 }, &d, Precision::Double),
            Err(Error::NotDegenerate(0, 1, _))
        ));
    }

    #[test]
    fn flat_chain_splits_linearly() {
        let fam = |d: f64| Ok(toric_effective(6, 1.0, d, &[0.5; 4], &[0.0; 5])?.to_banded());
        let fit = measure_splitting(
            fam,
            PairSelector { level: 1 },
            &log_spaced(0.01, 0.1, 5),
            Precision::Double,
        )
        .unwrap();
        assert!((fit.fitted_order - 1.0).abs() < 0.05);
    }
}
