//! Complex-matrix kernels: quadratic forms, norms, eigen extraction, linear
//! solves.
//!
//! All operations are pure and reentrant. Matrices are dense, row-major
//! [`Complex64`]. The eigen routines are power iterations with a
//! Rayleigh-quotient value; the linear solve is a Cholesky-style direct solve
//! for Hermitian positive definite systems. General nonsymmetric
//! eigendecomposition, sparse formats and arbitrary precision are out of
//! scope.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Relative Frobenius tolerance for Hermitian-ness checks. Inputs are formed
/// from products of measured channels, so exact bitwise symmetry is not
/// guaranteed.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A dense complex matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating the shape and that
    /// every entry is finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch {
                op: "ComplexMatrix::new",
                details: format!("matrix dimensions must be positive, got {rows}x{cols}"),
            });
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "ComplexMatrix::new",
                details: format!(
                    "expected {} entries for {rows}x{cols}, got {}",
                    rows * cols,
                    entries.len()
                ),
            });
        }
        let m = Self { rows, cols, entries };
        if !m.is_finite() {
            return Err(Error::NonFinite {
                op: "ComplexMatrix::new",
            });
        }
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Builds a matrix entry by entry from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    /// Column vector from a slice.
    pub fn column_from(entries: &[Complex64]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            entries: entries.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_column(&self) -> bool {
        self.cols == 1
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖A − Aᴴ‖_F ≤ tol·‖A‖_F` (always true for the zero matrix).
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let mut diff = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let d = self[(r, c)] - self[(c, r)].conj();
                diff += d.norm_sqr();
            }
        }
        let norm = self.frobenius_norm();
        diff.sqrt() <= rel_tol * norm.max(f64::MIN_POSITIVE)
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                details: format!(
                    "{}x{} times {}x{}",
                    self.rows, self.cols, rhs.rows, rhs.cols
                ),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &Self,
        op: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                op: "elementwise",
                details: format!(
                    "{op}: {}x{} vs {}x{}",
                    self.rows, self.cols, rhs.rows, rhs.cols
                ),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Extracts column `c` as a column vector.
    pub fn column(&self, c: usize) -> Self {
        Self::from_fn(self.rows, 1, |r, _| self[(r, c)])
    }

    /// Replaces column `c` with the given column vector.
    pub fn set_column(&mut self, c: usize, col: &Self) {
        debug_assert_eq!(col.rows, self.rows);
        debug_assert!(col.is_column());
        for r in 0..self.rows {
            self[(r, c)] = col[(r, 0)];
        }
    }

    /// Inner product `selfᴴ · rhs` for column vectors.
    pub fn dot(&self, rhs: &Self) -> Complex64 {
        debug_assert_eq!(self.shape(), rhs.shape());
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Outer product `self · selfᴴ` for a column vector.
    pub fn outer(&self) -> Self {
        debug_assert!(self.is_column());
        Self::from_fn(self.rows, self.rows, |r, c| {
            self[(r, 0)] * self[(c, 0)].conj()
        })
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.cols + c]
    }
}

/// Unit eigenvector plus real eigenvalue from a power-iteration solve.
///
/// `degenerate` is set when the spectrum ties at the top within tolerance; the
/// returned pair is still valid (callers only need the value and one valid
/// direction).
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub vector: ComplexMatrix,
    pub value: f64,
    pub degenerate: bool,
}

/// Real part of `wᴴ R w` for a Hermitian `R`.
///
/// For PSD `R` the result is nonnegative up to roundoff
/// (`≥ −1e-12·‖R‖·‖w‖²`).
pub fn herm_quadratic_form(w: &ComplexMatrix, r: &ComplexMatrix) -> Result<f64> {
    if !w.is_column() || !r.is_square() || r.rows() != w.rows() {
        return Err(Error::DimensionMismatch {
            op: "herm_quadratic_form",
            details: format!(
                "w is {}x{}, R is {}x{}",
                w.rows(),
                w.cols(),
                r.rows(),
                r.cols()
            ),
        });
    }
    if !w.is_finite() || !r.is_finite() {
        return Err(Error::NonFinite {
            op: "herm_quadratic_form",
        });
    }
    if !r.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            op: "herm_quadratic_form",
            tol: HERMITIAN_TOL,
        });
    }
    let mut acc = Complex64::ZERO;
    for i in 0..r.rows() {
        for j in 0..r.cols() {
            acc += w[(i, 0)].conj() * r[(i, j)] * w[(j, 0)];
        }
    }
    Ok(acc.re)
}

/// `Re(wᴴ R w)` without contract checks, for evaluator hot paths. Callers
/// guarantee shapes and Hermitian-ness (validated once at scenario
/// construction).
pub(crate) fn quad_form_unchecked(w: &ComplexMatrix, r: &ComplexMatrix) -> f64 {
    debug_assert!(w.is_column() && r.is_square() && r.rows() == w.rows());
    let n = r.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (w[(i, 0)].conj() * r[(i, j)] * w[(j, 0)]).re;
        }
    }
    acc
}

/// Frobenius distance `‖A − B‖_F`. Symmetric, zero iff `A == B`.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op: "frobenius_distance",
            details: format!(
                "{}x{} vs {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            ),
        });
    }
    let sum: f64 = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(&x, &y)| (x - y).norm_sqr())
        .sum();
    Ok(sum.sqrt())
}

/// Dominant eigenpair of a square matrix by power iteration.
///
/// Requires a real dominant eigenvalue separated from the rest; this holds at
/// every call site (products of a Hermitian positive definite matrix with a
/// Hermitian PSD one, whose spectra are real and nonnegative). The iteration
/// starts from the normalized all-ones vector for reproducibility and is
/// perturbed by a fixed-seed draw only on stagnation. Converged when
/// `‖Mv − λv‖ ≤ tol·‖M‖_F`.
pub fn dominant_eigvec(m: &ComplexMatrix, tol: f64, max_iter: usize) -> Result<EigenResult> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            op: "dominant_eigvec",
            details: format!("matrix is {}x{}", m.rows(), m.cols()),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite {
            op: "dominant_eigvec",
        });
    }
    power_iteration(m, tol, max_iter)
}

/// Largest eigenvalue and principal unit eigenvector of a Hermitian matrix.
///
/// A spectral shift by `‖M‖_F` is applied internally so the power iteration
/// targets the rightmost eigenvalue even for indefinite input; the residual
/// contract is checked on the original matrix.
pub fn max_eig_hermitian(m: &ComplexMatrix) -> Result<EigenResult> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            op: "max_eig_hermitian",
            details: format!("matrix is {}x{}", m.rows(), m.cols()),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite {
            op: "max_eig_hermitian",
        });
    }
    if !m.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            op: "max_eig_hermitian",
            tol: HERMITIAN_TOL,
        });
    }
    let n = m.rows();
    let shift = m.frobenius_norm();
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] += Complex64::new(shift, 0.0);
    }
    let mut res = power_iteration(&shifted, 1e-12, 4000)?;
    // Rayleigh value on the original matrix; residual re-checked there too.
    let mv = m.matmul(&res.vector)?;
    let value = res.vector.dot(&mv).re;
    let resid = frobenius_distance(&mv, &res.vector.scale_real(value))?;
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    if resid > 1e-8 * scale {
        return Err(Error::IterationLimit {
            iterations: 4000,
            residual: resid,
        });
    }
    res.value = value;
    Ok(res)
}

fn power_iteration(m: &ComplexMatrix, tol: f64, max_iter: usize) -> Result<EigenResult> {
    let n = m.rows();
    let m_norm = m.frobenius_norm();
    let start = ComplexMatrix::from_fn(n, 1, |_, _| {
        Complex64::new(1.0 / (n as f64).sqrt(), 0.0)
    });

    // λI within tolerance: every unit vector is an eigenvector.
    let lam0 = m[(0, 0)].re;
    let mut as_scalar = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        as_scalar[(i, i)] = Complex64::new(lam0, 0.0);
    }
    if frobenius_distance(m, &as_scalar)? <= tol.max(1e-12) * m_norm.max(f64::MIN_POSITIVE) {
        return Ok(EigenResult {
            vector: start,
            value: lam0,
            degenerate: true,
        });
    }

    let mut v = start;
    let mut last_residual = f64::INFINITY;
    let mut perturbed = false;
    for it in 0..max_iter {
        let mv = m.matmul(&v)?;
        let value = v.dot(&mv).re;
        let residual = frobenius_distance(&mv, &v.scale_real(value))?;
        if residual <= tol * m_norm.max(f64::MIN_POSITIVE) {
            let degenerate = is_top_degenerate(m, &v, value);
            return Ok(EigenResult {
                vector: v,
                value,
                degenerate,
            });
        }
        // No progress midway through the budget: the start vector may be
        // nearly orthogonal to the dominant eigenspace.
        if !perturbed && it == max_iter / 2 && residual > 0.9 * last_residual {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
            let noise = ComplexMatrix::from_fn(n, 1, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let perturbed_v = v.add(&noise.scale_real(0.1))?;
            v = perturbed_v.scale_real(1.0 / perturbed_v.frobenius_norm());
            perturbed = true;
            last_residual = residual;
            continue;
        }
        last_residual = residual;
        let norm = mv.frobenius_norm();
        if norm <= f64::MIN_POSITIVE {
            // v is in the null space; restart from a perturbed vector.
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d ^ it as u64);
            v = ComplexMatrix::from_fn(n, 1, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let vn = v.frobenius_norm();
            v = v.scale_real(1.0 / vn);
            continue;
        }
        v = mv.scale_real(1.0 / norm);
    }
    Err(Error::IterationLimit {
        iterations: max_iter,
        residual: last_residual,
    })
}

/// Cheap tie detection: one deflated matvec pass estimating the second
/// eigenvalue. Only meaningful for (near-)Hermitian input, which covers the
/// call sites that care about the flag.
fn is_top_degenerate(m: &ComplexMatrix, v: &ComplexMatrix, value: f64) -> bool {
    let n = m.rows();
    if n < 2 {
        return false;
    }
    let deflated = match m.sub(&v.outer().scale_real(value)) {
        Ok(d) => d,
        Err(_) => return false,
    };
    let mut w = ComplexMatrix::from_fn(n, 1, |r, _| {
        Complex64::new(1.0 / ((r + 2) as f64), -0.3 / ((r + 1) as f64))
    });
    // Orthogonalize against v, then a few iterations to estimate λ₂.
    for _ in 0..60 {
        let proj = v.dot(&w);
        w = match w.sub(&v.scale(proj)) {
            Ok(x) => x,
            Err(_) => return false,
        };
        let norm = w.frobenius_norm();
        if norm <= f64::MIN_POSITIVE {
            return false;
        }
        w = w.scale_real(1.0 / norm);
        w = match deflated.matmul(&w) {
            Ok(x) => x,
            Err(_) => return false,
        };
    }
    let norm = w.frobenius_norm();
    if norm <= f64::MIN_POSITIVE {
        return false;
    }
    w = w.scale_real(1.0 / norm);
    let second = match deflated.matmul(&w) {
        Ok(mw) => w.dot(&mw).re,
        Err(_) => return false,
    };
    let scale = value.abs().max(m.frobenius_norm()).max(f64::MIN_POSITIVE);
    (value - second).abs() <= 1e-8 * scale
}

/// Complex Cholesky factor `L` with `Q = L·Lᴴ`.
pub(crate) fn cholesky(q: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = q.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = q[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = q[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `Q x = b` for Hermitian positive definite `Q` by Cholesky
/// factorization. Residual `‖Qx − b‖ ≤ 1e-10·‖b‖` for well-conditioned
/// systems.
pub fn solve_hpd(q: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !q.is_square() || !b.is_column() || q.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            op: "solve_hpd",
            details: format!(
                "Q is {}x{}, b is {}x{}",
                q.rows(),
                q.cols(),
                b.rows(),
                b.cols()
            ),
        });
    }
    if !q.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            op: "solve_hpd",
            tol: HERMITIAN_TOL,
        });
    }
    let n = q.rows();
    let l = cholesky(q)?;
    // Forward solve L y = b.
    let mut y = vec![Complex64::ZERO; n];
    for i in 0..n {
        let mut s = b[(i, 0)];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    // Backward solve Lᴴ x = y.
    let mut x = vec![Complex64::ZERO; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Ok(ComplexMatrix::column_from(&x))
}

/// Whether `m` is PSD within `m + tol·‖m‖·I` admitting a Cholesky factor.
pub fn is_psd_within(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_square() || !m.is_hermitian(HERMITIAN_TOL) {
        return false;
    }
    let n = m.rows();
    let ridge = tol * m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] += Complex64::new(ridge, 0.0);
    }
    cholesky(&shifted).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n, n);
        a.add(&a.hermitian()).unwrap().scale_real(0.5)
    }

    fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n, n);
        let mut m = a.matmul(&a.hermitian()).unwrap();
        for i in 0..n {
            m[(i, i)] += c(0.5, 0.0);
        }
        m
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n, n);
        a.matmul(&a.hermitian()).unwrap()
    }

    fn to_na(m: &ComplexMatrix) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
    }

    #[test]
    fn quadratic_form_identity_case() {
        let w = ComplexMatrix::column_from(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let r = ComplexMatrix::identity(2);
        assert_eq!(herm_quadratic_form(&w, &r).unwrap(), 1.0);
    }

    #[test]
    fn quadratic_form_diagonal_expansion() {
        let w = ComplexMatrix::column_from(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let r = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)])
            .unwrap();
        assert!((herm_quadratic_form(&w, &r).unwrap() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_form_matches_trace_identity_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let w = random_matrix(&mut rng, 4, 1);
            let r = random_psd(&mut rng, 4);
            // Oracle: Re Tr(R wwᴴ), evaluated by explicit trace summation.
            let wwh = w.outer();
            let prod = r.matmul(&wwh).unwrap();
            let mut tr = Complex64::ZERO;
            for i in 0..4 {
                tr += prod[(i, i)];
            }
            let got = herm_quadratic_form(&w, &r).unwrap();
            assert!((got - tr.re).abs() <= 1e-12 * (1.0 + tr.re.abs()));
        }
    }

    #[test]
    fn quadratic_form_rejects_bad_inputs() {
        let w = ComplexMatrix::column_from(&[c(1.0, 0.0)]);
        let r = ComplexMatrix::identity(2);
        assert!(matches!(
            herm_quadratic_form(&w, &r),
            Err(Error::DimensionMismatch { .. })
        ));
        let non_herm =
            ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
                .unwrap();
        let w2 = ComplexMatrix::column_from(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            herm_quadratic_form(&w2, &non_herm),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn quadratic_form_equals_channel_gain() {
        // wᴴ(hhᴴ)w = |hᴴw|².
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let w = random_matrix(&mut rng, 3, 1);
            let h = random_matrix(&mut rng, 3, 1);
            let lhs = herm_quadratic_form(&w, &h.outer()).unwrap();
            let rhs = h.dot(&w).norm_sqr();
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn frobenius_distance_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 3, 2);
        assert_eq!(frobenius_distance(&a, &a).unwrap(), 0.0);

        let e = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let z = ComplexMatrix::zeros(2, 2);
        assert_eq!(frobenius_distance(&e, &z).unwrap(), 1.0);

        let b = random_matrix(&mut rng, 3, 2);
        // Oracle: direct elementwise summation.
        let mut sum = 0.0;
        for r in 0..3 {
            for col in 0..2 {
                sum += (a[(r, col)] - b[(r, col)]).norm_sqr();
            }
        }
        assert!((frobenius_distance(&a, &b).unwrap() - sum.sqrt()).abs() < 1e-12);
        assert!(matches!(
            frobenius_distance(&a, &ComplexMatrix::zeros(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn frobenius_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = random_matrix(&mut rng, 3, 3);
            let b = random_matrix(&mut rng, 3, 3);
            let m = random_matrix(&mut rng, 3, 3);
            let ab = frobenius_distance(&a, &b).unwrap();
            let am = frobenius_distance(&a, &m).unwrap();
            let mb = frobenius_distance(&m, &b).unwrap();
            assert!(ab <= am + mb + 1e-12);
        }
    }

    #[test]
    fn dominant_eigvec_diagonal() {
        let m = ComplexMatrix::new(2, 2, vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let res = dominant_eigvec(&m, 1e-12, 500).unwrap();
        assert!((res.value - 3.0).abs() < 1e-10);
        assert!((res.vector[(0, 0)].norm() - 1.0).abs() < 1e-8);
        assert!(res.vector[(1, 0)].norm() < 1e-6);
    }

    #[test]
    fn dominant_eigvec_identity_is_degenerate() {
        let res = dominant_eigvec(&ComplexMatrix::identity(2), 1e-12, 100).unwrap();
        assert!((res.value - 1.0).abs() < 1e-12);
        assert!(res.degenerate);
        assert!((res.vector.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dominant_eigvec_matches_dense_oracle_on_hpd_psd_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let p = random_hpd(&mut rng, 4);
            let s = random_psd(&mut rng, 4);
            let m = p.matmul(&s).unwrap();
            let res = dominant_eigvec(&m, 1e-11, 5000).unwrap();

            // Oracle: eigenvalues of P·S equal those of the Hermitian
            // Lᴴ·S·L with P = L·Lᴴ, via nalgebra's dense solver.
            let l = to_na(&cholesky(&p).unwrap());
            let sn = to_na(&s);
            let herm = l.adjoint() * sn * &l;
            let eig = nalgebra::SymmetricEigen::new(herm);
            let max = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
            assert!(
                (res.value - max).abs() <= 1e-8 * max.abs().max(1.0),
                "power iteration {} vs oracle {}",
                res.value,
                max
            );
        }
    }

    #[test]
    fn max_eig_diagonal_and_rank_one() {
        let m = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)])
            .unwrap();
        let res = max_eig_hermitian(&m).unwrap();
        assert!((res.value - 5.0).abs() < 1e-9);
        assert!((res.vector[(1, 0)].norm() - 1.0).abs() < 1e-8);

        let v = ComplexMatrix::column_from(&[c(1.0, 0.5), c(-0.3, 2.0), c(0.7, 0.0)]);
        let res = max_eig_hermitian(&v.outer()).unwrap();
        let norm2 = v.frobenius_norm().powi(2);
        assert!((res.value - norm2).abs() < 1e-9 * norm2);
        // Up to phase: |v̂ᴴu| = 1.
        let unit = v.scale_real(1.0 / v.frobenius_norm());
        assert!((unit.dot(&res.vector).norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn max_eig_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let m = random_hermitian(&mut rng, 5);
            let res = max_eig_hermitian(&m).unwrap();
            let eig = nalgebra::SymmetricEigen::new(to_na(&m));
            let max = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
            assert!(
                (res.value - max).abs() <= 1e-8 * max.abs().max(1.0),
                "got {} oracle {}",
                res.value,
                max
            );
        }
    }

    #[test]
    fn dominant_agrees_with_max_eig_on_hermitian_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let m = random_psd(&mut rng, 4);
            let a = dominant_eigvec(&m, 1e-11, 5000).unwrap();
            let b = max_eig_hermitian(&m).unwrap();
            assert!((a.value - b.value).abs() <= 1e-8 * b.value.abs().max(1.0));
        }
    }

    #[test]
    fn solve_hpd_trivial_and_residual() {
        let b = ComplexMatrix::column_from(&[c(1.0, 2.0), c(-0.5, 0.3)]);
        let x = solve_hpd(&ComplexMatrix::identity(2), &b).unwrap();
        assert!(frobenius_distance(&x, &b).unwrap() < 1e-14);

        let q = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        let rhs = ComplexMatrix::column_from(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let x = solve_hpd(&q, &rhs).unwrap();
        assert!((x[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((x[(1, 0)] - c(1.0, 0.0)).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let q = random_hpd(&mut rng, 6);
            let b = random_matrix(&mut rng, 6, 1);
            let x = solve_hpd(&q, &b).unwrap();
            let resid = frobenius_distance(&q.matmul(&x).unwrap(), &b).unwrap();
            assert!(resid <= 1e-10 * b.frobenius_norm());
        }
    }

    #[test]
    fn solve_hpd_rejects_indefinite() {
        let q = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
            .unwrap();
        let b = ComplexMatrix::column_from(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            solve_hpd(&q, &b),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn matrix_constructor_contracts() {
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(1, 2, vec![c(1.0, 0.0)]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_complex() -> impl Strategy<Value = Complex64> {
            (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn quad_form_equals_gain(
                ws in prop::collection::vec(small_complex(), 3),
                hs in prop::collection::vec(small_complex(), 3),
            ) {
                let w = ComplexMatrix::column_from(&ws);
                let h = ComplexMatrix::column_from(&hs);
                let lhs = herm_quadratic_form(&w, &h.outer()).unwrap();
                let rhs = h.dot(&w).norm_sqr();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
            }

            #[test]
            fn frobenius_symmetry_and_triangle(
                xs in prop::collection::vec(small_complex(), 6),
                ys in prop::collection::vec(small_complex(), 6),
                zs in prop::collection::vec(small_complex(), 6),
            ) {
                let a = ComplexMatrix::new(3, 2, xs).unwrap();
                let b = ComplexMatrix::new(3, 2, ys).unwrap();
                let m = ComplexMatrix::new(3, 2, zs).unwrap();
                let ab = frobenius_distance(&a, &b).unwrap();
                let ba = frobenius_distance(&b, &a).unwrap();
                prop_assert!((ab - ba).abs() < 1e-15);
                let am = frobenius_distance(&a, &m).unwrap();
                let mb = frobenius_distance(&m, &b).unwrap();
                prop_assert!(ab <= am + mb + 1e-12);
            }
        }
    }
}
