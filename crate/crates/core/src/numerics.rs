//! Numeric kernel shared by the solvers: dense complex matrices with a
//! Cholesky-based Hermitian solver, uniform-grid quadrature, a damped
//! fixed-point driver and bracketed scalar root finders.

use std::f64::consts::PI;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major storage.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Diagonal matrix from real entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Outer product `u v^H`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[Complex64]) {
        assert_eq!(values.len(), self.rows, "column length mismatch");
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^H * self`, exploiting Hermitian symmetry of the result.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.cols;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.rows {
                    acc += self.data[k * n + i].conj() * self.data[k * n + j];
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |M - M^H|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian within `1e-12 * max|M|`.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= 1e-12 * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// Copy with row and column `k` removed.
    pub fn without_index(&self, k: usize) -> ComplexMatrix {
        assert!(self.is_square());
        let n = self.rows;
        ComplexMatrix::from_fn(n - 1, n - 1, |i, j| {
            let ii = if i < k { i } else { i + 1 };
            let jj = if j < k { j } else { j + 1 };
            self[(ii, jj)]
        })
    }

    /// Copy with column `k` removed.
    pub fn without_column(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols - 1, |i, j| {
            self[(i, if j < k { j } else { j + 1 })]
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Cholesky factor `A = L L^H` of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // lower triangle, row-major
    l: Vec<Complex64>,
}

impl Cholesky {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Cholesky of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { row: j, pivot: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for a {}x{} system",
                b.len(),
                n,
                n
            )));
        }
        // L y = b
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
        }
        // L^H x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i].conj() * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
        }
        Ok(y)
    }

    /// Diagonal of `A^{-1}`, each entry obtained as `||L^{-1} e_k||^2`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n);
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            let mut acc = 0.0;
            for i in k..n {
                let mut s = if i == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                for m in k..i {
                    s -= self.l[i * n + m] * y[m];
                }
                y[i] = s / self.l[i * n + i].re;
                acc += y[i].norm_sqr();
            }
            out.push(acc);
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e).expect("dimension checked");
            inv.set_column(j, &col);
        }
        inv
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let scale = a.max_abs();
    if a.hermitian_deviation() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
    }
    Ok(())
}

/// Solves `A x = b` for Hermitian positive-definite `A`.
pub fn hermitian_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    check_hermitian(a)?;
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but right-hand side has length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    Cholesky::factor(a)?.solve(b)
}

/// Inverse of a Hermitian positive-definite matrix.
pub fn hermitian_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(a)?;
    let mut inv = Cholesky::factor(a)?.inverse();
    // symmetrize away rounding
    let n = inv.rows();
    for i in 0..n {
        inv[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (inv[(i, j)] + inv[(j, i)].conj()) * 0.5;
            inv[(i, j)] = avg;
            inv[(j, i)] = avg.conj();
        }
    }
    Ok(inv)
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `u^H v`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Quadratic form `v^H M v`, real part (M Hermitian).
pub fn quadratic_form(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    inner(v, &m.mul_vec(v)).re
}

/// Trapezoidal rule on uniformly spaced samples that include both endpoints.
pub fn integrate_uniform<T>(samples: &[T], spacing: f64) -> Result<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    if samples.len() < 2 {
        return Err(Error::EmptyGrid {
            needed: 2,
            got: samples.len(),
        });
    }
    let n = samples.len();
    let interior = samples[1..n - 1]
        .iter()
        .fold(T::default(), |acc, &x| acc + x);
    Ok((interior + (samples[0] + samples[n - 1]) * 0.5) * spacing)
}

/// Uniform midpoint grid of normalized angular frequencies on (-pi, pi]:
/// `Omega_m = -pi + (m + 1/2) * dOmega`, `dOmega = 2 pi / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    spacing: f64,
}

impl FrequencyGrid {
    pub fn new(count: usize) -> Result<Self> {
        if count < 2 || count % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "frequency grid size must be even and at least 2, got {count}"
            )));
        }
        let spacing = 2.0 * PI / count as f64;
        let points = (0..count)
            .map(|m| -PI + (m as f64 + 0.5) * spacing)
            .collect();
        Ok(Self { points, spacing })
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Midpoint-rule integral over (-pi, pi] of samples taken on this grid.
    /// Exact for trigonometric polynomials of degree below `M`.
    pub fn integrate<T>(&self, samples: &[T]) -> Result<T>
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    {
        if samples.len() != self.count() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples on a {}-point grid",
                samples.len(),
                self.count()
            )));
        }
        Ok(samples.iter().fold(T::default(), |acc, &x| acc + x) * self.spacing)
    }
}

/// Maps an angle into (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x % two_pi;
    if y <= -PI {
        y += two_pi;
    } else if y > PI {
        y -= two_pi;
    }
    y
}

/// Outcome of a fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub damping_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            damping: 1.0,
        }
    }
}

impl FixedPointOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// State space of [`fixed_point`].
pub trait FixedPointState: Clone {
    /// `(1 - d) * self + d * target`.
    fn relax(&self, target: &Self, damping: f64) -> Self;
    /// Sup-norm distance.
    fn sup_distance(&self, other: &Self) -> f64;
    fn all_finite(&self) -> bool;
}

impl FixedPointState for f64 {
    fn relax(&self, target: &Self, d: f64) -> Self {
        (1.0 - d) * self + d * target
    }

    fn sup_distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl FixedPointState for Vec<f64> {
    fn relax(&self, target: &Self, d: f64) -> Self {
        self.iter()
            .zip(target)
            .map(|(a, b)| (1.0 - d) * a + d * b)
            .collect()
    }

    fn sup_distance(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

const MIN_DAMPING: f64 = 1.0 / 1024.0;

/// Damped fixed-point iteration `x <- (1 - d) x + d map(x)`.
///
/// Stops once the sup-norm residual `|map(x) - x|` drops to `tol` and
/// returns the last map output. The damping factor is halved whenever the
/// residual grows. Running out of iterations is not an error: the report
/// carries `converged = false`.
pub fn fixed_point<S, F>(mut map: F, init: S, opts: FixedPointOptions) -> Result<(S, FixedPointReport)>
where
    S: FixedPointState,
    F: FnMut(&S) -> Result<S>,
{
    opts.validate()?;
    let mut x = init;
    if !x.all_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    let mut damping = opts.damping;
    let mut prev = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let y = map(&x)?;
        if !y.all_finite() {
            return Err(Error::Divergence { iteration: it });
        }
        residual = x.sup_distance(&y);
        if !residual.is_finite() {
            return Err(Error::Divergence { iteration: it });
        }
        if residual <= opts.tol {
            return Ok((
                y,
                FixedPointReport {
                    iterations: it,
                    final_residual: residual,
                    converged: true,
                    damping_used: damping,
                },
            ));
        }
        if residual > prev {
            damping = (damping * 0.5).max(MIN_DAMPING);
        }
        prev = residual;
        x = x.relax(&y, damping);
    }
    Ok((
        x,
        FixedPointReport {
            iterations: opts.max_iter,
            final_residual: residual,
            converged: false,
            damping_used: damping,
        },
    ))
}

fn bracket_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<()> {
    if !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "non-finite function value at bracket ends ({f_lo}, {f_hi})"
        )));
    }
    if f_lo * f_hi > 0.0 {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    Ok(())
}

/// Bisection for a sign change of `f` on `[lo, hi]`; the returned point is
/// within `tol` of a root.
pub fn bisect(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "bisection needs lo <= hi and tol > 0 (lo={lo}, hi={hi}, tol={tol})"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    bracket_values(a, b, fa, fb)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        if 0.5 * (b - a) <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite function value at {mid}")));
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Illinois-modified regula falsi on a sign-changing bracket. Converges
/// superlinearly on smooth monotone functions; terminates when the bracket
/// is narrower than `xtol`.
pub fn regula_falsi(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    if !(xtol > 0.0) || !(lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "regula falsi needs lo <= hi and xtol > 0 (lo={lo}, hi={hi}, xtol={xtol})"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    bracket_values(a, b, fa, fb)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut side = 0i8;
    let mut c = 0.5 * (a + b);
    for _ in 0..500 {
        if (b - a).abs() <= xtol {
            break;
        }
        c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if !fc.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite function value at {c}")));
        }
        if fc == 0.0 {
            return Ok(c);
        }
        if (fc < 0.0) == (fb < 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(c)
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
