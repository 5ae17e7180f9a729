//! Dense complex linear algebra sized for receiver work.
//!
//! Filter lengths here are a few tens of taps, so everything is a direct
//! method on row-major storage: partial-pivot LU for general solves and
//! inversion, Cholesky for Hermitian positive definite systems.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

pub type C64 = Complex64;

/// Hermitian inner product; conjugates the first argument.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[C64]) -> f64 {
    libm::sqrt(a.iter().map(|x| x.norm_sqr()).sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("matrix is not positive definite (pivot {pivot} at column {col})")]
    NotPositiveDefinite { col: usize, pivot: f64 },
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Flat row-major view of all entries.
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&mut self, a: f64) {
        for x in &mut self.data {
            *x *= a;
        }
    }

    pub fn add_assign(&mut self, other: &CMat) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += y;
        }
    }

    /// `self += alpha * u * v^H`.
    pub fn add_outer(&mut self, alpha: f64, u: &[C64], v: &[C64]) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for r in 0..self.rows {
            let au = alpha * u[r];
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (x, y) in row.iter_mut().zip(v) {
                *x += au * y.conj();
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `self * x` into a caller-owned buffer, for per-sample loops that
    /// must not allocate.
    pub fn matvec_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, r) in out.iter_mut().zip(0..self.rows) {
            *o = self.row(r).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `self^H * x`.
    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![C64::ZERO; self.cols];
        for r in 0..self.rows {
            let xr = x[r];
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * xr;
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == C64::ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let row = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (x, b) in row.iter_mut().zip(orow) {
                    *x += a * b;
                }
            }
        }
        out
    }

    /// Replaces the matrix by its Hermitian part `(A + A^H) / 2`.
    pub fn hermitize(&mut self) {
        debug_assert_eq!(self.rows, self.cols);
        for r in 0..self.rows {
            for c in r..self.cols {
                let m = 0.5 * (self[(r, c)] + self[(c, r)].conj());
                self[(r, c)] = m;
                self[(c, r)] = m.conj();
            }
        }
    }

    /// Largest absolute asymmetry `max |A - A^H|`, for Hermitian checks.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x.norm_sqr()).sum::<f64>())
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= y;
        }
        out
    }

    /// `x^H A x`; real part only, which is exact for Hermitian `A`.
    pub fn quadratic_form(&self, x: &[C64]) -> f64 {
        dot(x, &self.matvec(x)).re
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMat) -> C64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut t = C64::ZERO;
        for r in 0..self.rows {
            for k in 0..self.cols {
                t += self[(r, k)] * other[(k, r)];
            }
        }
        t
    }

    /// Solves `A x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
        let lu = LuFactors::new(self)?;
        Ok(lu.solve(b))
    }

    pub fn inverse(&self) -> Result<CMat, LinalgError> {
        debug_assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let lu = LuFactors::new(self)?;
        let mut out = CMat::zeros(n, n);
        let mut e = vec![C64::ZERO; n];
        for c in 0..n {
            e[c] = C64::ONE;
            let col = lu.solve(&e);
            e[c] = C64::ZERO;
            for r in 0..n {
                out[(r, c)] = col[r];
            }
        }
        Ok(out)
    }

    /// Solves `A x = b` for Hermitian positive definite `A` via Cholesky.
    pub fn solve_hpd(&self, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
        Ok(Cholesky::new(self)?.solve(b))
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl core::fmt::Debug for CMat {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

struct LuFactors {
    n: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
}

impl LuFactors {
    fn new(a: &CMat) -> Result<Self, LinalgError> {
        debug_assert_eq!(a.rows, a.cols);
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for r in k + 1..n {
                let v = lu[r * n + k].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(LinalgError::Singular);
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for r in k + 1..n {
                let m = lu[r * n + k] / pivot;
                lu[r * n + k] = m;
                for c in k + 1..n {
                    let u = lu[k * n + c];
                    lu[r * n + c] -= m * u;
                }
            }
        }
        Ok(LuFactors { n, lu, piv })
    }

    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        for r in 1..n {
            for c in 0..r {
                let l = self.lu[r * n + c];
                let xc = x[c];
                x[r] -= l * xc;
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                let u = self.lu[r * n + c];
                let xc = x[c];
                x[r] -= u * xc;
            }
            x[r] /= self.lu[r * n + r];
        }
        x
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix.
pub struct Cholesky {
    n: usize,
    l: Vec<C64>,
}

impl Cholesky {
    pub fn new(a: &CMat) -> Result<Self, LinalgError> {
        debug_assert_eq!(a.rows, a.cols);
        let n = a.rows;
        let mut l = vec![C64::ZERO; n * n];
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) {
                return Err(LinalgError::NotPositiveDefinite { col: j, pivot: d });
            }
            let dj = libm::sqrt(d);
            l[j * n + j] = C64::new(dj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / dj;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x = b.to_vec();
        for r in 0..n {
            for c in 0..r {
                let l = self.l[r * n + c];
                let xc = x[c];
                x[r] -= l * xc;
            }
            x[r] /= self.l[r * n + r];
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                let l = self.l[c * n + r].conj();
                let xc = x[c];
                x[r] -= l * xc;
            }
            x[r] /= self.l[r * n + r];
        }
        x
    }
}

/// Smallest eigenvalue of a Hermitian positive definite matrix, by inverse
/// power iteration. Iterates until the Rayleigh quotient settles.
pub fn min_eigenvalue_hpd(a: &CMat, tol: f64, max_iter: usize) -> Result<f64, LinalgError> {
    let n = a.rows();
    let chol = Cholesky::new(a)?;
    let mut v = vec![C64::new(1.0, 0.0); n];
    let s = 1.0 / norm(&v);
    for x in &mut v {
        *x *= s;
    }
    let mut prev = f64::INFINITY;
    for _ in 0..max_iter {
        let w = chol.solve(&v);
        let s = 1.0 / norm(&w);
        v = w;
        for x in &mut v {
            *x *= s;
        }
        let lam = a.quadratic_form(&v);
        if (lam - prev).abs() <= tol * lam.abs() {
            return Ok(lam);
        }
        prev = lam;
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        let mut a = CMat::zeros(n, n);
        for _ in 0..2 * n {
            let u = random_vec(rng, n);
            a.add_outer(1.0, &u, &u);
        }
        for i in 0..n {
            a[(i, i)] += c(0.5, 0.0);
        }
        a.hermitize();
        a
    }

    #[test]
    fn two_by_two_inverse_matches_hand_result() {
        // [[2, i], [-i, 3]] has determinant 5.
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = c(2.0, 0.0);
        a[(0, 1)] = c(0.0, 1.0);
        a[(1, 0)] = c(0.0, -1.0);
        a[(1, 1)] = c(3.0, 0.0);
        let inv = a.inverse().unwrap();
        let expect = [
            [c(0.6, 0.0), c(0.0, -0.2)],
            [c(0.0, 0.2), c(0.4, 0.0)],
        ];
        for r in 0..2 {
            for q in 0..2 {
                assert!((inv[(r, q)] - expect[r][q]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn lu_solve_has_small_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 3, 8, 17] {
            let a = CMat::from_fn(n, n, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let b = random_vec(&mut rng, n);
            let x = a.solve(&b).unwrap();
            let r: Vec<C64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
            assert!(norm(&r) / norm(&b) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn cholesky_agrees_with_lu_on_hpd_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 7, 17] {
            let a = random_hpd(&mut rng, n);
            let b = random_vec(&mut rng, n);
            let x1 = a.solve(&b).unwrap();
            let x2 = a.solve_hpd(&b).unwrap();
            let d: Vec<C64> = x1.iter().zip(&x2).map(|(p, q)| p - q).collect();
            assert!(norm(&d) / norm(&x1) < 1e-9, "n={n}");
        }
    }

    #[test]
    fn cholesky_rejects_indefinite_matrix() {
        let mut a = CMat::identity(3);
        a[(1, 1)] = c(-1.0, 0.0);
        assert!(matches!(
            Cholesky::new(&a),
            Err(LinalgError::NotPositiveDefinite { col: 1, .. })
        ));
    }

    #[test]
    fn inverse_roundtrip_on_random_hpd() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_hpd(&mut rng, 9);
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        let eye = CMat::identity(9);
        assert!(prod.sub(&eye).frobenius() < 1e-10);
    }

    #[test]
    fn trace_product_matches_explicit_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = CMat::from_fn(5, 5, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let b = CMat::from_fn(5, 5, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let full = a.matmul(&b);
        let tr: C64 = (0..5).map(|i| full[(i, i)]).sum();
        assert!((a.trace_product(&b) - tr).norm() < 1e-12);
    }

    #[test]
    fn min_eigenvalue_of_diagonal_matrix() {
        let mut a = CMat::identity(4);
        a[(0, 0)] = c(3.0, 0.0);
        a[(1, 1)] = c(0.25, 0.0);
        a[(2, 2)] = c(1.5, 0.0);
        let lam = min_eigenvalue_hpd(&a, 1e-12, 200).unwrap();
        assert!((lam - 0.25).abs() < 1e-9);
    }

    #[test]
    fn adjoint_matvec_matches_adjoint_then_matvec() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = CMat::from_fn(6, 4, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let x = random_vec(&mut rng, 6);
        let y1 = a.adjoint_matvec(&x);
        let y2 = a.adjoint().matvec(&x);
        let d: Vec<C64> = y1.iter().zip(&y2).map(|(p, q)| p - q).collect();
        assert!(norm(&d) < 1e-12);
    }

    #[test]
    fn hermitize_halves_asymmetry() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = c(1.0, 1.0);
        a[(1, 0)] = c(1.0, -1.0) + c(1e-3, 0.0);
        a.hermitize();
        assert!(a.asymmetry() < 1e-15);
    }
}
