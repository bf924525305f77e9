//! Dense complex matrices for the small sizes this crate needs (a few
//! dozen rows at most): products, inversion with a condition cap, and
//! the Takagi factorization of complex symmetric matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Default cap on the condition estimate accepted by [`CMatrix::inverse`].
pub const DEFAULT_COND_CAP: f64 = 1e12;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from nested rows. Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    /// Build from real entries given row-major.
    pub fn from_reals(rows: usize, cols: usize, entries: &[T]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            data: entries.iter().map(|&x| C::new(x, T::zero())).collect(),
        }
    }

    pub fn scalar(z: C<T>) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![z],
        }
    }

    pub fn diag(entries: &[C<T>]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { C::zero() })
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

    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, z: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(
            r0 + rows <= self.rows && c0 + cols <= self.cols,
            "block out of range"
        );
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, m: &Self) {
        assert!(
            r0 + m.rows <= self.rows && c0 + m.cols <= self.cols,
            "block out of range"
        );
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(r0 + i, c0 + j)] = m[(i, j)];
            }
        }
    }

    pub fn hstack(parts: &[&Self]) -> Self {
        let rows = parts.first().map_or(0, |m| m.rows);
        assert!(parts.iter().all(|m| m.rows == rows), "hstack row mismatch");
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for m in parts {
            out.set_block(0, c0, m);
            c0 += m.cols;
        }
        out
    }

    pub fn vstack(parts: &[&Self]) -> Self {
        let cols = parts.first().map_or(0, |m| m.cols);
        assert!(
            parts.iter().all(|m| m.cols == cols),
            "vstack column mismatch"
        );
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for m in parts {
            out.set_block(r0, 0, m);
            r0 += m.rows;
        }
        out
    }

    /// Block-diagonal matrix with the given square blocks.
    pub fn block_diag(parts: &[&Self]) -> Self {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for m in parts {
            out.set_block(r0, c0, m);
            r0 += m.rows;
            c0 += m.cols;
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, z| acc + z.norm()))
            .fold(T::zero(), T::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn dist(&self, other: &Self) -> T {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn symmetry_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.dist(&self.transpose())
    }

    /// Symmetric up to the structural tolerance, relative to the entry scale.
    pub fn is_symmetric(&self) -> bool {
        self.symmetry_residual() <= T::structural_tol() * T::one().max(self.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn lu(&self) -> Option<Lu<T>> {
        assert!(self.is_square(), "LU of non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| {
                    a[x * n + k]
                        .norm()
                        .partial_cmp(&a[y * n + k].norm())
                        .unwrap()
                })
                .unwrap();
            if a[p * n + k].norm() == T::zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                odd = !odd;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let u = a[k * n + j];
                    a[i * n + j] = a[i * n + j] - f * u;
                }
            }
        }
        Some(Lu { n, a, perm, odd })
    }

    pub fn det(&self) -> C<T> {
        match self.lu() {
            None => C::zero(),
            Some(lu) => {
                let mut d = if lu.odd { -C::one() } else { C::one() };
                for k in 0..lu.n {
                    d = d * lu.a[k * lu.n + k];
                }
                d
            }
        }
    }

    /// Inverse with the default condition cap.
    pub fn inverse(&self) -> Result<Self> {
        self.inverse_capped(T::lit(DEFAULT_COND_CAP))
    }

    /// Inverse, failing with `SingularMatrix` when the infinity-norm
    /// condition estimate exceeds `cap`.
    pub fn inverse_capped(&self, cap: T) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let singular = |cond: T| Error::SingularMatrix {
            cond: cond.to_f64().unwrap_or(f64::INFINITY),
            cap: cap.to_f64().unwrap_or(f64::INFINITY),
        };
        let lu = self.lu().ok_or_else(|| singular(T::infinity()))?;
        let inv = lu.inverse();
        let cond = self.norm_inf() * inv.norm_inf();
        if cond.is_nan() || cond > cap || !inv.is_finite() {
            return Err(singular(cond));
        }
        Ok(inv)
    }

    /// Condition estimate `|m|_inf * |m^-1|_inf`, infinite when singular.
    pub fn condition_estimate(&self) -> T {
        match self.lu() {
            None => T::infinity(),
            Some(lu) => self.norm_inf() * lu.inverse().norm_inf(),
        }
    }

    /// Thin Householder QR of a tall matrix: `self = q r` with `q`
    /// (`rows x cols`) having orthonormal columns and `r` upper triangular.
    pub fn thin_qr(&self) -> Result<(Self, Self)> {
        let (m, n) = (self.rows, self.cols);
        if m < n {
            return Err(Error::DimensionMismatch(format!(
                "thin QR of a wide {m}x{n} matrix"
            )));
        }
        let mut r = self.clone();
        let mut reflectors: Vec<Vec<C<T>>> = Vec::with_capacity(n);
        for k in 0..n {
            let norm = (k..m)
                .map(|i| r[(i, k)].norm_sqr())
                .fold(T::zero(), |a, b| a + b)
                .sqrt();
            let mut v: Vec<C<T>> = (k..m).map(|i| r[(i, k)]).collect();
            if norm > T::zero() {
                let x0 = v[0];
                let phase = if x0.norm() > T::zero() {
                    x0 / C::from(x0.norm())
                } else {
                    C::one()
                };
                v[0] = x0 + phase * C::from(norm);
            }
            let vv = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b);
            if vv > T::zero() {
                let s = vv.sqrt();
                for z in &mut v {
                    *z = *z / C::from(s);
                }
                reflect(&mut r, &v, k, k..n);
                for i in k + 1..m {
                    r[(i, k)] = C::zero();
                }
            }
            reflectors.push(v);
        }
        let mut q = Self::zeros(m, n);
        for j in 0..n {
            q[(j, j)] = C::one();
        }
        for (k, v) in reflectors.iter().enumerate().rev() {
            reflect(&mut q, v, k, 0..n);
        }
        let r = r.block(0, 0, n, n);
        Ok((q, r))
    }
}

/// Apply `I - 2 v v^H` to rows `k..` of the given columns.
fn reflect<T: Real>(a: &mut CMatrix<T>, v: &[C<T>], k: usize, cols: std::ops::Range<usize>) {
    let two = C::from(T::lit(2.0));
    for j in cols {
        let dot = v
            .iter()
            .enumerate()
            .fold(C::zero(), |acc, (i, vi)| acc + vi.conj() * a[(k + i, j)]);
        for (i, vi) in v.iter().enumerate() {
            a[(k + i, j)] = a[(k + i, j)] - two * *vi * dot;
        }
    }
}

struct Lu<T> {
    n: usize,
    a: Vec<C<T>>,
    perm: Vec<usize>,
    odd: bool,
}

impl<T: Real> Lu<T> {
    fn solve_col(&self, b: &mut [C<T>]) {
        let n = self.n;
        for i in 0..n {
            for k in 0..i {
                let l = self.a[i * n + k];
                b[i] = b[i] - l * b[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.a[i * n + k];
                b[i] = b[i] - u * b[k];
            }
            b[i] = b[i] / self.a[i * n + i];
        }
    }

    fn inverse(&self) -> CMatrix<T> {
        let n = self.n;
        let mut out = CMatrix::zeros(n, n);
        let mut col = vec![C::zero(); n];
        for j in 0..n {
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = if self.perm[i] == j {
                    C::one()
                } else {
                    C::zero()
                };
            }
            self.solve_col(&mut col);
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] = out.data[i * rhs.cols + j] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sum shape mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "difference shape mismatch"
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<T: Real> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| -z).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Real> $tr for CMatrix<T> {
            type Output = CMatrix<T>;
            fn $m(self, rhs: CMatrix<T>) -> CMatrix<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Real> $tr<&CMatrix<T>> for CMatrix<T> {
            type Output = CMatrix<T>;
            fn $m(self, rhs: &CMatrix<T>) -> CMatrix<T> {
                (&self).$m(rhs)
            }
        }
        impl<T: Real> $tr<CMatrix<T>> for &CMatrix<T> {
            type Output = CMatrix<T>;
            fn $m(self, rhs: CMatrix<T>) -> CMatrix<T> {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Mul, mul);
forward_owned!(Add, add);
forward_owned!(Sub, sub);

impl<T: fmt::Debug> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

/// Result of [`takagi`]: `m = q * diag(sigma) * q^T` with `q` unitary.
#[derive(Debug, Clone)]
pub struct Takagi<T> {
    pub q: CMatrix<T>,
    pub sigma: Vec<T>,
}

/// Takagi factorization of a complex symmetric matrix.
///
/// Writing `m = B + iC`, the real symmetric matrix `[[B, C], [C, -B]]`
/// has spectrum `{+s_k, -s_k}`; an eigenvector `(u; v)` for `s_k >= 0`
/// yields the Takagi vector `u + iv`, which satisfies `m * conj(q) = s_k q`.
/// Zero singular values are completed from the null space by complex
/// Gram-Schmidt. Each column is normalized so its largest entry has
/// argument in `(-pi/2, pi/2]`; for `n = 1` this gives the principal root.
pub fn takagi<T: Real>(m: &CMatrix<T>) -> Result<Takagi<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "takagi of {}x{}",
            m.rows, m.cols
        )));
    }
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric {
            residual: m.symmetry_residual().to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = m.rows;
    let dim = 2 * n;
    let mut real = vec![T::zero(); dim * dim];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            real[i * dim + j] = z.re;
            real[i * dim + n + j] = z.im;
            real[(n + i) * dim + j] = z.im;
            real[(n + i) * dim + n + j] = -z.re;
        }
    }
    let (vals, vecs) = jacobi_eigen(&mut real, dim);
    let scale = vals
        .iter()
        .fold(T::zero(), |acc, v| acc.max(v.abs()))
        .max(T::min_positive_value());
    let zero_tol = T::epsilon() * T::lit(64.0 * dim as f64) * scale;

    let column = |k: usize| -> Vec<C<T>> {
        (0..n)
            .map(|i| C::new(vecs[i * dim + k], vecs[(n + i) * dim + k]))
            .collect()
    };

    let mut pairs: Vec<(T, Vec<C<T>>)> = Vec::with_capacity(n);
    for (k, &v) in vals.iter().enumerate() {
        if v > zero_tol && pairs.len() < n {
            pairs.push((v, column(k)));
        }
    }
    if pairs.len() < n {
        // complete from the null space
        for (k, v) in vals.iter().enumerate() {
            if pairs.len() == n {
                break;
            }
            if v.abs() > zero_tol {
                continue;
            }
            let mut q = column(k);
            for (_, p) in &pairs {
                let overlap = p
                    .iter()
                    .zip(&q)
                    .fold(C::zero(), |acc: C<T>, (a, b)| acc + a.conj() * b);
                for (qi, pi) in q.iter_mut().zip(p) {
                    *qi = *qi - overlap * pi;
                }
            }
            let norm = q.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
            if norm > T::lit(0.5) {
                q.iter_mut().for_each(|z| *z = *z / C::new(norm, T::zero()));
                pairs.push((T::zero(), q));
            }
        }
    }
    if pairs.len() != n {
        return Err(Error::DegenerateParameters(
            "Takagi eigenvector extraction failed".into(),
        ));
    }
    for (_, q) in pairs.iter_mut() {
        normalize_phase(q);
    }
    // insertion sort, descending, ties kept in extraction order
    let tie = zero_tol.max(scale * T::lit(1e3) * T::epsilon());
    for i in 1..pairs.len() {
        let mut j = i;
        while j > 0 && pairs[j].0 > pairs[j - 1].0 + tie {
            pairs.swap(j, j - 1);
            j -= 1;
        }
    }
    let q = CMatrix::from_fn(n, n, |i, k| pairs[k].1[i]);
    let sigma = pairs.into_iter().map(|(s, _)| s.max(T::zero())).collect();
    Ok(Takagi { q, sigma })
}

fn normalize_phase<T: Real>(q: &mut [C<T>]) {
    let lead = q
        .iter()
        .copied()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap_or_else(C::zero);
    let arg = lead.arg();
    let half_pi = T::FRAC_PI_2();
    if arg > half_pi || arg <= -half_pi {
        q.iter_mut().for_each(|z| *z = -*z);
    }
}

/// Symmetric factor `c` with `c * c^T = m`, taken as `q * diag(sqrt(sigma))`
/// from the Takagi factorization.
pub fn factor_sym<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    let Takagi { q, sigma } = takagi(m)?;
    let top = sigma.iter().fold(T::zero(), |a, &s| a.max(s));
    let bottom = sigma.iter().fold(T::infinity(), |a, &s| a.min(s));
    if bottom.is_nan() || bottom <= top * T::lit(1.0 / DEFAULT_COND_CAP) || top == T::zero() {
        return Err(Error::SingularMatrix {
            cond: (top / bottom).to_f64().unwrap_or(f64::INFINITY),
            cap: DEFAULT_COND_CAP,
        });
    }
    let roots: Vec<C<T>> = sigma.iter().map(|s| C::new(s.sqrt(), T::zero())).collect();
    Ok(&q * &CMatrix::diag(&roots))
}

/// Cyclic Jacobi eigen-decomposition of a real symmetric `dim x dim`
/// matrix stored row-major (destroyed). Returns eigenvalues and the
/// row-major matrix whose columns are the orthonormal eigenvectors.
fn jacobi_eigen<T: Real>(a: &mut [T], dim: usize) -> (Vec<T>, Vec<T>) {
    let mut v = vec![T::zero(); dim * dim];
    for i in 0..dim {
        v[i * dim + i] = T::one();
    }
    let total = a.iter().fold(T::zero(), |acc, &x| acc + x * x);
    let eps2 = T::epsilon() * T::epsilon() * total;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..dim {
            for q in p + 1..dim {
                off = off + a[p * dim + q] * a[p * dim + q];
            }
        }
        if off <= eps2 {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * dim + q] - a[p * dim + p]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let (akp, akq) = (a[k * dim + p], a[k * dim + q]);
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let (apk, aqk) = (a[p * dim + k], a[q * dim + k]);
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
                a[p * dim + q] = T::zero();
                a[q * dim + p] = T::zero();
                for k in 0..dim {
                    let (vkp, vkq) = (v[k * dim + p], v[k * dim + q]);
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals = (0..dim).map(|i| a[i * dim + i]).collect();
    (vals, v)
}
