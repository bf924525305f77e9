//! Families of commuting `2 x 2` matrices
//! `zeta_i = [[l_i + m_i, i m_i], [i m_i, l_i - m_i]]` and the closed-form
//! flip they produce under isotropic bases.
//!
//! For these families every triangle Gramian has the same shape, the
//! isotropic change can be written down explicitly, and the resulting
//! `P` block has four structural zeros. Read through the canonical matrix
//! dictionary those zeros say `ac = b11 b22 - b12 b21` for the weight.

use num_traits::{One, Zero};
use rand::Rng;

use crate::cells::{Flip, Triangle};
use crate::directsum::ZetaFamily;
use crate::error::{Error, Result};
use crate::matcore::CMatrix;
use crate::metric::{
    isotropic_change_with_root, isotropic_flips_with, IsoBasisChange, IsotropicFlips,
};
use crate::scalar::{Real, C};
use crate::weights::GaussWeight;

/// Parameters `l_1..l_5` and `m_1..m_5`, stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMuParams<T> {
    pub lambda: [C<T>; 5],
    pub mu: [C<T>; 5],
}

impl<T: Real> LambdaMuParams<T> {
    pub fn new(lambda: [C<T>; 5], mu: [C<T>; 5]) -> Result<Self> {
        let p = Self { lambda, mu };
        for i in 1..=5 {
            for j in 1..i {
                if p.l(i, j).is_zero() {
                    return Err(Error::DegenerateParameters(format!(
                        "lambda_{j} = lambda_{i}"
                    )));
                }
            }
        }
        Ok(p)
    }

    pub fn from_reals(lambda: [f64; 5], mu: [f64; 5]) -> Result<Self> {
        Self::new(
            lambda.map(|x| C::new(T::lit(x), T::zero())),
            mu.map(|x| C::new(T::lit(x), T::zero())),
        )
    }

    /// Real parameters in `[-2, 2]`, `lambda_i` at least `0.2` apart.
    pub fn random_real<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let lambda: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let mu: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let spread = (0..5)
                .flat_map(|i| (0..i).map(move |j| (i, j)))
                .all(|(i, j)| (lambda[i] - lambda[j]).abs() > 0.2);
            if spread {
                return Self::from_reals(lambda, mu).expect("distinct lambdas");
            }
        }
    }

    /// `lambda_i` (1-based).
    pub fn lambda(&self, i: usize) -> C<T> {
        self.lambda[i - 1]
    }

    /// `mu_i` (1-based).
    pub fn mu(&self, i: usize) -> C<T> {
        self.mu[i - 1]
    }

    /// `lambda_ij = lambda_i - lambda_j`.
    pub fn l(&self, i: usize, j: usize) -> C<T> {
        self.lambda(i) - self.lambda(j)
    }

    /// `mu_ij = mu_i - mu_j`.
    pub fn m(&self, i: usize, j: usize) -> C<T> {
        self.mu(i) - self.mu(j)
    }
}

/// `[[l + m, i m], [i m, l - m]]`.
pub fn lm_matrix<T: Real>(l: C<T>, m: C<T>) -> CMatrix<T> {
    let im = C::<T>::i() * m;
    CMatrix::from_rows(&[vec![l + m, im], vec![im, l - m]])
}

/// The family `zeta_i = lm_matrix(lambda_i, mu_i)`.
pub fn zeta_from_lm<T: Real>(p: &LambdaMuParams<T>) -> Result<ZetaFamily<T>> {
    let zeta: [CMatrix<T>; 5] = std::array::from_fn(|i| lm_matrix(p.lambda[i], p.mu[i]));
    ZetaFamily::new(zeta)
}

/// `(lambda, mu)` of the triangle Gramian of `ijk`, which has the same
/// shape as the family:
/// `lambda = 2 l_ji l_ki / l_kj`, `mu = 2 (l_ki^2 m_ji - l_ji^2 m_ki) / l_kj^2`.
pub fn gram_lm<T: Real>(p: &LambdaMuParams<T>, tri: Triangle) -> (C<T>, C<T>) {
    let [i, j, k] = tri.vertices().map(usize::from);
    let two = C::new(T::lit(2.0), T::zero());
    let (lji, lki, lkj) = (p.l(j, i), p.l(k, i), p.l(k, j));
    let lambda = two * lji * lki / lkj;
    let mu = two * (lki * lki * p.m(j, i) - lji * lji * p.m(k, i)) / (lkj * lkj);
    (lambda, mu)
}

/// Isotropic change for a Gramian `lm_matrix(l, m)`:
/// `a = (1 / 2l) diag(s, 1/s) [[2, 2i], [l - m, -i (l + m)]]`.
/// This is the general construction with root `-i l` and
/// `c = i s / (l (l + m))`.
pub fn lm_change<T: Real>(l: C<T>, m: C<T>, s: C<T>) -> Result<IsoBasisChange<T>> {
    if (l + m).is_zero() || l.is_zero() {
        return Err(Error::DegenerateGram(
            "lambda = 0 or lambda + mu = 0".into(),
        ));
    }
    if s.is_zero() {
        return Err(Error::DegenerateParameters(
            "scaling constant must be nonzero".into(),
        ));
    }
    let i = C::<T>::i();
    isotropic_change_with_root(&lm_matrix(l, m), -i * l, Some(i * s / (l * (l + m))))
}

/// Isotropic flips of `zeta_from_lm(p)` with the explicit changes above;
/// `scale(t)` is the free constant of triangle `t`.
pub fn lm_isotropic_flips<T: Real>(
    p: &LambdaMuParams<T>,
    scale: impl Fn(Triangle) -> C<T>,
) -> Result<IsotropicFlips<T>> {
    let zf = zeta_from_lm(p)?;
    isotropic_flips_with(&zf, |t, _| {
        let (l, m) = gram_lm(p, t);
        lm_change(l, m, scale(t))
    })
}

/// Determinant with rows `(1, l_i, l_i^2, m_i)`, `i = 1..4`, expanded
/// along the last column. Written in terms of `m_i - m_1`, so equal `m`
/// gives exactly zero.
pub fn determinant_a<T: Real>(p: &LambdaMuParams<T>) -> C<T> {
    let mut a = C::zero();
    for i in 1..=4 {
        let others: Vec<usize> = (1..=4).filter(|&r| r != i).collect();
        let (x, y, z) = (others[0], others[1], others[2]);
        let vandermonde = p.l(y, x) * p.l(z, x) * p.l(z, y);
        let term = p.m(i, 1) * vandermonde;
        // cofactor sign (-1)^(i + 4)
        a = if i % 2 == 0 { a + term } else { a - term };
    }
    a
}

/// Closed-form `P` block for `lambda_1..lambda_4`, `mu_1..mu_4`.
pub fn hat_p<T: Real>(p: &LambdaMuParams<T>) -> Result<CMatrix<T>> {
    for i in 1..=4 {
        for j in 1..i {
            if p.l(i, j).is_zero() {
                return Err(Error::DegenerateParameters(format!(
                    "lambda_{j} = lambda_{i}"
                )));
            }
        }
    }
    let l = |i, j| p.l(i, j);
    let a = determinant_a(p);
    let (zero, one) = (C::<T>::zero(), C::<T>::one());
    let cross = -a / (l(3, 1) * l(4, 2) * l(4, 3));
    Ok(CMatrix::from_rows(&[
        vec![
            l(3, 2) * l(4, 1) / (l(3, 1) * l(4, 2)),
            zero,
            -l(3, 2) / l(3, 1),
            zero,
        ],
        vec![
            -l(2, 1) * a / (l(3, 1) * l(3, 2) * l(4, 2) * l(4, 2)),
            one,
            cross,
            -l(2, 1) * l(4, 3) / (l(3, 2) * l(4, 2)),
        ],
        vec![
            l(2, 1) * l(4, 3) / (l(3, 1) * l(4, 2)),
            zero,
            l(3, 2) / l(3, 1),
            zero,
        ],
        vec![
            l(4, 1) * a / (l(3, 1) * l(4, 2) * l(4, 2) * l(4, 3)),
            one,
            cross,
            l(4, 1) / l(4, 2),
        ],
    ]))
}

/// The conjugation relating the `P` block built with per-triangle
/// constants `s` to `hat_p`:
/// `diag(s123, 1/s123, s134, 1/s134) hat_p diag(1/s124, s124, 1/s234, s234)`.
pub fn conjugated_hat_p<T: Real>(hat: &CMatrix<T>, s: impl Fn(Triangle) -> C<T>) -> CMatrix<T> {
    let pair = |t: Triangle, inv: bool| {
        let v = s(t);
        if inv {
            [C::<T>::one() / v, v]
        } else {
            [v, C::<T>::one() / v]
        }
    };
    let [i1, i2] = Flip::P.inputs();
    let [o1, o2] = Flip::P.outputs();
    let left = CMatrix::diag(&[pair(o1, false), pair(o2, false)].concat());
    let right = CMatrix::diag(&[pair(i1, true), pair(i2, true)].concat());
    &(&left * hat) * &right
}

/// `|ac - (b11 b22 - b12 b21)|`; zero for weights of this family.
pub fn check_constraint_u<T: Real>(w: &GaussWeight<T>) -> T {
    (w.a * w.c - w.delta()).norm()
}

/// Weight after rescaling its generators `x1, x2, y1, y2` by `s`.
pub fn scale_generators<T: Real>(w: &GaussWeight<T>, s: [C<T>; 4]) -> Result<GaussWeight<T>> {
    let [sx1, sx2, sy1, sy2] = s;
    let b = [
        [w.b[0][0] * sx1 * sy1, w.b[0][1] * sx1 * sy2],
        [w.b[1][0] * sx2 * sy1, w.b[1][1] * sx2 * sy2],
    ];
    GaussWeight::new(w.a * sx1 * sx2, b, w.c * sy1 * sy2, w.faces)
}
