//! Complex Euclidean metric on the pentagon space for a symmetric family,
//! orthonormal triangle bases (giving orthogonal flips) and, for `n = 2`,
//! isotropic bases (giving flips that preserve the split form `J`).
//!
//! In the quadrilateral `ijkl` the product of block rows is
//! `(f, g) = f_i X g_j^T + g_i X f_j^T + f_k Y g_l^T + g_k Y f_l^T`
//! with `X = zeta_ij`, `Y = zeta_kl`. Restricted to a triangle `ijk` it can
//! be written along any of the three oriented edges `ij`, `jk`, `ki`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cells::{Flip, Triangle};
use crate::directsum::{all_bases, flips_from_bases, FlipSet, TriangleBasis, ZetaFamily};
use crate::error::{Error, Result};
use crate::matcore::{factor_sym, CMatrix};
use crate::scalar::{csqrt, Real, C};

/// Scalar product on the space of the quadrilateral `quad`.
#[derive(Debug, Clone)]
pub struct QuadScalarProduct<T> {
    pub quad: [u8; 4],
    pub x: CMatrix<T>,
    pub y: CMatrix<T>,
}

impl<T: Real> QuadScalarProduct<T> {
    /// The solution `X = zeta_ij`, `Y = zeta_kl`.
    pub fn for_quad(zf: &ZetaFamily<T>, quad: [u8; 4]) -> Self {
        let [i, j, k, l] = quad;
        Self {
            quad,
            x: zf.diff(i, j),
            y: zf.diff(k, l),
        }
    }

    /// Residual of the two linear conditions `X`, `Y` must satisfy for the
    /// decompositions of the quadrilateral to be orthogonal:
    /// `X + z24 z43^-1 Y z24^-T z12^T = 0` and
    /// `X z32^-T z13^T + z12 z23^-1 Y z34^-T z13^T = 0`
    /// (indices relative to the quadrilateral).
    pub fn xy_residual(&self, zf: &ZetaFamily<T>) -> T {
        let [a, b, c, d] = self.quad;
        let z = |p, q| zf.diff(p, q);
        let zi = |p, q| zf.diff_inv(p, q);
        let first = &self.x
            + &(&(&(&z(b, d) * &zi(d, c)) * &self.y)
                * &(&zi(b, d).transpose() * &z(a, b).transpose()));
        let second = &(&(&self.x * &zi(c, b).transpose()) * &z(a, c).transpose())
            + &(&(&(&z(a, b) * &zi(b, c)) * &self.y)
                * &(&zi(c, d).transpose() * &z(a, c).transpose()));
        first.max_abs().max(second.max_abs())
    }

    /// Gramian between the rows of `f` and the rows of `g`, both given as
    /// `rows x 5n` block rows.
    pub fn gram(&self, f: &CMatrix<T>, g: &CMatrix<T>) -> CMatrix<T> {
        let [i, j, k, l] = self.quad;
        edge_gram(f, g, i, j, &self.x) + edge_gram(f, g, k, l, &self.y)
    }
}

/// `F_a Z G_b^T + F_b Z^T G_a^T` for block columns `a`, `b` (1-based).
fn edge_gram<T: Real>(f: &CMatrix<T>, g: &CMatrix<T>, a: u8, b: u8, z: &CMatrix<T>) -> CMatrix<T> {
    let n = z.rows();
    let col = |m: &CMatrix<T>, v: u8| m.block(0, (usize::from(v) - 1) * n, m.rows(), n);
    let one = &(&col(f, a) * z) * &col(g, b).transpose();
    let two = &(&col(f, b) * &z.transpose()) * &col(g, a).transpose();
    one + two
}

/// Scalar product (Gramian for stacked rows) on the quadrilateral space.
pub fn scalar_product<T: Real>(
    f: &CMatrix<T>,
    g: &CMatrix<T>,
    sp: &QuadScalarProduct<T>,
) -> CMatrix<T> {
    sp.gram(f, g)
}

/// Oriented edge of a triangle `ijk` along which its product is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `f_i zeta_ij g_j^T + g_i zeta_ij f_j^T`
    First,
    /// `f_j zeta_jk g_k^T + g_j zeta_jk f_k^T`
    Second,
    /// `f_k zeta_ki g_i^T + g_k zeta_ki f_i^T`
    Third,
}

/// Product of block rows inside triangle `tri`, written along `edge`.
pub fn triangle_product<T: Real>(
    zf: &ZetaFamily<T>,
    tri: Triangle,
    edge: Edge,
    f: &CMatrix<T>,
    g: &CMatrix<T>,
) -> CMatrix<T> {
    let [i, j, k] = tri.vertices();
    let (a, b) = match edge {
        Edge::First => (i, j),
        Edge::Second => (j, k),
        Edge::Third => (k, i),
    };
    edge_gram(f, g, a, b, &zf.diff(a, b))
}

/// Gramian of the standard basis of `ijk`: `2 zeta_ij zeta_kj^-1 zeta_ik`.
pub fn triangle_gram<T: Real>(zf: &ZetaFamily<T>, tri: Triangle) -> Result<CMatrix<T>> {
    require_symmetric(zf)?;
    let [i, j, k] = tri.vertices();
    let two = C::new(T::lit(2.0), T::zero());
    Ok((&(&zf.diff(i, j) * &zf.diff_inv(k, j)) * &zf.diff(i, k)).scale(two))
}

fn require_symmetric<T: Real>(zf: &ZetaFamily<T>) -> Result<()> {
    if zf.is_symmetric() {
        Ok(())
    } else {
        let residual = zf
            .members()
            .iter()
            .map(|z| z.symmetry_residual().to_f64().unwrap_or(f64::NAN))
            .fold(0.0, f64::max);
        Err(Error::NotSymmetric { residual })
    }
}

/// Orthogonal flips from orthonormal bases `e_ijk = c_ijk^-1 f_ijk`, with
/// `c_ijk c_ijk^T = G_ijk` chosen by the Takagi factor.
pub fn orthonormal_flips<T: Real>(zf: &ZetaFamily<T>) -> Result<FlipSet<T>> {
    orthonormal_flips_with(zf, |_, g| factor_sym(g))
}

/// As [`orthonormal_flips`] with a caller-supplied factor `c` for each
/// triangle Gramian. The factor must satisfy `c c^T = G`.
pub fn orthonormal_flips_with<T: Real>(
    zf: &ZetaFamily<T>,
    factor: impl Fn(Triangle, &CMatrix<T>) -> Result<CMatrix<T>>,
) -> Result<FlipSet<T>> {
    let bases = all_bases(zf)?;
    let mut rows = BTreeMap::new();
    for (tri, basis) in &bases {
        let g = triangle_gram(zf, *tri)?;
        let c = factor(*tri, &g)?;
        let cinv = c
            .inverse()
            .map_err(|_| Error::DegenerateGram(format!("factor of G_{tri} is singular")))?;
        rows.insert(*tri, basis.transformed(&cinv).matrix());
    }
    flips_from_bases(zf.n(), &rows)
}

/// Change of basis `a` in a two-dimensional triangle space making the
/// Gramian `[[0, 1], [1, 0]]`.
#[derive(Debug, Clone)]
pub struct IsoBasisChange<T> {
    pub a: CMatrix<T>,
    pub c: C<T>,
    pub c_prime: C<T>,
    /// The square root of `beta^2 - alpha gamma` used.
    pub root: C<T>,
}

impl<T: Real> IsoBasisChange<T> {
    /// `max |a G a^T - [[0,1],[1,0]]|`.
    pub fn residual(&self, g: &CMatrix<T>) -> T {
        (&(&self.a * g) * &self.a.transpose()).dist(&split_form(1))
    }
}

/// Isotropic change for `G = [[alpha, beta], [beta, gamma]]` with the
/// principal root of `beta^2 - alpha gamma`. When `c` is `None` the
/// normalization `c = c'` is used.
pub fn isotropic_change<T: Real>(g: &CMatrix<T>, c: Option<C<T>>) -> Result<IsoBasisChange<T>> {
    let (alpha, beta, gamma) = gram_entries(g)?;
    isotropic_change_with_root(g, csqrt(beta * beta - alpha * gamma), c)
}

/// Isotropic change with an explicit root `r`, `r^2 = beta^2 - alpha gamma`:
/// rows `c (-beta + r, alpha)` and `c' (-beta - r, alpha)` with
/// `c c' = 1 / (2 alpha (alpha gamma - beta^2))`.
pub fn isotropic_change_with_root<T: Real>(
    g: &CMatrix<T>,
    root: C<T>,
    c: Option<C<T>>,
) -> Result<IsoBasisChange<T>> {
    let (alpha, beta, gamma) = gram_entries(g)?;
    let disc = beta * beta - alpha * gamma;
    let scale = T::one().max(g.max_abs());
    let tiny = T::structural_tol() * scale;
    if alpha.norm() <= tiny {
        return Err(Error::DegenerateGram(
            "alpha = 0: first basis vector is already isotropic".into(),
        ));
    }
    if disc.norm() <= tiny * scale {
        return Err(Error::DegenerateGram(
            "beta^2 = alpha gamma: Gramian is singular".into(),
        ));
    }
    if (root * root - disc).norm() > tiny * scale {
        return Err(Error::DegenerateParameters(
            "root does not square to beta^2 - alpha gamma".into(),
        ));
    }
    let two = C::new(T::lit(2.0), T::zero());
    let product = C::<T>::one() / (two * alpha * (alpha * gamma - beta * beta));
    let c = c.unwrap_or_else(|| csqrt(product));
    if c.is_zero() {
        return Err(Error::DegenerateParameters(
            "normalization c must be nonzero".into(),
        ));
    }
    let c_prime = product / c;
    let a = CMatrix::from_rows(&[
        vec![c * (-beta + root), c * alpha],
        vec![c_prime * (-beta - root), c_prime * alpha],
    ]);
    Ok(IsoBasisChange {
        a,
        c,
        c_prime,
        root,
    })
}

fn gram_entries<T: Real>(g: &CMatrix<T>) -> Result<(C<T>, C<T>, C<T>)> {
    if g.rows() != 2 || g.cols() != 2 {
        return Err(Error::DimensionMismatch(
            "isotropic bases need a 2 x 2 Gramian".into(),
        ));
    }
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric {
            residual: g.symmetry_residual().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((g[(0, 0)], g[(0, 1)], g[(1, 1)]))
}

/// Block-diagonal form with `copies` blocks `[[0, 1], [1, 0]]`.
pub fn split_form<T: Real>(copies: usize) -> CMatrix<T> {
    let sx = CMatrix::from_fn(2, 2, |i, j| if i != j { C::one() } else { C::zero() });
    let parts = vec![&sx; copies];
    CMatrix::block_diag(&parts)
}

/// Flips between isotropic bases, with the per-triangle changes used.
#[derive(Debug, Clone)]
pub struct IsotropicFlips<T> {
    pub flips: FlipSet<T>,
    pub changes: BTreeMap<Triangle, IsoBasisChange<T>>,
}

/// Isotropic flips with the default normalization (principal root, `c = c'`).
pub fn isotropic_flips<T: Real>(zf: &ZetaFamily<T>) -> Result<IsotropicFlips<T>> {
    isotropic_flips_with(zf, |_, g| isotropic_change(g, None))
}

/// Isotropic flips with a caller-chosen change per triangle.
pub fn isotropic_flips_with<T: Real>(
    zf: &ZetaFamily<T>,
    choose: impl Fn(Triangle, &CMatrix<T>) -> Result<IsoBasisChange<T>>,
) -> Result<IsotropicFlips<T>> {
    if zf.n() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "isotropic bases need n = 2, got {}",
            zf.n()
        )));
    }
    let bases = all_bases(zf)?;
    let mut changes = BTreeMap::new();
    let mut rows = BTreeMap::new();
    for (tri, basis) in &bases {
        let g = triangle_gram(zf, *tri)?;
        let change = choose(*tri, &g)?;
        rows.insert(*tri, basis.transformed(&change.a).matrix());
        changes.insert(*tri, change);
    }
    let flips = flips_from_bases(2, &rows)?;
    Ok(IsotropicFlips { flips, changes })
}

/// Conjugate plain flips by per-triangle changes of basis:
/// `M~ = diag(a_out1, a_out2) M diag(a_in1^-1, a_in2^-1)` on each
/// nontrivial block.
pub fn conjugate_flips<T: Real>(
    fs: &FlipSet<T>,
    change: impl Fn(Triangle) -> CMatrix<T>,
) -> Result<FlipSet<T>> {
    let mut blocks = Vec::with_capacity(5);
    for f in Flip::ALL {
        let [i1, i2] = f.inputs();
        let [o1, o2] = f.outputs();
        let left = CMatrix::block_diag(&[&change(o1), &change(o2)]);
        let right = CMatrix::block_diag(&[&change(i1).inverse()?, &change(i2).inverse()?]);
        blocks.push(&(&left * &fs.block(f)) * &right);
    }
    FlipSet::from_blocks(fs.n(), blocks.try_into().expect("five flips"))
}

/// Largest Gramian entry between the two triangles of each triangulation
/// of every flip quadrilateral (zero when the decompositions are orthogonal).
pub fn decomposition_residual<T: Real>(
    zf: &ZetaFamily<T>,
    bases: &BTreeMap<Triangle, TriangleBasis<T>>,
) -> T {
    let mut worst = T::zero();
    for f in Flip::ALL {
        let sp = QuadScalarProduct::for_quad(zf, f.tetrahedron());
        for [a, b] in [f.inputs(), f.outputs()] {
            let g = sp.gram(&bases[&a].matrix(), &bases[&b].matrix());
            worst = worst.max(g.max_abs());
        }
    }
    worst
}

/// Kronecker product `m (x) I_n`: entry `m_ab` becomes the block `m_ab I_n`.
pub fn kron_identity<T: Real>(m: &CMatrix<T>, n: usize) -> CMatrix<T> {
    CMatrix::from_fn(m.rows() * n, m.cols() * n, |i, j| {
        if i % n == j % n {
            m[(i / n, j / n)]
        } else {
            C::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directsum::{check_pentagon, kashaev_angles, triangle_basis, KashaevBranch};
    use rand::SeedableRng;

    type M = CMatrix<f64>;

    fn r(x: f64) -> C<f64> {
        C::new(x, 0.0)
    }

    fn decreasing() -> ZetaFamily<f64> {
        ZetaFamily::from_scalars([5.0, 4.0, 3.0, 2.0, 1.0].map(r)).unwrap()
    }

    fn rng(seed: u64) -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(seed)
    }

    #[test]
    fn perp_in_quad_1234() {
        let zf = decreasing();
        let sp = QuadScalarProduct::for_quad(&zf, [1, 2, 3, 4]);
        let f = |t| triangle_basis(&zf, t, None).unwrap().matrix();
        assert_eq!(
            sp.gram(&f(Triangle::of(1, 2, 4)), &f(Triangle::of(2, 3, 4)))
                .max_abs(),
            0.0
        );
        assert_eq!(
            sp.gram(&f(Triangle::of(1, 2, 3)), &f(Triangle::of(1, 3, 4)))
                .max_abs(),
            0.0
        );
        let g = sp.gram(&f(Triangle::of(1, 2, 4)), &f(Triangle::of(1, 2, 4)));
        assert!((g[(0, 0)] - r(-3.0)).norm() < 1e-14);
    }

    #[test]
    fn xy_conditions_hold() {
        let mut rng = rng(1);
        for n in 1..=3 {
            let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, n, 1e6);
            for f in Flip::ALL {
                let sp = QuadScalarProduct::for_quad(&zf, f.tetrahedron());
                assert!(
                    sp.xy_residual(&zf) < 1e-9,
                    "{f} n={n}: {}",
                    sp.xy_residual(&zf)
                );
            }
        }
    }

    #[test]
    fn every_decomposition_is_orthogonal() {
        let mut rng = rng(2);
        for n in 1..=3 {
            let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, n, 1e6);
            let bases = all_bases(&zf).unwrap();
            assert!(decomposition_residual(&zf, &bases) < 1e-9);
        }
    }

    #[test]
    fn product_is_symmetric_in_arguments() {
        let mut rng = rng(3);
        let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, 2, 1e6);
        let sp = QuadScalarProduct::for_quad(&zf, [1, 2, 3, 4]);
        let a = triangle_basis(&zf, Triangle::of(1, 2, 4), None)
            .unwrap()
            .matrix();
        let b = triangle_basis(&zf, Triangle::of(1, 2, 3), None)
            .unwrap()
            .matrix();
        let f = &M::from_reals(2, 2, &[1.0, 2.0, -0.5, 0.25]) * &a + &b;
        let g = &a - &(&M::from_reals(2, 2, &[0.0, 1.0, 3.0, 1.0]) * &b);
        assert!(sp.gram(&f, &g).dist(&sp.gram(&g, &f).transpose()) < 1e-12);
    }

    #[test]
    fn gram_forms_agree() {
        let mut rng = rng(4);
        let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, 2, 1e6);
        for tri in Triangle::all() {
            let f = triangle_basis(&zf, tri, None).unwrap().matrix();
            let g = triangle_gram(&zf, tri).unwrap();
            for e in [Edge::First, Edge::Second, Edge::Third] {
                assert!(
                    triangle_product(&zf, tri, e, &f, &f).dist(&g) < 1e-10,
                    "{tri} {e:?}"
                );
            }
            assert!(g.is_symmetric());
        }
    }

    #[test]
    fn gram_requires_symmetric_family() {
        let mut rng = rng(5);
        let zf = ZetaFamily::<f64>::random_general(&mut rng, 2, 1e6);
        assert!(matches!(
            triangle_gram(&zf, Triangle::of(1, 2, 3)),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn orthonormal_flips_random() {
        let mut rng = rng(6);
        for n in 1..=3 {
            let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, n, 1e6);
            let fs = orthonormal_flips(&zf).unwrap();
            assert!(fs.orthogonality_residual() <= 1e-9);
            assert!(check_pentagon(&fs) <= 1e-9);
        }
    }

    #[test]
    fn orthonormal_scalar_matches_rotations() {
        let zf = decreasing();
        let fs = orthonormal_flips(&zf).unwrap();
        let z = [5.0, 4.0, 3.0, 2.0, 1.0].map(r);
        for f in Flip::ALL {
            let (c, s) = kashaev_angles(
                f.tetrahedron().map(|v| z[usize::from(v) - 1]),
                KashaevBranch::default(),
            )
            .unwrap();
            let b = fs.block(f);
            assert!((b[(0, 0)].norm() - c.norm()).abs() < 1e-12, "{f}");
            assert!((b[(1, 1)].norm() - c.norm()).abs() < 1e-12, "{f}");
            assert!((b[(0, 1)].norm() - s.norm()).abs() < 1e-12, "{f}");
            assert!((b[(1, 0)].norm() - s.norm()).abs() < 1e-12, "{f}");
        }
        assert!((fs.block(Flip::P)[(0, 0)].norm() - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_identity_family_tensors() {
        let zs = [5.0, 4.0, 3.0, 2.0, 1.0];
        let fam = ZetaFamily::new(zs.map(|x| M::identity(2).scale(r(x)))).unwrap();
        let one = orthonormal_flips(&decreasing()).unwrap();
        let two = orthonormal_flips(&fam).unwrap();
        for f in Flip::ALL {
            assert!(
                two.block(f).dist(&kron_identity(&one.block(f), 2)) < 1e-12,
                "{f}"
            );
        }
    }

    #[test]
    fn custom_factor_hook() {
        let mut rng = rng(7);
        let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, 2, 1e6);
        // any c with c c^T = G works; rotate the Takagi factor by a complex orthogonal matrix
        let (co, si) = (r(2.0), C::new(0.0, 3f64.sqrt()));
        let rot = M::from_rows(&[vec![co, -si], vec![si, co]]);
        let fs = orthonormal_flips_with(&zf, |_, g| Ok(&factor_sym(g)? * &rot)).unwrap();
        assert!(fs.orthogonality_residual() <= 1e-9);
        assert!(check_pentagon(&fs) <= 1e-9);
    }

    #[test]
    fn isotropic_change_identity_gram() {
        let ch = isotropic_change(&M::identity(2), Some(r(0.5f64.sqrt()))).unwrap();
        let s = 0.5f64.sqrt();
        let want = M::from_rows(&[vec![C::new(0.0, s), r(s)], vec![C::new(0.0, -s), r(s)]]);
        assert!(ch.a.dist(&want) < 1e-15);
        assert!(ch.residual(&M::identity(2)) < 1e-15);
    }

    #[test]
    fn isotropic_change_conditions() {
        let g = M::from_rows(&[
            vec![C::new(1.0, 0.3), r(-0.4)],
            vec![r(-0.4), C::new(0.2, -1.0)],
        ]);
        let ch = isotropic_change(&g, None).unwrap();
        let row = |i| ch.a.block(i, 0, 1, 2);
        let q = |u: &M, v: &M| (&(u * &g) * &v.transpose())[(0, 0)];
        assert!(q(&row(0), &row(0)).norm() < 1e-14);
        assert!(q(&row(1), &row(1)).norm() < 1e-14);
        assert!((q(&row(0), &row(1)) - r(1.0)).norm() < 1e-14);
        assert!((ch.c - ch.c_prime).norm() < 1e-14);
        // c -> t c, c' -> c' / t keeps the form
        let t = C::new(0.7, -2.0);
        let scaled = isotropic_change(&g, Some(ch.c * t)).unwrap();
        assert!((scaled.c_prime - ch.c_prime / t).norm() < 1e-14);
        assert!(scaled.residual(&g) < 1e-14);
    }

    #[test]
    fn isotropic_change_degenerate() {
        let g = M::from_reals(2, 2, &[0.0, 1.0, 1.0, 2.0]);
        assert!(matches!(
            isotropic_change(&g, None),
            Err(Error::DegenerateGram(_))
        ));
        let g = M::from_reals(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            isotropic_change(&g, None),
            Err(Error::DegenerateGram(_))
        ));
        assert!(isotropic_change_with_root(&M::identity(2), r(1.0), None).is_err());
    }

    #[test]
    fn isotropic_flips_random() {
        let mut rng = rng(8);
        let j = split_form::<f64>(2);
        for _ in 0..10 {
            let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, 2, 1e6);
            let iso = isotropic_flips(&zf).unwrap();
            for f in Flip::ALL {
                let b = iso.flips.block(f);
                assert!((&(&b.transpose() * &j) * &b).dist(&j) <= 1e-9, "{f}");
            }
            assert!(check_pentagon(&iso.flips) <= 1e-9);
            for (tri, ch) in &iso.changes {
                let g = triangle_gram(&zf, *tri).unwrap();
                assert!(ch.residual(&g) < 1e-10);
            }
        }
    }

    #[test]
    fn isotropic_flips_match_conjugation_formula() {
        let mut rng = rng(9);
        let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, 2, 1e6);
        let iso = isotropic_flips(&zf).unwrap();
        let plain = crate::directsum::build_flips(&zf).unwrap();
        let conj = conjugate_flips(&plain, |t| iso.changes[&t].a.clone()).unwrap();
        for f in Flip::ALL {
            assert!(conj.get(f).dist(iso.flips.get(f)) < 1e-9, "{f}");
        }
    }

    #[test]
    fn isotropic_freedom_keeps_relation() {
        let mut rng = rng(10);
        let zf = ZetaFamily::<f64>::random_symmetric(&mut rng, 2, 1e6);
        let iso = isotropic_flips_with(&zf, |_, g| isotropic_change(g, Some(r(1.0)))).unwrap();
        assert!(check_pentagon(&iso.flips) <= 1e-9);
        assert!(iso.flips.form_residual(&split_form(3)) <= 1e-9);
        let neg = isotropic_flips_with(&zf, |_, g| {
            let root = -csqrt(g[(0, 1)] * g[(0, 1)] - g[(0, 0)] * g[(1, 1)]);
            isotropic_change_with_root(g, root, None)
        })
        .unwrap();
        assert!(check_pentagon(&neg.flips) <= 1e-9);
        assert!(neg.flips.form_residual(&split_form(3)) <= 1e-9);
    }

    #[test]
    fn isotropic_requires_n2() {
        let zf = decreasing();
        assert!(matches!(
            isotropic_flips(&zf),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
