//! Based triangle spaces built from a family of five matrices `zeta_1..zeta_5`,
//! the five flip matrices relating the stacked bases, and the direct-sum
//! pentagon relation `QP = TSR`.
//!
//! The space attached to the pentagon consists of block rows
//! `(f_1, ..., f_5)` of `n x n` blocks obeying
//! `sum f_m = 0` and `sum f_m zeta_m = 0`. The triangle `ijk` gets the
//! basis whose only nonzero blocks sit at `i`, `j`, `k`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;

use crate::cells::{Flip, Triangle};
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, DEFAULT_COND_CAP};
use crate::scalar::{csqrt, Real, Sign, C};

/// Five `n x n` matrices with pairwise invertible differences.
#[derive(Debug, Clone)]
pub struct ZetaFamily<T> {
    n: usize,
    zeta: [CMatrix<T>; 5],
    symmetric: bool,
    // inverses of zeta_i - zeta_j for i < j, row-major over the 5x5 grid
    diff_inv: Vec<Option<CMatrix<T>>>,
}

/// Validation knobs for [`ZetaFamily::with_options`].
#[derive(Debug, Clone, Copy)]
pub struct FamilyOptions<T> {
    /// Reject families whose members are not symmetric.
    pub require_symmetric: bool,
    /// Cap on the condition estimate of every difference.
    pub cond_cap: T,
}

impl<T: Real> Default for FamilyOptions<T> {
    fn default() -> Self {
        Self {
            require_symmetric: true,
            cond_cap: T::lit(DEFAULT_COND_CAP),
        }
    }
}

impl<T: Real> ZetaFamily<T> {
    /// Symmetric family with the default condition cap.
    pub fn new(zeta: [CMatrix<T>; 5]) -> Result<Self> {
        Self::with_options(zeta, FamilyOptions::default())
    }

    /// Family for the metric-free construction; symmetry not required.
    pub fn general(zeta: [CMatrix<T>; 5]) -> Result<Self> {
        Self::with_options(
            zeta,
            FamilyOptions {
                require_symmetric: false,
                ..Default::default()
            },
        )
    }

    pub fn with_options(zeta: [CMatrix<T>; 5], opts: FamilyOptions<T>) -> Result<Self> {
        let n = zeta[0].rows();
        if n == 0 || zeta.iter().any(|z| z.rows() != n || z.cols() != n) {
            return Err(Error::DimensionMismatch(
                "zeta matrices must all be n x n with n >= 1".into(),
            ));
        }
        let symmetric = zeta.iter().all(CMatrix::is_symmetric);
        if opts.require_symmetric {
            if let Some(bad) = zeta.iter().find(|z| !z.is_symmetric()) {
                return Err(Error::NotSymmetric {
                    residual: bad.symmetry_residual().to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let mut diff_inv = vec![None; 25];
        for i in 0..5 {
            for j in i + 1..5 {
                let d = &zeta[i] - &zeta[j];
                diff_inv[i * 5 + j] = Some(d.inverse_capped(opts.cond_cap)?);
            }
        }
        Ok(Self {
            n,
            zeta,
            symmetric,
            diff_inv,
        })
    }

    /// Scalar family (`n = 1`).
    pub fn from_scalars(z: [C<T>; 5]) -> Result<Self> {
        Self::new(z.map(CMatrix::scalar))
    }

    /// Random symmetric family: entries uniform in the complex unit disc,
    /// symmetrized, resampled until every difference has condition
    /// estimate at most `max_cond`.
    pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize, max_cond: T) -> Self {
        Self::random_with(rng, n, max_cond, true)
    }

    /// Random family without the symmetry constraint.
    pub fn random_general<R: Rng + ?Sized>(rng: &mut R, n: usize, max_cond: T) -> Self {
        Self::random_with(rng, n, max_cond, false)
    }

    fn random_with<R: Rng + ?Sized>(rng: &mut R, n: usize, max_cond: T, symmetric: bool) -> Self {
        let opts = FamilyOptions {
            require_symmetric: symmetric,
            cond_cap: max_cond,
        };
        loop {
            let zeta = std::array::from_fn(|_| {
                let a = CMatrix::from_fn(n, n, |_, _| unit_disc(rng));
                if symmetric {
                    (&a + &a.transpose()).scale(C::new(T::lit(0.5), T::zero()))
                } else {
                    a
                }
            });
            if let Ok(f) = Self::with_options(zeta, opts) {
                return f;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `zeta_i`, 1-based.
    pub fn zeta(&self, i: u8) -> &CMatrix<T> {
        &self.zeta[usize::from(i) - 1]
    }

    pub fn members(&self) -> &[CMatrix<T>; 5] {
        &self.zeta
    }

    /// `zeta_ij = zeta_i - zeta_j`, 1-based.
    pub fn diff(&self, i: u8, j: u8) -> CMatrix<T> {
        self.zeta(i) - self.zeta(j)
    }

    /// Inverse of `zeta_ij`, 1-based, `i != j`.
    pub fn diff_inv(&self, i: u8, j: u8) -> CMatrix<T> {
        assert_ne!(i, j, "zeta_ii is not invertible");
        let (a, b) = (usize::from(i) - 1, usize::from(j) - 1);
        if a < b {
            self.diff_inv[a * 5 + b].clone().expect("cached")
        } else {
            -self.diff_inv[b * 5 + a].as_ref().expect("cached")
        }
    }
}

pub(crate) fn unit_disc<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    loop {
        let (x, y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if x * x + y * y < 1.0 {
            return C::new(T::lit(x), T::lit(y));
        }
    }
}

/// Basis of the space attached to a triangle: five `n x n` blocks, the
/// rows of `[block_1 ... block_5]` being the basis vectors.
#[derive(Debug, Clone)]
pub struct TriangleBasis<T> {
    pub triangle: Triangle,
    pub blocks: [CMatrix<T>; 5],
}

impl<T: Real> TriangleBasis<T> {
    /// Block at vertex `v` (1-based).
    pub fn block(&self, v: u8) -> &CMatrix<T> {
        &self.blocks[usize::from(v) - 1]
    }

    /// The `n x 5n` matrix whose rows are the basis vectors.
    pub fn matrix(&self) -> CMatrix<T> {
        let parts: Vec<&CMatrix<T>> = self.blocks.iter().collect();
        CMatrix::hstack(&parts)
    }

    /// Left-multiply every block by `m` (change of basis within the triangle).
    pub fn transformed(&self, m: &CMatrix<T>) -> Self {
        Self {
            triangle: self.triangle,
            blocks: self.blocks.clone().map(|b| m * &b),
        }
    }

    /// Larger of the residuals of `sum f_m = 0` and `sum f_m zeta_m = 0`.
    pub fn relation_residual(&self, zf: &ZetaFamily<T>) -> T {
        let n = zf.n();
        let mut sum = CMatrix::zeros(n, n);
        let mut weighted = CMatrix::zeros(n, n);
        for v in 1..=5u8 {
            sum = &sum + self.block(v);
            weighted = &weighted + &(self.block(v) * zf.zeta(v));
        }
        sum.max_abs().max(weighted.max_abs())
    }
}

/// Basis of triangle `ijk` with leading block `lead` (identity when `None`):
/// blocks `lead`, `lead zeta_ik zeta_kj^-1`, `lead zeta_ij zeta_jk^-1` at
/// `i`, `j`, `k`.
pub fn triangle_basis<T: Real>(
    zf: &ZetaFamily<T>,
    tri: Triangle,
    lead: Option<&CMatrix<T>>,
) -> Result<TriangleBasis<T>> {
    let n = zf.n();
    let [i, j, k] = tri.vertices();
    let lead = match lead {
        Some(l) => {
            if l.rows() != n || l.cols() != n {
                return Err(Error::DimensionMismatch("lead block must be n x n".into()));
            }
            l.inverse()?;
            l.clone()
        }
        None => CMatrix::identity(n),
    };
    let bj = &lead * &(&zf.diff(i, k) * &zf.diff_inv(k, j));
    let bk = &lead * &(&zf.diff(i, j) * &zf.diff_inv(j, k));
    let mut blocks: [CMatrix<T>; 5] = std::array::from_fn(|_| CMatrix::zeros(n, n));
    blocks[usize::from(i) - 1] = lead;
    blocks[usize::from(j) - 1] = bj;
    blocks[usize::from(k) - 1] = bk;
    Ok(TriangleBasis {
        triangle: tri,
        blocks,
    })
}

/// The five `3n x 3n` flip matrices. Each acts on stacked bases:
/// `P (f124; f234; f145) = (f123; f134; f145)` and so on.
#[derive(Debug, Clone)]
pub struct FlipSet<T> {
    n: usize,
    mats: [CMatrix<T>; 5],
}

impl<T: Real> FlipSet<T> {
    /// Assemble from full `3n x 3n` matrices in `P, Q, R, S, T` order.
    pub fn from_matrices(n: usize, mats: [CMatrix<T>; 5]) -> Result<Self> {
        if mats.iter().any(|m| m.rows() != 3 * n || m.cols() != 3 * n) {
            return Err(Error::DimensionMismatch(
                "flip matrices must be 3n x 3n".into(),
            ));
        }
        Ok(Self { n, mats })
    }

    /// Assemble from the nontrivial `2n x 2n` blocks, embedding each in
    /// the slots its flip acts on with an identity block elsewhere.
    pub fn from_blocks(n: usize, blocks: [CMatrix<T>; 5]) -> Result<Self> {
        if blocks
            .iter()
            .any(|m| m.rows() != 2 * n || m.cols() != 2 * n)
        {
            return Err(Error::DimensionMismatch(
                "flip blocks must be 2n x 2n".into(),
            ));
        }
        let mut i = 0;
        let mats = blocks.map(|b| {
            let m = embed(n, Flip::ALL[i], &b);
            i += 1;
            m
        });
        Ok(Self { n, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, f: Flip) -> &CMatrix<T> {
        &self.mats[f as usize]
    }

    /// Nontrivial `2n x 2n` block of a flip.
    pub fn block(&self, f: Flip) -> CMatrix<T> {
        let n = self.n;
        let (a, b) = f.slots();
        let m = self.get(f);
        let mut out = CMatrix::zeros(2 * n, 2 * n);
        out.set_block(0, 0, &m.block(a * n, a * n, n, n));
        out.set_block(0, n, &m.block(a * n, b * n, n, n));
        out.set_block(n, 0, &m.block(b * n, a * n, n, n));
        out.set_block(n, n, &m.block(b * n, b * n, n, n));
        out
    }

    /// `QP` (left side of the move).
    pub fn lhs(&self) -> CMatrix<T> {
        self.get(Flip::Q) * self.get(Flip::P)
    }

    /// `TSR` (right side of the move).
    pub fn rhs(&self) -> CMatrix<T> {
        &(self.get(Flip::T) * self.get(Flip::S)) * self.get(Flip::R)
    }

    /// Largest `|M^T M - I|` entry over the five matrices.
    pub fn orthogonality_residual(&self) -> T {
        let id = CMatrix::identity(3 * self.n);
        self.mats
            .iter()
            .map(|m| (&m.transpose() * m).dist(&id))
            .fold(T::zero(), T::max)
    }

    /// Largest `|M^T G M - G|` entry over the five matrices for a `3n x 3n` form `G`.
    pub fn form_residual(&self, g: &CMatrix<T>) -> T {
        self.mats
            .iter()
            .map(|m| (&(&m.transpose() * g) * m).dist(g))
            .fold(T::zero(), T::max)
    }
}

/// Embed a `2n x 2n` block acting on the slots of `flip` into `3n x 3n`.
pub fn embed<T: Real>(n: usize, flip: Flip, block: &CMatrix<T>) -> CMatrix<T> {
    let (a, b) = flip.slots();
    let mut m = CMatrix::identity(3 * n);
    m.set_block(a * n, a * n, &block.block(0, 0, n, n));
    m.set_block(a * n, b * n, &block.block(0, n, n, n));
    m.set_block(b * n, a * n, &block.block(n, 0, n, n));
    m.set_block(b * n, b * n, &block.block(n, n, n, n));
    m
}

/// Matrix `M` with `M * from = to`, where `from` has full row rank and the
/// rows of `to` lie in its row space. With `from^H = Q R`,
/// `M = to Q R^-H`.
pub fn transition<T: Real>(from: &CMatrix<T>, to: &CMatrix<T>) -> Result<CMatrix<T>> {
    let (q, r) = from.adjoint().thin_qr()?;
    let m = &(to * &q) * &r.inverse()?.adjoint();
    let scale = T::one().max(to.max_abs());
    let resid = (&m * from).dist(to);
    if resid > T::structural_tol() * scale * T::lit(1e2) {
        return Err(Error::DegenerateParameters(format!(
            "target basis not in the span of the source (residual {resid:e})"
        )));
    }
    Ok(m)
}

/// Flip matrices relating stacked bases given per triangle as `n x 5n`
/// row matrices.
pub fn flips_from_bases<T: Real>(
    n: usize,
    bases: &BTreeMap<Triangle, CMatrix<T>>,
) -> Result<FlipSet<T>> {
    let mut blocks = Vec::with_capacity(5);
    for f in Flip::ALL {
        let [i1, i2] = f.inputs();
        let [o1, o2] = f.outputs();
        let get = |t: Triangle| {
            bases
                .get(&t)
                .ok_or_else(|| Error::DegenerateParameters(format!("missing basis for {t}")))
        };
        let from = CMatrix::vstack(&[get(i1)?, get(i2)?]);
        let to = CMatrix::vstack(&[get(o1)?, get(o2)?]);
        blocks.push(transition(&from, &to)?);
    }
    let blocks: [CMatrix<T>; 5] = blocks.try_into().expect("five flips");
    FlipSet::from_blocks(n, blocks)
}

/// Bases with identity leading block for all ten triangles.
pub fn all_bases<T: Real>(zf: &ZetaFamily<T>) -> Result<BTreeMap<Triangle, TriangleBasis<T>>> {
    Triangle::all()
        .into_iter()
        .map(|t| Ok((t, triangle_basis(zf, t, None)?)))
        .collect()
}

/// Flip matrices for the standard bases (identity leading blocks).
pub fn build_flips<T: Real>(zf: &ZetaFamily<T>) -> Result<FlipSet<T>> {
    let bases = all_bases(zf)?
        .into_iter()
        .map(|(t, b)| (t, b.matrix()))
        .collect();
    flips_from_bases(zf.n(), &bases)
}

/// `max |QP - TSR|`.
pub fn check_pentagon<T: Real>(fs: &FlipSet<T>) -> T {
    fs.lhs().dist(&fs.rhs())
}

/// Square-root branch for the cosine and sine of one tetrahedron.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KashaevBranch {
    pub cos: Sign,
    pub sin: Sign,
}

/// Cosine and sine attached to four distinct scalars `(z_i, z_j, z_k, z_l)`:
/// square roots of the cross-ratios `z_il z_jk / (z_ik z_jl)` and
/// `z_ij z_kl / (z_ik z_jl)`, principal branch times the chosen signs.
pub fn kashaev_angles<T: Real>(z: [C<T>; 4], branch: KashaevBranch) -> Result<(C<T>, C<T>)> {
    for a in 0..4 {
        for b in a + 1..4 {
            if (z[a] - z[b]).is_zero() {
                return Err(Error::DegenerateParameters(format!("z[{a}] == z[{b}]")));
            }
        }
    }
    let d = |a: usize, b: usize| z[a] - z[b];
    let den = d(0, 2) * d(1, 3);
    let cos = branch.cos.apply(csqrt(d(0, 3) * d(1, 2) / den));
    let sin = branch.sin.apply(csqrt(d(0, 1) * d(2, 3) / den));
    Ok((cos, sin))
}

/// The five `3 x 3` rotations for scalar parameters, with the same slot
/// layout as the general flips:
/// `P, T` rotate slots (1,2) as `[[c, -s], [s, c]]`, `Q, S` rotate (2,3)
/// as `[[c, s], [-s, c]]` and `R` rotates (1,3) as `[[c, s], [-s, c]]`.
pub fn kashaev_flips<T: Real>(
    z: [C<T>; 5],
    branch: impl Fn(Flip) -> KashaevBranch,
) -> Result<FlipSet<T>> {
    let mut blocks = Vec::with_capacity(5);
    for f in Flip::ALL {
        let tet = f.tetrahedron();
        let (c, s) = kashaev_angles(tet.map(|v| z[usize::from(v) - 1]), branch(f))?;
        let block = match f {
            Flip::P | Flip::T => CMatrix::from_rows(&[vec![c, -s], vec![s, c]]),
            Flip::Q | Flip::S | Flip::R => CMatrix::from_rows(&[vec![c, s], vec![-s, c]]),
        };
        blocks.push(block);
    }
    FlipSet::from_blocks(1, blocks.try_into().expect("five flips"))
}

/// Sign choices for all five flips: bit `2k` flips the cosine and bit
/// `2k + 1` the sine of flip `k` in `P, Q, R, S, T` order.
pub fn branch_from_mask(mask: u32) -> impl Fn(Flip) -> KashaevBranch {
    move |f: Flip| {
        let k = f as u32;
        let sign = |bit: u32| {
            if mask >> bit & 1 == 1 {
                Sign::Minus
            } else {
                Sign::Plus
            }
        };
        KashaevBranch {
            cos: sign(2 * k),
            sin: sign(2 * k + 1),
        }
    }
}

/// Scalar flips with the first sign mask (in increasing order) whose
/// pentagon residual is below `tol`. For real decreasing parameters the
/// all-plus mask `0` already works; complex parameters need other signs.
pub fn kashaev_flips_search<T: Real>(z: [C<T>; 5], tol: T) -> Result<(u32, FlipSet<T>)> {
    let mut best: Option<(T, u32, FlipSet<T>)> = None;
    for mask in 0..1u32 << 10 {
        let fs = kashaev_flips(z, branch_from_mask(mask))?;
        let res = check_pentagon(&fs);
        if res <= tol {
            return Ok((mask, fs));
        }
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, mask, fs));
        }
    }
    let (res, _, _) = best.expect("at least one mask");
    Err(Error::DegenerateParameters(format!(
        "no sign choice satisfies the relation (best residual {res:e})"
    )))
}

/// Identity flips; a degenerate but valid solution.
pub fn identity_flips<T: Real>(n: usize) -> FlipSet<T> {
    FlipSet {
        n,
        mats: std::array::from_fn(|_| CMatrix::identity(3 * n)),
    }
}
