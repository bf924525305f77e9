//! Gaussian tetrahedron weights in the Grassmann algebra.
//!
//! A weight for a flip has input faces `x1, x2` and output faces `y1, y2`:
//!
//! ```text
//! W = exp(a x1 x2 + b11 x1 y1 + b12 x1 y2 + b21 x2 y1 + b22 x2 y2 + c y1 y2)
//! ```
//!
//! The kernel `f -> int W f dx1 dx2` intertwines the operators
//! `(d/dx1, x1, d/dx2, x2)` with `(d/dy1, y1, d/dy2, y2)` through a 4 x 4
//! matrix `m` (the canonical matrix), which preserves the split form `J`.
//! Matrices of that shape are exactly the `J`-orthogonal flips, so five
//! weights extracted from isotropic flips satisfy the Grassmann pentagon
//! relation up to an overall constant.

use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use crate::cells::{Flip, Triangle};
use crate::directsum::{unit_disc, FlipSet, ZetaFamily};
use crate::error::{Error, Result};
use crate::grassmann::{Generators, GrassmannElement};
use crate::matcore::CMatrix;
use crate::metric::{
    isotropic_change, isotropic_change_with_root, isotropic_flips, isotropic_flips_with,
    split_form, IsotropicFlips,
};
use crate::scalar::{Real, C};

/// Gaussian weight `exp(a x1x2 + sum b_ij x_i y_j + c y1y2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussWeight<T> {
    pub a: C<T>,
    /// `b[i][j]` multiplies `x_{i+1} y_{j+1}`.
    pub b: [[C<T>; 2]; 2],
    pub c: C<T>,
    /// `[x1, x2, y1, y2]`.
    pub faces: [Triangle; 4],
}

/// Faces `[x1, x2, y1, y2]` of the weight attached to a flip.
pub fn faces_for(flip: Flip) -> [Triangle; 4] {
    let [x1, x2] = flip.inputs();
    let [y1, y2] = flip.outputs();
    [x1, x2, y1, y2]
}

/// The face wiring of all five tetrahedra, in `P, Q, R, S, T` order.
pub fn wiring_table() -> [(Flip, [Triangle; 4]); 5] {
    Flip::ALL.map(|f| (f, faces_for(f)))
}

fn delta_of<T: Real>(b: &[[C<T>; 2]; 2]) -> C<T> {
    b[0][0] * b[1][1] - b[0][1] * b[1][0]
}

impl<T: Real> GaussWeight<T> {
    pub fn new(a: C<T>, b: [[C<T>; 2]; 2], c: C<T>, faces: [Triangle; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in 0..i {
                if faces[i] == faces[j] {
                    return Err(Error::DegenerateParameters(format!(
                        "face {} used twice",
                        faces[i]
                    )));
                }
            }
        }
        let scale = b.iter().flatten().map(|z| z.norm()).fold(T::zero(), T::max);
        let delta = delta_of(&b);
        if delta.norm() <= T::structural_tol() * scale * scale || delta.is_zero() {
            return Err(Error::DegenerateDelta);
        }
        Ok(Self { a, b, c, faces })
    }

    /// Weight wired to the faces of `flip`.
    pub fn for_flip(flip: Flip, a: C<T>, b: [[C<T>; 2]; 2], c: C<T>) -> Result<Self> {
        Self::new(a, b, c, faces_for(flip))
    }

    /// Parameters drawn from the unit disc, resampled until `|delta| > 0.1`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, faces: [Triangle; 4]) -> Self {
        loop {
            let b = [
                [unit_disc(rng), unit_disc(rng)],
                [unit_disc(rng), unit_disc(rng)],
            ];
            if delta_of(&b).norm() > T::lit(0.1) {
                return Self::new(unit_disc(rng), b, unit_disc(rng), faces)
                    .expect("distinct faces");
            }
        }
    }

    /// `b11 b22 - b12 b21`.
    pub fn delta(&self) -> C<T> {
        delta_of(&self.b)
    }

    /// Largest parameter difference, ignoring faces.
    pub fn param_dist(&self, other: &Self) -> T {
        let mut d = (self.a - other.a).norm().max((self.c - other.c).norm());
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.b[i][j] - other.b[i][j]).norm());
            }
        }
        d
    }

    /// Same weight on different faces.
    pub fn with_faces(&self, faces: [Triangle; 4]) -> Result<Self> {
        Self::new(self.a, self.b, self.c, faces)
    }

    /// Quadratic exponent over generators `gen[0..4]` playing `x1, x2, y1, y2`.
    fn exponent(&self, num_gens: usize, gen: [usize; 4]) -> GrassmannElement<C<T>> {
        let [x1, x2, y1, y2] = gen;
        let pairs = [
            (x1, x2, self.a),
            (x1, y1, self.b[0][0]),
            (x1, y2, self.b[0][1]),
            (x2, y1, self.b[1][0]),
            (x2, y2, self.b[1][1]),
            (y1, y2, self.c),
        ];
        pairs
            .iter()
            .fold(GrassmannElement::zero(num_gens), |acc, &(i, j, k)| {
                &acc + &GrassmannElement::word(num_gens, &[i, j], k)
            })
    }
}

impl<T: Real> fmt::Display for GaussWeight<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x1, x2, y1, y2] = self.faces;
        write!(
            f,
            "x1={x1} x2={x2} y1={y1} y2={y2}: a={} b=[[{}, {}], [{}, {}]] c={}",
            self.a, self.b[0][0], self.b[0][1], self.b[1][0], self.b[1][1], self.c
        )
    }
}

/// The weight over four generators ordered `x1, x2, y1, y2`.
pub fn weight_element<T: Real>(w: &GaussWeight<T>) -> GrassmannElement<C<T>> {
    w.exponent(4, [0, 1, 2, 3])
        .exp()
        .expect("even exponent without scalar part")
}

/// The weight inside a larger algebra, generators located by face.
pub fn weight_element_in<T: Real>(w: &GaussWeight<T>, gens: &Generators) -> GrassmannElement<C<T>> {
    let idx = w.faces.map(|t| gens.face(t));
    w.exponent(gens.len(), idx)
        .exp()
        .expect("even exponent without scalar part")
}

/// Canonical matrix of a weight on the ordered bases
/// `(d/dx1, x1, d/dx2, x2)` and `(d/dy1, y1, d/dy2, y2)`.
pub fn canonical_matrix<T: Real>(w: &GaussWeight<T>) -> Result<CMatrix<T>> {
    let d = w.delta();
    if d.is_zero() {
        return Err(Error::DegenerateDelta);
    }
    let (a, c) = (w.a, w.c);
    let [[b11, b12], [b21, b22]] = w.b;
    let e = a * c - d;
    let m = CMatrix::from_rows(&[
        vec![c * b21, b11 * e, -c * b11, b21 * e],
        vec![-b22, -a * b12, b12, -a * b22],
        vec![c * b22, b12 * e, -c * b12, b22 * e],
        vec![b21, a * b11, -b11, a * b21],
    ]);
    Ok(m.scale(C::<T>::one() / d))
}

/// `max |m^T J m - J|` for a 4 x 4 matrix.
pub fn j_residual<T: Real>(m: &CMatrix<T>) -> T {
    let j = split_form::<T>(2);
    (&(&m.transpose() * &j) * m).dist(&j)
}

type Op<T> = Box<dyn Fn(&GrassmannElement<C<T>>) -> GrassmannElement<C<T>>>;

fn ops<T: Real>(d: usize, x: usize) -> [Op<T>; 2] {
    [
        Box::new(move |f| f.left_deriv(d)),
        Box::new(move |f| f.mul_generator(x)),
    ]
}

/// Operator-push check of the canonical matrix: realizes
/// `K f = int W f dx1 dx2` and returns the largest coefficient of
/// `Y_a K f - sum_b m_ab K X_b f` over all `a` and the monomials
/// `f in {1, x1, x2, x1 x2}`, relative to the size of the terms involved.
///
/// The identity is a statement about `K` on functions of the input
/// variables; a `y` inside `f` would also be hit by `d/dy`.
pub fn verify_canonical<T: Real>(w: &GaussWeight<T>) -> Result<T> {
    verify_matrix(w, &canonical_matrix(w)?)
}

/// [`verify_canonical`] against an arbitrary candidate matrix.
pub fn verify_matrix<T: Real>(w: &GaussWeight<T>, m: &CMatrix<T>) -> Result<T> {
    if w.delta().is_zero() {
        return Err(Error::DegenerateDelta);
    }
    let weight = weight_element(w);
    let kernel = |f: &GrassmannElement<C<T>>| (&weight * f).berezin(&[0, 1]);
    let [dx1, x1] = ops::<T>(0, 0);
    let [dx2, x2] = ops::<T>(1, 1);
    let [dy1, y1] = ops::<T>(2, 2);
    let [dy2, y2] = ops::<T>(3, 3);
    let xs = [dx1, x1, dx2, x2];
    let ys = [dy1, y1, dy2, y2];
    let mut worst = T::zero();
    for mask in 0..4u64 {
        let f = GrassmannElement::<C<T>>::monomial(4, mask);
        let pushed: Vec<_> = xs.iter().map(|op| kernel(&op(&f))).collect();
        let kf = kernel(&f);
        for (a, y) in ys.iter().enumerate() {
            let lhs = y(&kf);
            let mut rhs = GrassmannElement::zero(4);
            for (b, p) in pushed.iter().enumerate() {
                rhs = &rhs + &p.scale(&m[(a, b)]);
            }
            let scale = T::one().max(max_coeff(&lhs)).max(max_coeff(&rhs));
            worst = worst.max(max_coeff(&(&lhs - &rhs)) / scale);
        }
    }
    Ok(worst)
}

fn max_coeff<T: Real>(e: &GrassmannElement<C<T>>) -> T {
    e.terms().map(|(_, k)| k.norm()).fold(T::zero(), T::max)
}

/// Recover the weight whose canonical matrix is `m`; the result is
/// validated by rebuilding `m`.
pub fn weight_from_matrix<T: Real>(m: &CMatrix<T>, faces: [Triangle; 4]) -> Result<GaussWeight<T>> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch(
            "canonical matrices are 4 x 4".into(),
        ));
    }
    let e = |r: usize, c: usize| m[(r - 1, c - 1)];
    let scale = T::one().max(m.max_abs());
    let tiny = T::structural_tol() * scale;
    let den = e(2, 1) * e(4, 3) - e(2, 3) * e(4, 1);
    if den.norm() <= tiny * scale {
        return Err(Error::NotGaussianGeneric(
            "m21 m43 - m23 m41 vanishes".into(),
        ));
    }
    let d = C::<T>::one() / den;
    let b = [[-d * e(4, 3), d * e(2, 3)], [d * e(4, 1), -d * e(2, 1)]];
    let best = |cands: [(C<T>, C<T>); 4]| -> Result<C<T>> {
        let (num, den) = cands
            .into_iter()
            .max_by(|p, q| p.1.norm().partial_cmp(&q.1.norm()).expect("finite entries"))
            .expect("four candidates");
        if den.norm() <= tiny {
            return Err(Error::NotGaussianGeneric("no usable ratio".into()));
        }
        Ok(num / den)
    };
    let a = best([
        (e(2, 4), e(2, 1)),
        (-e(2, 2), e(2, 3)),
        (-e(4, 2), e(4, 3)),
        (e(4, 4), e(4, 1)),
    ])?;
    let c = best([
        (e(1, 1), e(4, 1)),
        (e(1, 3), e(4, 3)),
        (-e(3, 1), e(2, 1)),
        (-e(3, 3), e(2, 3)),
    ])?;
    let w = GaussWeight::new(a, b, c, faces).map_err(|err| match err {
        Error::DegenerateDelta => Error::NotGaussianGeneric("recovered delta vanishes".into()),
        other => other,
    })?;
    let back = canonical_matrix(&w)?;
    let err = back.dist(m);
    if err > T::lit(1e-9) * scale {
        return Err(Error::NotGaussianGeneric(format!(
            "no consistent (a, c): reconstruction error {:.3e}",
            err.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(w)
}

/// Weights for the five flips of an `n = 2` flip set, read off the blocks.
pub fn extract_weights<T: Real>(fs: &FlipSet<T>) -> Result<[GaussWeight<T>; 5]> {
    if fs.n() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "weights need n = 2, got {}",
            fs.n()
        )));
    }
    let mut out = Vec::with_capacity(5);
    for f in Flip::ALL {
        out.push(weight_from_matrix(&fs.block(f), faces_for(f))?);
    }
    Ok(out.try_into().expect("five weights"))
}

/// Isotropic flips whose blocks all have determinant `+1`, the component
/// containing canonical matrices. Swapping the two isotropic vectors of a
/// triangle (the other root) flips the sign of both flips touching it; the
/// swap pattern with fewest swaps is used.
pub fn gaussian_isotropic_flips<T: Real>(zf: &ZetaFamily<T>) -> Result<IsotropicFlips<T>> {
    let base = isotropic_flips(zf)?;
    let tris = Triangle::all();
    let negative: Vec<bool> = Flip::ALL
        .iter()
        .map(|&f| base.flips.block(f).det().re < T::zero())
        .collect();
    if !negative.contains(&true) {
        return Ok(base);
    }
    let touches = |mask: u32, f: Flip| {
        faces_for(f)
            .iter()
            .filter(|t| mask >> tris.iter().position(|u| u == *t).expect("pentagon face") & 1 == 1)
            .count()
            % 2
            == 1
    };
    let mut masks: Vec<u32> = (0..1u32 << tris.len()).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mask = masks
        .into_iter()
        .find(|&m| {
            Flip::ALL
                .iter()
                .zip(&negative)
                .all(|(&f, &neg)| touches(m, f) == neg)
        })
        .ok_or_else(|| Error::DegenerateParameters("flip determinants are inconsistent".into()))?;
    isotropic_flips_with(zf, |t, g| {
        let change = isotropic_change(g, None)?;
        let pos = tris.iter().position(|u| *u == t).expect("pentagon face");
        if mask >> pos & 1 == 1 {
            isotropic_change_with_root(g, -change.root, None)
        } else {
            Ok(change)
        }
    })
}

/// Flip set built from the canonical matrices of five weights.
pub fn flips_from_weights<T: Real>(weights: &[GaussWeight<T>; 5]) -> Result<FlipSet<T>> {
    let mut blocks = Vec::with_capacity(5);
    for w in weights {
        blocks.push(canonical_matrix(w)?);
    }
    FlipSet::from_blocks(2, blocks.try_into().expect("five blocks"))
}

/// The ten faces of the pentagon in generator order.
pub fn pentagon_generators() -> Generators {
    Generators::faces(Triangle::all())
}

/// One side of the Grassmann pentagon relation.
pub type Side<T> = GrassmannElement<C<T>>;

/// Both sides of the Grassmann pentagon relation over the ten face
/// generators: `L = int W1234 W1345 dx134` and
/// `R = int W1245 W2345 W1235 dx125 dx235 dx245`.
pub fn pentagon_sides<T: Real>(weights: &[GaussWeight<T>; 5]) -> Result<(Side<T>, Side<T>)> {
    for (f, w) in Flip::ALL.iter().zip(weights) {
        if w.faces != faces_for(*f) {
            return Err(Error::DegenerateParameters(format!(
                "weight for tetrahedron {} is wired to the wrong faces",
                f.label()
            )));
        }
    }
    let gens = pentagon_generators();
    let el = |f: Flip| weight_element_in(&weights[f as usize], &gens);
    let g = |i, j, k| gens.face(Triangle::of(i, j, k));
    let left = (&el(Flip::P) * &el(Flip::Q)).berezin(&[g(1, 3, 4)]);
    let right = (&(&el(Flip::R) * &el(Flip::S)) * &el(Flip::T)).berezin(&[
        g(1, 2, 5),
        g(2, 3, 5),
        g(2, 4, 5),
    ]);
    Ok((left, right))
}

/// Outcome of a Grassmann pentagon check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PentagonOutcome<T> {
    /// Largest `|R_m - const L_m|` over monomials, relative to `max |R_m|`.
    pub residual: T,
    pub constant: C<T>,
}

/// Compare `R` with `const * L`, `const` read off the largest `L` coefficient.
pub fn proportionality<T: Real>(
    left: &GrassmannElement<C<T>>,
    right: &GrassmannElement<C<T>>,
) -> Result<PentagonOutcome<T>> {
    let (mask, lead) = left
        .terms()
        .max_by(|p, q| {
            p.1.norm()
                .partial_cmp(&q.1.norm())
                .expect("finite coefficients")
        })
        .ok_or(Error::ZeroSide)?;
    let constant = right.coeff(mask) / *lead;
    let scale = max_coeff(right);
    if scale.is_zero() {
        return Ok(PentagonOutcome {
            residual: T::one(),
            constant,
        });
    }
    let diff = right - &left.scale(&constant);
    Ok(PentagonOutcome {
        residual: max_coeff(&diff) / scale,
        constant,
    })
}

/// Check the Grassmann pentagon relation for five weights in
/// `P, Q, R, S, T` (1234, 1345, 1245, 2345, 1235) order.
/// Fails with `InconsistentRatio` when the residual exceeds `tol`.
pub fn pentagon_grassmann<T: Real>(
    weights: &[GaussWeight<T>; 5],
    tol: T,
) -> Result<PentagonOutcome<T>> {
    let (left, right) = pentagon_sides(weights)?;
    let out = proportionality(&left, &right)?;
    if out.residual.is_nan() || out.residual > tol || out.constant.is_zero() {
        return Err(Error::InconsistentRatio {
            deviation: out.residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(out)
}
