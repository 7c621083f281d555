//! Rank-three lattices `Γ ⊂ C^2` with coordinates in a number field.
//!
//! In normalized form `Γ = <e1, e2, (α, β)>`. For an integer or rational
//! triple `(m, n, p)` we write `γ(m, n, p) = (n + pα, m + pβ)`; the
//! functional `L(z1, z2) = (m + pβ) z1 - (n + pα) z2` kills `γ(m, n, p)` and
//! maps the generators to `m + pβ`, `-(n + pα)` and `mα - nβ`. The vector
//! `γ` lies in the maximal complex line `H` of the real span exactly when
//! `n Im β - m Im α + p Im(ᾱβ) = 0`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::elliptic::{self, PeriodRatio};
use crate::error::{Error, Result};
use crate::field::{self, FieldElement, NumberField};
use crate::linalg::{self, IntMatrix};
use crate::rational::{canonical_integer_vector, primitive_integer_vector, Rat};

pub type Vector2 = [FieldElement; 2];

/// Default height bound of the normalization search.
pub const DEFAULT_NORM_HEIGHT: u32 = 10;

/// Three R-linearly independent vectors of `K^2` spanning `C^2` over C.
#[derive(Clone, Debug)]
pub struct SemiTorusLattice {
    field: NumberField,
    generators: [Vector2; 3],
}

impl SemiTorusLattice {
    /// Checks discreteness (real rank three) and the complex span. A
    /// reducible modulus is replaced by the factor vanishing at the
    /// embedding, with the coordinates reduced accordingly.
    pub fn validate(field: &NumberField, generators: [Vector2; 3]) -> Result<Self> {
        let mut field = field.clone();
        let mut generators = generators;
        if generators.iter().flatten().any(|x| !x.same_field(&field.zero())) {
            return Err(Error::FieldMismatch);
        }
        loop {
            match field.certify_irreducible() {
                Ok(()) => break,
                Err(Error::SplitRequired(sub)) => {
                    generators = generators.map(|v| v.map(|x| sub.reduce_into(&x)));
                    field = sub;
                }
                Err(e) => return Err(e),
            }
        }
        let ctx = field.conjugate_context()?;
        let real_rows: Vec<Vec<FieldElement>> = generators
            .iter()
            .map(|v| vec![ctx.re(&v[0]), ctx.im_part(&v[0]), ctx.re(&v[1]), ctx.im_part(&v[1])])
            .collect();
        if linalg::rank(&real_rows)? < 3 {
            return Err(Error::NotDiscreteOrRankDeficient);
        }
        let complex_rows: Vec<Vec<FieldElement>> = (0..2).map(|c| generators.iter().map(|v| v[c].clone()).collect()).collect();
        if linalg::rank(&complex_rows)? < 2 {
            return Err(Error::DegenerateSpan);
        }
        Ok(Self { field, generators })
    }

    /// Lattice `<e1, e2, (α, β)>`.
    pub fn standard(alpha: &FieldElement, beta: &FieldElement) -> Result<Self> {
        let k = alpha.field().clone();
        let gens = [[k.one(), k.zero()], [k.zero(), k.one()], [alpha.clone(), beta.clone()]];
        Self::validate(&k, gens)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn generators(&self) -> &[Vector2; 3] {
        &self.generators
    }

    /// Integer combination of the generators.
    pub fn combine(&self, coeffs: &[BigInt]) -> Vector2 {
        let mut out = [self.field.zero(), self.field.zero()];
        for (c, g) in coeffs.iter().zip(&self.generators) {
            if c.is_zero() {
                continue;
            }
            let q = Rat::from_integer(c.clone());
            out[0] = &out[0] + &g[0].scale(&q);
            out[1] = &out[1] + &g[1].scale(&q);
        }
        out
    }
}

/// A lattice rewritten as `<e1, e2, (α, β)>` with `α, β` non-real.
#[derive(Clone, Debug)]
pub struct NormalizedLattice {
    base: SemiTorusLattice,
    alpha: FieldElement,
    beta: FieldElement,
    /// Rows are the new basis vectors as integer combinations of the generators.
    recombination: IntMatrix,
    /// Columns `γ1, γ2`: original coordinates are `P` times normalized ones.
    change: [Vector2; 2],
    search_height: u32,
    functional: OnceLock<Result<[FieldElement; 3]>>,
}

impl NormalizedLattice {
    pub fn base(&self) -> &SemiTorusLattice {
        &self.base
    }

    pub fn field(&self) -> &NumberField {
        &self.base.field
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    pub fn recombination(&self) -> &IntMatrix {
        &self.recombination
    }

    /// The columns `γ1 = P e1` and `γ2 = P e2` in original coordinates.
    pub fn change_of_coordinates(&self) -> &[Vector2; 2] {
        &self.change
    }

    pub fn search_height(&self) -> u32 {
        self.search_height
    }

    /// Normalized coordinates to original ones.
    pub fn to_original(&self, v: &Vector2) -> Vector2 {
        let [g1, g2] = &self.change;
        [&(&g1[0] * &v[0]) + &(&g2[0] * &v[1]), &(&g1[1] * &v[0]) + &(&g2[1] * &v[1])]
    }

    /// `γ(m, n, p) = (n + pα, m + pβ)` in normalized coordinates.
    pub fn gamma(&self, t: &[Rat; 3]) -> Vector2 {
        [self.alpha.scale(&t[2]).add_rational(&t[1]), self.beta.scale(&t[2]).add_rational(&t[0])]
    }

    /// Values of the H-functional on the unit triples, as elements `i·Im(..)`
    /// of the conjugate closure: `(-i Im α, i Im β, i Im(ᾱβ))`.
    pub fn functional(&self) -> Result<&[FieldElement; 3]> {
        self.functional
            .get_or_init(|| {
                let ctx = self.field().conjugate_context()?;
                let half = Rat::new(1.into(), 2.into());
                let fm = -&ctx.im_part(&self.alpha);
                let fn_ = ctx.im_part(&self.beta);
                let cross = &(&ctx.conj(&self.alpha) * &ctx.embed(&self.beta)) - &(&ctx.embed(&self.alpha) * &ctx.conj(&self.beta));
                Ok([fm, fn_, cross.scale(&half)])
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Whether `{1, α, β}` is Q-linearly independent.
    pub fn v_is_three_dimensional(&self) -> Result<bool> {
        let k = self.field();
        Ok(field::q_dependence(&[k.one(), self.alpha.clone(), self.beta.clone()])?.is_empty())
    }
}

/// Values `0, 1, -1, 2, -2, ...` ranked in that order.
fn zigzag_rank(x: i64) -> u64 {
    if x > 0 {
        2 * x as u64 - 1
    } else {
        2 * x.unsigned_abs()
    }
}

fn zigzag_vectors(h: i64) -> Vec<[i64; 3]> {
    let mut vals: Vec<i64> = (-h..=h).collect();
    vals.sort_by_key(|&x| zigzag_rank(x));
    let mut out = Vec::new();
    for &a in &vals {
        for &b in &vals {
            for &c in &vals {
                if (a, b, c) != (0, 0, 0) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn height_of(v: &[i64; 3]) -> i64 {
    v.iter().map(|x| x.abs()).max().unwrap()
}

fn big(v: &[i64; 3]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Tries the basis whose first two vectors are the given combinations.
fn try_rows(lattice: &SemiTorusLattice, r1: &[i64; 3], r2: &[i64; 3], height: u32) -> Result<Option<NormalizedLattice>> {
    let (r1, r2) = (big(r1), big(r2));
    let c = linalg::cross(&r1, &r2);
    let g = c.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_one() {
        return Ok(None);
    }
    let g1 = lattice.combine(&r1);
    let g2 = lattice.combine(&r2);
    let det = &(&g1[0] * &g2[1]) - &(&g2[0] * &g1[1]);
    if det.is_zero() {
        return Ok(None);
    }
    // r3 · (r1 × r2) = 1
    let (u, _) = linalg::reduce_column(&c);
    let r3 = u[0].clone();
    let g3 = lattice.combine(&r3);
    let dinv = det.inv()?;
    let alpha = &(&(&g3[0] * &g2[1]) - &(&g2[0] * &g3[1])) * &dinv;
    let beta = &(&(&g1[0] * &g3[1]) - &(&g3[0] * &g1[1])) * &dinv;
    let ctx = lattice.field.conjugate_context()?;
    if ctx.is_real(&alpha) || ctx.is_real(&beta) {
        return Ok(None);
    }
    Ok(Some(NormalizedLattice {
        base: lattice.clone(),
        alpha,
        beta,
        recombination: vec![r1, r2, r3],
        change: [g1, g2],
        search_height: height,
        functional: OnceLock::new(),
    }))
}

/// Finds a unimodular recombination `γ1, γ2, γ3` of the generators such
/// that, in the coordinates with `γ1 = e1` and `γ2 = e2`, `γ3 = (α, β)`
/// with `α, β` non-real. The identity is tried first; then pairs of rows
/// `(r1, r2)` by increasing height, zigzag-lexicographic within a height.
pub fn normalize(lattice: &SemiTorusLattice, max_height: u32) -> Result<NormalizedLattice> {
    if let Some(n) = try_rows(lattice, &[1, 0, 0], &[0, 1, 0], 0)? {
        return Ok(n);
    }
    for h in 1..=max_height as i64 {
        let vecs = zigzag_vectors(h);
        for r1 in &vecs {
            for r2 in &vecs {
                if height_of(r1).max(height_of(r2)) < h {
                    continue;
                }
                if let Some(n) = try_rows(lattice, r1, r2, h as u32)? {
                    return Ok(n);
                }
            }
        }
    }
    Err(Error::SearchExhausted(max_height))
}

/// The Q-vector space `I` of triples with `γ(m, n, p) ∈ H`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationSpace {
    pub dim: usize,
    /// Reduced echelon basis.
    pub basis: Vec<[Rat; 3]>,
}

impl RelationSpace {
    /// Basis of the integer points `I ∩ Z^3`, in Hermite normal form.
    pub fn integer_basis(&self) -> Vec<[BigInt; 3]> {
        let rows: Vec<Vec<BigInt>> = match self.dim {
            0 => Vec::new(),
            1 => vec![canonical_integer_vector(&self.basis[0])],
            2 => {
                let a = primitive_integer_vector(&self.basis[0]);
                let b = primitive_integer_vector(&self.basis[1]);
                let normal = primitive_integer_vector(&crate::rational::to_rat_vec(&linalg::cross(&a, &b)));
                let (u, _) = linalg::reduce_column(&normal);
                linalg::hermite_rows(&u[1..])
            }
            _ => linalg::identity(3),
        };
        rows.into_iter().map(|r| [r[0].clone(), r[1].clone(), r[2].clone()]).collect()
    }

    pub fn contains(&self, t: &[Rat; 3]) -> bool {
        let mut rows: Vec<Vec<Rat>> = self.basis.iter().map(|b| b.to_vec()).collect();
        rows.push(t.to_vec());
        linalg::rank(&rows).unwrap() == self.dim
    }
}

fn to_triple(v: &[Rat]) -> [Rat; 3] {
    [v[0].clone(), v[1].clone(), v[2].clone()]
}

/// `I` computed from the exact functional, cross-checked against the
/// dependence of `{1, α, β}`.
pub fn relation_space(n: &NormalizedLattice) -> Result<RelationSpace> {
    let f = n.functional()?;
    let rel = field::q_dependence(f)?;
    let basis: Vec<[Rat; 3]> = linalg::row_space(&rel).iter().map(|v| to_triple(v)).collect();
    let dim = basis.len();
    if (dim == 2) == n.v_is_three_dimensional()? {
        return Err(Error::Internal(format!("relation space has dimension {dim} but V-dependence disagrees")));
    }
    Ok(RelationSpace { dim, basis })
}

/// Exact test for `γ(m, n, p) ∈ H`.
pub fn membership_h(n: &NormalizedLattice, t: &[Rat; 3]) -> Result<bool> {
    let f = n.functional()?;
    let v = &(&f[0].scale(&t[0]) + &f[1].scale(&t[1])) + &f[2].scale(&t[2]);
    Ok(v.is_zero())
}

/// Z-basis `(ω1, ω2)` of the span of three elements with one primitive
/// integer relation `relation · images = 0`. Returns the basis, the integer
/// coordinates of each image in it, and the coordinates of each basis
/// vector in terms of the images.
pub fn image_lattice_basis(images: &[FieldElement; 3], relation: &[BigInt; 3]) -> Result<ImageBasis> {
    let (u, g) = linalg::reduce_column(relation);
    if !g.is_one() {
        return Err(Error::NotPrimitive);
    }
    let check = images.iter().zip(relation).fold(images[0].field().zero(), |acc, (w, c)| &acc + &w.scale(&Rat::from_integer(c.clone())));
    if !check.is_zero() {
        return Err(Error::Internal("relation does not annihilate the images".into()));
    }
    let uinv = linalg::unimodular_inverse(&u);
    let combo = |col: usize| -> FieldElement {
        (0..3).fold(images[0].field().zero(), |acc, k| &acc + &images[k].scale(&Rat::from_integer(uinv[k][col].clone())))
    };
    let omega = [combo(1), combo(2)];
    let image_coords = [0, 1, 2].map(|k| [u[1][k].clone(), u[2][k].clone()]);
    let basis_coords = [1, 2].map(|col| [uinv[0][col].clone(), uinv[1][col].clone(), uinv[2][col].clone()]);
    Ok(ImageBasis { omega, image_coords, basis_coords })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageBasis {
    pub omega: [FieldElement; 2],
    /// `image_k = c[k][0] ω1 + c[k][1] ω2`.
    pub image_coords: [[BigInt; 2]; 3],
    /// `ω_j = sum_k c[j][k] image_k`.
    pub basis_coords: [[BigInt; 3]; 2],
}

/// The elliptic curve `C^2/Γ` modulo the complex line through `γ(m, n, p)`.
#[derive(Clone, Debug)]
pub struct QuotientCurve {
    pub triple: [i64; 3],
    /// Coefficients of `z1` and `z2` in the quotient map.
    pub functional: Vector2,
    /// Images of `e1`, `e2`, `(α, β)`.
    pub images: [FieldElement; 3],
    pub basis: ImageBasis,
    pub tau: PeriodRatio,
}

fn is_primitive(t: &[i64; 3]) -> bool {
    t.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

pub fn quotient_curve(n: &NormalizedLattice, t: [i64; 3]) -> Result<QuotientCurve> {
    if !is_primitive(&t) {
        return Err(Error::NotPrimitive);
    }
    let q = t.map(|x| Rat::from_integer(x.into()));
    if membership_h(n, &q)? {
        return Err(Error::InHyperplane);
    }
    let [m, nn, p] = &q;
    let f1 = n.beta.scale(p).add_rational(m);
    let f2 = -&n.alpha.scale(p).add_rational(nn);
    let third = &n.alpha.scale(m) - &n.beta.scale(nn);
    let images = [f1.clone(), f2.clone(), third];
    let relation = [BigInt::from(t[1]), BigInt::from(t[0]), BigInt::from(t[2])];
    let basis = image_lattice_basis(&images, &relation)?;
    let tau = elliptic::period_ratio(&basis.omega[0], &basis.omega[1])?;
    Ok(QuotientCurve { triple: t, functional: [f1, f2], images, basis, tau })
}

/// Primitive triples with entries bounded by `height`, up to sign (first
/// nonzero entry positive), ordered by height, then number of nonzero
/// entries, then lexicographically.
pub fn primitive_triples(height: u32) -> Vec<[i64; 3]> {
    let h = height as i64;
    let mut out = Vec::new();
    for m in -h..=h {
        for n in -h..=h {
            for p in -h..=h {
                let t = [m, n, p];
                let first = t.iter().find(|&&x| x != 0);
                if first.is_some_and(|&x| x > 0) && is_primitive(&t) {
                    out.push(t);
                }
            }
        }
    }
    out.sort_by_key(|t| (height_of(t), t.iter().filter(|&&x| x != 0).count(), *t));
    out
}

/// All quotient curves for primitive triples up to `height`, skipping triples in `H`.
pub fn enumerate_quotients(n: &NormalizedLattice, height: u32) -> Result<Vec<QuotientCurve>> {
    n.functional()?;
    let triples = primitive_triples(height);
    let curves: Vec<Result<Option<QuotientCurve>>> = triples
        .par_iter()
        .map(|&t| match quotient_curve(n, t) {
            Ok(c) => Ok(Some(c)),
            Err(Error::InHyperplane) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut out = Vec::with_capacity(curves.len());
    for c in curves {
        if let Some(c) = c? {
            out.push(c);
        }
    }
    Ok(out)
}

/// A two-dimensional Q-subspace of `Q^3`, in coordinates for `{1, α, β}`,
/// stored by its reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPlane {
    basis: [[Rat; 3]; 2],
}

impl QPlane {
    /// `None` unless the vectors span exactly two dimensions.
    pub fn span(vectors: &[[Rat; 3]]) -> Option<Self> {
        let rows: Vec<Vec<Rat>> = vectors.iter().map(|v| v.to_vec()).collect();
        let b = linalg::row_space(&rows);
        (b.len() == 2).then(|| Self { basis: [to_triple(&b[0]), to_triple(&b[1])] })
    }

    pub fn basis(&self) -> &[[Rat; 3]; 2] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rat; 3]) -> bool {
        let rows = vec![self.basis[0].to_vec(), self.basis[1].to_vec(), v.to_vec()];
        linalg::rank(&rows).unwrap() == 2
    }
}

fn rats(v: [i64; 3]) -> [Rat; 3] {
    v.map(|x| Rat::from_integer(x.into()))
}

/// The plane `<m + pβ, n + pα, mα - nβ>_Q`.
pub fn e_plane(n: &NormalizedLattice, t: &[Rat; 3]) -> Result<QPlane> {
    if !n.v_is_three_dimensional()? {
        return Err(Error::DegenerateV);
    }
    if t.iter().all(Zero::is_zero) {
        return Err(Error::NotPrimitive);
    }
    let [m, nn, p] = t.clone();
    let z = Rat::zero();
    let vs = [[m.clone(), z.clone(), p.clone()], [nn.clone(), p, z.clone()], [z, m, -nn]];
    QPlane::span(&vs).ok_or_else(|| Error::Internal("E-plane is not two-dimensional".into()))
}

/// Coordinates of `x` in the basis `{1, α, β}`, if it lies in their span.
pub fn coordinates_in_v(n: &NormalizedLattice, x: &FieldElement) -> Option<[Rat; 3]> {
    let k = n.field();
    let cols = [k.one(), n.alpha.clone(), n.beta.clone()];
    let d = k.degree();
    let rows: Vec<Vec<Rat>> = (0..d).map(|i| cols.iter().map(|c| c.coords()[i].clone()).collect()).collect();
    linalg::solve(&rows, x.coords()).map(|v| to_triple(&v))
}

/// Q-span of the images of the generators under the quotient functional.
pub fn image_plane(n: &NormalizedLattice, t: &[Rat; 3]) -> Result<QPlane> {
    if !n.v_is_three_dimensional()? {
        return Err(Error::DegenerateV);
    }
    let [m, nn, p] = t;
    let images = [n.beta.scale(p).add_rational(m), -&n.alpha.scale(p).add_rational(nn), &n.alpha.scale(m) - &n.beta.scale(nn)];
    let coords: Vec<[Rat; 3]> = images
        .iter()
        .map(|x| coordinates_in_v(n, x).ok_or_else(|| Error::Internal("image outside V".into())))
        .collect::<Result<_>>()?;
    QPlane::span(&coords).ok_or_else(|| Error::Internal("image plane is not two-dimensional".into()))
}

/// A triple whose E-plane is the given plane.
pub fn psi_preimage(n: &NormalizedLattice, plane: &QPlane) -> Result<[Rat; 3]> {
    if !n.v_is_three_dimensional()? {
        return Err(Error::DegenerateV);
    }
    let [b1, b2] = &plane.basis;
    let one = rats([1, 0, 0]);
    if plane.contains(&one) {
        // E = <1, bα + cβ> = E(b, -c, 0)
        let w = if b1[1].is_zero() && b1[2].is_zero() { b2 } else { b1 };
        return Ok([w[1].clone(), -w[2].clone(), Rat::zero()]);
    }
    // the line E ∩ <1, α> is spanned by n + α, and E ∩ <1, β> by m + β
    let meet = |drop: usize| -> [Rat; 3] {
        let (x, y) = (&b1[drop], &b2[drop]);
        let v: Vec<Rat> = (0..3).map(|i| y * &b1[i] - x * &b2[i]).collect();
        to_triple(&v)
    };
    let with_alpha = meet(2);
    let with_beta = meet(1);
    let nn = &with_alpha[0] / &with_alpha[1];
    let m = &with_beta[0] / &with_beta[2];
    Ok([m, nn, Rat::one()])
}
