//! Number fields `Q[t]/(f)` with a selected complex root, and their elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::conj::ConjugateContext;
use crate::error::{Error, Result};
use crate::interval::{ComplexBox, IntervalRect};
use crate::linalg;
use crate::poly::RationalPolynomial;
use crate::rational::{common_denominator, Rat};
use crate::roots::{self, RootCell};

/// `Q[t]/(f)` for a monic squarefree `f`, embedded into C by sending `t` to
/// one root `θ` of `f`. The modulus may be reducible; see
/// [`NumberField::certify_irreducible`].
#[derive(Clone)]
pub struct NumberField(Arc<FieldInner>);

struct FieldInner {
    min_poly: RationalPolynomial,
    roots: Vec<RootCell>,
    index: usize,
    embedding: IntervalRect,
    /// `t^(d+k) mod f` for `k < d - 1`.
    reduction: Vec<Vec<Rat>>,
    irreducible: OnceLock<Result<()>>,
    conjugate: OnceLock<Result<Arc<ConjugateContext>>>,
    real_root: OnceLock<bool>,
}

/// Outcome of an inversion attempt in a possibly reducible algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum Inverse {
    Value(FieldElement),
    /// Nontrivial monic factor of the modulus exposed by a zero divisor.
    Factor(RationalPolynomial),
}

/// Refinement cap used when deciding whether a root lies inside a rectangle.
const CONTAINMENT_BITS: u32 = 256;

impl NumberField {
    /// Builds the field from a monic squarefree polynomial and a rectangle
    /// containing exactly one of its roots.
    pub fn new(min_poly: RationalPolynomial, rect: IntervalRect) -> Result<Self> {
        if !min_poly.is_monic() || min_poly.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidModulus);
        }
        let g = min_poly.gcd(&min_poly.derivative());
        if g.degree() != Some(0) {
            return Err(Error::NotSquarefree(g));
        }
        let cells: Vec<RootCell> = roots::isolate_all(&min_poly)?.into_iter().map(RootCell::new).collect();
        let mut inside = Vec::new();
        let mut ambiguous = 0;
        for (k, cell) in cells.iter().enumerate() {
            match locate(&min_poly, cell, &rect)? {
                Some(true) => inside.push(k),
                Some(false) => {}
                None => ambiguous += 1,
            }
        }
        if inside.len() != 1 || ambiguous > 0 {
            return Err(Error::RectNotIsolating { roots: inside.len() + ambiguous });
        }
        Ok(Self::from_parts(min_poly, cells, inside[0], rect))
    }

    /// Field with the root isolated by `roots[index]` (already certified).
    pub(crate) fn from_parts(min_poly: RationalPolynomial, roots: Vec<RootCell>, index: usize, embedding: IntervalRect) -> Self {
        let d = min_poly.degree().expect("nonzero modulus");
        let mut reduction = Vec::with_capacity(d.saturating_sub(1));
        // t^d = -(f_0 + ... + f_{d-1} t^{d-1})
        let mut cur: Vec<Rat> = min_poly.coeffs()[..d].iter().map(|c| -c).collect();
        for _ in 0..d.saturating_sub(1) {
            reduction.push(cur.clone());
            let top = cur[d - 1].clone();
            let mut next = vec![Rat::zero(); d];
            for j in 1..d {
                next[j] = cur[j - 1].clone();
            }
            if !top.is_zero() {
                for j in 0..d {
                    next[j] -= &top * &min_poly.coeffs()[j];
                }
            }
            cur = next;
        }
        Self(Arc::new(FieldInner {
            min_poly,
            roots,
            index,
            embedding,
            reduction,
            irreducible: OnceLock::new(),
            conjugate: OnceLock::new(),
            real_root: OnceLock::new(),
        }))
    }

    /// Convenience constructor for tests and fixtures: the field of `coeffs`
    /// (ascending, integer) embedded at the root nearest `(re, im)`.
    pub fn from_int_coeffs_near(coeffs: &[i64], re: f64, im: f64) -> Result<Self> {
        let f = RationalPolynomial::from_ints(coeffs);
        let boxes = roots::isolate_all(&f)?;
        let best = boxes
            .iter()
            .min_by(|a, b| {
                let da = dist(a, re, im);
                let db = dist(b, re, im);
                da.partial_cmp(&db).unwrap()
            })
            .ok_or(Error::InvalidModulus)?;
        Self::new(f, best.clone())
    }

    pub fn rationals() -> Self {
        let f = RationalPolynomial::from_ints(&[0, 1]);
        let r = IntervalRect::around(&Rat::zero(), &Rat::zero(), &Rat::one());
        Self::new(f, r).expect("t is squarefree")
    }

    pub fn min_poly(&self) -> &RationalPolynomial {
        &self.0.min_poly
    }

    pub fn degree(&self) -> usize {
        self.0.min_poly.degree().unwrap()
    }

    pub fn embedding(&self) -> &IntervalRect {
        &self.0.embedding
    }

    pub(crate) fn root_cells(&self) -> &[RootCell] {
        &self.0.roots
    }

    pub(crate) fn root_index(&self) -> usize {
        self.0.index
    }

    /// Enclosure of `θ` of width at most `2^-bits`.
    pub fn root_box(&self, bits: u32) -> Result<IntervalRect> {
        self.0.roots[self.0.index].refine(&self.0.min_poly, bits)
    }

    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), coords: vec![Rat::zero(); self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(Rat::one())
    }

    pub fn from_rational(&self, q: Rat) -> FieldElement {
        let mut e = self.zero();
        e.coords[0] = q;
        e
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(Rat::from_integer(n.into()))
    }

    /// The class of `t`, i.e. `θ`.
    pub fn generator(&self) -> FieldElement {
        if self.degree() == 1 {
            return self.from_rational(-self.min_poly().coeff(0));
        }
        let mut e = self.zero();
        e.coords[1] = Rat::one();
        e
    }

    /// Element from power-basis coordinates; shorter vectors are zero-padded,
    /// longer ones are reduced modulo the minimal polynomial.
    pub fn element(&self, coords: Vec<Rat>) -> FieldElement {
        self.from_poly(&RationalPolynomial::new(coords))
    }

    pub fn element_from_ints(&self, coords: &[i64]) -> FieldElement {
        self.from_poly(&RationalPolynomial::from_ints(coords))
    }

    pub fn from_poly(&self, p: &RationalPolynomial) -> FieldElement {
        let r = p.rem(self.min_poly());
        let mut coords = r.coeffs().to_vec();
        coords.resize(self.degree(), Rat::zero());
        FieldElement { field: self.clone(), coords }
    }

    /// Whether `θ` is real.
    pub fn root_is_real(&self) -> bool {
        *self.0.real_root.get_or_init(|| self.decide_real_root())
    }

    fn decide_real_root(&self) -> bool {
        if self.degree() == 1 {
            return true;
        }
        let iso = self.0.roots[self.0.index].isolating().clone();
        let mut bits = 32;
        loop {
            let b = self.root_box(bits).expect("refinement of a certified root");
            if b.im_lo.is_positive() || b.im_hi.is_negative() {
                return false;
            }
            // the mirror image lies in the isolating box, so θ̄ = θ
            if iso.contains(&b.conj()) {
                return true;
            }
            bits *= 2;
        }
    }

    /// Index of the root cell containing `θ̄`.
    pub(crate) fn conjugate_root_index(&self) -> Result<usize> {
        if self.root_is_real() {
            return Ok(self.0.index);
        }
        let mut bits = 32;
        loop {
            let b = self.root_box(bits)?.conj();
            let hits: Vec<usize> = (0..self.0.roots.len()).filter(|&k| self.0.roots[k].isolating().intersects(&b)).collect();
            if hits.len() == 1 {
                return Ok(hits[0]);
            }
            bits *= 2;
            if bits > 1 << 14 {
                return Err(Error::RootIsolation("conjugate root not separated".into()));
            }
        }
    }

    /// Checks that the modulus is irreducible over Q. On failure the error
    /// carries the field of the irreducible factor having `θ` as a root.
    pub fn certify_irreducible(&self) -> Result<()> {
        self.0
            .irreducible
            .get_or_init(|| {
                if self.degree() == 1 {
                    return Ok(());
                }
                let f = self.min_poly();
                let scale = common_denominator(f.coeffs());
                let factor = crate::conj::rational_factor(f, self.0.index, &scale, |bits| {
                    self.0
                        .roots
                        .iter()
                        .map(|c| c.refine(f, bits).map(|r| ComplexBox::from_rect(&r, bits + 8)))
                        .collect()
                })?;
                if factor.degree() == f.degree() {
                    Ok(())
                } else {
                    Err(Error::SplitRequired(self.split(&factor)?))
                }
            })
            .clone()
    }

    /// Field of the factor (`g` or `f/g`) of the modulus that vanishes at `θ`.
    pub fn split(&self, g: &RationalPolynomial) -> Result<NumberField> {
        let f = self.min_poly();
        let g = g.monic();
        let cofactor = f.exact_div(&g).ok_or_else(|| Error::Internal("split by a non-factor".into()))?;
        let mut kept = Vec::new();
        let mut keep_index = None;
        let mut theta_in_g = None;
        for (k, cell) in self.0.roots.iter().enumerate() {
            let in_g = root_of_which(f, cell, &g, &cofactor)?;
            if k == self.0.index {
                theta_in_g = Some(in_g);
            }
            kept.push((k, in_g));
        }
        let theta_in_g = theta_in_g.unwrap();
        let part = if theta_in_g { g } else { cofactor };
        let mut cells = Vec::new();
        for (k, in_g) in kept {
            if in_g == theta_in_g {
                if k == self.0.index {
                    keep_index = Some(cells.len());
                }
                cells.push(self.0.roots[k].clone());
            }
        }
        Ok(Self::from_parts(part, cells, keep_index.unwrap(), self.0.embedding.clone()))
    }

    /// Maps an element into the factor field produced by [`NumberField::split`].
    pub fn reduce_into(&self, x: &FieldElement) -> FieldElement {
        self.from_poly(&x.to_poly())
    }

    /// Shared conjugation data; requires an irreducible modulus.
    pub fn conjugate_context(&self) -> Result<Arc<ConjugateContext>> {
        self.0
            .conjugate
            .get_or_init(|| {
                self.certify_irreducible()?;
                ConjugateContext::build(self).map(Arc::new)
            })
            .clone()
    }

    fn reduce_product(&self, mut full: Vec<Rat>) -> Vec<Rat> {
        let d = self.degree();
        for k in (d..full.len()).rev() {
            let c = std::mem::replace(&mut full[k], Rat::zero());
            if c.is_zero() {
                continue;
            }
            for (j, r) in self.0.reduction[k - d].iter().enumerate() {
                if !r.is_zero() {
                    full[j] += &c * r;
                }
            }
        }
        full.truncate(d);
        full.resize(d, Rat::zero());
        full
    }
}

fn dist(r: &IntervalRect, re: f64, im: f64) -> f64 {
    let (cr, ci) = r.center();
    let dr = cr.to_f64().unwrap_or(f64::MAX) - re;
    let di = ci.to_f64().unwrap_or(f64::MAX) - im;
    dr * dr + di * di
}

/// `Some(true)` if the root of `cell` lies in `rect`, `Some(false)` if not,
/// `None` if undecided at the refinement cap.
fn locate(f: &RationalPolynomial, cell: &RootCell, rect: &IntervalRect) -> Result<Option<bool>> {
    let mut bits = 16;
    while bits <= CONTAINMENT_BITS {
        let b = cell.refine(f, bits)?;
        if rect.contains(&b) {
            return Ok(Some(true));
        }
        if !rect.intersects(&b) {
            return Ok(Some(false));
        }
        bits *= 2;
    }
    Ok(None)
}

/// Whether the root in `cell` is a root of `g` (otherwise of `h`).
fn root_of_which(f: &RationalPolynomial, cell: &RootCell, g: &RationalPolynomial, h: &RationalPolynomial) -> Result<bool> {
    let mut bits = 32;
    loop {
        let r = cell.refine(f, bits)?;
        if !roots::eval_at_rect(g, &r, bits + 16).contains_zero() {
            return Ok(false);
        }
        if !roots::eval_at_rect(h, &r, bits + 16).contains_zero() {
            return Ok(true);
        }
        bits *= 2;
        if bits > 1 << 14 {
            return Err(Error::RootIsolation("factor separation did not converge".into()));
        }
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.min_poly() != other.min_poly() {
            return false;
        }
        let theirs = other.0.roots[other.0.index].isolating();
        matches!(locate(self.min_poly(), &self.0.roots[self.0.index], theirs), Ok(Some(true)))
    }
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.min_poly())
    }
}

/// Element of a [`NumberField`] in power-basis coordinates.
#[derive(Clone)]
pub struct FieldElement {
    field: NumberField,
    coords: Vec<Rat>,
}

impl FieldElement {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn to_poly(&self) -> RationalPolynomial {
        RationalPolynomial::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// `Some(q)` when the element is the rational `q`.
    pub fn as_rational(&self) -> Option<Rat> {
        self.coords[1..].iter().all(Zero::is_zero).then(|| self.coords[0].clone())
    }

    pub fn same_field(&self, other: &Self) -> bool {
        self.field.ptr_eq(&other.field) || self.field == other.field
    }

    fn check(&self, other: &Self) {
        assert!(self.same_field(other), "elements belong to different number fields");
    }

    pub fn scale(&self, q: &Rat) -> Self {
        Self { field: self.field.clone(), coords: self.coords.iter().map(|c| c * q).collect() }
    }

    pub fn add_rational(&self, q: &Rat) -> Self {
        let mut out = self.clone();
        out.coords[0] += q;
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Inverse, or the factor of the modulus exposed by a zero divisor.
    pub fn invert(&self) -> Result<Inverse> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Inverse::Value(self.field.from_rational(q.recip())));
        }
        let (g, s, _) = self.to_poly().xgcd(self.field.min_poly());
        if g.degree() == Some(0) {
            Ok(Inverse::Value(self.field.from_poly(&s)))
        } else {
            Ok(Inverse::Factor(g))
        }
    }

    /// Inverse; a zero divisor surfaces as [`Error::SplitRequired`].
    pub fn inv(&self) -> Result<Self> {
        match self.invert()? {
            Inverse::Value(y) => Ok(y),
            Inverse::Factor(g) => Err(Error::SplitRequired(self.field.split(&g)?)),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Enclosure of the complex value of width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> Result<ComplexBox> {
        let p = self.to_poly();
        if let Some(q) = self.as_rational() {
            return Ok(ComplexBox::from_rat(&q, bits + 2));
        }
        let mut guard = 16 + 2 * bits_of(&p);
        loop {
            let prec = bits + guard;
            let r = self.field.root_box(prec)?;
            let v = roots::eval_at_rect(&p, &r, prec + 8);
            if v.width_at_most(bits as i64) {
                return Ok(v);
            }
            guard *= 2;
            if guard > 1 << 16 {
                return Err(Error::RootIsolation("enclosure did not tighten".into()));
            }
        }
    }

    pub fn approx(&self) -> Complex64 {
        match self.enclose(53) {
            Ok(b) => {
                let (re, im) = b.mid();
                Complex64::new(re.to_f64().unwrap_or(f64::NAN), im.to_f64().unwrap_or(f64::NAN))
            }
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    /// Certified sign of the imaginary part.
    pub fn sign_im(&self) -> Result<i32> {
        if self.is_real()? {
            return Ok(0);
        }
        refine_sign(self, |b| b.im.sign())
    }

    /// Certified sign of a real element.
    pub fn sign_real(&self) -> Result<i32> {
        if !self.is_real()? {
            return Err(Error::NotRealInput);
        }
        if self.is_zero() {
            return Ok(0);
        }
        refine_sign(self, |b| b.re.sign())
    }

    pub fn is_real(&self) -> Result<bool> {
        if self.as_rational().is_some() || self.field.root_is_real() {
            return Ok(true);
        }
        Ok(self.field.conjugate_context()?.is_real(self))
    }
}

fn bits_of(p: &RationalPolynomial) -> u32 {
    p.coeffs().iter().map(|c| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0).min(1 << 12) as u32
}

fn refine_sign(x: &FieldElement, pick: impl Fn(&ComplexBox) -> Option<i32>) -> Result<i32> {
    let mut bits = 32;
    loop {
        let b = x.enclose(bits)?;
        if let Some(s) = pick(&b) {
            if s != 0 {
                return Ok(s);
            }
        }
        bits *= 2;
        if bits > 1 << 20 {
            return Err(Error::RootIsolation("sign refinement did not terminate".into()));
        }
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.same_field(other)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement { field: self.field.clone(), coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement { field: self.field.clone(), coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field.clone(), coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        let d = self.coords.len();
        let mut full = vec![Rat::zero(); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if !b.is_zero() {
                    full[i + j] += a * b;
                }
            }
        }
        FieldElement { field: self.field.clone(), coords: self.field.reduce_product(full) }
    }
}

impl linalg::Scalar for FieldElement {
    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Result<Self> {
        FieldElement::inv(self)
    }
}

fn all_same_field(xs: &[FieldElement]) -> Result<()> {
    match xs.split_first() {
        Some((first, rest)) if rest.iter().any(|x| !x.same_field(first)) => Err(Error::FieldMismatch),
        _ => Ok(()),
    }
}

/// Monic polynomial of least degree vanishing at `x`.
pub fn minimal_polynomial(x: &FieldElement) -> RationalPolynomial {
    let d = x.field.degree();
    let mut powers: Vec<FieldElement> = vec![x.field.one()];
    for k in 1..=d {
        let next = &powers[k - 1] * x;
        let rows: Vec<Vec<Rat>> = (0..d).map(|i| powers.iter().map(|p| p.coords[i].clone()).collect()).collect();
        if let Some(c) = linalg::solve(&rows, &next.coords) {
            let mut coeffs: Vec<Rat> = c.into_iter().map(|q| -q).collect();
            coeffs.push(Rat::one());
            return RationalPolynomial::new(coeffs);
        }
        powers.push(next);
    }
    unreachable!("powers 1..x^d are always dependent")
}

/// Basis of `{q in Q^n : sum q_i x_i = 0}`.
pub fn q_dependence(xs: &[FieldElement]) -> Result<Vec<Vec<Rat>>> {
    all_same_field(xs)?;
    let Some(first) = xs.first() else { return Ok(Vec::new()) };
    let d = first.field.degree();
    let rows: Vec<Vec<Rat>> = (0..d).map(|i| xs.iter().map(|x| x.coords[i].clone()).collect()).collect();
    if xs.len() <= d && linalg::rank_mod_prime(&linalg::transpose(&rows)) == Some(xs.len()) {
        return Ok(Vec::new());
    }
    Ok(linalg::kernel(&rows, xs.len()))
}

/// Dimension over Q of the span of `xs`.
pub fn q_rank(xs: &[FieldElement]) -> Result<usize> {
    Ok(xs.len() - q_dependence(xs)?.len())
}

/// `Q(xs)` described by a primitive element.
#[derive(Clone, Debug, PartialEq)]
pub struct Subfield {
    pub degree: usize,
    pub primitive: FieldElement,
    /// Multipliers `c` with `primitive = x_1 + c x_2 + c^2 x_3 + ...`.
    pub multiplier: u32,
    /// `x_i = sum_k coords[i][k] * primitive^k`.
    pub coords: Vec<Vec<Rat>>,
}

const MAX_MULTIPLIER: u32 = 50;

/// Degree and primitive element of the field generated by `xs`.
pub fn generated_subfield(xs: &[FieldElement]) -> Result<Subfield> {
    all_same_field(xs)?;
    let first = xs.first().ok_or_else(|| Error::Internal("empty generator list".into()))?;
    let field = first.field.clone();
    for c in 0..=MAX_MULTIPLIER {
        let cq = Rat::from_integer(BigInt::from(c));
        let mut z = field.zero();
        let mut w = Rat::one();
        for x in xs {
            z = &z + &x.scale(&w);
            w *= &cq;
        }
        let m = minimal_polynomial(&z);
        let deg = m.degree().unwrap();
        let d = field.degree();
        let mut powers = vec![field.one()];
        for k in 1..deg {
            let next = &powers[k - 1] * &z;
            powers.push(next);
        }
        let rows: Vec<Vec<Rat>> = (0..d).map(|i| powers.iter().map(|p| p.coords[i].clone()).collect()).collect();
        let coords: Option<Vec<Vec<Rat>>> = xs.iter().map(|x| linalg::solve(&rows, &x.coords)).collect();
        if let Some(coords) = coords {
            return Ok(Subfield { degree: deg, primitive: z, multiplier: c, coords });
        }
    }
    Err(Error::Internal(format!("no primitive element with multiplier up to {MAX_MULTIPLIER}")))
}

/// Degree of `x` over Q.
pub fn element_degree(x: &FieldElement) -> usize {
    minimal_polynomial(x).degree().unwrap()
}

/// Discriminant `b^2 - 4ac` of the primitive integer form of a quadratic.
pub fn quadratic_discriminant(m: &RationalPolynomial) -> Option<BigInt> {
    if m.degree() != Some(2) {
        return None;
    }
    let ints = crate::rational::primitive_integer_vector(m.coeffs());
    let (c, b, a) = (&ints[0], &ints[1], &ints[2]);
    Some(b * b - BigInt::from(4) * a * c)
}

/// Reduction of a field modulo the fixed 64-bit prime, used to certify
/// Q-linear independence cheaply: independence of the reductions implies
/// independence over Q.
#[derive(Clone, Debug)]
pub struct ModularField {
    reduction: Vec<Vec<u64>>,
    d: usize,
}

impl ModularField {
    /// `None` when a coefficient of the modulus has a denominator divisible by the prime.
    pub fn new(field: &NumberField) -> Option<Self> {
        let reduction = field
            .0
            .reduction
            .iter()
            .map(|row| row.iter().map(linalg::mod_p).collect::<Option<Vec<u64>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(Self { reduction, d: field.degree() })
    }

    pub fn reduce(&self, x: &FieldElement) -> Option<Vec<u64>> {
        x.coords.iter().map(linalg::mod_p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let d = self.d;
        let mut full = vec![0u64; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                full[i + j] = linalg::addmod(full[i + j], linalg::mulmod(x, y));
            }
        }
        for k in (d..full.len()).rev() {
            let c = full[k];
            if c == 0 {
                continue;
            }
            for (j, &r) in self.reduction[k - d].iter().enumerate() {
                full[j] = linalg::addmod(full[j], linalg::mulmod(c, r));
            }
        }
        full.truncate(d);
        full
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.d];
        v[0] = 1;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    pub(crate) fn gaussian() -> NumberField {
        NumberField::from_int_coeffs_near(&[1, 0, 1], 0.0, 1.0).unwrap()
    }

    fn cubic() -> NumberField {
        NumberField::from_int_coeffs_near(&[-2, 0, 0, 1], -0.63, 1.09).unwrap()
    }

    fn zeta8() -> NumberField {
        NumberField::from_int_coeffs_near(&[1, 0, 0, 0, 1], 0.7, 0.7).unwrap()
    }

    #[test]
    fn creation_errors() {
        let rect = IntervalRect::around(&rat(1), &rat(0), &rat(1));
        assert!(matches!(NumberField::new(RationalPolynomial::from_ints(&[1, -2, 1]), rect.clone()), Err(Error::NotSquarefree(_))));
        let wide = IntervalRect::around(&rat(0), &rat(0), &rat(3));
        assert!(matches!(
            NumberField::new(RationalPolynomial::from_ints(&[1, 0, 1]), wide),
            Err(Error::RectNotIsolating { roots: 2 })
        ));
        let empty = IntervalRect::around(&rat(5), &rat(5), &rat(1));
        assert!(matches!(
            NumberField::new(RationalPolynomial::from_ints(&[1, 0, 1]), empty),
            Err(Error::RectNotIsolating { roots: 0 })
        ));
        assert!(matches!(NumberField::new(RationalPolynomial::from_ints(&[1, 2]), rect), Err(Error::InvalidModulus)));
    }

    #[test]
    fn embedding_selects_requested_root() {
        let k = cubic();
        let b = k.root_box(60).unwrap();
        let (re, im) = b.center();
        assert!((re - ratio(-63, 100)).abs() < ratio(1, 100));
        assert!((im - ratio(109, 100)).abs() < ratio(1, 100));
        assert!(!k.root_is_real());
        let real = NumberField::from_int_coeffs_near(&[-2, 0, 0, 1], 1.26, 0.0).unwrap();
        assert!(real.root_is_real());
    }

    #[test]
    fn inverses() {
        let k = gaussian();
        let i = k.generator();
        assert_eq!(i.inv().unwrap(), -&i);
        let c = cubic();
        let t = c.generator();
        assert_eq!(t.inv().unwrap(), (&t * &t).scale(&ratio(1, 2)));
        let r = NumberField::from_int_coeffs_near(&[-1, 0, 1], 1.0, 0.0).unwrap();
        let x = &r.generator() - &r.one();
        assert_eq!(x.invert().unwrap(), Inverse::Factor(RationalPolynomial::from_ints(&[-1, 1])));
        assert!(matches!(k.zero().invert(), Err(Error::ZeroInput)));
    }

    #[test]
    fn zero_divisor_splits_toward_embedding() {
        // t^2 - 1 embedded at 1: the factor t - 1 survives
        let r = NumberField::from_int_coeffs_near(&[-1, 0, 1], 1.0, 0.0).unwrap();
        let x = &r.generator() + &r.one();
        match x.inv() {
            Err(Error::SplitRequired(f)) => assert_eq!(f.min_poly(), &RationalPolynomial::from_ints(&[-1, 1])),
            other => panic!("unexpected {other:?}"),
        }
        match r.certify_irreducible() {
            Err(Error::SplitRequired(f)) => {
                assert_eq!(f.degree(), 1);
                assert_eq!(f.reduce_into(&r.generator()).as_rational(), Some(rat(1)));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(cubic().certify_irreducible().is_ok());
        assert!(zeta8().certify_irreducible().is_ok());
    }

    #[test]
    fn minimal_polynomials() {
        let k = gaussian();
        assert_eq!(minimal_polynomial(&k.from_rational(ratio(3, 2))), RationalPolynomial::new(vec![ratio(-3, 2), rat(1)]));
        assert_eq!(minimal_polynomial(&k.generator()), RationalPolynomial::from_ints(&[1, 0, 1]));
        let c = cubic();
        let t2 = c.generator().pow(2);
        assert_eq!(minimal_polynomial(&t2), RationalPolynomial::from_ints(&[-4, 0, 0, 1]));
    }

    #[test]
    fn dependences() {
        let k = gaussian();
        let i = k.generator();
        let half = ratio(1, 2);
        let a = (&k.one() - &i).scale(&half);
        let b = (&k.one() + &i).scale(&half);
        let rel = q_dependence(&[k.one(), a, b]).unwrap();
        assert_eq!(rel.len(), 1);
        assert_eq!(crate::rational::canonical_integer_vector(&rel[0]), vec![BigInt::from(1), BigInt::from(-1), BigInt::from(-1)]);
        let c = cubic();
        let t = c.generator();
        assert!(q_dependence(&[c.one(), t.clone(), t.pow(2)]).unwrap().is_empty());
        let rel = q_dependence(&[c.one(), t.clone(), t.pow(2), c.from_int(2)]).unwrap();
        assert_eq!(rel.len(), 1);
        assert_eq!(crate::rational::canonical_integer_vector(&rel[0]), vec![BigInt::from(2), BigInt::zero(), BigInt::zero(), BigInt::from(-1)]);
    }

    #[test]
    fn subfields() {
        let k = gaussian();
        assert_eq!(generated_subfield(&[k.generator()]).unwrap().degree, 2);
        let c = cubic();
        let t = c.generator();
        let s = generated_subfield(&[t.clone(), t.pow(2)]).unwrap();
        assert_eq!(s.degree, 3);
        assert_eq!(s.primitive, t);
        let z = zeta8();
        let zeta = z.generator();
        let s = generated_subfield(&[zeta.pow(2), &zeta + &zeta.pow(3)]).unwrap();
        assert_eq!(s.degree, 4);
    }

    #[test]
    fn signs_and_reality() {
        let z = zeta8();
        let zeta = z.generator();
        let sqrt2 = &zeta - &zeta.pow(3);
        assert!(sqrt2.is_real().unwrap());
        assert_eq!(sqrt2.sign_real().unwrap(), 1);
        assert!(!zeta.pow(2).is_real().unwrap());
        assert_eq!(z.from_rational(ratio(-5, 2)).sign_real().unwrap(), -1);
        assert_eq!(z.zero().sign_real().unwrap(), 0);
        assert!(matches!(zeta.sign_real(), Err(Error::NotRealInput)));
        assert_eq!(gaussian().generator().sign_im().unwrap(), 1);
    }

    #[test]
    fn discriminants() {
        assert_eq!(quadratic_discriminant(&RationalPolynomial::from_ints(&[1, 0, 1])), Some(BigInt::from(-4)));
        assert_eq!(quadratic_discriminant(&RationalPolynomial::from_ints(&[1, -1, 1])), Some(BigInt::from(-3)));
    }
}
