//! Period ratios of elliptic curves `C/<1, τ>`: reduction to the standard
//! fundamental domain, and exact isomorphism and isogeny decisions.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{self, FieldElement, ModularField};
use crate::linalg;
use crate::rational::{ceil, primitive_integer_vector, Rat};

/// `τ` with certified `Im τ > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodRatio {
    tau: FieldElement,
}

impl PeriodRatio {
    pub fn new(tau: FieldElement) -> Result<Self> {
        match tau.sign_im()? {
            1 => Ok(Self { tau }),
            0 => Err(Error::RealRatio),
            _ => Err(Error::WrongOrientation),
        }
    }

    pub fn tau(&self) -> &FieldElement {
        &self.tau
    }

    pub fn into_inner(self) -> FieldElement {
        self.tau
    }
}

impl fmt::Display for PeriodRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tau)
    }
}

/// Element of SL2(Z) acting by `τ ↦ (aτ + b)/(cτ + d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularMatrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl ModularMatrix {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Option<Self> {
        (&a * &d - &b * &c).is_one().then_some(Self { a, b, c, d })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self { a: BigInt::one(), b: BigInt::zero(), c: BigInt::zero(), d: BigInt::one() }
    }

    /// `τ ↦ τ + k`.
    pub fn translation(k: BigInt) -> Self {
        Self { a: BigInt::one(), b: k, c: BigInt::zero(), d: BigInt::one() }
    }

    /// `τ ↦ -1/τ`.
    pub fn inversion() -> Self {
        Self { a: BigInt::zero(), b: -BigInt::one(), c: BigInt::one(), d: BigInt::zero() }
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn apply(&self, tau: &FieldElement) -> Result<FieldElement> {
        self.to_witness().apply(tau)
    }

    pub fn to_witness(&self) -> IsogenyWitness {
        IsogenyWitness::new([&self.a, &self.b, &self.c, &self.d].map(|x| Rat::from_integer(x.clone())))
    }
}

/// Invertible rational matrix `(a b; c d)` with `(aτ1 + b)/(cτ1 + d) = τ2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsogenyWitness {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
    pub d: Rat,
}

impl IsogenyWitness {
    pub fn new([a, b, c, d]: [Rat; 4]) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new([a, b, c, d].map(|x| Rat::from_integer(x.into())))
    }

    pub fn det(&self) -> Rat {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn entries(&self) -> [&Rat; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Fractional-linear image of `tau`.
    pub fn apply(&self, tau: &FieldElement) -> Result<FieldElement> {
        let num = tau.scale(&self.a).add_rational(&self.b);
        let den = tau.scale(&self.c).add_rational(&self.d);
        num.div(&den)
    }

    pub fn verify(&self, from: &FieldElement, to: &FieldElement) -> bool {
        if self.det().is_zero() {
            return false;
        }
        // (aτ1 + b) = τ2 (cτ1 + d), avoiding the division
        let lhs = from.scale(&self.a).add_rational(&self.b);
        let rhs = to * &from.scale(&self.c).add_rational(&self.d);
        lhs == rhs
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
        .normalized()
    }

    /// Inverse map (adjugate, which is the inverse up to a scalar).
    pub fn inverse(&self) -> Self {
        Self { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }.normalized()
    }

    /// Primitive integer representative with the first nonzero of `(c, d)` positive.
    pub fn normalized(&self) -> Self {
        let v = primitive_integer_vector(&[self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]);
        let flip = if !v[2].is_zero() { v[2].is_negative() } else { v[3].is_negative() };
        let v: Vec<Rat> = v.into_iter().map(|x| Rat::from_integer(if flip { -x } else { x })).collect();
        Self::new([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
    }

    /// Whether the matrix is a rational multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }
}

impl fmt::Display for IsogenyWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::rational::format_rational as r;
        write!(f, "({}, {}; {}, {})", r(&self.a), r(&self.b), r(&self.c), r(&self.d))
    }
}

/// `τ = ω2/ω1`, negated if needed so that `Im τ > 0`.
pub fn period_ratio(w1: &FieldElement, w2: &FieldElement) -> Result<PeriodRatio> {
    if !w1.same_field(w2) {
        return Err(Error::FieldMismatch);
    }
    let tau = w2.div(w1)?;
    match tau.sign_im()? {
        1 => Ok(PeriodRatio { tau }),
        -1 => Ok(PeriodRatio { tau: -&tau }),
        _ => Err(Error::RealRatio),
    }
}

/// Integer `k` with `Re(τ) - k` in `(-1/2, 1/2]`.
fn nearest_translation(tau: &FieldElement) -> Result<BigInt> {
    let half = Rat::new(1.into(), 2.into());
    let mut bits = 24;
    loop {
        let b = tau.enclose(bits)?;
        let lo = ceil(&(b.re.lo() - &half));
        let hi = ceil(&(b.re.hi() - &half));
        if lo == hi {
            return Ok(lo);
        }
        let ctx = tau.field().conjugate_context()?;
        if let Some(r) = ctx.re(tau).as_rational() {
            return Ok(ceil(&(r - half)));
        }
        bits *= 2;
    }
}

/// Exact comparison of `|τ|^2` with 1.
fn compare_norm_with_one(tau: &FieldElement) -> Result<Ordering> {
    let one = Rat::one();
    let mut bits = 24;
    let mut checked_exact = false;
    loop {
        let n = tau.enclose(bits)?.norm_sqr();
        if n.hi() < one {
            return Ok(Ordering::Less);
        }
        if n.lo() > one {
            return Ok(Ordering::Greater);
        }
        if !checked_exact {
            let ctx = tau.field().conjugate_context()?;
            let norm = &ctx.embed(tau) * &ctx.conj(tau);
            if norm.as_rational() == Some(one.clone()) {
                return Ok(Ordering::Equal);
            }
            checked_exact = true;
        }
        bits *= 2;
    }
}

fn sign_re(tau: &FieldElement) -> Result<i32> {
    let ctx = tau.field().conjugate_context()?;
    let re = ctx.re(tau);
    if re.is_zero() {
        return Ok(0);
    }
    let mut bits = 24;
    loop {
        if let Some(s) = tau.enclose(bits)?.re.sign() {
            if s != 0 {
                return Ok(s);
            }
        }
        bits *= 2;
    }
}

/// Reduces `τ` into `{Re τ ∈ (-1/2, 1/2], |τ| ≥ 1}` with `Re τ ≥ 0` when
/// `|τ| = 1`. Returns the reduced ratio and `M` with `M·τ` equal to it.
pub fn reduce_fundamental(tau: &PeriodRatio) -> Result<(PeriodRatio, ModularMatrix)> {
    let mut t = tau.tau.clone();
    let mut m = ModularMatrix::identity();
    loop {
        let k = nearest_translation(&t)?;
        if !k.is_zero() {
            t = t.add_rational(&Rat::from_integer(-&k));
            m = ModularMatrix::translation(-k).compose(&m);
        }
        match compare_norm_with_one(&t)? {
            Ordering::Less => {
                t = -&t.inv()?;
                m = ModularMatrix::inversion().compose(&m);
            }
            Ordering::Equal => {
                if sign_re(&t)? < 0 {
                    t = -&t.inv()?;
                    m = ModularMatrix::inversion().compose(&m);
                }
                break;
            }
            Ordering::Greater => break,
        }
    }
    Ok((PeriodRatio { tau: t }, m))
}

/// Exact membership test for the canonical fundamental domain.
pub fn in_fundamental_domain(tau: &PeriodRatio) -> Result<bool> {
    let t = &tau.tau;
    if nearest_translation(t)? != BigInt::zero() {
        return Ok(false);
    }
    Ok(match compare_norm_with_one(t)? {
        Ordering::Less => false,
        Ordering::Equal => sign_re(t)? >= 0,
        Ordering::Greater => true,
    })
}

/// `Some(M)` with `M·τ1 = τ2` when the curves are isomorphic.
pub fn isomorphic(t1: &PeriodRatio, t2: &PeriodRatio) -> Result<Option<ModularMatrix>> {
    if !t1.tau.same_field(&t2.tau) {
        return Err(Error::FieldMismatch);
    }
    let (r1, m1) = reduce_fundamental(t1)?;
    let (r2, m2) = reduce_fundamental(t2)?;
    Ok((r1 == r2).then(|| m2.inverse().compose(&m1)))
}

/// Isogeny witness from a relation `q0 + q1 τ1 + q2 τ2 + q3 τ1 τ2 = 0`.
fn witness_from_relation(q: &[Rat]) -> IsogenyWitness {
    IsogenyWitness::new([-q[1].clone(), -q[0].clone(), q[3].clone(), q[2].clone()]).normalized()
}

/// Isogeny decision: `Some(A)` with `A·τ1 = τ2`, `A ∈ GL2(Q)`.
pub fn isogenous(t1: &PeriodRatio, t2: &PeriodRatio) -> Result<Option<IsogenyWitness>> {
    isogenous_elements(&t1.tau, &t2.tau)
}

pub(crate) fn isogenous_elements(x: &FieldElement, y: &FieldElement) -> Result<Option<IsogenyWitness>> {
    if !x.same_field(y) {
        return Err(Error::FieldMismatch);
    }
    let k = x.field();
    let xs = [k.one(), x.clone(), y.clone(), x * y];
    let rel = field::q_dependence(&xs)?;
    let Some(q) = pick_relation(&rel) else { return Ok(None) };
    let w = witness_from_relation(&q);
    if w.det().is_zero() || !w.verify(x, y) {
        return Err(Error::Internal(format!("relation {q:?} does not give an invertible witness")));
    }
    Ok(Some(w))
}

/// Deterministic choice among relation vectors: prefer one without the
/// `τ1 τ2` term (an affine map), then the smallest integer height.
fn pick_relation(rel: &[Vec<Rat>]) -> Option<Vec<Rat>> {
    match rel.len() {
        0 => None,
        1 => Some(rel[0].clone()),
        _ => {
            // combinations of the basis with the last coordinate eliminated
            let basis = linalg::row_space(rel);
            let affine: Vec<&Vec<Rat>> = basis.iter().filter(|v| v[3].is_zero()).collect();
            let pick = affine.first().copied().unwrap_or(&basis[0]);
            Some(pick.clone())
        }
    }
}

/// Fast independence certificate for `{1, τ1, τ2, τ1 τ2}` using reductions
/// modulo a prime; `true` means certainly not isogenous.
pub fn certainly_not_isogenous(m: &ModularField, a: &[u64], b: &[u64]) -> bool {
    let rows = vec![m.one(), a.to_vec(), b.to_vec(), m.mul(a, b)];
    linalg::rank_mod_prime_reduced(rows) == 4
}

/// Discriminant of the primitive integer form of the minimal polynomial of
/// `τ` when it is quadratic (complex multiplication).
pub fn cm_discriminant(tau: &PeriodRatio) -> Option<BigInt> {
    field::quadratic_discriminant(&field::minimal_polynomial(&tau.tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;
    use crate::rational::ratio;

    fn gaussian() -> NumberField {
        NumberField::from_int_coeffs_near(&[1, 0, 1], 0.0, 1.0).unwrap()
    }

    fn pr(x: FieldElement) -> PeriodRatio {
        PeriodRatio::new(x).unwrap()
    }

    #[test]
    fn period_ratios() {
        let k = gaussian();
        let i = k.generator();
        assert_eq!(period_ratio(&k.one(), &i).unwrap().tau(), &i);
        assert_eq!(period_ratio(&k.one(), &i.scale(&ratio(-2, 1))).unwrap().tau(), &i.scale(&ratio(2, 1)));
        let t = period_ratio(&k.from_int(2), &k.element_from_ints(&[1, 1])).unwrap();
        assert_eq!(t.tau(), &k.element(vec![ratio(1, 2), ratio(1, 2)]));
        assert!(matches!(period_ratio(&k.one(), &k.from_int(3)), Err(Error::RealRatio)));
    }

    #[test]
    fn reduction_examples() {
        let k = gaussian();
        let i = k.generator();
        let (r, m) = reduce_fundamental(&pr(i.scale(&ratio(2, 1)).add_rational(&ratio(5, 1)))).unwrap();
        assert_eq!(r.tau(), &i.scale(&ratio(2, 1)));
        assert_eq!(m, ModularMatrix::translation((-5).into()));
        let (r, m) = reduce_fundamental(&pr(i.scale(&ratio(1, 2)))).unwrap();
        assert_eq!(r.tau(), &i.scale(&ratio(2, 1)));
        assert_eq!(m, ModularMatrix::inversion());
        let start = pr(k.element(vec![ratio(1, 2), ratio(1, 2)]));
        let (r, m) = reduce_fundamental(&start).unwrap();
        assert_eq!(r.tau(), &i);
        assert_eq!(m.apply(start.tau()).unwrap(), i);
    }

    #[test]
    fn boundary_convention() {
        // ρ = e^{2πi/3} on the left corner moves to the right corner
        let k = NumberField::from_int_coeffs_near(&[1, 1, 1], -0.5, 0.866).unwrap();
        let rho = k.generator();
        let (r, _) = reduce_fundamental(&pr(rho.clone())).unwrap();
        assert_eq!(r.tau(), &rho.add_rational(&ratio(1, 1)));
        assert!(in_fundamental_domain(&r).unwrap());
        // (-1 + i√15)/4 lies on the unit circle with negative real part
        let q = NumberField::from_int_coeffs_near(&[15, 0, 1], 0.0, 3.87).unwrap();
        let t = q.generator();
        let start = pr(t.add_rational(&ratio(-1, 1)).scale(&ratio(1, 4)));
        let (r, m) = reduce_fundamental(&start).unwrap();
        assert_eq!(r.tau(), &t.add_rational(&ratio(1, 1)).scale(&ratio(1, 4)));
        assert_eq!(m, ModularMatrix::inversion());
    }

    #[test]
    fn isomorphism_examples() {
        let k = gaussian();
        let i = k.generator();
        let two_i = pr(i.scale(&ratio(2, 1)));
        let three_i = pr(i.scale(&ratio(3, 1)));
        assert!(isomorphic(&two_i, &three_i).unwrap().is_none());
        let m = isomorphic(&pr(i.clone()), &pr(k.element(vec![ratio(1, 2), ratio(1, 2)]))).unwrap().unwrap();
        assert_eq!(m.apply(&i).unwrap(), k.element(vec![ratio(1, 2), ratio(1, 2)]));
        let shifted = pr(two_i.tau().add_rational(&ratio(1, 1)));
        assert!(isomorphic(&two_i, &shifted).unwrap().is_some());
    }

    #[test]
    fn isogeny_examples() {
        let k = gaussian();
        let i = k.generator();
        let w = isogenous(&pr(i.clone()), &pr(i.scale(&ratio(2, 1)))).unwrap().unwrap();
        assert_eq!(w, IsogenyWitness::from_ints(2, 0, 0, 1));
        let c = NumberField::from_int_coeffs_near(&[-2, 0, 0, 1], -0.63, 1.09).unwrap();
        let t = c.generator();
        let w = isogenous(&pr(t.clone()), &pr(-&t.pow(2))).unwrap().unwrap();
        assert_eq!(w, IsogenyWitness::from_ints(0, -2, 1, 0));
        let z = NumberField::from_int_coeffs_near(&[1, 0, 0, 0, 1], 0.7, 0.7).unwrap();
        let zeta = z.generator();
        let a = pr(zeta.pow(2));
        let b = pr(&zeta + &zeta.pow(3));
        assert!(isogenous(&a, &b).unwrap().is_none());
        let m = ModularField::new(&z).unwrap();
        assert!(certainly_not_isogenous(&m, &m.reduce(a.tau()).unwrap(), &m.reduce(b.tau()).unwrap()));
    }

    #[test]
    fn cm_discriminants() {
        let k = gaussian();
        assert_eq!(cm_discriminant(&pr(k.generator())), Some(BigInt::from(-4)));
        let e = NumberField::from_int_coeffs_near(&[1, -1, 1], 0.5, 0.866).unwrap();
        assert_eq!(cm_discriminant(&pr(e.generator())), Some(BigInt::from(-3)));
        let c = NumberField::from_int_coeffs_near(&[-2, 0, 0, 1], -0.63, 1.09).unwrap();
        assert_eq!(cm_discriminant(&pr(c.generator())), None);
    }
}
