//! The action of `PGL2(Q)` on `P1(k)` for a cubic field `k`.

use num_traits::{One, Zero};

use crate::elliptic::{self, IsogenyWitness};
use crate::error::{Error, Result};
use crate::field::{self, FieldElement};
use crate::poly::RationalPolynomial;
use crate::rational::Rat;

fn require_cubic(x: &FieldElement) -> Result<()> {
    if x.field().degree() != 3 || field::element_degree(x) != 3 {
        return Err(Error::NotCubicElement);
    }
    Ok(())
}

/// Whether only scalar matrices fix `x`: a fixed point solves
/// `c x^2 + (d - a) x - b = 0`, so this holds iff `1, x, x^2` are independent.
pub fn stabilizer_check(x: &FieldElement) -> Result<bool> {
    require_cubic(x)?;
    let k = x.field();
    Ok(field::q_dependence(&[k.one(), x.clone(), x.pow(2)])?.is_empty())
}

/// Invertible rational `A` with `A·x = y`, read off a relation among
/// `1, x, y, xy` (four elements of a three-dimensional space).
pub fn orbit_matrix(x: &FieldElement, y: &FieldElement) -> Result<IsogenyWitness> {
    require_cubic(x)?;
    require_cubic(y)?;
    elliptic::isogenous_elements(x, y)?.ok_or_else(|| Error::Internal("no relation among 1, x, y, xy".into()))
}

/// Coefficients `(p0, p1, p2)` of `t^3 = p2 t^2 + p1 t + p0`.
pub type CubicCoeffs = [Rat; 3];

fn cubic_poly(p: &CubicCoeffs) -> RationalPolynomial {
    RationalPolynomial::new(vec![-p[0].clone(), -p[1].clone(), -p[2].clone(), Rat::one()])
}

/// `Q(λ) = -p1 (λ + p2) + λ (λ + p2)^2 - p0`.
pub fn claim2_q(p: &CubicCoeffs, lambda: &Rat) -> Rat {
    let s = lambda + &p[2];
    -(&p[1] * &s) + lambda * &s * &s - &p[0]
}

/// Matrix `A = (a b; c d)` with `(aτ + b)/(cτ + d) = λτ + τ^2` for a root
/// `τ` of the cubic, together with `det A = Q(λ)`.
pub fn claim2_matrix(p: &CubicCoeffs, lambda: &Rat) -> Result<(IsogenyWitness, Rat)> {
    if !cubic_poly(p).rational_roots().is_empty() {
        return Err(Error::ReducibleCubic);
    }
    let s = lambda + &p[2];
    let a = &p[1] - lambda * &s;
    let w = IsogenyWitness::new([a, p[0].clone(), Rat::one(), -s]);
    let q = claim2_q(p, lambda);
    if q.is_zero() {
        return Err(Error::QVanishes);
    }
    debug_assert_eq!(w.det(), q);
    Ok((w, q))
}

/// `(λτ + τ^2)(cτ + d) - (aτ + b)` reduced modulo the cubic.
pub fn claim2_residual(p: &CubicCoeffs, lambda: &Rat, w: &IsogenyWitness) -> RationalPolynomial {
    let lhs = RationalPolynomial::new(vec![Rat::zero(), lambda.clone(), Rat::one()]);
    let den = RationalPolynomial::new(vec![w.d.clone(), w.c.clone()]);
    let num = RationalPolynomial::new(vec![w.b.clone(), w.a.clone()]);
    (&(&lhs * &den) - &num).rem(&cubic_poly(p))
}

/// A point of `P1(k)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectivePoint {
    /// `[x : 1]`
    Finite(FieldElement),
    Infinity,
}

impl ProjectivePoint {
    pub fn is_rational(&self) -> bool {
        match self {
            ProjectivePoint::Finite(x) => x.as_rational().is_some(),
            ProjectivePoint::Infinity => true,
        }
    }
}

/// `PGL2(Q)` has two orbits on `P1(k)`: `P1(Q)` and its complement.
pub fn same_orbit(x: &ProjectivePoint, y: &ProjectivePoint) -> Result<bool> {
    match (x, y) {
        (ProjectivePoint::Finite(a), ProjectivePoint::Finite(b)) if !x.is_rational() && !y.is_rational() => {
            let w = orbit_matrix(a, b)?;
            Ok(w.verify(a, b))
        }
        _ => Ok(x.is_rational() == y.is_rational()),
    }
}
