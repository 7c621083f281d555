//! Certified interval arithmetic.
//!
//! [`Interval`] is a real interval with fixed-point endpoints `lo / 2^prec`
//! and `hi / 2^prec`; every operation rounds outward, so the true value of an
//! expression always lies in the computed enclosure. [`ComplexBox`] pairs two
//! of them. [`IntervalRect`] is the exact rational rectangle used to describe
//! root embeddings at the API surface.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rat;

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn shr_floor(x: &BigInt, bits: u32) -> BigInt {
    x.div_floor(&pow2(bits))
}

fn shr_ceil(x: &BigInt, bits: u32) -> BigInt {
    -((-x).div_floor(&pow2(bits)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

impl Interval {
    pub fn from_rat(q: &Rat, prec: u32) -> Self {
        let scaled_num = q.numer() << prec;
        let lo = scaled_num.div_floor(q.denom());
        let hi = -((-&scaled_num).div_floor(q.denom()));
        Self { lo, hi, prec }
    }

    /// Enclosure of `[lo, hi]` at the given precision.
    pub fn from_bounds(lo: &Rat, hi: &Rat, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        Self { lo: Self::from_rat(lo, prec).lo, hi: Self::from_rat(hi, prec).hi, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self { lo: BigInt::zero(), hi: BigInt::zero(), prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo(&self) -> Rat {
        Rat::new(self.lo.clone(), pow2(self.prec))
    }

    pub fn hi(&self) -> Rat {
        Rat::new(self.hi.clone(), pow2(self.prec))
    }

    pub fn mid(&self) -> Rat {
        Rat::new(&self.lo + &self.hi, pow2(self.prec + 1))
    }

    pub fn width(&self) -> Rat {
        Rat::new(&self.hi - &self.lo, pow2(self.prec))
    }

    /// True when the width is at most `2^-bits`.
    pub fn width_at_most(&self, bits: i64) -> bool {
        let w = &self.hi - &self.lo;
        let shift = self.prec as i64 - bits;
        if shift >= 0 {
            w <= pow2(shift as u32)
        } else {
            // allowed width below one ulp: only a degenerate interval qualifies
            w.is_zero()
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// `Some(sign)` when the interval excludes zero.
    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn contains_rat(&self, q: &Rat) -> bool {
        self.lo() <= *q && *q <= self.hi()
    }

    /// Strict containment of `other` inside `self`.
    pub fn strictly_contains(&self, other: &Interval) -> bool {
        let p = self.prec.max(other.prec);
        let (a, b) = (self.with_prec(p), other.with_prec(p));
        a.lo < b.lo && b.hi < a.hi
    }

    /// Re-expresses the interval at another precision (outward rounding when coarser).
    pub fn with_prec(&self, prec: u32) -> Self {
        use std::cmp::Ordering::*;
        match prec.cmp(&self.prec) {
            Equal => self.clone(),
            Greater => {
                let s = prec - self.prec;
                Self { lo: &self.lo << s, hi: &self.hi << s, prec }
            }
            Less => {
                let s = self.prec - prec;
                Self { lo: shr_floor(&self.lo, s), hi: shr_ceil(&self.hi, s), prec }
            }
        }
    }

    pub fn square(&self) -> Self {
        if self.contains_zero() {
            let m = self.lo.abs().max(self.hi.abs());
            Self { lo: BigInt::zero(), hi: shr_ceil(&(&m * &m), self.prec), prec: self.prec }
        } else {
            let (a, b) = (&self.lo * &self.lo, &self.hi * &self.hi);
            let (mn, mx) = if a < b { (a, b) } else { (b, a) };
            Self { lo: shr_floor(&mn, self.prec), hi: shr_ceil(&mx, self.prec), prec: self.prec }
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.mid().to_f64().unwrap_or(f64::NAN)
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        debug_assert_eq!(self.prec, rhs.prec);
        Interval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi, prec: self.prec }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        debug_assert_eq!(self.prec, rhs.prec);
        Interval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo, prec: self.prec }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        debug_assert_eq!(self.prec, rhs.prec);
        let p = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let mn = p.iter().min().unwrap();
        let mx = p.iter().max().unwrap();
        Interval { lo: shr_floor(mn, self.prec), hi: shr_ceil(mx, self.prec), prec: self.prec }
    }
}

/// Rectangular enclosure of a complex number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexBox {
    pub fn from_rat(q: &Rat, prec: u32) -> Self {
        Self { re: Interval::from_rat(q, prec), im: Interval::zero(prec) }
    }

    pub fn from_point(re: &Rat, im: &Rat, prec: u32) -> Self {
        Self { re: Interval::from_rat(re, prec), im: Interval::from_rat(im, prec) }
    }

    pub fn from_rect(r: &IntervalRect, prec: u32) -> Self {
        Self {
            re: Interval::from_bounds(&r.re_lo, &r.re_hi, prec),
            im: Interval::from_bounds(&r.im_lo, &r.im_hi, prec),
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self { re: Interval::zero(prec), im: Interval::zero(prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn to_rect(&self) -> IntervalRect {
        IntervalRect { re_lo: self.re.lo(), re_hi: self.re.hi(), im_lo: self.im.lo(), im_hi: self.im.hi() }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Interior containment of `other`.
    pub fn strictly_contains(&self, other: &ComplexBox) -> bool {
        self.re.strictly_contains(&other.re) && self.im.strictly_contains(&other.im)
    }

    pub fn width_at_most(&self, bits: i64) -> bool {
        self.re.width_at_most(bits) && self.im.width_at_most(bits)
    }

    pub fn mid(&self) -> (Rat, Rat) {
        (self.re.mid(), self.im.mid())
    }

    /// Squared modulus enclosure.
    pub fn norm_sqr(&self) -> Interval {
        &self.re.square() + &self.im.square()
    }
}

impl Add for &ComplexBox {
    type Output = ComplexBox;
    fn add(self, rhs: &ComplexBox) -> ComplexBox {
        ComplexBox { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &ComplexBox {
    type Output = ComplexBox;
    fn sub(self, rhs: &ComplexBox) -> ComplexBox {
        ComplexBox { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Neg for &ComplexBox {
    type Output = ComplexBox;
    fn neg(self) -> ComplexBox {
        ComplexBox { re: -&self.re, im: -&self.im }
    }
}

impl Mul for &ComplexBox {
    type Output = ComplexBox;
    fn mul(self, rhs: &ComplexBox) -> ComplexBox {
        ComplexBox {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

/// Closed axis-parallel rectangle with rational corners.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalRect {
    pub re_lo: Rat,
    pub re_hi: Rat,
    pub im_lo: Rat,
    pub im_hi: Rat,
}

impl IntervalRect {
    /// `None` if the corners are out of order.
    pub fn new(re_lo: Rat, re_hi: Rat, im_lo: Rat, im_hi: Rat) -> Option<Self> {
        (re_lo <= re_hi && im_lo <= im_hi).then_some(Self { re_lo, re_hi, im_lo, im_hi })
    }

    /// Square of half-width `radius` centred at `(re, im)`.
    pub fn around(re: &Rat, im: &Rat, radius: &Rat) -> Self {
        Self { re_lo: re - radius, re_hi: re + radius, im_lo: im - radius, im_hi: im + radius }
    }

    pub fn center(&self) -> (Rat, Rat) {
        let two = Rat::from_integer(BigInt::from(2));
        ((&self.re_lo + &self.re_hi) / &two, (&self.im_lo + &self.im_hi) / two)
    }

    pub fn width(&self) -> Rat {
        let a = &self.re_hi - &self.re_lo;
        let b = &self.im_hi - &self.im_lo;
        if a > b { a } else { b }
    }

    pub fn contains(&self, other: &IntervalRect) -> bool {
        self.re_lo <= other.re_lo && other.re_hi <= self.re_hi && self.im_lo <= other.im_lo && other.im_hi <= self.im_hi
    }

    pub fn intersects(&self, other: &IntervalRect) -> bool {
        self.re_lo <= other.re_hi && other.re_lo <= self.re_hi && self.im_lo <= other.im_hi && other.im_lo <= self.im_hi
    }

    pub fn contains_point(&self, re: &Rat, im: &Rat) -> bool {
        self.re_lo <= *re && *re <= self.re_hi && self.im_lo <= *im && *im <= self.im_hi
    }

    /// Mirror image under complex conjugation.
    pub fn conj(&self) -> Self {
        Self { re_lo: self.re_lo.clone(), re_hi: self.re_hi.clone(), im_lo: -&self.im_hi, im_hi: -&self.im_lo }
    }
}
