//! Exact linear algebra over Q, over number fields, and unimodular integer
//! transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Result;
use crate::rational::Rat;

/// Field operations needed for Gaussian elimination. `inv` may fail when the
/// ambient algebra turns out not to be a field.
pub trait Scalar: Clone {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Result<Self>;
}

impl Scalar for Rat {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
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
        Ok(self.recip())
    }
}

/// Row echelon reduction in place; returns the pivot columns.
pub fn echelon<T: Scalar>(m: &mut [Vec<T>], reduced: bool) -> Result<Vec<usize>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv()?;
        for j in c..cols {
            m[r][j] = m[r][j].mul(&inv);
        }
        let start = if reduced { 0 } else { r + 1 };
        for i in start..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for j in c..cols {
                let t = factor.mul(&m[r][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> Result<usize> {
    let mut m = rows.to_vec();
    Ok(echelon(&mut m, false)?.len())
}

/// Determinant of a square matrix.
pub fn det<T: Scalar>(rows: &[Vec<T>], one: T) -> Result<T> {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut acc = one;
    let mut negate = false;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Ok(acc.sub(&acc));
        };
        if p != c {
            m.swap(p, c);
            negate = !negate;
        }
        acc = acc.mul(&m[c][c]);
        let inv = m[c][c].inv()?;
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].mul(&inv);
            for j in c..n {
                let t = factor.mul(&m[c][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    Ok(if negate { acc.sub(&acc).sub(&acc) } else { acc })
}

/// Basis of the right kernel `{x : m x = 0}`, one vector per free column with
/// that coordinate set to 1.
pub fn kernel(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut a = m.to_vec();
    let pivots = echelon(&mut a, true).expect("rational elimination cannot fail");
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `m x = b`; `None` when inconsistent. Free variables are set to zero.
pub fn solve(m: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = echelon(&mut aug, true).ok()?;
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

/// Canonical (reduced echelon) basis of the row space.
pub fn row_space(rows: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut a = rows.to_vec();
    let pivots = echelon(&mut a, true).expect("rational elimination cannot fail");
    a.truncate(pivots.len());
    a
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|c| m.iter().map(|row| row[c].clone()).collect()).collect()
}

pub(crate) const FAST_PRIME: u64 = 0xffff_ffff_ffff_ffc5; // 2^64 - 59

pub(crate) fn mod_p(q: &Rat) -> Option<u64> {
    let p = BigInt::from(FAST_PRIME);
    let den = q.denom().mod_floor(&p);
    if den.is_zero() {
        return None;
    }
    let num = q.numer().mod_floor(&p).to_u64()?;
    let den = den.to_u64()?;
    Some(mulmod(num, powmod(den, FAST_PRIME - 2)))
}

pub(crate) fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % FAST_PRIME as u128) as u64
}

pub(crate) fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    r
}

/// Rank of the reduction modulo a fixed 64-bit prime; `None` if some
/// denominator vanishes there. The modular rank never exceeds the rational
/// rank, so a full modular rank certifies independence over Q.
pub fn rank_mod_prime(rows: &[Vec<Rat>]) -> Option<usize> {
    let m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(mod_p).collect::<Option<Vec<_>>>()).collect::<Option<_>>()?;
    Some(rank_mod_prime_reduced(m))
}

/// Rank over `F_p` of rows already reduced modulo the fixed prime.
pub fn rank_mod_prime_reduced(mut m: Vec<Vec<u64>>) -> usize {
    let nrows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = powmod(m[r][c], FAST_PRIME - 2);
        for i in r + 1..nrows {
            if m[i][c] == 0 {
                continue;
            }
            let f = mulmod(m[i][c], inv);
            for j in c..cols {
                let t = mulmod(f, m[r][j]);
                let v = m[i][j];
                m[i][j] = if v >= t { v - t } else { v + (FAST_PRIME - t) };
            }
        }
        r += 1;
    }
    r
}

pub(crate) fn addmod(a: u64, b: u64) -> u64 {
    let (s, over) = a.overflowing_add(b);
    if over || s >= FAST_PRIME {
        s.wrapping_sub(FAST_PRIME)
    } else {
        s
    }
}

/// Integer matrix helpers.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Unimodular `U` with `U c = g e_1`, where `g = gcd(c) >= 0`.
/// When `c` is already a signed unit vector the result is a signed permutation
/// that keeps the other coordinates in order.
pub fn reduce_column(c: &[BigInt]) -> (IntMatrix, BigInt) {
    let n = c.len();
    let mut v = c.to_vec();
    let mut u = identity(n);
    // Bring the gcd into position 0 by pairwise extended-gcd row operations.
    for i in 1..n {
        if v[i].is_zero() {
            continue;
        }
        if v[0].is_zero() {
            v.swap(0, i);
            u.swap(0, i);
            continue;
        }
        let e = v[0].extended_gcd(&v[i]);
        let (g, x, y) = (e.gcd, e.x, e.y);
        let a0 = &v[0] / &g;
        let ai = &v[i] / &g;
        // [x y; -ai a0] has determinant x*a0 + y*ai = 1
        let row0: Vec<BigInt> = (0..n).map(|j| &x * &u[0][j] + &y * &u[i][j]).collect();
        let rowi: Vec<BigInt> = (0..n).map(|j| -&ai * &u[0][j] + &a0 * &u[i][j]).collect();
        u[0] = row0;
        u[i] = rowi;
        v[0] = g;
        v[i] = BigInt::zero();
    }
    if v[0].is_negative() {
        v[0] = -v[0].clone();
        u[0].iter_mut().for_each(|x| *x = -x.clone());
    }
    (u, v[0].clone())
}

/// Inverse of an integer matrix with determinant ±1.
pub fn unimodular_inverse(u: &[Vec<BigInt>]) -> IntMatrix {
    let n = u.len();
    let mut aug: Vec<Vec<Rat>> = u
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rat> = row.iter().cloned().map(Rat::from_integer).collect();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    echelon(&mut aug, true).expect("rational elimination cannot fail");
    aug.iter().map(|row| row[n..].iter().map(|q| q.to_integer()).collect()).collect()
}

/// Row-style Hermite normal form of an integer matrix with independent rows:
/// upper echelon, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`.
pub fn hermite_rows(rows: &[Vec<BigInt>]) -> IntMatrix {
    let mut m = rows.to_vec();
    let n = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == n {
            break;
        }
        for i in r + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            if m[r][c].is_zero() {
                m.swap(r, i);
                continue;
            }
            let e = m[r][c].extended_gcd(&m[i][c]);
            let a = &m[r][c] / &e.gcd;
            let b = &m[i][c] / &e.gcd;
            let top: Vec<BigInt> = (0..cols).map(|j| &e.x * &m[r][j] + &e.y * &m[i][j]).collect();
            let bottom: Vec<BigInt> = (0..cols).map(|j| -&b * &m[r][j] + &a * &m[i][j]).collect();
            m[r] = top;
            m[i] = bottom;
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            m[r].iter_mut().for_each(|x| *x = -x.clone());
        }
        for i in 0..r {
            let q = m[i][c].div_floor(&m[r][c]);
            if !q.is_zero() {
                for j in 0..cols {
                    let t = &q * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

pub fn int_det(m: &[Vec<BigInt>]) -> BigInt {
    let rows: Vec<Vec<Rat>> = m.iter().map(|r| r.iter().cloned().map(Rat::from_integer).collect()).collect();
    det(&rows, Rat::one()).expect("rational elimination cannot fail").to_integer()
}

pub fn int_mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..m).map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum()).collect())
        .collect()
}

pub fn cross(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}
