//! Truncated formal power series in one variable `q`.
//!
//! Two coefficient domains are supported: exact integers ([`TruncatedSeries`],
//! backed by [`BigInt`]) and residues modulo `m` ([`ModSeries`], machine words).
//! Every operation truncates silently; coefficient `n` of a result depends only
//! on coefficients `0..=n` of the inputs, and binary operations on series of
//! different precision produce a result at the smaller precision.
//!
//! Multiplication walks the nonzero support of the sparser operand, so a
//! product with a pentagonal-number expansion costs `O(N * #terms)` rather
//! than `O(N^2)`. Inversion does the same over the support of its argument.

use std::fmt::Write as _;
use std::io;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest modulus accepted by [`ModSeries`]; products of two residues fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

// ---------------------------------------------------------------------------
// Coefficient rings and shared kernels
// ---------------------------------------------------------------------------

pub(crate) trait Ring {
    type Elem: Clone + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `acc += a * b`
    fn mul_add(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem);
    /// `acc -= a * b`
    fn mul_sub(&self, acc: &mut Self::Elem, a: &Self::Elem, b: &Self::Elem);
    fn unit_inverse(&self, x: &Self::Elem) -> Option<Self::Elem>;
    fn describe(&self, x: &Self::Elem) -> String;
}

pub(crate) struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn is_zero(&self, x: &BigInt) -> bool {
        x.is_zero()
    }
    fn neg(&self, x: &BigInt) -> BigInt {
        -x
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn mul_add(&self, acc: &mut BigInt, a: &BigInt, b: &BigInt) {
        *acc += a * b;
    }
    fn mul_sub(&self, acc: &mut BigInt, a: &BigInt, b: &BigInt) {
        *acc -= a * b;
    }
    fn unit_inverse(&self, x: &BigInt) -> Option<BigInt> {
        // the units of Z are +1 and -1, each its own inverse
        if x.abs().is_one() {
            Some(x.clone())
        } else {
            None
        }
    }
    fn describe(&self, x: &BigInt) -> String {
        x.to_string()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Zmod(pub(crate) u64);

impl Ring for Zmod {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, x: &u64) -> bool {
        *x == 0
    }
    fn neg(&self, x: &u64) -> u64 {
        if *x == 0 {
            0
        } else {
            self.0 - x
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn mul_add(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = (*acc + a * b % self.0) % self.0;
    }
    fn mul_sub(&self, acc: &mut u64, a: &u64, b: &u64) {
        let p = a * b % self.0;
        *acc = (*acc + self.0 - p) % self.0;
    }
    fn unit_inverse(&self, x: &u64) -> Option<u64> {
        mod_inverse(*x, self.0)
    }
    fn describe(&self, x: &u64) -> String {
        format!("{x} (mod {})", self.0)
    }
}

/// Inverse of `x` modulo `m`, if `gcd(x, m) = 1`.
pub fn mod_inverse(x: u64, m: u64) -> Option<u64> {
    let e = (x as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

fn support<R: Ring>(ring: &R, a: &[R::Elem]) -> Vec<usize> {
    a.iter()
        .enumerate()
        .filter(|(_, x)| !ring.is_zero(x))
        .map(|(i, _)| i)
        .collect()
}

/// Truncated Cauchy product at `min(len a, len b)` coefficients.
pub(crate) fn mul_kernel<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    let prec = a.len().min(b.len());
    let (a, b) = (&a[..prec], &b[..prec]);
    let sa = support(ring, a);
    let sb = support(ring, b);
    let (sparse, sparse_support, dense, dense_support) = if sa.len() <= sb.len() {
        (a, sa, b, sb)
    } else {
        (b, sb, a, sa)
    };
    let mut out = vec![ring.zero(); prec];
    for &i in &sparse_support {
        let x = &sparse[i];
        for &j in &dense_support {
            if i + j >= prec {
                break;
            }
            ring.mul_add(&mut out[i + j], x, &dense[j]);
        }
    }
    out
}

/// Computes `x / den` to the precision of `x` by forward substitution over the
/// support of `den`. Equal, coefficient for coefficient, to `x * den^{-1}`.
pub(crate) fn div_kernel<R: Ring>(ring: &R, x: &[R::Elem], den: &[R::Elem]) -> Result<Vec<R::Elem>> {
    let prec = x.len();
    let c = ring
        .unit_inverse(&den[0])
        .ok_or_else(|| Error::NonUnitConstant(ring.describe(&den[0])))?;
    let tail: Vec<usize> = support(ring, &den[..den.len().min(prec)])
        .into_iter()
        .filter(|&i| i > 0)
        .collect();
    let mut y: Vec<R::Elem> = Vec::with_capacity(prec);
    for n in 0..prec {
        let mut acc = x[n].clone();
        for &i in &tail {
            if i > n {
                break;
            }
            ring.mul_sub(&mut acc, &den[i], &y[n - i]);
        }
        y.push(ring.mul(&c, &acc));
    }
    Ok(y)
}

pub(crate) fn invert_kernel<R: Ring>(ring: &R, a: &[R::Elem]) -> Result<Vec<R::Elem>> {
    let c = ring
        .unit_inverse(&a[0])
        .ok_or_else(|| Error::NonUnitConstant(ring.describe(&a[0])))?;
    let tail: Vec<usize> = support(ring, a).into_iter().filter(|&i| i > 0).collect();
    let neg_c = ring.neg(&c);
    let mut b: Vec<R::Elem> = Vec::with_capacity(a.len());
    b.push(c);
    for n in 1..a.len() {
        let mut acc = ring.zero();
        for &i in &tail {
            if i > n {
                break;
            }
            ring.mul_add(&mut acc, &a[i], &b[n - i]);
        }
        b.push(ring.mul(&neg_c, &acc));
    }
    Ok(b)
}

fn pow_kernel<R: Ring>(ring: &R, a: &[R::Elem], one: R::Elem, e: u64) -> Vec<R::Elem> {
    let prec = a.len();
    let mut result = vec![ring.zero(); prec];
    result[0] = one;
    if e == 0 {
        return result;
    }
    let nnz = support(ring, a).len();
    // Sparse bases (eta products) are cheapest by repeated sparse products;
    // dense bases go through square-and-multiply.
    if nnz * nnz <= 4 * prec || e <= 2 {
        for _ in 0..e {
            result = mul_kernel(ring, &result, a);
        }
    } else {
        let mut base = a.to_vec();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = mul_kernel(ring, &result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = mul_kernel(ring, &base, &base);
            }
        }
    }
    result
}

fn progression_len(precision: usize, modulus: u64, residue: u64) -> Result<usize> {
    if modulus == 0 {
        return Err(Error::NotPositive("progression modulus"));
    }
    if residue >= modulus {
        return Err(Error::InvalidProgression { modulus, residue });
    }
    let b = residue as usize;
    if b >= precision {
        return Err(Error::InsufficientPrecision {
            needed: b + 1,
            available: precision,
        });
    }
    Ok((precision - b - 1) / modulus as usize + 1)
}

fn write_csv_rows<W: io::Write, T: std::fmt::Display>(mut w: W, coeffs: &[T]) -> io::Result<()> {
    for (n, c) in coeffs.iter().enumerate() {
        writeln!(w, "{n},{c}")?;
    }
    Ok(())
}

fn csv_string<T: std::fmt::Display>(coeffs: &[T]) -> String {
    let mut out = String::new();
    for (n, c) in coeffs.iter().enumerate() {
        let _ = writeln!(out, "{n},{c}");
    }
    out
}

// ---------------------------------------------------------------------------
// Exact series
// ---------------------------------------------------------------------------

/// A power series with exact integer coefficients, truncated after `precision` terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Builds a series from `(exponent, coefficient)` pairs; exponents at or
    /// beyond `precision` are dropped and repeated exponents accumulate.
    pub fn from_terms<I>(precision: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let mut s = Self::zero(precision)?;
        for (n, c) in terms {
            if n < precision {
                s.coeffs[n] += c;
            }
        }
        Ok(s)
    }

    pub fn zero(precision: usize) -> Result<Self> {
        Self::new(vec![BigInt::zero(); precision])
    }

    pub fn one(precision: usize) -> Result<Self> {
        Self::monomial(0, BigInt::one(), precision)
    }

    /// `c * q^k`, which is the zero series when `k >= precision`.
    pub fn monomial(k: usize, c: BigInt, precision: usize) -> Result<Self> {
        let mut s = Self::zero(precision)?;
        if k < precision {
            s.coeffs[k] = c;
        }
        Ok(s)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&BigInt> {
        self.coeffs.get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Number of nonzero stored coefficients.
    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Keeps only the first `precision` coefficients (no-op if already shorter).
    pub fn truncate(&self, precision: usize) -> Result<Self> {
        let n = precision.min(self.precision());
        Self::new(self.coeffs[..n].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Self { coeffs }
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            coeffs: mul_kernel(&Integers, &self.coeffs, &other.coeffs),
        }
    }

    /// Multiplicative inverse; the constant term must be `1` or `-1`.
    pub fn invert(&self) -> Result<Self> {
        Ok(Self {
            coeffs: invert_kernel(&Integers, &self.coeffs)?,
        })
    }

    /// `self * den^{-1}` in a single pass. Used where a product of several
    /// sparse denominators would otherwise force a dense inversion.
    pub(crate) fn mul_inverse_of(&self, den: &Self) -> Result<Self> {
        let prec = self.precision().min(den.precision());
        Ok(Self {
            coeffs: div_kernel(&Integers, &self.coeffs[..prec], &den.coeffs[..prec])?,
        })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return Err(Error::NegativeExponent(e));
        }
        Ok(Self {
            coeffs: pow_kernel(&Integers, &self.coeffs, BigInt::one(), e as u64),
        })
    }

    /// The series `sum_n s[A n + B] q^n`.
    pub fn extract_progression(&self, modulus: u64, residue: u64) -> Result<Self> {
        let len = progression_len(self.precision(), modulus, residue)?;
        let (a, b) = (modulus as usize, residue as usize);
        Ok(Self {
            coeffs: (0..len).map(|n| self.coeffs[a * n + b].clone()).collect(),
        })
    }

    /// Multiplication by `q^k`, keeping the precision.
    pub fn shift(&self, k: usize) -> Self {
        let prec = self.precision();
        let mut coeffs = vec![BigInt::zero(); prec];
        for n in k..prec {
            coeffs[n] = self.coeffs[n - k].clone();
        }
        Self { coeffs }
    }

    /// Substitution `q -> q^d` at the same precision.
    pub fn dilate(&self, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::NotPositive("dilation factor"));
        }
        let prec = self.precision();
        let mut coeffs = vec![BigInt::zero(); prec];
        for (n, c) in self.coeffs.iter().enumerate() {
            if n * d >= prec {
                break;
            }
            coeffs[n * d] = c.clone();
        }
        Ok(Self { coeffs })
    }

    /// Coefficientwise product with a sign pattern, `result[n] = sign(n) * s[n]`.
    pub fn twist_by<F: Fn(usize) -> i8>(&self, sign: F) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| match sign(n) {
                0 => BigInt::zero(),
                s if s > 0 => c.clone(),
                _ => -c,
            })
            .collect();
        Self { coeffs }
    }

    pub fn reduce_mod(&self, m: u64) -> Result<ModSeries> {
        check_modulus(m)?;
        let big_m = BigInt::from(m);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.mod_floor(&big_m).to_u64().expect("residue below 2^32"))
            .collect();
        Ok(ModSeries { modulus: m, coeffs })
    }

    /// Writes `n,coefficient` lines in ascending `n`.
    pub fn write_csv<W: io::Write>(&self, w: W) -> io::Result<()> {
        write_csv_rows(w, &self.coeffs)
    }

    pub fn to_csv(&self) -> String {
        csv_string(&self.coeffs)
    }
}

impl Index<usize> for TruncatedSeries {
    type Output = BigInt;

    fn index(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }
}

// ---------------------------------------------------------------------------
// Series modulo m
// ---------------------------------------------------------------------------

fn check_modulus(m: u64) -> Result<()> {
    if !(2..MAX_MODULUS).contains(&m) {
        return Err(Error::InvalidModulus(m));
    }
    Ok(())
}

/// A truncated power series with coefficients in `Z/mZ`, stored as residues in `[0, m)`.
///
/// Binary operations panic when the two moduli differ; mixing moduli is a
/// programming error rather than a data condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModSeries {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl ModSeries {
    /// Reduces arbitrary signed values into `[0, m)`.
    pub fn from_i64(modulus: u64, values: &[i64]) -> Result<Self> {
        check_modulus(modulus)?;
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        let m = modulus as i64;
        let coeffs = values.iter().map(|v| v.rem_euclid(m) as u64).collect();
        Ok(Self { modulus, coeffs })
    }

    pub fn from_residues(modulus: u64, residues: Vec<u64>) -> Result<Self> {
        check_modulus(modulus)?;
        if residues.is_empty() {
            return Err(Error::EmptySeries);
        }
        let coeffs = residues.into_iter().map(|r| r % modulus).collect();
        Ok(Self { modulus, coeffs })
    }

    pub fn zero(modulus: u64, precision: usize) -> Result<Self> {
        Self::from_residues(modulus, vec![0; precision])
    }

    pub fn one(modulus: u64, precision: usize) -> Result<Self> {
        let mut s = Self::zero(modulus, precision)?;
        s.coeffs[0] = 1;
        Ok(s)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<u64> {
        self.coeffs.get(n).copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn truncate(&self, precision: usize) -> Result<Self> {
        let n = precision.min(self.precision());
        Self::from_residues(self.modulus, self.coeffs[..n].to_vec())
    }

    fn ring(&self) -> Zmod {
        Zmod(self.modulus)
    }

    fn same_modulus(&self, other: &Self) {
        assert_eq!(
            self.modulus, other.modulus,
            "ModSeries operands carry different moduli"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_modulus(other);
        let m = self.modulus;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % m).collect();
        Self { modulus: m, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_modulus(other);
        let m = self.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a + m - b) % m)
            .collect();
        Self { modulus: m, coeffs }
    }

    pub fn neg(&self) -> Self {
        let ring = self.ring();
        Self {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| ring.neg(c)).collect(),
        }
    }

    pub fn scale(&self, k: u64) -> Self {
        let m = self.modulus;
        let k = k % m;
        Self {
            modulus: m,
            coeffs: self.coeffs.iter().map(|c| c * k % m).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_modulus(other);
        Self {
            modulus: self.modulus,
            coeffs: mul_kernel(&self.ring(), &self.coeffs, &other.coeffs),
        }
    }

    /// Multiplicative inverse; the constant term must be coprime to the modulus.
    pub fn invert(&self) -> Result<Self> {
        Ok(Self {
            modulus: self.modulus,
            coeffs: invert_kernel(&self.ring(), &self.coeffs)?,
        })
    }

    pub(crate) fn mul_inverse_of(&self, den: &Self) -> Result<Self> {
        self.same_modulus(den);
        let prec = self.precision().min(den.precision());
        Ok(Self {
            modulus: self.modulus,
            coeffs: div_kernel(&self.ring(), &self.coeffs[..prec], &den.coeffs[..prec])?,
        })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return Err(Error::NegativeExponent(e));
        }
        Ok(Self {
            modulus: self.modulus,
            coeffs: pow_kernel(&self.ring(), &self.coeffs, 1 % self.modulus, e as u64),
        })
    }

    pub fn extract_progression(&self, modulus: u64, residue: u64) -> Result<Self> {
        let len = progression_len(self.precision(), modulus, residue)?;
        let (a, b) = (modulus as usize, residue as usize);
        Ok(Self {
            modulus: self.modulus,
            coeffs: (0..len).map(|n| self.coeffs[a * n + b]).collect(),
        })
    }

    pub fn shift(&self, k: usize) -> Self {
        let prec = self.precision();
        let mut coeffs = vec![0; prec];
        for n in k..prec {
            coeffs[n] = self.coeffs[n - k];
        }
        Self {
            modulus: self.modulus,
            coeffs,
        }
    }

    pub fn twist_by<F: Fn(usize) -> i8>(&self, sign: F) -> Self {
        let ring = self.ring();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| match sign(n) {
                0 => 0,
                s if s > 0 => *c,
                _ => ring.neg(c),
            })
            .collect();
        Self {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Reduces further to a divisor `d` of the current modulus.
    pub fn reduce_to(&self, d: u64) -> Result<Self> {
        check_modulus(d)?;
        if self.modulus % d != 0 {
            return Err(Error::ModulusMismatch(self.modulus, d));
        }
        Ok(Self {
            modulus: d,
            coeffs: self.coeffs.iter().map(|c| c % d).collect(),
        })
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> io::Result<()> {
        write_csv_rows(w, &self.coeffs)
    }

    pub fn to_csv(&self) -> String {
        csv_string(&self.coeffs)
    }
}

impl Index<usize> for ModSeries {
    type Output = u64;

    fn index(&self, n: usize) -> &u64 {
        &self.coeffs[n]
    }
}

/// Operations shared by exact and modular series, used by the congruence engine.
pub trait CoefficientSeries: Clone + PartialEq {
    fn precision(&self) -> usize;
    fn extract_progression(&self, modulus: u64, residue: u64) -> Result<Self>;
    fn twist_by_sign(&self, sign: &dyn Fn(usize) -> i8) -> Self;
    fn sub_series(&self, other: &Self) -> Self;
    fn add_series(&self, other: &Self) -> Self;
    /// Coefficient `n` reduced into `[0, m)`. For a [`ModSeries`] this requires
    /// `m` to divide the series modulus.
    fn residue(&self, n: usize, m: u64) -> Result<u64>;
}

impl CoefficientSeries for TruncatedSeries {
    fn precision(&self) -> usize {
        self.precision()
    }
    fn extract_progression(&self, modulus: u64, residue: u64) -> Result<Self> {
        self.extract_progression(modulus, residue)
    }
    fn twist_by_sign(&self, sign: &dyn Fn(usize) -> i8) -> Self {
        self.twist_by(sign)
    }
    fn sub_series(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn add_series(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn residue(&self, n: usize, m: u64) -> Result<u64> {
        check_modulus(m)?;
        let c = self.coeff(n).ok_or(Error::InsufficientPrecision {
            needed: n + 1,
            available: self.precision(),
        })?;
        Ok(c.mod_floor(&BigInt::from(m)).to_u64().expect("residue below 2^32"))
    }
}

impl CoefficientSeries for ModSeries {
    fn precision(&self) -> usize {
        self.precision()
    }
    fn extract_progression(&self, modulus: u64, residue: u64) -> Result<Self> {
        self.extract_progression(modulus, residue)
    }
    fn twist_by_sign(&self, sign: &dyn Fn(usize) -> i8) -> Self {
        self.twist_by(sign)
    }
    fn sub_series(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn add_series(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn residue(&self, n: usize, m: u64) -> Result<u64> {
        check_modulus(m)?;
        if self.modulus % m != 0 {
            return Err(Error::ModulusMismatch(self.modulus, m));
        }
        let c = self.coeff(n).ok_or(Error::InsufficientPrecision {
            needed: n + 1,
            available: self.precision(),
        })?;
        Ok(c % m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(c: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_i64(c).unwrap()
    }

    fn as_i64(s: &TruncatedSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn binomial_square() {
        let s = ts(&[1, 1, 0, 0]);
        assert_eq!(as_i64(&s.mul(&s)), vec![1, 2, 1, 0]);
        assert_eq!(as_i64(&s.pow(2).unwrap()), vec![1, 2, 1, 0]);
    }

    #[test]
    fn one_is_identity() {
        let s = ts(&[3, -1, 4, 1, -5, 9]);
        assert_eq!(s.mul(&TruncatedSeries::one(6).unwrap()), s);
        assert_eq!(s.pow(1).unwrap(), s);
        assert_eq!(s.pow(0).unwrap(), TruncatedSeries::one(6).unwrap());
    }

    #[test]
    fn precision_mismatch_takes_minimum() {
        let a = ts(&[1, 1, 1, 1, 1]);
        let b = ts(&[1, 1, 1]);
        assert_eq!(a.mul(&b).precision(), 3);
        assert_eq!(a.add(&b).precision(), 3);
    }

    #[test]
    fn geometric_series() {
        let inv = ts(&[1, -1, 0, 0, 0, 0, 0]).invert().unwrap();
        assert_eq!(as_i64(&inv), vec![1; 7]);
        assert_eq!(inv.invert().unwrap(), ts(&[1, -1, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn invert_with_negative_unit() {
        let s = ts(&[-1, 2, 0, 3, 0]);
        let inv = s.invert().unwrap();
        assert_eq!(s.mul(&inv), TruncatedSeries::one(5).unwrap());
    }

    #[test]
    fn invert_rejects_non_unit() {
        assert!(matches!(ts(&[2, 1]).invert(), Err(Error::NonUnitConstant(_))));
        assert!(matches!(ts(&[0, 1]).invert(), Err(Error::NonUnitConstant(_))));
        let m = ModSeries::from_i64(6, &[3, 1]).unwrap();
        assert!(m.invert().is_err());
        let m = ModSeries::from_i64(7, &[3, 1, 1]).unwrap();
        let inv = m.invert().unwrap();
        assert_eq!(m.mul(&inv), ModSeries::one(7, 3).unwrap());
    }

    #[test]
    fn negative_power_rejected() {
        assert_eq!(ts(&[1, 1]).pow(-1), Err(Error::NegativeExponent(-1)));
    }

    #[test]
    fn dense_power_matches_repeated_product() {
        let s = ts(&[1, 2, -3, 1, 5, -2, 7, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
        let mut expect = TruncatedSeries::one(16).unwrap();
        for _ in 0..7 {
            expect = expect.mul(&s);
        }
        assert_eq!(s.pow(7).unwrap(), expect);
    }

    #[test]
    fn progression_extraction() {
        let s = ts(&[1, 2, 3, 4, 5]);
        assert_eq!(as_i64(&s.extract_progression(2, 0).unwrap()), vec![1, 3, 5]);
        assert_eq!(as_i64(&s.extract_progression(2, 1).unwrap()), vec![2, 4]);
        assert_eq!(as_i64(&s.extract_progression(1, 0).unwrap()), vec![1, 2, 3, 4, 5]);
        // floor((5 - 2 - 1) / 3) + 1
        assert_eq!(s.extract_progression(3, 2).unwrap().precision(), 1);
    }

    #[test]
    fn progression_errors() {
        let s = ts(&[1, 2, 3]);
        assert_eq!(
            s.extract_progression(2, 2),
            Err(Error::InvalidProgression { modulus: 2, residue: 2 })
        );
        assert!(s.extract_progression(0, 0).is_err());
        assert!(ts(&[1, 2]).extract_progression(5, 3).is_err());
    }

    #[test]
    fn shift_and_dilate() {
        assert_eq!(as_i64(&ts(&[1, 1, 0, 0]).shift(2)), vec![0, 0, 1, 1]);
        let s = ts(&[7, 8, 9]);
        assert_eq!(s.shift(0), s);
        assert_eq!(as_i64(&ts(&[1, 2, 3, 4]).dilate(2).unwrap()), vec![1, 0, 2, 0]);
    }

    #[test]
    fn reduce_mod_examples() {
        let m = ts(&[1, 5, 6]).reduce_mod(5).unwrap();
        assert_eq!(m.coeffs(), &[1, 0, 1]);
        let m = ts(&[-1, -7, 12]).reduce_mod(5).unwrap();
        assert_eq!(m.coeffs(), &[4, 3, 2]);
        assert_eq!(ts(&[1]).reduce_mod(1), Err(Error::InvalidModulus(1)));
        assert_eq!(ts(&[1]).reduce_mod(0), Err(Error::InvalidModulus(0)));
        assert!(ts(&[1]).reduce_mod(MAX_MODULUS).is_err());
    }

    #[test]
    fn csv_format() {
        assert_eq!(ts(&[1, -2, 30]).to_csv(), "0,1\n1,-2\n2,30\n");
        let mut buf = Vec::new();
        ts(&[4]).reduce_mod(3).unwrap().write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0,1\n");
    }

    #[test]
    fn fused_division_matches_invert_then_mul() {
        let x = ts(&[2, -1, 4, 0, 3, 3, -8, 1]);
        let d = ts(&[1, 0, -1, 2, 0, 0, 1, 0]);
        assert_eq!(x.mul_inverse_of(&d).unwrap(), x.mul(&d.invert().unwrap()));
        let xm = x.reduce_mod(7).unwrap();
        let dm = d.reduce_mod(7).unwrap();
        assert_eq!(xm.mul_inverse_of(&dm).unwrap(), xm.mul(&dm.invert().unwrap()));
    }

    #[test]
    fn mod_inverse_values() {
        assert_eq!(mod_inverse(8, 27), Some(17));
        assert_eq!(mod_inverse(8, 81), Some(71));
        assert_eq!(mod_inverse(6, 9), None);
    }

    fn series_strategy(len: usize) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-1000i64..1000, len)
    }

    proptest! {
        #[test]
        fn mul_commutative_associative(
            a in series_strategy(64), b in series_strategy(64), c in series_strategy(64)
        ) {
            let (a, b, c) = (ts(&a), ts(&b), ts(&c));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn mul_distributes(a in series_strategy(48), b in series_strategy(48), c in series_strategy(48)) {
            let (a, b, c) = (ts(&a), ts(&b), ts(&c));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn invert_two_sided(mut a in series_strategy(64), unit in prop::bool::ANY) {
            a[0] = if unit { 1 } else { -1 };
            let a = ts(&a);
            let inv = a.invert().unwrap();
            let one = TruncatedSeries::one(64).unwrap();
            prop_assert_eq!(a.mul(&inv), one.clone());
            prop_assert_eq!(inv.mul(&a), one);
            prop_assert_eq!(inv.invert().unwrap(), a);
        }

        #[test]
        fn truncation_is_consistent(a in series_strategy(40), b in series_strategy(40), k in 1usize..40) {
            let (a, b) = (ts(&a), ts(&b));
            let short = a.truncate(k).unwrap().mul(&b.truncate(k).unwrap());
            prop_assert_eq!(short, a.mul(&b).truncate(k).unwrap());
        }

        #[test]
        fn extract_is_linear(a in series_strategy(50), b in series_strategy(50), m in 1u64..7, r in 0u64..7) {
            prop_assume!(r < m);
            let (a, b) = (ts(&a), ts(&b));
            prop_assert_eq!(
                a.add(&b).extract_progression(m, r).unwrap(),
                a.extract_progression(m, r).unwrap().add(&b.extract_progression(m, r).unwrap())
            );
        }

        #[test]
        fn reduction_is_a_homomorphism(
            a in series_strategy(40), b in series_strategy(40), m in 2u64..60, e in 0i64..5
        ) {
            let (a, b) = (ts(&a), ts(&b));
            let (am, bm) = (a.reduce_mod(m).unwrap(), b.reduce_mod(m).unwrap());
            prop_assert_eq!(a.mul(&b).reduce_mod(m).unwrap(), am.mul(&bm));
            prop_assert_eq!(a.add(&b).reduce_mod(m).unwrap(), am.add(&bm));
            prop_assert_eq!(a.sub(&b).reduce_mod(m).unwrap(), am.sub(&bm));
            prop_assert_eq!(a.neg().reduce_mod(m).unwrap(), am.neg());
            prop_assert_eq!(a.pow(e).unwrap().reduce_mod(m).unwrap(), am.pow(e).unwrap());
            prop_assert_eq!(a.shift(3).reduce_mod(m).unwrap(), am.shift(3));
            prop_assert_eq!(
                a.extract_progression(3, 1).unwrap().reduce_mod(m).unwrap(),
                am.extract_progression(3, 1).unwrap()
            );
        }

        #[test]
        fn modular_inverse_is_a_homomorphism(mut a in series_strategy(40), m in 2u64..60) {
            a[0] = 1;
            let a = ts(&a);
            prop_assert_eq!(
                a.invert().unwrap().reduce_mod(m).unwrap(),
                a.reduce_mod(m).unwrap().invert().unwrap()
            );
        }
    }
}
