//! The concrete q-series used throughout: Euler products, eta expansions,
//! the partition and cubic-partition generating functions, and the two
//! classical theta-type series built from their exponent formulas.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::series::{ModSeries, TruncatedSeries};

/// Sparse expansion of `prod_{n>=1} (1 - q^{dn})` as `(exponent, ±1)` pairs below `precision`.
///
/// Uses the pentagonal number theorem: exponents `d * j(3j-1)/2` for
/// `j = 0, 1, -1, 2, -2, ...` with sign `(-1)^j`.
pub fn pentagonal_terms(d: usize, precision: usize) -> Vec<(usize, i64)> {
    assert!(d >= 1, "pentagonal_terms needs d >= 1");
    let mut terms = vec![(0usize, 1i64)];
    let mut j: usize = 1;
    loop {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let lower = d * (j * (3 * j - 1) / 2);
        let upper = d * (j * (3 * j + 1) / 2);
        if lower >= precision {
            break;
        }
        terms.push((lower, sign));
        if upper < precision {
            terms.push((upper, sign));
        }
        j += 1;
    }
    terms
}

/// `(q^d; q^d)_inf` truncated to `precision` coefficients.
pub fn qpochhammer_inf(d: usize, precision: usize) -> Result<TruncatedSeries> {
    if d == 0 {
        return Err(Error::NotPositive("q-Pochhammer step"));
    }
    TruncatedSeries::from_terms(precision, pentagonal_terms(d, precision))
}

pub fn qpochhammer_inf_mod(d: usize, precision: usize, modulus: u64) -> Result<ModSeries> {
    if d == 0 {
        return Err(Error::NotPositive("q-Pochhammer step"));
    }
    let mut values = vec![0i64; precision];
    for (n, c) in pentagonal_terms(d, precision) {
        values[n] += c;
    }
    ModSeries::from_i64(modulus, &values)
}

/// Generating function of the ordinary partition numbers `p(n)`.
pub fn partition_series(precision: usize) -> Result<TruncatedSeries> {
    qpochhammer_inf(1, precision)?.invert()
}

/// Generating function of the cubic partition numbers `a(n)`,
/// `1 / ((q;q)_inf (q^2;q^2)_inf)`.
///
/// Evaluated as two successive sparse divisions, which equals inverting the
/// product of the two Euler factors.
pub fn cubic_partition_series(precision: usize) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::one(precision)?;
    one.mul_inverse_of(&qpochhammer_inf(1, precision)?)?
        .mul_inverse_of(&qpochhammer_inf(2, precision)?)
}

/// `a(n) mod m` for `n < precision`.
pub fn cubic_partition_series_mod(precision: usize, modulus: u64) -> Result<ModSeries> {
    let one = ModSeries::one(modulus, precision)?;
    one.mul_inverse_of(&qpochhammer_inf_mod(1, precision, modulus)?)?
        .mul_inverse_of(&qpochhammer_inf_mod(2, precision, modulus)?)
}

/// `eta(delta z) = q^{delta/24} (q^delta; q^delta)_inf`, with the fractional
/// exponent kept as a count of 1/24 units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaExpansion {
    pub delta: u64,
    pub offset24: i64,
    pub series: TruncatedSeries,
}

pub fn eta_expansion(delta: u64, precision: usize) -> Result<EtaExpansion> {
    if delta == 0 {
        return Err(Error::NotPositive("eta argument scale"));
    }
    Ok(EtaExpansion {
        delta,
        offset24: delta as i64,
        series: qpochhammer_inf(delta as usize, precision)?,
    })
}

/// `sum_{n>=0} (-1)^n (2n+1) q^{n(n+1)}`, generated from the exponent formula.
pub fn jacobi_cube_series(precision: usize) -> Result<TruncatedSeries> {
    let terms = (0usize..)
        .map(|n| (n * (n + 1), if n % 2 == 0 { 1 } else { -1 } * (2 * n as i64 + 1)))
        .take_while(|&(e, _)| e < precision);
    TruncatedSeries::from_terms(precision, terms)
}

/// `sum_{n>=0} q^{n(n+1)/2}`, generated from the exponent formula.
pub fn triangular_series(precision: usize) -> Result<TruncatedSeries> {
    let terms = (0usize..)
        .map(|n| (n * (n + 1) / 2, 1))
        .take_while(|&(e, _)| e < precision);
    TruncatedSeries::from_terms(precision, terms)
}

/// `c * q^k` convenience for building identity right-hand sides.
pub fn constant_series(c: i64, precision: usize) -> Result<TruncatedSeries> {
    TruncatedSeries::monomial(0, BigInt::from(c), precision)
}
