//! Parity of `a(n)` and `p(n)` from sparse recurrences mod 2.
//!
//! Multiplying the cubic generating function by `(q^2;q^2)^3` and reducing
//! mod 2 gives
//!
//! ```text
//! a(n) + sum_{k >= 1, k + k^2 <= n} a(n - k - k^2) = Delta(n)  (mod 2)
//! ```
//!
//! where `Delta(n)` indicates triangular numbers. The recurrence only ever
//! touches earlier bits, so it is evaluated directly rather than through
//! series division.

use std::io;

use bitvec::prelude::*;
use num_integer::Roots;
use num_rational::Ratio;
use serde::Serialize;

/// Packed parity bits, index `n` holding the parity of the `n`-th term.
pub type ParityBits = BitVec<u64, Lsb0>;

/// 1 when `n = s(s+1)/2` for some `s >= 0`, i.e. when `8n + 1` is a square.
pub fn delta_triangular(n: u64) -> u8 {
    let t = 8 * n + 1;
    let r = t.sqrt();
    (r * r == t) as u8
}

/// `a(n) mod 2` for `0 <= n <= n_max` from the triangular recurrence.
pub fn parity_recurrence(n_max: u64) -> ParityBits {
    let len = n_max as usize + 1;
    let mut bits = ParityBits::with_capacity(len);
    for n in 0..len {
        let mut acc = delta_triangular(n as u64) != 0;
        let mut k = 1usize;
        while k * k + k <= n {
            acc ^= bits[n - k - k * k];
            k += 1;
        }
        bits.push(acc);
    }
    bits
}

/// `p(n) mod 2` for `0 <= n <= n_max` from Euler's pentagonal recurrence.
/// Signs vanish mod 2, so `p(n)` is the XOR of `p(n - j(3j-1)/2)` over `j != 0`.
pub fn euler_parity_p(n_max: u64) -> ParityBits {
    let len = n_max as usize + 1;
    let mut bits = ParityBits::with_capacity(len);
    bits.push(true);
    for n in 1..len {
        let mut acc = false;
        let mut j = 1usize;
        loop {
            let lower = j * (3 * j - 1) / 2;
            if lower > n {
                break;
            }
            acc ^= bits[n - lower];
            let upper = j * (3 * j + 1) / 2;
            if upper <= n {
                acc ^= bits[n - upper];
            }
            j += 1;
        }
        bits.push(acc);
    }
    bits
}

/// Writes `n,bit` lines in ascending `n`.
pub fn write_bits_csv<W: io::Write>(mut w: W, bits: &BitSlice<u64, Lsb0>) -> io::Result<()> {
    for (n, b) in bits.iter().enumerate() {
        writeln!(w, "{n},{}", *b as u8)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityWitness {
    pub threshold: u64,
    pub first_even: Option<u64>,
    pub first_odd: Option<u64>,
}

/// Even/odd counts of `a(0..=n_max)` with the first witnesses at or beyond each threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityCensus {
    pub n_max: u64,
    pub even_count: u64,
    pub odd_count: u64,
    pub witnesses: Vec<ParityWitness>,
    #[serde(serialize_with = "fraction")]
    pub odd_fraction: Ratio<u64>,
    /// Decimal rendering of `odd_fraction`; reported only.
    pub odd_fraction_approx: f64,
}

fn fraction<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl ParityCensus {
    pub fn witness(&self, threshold: u64) -> Option<&ParityWitness> {
        self.witnesses.iter().find(|w| w.threshold == threshold)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("census serializes")
    }
}

pub fn census_from_bits(bits: &BitSlice<u64, Lsb0>, thresholds: &[u64]) -> ParityCensus {
    let n_max = bits.len() as u64 - 1;
    let odd_count = bits.count_ones() as u64;
    let even_count = bits.len() as u64 - odd_count;
    let witnesses = thresholds
        .iter()
        .map(|&m| {
            let tail = bits.get(m as usize..).unwrap_or_default();
            ParityWitness {
                threshold: m,
                first_even: tail.first_zero().map(|i| m + i as u64),
                first_odd: tail.first_one().map(|i| m + i as u64),
            }
        })
        .collect();
    let odd_fraction = Ratio::new(odd_count, n_max + 1);
    ParityCensus {
        n_max,
        even_count,
        odd_count,
        witnesses,
        odd_fraction,
        odd_fraction_approx: odd_count as f64 / (n_max + 1) as f64,
    }
}

/// Census of `a(n) mod 2` for `0 <= n <= n_max`.
pub fn parity_census(n_max: u64, thresholds: &[u64]) -> ParityCensus {
    census_from_bits(&parity_recurrence(n_max), thresholds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qproducts::{cubic_partition_series, partition_series};

    #[test]
    fn triangular_indicator() {
        for n in [0, 1, 3, 6, 10, 4950] {
            assert_eq!(delta_triangular(n), 1, "n = {n}");
        }
        for n in [2, 4, 5, 7, 4949, 4951] {
            assert_eq!(delta_triangular(n), 0, "n = {n}");
        }
        assert_eq!(delta_triangular(99 * 100 / 2), 1);
    }

    #[test]
    fn recurrence_head() {
        let bits = parity_recurrence(8);
        let v: Vec<u8> = bits.iter().map(|b| *b as u8).collect();
        assert_eq!(v, vec![1, 1, 1, 0, 1, 0, 1, 1, 0]);
        assert_eq!(parity_recurrence(0).len(), 1);
    }

    #[test]
    fn recurrence_matches_series_parity() {
        let n = 3000;
        let direct = cubic_partition_series(n + 1).unwrap().reduce_mod(2).unwrap();
        let bits = parity_recurrence(n as u64);
        for i in 0..=n {
            assert_eq!(bits[i] as u64, direct[i], "n = {i}");
        }
    }

    #[test]
    fn recurrence_restated_with_k_zero() {
        let bits = parity_recurrence(2000);
        for n in 0..=2000usize {
            let mut s = 0u8;
            let mut k = 0usize;
            while k * k + k <= n {
                s ^= bits[n - k - k * k] as u8;
                k += 1;
            }
            assert_eq!(s, delta_triangular(n as u64));
        }
    }

    #[test]
    fn euler_parity() {
        let bits = euler_parity_p(2000);
        assert!(bits[0]);
        assert!(bits[5]); // p(5) = 7
        let p = partition_series(2001).unwrap().reduce_mod(2).unwrap();
        for i in 0..=2000 {
            assert_eq!(bits[i] as u64, p[i]);
        }
    }

    #[test]
    fn small_census() {
        let c = parity_census(8, &[0]);
        assert_eq!((c.even_count, c.odd_count), (3, 6));
        let w = c.witness(0).unwrap();
        assert_eq!((w.first_even, w.first_odd), (Some(3), Some(0)));
        assert_eq!(c.odd_fraction, Ratio::new(6, 9));
        let c = parity_census(8, &[9, 100]);
        assert_eq!(c.witness(100).unwrap().first_even, None);
    }

    #[test]
    fn both_parities_present_from_three() {
        for n_max in 3..200 {
            let c = parity_census(n_max, &[]);
            assert!(c.even_count > 0 && c.odd_count > 0, "n_max = {n_max}");
            assert_eq!(c.even_count + c.odd_count, n_max + 1);
        }
    }

    #[test]
    fn csv_export() {
        let mut out = Vec::new();
        write_bits_csv(&mut out, &parity_recurrence(3)).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0,1\n1,1\n2,1\n3,0\n");
    }
}
