//! Small integer helpers: divisors, factorization, primality and the Kronecker symbol.

use std::collections::BTreeMap;

use num_integer::Integer;

/// Divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorization by trial division, as `prime -> exponent`.
pub fn factorize(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_keys().collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
fn jacobi(a: i128, n: i128) -> i8 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// The Kronecker symbol `(m/n)`, defined for every pair of integers.
pub fn kronecker(m: i64, n: i64) -> i8 {
    let m = m as i128;
    let mut n = n as i128;
    if n == 0 {
        return if m == 1 || m == -1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    if n < 0 {
        n = -n;
        if m < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if m.is_even() {
            return 0;
        }
        let r = m.rem_euclid(8);
        if twos % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        n >>= twos;
    }
    result * jacobi(m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Legendre symbol by listing the nonzero squares mod p.
    fn legendre_brute(m: i64, p: i64) -> i8 {
        let r = m.rem_euclid(p);
        if r == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == r) {
            1
        } else {
            -1
        }
    }

    /// Kronecker symbol from its definition: factor n, multiply the
    /// per-prime symbols, with the dedicated rules at -1 and 2.
    fn kronecker_oracle(m: i64, n: i64) -> i8 {
        if n == 0 {
            return if m.abs() == 1 { 1 } else { 0 };
        }
        let mut result = 1i8;
        if n < 0 && m < 0 {
            result = -1;
        }
        for (p, e) in factorize(n.unsigned_abs()) {
            let base = if p == 2 {
                if m % 2 == 0 {
                    0
                } else if [1, 7].contains(&m.rem_euclid(8)) {
                    1
                } else {
                    -1
                }
            } else {
                legendre_brute(m, p as i64)
            };
            result *= base.pow(e);
        }
        result
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(50), vec![1, 2, 5, 10, 25, 50]);
        assert_eq!(divisors(98), vec![1, 2, 7, 14, 49, 98]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(prime_divisors(4802), vec![2, 7]);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(0, 7), 0);
        for n in [-9, -2, 1, 2, 7, 8, 100] {
            assert_eq!(kronecker(1, n), 1);
        }
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(3, 7), -1);
        for d in 1..=200 {
            if d % 2 != 0 && d % 5 != 0 {
                assert_eq!(kronecker(25, d), 1, "d = {d}");
            }
        }
        assert_eq!(kronecker(5, 0), 0);
        assert_eq!(kronecker(-1, 0), 1);
        assert_eq!(kronecker(-1, -1), -1);
        assert_eq!(kronecker(3, 2), -1);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(6, 4), 0);
    }

    #[test]
    fn kronecker_matches_definition_on_grid() {
        for m in -60..=60 {
            for n in -60..=60 {
                assert_eq!(kronecker(m, n), kronecker_oracle(m, n), "({m}/{n})");
            }
        }
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative_in_denominator(m in -500i64..500, a in -300i64..300, b in -300i64..300) {
            prop_assume!(a != 0 && b != 0);
            prop_assert_eq!(kronecker(m, a * b), kronecker(m, a) * kronecker(m, b));
        }

        #[test]
        fn kronecker_large_against_oracle(m in -100_000i64..100_000, n in 1i64..5000) {
            prop_assert_eq!(kronecker(m, n), kronecker_oracle(m, n));
        }
    }
}
