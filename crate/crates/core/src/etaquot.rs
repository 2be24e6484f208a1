//! Eta quotients `f(z) = prod_{delta | N} eta(delta z)^{r_delta}` and the
//! criteria used to recognise them as holomorphic modular forms on `Gamma_0(N)`:
//! the two mod-24 transformation conditions, the Nebentypus character, orders
//! at the divisor-indexed cusps, and the Sturm bound for finite verification.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorize, prime_divisors};
use crate::error::{Error, Result};
use crate::qproducts::{qpochhammer_inf, qpochhammer_inf_mod};
use crate::series::{ModSeries, TruncatedSeries};

pub use crate::arith::kronecker;

/// An eta quotient of level `N`; divisors missing from `exponents` have exponent 0.
///
/// Serialized as `{"level": N, "exponents": {"delta": r_delta, ...}}` with
/// string keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEtaQuotient", into = "RawEtaQuotient")]
pub struct EtaQuotient {
    level: u64,
    exponents: BTreeMap<u64, i64>,
}

#[derive(Serialize, Deserialize)]
struct RawEtaQuotient {
    level: u64,
    exponents: BTreeMap<String, i64>,
}

impl TryFrom<RawEtaQuotient> for EtaQuotient {
    type Error = Error;

    fn try_from(raw: RawEtaQuotient) -> Result<Self> {
        let mut exps = Vec::with_capacity(raw.exponents.len());
        for (k, r) in raw.exponents {
            let delta = k
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("divisor key {k:?} is not a positive integer")))?;
            exps.push((delta, r));
        }
        EtaQuotient::new(raw.level, exps)
    }
}

impl From<EtaQuotient> for RawEtaQuotient {
    fn from(eq: EtaQuotient) -> Self {
        RawEtaQuotient {
            level: eq.level,
            exponents: eq.exponents.iter().map(|(d, r)| (d.to_string(), *r)).collect(),
        }
    }
}

impl EtaQuotient {
    /// Repeated divisors accumulate; zero exponents are dropped.
    pub fn new<I>(level: u64, exponents: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        if level == 0 {
            return Err(Error::InvalidLevel);
        }
        let mut map = BTreeMap::new();
        for (delta, r) in exponents {
            if delta == 0 || level % delta != 0 {
                return Err(Error::NotADivisor { divisor: delta, level });
            }
            *map.entry(delta).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        Ok(Self { level, exponents: map })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("eta quotient serializes")
    }

    /// `eta^9(z) eta(25z) eta(50z) / (eta(2z) eta^2(5z))`, level 50, whose
    /// expansion is `(q^25;q^25)(q^50;q^50) ((q;q)^5/(q^5;q^5))^2 sum a(n) q^{n+3}`.
    pub fn cubic_form_mod5() -> Self {
        Self::new(50, [(1, 9), (2, -1), (5, -2), (25, 1), (50, 1)]).expect("valid")
    }

    /// `eta^13(z) eta(49z) eta(98z) / (eta(2z) eta^2(7z))`, level 98, whose
    /// expansion is `(q^49;q^49)(q^98;q^98) ((q;q)^7/(q^7;q^7))^2 sum a(n) q^{n+6}`.
    pub fn cubic_form_mod7() -> Self {
        Self::new(98, [(1, 13), (2, -1), (7, -2), (49, 1), (98, 1)]).expect("valid")
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn exponent(&self, delta: u64) -> i64 {
        self.exponents.get(&delta).copied().unwrap_or(0)
    }

    /// `(1/2) sum r_delta`.
    pub fn weight(&self) -> Ratio<i64> {
        Ratio::new(self.exponents.values().sum(), 2)
    }

    /// `sum delta r_delta` and `sum (N/delta) r_delta`, with their mod-24 verdicts.
    pub fn check_24_conditions(&self) -> TwentyFourConditions {
        let n = self.level as i64;
        let sum_delta: i64 = self.exponents.iter().map(|(&d, &r)| d as i64 * r).sum();
        let sum_codelta: i64 = self.exponents.iter().map(|(&d, &r)| n / d as i64 * r).sum();
        TwentyFourConditions {
            sum_delta,
            sum_codelta,
            cond1_ok: sum_delta.rem_euclid(24) == 0,
            cond2_ok: sum_codelta.rem_euclid(24) == 0,
        }
    }

    /// `s = prod delta^{r_delta}` as `prime -> exponent` (exponents may be negative).
    fn s_factorization(&self) -> BTreeMap<u64, i64> {
        let mut out: BTreeMap<u64, i64> = BTreeMap::new();
        for (&delta, &r) in &self.exponents {
            for (p, e) in factorize(delta) {
                *out.entry(p).or_insert(0) += r * e as i64;
            }
        }
        out.retain(|_, e| *e != 0);
        out
    }

    /// `chi(d) = ((-1)^k s / d)` with `s = prod delta^{r_delta}`.
    ///
    /// `s` is written as its signed squarefree core times a rational square;
    /// the symbol is 0 when `d` shares a prime with `s`, otherwise it is the
    /// Kronecker symbol of the core.
    pub fn character_value(&self, d: i64) -> Result<i8> {
        let k = self.weight();
        if !k.is_integer() {
            return Err(Error::NonIntegralWeight(k.to_string()));
        }
        let s = self.s_factorization();
        let abs_d = d.unsigned_abs();
        if s.keys().any(|p| abs_d % p == 0) {
            return Ok(0);
        }
        let core: i64 = s
            .iter()
            .filter(|(_, e)| e.is_odd())
            .map(|(&p, _)| p as i64)
            .product();
        let sign = if k.to_integer().is_odd() { -1 } else { 1 };
        Ok(kronecker(sign * core, d))
    }

    /// Order at the cusp `c/d` for `d | N`:
    /// `(N/24) sum_delta gcd(d,delta)^2 r_delta / (gcd(d, N/d) d delta)`.
    /// The value does not depend on the numerator `c`.
    pub fn cusp_order(&self, d: u64) -> Result<Ratio<i64>> {
        if d == 0 || self.level % d != 0 {
            return Err(Error::NotADivisor { divisor: d, level: self.level });
        }
        let n = self.level as i64;
        let d = d as i64;
        let width = d.gcd(&(n / d));
        let sum: Ratio<i64> = self
            .exponents
            .iter()
            .map(|(&delta, &r)| {
                let delta = delta as i64;
                let g = d.gcd(&delta);
                Ratio::new(g * g * r, width * d * delta)
            })
            .fold(Ratio::zero(), |acc, x| acc + x);
        Ok(sum * Ratio::new(n, 24))
    }

    pub fn cusp_report(&self) -> CuspOrderReport {
        let orders: Vec<CuspOrder> = divisors(self.level)
            .into_iter()
            .map(|d| CuspOrder {
                d,
                order: self.cusp_order(d).expect("divisor of level"),
            })
            .collect();
        let all_nonnegative = orders.iter().all(|o| !o.order.is_negative());
        CuspOrderReport { orders, all_nonnegative }
    }

    /// Whether `chi(d) = 1` for every `d` in `[1, N]` coprime to `N`.
    pub fn character_is_trivial(&self) -> bool {
        let n = self.level;
        (1..=n)
            .filter(|d| d.gcd(&n) == 1)
            .all(|d| matches!(self.character_value(d as i64), Ok(1)))
    }

    pub fn modularity_verdict(&self) -> ModularityVerdict {
        let weight = self.weight();
        let conditions = self.check_24_conditions();
        let character_is_trivial = self.character_is_trivial();
        let cusp_report = self.cusp_report();
        let weight_ok = weight.is_integer() && weight.is_positive();
        let is_modular_form =
            conditions.cond1_ok && conditions.cond2_ok && weight_ok && cusp_report.all_nonnegative;
        ModularityVerdict {
            level: self.level,
            weight,
            conditions,
            character_is_trivial,
            cusp_report,
            is_modular_form,
        }
    }

    /// Leading exponent `sum delta r_delta / 24`, which must be a nonnegative integer.
    pub fn leading_exponent(&self) -> Result<usize> {
        let sum = self.check_24_conditions().sum_delta;
        if sum.rem_euclid(24) != 0 {
            return Err(Error::NonIntegralOffset(sum));
        }
        if sum < 0 {
            return Err(Error::NegativeOffset(sum / 24));
        }
        Ok((sum / 24) as usize)
    }

    /// Exact q-expansion `q^{sum delta r/24} prod (q^delta;q^delta)^{r_delta}`.
    pub fn q_expansion(&self, precision: usize) -> Result<TruncatedSeries> {
        let offset = self.leading_exponent()?;
        let start = TruncatedSeries::monomial(offset, 1.into(), precision)?;
        self.fold_factors(
            start,
            |d| qpochhammer_inf(d, precision),
            |s, f| Ok(s.mul(f)),
            |s, f| s.mul_inverse_of(f),
        )
    }

    /// The q-expansion reduced modulo `m`, computed without exact intermediates.
    pub fn q_expansion_mod(&self, precision: usize, modulus: u64) -> Result<ModSeries> {
        let offset = self.leading_exponent()?;
        let start = ModSeries::one(modulus, precision)?.shift(offset);
        self.fold_factors(
            start,
            |d| qpochhammer_inf_mod(d, precision, modulus),
            |s, f| Ok(s.mul(f)),
            |s, f| s.mul_inverse_of(f),
        )
    }

    fn fold_factors<S>(
        &self,
        start: S,
        factor: impl Fn(usize) -> Result<S>,
        mul: impl Fn(&S, &S) -> Result<S>,
        div: impl Fn(&S, &S) -> Result<S>,
    ) -> Result<S> {
        let mut acc = start;
        for (&delta, &r) in &self.exponents {
            let f = factor(delta as usize)?;
            for _ in 0..r.unsigned_abs() {
                acc = if r > 0 { mul(&acc, &f)? } else { div(&acc, &f)? };
            }
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwentyFourConditions {
    /// `sum delta r_delta`
    pub sum_delta: i64,
    /// `sum (N/delta) r_delta`
    pub sum_codelta: i64,
    pub cond1_ok: bool,
    pub cond2_ok: bool,
}

impl TwentyFourConditions {
    pub fn both(&self) -> (bool, bool) {
        (self.cond1_ok, self.cond2_ok)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspOrder {
    pub d: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub order: Ratio<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspOrderReport {
    pub orders: Vec<CuspOrder>,
    pub all_nonnegative: bool,
}

impl CuspOrderReport {
    pub fn order_at(&self, d: u64) -> Option<Ratio<i64>> {
        self.orders.iter().find(|o| o.d == d).map(|o| o.order)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModularityVerdict {
    pub level: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub weight: Ratio<i64>,
    pub conditions: TwentyFourConditions,
    pub character_is_trivial: bool,
    pub cusp_report: CuspOrderReport,
    pub is_modular_form: bool,
}

impl ModularityVerdict {
    pub fn cond1_ok(&self) -> bool {
        self.conditions.cond1_ok
    }

    pub fn cond2_ok(&self) -> bool {
        self.conditions.cond2_ok
    }
}

fn ratio_as_string<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `(kN/12) prod_{p | N} (1 + 1/p)`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SturmBound {
    pub weight: u64,
    pub level: u64,
    #[serde(serialize_with = "ratio_u64_as_string")]
    pub exact: Ratio<u64>,
    pub floor: u64,
}

impl SturmBound {
    /// Last index of the inclusive verification range `0..=floor + 1`.
    pub fn endpoint(&self) -> u64 {
        self.floor + 1
    }
}

fn ratio_u64_as_string<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn sturm_bound(weight: u64, level: u64) -> Result<SturmBound> {
    if level == 0 {
        return Err(Error::InvalidLevel);
    }
    let exact = prime_divisors(level)
        .into_iter()
        .fold(Ratio::new(weight * level, 12), |acc, p| acc * Ratio::new(p + 1, p));
    Ok(SturmBound {
        weight,
        level,
        exact,
        floor: exact.to_integer(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qproducts::cubic_partition_series;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn eta(level: u64, e: &[(u64, i64)]) -> EtaQuotient {
        EtaQuotient::new(level, e.iter().copied()).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(EtaQuotient::cubic_form_mod5().weight(), Ratio::from_integer(4));
        assert_eq!(EtaQuotient::cubic_form_mod7().weight(), Ratio::from_integer(6));
        assert_eq!(eta(6, &[]).weight(), Ratio::from_integer(0));
        assert_eq!(eta(1, &[(1, 1)]).weight(), Ratio::new(1, 2));
    }

    #[test]
    fn construction_rejects_non_divisors() {
        assert_eq!(
            EtaQuotient::new(50, [(3, 1)]),
            Err(Error::NotADivisor { divisor: 3, level: 50 })
        );
        assert_eq!(EtaQuotient::new(0, []), Err(Error::InvalidLevel));
    }

    #[test]
    fn twenty_four_sums() {
        let g = EtaQuotient::cubic_form_mod5().check_24_conditions();
        assert_eq!((g.sum_delta, g.sum_codelta), (72, 408));
        assert_eq!(g.both(), (true, true));
        let h = EtaQuotient::cubic_form_mod7().check_24_conditions();
        assert_eq!(h.sum_delta, 144);
        assert_eq!(h.sum_codelta, 98 * 13 - 49 - 14 * 2 + 2 + 1);
        assert_eq!(h.both(), (true, true));
        let single = eta(1, &[(1, 1)]).check_24_conditions();
        assert_eq!(single.sum_delta, 1);
        assert!(!single.cond1_ok);
    }

    #[test]
    fn characters_trivial_for_both_forms() {
        for eq in [EtaQuotient::cubic_form_mod5(), EtaQuotient::cubic_form_mod7()] {
            let n = eq.level();
            for d in 1..=3 * n {
                if d.gcd(&n) == 1 {
                    assert_eq!(eq.character_value(d as i64).unwrap(), 1, "d = {d}");
                }
            }
            assert!(eq.character_is_trivial());
            assert_eq!(eq.character_value(1).unwrap(), 1);
        }
        assert!(matches!(
            eta(1, &[(1, 1)]).character_value(1),
            Err(Error::NonIntegralWeight(_))
        ));
    }

    #[test]
    fn nontrivial_character_detected() {
        // eta(z) eta(23z): k = 1, s = 23, chi = (-23/d)
        let f = eta(23, &[(1, 1), (23, 1)]);
        assert_eq!(f.character_value(2).unwrap(), kronecker(-23, 2));
        assert_eq!(f.character_value(5).unwrap(), -1);
        assert!(!f.character_is_trivial());
        assert_eq!(f.character_value(23).unwrap(), 0);
    }

    #[test]
    fn cusp_orders_of_mod5_form() {
        let g = EtaQuotient::cubic_form_mod5();
        assert_eq!(g.cusp_order(1).unwrap(), Ratio::from_integer(17));
        assert_eq!(g.cusp_order(50).unwrap(), Ratio::from_integer(3));
        // cross-checks against the two 24-condition sums
        let c = g.check_24_conditions();
        assert_eq!(g.cusp_order(1).unwrap() * 24, Ratio::from_integer(c.sum_codelta));
        assert_eq!(g.cusp_order(50).unwrap() * 24, Ratio::from_integer(c.sum_delta));
        assert!(g.cusp_report().all_nonnegative);
        assert_eq!(g.cusp_order(3), Err(Error::NotADivisor { divisor: 3, level: 50 }));
    }

    #[test]
    fn cusp_orders_of_mod7_form() {
        let h = EtaQuotient::cubic_form_mod7();
        let c = h.check_24_conditions();
        assert_eq!(h.cusp_order(98).unwrap() * 24, Ratio::from_integer(c.sum_delta));
        assert_eq!(h.cusp_order(1).unwrap() * 24, Ratio::from_integer(c.sum_codelta));
        assert!(h.cusp_report().all_nonnegative);
    }

    #[test]
    fn negative_cusp_order_fails_verdict() {
        let f = eta(4, &[(1, -12), (2, 6), (4, 12)]);
        let v = f.modularity_verdict();
        assert!(v.cond1_ok() && v.cond2_ok());
        assert_eq!(v.weight, Ratio::from_integer(3));
        assert_eq!(v.cusp_report.order_at(1), Some(Ratio::from_integer(-1)));
        assert_eq!(v.cusp_report.order_at(2), Some(Ratio::new(1, 2)));
        assert!(!v.cusp_report.all_nonnegative);
        assert!(!v.is_modular_form);
    }

    #[test]
    fn verdicts() {
        let g = EtaQuotient::cubic_form_mod5().modularity_verdict();
        assert!(g.is_modular_form && g.character_is_trivial);
        assert_eq!((g.level, g.weight), (50, Ratio::from_integer(4)));
        let h = EtaQuotient::cubic_form_mod7().modularity_verdict();
        assert!(h.is_modular_form && h.character_is_trivial);
        assert_eq!((h.level, h.weight), (98, Ratio::from_integer(6)));
        let single = eta(1, &[(1, 1)]).modularity_verdict();
        assert!(!single.is_modular_form);
        assert!(!single.cond1_ok());
    }

    #[test]
    fn sturm_values() {
        let b = sturm_bound(4, 50).unwrap();
        assert_eq!((b.floor, b.endpoint()), (30, 31));
        assert_eq!(b.exact, Ratio::from_integer(30));
        let b = sturm_bound(6, 4802).unwrap();
        assert_eq!((b.floor, b.endpoint()), (4116, 4117));
        for k in 1..40 {
            assert_eq!(sturm_bound(k, 1).unwrap().floor, k / 12);
        }
        assert!(sturm_bound(4, 50).unwrap().floor < sturm_bound(6, 4802).unwrap().floor);
        // non-integral: 2 * 11 / 12 * 12 / 11 = 2, 1 * 7/12 * 8/7 = 2/3
        assert_eq!(sturm_bound(1, 7).unwrap().exact, Ratio::new(2, 3));
    }

    #[test]
    fn expansion_leading_terms() {
        let g = EtaQuotient::cubic_form_mod5().q_expansion(40).unwrap();
        assert_eq!(g.valuation(), Some(3));
        assert_eq!(g[3].to_i64(), Some(1));
        let h = EtaQuotient::cubic_form_mod7().q_expansion(40).unwrap();
        assert_eq!(h.valuation(), Some(6));
        let e24 = eta(24, &[(24, 1)]).q_expansion(100).unwrap();
        assert_eq!(e24, qpochhammer_inf(24, 100).unwrap().shift(1));
        assert_eq!(
            eta(1, &[(1, 1)]).q_expansion(10),
            Err(Error::NonIntegralOffset(1))
        );
    }

    #[test]
    fn expansion_matches_pochhammer_product() {
        let prec = 400;
        let q = |d| qpochhammer_inf(d, prec).unwrap();
        let ratio5 = q(1).pow(5).unwrap().mul(&q(5).invert().unwrap());
        let direct = q(25)
            .mul(&q(50))
            .mul(&ratio5.pow(2).unwrap())
            .mul(&cubic_partition_series(prec).unwrap().shift(3));
        assert_eq!(EtaQuotient::cubic_form_mod5().q_expansion(prec).unwrap(), direct);

        let ratio7 = q(1).pow(7).unwrap().mul(&q(7).invert().unwrap());
        let direct = q(49)
            .mul(&q(98))
            .mul(&ratio7.pow(2).unwrap())
            .mul(&cubic_partition_series(prec).unwrap().shift(6));
        let h = EtaQuotient::cubic_form_mod7();
        assert_eq!(h.q_expansion(prec).unwrap(), direct);
        assert_eq!(h.q_expansion_mod(prec, 7).unwrap(), direct.reduce_mod(7).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let g = EtaQuotient::cubic_form_mod5();
        let text = g.to_json();
        assert_eq!(
            text,
            r#"{"level":50,"exponents":{"1":9,"2":-1,"25":1,"5":-2,"50":1}}"#
        );
        assert_eq!(EtaQuotient::from_json(&text).unwrap(), g);
        assert!(EtaQuotient::from_json(r#"{"level":50,"exponents":{"3":1}}"#).is_err());
        assert!(EtaQuotient::from_json(r#"{"level":50,"exponents":{"x":1}}"#).is_err());
    }

    proptest! {
        #[test]
        fn character_is_multiplicative(a in 1i64..5000, b in 1i64..5000) {
            for eq in [
                EtaQuotient::cubic_form_mod5(),
                eta(23, &[(1, 1), (23, 1)]),
                eta(12, &[(1, 2), (3, 1), (12, 1)]),
            ] {
                let n = eq.level() as i64;
                if a.gcd(&n) != 1 || b.gcd(&n) != 1 {
                    continue;
                }
                prop_assert_eq!(
                    eq.character_value(a * b).unwrap(),
                    eq.character_value(a).unwrap() * eq.character_value(b).unwrap()
                );
            }
        }
    }
}
