//! Congruence claims `a(An + B) = 0 (mod M)` and the machinery that verifies
//! them: progression scans, the `U(m)` and quadratic-twist operators, the
//! transfer lemma for products with `1 + O(q^m)`-shaped multipliers, the
//! identity suite, and the end-to-end pipelines for the mod 5, mod 7 and
//! powers-of-3 families.

use std::collections::BTreeMap;
use std::thread;

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::etaquot::{kronecker, sturm_bound, EtaQuotient};
use crate::qproducts::{
    constant_series, cubic_partition_series, cubic_partition_series_mod, jacobi_cube_series,
    partition_series, qpochhammer_inf, qpochhammer_inf_mod, triangular_series,
};
use crate::series::{mod_inverse, CoefficientSeries, ModSeries, TruncatedSeries};

/// `a(A n + B) = 0 (mod M)` for all `n >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CongruenceClaim {
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "B")]
    pub b: u64,
    #[serde(rename = "M")]
    pub m: u64,
}

impl CongruenceClaim {
    pub fn new(a: u64, b: u64, m: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::NotPositive("progression modulus A"));
        }
        if b >= a {
            return Err(Error::InvalidProgression { modulus: a, residue: b });
        }
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        Ok(Self { a, b, m })
    }

    /// Series index of the `n`-th term of the progression.
    pub fn index(&self, n: u64) -> usize {
        (self.a * n + self.b) as usize
    }

    /// Largest `n_max` whose whole progression `0..=n_max` fits in `precision`
    /// coefficients while leaving one full period of slack.
    pub fn max_n_within(&self, precision: usize) -> Option<u64> {
        let usable = (precision as u64).checked_sub(self.b + self.a + 1)?;
        Some(usable / self.a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub name: String,
    pub ok: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, i64>,
}

impl Step {
    pub fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            ok,
            detail: detail.into(),
            values: BTreeMap::new(),
        }
    }

    pub fn with_value(mut self, key: &str, value: i64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn value(&self, key: &str) -> Option<i64> {
        self.values.get(key).copied()
    }
}

/// Outcome of a finite verification. Field order is fixed, so the JSON form
/// is byte-identical across runs with the same inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub claim: CongruenceClaim,
    pub n_max: u64,
    /// `(n, a(An+B) mod M)` for each failing `n`.
    pub violations: Vec<(u64, u64)>,
    pub steps: Vec<Step>,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sub_reports: Vec<VerificationReport>,
    pub paper_anchor: String,
}

impl VerificationReport {
    fn new(claim: CongruenceClaim, n_max: u64) -> Self {
        Self {
            claim,
            n_max,
            violations: Vec::new(),
            steps: Vec::new(),
            verdict: false,
            sub_reports: Vec::new(),
            paper_anchor: String::new(),
        }
    }

    pub fn with_anchor(mut self, anchor: &str) -> Self {
        self.paper_anchor = anchor.to_string();
        self
    }

    fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    fn finalize(mut self) -> Self {
        self.verdict = self.violations.is_empty()
            && self.steps.iter().all(|s| s.ok)
            && self.sub_reports.iter().all(|r| r.verdict);
        self
    }

    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn require_precision(available: usize, needed: usize) -> Result<()> {
    if available < needed {
        return Err(Error::InsufficientPrecision { needed, available });
    }
    Ok(())
}

/// Checks `s[A n + B] = 0 (mod M)` for `0 <= n <= n_max`, recording every violation.
pub fn verify_progression<S: CoefficientSeries>(
    s: &S,
    claim: CongruenceClaim,
    n_max: u64,
) -> Result<VerificationReport> {
    require_precision(s.precision(), claim.index(n_max) + 1)?;
    let mut report = VerificationReport::new(claim, n_max);
    for n in 0..=n_max {
        let r = s.residue(claim.index(n), claim.m)?;
        if r != 0 {
            report.violations.push((n, r));
        }
    }
    Ok(report.finalize())
}

/// `sum u(n) q^n -> sum u(mn) q^n`.
pub fn u_operator<S: CoefficientSeries>(s: &S, m: u64) -> Result<S> {
    s.extract_progression(m, 0)
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotAnOddPrime(p));
    }
    Ok(())
}

/// Multiplies coefficient `n` by the Kronecker symbol `(n/p)`.
pub fn quadratic_twist<S: CoefficientSeries>(s: &S, p: u64) -> Result<S> {
    require_odd_prime(p)?;
    let p = p as i64;
    Ok(s.twist_by_sign(&|n| kronecker(n as i64, p)))
}

/// Level of a form on `Gamma_0(level)` after twisting by a character of conductor `p`.
pub fn twisted_level(level: u64, p: u64) -> u64 {
    level * p * p
}

/// `v = u - twist(u, p)`, cross-checked against the residue-class form
/// `2u(n)` for `(n/p) = -1`, `u(n)` for `p | n`, and 0 otherwise.
pub fn build_v<S: CoefficientSeries>(u: &S, p: u64) -> Result<S> {
    let by_subtraction = u.sub_series(&quadratic_twist(u, p)?);
    let by_classes = build_v_by_classes(u, p)?;
    if by_subtraction != by_classes {
        return Err(Error::ConstructionMismatch("v"));
    }
    Ok(by_subtraction)
}

pub fn build_v_by_classes<S: CoefficientSeries>(u: &S, p: u64) -> Result<S> {
    require_odd_prime(p)?;
    let p = p as i64;
    let non_residue_or_zero = u.twist_by_sign(&|n| (kronecker(n as i64, p) != 1) as i8);
    let non_residue = u.twist_by_sign(&|n| (kronecker(n as i64, p) == -1) as i8);
    Ok(non_residue_or_zero.add_series(&non_residue))
}

/// Result of one direction of the transfer lemma on finite data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransferOutcome {
    pub hypothesis: bool,
    pub conclusion: bool,
}

impl TransferOutcome {
    /// The implication `hypothesis -> conclusion`.
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

/// Checks that `g = 1 + sum v(mn) q^{mn}` modulo its modulus.
fn check_multiplier_support(g: &ModSeries, m: u64) -> Result<()> {
    if g.coeffs()[0] != 1 {
        return Err(Error::SupportViolation(0));
    }
    let m = m as usize;
    match g.coeffs().iter().enumerate().find(|(n, &c)| n % m != 0 && c != 0) {
        Some((n, _)) => Err(Error::SupportViolation(n)),
        None => Ok(()),
    }
}

fn progression_vanishes(s: &ModSeries, m: u64, d: u64, n_max: u64) -> bool {
    (0..=n_max).all(|n| s[(m * n + d) as usize] == 0)
}

/// With `w = f g` and `g = 1 + O(q^m)` supported on multiples of `m`:
/// does `f(mn+d) = 0` for `n <= k_max` imply `w(mn+d) = 0` for `n <= k_max`?
pub fn transfer_forward(
    f: &ModSeries,
    g: &ModSeries,
    m: u64,
    d: u64,
    k_max: u64,
) -> Result<TransferOutcome> {
    if m == 0 {
        return Err(Error::NotPositive("transfer period"));
    }
    if d >= m {
        return Err(Error::InvalidProgression { modulus: m, residue: d });
    }
    check_multiplier_support(g, m)?;
    let prec = f.precision().min(g.precision());
    require_precision(prec, (m * k_max + d) as usize + 1)?;
    let w = f.mul(g);
    Ok(TransferOutcome {
        hypothesis: progression_vanishes(f, m, d, k_max),
        conclusion: progression_vanishes(&w, m, d, k_max),
    })
}

/// The converse: if `w(mn+d) = 0` at every stored index then `f(mn+d) = 0` at every stored index.
pub fn transfer_backward(f: &ModSeries, g: &ModSeries, m: u64, d: u64) -> Result<TransferOutcome> {
    if m == 0 {
        return Err(Error::NotPositive("transfer period"));
    }
    if d >= m {
        return Err(Error::InvalidProgression { modulus: m, residue: d });
    }
    check_multiplier_support(g, m)?;
    let prec = f.precision().min(g.precision()) as u64;
    require_precision(prec as usize, d as usize + 1)?;
    let k_max = (prec - 1 - d) / m;
    let w = f.mul(g);
    Ok(TransferOutcome {
        hypothesis: progression_vanishes(&w, m, d, k_max),
        conclusion: progression_vanishes(f, m, d, k_max),
    })
}

/// Exact coefficientwise equality of the first `precision` coefficients.
pub fn verify_identity(lhs: &TruncatedSeries, rhs: &TruncatedSeries, precision: usize) -> Result<bool> {
    require_precision(lhs.precision().min(rhs.precision()), precision)?;
    Ok(lhs.coeffs()[..precision] == rhs.coeffs()[..precision])
}

/// `(q;q)^p = (q^p;q^p) (mod p)` to `precision`, from the exact power.
pub fn eta_power_check(p: u64, precision: usize) -> Result<bool> {
    require_odd_prime(p)?;
    let lhs = qpochhammer_inf(1, precision)?.pow(p as i64)?.reduce_mod(p)?;
    let rhs = qpochhammer_inf(p as usize, precision)?.reduce_mod(p)?;
    Ok(lhs == rhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub paper_anchor: String,
    pub precision: usize,
    pub holds: bool,
}

/// `(q;q)^6 / (q^5;q^5)^5 * sum p(5n+4) q^n = 5`.
pub fn ramanujan_p5_identity(precision: usize) -> Result<bool> {
    let p = partition_series(5 * precision + 5)?.extract_progression(5, 4)?;
    let lhs = qpochhammer_inf(1, precision)?
        .pow(6)?
        .mul(&qpochhammer_inf(5, precision)?.pow(5)?.invert()?)
        .mul(&p);
    verify_identity(&lhs, &constant_series(5, precision)?, precision)
}

/// `sum a(3n+2) q^n = 3 (q^3;q^3)^3 (q^6;q^6)^3 / ((q;q)^4 (q^2;q^2)^4)`.
pub fn cubic_a3n2_identity(precision: usize) -> Result<bool> {
    let lhs = cubic_partition_series(3 * precision + 3)?.extract_progression(3, 2)?;
    let q = |d| qpochhammer_inf(d, precision);
    let den = q(1)?.pow(4)?.mul(&q(2)?.pow(4)?);
    let rhs = q(3)?
        .pow(3)?
        .mul(&q(6)?.pow(3)?)
        .mul(&den.invert()?)
        .scale(&BigInt::from(3));
    verify_identity(&lhs, &rhs, precision)
}

pub fn jacobi_identity(precision: usize) -> Result<bool> {
    let rhs = qpochhammer_inf(2, precision)?.pow(3)?;
    verify_identity(&jacobi_cube_series(precision)?, &rhs, precision)
}

pub fn gauss_identity(precision: usize) -> Result<bool> {
    let rhs = qpochhammer_inf(2, precision)?
        .pow(2)?
        .mul(&qpochhammer_inf(1, precision)?.invert()?);
    verify_identity(&triangular_series(precision)?, &rhs, precision)
}

/// Every classical identity the toolkit relies on, each checked exactly to `precision`.
pub fn identity_suite(precision: usize) -> Result<Vec<IdentityCheck>> {
    let check = |name: &str, anchor: &str, holds: bool| IdentityCheck {
        name: name.to_string(),
        paper_anchor: anchor.to_string(),
        precision,
        holds,
    };
    let mut out = vec![
        check(
            "ramanujan_p5n4",
            "(q;q)^6/(q^5;q^5)^5 sum p(5n+4) q^n = 5",
            ramanujan_p5_identity(precision)?,
        ),
        check(
            "cubic_a3n2",
            "sum a(3n+2) q^n = 3 (q^3;q^3)^3 (q^6;q^6)^3 / ((q;q)^4 (q^2;q^2)^4)",
            cubic_a3n2_identity(precision)?,
        ),
        check(
            "jacobi_cube",
            "sum (-1)^n (2n+1) q^{n(n+1)} = (q^2;q^2)^3",
            jacobi_identity(precision)?,
        ),
        check(
            "gauss_triangular",
            "sum q^{n(n+1)/2} = (q^2;q^2)^2 / (q;q)",
            gauss_identity(precision)?,
        ),
    ];
    for p in [3u64, 5, 7, 11, 13] {
        out.push(check(
            &format!("eta_power_mod_{p}"),
            &format!("(q;q)^{p} / (q^{p};q^{p}) = 1 (mod {p})"),
            eta_power_check(p, precision)?,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

fn modularity_step(eq: &EtaQuotient, level: u64, weight: i64) -> Step {
    let v = eq.modularity_verdict();
    let ok = v.is_modular_form
        && v.character_is_trivial
        && v.level == level
        && v.weight == num_rational::Ratio::from_integer(weight);
    let orders: Vec<String> = v
        .cusp_report
        .orders
        .iter()
        .map(|o| format!("{}:{}", o.d, o.order))
        .collect();
    Step::new(
        "modularity",
        ok,
        format!(
            "level {}, weight {}, sum delta r = {}, sum (N/delta) r = {}, trivial character = {}, cusp orders [{}]",
            v.level,
            v.weight,
            v.conditions.sum_delta,
            v.conditions.sum_codelta,
            v.character_is_trivial,
            orders.join(", ")
        ),
    )
    .with_value("level", v.level as i64)
    .with_value("weight", v.weight.to_integer())
    .with_value("sum_delta", v.conditions.sum_delta)
    .with_value("sum_codelta", v.conditions.sum_codelta)
}

/// `g mod p` equals `H * q^shift * sum a(n) q^n` with `H = (q^P;q^P)(q^{2P};q^{2P})`,
/// and `H` has the support shape required by the transfer lemma.
fn transfer_reduction_step(
    form: &ModSeries,
    cubic: &ModSeries,
    big_p: usize,
    shift: usize,
) -> Result<(Step, ModSeries)> {
    let prec = form.precision();
    let p = form.modulus();
    let h = qpochhammer_inf_mod(big_p, prec, p)?.mul(&qpochhammer_inf_mod(2 * big_p, prec, p)?);
    let support_ok = check_multiplier_support(&h, big_p as u64).is_ok();
    let reduced = h.mul(&cubic.truncate(prec)?.shift(shift));
    let matches = &reduced == form;
    let step = Step::new(
        "transfer_reduction",
        support_ok && matches,
        format!(
            "form = (q^{big_p};q^{big_p})(q^{};q^{}) * sum a(n) q^(n+{shift}) (mod {p}) to precision {prec}: {matches}; multiplier supported on multiples of {big_p}: {support_ok}",
            2 * big_p,
            2 * big_p
        ),
    );
    Ok((step, h))
}

fn coefficients_vanish(s: &ModSeries, indices: impl IntoIterator<Item = usize>) -> (bool, Option<usize>) {
    for i in indices {
        if s[i] != 0 {
            return (false, Some(i));
        }
    }
    (true, None)
}

/// Mod 5 family: `a(25n+22) = 0 (mod 5)`.
///
/// Steps: the level-50 eta quotient is a weight-4 form; the Sturm bound on
/// level 50 gives the range `0..=31`; the `p = 5` eta-power congruence and
/// the transfer lemma reduce the form's coefficients to `a(n)`; `a(25n+22)`
/// is then checked directly over that range (one index beyond, too), and
/// over everything the working precision allows.
pub fn pipeline_mod5(precision: usize) -> Result<VerificationReport> {
    require_precision(precision, 26 * 32)?;
    let claim = CongruenceClaim::new(25, 22, 5)?;
    let g = EtaQuotient::cubic_form_mod5();
    let mut report = VerificationReport::new(claim, 0)
        .with_anchor("a(25n+22) = 0 (mod 5), via the weight-4 eta quotient on Gamma_0(50)");

    report.push(modularity_step(&g, 50, 4));

    let bound = sturm_bound(4, 50)?;
    let endpoint = bound.endpoint();
    report.push(
        Step::new(
            "sturm_bound",
            50 % 25 == 0,
            format!(
                "g|U(25) stays on Gamma_0(50); bound 4*50/12*(3/2)*(6/5) = {}, check 0 <= n <= {endpoint}",
                bound.exact
            ),
        )
        .with_value("bound", bound.floor as i64)
        .with_value("endpoint", endpoint as i64),
    );

    // one index past the endpoint, plus a full period of slack
    let sturm_n = endpoint + 1;
    let work = precision.max(claim.index(sturm_n + 2) + 1);

    let lemma = eta_power_check(5, work)?;
    report.push(Step::new(
        "eta_power_reduction",
        lemma,
        format!("(q;q)^5 = (q^5;q^5) (mod 5) to precision {work}: {lemma}"),
    ));

    let cubic = cubic_partition_series_mod(work, 5)?;
    let form = g.q_expansion_mod(work, 5)?;
    let (step, h) = transfer_reduction_step(&form, &cubic, 25, 3)?;
    report.push(step);

    let shifted = cubic.shift(3);
    let transfer = transfer_forward(&shifted, &h, 25, 0, sturm_n)?;
    let sturm_check = verify_progression(&cubic, claim, sturm_n)?;
    report.push(
        Step::new(
            "reduced_congruence",
            sturm_check.violations.is_empty() && transfer.hypothesis && transfer.conclusion,
            format!(
                "a(25n+22) = 0 (mod 5) for 0 <= n <= {sturm_n}: {} violations; forward transfer gives b(25n) = 0 (mod 5) for 0 <= n <= {sturm_n}: {}",
                sturm_check.violations.len(),
                transfer.conclusion
            ),
        )
        .with_value("checked_through", sturm_n as i64),
    );

    let (b_ok, first_bad) = coefficients_vanish(&form, (0..=sturm_n as usize).map(|n| 25 * n));
    report.push(Step::new(
        "b_side_cross_check",
        b_ok,
        match first_bad {
            None => format!("b(25n) = 0 (mod 5) for 0 <= n <= {sturm_n} from the eta-quotient expansion"),
            Some(i) => format!("b({i}) != 0 (mod 5)"),
        },
    ));

    let n_max = claim.max_n_within(work).expect("work precision covers the claim");
    let extended = verify_progression(&cubic, claim, n_max)?;
    report.push(
        Step::new(
            "extended_range",
            extended.violations.is_empty(),
            format!("a(25n+22) mod 5 scanned for 0 <= n <= {n_max}"),
        )
        .with_value("n_max", n_max as i64),
    );
    report.n_max = n_max;
    report.violations = extended.violations;

    let all_ok = report.steps.iter().all(|s| s.ok);
    report.push(Step::new(
        "conclusion",
        all_ok,
        if all_ok {
            "a(25n+22) = 0 (mod 5) for all n >= 0"
        } else {
            "chain broken; see failed steps"
        },
    ));
    Ok(report.finalize())
}

/// Mod 7 family: `a(49n+B) = 0 (mod 7)` for `B` in {15, 29, 36, 43}.
///
/// The level-98 eta quotient is pushed through `U(7)`, then combined with its
/// quadratic twist by `(n/7)` into a single form on `Gamma_0(4802)`; the
/// Sturm range `0..=4117` there shrinks to `0..=587` on the original
/// progressions.
pub fn pipeline_mod7(precision: usize) -> Result<VerificationReport> {
    require_precision(precision, 49 * 600)?;
    const RESIDUES: [u64; 4] = [15, 29, 36, 43];
    let claims: Vec<CongruenceClaim> = RESIDUES
        .iter()
        .map(|&b| CongruenceClaim::new(49, b, 7))
        .collect::<Result<_>>()?;
    let h = EtaQuotient::cubic_form_mod7();
    let mut report = VerificationReport::new(claims[0], 0).with_anchor(
        "a(49n+15) = a(49n+29) = a(49n+36) = a(49n+43) = 0 (mod 7), via the weight-6 eta quotient on Gamma_0(98)",
    );

    report.push(modularity_step(&h, 98, 6));

    let bound = sturm_bound(6, twisted_level(98, 7))?;
    let endpoint = bound.endpoint();
    let reduced_endpoint = (endpoint - 1).div_ceil(7) - 1;
    let sturm_n = reduced_endpoint + 1;
    let work = precision
        .max(7 * (endpoint as usize + 1))
        .max(claims[3].index(sturm_n + 2) + 1);

    let form = h.q_expansion_mod(work, 7)?;
    let u = u_operator(&form, 7)?;
    report.push(
        Step::new(
            "u_operator",
            98 % 7 == 0,
            format!("u = h|U(7) on Gamma_0(98), precision {}", u.precision()),
        )
        .with_value("level", 98),
    );

    let v = build_v(&u, 7)?;
    let level = twisted_level(98, 7);
    let (v_ok, first_bad) = coefficients_vanish(&v, 0..=endpoint as usize);
    report.push(
        Step::new(
            "twist",
            v_ok && level == 4802,
            match first_bad {
                None => format!(
                    "v = u - twist(u, 7) on Gamma_0({level}); Sturm bound {} so e(n) = 0 (mod 7) checked for 0 <= n <= {endpoint}",
                    bound.exact
                ),
                Some(i) => format!("e({i}) != 0 (mod 7)"),
            },
        )
        .with_value("level", level as i64)
        .with_value("bound", bound.floor as i64)
        .with_value("endpoint", endpoint as i64),
    );

    report.push(
        Step::new(
            "range_reduction",
            true,
            format!("ceil(({endpoint} - 1)/7) - 1 = {reduced_endpoint}"),
        )
        .with_value("reduced_endpoint", reduced_endpoint as i64),
    );

    let lemma = eta_power_check(7, work)?;
    report.push(Step::new(
        "eta_power_reduction",
        lemma,
        format!("(q;q)^7 = (q^7;q^7) (mod 7) to precision {work}: {lemma}"),
    ));

    let cubic = cubic_partition_series_mod(work, 7)?;
    let (step, mult) = transfer_reduction_step(&form, &cubic, 49, 6)?;
    report.push(step);

    let shifted = cubic.shift(6);
    let c_indices = [21usize, 35, 42, 49];
    let (c_ok, first_bad) = coefficients_vanish(
        &form,
        (0..=sturm_n as usize).flat_map(|n| c_indices.iter().map(move |&r| 49 * n + r)),
    );
    report.push(Step::new(
        "c_side_cross_check",
        c_ok,
        match first_bad {
            None => format!(
                "c(49n+r) = 0 (mod 7) for r in {{21,35,42,49}}, 0 <= n <= {sturm_n}, from the eta-quotient expansion"
            ),
            Some(i) => format!("c({i}) != 0 (mod 7)"),
        },
    ));

    let cubic_ref = &cubic;
    let sturm_reports: Vec<VerificationReport> = thread::scope(|scope| {
        let handles: Vec<_> = claims
            .iter()
            .map(|&c| scope.spawn(move || verify_progression(cubic_ref, c, sturm_n)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Vec<_>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut transfer_ok = true;
    for &r in &c_indices {
        let t = transfer_forward(&shifted, &mult, 49, (r % 49) as u64, sturm_n)?;
        transfer_ok &= t.hypothesis && t.conclusion;
    }
    let violations: usize = sturm_reports.iter().map(|r| r.violations.len()).sum();
    report.push(
        Step::new(
            "reduced_congruence",
            violations == 0 && transfer_ok,
            format!(
                "a(49n+B) = 0 (mod 7) for B in {{15,29,36,43}}, 0 <= n <= {sturm_n}: {violations} violations; forward transfer to c(n): {transfer_ok}"
            ),
        )
        .with_value("checked_through", sturm_n as i64),
    );

    let n_max = claims[3].max_n_within(work).expect("work precision covers the claims");
    let extended: Vec<VerificationReport> = thread::scope(|scope| {
        let handles: Vec<_> = claims
            .iter()
            .map(|&c| scope.spawn(move || verify_progression(cubic_ref, c, n_max)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Vec<_>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let ext_ok = extended.iter().all(|r| r.verdict);
    report.push(
        Step::new(
            "extended_range",
            ext_ok,
            format!("a(49n+B) mod 7 scanned for 0 <= n <= {n_max}, B in {{15,29,36,43}}"),
        )
        .with_value("n_max", n_max as i64),
    );
    report.n_max = n_max;
    report.violations = extended[0].violations.clone();
    report.sub_reports = extended;

    let all_ok = report.steps.iter().all(|s| s.ok);
    report.push(Step::new(
        "conclusion",
        all_ok,
        if all_ok {
            "a(49n+B) = 0 (mod 7) for all n >= 0 and B in {15, 29, 36, 43}"
        } else {
            "chain broken; see failed steps"
        },
    ));
    Ok(report.finalize())
}

/// `c_k = 8^{-1} mod 3^k`.
pub fn mod3_residue(k: u32) -> u64 {
    mod_inverse(8, 3u64.pow(k)).expect("8 is a unit mod 3^k")
}

/// Extra power of 3: one for even `k`, none for odd.
pub fn mod3_extra_power(k: u32) -> u32 {
    (k % 2 == 0) as u32
}

pub const MOD3_MAX_K: u32 = 6;

/// Numeric check of `a(3^k n + c_k) = 0 (mod 3^{k + extra(k)})` for `0 <= n <= n_max`.
pub fn mod3_family_check(k: u32, n_max: u64) -> Result<VerificationReport> {
    if k == 0 {
        return Err(Error::NotPositive("k"));
    }
    if k > MOD3_MAX_K {
        return Err(Error::LimitExceeded {
            name: "k",
            value: k as u64,
            limit: MOD3_MAX_K as u64,
        });
    }
    let period = 3u64.pow(k);
    let c = mod3_residue(k);
    let modulus = 3u64.pow(k + mod3_extra_power(k));
    let claim = CongruenceClaim::new(period, c, modulus)?;
    let mut report = VerificationReport::new(claim, n_max)
        .with_anchor("a(3^k n + c_k) = 0 (mod 3^(k + [k even])), c_k = 1/8 mod 3^k");
    report.push(
        Step::new(
            "residue",
            (8 * c) % period == 1,
            format!("c_{k} = {c}, 8 * {c} = {} = 1 (mod {period})", 8 * c),
        )
        .with_value("c", c as i64)
        .with_value("modulus", modulus as i64),
    );
    let work = claim.index(n_max + 1) + 1;
    let cubic = cubic_partition_series_mod(work, modulus)?;
    let scan = verify_progression(&cubic, claim, n_max)?;
    report.push(Step::new(
        "scan",
        scan.violations.is_empty(),
        format!("{} violations for 0 <= n <= {n_max}", scan.violations.len()),
    ));
    report.violations = scan.violations;
    Ok(report.finalize())
}
