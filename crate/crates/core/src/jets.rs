//! Brute-force jet counting over prime fields.
//!
//! This is the ground truth the resolution-side formulas are checked
//! against: enumerate every pair of truncated power series
//! `(x(t), y(t)) mod t^{n+1}` over `F_q`, and count those along which the
//! curve equation has `t`-adic order exactly `n`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::resolution::ResolutionGraph;
use crate::zeta::denef_coefficient;
use crate::MotivicClass;

/// Default cap on `q^{ambient_log}`; overridden by `MOTIVIC_CAP` in the CLI.
pub const DEFAULT_CAP: u64 = 100_000_000;
pub const MAX_FIELD: u64 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("field size {0} exceeds the supported maximum {MAX_FIELD}")]
    FieldTooLarge(u64),
    #[error("enumeration of {q}^{exponent} jets exceeds the cap {cap}")]
    CapExceeded { q: u64, exponent: u64, cap: u64 },
    #[error("curve equation has a non-zero constant term")]
    NonzeroConstant,
    #[error("stratum k = {k} outside 1..={n}")]
    BadStratum { k: u64, n: u64 },
    #[error("no single level shift fits: {0}")]
    Inconsistent(String),
    #[error("every sampled count is zero; no level shift can be read off")]
    Underdetermined,
}

impl JetError {
    pub fn name(&self) -> &'static str {
        match self {
            JetError::NonPrime(_) => "NonPrime",
            JetError::FieldTooLarge(_) => "FieldTooLarge",
            JetError::CapExceeded { .. } => "CapExceeded",
            JetError::NonzeroConstant => "NonzeroConstant",
            JetError::BadStratum { .. } => "BadStratum",
            JetError::Inconsistent(_) => "Inconsistent",
            JetError::Underdetermined => "Underdetermined",
        }
    }
}

/// A plane curve equation `Σ c x^i y^j` with integer coefficients and no constant term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvePoly {
    terms: Vec<(u32, u32, i64)>,
}

impl CurvePoly {
    pub fn new(terms: Vec<(u32, u32, i64)>) -> Result<Self, JetError> {
        let terms: Vec<_> = terms.into_iter().filter(|t| t.2 != 0).collect();
        if terms.iter().any(|&(i, j, _)| i == 0 && j == 0) {
            return Err(JetError::NonzeroConstant);
        }
        Ok(CurvePoly { terms })
    }

    /// `x^p - y^q`.
    pub fn pq(p: u32, q: u32) -> Self {
        CurvePoly {
            terms: vec![(p, 0, 1), (0, q, -1)],
        }
    }

    pub fn terms(&self) -> &[(u32, u32, i64)] {
        &self.terms
    }
}

impl fmt::Display for CurvePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, &(i, j, c)) in self.terms.iter().enumerate() {
            if idx > 0 || c < 0 {
                f.write_str(if c < 0 { "-" } else { "+" })?;
            }
            write!(f, "{}x^{}y^{}", c.abs(), i, j)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JetCountReport {
    pub q: u64,
    pub n: u64,
    pub origin_only: bool,
    pub k_stratum: Option<u64>,
    pub raw_count: u64,
    /// `log_q` of the size of the space of jets the count lives in.
    pub ambient_log: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub ratio: BigRational,
}

fn ratio_as_string<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

fn check_field(q: u64) -> Result<(), JetError> {
    if !is_prime(q) {
        return Err(JetError::NonPrime(q));
    }
    if q > MAX_FIELD {
        return Err(JetError::FieldTooLarge(q));
    }
    Ok(())
}

fn check_cap(q: u64, exponent: u64, cap: u64) -> Result<u64, JetError> {
    let size = q
        .checked_pow(exponent as u32)
        .filter(|&s| s <= cap)
        .ok_or(JetError::CapExceeded { q, exponent, cap })?;
    Ok(size)
}

/// Truncated series arithmetic mod `(q, t^len)`.
struct Ring {
    q: u64,
    len: usize,
}

impl Ring {
    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.len];
        for (i, &x) in a.iter().enumerate().filter(|(_, x)| **x != 0) {
            for (j, &y) in b.iter().enumerate().take(self.len - i) {
                out[i + j] = (out[i + j] + x * y) % self.q;
            }
        }
        out
    }

    fn powers(&self, base: &[u64], max_exp: u32) -> Vec<Vec<u64>> {
        let mut out = Vec::with_capacity(max_exp as usize + 1);
        let mut one = vec![0; self.len];
        one[0] = 1 % self.q;
        out.push(one);
        for e in 1..=max_exp as usize {
            let next = self.mul(&out[e - 1], base);
            out.push(next);
        }
        out
    }
}

/// Jets with coefficients below `low` forced to zero, indexed in odometer order.
fn jet_from_index(mut index: u64, q: u64, low: usize, len: usize) -> Vec<u64> {
    let mut jet = vec![0; len];
    for slot in jet.iter_mut().skip(low) {
        *slot = index % q;
        index /= q;
    }
    jet
}

fn valuation(series: &[u64]) -> usize {
    series.iter().position(|&c| c != 0).unwrap_or(series.len())
}

/// Counts jet pairs with `x, y` vanishing below `low` and contact order `n`,
/// passing each counted pair to `keep` for further filtering.
fn count_pairs(
    f: &CurvePoly,
    q: u64,
    n: u64,
    low: usize,
    keep: impl Fn(&[u64], &[u64]) -> bool + Sync,
    parts: u64,
) -> u64 {
    let len = n as usize + 1;
    let ring = Ring { q, len };
    let free = (len - low) as u32;
    let per_axis = q.pow(free);
    let reduce = |c: i64| c.rem_euclid(q as i64) as u64;
    let mixed: Vec<(usize, usize, u64)> = f
        .terms
        .iter()
        .filter(|t| t.0 > 0 && t.1 > 0)
        .map(|&(i, j, c)| (i as usize, j as usize, reduce(c)))
        .filter(|t| t.2 != 0)
        .collect();
    let max_i = f.terms.iter().map(|t| t.0).max().unwrap_or(0);
    let max_j = f.terms.iter().map(|t| t.1).max().unwrap_or(0);
    // Per axis: the jet, its powers, and the sum of the pure terms in it.
    let axis = |index: u64, max_exp: u32, pure: &dyn Fn(&(u32, u32, i64)) -> Option<u32>| {
        let jet = jet_from_index(index, q, low, len);
        let powers = ring.powers(&jet, max_exp);
        let mut sum = vec![0u64; len];
        for t in &f.terms {
            if let Some(e) = pure(t) {
                let c = reduce(t.2);
                for (s, v) in sum.iter_mut().zip(&powers[e as usize]) {
                    *s = (*s + c * v) % q;
                }
            }
        }
        (jet, powers, sum)
    };
    let pure_y = |t: &(u32, u32, i64)| (t.0 == 0).then_some(t.1);
    let pure_x = |t: &(u32, u32, i64)| (t.1 == 0).then_some(t.0);
    let y_side: Vec<_> = (0..per_axis).map(|iy| axis(iy, max_j, &pure_y)).collect();
    let n = n as usize;
    let parts = parts.clamp(1, per_axis);
    let chunk = per_axis.div_ceil(parts);
    // Each worker owns a contiguous block of x-jets; block totals are summed once.
    (0..parts)
        .into_par_iter()
        .map(|part| {
            let mut local = 0u64;
            let mut value = vec![0u64; len];
            for ix in part * chunk..((part + 1) * chunk).min(per_axis) {
            let (x, xp, xsum) = axis(ix, max_i, &pure_x);
            for (y, yp, ysum) in &y_side {
                for (v, (a, b)) in value.iter_mut().zip(xsum.iter().zip(ysum)) {
                    *v = (a + b) % q;
                }
                for &(i, j, c) in &mixed {
                    for (v, t) in value.iter_mut().zip(ring.mul(&xp[i], &yp[j])) {
                        *v = (*v + c * t) % q;
                    }
                }
                if valuation(&value) == n && keep(&x, y) {
                    local += 1;
                }
            }
            }
            local
        })
        .sum()
}

fn default_parts() -> u64 {
    4 * rayon::current_num_threads() as u64
}

/// [`count_jets`] with the x-axis enumeration split into `parts` blocks.
pub fn count_jets_partitioned(
    f: &CurvePoly,
    q: u64,
    n: u64,
    origin_only: bool,
    cap: u64,
    parts: u64,
) -> Result<u64, JetError> {
    check_field(q)?;
    let ambient_log = if origin_only { 2 * n } else { 2 * (n + 1) };
    check_cap(q, ambient_log, cap)?;
    Ok(count_pairs(f, q, n, usize::from(origin_only), |_, _| true, parts))
}

fn ratio(count: u64, q: u64, exponent: u64) -> BigRational {
    BigRational::new(
        BigInt::from(count),
        num_traits::pow(BigInt::from(q), exponent as usize),
    )
}

/// Counts `(n+1)`-jets with contact order exactly `n`.
pub fn count_jets(
    f: &CurvePoly,
    q: u64,
    n: u64,
    origin_only: bool,
    cap: u64,
) -> Result<JetCountReport, JetError> {
    check_field(q)?;
    let ambient_log = if origin_only { 2 * n } else { 2 * (n + 1) };
    check_cap(q, ambient_log, cap)?;
    let low = usize::from(origin_only);
    let raw_count = count_pairs(f, q, n, low, |_, _| true, default_parts());
    Ok(JetCountReport {
        q,
        n,
        origin_only,
        k_stratum: None,
        raw_count,
        ambient_log,
        ratio: ratio(raw_count, q, ambient_log),
    })
}

/// Counts jets of contact order `n` whose coordinates vanish to order exactly `k`.
pub fn count_jets_stratified(
    f: &CurvePoly,
    q: u64,
    n: u64,
    k: u64,
    cap: u64,
) -> Result<JetCountReport, JetError> {
    check_field(q)?;
    if k == 0 || k > n {
        return Err(JetError::BadStratum { k, n });
    }
    let ambient_log = 2 * n;
    check_cap(q, 2 * (n + 1 - k), cap)?;
    let k = k as usize;
    let raw_count = count_pairs(f, q, n, k, |x, y| x[k] != 0 || y[k] != 0, default_parts());
    Ok(JetCountReport {
        q,
        n,
        origin_only: true,
        k_stratum: Some(k as u64),
        raw_count,
        ambient_log,
        ratio: ratio(raw_count, q, ambient_log),
    })
}

/// One sampled point of a calibration run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CalibrationSample {
    pub q: u64,
    pub n: u64,
    pub raw_count: u64,
    /// The resolution-side class evaluated at `L = q`.
    #[serde(serialize_with = "ratio_as_string")]
    pub predicted: BigRational,
    /// Shift read off this sample, when it determines one.
    pub kappa: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Calibration {
    pub kappa: i64,
    pub origin_only: bool,
    pub samples: Vec<CalibrationSample>,
}

/// Exponent `e` with `value = q^e`, if there is one.
fn exact_log(value: &BigRational, q: u64) -> Option<i64> {
    if value.is_zero() || value < &BigRational::zero() {
        return None;
    }
    let q = BigInt::from(q);
    let (mut num, mut den) = (value.numer().clone(), value.denom().clone());
    let mut e = 0i64;
    while (&num % &q).is_zero() {
        num /= &q;
        e += 1;
    }
    while (&den % &q).is_zero() {
        den /= &q;
        e -= 1;
    }
    (num.is_one() && den.is_one()).then_some(e)
}

/// Finds the level shift `κ` with
/// `raw_count = evaluate(coefficient(n), q) · q^{κ - 2(n+1) + ambient_log}`
/// on every sampled `(q, n)`, using the resolution-side coefficients of `graph`.
pub fn calibrate(
    graph: &ResolutionGraph,
    f: &CurvePoly,
    q_list: &[u64],
    n_list: &[u64],
    origin_only: bool,
    cap: u64,
) -> Result<Calibration, JetError> {
    calibrate_with(
        |n| denef_coefficient(graph, n, origin_only),
        f,
        q_list,
        n_list,
        origin_only,
        cap,
    )
}

/// [`calibrate`] against an arbitrary coefficient formula.
pub fn calibrate_with(
    coefficient: impl Fn(u64) -> MotivicClass,
    f: &CurvePoly,
    q_list: &[u64],
    n_list: &[u64],
    origin_only: bool,
    cap: u64,
) -> Result<Calibration, JetError> {
    let mut samples = Vec::new();
    for &n in n_list {
        let class = coefficient(n);
        for &q in q_list {
            let report = count_jets(f, q, n, origin_only, cap)?;
            let predicted: BigRational = class
                .evaluate(&BigRational::from_integer(BigInt::from(q)))
                .expect("q is non-zero");
            let kappa = if report.raw_count == 0 {
                None
            } else {
                let observed = BigRational::from_integer(BigInt::from(report.raw_count));
                if predicted.is_zero() {
                    None
                } else {
                    exact_log(&(observed / &predicted), q)
                        .map(|e| e + 2 * (n as i64 + 1) - report.ambient_log as i64)
                }
            };
            samples.push(CalibrationSample {
                q,
                n,
                raw_count: report.raw_count,
                predicted,
                kappa,
            });
        }
    }
    let mut failures = Vec::new();
    let mut kappa: Option<i64> = None;
    for s in &samples {
        match (s.raw_count == 0, s.predicted.is_zero(), s.kappa) {
            (true, true, _) => {}
            (false, false, Some(k)) => match kappa {
                None => kappa = Some(k),
                Some(first) if first == k => {}
                Some(_) => failures.push(s),
            },
            _ => failures.push(s),
        }
    }
    if !failures.is_empty() {
        let listed: Vec<String> = failures
            .iter()
            .map(|s| {
                format!(
                    "(q={}, n={}: count {}, predicted {})",
                    s.q, s.n, s.raw_count, s.predicted
                )
            })
            .collect();
        return Err(JetError::Inconsistent(listed.join(", ")));
    }
    let kappa = kappa.ok_or(JetError::Underdetermined)?;
    Ok(Calibration {
        kappa,
        origin_only,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_counts_for_the_cusp() {
        let cusp = CurvePoly::pq(2, 3);
        let r = count_jets(&cusp, 2, 2, true, DEFAULT_CAP).unwrap();
        assert_eq!(r.raw_count, 8);
        assert_eq!(r.ambient_log, 4);
        assert_eq!(r.ratio, BigRational::new(1.into(), 2.into()));
        assert_eq!(count_jets(&cusp, 3, 2, true, DEFAULT_CAP).unwrap().raw_count, 54);
        assert_eq!(count_jets(&cusp, 2, 5, true, DEFAULT_CAP).unwrap().raw_count, 0);
    }

    #[test]
    fn stratified_hand_counts() {
        let cusp = CurvePoly::pq(2, 3);
        assert_eq!(
            count_jets_stratified(&cusp, 2, 2, 1, DEFAULT_CAP).unwrap().raw_count,
            8
        );
        assert_eq!(
            count_jets_stratified(&cusp, 2, 2, 2, DEFAULT_CAP).unwrap().raw_count,
            0
        );
        assert!(matches!(
            count_jets_stratified(&cusp, 2, 2, 3, DEFAULT_CAP),
            Err(JetError::BadStratum { .. })
        ));
    }

    #[test]
    fn field_and_cap_errors() {
        let cusp = CurvePoly::pq(2, 3);
        assert_eq!(count_jets(&cusp, 4, 2, true, DEFAULT_CAP), Err(JetError::NonPrime(4)));
        assert_eq!(count_jets(&cusp, 1, 2, true, DEFAULT_CAP), Err(JetError::NonPrime(1)));
        assert_eq!(count_jets(&cusp, 11, 2, true, DEFAULT_CAP), Err(JetError::FieldTooLarge(11)));
        assert!(matches!(
            count_jets(&cusp, 3, 20, true, DEFAULT_CAP),
            Err(JetError::CapExceeded { .. })
        ));
    }

    #[test]
    fn constant_term_rejected() {
        assert_eq!(
            CurvePoly::new(vec![(0, 0, 1), (1, 0, 1)]),
            Err(JetError::NonzeroConstant)
        );
        assert!(CurvePoly::new(vec![(0, 0, 0), (1, 1, 1)]).is_ok());
    }

    #[test]
    fn smooth_curve_counts() {
        // y = 0: contact order n means ord y(t) = n exactly.
        let line = CurvePoly::new(vec![(0, 1, 1)]).unwrap();
        let r = count_jets(&line, 3, 2, true, DEFAULT_CAP).unwrap();
        // x free (2 coefficients), y = c t^2 with c != 0.
        assert_eq!(r.raw_count, 9 * 2);
    }

    #[test]
    fn log_reader() {
        assert_eq!(exact_log(&BigRational::new(9.into(), 1.into()), 3), Some(2));
        assert_eq!(exact_log(&BigRational::new(1.into(), 4.into()), 2), Some(-2));
        assert_eq!(exact_log(&BigRational::new(2.into(), 3.into()), 3), None);
        assert_eq!(exact_log(&BigRational::zero(), 3), None);
    }
}
