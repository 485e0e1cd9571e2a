//! Contact-locus classes from an embedded resolution, and the motivic Igusa
//! zeta function built from them.
//!
//! [`denef_coefficient`] is the class of the `(n+1)`-jets of arcs with contact
//! order exactly `n`:
//!
//! `L^{2n} Σ_J (L-1)^{|J|} [E_J^o] Σ_{k_j >= 1, Σ k_j N_j = n} L^{-Σ k_j (ν_j + 1)}`
//!
//! with `ν_j` the order of the relative canonical divisor along `E_j`. This is
//! the normalization that matches finite-field jet counts exactly (see the
//! jet oracle); a zeta coefficient is that class rescaled by `L^{κ - 2(n+1)}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::resolution::{achievable_orders, ResolutionGraph, Stratum};
use crate::MotivicClass;

/// Level shift making zeta coefficients specialize to the jet-oracle ratio
/// for jets based at the origin.
pub const ORIGIN_KAPPA: i64 = 2;
/// Level shift for arcs based anywhere in the plane.
pub const GLOBAL_KAPPA: i64 = 0;

pub fn calibrated_kappa(origin_only: bool) -> i64 {
    if origin_only {
        ORIGIN_KAPPA
    } else {
        GLOBAL_KAPPA
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZetaError {
    #[error("no level shift recorded and strict mode requested")]
    UncalibratedConvention,
    #[error("truncation order must be at least 1")]
    BadTruncation,
}

impl ZetaError {
    pub fn name(&self) -> &'static str {
        match self {
            ZetaError::UncalibratedConvention => "UncalibratedConvention",
            ZetaError::BadTruncation => "BadTruncation",
        }
    }
}

/// Normalization attached to a [`ZetaSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Convention {
    pub kappa: i64,
    pub origin_only: bool,
}

fn lm1() -> MotivicClass {
    &MotivicClass::lefschetz() - &MotivicClass::one()
}

fn multiplicities(graph: &ResolutionGraph, stratum: &Stratum) -> Vec<(u64, u64)> {
    stratum
        .members()
        .iter()
        .map(|&i| {
            let d = graph.divisor(i).expect("strata reference known divisors");
            (d.multiplicity, d.discrepancy)
        })
        .collect()
}

/// All `(k_j)` with `k_j >= 1` and `Σ k_j N_j = n`; returns `Σ k_j (ν_j + 1)` for each.
fn weight_solutions(factors: &[(u64, u64)], n: u64) -> Vec<u64> {
    fn go(factors: &[(u64, u64)], rest: u64, acc: u64, out: &mut Vec<u64>) {
        match factors {
            [] => {
                if rest == 0 {
                    out.push(acc)
                }
            }
            [(big_n, nu), tail @ ..] => {
                let mut k = 1;
                while k * big_n <= rest {
                    go(tail, rest - k * big_n, acc + k * (nu + 1), out);
                    k += 1;
                }
            }
        }
    }
    let mut out = Vec::new();
    go(factors, n, 0, &mut out);
    out
}

/// Class of the `(n+1)`-jets with contact order exactly `n`; zero for `n = 0`.
pub fn denef_coefficient(graph: &ResolutionGraph, n: u64, origin_only: bool) -> MotivicClass {
    if n == 0 {
        return MotivicClass::zero();
    }
    let mut sum = MotivicClass::zero();
    for stratum in graph.strata_in_mode(origin_only) {
        let factors = multiplicities(graph, &stratum);
        let weights = weight_solutions(&factors, n);
        if weights.is_empty() {
            continue;
        }
        let inner: MotivicClass = weights
            .into_iter()
            .map(|w| MotivicClass::lefschetz_power(-(w as i64)))
            .sum();
        let class = graph
            .stratum_class(&stratum)
            .cloned()
            .unwrap_or_else(MotivicClass::zero);
        let prefactor = &lm1().pow(factors.len() as u32) * &class;
        sum += &(&prefactor * &inner);
    }
    sum.shift(2 * n as i64)
}

/// True when no arc (in the chosen mode) has contact order exactly `n`.
pub fn contact_empty(graph: &ResolutionGraph, n: u64, origin_only: bool) -> bool {
    !achievable_orders(graph, origin_only, n).contains(&n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaSeries {
    pub t_max: u64,
    /// Entry `i` is the coefficient of `T^{i+1}`.
    pub coefficients: Vec<MotivicClass>,
    pub convention: Convention,
}

impl ZetaSeries {
    pub fn coefficient(&self, n: u64) -> Option<&MotivicClass> {
        if n == 0 {
            return None;
        }
        self.coefficients.get(n as usize - 1)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "kappa = {}, origin_only = {}\n",
            self.convention.kappa, self.convention.origin_only
        );
        for (i, c) in self.coefficients.iter().enumerate() {
            let _ = writeln!(out, "T^{}: {}", i + 1, c);
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("\\left({}\\right)T^{{{}}}", c.to_latex(), i + 1))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// Options for [`zeta_series`]. `kappa = None` falls back to the calibrated
/// constant unless `strict` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZetaOptions {
    pub origin_only: bool,
    pub kappa: Option<i64>,
    pub strict: bool,
}

impl ZetaOptions {
    pub fn calibrated(origin_only: bool) -> Self {
        ZetaOptions {
            origin_only,
            kappa: Some(calibrated_kappa(origin_only)),
            strict: true,
        }
    }
}

pub fn zeta_series(
    graph: &ResolutionGraph,
    t_max: u64,
    options: ZetaOptions,
) -> Result<ZetaSeries, ZetaError> {
    if t_max == 0 {
        return Err(ZetaError::BadTruncation);
    }
    let kappa = match options.kappa {
        Some(k) => k,
        None if options.strict => return Err(ZetaError::UncalibratedConvention),
        None => calibrated_kappa(options.origin_only),
    };
    let coefficients = (1..=t_max)
        .map(|n| denef_coefficient(graph, n, options.origin_only).shift(kappa - 2 * (n as i64 + 1)))
        .collect();
    Ok(ZetaSeries {
        t_max,
        coefficients,
        convention: Convention {
            kappa,
            origin_only: options.origin_only,
        },
    })
}

/// One stratum's contribution: `prefactor · Π_j Σ_{k>=1} L^{-k(ν_j+1)} T^{k N_j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalTerm {
    #[serde(skip)]
    pub stratum: Stratum,
    /// `(L-1)^{|J|} [E_J^o]`.
    pub prefactor: MotivicClass,
    /// `(N_j, ν_j)` per member of the stratum.
    pub factors: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct RationalZeta {
    pub terms: Vec<RationalTerm>,
}

impl RationalZeta {
    /// Coefficient of `T^n` in the expansion, times `L^{2n}`: the same
    /// normalization as [`denef_coefficient`]. Computed by multiplying the
    /// truncated geometric series.
    pub fn expand(&self, n: u64) -> MotivicClass {
        if n == 0 {
            return MotivicClass::zero();
        }
        let mut out = MotivicClass::zero();
        for term in &self.terms {
            // Power series in T truncated after degree n.
            let mut series: Vec<MotivicClass> = vec![MotivicClass::zero(); n as usize + 1];
            series[0] = MotivicClass::one();
            for &(big_n, nu) in &term.factors {
                let mut geometric = vec![MotivicClass::zero(); n as usize + 1];
                let mut k = 1;
                while k * big_n <= n {
                    geometric[(k * big_n) as usize] =
                        MotivicClass::lefschetz_power(-((k * (nu + 1)) as i64));
                    k += 1;
                }
                series = truncated_product(&series, &geometric);
            }
            out += &(&term.prefactor * &series[n as usize]);
        }
        out.shift(2 * n as i64)
    }
}

fn truncated_product(a: &[MotivicClass], b: &[MotivicClass]) -> Vec<MotivicClass> {
    let len = a.len();
    let mut out = vec![MotivicClass::zero(); len];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(len - i).filter(|(_, y)| !y.is_zero()) {
            out[i + j] += &(x * y);
        }
    }
    out
}

pub fn zeta_rational(graph: &ResolutionGraph, origin_only: bool) -> RationalZeta {
    let terms = graph
        .strata_in_mode(origin_only)
        .into_iter()
        .map(|stratum| {
            let factors = multiplicities(graph, &stratum);
            let class = graph
                .stratum_class(&stratum)
                .cloned()
                .unwrap_or_else(MotivicClass::zero);
            RationalTerm {
                stratum,
                prefactor: &lm1().pow(factors.len() as u32) * &class,
                factors,
            }
        })
        .collect();
    RationalZeta { terms }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientJson {
    pub n: u64,
    pub poly: MotivicClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaJson {
    pub convention: Convention,
    pub coefficients: Vec<CoefficientJson>,
    pub rational: RationalZeta,
}

pub fn zeta_json(series: &ZetaSeries, rational: &RationalZeta) -> ZetaJson {
    ZetaJson {
        convention: series.convention,
        coefficients: series
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| CoefficientJson {
                n: i as u64 + 1,
                poly: c.clone(),
            })
            .collect(),
        rational: rational.clone(),
    }
}

/// Coefficients of a series keyed by order, skipping zeros.
pub fn nonzero_orders(series: &ZetaSeries) -> BTreeMap<u64, MotivicClass> {
    series
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as u64 + 1, c.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::{load_graph, resolve_pq};
    use num_bigint::BigInt;

    fn poly(terms: &[(i64, i64)]) -> MotivicClass {
        MotivicClass::from_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    #[test]
    fn cusp_coefficients() {
        let g = resolve_pq(2, 3).unwrap();
        assert!(denef_coefficient(&g, 5, true).is_zero());
        assert!(denef_coefficient(&g, 1, true).is_zero());
        assert!(denef_coefficient(&g, 0, true).is_zero());
        // Single stratum E1 with k = 1: L^4 (L-1) L L^-2.
        assert_eq!(denef_coefficient(&g, 2, true), poly(&[(4, 1), (3, -1)]));
        assert_eq!(denef_coefficient(&g, 3, true), poly(&[(5, 1), (4, -1)]));
    }

    #[test]
    fn global_mode_includes_smooth_points_of_the_curve() {
        let g = resolve_pq(2, 3).unwrap();
        // Brute-force counts 2 (q = 2) and 12 (q = 3) at n = 1.
        assert_eq!(denef_coefficient(&g, 1, false), poly(&[(3, 1), (2, -2), (1, 1)]));
    }

    #[test]
    fn emptiness() {
        let g = resolve_pq(2, 3).unwrap();
        assert!(contact_empty(&g, 5, true));
        assert!(contact_empty(&g, 1, true));
        assert!(!contact_empty(&g, 6, true));
        assert!(!contact_empty(&g, 5, false));
    }

    #[test]
    fn series_conventions() {
        let g = resolve_pq(2, 3).unwrap();
        let s = zeta_series(&g, 5, ZetaOptions::calibrated(true)).unwrap();
        assert!(s.coefficient(5).unwrap().is_zero());
        assert!(s.coefficient(1).unwrap().is_zero());
        // (L^4 - L^3) L^{2 - 6}
        assert_eq!(s.coefficient(2).unwrap(), &poly(&[(0, 1), (-1, -1)]));
        let loose = ZetaOptions {
            origin_only: true,
            kappa: None,
            strict: false,
        };
        assert_eq!(zeta_series(&g, 5, loose).unwrap(), s);
        let strict = ZetaOptions { strict: true, ..loose };
        assert_eq!(
            zeta_series(&g, 5, strict),
            Err(ZetaError::UncalibratedConvention)
        );
        assert_eq!(
            zeta_series(&g, 0, ZetaOptions::calibrated(true)),
            Err(ZetaError::BadTruncation)
        );
    }

    #[test]
    fn cusp_rational_terms() {
        let g = resolve_pq(2, 3).unwrap();
        let r = zeta_rational(&g, true);
        assert_eq!(r.terms.len(), 6);
        assert_eq!(r.expand(4), denef_coefficient(&g, 4, true));
        assert_eq!(zeta_rational(&g, false).terms.len(), 7);
    }

    #[test]
    fn empty_graph() {
        let g = load_graph(r#"{"divisors":[],"edges":[],"classes":{}}"#).unwrap();
        let r = zeta_rational(&g, true);
        assert!(r.terms.is_empty());
        assert!((1..10).all(|n| r.expand(n).is_zero() && denef_coefficient(&g, n, true).is_zero()));
    }

    #[test]
    fn json_shape() {
        let g = resolve_pq(2, 3).unwrap();
        let s = zeta_series(&g, 2, ZetaOptions::calibrated(true)).unwrap();
        let r = zeta_rational(&g, true);
        let json = serde_json::to_value(zeta_json(&s, &r)).unwrap();
        assert_eq!(json["convention"]["kappa"], 2);
        assert_eq!(json["coefficients"][0]["n"], 1);
        assert_eq!(json["coefficients"][0]["poly"], serde_json::json!([]));
        assert_eq!(json["rational"][0]["factors"], serde_json::json!([[2, 1]]));
    }
}
