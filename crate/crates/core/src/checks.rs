//! Property suites run by `curvemotive check`.
//!
//! Each suite walks a small default grid and records one [`PropertyResult`]
//! per (property, parameters) pair. A failing property never aborts the run.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::hilb::{fixed_generator_class, principal_class, tuple_length};
use crate::jets::{
    calibrate, count_jets, count_jets_partitioned, count_jets_stratified, CurvePoly, DEFAULT_CAP,
};
use crate::resolution::{achievable_orders, load_graph, resolve_pq, threshold, ResolutionGraph};
use crate::semigroup::{
    enumerate_ideals, enumerate_ideals_with_bound, ideal_search_bound, is_independent,
    DEFAULT_SEARCH_BUDGET,
};
use crate::zeta::{calibrated_kappa, contact_empty, denef_coefficient, zeta_rational};
use crate::{MemberSet, MotivicClass, NumericalSemigroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown suite {0:?}; expected semigroup, hilb, resolution, zeta, oracle or all")]
    UnknownSuite(String),
}

impl CheckError {
    pub fn name(&self) -> &'static str {
        match self {
            CheckError::UnknownSuite(_) => "UnknownSuite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Semigroup,
    Hilb,
    Resolution,
    Zeta,
    Oracle,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Semigroup => "semigroup",
            Suite::Hilb => "hilb",
            Suite::Resolution => "resolution",
            Suite::Zeta => "zeta",
            Suite::Oracle => "oracle",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = CheckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "semigroup" => Suite::Semigroup,
            "hilb" => Suite::Hilb,
            "resolution" => Suite::Resolution,
            "zeta" => Suite::Zeta,
            "oracle" => Suite::Oracle,
            "all" => Suite::All,
            _ => return Err(CheckError::UnknownSuite(s.to_string())),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Grid sizes and caps for the suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    /// Coprime pairs `(p, q)` used by every suite except `oracle`.
    pub pq: Vec<(u64, u64)>,
    /// Largest colength for the semigroup and hilb suites.
    pub n_max: u64,
    pub t_max: u64,
    /// Curves counted by the oracle suite.
    pub oracle_pq: Vec<(u64, u64)>,
    pub oracle_q: Vec<u64>,
    pub oracle_n_max: u64,
    pub cap: u64,
    pub budget: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            pq: vec![(2, 3), (2, 5), (3, 4), (3, 5)],
            n_max: 10,
            t_max: 12,
            oracle_pq: vec![(2, 3), (2, 5), (3, 4)],
            oracle_q: vec![2, 3],
            oracle_n_max: 6,
            cap: DEFAULT_CAP,
            budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub property: &'static str,
    pub params: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub results: Vec<PropertyResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let _ = write!(
                out,
                "{} {}::{} [{}]",
                if r.passed { "PASS" } else { "FAIL" },
                r.suite,
                r.property,
                r.params
            );
            if let Some(d) = &r.detail {
                let _ = write!(out, " {d}");
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "{} properties, {} passed, {} failed",
            self.results.len(),
            self.results.len() - failed,
            failed
        );
        out
    }
}

struct Recorder<'a> {
    suite: &'static str,
    report: &'a mut CheckReport,
}

impl Recorder<'_> {
    fn record(&mut self, property: &'static str, params: String, outcome: Result<(), String>) {
        let (passed, detail) = match outcome {
            Ok(()) => (true, None),
            Err(d) => (false, Some(d)),
        };
        self.report.results.push(PropertyResult {
            suite: self.suite,
            property,
            params,
            passed,
            detail,
        });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn run_suite(suite: Suite, config: &CheckConfig) -> CheckReport {
    let mut report = CheckReport::default();
    let suites: &[Suite] = match suite {
        Suite::All => &[
            Suite::Semigroup,
            Suite::Hilb,
            Suite::Resolution,
            Suite::Zeta,
            Suite::Oracle,
        ],
        ref one => std::slice::from_ref(one),
    };
    for &s in suites {
        let mut rec = Recorder {
            suite: s.name(),
            report: &mut report,
        };
        match s {
            Suite::Semigroup => semigroup_suite(&mut rec, config),
            Suite::Hilb => hilb_suite(&mut rec, config),
            Suite::Resolution => resolution_suite(&mut rec, config),
            Suite::Zeta => zeta_suite(&mut rec, config),
            Suite::Oracle => oracle_suite(&mut rec, config),
            Suite::All => unreachable!(),
        }
    }
    report
}

fn pq_semigroup(p: u64, q: u64) -> Result<NumericalSemigroup, String> {
    NumericalSemigroup::from_generators(&[p, q]).map_err(|e| e.to_string())
}

fn semigroup_suite(rec: &mut Recorder<'_>, config: &CheckConfig) {
    for &(p, q) in &config.pq {
        let params = format!("p={p} q={q}");
        let gamma = match pq_semigroup(p, q) {
            Ok(g) => g,
            Err(e) => {
                rec.record("construct", params, Err(e));
                continue;
            }
        };
        let c = (p - 1) * (q - 1);
        rec.record(
            "delta_and_conductor",
            params.clone(),
            ensure(gamma.delta() == c / 2 && gamma.conductor() == c, || {
                format!("delta {} conductor {}", gamma.delta(), gamma.conductor())
            }),
        );
        rec.record(
            "symmetry",
            params.clone(),
            ensure(
                (0..c).all(|m| gamma.contains(m) != gamma.contains(c - 1 - m)),
                || "membership not symmetric".into(),
            ),
        );
        rec.record(
            "closure",
            params.clone(),
            ensure(
                gamma.contains(0)
                    && gamma.members_below(gamma.table_len()).all(|x| {
                        gamma.generators().iter().all(|&g| gamma.contains(x + g))
                    }),
                || "not closed under adding generators".into(),
            ),
        );
        for n in 1..=config.n_max {
            let params = format!("p={p} q={q} n={n}");
            let bound = ideal_search_bound(&gamma, n);
            let base = enumerate_ideals(&gamma, n, config.budget);
            let raised = enumerate_ideals_with_bound(
                &gamma,
                n,
                bound + gamma.max_generator(),
                config.budget,
            );
            let (base, raised) = match (base, raised) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    rec.record("enumerate_ideals", params, Err(e.to_string()));
                    continue;
                }
            };
            rec.record(
                "bound_stability",
                params.clone(),
                ensure(base == raised, || {
                    format!("{} ideals at B, {} at raised B", base.len(), raised.len())
                }),
            );
            rec.record(
                "independent_generators",
                params.clone(),
                ensure(
                    base.iter().all(|i| is_independent(&gamma, i.min_generators())),
                    || "dependent minimal generators".into(),
                ),
            );
            let chain_bound = gamma.conductor() + n * gamma.max_generator();
            rec.record(
                "bound_soundness",
                params.clone(),
                ensure(
                    base.iter().all(|i| {
                        i.codimension() == n && i.complement().iter().all(|&x| x <= chain_bound)
                    }),
                    || format!("complement past {chain_bound} or wrong codimension"),
                ),
            );
        }
    }
}

fn hilb_suite(rec: &mut Recorder<'_>, config: &CheckConfig) {
    for &(p, q) in &config.pq {
        let gamma = match pq_semigroup(p, q) {
            Ok(g) => g,
            Err(e) => {
                rec.record("construct", format!("p={p} q={q}"), Err(e));
                continue;
            }
        };
        for n in 1..=config.n_max {
            let params = format!("p={p} q={q} n={n}");
            let ideals = match enumerate_ideals(&gamma, n, config.budget) {
                Ok(i) => i,
                Err(e) => {
                    rec.record("enumerate_ideals", params, Err(e.to_string()));
                    continue;
                }
            };
            let mut euler_sum = 0u64;
            let mut reports = Vec::new();
            // An ideal needs at most multiplicity-many generators.
            for k in 1..=gamma.multiplicity() as usize {
                match fixed_generator_class(&gamma, n, k, config.budget) {
                    Ok(r) => {
                        euler_sum += r.euler;
                        reports.push(r);
                    }
                    Err(e) => {
                        rec.record("fixed_generator_class", format!("{params} k={k}"), Err(e.to_string()));
                    }
                }
            }
            rec.record(
                "positivity",
                params.clone(),
                ensure(
                    reports.iter().all(|r| r.total.has_nonnegative_coefficients()),
                    || "negative coefficient in a total".into(),
                ),
            );
            let principal = principal_class(&gamma, n);
            rec.record(
                "principal_consistency",
                params.clone(),
                ensure(
                    reports.first().is_some_and(|r| r.k == 1 && r.total == principal),
                    || format!("k=1 total differs from principal class {principal}"),
                ),
            );
            rec.record(
                "cells_match_ideals",
                params.clone(),
                ensure(euler_sum == ideals.len() as u64, || {
                    format!("Σ euler {euler_sum}, {} ideals", ideals.len())
                }),
            );
            rec.record(
                "length_oracle",
                params.clone(),
                ensure(
                    reports.iter().flat_map(|r| &r.tuples).all(|(t, _)| {
                        let scanned = t.ideal().codimension();
                        scanned == n && tuple_length(t) == scanned
                    }),
                    || "tuple_length disagrees with the table scan".into(),
                ),
            );
            rec.record(
                "euler_specialization",
                params,
                ensure(
                    reports.iter().all(|r| r.euler == r.tuples.len() as u64),
                    || "euler differs from the tuple count".into(),
                ),
            );
        }
    }
}

fn resolution_suite(rec: &mut Recorder<'_>, config: &CheckConfig) {
    for &(p, q) in &config.pq {
        let params = format!("p={p} q={q}");
        let graph = match resolve_pq(p, q) {
            Ok(g) => g,
            Err(e) => {
                rec.record("resolve_pq", params, Err(e.to_string()));
                continue;
            }
        };
        let lct = BigRational::new(BigInt::from(p + q), BigInt::from(p * q));
        rec.record(
            "log_canonical_threshold",
            params.clone(),
            ensure(graph.log_canonical_threshold() == Some(lct.clone()), || {
                format!("got {:?}, expected {lct}", graph.log_canonical_threshold())
            }),
        );
        let last = graph.exceptional().last();
        rec.record(
            "final_divisor",
            params.clone(),
            ensure(
                last.is_some_and(|d| d.multiplicity == p * q && d.discrepancy == p + q - 1),
                || format!("last exceptional divisor {last:?}"),
            ),
        );
        rec.record("tree_and_leaf", params.clone(), tree_and_leaf(&graph));
        rec.record("class_telescoping", params.clone(), class_telescoping(&graph));
        let json = serde_json::to_string(&graph.to_json()).expect("graphs serialize");
        rec.record(
            "json_round_trip",
            params,
            match load_graph(&json) {
                Ok(g) if g == graph => Ok(()),
                Ok(_) => Err("reloaded graph differs".into()),
                Err(e) => Err(e.to_string()),
            },
        );
    }
}

fn tree_and_leaf(graph: &ResolutionGraph) -> Result<(), String> {
    let v = graph.divisors().len();
    ensure(graph.edges().len() + 1 == v, || {
        format!("{} edges on {v} divisors", graph.edges().len())
    })?;
    let strict = graph
        .divisors()
        .iter()
        .find(|d| d.is_strict_transform)
        .ok_or("no strict transform")?;
    ensure(graph.degree(strict.id) == 1, || "strict transform is not a leaf".into())?;
    let max_n = threshold(graph);
    let neighbour = graph
        .edges()
        .iter()
        .find_map(|&(a, b)| {
            if a == strict.id {
                Some(b)
            } else if b == strict.id {
                Some(a)
            } else {
                None
            }
        })
        .and_then(|id| graph.divisor(id))
        .ok_or("strict transform has no neighbour")?;
    ensure(neighbour.multiplicity == max_n, || {
        format!("strict transform meets N={}, max N={max_n}", neighbour.multiplicity)
    })
}

/// The strata inside the exceptional locus add up to `m(L+1) - #(exceptional edges)`,
/// the class of a tree of `m` projective lines.
fn class_telescoping(graph: &ResolutionGraph) -> Result<(), String> {
    let exceptional: BTreeSet<u32> = graph.exceptional().map(|d| d.id).collect();
    let m = exceptional.len() as i64;
    let mut sum = MotivicClass::zero();
    let mut inner_edges = 0i64;
    for s in graph.strata() {
        let members = s.members();
        if !members.iter().any(|id| exceptional.contains(id)) {
            continue;
        }
        if members.len() == 2 && members.iter().all(|id| exceptional.contains(id)) {
            inner_edges += 1;
        }
        sum += graph.stratum_class(&s).ok_or("missing stratum class")?;
    }
    let expected = &MotivicClass::lefschetz().scale(&BigInt::from(m))
        + &MotivicClass::constant(BigInt::from(m - inner_edges));
    ensure(sum == expected, || format!("sum {sum}, expected {expected}"))
}

fn zeta_suite(rec: &mut Recorder<'_>, config: &CheckConfig) {
    for &(p, q) in &config.pq {
        let graph = match resolve_pq(p, q) {
            Ok(g) => g,
            Err(e) => {
                rec.record("resolve_pq", format!("p={p} q={q}"), Err(e.to_string()));
                continue;
            }
        };
        for origin_only in [true, false] {
            let params = format!("p={p} q={q} origin_only={origin_only} t_max={}", config.t_max);
            let rational = zeta_rational(&graph, origin_only);
            let coefficients: Vec<MotivicClass> = (1..=config.t_max)
                .map(|n| denef_coefficient(&graph, n, origin_only))
                .collect();
            rec.record(
                "rational_matches_series",
                params.clone(),
                match (1..=config.t_max).find(|&n| rational.expand(n) != coefficients[n as usize - 1]) {
                    None => Ok(()),
                    Some(n) => Err(format!("first mismatch at n={n}")),
                },
            );
            rec.record(
                "emptiness_coherence",
                params.clone(),
                match (1..=config.t_max).find(|&n| {
                    coefficients[n as usize - 1].is_zero() != contact_empty(&graph, n, origin_only)
                }) {
                    None => Ok(()),
                    Some(n) => Err(format!("mismatch at n={n}")),
                },
            );
            let achievable = achievable_orders(&graph, origin_only, config.t_max);
            rec.record(
                "zero_off_achievable",
                params.clone(),
                match (1..=config.t_max)
                    .find(|&n| coefficients[n as usize - 1].is_zero() == achievable.contains(&n))
                {
                    None => Ok(()),
                    Some(n) => Err(format!("mismatch at n={n}")),
                },
            );
            let t = threshold(&graph);
            let horizon = config.t_max.max(2 * t);
            rec.record(
                "nonempty_past_threshold",
                format!("p={p} q={q} origin_only={origin_only} n={t}..={horizon}"),
                match (t..=horizon).find(|&n| contact_empty(&graph, n, origin_only)) {
                    None => Ok(()),
                    Some(n) => Err(format!("empty at n={n}")),
                },
            );
        }
    }
}

fn oracle_suite(rec: &mut Recorder<'_>, config: &CheckConfig) {
    let cap = config.cap;
    for &(p, q) in &config.oracle_pq {
        let curve = CurvePoly::pq(p as u32, q as u32);
        let graph = match resolve_pq(p, q) {
            Ok(g) => g,
            Err(e) => {
                rec.record("resolve_pq", format!("p={p} q={q}"), Err(e.to_string()));
                continue;
            }
        };
        let smallest_q = config.oracle_q.iter().copied().min().unwrap_or(2);
        for n in 1..=config.oracle_n_max {
            let params = format!("p={p} q={q} field={smallest_q} n={n}");
            let total = count_jets(&curve, smallest_q, n, true, cap);
            let strata: Result<Vec<u64>, _> = (1..=n)
                .map(|k| count_jets_stratified(&curve, smallest_q, n, k, cap).map(|r| r.raw_count))
                .collect();
            rec.record(
                "partition_identity",
                params.clone(),
                match (&total, &strata) {
                    (Ok(t), Ok(s)) => ensure(s.iter().sum::<u64>() == t.raw_count, || {
                        format!("strata {s:?} vs total {}", t.raw_count)
                    }),
                    (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
                },
            );
            rec.record(
                "zero_coherence",
                params.clone(),
                match &total {
                    Ok(t) => ensure((t.raw_count == 0) == contact_empty(&graph, n, true), || {
                        format!("count {} vs contact_empty {}", t.raw_count, contact_empty(&graph, n, true))
                    }),
                    Err(e) => Err(e.to_string()),
                },
            );
            let splits: Result<BTreeSet<u64>, _> = [1, 3, 7]
                .iter()
                .map(|&parts| count_jets_partitioned(&curve, smallest_q, n, false, cap, parts))
                .collect();
            rec.record(
                "parallel_determinism",
                params,
                match splits {
                    Ok(s) => ensure(s.len() == 1, || format!("counts {s:?}")),
                    Err(e) => Err(e.to_string()),
                },
            );
        }
        let n_list: Vec<u64> = (2..=config.oracle_n_max).collect();
        for origin_only in [true, false] {
            let params = format!(
                "p={p} q={q} fields={:?} n={:?} origin_only={origin_only}",
                config.oracle_q, n_list
            );
            rec.record(
                "denef_agreement",
                params,
                match calibrate(&graph, &curve, &config.oracle_q, &n_list, origin_only, cap) {
                    Ok(c) => ensure(c.kappa == calibrated_kappa(origin_only), || {
                        format!("calibrated kappa {}", c.kappa)
                    }),
                    Err(e) => Err(e.to_string()),
                },
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        assert_eq!("zeta".parse::<Suite>().unwrap(), Suite::Zeta);
        let err = "nosuch".parse::<Suite>().unwrap_err();
        assert_eq!(err.name(), "UnknownSuite");
    }

    #[test]
    fn resolution_suite_passes() {
        let report = run_suite(Suite::Resolution, &CheckConfig::default());
        assert!(report.passed(), "{}", report.to_text());
        assert!(report.results.len() >= 20);
    }

    #[test]
    fn small_hilb_grid_passes() {
        let config = CheckConfig {
            pq: vec![(2, 3)],
            n_max: 6,
            ..CheckConfig::default()
        };
        let report = run_suite(Suite::Hilb, &config);
        assert!(report.passed(), "{}", report.to_text());
    }
}
