//! Motivic classes of Hilbert schemes of points with a fixed number of
//! generators.
//!
//! An ideal of colength `n` with `k` minimal generators carries a unique
//! independent tuple of generator valuations. Its stratum is a trivial
//! fibration over a product of principal Hilbert schemes. For `(p,q)`-curves
//! this makes every stratum a power of `L`.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::semigroup::{
    ideal_search_bound, is_independent, MemberSet, NumericalSemigroup, SemigroupError,
    SemigroupIdeal,
};
use crate::MotivicClass;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbError {
    #[error("tuple {0:?} is not independent")]
    NotIndependent(Vec<u64>),
    #[error("length and generator count must be positive")]
    BadParameters,
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
}

impl HilbError {
    pub fn name(&self) -> &'static str {
        match self {
            HilbError::NotIndependent(_) => "NotIndependent",
            HilbError::BadParameters => "BadParameters",
            HilbError::Semigroup(e) => e.name(),
        }
    }
}

/// Sorted generator valuations `n_1 < … < n_k` that form an independent tuple.
#[derive(Clone, PartialEq, Eq)]
pub struct IndependentTuple {
    parent: NumericalSemigroup,
    values: Vec<u64>,
}

impl IndependentTuple {
    pub fn new(parent: &NumericalSemigroup, values: &[u64]) -> Result<Self, HilbError> {
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        if !is_independent(parent, &sorted) {
            return Err(HilbError::NotIndependent(sorted));
        }
        Ok(IndependentTuple {
            parent: parent.clone(),
            values: sorted,
        })
    }

    pub fn parent(&self) -> &NumericalSemigroup {
        &self.parent
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// The Γ-ideal `Γ_n̄ = ∪ (n_i + Γ)`.
    pub fn ideal(&self) -> SemigroupIdeal {
        SemigroupIdeal::from_generators(&self.parent, &self.values)
            .expect("entries of an independent tuple are members")
    }
}

impl std::fmt::Debug for IndependentTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IndependentTuple{:?}", self.values)
    }
}

/// `[PHilb^n] = L^{|(n + H) ∩ Γ|}`, or zero when `n ∉ Γ`.
pub fn principal_class(semigroup: &NumericalSemigroup, n: u64) -> MotivicClass {
    if !semigroup.contains(n) {
        return MotivicClass::zero();
    }
    MotivicClass::lefschetz_power(semigroup.shifted_hole_hits(n, semigroup) as i64)
}

/// Colength of an ideal with generator valuations `tuple`:
/// `n_1 - δ + |N \ ∪ ((n_i - n_1) + Γ)|`.
pub fn tuple_length(tuple: &IndependentTuple) -> u64 {
    length_of_values(&tuple.parent, &tuple.values)
}

fn length_of_values(semigroup: &NumericalSemigroup, values: &[u64]) -> u64 {
    let first = values[0];
    let c = semigroup.conductor();
    // Past the conductor every integer lies in Γ itself.
    let uncovered = (0..c)
        .filter(|&x| {
            !values
                .iter()
                .any(|&v| v - first <= x && semigroup.contains(x - (v - first)))
        })
        .count() as u64;
    first + uncovered - semigroup.delta()
}

/// All independent `k`-tuples whose ideal has colength `n`, in lexicographic order.
pub fn enumerate_tuples(
    semigroup: &NumericalSemigroup,
    n: u64,
    k: usize,
    budget: u64,
) -> Result<Vec<IndependentTuple>, HilbError> {
    if n == 0 || k == 0 {
        return Err(HilbError::BadParameters);
    }
    let bound = ideal_search_bound(semigroup, n);
    let candidates: Vec<u64> = semigroup.members_below(bound + 1).collect();
    let mut search = TupleSearch {
        semigroup,
        candidates: &candidates,
        n,
        k,
        budget,
        visited: 0,
        chosen: Vec::with_capacity(k),
        found: Vec::new(),
    };
    search.run(0)?;
    Ok(search
        .found
        .into_iter()
        .map(|values| IndependentTuple {
            parent: semigroup.clone(),
            values,
        })
        .collect())
}

struct TupleSearch<'a> {
    semigroup: &'a NumericalSemigroup,
    candidates: &'a [u64],
    n: u64,
    k: usize,
    budget: u64,
    visited: u64,
    chosen: Vec<u64>,
    found: Vec<Vec<u64>>,
}

impl TupleSearch<'_> {
    fn run(&mut self, start: usize) -> Result<(), HilbError> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(SemigroupError::BudgetExceeded(self.budget).into());
        }
        if self.chosen.len() == self.k {
            if length_of_values(self.semigroup, &self.chosen) == self.n {
                self.found.push(self.chosen.clone());
            }
            return Ok(());
        }
        for idx in start..self.candidates.len() {
            let x = self.candidates[idx];
            if self.chosen.is_empty() {
                // |Γ ∩ [0, n_1)| ≤ n, because those members all miss the ideal.
                if idx as u64 > self.n {
                    break;
                }
                if x < self.n {
                    continue;
                }
            }
            if self
                .chosen
                .iter()
                .any(|&prev| self.semigroup.contains(x - prev))
            {
                continue;
            }
            self.chosen.push(x);
            // Adding generators only shrinks the colength.
            if length_of_values(self.semigroup, &self.chosen) >= self.n {
                self.run(idx + 1)?;
            }
            self.chosen.pop();
        }
        Ok(())
    }
}

/// Exponent of the fibre: `Σ |(n_i + H) ∩ Γ| - Σ |(n_i + H) ∩ Γ_n̄|`.
pub fn summand_exponent(tuple: &IndependentTuple) -> u64 {
    let semigroup = &tuple.parent;
    let ideal = tuple.ideal();
    let full: u64 = tuple
        .values
        .iter()
        .map(|&v| semigroup.shifted_hole_hits(v, semigroup))
        .sum();
    let restricted: u64 = tuple
        .values
        .iter()
        .map(|&v| semigroup.shifted_hole_hits(v, &ideal))
        .sum();
    full - restricted
}

pub fn tuple_summand(tuple: &IndependentTuple) -> MotivicClass {
    MotivicClass::lefschetz_power(summand_exponent(tuple) as i64)
}

/// Stratum class of `tuple` times an externally supplied correction factor.
pub fn fixed_generator_class_with_correction(
    tuple: &IndependentTuple,
    correction: &MotivicClass,
) -> MotivicClass {
    &tuple_summand(tuple) * correction
}

#[derive(Debug, Clone, PartialEq)]
pub struct HilbClassReport {
    pub n: u64,
    pub k: usize,
    pub tuples: Vec<(IndependentTuple, MotivicClass)>,
    pub total: MotivicClass,
    pub euler: u64,
    /// False when the semigroup is not two-generated: the total is then only
    /// the combinatorial model, before ring-level corrections.
    pub exact: bool,
}

impl HilbClassReport {
    pub fn to_json(&self) -> HilbReportJson {
        HilbReportJson {
            n: self.n,
            k: self.k,
            tuples: self
                .tuples
                .iter()
                .map(|(t, s)| TupleJson {
                    values: t.values.clone(),
                    summand: s.clone(),
                })
                .collect(),
            total: self.total.clone(),
            euler: self.euler,
            exact: self.exact,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TupleJson {
    pub values: Vec<u64>,
    pub summand: MotivicClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct HilbReportJson {
    pub n: u64,
    pub k: usize,
    pub tuples: Vec<TupleJson>,
    pub total: MotivicClass,
    pub euler: u64,
    pub exact: bool,
}

/// `[Hilb^n_{0,k}] = Σ_{n̄ ∈ M_n^k} L^{e(n̄)}`.
pub fn fixed_generator_class(
    semigroup: &NumericalSemigroup,
    n: u64,
    k: usize,
    budget: u64,
) -> Result<HilbClassReport, HilbError> {
    let tuples: Vec<(IndependentTuple, MotivicClass)> = enumerate_tuples(semigroup, n, k, budget)?
        .into_iter()
        .map(|t| {
            let s = tuple_summand(&t);
            (t, s)
        })
        .collect();
    let total: MotivicClass = tuples.iter().map(|(_, s)| s.clone()).sum();
    let euler: BigInt = total
        .evaluate(&BigInt::from(1))
        .expect("evaluation at 1 is always defined");
    let euler = u64::try_from(euler).expect("Euler characteristic of a sum of powers of L");
    Ok(HilbClassReport {
        n,
        k,
        tuples,
        total,
        euler,
        exact: semigroup.is_two_generated(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::DEFAULT_SEARCH_BUDGET;

    fn ex317() -> NumericalSemigroup {
        NumericalSemigroup::from_holes(&[1, 2, 3, 5, 7, 9, 11, 15]).unwrap()
    }

    fn cusp() -> NumericalSemigroup {
        NumericalSemigroup::from_generators(&[2, 3]).unwrap()
    }

    fn values(ts: &[IndependentTuple]) -> Vec<Vec<u64>> {
        ts.iter().map(|t| t.values().to_vec()).collect()
    }

    #[test]
    fn principal_classes() {
        assert_eq!(principal_class(&ex317(), 4), MotivicClass::lefschetz_power(3));
        assert!(principal_class(&cusp(), 1).is_zero());
        assert_eq!(principal_class(&cusp(), 2), MotivicClass::lefschetz());
    }

    #[test]
    fn lengths() {
        let t = IndependentTuple::new(&cusp(), &[5]).unwrap();
        assert_eq!(tuple_length(&t), 5);
        let t = IndependentTuple::new(&ex317(), &[13, 8]).unwrap();
        assert_eq!(t.values(), &[8, 13]);
        assert_eq!(tuple_length(&t), 4);
        let t = IndependentTuple::new(&ex317(), &[8, 10, 19]).unwrap();
        assert_eq!(tuple_length(&t), 5);
        assert_eq!(t.ideal().codimension(), 5);
    }

    #[test]
    fn dependent_tuples_are_rejected() {
        assert_eq!(
            IndependentTuple::new(&cusp(), &[2, 4]),
            Err(HilbError::NotIndependent(vec![2, 4]))
        );
        assert!(IndependentTuple::new(&cusp(), &[3, 3]).is_err());
    }

    #[test]
    fn cusp_length_one() {
        let ts = enumerate_tuples(&cusp(), 1, 2, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(values(&ts), vec![vec![2, 3]]);
        assert!(enumerate_tuples(&cusp(), 0, 1, DEFAULT_SEARCH_BUDGET).is_err());
    }

    #[test]
    fn semigroup_level_tuples_of_the_three_generated_example() {
        // Computed by exhaustive enumeration over all subsets below the bound.
        let g = ex317();
        let k2 = enumerate_tuples(&g, 4, 2, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(values(&k2), vec![vec![6, 8], vec![6, 17], vec![8, 13]]);
        let k3 = enumerate_tuples(&g, 4, 3, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(values(&k3), vec![vec![10, 12, 13]]);
        let k4 = enumerate_tuples(&g, 4, 4, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(values(&k4), vec![vec![8, 10, 17, 19]]);
    }

    #[test]
    fn summands() {
        let g = ex317();
        let t = IndependentTuple::new(&g, &[8, 13]).unwrap();
        assert_eq!(tuple_summand(&t), MotivicClass::lefschetz());
        let t = IndependentTuple::new(&g, &[6, 17]).unwrap();
        assert_eq!(tuple_summand(&t), MotivicClass::lefschetz_power(2));
        for n in g.members_below(30) {
            let t = IndependentTuple::new(&g, &[n]).unwrap();
            assert_eq!(tuple_summand(&t), principal_class(&g, n));
        }
    }

    #[test]
    fn corrections() {
        let g = ex317();
        let t = IndependentTuple::new(&g, &[8, 10, 19]).unwrap();
        assert_eq!(tuple_summand(&t), MotivicClass::lefschetz_power(4));
        assert_eq!(
            fixed_generator_class_with_correction(&t, &MotivicClass::lefschetz_power(-2)),
            MotivicClass::lefschetz_power(2)
        );
        let t = IndependentTuple::new(&g, &[10, 12, 13]).unwrap();
        assert_eq!(
            fixed_generator_class_with_correction(&t, &MotivicClass::one()),
            MotivicClass::one()
        );
    }

    #[test]
    fn cusp_reports() {
        let r = fixed_generator_class(&cusp(), 1, 1, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(r.total.is_zero());
        assert_eq!(r.euler, 0);
        assert!(r.exact);

        let r = fixed_generator_class(&cusp(), 3, 2, DEFAULT_SEARCH_BUDGET).unwrap();
        // Colength-3 ideals: Γ≥4 = (4,5) and 3 + Γ, so one two-generated tuple.
        let vals: Vec<Vec<u64>> = r.tuples.iter().map(|(t, _)| t.values().to_vec()).collect();
        assert_eq!(vals, vec![vec![4, 5]]);
        assert_eq!(r.total, MotivicClass::one());
        assert_eq!(r.euler, 1);
    }

    #[test]
    fn report_json() {
        let r = fixed_generator_class(&cusp(), 3, 2, DEFAULT_SEARCH_BUDGET).unwrap();
        let json = serde_json::to_string(&r.to_json()).unwrap();
        assert_eq!(
            json,
            r#"{"n":3,"k":2,"tuples":[{"values":[4,5],"summand":[[0,"1"]]}],"total":[[0,"1"]],"euler":1,"exact":true}"#
        );
    }
}
