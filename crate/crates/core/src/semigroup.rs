//! Numerical semigroups and their ideals.
//!
//! A [`NumericalSemigroup`] is stored as a membership table up to its
//! conductor plus a margin; every query past the table resolves through
//! "everything at or above the conductor is a member".

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Default cap on search nodes visited by the exhaustive enumerators.
pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("empty generator list")]
    Empty,
    #[error("generators must be positive")]
    ZeroGenerator,
    #[error("generators have gcd {0}, expected 1")]
    GcdNotOne(u64),
    #[error("complement of the hole set is not closed under addition ({0} + {1} is a hole)")]
    NotASemigroup(u64, u64),
    #[error("{0} is not a member of the semigroup")]
    NotAMember(u64),
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("cannot parse semigroup literal {0:?}")]
    BadLiteral(String),
}

impl SemigroupError {
    pub fn name(&self) -> &'static str {
        match self {
            SemigroupError::Empty => "Empty",
            SemigroupError::ZeroGenerator => "ZeroGenerator",
            SemigroupError::GcdNotOne(_) => "GcdNotOne",
            SemigroupError::NotASemigroup(..) => "NotASemigroup",
            SemigroupError::NotAMember(_) => "NotAMember",
            SemigroupError::BudgetExceeded(_) => "BudgetExceeded",
            SemigroupError::BadLiteral(_) => "BadLiteral",
        }
    }
}

/// Anything that answers membership of a non-negative integer.
pub trait MemberSet {
    fn contains(&self, x: u64) -> bool;
}

#[derive(Debug, PartialEq, Eq)]
struct Tables {
    generators: Vec<u64>,
    conductor: u64,
    members: Vec<bool>,
    holes: Vec<u64>,
}

/// A cofinite submonoid of the naturals. Cloning is cheap.
#[derive(Clone, PartialEq, Eq)]
pub struct NumericalSemigroup(Arc<Tables>);

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl NumericalSemigroup {
    pub fn from_generators(gens: &[u64]) -> Result<Self, SemigroupError> {
        if gens.is_empty() {
            return Err(SemigroupError::Empty);
        }
        if gens.contains(&0) {
            return Err(SemigroupError::ZeroGenerator);
        }
        let g = gens.iter().fold(0, |acc, &x| gcd(acc, x));
        if g != 1 {
            return Err(SemigroupError::GcdNotOne(g));
        }
        let min = *gens.iter().min().unwrap();
        let max = *gens.iter().max().unwrap();
        // Schur: the Frobenius number is below (min - 1)(max - 1).
        let limit = ((min - 1) * (max - 1) + max + 1) as usize;
        let mut member = vec![false; limit + 1];
        member[0] = true;
        for x in 1..=limit {
            member[x] = gens.iter().any(|&g| g as usize <= x && member[x - g as usize]);
        }
        let conductor = (0..=limit).rev().find(|&x| !member[x]).map_or(0, |f| f + 1) as u64;
        Ok(Self::build(conductor, |x| member[x as usize]))
    }

    pub fn from_holes(holes: &[u64]) -> Result<Self, SemigroupError> {
        let holes: BTreeSet<u64> = holes.iter().copied().collect();
        if holes.contains(&0) {
            return Err(SemigroupError::NotASemigroup(0, 0));
        }
        let top = holes.iter().next_back().copied().unwrap_or(0);
        let bound = 2 * top + 2;
        for a in 1..=bound {
            if holes.contains(&a) {
                continue;
            }
            for b in a..=bound - a {
                if !holes.contains(&b) && holes.contains(&(a + b)) {
                    return Err(SemigroupError::NotASemigroup(a, b));
                }
            }
        }
        let conductor = if holes.is_empty() { 0 } else { top + 1 };
        Ok(Self::build(conductor, |x| !holes.contains(&x)))
    }

    /// Parses `pq:2,3`, `gens:4,6,13` or `holes:1,2,3,5`.
    pub fn parse(literal: &str) -> Result<Self, SemigroupError> {
        let bad = || SemigroupError::BadLiteral(literal.to_string());
        let (kind, rest) = literal.split_once(':').ok_or_else(bad)?;
        let values: Vec<u64> = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|s| s.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?
        };
        match kind.trim() {
            "pq" if values.len() == 2 => Self::from_generators(&values),
            "gens" => Self::from_generators(&values),
            "holes" => Self::from_holes(&values),
            _ => Err(bad()),
        }
    }

    fn build(conductor: u64, is_member: impl Fn(u64) -> bool) -> Self {
        let mut holes = Vec::new();
        for x in 0..conductor {
            if !is_member(x) {
                holes.push(x);
            }
        }
        // Minimal generators lie below conductor + multiplicity.
        let multiplicity = (1..=conductor + 1).find(|&x| is_member(x)).unwrap_or(1);
        let gen_bound = conductor + multiplicity;
        let mut generators: Vec<u64> = Vec::new();
        for x in 1..=gen_bound {
            if !is_member(x) {
                continue;
            }
            let decomposable = (1..x).any(|a| is_member(a) && is_member(x - a));
            if !decomposable {
                generators.push(x);
            }
        }
        let max_gen = *generators.last().unwrap_or(&1);
        let table_len = conductor + 2 * max_gen + 1;
        let members = (0..table_len).map(|x| x >= conductor || is_member(x)).collect();
        NumericalSemigroup(Arc::new(Tables {
            generators,
            conductor,
            members,
            holes,
        }))
    }

    /// Minimal generators, ascending.
    pub fn generators(&self) -> &[u64] {
        &self.0.generators
    }

    pub fn conductor(&self) -> u64 {
        self.0.conductor
    }

    pub fn holes(&self) -> &[u64] {
        &self.0.holes
    }

    pub fn delta(&self) -> u64 {
        self.0.holes.len() as u64
    }

    /// Smallest non-zero member.
    pub fn multiplicity(&self) -> u64 {
        self.0.generators[0]
    }

    pub fn max_generator(&self) -> u64 {
        *self.0.generators.last().unwrap()
    }

    /// Length of the stored membership table.
    pub fn table_len(&self) -> u64 {
        self.0.members.len() as u64
    }

    /// True for semigroups with at most two generators, i.e. `⟨p,q⟩` or `N`.
    pub fn is_two_generated(&self) -> bool {
        self.0.generators.len() <= 2
    }

    /// Members below `bound`, ascending.
    pub fn members_below(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        (0..bound).filter(move |&x| self.contains(x))
    }

    /// `|{n + h : h ∈ H} ∩ target|`.
    pub fn shifted_hole_hits<T: MemberSet + ?Sized>(&self, n: u64, target: &T) -> u64 {
        self.holes().iter().filter(|&&h| target.contains(n + h)).count() as u64
    }

    pub fn to_json(&self) -> SemigroupJson {
        SemigroupJson {
            generators: self.generators().to_vec(),
            holes: self.holes().to_vec(),
            delta: self.delta(),
            conductor: self.conductor(),
        }
    }
}

impl MemberSet for NumericalSemigroup {
    fn contains(&self, x: u64) -> bool {
        x >= self.0.conductor || self.0.members[x as usize]
    }
}

impl fmt::Debug for NumericalSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumericalSemigroup{:?}", self.generators())
    }
}

impl FromStr for NumericalSemigroup {
    type Err = SemigroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemigroupJson {
    pub generators: Vec<u64>,
    pub holes: Vec<u64>,
    pub delta: u64,
    pub conductor: u64,
}

/// A Γ-ideal `Δ = ∪ (ν_i + Γ)`.
#[derive(Clone, PartialEq, Eq)]
pub struct SemigroupIdeal {
    parent: NumericalSemigroup,
    min_generators: Vec<u64>,
    codimension: u64,
    conductor: u64,
}

impl SemigroupIdeal {
    pub fn from_generators(
        parent: &NumericalSemigroup,
        values: &[u64],
    ) -> Result<Self, SemigroupError> {
        if values.is_empty() {
            return Err(SemigroupError::Empty);
        }
        if let Some(&bad) = values.iter().find(|&&v| !parent.contains(v)) {
            return Err(SemigroupError::NotAMember(bad));
        }
        let distinct: BTreeSet<u64> = values.iter().copied().collect();
        let min_generators: Vec<u64> = distinct
            .iter()
            .copied()
            .filter(|&v| {
                !distinct
                    .iter()
                    .any(|&u| u < v && parent.contains(v - u))
            })
            .collect();
        let mut ideal = SemigroupIdeal {
            parent: parent.clone(),
            min_generators,
            codimension: 0,
            conductor: 0,
        };
        // Everything at or above ν_1 + c(Γ) is in Δ.
        let top = ideal.min_generators[0] + parent.conductor();
        ideal.conductor = (0..top)
            .rev()
            .find(|&x| !ideal.contains(x))
            .map_or(0, |x| x + 1);
        ideal.codimension = parent
            .members_below(ideal.conductor)
            .filter(|&x| !ideal.contains(x))
            .count() as u64;
        Ok(ideal)
    }

    pub fn parent(&self) -> &NumericalSemigroup {
        &self.parent
    }

    pub fn min_generators(&self) -> &[u64] {
        &self.min_generators
    }

    /// `|Γ \ Δ|`.
    pub fn codimension(&self) -> u64 {
        self.codimension
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `Γ \ Δ`, ascending.
    pub fn complement(&self) -> Vec<u64> {
        self.parent
            .members_below(self.conductor)
            .filter(|&x| !self.contains(x))
            .collect()
    }

    pub fn to_json(&self) -> IdealJson {
        IdealJson {
            min_generators: self.min_generators.clone(),
            codimension: self.codimension,
            conductor: self.conductor,
        }
    }
}

impl MemberSet for SemigroupIdeal {
    fn contains(&self, x: u64) -> bool {
        self.min_generators
            .iter()
            .any(|&g| g <= x && self.parent.contains(x - g))
    }
}

impl fmt::Debug for SemigroupIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SemigroupIdeal{{gens: {:?}, codim: {}}}",
            self.min_generators, self.codimension
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealJson {
    pub min_generators: Vec<u64>,
    pub codimension: u64,
    pub conductor: u64,
}

/// Search bound for codimension-`n` ideals: `c(Γ) + (n+1)·max(generators)`.
pub fn ideal_search_bound(semigroup: &NumericalSemigroup, n: u64) -> u64 {
    semigroup.conductor() + (n + 1) * semigroup.max_generator()
}

/// All ideals of codimension `n`, ordered lexicographically by `Γ \ Δ`.
pub fn enumerate_ideals(
    semigroup: &NumericalSemigroup,
    n: u64,
    budget: u64,
) -> Result<Vec<SemigroupIdeal>, SemigroupError> {
    enumerate_ideals_with_bound(semigroup, n, ideal_search_bound(semigroup, n), budget)
}

/// Same as [`enumerate_ideals`] with an explicit bound on the missing set.
pub fn enumerate_ideals_with_bound(
    semigroup: &NumericalSemigroup,
    n: u64,
    bound: u64,
    budget: u64,
) -> Result<Vec<SemigroupIdeal>, SemigroupError> {
    // Γ \ Δ is a down-set for the order y ≤ x ⇔ x - y ∈ Γ. Listing a down-set in
    // increasing order, every prefix is again a down-set.
    let candidates: Vec<u64> = semigroup.members_below(bound + 1).collect();
    let mut search = DownSetSearch {
        semigroup,
        candidates: &candidates,
        target: n as usize,
        budget,
        visited: 0,
        chosen: Vec::new(),
        in_set: vec![false; bound as usize + 1],
        found: Vec::new(),
    };
    search.run(0)?;
    search
        .found
        .into_iter()
        .map(|missing| ideal_from_complement(semigroup, &missing))
        .collect()
}

struct DownSetSearch<'a> {
    semigroup: &'a NumericalSemigroup,
    candidates: &'a [u64],
    target: usize,
    budget: u64,
    visited: u64,
    chosen: Vec<u64>,
    in_set: Vec<bool>,
    found: Vec<Vec<u64>>,
}

impl DownSetSearch<'_> {
    fn run(&mut self, start: usize) -> Result<(), SemigroupError> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(SemigroupError::BudgetExceeded(self.budget));
        }
        if self.chosen.len() == self.target {
            self.found.push(self.chosen.clone());
            return Ok(());
        }
        for idx in start..self.candidates.len() {
            let x = self.candidates[idx];
            let addable = self.semigroup.generators().iter().all(|&g| {
                g > x || !self.semigroup.contains(x - g) || self.in_set[(x - g) as usize]
            });
            if !addable {
                continue;
            }
            self.chosen.push(x);
            self.in_set[x as usize] = true;
            self.run(idx + 1)?;
            self.in_set[x as usize] = false;
            self.chosen.pop();
        }
        Ok(())
    }
}

fn ideal_from_complement(
    semigroup: &NumericalSemigroup,
    missing: &[u64],
) -> Result<SemigroupIdeal, SemigroupError> {
    let Some(&top) = missing.last() else {
        return SemigroupIdeal::from_generators(semigroup, &[0]);
    };
    let missing: BTreeSet<u64> = missing.iter().copied().collect();
    // Minimal elements of Δ: members whose Γ-predecessors all lie in Γ \ Δ.
    let mins: Vec<u64> = semigroup
        .members_below(top + semigroup.max_generator() + 1)
        .filter(|x| !missing.contains(x))
        .filter(|&x| {
            semigroup
                .generators()
                .iter()
                .all(|&g| g > x || !semigroup.contains(x - g) || missing.contains(&(x - g)))
        })
        .collect();
    SemigroupIdeal::from_generators(semigroup, &mins)
}

/// No entry lies in another entry's translate `n_j + Γ`.
pub fn is_independent(semigroup: &NumericalSemigroup, tuple: &[u64]) -> bool {
    if tuple.is_empty() || tuple.iter().any(|&x| !semigroup.contains(x)) {
        return false;
    }
    tuple.iter().enumerate().all(|(i, &a)| {
        tuple
            .iter()
            .enumerate()
            .all(|(j, &b)| i == j || b > a || !semigroup.contains(a - b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex317() -> NumericalSemigroup {
        NumericalSemigroup::from_holes(&[1, 2, 3, 5, 7, 9, 11, 15]).unwrap()
    }

    #[test]
    fn cusp_semigroup() {
        let g = NumericalSemigroup::from_generators(&[2, 3]).unwrap();
        assert_eq!(g.holes(), &[1]);
        assert_eq!(g.delta(), 1);
        assert_eq!(g.conductor(), 2);
    }

    #[test]
    fn three_generated_example() {
        let g = NumericalSemigroup::from_generators(&[4, 6, 13]).unwrap();
        assert_eq!(g.holes(), &[1, 2, 3, 5, 7, 9, 11, 15]);
        assert_eq!(g.delta(), 8);
        assert_eq!(g.conductor(), 16);
        assert_eq!(g, ex317());
    }

    #[test]
    fn generator_errors() {
        assert_eq!(
            NumericalSemigroup::from_generators(&[4, 6]),
            Err(SemigroupError::GcdNotOne(2))
        );
        assert_eq!(
            NumericalSemigroup::from_generators(&[]),
            Err(SemigroupError::Empty)
        );
        assert_eq!(
            NumericalSemigroup::from_generators(&[0, 1]),
            Err(SemigroupError::ZeroGenerator)
        );
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let g = NumericalSemigroup::from_generators(&[6, 2, 3, 4]).unwrap();
        assert_eq!(g.generators(), &[2, 3]);
        let n = NumericalSemigroup::from_generators(&[1, 5]).unwrap();
        assert_eq!(n.generators(), &[1]);
        assert_eq!(n.conductor(), 0);
        assert!(n.holes().is_empty());
    }

    #[test]
    fn from_holes_examples() {
        assert_eq!(
            NumericalSemigroup::from_holes(&[1]).unwrap().generators(),
            &[2, 3]
        );
        assert_eq!(ex317().generators(), &[4, 6, 13]);
        assert_eq!(
            NumericalSemigroup::from_holes(&[2]),
            Err(SemigroupError::NotASemigroup(1, 1))
        );
        assert!(matches!(
            NumericalSemigroup::from_holes(&[0, 1]),
            Err(SemigroupError::NotASemigroup(..))
        ));
        assert_eq!(NumericalSemigroup::from_holes(&[]).unwrap().generators(), &[1]);
    }

    #[test]
    fn literals() {
        let a = NumericalSemigroup::parse("pq:2,3").unwrap();
        let b = NumericalSemigroup::parse("gens:3,2").unwrap();
        let c = NumericalSemigroup::parse("holes:1").unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert!(NumericalSemigroup::parse("pq:2,3,4").is_err());
        assert!(NumericalSemigroup::parse("nonsense").is_err());
        assert!(NumericalSemigroup::parse("gens:a,b").is_err());
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_string(&ex317().to_json()).unwrap();
        assert_eq!(
            json,
            r#"{"generators":[4,6,13],"holes":[1,2,3,5,7,9,11,15],"delta":8,"conductor":16}"#
        );
    }

    #[test]
    fn shifted_hits() {
        let g = ex317();
        assert_eq!(g.shifted_hole_hits(4, &g), 3);
        let cusp = NumericalSemigroup::from_generators(&[2, 3]).unwrap();
        assert_eq!(cusp.shifted_hole_hits(0, &cusp), 0);
        let ideal = SemigroupIdeal::from_generators(&g, &[8, 13]).unwrap();
        assert_eq!(g.shifted_hole_hits(8, &ideal), 4);
    }

    #[test]
    fn ideal_construction() {
        let cusp = NumericalSemigroup::from_generators(&[2, 3]).unwrap();
        let i = SemigroupIdeal::from_generators(&cusp, &[2, 4]).unwrap();
        assert_eq!(i.min_generators(), &[2]);
        // 2 + Γ misses 0 and 3.
        assert_eq!(i.codimension(), 2);
        assert_eq!(i.complement(), vec![0, 3]);
        assert_eq!(
            SemigroupIdeal::from_generators(&cusp, &[1]),
            Err(SemigroupError::NotAMember(1))
        );

        let g = ex317();
        let j = SemigroupIdeal::from_generators(&g, &[8, 13]).unwrap();
        assert_eq!(j.min_generators(), &[8, 13]);
        assert_eq!(j.codimension(), 4);
        assert_eq!(j.complement(), vec![0, 4, 6, 10]);
        assert_eq!(j.conductor(), 16);
    }

    #[test]
    fn principal_ideal_codimension_is_its_generator() {
        let g = ex317();
        for n in g.members_below(40) {
            let i = SemigroupIdeal::from_generators(&g, &[n]).unwrap();
            assert_eq!(i.codimension(), n);
        }
    }

    #[test]
    fn small_ideal_enumerations() {
        let cusp = NumericalSemigroup::from_generators(&[2, 3]).unwrap();
        let zero = enumerate_ideals(&cusp, 0, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].min_generators(), &[0]);
        let one = enumerate_ideals(&cusp, 1, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].min_generators(), &[2, 3]);
        assert_eq!(one[0].complement(), vec![0]);
    }

    #[test]
    fn enumeration_budget() {
        let g = ex317();
        assert_eq!(
            enumerate_ideals(&g, 6, 10),
            Err(SemigroupError::BudgetExceeded(10))
        );
    }

    #[test]
    fn independence() {
        let cusp = NumericalSemigroup::from_generators(&[2, 3]).unwrap();
        assert!(is_independent(&cusp, &[2, 3]));
        assert!(!is_independent(&cusp, &[2, 4]));
        assert!(!is_independent(&cusp, &[2, 2]));
        assert!(!is_independent(&cusp, &[1]));
        assert!(is_independent(&ex317(), &[8, 13]));
    }
}
