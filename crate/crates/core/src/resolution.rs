//! Embedded resolutions of plane curve germs.
//!
//! [`resolve_pq`] runs the point blow-ups of `x^p = y^q` symbolically. Locally
//! the strict transform is always `u^a = v^b` with the coordinate axes possibly
//! carrying exceptional divisors, and each blow-up is one Euclidean step on
//! `(a, b)`. Other curves enter through [`load_graph`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::MotivicClass;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("p = {0} and q = {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("expected 2 <= p < q, got p = {0}, q = {1}")]
    BadRange(u64, u64),
    #[error("graph document does not match the schema: {0}")]
    SchemaError(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl ResolutionError {
    pub fn name(&self) -> &'static str {
        match self {
            ResolutionError::NotCoprime(..) => "NotCoprime",
            ResolutionError::BadRange(..) => "BadRange",
            ResolutionError::SchemaError(_) => "SchemaError",
            ResolutionError::InvariantViolation(_) => "InvariantViolation",
        }
    }
}

/// An irreducible component of the total transform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divisor {
    pub id: u32,
    /// Order of vanishing of the pulled-back equation.
    #[serde(rename = "N")]
    pub multiplicity: u64,
    /// Order of vanishing of the relative canonical divisor.
    #[serde(rename = "nu")]
    pub discrepancy: u64,
    #[serde(rename = "strict")]
    pub is_strict_transform: bool,
    pub over_origin: bool,
}

/// A non-empty stratum `E_J^o`: a single divisor or the intersection point of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stratum {
    Single(u32),
    Pair(u32, u32),
}

impl Stratum {
    pub fn pair(a: u32, b: u32) -> Self {
        Stratum::Pair(a.min(b), a.max(b))
    }

    pub fn members(&self) -> Vec<u32> {
        match *self {
            Stratum::Single(i) => vec![i],
            Stratum::Pair(i, j) => vec![i, j],
        }
    }

    pub fn key(&self) -> String {
        match self {
            Stratum::Single(i) => i.to_string(),
            Stratum::Pair(i, j) => format!("{i}-{j}"),
        }
    }

    fn parse_key(key: &str) -> Option<Self> {
        match key.split_once('-') {
            Some((a, b)) => Some(Stratum::pair(a.trim().parse().ok()?, b.trim().parse().ok()?)),
            None => Some(Stratum::Single(key.trim().parse().ok()?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionGraph {
    divisors: Vec<Divisor>,
    edges: BTreeSet<(u32, u32)>,
    classes: BTreeMap<Stratum, MotivicClass>,
}

impl ResolutionGraph {
    pub fn divisors(&self) -> &[Divisor] {
        &self.divisors
    }

    pub fn divisor(&self, id: u32) -> Option<&Divisor> {
        self.divisors.iter().find(|d| d.id == id)
    }

    /// Edges as `(smaller id, larger id)`.
    pub fn edges(&self) -> &BTreeSet<(u32, u32)> {
        &self.edges
    }

    pub fn stratum_class(&self, stratum: &Stratum) -> Option<&MotivicClass> {
        self.classes.get(stratum)
    }

    pub fn degree(&self, id: u32) -> usize {
        self.edges.iter().filter(|(a, b)| *a == id || *b == id).count()
    }

    /// Singletons first, then edges, each in id order.
    pub fn strata(&self) -> Vec<Stratum> {
        let mut out: Vec<Stratum> = self.divisors.iter().map(|d| Stratum::Single(d.id)).collect();
        out.sort();
        out.extend(self.edges.iter().map(|&(a, b)| Stratum::Pair(a, b)));
        out
    }

    /// Strata that meet the preimage of the origin.
    pub fn strata_in_mode(&self, origin_only: bool) -> Vec<Stratum> {
        self.strata()
            .into_iter()
            .filter(|s| !origin_only || s.members().iter().any(|&i| self.over_origin(i)))
            .collect()
    }

    fn over_origin(&self, id: u32) -> bool {
        self.divisor(id).is_some_and(|d| d.over_origin)
    }

    pub fn exceptional(&self) -> impl Iterator<Item = &Divisor> {
        self.divisors.iter().filter(|d| !d.is_strict_transform)
    }

    /// `min (ν_i + 1) / N_i` over the exceptional divisors.
    pub fn log_canonical_threshold(&self) -> Option<BigRational> {
        self.exceptional()
            .map(|d| {
                BigRational::new(
                    BigInt::from(d.discrepancy + 1),
                    BigInt::from(d.multiplicity),
                )
            })
            .min()
    }

    pub fn to_json(&self) -> GraphDocument {
        GraphDocument {
            divisors: self.divisors.clone(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            classes: self
                .classes
                .iter()
                .map(|(s, c)| (s.key(), c.clone()))
                .collect(),
        }
    }

    /// Graphviz rendering of the dual graph.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph resolution {\n");
        for d in &self.divisors {
            let label = if d.is_strict_transform {
                format!("C~ (N={}, nu={})", d.multiplicity, d.discrepancy)
            } else {
                format!("E{} (N={}, nu={})", d.id, d.multiplicity, d.discrepancy)
            };
            let shape = if d.is_strict_transform { "box" } else { "ellipse" };
            let _ = writeln!(out, "  {} [label=\"{}\", shape={}];", d.id, label, shape);
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }

    /// Human-readable divisor table.
    pub fn to_text(&self) -> String {
        let mut out = String::from("id  N    nu   kind\n");
        for d in &self.divisors {
            let kind = if d.is_strict_transform { "strict" } else { "exceptional" };
            let _ = writeln!(
                out,
                "{:<3} {:<4} {:<4} {}",
                d.id, d.multiplicity, d.discrepancy, kind
            );
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "edge {a}-{b}");
        }
        out
    }
}

/// The JSON graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub divisors: Vec<Divisor>,
    pub edges: Vec<[u32; 2]>,
    pub classes: BTreeMap<String, MotivicClass>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Local picture at the current centre: the branch is `u^a = v^b` and the
/// axes `u = 0`, `v = 0` carry the listed divisors, if any.
struct Chart {
    a: u64,
    b: u64,
    on_u: Option<usize>,
    on_v: Option<usize>,
}

impl Chart {
    fn normalize(&mut self) {
        if self.a > self.b {
            std::mem::swap(&mut self.a, &mut self.b);
            std::mem::swap(&mut self.on_u, &mut self.on_v);
        }
    }

    /// Smooth branch, transversal to every divisor through the point.
    fn is_snc(&self) -> bool {
        match (self.a, self.b) {
            (1, 1) => self.on_u.is_none() || self.on_v.is_none(),
            (1, _) => self.on_u.is_none(),
            _ => false,
        }
    }
}

pub fn resolve_pq(p: u64, q: u64) -> Result<ResolutionGraph, ResolutionError> {
    if p < 2 || q <= p {
        return Err(ResolutionError::BadRange(p, q));
    }
    if gcd(p, q) != 1 {
        return Err(ResolutionError::NotCoprime(p, q));
    }
    // (N, ν) per exceptional divisor, in creation order.
    let mut data: Vec<(u64, u64)> = Vec::new();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut chart = Chart {
        a: p,
        b: q,
        on_u: None,
        on_v: None,
    };
    let strict_neighbour = loop {
        chart.normalize();
        if chart.is_snc() {
            break chart.on_u.or(chart.on_v);
        }
        let through: Vec<usize> = chart.on_u.iter().chain(chart.on_v.iter()).copied().collect();
        let n_new = through.iter().map(|&i| data[i].0).sum::<u64>() + chart.a;
        let nu_new = through.iter().map(|&i| data[i].1).sum::<u64>() + 1;
        let new = data.len();
        data.push((n_new, nu_new));
        if let (Some(i), Some(j)) = (chart.on_u, chart.on_v) {
            edges.remove(&(i.min(j), i.max(j)));
        }
        for &i in &through {
            edges.insert((i, new));
        }
        if chart.a == chart.b {
            // u = v: the branch leaves through a free point of the new divisor.
            break Some(new);
        }
        // Chart u = u' v: the branch becomes u'^a = v^(b - a), the new divisor is v = 0.
        chart = Chart {
            a: chart.a,
            b: chart.b - chart.a,
            on_u: chart.on_u,
            on_v: Some(new),
        };
    };
    let strict_neighbour = strict_neighbour.expect("at least one blow-up for p >= 2");

    let strict_id = data.len() as u32 + 1;
    let mut divisors: Vec<Divisor> = data
        .iter()
        .enumerate()
        .map(|(i, &(n, nu))| Divisor {
            id: i as u32 + 1,
            multiplicity: n,
            discrepancy: nu,
            is_strict_transform: false,
            over_origin: true,
        })
        .collect();
    divisors.push(Divisor {
        id: strict_id,
        multiplicity: 1,
        discrepancy: 0,
        is_strict_transform: true,
        over_origin: false,
    });
    let mut edge_ids: BTreeSet<(u32, u32)> = edges
        .into_iter()
        .map(|(i, j)| (i as u32 + 1, j as u32 + 1))
        .collect();
    edge_ids.insert((strict_neighbour as u32 + 1, strict_id));

    let mut graph = ResolutionGraph {
        divisors,
        edges: edge_ids,
        classes: BTreeMap::new(),
    };
    let l = MotivicClass::lefschetz();
    for d in &graph.divisors {
        let class = if d.is_strict_transform {
            // The affine branch minus the origin is G_m via t -> (t^q, t^p).
            &l - &MotivicClass::one()
        } else {
            &l + &MotivicClass::constant(BigInt::from(1 - graph.degree(d.id) as i64))
        };
        graph.classes.insert(Stratum::Single(d.id), class);
    }
    for &(a, b) in &graph.edges {
        graph.classes.insert(Stratum::Pair(a, b), MotivicClass::one());
    }
    Ok(graph)
}

/// Parses and validates a JSON graph document.
pub fn load_graph(json: &str) -> Result<ResolutionGraph, ResolutionError> {
    let doc: GraphDocument =
        serde_json::from_str(json).map_err(|e| ResolutionError::SchemaError(e.to_string()))?;
    graph_from_document(doc)
}

pub fn graph_from_document(doc: GraphDocument) -> Result<ResolutionGraph, ResolutionError> {
    let violation = |msg: String| Err(ResolutionError::InvariantViolation(msg));
    let mut ids = BTreeSet::new();
    for d in &doc.divisors {
        if !ids.insert(d.id) {
            return violation(format!("duplicate divisor id {}", d.id));
        }
        if d.multiplicity == 0 {
            return violation(format!("divisor {} has N = 0", d.id));
        }
        if d.is_strict_transform && (d.multiplicity != 1 || d.discrepancy != 0) {
            return violation(format!(
                "strict transform {} must have (N, nu) = (1, 0), got ({}, {})",
                d.id, d.multiplicity, d.discrepancy
            ));
        }
        if !d.is_strict_transform && d.discrepancy == 0 {
            return violation(format!("exceptional divisor {} has nu = 0", d.id));
        }
    }
    let mut edges = BTreeSet::new();
    for &[a, b] in &doc.edges {
        if a == b {
            return violation(format!("self-intersection edge on {a}"));
        }
        if !ids.contains(&a) || !ids.contains(&b) {
            return violation(format!("edge {a}-{b} references an unknown divisor"));
        }
        if !edges.insert((a.min(b), a.max(b))) {
            return violation(format!("duplicate edge {a}-{b}"));
        }
    }
    // Dual graphs of point blow-ups are forests.
    let mut parent: BTreeMap<u32, u32> = ids.iter().map(|&i| (i, i)).collect();
    fn find(parent: &mut BTreeMap<u32, u32>, x: u32) -> u32 {
        let p = parent[&x];
        if p == x {
            return x;
        }
        let root = find(parent, p);
        parent.insert(x, root);
        root
    }
    for &(a, b) in &edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return violation(format!("edge {a}-{b} closes a cycle"));
        }
        parent.insert(ra, rb);
    }

    let mut graph = ResolutionGraph {
        divisors: doc.divisors,
        edges,
        classes: BTreeMap::new(),
    };
    for (key, class) in doc.classes {
        let stratum = Stratum::parse_key(&key)
            .ok_or_else(|| ResolutionError::SchemaError(format!("bad stratum key {key:?}")))?;
        graph.classes.insert(stratum, class);
    }
    for stratum in graph.strata() {
        let Some(class) = graph.classes.get(&stratum) else {
            return violation(format!("missing class for stratum {}", stratum.key()));
        };
        match stratum {
            Stratum::Single(id) => {
                let d = graph.divisor(id).unwrap();
                if !d.is_strict_transform {
                    let deg = graph.degree(id) as i64;
                    let expected = &MotivicClass::lefschetz()
                        + &MotivicClass::constant(BigInt::from(1 - deg));
                    if *class != expected {
                        return violation(format!(
                            "class of E{id}^o is {class}, expected {expected} for degree {deg}"
                        ));
                    }
                }
            }
            Stratum::Pair(a, b) => {
                if !class.is_zero() && *class != MotivicClass::one() {
                    return violation(format!("edge {a}-{b} must have class 1, got {class}"));
                }
                if class.is_zero() {
                    return violation(format!("edge {a}-{b} has class 0"));
                }
            }
        }
    }
    let known: BTreeSet<Stratum> = graph.strata().into_iter().collect();
    if let Some(extra) = graph.classes.keys().find(|s| !known.contains(s)) {
        return violation(format!("class given for non-stratum {}", extra.key()));
    }
    Ok(graph)
}

/// `max_i N_i`: every contact order from here on is realized.
pub fn threshold(graph: &ResolutionGraph) -> u64 {
    graph.divisors.iter().map(|d| d.multiplicity).max().unwrap_or(0)
}

/// Orders `n <= n_max` of the form `Σ_{j∈J} k_j N_j` with all `k_j >= 1`.
pub fn achievable_orders(graph: &ResolutionGraph, origin_only: bool, n_max: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for stratum in graph.strata_in_mode(origin_only) {
        let ns: Vec<u64> = stratum
            .members()
            .iter()
            .map(|&i| graph.divisor(i).unwrap().multiplicity)
            .collect();
        match ns.as_slice() {
            [a] => out.extend((1..).map(|k| k * a).take_while(|&v| v <= n_max)),
            [a, b] => {
                for i in (1..).map(|k| k * a).take_while(|&v| v + b <= n_max) {
                    out.extend((1..).map(|k| i + k * b).take_while(|&v| v <= n_max));
                }
            }
            _ => unreachable!("strata have one or two members"),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nn(graph: &ResolutionGraph) -> Vec<(u64, u64)> {
        graph
            .exceptional()
            .map(|d| (d.multiplicity, d.discrepancy))
            .collect()
    }

    #[test]
    fn cusp() {
        let g = resolve_pq(2, 3).unwrap();
        assert_eq!(nn(&g), vec![(2, 1), (3, 2), (6, 4)]);
        let strict = g.divisors().last().unwrap();
        assert!(strict.is_strict_transform);
        assert_eq!((strict.multiplicity, strict.discrepancy), (1, 0));
        assert_eq!(
            g.edges().iter().copied().collect::<Vec<_>>(),
            vec![(1, 3), (2, 3), (3, 4)]
        );
        assert_eq!(
            g.stratum_class(&Stratum::Single(3)).unwrap(),
            &(&MotivicClass::lefschetz() - &MotivicClass::constant(2.into()))
        );
        assert_eq!(threshold(&g), 6);
    }

    #[test]
    fn two_five_and_three_four() {
        let g = resolve_pq(2, 5).unwrap();
        assert_eq!(nn(&g), vec![(2, 1), (4, 2), (5, 3), (10, 6)]);
        assert_eq!(threshold(&g), 10);
        let g = resolve_pq(3, 4).unwrap();
        assert_eq!(nn(&g), vec![(3, 1), (4, 2), (8, 4), (12, 6)]);
        assert_eq!(threshold(&g), 12);
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(resolve_pq(2, 4), Err(ResolutionError::NotCoprime(2, 4)));
        assert_eq!(resolve_pq(1, 3), Err(ResolutionError::BadRange(1, 3)));
        assert_eq!(resolve_pq(5, 3), Err(ResolutionError::BadRange(5, 3)));
    }

    #[test]
    fn cusp_achievable_orders() {
        let g = resolve_pq(2, 3).unwrap();
        let orders = achievable_orders(&g, true, 7);
        assert_eq!(orders.into_iter().collect::<Vec<_>>(), vec![2, 3, 4, 6, 7]);
        let orders = achievable_orders(&g, true, 40);
        assert!((6..=40).all(|n| orders.contains(&n)));
        assert!(!orders.contains(&1));
        let global = achievable_orders(&g, false, 10);
        assert!((1..=10).all(|n| global.contains(&n)));
    }

    #[test]
    fn json_round_trip() {
        let g = resolve_pq(2, 3).unwrap();
        let json = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(load_graph(&json).unwrap(), g);
    }

    #[test]
    fn wrong_exceptional_class() {
        let g = resolve_pq(2, 3).unwrap();
        let mut doc = g.to_json();
        // E3 has three edges; claim the class of a divisor with none.
        doc.classes.insert(
            "3".into(),
            &MotivicClass::lefschetz() + &MotivicClass::one(),
        );
        let err = graph_from_document(doc).unwrap_err();
        assert_eq!(err.name(), "InvariantViolation");
    }

    #[test]
    fn strict_transform_discrepancy() {
        let g = resolve_pq(2, 3).unwrap();
        let mut doc = g.to_json();
        doc.divisors.last_mut().unwrap().discrepancy = 1;
        let err = graph_from_document(doc).unwrap_err();
        assert!(matches!(err, ResolutionError::InvariantViolation(ref m) if m.contains("strict")));
    }

    #[test]
    fn schema_and_structure_errors() {
        assert_eq!(load_graph("{").unwrap_err().name(), "SchemaError");
        assert_eq!(load_graph(r#"{"divisors":[]}"#).unwrap_err().name(), "SchemaError");
        let g = resolve_pq(2, 3).unwrap();
        let mut doc = g.to_json();
        doc.edges.push([1, 2]);
        doc.classes.insert("1-2".into(), MotivicClass::one());
        assert_eq!(graph_from_document(doc).unwrap_err().name(), "InvariantViolation");
        let empty = load_graph(r#"{"divisors":[],"edges":[],"classes":{}}"#).unwrap();
        assert!(empty.strata().is_empty());
    }

    #[test]
    fn dot_output_lists_every_edge() {
        let dot = resolve_pq(2, 3).unwrap().to_dot();
        assert!(dot.starts_with("graph resolution {"));
        assert!(dot.contains("1 -- 3;"));
        assert!(dot.contains("3 -- 4;"));
    }
}
