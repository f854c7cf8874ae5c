//! JSON input for weighted gain graphs and affinographic arrangements.
//!
//! Vertices and coordinates are numbered from 1 in files and from 0 in
//! memory. Errors carry the JSON path of the offending field, or the line and
//! column of a syntax error.

use std::fmt;
use std::str::FromStr;

use serde_json::Value;
use thiserror::Error;

use crate::gain_graph::{Edge, GainGraph};
use crate::lattice::LatticeVector;
use crate::orthotope::{AffinographicArrangement, Hyperplane};
use crate::switching::WeightedGainGraph;
use crate::weights::{ColorSet, ConeMinusFinite, FiniteList, MaxZd, SumZd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field_error(path: &str, message: impl Into<String>) -> InputError {
    InputError::Field { path: if path.is_empty() { "<root>".into() } else { path.into() }, message: message.into() }
}

/// A JSON value together with its path from the document root.
#[derive(Clone, Copy)]
struct Node<'a> {
    value: &'a Value,
    path: &'a str,
}

struct Owned<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Owned<'a> {
    fn node(&self) -> Node<'_> {
        Node { value: self.value, path: &self.path }
    }
}

impl<'a> Node<'a> {
    fn err(&self, message: impl Into<String>) -> InputError {
        field_error(self.path, message)
    }

    fn child(&self, key: &str) -> Option<Owned<'a>> {
        self.value.get(key).map(|value| Owned { value, path: join_path(self.path, key) })
    }

    fn require(&self, key: &str) -> Result<Owned<'a>, InputError> {
        if !self.value.is_object() {
            return Err(self.err("expected an object"));
        }
        self.child(key).ok_or_else(|| field_error(&join_path(self.path, key), "missing field"))
    }

    fn items(&self) -> Result<Vec<Owned<'a>>, InputError> {
        let arr = self.value.as_array().ok_or_else(|| self.err("expected an array"))?;
        Ok(arr.iter().enumerate().map(|(i, value)| Owned { value, path: format!("{}[{i}]", self.path) }).collect())
    }

    fn int(&self) -> Result<i64, InputError> {
        self.value.as_i64().ok_or_else(|| self.err("expected an integer"))
    }

    fn count(&self) -> Result<usize, InputError> {
        self.value.as_u64().map(|v| v as usize).ok_or_else(|| self.err("expected a nonnegative integer"))
    }

    /// A 1-based index in `1..=n`, returned 0-based.
    fn index(&self, n: usize, what: &str) -> Result<usize, InputError> {
        let v = self.count()?;
        if v == 0 || v > n {
            return Err(self.err(format!("{what} {v} out of range 1..={n}")));
        }
        Ok(v - 1)
    }

    /// An integer vector of length `d`; a bare integer is accepted when `d = 1`.
    fn vector(&self, d: usize) -> Result<LatticeVector, InputError> {
        if let Some(x) = self.value.as_i64() {
            if d == 1 {
                return Ok(LatticeVector::from(vec![x]));
            }
            return Err(self.err(format!("expected a vector of length {d}")));
        }
        let items = self.items().map_err(|_| self.err(format!("expected a vector of length {d}")))?;
        if items.len() != d {
            return Err(self.err(format!("expected a vector of length {d}, found length {}", items.len())));
        }
        let coords = items.iter().map(|c| c.node().int()).collect::<Result<Vec<_>, _>>()?;
        Ok(LatticeVector::from(coords))
    }

    fn vectors(&self, d: usize) -> Result<Vec<LatticeVector>, InputError> {
        self.items()?.iter().map(|x| x.node().vector(d)).collect()
    }

    /// `[p, ...]` (finite), `"all"`, or `{"lower": p?, "upper": p?, "exclude": [p, ...]?}`.
    fn color_set(&self, d: usize) -> Result<ColorSet, InputError> {
        match self.value {
            Value::Array(_) => Ok(ColorSet::finite(d, self.vectors(d)?)),
            Value::String(s) if s == "all" => Ok(ColorSet::full(d)),
            Value::Object(map) => {
                if let Some(key) = map.keys().find(|k| !matches!(k.as_str(), "lower" | "upper" | "exclude")) {
                    return Err(field_error(&join_path(self.path, key), "unknown field"));
                }
                let mut set = ColorSet::full(d);
                if let Some(lo) = self.child("lower") {
                    set = set.intersect(&ColorSet::cone(lo.node().vector(d)?));
                }
                if let Some(hi) = self.child("upper") {
                    set = set.intersect(&ColorSet::ideal(hi.node().vector(d)?));
                }
                if let Some(ex) = self.child("exclude") {
                    set = set.without(ex.node().vectors(d)?);
                }
                Ok(set)
            }
            _ => Err(self.err("expected a point list, \"all\", or {lower, upper, exclude}")),
        }
    }

    fn per_vertex<T>(&self, n: usize, f: impl Fn(Node<'_>) -> Result<T, InputError>) -> Result<Vec<T>, InputError> {
        let items = self.items()?;
        if items.len() != n {
            return Err(self.err(format!("expected {n} entries, found {}", items.len())));
        }
        items.iter().map(|x| f(x.node())).collect()
    }
}

fn join_path(base: &str, key: &str) -> String {
    if base.is_empty() {
        key.to_string()
    } else {
        format!("{base}.{key}")
    }
}

fn parse_json(text: &str) -> Result<Value, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    })
}

fn root(value: &Value) -> Node<'_> {
    Node { value, path: "" }
}

/// The weight semigroups that can be read from a file.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Semigroup {
    MaxZd,
    SumZd,
    FiniteList,
    ConeMinusFinite,
}

impl Semigroup {
    pub const NAMES: [&'static str; 4] = ["max-zd", "sum-zd", "finite-list", "cone-minus-finite"];
}

impl FromStr for Semigroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "max-zd" => Ok(Self::MaxZd),
            "sum-zd" => Ok(Self::SumZd),
            "finite-list" => Ok(Self::FiniteList),
            "cone-minus-finite" => Ok(Self::ConeMinusFinite),
            other => Err(format!("unknown semigroup {other:?}; expected one of {}", Self::NAMES.join(", "))),
        }
    }
}

impl fmt::Display for Semigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::MaxZd => "max-zd",
            Self::SumZd => "sum-zd",
            Self::FiniteList => "finite-list",
            Self::ConeMinusFinite => "cone-minus-finite",
        };
        f.write_str(name)
    }
}

/// A weighted gain graph with any of the readable semigroups.
#[derive(Clone, Debug)]
pub enum AnyWeighted {
    MaxZd(WeightedGainGraph<MaxZd>),
    SumZd(WeightedGainGraph<SumZd>),
    FiniteList(WeightedGainGraph<FiniteList>),
    ConeMinusFinite(WeightedGainGraph<ConeMinusFinite>),
}

/// A parsed graph file:
///
/// ```json
/// { "n": 2, "d": 2,
///   "edges": [{"tail": 1, "head": 2, "gain": [2, 0]}, {"loop": 1, "gain": [1, 0]},
///             {"half": 2}, {"loose": true}],
///   "semigroup": "max-zd", "weights": [[2, 0], [-1, 3]],
///   "lists": [...], "filter": [...], "m": [[3, 3], [4, 4]] }
/// ```
///
/// Everything after `edges` is optional.
#[derive(Clone, Debug)]
pub struct GraphInput {
    pub graph: GainGraph,
    pub semigroup: Option<Semigroup>,
    pub lists: Option<Vec<ColorSet>>,
    pub filter: Option<Vec<ColorSet>>,
    pub m: Option<Vec<LatticeVector>>,
    weights: Option<Value>,
}

fn parse_edge(node: Node<'_>, n: usize, d: usize) -> Result<Edge, InputError> {
    if !node.value.is_object() {
        return Err(node.err("expected an edge object"));
    }
    let gain = || node.require("gain").and_then(|g| g.node().vector(d));
    if let Some(tail) = node.child("tail") {
        let tail = tail.node().index(n, "vertex")?;
        let head = node.require("head")?.node().index(n, "vertex")?;
        if tail == head {
            return Err(node.err("a link needs two distinct endpoints; use {\"loop\": v}"));
        }
        return Ok(Edge::Link { tail, head, gain: gain()? });
    }
    if let Some(v) = node.child("loop") {
        return Ok(Edge::Loop { vertex: v.node().index(n, "vertex")?, gain: gain()? });
    }
    if let Some(v) = node.child("half") {
        return Ok(Edge::Half { vertex: v.node().index(n, "vertex")? });
    }
    if node.child("loose").is_some() {
        return Ok(Edge::Loose);
    }
    Err(node.err("edge must have one of tail/head, loop, half, loose"))
}

pub fn parse_graph(text: &str) -> Result<GraphInput, InputError> {
    let doc = parse_json(text)?;
    let top = root(&doc);
    let n = top.require("n")?.node().count()?;
    let d = top.require("d")?.node().count()?;
    if d == 0 {
        return Err(field_error("d", "dimension must be at least 1"));
    }
    let edges = top
        .require("edges")?
        .node()
        .items()?
        .iter()
        .map(|e| parse_edge(e.node(), n, d))
        .collect::<Result<Vec<_>, _>>()?;
    let graph = GainGraph::new(d, n, edges).map_err(|e| field_error("edges", e.to_string()))?;
    let semigroup = match top.child("semigroup") {
        Some(s) => {
            let name = s.value.as_str().ok_or_else(|| s.node().err("expected a string"))?;
            Some(name.parse::<Semigroup>().map_err(|e| s.node().err(e))?)
        }
        None => None,
    };
    let lists = top.child("lists").map(|l| l.node().per_vertex(n, |x| x.color_set(d))).transpose()?;
    let filter = top.child("filter").map(|l| l.node().per_vertex(n, |x| x.color_set(d))).transpose()?;
    let m = top.child("m").map(|l| l.node().per_vertex(n, |x| x.vector(d))).transpose()?;
    Ok(GraphInput { graph, semigroup, lists, filter, m, weights: top.child("weights").map(|w| w.value.clone()) })
}

impl GraphInput {
    /// Attach the `weights` field, read in the given semigroup.
    pub fn weighted(&self, semigroup: Semigroup) -> Result<AnyWeighted, InputError> {
        let raw = self.weights.as_ref().ok_or_else(|| field_error("weights", "missing field"))?;
        let node = Node { value: raw, path: "weights" };
        let n = self.graph.vertex_count();
        let d = self.graph.dim();
        let g = self.graph.clone();
        let wrap = |e: crate::switching::WeightedGraphError| field_error("weights", e.to_string());
        Ok(match semigroup {
            Semigroup::MaxZd => {
                AnyWeighted::MaxZd(WeightedGainGraph::new(g, node.per_vertex(n, |x| x.vector(d).map(MaxZd))?).map_err(wrap)?)
            }
            Semigroup::SumZd => AnyWeighted::SumZd(
                WeightedGainGraph::new(g, node.per_vertex(n, |x| x.vector(d).map(SumZd::new))?).map_err(wrap)?,
            ),
            Semigroup::FiniteList => AnyWeighted::FiniteList(
                WeightedGainGraph::new(g, node.per_vertex(n, |x| x.vectors(d).map(FiniteList::new))?).map_err(wrap)?,
            ),
            Semigroup::ConeMinusFinite => AnyWeighted::ConeMinusFinite(
                WeightedGainGraph::new(g, node.per_vertex(n, |x| cone_minus_finite(x, d))?).map_err(wrap)?,
            ),
        })
    }
}

/// `{"apex": p, "exclude": [p, ...]}`.
fn cone_minus_finite(node: Node<'_>, d: usize) -> Result<ConeMinusFinite, InputError> {
    let apex = node.require("apex")?.node().vector(d)?;
    let exclusions = match node.child("exclude") {
        Some(ex) => ex.node().vectors(d)?,
        None => Vec::new(),
    };
    ConeMinusFinite::new(apex, exclusions).map_err(|e| node.err(e.to_string()))
}

/// A parsed arrangement file:
///
/// ```json
/// { "n": 2, "d": 1, "hyperplanes": [{"i": 1, "j": 2, "a": 0}],
///   "lists": [[0, 2, 5], [0, 2, 5]], "m": [2, 3], "h": [0, 0] }
/// ```
///
/// `x_j = x_i + a`; `lists`, `m` (upper bounds) and `h` (lower bounds) are optional.
#[derive(Clone, Debug)]
pub struct ArrangementInput {
    pub arrangement: AffinographicArrangement,
    pub lists: Option<Vec<ColorSet>>,
    pub m: Option<Vec<LatticeVector>>,
    pub h: Option<Vec<LatticeVector>>,
}

pub fn parse_arrangement(text: &str) -> Result<ArrangementInput, InputError> {
    let doc = parse_json(text)?;
    let top = root(&doc);
    let n = top.require("n")?.node().count()?;
    let d = top.require("d")?.node().count()?;
    if d == 0 {
        return Err(field_error("d", "dimension must be at least 1"));
    }
    let mut hyperplanes = Vec::new();
    for item in top.require("hyperplanes")?.node().items()? {
        let node = item.node();
        hyperplanes.push(Hyperplane {
            i: node.require("i")?.node().index(n, "coordinate")?,
            j: node.require("j")?.node().index(n, "coordinate")?,
            a: node.require("a")?.node().vector(d)?,
        });
    }
    let arrangement = AffinographicArrangement::new(n, d, hyperplanes).map_err(|e| field_error("hyperplanes", e.to_string()))?;
    let lists = top.child("lists").map(|l| l.node().per_vertex(n, |x| x.color_set(d))).transpose()?;
    let m = top.child("m").map(|l| l.node().per_vertex(n, |x| x.vector(d))).transpose()?;
    let h = top.child("h").map(|l| l.node().per_vertex(n, |x| x.vector(d))).transpose()?;
    Ok(ArrangementInput { arrangement, lists, m, h })
}

/// Bounds written as rows separated by `;` with entries separated by `,`,
/// e.g. `3,3;4,4`. With `d = 1` a single row `2,3` is read as one scalar per
/// vertex.
pub fn parse_rows(text: &str, d: usize) -> Result<Vec<LatticeVector>, InputError> {
    let err = |message: String| field_error("--m", message);
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| err(format!("{:?} is not an integer", x.trim()))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if d == 1 && rows.len() == 1 {
        return Ok(rows[0].iter().map(|&x| LatticeVector::from(vec![x])).collect());
    }
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() == d {
                Ok(LatticeVector::from(row))
            } else {
                Err(err(format!("row {} has {} entries, expected {d}", i + 1, row.len())))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const STAR: &str = r#"{"n": 2, "d": 2, "semigroup": "max-zd",
        "edges": [{"tail": 1, "head": 2, "gain": [0, 0]},
                  {"tail": 1, "head": 2, "gain": [2, 0]},
                  {"tail": 1, "head": 2, "gain": [-1, 2]}],
        "weights": [[2, 0], [-1, 3]]}"#;

    #[test]
    fn reads_graph_and_weights() {
        let input = parse_graph(STAR).unwrap();
        assert_eq!(input.graph.edge_count(), 3);
        assert_eq!(input.semigroup, Some(Semigroup::MaxZd));
        match input.weighted(Semigroup::SumZd).unwrap() {
            AnyWeighted::SumZd(wg) => assert_eq!(wg.weight(1).sum, LatticeVector::from(vec![-1, 3])),
            other => panic!("unexpected {other:?}"),
        }
        assert!(input.weighted(Semigroup::FiniteList).is_err());
    }

    #[test]
    fn reports_field_paths() {
        let bad = STAR.replace("[-1, 2]", "[-1]");
        assert_eq!(
            parse_graph(&bad).unwrap_err(),
            field_error("edges[2].gain", "expected a vector of length 2, found length 1")
        );
        let bad = STAR.replace("\"head\": 2, \"gain\": [2, 0]", "\"head\": 3, \"gain\": [2, 0]");
        assert!(matches!(parse_graph(&bad), Err(InputError::Field { path, .. }) if path == "edges[1].head"));
        assert!(matches!(parse_graph("{\"n\": 2,\n \"d\": }"), Err(InputError::Syntax { line: 2, .. })));
        assert!(matches!(parse_graph("{\"n\": 2, \"edges\": []}"), Err(InputError::Field { path, .. }) if path == "d"));
    }

    #[test]
    fn color_sets_and_cones() {
        let text = r#"{"n": 2, "d": 1, "edges": [{"loose": true}, {"half": 2}, {"loop": 1, "gain": 3}],
            "lists": [[0, 2], {"lower": 0, "exclude": [1]}], "filter": ["all", {"upper": 4}],
            "weights": [{"apex": 0, "exclude": [2]}, {"apex": 1}]}"#;
        let input = parse_graph(text).unwrap();
        let lists = input.lists.clone().unwrap();
        assert_eq!(lists[0].count(), Some(2u32.into()));
        assert!(!lists[1].contains(&LatticeVector::from(vec![1])));
        assert!(input.filter.clone().unwrap()[1].contains(&LatticeVector::from(vec![-7])));
        match input.weighted(Semigroup::ConeMinusFinite).unwrap() {
            AnyWeighted::ConeMinusFinite(wg) => assert_eq!(wg.weight(0).hat(), LatticeVector::from(vec![2])),
            other => panic!("unexpected {other:?}"),
        }
        let outside = text.replace("\"exclude\": [2]", "\"exclude\": [-2]");
        let err = parse_graph(&outside).unwrap().weighted(Semigroup::ConeMinusFinite).unwrap_err();
        assert!(matches!(err, InputError::Field { path, .. } if path == "weights[0]"));
    }

    #[test]
    fn arrangements_and_rows() {
        let text = r#"{"n": 2, "d": 1, "hyperplanes": [{"i": 1, "j": 2, "a": 1}], "m": [2, 3]}"#;
        let input = parse_arrangement(text).unwrap();
        assert_eq!(input.arrangement.hyperplanes()[0].j, 1);
        assert_eq!(input.m.unwrap()[1], LatticeVector::from(vec![3]));
        let degenerate = text.replace("\"j\": 2, \"a\": 1", "\"j\": 1, \"a\": 0");
        assert!(matches!(parse_arrangement(&degenerate), Err(InputError::Field { path, .. }) if path == "hyperplanes"));
        assert_eq!(parse_rows("2,3", 1).unwrap().len(), 2);
        assert_eq!(parse_rows("3,3;4,4", 2).unwrap()[1], LatticeVector::from(vec![4, 4]));
        assert!(parse_rows("3,3;4", 2).is_err());
        assert!(parse_rows("3,x", 1).is_err());
    }
}
